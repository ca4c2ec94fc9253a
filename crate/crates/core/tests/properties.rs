use agentpred::agents::{
    elicit_distribution, mixture_distribution, parse_response, Action, AgentModel, ElicitContext, Level0Rule,
    ResponseDistribution, Setting, TieRule,
};
use agentpred::equilibria::{enumerate_nash, NashConfig};
use agentpred::games::{dedup_specs, BonusRule, GameSpec, PointsRule, SymmetricGame};
use agentpred::optimize::{
    distance_probs, minimize_integer_box, select_mixture_probs, Budget, ConstructConfig, DistanceKind, DistanceMeasure,
    IntBox, SelectConfig,
};
use agentpred::stats::{aggregate, clopper_pearson, game_llr, smooth, AggregateConfig, GameComparison};
use agentpred::Exec;
use proptest::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

fn spec_strategy() -> impl Strategy<Value = GameSpec> {
    (1i64..=30, 4i64..=19, 1i64..=4, 1i64..=25, 0usize..6, 0usize..11).prop_map(|(lo, off, gap, bonus, p, b)| GameSpec {
        lower_bound: lo,
        upper_bound: lo + off,
        gap,
        bonus_size: bonus,
        points_rule: PointsRule::ALL[p],
        bonus_rule: BonusRule::ALL[b],
    })
}

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn setting(k: usize) -> Setting {
    Setting::new("property", (1..=k as i64).map(Action::Int).collect(), None).unwrap()
}

fn indicator(spec: &GameSpec, rule: BonusRule) -> Vec<bool> {
    let s = GameSpec { bonus_rule: rule, ..*spec };
    s.actions().flat_map(|i| s.actions().map(move |j| s.bonus_fires(i, j))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn payoff_is_points_plus_optional_bonus(spec in spec_strategy()) {
        let g = SymmetricGame::from_spec(&spec).unwrap();
        for (i, a) in g.actions().iter().enumerate() {
            let base = spec.guaranteed_points(*a).unwrap();
            for j in 0..g.n() {
                let extra = g.payoff(i, j) - base;
                prop_assert!(extra == 0 || extra == spec.bonus_size);
            }
        }
    }

    #[test]
    fn complementary_rule_pairs(spec in spec_strategy()) {
        for (a, b) in [(BonusRule::Equal, BonusRule::Unequal), (BonusRule::SumEven, BonusRule::SumOdd)] {
            let (x, y) = (indicator(&spec, a), indicator(&spec, b));
            prop_assert!(x.iter().zip(&y).all(|(p, q)| p ^ q));
        }
    }

    #[test]
    fn gap_free_rules_ignore_gap(spec in spec_strategy(), other_gap in 1i64..=4) {
        prop_assume!(!spec.bonus_rule.uses_gap());
        let moved = GameSpec { gap: other_gap, ..spec };
        prop_assert_eq!(SymmetricGame::from_spec(&spec).unwrap().to_rows(), SymmetricGame::from_spec(&moved).unwrap().to_rows());
    }

    #[test]
    fn dedup_is_idempotent(specs in prop::collection::vec(spec_strategy(), 1..40)) {
        let (once, _) = dedup_specs(&specs, Exec::Sequential);
        let (twice, classes) = dedup_specs(&once, Exec::Parallel);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(classes, (0..once.len() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn shifted_games_share_equilibria(rows in prop::collection::vec(prop::collection::vec(0i64..10, 3), 3), c in -20i64..20) {
        let g = SymmetricGame::from_matrix(rows).unwrap();
        let cfg = NashConfig::default();
        let a = enumerate_nash(&g, &cfg).unwrap();
        let b = enumerate_nash(&g.shifted(c), &cfg).unwrap();
        let strategies = |s: &agentpred::equilibria::NashSet| {
            s.equilibria.iter().map(|e| (e.row.clone(), e.col.clone())).collect::<Vec<_>>()
        };
        prop_assert_eq!(strategies(&a), strategies(&b));
    }

    #[test]
    fn mechanical_elicitation_is_reproducible(spec in spec_strategy(), level in 0u32..4, seed in any::<u64>()) {
        let s = Setting::from_spec(&spec);
        let ctx = ElicitContext::new();
        for model in [
            AgentModel::MechanicalLevelK { level, level0: Level0Rule::MaxGuaranteed, ties: TieRule::default() },
            AgentModel::Uniform,
            AgentModel::RandomPure { seed },
        ] {
            let a = elicit_distribution(&model, &s, 40, seed, &ctx).unwrap();
            let b = elicit_distribution(&model, &s, 40, seed, &ctx).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn nested_mixture_flattens(a in simplex(5), b in simplex(5), c in simplex(5), w in 0.0f64..1.0, v in 0.0f64..1.0) {
        let s = setting(5);
        let d = |p: &Vec<f64>| ResponseDistribution::from_probs(&s, p.clone(), 0.0).unwrap();
        let inner = mixture_distribution(&[d(&a), d(&b)], &[w, 1.0 - w]).unwrap();
        let nested = mixture_distribution(&[inner, d(&c)], &[v, 1.0 - v]).unwrap();
        let flat = mixture_distribution(&[d(&a), d(&b), d(&c)], &[v * w, v * (1.0 - w), 1.0 - v]).unwrap();
        for (x, y) in nested.probs.iter().zip(&flat.probs) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rendered_answers_parse(lo in 1i64..40, off in 4i64..19, pick in 0i64..19) {
        let s = Setting::new("parse", (lo..=lo + off).map(Action::Int).collect(), None).unwrap();
        let n = lo + pick.min(off);
        prop_assert_eq!(parse_response(&format!("I would request {n}."), &s), Some(Action::Int(n)));
    }

    #[test]
    fn relabelling_moves_only_order_sensitive_distances(p in simplex(6), q in simplex(6), shift in 1usize..6) {
        let spacing = vec![1.0; 5];
        let rot = |v: &[f64]| (0..6).map(|i| v[(i + shift) % 6]).collect::<Vec<_>>();
        for kind in [DistanceKind::ForwardKl, DistanceKind::MeanAbsoluteError] {
            let m = DistanceMeasure::new(kind);
            let before = distance_probs(&p, &q, &m, &spacing).unwrap();
            let after = distance_probs(&rot(&p), &rot(&q), &m, &spacing).unwrap();
            prop_assert!((before - after).abs() < 1e-12);
        }
        for kind in [DistanceKind::ForwardKl, DistanceKind::MeanAbsoluteError, DistanceKind::CdfAbsolute, DistanceKind::EarthMover1d] {
            prop_assert!(distance_probs(&p, &p, &DistanceMeasure::new(kind), &spacing).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_traces_never_increase(c in prop::collection::vec(simplex(5), 3), t in simplex(5), seed in any::<u64>()) {
        let refs: Vec<&[f64]> = c.iter().map(Vec::as_slice).collect();
        let cfg = SelectConfig { restarts: 4, ..SelectConfig::default() };
        let (w, obj, traces, _, _) =
            select_mixture_probs(&refs, &t, &DistanceMeasure::new(DistanceKind::CdfAbsolute), &[1.0; 4], seed, &cfg).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9 && w.iter().all(|x| *x >= -1e-12));
        for tr in &traces {
            prop_assert!(tr.objectives.windows(2).all(|p| p[1] <= p[0] + 1e-12));
            prop_assert!(obj <= tr.objectives.last().copied().unwrap() + 1e-12);
        }
    }

    #[test]
    fn construction_log_stays_in_box(lo in prop::collection::vec(-5i64..5, 3), span in prop::collection::vec(1i64..6, 3), seed in any::<u64>()) {
        let ranges: Vec<(i64, i64)> = lo.iter().zip(&span).map(|(&l, &s)| (l, l + s)).collect();
        let bx = IntBox::new(ranges).unwrap();
        let budget = Budget { init: 4, guided: 8 };
        let fit = minimize_integer_box(&bx, 3, &ConstructConfig::new(budget, seed), |p| {
            Ok(p.iter().map(|&v| ((v * 7 + 3) % 5) as f64).sum())
        })
        .unwrap();
        let mut seen = std::collections::HashSet::new();
        for e in &fit.log {
            prop_assert!(bx.contains(&e.point));
            prop_assert!(seen.insert(e.point.clone()));
        }
        prop_assert_eq!(fit.log.len() as u128, (budget.total() as u128).min(bx.size()));
    }

    #[test]
    fn smoothing_is_affine_and_commutes_with_mixture(a in simplex(7), b in simplex(7), w in 0.0f64..1.0, eps in 0.0f64..0.9) {
        let s = setting(7);
        let d = |p: &Vec<f64>| ResponseDistribution::from_probs(&s, p.clone(), 0.0).unwrap();
        let mixed = mixture_distribution(&[d(&a), d(&b)], &[w, 1.0 - w]).unwrap();
        let lhs = smooth(&mixed, eps).unwrap().probs;
        let (sa, sb) = (smooth(&d(&a), eps).unwrap().probs, smooth(&d(&b), eps).unwrap().probs);
        for i in 0..7 {
            prop_assert!((lhs[i] - (w * sa[i] + (1.0 - w) * sb[i])).abs() < 1e-12);
            prop_assert!((sa[i] - ((1.0 - eps) * a[i] + eps / 7.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn llr_antisymmetry_and_shift_cancellation(
        a in simplex(6), b in simplex(6), ys in prop::collection::vec(1i64..=6, 1..30), eps in 0.01f64..0.5, c in 0.1f64..10.0
    ) {
        let s = setting(6);
        let ma = smooth(&ResponseDistribution::from_probs(&s, a, 0.0).unwrap(), eps).unwrap();
        let mb = smooth(&ResponseDistribution::from_probs(&s, b, 0.0).unwrap(), eps).unwrap();
        let ys: Vec<Action> = ys.into_iter().map(Action::Int).collect();
        let ab = game_llr("g", &ys, &ma, &mb).unwrap();
        let ba = game_llr("g", &ys, &mb, &ma).unwrap();
        prop_assert_eq!(ab.llr, -ba.llr);
        // A common factor adds log c to every term of both models.
        let scale = |m: &agentpred::stats::SmoothedModel| {
            let mut m = m.clone();
            m.probs.iter_mut().for_each(|p| *p *= c);
            m
        };
        let shifted = game_llr("g", &ys, &scale(&ma), &scale(&mb)).unwrap();
        prop_assert!((shifted.llr - ab.llr).abs() < 1e-12);
    }

    #[test]
    fn union_mean_is_size_weighted(x in prop::collection::vec(-3.0f64..3.0, 2..20), y in prop::collection::vec(-3.0f64..3.0, 2..20)) {
        let comps = |v: &[f64], tag: &str| -> Vec<GameComparison> {
            v.iter().enumerate().map(|(i, &l)| GameComparison { game_id: format!("{tag}{i}"), responses: 1, llr: l, terms: vec![l] }).collect()
        };
        let mut cfg = AggregateConfig::new(1);
        cfg.bootstrap_draws = 10;
        cfg.permutation_iterations = 10;
        let (cx, cy) = (comps(&x, "x"), comps(&y, "y"));
        let all: Vec<GameComparison> = cx.iter().chain(&cy).cloned().collect();
        let (mx, my, mu) = (
            aggregate(&cx, &cfg).unwrap().mean_llr,
            aggregate(&cy, &cfg).unwrap().mean_llr,
            aggregate(&all, &cfg).unwrap().mean_llr,
        );
        let (nx, ny) = (x.len() as f64, y.len() as f64);
        prop_assert!((mu - (nx * mx + ny * my) / (nx + ny)).abs() < 1e-12);
    }
}

/// Beta-quantile oracle for the exact interval, from statrs' inverse CDF.
fn cp_oracle(x: u64, n: u64, level: f64) -> (f64, f64) {
    let a = (1.0 - level) / 2.0;
    let lower = if x == 0 { 0.0 } else { Beta::new(x as f64, (n - x + 1) as f64).unwrap().inverse_cdf(a) };
    let upper = if x == n { 1.0 } else { Beta::new((x + 1) as f64, (n - x) as f64).unwrap().inverse_cdf(1.0 - a) };
    (lower, upper)
}

#[test]
fn clopper_pearson_is_monotone_and_matches_oracle() {
    for n in 1..=50u64 {
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for x in 0..=n {
            let ci = clopper_pearson(x as usize, n as usize, 0.95).unwrap();
            let (lo, hi) = cp_oracle(x, n, 0.95);
            assert!((ci.lower - lo).abs() < 1e-8 && (ci.upper - hi).abs() < 1e-8, "x={x} n={n}");
            assert!(ci.lower >= prev.0 && ci.upper >= prev.1, "not monotone at x={x} n={n}");
            prev = (ci.lower, ci.upper);
        }
    }
}

#[test]
fn family_enumeration_repeats() {
    let cfg = agentpred::games::FamilyConfig::default();
    let a: Vec<GameSpec> = agentpred::games::enumerate_family(&cfg).step_by(9973).collect();
    let b: Vec<GameSpec> = agentpred::games::enumerate_family(&cfg).step_by(9973).collect();
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0] != w[1]));
}
