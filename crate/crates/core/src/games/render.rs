use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::spec::GameSpec;

const TEMPLATE_JSON: &str = include_str!("../../data/instruction_template.json");

#[derive(Deserialize)]
struct Template {
    version: String,
    opening: String,
    points: BTreeMap<String, String>,
    pairing: String,
    bonus: BTreeMap<String, String>,
    closing: String,
}

fn template() -> &'static Template {
    static T: OnceLock<Template> = OnceLock::new();
    T.get_or_init(|| serde_json::from_str(TEMPLATE_JSON).expect("bundled instruction template parses"))
}

/// Version tag of the bundled instruction template; part of every cache key
/// derived from rendered text.
pub static TEMPLATE_VERSION: &str = "1";

fn fill(text: &str, spec: &GameSpec) -> String {
    text.replace("{lower}", &spec.lower_bound.to_string())
        .replace("{upper_minus_2}", &(spec.upper_bound - 2).to_string())
        .replace("{upper}", &spec.upper_bound.to_string())
        .replace("{bonus}", &spec.bonus_size.to_string())
        .replace("{gap}", &spec.gap.to_string())
}

pub fn render_instructions(spec: &GameSpec) -> String {
    let t = template();
    debug_assert_eq!(t.version, TEMPLATE_VERSION);
    let parts = [
        t.opening.as_str(),
        &t.points[spec.points_rule.label()],
        &t.pairing,
        &t.bonus[spec.bonus_rule.label()],
        &t.closing,
    ];
    parts.iter().map(|p| fill(p, spec)).collect::<Vec<_>>().join(" ")
}
