use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::{Action, ResponseDistribution, Setting};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HumanResponse {
    pub subject: String,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanGame {
    pub game_id: String,
    pub setting: Setting,
    pub counts: Vec<u64>,
    pub responses: Vec<HumanResponse>,
}

impl HumanGame {
    pub fn new(game_id: String, setting: Setting, responses: Vec<HumanResponse>) -> Result<Self> {
        let mut counts = vec![0u64; setting.k()];
        for r in &responses {
            let i = setting
                .index_of(&r.action)
                .ok_or_else(|| Error::invalid(format!("action {} not offered in game {game_id}", r.action)))?;
            counts[i] += 1;
        }
        Ok(HumanGame { game_id, setting, counts, responses })
    }

    pub fn actions(&self) -> Vec<Action> {
        self.responses.iter().map(|r| r.action.clone()).collect()
    }

    pub fn distribution(&self) -> Result<ResponseDistribution> {
        ResponseDistribution::from_counts(&self.setting, self.counts.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestFilters {
    /// Drop actions outside the game's action set instead of failing.
    pub range_check: bool,
    /// Drop fractional numeric answers instead of failing.
    pub whole_number_check: bool,
}

impl Default for IngestFilters {
    fn default() -> Self {
        IngestFilters { range_check: true, whole_number_check: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub rows: usize,
    pub kept: usize,
    pub out_of_range: usize,
    pub not_whole: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanDataset {
    pub source: String,
    pub games: Vec<HumanGame>,
    pub notes: Vec<String>,
    pub filter_report: FilterReport,
}

impl HumanDataset {
    pub fn responses(&self) -> usize {
        self.games.iter().map(|g| g.responses.len()).sum()
    }

    pub fn game(&self, id: &str) -> Option<&HumanGame> {
        self.games.iter().find(|g| g.game_id == id)
    }

    /// game_id, subject_id, action rows in game then response order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["game_id", "subject_id", "action"])?;
        for g in &self.games {
            for r in &g.responses {
                out.write_record([g.game_id.as_str(), r.subject.as_str(), &r.action.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

enum Parsed {
    Keep(Action),
    OutOfRange,
    NotWhole,
}

fn parse_action(raw: &str, setting: &Setting) -> std::result::Result<Parsed, String> {
    let raw = raw.trim();
    let numeric = setting.actions.iter().all(|a| matches!(a, Action::Int(_)));
    if numeric {
        let value = match raw.parse::<i64>() {
            Ok(v) => v,
            Err(_) => {
                let f: f64 = raw.parse().map_err(|_| format!("action {raw:?} is not a number"))?;
                if !f.is_finite() {
                    return Err(format!("action {raw:?} is not finite"));
                }
                if f.fract() != 0.0 {
                    return Ok(Parsed::NotWhole);
                }
                f as i64
            }
        };
        let a = Action::Int(value);
        return Ok(if setting.index_of(&a).is_some() { Parsed::Keep(a) } else { Parsed::OutOfRange });
    }
    Ok(setting
        .actions
        .iter()
        .find(|a| a.to_string().eq_ignore_ascii_case(raw))
        .map_or(Parsed::OutOfRange, |a| Parsed::Keep(a.clone())))
}

/// Reads a (game_id, subject_id, action) CSV against known settings keyed by
/// game id. Games keep the order of `settings`; games without responses are
/// omitted.
pub fn ingest_human_csv(path: &Path, settings: &BTreeMap<String, Setting>, filters: IngestFilters) -> Result<HumanDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MalformedRow { line: 1, message: format!("missing column {name}") })
    };
    let (gi, si, ai) = (col("game_id")?, col("subject_id")?, col("action")?);

    let mut report = FilterReport::default();
    let mut seen = HashSet::new();
    let mut by_game: BTreeMap<String, Vec<HumanResponse>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize, name: &str| {
            record
                .get(i)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::MalformedRow { line, message: format!("empty {name}") })
        };
        let (game, subject, action) = (field(gi, "game_id")?, field(si, "subject_id")?, field(ai, "action")?);
        report.rows += 1;
        if !seen.insert((game.to_string(), subject.to_string())) {
            return Err(Error::DuplicateResponse { game: game.into(), subject: subject.into() });
        }
        let setting = settings
            .get(game)
            .ok_or_else(|| Error::MalformedRow { line, message: format!("unknown game {game}") })?;
        match parse_action(action, setting).map_err(|message| Error::MalformedRow { line, message })? {
            Parsed::Keep(a) => {
                report.kept += 1;
                by_game.entry(game.to_string()).or_default().push(HumanResponse { subject: subject.into(), action: a });
            }
            Parsed::OutOfRange if filters.range_check => report.out_of_range += 1,
            Parsed::NotWhole if filters.whole_number_check => report.not_whole += 1,
            Parsed::OutOfRange => {
                return Err(Error::MalformedRow { line, message: format!("action {action} not offered in {game}") })
            }
            Parsed::NotWhole => return Err(Error::MalformedRow { line, message: format!("action {action} is not whole") }),
        }
    }

    let mut games = Vec::new();
    for (id, setting) in settings {
        if let Some(responses) = by_game.remove(id) {
            games.push(HumanGame::new(id.clone(), setting.clone(), responses)?);
        }
    }
    Ok(HumanDataset {
        source: path.display().to_string(),
        games,
        notes: Vec::new(),
        filter_report: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameSpec;

    fn settings() -> BTreeMap<String, Setting> {
        let spec = GameSpec::from_id("L11-U20-G1-B20-n-r1").unwrap();
        BTreeMap::from([(spec.id(), Setting::from_spec(&spec))])
    }

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn filters_are_counted() {
        let f = write("game_id,subject_id,action\nL11-U20-G1-B20-n-r1,a,17\nL11-U20-G1-B20-n-r1,b,25\nL11-U20-G1-B20-n-r1,c,15.5\nL11-U20-G1-B20-n-r1,d,18.0\n");
        let d = ingest_human_csv(f.path(), &settings(), IngestFilters::default()).unwrap();
        assert_eq!(d.filter_report, FilterReport { rows: 4, kept: 2, out_of_range: 1, not_whole: 1 });
        assert_eq!(d.games[0].counts[6], 1);
        assert_eq!(d.games[0].counts[7], 1);
    }

    #[test]
    fn duplicates_and_bad_rows_fail() {
        let f = write("game_id,subject_id,action\nL11-U20-G1-B20-n-r1,a,17\nL11-U20-G1-B20-n-r1,a,18\n");
        assert!(matches!(ingest_human_csv(f.path(), &settings(), IngestFilters::default()), Err(Error::DuplicateResponse { .. })));
        let f = write("game_id,subject_id,action\nL11-U20-G1-B20-n-r1,a,abc\n");
        assert!(matches!(
            ingest_human_csv(f.path(), &settings(), IngestFilters::default()),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let f = write("game_id,subject_id,action\nL11-U20-G1-B20-n-r1,a,17\nL11-U20-G1-B20-n-r1,b,12\n");
        let d = ingest_human_csv(f.path(), &settings(), IngestFilters::default()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let g = write(std::str::from_utf8(&buf).unwrap());
        let again = ingest_human_csv(g.path(), &settings(), IngestFilters::default()).unwrap();
        assert_eq!(again.games[0].counts, d.games[0].counts);
    }
}
