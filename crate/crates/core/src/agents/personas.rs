//! Bundled persona libraries.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::prompt::{PromptSpec, TraitParam};

const PERSONAS_JSON: &str = include_str!("../../data/personas.json");

#[derive(Debug, Deserialize)]
pub struct Library {
    pub version: String,
    pub preamble: String,
    pub levelk_note: String,
    pub mbti_note: String,
    pub reconstructed: Vec<String>,
    pub cot: CotTemplates,
    pub sets: BTreeMap<String, PersonaSet>,
    pub templates: BTreeMap<String, TraitTemplate>,
}

#[derive(Debug, Deserialize)]
pub struct CotTemplates {
    pub first: String,
    pub second: String,
}

#[derive(Debug, Deserialize)]
pub struct PersonaSet {
    pub game: String,
    pub personas: Vec<PersonaEntry>,
}

#[derive(Debug, Deserialize)]
pub struct PersonaEntry {
    pub text: String,
    /// Weight printed for this persona, as a decimal string.
    pub published_weight: String,
    pub levelk_note: bool,
    #[serde(default)]
    pub mbti_note: bool,
}

#[derive(Debug, Deserialize)]
pub struct TraitTemplate {
    pub text: String,
    pub parameters: Vec<TraitParam>,
    pub published_fit: Vec<Vec<i64>>,
}

pub fn library() -> &'static Library {
    static L: OnceLock<Library> = OnceLock::new();
    L.get_or_init(|| serde_json::from_str(PERSONAS_JSON).expect("bundled persona library parses"))
}

impl PersonaEntry {
    pub fn weight(&self) -> f64 {
        self.published_weight.parse().expect("weights are decimals")
    }

    pub fn prompt(&self) -> PromptSpec {
        let lib = library();
        let mut notes = Vec::new();
        if self.levelk_note {
            notes.push(lib.levelk_note.clone());
        }
        if self.mbti_note {
            notes.push(lib.mbti_note.clone());
        }
        PromptSpec { preamble: Some(lib.preamble.clone()), notes, ..PromptSpec::plain(&self.text) }
    }
}

impl PersonaSet {
    pub fn prompts(&self) -> Vec<PromptSpec> {
        self.personas.iter().map(PersonaEntry::prompt).collect()
    }

    pub fn published_weights(&self) -> Vec<f64> {
        self.personas.iter().map(PersonaEntry::weight).collect()
    }
}

impl TraitTemplate {
    pub fn prompt(&self) -> PromptSpec {
        PromptSpec { parameters: self.parameters.clone(), ..PromptSpec::plain(&self.text) }
    }
}

pub fn set(name: &str) -> Option<&'static PersonaSet> {
    library().sets.get(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_shapes() {
        let lib = library();
        assert_eq!(set("strategic").unwrap().personas.len(), 10);
        assert_eq!(set("historical").unwrap().personas.len(), 20);
        assert_eq!(set("mbti").unwrap().personas.len(), 16);
        assert_eq!(set("always_pick").unwrap().personas.len(), 10);
        for s in lib.sets.values() {
            let total: f64 = s.published_weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "{total}");
        }
        let random = &set("strategic").unwrap().personas[8];
        assert!(!random.levelk_note);
        assert!(random.prompt().render().unwrap().starts_with("You are a human being"));
        let t = &lib.templates["allocation_traits"];
        let text = t.prompt().with_values(&[7, 10, 10]).unwrap().render().unwrap();
        assert!(text.contains("efficiency level is: 7."));
    }
}
