use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitParam {
    pub name: String,
    pub min: i64,
    pub max: i64,
}

/// System instruction for one persona. `{name}` placeholders in
/// `persona_text` are filled from `values` for every declared parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preamble: Option<String>,
    pub persona_text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<TraitParam>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, i64>,
}

impl PromptSpec {
    pub fn plain(persona_text: impl Into<String>) -> Self {
        PromptSpec {
            preamble: None,
            persona_text: persona_text.into(),
            notes: Vec::new(),
            parameters: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    /// Copy with parameter values bound; values must lie in their ranges.
    pub fn with_values(&self, values: &[i64]) -> Result<Self> {
        if values.len() != self.parameters.len() {
            return Err(Error::invalid(format!(
                "expected {} parameter values, got {}",
                self.parameters.len(),
                values.len()
            )));
        }
        let mut bound = self.clone();
        for (p, &v) in self.parameters.iter().zip(values) {
            if v < p.min || v > p.max {
                return Err(Error::invalid(format!("{} = {v} outside [{}, {}]", p.name, p.min, p.max)));
            }
            bound.values.insert(p.name.clone(), v);
        }
        Ok(bound)
    }

    /// Full system text: preamble, persona and notes separated by spaces.
    pub fn render(&self) -> Result<String> {
        let mut persona = self.persona_text.clone();
        for p in &self.parameters {
            let v = self
                .values
                .get(&p.name)
                .ok_or_else(|| Error::invalid(format!("parameter {} is unbound", p.name)))?;
            persona = persona.replace(&format!("{{{}}}", p.name), &v.to_string());
        }
        let mut parts: Vec<&str> = Vec::new();
        if let Some(pre) = &self.preamble {
            parts.push(pre);
        }
        parts.push(&persona);
        parts.extend(self.notes.iter().map(String::as_str));
        Ok(parts.join(" "))
    }

    /// Content hash of the rendered text.
    pub fn hash(&self) -> Result<String> {
        Ok(crate::seed::sha256_hex(self.render()?.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_over_whole_box() {
        let spec = PromptSpec {
            persona_text: "Level {a}, drive {b}.".into(),
            parameters: vec![
                TraitParam { name: "a".into(), min: 1, max: 3 },
                TraitParam { name: "b".into(), min: 1, max: 3 },
            ],
            ..PromptSpec::plain("")
        };
        for a in 1..=3 {
            for b in 1..=3 {
                let text = spec.with_values(&[a, b]).unwrap().render().unwrap();
                assert_eq!(text, format!("Level {a}, drive {b}."));
            }
        }
        assert!(spec.with_values(&[0, 1]).is_err());
        assert!(spec.render().is_err());
    }
}
