use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{render_instructions, GameSpec, SymmetricGame};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Action {
    Int(i64),
    Label(String),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Int(v) => write!(f, "{v}"),
            Action::Label(s) => f.write_str(s),
        }
    }
}

impl Action {
    /// Integer actions parse as integers; anything else is a label.
    pub fn parse(s: &str) -> Action {
        s.trim().parse::<i64>().map(Action::Int).unwrap_or_else(|_| Action::Label(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffSemantics {
    Family { spec: GameSpec },
    Matrix { game: SymmetricGame },
    /// Binary allocation: (to self, to other) for each of two options.
    Allocation { options: [(i64, i64); 2] },
}

/// One decision problem shown to agents and humans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub instruction_text: String,
    pub actions: Vec<Action>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<PayoffSemantics>,
}

#[derive(Serialize)]
struct IdContent<'a> {
    instruction_text: &'a str,
    actions: &'a [Action],
    payoff: &'a Option<PayoffSemantics>,
}

impl Setting {
    pub fn new(instruction_text: impl Into<String>, actions: Vec<Action>, payoff: Option<PayoffSemantics>) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::invalid("a setting needs at least one action"));
        }
        let mut sorted = actions.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != actions.len() {
            return Err(Error::invalid("setting actions must be distinct"));
        }
        let instruction_text = instruction_text.into();
        let id = Self::compute_id(&instruction_text, &actions, &payoff);
        Ok(Setting { id, name: None, instruction_text, actions, payoff })
    }

    fn compute_id(text: &str, actions: &[Action], payoff: &Option<PayoffSemantics>) -> String {
        let bytes = serde_json::to_vec(&IdContent { instruction_text: text, actions, payoff }).expect("serializable");
        crate::seed::sha256_hex(&bytes)[..16].to_string()
    }

    /// Recomputes the id from content; true when it matches.
    pub fn id_is_consistent(&self) -> bool {
        self.id == Self::compute_id(&self.instruction_text, &self.actions, &self.payoff)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn from_spec(spec: &GameSpec) -> Self {
        let actions = spec.actions().map(Action::Int).collect();
        Self::new(render_instructions(spec), actions, Some(PayoffSemantics::Family { spec: *spec }))
            .expect("family specs have distinct actions")
            .named(spec.id())
    }

    pub fn from_game(game: &SymmetricGame, instruction_text: impl Into<String>) -> Self {
        let actions = game.actions().iter().copied().map(Action::Int).collect();
        Self::new(instruction_text, actions, Some(PayoffSemantics::Matrix { game: game.clone() }))
            .expect("games have distinct actions")
    }

    /// Payoff matrix for money-request settings.
    pub fn game(&self) -> Option<SymmetricGame> {
        match &self.payoff {
            Some(PayoffSemantics::Family { spec }) => SymmetricGame::from_spec(spec).ok(),
            Some(PayoffSemantics::Matrix { game }) => Some(game.clone()),
            _ => None,
        }
    }

    pub fn k(&self) -> usize {
        self.actions.len()
    }

    pub fn index_of(&self, action: &Action) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::variants::BASIC_SPEC;

    #[test]
    fn id_survives_round_trip() {
        let s = Setting::from_spec(&BASIC_SPEC);
        let back: Setting = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        assert!(back.id_is_consistent());
        assert_eq!(s.k(), 10);
    }

    #[test]
    fn rejects_duplicate_actions() {
        assert!(Setting::new("x", vec![Action::Int(1), Action::Int(1)], None).is_err());
        assert!(Setting::new("x", vec![], None).is_err());
    }

    #[test]
    fn action_json_shape() {
        assert_eq!(serde_json::to_string(&Action::Int(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Action::Label("Left".into())).unwrap(), "\"Left\"");
        assert_eq!(Action::parse("Left"), Action::Label("Left".into()));
    }
}
