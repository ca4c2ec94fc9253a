//! Predictive agents and reproducible elicitation of their response
//! distributions.

mod apportion;
mod backend;
mod cache;
mod distribution;
mod levelk;
mod model;
mod parse;
pub mod personas;
mod prompt;
mod setting;

pub use apportion::scale_mixture_to_population;
pub use backend::{
    ChatBackend, ChatMessage, ChatRequest, FixtureBackend, FnBackend, Role,
};
#[cfg(feature = "http")]
pub use backend::HttpBackend;
pub use cache::{ResponseCache, Transcript, TranscriptTurn};
pub use distribution::{mixture_distribution, ResponseDistribution};
pub use levelk::{guaranteed_payoffs, mechanical_levelk, Level0Rule, TieRule};
pub use model::{elicit_distribution, AgentModel, ElicitContext};
pub use parse::parse_response;
pub use prompt::{PromptSpec, TraitParam};
pub use setting::{Action, PayoffSemantics, Setting};
