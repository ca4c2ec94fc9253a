//! Exact Nash equilibrium enumeration and symmetric equilibrium selection.

mod census;
mod components;
mod nash;
mod risk;
mod select;
mod strategy;
mod tracing;
mod vertex;

pub use census::{selection_census, SelectionCensus};
pub use components::{equilibrium_components, EquilibriumComponent};
pub use nash::{enumerate_nash, verify_profile, NashConfig, NashSet};
pub use risk::risk_dominance_index;
pub use select::{
    hs_select, Diagnostics, ParetoEvent, Provenance, SelectionOutcome, SelectorConfig,
};
pub use strategy::{EquilibriumProfile, MixedStrategy};
pub use tracing::{logit_trace, TraceConfig};
