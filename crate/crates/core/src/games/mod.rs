//! The parametric family of symmetric money-request games.

mod family;
mod matrix;
mod render;
mod sample;
mod spec;
pub mod variants;

pub use family::{dedup_family, dedup_specs, enumerate_family, FamilyConfig, OffsetPreset, Population};
pub use matrix::SymmetricGame;
pub use render::{render_instructions, TEMPLATE_VERSION};
pub use sample::{population_weights, sample_games, GameSampleFrame, SampleDraw, WeightScheme};
pub use spec::{BonusRule, GameSpec, PointsRule};
