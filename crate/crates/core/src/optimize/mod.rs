//! Fitting agent populations to human data.

mod construct;
mod distance;
mod gp;
mod mixture;
mod simplex;

pub use construct::{
    construct_params, minimize_integer_box, Budget, ConstructConfig, Evaluation, IntBox, ParamFit, Phase,
};
pub use distance::{distance, distance_probs, improvement_over_baseline, mean_distance, DistanceKind, DistanceMeasure};
pub use mixture::{select_mixture, select_mixture_probs, MixtureFit, RestartTrace, SelectConfig};
pub use simplex::project_to_simplex;
