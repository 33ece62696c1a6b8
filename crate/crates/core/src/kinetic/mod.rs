//! Moment dynamics of the kinetic opinion model: parameters, the sentiment
//! equation and its closed form, and the variance equation.

mod forcing;
mod params;
mod sentiment;
mod variance;

pub use forcing::{ForcingPath, Interpolation};
pub use params::{KineticParams, ParamsDocument};
pub(crate) use sentiment::post_interaction;
pub use sentiment::{
    interaction_rule, sentiment_closed_form, sentiment_rk4, uniform_grid, SentimentPath,
};
pub use variance::{
    gamma_coefficient, variance_rhs, variance_solve, Regime, VarianceMethod, VariancePath,
    VarianceVariant,
};
