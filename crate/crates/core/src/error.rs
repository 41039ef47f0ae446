use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid design: {0}")]
    InvalidDesign(&'static str),

    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),

    #[error("integrand is not finite at s = {node}")]
    NonFinite { node: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("type-I error still exceeds alpha at the top of the search range c = {c_hi}")]
    InflatedAtUpperBound { c_hi: f64 },

    #[error("ambiguous C_min: type-I error crosses alpha at {crossings:?}")]
    AmbiguousCrossing { crossings: Vec<f64> },

    #[error("target of {target} events is unreachable; at most {max_events} events can accrue")]
    Saturation { target: f64, max_events: f64 },

    #[error("cannot aggregate an empty outcome list")]
    EmptyOutcomes,

    #[error("outcomes mix design labels")]
    MixedLabels,
}
