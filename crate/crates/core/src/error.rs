use thiserror::Error;

/// Errors raised by the laboratory's constructors, algorithms and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("p = {p} < 1: grid p-variation is infinite unless the path is pure jump; use jump_p_sum on the jump set")]
    PureJumpRegime { p: f64 },
    #[error("no closed form: {0}")]
    NoClosedForm(&'static str),
    #[error("constant diverges: {0}")]
    Divergent(&'static str),
    #[error("empty sequence")]
    Empty,
    #[error("sequence of length {len} exceeds the exhaustive-search limit of {max}")]
    TooLong { len: usize, max: usize },
    #[error("grid of {steps} steps cannot be split into {blocks} equal blocks")]
    NotDivisible { steps: usize, blocks: usize },
    #[error("no epsilon in the list is feasible with {n_paths} paths; the smallest feasible epsilon from the pilot run is {smallest_feasible}")]
    Infeasible {
        smallest_feasible: f64,
        n_paths: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        requirement,
    }
}
