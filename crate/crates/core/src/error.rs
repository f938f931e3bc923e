use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid rate function: {0}")]
    InvalidRateFunction(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no finite box side: tail probability is zero")]
    NoFiniteSide,
    #[error("tail hypothesis not witnessed: best probe value {best_probe:e} at x = {best_x:e}, needed {target:e}")]
    HypothesisNotWitnessed {
        target: f64,
        best_probe: f64,
        best_x: f64,
    },
    #[error("pipeline re-check failed after {attempts} escalations: {reason}")]
    PipelineRecheck { attempts: usize, reason: String },
    #[error("lifting precondition violated: |y(a) - y(b)| = {gap} >= 2h = {limit} between cells {a} and {b}")]
    LiftingGap {
        a: usize,
        b: usize,
        gap: f64,
        limit: f64,
    },
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error(
        "coverage gap near x = {x:?}: nearest anchor at distance {distance} > r_out = {r_out}"
    )]
    CoverageGap {
        x: Vec<f64>,
        distance: f64,
        r_out: f64,
    },
    #[error("numerical blowup at t = {time} (node {node})")]
    NumericalBlowup { time: f64, node: usize },
    #[error("grid too large: {nodes} nodes exceeds budget {budget}")]
    GridTooLarge { nodes: u128, budget: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
