//! Experiment configuration: one JSON document per experiment.

use serde::{Deserialize, Serialize};

use crate::barrier::{BarrierBudget, BarrierStrategy};
use crate::discrete::RateFunction;
use crate::error::{Error, Result};
use crate::quenched::DistributionKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    DiscreteSim(DiscreteSim),
    MStat(MStat),
    Barrier(BarrierRun),
    Percolation(PercolationRun),
    Pipeline(PipelineRun),
    ContinuumVerify(ContinuumVerify),
    Containment(Containment),
    TailProbe(TailProbe),
}

fn default_record_every() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSim {
    pub distribution: DistributionKind,
    pub width: usize,
    pub force: i64,
    #[serde(default)]
    pub rate: RateFunction,
    pub max_events: u64,
    #[serde(default)]
    pub max_time: Option<f64>,
    /// A run reaching this height counts as depinned.
    pub height_cap: i64,
    pub seeds: Vec<u64>,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MStat {
    pub distribution: DistributionKind,
    pub js: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
}

fn all_strategies() -> Vec<BarrierStrategy> {
    BarrierStrategy::ALL.to_vec()
}

fn default_kmc_events() -> u64 {
    1_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierRun {
    pub distribution: DistributionKind,
    pub width: usize,
    pub force: i64,
    #[serde(default = "all_strategies")]
    pub strategies: Vec<BarrierStrategy>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub rate: RateFunction,
    /// KMC runs per verified certificate (0 skips the containment check).
    #[serde(default)]
    pub kmc_runs: usize,
    #[serde(default = "default_kmc_events")]
    pub kmc_events: u64,
    #[serde(default)]
    pub budget: Option<BarrierBudget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationRun {
    pub dims: Vec<usize>,
    pub p: f64,
    pub height_budget: i64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineRun {
    pub distribution: DistributionKind,
    pub n: usize,
    pub lambda: f64,
    pub r0: f64,
    pub r1: f64,
    pub force: f64,
}

/// Where the obstacles of a continuum experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContinuumSetting {
    /// Hand-sized configuration with order-one parameters.
    Small { n: usize },
    /// Parameters from the pipeline; only obstacles of strength at least `M` are sampled.
    Planned {
        distribution: DistributionKind,
        n: usize,
        lambda: f64,
        r0: f64,
        r1: f64,
        boxes: usize,
        layers: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumVerify {
    pub setting: ContinuumSetting,
    pub force: f64,
    pub seed: u64,
}

fn default_horizon() -> f64 {
    100.0
}

fn default_dx() -> f64 {
    1.0 / 32.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Containment {
    pub setting: ContinuumSetting,
    pub force: f64,
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dx")]
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailProbe {
    pub distribution: DistributionKind,
    pub exponent: f64,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Force,
    P,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Force => "force",
            SweepParameter::P => "p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

fn non_empty<T>(path: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(schema(path, "must not be empty"))
    } else {
        Ok(())
    }
}

/// The tagged `experiment` enum buffers its body, which hides field paths;
/// re-read the body as the variant named by `kind` to recover them.
fn experiment_path(text: &str) -> Option<String> {
    fn inner<T: serde::de::DeserializeOwned>(body: serde_json::Value) -> Option<String> {
        match serde_path_to_error::deserialize::<_, T>(body) {
            Err(e) => Some(format!("experiment.{}", e.path())),
            Ok(_) => None,
        }
    }
    let mut root: serde_json::Value = serde_json::from_str(text).ok()?;
    let body = root.get_mut("experiment")?.as_object_mut()?;
    let kind = body.remove("kind")?;
    let body = serde_json::Value::Object(body.clone());
    match kind.as_str()? {
        "discrete-sim" => inner::<DiscreteSim>(body),
        "m-stat" => inner::<MStat>(body),
        "barrier" => inner::<BarrierRun>(body),
        "percolation" => inner::<PercolationRun>(body),
        "pipeline" => inner::<PipelineRun>(body),
        "continuum-verify" => inner::<ContinuumVerify>(body),
        "containment" => inner::<Containment>(body),
        "tail-probe" => inner::<TailProbe>(body),
        _ => None,
    }
}

/// Parse and validate; errors name the offending field and, for syntax or
/// type errors, the line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        if path == "experiment" {
            path = experiment_path(text).unwrap_or(path);
        }
        schema(if path.is_empty() { "." } else { &path }, e.into_inner())
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        use Experiment::*;
        let e = "experiment";
        match &self.experiment {
            DiscreteSim(c) => {
                non_empty("experiment.seeds", &c.seeds)?;
                if c.width < 3 {
                    return Err(schema("experiment.width", "must be at least 3"));
                }
                if c.height_cap < 1 {
                    return Err(schema("experiment.height_cap", "must be positive"));
                }
            }
            MStat(c) => {
                non_empty("experiment.js", &c.js)?;
                if c.samples < 2 {
                    return Err(schema("experiment.samples", "must be at least 2"));
                }
            }
            Barrier(c) => {
                non_empty("experiment.seeds", &c.seeds)?;
                non_empty("experiment.strategies", &c.strategies)?;
                if c.width < 3 {
                    return Err(schema("experiment.width", "must be at least 3"));
                }
            }
            Percolation(c) => {
                non_empty("experiment.seeds", &c.seeds)?;
                if !(0.0..=1.0).contains(&c.p) {
                    return Err(schema("experiment.p", "must lie in [0, 1]"));
                }
            }
            Pipeline(c) => {
                if !(c.force > 0.0) {
                    return Err(schema("experiment.force", "must be positive"));
                }
            }
            ContinuumVerify(_) | Containment(_) => {}
            TailProbe(c) => {
                non_empty("experiment.grid", &c.grid)?;
                if c.grid.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(schema("experiment.grid", "must be strictly increasing"));
                }
            }
        }
        if let Some(s) = &self.sweep {
            non_empty("sweep.values", &s.values)?;
            let ok = match s.parameter {
                SweepParameter::Force => {
                    !matches!(self.experiment, Percolation(_) | MStat(_) | TailProbe(_))
                }
                SweepParameter::P => matches!(self.experiment, Percolation(_)),
            };
            if !ok {
                return Err(schema(
                    "sweep.parameter",
                    format!("{} cannot be swept for this {e} kind", s.parameter.name()),
                ));
            }
        }
        Ok(())
    }

    /// Copy of the config with the sweep parameter set to `value`.
    pub fn at(&self, parameter: SweepParameter, value: f64) -> Result<ExperimentConfig> {
        use Experiment::*;
        let mut c = self.clone();
        c.sweep = None;
        let int = |v: f64| -> Result<i64> {
            if v.fract() == 0.0 && v.abs() < 9e15 {
                Ok(v as i64)
            } else {
                Err(schema(
                    "sweep.values",
                    format!("{v} must be an integer for a lattice force"),
                ))
            }
        };
        match (&mut c.experiment, parameter) {
            (DiscreteSim(x), SweepParameter::Force) => x.force = int(value)?,
            (Barrier(x), SweepParameter::Force) => x.force = int(value)?,
            (Pipeline(x), SweepParameter::Force) => x.force = value,
            (ContinuumVerify(x), SweepParameter::Force) => x.force = value,
            (Containment(x), SweepParameter::Force) => x.force = value,
            (Percolation(x), SweepParameter::P) => x.p = value,
            _ => return Err(schema("sweep.parameter", "not applicable")),
        }
        c.validate()?;
        Ok(c)
    }
}
