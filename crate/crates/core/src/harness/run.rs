//! Experiment runners, sweeps and artifact writing.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::*;
use super::svg::{line_chart, Series};
use crate::barrier::{build_barrier, estimate_m_means, verify_barrier};
use crate::continuum::{containment_run, ContinuumOptions};
use crate::discrete::{run_until, InterfaceState, StopCondition, StopReason};
use crate::error::{Error, Result};
use crate::field::{make_bump, sample_obstacles_above, ForceField, ObstacleBox, ObstacleSet};
use crate::percolation::{find_minimal_surface, surface_check, BernoulliOpenness, SiteField};
use crate::quenched::{
    second_moment_status, tail_divergence_probe, LatticeField, MomentStatus, StrengthDistribution,
};
use crate::rng::{streams, EnvironmentSeed};
use crate::supersolution::{
    assemble, box_surface, plan_parameters, small_example, verify_supersolution, AssemblySpec,
    PipelineInput, PipelineParams, SupersolutionAssembly, VerifyOptions,
};

/// How the driving force enters the lattice jump rate.
pub const RATE_CONVENTION: &str = "lattice jump rate is Λ(Δ₁u − f + F)";

/// Name of the environment variable holding the worker count.
pub const WORKERS_ENV: &str = "PINLAB_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

/// Per-run numbers reported in sweep tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pinned_fraction: Option<f64>,
    pub surface_found_frequency: Option<f64>,
    pub certified_ceiling: Option<f64>,
    pub second_moment: Option<String>,
}

struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    checks: Vec<Check>,
    summary: Summary,
    seeds: Vec<u64>,
    notes: Vec<String>,
}

impl Artifacts {
    fn new(seeds: Vec<u64>) -> Self {
        Self {
            files: Vec::new(),
            checks: Vec::new(),
            summary: Summary::default(),
            seeds,
            notes: Vec::new(),
        }
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.files.push((name.into(), text));
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        self.files.push((name.into(), bytes));
        Ok(())
    }

    fn svg(&mut self, name: &str, text: String) {
        self.files.push((name.into(), text.into_bytes()));
    }
}

/// Outcome of `run` or `sweep`: the exit status is 0 iff every check passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Worker count from the environment (`None`: one per core).
pub fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{WORKERS_ENV}: expected a positive integer, got {s:?}"
            ))),
        },
    }
}

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    git: Option<String>,
    config: &'a ExperimentConfig,
    seeds: &'a [u64],
    files: Vec<String>,
    checks: &'a [Check],
    passed: bool,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
}

fn git_revision() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn write_all(out: &Path, config: &ExperimentConfig, art: Artifacts) -> Result<RunOutcome> {
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    for (name, bytes) in &art.files {
        let p = out.join(name);
        std::fs::write(&p, bytes)?;
        files.push(p);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        git: git_revision(),
        config,
        seeds: &art.seeds,
        files: art.files.iter().map(|(n, _)| n.clone()).collect(),
        checks: &art.checks,
        passed: art.checks.iter().all(|c| c.pass),
        notes: &art.notes,
    };
    let p = out.join("manifest.json");
    let mut text = serde_json::to_vec_pretty(&manifest)?;
    text.push(b'\n');
    std::fs::write(&p, text)?;
    files.push(p);
    Ok(RunOutcome {
        checks: art.checks,
        files,
    })
}

/// Run one experiment and write its artifacts into `out`.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let art = in_pool(|| execute(&config.experiment))??;
    write_all(out, config, art)
}

#[derive(Serialize)]
struct SweepRow {
    parameter: SweepParameter,
    value: f64,
    status: &'static str,
    checks_passed: usize,
    checks_total: usize,
    pinned_fraction: Option<f64>,
    surface_found_frequency: Option<f64>,
    certified_ceiling: Option<f64>,
    second_moment: Option<String>,
    error: Option<String>,
}

/// Run the experiment once per sweep value; failures are recorded per row.
pub fn sweep(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let sw = config
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("sweep: missing; `sweep` needs a sweep section".into()))?;
    let results: Vec<(f64, Result<Artifacts>)> = in_pool(|| {
        sw.values
            .par_iter()
            .map(|&v| {
                (
                    v,
                    config
                        .at(sw.parameter, v)
                        .and_then(|c| execute(&c.experiment)),
                )
            })
            .collect()
    })?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut seeds = Vec::new();
    let mut notes = Vec::new();
    for (value, res) in results {
        match res {
            Ok(art) => {
                let passed = art.checks.iter().filter(|c| c.pass).count();
                let total = art.checks.len();
                checks.push(check(
                    &format!("{} = {value}", sw.parameter.name()),
                    passed == total,
                    format!("{passed}/{total} checks"),
                ));
                for s in &art.seeds {
                    if !seeds.contains(s) {
                        seeds.push(*s);
                    }
                }
                for n in &art.notes {
                    if !notes.contains(n) {
                        notes.push(n.clone());
                    }
                }
                rows.push(SweepRow {
                    parameter: sw.parameter,
                    value,
                    status: if passed == total { "ok" } else { "failed" },
                    checks_passed: passed,
                    checks_total: total,
                    pinned_fraction: art.summary.pinned_fraction,
                    surface_found_frequency: art.summary.surface_found_frequency,
                    certified_ceiling: art.summary.certified_ceiling,
                    second_moment: art.summary.second_moment,
                    error: None,
                });
            }
            Err(e) => {
                checks.push(check(
                    &format!("{} = {value}", sw.parameter.name()),
                    false,
                    e.to_string(),
                ));
                rows.push(SweepRow {
                    parameter: sw.parameter,
                    value,
                    status: "error",
                    checks_passed: 0,
                    checks_total: 0,
                    pinned_fraction: None,
                    surface_found_frequency: None,
                    certified_ceiling: None,
                    second_moment: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let mut art = Artifacts::new(seeds);
    art.csv("sweep.csv", &rows)?;
    art.checks = checks;
    art.notes = notes;
    write_all(out, config, art)
}

fn execute(exp: &Experiment) -> Result<Artifacts> {
    match exp {
        Experiment::DiscreteSim(c) => discrete_sim(c),
        Experiment::MStat(c) => m_stat(c),
        Experiment::Barrier(c) => barrier(c),
        Experiment::Percolation(c) => percolation(c),
        Experiment::Pipeline(c) => pipeline(c),
        Experiment::ContinuumVerify(c) => continuum_verify(c),
        Experiment::Containment(c) => containment(c),
        Experiment::TailProbe(c) => tail_probe(c),
    }
}

fn moment_label(m: MomentStatus) -> String {
    match m {
        MomentStatus::Finite(v) => format!("finite({v})"),
        MomentStatus::Infinite => "infinite".into(),
        MomentStatus::Unknown => "unknown".into(),
    }
}

#[derive(Serialize)]
struct DiscreteRow {
    seed: u64,
    time: f64,
    max_height: i64,
    mean_height: f64,
    event_count: u64,
}

#[derive(Serialize)]
struct DiscreteResult {
    seed: u64,
    stop_reason: StopReason,
    pinned: bool,
    max_height_seen: i64,
    final_time: f64,
    events: u64,
}

fn discrete_sim(c: &DiscreteSim) -> Result<Artifacts> {
    let dist = StrengthDistribution::new(c.distribution)?;
    let rate = c.rate.validated()?;
    let stop = StopCondition {
        max_time: c.max_time,
        max_events: Some(c.max_events),
        height_cap: Some(c.height_cap),
        record_every: c.record_every,
    };
    let runs: Vec<_> = c
        .seeds
        .par_iter()
        .map(|&seed| {
            let field = LatticeField::new(seed, dist.clone())?;
            let dyn_seed = EnvironmentSeed::new(seed, streams::DYNAMICS);
            run_until(
                InterfaceState::flat(c.width),
                &field,
                rate,
                c.force,
                dyn_seed,
                &stop,
                None,
            )
            .map(|t| (seed, t))
        })
        .collect::<Result<_>>()?;
    let mut art = Artifacts::new(c.seeds.clone());
    art.notes.push(RATE_CONVENTION.into());
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (seed, t) in &runs {
        rows.extend(t.rows.iter().map(|r| DiscreteRow {
            seed: *seed,
            time: r.time,
            max_height: r.max_height,
            mean_height: r.mean_height,
            event_count: r.event_count,
        }));
        results.push(DiscreteResult {
            seed: *seed,
            stop_reason: t.stop_reason,
            pinned: t.stop_reason != StopReason::HeightCap,
            max_height_seen: t.max_height_seen,
            final_time: t.final_state.time,
            events: t.final_state.event_count,
        });
    }
    let pinned = results.iter().filter(|r| r.pinned).count() as f64 / results.len() as f64;
    art.csv("trajectory.csv", &rows)?;
    art.json("results.json", &results)?;
    if let Some((seed, t)) = runs.first() {
        let pts = t
            .final_state
            .heights
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as f64, h as f64))
            .collect();
        art.svg(
            "interface.svg",
            line_chart(
                &format!("final interface, seed {seed}"),
                "site",
                "height",
                &[Series::steps("u", pts)],
            ),
        );
    }
    art.summary.pinned_fraction = Some(pinned);
    art.summary.second_moment = Some(moment_label(second_moment_status(&dist)));
    Ok(art)
}

#[derive(Serialize)]
struct MRow {
    j: u64,
    mean: f64,
    std_error: f64,
    samples: usize,
}

fn m_stat(c: &MStat) -> Result<Artifacts> {
    let dist = StrengthDistribution::new(c.distribution)?;
    let s = estimate_m_means(
        &dist,
        &c.js,
        c.samples,
        EnvironmentSeed::new(c.seed, streams::M_STATISTIC),
    )?;
    let mut art = Artifacts::new(vec![c.seed]);
    let rows: Vec<MRow> = (0..s.js.len())
        .map(|i| MRow {
            j: s.js[i],
            mean: s.means[i],
            std_error: s.std_errors[i],
            samples: s.samples,
        })
        .collect();
    art.csv("m_stat.csv", &rows)?;
    art.json("results.json", &s)?;
    art.summary.second_moment = Some(moment_label(s.second_moment));
    Ok(art)
}

#[derive(Serialize)]
struct BarrierRow {
    seed: u64,
    strategy: String,
    found: bool,
    verified: bool,
    max_height: Option<i64>,
    kmc_runs: usize,
    kmc_violations: usize,
}

fn barrier(c: &BarrierRun) -> Result<Artifacts> {
    let dist = StrengthDistribution::new(c.distribution)?;
    let rate = c.rate.validated()?;
    let budget = c.budget.unwrap_or_default();
    let stop = StopCondition {
        max_events: Some(c.kmc_events),
        ..StopCondition::default()
    };
    let jobs: Vec<(u64, usize)> = c
        .seeds
        .iter()
        .flat_map(|&s| (0..c.strategies.len()).map(move |k| (s, k)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(seed, k)| -> Result<_> {
            let strategy = c.strategies[k];
            let field = LatticeField::new(seed, dist.clone())?;
            let cert = build_barrier(&field, c.width, c.force, strategy, &budget);
            let mut violations = 0;
            let mut recheck = true;
            if let Some(cert) = &cert {
                recheck = verify_barrier(&cert.v, &field, c.force).verified;
                let base = EnvironmentSeed::new(seed, streams::DYNAMICS);
                violations = (0..c.kmc_runs)
                    .into_par_iter()
                    .map(|run| -> Result<usize> {
                        let s = EnvironmentSeed::new(
                            base.bits(&[k as i64, run as i64]),
                            streams::DYNAMICS,
                        );
                        let t = run_until(
                            InterfaceState::flat(c.width),
                            &field,
                            rate,
                            c.force,
                            s,
                            &stop,
                            Some(&cert.v),
                        )?;
                        Ok(usize::from(t.violation.is_some()))
                    })
                    .sum::<Result<usize>>()?;
            }
            let mut cert = cert;
            if let Some(cert) = cert.as_mut() {
                cert.seed = Some(seed);
            }
            Ok((seed, strategy, cert, recheck, violations))
        })
        .collect::<Result<_>>()?;
    let mut art = Artifacts::new(c.seeds.clone());
    art.notes.push(RATE_CONVENTION.into());
    let mut rows = Vec::new();
    let mut certs = Vec::new();
    let (mut all_verified, mut total_violations) = (true, 0);
    for (seed, strategy, cert, recheck, violations) in results {
        all_verified &= recheck;
        total_violations += violations;
        rows.push(BarrierRow {
            seed,
            strategy: serde_json::to_value(strategy)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            found: cert.is_some(),
            verified: cert.is_some() && recheck,
            max_height: cert
                .as_ref()
                .map(|c| c.v.iter().copied().max().unwrap_or(0)),
            kmc_runs: if cert.is_some() { c.kmc_runs } else { 0 },
            kmc_violations: violations,
        });
        if let Some(cert) = cert {
            certs.push(cert);
        }
    }
    art.csv("barrier.csv", &rows)?;
    art.json("certificates.json", &certs)?;
    if let Some(cert) = certs.first() {
        let pts = cert
            .v
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as f64, h as f64))
            .collect();
        art.svg(
            "barrier.svg",
            line_chart(
                "barrier certificate",
                "site",
                "height",
                &[Series::steps("v", pts)],
            ),
        );
    }
    art.checks.push(check(
        "certificates re-verified",
        all_verified,
        format!("{} certificates", certs.len()),
    ));
    if c.kmc_runs > 0 {
        art.checks.push(check(
            "interface stays below barrier",
            total_violations == 0,
            format!("{total_violations} violating runs"),
        ));
    }
    let with_cert = c
        .seeds
        .iter()
        .filter(|&&s| certs.iter().any(|x| x.seed == Some(s)))
        .count();
    art.summary.pinned_fraction = Some(with_cert as f64 / c.seeds.len() as f64);
    art.summary.second_moment = Some(moment_label(second_moment_status(&dist)));
    Ok(art)
}

#[derive(Serialize)]
struct SurfaceRow {
    seed: u64,
    found: bool,
    max_height: Option<i64>,
    mean_height: Option<f64>,
    check_ok: Option<bool>,
}

fn percolation(c: &PercolationRun) -> Result<Artifacts> {
    let results: Vec<_> = c
        .seeds
        .par_iter()
        .map(|&seed| -> Result<_> {
            let open = BernoulliOpenness {
                p: c.p,
                seed: EnvironmentSeed::new(seed, streams::OPENNESS),
            };
            let field = SiteField::new(c.dims.clone(), c.height_budget, open)?;
            let s = find_minimal_surface(&field);
            let ok = s.as_ref().map(|s| surface_check(s, &field).ok);
            Ok((seed, s, ok))
        })
        .collect::<Result<_>>()?;
    let mut art = Artifacts::new(c.seeds.clone());
    let rows: Vec<SurfaceRow> = results
        .iter()
        .map(|(seed, s, ok)| SurfaceRow {
            seed: *seed,
            found: s.is_some(),
            max_height: s
                .as_ref()
                .map(|s| s.heights.iter().copied().max().unwrap_or(0)),
            mean_height: s
                .as_ref()
                .map(|s| s.heights.iter().sum::<i64>() as f64 / s.heights.len() as f64),
            check_ok: *ok,
        })
        .collect();
    art.csv("surfaces.csv", &rows)?;
    if let Some((seed, Some(s), _)) = results.iter().find(|r| r.1.is_some()) {
        let pts = s
            .heights
            .iter()
            .take(c.dims[0])
            .enumerate()
            .map(|(i, &h)| (i as f64, h as f64))
            .collect();
        art.svg(
            "surface.svg",
            line_chart(
                &format!("minimal Lipschitz surface, seed {seed}"),
                "column",
                "L",
                &[Series::steps("L", pts)],
            ),
        );
    }
    let found = rows.iter().filter(|r| r.found).count();
    let checked = rows.iter().all(|r| r.check_ok != Some(false));
    art.checks.push(check(
        "surface check on every found surface",
        checked,
        format!("{found} surfaces"),
    ));
    art.summary.surface_found_frequency = Some(found as f64 / rows.len() as f64);
    Ok(art)
}

fn profile_chart(p: &PipelineParams) -> String {
    let prof = p.profile();
    let k = 200;
    let inner = (0..=k)
        .map(|i| {
            let r = p.r_in * i as f64 / k as f64;
            (r / p.r_in, prof.phi(r) / p.r_in)
        })
        .collect();
    let top = prof.psi(p.r_out);
    let outer = (0..=k)
        .map(|i| {
            let r = p.r_in + (p.r_out - p.r_in) * i as f64 / k as f64;
            ((r - p.r_in) / (p.r_out - p.r_in), prof.psi(r) / top)
        })
        .collect();
    line_chart(
        "local profile",
        "normalized radius",
        "normalized height",
        &[
            Series::line("phi / r_in on [0, r_in]", inner),
            Series::line("psi / psi(r_out) on [r_in, r_out]", outer),
        ],
    )
}

fn pipeline(c: &PipelineRun) -> Result<Artifacts> {
    let p = plan_parameters(&PipelineInput {
        force: c.force,
        n: c.n,
        lambda: c.lambda,
        r0: c.r0,
        r1: c.r1,
        distribution: StrengthDistribution::new(c.distribution)?,
        c1: None,
    })?;
    let mut art = Artifacts::new(vec![]);
    art.json("params.json", &p)?;
    art.svg("profile.svg", profile_chart(&p));
    for r in &p.rechecks {
        art.checks.push(check(
            &r.name,
            r.pass,
            format!("{:e} vs {:e}", r.lhs, r.rhs),
        ));
    }
    art.summary.certified_ceiling =
        Some((p.f_out - p.c1 * p.h / (p.d * p.d)).min(p.big_m - p.f_in));
    Ok(art)
}

/// Obstacle field file read by `pinlab verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub force: f64,
    pub r0: f64,
    pub r1: f64,
    pub obstacles: ObstacleSet,
}

struct Built {
    spec: AssemblySpec,
    set: ObstacleSet,
    params: Option<PipelineParams>,
    asm: SupersolutionAssembly,
}

fn build_setting(setting: &ContinuumSetting, force: f64, seed: u64) -> Result<Built> {
    match *setting {
        ContinuumSetting::Small { n } => {
            let ex = small_example(n, seed)?;
            let (_, surface) = box_surface(&ex.spec, &ex.dims, &ex.set, 32)?;
            let asm = assemble(&ex.spec, &surface, &ex.set)?;
            Ok(Built {
                spec: ex.spec,
                set: ex.set,
                params: None,
                asm,
            })
        }
        ContinuumSetting::Planned {
            distribution,
            n,
            lambda,
            r0,
            r1,
            boxes,
            layers,
        } => {
            let dist = StrengthDistribution::new(distribution)?;
            let p = plan_parameters(&PipelineInput {
                force,
                n,
                lambda,
                r0,
                r1,
                distribution: dist.clone(),
                c1: None,
            })?;
            let spec = p.assembly_spec();
            let dims = vec![boxes; n];
            let domain = ObstacleBox {
                period: vec![boxes as f64 * (p.l + p.d); n],
                y_min: r1,
                y_max: r1 + layers as f64 * p.h,
            };
            let set = sample_obstacles_above(&domain, lambda, &dist, p.big_m, seed)?;
            let (_, surface) = box_surface(&spec, &dims, &set, layers)?;
            let asm = assemble(&spec, &surface, &set)?;
            Ok(Built {
                spec,
                set,
                params: Some(p),
                asm,
            })
        }
    }
}

fn supersolution_chart(asm: &SupersolutionAssembly) -> String {
    let k = 2000;
    let n = asm.n();
    let pts = (0..=k)
        .map(|i| {
            let x0 = asm.period[0] * i as f64 / k as f64;
            let x = [x0, 0.0];
            (x0, asm.eval(&x[..n]))
        })
        .collect();
    let lift = (0..=k)
        .map(|i| {
            let x0 = asm.period[0] * i as f64 / k as f64;
            let x = [x0, 0.0];
            (x0, asm.lifting.eval(&x[..n]))
        })
        .collect();
    line_chart(
        "assembled supersolution",
        "x",
        "height",
        &[Series::line("v", pts), Series::line("lift", lift)],
    )
}

fn continuum_common(art: &mut Artifacts, built: &Built, force: f64) -> Result<(ForceField, bool)> {
    let field = ForceField::new(
        built.set.clone(),
        make_bump(built.spec.r0, built.spec.r1, built.spec.n)?,
    )?;
    let report = verify_supersolution(&built.asm, &field, force, &VerifyOptions::default())?;
    art.json("assembly.json", &built.asm)?;
    art.json(
        "field.json",
        &FieldFile {
            force,
            r0: built.spec.r0,
            r1: built.spec.r1,
            obstacles: built.set.clone(),
        },
    )?;
    if let Some(p) = &built.params {
        art.json("params.json", p)?;
        art.summary.certified_ceiling =
            Some((p.f_out - p.c1 * p.h / (p.d * p.d)).min(p.big_m - p.f_in));
    }
    art.json("verification.json", &report)?;
    art.svg("supersolution.svg", supersolution_chart(&built.asm));
    art.checks.push(check(
        "supersolution verified",
        report.pass,
        format!(
            "{} points, {} violations, {} kink checks, worst residual {:e}",
            report.points_checked,
            report.violations,
            report.kink_checks,
            report.worst.map_or(f64::NAN, |w| w.residual)
        ),
    ));
    Ok((field, report.pass))
}

fn continuum_verify(c: &ContinuumVerify) -> Result<Artifacts> {
    let built = build_setting(&c.setting, c.force, c.seed)?;
    let mut art = Artifacts::new(vec![c.seed]);
    continuum_common(&mut art, &built, c.force)?;
    Ok(art)
}

fn containment(c: &Containment) -> Result<Artifacts> {
    let built = build_setting(&c.setting, c.force, c.seed)?;
    let mut art = Artifacts::new(vec![c.seed]);
    let (field, _) = continuum_common(&mut art, &built, c.force)?;
    let opts = ContinuumOptions {
        dx: c.dx,
        horizon: c.horizon,
        ..ContinuumOptions::default()
    };
    let rep = containment_run(&field, c.force, &built.asm, &opts)?;
    art.csv("containment.csv", &rep.rows)?;
    let pts = rep.rows.iter().map(|r| (r.time, r.max_u)).collect();
    art.svg(
        "containment.svg",
        line_chart(
            "interface height",
            "t",
            "max u",
            &[Series::line("max u", pts)],
        ),
    );
    art.checks.push(check(
        "u stays below v",
        rep.contained,
        format!(
            "sup(u - v) = {:e}, tolerance {:e}",
            rep.sup_excess, rep.tolerance
        ),
    ));
    art.checks.push(check(
        "max height plateaus",
        rep.plateau,
        format!("growth over final half {:e}", rep.plateau_growth),
    ));
    art.summary.pinned_fraction = Some(if rep.plateau { 1.0 } else { 0.0 });
    art.json("containment.json", &rep)?;
    Ok(art)
}

#[derive(Serialize)]
struct ProbeRow {
    x: f64,
    value: f64,
}

fn tail_probe(c: &TailProbe) -> Result<Artifacts> {
    let dist = StrengthDistribution::new(c.distribution)?;
    let values = tail_divergence_probe(&dist, c.exponent, &c.grid);
    let rows: Vec<ProbeRow> = c
        .grid
        .iter()
        .zip(&values)
        .map(|(&x, &value)| ProbeRow { x, value })
        .collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let mut art = Artifacts::new(vec![]);
    art.csv("probe.csv", &rows)?;
    art.json(
        "results.json",
        &serde_json::json!({ "strictly_increasing": increasing }),
    )?;
    let pts = rows
        .iter()
        .filter(|r| r.x > 0.0 && r.value > 0.0)
        .map(|r| (r.x.log10(), r.value.log10()))
        .collect();
    art.svg(
        "probe.svg",
        line_chart(
            "tail probe",
            "log10 x",
            "log10 x^a P(X >= x)",
            &[Series::line("probe", pts)],
        ),
    );
    Ok(art)
}

/// Load the two files written by a continuum run and re-verify.
pub fn verify_files(
    assembly: &Path,
    field: &Path,
) -> Result<crate::supersolution::VerificationReport> {
    let asm: SupersolutionAssembly = read_json(assembly)?;
    let f: FieldFile = read_json(field)?;
    let ff = ForceField::new(f.obstacles, make_bump(f.r0, f.r1, asm.n())?)?;
    verify_supersolution(&asm, &ff, f.force, &VerifyOptions::default())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Error::Config(format!("{}: {at}: {}", path.display(), e.into_inner()))
    })
}
