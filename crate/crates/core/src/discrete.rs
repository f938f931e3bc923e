//! Continuous-time jump dynamics of a 1+1-dimensional lattice interface.
//!
//! Site `i` of the periodic window jumps by `sign(λ)` at rate `|λ|`, where
//! `λ = Λ(Δ₁u(i) − f(i, u(i)) + F)`. The simulation is an exact kinetic Monte
//! Carlo: exponential waiting times from the total rate, site selection in a
//! Fenwick tree of `|λ|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quenched::SiteForce;
use crate::rng::EnvironmentSeed;

/// Range of integer arguments on which a rate function is validated.
pub const RATE_CHECK_RANGE: i64 = 50;

/// The bounded, strictly increasing rate function Λ with Λ(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateFunction {
    /// Λ(k) = λ_max · sign(k) · (1 − 2^{−|k|}).
    Clamp { lambda_max: f64 },
    /// Λ(k) = tanh(β k).
    TanhScaled { beta: f64 },
}

impl Default for RateFunction {
    fn default() -> Self {
        RateFunction::Clamp { lambda_max: 1.0 }
    }
}

impl RateFunction {
    /// Validated constructor: checks Λ(0) = 0, strict monotonicity and
    /// boundedness on the integers in `[-50, 50]`.
    pub fn validated(self) -> Result<Self> {
        match self {
            RateFunction::Clamp { lambda_max } if !(lambda_max > 0.0 && lambda_max.is_finite()) => {
                return Err(Error::InvalidRateFunction(format!(
                    "lambda_max must be positive and finite, got {lambda_max}"
                )))
            }
            RateFunction::TanhScaled { beta } if !(beta > 0.0 && beta.is_finite()) => {
                return Err(Error::InvalidRateFunction(format!(
                    "beta must be positive and finite, got {beta}"
                )))
            }
            _ => {}
        }
        if self.eval(0) != 0.0 {
            return Err(Error::InvalidRateFunction("Λ(0) != 0".into()));
        }
        let bound = self.bound();
        let mut prev = self.eval(-RATE_CHECK_RANGE);
        for k in -RATE_CHECK_RANGE + 1..=RATE_CHECK_RANGE {
            let v = self.eval(k);
            if v <= prev {
                return Err(Error::InvalidRateFunction(format!(
                    "not strictly increasing between {} and {k} (in floating point)",
                    k - 1
                )));
            }
            if v.abs() > bound {
                return Err(Error::InvalidRateFunction(format!(
                    "|Λ({k})| exceeds its bound"
                )));
            }
            prev = v;
        }
        Ok(self)
    }

    pub fn bound(&self) -> f64 {
        match *self {
            RateFunction::Clamp { lambda_max } => lambda_max,
            RateFunction::TanhScaled { .. } => 1.0,
        }
    }

    #[inline]
    pub fn eval(&self, k: i64) -> f64 {
        match *self {
            RateFunction::Clamp { lambda_max } => {
                if k == 0 {
                    0.0
                } else {
                    let mag = lambda_max * (1.0 - (-(k.unsigned_abs().min(1100) as f64)).exp2());
                    if k > 0 {
                        mag
                    } else {
                        -mag
                    }
                }
            }
            RateFunction::TanhScaled { beta } => (beta * k as f64).tanh(),
        }
    }
}

/// Heights on the periodic window `[0, W)` together with the event clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceState {
    pub heights: Vec<i64>,
    pub time: f64,
    pub event_count: u64,
}

impl InterfaceState {
    /// The flat initial condition u ≡ 0 at time 0.
    pub fn flat(width: usize) -> Self {
        Self {
            heights: vec![0; width],
            time: 0.0,
            event_count: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.heights.len()
    }

    pub fn max_height(&self) -> i64 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_height(&self) -> f64 {
        if self.heights.is_empty() {
            return 0.0;
        }
        self.heights.iter().map(|&h| h as f64).sum::<f64>() / self.heights.len() as f64
    }
}

#[inline]
fn neighbors(w: usize, i: usize) -> (usize, usize) {
    (
        if i == 0 { w - 1 } else { i - 1 },
        if i + 1 == w { 0 } else { i + 1 },
    )
}

/// `u(i+1) + u(i−1) − 2u(i)` with periodic wrap.
#[inline]
pub fn discrete_laplacian(u: &[i64], i: usize) -> i64 {
    let (l, r) = neighbors(u.len(), i);
    u[r] + u[l] - 2 * u[i]
}

/// Signed jump rate `Λ(Δ₁u(i) − f(i, u(i)) + F)` at site `i`.
#[inline]
pub fn jump_rate<S: SiteForce + ?Sized>(
    u: &[i64],
    i: usize,
    field: &S,
    rate: &RateFunction,
    force: i64,
) -> f64 {
    let arg = discrete_laplacian(u, i)
        .saturating_sub(field.force(i as i64, u[i]))
        .saturating_add(force);
    rate.eval(arg)
}

/// Fenwick tree over non-negative weights with prefix-sum search.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    pub(crate) fn from_weights(weights: &[f64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0.0; n + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Self { tree }
    }

    pub(crate) fn add(&mut self, idx: usize, delta: f64) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub(crate) fn total(&self) -> f64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    pub(crate) fn select(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

/// Result of one KMC event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum StepOutcome {
    Moved {
        site: usize,
        delta: i64,
    },
    /// Every rate is zero: the state is stationary for the dynamics.
    Frozen,
}

const REFRESH_EVERY: u64 = 1 << 16;

/// Exact jump-process simulator over a fixed environment.
pub struct Kmc<'a, S: SiteForce + ?Sized> {
    state: InterfaceState,
    field: &'a S,
    rate: RateFunction,
    force: i64,
    seed: EnvironmentSeed,
    rates: Vec<f64>,
    tree: Fenwick,
    active: usize,
    since_refresh: u64,
}

impl<'a, S: SiteForce + ?Sized> Kmc<'a, S> {
    pub fn new(
        state: InterfaceState,
        field: &'a S,
        rate: RateFunction,
        force: i64,
        seed: EnvironmentSeed,
    ) -> Result<Self> {
        if state.heights.is_empty() {
            return Err(Error::InvalidParameter(
                "window width must be positive".into(),
            ));
        }
        let rate = rate.validated()?;
        let mut kmc = Self {
            state,
            field,
            rate,
            force,
            seed,
            rates: Vec::new(),
            tree: Fenwick::from_weights(&[]),
            active: 0,
            since_refresh: 0,
        };
        kmc.refresh();
        Ok(kmc)
    }

    fn refresh(&mut self) {
        let u = &self.state.heights;
        self.rates = (0..u.len())
            .map(|i| jump_rate(u, i, self.field, &self.rate, self.force))
            .collect();
        let abs: Vec<f64> = self.rates.iter().map(|r| r.abs()).collect();
        self.tree = Fenwick::from_weights(&abs);
        self.active = self.rates.iter().filter(|&&r| r != 0.0).count();
        self.since_refresh = 0;
    }

    pub fn state(&self) -> &InterfaceState {
        &self.state
    }

    pub fn into_state(self) -> InterfaceState {
        self.state
    }

    /// The incrementally maintained signed rates.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn total_rate(&self) -> f64 {
        self.tree.total()
    }

    fn update_site(&mut self, i: usize) {
        let new = jump_rate(&self.state.heights, i, self.field, &self.rate, self.force);
        let old = self.rates[i];
        if new != old {
            self.active = self.active + usize::from(new != 0.0) - usize::from(old != 0.0);
            self.tree.add(i, new.abs() - old.abs());
            self.rates[i] = new;
        }
    }

    /// Advance by one event.
    pub fn step(&mut self) -> StepOutcome {
        if self.active == 0 {
            return StepOutcome::Frozen;
        }
        let total = self.tree.total();
        let ev = self.state.event_count as i64;
        let u_time = self.seed.uniform_open_closed(&[ev, 0]);
        let u_site = self.seed.uniform(&[ev, 1]);
        let mut site = self.tree.select(u_site * total);
        if self.rates[site] == 0.0 {
            // floating-point residue landed on a zero-rate site; fall back to a linear scan
            site = self.linear_select(u_site);
        }
        let delta = if self.rates[site] > 0.0 { 1 } else { -1 };
        self.state.heights[site] += delta;
        self.state.time += -u_time.ln() / total;
        self.state.event_count += 1;
        let (l, r) = neighbors(self.state.width(), site);
        self.update_site(site);
        self.update_site(l);
        self.update_site(r);
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_EVERY {
            self.refresh();
        }
        StepOutcome::Moved { site, delta }
    }

    fn linear_select(&self, u: f64) -> usize {
        let total: f64 = self.rates.iter().map(|r| r.abs()).sum();
        let mut target = u * total;
        let mut last = 0;
        for (i, r) in self.rates.iter().enumerate() {
            if *r == 0.0 {
                continue;
            }
            last = i;
            if target < r.abs() {
                return i;
            }
            target -= r.abs();
        }
        last
    }
}

/// One event of the jump process: convenience wrapper over [`Kmc`].
pub fn kmc_step<S: SiteForce + ?Sized>(
    state: InterfaceState,
    field: &S,
    rate: RateFunction,
    force: i64,
    seed: EnvironmentSeed,
) -> Result<(InterfaceState, StepOutcome)> {
    let mut kmc = Kmc::new(state, field, rate, force, seed)?;
    let outcome = kmc.step();
    Ok((kmc.into_state(), outcome))
}

/// When to stop a run. Unset limits are ignored; with none set the run only
/// ends on freezing or barrier violation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StopCondition {
    #[serde(default)]
    pub max_time: Option<f64>,
    #[serde(default)]
    pub max_events: Option<u64>,
    #[serde(default)]
    pub height_cap: Option<i64>,
    /// A trajectory row is recorded every this many events (0 disables).
    #[serde(default)]
    pub record_every: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxTime,
    MaxEvents,
    HeightCap,
    Violation,
    Frozen,
}

/// First site at which the interface rose above the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub site: usize,
    pub height: i64,
    pub barrier: i64,
    pub time: f64,
    pub event: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub time: f64,
    pub max_height: i64,
    pub mean_height: f64,
    pub event_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub final_state: InterfaceState,
    pub rows: Vec<TrajectoryRow>,
    pub max_height_seen: i64,
    pub stop_reason: StopReason,
    pub violation: Option<Violation>,
}

fn row(s: &InterfaceState) -> TrajectoryRow {
    TrajectoryRow {
        time: s.time,
        max_height: s.max_height(),
        mean_height: s.mean_height(),
        event_count: s.event_count,
    }
}

/// Run the dynamics until `stop` fires, optionally watching a barrier `v`.
pub fn run_until<S: SiteForce + ?Sized>(
    state: InterfaceState,
    field: &S,
    rate: RateFunction,
    force: i64,
    seed: EnvironmentSeed,
    stop: &StopCondition,
    barrier: Option<&[i64]>,
) -> Result<Trajectory> {
    if let Some(v) = barrier {
        if v.len() != state.width() {
            return Err(Error::InvalidParameter(format!(
                "barrier width {} != window width {}",
                v.len(),
                state.width()
            )));
        }
    }
    let mut kmc = Kmc::new(state, field, rate, force, seed)?;
    let mut rows = Vec::new();
    let mut max_seen = kmc.state().max_height();
    if stop.record_every > 0 {
        rows.push(row(kmc.state()));
    }
    let initial_violation = barrier.and_then(|v| {
        let s = kmc.state();
        (0..s.width())
            .find(|&i| s.heights[i] > v[i])
            .map(|i| Violation {
                site: i,
                height: s.heights[i],
                barrier: v[i],
                time: s.time,
                event: s.event_count,
            })
    });
    let mut violation = initial_violation;
    let reason = if violation.is_some() {
        StopReason::Violation
    } else {
        loop {
            if let Some(cap) = stop.height_cap {
                if max_seen >= cap {
                    break StopReason::HeightCap;
                }
            }
            if let Some(me) = stop.max_events {
                if kmc.state().event_count >= me {
                    break StopReason::MaxEvents;
                }
            }
            if let Some(mt) = stop.max_time {
                if kmc.state().time >= mt {
                    break StopReason::MaxTime;
                }
            }
            match kmc.step() {
                StepOutcome::Frozen => break StopReason::Frozen,
                StepOutcome::Moved { site, .. } => {
                    let s = kmc.state();
                    let h = s.heights[site];
                    max_seen = max_seen.max(h);
                    if stop.record_every > 0 && s.event_count % stop.record_every == 0 {
                        rows.push(row(s));
                    }
                    if let Some(v) = barrier {
                        if h > v[site] {
                            violation = Some(Violation {
                                site,
                                height: h,
                                barrier: v[site],
                                time: s.time,
                                event: s.event_count,
                            });
                            break StopReason::Violation;
                        }
                    }
                }
            }
        }
    };
    let final_state = kmc.into_state();
    if stop.record_every > 0 && rows.last().map(|r| r.event_count) != Some(final_state.event_count)
    {
        rows.push(row(&final_state));
    }
    Ok(Trajectory {
        max_height_seen: max_seen,
        final_state,
        rows,
        stop_reason: reason,
        violation,
    })
}
