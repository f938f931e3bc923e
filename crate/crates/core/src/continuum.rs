//! Explicit finite differences for `u_t = Δu − f(x, u) + F` on a periodic
//! grid, and the containment run below an assembled supersolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{periodic_diff, ForceField};
use crate::supersolution::SupersolutionAssembly;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    pub dims: Vec<usize>,
    pub dx: f64,
    pub u: Vec<f64>,
    pub t: f64,
    pub steps: u64,
}

impl GridState {
    pub fn flat(dims: Vec<usize>, dx: f64, value: f64) -> Self {
        let len = dims.iter().product();
        Self {
            dims,
            dx,
            u: vec![value; len],
            t: 0.0,
            steps: 0,
        }
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.u.iter().sum::<f64>() / self.u.len() as f64
    }

    /// Position of node `i` (first axis fastest).
    pub fn node(&self, mut i: usize) -> [f64; 2] {
        let mut x = [0.0; 2];
        for (k, &d) in self.dims.iter().enumerate() {
            x[k] = (i % d) as f64 * self.dx;
            i /= d;
        }
        x
    }
}

/// Per-node obstacle terms `(s·Π factor(x − x_i), y_i)` and a stable step.
#[derive(Debug, Clone)]
pub struct ContinuumSolver<'a> {
    field: &'a ForceField,
    pub force: f64,
    pub dims: Vec<usize>,
    pub dx: f64,
    pub dt: f64,
    terms: Vec<Vec<(f64, f64)>>,
}

/// Default node budget for [`ContinuumSolver::new`].
pub const NODE_BUDGET: usize = 4_000_000;

impl<'a> ContinuumSolver<'a> {
    /// Grid with spacing close to `dx` that tiles the period exactly.
    pub fn new(field: &'a ForceField, force: f64, dx: f64, budget: usize) -> Result<Self> {
        let period = &field.obstacles().domain.period;
        let n = period.len();
        if !(dx > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {dx}"
            )));
        }
        let mut nodes: u128 = 1;
        let mut dims = Vec::with_capacity(n);
        for &p in period {
            let k = (p / dx).round().max(3.0);
            nodes = nodes.saturating_mul(if k.is_finite() && k < 1e30 {
                k as u128
            } else {
                u128::MAX
            });
            dims.push(k as usize);
        }
        if nodes > budget as u128 {
            return Err(Error::GridTooLarge { nodes, budget });
        }
        let dx = period[0] / dims[0] as f64;
        if n == 2 && ((period[1] / dims[1] as f64 - dx) / dx).abs() > 1e-9 {
            return Err(Error::InvalidGeometry(
                "grid spacing must match along both axes".into(),
            ));
        }
        let bump = *field.bump();
        let probe = GridState::flat(dims.clone(), dx, 0.0);
        let mut terms = Vec::with_capacity(probe.u.len());
        let mut lip: f64 = 0.0;
        let slope = 1.875 / (bump.rho_out - bump.rho);
        for i in 0..probe.u.len() {
            let x = probe.node(i);
            let mut t = Vec::new();
            for &o in &field.obstacles_near_column(&x[..n], f64::INFINITY) {
                let o = field.obstacles().obstacles[o];
                let c: f64 = (0..n)
                    .map(|k| bump.factor(periodic_diff(x[k], o.x[k], period[k])))
                    .product();
                if c > 0.0 {
                    t.push((o.strength * c, o.y));
                }
            }
            lip = lip.max(t.iter().map(|(c, _)| c * slope).sum());
            terms.push(t);
        }
        let diff = 2.0 * n as f64 / (dx * dx);
        let dt = (0.8 / diff).min(0.9 / (diff + lip));
        Ok(Self {
            field,
            force,
            dims,
            dx,
            dt,
            terms,
        })
    }

    pub fn field(&self) -> &ForceField {
        self.field
    }

    pub fn flat_state(&self, value: f64) -> GridState {
        GridState::flat(self.dims.clone(), self.dx, value)
    }

    #[inline]
    fn force_at(&self, i: usize, u: f64) -> f64 {
        let bump = self.field.bump();
        self.terms[i]
            .iter()
            .map(|&(c, y)| c * bump.factor(u - y))
            .sum()
    }

    /// One forward Euler step of size `dt` (at most the stable step).
    pub fn step_by(&self, state: &mut GridState, dt: f64) -> Result<()> {
        let dt = dt.min(self.dt);
        let inv = 1.0 / (self.dx * self.dx);
        let u = &state.u;
        let mut next = Vec::with_capacity(u.len());
        let d0 = self.dims[0];
        for i in 0..u.len() {
            let c = u[i];
            let i0 = i % d0;
            let base = i - i0;
            let left = base + (i0 + d0 - 1) % d0;
            let right = base + (i0 + 1) % d0;
            let mut lap = u[left] + u[right] - 2.0 * c;
            if self.dims.len() == 2 {
                let d1 = self.dims[1];
                let i1 = i / d0;
                let down = i0 + ((i1 + d1 - 1) % d1) * d0;
                let up = i0 + ((i1 + 1) % d1) * d0;
                lap += u[down] + u[up] - 2.0 * c;
            }
            let v = c + dt * (lap * inv - self.force_at(i, c) + self.force);
            if !v.is_finite() {
                return Err(Error::NumericalBlowup {
                    time: state.t,
                    node: i,
                });
            }
            next.push(v);
        }
        state.u = next;
        state.t += dt;
        state.steps += 1;
        Ok(())
    }

    pub fn step(&self, state: &mut GridState) -> Result<()> {
        self.step_by(state, self.dt)
    }

    /// Advance to time `t_end`, landing on it exactly.
    pub fn run_until(&self, state: &mut GridState, t_end: f64) -> Result<()> {
        while state.t < t_end {
            let dt = (t_end - state.t).min(self.dt);
            self.step_by(state, dt)?;
            if t_end - state.t < 1e-12 * t_end.max(1.0) {
                state.t = t_end;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumOptions {
    pub dx: f64,
    pub horizon: f64,
    pub node_budget: usize,
    /// Containment tolerance is `tolerance_factor · dx²`.
    pub tolerance_factor: f64,
    /// Largest growth of `max u` over the second half that counts as a plateau.
    pub plateau_tolerance: f64,
    pub rows: usize,
}

impl Default for ContinuumOptions {
    fn default() -> Self {
        Self {
            dx: 1.0 / 32.0,
            horizon: 100.0,
            node_budget: NODE_BUDGET,
            tolerance_factor: 1.0,
            plateau_tolerance: 1e-2,
            rows: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Grid,
    /// No obstacle can be reached below `F·T`, so `u(x, t) = F t` exactly.
    FlatFastPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumRow {
    pub time: f64,
    pub max_u: f64,
    pub mean_u: f64,
    /// `max (u − v)` at this time.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub mode: RunMode,
    pub dx: f64,
    pub dt: f64,
    pub steps: u64,
    pub horizon: f64,
    pub tolerance: f64,
    /// `sup (u − v)` over all recorded times (an upper bound on the fast path).
    pub sup_excess: f64,
    pub contained: bool,
    pub plateau_growth: f64,
    pub plateau: bool,
    pub rows: Vec<ContinuumRow>,
}

/// Start flat at zero and check `u ≤ v + c·dx²` up to the horizon, then
/// report whether `max u` has stopped growing.
pub fn containment_run(
    field: &ForceField,
    force: f64,
    asm: &SupersolutionAssembly,
    opts: &ContinuumOptions,
) -> Result<ContainmentReport> {
    if !(opts.horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let tolerance = opts.tolerance_factor * opts.dx * opts.dx;
    let r1 = field.bump().r1;
    let reachable = field
        .obstacles()
        .obstacles
        .iter()
        .any(|o| o.y - r1 < force * opts.horizon);
    let rows_n = opts.rows.max(2);
    if !reachable {
        let floor = asm.min_value_bound();
        let rows: Vec<ContinuumRow> = (0..=rows_n)
            .map(|k| {
                let t = opts.horizon * k as f64 / rows_n as f64;
                ContinuumRow {
                    time: t,
                    max_u: force * t,
                    mean_u: force * t,
                    excess: force * t - floor,
                }
            })
            .collect();
        let sup_excess = force * opts.horizon - floor;
        let growth = force * opts.horizon / 2.0;
        return Ok(ContainmentReport {
            mode: RunMode::FlatFastPath,
            dx: opts.dx,
            dt: opts.horizon,
            steps: 0,
            horizon: opts.horizon,
            tolerance,
            sup_excess,
            contained: sup_excess <= tolerance,
            plateau_growth: growth,
            plateau: growth <= opts.plateau_tolerance,
            rows,
        });
    }
    let solver = ContinuumSolver::new(field, force, opts.dx, opts.node_budget)?;
    let mut state = solver.flat_state(0.0);
    let v: Vec<f64> = (0..state.u.len())
        .map(|i| asm.eval(&state.node(i)[..asm.n()]))
        .collect();
    let excess = |s: &GridState| {
        s.u.iter()
            .zip(&v)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut sup_excess = excess(&state);
    let mut rows = vec![ContinuumRow {
        time: 0.0,
        max_u: state.max(),
        mean_u: state.mean(),
        excess: sup_excess,
    }];
    let mut half_max = None;
    for k in 1..=rows_n {
        let target = opts.horizon * k as f64 / rows_n as f64;
        while state.t < target {
            let dt = (target - state.t).min(solver.dt);
            solver.step_by(&mut state, dt)?;
            if target - state.t < 1e-12 * target {
                state.t = target;
            }
            sup_excess = sup_excess.max(excess(&state));
        }
        let row = ContinuumRow {
            time: state.t,
            max_u: state.max(),
            mean_u: state.mean(),
            excess: excess(&state),
        };
        if half_max.is_none() && state.t >= opts.horizon / 2.0 {
            half_max = Some(row.max_u);
        }
        rows.push(row);
    }
    let growth = state.max() - half_max.unwrap_or(0.0);
    Ok(ContainmentReport {
        mode: RunMode::Grid,
        dx: solver.dx,
        dt: solver.dt,
        steps: state.steps,
        horizon: opts.horizon,
        tolerance,
        sup_excess,
        contained: sup_excess <= tolerance,
        plateau_growth: growth,
        plateau: growth <= opts.plateau_tolerance,
        rows,
    })
}
