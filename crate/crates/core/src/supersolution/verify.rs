//! Grid check of `Δv − f(x, v) + F ≤ tol` away from the kink set, plus
//! one-sided slope checks on the kink set itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assembly::SupersolutionAssembly;
use crate::error::{Error, Result};
use crate::field::ForceField;

/// How the force is evaluated at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceMode {
    /// Every obstacle, at absolute coordinates. Needs a domain small enough
    /// for absolute positions to resolve the grid.
    FullField,
    /// Only the anchor's own obstacle, in its frame. A lower bound on `f`.
    OwnAnchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Grid step near anchors; default `min(r0, d)/32`.
    pub fine_spacing: Option<f64>,
    /// Grid step elsewhere (n = 1); default `d/64`.
    pub coarse_spacing: Option<f64>,
    /// Chosen from the domain size when `None`.
    pub force_mode: Option<ForceMode>,
    pub abs_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            fine_spacing: None,
            coarse_spacing: None,
            force_mode: None,
            abs_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub anchor: usize,
    pub delta: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub force: f64,
    pub tolerance: f64,
    pub fine_spacing: f64,
    pub coarse_spacing: f64,
    pub force_mode: ForceMode,
    pub points_checked: usize,
    pub points_in_collar: usize,
    pub violations: usize,
    pub worst: Option<ResidualPoint>,
    pub kink_checks: usize,
    pub kink_failures: usize,
    /// Smallest `left slope − right slope` seen on the kink set.
    pub worst_kink_margin: f64,
    pub max_nearest_distance: f64,
    pub r_out: f64,
    pub min_value_bound: f64,
}

#[derive(Default)]
struct Partial {
    checked: usize,
    collar: usize,
    violations: usize,
    worst: Option<ResidualPoint>,
    kinks: usize,
    kink_failures: usize,
    kink_margin: f64,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.checked += o.checked;
        self.collar += o.collar;
        self.violations += o.violations;
        self.kinks += o.kinks;
        self.kink_failures += o.kink_failures;
        self.kink_margin = self.kink_margin.min(o.kink_margin);
        if o.worst.map(|w| w.residual) > self.worst.map(|w| w.residual) {
            self.worst = o.worst;
        }
        self
    }
}

struct Ctx<'a> {
    asm: &'a SupersolutionAssembly,
    field: &'a ForceField,
    force: f64,
    tol: f64,
    mode: ForceMode,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.asm.n()
    }

    fn shifted(&self, delta: &[f64], k: usize, s: f64) -> [f64; 2] {
        let mut d = [0.0; 2];
        d[..self.n()].copy_from_slice(delta);
        d[k] += s;
        d
    }

    fn owner(&self, a: usize, delta: &[f64]) -> usize {
        self.asm.nearest(a, delta).0
    }

    fn residual(&self, a: usize, delta: &[f64], rel_value: f64, step: f64) -> f64 {
        let n = self.n();
        let profile = &self.asm.spec.profile;
        let mut lap = 0.0;
        let centre = self.asm.lift_rel(a, delta);
        for k in 0..n {
            let flat = profile.second_difference(delta, k, step);
            let up = self.asm.lift_rel(a, &self.shifted(delta, k, step)[..n]);
            let down = self.asm.lift_rel(a, &self.shifted(delta, k, -step)[..n]);
            lap += (flat + (up + down - 2.0 * centre)) / (step * step);
        }
        let anchor = &self.asm.anchors[a];
        let f = match self.mode {
            ForceMode::OwnAnchor => anchor.strength * self.field.bump().eval(delta, rel_value),
            ForceMode::FullField => {
                let pitch = self.asm.lifting.pitch();
                let cell = self.asm.lifting.coord(a);
                let mut x = [0.0; 2];
                for k in 0..n {
                    x[k] = (cell[k] as f64 * pitch + anchor.offset[k] + delta[k])
                        .rem_euclid(self.asm.period[k]);
                }
                self.field.eval_force(&x[..n], anchor.y + rel_value)
            }
        };
        lap - f + self.force
    }

    /// Locate the switch from anchor `a` to `b` on `δ + t e_k`, `t ∈ [0, span]`,
    /// and compare one-sided slopes there.
    fn kink_margin(&self, a: usize, b: usize, delta: &[f64], k: usize, span: f64) -> f64 {
        let n = self.n();
        let profile = &self.asm.spec.profile;
        let rel_b = self
            .asm
            .neighbor_anchors(a)
            .into_iter()
            .find(|&(c, _)| c == b)
            .map(|(_, r)| r)
            .unwrap_or([0.0; 2]);
        let gap = |t: f64| {
            let p = self.shifted(delta, k, t);
            let ra = p[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
            let rb = (0..n)
                .map(|i| (p[i] - rel_b[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            (ra - rb, p, ra, rb)
        };
        let (mut lo, mut hi) = (0.0, span);
        if gap(lo).0 * gap(hi).0 > 0.0 {
            // the switch happens through a third anchor; compare at the far end
            lo = hi;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).0 <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= span * 1e-15 {
                break;
            }
        }
        let (_, p, ra, rb) = gap(0.5 * (lo + hi));
        let dir = span.signum();
        let left = profile.radial_slope(ra) * p[k] / ra * dir;
        let right = profile.radial_slope(rb) * (p[k] - rel_b[k]) / rb * dir;
        left - right
    }

    fn check_point(&self, a: usize, delta: &[f64], step: f64, part: &mut Partial) {
        let n = self.n();
        let p = self.asm.at(a, delta);
        if p.anchor != a {
            return;
        }
        let profile = &self.asm.spec.profile;
        let mut in_collar = (p.r - profile.r_in).abs() <= 2.0 * step;
        for k in 0..n {
            for s in [-2.0 * step, 2.0 * step] {
                let b = self.owner(a, &self.shifted(delta, k, s)[..n]);
                if b != a {
                    in_collar = true;
                    let margin = self.kink_margin(a, b, delta, k, s);
                    part.kinks += 1;
                    part.kink_margin = part.kink_margin.min(margin);
                    if margin < -self.tol {
                        part.kink_failures += 1;
                    }
                }
            }
        }
        if in_collar {
            part.collar += 1;
            return;
        }
        let residual = self.residual(a, delta, p.rel_value, step);
        part.checked += 1;
        if residual > self.tol {
            part.violations += 1;
        }
        if part.worst.map_or(true, |w| residual > w.residual) {
            let mut d = [0.0; 2];
            d[..n].copy_from_slice(delta);
            part.worst = Some(ResidualPoint {
                anchor: a,
                delta: d,
                residual,
            });
        }
    }

    fn check_anchor(&self, a: usize, fine: f64, coarse: f64) -> Partial {
        let n = self.n();
        let spec = &self.asm.spec;
        let mut part = Partial {
            kink_margin: f64::INFINITY,
            ..Partial::default()
        };
        let kink = spec.profile.kink_condition();
        part.kinks += 1;
        part.kink_margin = part.kink_margin.min(kink.slope_margin);
        if kink.slope_margin < -self.tol * kink.inner_slope.abs().max(1.0) {
            part.kink_failures += 1;
        }
        if n == 1 {
            let fine_reach = spec.r1 + 4.0 * fine;
            let nf = (fine_reach / fine).ceil() as i64;
            for i in -nf..=nf {
                self.check_point(a, &[i as f64 * fine], fine, &mut part);
            }
            let nc = (spec.profile.r_out / coarse).ceil() as i64;
            for i in -nc..=nc {
                let x = i as f64 * coarse;
                if x.abs() > fine_reach {
                    self.check_point(a, &[x], coarse, &mut part);
                }
            }
        } else {
            let reach = spec.profile.r_out;
            let ni = (reach / fine).ceil() as i64;
            for i in -ni..=ni {
                for j in -ni..=ni {
                    self.check_point(a, &[i as f64 * fine, j as f64 * fine], fine, &mut part);
                }
            }
        }
        part
    }
}

/// Check an assembled supersolution against the force field at driving force `force`.
pub fn verify_supersolution(
    asm: &SupersolutionAssembly,
    field: &ForceField,
    force: f64,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let spec = &asm.spec;
    if field.bump().n != spec.n {
        return Err(Error::InvalidGeometry(
            "field and assembly dimensions differ".into(),
        ));
    }
    let fine = opts.fine_spacing.unwrap_or(spec.r0.min(spec.d) / 32.0);
    let coarse = opts.coarse_spacing.unwrap_or(spec.d / 64.0);
    if !(fine > 0.0 && coarse > 0.0) {
        return Err(Error::InvalidParameter(
            "grid spacings must be positive".into(),
        ));
    }
    if spec.n == 2 {
        let per_axis = 2.0 * asm.lifting.pitch() / fine;
        if per_axis * per_axis * asm.anchors.len() as f64 > 5e7 {
            return Err(Error::GridTooLarge {
                nodes: (per_axis * per_axis) as u128 * asm.anchors.len() as u128,
                budget: 50_000_000,
            });
        }
    }
    let extent = asm
        .period
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(asm.lifting.heights.iter().copied().fold(0.0, f64::max));
    let resolvable = extent * f64::EPSILON <= 1e-9 * spec.r1;
    let mode = opts.force_mode.unwrap_or(if resolvable {
        ForceMode::FullField
    } else {
        ForceMode::OwnAnchor
    });
    if mode == ForceMode::FullField && !resolvable {
        return Err(Error::InvalidParameter(format!(
            "domain extent {extent:e} too large to evaluate the full field at absolute coordinates"
        )));
    }
    let tol = opts.abs_tolerance + fine * fine;
    let ctx = Ctx {
        asm,
        field,
        force,
        tol,
        mode,
    };
    let part = (0..asm.anchors.len())
        .into_par_iter()
        .map(|a| ctx.check_anchor(a, fine, coarse))
        .reduce(
            || Partial {
                kink_margin: f64::INFINITY,
                ..Partial::default()
            },
            Partial::merge,
        );
    let min_value_bound = asm.min_value_bound();
    let coverage_ok = asm.coverage.max_nearest_distance <= asm.coverage.r_out;
    Ok(VerificationReport {
        pass: part.violations == 0
            && part.kink_failures == 0
            && coverage_ok
            && min_value_bound >= 0.0,
        force,
        tolerance: tol,
        fine_spacing: fine,
        coarse_spacing: coarse,
        force_mode: mode,
        points_checked: part.checked,
        points_in_collar: part.collar,
        violations: part.violations,
        worst: part.worst,
        kink_checks: part.kinks,
        kink_failures: part.kink_failures,
        worst_kink_margin: part.kink_margin,
        max_nearest_distance: asm.coverage.max_nearest_distance,
        r_out: asm.coverage.r_out,
        min_value_bound,
    })
}
