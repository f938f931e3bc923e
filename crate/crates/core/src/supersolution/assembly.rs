//! Gluing: one strong obstacle per box on the minimal Lipschitz surface, a
//! radial profile around each, and the lift between them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lifting::{build_lifting, Lifting};
use super::pipeline::AssemblySpec;
use crate::error::{Error, Result};
use crate::field::{periodic_diff, ObstacleSet};
use crate::percolation::{find_minimal_surface, LipschitzSurface, Openness, SiteField};

/// Boxes `Q_{a,j}` holding at least one obstacle of strength `≥ anchor_floor`
/// whose support stays inside the box horizontally.
#[derive(Debug, Clone, Default)]
pub struct OpenBoxes {
    dims: Vec<usize>,
    /// `(column, layer)` to the index of the strongest qualifying obstacle.
    best: HashMap<(usize, i64), usize>,
}

impl OpenBoxes {
    pub fn new(spec: &AssemblySpec, dims: &[usize], set: &ObstacleSet) -> Result<Self> {
        check_domain(spec, dims, set)?;
        let pitch = spec.l + spec.d;
        let n = dims.len();
        let mut best: HashMap<(usize, i64), usize> = HashMap::new();
        for (i, o) in set.obstacles.iter().enumerate() {
            if o.strength < spec.anchor_floor {
                continue;
            }
            let mut idx = 0;
            let mut stride = 1;
            let mut inside = true;
            for k in 0..n {
                let a = (o.x[k] / pitch).round() as i64;
                let off = o.x[k] - a as f64 * pitch;
                inside &= off.abs() <= spec.l / 2.0 - spec.r1;
                idx += a.rem_euclid(dims[k] as i64) as usize * stride;
                stride *= dims[k];
            }
            if !inside {
                continue;
            }
            let j = (((o.y - spec.r1) / spec.h).ceil() as i64).max(1);
            best.entry((idx, j))
                .and_modify(|b| {
                    if set.obstacles[*b].strength < o.strength {
                        *b = i;
                    }
                })
                .or_insert(i);
        }
        Ok(Self {
            dims: dims.to_vec(),
            best,
        })
    }

    pub fn open_count(&self) -> usize {
        self.best.len()
    }

    pub fn anchor_of(&self, column: usize, layer: i64) -> Option<usize> {
        self.best.get(&(column, layer)).copied()
    }

    fn column(&self, a: &[i64]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (k, &d) in self.dims.iter().enumerate() {
            idx += a[k].rem_euclid(d as i64) as usize * stride;
            stride *= d;
        }
        idx
    }
}

impl Openness for OpenBoxes {
    fn is_open(&self, a: &[i64], j: i64) -> bool {
        self.best.contains_key(&(self.column(a), j))
    }
}

fn check_domain(spec: &AssemblySpec, dims: &[usize], set: &ObstacleSet) -> Result<()> {
    if dims.len() != spec.n || set.n() != spec.n {
        return Err(Error::InvalidGeometry(format!(
            "dimension mismatch: {} box axes, {} obstacle axes, n = {}",
            dims.len(),
            set.n(),
            spec.n
        )));
    }
    let pitch = spec.l + spec.d;
    for (k, &dk) in dims.iter().enumerate() {
        let want = dk as f64 * pitch;
        if ((set.domain.period[k] - want) / want).abs() > 1e-9 {
            return Err(Error::InvalidGeometry(format!(
                "period {} along axis {k} must equal {dk} box pitches = {want}",
                set.domain.period[k]
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub column: usize,
    pub layer: i64,
    pub obstacle: usize,
    /// Obstacle center minus box center.
    pub offset: [f64; 2],
    pub y: f64,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub max_nearest_distance: f64,
    pub r_out: f64,
    pub points: usize,
}

/// `v` at a point given as an offset from some anchor, re-expressed from
/// the nearest anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub anchor: usize,
    pub delta: [f64; 2],
    pub r: f64,
    /// `v − y_anchor`
    pub rel_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionAssembly {
    pub spec: AssemblySpec,
    pub dims: Vec<usize>,
    pub period: Vec<f64>,
    pub surface: LipschitzSurface,
    pub anchors: Vec<Anchor>,
    pub lifting: Lifting,
    pub coverage: Coverage,
}

/// Minimal Lipschitz surface through the open boxes of `set`, within `max_layers`.
pub fn box_surface(
    spec: &AssemblySpec,
    dims: &[usize],
    set: &ObstacleSet,
    max_layers: i64,
) -> Result<(OpenBoxes, LipschitzSurface)> {
    let open = OpenBoxes::new(spec, dims, set)?;
    let field = SiteField::new(dims.to_vec(), max_layers, open.clone())?;
    let surface = find_minimal_surface(&field).ok_or_else(|| {
        Error::Assembly(format!(
            "no Lipschitz surface of open boxes within {max_layers} layers"
        ))
    })?;
    Ok((open, surface))
}

/// Place anchors on `surface`, build the lift and check coverage.
pub fn assemble(
    spec: &AssemblySpec,
    surface: &LipschitzSurface,
    set: &ObstacleSet,
) -> Result<SupersolutionAssembly> {
    let dims = surface.dims.clone();
    let open = OpenBoxes::new(spec, &dims, set)?;
    let pitch = spec.l + spec.d;
    let n = spec.n;
    let mut anchors = Vec::with_capacity(surface.heights.len());
    for (column, &layer) in surface.heights.iter().enumerate() {
        let obstacle = open.anchor_of(column, layer).ok_or_else(|| {
            Error::Assembly(format!(
                "box ({column}, {layer}) holds no qualifying obstacle"
            ))
        })?;
        let o = set.obstacles[obstacle];
        let mut offset = [0.0; 2];
        let mut rest = column;
        for k in 0..n {
            let a = (rest % dims[k]) as f64;
            rest /= dims[k];
            offset[k] = periodic_diff(o.x[k], a * pitch, set.domain.period[k]);
        }
        anchors.push(Anchor {
            column,
            layer,
            obstacle,
            offset,
            y: o.y,
            strength: o.strength,
        });
    }
    let lifting = build_lifting(
        dims.clone(),
        spec.l,
        spec.d,
        spec.h,
        anchors.iter().map(|a| a.y).collect(),
    )?;
    let mut asm = SupersolutionAssembly {
        spec: *spec,
        period: set.domain.period.clone(),
        dims,
        surface: surface.clone(),
        anchors,
        lifting,
        coverage: Coverage {
            max_nearest_distance: 0.0,
            r_out: spec.profile.r_out,
            points: 0,
        },
    };
    asm.coverage = asm.check_coverage()?;
    Ok(asm)
}

impl SupersolutionAssembly {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    fn cell(&self, column: usize) -> [i64; 2] {
        self.lifting.coord(column)
    }

    /// Anchors of the `3ⁿ` boxes around `column`, with their position relative to its anchor.
    pub fn neighbor_anchors(&self, column: usize) -> Vec<(usize, [f64; 2])> {
        let n = self.n();
        let a = self.cell(column);
        let me = self.anchors[column].offset;
        let pitch = self.lifting.pitch();
        let mut out = Vec::with_capacity(9);
        let range: &[i64] = &[-1, 0, 1];
        let second: &[i64] = if n == 2 { range } else { &[0] };
        for &o1 in second {
            for &o0 in range {
                let o = [o0, o1];
                let mut b = a;
                for k in 0..n {
                    b[k] += o[k];
                }
                let col = self.lifting.index(&b[..n]);
                let other = self.anchors[col].offset;
                let mut rel = [0.0; 2];
                for k in 0..n {
                    rel[k] = o[k] as f64 * pitch + (other[k] - me[k]);
                }
                if !out
                    .iter()
                    .any(|&(c, r): &(usize, [f64; 2])| c == col && r == rel)
                {
                    out.push((col, rel));
                }
            }
        }
        out
    }

    /// Nearest anchor to the point `δ` (relative to anchor `column`).
    pub fn nearest(&self, column: usize, delta: &[f64]) -> (usize, [f64; 2], f64) {
        let n = self.n();
        let mut best = (column, [0.0; 2], f64::INFINITY);
        for (col, rel) in self.neighbor_anchors(column) {
            let mut db = [0.0; 2];
            for k in 0..n {
                db[k] = delta[k] - rel[k];
            }
            let r = db[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
            if r < best.2 || (r == best.2 && col == column) {
                best = (col, db, r);
            }
        }
        best
    }

    /// Lift minus `y_b` at offset `δ` from anchor `b`.
    pub fn lift_rel(&self, column: usize, delta: &[f64]) -> f64 {
        let anchor = &self.anchors[column];
        let mut e = [0.0; 2];
        for k in 0..self.n() {
            e[k] = anchor.offset[k] + delta[k];
        }
        let cell = self.cell(column);
        self.lifting
            .eval_rel(&cell[..self.n()], &e[..self.n()], anchor.y)
    }

    /// `v` at `δ` from anchor `column`, evaluated from the nearest anchor.
    pub fn at(&self, column: usize, delta: &[f64]) -> FramePoint {
        let (b, db, r) = self.nearest(column, delta);
        let local = self.spec.profile.value(r).unwrap_or(f64::INFINITY);
        FramePoint {
            anchor: b,
            delta: db,
            r,
            rel_value: local + self.lift_rel(b, &db[..self.n()]),
        }
    }

    /// `v` at an absolute base point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let pitch = self.lifting.pitch();
        let mut a = [0i64; 2];
        let mut delta = [0.0; 2];
        for k in 0..n {
            let xk = x[k].rem_euclid(self.period[k]);
            a[k] = (xk / pitch).round() as i64;
            delta[k] = xk - a[k] as f64 * pitch;
        }
        let column = self.lifting.index(&a[..n]);
        for k in 0..n {
            delta[k] -= self.anchors[column].offset[k];
        }
        let p = self.at(column, &delta[..n]);
        self.anchors[p.anchor].y + p.rel_value
    }

    /// Lower bound of `v`: every profile is at least `−r_in` and the lift at least the lowest anchor.
    pub fn min_value_bound(&self) -> f64 {
        self.lifting.min_height() + self.spec.profile.phi_at_zero().min(0.0)
    }

    fn check_coverage(&self) -> Result<Coverage> {
        let n = self.n();
        let r_out = self.spec.profile.r_out;
        let pitch = self.lifting.pitch();
        let per = 16usize;
        let mut worst = 0.0f64;
        let mut points = 0;
        for column in 0..self.anchors.len() {
            let cell = self.cell(column);
            let off = self.anchors[column].offset;
            let total = per.pow(n as u32);
            for i in 0..total {
                let mut delta = [0.0; 2];
                let mut rest = i;
                for k in 0..n {
                    let e = ((rest % per) as f64 + 0.5) / per as f64 * pitch - pitch / 2.0;
                    rest /= per;
                    delta[k] = e - off[k];
                }
                let (_, _, r) = self.nearest(column, &delta[..n]);
                points += 1;
                if r > r_out {
                    let x = (0..n)
                        .map(|k| {
                            (cell[k] as f64 * pitch + off[k] + delta[k]).rem_euclid(self.period[k])
                        })
                        .collect();
                    return Err(Error::CoverageGap {
                        x,
                        distance: r,
                        r_out,
                    });
                }
                worst = worst.max(r);
            }
        }
        Ok(Coverage {
            max_nearest_distance: worst,
            r_out,
            points,
        })
    }
}

/// A hand-sized periodic configuration where every quantity is order one:
/// strong anchors on a smooth Lipschitz surface plus weak Pareto obstacles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallExample {
    pub spec: AssemblySpec,
    pub dims: Vec<usize>,
    pub force: f64,
    pub set: ObstacleSet,
}

pub fn small_example(n: usize, seed: u64) -> Result<SmallExample> {
    use super::lifting::lifting_constant;
    use super::profile::LocalProfile;
    use crate::field::{Obstacle, ObstacleBox};
    use crate::quenched::StrengthDistribution;
    use crate::rng::{streams, EnvironmentSeed};

    let (r0, r1, l, d) = (0.5, 1.0, 2.4, 2.0);
    let nf = n as f64;
    let c1 = lifting_constant(n)?;
    let f_out = 2.1;
    let h = f_out * d * d / (2.0 * c1);
    let r_out = nf.sqrt() * (l + d / 2.0 - r1);
    // smallest m whose inner force clears the kink with φ(0) = −r0
    let need = f_out / nf * ((r_out / r0).powi(n as i32) - 1.0);
    let mut m = 2.0f64;
    while (m + 2.0) / r0 < need {
        m += 1.0;
    }
    let f_in = (m + nf) * (m + 2.0) / r0;
    let strength = (f_in + 16.0).ceil();
    let profile = LocalProfile::new(n, m, r0, r_out, f_in, f_out)?;
    let spec = AssemblySpec {
        n,
        r0,
        r1,
        l,
        d,
        h,
        anchor_floor: strength,
        profile,
    };
    let side: usize = if n == 1 { 8 } else { 4 };
    let dims = vec![side; n];
    let pitch = l + d;
    let period = vec![side as f64 * pitch; n];
    let layers = 16.0;
    let domain = ObstacleBox {
        period: period.clone(),
        y_min: r1,
        y_max: r1 + layers * h,
    };
    let pos = EnvironmentSeed::new(seed, streams::POSITIONS);
    let phase = pos.uniform(&[-1]) * std::f64::consts::TAU;
    let cols = side.pow(n as u32);
    let mut obstacles = Vec::new();
    for c in 0..cols {
        let a = [c % side, c / side];
        let wave: f64 = (0..n)
            .map(|k| {
                (std::f64::consts::TAU * a[k] as f64 / side as f64 + phase * (k + 1) as f64).sin()
            })
            .sum();
        let layer = 2.0 + (0.6 * wave + nf).round();
        let mut x = [0.0; 2];
        for k in 0..n {
            let jitter = (pos.uniform(&[c as i64, k as i64]) - 0.5) * 2.0 * (l / 2.0 - r1) * 0.9;
            x[k] = (a[k] as f64 * pitch + jitter).rem_euclid(period[k]);
        }
        let y = r1 + (layer - 1.0 + 0.05 + 0.9 * pos.uniform(&[c as i64, 9])) * h;
        obstacles.push(Obstacle { x, y, strength });
    }
    let weak = StrengthDistribution::pareto(1.0, 1.25)?;
    let mut weak_set =
        crate::field::sample_obstacles(&domain, 60.0 / domain.volume(), &weak, seed)?;
    // keep weak ones below the anchor floor so the surface is the designed one
    weak_set.obstacles.retain(|o| o.strength < strength);
    obstacles.extend(weak_set.obstacles);
    Ok(SmallExample {
        spec,
        dims,
        force: 1.0,
        set: ObstacleSet {
            domain,
            intensity: weak_set.intensity,
            distribution: weak,
            strength_floor: 0.0,
            seed,
            obstacles,
        },
    })
}
