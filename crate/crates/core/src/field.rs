//! Random obstacle force field in the continuum: a plateau bump shape,
//! Poisson-placed centers with i.i.d. strengths, and hashed point evaluation
//! of `f(x, y) = Σ f_i φ(x − x_i, y − y_i)`.

use std::collections::HashMap;

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quenched::{tail_probability, StrengthDistribution};
use crate::rng::{streams, EnvironmentSeed};

/// Quintic smoothstep `6t⁵ − 15t⁴ + 10t³` clamped to `[0, 1]`.
#[inline]
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

#[inline]
pub fn smoothstep_d1(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (t - 1.0) * (t - 1.0)
    }
}

#[inline]
pub fn smoothstep_d2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        60.0 * t * (2.0 * t - 1.0) * (t - 1.0)
    }
}

/// Obstacle shape: a product of one-dimensional plateau factors, each equal to
/// 1 on `[−r0, r0]` and 0 outside `[−r1/√(n+1), r1/√(n+1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpShape {
    pub r0: f64,
    pub r1: f64,
    pub n: usize,
    /// Half-width of the plateau of each factor.
    pub rho: f64,
    /// Half-width of the support of each factor.
    pub rho_out: f64,
}

/// Build the product bump; needs `r1 > √(n+1)·r0`.
pub fn make_bump(r0: f64, r1: f64, n: usize) -> Result<BumpShape> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidShape(format!(
            "dimension n = {n} not supported"
        )));
    }
    if !(r0 > 0.0 && r0.is_finite() && r1.is_finite()) {
        return Err(Error::InvalidShape(format!(
            "radii must be positive and finite, got r0 = {r0}, r1 = {r1}"
        )));
    }
    let rho_out = r1 / ((n + 1) as f64).sqrt();
    if !(rho_out > r0) {
        return Err(Error::InvalidShape(format!(
            "r1 = {r1} must exceed sqrt(n+1) * r0 = {}",
            ((n + 1) as f64).sqrt() * r0
        )));
    }
    Ok(BumpShape {
        r0,
        r1,
        n,
        rho: r0,
        rho_out,
    })
}

impl BumpShape {
    #[inline]
    pub fn factor(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= self.rho {
            1.0
        } else if a >= self.rho_out {
            0.0
        } else {
            smoothstep((self.rho_out - a) / (self.rho_out - self.rho))
        }
    }

    /// First and second derivative of one factor.
    pub fn factor_derivatives(&self, t: f64) -> (f64, f64) {
        let a = t.abs();
        let w = self.rho_out - self.rho;
        let s = (self.rho_out - a) / w;
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        (-sign * smoothstep_d1(s) / w, smoothstep_d2(s) / (w * w))
    }

    /// `φ(dx, dy)` with `dx` of length `n`.
    #[inline]
    pub fn eval(&self, dx: &[f64], dy: f64) -> f64 {
        let mut v = self.factor(dy);
        for &t in dx {
            if v == 0.0 {
                return 0.0;
            }
            v *= self.factor(t);
        }
        v
    }
}

/// A single obstacle; only the first `n` entries of `x` are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub x: [f64; 2],
    pub y: f64,
    pub strength: f64,
}

/// Periodic base `[0, period_1) × … ` times the height slab `[y_min, y_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleBox {
    pub period: Vec<f64>,
    pub y_min: f64,
    pub y_max: f64,
}

impl ObstacleBox {
    pub fn n(&self) -> usize {
        self.period.len()
    }

    pub fn volume(&self) -> f64 {
        self.period.iter().product::<f64>() * (self.y_max - self.y_min).max(0.0)
    }

    fn validate(&self, r1: Option<f64>) -> Result<()> {
        if self.period.is_empty() || self.period.len() > 2 {
            return Err(Error::InvalidGeometry(
                "base dimension must be 1 or 2".into(),
            ));
        }
        if self.period.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidGeometry(format!(
                "periods {:?} must be positive",
                self.period
            )));
        }
        if !(self.y_max >= self.y_min && self.y_max.is_finite()) {
            return Err(Error::InvalidGeometry("need y_min <= y_max < inf".into()));
        }
        if let Some(r1) = r1 {
            if self.y_min < r1 {
                return Err(Error::InvalidGeometry(format!(
                    "centers must satisfy y >= r1 = {r1}"
                )));
            }
        }
        Ok(())
    }
}

/// Poisson obstacle configuration together with what generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSet {
    pub domain: ObstacleBox,
    pub intensity: f64,
    pub distribution: StrengthDistribution,
    /// Only obstacles with strength at least this value were sampled (0: all).
    pub strength_floor: f64,
    pub seed: u64,
    pub obstacles: Vec<Obstacle>,
}

impl ObstacleSet {
    pub fn n(&self) -> usize {
        self.domain.n()
    }
}

/// Largest expected count accepted by the samplers.
pub const MAX_EXPECTED_OBSTACLES: f64 = 5.0e7;

/// Poisson(λ) centers in `domain` with i.i.d. strengths from `dist`.
pub fn sample_obstacles(
    domain: &ObstacleBox,
    lambda: f64,
    dist: &StrengthDistribution,
    seed: u64,
) -> Result<ObstacleSet> {
    sample_obstacles_above(domain, lambda, dist, 0.0, seed)
}

/// The thinned process of obstacles with strength `≥ floor`: intensity
/// `λ P(f₁ ≥ floor)`, strengths drawn from the conditional law.
pub fn sample_obstacles_above(
    domain: &ObstacleBox,
    lambda: f64,
    dist: &StrengthDistribution,
    floor: f64,
    seed: u64,
) -> Result<ObstacleSet> {
    domain.validate(None)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "intensity must be non-negative, got {lambda}"
        )));
    }
    let mean = lambda * domain.volume() * tail_probability(dist, floor);
    if !mean.is_finite() || mean > MAX_EXPECTED_OBSTACLES {
        return Err(Error::InvalidParameter(format!(
            "expected obstacle count {mean:e} exceeds {MAX_EXPECTED_OBSTACLES:e}; thin the field or shrink the box"
        )));
    }
    let count = if mean > 0.0 {
        let mut rng = EnvironmentSeed::new(seed, streams::COUNTS).rng(&[]);
        Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let pos = EnvironmentSeed::new(seed, streams::POSITIONS);
    let str_seed = EnvironmentSeed::new(seed, streams::STRENGTHS);
    let n = domain.n();
    let obstacles = (0..count)
        .map(|k| {
            let k = k as i64;
            let mut x = [0.0; 2];
            for (axis, xi) in x.iter_mut().enumerate().take(n) {
                *xi = pos.uniform(&[k, axis as i64]) * domain.period[axis];
            }
            let y = domain.y_min + pos.uniform(&[k, 2]) * (domain.y_max - domain.y_min);
            let strength = dist.sample_above(floor, str_seed.uniform_open_closed(&[k]));
            Obstacle { x, y, strength }
        })
        .collect();
    Ok(ObstacleSet {
        domain: domain.clone(),
        intensity: lambda,
        distribution: dist.clone(),
        strength_floor: floor,
        seed,
        obstacles,
    })
}

/// Periodic minimum-image difference `a − b`.
#[inline]
pub fn periodic_diff(a: f64, b: f64, period: f64) -> f64 {
    let d = a - b;
    d - period * (d / period).round()
}

/// Obstacles plus shape, with a spatial hash for support-local evaluation.
#[derive(Debug, Clone)]
pub struct ForceField {
    set: ObstacleSet,
    bump: BumpShape,
    cell: f64,
    cells_per_period: [i64; 2],
    grid: HashMap<[i64; 4], Vec<u32>>,
}

impl ForceField {
    pub fn new(set: ObstacleSet, bump: BumpShape) -> Result<Self> {
        if set.n() != bump.n {
            return Err(Error::InvalidGeometry(format!(
                "obstacle dimension {} != bump dimension {}",
                set.n(),
                bump.n
            )));
        }
        set.domain.validate(Some(bump.r1))?;
        let extent = set
            .domain
            .period
            .iter()
            .copied()
            .chain([set.domain.y_max.abs(), set.domain.y_min.abs()])
            .fold(0.0, f64::max);
        let cell = bump.r1.max(extent / (1u64 << 20) as f64);
        let mut cells_per_period = [1i64; 2];
        for (k, &p) in set.domain.period.iter().enumerate() {
            cells_per_period[k] = ((p / cell).floor() as i64).max(1);
        }
        let mut ff = Self {
            set,
            bump,
            cell,
            cells_per_period,
            grid: HashMap::new(),
        };
        let mut grid: HashMap<[i64; 4], Vec<u32>> = HashMap::new();
        for (i, o) in ff.set.obstacles.iter().enumerate() {
            grid.entry(ff.key(&o.x[..ff.bump.n], o.y))
                .or_default()
                .push(i as u32);
        }
        ff.grid = grid;
        Ok(ff)
    }

    /// Cell width along base axis `k` (cells tile the period exactly).
    fn width(&self, k: usize) -> f64 {
        self.set.domain.period[k] / self.cells_per_period[k] as f64
    }

    fn key(&self, x: &[f64], y: f64) -> [i64; 4] {
        let mut key = [0i64; 4];
        for (k, &xi) in x.iter().enumerate() {
            let p = self.set.domain.period[k];
            let c = (xi.rem_euclid(p) / self.width(k)).floor() as i64;
            key[k] = c.clamp(0, self.cells_per_period[k] - 1);
        }
        key[2] = (y / self.cell).floor() as i64;
        key
    }

    pub fn obstacles(&self) -> &ObstacleSet {
        &self.set
    }

    pub fn bump(&self) -> &BumpShape {
        &self.bump
    }

    fn contribution(&self, o: &Obstacle, x: &[f64], y: f64) -> f64 {
        let dy = y - o.y;
        if dy.abs() >= self.bump.r1 {
            return 0.0;
        }
        let mut dx = [0.0; 2];
        for k in 0..x.len() {
            dx[k] = periodic_diff(x[k], o.x[k], self.set.domain.period[k]);
        }
        o.strength * self.bump.eval(&dx[..x.len()], dy)
    }

    /// `f(x, y)`, visiting only hash cells within one cell of the query.
    pub fn eval_force(&self, x: &[f64], y: f64) -> f64 {
        let n = self.bump.n;
        debug_assert_eq!(x.len(), n);
        let base = self.key(x, y);
        let mut total = 0.0;
        let offsets: &[i64] = &[-1, 0, 1];
        let mut visit = |key: [i64; 4]| {
            if let Some(ids) = self.grid.get(&key) {
                for &i in ids {
                    total += self.contribution(&self.set.obstacles[i as usize], x, y);
                }
            }
        };
        let wrap = |c: i64, k: usize| c.rem_euclid(self.cells_per_period[k]);
        for &oy in offsets {
            if n == 1 {
                let mut seen = [i64::MIN; 3];
                for (s, &o0) in offsets.iter().enumerate() {
                    let c0 = wrap(base[0] + o0, 0);
                    if seen[..s].contains(&c0) {
                        continue;
                    }
                    seen[s] = c0;
                    visit([c0, 0, base[2] + oy, 0]);
                }
            } else {
                let mut seen: Vec<(i64, i64)> = Vec::with_capacity(9);
                for &o0 in offsets {
                    for &o1 in offsets {
                        let c = (wrap(base[0] + o0, 0), wrap(base[1] + o1, 1));
                        if seen.contains(&c) {
                            continue;
                        }
                        seen.push(c);
                        visit([c.0, c.1, base[2] + oy, 0]);
                    }
                }
            }
        }
        total
    }

    /// Same sum over every obstacle; the reference for [`ForceField::eval_force`].
    pub fn eval_force_brute(&self, x: &[f64], y: f64) -> f64 {
        self.set
            .obstacles
            .iter()
            .map(|o| self.contribution(o, x, y))
            .sum()
    }

    /// Obstacles whose support may meet the vertical line over `x` below `y_top`.
    pub fn obstacles_near_column(&self, x: &[f64], y_top: f64) -> Vec<usize> {
        let r1 = self.bump.r1;
        self.set
            .obstacles
            .iter()
            .enumerate()
            .filter(|(_, o)| {
                o.y - r1 < y_top
                    && (0..x.len())
                        .all(|k| periodic_diff(x[k], o.x[k], self.set.domain.period[k]).abs() < r1)
            })
            .map(|(i, _)| i)
            .collect()
    }
}
