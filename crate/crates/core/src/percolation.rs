//! Site percolation on a periodic box of Zⁿ × N and the minimal Lipschitz
//! surface through open sites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::EnvironmentSeed;

/// Density above which a Lipschitz surface exists almost surely on the infinite lattice.
pub fn percolation_threshold(n: usize) -> f64 {
    let k = (2 * n + 2) as f64;
    1.0 - 1.0 / (k * k)
}

/// Open/closed state of the site `(a, j)`, `a` in the base box and `j ≥ 1`.
pub trait Openness {
    fn is_open(&self, a: &[i64], j: i64) -> bool;
}

impl<F: Fn(&[i64], i64) -> bool> Openness for F {
    fn is_open(&self, a: &[i64], j: i64) -> bool {
        self(a, j)
    }
}

/// Independent Bernoulli(p) sites addressed through a counter-based seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliOpenness {
    pub p: f64,
    pub seed: EnvironmentSeed,
}

impl Openness for BernoulliOpenness {
    #[inline]
    fn is_open(&self, a: &[i64], j: i64) -> bool {
        let mut coords = [0i64; 4];
        coords[..a.len()].copy_from_slice(a);
        coords[a.len()] = j;
        self.seed.uniform(&coords[..=a.len()]) < self.p
    }
}

/// Sites over a periodic base box with a height budget.
#[derive(Debug, Clone)]
pub struct SiteField<O> {
    dims: Vec<usize>,
    height_budget: i64,
    openness: O,
}

impl<O: Openness> SiteField<O> {
    pub fn new(dims: Vec<usize>, height_budget: i64, openness: O) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidGeometry(format!(
                "base box {dims:?} must have 1 to 3 positive sides"
            )));
        }
        if height_budget < 1 {
            return Err(Error::InvalidParameter(
                "height budget must be at least 1".into(),
            ));
        }
        Ok(Self {
            dims,
            height_budget,
            openness,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn height_budget(&self) -> i64 {
        self.height_budget
    }

    pub fn columns(&self) -> usize {
        self.dims.iter().product()
    }

    /// Base coordinate of a flattened column index (first axis fastest).
    pub fn coord(&self, mut idx: usize) -> Vec<i64> {
        self.dims
            .iter()
            .map(|&d| {
                let c = idx % d;
                idx /= d;
                c as i64
            })
            .collect()
    }

    pub fn index(&self, a: &[i64]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (k, &d) in self.dims.iter().enumerate() {
            idx += a[k].rem_euclid(d as i64) as usize * stride;
            stride *= d;
        }
        idx
    }

    /// Periodic ℓ¹ neighbors of a column (with repetition on sides of length ≤ 2).
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let a = self.coord(idx);
        let mut out = Vec::with_capacity(2 * a.len());
        for k in 0..a.len() {
            for s in [-1i64, 1] {
                let mut b = a.clone();
                b[k] += s;
                out.push(self.index(&b));
            }
        }
        out
    }

    pub fn is_open(&self, idx: usize, j: i64) -> bool {
        j >= 1 && self.openness.is_open(&self.coord(idx), j)
    }

    fn first_open_from(&self, a: &[i64], from: i64) -> Option<i64> {
        (from.max(1)..=self.height_budget).find(|&j| self.openness.is_open(a, j))
    }
}

/// `L` over the base box; `(a, L(a))` open and neighbor increments at most 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipschitzSurface {
    pub dims: Vec<usize>,
    pub heights: Vec<i64>,
}

/// Pointwise-minimal Lipschitz surface, or `None` when some column would
/// exceed the height budget.
pub fn find_minimal_surface<O: Openness>(field: &SiteField<O>) -> Option<LipschitzSurface> {
    let cols = field.columns();
    let coords: Vec<Vec<i64>> = (0..cols).map(|i| field.coord(i)).collect();
    let nbrs: Vec<Vec<usize>> = (0..cols).map(|i| field.neighbors(i)).collect();
    let mut l = Vec::with_capacity(cols);
    for a in &coords {
        l.push(field.first_open_from(a, 1)?);
    }
    let mut dirty = vec![true; cols];
    let mut any = true;
    while any {
        any = false;
        for idx in 0..cols {
            if !dirty[idx] {
                continue;
            }
            dirty[idx] = false;
            let need = nbrs[idx]
                .iter()
                .map(|&b| l[b] - 1)
                .max()
                .unwrap_or(1)
                .max(l[idx]);
            if need > l[idx] {
                l[idx] = field.first_open_from(&coords[idx], need)?;
                for &b in &nbrs[idx] {
                    dirty[b] = true;
                }
                any = true;
            }
        }
    }
    Some(LipschitzSurface {
        dims: field.dims.clone(),
        heights: l,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceViolation {
    Closed { column: usize, height: i64 },
    NonPositive { column: usize, height: i64 },
    Lipschitz { a: usize, b: usize, gap: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCheck {
    pub ok: bool,
    pub violations: Vec<SurfaceViolation>,
}

/// Exact re-check of openness and the Lipschitz property (each neighbor pair once).
pub fn surface_check<O: Openness>(
    surface: &LipschitzSurface,
    field: &SiteField<O>,
) -> SurfaceCheck {
    let mut violations = Vec::new();
    if surface.dims != field.dims || surface.heights.len() != field.columns() {
        return SurfaceCheck {
            ok: false,
            violations: vec![SurfaceViolation::Lipschitz {
                a: 0,
                b: 0,
                gap: i64::MAX,
            }],
        };
    }
    for (idx, &h) in surface.heights.iter().enumerate() {
        if h < 1 {
            violations.push(SurfaceViolation::NonPositive {
                column: idx,
                height: h,
            });
        } else if !field.is_open(idx, h) {
            violations.push(SurfaceViolation::Closed {
                column: idx,
                height: h,
            });
        }
        for b in field.neighbors(idx) {
            if b > idx {
                let gap = (surface.heights[b] - h).abs();
                if gap > 1 {
                    violations.push(SurfaceViolation::Lipschitz { a: idx, b, gap });
                }
            }
        }
    }
    violations.dedup();
    SurfaceCheck {
        ok: violations.is_empty(),
        violations,
    }
}

/// `1 − exp(−λ (l − 2r₁)ⁿ h tail)`: a box holds a qualifying obstacle.
pub fn open_box_probability(
    lambda: f64,
    l: f64,
    h: f64,
    r1: f64,
    n: usize,
    tail: f64,
) -> Result<f64> {
    if !(l > 2.0 * r1) {
        return Err(Error::InvalidGeometry(format!(
            "box side l = {l} must exceed 2 r1 = {}",
            2.0 * r1
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "box height h = {h} must be positive"
        )));
    }
    let rate = lambda * (l - 2.0 * r1).powi(n as i32) * h * tail;
    Ok(-(-rate).exp_m1())
}

/// Smallest box side making [`open_box_probability`] exceed [`percolation_threshold`].
pub fn min_box_side(lambda: f64, h: f64, n: usize, tail: f64, r1: f64) -> Result<f64> {
    if !(tail > 0.0) {
        return Err(Error::NoFiniteSide);
    }
    if !(h > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "box height h = {h} must be positive"
        )));
    }
    let k = (2 * n + 2) as f64;
    Ok(2.0 * r1 + (2.0 * k.ln() / (lambda * h * tail)).powf(1.0 / n as f64))
}
