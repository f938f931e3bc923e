//! Smooth interpolation of box heights: equal to `y_a` over each box `Q_a`
//! and blended across the gaps by a tensor-product smoothstep partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{smoothstep, smoothstep_d1, smoothstep_d2};

/// Sup of `|Δ lift|` in units of `h/d²` over height configurations whose
/// axis-neighbor gaps are below `2h`. Exact for `n = 1` (`2 max|S''|`);
/// for `n = 2` a rounded-up numerical calibration, re-measured in tests.
pub fn lifting_constant(n: usize) -> Result<f64> {
    match n {
        1 => Ok(20.0 / 3f64.sqrt()),
        2 => Ok(23.1),
        _ => Err(Error::InvalidParameter(format!(
            "no lifting constant for n = {n}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lifting {
    pub n: usize,
    pub l: f64,
    pub d: f64,
    pub h: f64,
    pub dims: Vec<usize>,
    /// Box heights, first axis fastest.
    pub heights: Vec<f64>,
}

/// Value and per-axis second derivatives of the lift, relative to a reference height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftSample {
    pub value: f64,
    pub laplacian: f64,
    pub gradient: [f64; 2],
}

/// Build the lift after checking that neighboring heights differ by less than `2h`.
pub fn build_lifting(
    dims: Vec<usize>,
    l: f64,
    d: f64,
    h: f64,
    heights: Vec<f64>,
) -> Result<Lifting> {
    let n = dims.len();
    if !(1..=2).contains(&n) || dims.iter().any(|&k| k == 0) {
        return Err(Error::InvalidGeometry(format!(
            "lifting needs 1 or 2 positive box counts, got {dims:?}"
        )));
    }
    if heights.len() != dims.iter().product::<usize>() {
        return Err(Error::InvalidGeometry("one height per box required".into()));
    }
    if !(l > 0.0 && d > 0.0 && h > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "need l, d, h > 0, got {l}, {d}, {h}"
        )));
    }
    let lift = Lifting {
        n,
        l,
        d,
        h,
        dims,
        heights,
    };
    for idx in 0..lift.heights.len() {
        let a = lift.coord(idx);
        for k in 0..n {
            let mut b = a;
            b[k] += 1;
            let j = lift.index(&b[..n]);
            let gap = (lift.heights[j] - lift.heights[idx]).abs();
            if !(gap < 2.0 * h) {
                return Err(Error::LiftingGap {
                    a: idx,
                    b: j,
                    gap,
                    limit: 2.0 * h,
                });
            }
        }
    }
    Ok(lift)
}

impl Lifting {
    pub fn pitch(&self) -> f64 {
        self.l + self.d
    }

    pub fn coord(&self, mut idx: usize) -> [i64; 2] {
        let mut a = [0i64; 2];
        for (k, &dk) in self.dims.iter().enumerate() {
            a[k] = (idx % dk) as i64;
            idx /= dk;
        }
        a
    }

    pub fn index(&self, a: &[i64]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (k, &dk) in self.dims.iter().enumerate() {
            idx += a[k].rem_euclid(dk as i64) as usize * stride;
            stride *= dk;
        }
        idx
    }

    /// Center of box `a` along each axis.
    pub fn center(&self, a: &[i64]) -> [f64; 2] {
        let mut c = [0.0; 2];
        for k in 0..self.n {
            c[k] = a[k] as f64 * self.pitch();
        }
        c
    }

    /// Box whose center is nearest to the absolute point `x`.
    pub fn cell_of(&self, x: &[f64]) -> [i64; 2] {
        let mut a = [0i64; 2];
        for k in 0..self.n {
            a[k] = (x[k] / self.pitch()).round() as i64;
        }
        a
    }

    /// One axis: up to two `(box offset, weight, w′, w″)` terms.
    fn axis_terms(&self, e: f64) -> ([(i64, f64, f64, f64); 2], usize) {
        let p = self.pitch();
        let u = e + self.l / 2.0;
        let k = (u / p).floor();
        let q = u - k * p;
        let k = k as i64;
        if q <= self.l {
            ([(k, 1.0, 0.0, 0.0), (0, 0.0, 0.0, 0.0)], 1)
        } else {
            let s = ((q - self.l) / self.d).min(1.0);
            let (w, w1, w2) = (
                smoothstep(s),
                smoothstep_d1(s) / self.d,
                smoothstep_d2(s) / (self.d * self.d),
            );
            ([(k, 1.0 - w, -w1, -w2), (k + 1, w, w1, w2)], 2)
        }
    }

    /// Lift minus `reference` at offset `e` from the center of box `a`, with derivatives.
    pub fn sample_rel(&self, a: &[i64], e: &[f64], reference: f64) -> LiftSample {
        let (t0, c0) = self.axis_terms(e[0]);
        let mut out = LiftSample {
            value: 0.0,
            laplacian: 0.0,
            gradient: [0.0; 2],
        };
        if self.n == 1 {
            for &(o, w, w1, w2) in &t0[..c0] {
                let y = self.heights[self.index(&[a[0] + o])] - reference;
                out.value += y * w;
                out.gradient[0] += y * w1;
                out.laplacian += y * w2;
            }
        } else {
            let (t1, c1) = self.axis_terms(e[1]);
            for &(o0, w0, d0, dd0) in &t0[..c0] {
                for &(o1, w1, d1, dd1) in &t1[..c1] {
                    let y = self.heights[self.index(&[a[0] + o0, a[1] + o1])] - reference;
                    out.value += y * w0 * w1;
                    out.gradient[0] += y * d0 * w1;
                    out.gradient[1] += y * w0 * d1;
                    out.laplacian += y * (dd0 * w1 + w0 * dd1);
                }
            }
        }
        out
    }

    /// Lift minus `reference` at offset `e` from the center of box `a`.
    pub fn eval_rel(&self, a: &[i64], e: &[f64], reference: f64) -> f64 {
        self.sample_rel(a, e, reference).value
    }

    /// Lift at an absolute point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let a = self.cell_of(x);
        let c = self.center(&a);
        let e: Vec<f64> = (0..self.n).map(|k| x[k] - c[k]).collect();
        self.eval_rel(&a, &e, 0.0)
    }

    pub fn min_height(&self) -> f64 {
        self.heights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sup of `|Δ lift|` over a grid with `per_pitch` points per box pitch, in units of `h/d²`.
    pub fn measured_laplacian_sup(&self, per_pitch: usize) -> f64 {
        let step = self.pitch() / per_pitch as f64;
        let counts: Vec<usize> = self.dims.iter().map(|&k| k * per_pitch).collect();
        let total: usize = counts.iter().product();
        let mut sup: f64 = 0.0;
        for i in 0..total {
            let mut x = [0.0; 2];
            let mut r = i;
            for k in 0..self.n {
                x[k] = (r % counts[k]) as f64 * step;
                r /= counts[k];
            }
            let a = self.cell_of(&x[..self.n]);
            let c = self.center(&a);
            let e = [x[0] - c[0], x[1] - c[1]];
            let s = self.sample_rel(&a, &e[..self.n], self.heights[self.index(&a[..self.n])]);
            sup = sup.max(s.laplacian.abs());
        }
        sup * self.d * self.d / self.h
    }
}
