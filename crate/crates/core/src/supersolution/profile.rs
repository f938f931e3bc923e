//! Radial local supersolution: `φ` on `[0, r_in]` with Laplacian
//! `F_in (r/r_in)^m`, `ψ` on `[r_in, r_out]` with Laplacian `−F_out`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProfile {
    pub n: usize,
    /// Integer-valued; stored as a float because the pipeline needs values near 1e30.
    pub m: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub f_in: f64,
    pub f_out: f64,
}

/// Both sides of the kink inequality and the two margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkCheck {
    pub satisfied: bool,
    /// `F_in/(m+n) − (F_out/n)(r_outⁿ/r_inⁿ − 1)`
    pub force_margin: f64,
    /// `φ′(r_in) − ψ′(r_in)`
    pub slope_margin: f64,
    pub inner_slope: f64,
    pub outer_slope: f64,
}

impl LocalProfile {
    pub fn new(n: usize, m: f64, r_in: f64, r_out: f64, f_in: f64, f_out: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(m >= 0.0 && m.fract() == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "m must be a non-negative integer, got {m}"
            )));
        }
        if !(r_in > 0.0 && r_out >= r_in && r_out.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < r_in <= r_out, got {r_in}, {r_out}"
            )));
        }
        if !(f_in > 0.0 && f_out >= 0.0 && f_in.is_finite() && f_out.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need F_in > 0 and F_out >= 0, got {f_in}, {f_out}"
            )));
        }
        Ok(Self {
            n,
            m,
            r_in,
            r_out,
            f_in,
            f_out,
        })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `F_in r_in² / ((m+n)(m+2))`
    fn inner_scale(&self) -> f64 {
        self.f_in * self.r_in * self.r_in / ((self.m + self.nf()) * (self.m + 2.0))
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.inner_scale() * ((r / self.r_in).powf(self.m + 2.0) - 1.0)
    }

    pub fn phi_d1(&self, r: f64) -> f64 {
        self.f_in * self.r_in / (self.m + self.nf()) * (r / self.r_in).powf(self.m + 1.0)
    }

    pub fn phi_d2(&self, r: f64) -> f64 {
        self.f_in * (self.m + 1.0) / (self.m + self.nf()) * (r / self.r_in).powf(self.m)
    }

    /// Laplacian prescribed inside: `F_in (r/r_in)^m`.
    pub fn phi_laplacian(&self, r: f64) -> f64 {
        self.f_in * (r / self.r_in).powf(self.m)
    }

    /// `φ(0) = −F_in r_in² / ((m+n)(m+2))`.
    pub fn phi_at_zero(&self) -> f64 {
        -self.inner_scale()
    }

    pub fn psi_d1(&self, r: f64) -> f64 {
        let n = self.n as i32;
        match self.n {
            1 => self.f_out * (self.r_out - r),
            _ => self.f_out / self.nf() * (self.r_out.powi(n) - r.powi(n)) / r.powi(n - 1),
        }
    }

    pub fn psi_d2(&self, r: f64) -> f64 {
        -self.f_out - (self.nf() - 1.0) / r * self.psi_d1(r)
    }

    /// `ψ(r)` with `ψ(r_in) = 0`, in closed form.
    pub fn psi(&self, r: f64) -> f64 {
        let (ri, ro, fo) = (self.r_in, self.r_out, self.f_out);
        let sq = (r - ri) * (r + ri) / 2.0;
        match self.n {
            1 => fo * (ro * (r - ri) - sq),
            2 => fo / 2.0 * (ro * ro * ((r - ri) / ri).ln_1p() - sq),
            n => {
                let e = 2.0 - n as f64;
                fo / n as f64 * (ro.powi(n as i32) * (r.powf(e) - ri.powf(e)) / e - sq)
            }
        }
    }

    /// `v_local(r)`: `φ` inside, `ψ` outside, `None` beyond `r_out`.
    pub fn value(&self, r: f64) -> Option<f64> {
        if r <= self.r_in {
            Some(self.phi(r))
        } else if r <= self.r_out {
            Some(self.psi(r))
        } else {
            None
        }
    }

    /// Radial derivative of `v_local` (the inner one at `r_in`).
    pub fn radial_slope(&self, r: f64) -> f64 {
        if r <= self.r_in {
            self.phi_d1(r)
        } else {
            self.psi_d1(r)
        }
    }

    /// `v_local` extended past `r_out` by the same `ψ` formula, for stencils.
    fn value_ext(&self, r: f64) -> f64 {
        if r <= self.r_in {
            self.phi(r)
        } else {
            self.psi(r)
        }
    }

    /// `v(δ + s e_k) + v(δ − s e_k) − 2 v(δ)` for `v = v_local(|·|)`.
    ///
    /// On the outer branch it is evaluated without forming the large values of
    /// `ψ`, so it stays accurate when `r_out` is many orders above the step.
    pub fn second_difference(&self, delta: &[f64], k: usize, s: f64) -> f64 {
        let r2: f64 = delta.iter().map(|x| x * x).sum();
        let r = r2.sqrt();
        let dk = delta[k];
        let rp2 = r2 + 2.0 * s * dk + s * s;
        let rm2 = r2 - 2.0 * s * dk + s * s;
        let (rp, rm) = (rp2.max(0.0).sqrt(), rm2.max(0.0).sqrt());
        let outer = |x: f64| x > self.r_in;
        if outer(r) && outer(rp) && outer(rm) && self.n <= 2 {
            let fo = self.f_out;
            // rp² + rm² − 2r² = 2s²
            match self.n {
                1 => {
                    // rp + rm − 2r vanishes when |δ| ≥ s
                    let lin = if r >= s { 0.0 } else { 2.0 * (s - r) };
                    fo * (self.r_out * lin - s * s)
                }
                _ => {
                    let ratio = (2.0 * r2 * s * s + s.powi(4) - 4.0 * s * s * dk * dk) / (r2 * r2);
                    fo / 2.0 * (self.r_out * self.r_out * 0.5 * ratio.ln_1p() - s * s)
                }
            }
        } else {
            self.value_ext(rp) + self.value_ext(rm) - 2.0 * self.value_ext(r)
        }
    }

    /// The kink inequality `φ′(r_in) ≥ ψ′(r_in)` in force and slope form.
    pub fn kink_condition(&self) -> KinkCheck {
        let ratio = (self.r_out / self.r_in).powi(self.n as i32);
        let force_margin =
            self.f_in / (self.m + self.nf()) - self.f_out / self.nf() * (ratio - 1.0);
        let inner_slope = self.phi_d1(self.r_in);
        let outer_slope = self.psi_d1(self.r_in);
        let slope_margin = inner_slope - outer_slope;
        let scale = inner_slope.abs().max(outer_slope.abs()).max(1e-300);
        KinkCheck {
            satisfied: force_margin >= -1e-12 * scale / self.r_in,
            force_margin,
            slope_margin,
            inner_slope,
            outer_slope,
        }
    }
}

/// `φ` alone, as a named operation.
pub fn inner_profile(n: usize, m: f64, r_in: f64, f_in: f64) -> Result<LocalProfile> {
    LocalProfile::new(n, m, r_in, r_in, f_in, 0.0)
}

/// `ψ′` alone, as a named operation; `ψ(r_in) = 0` is anchored at `r_in`.
pub fn outer_slope(n: usize, r_in: f64, r_out: f64, f_out: f64) -> Result<LocalProfile> {
    LocalProfile::new(n, 0.0, r_in, r_out, 1.0, f_out)
}

/// Kink inequality check, as a named operation.
pub fn kink_condition(profile: &LocalProfile) -> KinkCheck {
    profile.kink_condition()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_inner_example() {
        let p = inner_profile(1, 2.0, 1.0, 12.0).unwrap();
        for r in [0.0, 0.3, 0.7, 1.0] {
            assert!((p.phi(r) - (r.powi(4) - 1.0)).abs() < 1e-14);
        }
        assert_eq!(p.phi_at_zero(), -1.0);
        assert_eq!(p.phi_d1(1.0), 4.0);
    }

    #[test]
    fn worked_outer_example() {
        let p = outer_slope(1, 1.0, 3.0, 2.0).unwrap();
        assert_eq!(p.psi_d1(3.0), 0.0);
        assert_eq!(p.psi_d1(1.0), 4.0);
        assert_eq!(p.psi(1.0), 0.0);
    }

    #[test]
    fn worked_kink_is_tight() {
        let p = LocalProfile::new(1, 2.0, 1.0, 3.0, 12.0, 2.0).unwrap();
        let k = p.kink_condition();
        assert!(k.satisfied);
        assert!(k.force_margin.abs() < 1e-12 && k.slope_margin.abs() < 1e-12);
        let free = LocalProfile::new(2, 3.0, 1.0, 50.0, 1.0, 0.0).unwrap();
        assert!(free.kink_condition().satisfied);
    }

    #[test]
    fn psi_integrates_its_slope() {
        for n in 1..=3 {
            let p = LocalProfile::new(n, 4.0, 0.7, 5.0, 30.0, 1.3).unwrap();
            // Simpson quadrature of ψ′ from r_in
            let r = 4.1;
            let steps = 2000;
            let h = (r - p.r_in) / steps as f64;
            let mut acc = p.psi_d1(p.r_in) + p.psi_d1(r);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * p.psi_d1(p.r_in + i as f64 * h);
            }
            assert!((acc * h / 3.0 - p.psi(r)).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn stable_second_difference_matches_direct() {
        for n in 1..=2usize {
            let p = LocalProfile::new(n, 2.0, 0.5, 40.0, 24.0, 2.0).unwrap();
            for delta in [[3.0, 0.0], [1.2, -0.7], [-2.5, 1.1], [0.9, 0.05]] {
                let d = &delta[..n];
                for k in 0..n {
                    let s = 0.01;
                    let direct = {
                        let mut a = d.to_vec();
                        a[k] += s;
                        let mut b = d.to_vec();
                        b[k] -= s;
                        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        p.psi(norm(&a)) + p.psi(norm(&b)) - 2.0 * p.psi(norm(d))
                    };
                    let stable = p.second_difference(d, k, s);
                    assert!((stable - direct).abs() < 1e-9, "{stable} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn stable_second_difference_at_huge_scale() {
        let p = LocalProfile::new(1, 4e22, 0.5, 1e21, 1e45, 2.0).unwrap();
        let s = 1.0 / 64.0;
        let d2 = p.second_difference(&[0.9], 0, s);
        assert!((d2 / (s * s) + 2.0).abs() < 1e-9);
    }
}
