//! Parameter chain from a driving force `F` and the field law to the
//! geometry of a periodic supersolution, with every inequality re-checked.

use serde::{Deserialize, Serialize};

use super::lifting::lifting_constant;
use super::profile::{KinkCheck, LocalProfile};
use crate::error::{Error, Result};
use crate::field::make_bump;
use crate::percolation::{min_box_side, open_box_probability, percolation_threshold};
use crate::quenched::{tail_probability, StrengthDistribution};

/// Inputs of [`plan_parameters`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineInput {
    pub force: f64,
    pub n: usize,
    pub lambda: f64,
    pub r0: f64,
    pub r1: f64,
    pub distribution: StrengthDistribution,
    /// Defaults to [`lifting_constant`].
    #[serde(default)]
    pub c1: Option<f64>,
}

/// One parameter, its value and the rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub name: String,
    pub value: f64,
    pub rule: String,
}

/// A re-checked inequality `lhs ≤ rhs` (or a boolean condition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub force: f64,
    pub n: usize,
    pub lambda: f64,
    pub r0: f64,
    pub r1: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: f64,
    pub big_m: f64,
    pub m: f64,
    pub d: f64,
    pub h: f64,
    pub l: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub f_in: f64,
    pub f_out: f64,
    /// `P(f₁ ≥ M)`
    pub tail_at_m: f64,
    pub open_probability: f64,
    pub kink: KinkCheck,
    pub attempts: usize,
    pub derivations: Vec<Derivation>,
    pub rechecks: Vec<Recheck>,
}

impl PipelineParams {
    pub fn all_rechecks_pass(&self) -> bool {
        self.rechecks.iter().all(|r| r.pass)
    }

    pub fn profile(&self) -> LocalProfile {
        LocalProfile {
            n: self.n,
            m: self.m,
            r_in: self.r_in,
            r_out: self.r_out,
            f_in: self.f_in,
            f_out: self.f_out,
        }
    }

    /// Geometry consumed by the assembly step.
    pub fn assembly_spec(&self) -> AssemblySpec {
        AssemblySpec {
            n: self.n,
            r0: self.r0,
            r1: self.r1,
            l: self.l,
            d: self.d,
            h: self.h,
            anchor_floor: self.big_m,
            profile: self.profile(),
        }
    }
}

/// Box geometry plus the local profile placed at each anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblySpec {
    pub n: usize,
    pub r0: f64,
    pub r1: f64,
    pub l: f64,
    pub d: f64,
    pub h: f64,
    /// Obstacles below this strength cannot anchor a box.
    pub anchor_floor: f64,
    pub profile: LocalProfile,
}

const REL: f64 = 1e-12;
const MAX_ATTEMPTS: usize = 64;
/// Geometric grid ratio for the search of `M`.
const GRID_RATIO: f64 = 1.044_273_782_427_413_8; // 2^(1/16)

fn le(name: &str, lhs: f64, rhs: f64) -> Recheck {
    Recheck {
        name: name.into(),
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + REL) || lhs <= rhs + REL,
    }
}

/// `x^(1/2+1/n) P(f₁ ≥ x)`
fn probe(dist: &StrengthDistribution, x: f64, n: usize) -> f64 {
    let t = tail_probability(dist, x);
    if t == 0.0 {
        0.0
    } else {
        (x.ln() * (0.5 + 1.0 / n as f64)).exp() * t
    }
}

/// First grid point `x ≥ start` with `probe(x) ≥ target`.
fn witness(dist: &StrengthDistribution, start: f64, target: f64, n: usize) -> Result<f64> {
    let (mut best_probe, mut best_x) = (0.0, start);
    let mut x = start;
    while x < 1e300 {
        let p = probe(dist, x, n);
        if p >= target {
            return Ok(x);
        }
        if p > best_probe {
            best_probe = p;
            best_x = x;
        }
        if tail_probability(dist, x) == 0.0 {
            break;
        }
        x *= GRID_RATIO;
    }
    Err(Error::HypothesisNotWitnessed {
        target,
        best_probe,
        best_x,
    })
}

/// Smallest integer `m ≥ max(n, 2)` with `(m+n)(m+2) ≥ target`.
fn smallest_m(n: usize, target: f64) -> f64 {
    let nf = n as f64;
    let lo = nf.max(2.0);
    let b = nf + 2.0;
    let c = 2.0 * nf - target;
    let root = (-b + (b * b - 4.0 * c).max(0.0).sqrt()) / 2.0;
    let mut m = root.ceil().max(lo);
    while m > lo && (m - 1.0 + nf) * (m - 1.0 + 2.0) >= target && m - 1.0 != m {
        m -= 1.0;
    }
    while (m + nf) * (m + 2.0) < target && m + 1.0 != m {
        m += 1.0;
    }
    m
}

/// Run the whole chain for one driving force. Re-check failures escalate `M`
/// by doubling; after 64 attempts the last failure is returned.
pub fn plan_parameters(input: &PipelineInput) -> Result<PipelineParams> {
    let PipelineInput {
        force,
        n,
        lambda,
        r0,
        r1,
        ref distribution,
        c1,
    } = *input;
    if !(force > 0.0 && force.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "driving force must be positive, got {force}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "intensity must be positive, got {lambda}"
        )));
    }
    make_bump(r0, r1, n)?;
    let c1 = match c1 {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => {
            return Err(Error::InvalidParameter(format!(
                "lifting constant must be positive, got {c}"
            )))
        }
        None => lifting_constant(n)?,
    };
    let nf = n as f64;
    let a = 0.5 + 1.0 / nf;
    let c0 = (3.0 * (2.0 * nf + 2.0).ln() / lambda).powf(1.0 / nf);
    let c2 = 2.0 * c1 * nf.powf(nf / 2.0) * 2f64.powf(nf - 1.0) / (nf * r0.powf(nf - 1.0))
        * (c0.powf(nf) * (16.0 / r0).powf(a)).max(1.0);
    let k = force.max((force * (2.0 * c2).powf(nf / 2.0 + 1.0) / c1).powf(2.0 / nf)) * (1.0 + 1e-9);
    let mut big_m = witness(distribution, 2.0 * k, k, n)?;
    let threshold = percolation_threshold(n);

    let mut last_reason = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        if attempt > 1 {
            big_m = witness(distribution, 2.0 * big_m, k, n)?;
        }
        let m = smallest_m(n, big_m * r0 / 4.0);
        let d = (2.0 * c2 / k).sqrt() * m.powf(1.0 / nf);
        let h = k.powf(nf / 2.0 - 1.0) * (2.0 * c2).powf(-nf / 2.0) * m.powf(2.0 / nf);
        let l = 2.0 * r1 + c0 * ((a * big_m.ln()).exp() / (h * k)).powf(1.0 / nf);
        let r_in = r0;
        let r_out = nf.sqrt() * (l + d / 2.0 - r1);
        let f_in = (m + nf) * (m + 2.0) / r0;
        let f_out = 2.0 * c1 * h / (d * d);
        let tail = tail_probability(distribution, big_m);
        let profile = match LocalProfile::new(n, m, r_in, r_out, f_in, f_out) {
            Ok(p) => p,
            Err(e) => {
                last_reason = e.to_string();
                continue;
            }
        };
        let kink = profile.kink_condition();
        let open_probability = open_box_probability(lambda, l, h, r1, n, tail).unwrap_or(0.0);
        let l_min = min_box_side(lambda, h, n, tail, r1).unwrap_or(f64::INFINITY);
        let lift_force = c1 * h / (d * d);

        let mut rechecks = vec![
            le("2K <= M", 2.0 * k, big_m),
            le(
                "K <= M^(1/2+1/n) P(f >= M)",
                k,
                probe(distribution, big_m, n),
            ),
            le(
                "M r0/4 <= (m+n)(m+2)",
                big_m * r0 / 4.0,
                (m + nf) * (m + 2.0),
            ),
            le(
                "(m+n)(m+2) <= M r0/2",
                (m + nf) * (m + 2.0),
                big_m * r0 / 2.0,
            ),
            le("2 r1 <= d", 2.0 * r1, d),
            le(
                "C2 m^(1+2/n)/(d^2 K) <= m/2",
                c2 * m.powf(1.0 + 2.0 / nf) / (d * d * k),
                m / 2.0,
            ),
            le("C2 h d^(n-2) <= m/2", c2 * h * d.powf(nf - 2.0), m / 2.0),
            le(
                "2 C1 r_out^n/(n r0^(n-1)) <= C2 (m^(1+2/n)/(hK) + d^n)",
                2.0 * c1 * r_out.powf(nf) / (nf * r0.powf(nf - 1.0)),
                c2 * (m.powf(1.0 + 2.0 / nf) / (h * k) + d.powf(nf)),
            ),
            le("min box side <= l", l_min, l),
            Recheck {
                name: "open box probability > percolation threshold".into(),
                lhs: threshold,
                rhs: open_probability,
                pass: open_probability > threshold,
            },
            Recheck {
                name: "kink: F_out (r_out^n/r_in^n - 1)/n <= F_in/(m+n)".into(),
                lhs: kink.outer_slope,
                rhs: kink.inner_slope,
                pass: kink.satisfied,
            },
            le("r_in <= -phi(0)", r_in, -profile.phi_at_zero()),
            le("-phi(0) <= r_in", -profile.phi_at_zero(), r_in),
            le("F <= F_out - C1 h/d^2", force, f_out - lift_force),
            le("F <= M - F_in", force, big_m - f_in),
        ];
        rechecks.retain(|r| r.lhs.is_finite() || r.name.starts_with("kink"));
        if let Some(bad) = rechecks.iter().find(|r| !r.pass) {
            last_reason = format!("{} failed: {:e} vs {:e}", bad.name, bad.lhs, bad.rhs);
            continue;
        }
        let derivations = vec![
            Derivation { name: "C0".into(), value: c0, rule: "(3 ln(2n+2)/lambda)^(1/n)".into() },
            Derivation { name: "C1".into(), value: c1, rule: "sup |lift laplacian| in units of h/d^2".into() },
            Derivation {
                name: "C2".into(),
                value: c2,
                rule: "2 C1 n^(n/2) 2^(n-1)/(n r0^(n-1)) max(C0^n (16/r0)^(1/2+1/n), 1)".into(),
            },
            Derivation { name: "K".into(), value: k, rule: "max(F, (F (2 C2)^(n/2+1)/C1)^(2/n)) (1 + 1e-9)".into() },
            Derivation {
                name: "M".into(),
                value: big_m,
                rule: format!("first point of the 2^(1/16) grid from 2K with M^(1/2+1/n) P(f >= M) >= K, doubled {} times", attempt - 1),
            },
            Derivation { name: "m".into(), value: m, rule: "smallest integer >= max(n,2) with (m+n)(m+2) >= M r0/4".into() },
            Derivation { name: "d".into(), value: d, rule: "sqrt(2 C2/K) m^(1/n)".into() },
            Derivation { name: "h".into(), value: h, rule: "K^(n/2-1) (2 C2)^(-n/2) m^(2/n)".into() },
            Derivation { name: "l".into(), value: l, rule: "2 r1 + C0 (M^(1/2+1/n)/(h K))^(1/n)".into() },
            Derivation { name: "r_in".into(), value: r_in, rule: "r0".into() },
            Derivation { name: "r_out".into(), value: r_out, rule: "sqrt(n) (l + d/2 - r1)".into() },
            Derivation { name: "F_in".into(), value: f_in, rule: "(m+n)(m+2)/r0".into() },
            Derivation { name: "F_out".into(), value: f_out, rule: "2 C1 h/d^2".into() },
        ];
        return Ok(PipelineParams {
            force,
            n,
            lambda,
            r0,
            r1,
            c0,
            c1,
            c2,
            k,
            big_m,
            m,
            d,
            h,
            l,
            r_in,
            r_out,
            f_in,
            f_out,
            tail_at_m: tail,
            open_probability,
            kink,
            attempts: attempt,
            derivations,
            rechecks,
        });
    }
    Err(Error::PipelineRecheck {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(force: f64, n: usize) -> PipelineInput {
        PipelineInput {
            force,
            n,
            lambda: 1.0,
            r0: 0.5,
            r1: 1.0,
            // the tail must be heavier than x^-(1/2+1/n)
            distribution: StrengthDistribution::pareto(1.0, if n == 1 { 1.25 } else { 0.8 })
                .unwrap(),
            c1: None,
        }
    }

    #[test]
    fn smallest_m_is_minimal() {
        for target in [0.0, 3.0, 16.0, 17.0, 1e6, 3.3e9] {
            for n in [1usize, 2] {
                let m = smallest_m(n, target);
                let nf = n as f64;
                assert!(m >= nf.max(2.0) && (m + nf) * (m + 2.0) >= target);
                if m > nf.max(2.0) {
                    assert!((m - 1.0 + nf) * (m + 1.0) < target);
                }
            }
        }
    }

    #[test]
    fn recomputes_every_relation() {
        for (force, n) in [(1.0, 1), (10.0, 1), (100.0, 1), (1.0, 2)] {
            let p = plan_parameters(&input(force, n)).unwrap();
            assert!(p.all_rechecks_pass(), "{:?}", p.rechecks);
            let nf = n as f64;
            let rel = |a: f64, b: f64| ((a - b) / b).abs() < 1e-9;
            assert!(rel(p.d, (2.0 * p.c2 / p.k).sqrt() * p.m.powf(1.0 / nf)));
            assert!(rel(p.f_out, 2.0 * p.c1 * p.h / (p.d * p.d)));
            assert!(rel(p.r_out, nf.sqrt() * (p.l + p.d / 2.0 - p.r1)));
            assert!(p.big_m >= 2.0 * p.k);
            assert!(p.open_probability > percolation_threshold(n));
        }
    }

    #[test]
    fn bounded_strengths_are_rejected() {
        let mut inp = input(1.0, 1);
        inp.distribution = StrengthDistribution::point_mass(5);
        assert!(matches!(
            plan_parameters(&inp),
            Err(Error::HypothesisNotWitnessed { .. })
        ));
        inp.distribution = StrengthDistribution::geometric(0.5).unwrap();
        assert!(matches!(
            plan_parameters(&inp),
            Err(Error::HypothesisNotWitnessed { .. })
        ));
    }

    #[test]
    fn invalid_inputs() {
        let mut inp = input(0.0, 1);
        assert!(plan_parameters(&inp).is_err());
        inp.force = 1.0;
        inp.r1 = 0.6;
        assert!(matches!(plan_parameters(&inp), Err(Error::InvalidShape(_))));
    }
}
