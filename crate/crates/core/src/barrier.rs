//! The M-statistic `M = sup{−j + X_j}` with its two-sided bounds, and
//! stationary supersolutions of the lattice dynamics.
//!
//! A barrier is an integer profile `v ≥ 0` with `Δ₁v(i) ≤ f(i, v(i)) − F` at
//! every site. Every constructor below hands its output to [`verify_barrier`]
//! and returns nothing unless that exact check passes.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::discrete::discrete_laplacian;
use crate::error::{Error, Result};
use crate::percolation::{find_minimal_surface, SiteField};
use crate::quenched::{MomentStatus, SiteForce, StrengthDistribution};
use crate::rng::EnvironmentSeed;

/// `max{−j + X_j : 0 ≤ j ≤ J}` with `X_j` addressed by `seed` at coordinate `j`.
pub fn sample_m_statistic(
    dist: &StrengthDistribution,
    j_max: u64,
    seed: EnvironmentSeed,
) -> Result<i64> {
    Ok(*sample_m_path(dist, &[j_max], seed)?.last().unwrap_or(&0))
}

/// `M_J` for every `J` in the non-decreasing list `js`, from one draw of the
/// sequence `X_0, X_1, …`. The values are non-decreasing in `J`.
pub fn sample_m_path(
    dist: &StrengthDistribution,
    js: &[u64],
    seed: EnvironmentSeed,
) -> Result<Vec<i64>> {
    if !dist.is_discrete() {
        return Err(Error::InvalidDistribution(format!(
            "{:?} is not N0-valued",
            dist.kind()
        )));
    }
    if js.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "truncations must be non-decreasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(js.len());
    let mut best = i64::MIN;
    let mut j = 0u64;
    for &target in js {
        while j <= target {
            let u = seed.uniform_open_closed(&[j as i64]);
            let x = dist.sample_above(0.0, u) as i64;
            best = best.max(x - j as i64);
            j += 1;
        }
        out.push(best);
    }
    Ok(out)
}

/// Same law as [`sample_m_path`], drawn by skipping to the sites with
/// `X_j ≥ j + 1` (the only ones that can beat `X_0`). Cost grows with the
/// number of such sites, not with `J`.
pub fn sample_m_path_sparse(
    dist: &StrengthDistribution,
    js: &[u64],
    seed: EnvironmentSeed,
) -> Result<Vec<i64>> {
    use rand::Rng;
    if !dist.is_discrete() {
        return Err(Error::InvalidDistribution(format!(
            "{:?} is not N0-valued",
            dist.kind()
        )));
    }
    if js.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "truncations must be non-decreasing".into(),
        ));
    }
    let mut rng = seed.rng(&[]);
    let mut open01 = move || 1.0 - rng.random::<f64>();
    let mut best = dist.sample_above(0.0, open01()) as i64;
    let last = js.last().copied().unwrap_or(0);
    // exceedance sites in increasing order, thinned from a geometric proposal
    let mut events: Vec<(u64, i64)> = Vec::new();
    let mut j = 1u64;
    while j <= last {
        let q = dist.tail_at(j as i64 + 1);
        if q <= 0.0 {
            break;
        }
        let gap = if q >= 1.0 {
            0.0
        } else {
            (open01().ln() / (-q).ln_1p()).floor()
        };
        if gap >= (last - j + 1) as f64 {
            break;
        }
        let cand = j + gap as u64;
        let a = dist.tail_at(cand as i64 + 1);
        if open01() * q <= a {
            let x = dist.sample_above((cand + 1) as f64, open01()) as i64;
            events.push((cand, x - cand as i64));
        }
        j = cand + 1;
    }
    let mut out = Vec::with_capacity(js.len());
    let mut it = events.into_iter().peekable();
    for &target in js {
        while let Some(&(pos, v)) = it.peek() {
            if pos > target {
                break;
            }
            best = best.max(v);
            it.next();
        }
        out.push(best);
    }
    Ok(out)
}

/// Smallest `k ≥ 1` with `Σ_{k' ≥ k} α_{k'} ≤ 1/2`, or `None` when `E X = ∞`.
pub fn k0(dist: &StrengthDistribution) -> Option<i64> {
    let mut k = 1;
    loop {
        let s = dist.tail_sum_from(k)?;
        if s <= 0.5 {
            return Some(k);
        }
        k += 1;
        if k > 1 << 40 {
            return None;
        }
    }
}

/// Lower bound on `P(M ≥ n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LowerBound {
    Value {
        value: f64,
    },
    /// `n < k0`: the bound is not established there.
    BelowK0 {
        k0: i64,
    },
    /// `E X = ∞`: then already `E M = ∞`.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MBounds {
    pub n: i64,
    pub lower: LowerBound,
    /// `Σ_l (l+1) P(X = n+l)`; infinite when `E X = ∞`.
    pub upper: f64,
}

/// Bounds `½ Σ_{k≥n} α_k ≤ P(M ≥ n) ≤ Σ_{l≥0} (l+1) P(X = n+l)`, the lower one for `n ≥ k0`.
pub fn m_bounds(dist: &StrengthDistribution, n: i64) -> Result<MBounds> {
    if !dist.is_discrete() {
        return Err(Error::InvalidDistribution(format!(
            "{:?} is not N0-valued",
            dist.kind()
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    let upper = dist.tail_sum_from(n);
    let lower = match (upper, k0(dist)) {
        (None, _) | (_, None) => LowerBound::NotApplicable,
        (Some(s), Some(k)) if n >= k => LowerBound::Value { value: 0.5 * s },
        (Some(_), Some(k)) => LowerBound::BelowK0 { k0: k },
    };
    Ok(MBounds {
        n,
        lower,
        upper: upper.unwrap_or(f64::INFINITY),
    })
}

/// How a certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierStrategy {
    LipschitzSurface,
    ParabolicBridge,
    MonotoneRelaxation,
}

impl BarrierStrategy {
    pub const ALL: [BarrierStrategy; 3] = [
        BarrierStrategy::LipschitzSurface,
        BarrierStrategy::ParabolicBridge,
        BarrierStrategy::MonotoneRelaxation,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierCertificate {
    pub window: usize,
    pub v: Vec<i64>,
    pub force: i64,
    pub verified: bool,
    pub violations: Vec<usize>,
    #[serde(default)]
    pub strategy: Option<BarrierStrategy>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Exact integer check of `Δ₁v(i) ≤ f(i, v(i)) − F` and `v(i) ≥ 0` on the periodic window.
pub fn verify_barrier<S: SiteForce + ?Sized>(
    v: &[i64],
    field: &S,
    force: i64,
) -> BarrierCertificate {
    let violations: Vec<usize> = (0..v.len())
        .filter(|&i| {
            v[i] < 0
                || (discrete_laplacian(v, i) as i128)
                    > field.force(i as i64, v[i]) as i128 - force as i128
        })
        .collect();
    BarrierCertificate {
        window: v.len(),
        v: v.to_vec(),
        force,
        verified: !v.is_empty() && violations.is_empty(),
        violations,
        strategy: None,
        seed: None,
    }
}

/// Search limits for [`build_barrier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierBudget {
    /// Largest barrier height considered.
    pub max_height: i64,
    /// Node budget of the anchor search.
    pub max_nodes: usize,
    /// Largest distance between consecutive anchors.
    pub max_gap: usize,
    /// Candidate anchors kept per column.
    pub candidates_per_column: usize,
}

impl Default for BarrierBudget {
    fn default() -> Self {
        Self {
            max_height: 4096,
            max_nodes: 2_000_000,
            max_gap: 48,
            candidates_per_column: 6,
        }
    }
}

/// Try to construct a verified barrier on the window `[0, width)`.
///
/// `None` means the strategy gave up within budget; it says nothing about
/// whether the interface is pinned.
pub fn build_barrier<S: SiteForce + ?Sized>(
    field: &S,
    width: usize,
    force: i64,
    strategy: BarrierStrategy,
    budget: &BarrierBudget,
) -> Option<BarrierCertificate> {
    if width == 0 {
        return None;
    }
    let v = match strategy {
        BarrierStrategy::LipschitzSurface => lipschitz_surface(field, width, force, budget),
        BarrierStrategy::ParabolicBridge => parabolic_bridge(field, width, force, budget),
        BarrierStrategy::MonotoneRelaxation => monotone_relaxation(field, width, force, budget),
    }?;
    let mut cert = verify_barrier(&v, field, force);
    cert.strategy = Some(strategy);
    cert.verified.then_some(cert)
}

fn lipschitz_surface<S: SiteForce + ?Sized>(
    field: &S,
    width: usize,
    force: i64,
    budget: &BarrierBudget,
) -> Option<Vec<i64>> {
    let threshold = force.saturating_add(2);
    let open = |a: &[i64], j: i64| field.force(a[0], j - 1) >= threshold;
    let sites = SiteField::new(vec![width], budget.max_height.saturating_add(1), open).ok()?;
    let surface = find_minimal_surface(&sites)?;
    Some(surface.heights.iter().map(|&l| l - 1).collect())
}

/// Smallest non-negative supersolution below the height budget.
///
/// Raising a violating site can never pass a supersolution `w ≥ v`, since at
/// `v(i) = w(i)` the check at `i` would already hold.
fn monotone_relaxation<S: SiteForce + ?Sized>(
    field: &S,
    width: usize,
    force: i64,
    budget: &BarrierBudget,
) -> Option<Vec<i64>> {
    let mut v = vec![0i64; width];
    let mut queued = vec![true; width];
    let mut queue: VecDeque<usize> = (0..width).collect();
    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        let mut raised = false;
        while discrete_laplacian(&v, i) > field.force(i as i64, v[i]).saturating_sub(force) {
            v[i] += 1;
            raised = true;
            if v[i] > budget.max_height {
                return None;
            }
        }
        if raised {
            for k in [(i + width - 1) % width, (i + 1) % width] {
                if !queued[k] {
                    queued[k] = true;
                    queue.push_back(k);
                }
            }
        }
    }
    Some(v)
}

/// Slopes of the discrete bridge over `g` steps climbing `dh` with second
/// differences at most `−F`: returns `(first slope, last slope)`, both optimal.
pub fn bridge_end_slopes(dh: i64, g: i64, force: i64) -> (i64, i64) {
    let curve = force * g * (g - 1) / 2;
    let d1 = (dh + curve).div_euclid(g) + i64::from((dh + curve).rem_euclid(g) != 0);
    let excess = g * d1 - curve - dh;
    (d1, d1 - force * (g - 1) - i64::from(excess > 0))
}

/// Heights of that bridge at offsets `0..=g`.
pub fn bridge_profile(h0: i64, dh: i64, g: i64, force: i64) -> Vec<i64> {
    let curve = force * g * (g - 1) / 2;
    let (d1, _) = bridge_end_slopes(dh, g, force);
    let excess = g * d1 - curve - dh;
    let mut out = Vec::with_capacity(g as usize + 1);
    let mut h = h0;
    out.push(h);
    for t in 1..=g {
        let mut d = d1 - force * (t - 1);
        if t > g - excess {
            d -= 1;
        }
        h += d;
        out.push(h);
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Anchor {
    col: i64,
    height: i64,
    strength: i64,
}

fn parabolic_bridge<S: SiteForce + ?Sized>(
    field: &S,
    width: usize,
    force: i64,
    budget: &BarrierBudget,
) -> Option<Vec<i64>> {
    let w = width as i64;
    let max_gap = budget.max_gap.clamp(1, width) as i64;
    // strongest sites per column
    let cands: Vec<Vec<Anchor>> = (0..w)
        .map(|i| {
            let mut c: Vec<Anchor> = (0..=budget.max_height)
                .map(|j| Anchor {
                    col: i,
                    height: j,
                    strength: field.force(i, j),
                })
                .filter(|a| a.strength >= force)
                .collect();
            c.sort_by_key(|a| (-a.strength, a.height));
            c.truncate(budget.candidates_per_column.max(1));
            c
        })
        .collect();
    let mut nodes = 0usize;
    let start_cols: Vec<i64> = {
        let mut s: Vec<i64> = (0..max_gap.min(w)).collect();
        s.sort_by_key(|&c| std::cmp::Reverse(cands[c as usize].first().map(|a| a.strength)));
        s
    };
    for &c0 in &start_cols {
        for &start in &cands[c0 as usize] {
            if let Some(chain) = anchor_chain(
                &cands,
                start,
                w,
                max_gap,
                force,
                &mut nodes,
                budget.max_nodes,
            ) {
                return Some(render_chain(&chain, w, force));
            }
            if nodes >= budget.max_nodes {
                return None;
            }
        }
    }
    None
}

/// Depth-first anchor search around the periodic window, starting and ending
/// at `start` (the end copy shifted by `w`).
fn anchor_chain(
    cands: &[Vec<Anchor>],
    start: Anchor,
    w: i64,
    max_gap: i64,
    force: i64,
    nodes: &mut usize,
    max_nodes: usize,
) -> Option<Vec<Anchor>> {
    let end_col = start.col + w;
    let mut failed: HashSet<(i64, i64, i64)> = HashSet::new();
    // frame: anchor, incoming last slope (None for start), list of next options, cursor
    struct Frame {
        anchor: Anchor,
        d_in: Option<i64>,
        options: Vec<Anchor>,
        cursor: usize,
    }
    let options_from = |a: Anchor| -> Vec<Anchor> {
        let mut opts = Vec::new();
        for g in 1..=max_gap {
            let col = a.col + g;
            if col > end_col {
                break;
            }
            if col == end_col {
                opts.push(Anchor { col, ..start });
                continue;
            }
            for c in &cands[col.rem_euclid(w) as usize] {
                opts.push(Anchor { col, ..*c });
            }
        }
        // prefer far, strong anchors
        opts.sort_by_key(|b| -(b.strength + force * (b.col - a.col)));
        opts
    };
    let mut stack = vec![Frame {
        anchor: start,
        d_in: None,
        options: options_from(start),
        cursor: 0,
    }];
    while let Some(top) = stack.last_mut() {
        *nodes += 1;
        if *nodes > max_nodes {
            return None;
        }
        if top.cursor >= top.options.len() {
            let f = stack.pop().expect("non-empty");
            if let Some(d) = f.d_in {
                failed.insert((f.anchor.col, f.anchor.height, d));
            }
            continue;
        }
        let a = top.anchor;
        let next = top.options[top.cursor];
        top.cursor += 1;
        let g = next.col - a.col;
        let (d1, dg) = bridge_end_slopes(next.height - a.height, g, force);
        if let Some(d_in) = top.d_in {
            if d1 - d_in > a.strength - force {
                continue;
            }
        }
        if next.col == end_col {
            // closing the cycle: the start's kink uses the first bridge's slope
            let first = &stack[0];
            let nxt0 = stack.get(1).map(|f| f.anchor).unwrap_or(next);
            let g0 = nxt0.col - first.anchor.col;
            let (d1_first, _) = bridge_end_slopes(nxt0.height - first.anchor.height, g0, force);
            if d1_first - dg <= start.strength - force {
                let mut chain: Vec<Anchor> = stack.iter().map(|f| f.anchor).collect();
                chain.push(next);
                return Some(chain);
            }
            continue;
        }
        if failed.contains(&(next.col, next.height, dg)) {
            continue;
        }
        let opts = options_from(next);
        stack.push(Frame {
            anchor: next,
            d_in: Some(dg),
            options: opts,
            cursor: 0,
        });
    }
    None
}

fn render_chain(chain: &[Anchor], w: i64, force: i64) -> Vec<i64> {
    let mut v = vec![0i64; w as usize];
    for pair in chain.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let prof = bridge_profile(a.height, b.height - a.height, b.col - a.col, force);
        for (t, &h) in prof.iter().enumerate() {
            v[(a.col + t as i64).rem_euclid(w) as usize] = h;
        }
    }
    v
}

/// `(finite, estimate of E M_J per J)` style summary used by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MStatSummary {
    pub js: Vec<u64>,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: usize,
    pub second_moment: MomentStatus,
}

/// Coupled Monte Carlo estimates of `E M_J`: sample `k` uses the seed
/// `(seed, k)` and one draw of the sequence serves every `J`.
pub fn estimate_m_means(
    dist: &StrengthDistribution,
    js: &[u64],
    samples: usize,
    seed: EnvironmentSeed,
) -> Result<MStatSummary> {
    use rayon::prelude::*;
    let paths: Vec<Vec<i64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            sample_m_path_sparse(
                dist,
                js,
                EnvironmentSeed::new(seed.bits(&[k as i64]), seed.stream_tag),
            )
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mut means = Vec::with_capacity(js.len());
    let mut ses = Vec::with_capacity(js.len());
    for idx in 0..js.len() {
        let mean = paths.iter().map(|p| p[idx] as f64).sum::<f64>() / n;
        let var = paths
            .iter()
            .map(|p| (p[idx] as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0).max(1.0);
        means.push(mean);
        ses.push((var / n).sqrt());
    }
    Ok(MStatSummary {
        js: js.to_vec(),
        means,
        std_errors: ses,
        samples,
        second_moment: crate::quenched::second_moment_status(dist),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quenched::LatticeField;
    use crate::rng::streams;

    fn ms(s: u64) -> EnvironmentSeed {
        EnvironmentSeed::new(s, streams::M_STATISTIC)
    }

    #[test]
    fn point_mass_zero_gives_zero() {
        let d = StrengthDistribution::point_mass(0);
        for j in [0, 1, 10, 1000] {
            assert_eq!(sample_m_statistic(&d, j, ms(j)).unwrap(), 0);
        }
        assert_eq!(m_bounds(&d, 1).unwrap().upper, 0.0);
        assert_eq!(m_bounds(&d, 5).unwrap().upper, 0.0);
    }

    #[test]
    fn geometric_k0_and_lower() {
        let d = StrengthDistribution::geometric(0.5).unwrap();
        assert_eq!(k0(&d), Some(2));
        let b = m_bounds(&d, 2).unwrap();
        assert_eq!(b.lower, LowerBound::Value { value: 0.25 });
        assert!(matches!(
            m_bounds(&d, 1).unwrap().lower,
            LowerBound::BelowK0 { k0: 2 }
        ));
    }

    #[test]
    fn two_point_upper_is_tight() {
        let d = StrengthDistribution::two_point(2, 0.5).unwrap();
        assert_eq!(m_bounds(&d, 2).unwrap().upper, 0.5);
    }

    #[test]
    fn infinite_mean_lower_not_applicable() {
        let d = StrengthDistribution::zeta_tail(1.8).unwrap();
        let b = m_bounds(&d, 3).unwrap();
        assert_eq!(b.lower, LowerBound::NotApplicable);
        assert!(b.upper.is_infinite());
    }

    #[test]
    fn m_path_is_non_decreasing() {
        let d = StrengthDistribution::zeta_tail(3.0).unwrap();
        let p = sample_m_path(&d, &[0, 10, 100, 1000], ms(1)).unwrap();
        assert!(p.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(p[3], sample_m_statistic(&d, 1000, ms(1)).unwrap());
    }

    #[test]
    fn sparse_and_dense_paths_agree_in_law() {
        let d = StrengthDistribution::zeta_tail(3.0).unwrap();
        let js = [0u64, 5, 50];
        let n = 20_000;
        let mut dense = [0.0; 3];
        let mut sparse = [0.0; 3];
        let mut sq = [0.0; 3];
        for k in 0..n {
            let a = sample_m_path(&d, &js, ms(10_000 + k)).unwrap();
            let b = sample_m_path_sparse(&d, &js, ms(k)).unwrap();
            assert!(b.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..3 {
                dense[i] += a[i] as f64;
                sparse[i] += b[i] as f64;
                sq[i] += (a[i] as f64).powi(2) + (b[i] as f64).powi(2);
            }
        }
        for i in 0..3 {
            let (ma, mb) = (dense[i] / n as f64, sparse[i] / n as f64);
            let var = sq[i] / (2 * n) as f64 - ((ma + mb) / 2.0).powi(2);
            let se = (2.0 * var / n as f64).sqrt();
            assert!(
                (ma - mb).abs() < 4.0 * se,
                "J={}: {ma} vs {mb} (se {se})",
                js[i]
            );
        }
    }

    #[test]
    fn verify_trivial_cases() {
        let zero = |_: i64, _: i64| 0i64;
        assert!(verify_barrier(&[0; 8], &zero, 0).verified);
        let c = verify_barrier(&[0; 8], &zero, 1);
        assert!(!c.verified);
        assert_eq!(c.violations, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn constant_strong_field_gives_flat_barrier() {
        let f = |_: i64, _: i64| 5i64;
        for s in BarrierStrategy::ALL {
            let c = build_barrier(&f, 16, 3, s, &BarrierBudget::default()).unwrap();
            assert!(c.verified);
            if s != BarrierStrategy::ParabolicBridge {
                assert_eq!(c.v, vec![0; 16], "{s:?}");
            }
        }
    }

    #[test]
    fn bridge_slopes_are_optimal() {
        for force in 0..4 {
            for g in 1..12 {
                for dh in -30..30 {
                    let prof = bridge_profile(7, dh, g, force);
                    assert_eq!(prof[g as usize], 7 + dh);
                    let d: Vec<i64> = prof.windows(2).map(|w| w[1] - w[0]).collect();
                    assert!(d.windows(2).all(|p| p[1] - p[0] <= -force));
                    let (d1, dg) = bridge_end_slopes(dh, g, force);
                    assert_eq!((d[0], d[g as usize - 1]), (d1, dg));
                    // no admissible slope sequence has a smaller first or larger last slope
                    let curve = force * g * (g - 1) / 2;
                    assert!(g * (d1 - 1) - curve < dh);
                    assert!(g * (dg + 1) + curve > dh);
                }
            }
        }
    }

    #[test]
    fn bridge_certificate_is_verified_when_kinks_hold() {
        // two strong anchors at columns 0 and 6 on a window of 12
        let f = |i: i64, j: i64| if (i == 0 || i == 6) && j == 0 { 40 } else { 0 };
        let mut v = vec![0i64; 12];
        for (t, h) in bridge_profile(0, 0, 6, 2).into_iter().enumerate() {
            v[t] = h;
        }
        for (t, h) in bridge_profile(0, 0, 6, 2).into_iter().enumerate() {
            v[(6 + t) % 12] = h;
        }
        let (d1, dg) = bridge_end_slopes(0, 6, 2);
        let kink = d1 - dg;
        assert_eq!(verify_barrier(&v, &f, 2).verified, kink <= 40 - 2);
        let c = build_barrier(
            &f,
            12,
            2,
            BarrierStrategy::ParabolicBridge,
            &BarrierBudget::default(),
        )
        .unwrap();
        assert!(c.verified);
    }

    #[test]
    fn relaxation_is_minimal() {
        let field = LatticeField::new(3, StrengthDistribution::zeta_tail(3.0).unwrap()).unwrap();
        let b = BarrierBudget::default();
        let relax = build_barrier(&field, 64, 1, BarrierStrategy::MonotoneRelaxation, &b).unwrap();
        if let Some(bridge) = build_barrier(&field, 64, 1, BarrierStrategy::ParabolicBridge, &b) {
            assert!(relax.v.iter().zip(&bridge.v).all(|(r, w)| r <= w));
        }
    }
}
