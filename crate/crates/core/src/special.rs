//! Hurwitz zeta by Euler–Maclaurin summation.

/// B_{2j} / (2j)! for j = 1..=8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// ζ(s, a) = Σ_{k≥0} (a + k)^{-s} for s > 1, a > 0.
///
/// Direct summation until `a + N ≥ 16`, then the Euler–Maclaurin tail with
/// eight Bernoulli corrections; relative error is below 1e-15 for s ≤ 20.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const SHIFT: f64 = 16.0;
    let mut head = 0.0;
    let mut x = a;
    while x < SHIFT {
        head += x.powf(-s);
        x += 1.0;
    }
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2), times x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += coeff * rising * power;
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (s + k - 1.0) * (s + k);
        power *= inv_x2;
    }
    head + tail
}

/// Riemann zeta ζ(s) for s > 1.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}
