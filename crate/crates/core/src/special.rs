//! Series helpers shared by the tail bounds and the Gaussian functional.

/// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta function `sum_{k >= 0} (k + a)^(-s)` for `s > 1`, `a > 0`.
///
/// Euler-Maclaurin summation after `N` explicit terms. Returns `inf` when
/// `s <= 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    assert!(a > 0.0, "hurwitz_zeta needs a > 0, got {a}");
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + a).powf(-s);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)!
    let mut factor = s / x.powf(s + 1.0);
    let mut fact = 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * factor;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let j2 = 2.0 * (j as f64 + 1.0);
        factor *= (s + j2 - 1.0) * (s + j2) / (x * x);
        fact *= (j2 + 1.0) * (j2 + 2.0);
    }
    sum
}

/// `sum_{k >= n} (k + offset)^(-p)`, the tail of a power law.
pub fn power_tail(p: f64, offset: f64, n: usize) -> f64 {
    hurwitz_zeta(p, n as f64 + offset)
}

/// Index-order (Neumaier) compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre_unit(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_q
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if q == 0 { 1.0 } else if q == 1 { x } else { p1 };
            let pm1 = if q == 1 { 1.0 } else { p0 };
            dp = qf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[q - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_trig_polynomials() {
        let (x, w) = gauss_legendre_unit(200);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // ∫_0^1 sin(101 pi s) ds = 2 / (101 pi)
        let got: f64 = x.iter().zip(&w).map(|(s, w)| w * (101.0 * std::f64::consts::PI * s).sin()).sum();
        assert!((got - 2.0 / (101.0 * std::f64::consts::PI)).abs() < 1e-14);
        let (x3, w3) = gauss_legendre_unit(3);
        let cubic: f64 = x3.iter().zip(&w3).map(|(s, w)| w * s.powi(5)).sum();
        assert!((cubic - 1.0 / 6.0).abs() < 1e-15);
    }
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_matches_basel() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        // sum_{k>=4} k^-2 frozen from a 30-digit evaluation
        assert!((power_tail(2.0, 0.0, 4) - 0.283_822_955_737_115_3).abs() < 1e-14);
    }

    #[test]
    fn zeta_matches_brute_force_for_fractional_exponent() {
        let s = 1.5;
        let a = 0.5;
        let n = 2_000_000usize;
        let mut brute: f64 = (0..n).map(|k| (k as f64 + a).powf(-s)).rev().sum();
        // integral remainder with midpoint correction
        brute += (n as f64 + a - 0.5).powf(1.0 - s) / (s - 1.0);
        assert!((hurwitz_zeta(s, a) - brute).abs() < 1e-9);
    }

    #[test]
    fn divergent_exponent_is_infinite() {
        assert!(hurwitz_zeta(1.0, 1.0).is_infinite());
    }
}
