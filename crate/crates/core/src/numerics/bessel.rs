//! Log of the modified Bessel function of the first kind.

use std::f64::consts::PI;

/// Below this argument the power series is always used.
const SERIES_MAX_ARG: f64 = 30.0;
/// Orders at or above this use the uniform (Debye) expansion when the
/// large-argument expansion does not apply.
const DEBYE_MIN_ORDER: f64 = 50.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Natural log of `I_nu(s)` for `nu >= 0`, `s >= 0`.
///
/// Returns `-inf` for `I_nu(0) = 0` when `nu > 0`. Inputs outside the
/// domain yield `NaN`.
pub fn bessel_i_log(nu: f64, s: f64) -> f64 {
    if !(nu >= 0.0 && s >= 0.0) || !nu.is_finite() || !s.is_finite() {
        return f64::NAN;
    }
    if s == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if s <= SERIES_MAX_ARG {
        return series(nu, s);
    }
    if s >= nu * nu {
        return hankel(nu, s);
    }
    if nu >= DEBYE_MIN_ORDER {
        return debye(nu, s);
    }
    series(nu, s)
}

/// Power series `sum (s/2)^{2k+nu} / (k! Gamma(k+nu+1))`, summed relative to
/// the leading term with periodic rescaling.
fn series(nu: f64, s: f64) -> f64 {
    let half = 0.5 * s;
    let lead = nu * half.ln() - ln_gamma(nu + 1.0);
    let q = half * half;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if sum > 1e250 {
            log_scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        if term < sum * 1e-17 && k > q.sqrt() {
            break;
        }
    }
    lead + log_scale + sum.ln()
}

/// Large-argument expansion, valid once `s >= nu^2` and `s > 30`.
fn hankel(nu: f64, s: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * k * s);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    s - 0.5 * (2.0 * PI * s).ln() + sum.ln()
}

/// Uniform asymptotic expansion in the order, five correction terms.
fn debye(nu: f64, s: f64) -> f64 {
    let z = s / nu;
    let root = (1.0 + z * z).sqrt();
    let eta = root + (z / (1.0 + root)).ln();
    let p = 1.0 / root;
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
    let u3 = p * p2 * (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 - 425425.0 * p2 * p2 * p2)
        / 414720.0;
    let p4 = p2 * p2;
    let u4 = p4
        * (4465125.0 - 94121676.0 * p2 + 349922430.0 * p4 - 446185740.0 * p4 * p2
            + 185910725.0 * p4 * p4)
        / 39813120.0;
    let sum = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / nu.powi(3) + u4 / nu.powi(4);
    nu * eta - 0.5 * (2.0 * PI * nu).ln() - 0.25 * (1.0 + z * z).ln() + sum.ln()
}
