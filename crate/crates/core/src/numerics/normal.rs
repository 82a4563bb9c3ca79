//! Standard normal tail function and its inverse.
//!
//! `erfc` is evaluated with the positive-term series of `erf` below
//! `u = 2` and with the Laplace continued fraction above it, so the
//! upper tail keeps full relative precision until `exp(-u^2)` underflows.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Switch point between the `erf` series and the continued fraction.
const ERFC_SPLIT: f64 = 2.0;
const CF_DEPTH: usize = 160;

/// Continued-fraction denominator `t(u)` with `erfc(u) = exp(-u^2) / (sqrt(pi) t(u))`.
fn erfc_cf_denominator(u: f64) -> f64 {
    let mut t = u;
    for k in (1..=CF_DEPTH).rev() {
        t = u + (k as f64 * 0.5) / t;
    }
    t
}

fn erf_series(u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let u2 = u * u;
    let mut term = u;
    let mut sum = u;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * u2 / (2.0 * k + 1.0);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-u2).exp() * sum
}

/// `erfc(u)` for `u >= 0`.
fn erfc_nonneg(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u < ERFC_SPLIT {
        1.0 - erf_series(u)
    } else {
        (-u * u).exp() * FRAC_1_SQRT_PI / erfc_cf_denominator(u)
    }
}

/// Upper tail `Pr(Z > x)` without the finiteness check.
pub(crate) fn q(x: f64) -> f64 {
    if x >= 0.0 {
        0.5 * erfc_nonneg(x * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * erfc_nonneg(-x * FRAC_1_SQRT_2)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Standard normal CDF `Pr(Z <= x)`.
pub fn normal_cdf(x: f64) -> f64 {
    q(-x)
}

/// Upper tail probability `Q(x) = Pr(Z > x)` of a standard normal `Z`.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("q_function needs a finite argument, got {x}"));
    }
    Ok(q(x))
}

/// Natural log of `Q(x)`, finite far beyond the range where `Q(x)` underflows.
pub fn log_q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("log_q_function needs a finite argument, got {x}"));
    }
    let u = x * FRAC_1_SQRT_2;
    if u < ERFC_SPLIT {
        return Ok(q(x).ln());
    }
    Ok(-u * u - (PI.sqrt() * erfc_cf_denominator(u)).ln() - std::f64::consts::LN_2)
}

// Rational approximation of the normal quantile (P. J. Acklam), ~1e-9 relative.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

fn acklam_lower_quantile(p: f64) -> f64 {
    if p < P_LOW {
        let r = (-2.0 * p.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else if p <= 1.0 - P_LOW {
        let r = p - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    } else {
        -acklam_lower_quantile(1.0 - p)
    }
}

/// Inverse of [`q_function`]: the `z` with `Pr(Z > z) = eps`.
pub fn q_inverse(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("q_inverse needs eps in (0,1), got {eps}"));
    }
    if eps > 0.5 {
        // Q^{-1}(eps) = -Q^{-1}(1 - eps); polishing on the small side keeps precision.
        return Ok(-q_inverse_small(1.0 - eps));
    }
    Ok(q_inverse_small(eps))
}

fn q_inverse_small(eps: f64) -> f64 {
    // x solves Phi(x) = eps, i.e. x = -Q^{-1}(eps) <= 0.
    let mut x = acklam_lower_quantile(eps);
    for _ in 0..2 {
        let e = normal_cdf(x) - eps;
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    -x
}
