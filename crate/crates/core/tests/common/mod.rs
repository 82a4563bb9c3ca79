//! Oracles shared by the integration tests. None of them call into the
//! library's special functions.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Density at radius `r` of `X + Z`, `X` uniform on the sphere of radius
/// `sqrt(nP)` in `R^n`, `Z` standard normal, by integrating over the angle
/// between `y` and `X` (law proportional to `sin^{n-2}`).
pub fn shell_density_quadrature(n: usize, p: f64, r: f64) -> f64 {
    let a = (n as f64 * p).sqrt();
    let s = a * r;
    let k = n as i32 - 2;
    let num = adaptive_simpson(&|t: f64| (s * (t.cos() - 1.0)).exp() * t.sin().powi(k), 0.0, PI, 1e-15);
    let den = adaptive_simpson(&|t: f64| t.sin().powi(k), 0.0, PI, 1e-15);
    (2.0 * PI).powf(-0.5 * n as f64) * (s - (r * r + a * a) / 2.0).exp() * num / den
}

/// `int p ln(p/q)` for `p = N(m1, 1)`, `q = N(m2, 1)` by Simpson's rule.
pub fn kl_quadrature_1d(m1: f64, m2: f64) -> f64 {
    let p = |t: f64| (-(t - m1) * (t - m1) / 2.0).exp() / (2.0 * PI).sqrt();
    let log_ratio = |t: f64| (-(t - m1) * (t - m1) + (t - m2) * (t - m2)) / 2.0;
    let (a, b) = (m1.min(m2) - 20.0, m1.max(m2) + 20.0);
    let steps = 200_000;
    let h = (b - a) / steps as f64;
    let f = |t: f64| p(t) * log_ratio(t);
    let mut acc = f(a) + f(b);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `log2(e)^2 P (P+2) / (2 (P+1)^2)` written out.
pub fn dispersion_direct(p: f64) -> f64 {
    let l = 1.0 / 2f64.ln();
    l * l * p * (p + 2.0) / (2.0 * (p + 1.0) * (p + 1.0))
}
