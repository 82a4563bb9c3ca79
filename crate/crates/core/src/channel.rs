//! The real AWGN channel `Y = x + Z`, `Z ~ N(0, I_n)`, its capacity-achieving
//! output law `N(0, (1+P) I_n)`, and the information density between them.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{capacity, dispersion};
use crate::error::{check_dim, domain, Result};
use crate::numerics::{normal_cdf, par_blocks, RngStream, StreamRng, LOG2_E};

const LOG2_2PI: f64 = 2.651_496_129_472_318_7;

/// Blocklength and per-symbol power of a unit-noise AWGN channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    n: usize,
    power: f64,
}

impl ChannelSpec {
    pub fn new(n: usize, power: f64) -> Result<Self> {
        if n == 0 {
            return domain("blocklength must be positive");
        }
        if !(power > 0.0 && power.is_finite()) {
            return domain(format!("power must be positive and finite, got {power}"));
        }
        Ok(ChannelSpec { n, power })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Always 1; the power plays the role of the SNR.
    pub fn noise_var(&self) -> f64 {
        1.0
    }

    /// `sqrt(nP)`, the radius of the power shell.
    pub fn shell_radius(&self) -> f64 {
        (self.n as f64 * self.power).sqrt()
    }

    /// Fails unless `| ||x||^2 - nP | <= tol * max(1, nP)`.
    pub fn check_on_shell(&self, x: &[f64], tol: f64) -> Result<()> {
        check_dim(self.n, x.len())?;
        let target = self.n as f64 * self.power;
        let norm2 = norm2(x);
        if (norm2 - target).abs() > tol * target.max(1.0) {
            return domain(format!(
                "point off the power shell: ||x||^2 = {norm2}, nP = {target}"
            ));
        }
        Ok(())
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `log2 W^n(y|x) = -(n/2) log2(2 pi) - ||y-x||^2 log2(e) / 2`.
pub fn channel_log_density(spec: &ChannelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(spec.n, x.len())?;
    check_dim(spec.n, y.len())?;
    Ok(gaussian_kernel_log2(spec.n, dist2(x, y)))
}

#[inline]
pub(crate) fn gaussian_kernel_log2(n: usize, dist2: f64) -> f64 {
    -0.5 * n as f64 * LOG2_2PI - 0.5 * LOG2_E * dist2
}

/// Log2 density of the capacity-achieving output law `N(0, (1+P) I_n)`.
pub fn cao_log_density(spec: &ChannelSpec, y: &[f64]) -> Result<f64> {
    check_dim(spec.n, y.len())?;
    let v = 1.0 + spec.power;
    Ok(-0.5 * spec.n as f64 * (LOG2_2PI + v.log2()) - 0.5 * LOG2_E * norm2(y) / v)
}

/// Information density `log2 W(y|x) / Q*(y)` in bits.
pub fn info_density(spec: &ChannelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(channel_log_density(spec, x, y)? - cao_log_density(spec, y)?)
}

/// Same quantity through `(n/2) log2(1+P) + (log2 e / 2)(||y||^2/(1+P) - ||y-x||^2)`.
pub fn info_density_algebraic(spec: &ChannelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(spec.n, x.len())?;
    check_dim(spec.n, y.len())?;
    Ok(info_density_from_norms(spec, norm2(y), dist2(x, y)))
}

#[inline]
pub(crate) fn info_density_from_norms(spec: &ChannelSpec, y_norm2: f64, noise_norm2: f64) -> f64 {
    let v = 1.0 + spec.power;
    0.5 * spec.n as f64 * v.log2() + 0.5 * LOG2_E * (y_norm2 / v - noise_norm2)
}

/// Draws `Y = x + Z` and returns `(||Y||^2, ||Z||^2)`.
#[inline]
pub(crate) fn draw_output_norms(x: &[f64], rng: &mut StreamRng) -> (f64, f64) {
    let mut y2 = 0.0;
    let mut z2 = 0.0;
    for &xi in x {
        let z: f64 = rng.sample(StandardNormal);
        let y = xi + z;
        y2 += y * y;
        z2 += z * z;
    }
    (y2, z2)
}

/// Adds unit Gaussian noise to `x` in place.
pub(crate) fn add_noise(y: &mut [f64], rng: &mut StreamRng) {
    for v in y.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += z;
    }
}

/// Per-symbol moments of `(1/n) i(x; Y)`, `Y ~ W(.|x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub variance: f64,
    /// `E|X - mean|^3`.
    pub third_abs: f64,
    pub trials: usize,
    pub std_error_mean: f64,
}

impl MomentEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let t = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / t;
        let (mut m2, mut m3) = (0.0, 0.0);
        for &s in samples {
            let d = s - mean;
            m2 += d * d;
            m3 += (d * d * d).abs();
        }
        let variance = if samples.len() > 1 { m2 / (t - 1.0) } else { 0.0 };
        MomentEstimate {
            mean,
            variance,
            third_abs: m3 / t,
            trials: samples.len(),
            std_error_mean: (variance / t).sqrt(),
        }
    }
}

fn info_density_samples(
    spec: &ChannelSpec,
    x: &[f64],
    trials: usize,
    stream: &RngStream,
) -> Vec<f64> {
    par_blocks(trials, stream, |rng, len| {
        (0..len)
            .map(|_| {
                let (y2, z2) = draw_output_norms(x, rng);
                info_density_from_norms(spec, y2, z2)
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

/// Monte Carlo moments of the per-symbol information density at a shell point.
pub fn estimate_moments(
    spec: &ChannelSpec,
    x: &[f64],
    trials: usize,
    stream: &RngStream,
) -> Result<MomentEstimate> {
    spec.check_on_shell(x, 1e-9)?;
    if trials < 100 {
        return domain(format!("estimate_moments needs at least 100 trials, got {trials}"));
    }
    let n = spec.n as f64;
    let samples: Vec<f64> = info_density_samples(spec, x, trials, stream)
        .into_iter()
        .map(|i| i / n)
        .collect();
    Ok(MomentEstimate::from_samples(&samples))
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// the standard normal CDF.
pub fn ks_distance_normal(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let t = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0_f64, |acc, (i, &v)| {
        let f = normal_cdf(v);
        let above = (i as f64 + 1.0) / t - f;
        let below = f - i as f64 / t;
        acc.max(above).max(below)
    })
}

/// Summary of the normalized information density against `N(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: usize,
    pub trials: usize,
    pub ks_distance: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    /// `ks_distance * sqrt(n)`: an empirical stand-in for the Berry-Esseen
    /// constant, including Monte Carlo noise. Not a certified constant.
    pub berry_esseen_estimate: f64,
}

/// Samples `(i(x;Y) - nC) / sqrt(nV)` and measures its KS distance to `N(0,1)`.
pub fn clt_diagnostic(
    spec: &ChannelSpec,
    x: &[f64],
    trials: usize,
    stream: &RngStream,
) -> Result<CltReport> {
    spec.check_on_shell(x, 1e-9)?;
    if trials == 0 {
        return domain("clt_diagnostic needs at least one trial");
    }
    let samples = normalized_statistic_samples(spec, x, trials, stream);
    let moments = MomentEstimate::from_samples(&samples);
    let ks = ks_distance_normal(&samples);
    Ok(CltReport {
        n: spec.n,
        trials,
        ks_distance: ks,
        mean: moments.mean,
        std_dev: moments.variance.sqrt(),
        min: samples.iter().copied().fold(f64::INFINITY, f64::min),
        max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        berry_esseen_estimate: ks * (spec.n as f64).sqrt(),
    })
}

fn normalized_statistic_samples(
    spec: &ChannelSpec,
    x: &[f64],
    trials: usize,
    stream: &RngStream,
) -> Vec<f64> {
    let n = spec.n as f64;
    let center = n * capacity(spec.power).expect("power validated");
    let scale = (n * dispersion(spec.power).expect("power validated")).sqrt();
    info_density_samples(spec, x, trials, stream)
        .into_iter()
        .map(|i| (i - center) / scale)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell_quant::sample_shell;

    const LOG2_E: f64 = std::f64::consts::LOG2_E;

    fn spec(n: usize, p: f64) -> ChannelSpec {
        ChannelSpec::new(n, p).unwrap()
    }

    #[test]
    fn channel_density_examples() {
        let s = spec(2, 1.0);
        let v = channel_log_density(&s, &[0.3, -1.0], &[0.3, -1.0]).unwrap();
        assert!((v + (2.0 * std::f64::consts::PI).log2()).abs() < 1e-12);
        assert!((v + 2.651_496).abs() < 1e-6);

        let s = spec(1, 1.0);
        let v = channel_log_density(&s, &[0.0], &[2f64.sqrt()]).unwrap();
        let want = -0.5 * (2.0 * std::f64::consts::PI).log2() - LOG2_E;
        assert!((v - want).abs() < 1e-12);

        let s = spec(4, 1.0);
        let v = channel_log_density(&s, &[0.0; 4], &[1.0; 4]).unwrap();
        let want = -2.0 * (2.0 * std::f64::consts::PI).log2() - 2.0 * LOG2_E;
        assert!((v - want).abs() < 1e-12);

        assert!(channel_log_density(&s, &[0.0; 3], &[1.0; 4]).is_err());
    }

    #[test]
    fn cao_density_examples() {
        let s = spec(1, 1.0);
        let v = cao_log_density(&s, &[0.0]).unwrap();
        assert!((v + 0.5 * (4.0 * std::f64::consts::PI).log2()).abs() < 1e-12);

        let s = spec(2, 3.0);
        let a = cao_log_density(&s, &[2.0, 0.0]).unwrap();
        let want = -(8.0 * std::f64::consts::PI).log2() - LOG2_E / 2.0;
        assert!((a - want).abs() < 1e-12);
        assert_eq!(a, cao_log_density(&s, &[-2.0, 0.0]).unwrap());
        assert!(cao_log_density(&s, &[1.0]).is_err());
    }

    #[test]
    fn info_density_paths_agree() {
        let s = spec(2, 1.0);
        let v = info_density(&s, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        let s = spec(7, 2.5);
        let stream = RngStream::new(11, 0);
        let mut rng = stream.rng();
        for _ in 0..100 {
            let x: Vec<f64> = (0..7).map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0).collect();
            let y: Vec<f64> = (0..7).map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0).collect();
            let a = info_density(&s, &x, &y).unwrap();
            let b = info_density_algebraic(&s, &x, &y).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} {b}");
            let sum = a + cao_log_density(&s, &y).unwrap();
            assert!((sum - channel_log_density(&s, &x, &y).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn normalized_statistic_identity() {
        // (i - nC)/sqrt(nV) == (log2 e / 2)(||Y||^2/(1+P) - ||Z||^2)/sqrt(nV)
        let s = spec(30, 1.5);
        let stream = RngStream::new(3, 9);
        let x = sample_shell(&s, &stream.fork(0));
        let mut rng = stream.rng();
        let n = 30.0;
        let c = capacity(1.5).unwrap();
        let v = dispersion(1.5).unwrap();
        for _ in 0..50 {
            let z: Vec<f64> = (0..30).map(|_| rng.sample(StandardNormal)).collect();
            let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
            let lhs = (info_density(&s, &x, &y).unwrap() - n * c) / (n * v).sqrt();
            let rhs = 0.5 * LOG2_E * (norm2(&y) / 2.5 - norm2(&z)) / (n * v).sqrt();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn moments_reject_off_shell_and_few_trials() {
        let s = spec(4, 1.0);
        let stream = RngStream::new(0, 0);
        assert!(estimate_moments(&s, &[1.0, 1.0, 1.0, 1.5], 1000, &stream).is_err());
        assert!(estimate_moments(&s, &[1.0; 4], 99, &stream).is_err());
    }

    #[test]
    fn moments_at_high_power_are_finite() {
        let s = spec(50, 10.0);
        let stream = RngStream::new(5, 1);
        let x = sample_shell(&s, &stream.fork(1));
        let m = estimate_moments(&s, &x, 20_000, &stream).unwrap();
        assert!(m.third_abs.is_finite() && m.third_abs > 0.0);
        assert!((m.std_error_mean - (m.variance / 20_000.0).sqrt()).abs() < 1e-15);
        let c = capacity(10.0).unwrap();
        assert!((m.mean - c).abs() < 4.0 * m.std_error_mean);
    }

    #[test]
    fn single_trial_ks_is_at_least_half() {
        let s = spec(10, 1.0);
        let x = vec![1.0; 10];
        for seed in 0..20 {
            let r = clt_diagnostic(&s, &x, 1, &RngStream::new(seed, 0)).unwrap();
            assert!(r.ks_distance >= 0.5);
        }
    }

    #[test]
    fn ks_distance_of_exact_quantiles_is_small() {
        let t = 999;
        let samples: Vec<f64> = (1..=t)
            .map(|i| crate::numerics::q_inverse(1.0 - i as f64 / (t as f64 + 1.0)).unwrap())
            .collect();
        let d = ks_distance_normal(&samples);
        assert!(d <= 1.0 / t as f64 + 1e-9, "{d}");
    }
}
