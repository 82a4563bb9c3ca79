//! Codebook-induced output mixtures, the exact output law of a uniform
//! shell input, total variation estimation and the Frey resolvability bound.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, cao_log_density, norm2, ChannelSpec};
use crate::error::{check_dim, domain, Error, Result};
use crate::numerics::{bessel_i_log, ln_gamma, par_blocks, q, q_inverse, RngStream, StreamRng, LOG2_E};
use crate::shell_quant::{sample_sphere, GENERATE_TOL};

const LOG2_2PI: f64 = 2.651_496_129_472_319;

/// `log2 sum_i w_i N(y; c_i, I)` over contiguous centers, streaming so
/// no per-call buffer is needed.
fn log2_gaussian_mixture(n: usize, centers: &[f64], log2_weights: Option<&[f64]>, y: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (i, c) in centers.chunks_exact(n).enumerate() {
        let mut d2 = 0.0;
        for (a, b) in c.iter().zip(y) {
            let t = a - b;
            d2 += t * t;
        }
        let v = -0.5 * LOG2_E * d2 + log2_weights.map_or(0.0, |w| w[i]);
        if v > max {
            sum = sum * (max - v).exp2() + 1.0;
            max = v;
        } else {
            sum += (v - max).exp2();
        }
    }
    if !max.is_finite() {
        return max;
    }
    max + sum.log2() - 0.5 * n as f64 * LOG2_2PI
}

/// Output law of a finite weighted input distribution through the channel.
#[derive(Clone, Debug)]
pub struct OutputMixture {
    n: usize,
    centers: Vec<f64>,
    log2_weights: Vec<f64>,
    picker: WeightedIndex<f64>,
}

impl OutputMixture {
    /// `centers` holds the input points back to back.
    pub fn weighted(n: usize, centers: Vec<f64>, weights: &[f64]) -> Result<Self> {
        if n == 0 || centers.is_empty() || centers.len() % n != 0 {
            return domain("mixture centers must be a non-empty multiple of n");
        }
        check_dim(centers.len() / n, weights.len())?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return domain("mixture weights must be non-negative with positive sum");
        }
        let picker = WeightedIndex::new(weights).map_err(|e| Error::Domain(e.to_string()))?;
        let log2_weights = weights.iter().map(|w| (w / total).log2()).collect();
        Ok(OutputMixture { n, centers, log2_weights, picker })
    }

    pub fn uniform(n: usize, centers: Vec<f64>) -> Result<Self> {
        let k = if n == 0 { 0 } else { centers.len() / n };
        Self::weighted(n, centers, &vec![1.0; k])
    }

    pub fn log_density(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.n, y.len())?;
        Ok(log2_gaussian_mixture(self.n, &self.centers, Some(&self.log2_weights), y))
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        let i = self.picker.sample(rng);
        let mut y = self.centers[i * self.n..(i + 1) * self.n].to_vec();
        add_noise(&mut y, rng);
        y
    }
}

/// `M` shell codewords stored back to back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvabilityCodebook {
    spec: ChannelSpec,
    codewords: Vec<f64>,
}

impl ResolvabilityCodebook {
    pub fn new(spec: ChannelSpec, codewords: &[Vec<f64>]) -> Result<Self> {
        if codewords.is_empty() {
            return domain("a codebook needs at least one codeword");
        }
        let mut flat = Vec::with_capacity(codewords.len() * spec.n());
        for c in codewords {
            spec.check_on_shell(c, GENERATE_TOL)?;
            flat.extend_from_slice(c);
        }
        Ok(ResolvabilityCodebook { spec, codewords: flat })
    }

    /// `m` codewords drawn i.i.d. uniform on the shell. A larger `m` on the
    /// same stream extends the smaller codebook.
    pub fn random(spec: ChannelSpec, m: usize, stream: &RngStream) -> Result<Self> {
        if m == 0 {
            return domain("a codebook needs at least one codeword");
        }
        let mut rng = stream.rng();
        let n = spec.n();
        let mut flat = Vec::with_capacity(m * n);
        for _ in 0..m {
            flat.extend(sample_sphere(n, spec.shell_radius(), &mut rng));
        }
        Ok(ResolvabilityCodebook { spec, codewords: flat })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.codewords.len() / self.spec.n()
    }

    pub fn codeword(&self, i: usize) -> &[f64] {
        let n = self.spec.n();
        &self.codewords[i * n..(i + 1) * n]
    }
}

/// `log2 (1/M) sum_i W(y | c_i)`.
pub fn induced_output_log_density(cb: &ResolvabilityCodebook, y: &[f64]) -> Result<f64> {
    let n = cb.spec.n();
    check_dim(n, y.len())?;
    Ok(log2_gaussian_mixture(n, &cb.codewords, None, y) - (cb.size() as f64).log2())
}

/// Exact log2 density of `Y = X + Z` with `X` uniform on the power shell.
///
/// With `a = sqrt(nP)`, `r = ||y||`, `s = a r` and `nu = n/2 - 1`:
/// `ln p = -(n/2) ln 2pi - (r^2 + a^2)/2 + ln Gamma(n/2) + (1 - n/2) ln(s/2) + ln I_nu(s)`.
/// For `n = 1` the shell is the two points `+-a`.
pub fn shell_output_log_density(spec: &ChannelSpec, y: &[f64]) -> Result<f64> {
    let n = spec.n();
    check_dim(n, y.len())?;
    let a = spec.shell_radius();
    let r2 = norm2(y);
    let nf = n as f64;
    let gauss = -0.5 * nf * (2.0 * PI).ln() - 0.5 * (r2 + a * a);
    if n == 1 {
        let s = a * y[0];
        // ln cosh s
        let ln_cosh = s.abs() + (-2.0 * s.abs()).exp().ln_1p() - LN_2;
        return Ok((gauss + ln_cosh) * LOG2_E);
    }
    let s = a * r2.sqrt();
    if s == 0.0 {
        return Ok(gauss * LOG2_E);
    }
    let nu = 0.5 * nf - 1.0;
    let angular = ln_gamma(0.5 * nf) - nu * (0.5 * s).ln() + bessel_i_log(nu, s);
    Ok((gauss + angular) * LOG2_E)
}

/// Monte Carlo estimate of the L1 distance `int |p - q|`, range `[0, 2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub tv: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
}

/// Estimates `int |p - q| = 2 E_p[(1 - q/p)^+]` from draws of `p`.
///
/// The clipped form is bounded by 2 per draw, so disjoint laws saturate at
/// exactly 2 and the standard error stays finite even when `q/p` is heavy-tailed.
pub fn tv_estimate<P, Q, S>(log_p: P, log_q: Q, sample_p: S, trials: usize, stream: &RngStream) -> Result<TvEstimate>
where
    P: Fn(&[f64]) -> Result<f64> + Sync,
    Q: Fn(&[f64]) -> Result<f64> + Sync,
    S: Fn(&mut StreamRng) -> Vec<f64> + Sync,
{
    if trials < 100 {
        return domain(format!("tv_estimate needs at least 100 trials, got {trials}"));
    }
    let blocks = par_blocks(trials, stream, |rng, len| -> Result<(f64, f64)> {
        let (mut s1, mut s2) = (0.0, 0.0);
        for k in 0..len {
            let y = sample_p(rng);
            let context = |e: Error| Error::Domain(format!("density evaluation failed at draw {k} (y = {y:?}): {e}"));
            let lp = log_p(&y).map_err(context)?;
            let lq = log_q(&y).map_err(context)?;
            if lp.is_nan() || lq.is_nan() || lp == f64::NEG_INFINITY {
                return Err(context(Error::Degenerate(format!("log densities p = {lp}, q = {lq}"))));
            }
            let v = 2.0 * (1.0 - (lq - lp).exp2()).max(0.0);
            s1 += v;
            s2 += v * v;
        }
        Ok((s1, s2))
    });
    let (mut s1, mut s2) = (0.0, 0.0);
    for b in blocks {
        let (a, c) = b?;
        s1 += a;
        s2 += c;
    }
    let t = trials as f64;
    let tv = s1 / t;
    let var = ((s2 - t * tv * tv) / (t - 1.0)).max(0.0);
    let std_error = (var / t).sqrt();
    Ok(TvEstimate {
        tv,
        std_error,
        ci_low: (tv - 1.96 * std_error).max(0.0),
        ci_high: (tv + 1.96 * std_error).min(2.0),
        trials,
    })
}

/// True iff every mass is an integer multiple of `1/m` (within 1e-12).
pub fn mtype_check(masses: &[f64], m: u64) -> Result<bool> {
    if m == 0 {
        return domain("M-type check needs M >= 1");
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > 1e-12 || masses.iter().any(|p| !(*p >= 0.0)) {
        return domain(format!("masses must be a probability vector, sum = {total}"));
    }
    let mf = m as f64;
    Ok(masses.iter().all(|&p| ((p * mf).round() / mf - p).abs() <= 1e-12))
}

/// Moments of the information density and the free constants of the
/// Frey bound. Logarithms of `n` are base 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreyParams {
    pub mutual_info: f64,
    pub central_second: f64,
    pub third_abs: f64,
    pub xi: f64,
    pub c: f64,
    pub d: f64,
    pub n: u64,
}

impl FreyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 1.0) {
            return domain(format!("need c > 1, got {}", self.c));
        }
        if !(self.d > 0.0 && self.d < self.c - 1.0) {
            return domain(format!("need 0 < d < c - 1, got d = {}", self.d));
        }
        if self.n == 0 || (self.n as f64).powf(0.5 * (self.c - self.d)) < 6.0 {
            return domain(format!("condition n^{{(c-d)/2}} >= 6 fails at n = {}", self.n));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return domain(format!("need xi in (0,1), got {}", self.xi));
        }
        if !(self.central_second > 0.0 && self.third_abs >= 0.0 && self.mutual_info.is_finite()) {
            return domain("need V > 0, rho >= 0 and finite I");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreyBound {
    /// Rate `R` in bits per symbol.
    pub rate: f64,
    pub mu: f64,
    pub prob_bound: f64,
    /// Natural logs of the two summands.
    pub ln_first: f64,
    pub ln_second: f64,
}

const FREY_CONST: f64 = 7.0 / 6.0;

/// `exp(-(n mu / 3) 2^{nR}) + (7/6 + sqrt(3 pi / 2) e^{3/4}) exp(-n^{(c-d-1)/2})`,
/// returned with the natural logs of both summands.
pub fn frey_prob_bound(n: u64, rate: f64, mu: f64, c: f64, d: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let ln_first = if mu <= 0.0 {
        0.0
    } else {
        -((nf * mu / 3.0).ln() + nf * rate * LN_2).exp()
    };
    let ln_second = (FREY_CONST + (1.5 * PI).sqrt() * 0.75f64.exp()).ln() - nf.powf(0.5 * (c - d - 1.0));
    let hi = ln_first.max(ln_second);
    let total = hi + ((ln_first - hi).exp() + (ln_second - hi).exp()).ln();
    (total.exp(), ln_first, ln_second)
}

pub fn frey_bound(fp: &FreyParams) -> Result<FreyBound> {
    fp.validate()?;
    let nf = fp.n as f64;
    let v = fp.central_second;
    let log_n = nf.log2();
    let zi = q_inverse(fp.xi)?;
    let rate = fp.mutual_info + (v / nf).sqrt() * zi + fp.c * log_n / nf;
    let mu = q(zi + fp.d * log_n / (nf * v).sqrt()) + fp.third_abs / (v.powf(1.5) * nf.sqrt());
    let (prob_bound, ln_first, ln_second) = frey_prob_bound(fp.n, rate, mu, fp.c, fp.d);
    Ok(FreyBound { rate, mu, prob_bound, ln_first, ln_second })
}

/// Which output law the codebook mixture is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolvabilityTarget {
    /// Output of a uniform shell input.
    #[default]
    Shell,
    /// The capacity-achieving Gaussian output `N(0, (1+P) I)`.
    Cao,
}

/// One row of a resolvability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvabilityPoint {
    pub rate_bits: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const MAX_EXPERIMENT_N: usize = 12;
pub const MAX_EXPERIMENT_LOG2_M: i64 = 16;

/// Codebook size `2^{ceil(nR)}`, at least 1.
pub fn codebook_size(n: usize, rate: f64) -> Result<u64> {
    let e = (n as f64 * rate).ceil();
    if !e.is_finite() {
        return domain(format!("rate must be finite, got {rate}"));
    }
    if e > MAX_EXPERIMENT_LOG2_M as f64 {
        return Err(Error::BudgetExceeded {
            what: format!("codebook size at rate {rate}"),
            required: if e < 127.0 { 1u128 << e as u32 } else { u128::MAX },
            budget: 1u128 << MAX_EXPERIMENT_LOG2_M,
        });
    }
    Ok(1u64 << e.max(0.0) as u32)
}

/// TV between the target output law and the mixture of `2^{ceil(nR)}` random
/// shell codewords, one row per rate in input order.
///
/// All rates share the codeword stream (smaller codebooks are prefixes of
/// larger ones) and the target draws, so the curve uses common random numbers.
pub fn resolvability_experiment(
    spec: &ChannelSpec,
    rates: &[f64],
    trials: usize,
    stream: &RngStream,
    target: ResolvabilityTarget,
) -> Result<Vec<ResolvabilityPoint>> {
    let n = spec.n();
    if n > MAX_EXPERIMENT_N {
        return Err(Error::BudgetExceeded {
            what: "blocklength".into(),
            required: n as u128,
            budget: MAX_EXPERIMENT_N as u128,
        });
    }
    let sizes = rates.iter().map(|&r| codebook_size(n, r)).collect::<Result<Vec<_>>>()?;
    let radius = spec.shell_radius();
    let sd = (1.0 + spec.power()).sqrt();
    let mut rows = Vec::with_capacity(rates.len());
    for (&rate, &m) in rates.iter().zip(&sizes) {
        let cb = ResolvabilityCodebook::random(*spec, m as usize, &stream.fork(0))?;
        let mix = |y: &[f64]| induced_output_log_density(&cb, y);
        let est = match target {
            ResolvabilityTarget::Shell => tv_estimate(
                |y| shell_output_log_density(spec, y),
                mix,
                |rng| {
                    let mut y = sample_sphere(n, radius, rng);
                    add_noise(&mut y, rng);
                    y
                },
                trials,
                &stream.fork(1),
            )?,
            ResolvabilityTarget::Cao => tv_estimate(
                |y| cao_log_density(spec, y),
                mix,
                |rng| (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect(),
                trials,
                &stream.fork(1),
            )?,
        };
        rows.push(ResolvabilityPoint {
            rate_bits: rate,
            m,
            tv: est.tv,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            trials,
            seed: stream.seed,
        });
    }
    Ok(rows)
}

/// Writes a curve as CSV with a header row.
pub fn write_curve_csv<W: Write>(rows: &[ResolvabilityPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
