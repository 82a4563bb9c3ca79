//! Special functions, log-domain arithmetic and seeded randomness.

mod bessel;
mod beta;
mod layered;
mod normal;
mod rng;

pub use bessel::{bessel_i_log, ln_gamma};
pub use beta::{beta_inc_reg, clopper_pearson};
pub use layered::{Layer, LogLayered};
pub use normal::{log_q_function, normal_cdf, normal_pdf, q_function, q_inverse};
pub(crate) use normal::q;
pub use rng::{RngStream, StreamRng};

use rayon::prelude::*;

use crate::error::{domain, Result};

/// Trials per Monte Carlo block. Each block draws from its own forked
/// stream, so results do not depend on the number of worker threads.
pub const MC_BLOCK: usize = 4096;

/// Runs `trials` Monte Carlo trials in fixed-size blocks and returns the
/// per-block results in block order.
pub(crate) fn par_blocks<T, F>(trials: usize, stream: &RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    let blocks = trials.div_ceil(MC_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = MC_BLOCK.min(trials - b * MC_BLOCK);
            let mut rng = stream.fork(b as u64).rng();
            f(&mut rng, len)
        })
        .collect()
}

/// `log2(e)`.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats * LOG2_E
}

/// Bits to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}

/// `log2 sum 2^{v_i}`, overflow-safe.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return domain("log_sum_exp of an empty list");
    }
    Ok(log2_sum_exp2(values))
}

/// Infallible core of [`log_sum_exp`]; `values` must be non-empty.
pub(crate) fn log2_sum_exp2(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp2()).sum();
    max + sum.log2()
}
