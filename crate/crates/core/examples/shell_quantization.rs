//! Sector quantization of the power shell: counts, growth, and the
//! KL/Pinsker control on the induced output law.

use std::f64::consts::PI;

use awgn_id::channel::ChannelSpec;
use awgn_id::numerics::RngStream;
use awgn_id::shell_quant::{
    quantization_tv_report, sample_sphere, sector_count, sector_growth_ratio, QuantizerSpec,
};

fn main() -> awgn_id::Result<()> {
    let spec = ChannelSpec::new(3, 1.0)?;
    let stream = RngStream::new(3, 0);
    let mut rng = stream.fork(0).rng();
    let points: Vec<(Vec<f64>, f64)> = (0..2000).map(|_| (sample_sphere(3, spec.shell_radius(), &mut rng), 1.0)).collect();

    for k in [4, 8, 16, 32, 64] {
        let qs = QuantizerSpec::for_channel(&spec, PI / k as f64)?;
        let m = sector_count(&qs)?;
        let r = quantization_tv_report(&points, &qs, &spec, 10_000, &stream.fork(k))?;
        println!(
            "theta = pi/{k:<3} sectors = {:<6} occupied = {:<3} TV = {:.4} +- {:.4}  Pinsker <= {:.4}",
            m.to_linear()?, r.occupied_sectors, r.empirical.tv, r.empirical.std_error, r.pinsker_bound
        );
    }

    // theta = e^{-n}: log2 log2 m / log2 n tends to 2
    for n in [10, 100, 1000, 10_000] {
        println!("growth ratio at n = {n:>5}: {:.4}", sector_growth_ratio(n)?);
    }
    Ok(())
}
