//! Normalized information density against the standard normal as n grows.

use awgn_id::channel::{clt_diagnostic, ChannelSpec};
use awgn_id::numerics::RngStream;
use awgn_id::shell_quant::sample_sphere;

fn main() -> awgn_id::Result<()> {
    let stream = RngStream::new(7, 0);
    for n in [10, 50, 200, 1000] {
        let spec = ChannelSpec::new(n, 1.0)?;
        let x = sample_sphere(n, spec.shell_radius(), &mut stream.fork(n as u64).rng());
        let r = clt_diagnostic(&spec, &x, 50_000, &stream.fork(10_000 + n as u64))?;
        println!(
            "n = {n:>4}  KS = {:.4}  mean = {:+.4}  sd = {:.4}  B/sqrt(n) ~ {:.4}",
            r.ks_distance, r.mean, r.std_dev, r.berry_esseen_estimate
        );
    }
    Ok(())
}
