//! Total variation between a random codebook's output law and the target
//! law, as the codebook rate sweeps across capacity.

use awgn_id::bounds::capacity;
use awgn_id::channel::ChannelSpec;
use awgn_id::numerics::RngStream;
use awgn_id::resolvability::{resolvability_experiment, write_curve_csv, ResolvabilityTarget};

fn main() -> awgn_id::Result<()> {
    let spec = ChannelSpec::new(8, 1.0)?;
    let c = capacity(1.0)?;
    let rates: Vec<f64> = (-2..=4).map(|k| c + 0.25 * k as f64).collect();
    let rows = resolvability_experiment(&spec, &rates, 20_000, &RngStream::new(11, 0), ResolvabilityTarget::Shell)?;
    write_curve_csv(&rows, std::io::stdout())?;
    Ok(())
}
