//! Second-order identification and transmission rates over a small grid.
//!
//! ```text
//! cargo run --example second_order_bounds
//! ```

use awgn_id::bounds::{capacity, dispersion, id_second_order, transmission_second_order};
use awgn_id::channel::ChannelSpec;

fn main() -> awgn_id::Result<()> {
    let power = 1.0;
    println!("C = {:.6} bits, V = {:.6} bits^2", capacity(power)?, dispersion(power)?);
    println!("{:>6} {:>6} {:>14} {:>14}", "n", "eps", "loglog N", "log M");
    for n in [100, 500, 2000] {
        let spec = ChannelSpec::new(n, power)?;
        for eps in [0.001, 0.01, 0.1] {
            let id = id_second_order(&spec, eps)?;
            let tx = transmission_second_order(&spec, eps)?;
            println!("{n:>6} {eps:>6} {:>14.4} {:>14.4}", id.value, tx.value);
        }
    }
    Ok(())
}
