//! Achievability, normal approximation and converse side by side.

use awgn_id::bounds::{converse_bound, sandwich_report};
use awgn_id::channel::ChannelSpec;

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3}"))
}

fn main() -> awgn_id::Result<()> {
    let ns = [100, 200, 500, 1000, 5000];
    println!("{:>6} {:>12} {:>12} {:>12}", "n", "achievable", "approx", "converse");
    for row in sandwich_report(&ns, 1.0, 0.1, 1.0) {
        println!("{:>6} {:>12} {:>12} {:>12}", row.n, fmt(row.achievability), fmt(row.approximation), fmt(row.converse));
    }

    let chain = converse_bound(&ChannelSpec::new(1000, 1.0)?, 0.1, 0.05)?;
    println!("\nn = 1000, eps = 0.1, delta = 0.05: slack {:.3e}, xi {:.4}, bound {:.3}", chain.quantization_slack, chain.xi, chain.value);
    Ok(())
}
