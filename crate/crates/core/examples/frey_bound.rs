use awgn_id::bounds::{capacity, dispersion};
use awgn_id::resolvability::{frey_bound, FreyParams};

fn main() -> awgn_id::Result<()> {
    let base = FreyParams {
        mutual_info: capacity(1.0)?,
        central_second: dispersion(1.0)?,
        third_abs: 2.0,
        xi: 0.2,
        c: 2.0,
        d: 0.5,
        n: 100,
    };
    println!("{:>7} {:>10} {:>10} {:>12}", "n", "rate", "mu", "bound");
    for n in [100u64, 1_000, 10_000, 100_000] {
        let b = frey_bound(&FreyParams { n, ..base })?;
        println!("{n:>7} {:>10.5} {:>10.5} {:>12.4e}", b.rate, b.mu, b.prob_bound);
    }
    Ok(())
}
