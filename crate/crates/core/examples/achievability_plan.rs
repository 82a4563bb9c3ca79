//! Walks the existence-lemma parameter choices for a few blocklengths and
//! prints which side conditions hold.

use awgn_id::bounds::plan_achievability;
use awgn_id::channel::ChannelSpec;

fn main() -> awgn_id::Result<()> {
    for n in [20, 100, 400, 2000] {
        let spec = ChannelSpec::new(n, 1.0)?;
        let plan = plan_achievability(&spec, 0.1, 0.5)?;
        print!("n = {n:>5}: delta <= {:.4}", plan.delta_bound);
        match plan.loglog2_n() {
            Some(ll) if plan.feasible => println!(", log2 log2 N = {ll:.3}"),
            _ => println!(", infeasible ({})", plan.violated.join(", ")),
        }
    }

    let spec = ChannelSpec::new(400, 1.0)?;
    let plan = plan_achievability(&spec, 0.1, 0.5)?;
    println!();
    for c in &plan.constraints {
        println!("  {:<34} {:>5}  {:.6} vs {:.6}", c.name, c.holds, c.lhs, c.rhs);
    }
    Ok(())
}
