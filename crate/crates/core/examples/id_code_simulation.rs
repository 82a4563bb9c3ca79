//! Builds a random identification code and measures both error kinds.

use awgn_id::bounds::id_second_order;
use awgn_id::channel::ChannelSpec;
use awgn_id::id_codec::{build_id_code, code_error_profile, Construction, IdCodeDesign};
use awgn_id::numerics::RngStream;

fn main() -> awgn_id::Result<()> {
    let spec = ChannelSpec::new(50, 1.0)?;
    let design = IdCodeDesign {
        messages: 8,
        codewords: 64,
        subset_size: 0,
        log2_k: id_second_order(&spec, 0.1)?.value,
        construction: Construction::IndependentPools,
    };
    let stream = RngStream::new(2024, 0);
    let code = build_id_code(&spec, &design, &stream.fork(0))?;
    println!("{} messages, {} codewords each, log2 K = {:.3}", code.messages(), code.per_message_codewords(), code.log2_k());

    let profile = code_error_profile(&code, 5_000, &stream.fork(1), 0.2, 0.05, 1 << 32)?;
    let (t1, t2) = (&profile.max_type1, &profile.max_type2);
    println!("max type-I  {:.4}  [{:.4}, {:.4}] at message {}", t1.value, t1.ci_low, t1.ci_high, profile.argmax_type1);
    println!("max type-II {:.4}  [{:.4}, {:.4}] at pair {:?}", t2.value, t2.ci_low, t2.ci_high, profile.argmax_type2);
    println!("certified at (0.2, 0.05): {}", profile.certified);
    Ok(())
}
