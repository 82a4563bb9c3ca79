pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod id_codec;
pub mod numerics;
pub mod resolvability;
pub mod shell_quant;

pub use error::{Error, Result};
