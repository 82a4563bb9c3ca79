//! Scalars carried as `x`, `log2 x` or `log2 log2 x`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest base-2 exponent that still fits a finite `f64`.
const MAX_EXP2: f64 = 1_023.999_999_999_999_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Linear,
    Log,
    LogLog,
}

/// A positive quantity that may be far too large to hold linearly.
///
/// `value` is `x`, `log2 x` or `log2 log2 x` depending on `layer`. Demotion
/// never materializes a value that would overflow; it reports the layer
/// instead.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLayered {
    pub layer: Layer,
    pub value: f64,
}

impl LogLayered {
    pub fn linear(x: f64) -> Self {
        LogLayered { layer: Layer::Linear, value: x }
    }

    /// A quantity given by its base-2 logarithm.
    pub fn from_log2(log2_x: f64) -> Self {
        LogLayered { layer: Layer::Log, value: log2_x }
    }

    /// A quantity given by `log2 log2 x`; the quantity itself exceeds 1.
    pub fn from_loglog2(loglog2_x: f64) -> Self {
        LogLayered { layer: Layer::LogLog, value: loglog2_x }
    }

    /// Moves one layer up (`x -> log2 x`).
    pub fn promote(self) -> Result<Self> {
        match self.layer {
            Layer::Linear => {
                if self.value > 0.0 {
                    Ok(Self::from_log2(self.value.log2()))
                } else {
                    domain(format!("cannot take log2 of {}", self.value))
                }
            }
            Layer::Log => {
                if self.value > 0.0 {
                    Ok(Self::from_loglog2(self.value.log2()))
                } else {
                    domain(format!(
                        "log-log layer needs a quantity above 1, log2 is {}",
                        self.value
                    ))
                }
            }
            Layer::LogLog => domain("no layer above log-log"),
        }
    }

    /// Moves one layer down (`log2 x -> x`), refusing on overflow.
    pub fn demote(self) -> Result<Self> {
        match self.layer {
            Layer::Linear => domain("no layer below linear"),
            Layer::Log | Layer::LogLog => {
                if self.value > MAX_EXP2 {
                    return Err(Error::Overflow(self.layer));
                }
                let v = self.value.exp2();
                Ok(match self.layer {
                    Layer::Log => Self::linear(v),
                    _ => Self::from_log2(v),
                })
            }
        }
    }

    /// The quantity's base-2 log, if representable.
    pub fn log2(self) -> Result<f64> {
        match self.layer {
            Layer::Linear => Ok(self.promote()?.value),
            Layer::Log => Ok(self.value),
            Layer::LogLog => Ok(self.demote()?.value),
        }
    }

    /// The quantity's `log2 log2`, if the quantity exceeds 1.
    pub fn loglog2(self) -> Result<f64> {
        match self.layer {
            Layer::LogLog => Ok(self.value),
            Layer::Log => Ok(self.promote()?.value),
            Layer::Linear => Ok(self.promote()?.promote()?.value),
        }
    }

    /// The linear value, if it fits an `f64`.
    pub fn to_linear(self) -> Result<f64> {
        match self.layer {
            Layer::Linear => Ok(self.value),
            Layer::Log => Ok(self.demote()?.value),
            Layer::LogLog => Ok(self.demote()?.demote()?.value),
        }
    }
}
