//! Cumulative payment-probability laws and the early/late frequency rule.
//!
//! A payment probability is cumulative over time: the chance that the
//! payment has arrived by `t` periods after the present. With no testable
//! information the maximum-entropy choice is a uniform law over the waiting
//! window, optionally stretched by a delay factor `alpha >= 1`.

use serde::{Deserialize, Serialize};

use crate::qmath::{PeriodCount, QIndex};
use crate::{Error, Result};

/// A probability in `[0, 1]`, read as the stationary frequency with which a
/// repeated payment hypothesis comes true per period.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("probability", format!("must lie in [0, 1], got {p}")));
        }
        Ok(Probability(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Probability::new(p)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Cumulative payment law, with time measured in periods since the present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PaymentDistribution {
    /// Deterministic payment at `pay_time`.
    Degenerate { pay_time: f64 },
    /// Uniform arrival over `alpha * horizon` periods.
    UniformDelay { horizon: f64, alpha: f64 },
}

impl PaymentDistribution {
    pub fn degenerate(pay_time: f64) -> Result<Self> {
        if !pay_time.is_finite() || pay_time < 0.0 {
            return Err(Error::invalid("pay_time", format!("must be finite and >= 0, got {pay_time}")));
        }
        Ok(PaymentDistribution::Degenerate { pay_time })
    }

    pub fn uniform(horizon: f64, alpha: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::invalid("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::invalid("alpha", format!("must be finite and >= 1, got {alpha}")));
        }
        Ok(PaymentDistribution::UniformDelay { horizon, alpha })
    }

    /// `P(t)`: zero before the present, then the piecewise law.
    pub fn cumulative_prob(&self, t: f64) -> Probability {
        if t.is_nan() || t < 0.0 {
            return Probability::ZERO;
        }
        match *self {
            PaymentDistribution::Degenerate { pay_time } => {
                if t >= pay_time {
                    Probability::ONE
                } else {
                    Probability::ZERO
                }
            }
            PaymentDistribution::UniformDelay { horizon, alpha } => {
                let window = alpha * horizon;
                if t >= window {
                    Probability::ONE
                } else {
                    Probability(t / window)
                }
            }
        }
    }

    /// Probability of payment by the end of the first period, `1 / (alpha n)`
    /// for the uniform law.
    pub fn first_period_prob(&self) -> Probability {
        self.cumulative_prob(1.0)
    }
}

/// Ratio `p_M / p_m` between late and early payment frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeFrequency {
    pub ratio: f64,
    /// Set when `1 / (n (q - 1))` exceeded 1 and was capped.
    pub capped: bool,
}

/// `p_M / p_m = 1 / (n (q - 1))`, the delay-adjusted frequency of a payment
/// `n` periods away. Capped at 1 because `p_M` cannot exceed `p_m = 1`.
pub fn relative_frequency(q: QIndex, n: PeriodCount) -> Result<RelativeFrequency> {
    if q.is_exponential() {
        return Err(Error::Domain {
            what: "relative frequency is undefined at q = 1",
            value: q.value(),
        });
    }
    if n.value() < 1.0 {
        return Err(Error::Domain {
            what: "relative frequency requires n >= 1",
            value: n.value(),
        });
    }
    let denom = n.value() * q.excess();
    if denom < 1.0 {
        Ok(RelativeFrequency {
            ratio: 1.0,
            capped: true,
        })
    } else {
        Ok(RelativeFrequency {
            ratio: 1.0 / denom,
            capped: false,
        })
    }
}
