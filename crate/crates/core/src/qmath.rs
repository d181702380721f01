//! q-exponential, q-logarithm and compounded-power kernels.
//!
//! Every power of the form `(1 + x)^p` in this crate goes through
//! `exp(p * ln_1p(x))` so that growth rates as small as `1e-6` keep their
//! significant digits.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Distance from `q = 1` below which the exponential limit is used.
pub const EXPONENTIAL_SWITCH: f64 = 1e-8;

/// Tsallis index of the discount family, restricted to `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QIndex(f64);

impl QIndex {
    pub const EXPONENTIAL: QIndex = QIndex(1.0);
    pub const HYPERBOLIC: QIndex = QIndex(2.0);

    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::invalid("q", format!("must be finite, got {q}")));
        }
        if q < 1.0 {
            return Err(Error::invalid("q", format!("must be >= 1, got {q}")));
        }
        Ok(QIndex(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `q - 1`, the deformation away from the exponential.
    pub fn excess(self) -> f64 {
        self.0 - 1.0
    }

    /// Whether evaluation switches to the `q = 1` limit.
    pub fn is_exponential(self) -> bool {
        self.excess() < EXPONENTIAL_SWITCH
    }
}

impl TryFrom<f64> for QIndex {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        QIndex::new(q)
    }
}

impl From<QIndex> for f64 {
    fn from(q: QIndex) -> f64 {
        q.0
    }
}

/// Per-period discount rate `rho >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Rate(f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::invalid("rho", format!("must be finite and >= 0, got {rho}")));
        }
        Ok(Rate(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Rate {
    type Error = Error;
    fn try_from(rho: f64) -> Result<Self> {
        Rate::new(rho)
    }
}

impl From<Rate> for f64 {
    fn from(r: Rate) -> f64 {
        r.0
    }
}

/// Number of short periods, real-valued so curves can be sampled between
/// integer periods.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PeriodCount(f64);

impl PeriodCount {
    pub const ZERO: PeriodCount = PeriodCount(0.0);
    pub const ONE: PeriodCount = PeriodCount(1.0);

    pub fn new(n: f64) -> Result<Self> {
        if !n.is_finite() || n < 0.0 {
            return Err(Error::invalid("n", format!("must be finite and >= 0, got {n}")));
        }
        Ok(PeriodCount(n))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PeriodCount {
    type Error = Error;
    fn try_from(n: f64) -> Result<Self> {
        PeriodCount::new(n)
    }
}

impl From<PeriodCount> for f64 {
    fn from(n: PeriodCount) -> f64 {
        n.0
    }
}

/// `(1 + x)^p` evaluated as `exp(p * ln_1p(x))`.
pub fn pow1p(x: f64, p: f64) -> Result<f64> {
    if !(x > -1.0) {
        return Err(Error::Domain {
            what: "pow1p requires x > -1",
            value: x,
        });
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(1.0 + x);
    }
    Ok((p * x.ln_1p()).exp())
}

/// Natural log of the q-exponential, `ln e_q^x = ln(1 + (1-q) x) / (1-q)`.
///
/// Shared by every caller that immediately raises `e_q^x` to a power.
pub fn ln_q_exp(q: QIndex, x: f64) -> Result<f64> {
    if q.is_exponential() {
        return Ok(x);
    }
    let one_minus_q = -q.excess();
    let shift = one_minus_q * x;
    if !(shift > -1.0) {
        return Err(Error::Domain {
            what: "q-exponential requires 1 + (1 - q) x > 0",
            value: x,
        });
    }
    Ok(shift.ln_1p() / one_minus_q)
}

/// The q-exponential `e_q^x = [1 + (1-q) x]^(1/(1-q))`, with `exp(x)` at `q = 1`.
pub fn q_exp(q: QIndex, x: f64) -> Result<f64> {
    if q.is_exponential() {
        return Ok(x.exp());
    }
    ln_q_exp(q, x).map(f64::exp)
}

/// The q-logarithm `ln_q y = (y^(1-q) - 1) / (1-q)`, inverse of [`q_exp`].
pub fn q_log(q: QIndex, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain {
            what: "q-logarithm requires y > 0",
            value: y,
        });
    }
    q_log_of_ln(q, y.ln())
}

/// [`q_log`] taking `ln y` directly, for callers that already hold the log.
pub(crate) fn q_log_of_ln(q: QIndex, ln_y: f64) -> Result<f64> {
    if q.is_exponential() {
        return Ok(ln_y);
    }
    let one_minus_q = -q.excess();
    Ok((one_minus_q * ln_y).exp_m1() / one_minus_q)
}
