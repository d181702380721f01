//! Decibel contrast between the early time average `(1 + x_m)` and the
//! q-adjusted late time average `[1 + (q-1) n x_m]^(1/((q-1) n))`.
//!
//! A decision maker who cannot resolve contrasts below a few tenths of a
//! decibel treats the two payments as equivalent, which is what makes the
//! hyperbolic indifference schedule workable for small payments.

use serde::Serialize;

use crate::choice::GrowthRate;
use crate::probability::Probability;
use crate::qmath::{PeriodCount, QIndex};
use crate::{Error, Result};

/// Default search cap for [`distinguishability_horizon`].
pub const DEFAULT_HORIZON_CAP: u64 = 1_000_000;

const DB_PER_NEPER: f64 = 20.0 / std::f64::consts::LN_10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastQuery {
    pub x_m: GrowthRate,
    pub q: QIndex,
    pub p_m: Probability,
    pub n: PeriodCount,
}

impl ContrastQuery {
    pub fn new(x_m: GrowthRate, q: QIndex, p_m: Probability, n: PeriodCount) -> Result<Self> {
        if n.value() < 1.0 {
            return Err(Error::invalid("n", format!("must be >= 1, got {}", n.value())));
        }
        Ok(ContrastQuery { x_m, q, p_m, n })
    }
}

/// `CR_dB = -20 p_m log10([1 + (q-1) n x_m]^(1/((q-1) n)) / (1 + x_m))`.
///
/// Non-negative whenever `(q - 1) n >= 1`. Below that (including the
/// `q = 1` limit, where the late average is `e^(x_m)`) the late average
/// exceeds `1 + x_m` and the value is negative; its magnitude is the
/// contrast.
pub fn contrast_db(query: &ContrastQuery) -> f64 {
    signed_contrast(query.x_m.value(), query.q, query.p_m.value(), query.n.value())
}

fn signed_contrast(x_m: f64, q: QIndex, p_m: f64, n: f64) -> f64 {
    let ln_late = if q.is_exponential() {
        x_m
    } else {
        let k = q.excess() * n;
        (k * x_m).ln_1p() / k
    };
    -DB_PER_NEPER * p_m * (ln_late - x_m.ln_1p())
}

/// Result of a horizon search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "periods", rename_all = "snake_case")]
pub enum Horizon {
    /// Largest integer `n` whose contrast magnitude stays within the threshold.
    /// Zero means even `n = 1` is distinguishable.
    Periods(u64),
    /// The threshold was not exceeded up to the search cap.
    Unbounded,
}

/// Largest integer `n >= 1` with `|contrast_db| <= threshold_db`, scanning
/// up to [`DEFAULT_HORIZON_CAP`].
pub fn distinguishability_horizon(
    x_m: GrowthRate,
    q: QIndex,
    p_m: Probability,
    threshold_db: f64,
) -> Result<Horizon> {
    distinguishability_horizon_capped(x_m, q, p_m, threshold_db, DEFAULT_HORIZON_CAP)
}

pub fn distinguishability_horizon_capped(
    x_m: GrowthRate,
    q: QIndex,
    p_m: Probability,
    threshold_db: f64,
    cap: u64,
) -> Result<Horizon> {
    if !(threshold_db > 0.0) {
        return Err(Error::invalid("threshold_db", format!("must be > 0, got {threshold_db}")));
    }
    for n in 1..=cap {
        let c = signed_contrast(x_m.value(), q, p_m.value(), n as f64);
        if c.abs() > threshold_db {
            return Ok(Horizon::Periods(n - 1));
        }
    }
    Ok(Horizon::Unbounded)
}
