//! Time-average theory of intertemporal choice.
//!
//! Payments are valued by the per-period growth they impose on personal
//! wealth, `(1 + amount / wealth)^p`, where `p` is the payment's frequency
//! over the first period. From that single quantity the crate derives:
//!
//! * the maximum-time-average decision criterion ([`choice`]),
//! * preference reversal between `M` now and `2M` one period later ([`reversal`]),
//! * q-exponential discount factors and rate extraction ([`discounting`]),
//! * the decibel contrast between early and late time averages ([`contrast`]),
//! * least-squares calibration of `(q, rho, p_m)` ([`calibrate`]),
//! * discounter simulations and wealth-dispersion studies ([`experiments`]).
//!
//! Numerical kernels live in [`qmath`].

pub mod calibrate;
pub mod choice;
pub mod contrast;
pub mod discounting;
mod error;
pub mod experiments;
pub mod probability;
pub mod qmath;
pub mod reversal;
pub mod series;

pub use error::{Error, Result};
pub use qmath::{PeriodCount, QIndex, Rate};
pub use series::CurveSeries;
