//! Growth rates, time averages and the maximum-time-average decision rule.
//!
//! A payment hypothesis "I receive `amount`" multiplies wealth by
//! `1 + amount / w0` whenever it comes true. Repeated with stationary
//! frequency `p`, its per-period time average is `(1 + amount / w0)^p`, and
//! the rational choice between an early and a late payment is the larger of
//! the two time averages at the end of the first period.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::probability::Probability;
use crate::qmath::pow1p;
use crate::{Error, Result};

/// Default contrast band inside which early and late look the same, in dB.
pub const DEFAULT_INDIFFERENCE_DB: f64 = 0.65;

/// Personal wealth at the decision instant.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Wealth(f64);

impl Wealth {
    pub fn new(w0: f64) -> Result<Self> {
        if !w0.is_finite() || w0 <= 0.0 {
            return Err(Error::invalid("wealth", format!("must be finite and > 0, got {w0}")));
        }
        Ok(Wealth(w0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Wealth {
    type Error = Error;
    fn try_from(w0: f64) -> Result<Self> {
        Wealth::new(w0)
    }
}

impl From<Wealth> for f64 {
    fn from(w: Wealth) -> f64 {
        w.0
    }
}

/// Impact of a payment on wealth, `X = amount / w0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GrowthRate(f64);

impl GrowthRate {
    pub const ZERO: GrowthRate = GrowthRate(0.0);

    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::invalid("growth rate", format!("must be finite and >= 0, got {x}")));
        }
        Ok(GrowthRate(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for GrowthRate {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        GrowthRate::new(x)
    }
}

impl From<GrowthRate> for f64 {
    fn from(x: GrowthRate) -> f64 {
        x.0
    }
}

/// Per-period growth factor `g = (1 + X)^p`. The certainty-equivalent rate
/// of a quasi-deterministic hypothesis is `g - 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct TimeAverage(f64);

impl TimeAverage {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn certainty_equivalent_rate(self) -> f64 {
        self.0 - 1.0
    }
}

pub fn growth_rate(amount: f64, wealth: Wealth) -> Result<GrowthRate> {
    if !amount.is_finite() || amount < 0.0 {
        return Err(Error::invalid("amount", format!("must be finite and >= 0, got {amount}")));
    }
    GrowthRate::new(amount / wealth.value())
}

pub fn time_average(x: GrowthRate, p: Probability) -> TimeAverage {
    // x >= 0 keeps pow1p inside its domain
    TimeAverage(pow1p(x.value(), p.value()).expect("growth rate is non-negative"))
}

/// `ln` of the time average, `p * ln(1 + x)`.
fn ln_time_average(x: GrowthRate, p: Probability) -> f64 {
    if p.value() == 0.0 {
        0.0
    } else {
        p.value() * x.value().ln_1p()
    }
}

/// Early payment `m` against late payment `big_m`, each with its frequency
/// over the first period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoiceProblem {
    wealth: Wealth,
    m: f64,
    big_m: f64,
    p_m: Probability,
    p_big_m: Probability,
}

impl ChoiceProblem {
    pub fn new(wealth: Wealth, m: f64, big_m: f64, p_m: Probability, p_big_m: Probability) -> Result<Self> {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::invalid("early amount", format!("must be finite and >= 0, got {m}")));
        }
        if !big_m.is_finite() || big_m < m {
            return Err(Error::invalid(
                "late amount",
                format!("must be finite and >= early amount {m}, got {big_m}"),
            ));
        }
        Ok(ChoiceProblem {
            wealth,
            m,
            big_m,
            p_m,
            p_big_m,
        })
    }

    pub fn wealth(&self) -> Wealth {
        self.wealth
    }
    pub fn early_amount(&self) -> f64 {
        self.m
    }
    pub fn late_amount(&self) -> f64 {
        self.big_m
    }
    pub fn p_early(&self) -> Probability {
        self.p_m
    }
    pub fn p_late(&self) -> Probability {
        self.p_big_m
    }

    fn early_rate(&self) -> GrowthRate {
        GrowthRate(self.m / self.wealth.value())
    }

    fn late_rate(&self) -> GrowthRate {
        GrowthRate(self.big_m / self.wealth.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Early,
    Late,
    Indifferent,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Early => "Early",
            Side::Late => "Late",
            Side::Indifferent => "Indifferent",
        })
    }
}

/// Outcome of [`decide`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preference {
    pub side: Side,
    /// `|20 log10(g_late / g_early)|`.
    pub contrast_db: f64,
    /// The larger of the two time averages.
    pub d_c: TimeAverage,
    pub early: TimeAverage,
    pub late: TimeAverage,
}

/// Picks the payment with the larger first-period time average. Sides whose
/// contrast is within `indiff_threshold_db` (negative values act as 0) are
/// reported as indifferent, as are exact ties.
pub fn decide(problem: &ChoiceProblem, indiff_threshold_db: f64) -> Preference {
    let early = time_average(problem.early_rate(), problem.p_m);
    let late = time_average(problem.late_rate(), problem.p_big_m);
    let log_ratio = ln_time_average(problem.late_rate(), problem.p_big_m)
        - ln_time_average(problem.early_rate(), problem.p_m);
    let contrast_db = (20.0 / std::f64::consts::LN_10 * log_ratio).abs();
    let threshold = indiff_threshold_db.max(0.0);

    let side = if contrast_db <= threshold || log_ratio == 0.0 {
        Side::Indifferent
    } else if log_ratio > 0.0 {
        Side::Late
    } else {
        Side::Early
    };
    let d_c = if late.0 >= early.0 { late } else { early };
    Preference {
        side,
        contrast_db,
        d_c,
        early,
        late,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(v: f64) -> Wealth {
        Wealth::new(v).unwrap()
    }
    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }
    fn x(v: f64) -> GrowthRate {
        GrowthRate::new(v).unwrap()
    }
    fn problem(w0: f64, m: f64, big_m: f64, pm: f64, pbig: f64) -> ChoiceProblem {
        ChoiceProblem::new(w(w0), m, big_m, p(pm), p(pbig)).unwrap()
    }

    #[test]
    fn growth_rate_examples() {
        assert_eq!(growth_rate(5000.0, w(100_000.0)).unwrap().value(), 0.05);
        assert_eq!(growth_rate(0.0, w(1.0)).unwrap().value(), 0.0);
        assert_eq!(growth_rate(200_000.0, w(100_000.0)).unwrap().value(), 2.0);
        assert!(Wealth::new(0.0).is_err());
        assert!(Wealth::new(-5.0).is_err());
        assert!(growth_rate(-1.0, w(1.0)).is_err());
    }

    #[test]
    fn time_average_examples() {
        let g = time_average(x(1.0), p(0.5)).value();
        assert!((g - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((time_average(x(0.3), p(1.0)).value() - 1.3).abs() < 1e-15);
        // 1.5^0.1
        assert!((time_average(x(0.5), p(0.1)).value() - 1.041_379_743_992_41).abs() < 1e-12);
        assert!((time_average(x(0.5), p(0.1)).certainty_equivalent_rate() - 0.041_379_743_992_41).abs() < 1e-12);
    }

    #[test]
    fn same_day_prefers_larger() {
        let pref = decide(&problem(1.0, 1.0, 2.0, 1.0, 1.0), DEFAULT_INDIFFERENCE_DB);
        assert_eq!(pref.side, Side::Late);
        assert_eq!(pref.d_c.value(), 3.0);
    }

    #[test]
    fn doubled_wait_prefers_early() {
        // 2 > 3^0.5
        let pref = decide(&problem(1.0, 1.0, 2.0, 1.0, 0.5), DEFAULT_INDIFFERENCE_DB);
        assert_eq!(pref.side, Side::Early);
        assert_eq!(pref.d_c, pref.early);
        assert_eq!(pref.early.value(), 2.0);
    }

    #[test]
    fn null_payments_are_indifferent() {
        let pref = decide(&problem(100_000.0, 0.0, 0.0, 0.3, 0.9), DEFAULT_INDIFFERENCE_DB);
        assert_eq!(pref.side, Side::Indifferent);
        assert_eq!(pref.contrast_db, 0.0);
        let pref = decide(&problem(100_000.0, 0.0, 0.0, 0.3, 0.9), 0.0);
        assert_eq!(pref.side, Side::Indifferent);
    }

    #[test]
    fn small_contrast_falls_inside_band() {
        // x_m = 0.05, M = 10 m at frequency 1/10: contrast well under 0.65 dB
        let pref = decide(&problem(100_000.0, 5000.0, 50_000.0, 1.0, 0.1), DEFAULT_INDIFFERENCE_DB);
        assert_eq!(pref.side, Side::Indifferent);
        assert!(pref.contrast_db > 0.0);
        let strict = decide(&problem(100_000.0, 5000.0, 50_000.0, 1.0, 0.1), 0.0);
        assert_eq!(strict.side, Side::Early);
    }

    #[test]
    fn rejects_inverted_amounts() {
        assert!(ChoiceProblem::new(w(1.0), 2.0, 1.0, p(1.0), p(1.0)).is_err());
        assert!(ChoiceProblem::new(w(1.0), -1.0, 1.0, p(1.0), p(1.0)).is_err());
    }

    proptest! {
        #[test]
        fn equal_probability_prefers_larger_amount(pv in 1e-3f64..=1.0, m1 in 0.0f64..10.0, dm in 1e-6f64..10.0, w0 in 0.1f64..100.0) {
            let pref = decide(&problem(w0, m1, m1 + dm, pv, pv), 0.0);
            prop_assert_eq!(pref.side, Side::Late);
        }

        #[test]
        fn d_c_is_the_max(w0 in 0.1f64..100.0, m in 0.0f64..10.0, dm in 0.0f64..10.0, pm in 0.0f64..=1.0, pbig in 0.0f64..=1.0) {
            let pref = decide(&problem(w0, m, m + dm, pm, pbig), DEFAULT_INDIFFERENCE_DB);
            prop_assert_eq!(pref.d_c.value(), pref.early.value().max(pref.late.value()));
        }

        #[test]
        fn more_late_probability_never_flips_to_early(w0 in 0.1f64..100.0, m in 0.0f64..10.0, dm in 0.0f64..10.0, pm in 0.0f64..=1.0, pbig in 0.0f64..=1.0, bump in 0.0f64..=1.0, thr in 0.0f64..2.0) {
            let pbig2 = (pbig + bump).min(1.0);
            let before = decide(&problem(w0, m, m + dm, pm, pbig), thr);
            let after = decide(&problem(w0, m, m + dm, pm, pbig2), thr);
            if before.side == Side::Late {
                prop_assert_eq!(after.side, Side::Late);
            }
            let after_m = decide(&problem(w0, m, m + dm + bump, pm, pbig), thr);
            if before.side == Side::Late {
                prop_assert_eq!(after_m.side, Side::Late);
            }
        }

        #[test]
        fn wealth_scaling_keeps_ordering(w0 in 0.1f64..100.0, m in 0.0f64..10.0, dm in 1e-3f64..10.0, pv in 1e-3f64..=1.0, c in 0.01f64..100.0) {
            let a = decide(&problem(w0, m, m + dm, pv, pv), 0.0);
            let b = decide(&problem(c * w0, c * m, c * (m + dm), pv, pv), 0.0);
            prop_assert_eq!(a.side, b.side);
        }
    }
}
