//! Preference reversal between `M` after `n` periods and `kM` after `n + L`.
//!
//! The late, larger payment arrives `(n + L) / n` times less often, so the
//! early option wins at short delays. As `n` grows the frequencies converge
//! and the larger amount takes over. The crossing `n*` solves
//! `(1 + a)^(1/n) = (1 + k a)^(1/(n + L))`.

use serde::Serialize;

use crate::choice::GrowthRate;
use crate::qmath::PeriodCount;
use crate::series::CurveSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversalScenario {
    rate: GrowthRate,
    horizon: u32,
    multiple: f64,
    lag: f64,
}

impl ReversalScenario {
    /// `M` against `2M` one period later, tabulated for `n = 1..=horizon`.
    pub fn new(rate: GrowthRate, horizon: u32) -> Result<Self> {
        Self::generalized(rate, horizon, 2.0, 1.0)
    }

    /// `M` against `multiple * M` arriving `lag` periods later.
    pub fn generalized(rate: GrowthRate, horizon: u32, multiple: f64, lag: f64) -> Result<Self> {
        if rate.value() <= 0.0 {
            return Err(Error::invalid("rate", "must be > 0"));
        }
        if horizon < 2 {
            return Err(Error::invalid("horizon", format!("must be >= 2, got {horizon}")));
        }
        if !multiple.is_finite() || multiple <= 1.0 {
            return Err(Error::invalid("multiple", format!("must be finite and > 1, got {multiple}")));
        }
        if !lag.is_finite() || lag <= 0.0 {
            return Err(Error::invalid("lag", format!("must be finite and > 0, got {lag}")));
        }
        Ok(ReversalScenario {
            rate,
            horizon,
            multiple,
            lag,
        })
    }

    pub fn rate(&self) -> GrowthRate {
        self.rate
    }
    pub fn horizon(&self) -> u32 {
        self.horizon
    }
    pub fn multiple(&self) -> f64 {
        self.multiple
    }
    pub fn lag(&self) -> f64 {
        self.lag
    }

    /// Time average of the early option after `n` periods, `(1 + a)^(1/n)`.
    pub fn early_value(&self, n: f64) -> f64 {
        (self.rate.value().ln_1p() / n).exp()
    }

    /// Time average of the late option, `(1 + k a)^(1/(n + L))`.
    pub fn late_value(&self, n: f64) -> f64 {
        ((self.multiple * self.rate.value()).ln_1p() / (n + self.lag)).exp()
    }

    /// Real-valued crossing `n*`.
    pub fn crossing(&self) -> PeriodCount {
        let a = self.rate.value();
        let early = a.ln_1p();
        let n = self.lag * early / ((self.multiple * a).ln_1p() - early);
        PeriodCount::new(n).expect("crossing of a valid scenario is positive")
    }
}

/// Both time-average curves at integer `n = 1..=horizon`: the early option
/// first, then the late one.
pub fn reversal_curves(scenario: &ReversalScenario) -> (CurveSeries, CurveSeries) {
    let mut early = CurveSeries::new("early");
    let mut late = CurveSeries::new("late");
    for n in 1..=scenario.horizon {
        let n = f64::from(n);
        early
            .push(n, scenario.early_value(n))
            .expect("time averages are finite");
        late.push(n, scenario.late_value(n)).expect("time averages are finite");
    }
    (early, late)
}

/// `n* = ln(1 + a) / (ln(1 + 2a) - ln(1 + a))` for the `M` vs `2M` family.
pub fn crossing_point(a: f64) -> Result<PeriodCount> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain {
            what: "crossing point requires a > 0",
            value: a,
        });
    }
    let early = a.ln_1p();
    PeriodCount::new(early / ((2.0 * a).ln_1p() - early))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(a: f64) -> ReversalScenario {
        ReversalScenario::new(GrowthRate::new(a).unwrap(), 10).unwrap()
    }

    /// Root of `(1+2a)^(1/(n+1)) - (1+a)^(1/n)` by bisection, written from
    /// the powers directly.
    fn bisect_crossing(a: f64) -> f64 {
        let diff = |n: f64| (1.0 + 2.0 * a).powf(1.0 / (n + 1.0)) - (1.0 + a).powf(1.0 / n);
        let (mut lo, mut hi) = (1e-6, 1e6);
        assert!(diff(lo) < 0.0 && diff(hi) > 0.0);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if diff(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn curve_values_at_small_rate() {
        let (a, b) = reversal_curves(&scenario(0.2));
        assert!((a.value_at(1.0).unwrap() - 1.2).abs() < 1e-15);
        assert!((b.value_at(1.0).unwrap() - 1.4f64.sqrt()).abs() < 1e-15);
        assert!((a.value_at(2.0).unwrap() - 1.095_445_115_010_332).abs() < 1e-14);
        assert!((b.value_at(2.0).unwrap() - 1.118_688_942_081_396_8).abs() < 1e-14);
        assert!(a.value_at(1.0) > b.value_at(1.0));
        assert!(a.value_at(2.0) < b.value_at(2.0));
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn vanishing_rate_flattens_both_curves() {
        let (a, b) = reversal_curves(&scenario(1e-12));
        for v in a.values().chain(b.values()) {
            assert!((v - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn crossing_matches_bisection_oracle() {
        // frozen from bisect_crossing
        let frozen = [
            (0.2, 1.182_748_963_535_319),
            (0.8, 1.598_441_814_831_751),
            (1.2, 1.811_221_294_089_707),
            (2.0, 2.150_660_103_087_123),
        ];
        for (a, expected) in frozen {
            let n = crossing_point(a).unwrap().value();
            assert!((n - expected).abs() < 1e-12, "a={a}: {n}");
            assert!((n - bisect_crossing(a)).abs() < 1e-9);
        }
    }

    #[test]
    fn crossing_rejects_non_positive_rate() {
        assert!(crossing_point(0.0).is_err());
        assert!(crossing_point(-0.1).is_err());
        assert!(ReversalScenario::new(GrowthRate::ZERO, 10).is_err());
        assert!(ReversalScenario::new(GrowthRate::new(0.2).unwrap(), 1).is_err());
    }

    #[test]
    fn closed_form_tracks_bisection_on_dense_grid() {
        for i in 1..=1000 {
            let a = 4.0 * f64::from(i) / 1000.0;
            let closed = crossing_point(a).unwrap().value();
            assert!((closed - bisect_crossing(a)).abs() <= 1e-9, "a={a}");
        }
    }

    #[test]
    fn bracket_and_long_run_sign() {
        for i in 1..=1000 {
            let a = 4.0 * f64::from(i) / 1000.0;
            let s = scenario(a);
            assert!(s.early_value(1.0) > s.late_value(1.0), "a={a}");
            let after = crossing_point(a).unwrap().value().ceil() + 1.0;
            assert!(s.late_value(after) > s.early_value(after), "a={a}");
            for n in [100.0, 250.0, 1000.0] {
                assert!(s.late_value(n) > s.early_value(n));
            }
        }
    }

    #[test]
    fn generalized_pair_crossing() {
        let s = ReversalScenario::generalized(GrowthRate::new(0.5).unwrap(), 10, 3.0, 2.0).unwrap();
        let n = s.crossing().value();
        assert!((s.early_value(n) - s.late_value(n)).abs() < 1e-12);
        assert!((n - 2.0 * 1.5f64.ln() / (2.5f64.ln() - 1.5f64.ln())).abs() < 1e-12);
        // default family agrees with the free function
        let d = scenario(0.8);
        assert_eq!(d.crossing(), crossing_point(0.8).unwrap());
    }
}
