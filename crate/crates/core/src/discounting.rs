//! Indifference schedules, hyperbolic and q-exponential discount factors,
//! expected late amounts and per-period rate extraction.
//!
//! The model carries an amount `m0` already received at the present. With
//! first-period payment `m`, the linear indifference schedule is
//! `M(n) = m0 + (m - m0) n` and the per-period rate is
//! `rho = (m - m0) / (w0 + m0)`, so that `(w0 + m0) / (w0 + M(n)) = 1 / (1 + rho n)`.
//! Allowing disproportionate delays generalises the factor to
//! `[e_q^(-rho n)]^p_m`.

use serde::{Deserialize, Serialize};

use crate::choice::{GrowthRate, Wealth};
use crate::probability::Probability;
use crate::qmath::{self, PeriodCount, QIndex, Rate};
use crate::{Error, Result};

/// Parameters of the q-exponential discount function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountModel {
    pub q: QIndex,
    pub rho: Rate,
    pub p_m: Probability,
    pub w0: Wealth,
    pub m0: f64,
}

impl DiscountModel {
    pub fn new(q: QIndex, rho: Rate, p_m: Probability, w0: Wealth, m0: f64) -> Result<Self> {
        if p_m.value() <= 0.0 {
            return Err(Error::invalid("p_m", "must be > 0"));
        }
        if !m0.is_finite() || m0 < 0.0 {
            return Err(Error::invalid("m0", format!("must be finite and >= 0, got {m0}")));
        }
        Ok(DiscountModel { q, rho, p_m, w0, m0 })
    }

    /// Hyperbolic model (`q = 2`, `p_m = 1`) with no initial payment.
    pub fn hyperbolic(rho: Rate, w0: Wealth) -> Self {
        DiscountModel {
            q: QIndex::HYPERBOLIC,
            rho,
            p_m: Probability::ONE,
            w0,
            m0: 0.0,
        }
    }

    /// `M = m0 + (m - m0) n`.
    pub fn linear_amount(&self, m: f64, n: PeriodCount) -> Result<f64> {
        self.check_first_payment(m)?;
        Ok(self.m0 + (m - self.m0) * n.value())
    }

    /// `rho = (m - m0) / (w0 + m0)`.
    pub fn per_period_rate(&self, m: f64) -> Result<Rate> {
        self.check_first_payment(m)?;
        Rate::new((m - self.m0) / (self.w0.value() + self.m0))
    }

    /// First-period payment that yields `rate`, the inverse of
    /// [`per_period_rate`](Self::per_period_rate).
    pub fn first_payment_for_rate(&self, rate: Rate) -> f64 {
        self.m0 + rate.value() * (self.w0.value() + self.m0)
    }

    /// `1 / (1 + rho n)`.
    pub fn hyperbolic_factor(&self, n: PeriodCount) -> f64 {
        1.0 / (1.0 + self.rho.value() * n.value())
    }

    /// `[e_q^(-rho n)]^p_m`, equal to `(w0 + m0) / (w0 + M~)`.
    pub fn q_discount_factor(&self, n: PeriodCount) -> f64 {
        (-self.log_growth(self.rho.value() * n.value())).exp()
    }

    /// Expected amount `M~` after `n` periods when the first-period growth
    /// rate is `x_m`: `1 + M~/w0 = [1 + (q-1) x_m n]^(p_m/(q-1))`.
    /// `m0` is not added.
    pub fn expected_amount(&self, x_m: GrowthRate, n: PeriodCount) -> f64 {
        self.w0.value() * self.log_growth(x_m.value() * n.value()).exp_m1()
    }

    /// Expected amount `M~` after `n` periods discounted from the present at
    /// rate `rho`, solving `(w0 + m0) / (w0 + M~) = [e_q^(-rho n)]^p_m`.
    pub fn expected_amount_from_rate(&self, n: PeriodCount) -> f64 {
        let grown = self.log_growth(self.rho.value() * n.value()).exp_m1();
        self.m0 + (self.w0.value() + self.m0) * grown
    }

    /// `p_m ln[1 + (q-1) z] / (q-1)`, or `p_m z` in the exponential limit.
    fn log_growth(&self, z: f64) -> f64 {
        -self.p_m.value() * qmath::ln_q_exp(self.q, -z).expect("q >= 1 and z >= 0")
    }

    fn check_first_payment(&self, m: f64) -> Result<()> {
        if !m.is_finite() || m < self.m0 {
            return Err(Error::Domain {
                what: "first-period payment must be >= m0",
                value: m,
            });
        }
        Ok(())
    }
}

/// Per-period rate implied by an expected amount `m_tilde` after `n`
/// periods: `rho = -(1/n) ln_q [((w0 + m0)/(w0 + M~))^(1/p_m)]`.
pub fn q_rate(
    q: QIndex,
    p_m: Probability,
    w0: Wealth,
    m0: f64,
    m_tilde: f64,
    n: PeriodCount,
) -> Result<Rate> {
    if n.value() == 0.0 {
        return Err(Error::Domain {
            what: "rate extraction requires n > 0",
            value: 0.0,
        });
    }
    if p_m.value() <= 0.0 {
        return Err(Error::invalid("p_m", "must be > 0"));
    }
    if !m_tilde.is_finite() || m_tilde < m0 {
        return Err(Error::Domain {
            what: "expected amount must be >= m0",
            value: m_tilde,
        });
    }
    // ln((w0+m0)/(w0+M~)) without forming the ratio
    let ln_factor = -((m_tilde - m0) / (w0.value() + m0)).ln_1p();
    let ln_q = qmath::q_log_of_ln(q, ln_factor / p_m.value())?;
    Rate::new((-ln_q / n.value()).max(0.0))
}

/// Indifference amounts by period. `ratio(n)` is `M(n) / M(1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndifferenceSchedule {
    points: Vec<(f64, f64)>,
}

impl IndifferenceSchedule {
    /// Linear schedule `M(n) = m0 + (m - m0) n` at `n = 0` followed by the
    /// given positive periods.
    pub fn linear(model: &DiscountModel, m: f64, periods: &[f64]) -> Result<Self> {
        let mut points = vec![(0.0, model.m0)];
        for &n in periods {
            let count = PeriodCount::new(n)?;
            if n <= points.last().map_or(0.0, |p| p.0) {
                return Err(Error::invalid("period", format!("{n} is not increasing")));
            }
            points.push((n, model.linear_amount(m, count)?));
        }
        Ok(IndifferenceSchedule { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn amount(&self, n: f64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == n).map(|p| p.1)
    }

    /// `r = M(n) / M(1)`; `None` if period 1 is not tabulated or pays nothing.
    pub fn ratio(&self, n: f64) -> Option<f64> {
        let first = self.amount(1.0).filter(|&a| a > 0.0)?;
        self.amount(n).map(|a| a / first)
    }
}
