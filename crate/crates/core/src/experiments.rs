//! Simulated discounters in lottery-prize experiments, the magnitude-effect
//! check, and rate dispersion across a Pareto-distributed population.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::choice::Wealth;
use crate::discounting::{q_rate, DiscountModel};
use crate::probability::Probability;
use crate::qmath::{PeriodCount, QIndex, Rate};
use crate::{Error, Result};

/// A named delay, e.g. "1 year" at `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSpec {
    pub label: String,
    pub n: f64,
}

/// An observed response to compare against the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub prize: f64,
    pub horizon_label: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThalerScenario {
    w0: Wealth,
    q: QIndex,
    p_m: Probability,
    prizes: Vec<f64>,
    horizons: Vec<HorizonSpec>,
    responses: Vec<Response>,
}

impl ThalerScenario {
    pub fn new(
        w0: Wealth,
        q: QIndex,
        p_m: Probability,
        prizes: Vec<f64>,
        horizons: Vec<HorizonSpec>,
        responses: Vec<Response>,
    ) -> Result<Self> {
        if p_m.value() <= 0.0 {
            return Err(Error::invalid("p_m", "must be > 0"));
        }
        if prizes.is_empty() {
            return Err(Error::invalid("prizes", "at least one prize is required"));
        }
        if let Some(bad) = prizes.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::invalid("prize", format!("must be finite and > 0, got {bad}")));
        }
        if horizons.is_empty() {
            return Err(Error::invalid("horizons", "at least one horizon is required"));
        }
        for h in &horizons {
            PeriodCount::new(h.n)?;
            if h.n == 0.0 {
                return Err(Error::invalid("horizon", format!("'{}' must be > 0 periods", h.label)));
            }
        }
        if horizons.windows(2).any(|w| !(w[1].n > w[0].n)) {
            return Err(Error::invalid("horizons", "periods must be strictly increasing"));
        }
        Ok(ThalerScenario {
            w0,
            q,
            p_m,
            prizes,
            horizons,
            responses,
        })
    }

    pub fn wealth(&self) -> Wealth {
        self.w0
    }
    pub fn q(&self) -> QIndex {
        self.q
    }
    pub fn p_m(&self) -> Probability {
        self.p_m
    }
    pub fn prizes(&self) -> &[f64] {
        &self.prizes
    }
    pub fn horizons(&self) -> &[HorizonSpec] {
        &self.horizons
    }

    fn model_for(&self, prize: f64) -> Result<DiscountModel> {
        DiscountModel::new(self.q, Rate::ZERO, self.p_m, self.w0, prize)
    }

    /// First-period payment that makes prize `m0` discount at `rate`,
    /// `m = m0 + rate (w0 + m0)`.
    pub fn first_payment_for_rate(&self, prize: f64, rate: Rate) -> Result<f64> {
        Ok(self.model_for(prize)?.first_payment_for_rate(rate))
    }

    fn response(&self, prize: f64, label: &str) -> Option<f64> {
        self.responses
            .iter()
            .find(|r| r.prize == prize && r.horizon_label == label)
            .map(|r| r.amount)
    }
}

/// File form of a scenario. Each prize gives either its first-period
/// payment or a target per-period rate to reverse-derive it from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThalerConfig {
    pub w0: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_p_m")]
    pub p_m: f64,
    pub prizes: Vec<PrizeConfig>,
    pub horizons: Vec<HorizonSpec>,
    #[serde(default)]
    pub responses: Vec<Response>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrizeConfig {
    pub m0: f64,
    #[serde(default)]
    pub first_period_amount: Option<f64>,
    #[serde(default)]
    pub target_rate: Option<f64>,
}

fn default_q() -> f64 {
    2.0
}
fn default_p_m() -> f64 {
    1.0
}

impl ThalerConfig {
    /// Validated scenario and the first-period payment for each prize.
    pub fn resolve(&self) -> Result<(ThalerScenario, Vec<f64>)> {
        let scenario = ThalerScenario::new(
            Wealth::new(self.w0)?,
            QIndex::new(self.q)?,
            Probability::new(self.p_m)?,
            self.prizes.iter().map(|p| p.m0).collect(),
            self.horizons.clone(),
            self.responses.clone(),
        )?;
        let firsts = self
            .prizes
            .iter()
            .map(|p| match (p.first_period_amount, p.target_rate) {
                (Some(m), None) => Ok(m),
                (None, Some(rate)) => scenario.first_payment_for_rate(p.m0, Rate::new(rate)?),
                _ => Err(Error::invalid(
                    "prize",
                    format!("prize {} needs exactly one of first_period_amount or target_rate", p.m0),
                )),
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((scenario, firsts))
    }
}

/// One cell of the simulated table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscounterRow {
    pub prize: f64,
    pub horizon_label: String,
    pub n: f64,
    pub amount: f64,
    pub rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscounterTable {
    pub rows: Vec<DiscounterRow>,
}

impl DiscounterTable {
    /// `(prize, rate)` at the first horizon of each prize, in prize order.
    pub fn prize_rates(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for row in &self.rows {
            if !out.iter().any(|&(p, _)| p == row.prize) {
                out.push((row.prize, row.rate));
            }
        }
        out
    }

    /// CSV with header `prize,horizon_label,n,amount,rate`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["prize", "horizon_label", "n", "amount", "rate"])?;
        for r in &self.rows {
            w.write_record([
                r.prize.to_string(),
                r.horizon_label.clone(),
                r.n.to_string(),
                r.amount.to_string(),
                r.rate.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{"meta": ..., "rows": [...]}`.
    pub fn to_json(&self, meta: serde_json::Value) -> serde_json::Value {
        serde_json::json!({ "meta": meta, "rows": self.rows })
    }
}

/// Tabulates `M~ = m0 + (m - m0) n` and the implied rate for each prize and
/// horizon.
pub fn simulate_discounter(scenario: &ThalerScenario, first_period_amounts: &[f64]) -> Result<DiscounterTable> {
    if first_period_amounts.len() != scenario.prizes.len() {
        return Err(Error::invalid(
            "first-period amounts",
            format!("expected {} values, got {}", scenario.prizes.len(), first_period_amounts.len()),
        ));
    }
    let mut rows = Vec::with_capacity(scenario.prizes.len() * scenario.horizons.len());
    for (&prize, &m) in scenario.prizes.iter().zip(first_period_amounts) {
        let model = scenario.model_for(prize)?;
        for h in &scenario.horizons {
            let n = PeriodCount::new(h.n)?;
            let amount = model.linear_amount(m, n)?;
            let rate = q_rate(scenario.q, scenario.p_m, scenario.w0, prize, amount, n)?;
            rows.push(DiscounterRow {
                prize,
                horizon_label: h.label.clone(),
                n: h.n,
                amount,
                rate: rate.value(),
                observed: scenario.response(prize, &h.label),
            });
        }
    }
    Ok(DiscounterTable { rows })
}

/// How discount rates move with the prize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeEffect {
    /// Rates rise with the prize: the empirical pattern is reversed.
    ReversedIncreasing,
    /// Rates fall with the prize, as reported for human subjects.
    Classical,
    Flat,
    Mixed,
    /// Fewer than two prizes.
    Undetermined,
}

impl fmt::Display for MagnitudeEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MagnitudeEffect::ReversedIncreasing => "reversed: increasing",
            MagnitudeEffect::Classical => "classical magnitude effect",
            MagnitudeEffect::Flat => "flat",
            MagnitudeEffect::Mixed => "mixed",
            MagnitudeEffect::Undetermined => "undetermined",
        })
    }
}

/// Rates within this relative distance count as equal.
const FLAT_TOLERANCE: f64 = 1e-12;

/// Orders `(prize, rate)` pairs by prize and classifies the rate trend.
pub fn magnitude_effect(prize_rates: &[(f64, f64)]) -> MagnitudeEffect {
    if prize_rates.len() < 2 {
        return MagnitudeEffect::Undetermined;
    }
    let mut sorted = prize_rates.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let steps: Vec<std::cmp::Ordering> = sorted
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].1, w[1].1);
            if (b - a).abs() <= FLAT_TOLERANCE * a.abs().max(b.abs()) {
                std::cmp::Ordering::Equal
            } else {
                b.total_cmp(&a)
            }
        })
        .collect();
    use std::cmp::Ordering::*;
    if steps.iter().all(|s| *s == Equal) {
        MagnitudeEffect::Flat
    } else if steps.iter().all(|s| *s == Greater) {
        MagnitudeEffect::ReversedIncreasing
    } else if steps.iter().all(|s| *s == Less) {
        MagnitudeEffect::Classical
    } else {
        MagnitudeEffect::Mixed
    }
}

/// Pareto wealth law `P(W > w) = (w_min / w)^exponent`, sampled by inverse
/// CDF from a ChaCha8 stream seeded with `seed` through `seed_from_u64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoWealth {
    exponent: f64,
    w_min: f64,
    sample_size: usize,
    seed: u64,
}

impl ParetoWealth {
    /// `exponent = +inf` is accepted and yields every draw at `w_min`.
    pub fn new(exponent: f64, w_min: f64, sample_size: usize, seed: u64) -> Result<Self> {
        if exponent.is_nan() || exponent <= 1.0 {
            return Err(Error::invalid("exponent", format!("must be > 1, got {exponent}")));
        }
        if !w_min.is_finite() || w_min <= 0.0 {
            return Err(Error::invalid("w_min", format!("must be finite and > 0, got {w_min}")));
        }
        if sample_size == 0 {
            return Err(Error::invalid("sample size", "must be >= 1"));
        }
        Ok(ParetoWealth {
            exponent,
            w_min,
            sample_size,
            seed,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
    pub fn w_min(&self) -> f64 {
        self.w_min
    }
    pub fn sample_size(&self) -> usize {
        self.sample_size
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws in generation order.
    pub fn sample(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let inv = 1.0 / self.exponent;
        (0..self.sample_size)
            .map(|_| {
                // 1 - U lies in (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                self.w_min * (-u.ln() * inv).exp()
            })
            .collect()
    }
}

/// `rho_i = (m - m0) / (w_i + m0)` for each wealth.
pub fn rates_for_wealth(wealth: &[f64], m0: f64, m: f64) -> Result<Vec<f64>> {
    if !m0.is_finite() || m0 < 0.0 {
        return Err(Error::invalid("m0", format!("must be finite and >= 0, got {m0}")));
    }
    if !m.is_finite() || m < m0 {
        return Err(Error::Domain {
            what: "first-period payment must be >= m0",
            value: m,
        });
    }
    Ok(wealth.iter().map(|w| (m - m0) / (w + m0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub iqr: f64,
    pub min: f64,
    pub max: f64,
    /// Wealth averaged over the sample.
    pub mean_wealth: f64,
    /// Rate of a single individual holding `mean_wealth`.
    pub mean_wealth_rate: f64,
}

/// Linear-interpolation quantile of sorted data (`h = (len - 1) p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Samples the population and summarises the per-person rates.
pub fn population_dispersion(wealth: &ParetoWealth, m0: f64, m: f64) -> Result<DispersionSummary> {
    let draws = wealth.sample();
    let mut rates = rates_for_wealth(&draws, m0, m)?;
    rates.sort_by(f64::total_cmp);
    let count = rates.len();
    let mean = rates.iter().sum::<f64>() / count as f64;
    let mean_wealth = draws.iter().sum::<f64>() / count as f64;
    let q25 = quantile_sorted(&rates, 0.25);
    let q75 = quantile_sorted(&rates, 0.75);
    Ok(DispersionSummary {
        count,
        mean,
        median: quantile_sorted(&rates, 0.5),
        q25,
        q75,
        iqr: q75 - q25,
        min: rates[0],
        max: rates[count - 1],
        mean_wealth,
        mean_wealth_rate: (m - m0) / (mean_wealth + m0),
    })
}
