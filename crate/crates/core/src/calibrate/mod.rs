//! Least-squares calibration of `(q, rho, p_m)` to observed discount data.
//!
//! The model is `f(n) = [e_q^(-rho n)]^p_m`. Fitting runs a deterministic
//! grid over the parameter box and then refines the best grid point with a
//! box-constrained simplex. Ties on the grid go to the lowest `q`, then the
//! lowest `rho`, then the lowest `p_m`.

mod simplex;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::choice::Wealth;
use crate::probability::Probability;
use crate::qmath::{self, QIndex, Rate};
use crate::{Error, Result};

use simplex::{SimplexSettings, minimize};

const MIN_ROWS: usize = 3;

/// Two fits whose SSE differ by no more than this share a rank.
pub const RANK_TIE_TOLERANCE: f64 = 1e-12;

/// One observation: a discount factor or an indifference amount.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Observed {
    Factor(f64),
    Amount(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub n: f64,
    pub observed: Observed,
}

impl ObservationRow {
    pub fn factor(n: f64, factor: f64) -> Self {
        ObservationRow {
            n,
            observed: Observed::Factor(factor),
        }
    }

    pub fn amount(n: f64, amount: f64) -> Self {
        ObservationRow {
            n,
            observed: Observed::Amount(amount),
        }
    }
}

/// Validated observations, with amounts already converted to factors via
/// `(w0 + m0) / (w0 + amount)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationSet {
    periods: Vec<f64>,
    factors: Vec<f64>,
    w0: Option<Wealth>,
    m0: f64,
}

impl ObservationSet {
    pub fn new(rows: &[ObservationRow], w0: Option<Wealth>, m0: f64) -> Result<Self> {
        if !m0.is_finite() || m0 < 0.0 {
            return Err(Error::invalid("m0", format!("must be finite and >= 0, got {m0}")));
        }
        let mut distinct = BTreeSet::new();
        for row in rows {
            if !row.n.is_finite() || row.n < 0.0 {
                return Err(Error::invalid("n", format!("must be finite and >= 0, got {}", row.n)));
            }
            distinct.insert(row.n.to_bits());
        }
        if distinct.len() < MIN_ROWS {
            return Err(Error::InsufficientData {
                found: distinct.len(),
                required: MIN_ROWS,
            });
        }
        if distinct.len() != rows.len() {
            return Err(Error::invalid("n", "period values must be distinct"));
        }

        let mut periods = Vec::with_capacity(rows.len());
        let mut factors = Vec::with_capacity(rows.len());
        for row in rows {
            let factor = match row.observed {
                Observed::Factor(f) => f,
                Observed::Amount(amount) => {
                    let w0 = w0.ok_or_else(|| {
                        Error::invalid("wealth", "amount observations require a wealth")
                    })?;
                    (w0.value() + m0) / (w0.value() + amount)
                }
            };
            if !(factor > 0.0 && factor <= 1.0) {
                return Err(Error::invalid(
                    "observation",
                    format!("discount factor at n = {} must lie in (0, 1], got {factor}", row.n),
                ));
            }
            periods.push(row.n);
            factors.push(factor);
        }
        Ok(ObservationSet {
            periods,
            factors,
            w0,
            m0,
        })
    }

    /// Factors only, no wealth needed.
    pub fn from_factors(points: &[(f64, f64)]) -> Result<Self> {
        let rows: Vec<ObservationRow> = points
            .iter()
            .map(|&(n, f)| ObservationRow::factor(n, f))
            .collect();
        ObservationSet::new(&rows, None, 0.0)
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn wealth(&self) -> Option<Wealth> {
        self.w0
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }
}

/// Closed parameter box. Lower bounds of `rho` and `p_m` are exclusive on
/// the grid, which starts one spacing above them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub q: (f64, f64),
    pub rho: (f64, f64),
    pub p_m: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            q: (1.0, 5.0),
            rho: (0.0, 2.0),
            p_m: (0.0, 1.0),
        }
    }
}

impl Bounds {
    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(self.q) || self.q.0 < 1.0 {
            return Err(Error::invalid("q bounds", format!("{:?}", self.q)));
        }
        if !ok(self.rho) || self.rho.0 < 0.0 || self.rho.1 <= 0.0 {
            return Err(Error::invalid("rho bounds", format!("{:?}", self.rho)));
        }
        if !ok(self.p_m) || self.p_m.0 < 0.0 || self.p_m.1 > 1.0 || self.p_m.1 <= 0.0 {
            return Err(Error::invalid("p_m bounds", format!("{:?}", self.p_m)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Free `p_m`; otherwise it is held at 1.
    pub fit_p_m: bool,
    /// Hold `q` at this value.
    pub pin_q: Option<QIndex>,
    pub bounds: Bounds,
    pub grid_points: usize,
    /// Compare `ln f` instead of `f`.
    pub log_space: bool,
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            fit_p_m: false,
            pin_q: None,
            bounds: Bounds::default(),
            grid_points: 64,
            log_space: false,
            step_tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub q: QIndex,
    pub rho: Rate,
    pub p_m: Probability,
    pub sse: f64,
    /// `observed - model` per row, in the loss space.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// `[e_q^(-rho n)]^p_m`.
pub fn model_factor(q: QIndex, rho: f64, p_m: f64, n: f64) -> f64 {
    let ln = qmath::ln_q_exp(q, -rho * n).expect("q >= 1 with non-positive argument");
    (p_m * ln).exp()
}

/// Parameter layout for one fit: which of `(q, rho, p_m)` move.
struct Problem<'a> {
    data: &'a ObservationSet,
    options: &'a FitOptions,
    targets: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(data: &'a ObservationSet, options: &'a FitOptions) -> Self {
        let targets = if options.log_space {
            data.factors.iter().map(|f| f.ln()).collect()
        } else {
            data.factors.clone()
        };
        Problem {
            data,
            options,
            targets,
        }
    }

    /// Full `(q, rho, p_m)` from the free coordinates.
    fn unpack(&self, free: &[f64]) -> (f64, f64, f64) {
        let mut it = free.iter().copied();
        let q = match self.options.pin_q {
            Some(q) => q.value(),
            None => it.next().expect("q coordinate"),
        };
        let rho = it.next().expect("rho coordinate");
        let p_m = if self.options.fit_p_m {
            it.next().expect("p_m coordinate")
        } else {
            1.0
        };
        (q, rho, p_m)
    }

    fn pack(&self, q: f64, rho: f64, p_m: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(3);
        if self.options.pin_q.is_none() {
            v.push(q);
        }
        v.push(rho);
        if self.options.fit_p_m {
            v.push(p_m);
        }
        v
    }

    fn box_edges(&self) -> (Vec<f64>, Vec<f64>) {
        let b = &self.options.bounds;
        let (q, rho, p_m) = (b.q, b.rho, b.p_m);
        let lower = self.pack(q.0, rho.0, p_m.0);
        let upper = self.pack(q.1, rho.1, p_m.1);
        (lower, upper)
    }

    fn residual(&self, q: QIndex, rho: f64, p_m: f64, i: usize) -> f64 {
        let n = self.data.periods[i];
        let model = if self.options.log_space {
            p_m * qmath::ln_q_exp(q, -rho * n).expect("valid q-exponential argument")
        } else {
            model_factor(q, rho, p_m, n)
        };
        self.targets[i] - model
    }

    fn sse(&self, free: &[f64]) -> f64 {
        let (q, rho, p_m) = self.unpack(free);
        let q = QIndex::new(q).expect("q within validated bounds");
        (0..self.targets.len())
            .map(|i| self.residual(q, rho, p_m, i).powi(2))
            .sum()
    }

    fn grid_axes(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let k = self.options.grid_points.max(2);
        let b = &self.options.bounds;
        let q_axis = match self.options.pin_q {
            Some(q) => vec![q.value()],
            None => (0..k)
                .map(|i| b.q.0 + (b.q.1 - b.q.0) * i as f64 / (k - 1) as f64)
                .collect(),
        };
        let open = |(lo, hi): (f64, f64)| -> Vec<f64> {
            (1..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
        };
        let rho_axis = open(b.rho);
        let p_axis = if self.options.fit_p_m { open(b.p_m) } else { vec![1.0] };
        (q_axis, rho_axis, p_axis)
    }

    /// Grid minimum in `q`, `rho`, `p_m` loop order with strict improvement,
    /// which implements the lowest-q-then-rho tie rule.
    fn grid_best(&self) -> (Vec<f64>, Vec<f64>) {
        let (q_axis, rho_axis, p_axis) = self.grid_axes();
        let mut best = (f64::INFINITY, q_axis[0], rho_axis[0], p_axis[0]);
        for &q in &q_axis {
            for &rho in &rho_axis {
                for &p in &p_axis {
                    let v = self.sse(&self.pack(q, rho, p));
                    if v < best.0 {
                        best = (v, q, rho, p);
                    }
                }
            }
        }
        let spacing = |axis: &[f64], (lo, hi): (f64, f64)| {
            if axis.len() > 1 {
                axis[1] - axis[0]
            } else {
                (hi - lo) / self.options.grid_points.max(2) as f64
            }
        };
        let b = &self.options.bounds;
        let steps = self.pack(
            spacing(&q_axis, b.q),
            spacing(&rho_axis, b.rho),
            spacing(&p_axis, b.p_m),
        );
        (self.pack(best.1, best.2, best.3), steps)
    }
}

/// Fits the model to `data` under `options`.
pub fn fit(data: &ObservationSet, options: &FitOptions) -> Result<FitResult> {
    fit_from(data, options, &[])
}

/// As [`fit`], also refining from each extra `(q, rho, p_m)` start and
/// keeping the best outcome.
fn fit_from(data: &ObservationSet, options: &FitOptions, extra_starts: &[(f64, f64, f64)]) -> Result<FitResult> {
    options.bounds.validate()?;
    if data.len() < MIN_ROWS {
        return Err(Error::InsufficientData {
            found: data.len(),
            required: MIN_ROWS,
        });
    }
    if data.factors.iter().all(|&f| f == 1.0) {
        return Err(Error::Degenerate("every observed factor equals 1; no discounting to fit".into()));
    }

    let problem = Problem::new(data, options);
    let (lower, upper) = problem.box_edges();
    let (grid_start, steps) = problem.grid_best();
    let settings = SimplexSettings {
        step_tol: options.step_tol,
        max_iter: options.max_iter,
    };

    let mut starts = vec![grid_start];
    for &(q, rho, p_m) in extra_starts {
        starts.push(problem.pack(q, rho, p_m));
    }

    let mut best: Option<simplex::SimplexOutcome> = None;
    for start in &starts {
        let outcome = minimize(|p| problem.sse(p), start, &steps, &lower, &upper, settings);
        let better = match &best {
            None => true,
            Some(b) => outcome.value < b.value,
        };
        if better {
            best = Some(outcome);
        }
    }
    let outcome = best.expect("at least one start");

    let (q, rho, p_m) = problem.unpack(&outcome.point);
    let q = QIndex::new(q)?;
    let residuals: Vec<f64> = (0..data.len()).map(|i| problem.residual(q, rho, p_m, i)).collect();
    let sse = residuals.iter().map(|r| r * r).sum();
    Ok(FitResult {
        q,
        rho: Rate::new(rho)?,
        p_m: Probability::new(p_m)?,
        sse,
        residuals,
        converged: outcome.converged,
        iterations: outcome.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Exponential,
    Hyperbolic,
    FreeQ,
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelFamily::Exponential => "exponential",
            ModelFamily::Hyperbolic => "hyperbolic",
            ModelFamily::FreeQ => "free_q",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedModel {
    /// 1-based; fits within [`RANK_TIE_TOLERANCE`] of the previous share its rank.
    pub rank: usize,
    pub family: ModelFamily,
    pub fit: FitResult,
}

/// Fits exponential (`q = 1`), hyperbolic (`q = 2`) and free-`q` models and
/// ranks them by SSE. The free fit is also refined from both pinned optima,
/// so its SSE never exceeds theirs.
pub fn compare_models(data: &ObservationSet, options: &FitOptions) -> Result<Vec<RankedModel>> {
    let pinned = |q: QIndex| FitOptions {
        pin_q: Some(q),
        ..*options
    };
    let exponential = fit(data, &pinned(QIndex::EXPONENTIAL))?;
    let hyperbolic = fit(data, &pinned(QIndex::HYPERBOLIC))?;
    let starts: Vec<(f64, f64, f64)> = [&exponential, &hyperbolic]
        .iter()
        .filter(|r| r.q.value() >= options.bounds.q.0 && r.q.value() <= options.bounds.q.1)
        .map(|r| (r.q.value(), r.rho.value(), r.p_m.value()))
        .collect();
    let free = fit_from(data, &FitOptions { pin_q: None, ..*options }, &starts)?;

    let mut ranked = vec![
        (ModelFamily::Exponential, exponential),
        (ModelFamily::Hyperbolic, hyperbolic),
        (ModelFamily::FreeQ, free),
    ];
    ranked.sort_by(|a, b| a.1.sse.total_cmp(&b.1.sse));

    let mut out: Vec<RankedModel> = Vec::with_capacity(3);
    for (family, fit) in ranked {
        let rank = match out.last() {
            Some(prev) if fit.sse - prev.fit.sse <= RANK_TIE_TOLERANCE => prev.rank,
            Some(prev) => prev.rank + 1,
            None => 1,
        };
        out.push(RankedModel { rank, family, fit });
    }
    Ok(out)
}
