use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use tempodisc::calibrate::{compare_models, fit, model_factor, FitOptions, FitResult, ObservationRow, ObservationSet};
use tempodisc::choice::{decide, ChoiceProblem, GrowthRate, Wealth};
use tempodisc::contrast::{contrast_db, distinguishability_horizon, ContrastQuery, Horizon};
use tempodisc::experiments::{magnitude_effect, population_dispersion, simulate_discounter, ParetoWealth, ThalerConfig};
use tempodisc::probability::Probability;
use tempodisc::reversal::{reversal_curves, ReversalScenario};
use tempodisc::{PeriodCount, QIndex};

use crate::args::{ContrastArgs, CurveArgs, DecideArgs, FitArgs, PopulationArgs, ReversalArgs, ThalerArgs};
use crate::output::{format_sig, Cell, Table};
use crate::CliError;

/// Rows, parameters for the metadata block, and an optional note for stderr
/// when the output format has no metadata.
pub struct Outcome {
    pub table: Table,
    pub params: Value,
    pub note: Option<String>,
}

pub fn decide_cmd(a: &DecideArgs) -> Result<Outcome, CliError> {
    let problem = ChoiceProblem::new(
        Wealth::new(a.wealth).map_err(CliError::usage)?,
        a.early_amount,
        a.late_amount,
        Probability::new(a.p_early).map_err(CliError::usage)?,
        Probability::new(a.p_late).map_err(CliError::usage)?,
    )
    .map_err(CliError::usage)?;
    let pref = decide(&problem, a.threshold_db);
    let mut table = Table::new(&["side", "contrast_db", "d_c", "early_time_average", "late_time_average"]);
    table.push(vec![
        Cell::from(pref.side.to_string()),
        Cell::from(pref.contrast_db),
        Cell::from(pref.d_c.value()),
        Cell::from(pref.early.value()),
        Cell::from(pref.late.value()),
    ]);
    Ok(Outcome {
        table,
        params: json!({
            "wealth": a.wealth,
            "early_amount": a.early_amount,
            "late_amount": a.late_amount,
            "p_early": a.p_early,
            "p_late": a.p_late,
            "threshold_db": a.threshold_db,
        }),
        note: None,
    })
}

pub fn curve_cmd(a: &CurveArgs) -> Result<Outcome, CliError> {
    let q = QIndex::new(a.q).map_err(CliError::usage)?;
    let steps = (a.n_max / a.step + 1e-9).floor() as u64;
    let mut table = Table::new(&["n", "factor"]);
    for i in 0..=steps {
        let n = i as f64 * a.step;
        table.push(vec![Cell::from(n), Cell::from(model_factor(q, a.rho, a.p_m, n))]);
    }
    Ok(Outcome {
        table,
        params: json!({ "q": a.q, "rho": a.rho, "p_m": a.p_m, "n_max": a.n_max, "step": a.step }),
        note: None,
    })
}

pub fn reversal_cmd(a: &ReversalArgs) -> Result<Outcome, CliError> {
    let scenario = ReversalScenario::generalized(
        GrowthRate::new(a.rate).map_err(CliError::usage)?,
        a.n_max,
        a.multiple,
        a.lag,
    )
    .map_err(CliError::usage)?;
    let crossing = scenario.crossing().value();
    let (early, late) = reversal_curves(&scenario);
    let mut table = Table::new(&["n", "early", "late", "preferred"]);
    for (&(n, e), &(_, l)) in early.points().iter().zip(late.points()) {
        let preferred = if e > l {
            "early"
        } else if l > e {
            "late"
        } else {
            "tie"
        };
        table.push(vec![Cell::from(n), Cell::from(e), Cell::from(l), Cell::from(preferred)]);
    }
    Ok(Outcome {
        table,
        params: json!({
            "rate": a.rate,
            "n_max": a.n_max,
            "multiple": a.multiple,
            "lag": a.lag,
            "crossing": crossing,
        }),
        note: Some(format!("crossing n* = {}", format_sig(crossing))),
    })
}

pub fn contrast_cmd(a: &ContrastArgs) -> Result<Outcome, CliError> {
    let x_m = GrowthRate::new(a.xm).map_err(CliError::usage)?;
    let q = QIndex::new(a.q).map_err(CliError::usage)?;
    let p_m = Probability::new(a.p_m).map_err(CliError::usage)?;
    let mut table = Table::new(&["n", "contrast_db", "distinguishable"]);
    for n in 1..=a.n_max {
        let n = PeriodCount::new(f64::from(n)).map_err(CliError::usage)?;
        let c = contrast_db(&ContrastQuery::new(x_m, q, p_m, n).map_err(CliError::usage)?);
        table.push(vec![Cell::from(n.value()), Cell::from(c), Cell::from(c.abs() > a.threshold_db)]);
    }
    let horizon = distinguishability_horizon(x_m, q, p_m, a.threshold_db).map_err(CliError::usage)?;
    let described = match horizon {
        Horizon::Periods(n) => n.to_string(),
        Horizon::Unbounded => "unbounded".to_string(),
    };
    Ok(Outcome {
        table,
        params: json!({
            "xm": a.xm,
            "q": a.q,
            "p_m": a.p_m,
            "n_max": a.n_max,
            "threshold_db": a.threshold_db,
            "horizon": horizon,
        }),
        note: Some(format!("indistinguishable up to n = {described}")),
    })
}

pub fn thaler_cmd(a: &ThalerArgs) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&a.config).map_err(|e| CliError::data(format!("{}: {e}", a.config.display())))?;
    let config: ThalerConfig = serde_json::from_str(&text).map_err(CliError::data)?;
    let (scenario, firsts) = config.resolve().map_err(CliError::data)?;
    let result = simulate_discounter(&scenario, &firsts).map_err(CliError::data)?;
    let effect = magnitude_effect(&result.prize_rates());
    let mut table = Table::new(&["prize", "horizon_label", "n", "amount", "rate", "observed"]);
    for r in &result.rows {
        table.push(vec![
            Cell::from(r.prize),
            Cell::from(r.horizon_label.clone()),
            Cell::from(r.n),
            Cell::from(r.amount),
            Cell::from(r.rate),
            r.observed.map_or(Cell::from(""), Cell::from),
        ]);
    }
    Ok(Outcome {
        table,
        params: json!({
            "config": a.config.display().to_string(),
            "first_period_amounts": firsts,
            "magnitude_effect": effect.to_string(),
        }),
        note: Some(format!("magnitude effect: {effect}")),
    })
}

fn read_observations(path: &Path) -> Result<Vec<ObservationRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(CliError::data)?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let n_col = column("n").ok_or_else(|| CliError::data("missing column 'n'"))?;
    let value_col = column("value").ok_or_else(|| CliError::data("missing column 'value'"))?;
    let kind_col = column("kind");

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(CliError::data)?;
        let line = i + 2;
        let parse = |col: usize, name: &str| -> Result<f64, CliError> {
            let raw = record.get(col).unwrap_or("").trim();
            raw.parse()
                .map_err(|_| CliError::data(format!("line {line}: {name} '{raw}' is not a number")))
        };
        let n = parse(n_col, "n")?;
        let value = parse(value_col, "value")?;
        let kind = kind_col.and_then(|c| record.get(c)).map(str::trim).unwrap_or("factor");
        rows.push(match kind {
            "" | "factor" => ObservationRow::factor(n, value),
            "amount" => ObservationRow::amount(n, value),
            other => return Err(CliError::data(format!("line {line}: unknown kind '{other}'"))),
        });
    }
    Ok(rows)
}

fn fit_row(label: &str, rank: u64, r: &FitResult) -> Vec<Cell> {
    vec![
        Cell::from(rank),
        Cell::from(label),
        Cell::from(r.q.value()),
        Cell::from(r.rho.value()),
        Cell::from(r.p_m.value()),
        Cell::from(r.sse),
        Cell::from(r.converged),
    ]
}

pub fn fit_cmd(a: &FitArgs) -> Result<Outcome, CliError> {
    let rows = read_observations(&a.data)?;
    let wealth = a.wealth.map(Wealth::new).transpose().map_err(CliError::usage)?;
    let data = ObservationSet::new(&rows, wealth, a.m0).map_err(CliError::data)?;
    let options = FitOptions {
        fit_p_m: a.fit_pm,
        log_space: a.log_space,
        pin_q: a.pin_q.map(QIndex::new).transpose().map_err(CliError::usage)?,
        ..FitOptions::default()
    };
    let mut table = Table::new(&["rank", "family", "q", "rho", "p_m", "sse", "converged"]);
    if options.pin_q.is_some() {
        let result = fit(&data, &options).map_err(CliError::data)?;
        table.push(fit_row("pinned", 1, &result));
    } else {
        for m in compare_models(&data, &options).map_err(CliError::data)? {
            table.push(fit_row(&m.family.to_string(), m.rank as u64, &m.fit));
        }
    }
    Ok(Outcome {
        table,
        params: json!({
            "data": a.data.display().to_string(),
            "rows": data.len(),
            "pin_q": a.pin_q,
            "fit_pm": a.fit_pm,
            "wealth": a.wealth,
            "m0": a.m0,
            "log_space": a.log_space,
        }),
        note: None,
    })
}

pub fn population_cmd(a: &PopulationArgs, seed: u64) -> Result<Outcome, CliError> {
    let size = usize::try_from(a.size).map_err(|_| CliError::Usage("--size is too large".into()))?;
    let pop = ParetoWealth::new(a.exponent, a.wmin, size, seed).map_err(CliError::usage)?;
    let s = population_dispersion(&pop, a.m0, a.m).map_err(CliError::usage)?;
    let mut table = Table::new(&[
        "count",
        "mean",
        "median",
        "q25",
        "q75",
        "iqr",
        "min",
        "max",
        "mean_wealth",
        "mean_wealth_rate",
    ]);
    table.push(vec![
        Cell::from(s.count as u64),
        Cell::from(s.mean),
        Cell::from(s.median),
        Cell::from(s.q25),
        Cell::from(s.q75),
        Cell::from(s.iqr),
        Cell::from(s.min),
        Cell::from(s.max),
        Cell::from(s.mean_wealth),
        Cell::from(s.mean_wealth_rate),
    ]);
    Ok(Outcome {
        table,
        params: json!({
            "exponent": if a.exponent.is_finite() { json!(a.exponent) } else { json!("inf") },
            "wmin": a.wmin,
            "size": a.size,
            "seed": seed,
            "m0": a.m0,
            "m": a.m,
        }),
        note: None,
    })
}
