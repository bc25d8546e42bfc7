use std::fmt;

use rayon::prelude::*;
use serde_json::json;
use xychain::analysis::{self, EtcpGrid, Measure, SweepSeries};
use xychain::finite::{self, ChainSpec};
use xychain::thermo::{self, factorization_field, GTable, ModelPoint};

use crate::config::{CommandKind, ConfigError, RunConfig};
use crate::figures;
use crate::output::{format_sig, Cell, Table};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numeric(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<analysis::AnalysisError> for RunError {
    fn from(e: analysis::AnalysisError) -> Self {
        RunError::Numeric(e.to_string())
    }
}

pub fn numeric_at(lambda: f64, gamma: f64, temperature: f64, r: usize, e: impl fmt::Display) -> RunError {
    RunError::Numeric(format!("at λ={lambda}, γ={gamma}, T={temperature}, r={r}: {e}"))
}

pub fn combo_name(gamma: f64, temperature: f64) -> String {
    format!("gamma{}_T{}", format_sig(gamma, 6), format_sig(temperature, 6))
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    match cfg.command {
        CommandKind::Correlators => correlators(cfg),
        CommandKind::DiscordSweep => measure_sweep(cfg, Measure::Discord),
        CommandKind::EofSweep => measure_sweep(cfg, Measure::EntanglementOfFormation),
        CommandKind::FiniteSpectrum => finite_spectrum(cfg),
        CommandKind::Crossings => crossings(cfg),
        CommandKind::EtcpFit => etcp_fit(cfg),
        CommandKind::FidelityCompare => fidelity_compare(cfg),
        CommandKind::ReproduceFigure => figures::reproduce(cfg.figure.expect("validated")),
    }
}

/// Rows (lambda, r, value, measure), λ outer and r inner, from one series
/// per separation sharing a grid.
pub fn push_series(table: &mut Table, series: &[SweepSeries], measure: &str) {
    let Some(first) = series.first() else { return };
    for (i, &l) in first.grid().iter().enumerate() {
        for s in series {
            table.push(vec![l.into(), s.meta.r.into(), s.values()[i].into(), measure.into()]);
        }
    }
}

fn sweep_table(cfg: &RunConfig, gamma: f64, t: f64) -> Table {
    let mut table = Table::new(combo_name(gamma, t), &["lambda", "r", "value", "measure"])
        .with_meta("gamma", gamma)
        .with_meta("temperature", t);
    if let Some(n) = cfg.n {
        table = table.with_meta("n", n);
    }
    table
}

fn correlators(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    let r_max = *cfg.rs.iter().max().expect("non-empty");
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        for &t in &cfg.temperatures {
            let rows: Vec<Vec<[f64; 4]>> = cfg
                .lambdas
                .par_iter()
                .map(|&l| {
                    let model = ModelPoint::new(l, gamma, t).map_err(|e| numeric_at(l, gamma, t, r_max, e))?;
                    let table = GTable::build(&model, r_max).map_err(|e| numeric_at(l, gamma, t, r_max, e))?;
                    cfg.rs
                        .iter()
                        .map(|&r| {
                            let c = thermo::correlators(&table, r).map_err(|e| numeric_at(l, gamma, t, r, e))?;
                            Ok([c.sigma_z_mean, c.xx, c.yy, c.zz])
                        })
                        .collect()
                })
                .collect::<Result<_, RunError>>()?;
            let mut table = sweep_table(cfg, gamma, t);
            for (&l, per_r) in cfg.lambdas.iter().zip(&rows) {
                for (&r, vals) in cfg.rs.iter().zip(per_r) {
                    for (name, v) in ["sigma_z", "xx", "yy", "zz"].iter().zip(vals) {
                        table.push(vec![l.into(), r.into(), (*v).into(), (*name).into()]);
                    }
                }
            }
            tables.push(table);
        }
    }
    Ok(tables)
}

fn measure_sweep(cfg: &RunConfig, measure: Measure) -> Result<Vec<Table>, RunError> {
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        for &t in &cfg.temperatures {
            let series = match cfg.n {
                Some(n) => analysis::finite_sweep(measure, n, gamma, t, &cfg.rs, &cfg.lambdas)?,
                None => analysis::thermo_sweep(measure, gamma, t, &cfg.rs, &cfg.lambdas)?,
            };
            let mut table = sweep_table(cfg, gamma, t);
            push_series(&mut table, &series, measure.name());
            tables.push(table);
        }
    }
    Ok(tables)
}

fn finite_spectrum(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    let n = cfg.n.expect("validated");
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        let levels: Vec<Vec<(f64, i8)>> = cfg
            .lambdas
            .par_iter()
            .map(|&l| {
                let model = ModelPoint::ground(l, gamma).map_err(|e| numeric_at(l, gamma, 0.0, 0, e))?;
                let spec = ChainSpec::new(n, model).map_err(|e| numeric_at(l, gamma, 0.0, 0, e))?;
                let s = finite::diagonalize(&spec).map_err(|e| numeric_at(l, gamma, 0.0, 0, e))?;
                Ok(s.energies
                    .iter()
                    .zip(&s.parities)
                    .take(cfg.levels)
                    .map(|(&e, &p)| (e, p))
                    .collect())
            })
            .collect::<Result<_, RunError>>()?;
        let mut table = Table::new(format!("gamma{}_n{n}", format_sig(gamma, 6)), &["lambda", "level", "energy", "parity", "gap"])
            .with_meta("gamma", gamma)
            .with_meta("n", n);
        for (&l, lv) in cfg.lambdas.iter().zip(&levels) {
            let e0 = lv[0].0;
            for (k, &(e, p)) in lv.iter().enumerate() {
                table.push(vec![l.into(), k.into(), e.into(), (p as i64).into(), (e - e0).into()]);
            }
        }
        tables.push(table);
    }
    Ok(tables)
}

fn crossings(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    let n = cfg.n.expect("validated");
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        let report = finite::find_crossings(gamma, n, cfg.lambda_max)
            .map_err(|e| RunError::Numeric(format!("crossings at γ={gamma}, n={n}: {e}")))?;
        let mut table = Table::new(format!("gamma{}_n{n}", format_sig(gamma, 6)), &["index", "lambda"])
            .with_meta("gamma", gamma)
            .with_meta("n", n);
        for (k, &l) in report.crossings.iter().enumerate() {
            table.push(vec![k.into(), l.into()]);
        }
        table.summary.insert("count".into(), json!(report.count));
        table.summary.insert("crossings".into(), json!(report.crossings));
        if let Ok(lf) = factorization_field(gamma) {
            table.summary.insert("factorization_field".into(), json!(lf));
        }
        tables.push(table);
    }
    Ok(tables)
}

fn etcp_fit(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        for &r in &cfg.rs {
            let context = |e: analysis::AnalysisError| RunError::Numeric(format!("thermal critical point at γ={gamma}, r={r}: {e}"));
            let series = analysis::etcp_series(gamma, r, &cfg.temperatures, &EtcpGrid::default()).map_err(context)?;
            let fit = analysis::fit_ansatz(&series).map_err(context)?;
            let mut table = Table::new(
                format!("gamma{}_r{r}", format_sig(gamma, 6)),
                &["temperature", "lambda_tc", "fit_lambda_tc", "alpha", "nu", "residual"],
            )
            .with_meta("gamma", gamma)
            .with_meta("r", r);
            for &(t, l) in series.samples() {
                let model = fit.alpha * t.powf(fit.nu) + 1.0;
                table.push(vec![t.into(), l.into(), model.into(), fit.alpha.into(), fit.nu.into(), fit.residual.into()]);
            }
            table.summary.insert("alpha".into(), json!(fit.alpha));
            table.summary.insert("nu".into(), json!(fit.nu));
            table.summary.insert("residual".into(), json!(fit.residual));
            tables.push(table);
        }
    }
    Ok(tables)
}

fn fidelity_compare(cfg: &RunConfig) -> Result<Vec<Table>, RunError> {
    let n = cfg.n.expect("validated");
    let mut tables = Vec::new();
    for &gamma in &cfg.gammas {
        for &t in &cfg.temperatures {
            let points = analysis::fidelity_scan(n, gamma, t, &cfg.rs, &cfg.lambdas)?;
            let mut table = sweep_table(cfg, gamma, t);
            for p in points {
                table.push(vec![p.lambda.into(), p.r.into(), Cell::Real(p.fidelity), "fidelity".into()]);
            }
            tables.push(table);
        }
    }
    Ok(tables)
}
