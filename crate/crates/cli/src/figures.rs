//! Data behind each figure of the study, as fixed presets.

use rayon::prelude::*;
use serde_json::json;
use xychain::analysis::{self, EtcpGrid, Measure};
use xychain::finite::{self, ChainSpec};
use xychain::thermo::{factorization_field, ModelPoint};

use crate::commands::{numeric_at, push_series, RunError};
use crate::config::ConfigError;
use crate::output::Table;

pub const FIGURES: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 9];

pub fn reproduce(figure: u32) -> Result<Vec<Table>, RunError> {
    match figure {
        1 => figure1(),
        2 => figure2(),
        3 => figure3(),
        4 => figure4(),
        5 => figure5(),
        6 => pair_correlations("fig6", 5, &[1, 2], &analysis::lambda_grid(0.05, 1.0, 0.05), &analysis::lambda_grid(0.0, 3.0, 0.01)),
        7 => pair_correlations("fig7", 10, &[1, 5], &[0.2, 0.4, 0.6, 0.8, 1.0], &analysis::lambda_grid(0.0, 3.0, 0.05)),
        9 => figure9(),
        other => Err(RunError::Config(ConfigError(format!(
            "no preset for figure {other}; available: {FIGURES:?}"
        )))),
    }
}

fn long_table(name: &str, extra: &[&str]) -> Table {
    let mut cols: Vec<&str> = extra.to_vec();
    cols.extend(["lambda", "r", "value", "measure"]);
    Table::new(name, &cols)
}

/// EoF and discord against λ and r at γ = 0.5, T = 0.
fn figure1() -> Result<Vec<Table>, RunError> {
    let grid = analysis::lambda_grid(0.0, 3.0, 0.01);
    let rs: Vec<usize> = (1..=15).collect();
    let mut table = long_table("fig1", &[]).with_meta("gamma", 0.5).with_meta("temperature", 0.0);
    for m in [Measure::EntanglementOfFormation, Measure::Discord] {
        let series = analysis::thermo_sweep(m, 0.5, 0.0, &rs, &grid)?;
        push_series(&mut table, &series, m.name());
    }
    Ok(vec![table])
}

/// (a) ∂D/∂λ at γ = 0.5, r = 15; (b) D over (γ, λ) at r = 15, T = 0.
fn figure2() -> Result<Vec<Table>, RunError> {
    let grid = analysis::lambda_grid(0.0, 3.0, 1e-3);
    let series = analysis::thermo_sweep(Measure::Discord, 0.5, 0.0, &[15], &grid)?;
    let deriv = analysis::derivative_lambda(&series[0])?;
    let mut a = long_table("fig2a", &[]).with_meta("gamma", 0.5).with_meta("temperature", 0.0);
    push_series(&mut a, &series, "discord");
    push_series(&mut a, &[deriv], "d_discord_d_lambda");

    let grid = analysis::lambda_grid(0.0, 3.0, 0.01);
    let mut b = long_table("fig2b", &["gamma"]).with_meta("temperature", 0.0);
    for gamma in analysis::lambda_grid(0.05, 1.0, 0.05) {
        let s = analysis::thermo_sweep(Measure::Discord, gamma, 0.0, &[15], &grid)?;
        for (&l, &v) in s[0].grid().iter().zip(s[0].values()) {
            b.push(vec![gamma.into(), l.into(), 15usize.into(), v.into(), "discord".into()]);
        }
    }
    Ok(vec![a, b])
}

/// Nearest-neighbour EoF and discord and r = 15 discord, with λ-derivatives,
/// over (T, λ) at γ = 0.5.
fn figure3() -> Result<Vec<Table>, RunError> {
    let grid = analysis::lambda_grid(0.0, 3.0, 0.01);
    let mut table = long_table("fig3", &["temperature"]).with_meta("gamma", 0.5);
    for t in analysis::lambda_grid(0.02, 0.5, 0.02) {
        let mut push = |series: &analysis::SweepSeries, name: &str| {
            for (&l, &v) in series.grid().iter().zip(series.values()) {
                table.push(vec![t.into(), l.into(), series.meta.r.into(), v.into(), name.into()]);
            }
        };
        let eof = analysis::thermo_sweep(Measure::EntanglementOfFormation, 0.5, t, &[1], &grid)?;
        push(&eof[0], "eof");
        push(&analysis::derivative_lambda(&eof[0])?, "d_eof_d_lambda");
        let qd = analysis::thermo_sweep(Measure::Discord, 0.5, t, &[1, 15], &grid)?;
        for s in &qd {
            push(s, "discord");
            push(&analysis::derivative_lambda(s)?, "d_discord_d_lambda");
        }
    }
    Ok(vec![table])
}

/// Thermal critical point estimates and power-law fits: (a) γ = 0.5 with
/// r ∈ {5, 10, 15, 25}; (b) r = 15 with γ ∈ {0.15, 0.3, 0.5, 0.75, 1}.
fn figure4() -> Result<Vec<Table>, RunError> {
    let configs: [(&str, f64, usize); 9] = [
        ("a", 0.5, 5),
        ("a", 0.5, 10),
        ("a", 0.5, 15),
        ("a", 0.5, 25),
        ("b", 0.15, 15),
        ("b", 0.3, 15),
        ("b", 0.5, 15),
        ("b", 0.75, 15),
        ("b", 1.0, 15),
    ];
    let temps = analysis::default_fit_temperatures();
    let mut points = Table::new("fig4", &["panel", "gamma", "r", "temperature", "lambda_tc", "fit_lambda_tc"]);
    let mut fits = Table::new("fig4_fits", &["panel", "gamma", "r", "alpha", "nu", "residual"]);
    let mut cache: Vec<((f64, usize), analysis::EtcpSeries, analysis::FitResult)> = Vec::new();
    for (panel, gamma, r) in configs {
        if !cache.iter().any(|(k, _, _)| *k == (gamma, r)) {
            let series = analysis::etcp_series(gamma, r, &temps, &EtcpGrid::default())?;
            let fit = analysis::fit_ansatz(&series)?;
            cache.push(((gamma, r), series, fit));
        }
        let (_, series, fit) = cache.iter().find(|(k, _, _)| *k == (gamma, r)).expect("cached");
        for &(t, l) in series.samples() {
            points.push(vec![
                panel.into(),
                gamma.into(),
                r.into(),
                t.into(),
                l.into(),
                (fit.alpha * t.powf(fit.nu) + 1.0).into(),
            ]);
        }
        fits.push(vec![panel.into(), gamma.into(), r.into(), fit.alpha.into(), fit.nu.into(), fit.residual.into()]);
    }
    Ok(vec![points, fits])
}

/// (a–c) E₁ − E₀ over (γ, λ) for N = 3, 4, 5; (d) lowest four levels for
/// N = 5, γ = 0.5, λ ∈ [0.9, 1.5].
fn figure5() -> Result<Vec<Table>, RunError> {
    let gammas = analysis::lambda_grid(0.0, 1.0, 0.02);
    let grid = analysis::lambda_grid(0.0, 3.0, 0.01);
    let mut tables = Vec::new();
    for (panel, n) in [("a", 3usize), ("b", 4), ("c", 5)] {
        let mut table = Table::new(format!("fig5{panel}"), &["gamma", "lambda", "gap"]).with_meta("n", n);
        for &gamma in &gammas {
            let gaps: Vec<f64> = grid
                .par_iter()
                .map(|&l| {
                    let model = ModelPoint::ground(l, gamma).map_err(|e| numeric_at(l, gamma, 0.0, 0, e))?;
                    let spec = ChainSpec::new(n, model).map_err(|e| numeric_at(l, gamma, 0.0, 0, e))?;
                    let lv = finite::lowest_levels(&spec, 2);
                    Ok(lv[1] - lv[0])
                })
                .collect::<Result<_, RunError>>()?;
            for (&l, g) in grid.iter().zip(gaps) {
                table.push(vec![gamma.into(), l.into(), g.into()]);
            }
        }
        if let Ok(lf) = factorization_field(0.5) {
            table.summary.insert("factorization_field_gamma_0_5".into(), json!(lf));
        }
        tables.push(table);
    }
    let mut d = Table::new("fig5d", &["lambda", "level", "energy"]).with_meta("n", 5usize).with_meta("gamma", 0.5);
    for l in analysis::lambda_grid(0.9, 1.5, 0.002) {
        let model = ModelPoint::ground(l, 0.5).map_err(|e| numeric_at(l, 0.5, 0.0, 0, e))?;
        let spec = ChainSpec::new(5, model).map_err(|e| numeric_at(l, 0.5, 0.0, 0, e))?;
        for (k, e) in finite::lowest_levels(&spec, 4).into_iter().enumerate() {
            d.push(vec![l.into(), k.into(), e.into()]);
        }
    }
    tables.push(d);
    Ok(tables)
}

/// EoF and discord of ring pairs at T = 0 over (γ, λ).
fn pair_correlations(name: &str, n: usize, rs: &[usize], gammas: &[f64], grid: &[f64]) -> Result<Vec<Table>, RunError> {
    let mut table = long_table(name, &["gamma"]).with_meta("n", n).with_meta("temperature", 0.0);
    for &gamma in gammas {
        for m in [Measure::EntanglementOfFormation, Measure::Discord] {
            let series = analysis::finite_sweep(m, n, gamma, 0.0, rs, grid)?;
            for (i, &l) in grid.iter().enumerate() {
                for s in &series {
                    table.push(vec![gamma.into(), l.into(), s.meta.r.into(), s.values()[i].into(), m.name().into()]);
                }
            }
        }
    }
    Ok(vec![table])
}

/// Fidelity between N = 10 ring pairs and the infinite chain, γ ∈ {0.4, 0.8}.
fn figure9() -> Result<Vec<Table>, RunError> {
    let grid = analysis::lambda_grid(0.0, 3.0, 0.05);
    let rs: Vec<usize> = (1..=5).collect();
    let mut tables = Vec::new();
    for (panel, gamma) in [("a", 0.4), ("b", 0.8)] {
        let mut table = long_table(&format!("fig9{panel}"), &[]).with_meta("gamma", gamma).with_meta("n", 10usize);
        for p in analysis::fidelity_scan(10, gamma, 0.0, &rs, &grid)? {
            table.push(vec![p.lambda.into(), p.r.into(), p.fidelity.into(), "fidelity".into()]);
        }
        let lf = factorization_field(gamma).map_err(|e| numeric_at(f64::NAN, gamma, 0.0, 0, e))?;
        let at_lf: Vec<f64> = analysis::fidelity_scan(10, gamma, 0.0, &rs, &[lf])?
            .into_iter()
            .map(|p| p.fidelity)
            .collect();
        table.summary.insert("factorization_field".into(), json!(lf));
        table.summary.insert("fidelity_at_factorization_field".into(), json!(at_lf));
        tables.push(table);
    }
    Ok(tables)
}
