//! One function per verb; each resolves its config, runs, and writes artifacts.

use crate::config::{resolve, ConfigError, LabConfig};
use crate::{CliError, Verb};
use couette_lab::linear::{gaussian_data, linear_damping_series, loglog_slope};
use couette_lab::multiplier::{
    inequality_toolbox_check, lemma_sweep, weight_profile, LemmaId, LemmaReport, ToolId,
};
use couette_lab::report::{ArtifactWriter, Format};
use couette_lab::sim::run_simulation;
use couette_lab::spectral::io::write_snapshot;
use couette_lab::spectral::SpectralField;
use couette_lab::toy::{growth_envelope, toy_canonical};
use serde::Serialize;
use std::path::Path;
use toml::Table;

/// Run `verb`; `Ok(true)` when every pass criterion it checks holds.
pub fn dispatch(
    verb: &Verb,
    table: Table,
    overrides: &[String],
    out: &Path,
) -> Result<bool, CliError> {
    match verb {
        Verb::Linear => linear(table, overrides, out),
        Verb::Toy => toy(table, overrides, out),
        Verb::Weight => weight(table, overrides, out),
        Verb::Verify { lemma, tool } => verify(table, overrides, out, lemma, tool),
        Verb::Simulate => simulate(table, overrides, out),
    }
}

fn writer(out: &Path, config: &LabConfig) -> Result<ArtifactWriter, CliError> {
    let mut w = ArtifactWriter::new(out)?;
    let text = toml::to_string(config)
        .map_err(|e| ConfigError::Invalid(format!("cannot echo the resolved config: {e}")))?;
    w.write("config.toml", text.as_bytes())?;
    Ok(w)
}

fn require(ok: bool, key: &str, reason: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("`{key}` {reason}"))
    }
}

#[derive(Serialize)]
struct LinearSummary {
    fit_lo: f64,
    fit_hi: f64,
    slope_ux: f64,
    slope_uy: f64,
    pass: bool,
}

fn linear(table: Table, overrides: &[String], out: &Path) -> Result<bool, CliError> {
    let (cfg, grid) = resolve(table, overrides, |c| {
        let l = &c.linear;
        require(l.k_modes >= 1, "linear.k_modes", "must be at least 1")?;
        require(l.width > 0.0, "linear.width", "must be positive")?;
        require(
            l.t_min > 0.0 && l.t_max > l.t_min,
            "linear.t_max",
            "needs 0 < t_min < t_max",
        )?;
        require(l.samples >= 2, "linear.samples", "must be at least 2")?;
        require(l.fit.1 > l.fit.0, "linear.fit", "needs lo < hi")?;
        c.grid.build().map_err(|e| format!("grid: {e}"))
    })?;
    let l = &cfg.linear;
    let omega = gaussian_data(grid, l.k_modes, l.width, l.amplitude);
    let n = (l.samples - 1) as f64;
    let times: Vec<f64> = (0..l.samples)
        .map(|i| l.t_min * (l.t_max / l.t_min).powf(i as f64 / n))
        .collect();
    let rows =
        linear_damping_series(&omega, &times).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let slope = |pick: fn(&couette_lab::linear::DampingRow) -> f64| {
        loglog_slope(rows.iter().map(|r| (r.t, pick(r))), l.fit.0, l.fit.1)
            .map_err(|e| ConfigError::Invalid(format!("linear.fit: {e}")))
    };
    let (slope_ux, slope_uy) = (slope(|r| r.norm_ux)?, slope(|r| r.norm_uy)?);
    let summary = LinearSummary {
        fit_lo: l.fit.0,
        fit_hi: l.fit.1,
        slope_ux,
        slope_uy,
        pass: (slope_ux + 1.0).abs() <= 0.1 && (slope_uy + 2.0).abs() <= 0.1,
    };
    let mut w = writer(out, &cfg)?;
    w.write_records("damping", &rows, Format::Csv)?;
    w.write_object("slopes", &summary)?;
    w.finish()?;
    Ok(summary.pass)
}

fn toy(table: Table, overrides: &[String], out: &Path) -> Result<bool, CliError> {
    let (cfg, ()) = resolve(table, overrides, |c| {
        c.toy.params().validate().map_err(|e| format!("toy: {e}"))
    })?;
    let traj = toy_canonical(&cfg.toy.params()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let envelope = growth_envelope(&traj).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut w = writer(out, &cfg)?;
    w.write_records("trajectory", &traj.points, Format::Csv)?;
    w.write_object("envelope", &envelope)?;
    w.finish()?;
    Ok(true)
}

fn weight(table: Table, overrides: &[String], out: &Path) -> Result<bool, CliError> {
    let (cfg, ()) = resolve(table, overrides, |c| {
        let p = &c.weight_profile;
        c.weight.validate().map_err(|e| format!("weight: {e}"))?;
        require(
            p.mu.is_none_or(|m| m > 0.0),
            "weight_profile.mu",
            "must be positive",
        )?;
        require(p.eta.is_finite(), "weight_profile.eta", "must be finite")?;
        require(
            !p.ks.is_empty(),
            "weight_profile.ks",
            "must list at least one k",
        )?;
        require(
            p.samples >= 1,
            "weight_profile.samples",
            "must be at least 1",
        )?;
        require(
            p.t_min >= 0.0 && p.t_max >= p.t_min,
            "weight_profile.t_max",
            "needs 0 <= t_min <= t_max",
        )
    })?;
    let p = &cfg.weight_profile;
    let mu = p.mu.unwrap_or(cfg.weight.mu());
    let rows = weight_profile(&cfg.weight, mu, p.eta, &p.ks, &p.times())
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let mut w = writer(out, &cfg)?;
    w.write_records("weight_profile", &rows, Format::Csv)?;
    w.finish()?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyRow {
    id: String,
    samples: usize,
    max_ratio: f64,
    ceiling: Option<f64>,
    uncovered: Option<usize>,
    pass: bool,
}

enum Check {
    Lemma(LemmaId),
    Tool(ToolId),
}

fn verify(
    table: Table,
    overrides: &[String],
    out: &Path,
    lemmas: &[String],
    tools: &[String],
) -> Result<bool, CliError> {
    let mut checks = vec![];
    for id in lemmas {
        checks.push(Check::Lemma(
            id.parse()
                .map_err(|e| ConfigError::Invalid(format!("--lemma: {e}")))?,
        ));
    }
    for id in tools {
        checks.push(Check::Tool(
            id.parse()
                .map_err(|e| ConfigError::Invalid(format!("--tool: {e}")))?,
        ));
    }
    if checks.is_empty() {
        checks = LemmaId::ALL.into_iter().map(Check::Lemma).collect();
    }
    let (cfg, ()) = resolve(table, overrides, |c| {
        c.sweep.validate().map_err(|e| format!("sweep: {e}"))
    })?;
    let mut w = writer(out, &cfg)?;
    let mut rows = vec![];
    for check in &checks {
        let report: LemmaReport = match check {
            Check::Lemma(id) => lemma_sweep(*id, &cfg.sweep),
            Check::Tool(id) => inequality_toolbox_check(*id, &cfg.sweep),
        }
        .map_err(|e| ConfigError::Invalid(format!("sweep: {e}")))?;
        w.write_object(&report.lemma_id, &report)?;
        rows.push(VerifyRow {
            id: report.lemma_id.clone(),
            samples: report.samples,
            max_ratio: report.max_ratio,
            ceiling: report.ceiling,
            uncovered: report.uncovered,
            pass: report.pass,
        });
    }
    w.write_records("verify_summary", &rows, Format::Csv)?;
    w.finish()?;
    Ok(rows.iter().all(|r| r.pass))
}

#[derive(Serialize)]
struct RunSummary {
    steps: usize,
    dt: f64,
    t_final: f64,
    max_cfl: f64,
    abort: Option<String>,
    echo_pass: Option<bool>,
}

fn snapshot_bytes(field: &SpectralField) -> Result<Vec<u8>, CliError> {
    let mut buf = vec![];
    write_snapshot(field, &mut buf).map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(buf)
}

fn simulate(table: Table, overrides: &[String], out: &Path) -> Result<bool, CliError> {
    let (cfg, ()) = resolve(table, overrides, |c| {
        c.simulation()
            .validate()
            .map(|_| ())
            .map_err(|e| e.to_string())
    })?;
    let run = run_simulation(&cfg.simulation()).map_err(|e| CliError::Numerical(e.to_string()))?;
    let summary = RunSummary {
        steps: run.steps,
        dt: run.dt,
        t_final: run.final_field.time,
        max_cfl: run.max_cfl,
        abort: run.abort.clone(),
        echo_pass: run.echo.as_ref().map(|e| e.pass),
    };
    let mut w = writer(out, &cfg)?;
    w.write_records("energy", &run.reports, Format::Csv)?;
    for snap in &run.snapshots {
        w.write(
            &format!("snapshot_{:06}.bin", snap.step),
            &snapshot_bytes(&snap.field)?,
        )?;
    }
    w.write("final.bin", &snapshot_bytes(&run.final_field)?)?;
    if !run.echo_series.is_empty() {
        w.write_records("echo_series", &run.echo_series, Format::Csv)?;
    }
    if let Some(echo) = &run.echo {
        w.write_object("echo", echo)?;
    }
    w.write_object("summary", &summary)?;
    w.finish()?;
    if let Some(reason) = run.abort {
        return Err(CliError::Numerical(reason));
    }
    Ok(summary.echo_pass.unwrap_or(true))
}
