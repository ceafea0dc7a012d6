//! CSV and JSON emission plus the human-readable run summary.
//!
//! Data files carry speeds in rad/s only; hertz appear in [`summary`] alone.

use serde::Serialize;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::integrator::{Trajectory, Verdict};
use crate::levelset::LevelSetSample;
use crate::params::{omega_to_hz, GeneratorParams};
use crate::scenario::{ScenarioResult, ScenarioSpec};
use crate::sweep::BasinReport;

pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "omega", "delta", "xi", "V", "Vdot"];

pub const BASIN_HEADER: [&str; 13] = [
    "row",
    "col",
    "omega0",
    "delta0",
    "xi0",
    "in_set",
    "exceptional",
    "verdict",
    "at_equilibrium",
    "t_end",
    "omega_end",
    "delta_end",
    "xi_end",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}` (csv|json)"))),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_trajectory_csv<W: Write>(w: W, tr: &Trajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    for s in &tr.samples {
        out.write_record([
            s.t.to_string(),
            s.state.omega.to_string(),
            opt(s.state.delta),
            opt(s.state.xi),
            opt(s.v),
            opt(s.vdot),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_basin_csv<W: Write>(w: W, report: &BasinReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(BASIN_HEADER)?;
    for c in &report.cells {
        out.write_record([
            c.row.to_string(),
            c.col.to_string(),
            c.initial.omega.to_string(),
            opt(c.initial.delta),
            opt(c.initial.xi),
            c.in_set.to_string(),
            c.exceptional.to_string(),
            c.verdict.label().to_string(),
            c.at_equilibrium.to_string(),
            c.t_end.to_string(),
            c.final_state.omega.to_string(),
            opt(c.final_state.delta),
            opt(c.final_state.xi),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_level_set_csv<W: Write>(w: W, sample: &LevelSetSample) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match sample {
        LevelSetSample::Interval { lower, upper } => {
            out.write_record(["omega"])?;
            out.write_record([lower.to_string()])?;
            out.write_record([upper.to_string()])?;
        }
        LevelSetSample::Curve { x_label, points } => {
            out.write_record([*x_label, "omega"])?;
            for [x, y] in points {
                out.write_record([x.to_string(), y.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ParamsDump {
    #[serde(rename = "J")]
    j: f64,
    #[serde(rename = "D_d")]
    d_d: f64,
    #[serde(flatten)]
    params: GeneratorParams,
}

pub fn params_dump(p: &GeneratorParams) -> serde_json::Value {
    serde_json::to_value(ParamsDump { j: p.j(), d_d: p.d_d(), params: *p })
        .expect("parameter dump is plain data")
}

/// Writes every artifact of `result` into `dir` and returns the paths written.
pub fn write_outputs(
    spec: &ScenarioSpec,
    result: &ScenarioResult,
    dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut written = Vec::new();

    let path = dir.join(format!("{}_params.json", spec.name));
    write_json(&path, &params_dump(&spec.params))?;
    written.push(path);

    for run in &result.trajectories {
        let path = dir.join(format!("{}_{}_{}.{ext}", spec.name, run.model, run.index));
        match format {
            Format::Csv => write_trajectory_csv(BufWriter::new(File::create(&path)?), &run.trajectory)?,
            Format::Json => write_json(&path, &run.trajectory)?,
        }
        written.push(path);
    }
    for report in &result.basins {
        let path = dir.join(format!("{}_{}_basin.{ext}", spec.name, report.model));
        match format {
            Format::Csv => write_basin_csv(BufWriter::new(File::create(&path)?), report)?,
            Format::Json => write_json(&path, report)?,
        }
        written.push(path);
    }
    if let Some((_, sample)) = &result.level_set {
        let path = dir.join(format!("{}_levelset.{ext}", spec.name));
        match format {
            Format::Csv => write_level_set_csv(BufWriter::new(File::create(&path)?), sample)?,
            Format::Json => write_json(&path, sample)?,
        }
        written.push(path);
    }
    if let Some(c) = &result.constants {
        let path = dir.join(format!("{}_constants.json", spec.name));
        write_json(&path, c)?;
        written.push(path);
    }
    Ok(written)
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Converged { to } => format!("converged to {:.4} Hz", omega_to_hz(to.omega)),
        Verdict::Diverged => "diverged".into(),
        Verdict::HitSingularity { t } => format!("hit singularity at t = {t:.4} s"),
        Verdict::MaxTime => "still moving at t_max".into(),
    }
}

pub fn summary(spec: &ScenarioSpec, result: &ScenarioResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {}", spec.name);
    for run in &result.trajectories {
        let tr = &run.trajectory;
        let first = tr.samples[0].state;
        let last = tr.final_state();
        let _ = writeln!(
            s,
            "  {:<26} #{}  f0 = {:.4} Hz  f_end = {:.4} Hz at t = {:.3} s  {}",
            run.model.name(),
            run.index,
            first.frequency_hz(),
            last.frequency_hz(),
            tr.final_time(),
            verdict_text(&tr.verdict),
        );
    }
    for b in &result.basins {
        let _ = writeln!(
            s,
            "  {:<26} basin {}x{}: {} in set, {} converged, {} diverged, {} singular, {} unresolved, {} violations",
            b.model.name(),
            b.rows,
            b.cols,
            b.count(|c| c.in_set),
            b.count(|c| c.verdict.is_converged()),
            b.count(|c| matches!(c.verdict, Verdict::Diverged)),
            b.count(|c| matches!(c.verdict, Verdict::HitSingularity { .. })),
            b.count(|c| matches!(c.verdict, Verdict::MaxTime)),
            b.violations().len(),
        );
    }
    if let Some((kind, sample)) = &result.level_set {
        match sample {
            LevelSetSample::Interval { lower, upper } => {
                let _ = writeln!(
                    s,
                    "  level set {kind:?}: {:.4} Hz .. {:.4} Hz",
                    omega_to_hz(*lower),
                    omega_to_hz(*upper)
                );
            }
            LevelSetSample::Curve { points, .. } => {
                let _ = writeln!(s, "  level set {kind:?}: {} boundary points", points.len());
            }
        }
    }
    if let Some(c) = &result.constants {
        let _ = writeln!(s, "  constant-load Delta = {}", c.discriminant);
        if let (Some(ws), Some(wu)) = (c.omega_s, c.omega_u) {
            let _ = writeln!(
                s,
                "  constant-load equilibria: stable {:.4} Hz, unstable {:.4} Hz",
                omega_to_hz(ws),
                omega_to_hz(wu)
            );
        }
        if let (Some(level), Some(bar), Some(minus)) = (c.c, c.delta_bar, c.delta_minus) {
            let _ = writeln!(s, "  infinite-bus level c = {level:.6e}, delta_bar = {bar:.6}, delta_minus = {minus:.6}");
        }
        for n in &c.notes {
            let _ = writeln!(s, "  note: {n}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, IntegrationConfig};
    use crate::params::{ModelKind, SimState};
    use std::f64::consts::PI;

    #[test]
    fn trajectory_csv_layout() {
        let p = GeneratorParams::from_momentum(0.2, 0.04, 2.0 * PI * 60.0)
            .unwrap()
            .with_powers(1.0, 2.0)
            .unwrap();
        let cfg = IntegrationConfig { t_max: 0.01, record_every: 50, ..IntegrationConfig::default_for(&p) };
        let tr = integrate(ModelKind::ConventionalLoad, &p, &SimState::load(p.omega_star()), &cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,omega,delta,xi,V,Vdot"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], "0");
        assert_eq!(&row[2..], ["", "", "", ""]);
        assert_eq!(text.lines().count(), 1 + tr.samples.len());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
