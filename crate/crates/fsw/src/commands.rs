//! The four subcommands. Each returns the text it prints on success.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use fsw_core::calibration::{calibrate as fit, CalibrationProblem, TargetTrace};
use fsw_core::flow::advect_tracers;
use fsw_core::heat::{
    heat_input, power_from_torque, surface_heat_components, total_heat_mixed, total_heat_sliding,
    total_heat_sticking,
};
use fsw_core::material::yield_shear_stress;
use fsw_core::thermal::{RunObserver, RunOptions, ThermalField, WeldSimulation};
use fsw_core::types::shoulder_contact_pressure;
use log::{info, warn};

use crate::config::{ConfigError, RunConfig};
use crate::output::{
    format_report, ledger_rows, read_traces, write_convergence, write_ledger, write_streamlines,
    write_table, write_traces, write_vtk, FormatError, Traces, VtkField,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    /// Bad input data other than the config itself, e.g. a target file.
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Runtime(#[from] fsw_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Runtime(_) | CliError::Output { .. } => 3,
        }
    }
}

pub struct Context {
    pub config: RunConfig,
    /// Relative paths inside the config resolve against this directory.
    pub config_dir: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(File) -> Result<(), FormatError>,
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let fail = |source: FormatError| CliError::Output {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| fail(e.into()))?;
    let file = File::create(&path).map_err(|e| fail(e.into()))?;
    body(file).map_err(fail)?;
    info!("wrote {}", path.display());
    Ok(path)
}

/// Heat generation breakdown of the configured tool and process.
pub fn heatgen(ctx: &Context) -> Result<String, CliError> {
    let s = &ctx.config.setup;
    let (tool, p) = (&s.tool, &s.process);
    let omega = p.omega();
    let t_ref = ctx.config.reference_temperature();
    let sigma = s.heat.yield_source.flow_stress(&s.material, t_ref)?;
    let pressure = shoulder_contact_pressure(p.downward_force(), tool)?;
    let mu = s.heat.friction_coefficient;
    let parts = surface_heat_components(tool, omega, yield_shear_stress(sigma));

    let mut rows: Vec<(String, f64, &str)> = vec![
        ("reference_temperature".into(), t_ref, "K"),
        ("flow_stress".into(), sigma, "Pa"),
        (
            "contact_shear_stress".into(),
            yield_shear_stress(sigma),
            "Pa",
        ),
        ("contact_pressure".into(), pressure, "Pa"),
        ("q1_shoulder".into(), parts.shoulder, "W"),
        ("q2_probe_side".into(), parts.probe_side, "W"),
        ("q3_probe_tip".into(), parts.probe_tip, "W"),
        ("q_total".into(), parts.total, "W"),
        ("fraction_shoulder".into(), parts.fractions.shoulder, "-"),
        (
            "fraction_probe_side".into(),
            parts.fractions.probe_side,
            "-",
        ),
        ("fraction_probe_tip".into(), parts.fractions.probe_tip, "-"),
        (
            "q_sticking".into(),
            total_heat_sticking(tool, omega, sigma),
            "W",
        ),
        (
            "q_sliding".into(),
            total_heat_sliding(tool, omega, mu, pressure),
            "W",
        ),
    ];
    let mixed = total_heat_mixed(tool, omega, s.heat.delta, sigma, mu, pressure)?;
    rows.push(("q_mixed".into(), mixed, "W"));
    rows.push((
        "heat_input_mixed".into(),
        heat_input(mixed, p.efficiency())?,
        "W",
    ));
    if let Some(torque) = p.torque() {
        let force = p.traverse_force();
        let power = power_from_torque(
            torque,
            omega,
            force.unwrap_or(0.0),
            p.traverse_speed(),
            force.is_some(),
        )?;
        rows.push(("power_rotational".into(), power.rotational, "W"));
        if force.is_some() {
            rows.push(("power_traverse".into(), power.traverse, "W"));
            rows.push(("traverse_share".into(), power.traverse_share(), "-"));
        }
        rows.push(("power_torque".into(), power.total, "W"));
        rows.push((
            "heat_input_torque".into(),
            heat_input(power.total, p.efficiency())?,
            "W",
        ));
    }

    write_file(&ctx.out, "heat_breakdown.csv", |f| write_table(f, &rows))?;
    let mut text = String::new();
    for (name, value, unit) in &rows {
        let _ = if *unit == "-" {
            writeln!(text, "{name:<24}{value:>16.4}")
        } else {
            writeln!(text, "{name:<24}{value:>16.6e} {unit}")
        };
    }
    Ok(text)
}

/// Writes a VTK snapshot every `every` steps.
struct Snapshots<'a> {
    dir: &'a Path,
    every: usize,
    error: Option<CliError>,
}

impl RunObserver for Snapshots<'_> {
    fn on_step(&mut self, step: usize, field: &ThermalField) {
        if self.error.is_some() || !step.is_multiple_of(self.every) {
            return;
        }
        let title = format!("temperature at t = {} s", field.time());
        let vtk = VtkField::new(title, field.grid(), field.temperatures(), field.tags());
        let name = format!("snapshot_{step:06}.vtk");
        if let Err(e) = write_file(self.dir, &name, |f| write_vtk(f, &vtk).map_err(Into::into)) {
            self.error = Some(e);
        }
    }
}

pub fn simulate(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let sim = WeldSimulation::new(cfg.setup.clone())?;
    let options = RunOptions {
        record_every: cfg.output.every,
    };
    let history = if cfg.output.snapshot_every > 0 {
        let mut snapshots = Snapshots {
            dir: &ctx.out,
            every: cfg.output.snapshot_every,
            error: None,
        };
        let h = sim.run(&options, &mut snapshots)?;
        if let Some(e) = snapshots.error {
            return Err(e);
        }
        h
    } else {
        sim.run(&options, &mut ())?
    };

    write_file(&ctx.out, "traces.csv", |f| {
        write_traces(f, &Traces::from(&history))
    })?;
    write_file(&ctx.out, "energy_ledger.csv", |f| {
        write_ledger(f, &ledger_rows(&history))
    })?;
    let peak = VtkField::new(
        "peak temperature",
        &history.grid,
        &history.peak,
        &history.tags,
    );
    write_file(&ctx.out, "peak_temperature.vtk", |f| {
        write_vtk(f, &peak).map_err(Into::into)
    })?;

    let (cell, t_peak) = history.peak_temperature();
    let (i, j, k) = history.grid.coords(cell);
    let c = history.grid.center(i, j, k);
    let mut text = format!(
        "{} steps, {:.3} s simulated\npeak temperature {:.2} K at ({:.4}, {:.4}, {:.4}) m\n",
        history.steps,
        history.times.last().copied().unwrap_or(0.0),
        t_peak,
        c[0],
        c[1],
        c[2]
    );
    let l = &history.ledger;
    let _ = writeln!(
        text,
        "energy: deposited {:.6e} J, stored {:.6e} J, lost {:.6e} J, closure error {:.2e}",
        l.deposited,
        l.stored,
        l.total_loss(),
        l.relative_error()
    );
    Ok(text)
}

pub fn flow(ctx: &Context) -> Result<String, CliError> {
    let cfg = ctx
        .config
        .flow
        .as_ref()
        .ok_or(ConfigError::MissingSection("flow"))?;
    let field = cfg.field(&ctx.config.setup)?;
    let results = advect_tracers(&cfg.seeds, &field, cfg.duration, cfg.dt)?;
    let mut text = String::new();
    let mut lines = Vec::with_capacity(results.len());
    for (id, r) in results.iter().enumerate() {
        match r {
            Ok(line) => {
                let _ = writeln!(
                    text,
                    "tracer {id}: {} points, {}",
                    line.points.len(),
                    line.status.name()
                );
                lines.push(Some(line));
            }
            Err(e) => {
                warn!("tracer {id} skipped: {e}");
                let _ = writeln!(text, "tracer {id}: skipped ({e})");
                lines.push(None);
            }
        }
    }
    write_file(&ctx.out, "streamlines.csv", |f| {
        write_streamlines(f, &lines)
    })?;
    Ok(text)
}

fn load_targets(
    ctx: &Context,
    path: &Path,
    weight: impl Fn(&str) -> f64,
) -> Result<Vec<TargetTrace>, CliError> {
    let path = ctx.config_dir.join(path);
    let input = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let file = File::open(&path).map_err(|e| input(e.to_string()))?;
    let traces = read_traces(file).map_err(|e| input(e.to_string()))?;
    let probes = &ctx.config.setup.probes;
    traces
        .probes
        .iter()
        .zip(traces.samples)
        .map(|(name, temps)| {
            let probe = probes.iter().find(|p| &p.name == name).ok_or_else(|| {
                input(format!(
                    "column `{name}_K` does not match any configured probe"
                ))
            })?;
            TargetTrace::new(probe.clone(), traces.times.clone(), temps, weight(name))
                .map_err(|e| input(e.to_string()))
        })
        .collect()
}

pub fn calibrate(ctx: &Context) -> Result<String, CliError> {
    let cfg = ctx
        .config
        .calibration
        .as_ref()
        .ok_or(ConfigError::MissingSection("calibration"))?;
    let setup = &ctx.config.setup;
    let targets = load_targets(ctx, &cfg.targets, |p| cfg.weight(p))?;
    let problem = CalibrationProblem::new(setup.clone(), cfg.free.clone(), targets)
        .and_then(|p| p.with_options(cfg.options(setup, ctx.config.output.every)))
        .map_err(|e| CliError::Input(e.to_string()))?;
    let report = fit(&problem, ctx.seed)?;
    let text = format_report(&report, ctx.seed);
    write_file(&ctx.out, "calibration_report.txt", |mut f| {
        use std::io::Write;
        f.write_all(text.as_bytes()).map_err(Into::into)
    })?;
    write_file(&ctx.out, "calibration_convergence.csv", |f| {
        write_convergence(f, &report)
    })?;
    Ok(text)
}
