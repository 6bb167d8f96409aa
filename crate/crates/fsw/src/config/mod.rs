//! Run configuration files.
//!
//! Grammar: `[section]` headers, `key = value` lines and `#` comments.
//! Dimensional values need a unit suffix (`9 mm`, `400 rpm`, `8 kN`);
//! temperature tables are written `T v, T v, ... [K, W/mK]` and point lists
//! `x y z, x y z [mm]`. `[phase]` and `[probe]` may repeat; every other
//! section appears at most once. See `examples/weld.cfg` for a complete file.

mod document;
mod write;

use std::path::{Path, PathBuf};

use fsw_core::calibration::{CalibParameter, CalibrationOptions, FreeParameter};
use fsw_core::flow::FlowFieldConfig;
use fsw_core::material::{JohnsonCookParams, SellarsTegartParams, ThermophysicalTable};
use fsw_core::thermal::{
    DtPolicy, FluxProfile, GridResolution, HeatSourceModel, PowerModel, Probe, SolverConfig,
    SourceMode, WeldSetup, WeldSimulation, YieldSource,
};
use fsw_core::types::{
    BackingSpar, BottomContactCondition, GapConductance, ProcessParameters, ToolGeometry,
    WeldPhase, WeldSchedule, WorkpieceGeometry,
};

use crate::units::Dimension;
use document::{entry_quantity, parse_document, Reader, Section};
pub use write::serialize_config;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },

    #[error("line {line}: [{section}] is missing required key `{key}`")]
    MissingKey {
        line: usize,
        section: String,
        key: String,
    },

    #[error("missing required section [{0}]")]
    MissingSection(&'static str),

    #[error("line {line}: `{key}` needs a unit suffix ({accepted})")]
    MissingUnit {
        line: usize,
        key: String,
        accepted: String,
    },

    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: fsw_core::Error,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ConfigError::Syntax {
            line,
            message: message.into(),
        }
    }

    /// Line the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line, .. }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::MissingKey { line, .. }
            | ConfigError::MissingUnit { line, .. }
            | ConfigError::Invalid { line, .. } => Some(*line),
            ConfigError::MissingSection(_) | ConfigError::Io { .. } => None,
        }
    }
}

fn at<T>(line: usize, result: fsw_core::Result<T>) -> Result<T, ConfigError> {
    result.map_err(|source| ConfigError::Invalid { line, source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Probe traces are recorded every this many steps.
    pub every: usize,
    /// Field snapshots every this many steps; 0 disables them.
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            every: 10,
            snapshot_every: 0,
        }
    }
}

/// Tracer settings. Unset fields fall back to the tool and process values.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub shear_zone_radius: Option<f64>,
    /// Defaults to `delta * omega` of the process.
    pub omega: Option<f64>,
    pub circulation: f64,
    pub core_radius: f64,
    pub ring_radius: f64,
    pub duration: f64,
    pub dt: f64,
    pub seeds: Vec<[f64; 3]>,
    pub domain: Option<([f64; 3], [f64; 3])>,
}

impl FlowConfig {
    pub fn field(&self, setup: &WeldSetup) -> fsw_core::Result<FlowFieldConfig> {
        let omega = self
            .omega
            .unwrap_or(setup.heat.delta * setup.process.omega());
        let config = FlowFieldConfig::new(
            setup.tool.probe_radius(),
            self.shear_zone_radius
                .unwrap_or(setup.tool.shoulder_radius()),
            omega,
            setup.process.traverse_speed(),
            self.circulation,
            self.core_radius,
            self.ring_radius,
        )?;
        match self.domain {
            Some((min, max)) => config.with_domain(min, max),
            None => Ok(config),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub free: Vec<FreeParameter>,
    /// Measured traces in the trace CSV layout, relative to the config file.
    pub targets: PathBuf,
    /// Per-probe weights; probes not listed weigh 1.
    pub weights: Vec<(String, f64)>,
    pub max_evaluations: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    /// Grid refinement factor of a confirmation run at the optimum.
    pub confirm_refinement: Option<usize>,
}

impl CalibrationConfig {
    pub fn options(&self, setup: &WeldSetup, record_every: usize) -> CalibrationOptions {
        CalibrationOptions {
            max_evaluations: self.max_evaluations,
            tolerance: self.tolerance,
            initial_step: self.initial_step,
            record_every,
            confirm_resolution: self.confirm_refinement.map(|f| setup.resolution.refined(f)),
        }
    }

    pub fn weight(&self, probe: &str) -> f64 {
        self.weights
            .iter()
            .find(|(n, _)| n == probe)
            .map_or(1.0, |(_, w)| *w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub setup: WeldSetup,
    /// Interface temperature at which `heatgen` evaluates the flow stress;
    /// defaults to the ambient temperature.
    pub reference_temperature: Option<f64>,
    pub output: OutputConfig,
    pub flow: Option<FlowConfig>,
    pub calibration: Option<CalibrationConfig>,
}

impl RunConfig {
    pub fn reference_temperature(&self) -> f64 {
        self.reference_temperature
            .unwrap_or(self.setup.solver.ambient_temperature)
    }
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

const SINGLE: [&str; 13] = [
    "tool",
    "process",
    "workpiece",
    "material",
    "backing",
    "heat",
    "johnson_cook",
    "sellars_tegart",
    "solver",
    "grid",
    "output",
    "flow",
    "calibration",
];

struct Sections {
    single: Vec<(&'static str, Section)>,
    phases: Vec<Section>,
    probes: Vec<Section>,
}

impl Sections {
    fn split(sections: Vec<Section>) -> Result<Self, ConfigError> {
        let mut out = Sections {
            single: Vec::new(),
            phases: Vec::new(),
            probes: Vec::new(),
        };
        for s in sections {
            match s.name.as_str() {
                "phase" => out.phases.push(s),
                "probe" => out.probes.push(s),
                name => {
                    let known = SINGLE.iter().find(|n| **n == name).ok_or_else(|| {
                        ConfigError::syntax(s.line, format!("unknown section [{name}]"))
                    })?;
                    if out.single.iter().any(|(n, _)| n == known) {
                        return Err(ConfigError::syntax(
                            s.line,
                            format!("section [{name}] appears twice"),
                        ));
                    }
                    out.single.push((known, s));
                }
            }
        }
        Ok(out)
    }

    fn take(&mut self, name: &str) -> Option<Reader> {
        let at = self.single.iter().position(|(n, _)| *n == name)?;
        Some(Reader::new(self.single.remove(at).1))
    }

    fn require(&mut self, name: &'static str) -> Result<Reader, ConfigError> {
        self.take(name).ok_or(ConfigError::MissingSection(name))
    }
}

fn parse_tool(mut r: Reader) -> Result<ToolGeometry, ConfigError> {
    let rs = r.quantity("shoulder_radius", Dimension::Length)?;
    let rp = r.quantity("probe_radius", Dimension::Length)?;
    let hp = r.quantity("probe_height", Dimension::Length)?;
    let alpha = r
        .opt_quantity("cone_angle", Dimension::Angle)?
        .unwrap_or(0.0);
    let tilt = r.opt_quantity("tilt_angle", Dimension::Angle)?;
    let line = r.line();
    r.finish()?;
    let tool = at(line, ToolGeometry::new(rs, rp, hp, alpha))?;
    match tilt {
        Some(t) => at(line, tool.with_tilt(t)),
        None => Ok(tool),
    }
}

fn parse_process(mut r: Reader) -> Result<ProcessParameters, ConfigError> {
    let line = r.line();
    let omega = r.quantity("omega", Dimension::AngularSpeed)?;
    let speed = r.quantity("traverse_speed", Dimension::Speed)?;
    let force = r.quantity("downward_force", Dimension::Force)?;
    let torque = r.opt_quantity("torque", Dimension::Torque)?;
    let traverse_force = r.opt_quantity("traverse_force", Dimension::Force)?;
    let efficiency = r.opt_number("efficiency")?;
    r.finish()?;
    let mut p = at(line, ProcessParameters::new(omega, speed, force))?;
    if let Some(m) = torque {
        p = at(line, p.with_torque(m))?;
    }
    if let Some(f) = traverse_force {
        p = at(line, p.with_traverse_force(f))?;
    }
    if let Some(e) = efficiency {
        p = at(line, p.with_efficiency(e))?;
    }
    Ok(p)
}

fn parse_material(mut r: Reader) -> Result<ThermophysicalTable, ConfigError> {
    let line = r.line();
    let density = r.quantity("density", Dimension::Density)?;
    let k = r.table("conductivity", Dimension::Conductivity)?;
    let cp = r.table("specific_heat", Dimension::SpecificHeat)?;
    let sy = r.table("yield_stress", Dimension::Stress)?;
    let emissivity = r.opt_number("emissivity")?.unwrap_or(0.0);
    r.finish()?;
    at(
        line,
        ThermophysicalTable::new(density, k, cp, sy, emissivity),
    )
}

fn parse_johnson_cook(mut r: Reader) -> Result<YieldSource, ConfigError> {
    let line = r.line();
    let a = r.quantity("a", Dimension::Stress)?;
    let b = r.quantity("b", Dimension::Stress)?;
    let c = r.number("c")?;
    let n = r.number("n")?;
    let m = r.number("m")?;
    let melt = r.quantity("melt_temperature", Dimension::Temperature)?;
    let reference = r.quantity("reference_temperature", Dimension::Temperature)?;
    let rate0 = r.quantity("reference_strain_rate", Dimension::StrainRate)?;
    let strain = r.number("strain")?;
    let strain_rate = r.quantity("strain_rate", Dimension::StrainRate)?;
    r.finish()?;
    Ok(YieldSource::JohnsonCook {
        params: at(
            line,
            JohnsonCookParams::new(a, b, c, n, m, melt, reference, rate0),
        )?,
        strain,
        strain_rate,
    })
}

fn parse_sellars_tegart(mut r: Reader) -> Result<YieldSource, ConfigError> {
    let line = r.line();
    let a = r.quantity("a", Dimension::StrainRate)?;
    let alpha = r.quantity("alpha", Dimension::InverseStress)?;
    let n = r.number("n")?;
    let q = r.quantity("activation_energy", Dimension::MolarEnergy)?;
    let strain_rate = r.quantity("strain_rate", Dimension::StrainRate)?;
    r.finish()?;
    Ok(YieldSource::SellarsTegart {
        params: at(line, SellarsTegartParams::new(a, alpha, n, q))?,
        strain_rate,
    })
}

fn parse_heat(
    mut r: Reader,
    sections: &mut Sections,
) -> Result<(HeatSourceModel, Option<f64>), ConfigError> {
    let line = r.line();
    let delta = r.number("delta")?;
    let mu = r.number("friction_coefficient")?;
    let gamma = r.opt_number("gamma")?;
    let power = r.choice(
        "power_model",
        &["analytical", "torque", "torque_traverse"],
        Some("analytical"),
    )?;
    let yield_line = r.line_of("yield_source");
    let source = r.choice(
        "yield_source",
        &["table", "johnson_cook", "sellars_tegart"],
        Some("table"),
    )?;
    let reference = r.opt_quantity("reference_temperature", Dimension::Temperature)?;
    r.finish()?;

    let mut model = at(line, HeatSourceModel::new(delta, mu))?;
    model.gamma = gamma;
    model.power_model = match power {
        "analytical" => PowerModel::Analytical,
        "torque" => PowerModel::Torque {
            include_traverse: false,
        },
        _ => PowerModel::Torque {
            include_traverse: true,
        },
    };
    let jc = sections.take("johnson_cook");
    let st = sections.take("sellars_tegart");
    let unused = |r: &Option<Reader>, name: &str| match r {
        Some(r) if source != name => Err(ConfigError::syntax(
            r.line(),
            format!("[{name}] is given but yield_source = {source}"),
        )),
        _ => Ok(()),
    };
    unused(&jc, "johnson_cook")?;
    unused(&st, "sellars_tegart")?;
    let missing = |name: &str| {
        ConfigError::syntax(
            yield_line,
            format!("yield_source = {name} needs a [{name}] section"),
        )
    };
    model.yield_source = match source {
        "johnson_cook" => parse_johnson_cook(jc.ok_or_else(|| missing("johnson_cook"))?)?,
        "sellars_tegart" => parse_sellars_tegart(st.ok_or_else(|| missing("sellars_tegart"))?)?,
        _ => YieldSource::Table,
    };
    Ok((model, reference))
}

/// Returns the config and the line of the `bottom` key.
fn parse_solver(mut r: Reader) -> Result<(SolverConfig, usize), ConfigError> {
    let line = r.line();
    let ambient = r.quantity("ambient_temperature", Dimension::Temperature)?;
    let initial = r.opt_quantity("initial_temperature", Dimension::Temperature)?;
    let h_top = r.quantity("h_top", Dimension::HeatTransfer)?;
    let h_side = r.quantity("h_side", Dimension::HeatTransfer)?;
    let bottom_line = r.line_of("bottom");
    let kind = r.choice("bottom", &["adiabatic", "perfect", "gap", "spar"], None)?;
    let h_gap_line = r.line_of("h_gap");
    let h_gap = r.opt_quantity("h_gap", Dimension::HeatTransfer)?;
    let spar_line = r.line_of("spar_width");
    let spar_width = r.opt_quantity("spar_width", Dimension::Length)?;
    let spar_height = r.opt_quantity("spar_height", Dimension::Length)?;
    let backing_thickness = r.opt_quantity("backing_thickness", Dimension::Length)?;
    let profile = r.choice("flux_profile", &["uniform", "linear_r"], Some("uniform"))?;
    let mode = r.choice("source_mode", &["surface", "volumetric"], Some("surface"))?;
    let dt = r.take("dt");
    r.finish()?;

    let bottom = match kind {
        "adiabatic" => BottomContactCondition::Adiabatic,
        "perfect" => BottomContactCondition::PerfectContact,
        "gap" => {
            let h = h_gap
                .ok_or_else(|| ConfigError::syntax(bottom_line, "bottom = gap needs `h_gap`"))?;
            BottomContactCondition::GapConductance(at(h_gap_line, GapConductance::new(h))?)
        }
        _ => {
            let (Some(w), Some(h)) = (spar_width, spar_height) else {
                return Err(ConfigError::syntax(
                    bottom_line,
                    "bottom = spar needs `spar_width` and `spar_height`",
                ));
            };
            BottomContactCondition::SparContact(at(spar_line, BackingSpar::new(w, h))?)
        }
    };
    if kind != "gap" && h_gap.is_some() {
        return Err(ConfigError::syntax(
            h_gap_line,
            format!("`h_gap` does not apply to bottom = {kind}"),
        ));
    }
    if kind != "spar" && (spar_width.is_some() || spar_height.is_some()) {
        return Err(ConfigError::syntax(
            spar_line,
            format!("spar dimensions do not apply to bottom = {kind}"),
        ));
    }

    let mut config = at(line, SolverConfig::new(ambient, h_top, h_side, bottom))?;
    config.initial_temperature = initial;
    if let Some(b) = backing_thickness {
        config.backing_thickness = b;
    }
    config.flux_profile = if profile == "linear_r" {
        FluxProfile::LinearInR
    } else {
        FluxProfile::Uniform
    };
    config.source_mode = if mode == "volumetric" {
        SourceMode::SurfacePlusVolumetric
    } else {
        SourceMode::SurfaceFlux
    };
    config.dt_policy = match dt {
        Some(entry) if entry.value != "auto" => {
            DtPolicy::Fixed(entry_quantity(&entry, Dimension::Time)?)
        }
        _ => DtPolicy::Auto,
    };
    at(line, config.validate())?;
    Ok((config, bottom_line))
}

fn parse_phase(mut r: Reader, process: &ProcessParameters) -> Result<WeldPhase, ConfigError> {
    let line = r.line();
    let kind = r.choice("kind", &["plunge", "dwell", "traverse"], None)?;
    let duration = r.quantity("duration", Dimension::Time)?;
    let omega = r
        .opt_quantity("omega", Dimension::AngularSpeed)?
        .unwrap_or(process.omega());
    let phase = match kind {
        "plunge" => {
            let rate = r.quantity("plunge_rate", Dimension::Speed)?;
            WeldPhase::plunge(duration, omega, rate)
        }
        "dwell" => WeldPhase::dwell(duration, omega),
        _ => {
            let v = r
                .opt_quantity("traverse_speed", Dimension::Speed)?
                .unwrap_or(process.traverse_speed());
            WeldPhase::traverse(duration, omega, v)
        }
    };
    r.finish()?;
    at(line, phase)
}

fn parse_probe(mut r: Reader) -> Result<(Probe, usize), ConfigError> {
    let line = r.line();
    let name_line = r.line_of("name");
    let name = r.text("name")?;
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(ConfigError::syntax(
            name_line,
            format!("probe name `{name}` may only use letters, digits, `_` and `-`"),
        ));
    }
    let x = r.quantity("x", Dimension::Length)?;
    let y = r.quantity("y", Dimension::Length)?;
    let z = r.quantity("z", Dimension::Length)?;
    r.finish()?;
    Ok((Probe::new(name, [x, y, z]), line))
}

fn parse_output(mut r: Reader) -> Result<OutputConfig, ConfigError> {
    let defaults = OutputConfig::default();
    let out = OutputConfig {
        directory: r
            .opt_text("directory")
            .map_or(defaults.directory, PathBuf::from),
        every: r.opt_count("every")?.unwrap_or(defaults.every),
        snapshot_every: r
            .opt_count("snapshot_every")?
            .unwrap_or(defaults.snapshot_every),
    };
    if out.every == 0 {
        return Err(ConfigError::syntax(
            r.line_of("every"),
            "`every` must be at least 1",
        ));
    }
    r.finish()?;
    Ok(out)
}

fn parse_flow(mut r: Reader, setup: &WeldSetup) -> Result<FlowConfig, ConfigError> {
    let line = r.line();
    let flow = FlowConfig {
        shear_zone_radius: r.opt_quantity("shear_zone_radius", Dimension::Length)?,
        omega: r.opt_quantity("omega", Dimension::AngularSpeed)?,
        circulation: r.quantity("circulation", Dimension::Circulation)?,
        core_radius: r.quantity("core_radius", Dimension::Length)?,
        ring_radius: r.quantity("ring_radius", Dimension::Length)?,
        duration: r.quantity("duration", Dimension::Time)?,
        dt: r.quantity("dt", Dimension::Time)?,
        seeds: r.points("seeds")?,
        domain: match (r.opt_point("domain_min")?, r.opt_point("domain_max")?) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                return Err(ConfigError::syntax(
                    line,
                    "give both `domain_min` and `domain_max` or neither",
                ))
            }
        },
    };
    r.finish()?;
    if !(flow.duration > 0.0 && flow.dt > 0.0) {
        return Err(ConfigError::syntax(
            line,
            "flow `duration` and `dt` must be positive",
        ));
    }
    at(line, flow.field(setup))?;
    Ok(flow)
}

/// `lo hi` with an optional unit for dimensional parameters.
fn parse_bounds(
    r: &mut Reader,
    key: &str,
    parameter: CalibParameter,
) -> Result<FreeParameter, ConfigError> {
    let Some(entry) = r.take(key) else {
        return Ok(FreeParameter::new(parameter));
    };
    let tokens: Vec<&str> = entry.value.split_whitespace().collect();
    let err = || ConfigError::syntax(entry.line, format!("`{key}` expects `lower upper`"));
    let (lo, hi) = match tokens.as_slice() {
        [a, b, ..] => (
            a.parse::<f64>().map_err(|_| err())?,
            b.parse::<f64>().map_err(|_| err())?,
        ),
        _ => return Err(err()),
    };
    let unit = tokens[2..].join(" ");
    let (lo, hi) = if parameter == CalibParameter::GapConductance {
        if unit.is_empty() {
            return Err(ConfigError::MissingUnit {
                line: entry.line,
                key: key.to_string(),
                accepted: Dimension::HeatTransfer.accepted(),
            });
        }
        let conv = |v| {
            Dimension::HeatTransfer.to_si(v, &unit).ok_or_else(|| {
                ConfigError::syntax(entry.line, format!("unit `{unit}` not accepted"))
            })
        };
        (conv(lo)?, conv(hi)?)
    } else if !unit.is_empty() {
        return Err(ConfigError::syntax(
            entry.line,
            format!("`{key}` is dimensionless"),
        ));
    } else {
        (lo, hi)
    };
    at(entry.line, FreeParameter::with_bounds(parameter, lo, hi))
}

fn parse_calibration(mut r: Reader, setup: &WeldSetup) -> Result<CalibrationConfig, ConfigError> {
    let free_line = r.line_of("free");
    let names = r.text("free")?;
    let mut params = Vec::new();
    for name in names.split(',').map(str::trim) {
        let p = CalibParameter::from_name(name).ok_or_else(|| {
            ConfigError::syntax(
                free_line,
                format!("unknown parameter `{name}` (use delta, mu, eta or h_gap)"),
            )
        })?;
        if params.contains(&p) {
            return Err(ConfigError::syntax(
                free_line,
                format!("`{name}` listed twice"),
            ));
        }
        if p == CalibParameter::GapConductance && p.read(setup).is_none() {
            return Err(ConfigError::syntax(
                free_line,
                "h_gap can only be fitted with bottom = gap",
            ));
        }
        params.push(p);
    }
    let mut free = Vec::new();
    for p in params {
        free.push(parse_bounds(&mut r, &format!("{}_bounds", p.name()), p)?);
    }
    let defaults = CalibrationOptions::default();
    let weights_line = r.line_of("weights");
    let weights = match r.opt_text("weights") {
        None => Vec::new(),
        Some(text) => text
            .split(',')
            .map(|item| {
                let (name, w) = item.split_once(':')?;
                let w = w
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|w| *w > 0.0 && w.is_finite())?;
                Some((name.trim().to_string(), w))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                ConfigError::syntax(
                    weights_line,
                    "`weights` expects `probe: w, probe: w` with w > 0",
                )
            })?,
    };
    let config = CalibrationConfig {
        free,
        targets: PathBuf::from(r.text("targets")?),
        weights,
        max_evaluations: r
            .opt_count("max_evaluations")?
            .unwrap_or(defaults.max_evaluations),
        tolerance: r.opt_number("tolerance")?.unwrap_or(defaults.tolerance),
        initial_step: r
            .opt_number("initial_step")?
            .unwrap_or(defaults.initial_step),
        confirm_refinement: r.opt_count("confirm_refinement")?,
    };
    let line = r.line();
    r.finish()?;
    for (name, _) in &config.weights {
        if !setup.probes.iter().any(|p| &p.name == name) {
            return Err(ConfigError::syntax(
                weights_line,
                format!("weight given for unknown probe `{name}`"),
            ));
        }
    }
    if config.max_evaluations == 0 || config.confirm_refinement == Some(0) {
        return Err(ConfigError::syntax(
            line,
            "`max_evaluations` and `confirm_refinement` must be positive",
        ));
    }
    if !(config.tolerance > 0.0 && config.initial_step > 0.0 && config.initial_step <= 1.0) {
        return Err(ConfigError::syntax(
            line,
            "`tolerance` must be > 0 and `initial_step` in (0, 1]",
        ));
    }
    Ok(config)
}

/// Parses and fully validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut sections = Sections::split(parse_document(text)?)?;

    let tool = parse_tool(sections.require("tool")?)?;
    let process = parse_process(sections.require("process")?)?;

    let mut r = sections.require("workpiece")?;
    let wp_line = r.line();
    let length = r.quantity("length", Dimension::Length)?;
    let width = r.quantity("width", Dimension::Length)?;
    let thickness = r.quantity("thickness", Dimension::Length)?;
    let joint = r.opt_quantity("joint_line", Dimension::Length)?;
    let start_line = r.line_of("start_x");
    let start_x = r.quantity("start_x", Dimension::Length)?;
    r.finish()?;
    let mut workpiece = at(wp_line, WorkpieceGeometry::new(length, width, thickness))?;
    if let Some(y) = joint {
        workpiece = at(wp_line, workpiece.with_joint_line(y))?;
    }
    at(wp_line, workpiece.check_tool(&tool))?;

    let material = parse_material(sections.require("material")?)?;
    let backing = sections.take("backing").map(parse_material).transpose()?;
    let (heat, reference_temperature) = {
        let r = sections.require("heat")?;
        parse_heat(r, &mut sections)?
    };
    let (solver, bottom_line) = parse_solver(sections.require("solver")?)?;

    let mut r = sections.require("grid")?;
    let grid_line = r.line();
    let resolution = at(
        grid_line,
        GridResolution::new(r.count("nx")?, r.count("ny")?, r.count("nz")?),
    )?;
    r.finish()?;

    if sections.phases.is_empty() {
        return Err(ConfigError::MissingSection("phase"));
    }
    let first_phase = sections.phases[0].line;
    let phases = std::mem::take(&mut sections.phases)
        .into_iter()
        .map(|s| parse_phase(Reader::new(s), &process))
        .collect::<Result<Vec<_>, _>>()?;
    let schedule = at(first_phase, WeldSchedule::new(phases))?;

    let mut probes = Vec::new();
    for s in std::mem::take(&mut sections.probes) {
        let (probe, line) = parse_probe(Reader::new(s))?;
        if probes
            .iter()
            .any(|(p, _): &(Probe, usize)| p.name == probe.name)
        {
            return Err(ConfigError::syntax(
                line,
                format!("probe name `{}` used twice", probe.name),
            ));
        }
        probes.push((probe, line));
    }

    // Geometry cross-checks, each tied to the line that can fix it.
    if solver.bottom.has_backing() && backing.is_none() {
        return Err(ConfigError::syntax(
            bottom_line,
            format!(
                "bottom = {} needs a [backing] section",
                solver.bottom.name()
            ),
        ));
    }
    let depth = match solver.bottom {
        BottomContactCondition::Adiabatic => 0.0,
        BottomContactCondition::SparContact(s) => s.height(),
        _ => solver.backing_thickness,
    };
    for (p, line) in &probes {
        let [x, y, z] = p.position;
        if !(0.0..=length).contains(&x)
            || !(0.0..=width).contains(&y)
            || !(-depth..=thickness).contains(&z)
        {
            return Err(ConfigError::syntax(
                *line,
                format!("probe `{}` lies outside the domain", p.name),
            ));
        }
    }
    let rs = tool.shoulder_radius();
    let end_x = start_x + schedule.traverse_distance();
    if start_x - rs < 0.0 || end_x + rs > length {
        return Err(ConfigError::syntax(
            start_line,
            format!(
                "the shoulder must stay on the plate: x runs from {start_x} m to {end_x} m with radius {rs} m on a {length} m plate"
            ),
        ));
    }
    let setup = WeldSetup {
        tool,
        workpiece,
        process,
        heat,
        material,
        backing,
        solver,
        resolution,
        schedule,
        start_x,
        probes: probes.into_iter().map(|(p, _)| p).collect(),
    };
    at(bottom_line, WeldSimulation::new(setup.clone()).map(|_| ()))?;

    let output = sections
        .take("output")
        .map(parse_output)
        .transpose()?
        .unwrap_or_default();
    let flow = sections
        .take("flow")
        .map(|r| parse_flow(r, &setup))
        .transpose()?;
    let calibration = sections
        .take("calibration")
        .map(|r| parse_calibration(r, &setup))
        .transpose()?;
    Ok(RunConfig {
        setup,
        reference_temperature,
        output,
        flow,
        calibration,
    })
}
