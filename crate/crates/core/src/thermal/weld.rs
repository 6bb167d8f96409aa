use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{require_positive, require_unit_interval, Error, Result};
use crate::heat::{
    heat_fractions, heat_input, partition_heat, power_from_torque, total_heat_mixed, HeatFractions,
};
use crate::material::{
    johnson_cook_yield, sellars_tegart_flow_stress, JohnsonCookParams, SellarsTegartParams,
    ThermophysicalTable,
};
use crate::math;
use crate::thermal::boundary::{BottomCoupling, Boundaries, Face, FaceCondition};
use crate::thermal::field::{CellTag, Grid, ThermalField};
use crate::thermal::solver::{ConductionSolver, EnergyLedger, Materials};
use crate::thermal::source::SourceLayout;
use crate::thermal::{DtPolicy, SolverConfig, SourceMode};
use crate::types::{
    shoulder_contact_pressure, BottomContactCondition, PhaseKind, ProcessParameters, ToolGeometry,
    WeldPhase, WeldSchedule, WorkpieceGeometry,
};

/// Number of cells across the workpiece. Backing layers are added below
/// with the same vertical spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl GridResolution {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::invalid(
                "grid resolution",
                "every axis needs at least one cell",
            ));
        }
        Ok(Self { nx, ny, nz })
    }

    /// Every axis multiplied by `factor`.
    pub fn refined(self, factor: usize) -> Self {
        Self {
            nx: self.nx * factor,
            ny: self.ny * factor,
            nz: self.nz * factor,
        }
    }
}

/// Where the flow stress entering the sticking heat comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YieldSource {
    /// Yield stress table of the workpiece material.
    Table,
    JohnsonCook {
        params: JohnsonCookParams,
        strain: f64,
        strain_rate: f64,
    },
    SellarsTegart {
        params: SellarsTegartParams,
        strain_rate: f64,
    },
}

impl YieldSource {
    /// Flow stress at `temperature`, Pa.
    pub fn flow_stress(&self, table: &ThermophysicalTable, temperature: f64) -> Result<f64> {
        match self {
            YieldSource::Table => Ok(table.yield_stress(temperature)),
            YieldSource::JohnsonCook {
                params,
                strain,
                strain_rate,
            } => johnson_cook_yield(*strain, *strain_rate, temperature, params),
            YieldSource::SellarsTegart {
                params,
                strain_rate,
            } => sellars_tegart_flow_stress(*strain_rate, temperature, params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerModel {
    /// Contact-stress integral over the tool surfaces, re-evaluated every step
    /// at the current interface temperature.
    Analytical,
    /// Measured torque, optionally plus the traverse force term.
    Torque { include_traverse: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSourceModel {
    pub delta: f64,
    pub friction_coefficient: f64,
    pub yield_source: YieldSource,
    pub power_model: PowerModel,
    /// Volumetric share; `None` takes the default of the source mode.
    pub gamma: Option<f64>,
}

impl HeatSourceModel {
    pub fn new(delta: f64, friction_coefficient: f64) -> Result<Self> {
        require_unit_interval("contact state variable", delta)?;
        crate::error::require_non_negative("friction coefficient", friction_coefficient)?;
        Ok(Self {
            delta,
            friction_coefficient,
            yield_source: YieldSource::Table,
            power_model: PowerModel::Analytical,
            gamma: None,
        })
    }
}

/// Named temperature sampling point.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub name: String,
    pub position: [f64; 3],
}

impl Probe {
    pub fn new(name: impl Into<String>, position: [f64; 3]) -> Self {
        Self {
            name: name.into(),
            position,
        }
    }
}

/// Everything a weld simulation needs.
///
/// Coordinates: the workpiece occupies `[0, L] x [0, W] x [0, t]` with its top
/// face at `z = t`; backing cells, when present, sit below `z = 0`. The tool
/// starts at `(start_x, joint line)` and travels towards +x.
#[derive(Debug, Clone, PartialEq)]
pub struct WeldSetup {
    pub tool: ToolGeometry,
    pub workpiece: WorkpieceGeometry,
    pub process: ProcessParameters,
    pub heat: HeatSourceModel,
    pub material: ThermophysicalTable,
    /// Required whenever the bottom condition includes a backing.
    pub backing: Option<ThermophysicalTable>,
    pub solver: SolverConfig,
    pub resolution: GridResolution,
    pub schedule: WeldSchedule,
    pub start_x: f64,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Record probe samples every this many steps (and always at the end).
    pub record_every: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { record_every: 10 }
    }
}

/// Callback invoked between steps, e.g. for periodic snapshots.
pub trait RunObserver {
    fn on_step(&mut self, step: usize, field: &ThermalField);
}

impl RunObserver for () {
    fn on_step(&mut self, _step: usize, _field: &ThermalField) {}
}

/// Energy balance of one schedule phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEnergy {
    pub kind: PhaseKind,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub ledger: EnergyLedger,
}

/// Output of a weld simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub probe_names: Vec<String>,
    pub times: Vec<f64>,
    /// `samples[p][n]` is probe `p` at `times[n]`.
    pub samples: Vec<Vec<f64>>,
    /// All-time maximum temperature per cell.
    pub peak: Vec<f64>,
    pub tags: Vec<CellTag>,
    pub grid: Grid,
    pub phases: Vec<PhaseEnergy>,
    pub ledger: EnergyLedger,
    pub steps: usize,
    /// Final tool position.
    pub tool_position: [f64; 2],
}

impl RunHistory {
    /// Highest peak temperature in the workpiece and its cell.
    pub fn peak_temperature(&self) -> (usize, f64) {
        self.peak
            .iter()
            .zip(&self.tags)
            .enumerate()
            .filter(|(_, (_, t))| **t == CellTag::Workpiece)
            .fold((0, f64::NEG_INFINITY), |best, (i, (v, _))| {
                if *v > best.1 {
                    (i, *v)
                } else {
                    best
                }
            })
    }

    pub fn trace(&self, probe: &str) -> Option<&[f64]> {
        let p = self.probe_names.iter().position(|n| n == probe)?;
        Some(&self.samples[p])
    }
}

/// A weld simulation ready to run.
#[derive(Debug, Clone)]
pub struct WeldSimulation {
    setup: WeldSetup,
    solver: ConductionSolver,
    fractions: HeatFractions,
    pressure: f64,
    gamma: f64,
}

impl WeldSimulation {
    pub fn new(setup: WeldSetup) -> Result<Self> {
        setup.solver.validate()?;
        setup.workpiece.check_tool(&setup.tool)?;
        let gamma = match (setup.solver.source_mode, setup.heat.gamma) {
            (SourceMode::SurfaceFlux, Some(g)) if g != 0.0 => {
                return Err(Error::invalid("gamma", "must be 0 in surface-flux mode"));
            }
            (mode, g) => require_unit_interval("gamma", g.unwrap_or(mode.default_gamma()))?,
        };
        if let PowerModel::Torque { .. } = setup.heat.power_model {
            if setup.process.torque().is_none() {
                return Err(Error::invalid(
                    "torque",
                    "the torque power model needs a measured torque",
                ));
            }
        }
        if let DtPolicy::Fixed(dt) = setup.solver.dt_policy {
            require_positive("fixed time step", dt)?;
        }

        let wp = &setup.workpiece;
        let res = setup.resolution;
        let dx = wp.length() / res.nx as f64;
        let dy = wp.width() / res.ny as f64;
        let dz = wp.thickness() / res.nz as f64;
        let y_joint = wp.joint_line_offset();

        let bottom = setup.solver.bottom;
        let backing_height = match bottom {
            BottomContactCondition::Adiabatic => 0.0,
            BottomContactCondition::PerfectContact | BottomContactCondition::GapConductance(_) => {
                setup.solver.backing_thickness
            }
            BottomContactCondition::SparContact(spar) => {
                if spar.width() > wp.width() {
                    return Err(Error::invalid(
                        "backing spar",
                        format!(
                            "width {} exceeds the workpiece width {}",
                            spar.width(),
                            wp.width()
                        ),
                    ));
                }
                spar.height()
            }
        };
        let nb = if bottom.has_backing() {
            (math::round(backing_height / dz) as usize).max(1)
        } else {
            0
        };
        if nb > 0 && setup.backing.is_none() {
            return Err(Error::invalid(
                "backing material",
                format!("required for the {} bottom condition", bottom.name()),
            ));
        }

        let grid = Grid::new(
            [res.nx, res.ny, res.nz + nb],
            [dx, dy, dz],
            [0.0, 0.0, -(nb as f64) * dz],
        )?;
        let mut tags = vec![CellTag::Workpiece; grid.len()];
        for k in 0..nb {
            for j in 0..grid.ny {
                let yc = (j as f64 + 0.5) * dy;
                let tag = match bottom {
                    BottomContactCondition::SparContact(spar)
                        if (yc - y_joint).abs() > (0.5 * spar.width()).max(0.5 * dy) =>
                    {
                        CellTag::Void
                    }
                    _ => CellTag::Backing,
                };
                for i in 0..grid.nx {
                    tags[grid.index(i, j, k)] = tag;
                }
            }
        }

        let mut field = ThermalField::new(grid, tags, setup.solver.initial_temperature())?;
        field.set_tool_position([setup.start_x, y_joint]);
        for probe in &setup.probes {
            if field.sample(probe.position).is_none() {
                return Err(Error::invalid(
                    "probe",
                    format!(
                        "{} at {:?} lies outside the domain",
                        probe.name, probe.position
                    ),
                ));
            }
        }
        // Catch a starting footprint outside the plate before any work is done.
        SourceLayout::build(
            &field,
            &setup.tool,
            [setup.start_x, y_joint],
            setup.solver.flux_profile,
        )?;

        let ambient = setup.solver.ambient_temperature;
        let side = FaceCondition::Convective {
            h: setup.solver.h_side,
            ambient,
            emissivity: 0.0,
        };
        let mut boundaries = Boundaries::adiabatic()
            .with(Face::XMin, side)
            .with(Face::XMax, side)
            .with(Face::YMin, side)
            .with(Face::YMax, side)
            .with(
                Face::ZMax,
                FaceCondition::Convective {
                    h: setup.solver.h_top,
                    ambient,
                    emissivity: setup.material.emissivity(),
                },
            );
        boundaries.stefan_boltzmann = setup.solver.stefan_boltzmann;
        if nb > 0 {
            boundaries = boundaries.with(Face::ZMin, side);
        }
        let interface = match bottom {
            BottomContactCondition::GapConductance(gap) => BottomCoupling::Gap(gap.value()),
            BottomContactCondition::Adiabatic => BottomCoupling::Insulated,
            _ => BottomCoupling::Perfect,
        };
        let materials = Materials {
            workpiece: setup.material.clone(),
            backing: if nb > 0 { setup.backing.clone() } else { None },
        };
        let solver = ConductionSolver::new(field, materials, boundaries)?.with_interface(interface);
        let pressure = shoulder_contact_pressure(setup.process.downward_force(), &setup.tool)?;
        let fractions = heat_fractions(&setup.tool);
        Ok(Self {
            setup,
            solver,
            fractions,
            pressure,
            gamma,
        })
    }

    pub fn setup(&self) -> &WeldSetup {
        &self.setup
    }

    pub fn field(&self) -> &ThermalField {
        self.solver.field()
    }

    pub fn solver(&self) -> &ConductionSolver {
        &self.solver
    }

    /// Volumetric share of the heat used by this run.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Heat entering the workpiece in W for a phase at the given interface
    /// temperature, before any plunge ramp.
    pub fn heat_power(&self, phase: &WeldPhase, interface_temperature: f64) -> Result<f64> {
        let s = &self.setup;
        let omega = phase.omega();
        let tool_power = match s.heat.power_model {
            PowerModel::Analytical => {
                let sigma = s
                    .heat
                    .yield_source
                    .flow_stress(&s.material, interface_temperature)?;
                total_heat_mixed(
                    &s.tool,
                    omega,
                    s.heat.delta,
                    sigma,
                    s.heat.friction_coefficient,
                    self.pressure,
                )?
            }
            PowerModel::Torque { include_traverse } => {
                let torque = s.process.torque().unwrap_or(0.0);
                let force = s.process.traverse_force().unwrap_or(0.0);
                power_from_torque(
                    torque,
                    omega,
                    force,
                    phase.traverse_speed(),
                    include_traverse,
                )?
                .total
            }
        };
        heat_input(tool_power, s.process.efficiency())
    }

    /// Mean top-surface temperature under the shoulder, weighted by cover.
    fn interface_temperature(&self, layout: &SourceLayout) -> f64 {
        let field = self.solver.field();
        let g = field.grid();
        let top = g.nz - 1;
        let (mut acc, mut w) = (0.0, 0.0);
        for &(col, f) in layout.cover() {
            acc += f * field.temperatures()[g.index(col % g.nx, col / g.nx, top)];
            w += f;
        }
        if w > 0.0 {
            acc / w
        } else {
            self.setup.solver.ambient_temperature
        }
    }

    fn sample_probes(&self, samples: &mut [Vec<f64>]) {
        let field = self.solver.field();
        for (p, probe) in self.setup.probes.iter().enumerate() {
            samples[p].push(field.sample(probe.position).unwrap_or(f64::NAN));
        }
    }

    /// Run the whole schedule.
    pub fn run(
        mut self,
        options: &RunOptions,
        observer: &mut dyn RunObserver,
    ) -> Result<RunHistory> {
        let record_every = options.record_every.max(1);
        let n_probes = self.setup.probes.len();
        let mut times = vec![self.solver.field().time()];
        let mut samples = vec![Vec::new(); n_probes];
        self.sample_probes(&mut samples);

        let profile = self.setup.solver.flux_profile;
        let tool = self.setup.tool;
        let mut position = self.solver.field().tool_position();
        let mut layout = SourceLayout::build(self.solver.field(), &tool, position, profile)?;
        let mut sources = Vec::new();
        let mut phases = Vec::new();
        let mut step = 0usize;
        let phase_list: Vec<WeldPhase> = self.setup.schedule.phases().to_vec();

        for (index, phase) in phase_list.iter().enumerate() {
            let start_ledger = self.solver.ledger();
            let start = self.solver.field().time();
            let duration = phase.duration();
            let mut elapsed = 0.0;
            let mut phase_steps = 0;
            let context = |e: Error, time: f64| Error::Simulation {
                phase: index,
                kind: phase.kind().name(),
                time,
                source: Box::new(e),
            };
            while duration - elapsed > 1e-12 * duration {
                let now = self.solver.field().time();
                let limit = match self.setup.solver.dt_policy {
                    DtPolicy::Auto => self.solver.stable_timestep(),
                    DtPolicy::Fixed(dt) => dt,
                };
                let dt = limit.min(duration - elapsed);

                let ramp = if phase.kind() == PhaseKind::Plunge {
                    (elapsed + 0.5 * dt) / duration
                } else {
                    1.0
                };
                let t_iface = self.interface_temperature(&layout);
                let heat = self
                    .heat_power(phase, t_iface)
                    .map_err(|e| context(e, now))?;
                let partition =
                    partition_heat(heat * ramp, self.gamma).map_err(|e| context(e, now))?;
                sources.clear();
                layout.deposit(&self.fractions, &partition, &mut sources);
                self.solver.set_tool_cover(layout.cover());
                self.solver
                    .step(dt, &sources)
                    .map_err(|e| context(e, now))?;
                elapsed += dt;
                step += 1;
                phase_steps += 1;

                if phase.kind() == PhaseKind::Traverse {
                    position[0] += phase.traverse_speed() * dt;
                    self.solver.field_mut().set_tool_position(position);
                    let t = self.solver.field().time();
                    layout = SourceLayout::build(self.solver.field(), &tool, position, profile)
                        .map_err(|e| context(e, t))?;
                }
                if step.is_multiple_of(record_every) {
                    times.push(self.solver.field().time());
                    self.sample_probes(&mut samples);
                }
                observer.on_step(step, self.solver.field());
            }
            phases.push(PhaseEnergy {
                kind: phase.kind(),
                start,
                end: self.solver.field().time(),
                steps: phase_steps,
                ledger: self.solver.ledger().since(&start_ledger),
            });
        }
        if !step.is_multiple_of(record_every) {
            times.push(self.solver.field().time());
            self.sample_probes(&mut samples);
        }

        let field = self.solver.field();
        Ok(RunHistory {
            probe_names: self.setup.probes.iter().map(|p| p.name.clone()).collect(),
            times,
            samples,
            peak: self.solver.peak_temperatures().to_vec(),
            tags: field.tags().to_vec(),
            grid: *field.grid(),
            phases,
            ledger: self.solver.ledger(),
            steps: step,
            tool_position: field.tool_position(),
        })
    }
}

/// Build and run a simulation without an observer.
pub fn run(setup: &WeldSetup, options: &RunOptions) -> Result<RunHistory> {
    WeldSimulation::new(setup.clone())?.run(options, &mut ())
}
