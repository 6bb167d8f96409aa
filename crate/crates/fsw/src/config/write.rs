use std::fmt::Write;

use fsw_core::calibration::CalibParameter;
use fsw_core::material::{Property, ThermophysicalTable};
use fsw_core::thermal::{DtPolicy, FluxProfile, PowerModel, SourceMode, YieldSource};
use fsw_core::types::{BottomContactCondition, PhaseKind};

use crate::config::RunConfig;
use crate::units::{format_number as num, Dimension};

fn q(v: f64, dim: Dimension) -> String {
    format!("{} {}", num(v), dim.si_unit())
}

fn points(p: &[[f64; 3]]) -> String {
    let rows: Vec<String> = p
        .iter()
        .map(|p| format!("{} {} {}", num(p[0]), num(p[1]), num(p[2])))
        .collect();
    format!("{} [m]", rows.join(", "))
}

fn table(out: &mut String, key: &str, m: &ThermophysicalTable, which: Property, dim: Dimension) {
    let rows: Vec<String> = m
        .curve(which)
        .knots()
        .iter()
        .map(|(t, v)| format!("{} {}", num(*t), num(*v)))
        .collect();
    let _ = writeln!(out, "{key} = {} [K, {}]", rows.join(", "), dim.si_unit());
}

fn material(out: &mut String, section: &str, m: &ThermophysicalTable) {
    let _ = writeln!(out, "\n[{section}]");
    let _ = writeln!(out, "density = {}", q(m.density(), Dimension::Density));
    table(
        out,
        "conductivity",
        m,
        Property::Conductivity,
        Dimension::Conductivity,
    );
    table(
        out,
        "specific_heat",
        m,
        Property::SpecificHeat,
        Dimension::SpecificHeat,
    );
    table(
        out,
        "yield_stress",
        m,
        Property::YieldStress,
        Dimension::Stress,
    );
    let _ = writeln!(out, "emissivity = {}", num(m.emissivity()));
}

/// Writes `config` in the config-file grammar with SI units. Parsing the
/// result gives back an equal config.
pub fn serialize_config(config: &RunConfig) -> String {
    use Dimension::*;
    let s = &config.setup;
    let mut out = String::new();
    let o = &mut out;

    let t = &s.tool;
    let _ = writeln!(o, "[tool]");
    let _ = writeln!(o, "shoulder_radius = {}", q(t.shoulder_radius(), Length));
    let _ = writeln!(o, "probe_radius = {}", q(t.probe_radius(), Length));
    let _ = writeln!(o, "probe_height = {}", q(t.probe_height(), Length));
    let _ = writeln!(o, "cone_angle = {}", q(t.cone_angle(), Angle));
    let _ = writeln!(o, "tilt_angle = {}", q(t.tilt_angle(), Angle));

    let p = &s.process;
    let _ = writeln!(o, "\n[process]");
    let _ = writeln!(o, "omega = {}", q(p.omega(), AngularSpeed));
    let _ = writeln!(o, "traverse_speed = {}", q(p.traverse_speed(), Speed));
    let _ = writeln!(o, "downward_force = {}", q(p.downward_force(), Force));
    if let Some(m) = p.torque() {
        let _ = writeln!(o, "torque = {}", q(m, Torque));
    }
    if let Some(f) = p.traverse_force() {
        let _ = writeln!(o, "traverse_force = {}", q(f, Force));
    }
    let _ = writeln!(o, "efficiency = {}", num(p.efficiency()));

    let w = &s.workpiece;
    let _ = writeln!(o, "\n[workpiece]");
    let _ = writeln!(o, "length = {}", q(w.length(), Length));
    let _ = writeln!(o, "width = {}", q(w.width(), Length));
    let _ = writeln!(o, "thickness = {}", q(w.thickness(), Length));
    let _ = writeln!(o, "joint_line = {}", q(w.joint_line_offset(), Length));
    let _ = writeln!(o, "start_x = {}", q(s.start_x, Length));

    material(o, "material", &s.material);
    if let Some(b) = &s.backing {
        material(o, "backing", b);
    }

    let h = &s.heat;
    let _ = writeln!(o, "\n[heat]");
    let _ = writeln!(o, "delta = {}", num(h.delta));
    let _ = writeln!(o, "friction_coefficient = {}", num(h.friction_coefficient));
    if let Some(g) = h.gamma {
        let _ = writeln!(o, "gamma = {}", num(g));
    }
    let power = match h.power_model {
        PowerModel::Analytical => "analytical",
        PowerModel::Torque {
            include_traverse: false,
        } => "torque",
        PowerModel::Torque {
            include_traverse: true,
        } => "torque_traverse",
    };
    let _ = writeln!(o, "power_model = {power}");
    if let Some(t) = config.reference_temperature {
        let _ = writeln!(o, "reference_temperature = {}", q(t, Temperature));
    }
    match h.yield_source {
        YieldSource::Table => {
            let _ = writeln!(o, "yield_source = table");
        }
        YieldSource::JohnsonCook {
            params,
            strain,
            strain_rate,
        } => {
            let _ = writeln!(o, "yield_source = johnson_cook");
            let _ = writeln!(o, "\n[johnson_cook]");
            let _ = writeln!(o, "a = {}", q(params.a, Stress));
            let _ = writeln!(o, "b = {}", q(params.b, Stress));
            let _ = writeln!(o, "c = {}", num(params.c));
            let _ = writeln!(o, "n = {}", num(params.n));
            let _ = writeln!(o, "m = {}", num(params.m));
            let _ = writeln!(
                o,
                "melt_temperature = {}",
                q(params.melt_temperature, Temperature)
            );
            let _ = writeln!(
                o,
                "reference_temperature = {}",
                q(params.reference_temperature, Temperature)
            );
            let _ = writeln!(
                o,
                "reference_strain_rate = {}",
                q(params.reference_strain_rate, StrainRate)
            );
            let _ = writeln!(o, "strain = {}", num(strain));
            let _ = writeln!(o, "strain_rate = {}", q(strain_rate, StrainRate));
        }
        YieldSource::SellarsTegart {
            params,
            strain_rate,
        } => {
            let _ = writeln!(o, "yield_source = sellars_tegart");
            let _ = writeln!(o, "\n[sellars_tegart]");
            let _ = writeln!(o, "a = {}", q(params.a, StrainRate));
            let _ = writeln!(o, "alpha = {}", q(params.alpha, InverseStress));
            let _ = writeln!(o, "n = {}", num(params.n));
            let _ = writeln!(
                o,
                "activation_energy = {}",
                q(params.activation_energy, MolarEnergy)
            );
            let _ = writeln!(o, "strain_rate = {}", q(strain_rate, StrainRate));
        }
    }

    let c = &s.solver;
    let _ = writeln!(o, "\n[solver]");
    let _ = writeln!(
        o,
        "ambient_temperature = {}",
        q(c.ambient_temperature, Temperature)
    );
    if let Some(t) = c.initial_temperature {
        let _ = writeln!(o, "initial_temperature = {}", q(t, Temperature));
    }
    let _ = writeln!(o, "h_top = {}", q(c.h_top, HeatTransfer));
    let _ = writeln!(o, "h_side = {}", q(c.h_side, HeatTransfer));
    match c.bottom {
        BottomContactCondition::Adiabatic => {
            let _ = writeln!(o, "bottom = adiabatic");
        }
        BottomContactCondition::PerfectContact => {
            let _ = writeln!(o, "bottom = perfect");
        }
        BottomContactCondition::GapConductance(g) => {
            let _ = writeln!(o, "bottom = gap");
            let _ = writeln!(o, "h_gap = {}", q(g.value(), HeatTransfer));
        }
        BottomContactCondition::SparContact(spar) => {
            let _ = writeln!(o, "bottom = spar");
            let _ = writeln!(o, "spar_width = {}", q(spar.width(), Length));
            let _ = writeln!(o, "spar_height = {}", q(spar.height(), Length));
        }
    }
    let _ = writeln!(o, "backing_thickness = {}", q(c.backing_thickness, Length));
    let profile = match c.flux_profile {
        FluxProfile::Uniform => "uniform",
        FluxProfile::LinearInR => "linear_r",
    };
    let _ = writeln!(o, "flux_profile = {profile}");
    let mode = match c.source_mode {
        SourceMode::SurfaceFlux => "surface",
        SourceMode::SurfacePlusVolumetric => "volumetric",
    };
    let _ = writeln!(o, "source_mode = {mode}");
    match c.dt_policy {
        DtPolicy::Auto => {
            let _ = writeln!(o, "dt = auto");
        }
        DtPolicy::Fixed(dt) => {
            let _ = writeln!(o, "dt = {}", q(dt, Time));
        }
    }

    let r = s.resolution;
    let _ = writeln!(o, "\n[grid]\nnx = {}\nny = {}\nnz = {}", r.nx, r.ny, r.nz);

    for phase in s.schedule.phases() {
        let _ = writeln!(o, "\n[phase]");
        let _ = writeln!(o, "kind = {}", phase.kind().name());
        let _ = writeln!(o, "duration = {}", q(phase.duration(), Time));
        let _ = writeln!(o, "omega = {}", q(phase.omega(), AngularSpeed));
        match phase.kind() {
            PhaseKind::Plunge => {
                let _ = writeln!(o, "plunge_rate = {}", q(phase.plunge_rate(), Speed));
            }
            PhaseKind::Traverse => {
                let _ = writeln!(o, "traverse_speed = {}", q(phase.traverse_speed(), Speed));
            }
            PhaseKind::Dwell => {}
        }
    }

    for probe in &s.probes {
        let [x, y, z] = probe.position;
        let _ = writeln!(o, "\n[probe]\nname = {}", probe.name);
        let _ = writeln!(
            o,
            "x = {}\ny = {}\nz = {}",
            q(x, Length),
            q(y, Length),
            q(z, Length)
        );
    }

    let out_cfg = &config.output;
    let _ = writeln!(o, "\n[output]");
    let _ = writeln!(o, "directory = {}", out_cfg.directory.display());
    let _ = writeln!(o, "every = {}", out_cfg.every);
    let _ = writeln!(o, "snapshot_every = {}", out_cfg.snapshot_every);

    if let Some(f) = &config.flow {
        let _ = writeln!(o, "\n[flow]");
        if let Some(r) = f.shear_zone_radius {
            let _ = writeln!(o, "shear_zone_radius = {}", q(r, Length));
        }
        if let Some(w) = f.omega {
            let _ = writeln!(o, "omega = {}", q(w, AngularSpeed));
        }
        let _ = writeln!(o, "circulation = {}", q(f.circulation, Circulation));
        let _ = writeln!(o, "core_radius = {}", q(f.core_radius, Length));
        let _ = writeln!(o, "ring_radius = {}", q(f.ring_radius, Length));
        let _ = writeln!(o, "duration = {}", q(f.duration, Time));
        let _ = writeln!(o, "dt = {}", q(f.dt, Time));
        let _ = writeln!(o, "seeds = {}", points(&f.seeds));
        if let Some((min, max)) = f.domain {
            let _ = writeln!(o, "domain_min = {}", points(&[min]));
            let _ = writeln!(o, "domain_max = {}", points(&[max]));
        }
    }

    if let Some(cal) = &config.calibration {
        let _ = writeln!(o, "\n[calibration]");
        let names: Vec<&str> = cal.free.iter().map(|f| f.parameter().name()).collect();
        let _ = writeln!(o, "free = {}", names.join(", "));
        for f in &cal.free {
            let (lo, hi) = f.bounds();
            let unit = if f.parameter() == CalibParameter::GapConductance {
                format!(" {}", HeatTransfer.si_unit())
            } else {
                String::new()
            };
            let _ = writeln!(
                o,
                "{}_bounds = {} {}{unit}",
                f.parameter().name(),
                num(lo),
                num(hi)
            );
        }
        let _ = writeln!(o, "targets = {}", cal.targets.display());
        if !cal.weights.is_empty() {
            let w: Vec<String> = cal
                .weights
                .iter()
                .map(|(n, w)| format!("{n}: {}", num(*w)))
                .collect();
            let _ = writeln!(o, "weights = {}", w.join(", "));
        }
        let _ = writeln!(o, "max_evaluations = {}", cal.max_evaluations);
        let _ = writeln!(o, "tolerance = {}", num(cal.tolerance));
        let _ = writeln!(o, "initial_step = {}", num(cal.initial_step));
        if let Some(f) = cal.confirm_refinement {
            let _ = writeln!(o, "confirm_refinement = {f}");
        }
    }
    out
}
