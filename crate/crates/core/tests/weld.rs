mod common;

use common::*;
use fsw_core::thermal::{
    run, CellTag, DtPolicy, Face, GridResolution, PowerModel, Probe, RunObserver, RunOptions,
    SourceMode, ThermalField, WeldSimulation,
};
use fsw_core::types::{
    BackingSpar, BottomContactCondition, GapConductance, ProcessParameters, WeldPhase, WeldSchedule,
};
use fsw_core::Error;

fn gap() -> BottomContactCondition {
    BottomContactCondition::GapConductance(GapConductance::new(GapConductance::DEFAULT).unwrap())
}

fn coarse(bottom: BottomContactCondition) -> fsw_core::thermal::WeldSetup {
    setup(&Desk::coarse(), rpm(400.0), mm_per_min(400.0), bottom)
}

#[test]
fn zero_power_keeps_traces_at_initial_temperature() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.solver.h_top = 0.0;
    s.solver.h_side = 0.0;
    s.solver.initial_temperature = Some(293.0);
    s.material = s.material.with_emissivity(0.0).unwrap();
    s.heat.delta = 0.0;
    s.heat.friction_coefficient = 0.0;
    let h = run(&s, &RunOptions::default()).unwrap();
    for trace in &h.samples {
        assert!(trace.iter().all(|t| *t == 293.0));
    }
    assert!(h
        .peak
        .iter()
        .zip(&h.tags)
        .all(|(t, tag)| *tag == CellTag::Void || *t == 293.0));
    assert_eq!(h.ledger.deposited, 0.0);
}

#[test]
fn every_bottom_condition_closes_its_ledger() {
    let spar = BottomContactCondition::SparContact(BackingSpar::new(18e-3, 6e-3).unwrap());
    for bottom in [
        BottomContactCondition::Adiabatic,
        BottomContactCondition::PerfectContact,
        spar,
        gap(),
    ] {
        let h = run(&coarse(bottom), &RunOptions::default()).unwrap();
        assert!(h.ledger.deposited > 0.0);
        assert!(
            h.ledger.relative_error() < 1e-3,
            "{}: {:?}",
            bottom.name(),
            h.ledger
        );
        for phase in &h.phases {
            assert!(phase.ledger.relative_error() < 1e-3);
        }
        let summed: f64 = h.phases.iter().map(|p| p.ledger.deposited).sum();
        assert!((summed - h.ledger.deposited).abs() <= 1e-9 * h.ledger.deposited);
        let bottom_loss = h.ledger.loss(Face::ZMin);
        if bottom.has_backing() {
            assert!(bottom_loss > 0.0);
        } else {
            assert_eq!(bottom_loss, 0.0);
        }
    }
}

#[test]
fn spar_leaves_void_cells_outside_its_width() {
    let spar = BottomContactCondition::SparContact(BackingSpar::new(16e-3, 4e-3).unwrap());
    let sim = WeldSimulation::new(coarse(spar)).unwrap();
    let f = sim.field();
    let g = f.grid();
    let y_joint = 20e-3;
    for idx in 0..g.len() {
        let (i, j, k) = g.coords(idx);
        let c = g.center(i, j, k);
        let tag = f.tags()[idx];
        if c[2] > 0.0 {
            assert_eq!(tag, CellTag::Workpiece);
        } else if (c[1] - y_joint).abs() <= 8e-3 {
            assert_eq!(tag, CellTag::Backing);
        } else {
            assert_eq!(tag, CellTag::Void);
        }
    }
}

#[test]
fn spar_wider_than_plate_is_rejected() {
    let spar = BottomContactCondition::SparContact(BackingSpar::new(50e-3, 4e-3).unwrap());
    assert!(WeldSimulation::new(coarse(spar)).is_err());
}

#[test]
fn backing_material_is_required() {
    let mut s = coarse(BottomContactCondition::PerfectContact);
    s.backing = None;
    assert!(WeldSimulation::new(s).is_err());
}

#[test]
fn tool_leaving_plate_reports_phase_context() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.schedule =
        WeldSchedule::new(vec![WeldPhase::traverse(10.0, rpm(400.0), 5e-3).unwrap()]).unwrap();
    match run(&s, &RunOptions::default()) {
        Err(Error::Simulation {
            phase,
            kind,
            source,
            ..
        }) => {
            assert_eq!(phase, 0);
            assert_eq!(kind, "traverse");
            assert!(matches!(*source, Error::FootprintOutsideGrid { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn oversized_fixed_step_is_refused() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.solver.dt_policy = DtPolicy::Fixed(1.0);
    match run(&s, &RunOptions::default()) {
        Err(Error::Simulation { source, .. }) => {
            assert!(matches!(*source, Error::TimestepTooLarge { .. }))
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn start_outside_plate_is_rejected() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.start_x = 4e-3;
    assert!(matches!(
        WeldSimulation::new(s),
        Err(Error::FootprintOutsideGrid { .. })
    ));
}

#[test]
fn probe_outside_domain_is_rejected() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.probes.push(Probe::new("far", [0.5, 0.0, 0.0]));
    assert!(WeldSimulation::new(s).is_err());
}

#[test]
fn traces_are_recorded_on_cadence_and_at_the_end() {
    let s = coarse(BottomContactCondition::Adiabatic);
    let h = run(&s, &RunOptions { record_every: 7 }).unwrap();
    assert!(h.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(h.times[0], 0.0);
    assert!((h.times.last().unwrap() - s.schedule.total_duration()).abs() < 1e-9);
    assert_eq!(
        h.times.len(),
        1 + h.steps / 7 + usize::from(!h.steps.is_multiple_of(7))
    );
    assert!(h.samples.iter().all(|t| t.len() == h.times.len()));
    let travelled = h.tool_position[0] - s.start_x;
    assert!((travelled - s.schedule.traverse_distance()).abs() < 1e-9);
}

#[test]
fn peak_sits_under_the_shoulder_track() {
    let s = coarse(BottomContactCondition::PerfectContact);
    let h = run(&s, &RunOptions::default()).unwrap();
    let (cell, _) = h.peak_temperature();
    let c = h.grid.center(
        h.grid.coords(cell).0,
        h.grid.coords(cell).1,
        h.grid.coords(cell).2,
    );
    let rs = s.tool.shoulder_radius();
    let y_joint = s.workpiece.width() / 2.0;
    assert!((c[1] - y_joint).abs() <= rs);
    assert!(c[0] >= s.start_x - rs && c[0] <= h.tool_position[0] + rs);
}

#[test]
fn adiabatic_bottom_runs_hotter_than_gap_hotter_than_perfect() {
    let peak = |b| {
        run(&coarse(b), &RunOptions::default())
            .unwrap()
            .peak_temperature()
            .1
    };
    let (a, g, p) = (
        peak(BottomContactCondition::Adiabatic),
        peak(gap()),
        peak(BottomContactCondition::PerfectContact),
    );
    assert!(a > g && g > p, "{a} {g} {p}");
}

#[test]
fn volumetric_mode_deposits_in_the_probe_volume() {
    let mut s = coarse(BottomContactCondition::PerfectContact);
    s.solver.source_mode = SourceMode::SurfacePlusVolumetric;
    s.heat.gamma = Some(0.4);
    let sim = WeldSimulation::new(s.clone()).unwrap();
    assert_eq!(sim.gamma(), 0.4);
    let h = sim.run(&RunOptions::default(), &mut ()).unwrap();
    assert!(h.ledger.relative_error() < 1e-3);

    s.solver.source_mode = SourceMode::SurfaceFlux;
    assert!(WeldSimulation::new(s).is_err());
}

#[test]
fn torque_model_uses_measured_power() {
    let mut s = coarse(BottomContactCondition::Adiabatic);
    s.heat.power_model = PowerModel::Torque {
        include_traverse: true,
    };
    assert!(WeldSimulation::new(s.clone()).is_err());
    s.process = ProcessParameters::new(rpm(400.0), mm_per_min(400.0), 8e3)
        .unwrap()
        .with_torque(20.0)
        .unwrap()
        .with_traverse_force(2e3)
        .unwrap();
    let h = run(&s, &RunOptions::default()).unwrap();
    let eta = s.process.efficiency();
    let phases = s.schedule.phases();
    let mut expected = 0.0;
    for p in phases {
        let full = eta * (20.0 * p.omega() + 2e3 * p.traverse_speed()) * p.duration();
        expected += if p.kind() == fsw_core::types::PhaseKind::Plunge {
            0.5 * full
        } else {
            full
        };
    }
    assert!((h.ledger.deposited - expected).abs() / expected < 1e-9);
}

#[test]
fn grid_refinement_changes_peak_by_decreasing_amounts() {
    let mut peaks = Vec::new();
    for f in [1, 2, 4] {
        let desk = Desk {
            length: 48e-3,
            width: 32e-3,
            thickness: 4e-3,
            resolution: GridResolution::new(12 * f, 8 * f, 2 * f).unwrap(),
            dwell: 1.0,
            traverse_length: 1e-3,
        };
        let mut s = setup(
            &desk,
            rpm(400.0),
            mm_per_min(400.0),
            BottomContactCondition::Adiabatic,
        );
        s.schedule = WeldSchedule::new(vec![
            WeldPhase::plunge(1.0, rpm(400.0), 0.0).unwrap(),
            WeldPhase::dwell(1.0, rpm(400.0)).unwrap(),
        ])
        .unwrap();
        s.start_x = 24e-3;
        s.probes = vec![Probe::new("centre", [24e-3, 16e-3, 0.0])];
        peaks.push(
            run(&s, &RunOptions::default())
                .unwrap()
                .peak_temperature()
                .1,
        );
    }
    let first = (peaks[1] - peaks[0]).abs();
    let second = (peaks[2] - peaks[1]).abs();
    assert!(second < first, "{peaks:?}");
}

struct Counter(usize, f64);

impl RunObserver for Counter {
    fn on_step(&mut self, step: usize, field: &ThermalField) {
        assert_eq!(step, self.0 + 1);
        assert!(field.time() > self.1);
        self.0 = step;
        self.1 = field.time();
    }
}

#[test]
fn observer_sees_every_step() {
    let sim = WeldSimulation::new(coarse(BottomContactCondition::Adiabatic)).unwrap();
    let mut counter = Counter(0, 0.0);
    let h = sim.run(&RunOptions::default(), &mut counter).unwrap();
    assert_eq!(counter.0, h.steps);
}

#[test]
fn runs_are_deterministic() {
    let s = coarse(gap());
    assert_eq!(
        run(&s, &RunOptions::default()).unwrap(),
        run(&s, &RunOptions::default()).unwrap()
    );
}
