mod common;

use common::*;
use fsw_core::calibration::{
    calibrate, calibrate_from, interpolate, CalibParameter, CalibrationOptions, CalibrationProblem,
    FreeParameter, TargetTrace,
};
use fsw_core::thermal::{run, RunOptions, WeldSetup};
use fsw_core::types::{BottomContactCondition, GapConductance};
use fsw_core::Error;

fn truth() -> WeldSetup {
    let bottom = BottomContactCondition::GapConductance(GapConductance::new(1000.0).unwrap());
    let mut s = setup(&Desk::coarse(), rpm(400.0), mm_per_min(400.0), bottom);
    s.heat.delta = 0.4;
    s
}

fn synthetic_targets(setup: &WeldSetup, samples: usize) -> Vec<TargetTrace> {
    let h = run(setup, &RunOptions { record_every: 1 }).unwrap();
    let end = *h.times.last().unwrap();
    let times: Vec<f64> = (0..=samples)
        .map(|i| end * i as f64 / samples as f64)
        .collect();
    setup
        .probes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let temps = times
                .iter()
                .map(|t| interpolate(&h.times, &h.samples[i], *t))
                .collect();
            TargetTrace::new(p.clone(), times.clone(), temps, 1.0 + i as f64).unwrap()
        })
        .collect()
}

fn delta_problem(targets: Vec<TargetTrace>) -> CalibrationProblem {
    CalibrationProblem::new(
        truth(),
        vec![FreeParameter::new(CalibParameter::Delta)],
        targets,
    )
    .unwrap()
}

#[test]
fn objective_vanishes_at_the_generating_parameters() {
    let p = delta_problem(synthetic_targets(&truth(), 20));
    assert!(p.objective(&[0.4]).unwrap() < 1e-12);
    assert!(p.objective(&[0.5]).unwrap() > 1.0);
}

#[test]
fn constant_offset_adds_quadratic_shift() {
    let targets = synthetic_targets(&truth(), 10);
    let expected: f64 = targets
        .iter()
        .map(|t| 25.0 * t.weight * t.len() as f64)
        .sum();
    let shifted: Vec<TargetTrace> = targets
        .iter()
        .map(|t| {
            let temps = t.temperatures.iter().map(|v| v + 5.0).collect();
            TargetTrace::new(t.probe.clone(), t.times.clone(), temps, t.weight).unwrap()
        })
        .collect();
    let base = delta_problem(targets).objective(&[0.4]).unwrap();
    let moved = delta_problem(shifted).objective(&[0.4]).unwrap();
    assert!(((moved - base) - expected).abs() < 1e-6 * expected);
}

#[test]
fn objective_ignores_trace_order() {
    let targets = synthetic_targets(&truth(), 10);
    let mut reversed = targets.clone();
    reversed.reverse();
    let a = delta_problem(targets).objective(&[0.55]).unwrap();
    let b = delta_problem(reversed).objective(&[0.55]).unwrap();
    assert!((a - b).abs() <= 1e-12 * a);
}

#[test]
fn out_of_bounds_values_are_rejected() {
    let p = delta_problem(synthetic_targets(&truth(), 5));
    assert!(p.objective(&[1.2]).is_err());
    let narrow = CalibrationProblem::new(
        truth(),
        vec![FreeParameter::with_bounds(CalibParameter::Delta, 0.2, 0.6).unwrap()],
        synthetic_targets(&truth(), 5),
    )
    .unwrap();
    assert!(narrow.objective(&[0.7]).is_err());
}

#[test]
fn gap_parameter_needs_gap_bottom() {
    let mut base = truth();
    base.solver.bottom = BottomContactCondition::PerfectContact;
    let targets = synthetic_targets(&truth(), 5);
    assert!(CalibrationProblem::new(
        base,
        vec![FreeParameter::new(CalibParameter::GapConductance)],
        targets
    )
    .is_err());
}

#[test]
fn problem_invariants() {
    let targets = synthetic_targets(&truth(), 5);
    assert!(CalibrationProblem::new(truth(), vec![], targets.clone()).is_err());
    assert!(CalibrationProblem::new(
        truth(),
        vec![FreeParameter::new(CalibParameter::Delta)],
        vec![]
    )
    .is_err());
    let dup = vec![
        FreeParameter::new(CalibParameter::Delta),
        FreeParameter::new(CalibParameter::Delta),
    ];
    assert!(CalibrationProblem::new(truth(), dup, targets.clone()).is_err());
    let mut late = targets[0].clone();
    late.times = vec![0.0, 1e3];
    late.temperatures = vec![293.0, 293.0];
    assert!(CalibrationProblem::new(
        truth(),
        vec![FreeParameter::new(CalibParameter::Delta)],
        vec![late]
    )
    .is_err());
}

#[test]
fn failed_forward_run_carries_parameters() {
    let mut base = truth();
    base.start_x = 50e-3;
    let p = CalibrationProblem {
        base,
        free: vec![FreeParameter::new(CalibParameter::Delta)],
        targets: synthetic_targets(&truth(), 5),
        options: CalibrationOptions::default(),
    };
    match p.objective(&[0.3]) {
        Err(Error::Objective { params, .. }) => assert!(params.contains("delta=0.3")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn recovers_delta() {
    let p = delta_problem(synthetic_targets(&truth(), 20));
    let report = calibrate(&p, None).unwrap();
    assert!(report.converged);
    let delta = report.value(CalibParameter::Delta).unwrap();
    assert!((delta - 0.4).abs() < 0.02, "delta {delta}");
    // The reported objective is the value at the reported parameters.
    assert_eq!(report.objective, p.objective(&report.values).unwrap());
    assert_eq!(report.history.last().unwrap().objective, report.objective);
}

#[test]
fn starting_at_the_optimum_stays_there() {
    let p = delta_problem(synthetic_targets(&truth(), 10));
    let report = calibrate_from(&p, &[0.4]).unwrap();
    assert!(report.converged);
    assert!(report.objective < 1e-12);
    assert_eq!(report.values, vec![0.4]);
}

#[test]
fn budget_exhaustion_returns_best_so_far() {
    let options = CalibrationOptions {
        max_evaluations: 4,
        ..CalibrationOptions::default()
    };
    let p = delta_problem(synthetic_targets(&truth(), 5))
        .with_options(options)
        .unwrap();
    let report = calibrate(&p, None).unwrap();
    assert!(!report.converged);
    assert!(report.evaluations >= 4);
    let best = report
        .history
        .iter()
        .map(|h| h.objective)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(report.objective, best);
}

#[test]
fn seeded_runs_are_reproducible_and_respect_bounds() {
    let free = vec![
        FreeParameter::with_bounds(CalibParameter::Delta, 0.1, 0.9).unwrap(),
        FreeParameter::new(CalibParameter::Efficiency),
    ];
    let options = CalibrationOptions {
        max_evaluations: 30,
        ..CalibrationOptions::default()
    };
    let p = CalibrationProblem::new(truth(), free, synthetic_targets(&truth(), 5))
        .unwrap()
        .with_options(options)
        .unwrap();
    let a = calibrate(&p, Some(7)).unwrap();
    let b = calibrate(&p, Some(7)).unwrap();
    let c = calibrate(&p, Some(8)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.start, c.start);
    for report in [&a, &c] {
        for (free, v) in p.free.iter().zip(&report.values) {
            let (lo, hi) = free.bounds();
            assert!(*v >= lo && *v <= hi);
        }
        for record in &report.history {
            for (free, v) in p.free.iter().zip(&record.values) {
                let (lo, hi) = free.bounds();
                assert!(*v >= lo && *v <= hi);
            }
        }
    }
}

#[test]
fn fine_confirmation_run_is_reported() {
    let options = CalibrationOptions {
        max_evaluations: 3,
        confirm_resolution: Some(Desk::coarse().resolution.refined(2)),
        ..CalibrationOptions::default()
    };
    let p = delta_problem(synthetic_targets(&truth(), 5))
        .with_options(options)
        .unwrap();
    let report = calibrate_from(&p, &[0.4]).unwrap();
    let confirm = report.confirmation_objective.unwrap();
    assert!(confirm > 0.0 && confirm.is_finite());
}
