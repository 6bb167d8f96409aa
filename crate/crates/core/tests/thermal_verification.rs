use std::f64::consts::PI;

use fsw_core::material::ThermophysicalTable;
use fsw_core::thermal::{
    stable_timestep, Boundaries, CellTag, ConductionSolver, Face, FaceCondition, Grid, Materials,
    ThermalField,
};

const K: f64 = 50.0;
const RHO: f64 = 2000.0;
const CP: f64 = 500.0;
const KAPPA: f64 = K / (RHO * CP);
const L: f64 = 0.02;
const N: usize = 40;
const T0: f64 = 300.0;
const T1: f64 = 400.0;

fn slab() -> ConductionSolver {
    let grid = Grid::new([1, 1, N], [1e-3, 1e-3, L / N as f64], [0.0; 3]).unwrap();
    let field = ThermalField::uniform(grid, CellTag::Workpiece, T0).unwrap();
    let materials = Materials::workpiece_only(ThermophysicalTable::constant(RHO, K, CP).unwrap());
    let boundaries = Boundaries::adiabatic()
        .with(Face::ZMin, FaceCondition::FixedTemperature(T1))
        .with(Face::ZMax, FaceCondition::FixedTemperature(T0));
    ConductionSolver::new(field, materials, boundaries).unwrap()
}

/// Both faces held, initially uniform at the cold value.
fn series_solution(z: f64, t: f64) -> f64 {
    let mut theta = 1.0 - z / L;
    for n in 1..400 {
        let n = n as f64;
        theta -=
            2.0 / (n * PI) * (n * PI * z / L).sin() * (-(n * PI / L).powi(2) * KAPPA * t).exp();
    }
    T0 + (T1 - T0) * theta
}

fn march(solver: &mut ConductionSolver, until: f64) {
    let dt = solver.stable_timestep();
    while solver.field().time() < until - 1e-12 {
        let step = dt.min(until - solver.field().time());
        solver.step(step, &[]).unwrap();
    }
}

#[test]
fn transient_slab_matches_series_solution() {
    let mut solver = slab();
    let tau = L * L / KAPPA;
    for fraction in [0.02, 0.05, 0.1, 0.3] {
        march(&mut solver, fraction * tau);
        let g = *solver.field().grid();
        for k in [4, 10, 20, 30] {
            let z = g.center(0, 0, k)[2];
            let exact = series_solution(z, solver.field().time());
            let got = solver.field().temperature(0, 0, k);
            let err = (got - exact).abs() / (T1 - T0);
            assert!(err < 0.01, "t/tau={fraction} k={k}: {got} vs {exact}");
        }
    }
}

#[test]
fn slab_reaches_linear_profile() {
    let mut solver = slab();
    march(&mut solver, 3.0 * L * L / KAPPA);
    let g = *solver.field().grid();
    for k in 0..N {
        let z = g.center(0, 0, k)[2];
        let exact = T1 + (T0 - T1) * z / L;
        let got = solver.field().temperature(0, 0, k);
        assert!(
            ((got - exact) / (T1 - T0)).abs() < 0.005,
            "k={k}: {got} vs {exact}"
        );
    }
    let ledger = solver.ledger();
    assert!(ledger.relative_error() < 1e-10);
    // Steady flux k dT/dz enters at the bottom and leaves at the top.
    let q = K * (T1 - T0) / L * 1e-6;
    assert!(ledger.loss(Face::ZMin) < 0.0);
    let power_out =
        (solver.field().temperature(0, 0, N - 1) - T0) * K / (0.5 * L / N as f64) * 1e-6;
    assert!((power_out - q).abs() / q < 1e-3);
}

fn variable_material() -> ThermophysicalTable {
    ThermophysicalTable::new(
        2700.0,
        vec![(293.0, 167.0), (473.0, 177.0), (673.0, 192.0)],
        vec![(293.0, 900.0), (473.0, 990.0), (673.0, 1080.0)],
        vec![(293.0, 2e8), (673.0, 3e7)],
        0.3,
    )
    .unwrap()
}

#[test]
fn adiabatic_run_conserves_enthalpy_over_ten_thousand_steps() {
    let grid = Grid::new([10, 8, 6], [1e-3; 3], [0.0; 3]).unwrap();
    let mut field = ThermalField::uniform(grid, CellTag::Workpiece, 300.0).unwrap();
    for idx in 0..grid.len() {
        let (i, j, k) = grid.coords(idx);
        field
            .set_temperature(
                idx,
                300.0 + 40.0 * i as f64 + 15.0 * j as f64 + 5.0 * (k * k) as f64,
            )
            .unwrap();
    }
    let mut solver = ConductionSolver::new(
        field,
        Materials::workpiece_only(variable_material()),
        Boundaries::adiabatic(),
    )
    .unwrap();
    let h0 = solver.total_enthalpy();
    for _ in 0..10_000 {
        let dt = solver.stable_timestep();
        solver.step(dt, &[]).unwrap();
    }
    let drift = (solver.total_enthalpy() - h0).abs() / h0;
    assert!(drift < 1e-6, "drift {drift}");
    // Mixed to a nearly uniform state.
    let t = solver.field().temperatures();
    let spread =
        t.iter().cloned().fold(f64::MIN, f64::max) - t.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1.0);
}

#[test]
fn stable_step_uses_hottest_diffusivity() {
    let grid = Grid::new([4, 4, 4], [1e-3; 3], [0.0; 3]).unwrap();
    let mut field = ThermalField::uniform(grid, CellTag::Workpiece, 300.0).unwrap();
    let conductive_when_hot = ThermophysicalTable::new(
        3000.0,
        vec![(300.0, 100.0), (700.0, 300.0)],
        vec![(300.0, 900.0)],
        vec![(300.0, 1e8)],
        0.0,
    )
    .unwrap();
    let materials = Materials::workpiece_only(conductive_when_hot);
    let cold = stable_timestep(&field, &materials);
    field.set_temperature(5, 600.0).unwrap();
    let hot = stable_timestep(&field, &materials);
    let ratio = materials.workpiece.diffusivity(600.0) / materials.workpiece.diffusivity(300.0);
    assert!(ratio > 1.9);
    assert!((cold / hot - ratio).abs() < 1e-12);
}
