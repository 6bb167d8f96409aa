#![allow(dead_code)]

use fsw_core::material::ThermophysicalTable;
use fsw_core::thermal::{GridResolution, HeatSourceModel, Probe, SolverConfig, WeldSetup};
use fsw_core::types::{
    BottomContactCondition, ProcessParameters, ToolGeometry, WeldPhase, WeldSchedule,
    WorkpieceGeometry,
};

pub fn rpm(n: f64) -> f64 {
    n * 2.0 * std::f64::consts::PI / 60.0
}

pub fn mm_per_min(v: f64) -> f64 {
    v * 1e-3 / 60.0
}

/// 6xxx-series aluminium, rounded handbook values.
pub fn aluminium() -> ThermophysicalTable {
    ThermophysicalTable::new(
        2700.0,
        vec![
            (293.0, 167.0),
            (473.0, 177.0),
            (673.0, 192.0),
            (873.0, 200.0),
        ],
        vec![
            (293.0, 900.0),
            (473.0, 990.0),
            (673.0, 1080.0),
            (873.0, 1150.0),
        ],
        vec![
            (293.0, 276e6),
            (373.0, 262e6),
            (473.0, 214e6),
            (573.0, 103e6),
            (673.0, 34e6),
            (773.0, 12e6),
            (855.0, 0.0),
        ],
        0.3,
    )
    .unwrap()
}

pub fn steel() -> ThermophysicalTable {
    ThermophysicalTable::new(
        7850.0,
        vec![(293.0, 45.0), (873.0, 35.0)],
        vec![(293.0, 470.0), (873.0, 700.0)],
        vec![(293.0, 250e6)],
        0.5,
    )
    .unwrap()
}

pub fn tool() -> ToolGeometry {
    ToolGeometry::new(9e-3, 3e-3, 4e-3, 0.0).unwrap()
}

pub struct Desk {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub resolution: GridResolution,
    pub dwell: f64,
    pub traverse_length: f64,
}

impl Desk {
    /// Small plate on a coarse grid; a run takes a fraction of a second.
    pub fn coarse() -> Self {
        Self {
            length: 60e-3,
            width: 40e-3,
            thickness: 4e-3,
            resolution: GridResolution::new(15, 10, 2).unwrap(),
            dwell: 3.0,
            traverse_length: 20e-3,
        }
    }

    pub fn medium() -> Self {
        Self {
            length: 80e-3,
            width: 48e-3,
            thickness: 5e-3,
            resolution: GridResolution::new(40, 24, 5).unwrap(),
            dwell: 2.0,
            traverse_length: 30e-3,
        }
    }
}

pub fn setup(desk: &Desk, omega: f64, speed: f64, bottom: BottomContactCondition) -> WeldSetup {
    let mut solver = SolverConfig::new(293.0, 10.0, 10.0, bottom).unwrap();
    solver.backing_thickness = 6e-3;
    let schedule = WeldSchedule::new(vec![
        WeldPhase::plunge(1.0, omega, 4e-3).unwrap(),
        WeldPhase::dwell(desk.dwell, omega).unwrap(),
        WeldPhase::traverse(desk.traverse_length / speed, omega, speed).unwrap(),
    ])
    .unwrap();
    let y = desk.width / 2.0;
    WeldSetup {
        tool: tool(),
        workpiece: WorkpieceGeometry::new(desk.length, desk.width, desk.thickness).unwrap(),
        process: ProcessParameters::new(omega, speed, 8e3).unwrap(),
        heat: HeatSourceModel::new(0.6, 0.4).unwrap(),
        material: aluminium(),
        backing: Some(steel()),
        solver,
        resolution: desk.resolution,
        schedule,
        start_x: 16e-3,
        probes: vec![
            Probe::new("adv", [30e-3, y - 12e-3, desk.thickness]),
            Probe::new("ret", [30e-3, y + 12e-3, desk.thickness]),
            Probe::new("bottom", [30e-3, y - 10e-3, 0.0]),
        ],
    }
}
