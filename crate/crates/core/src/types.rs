//! Geometry, process-parameter and schedule types shared across the crate.
//!
//! Every type validates its invariants in its constructor, so a value that
//! exists is a value that is usable. All of them are plain immutable data.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};

/// Simplified tool: conical (or flat) shoulder, cylindrical probe, flat probe tip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolGeometry {
    shoulder_radius: f64,
    probe_radius: f64,
    probe_height: f64,
    cone_angle: f64,
    tilt_angle: f64,
}

impl ToolGeometry {
    /// `cone_angle` is in radians; zero is a flat shoulder.
    pub fn new(
        shoulder_radius: f64,
        probe_radius: f64,
        probe_height: f64,
        cone_angle: f64,
    ) -> Result<Self> {
        require_positive("probe radius", probe_radius)?;
        require_positive("shoulder radius", shoulder_radius)?;
        require_positive("probe height", probe_height)?;
        if probe_radius >= shoulder_radius {
            return Err(Error::invalid(
                "tool geometry",
                format!("probe radius {probe_radius} must be smaller than shoulder radius {shoulder_radius}"),
            ));
        }
        if !(0.0..FRAC_PI_2).contains(&cone_angle) {
            return Err(Error::invalid(
                "cone angle",
                format!("must lie in [0, pi/2), got {cone_angle}"),
            ));
        }
        Ok(Self {
            shoulder_radius,
            probe_radius,
            probe_height,
            cone_angle,
            tilt_angle: 0.0,
        })
    }

    /// Tool tilt is carried for bookkeeping only; the thermal model ignores it.
    pub fn with_tilt(mut self, tilt_angle: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&tilt_angle) {
            return Err(Error::invalid(
                "tilt angle",
                format!("must lie in [0, pi/2), got {tilt_angle}"),
            ));
        }
        self.tilt_angle = tilt_angle;
        Ok(self)
    }

    pub fn shoulder_radius(&self) -> f64 {
        self.shoulder_radius
    }

    pub fn probe_radius(&self) -> f64 {
        self.probe_radius
    }

    pub fn probe_height(&self) -> f64 {
        self.probe_height
    }

    pub fn cone_angle(&self) -> f64 {
        self.cone_angle
    }

    pub fn tilt_angle(&self) -> f64 {
        self.tilt_angle
    }

    /// Projected area of the shoulder annulus (probe footprint excluded).
    pub fn shoulder_annulus_area(&self) -> f64 {
        PI * (self.shoulder_radius * self.shoulder_radius - self.probe_radius * self.probe_radius)
    }
}

/// Nominal process settings of a weld.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParameters {
    omega: f64,
    traverse_speed: f64,
    downward_force: f64,
    torque: Option<f64>,
    traverse_force: Option<f64>,
    efficiency: f64,
}

impl ProcessParameters {
    /// Default power efficiency: about 5% of the tool power is lost into the tool.
    pub const DEFAULT_EFFICIENCY: f64 = 0.95;

    pub fn new(omega: f64, traverse_speed: f64, downward_force: f64) -> Result<Self> {
        require_positive("rotational speed", omega)?;
        require_non_negative("traverse speed", traverse_speed)?;
        require_non_negative("downward force", downward_force)?;
        Ok(Self {
            omega,
            traverse_speed,
            downward_force,
            torque: None,
            traverse_force: None,
            efficiency: Self::DEFAULT_EFFICIENCY,
        })
    }

    pub fn with_torque(mut self, torque: f64) -> Result<Self> {
        self.torque = Some(require_non_negative("torque", torque)?);
        Ok(self)
    }

    pub fn with_traverse_force(mut self, force: f64) -> Result<Self> {
        self.traverse_force = Some(require_non_negative("traverse force", force)?);
        Ok(self)
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Result<Self> {
        self.efficiency = require_unit_interval("efficiency", efficiency)?;
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn traverse_speed(&self) -> f64 {
        self.traverse_speed
    }

    pub fn downward_force(&self) -> f64 {
        self.downward_force
    }

    pub fn torque(&self) -> Option<f64> {
        self.torque
    }

    pub fn traverse_force(&self) -> Option<f64> {
        self.traverse_force
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }
}

/// Contact state at the tool/workpiece interface.
///
/// `delta = 0` is pure sliding, `delta = 1` full sticking, anything between a
/// partial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactModel {
    delta: f64,
    friction_coefficient: f64,
    contact_pressure: f64,
}

impl ContactModel {
    pub fn new(delta: f64, friction_coefficient: f64, contact_pressure: f64) -> Result<Self> {
        require_unit_interval("contact state variable", delta)?;
        require_positive("friction coefficient", friction_coefficient)?;
        require_non_negative("contact pressure", contact_pressure)?;
        Ok(Self {
            delta,
            friction_coefficient,
            contact_pressure,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn friction_coefficient(&self) -> f64 {
        self.friction_coefficient
    }

    pub fn contact_pressure(&self) -> f64 {
        self.contact_pressure
    }

    /// Coulomb shear stress `mu * p`.
    pub fn friction_shear_stress(&self) -> f64 {
        self.friction_coefficient * self.contact_pressure
    }

    /// Local velocity of the matrix at the interface for a tool surface speed `v_tool`.
    pub fn workpiece_velocity(&self, v_tool: f64) -> f64 {
        self.delta * v_tool
    }

    /// Slip velocity between tool and matrix, `v_tool - v_workpiece`.
    pub fn slip_rate(&self, v_tool: f64) -> f64 {
        v_tool - self.workpiece_velocity(v_tool)
    }
}

/// Rectangular plate. x runs along the weld, y across it, z through the thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkpieceGeometry {
    length: f64,
    width: f64,
    thickness: f64,
    joint_line_offset: f64,
}

impl WorkpieceGeometry {
    /// The joint line defaults to the plate centre line `y = width / 2`.
    pub fn new(length: f64, width: f64, thickness: f64) -> Result<Self> {
        require_positive("workpiece length", length)?;
        require_positive("workpiece width", width)?;
        require_positive("workpiece thickness", thickness)?;
        Ok(Self {
            length,
            width,
            thickness,
            joint_line_offset: 0.5 * width,
        })
    }

    pub fn with_joint_line(mut self, offset: f64) -> Result<Self> {
        if !(offset > 0.0 && offset < self.width) {
            return Err(Error::invalid(
                "joint line offset",
                format!("must lie strictly inside (0, {}), got {offset}", self.width),
            ));
        }
        self.joint_line_offset = offset;
        Ok(self)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn joint_line_offset(&self) -> f64 {
        self.joint_line_offset
    }

    /// The probe must not be longer than the plate is thick.
    pub fn check_tool(&self, tool: &ToolGeometry) -> Result<()> {
        if self.thickness < tool.probe_height() {
            return Err(Error::invalid(
                "workpiece thickness",
                format!(
                    "thickness {} is smaller than the probe height {}",
                    self.thickness,
                    tool.probe_height()
                ),
            ));
        }
        Ok(())
    }
}

/// Backing strip under the weld line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackingSpar {
    width: f64,
    height: f64,
}

impl BackingSpar {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        require_positive("spar width", width)?;
        require_positive("spar height", height)?;
        Ok(Self { width, height })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

/// Workpiece/backing contact conductance in W/(m^2 K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapConductance(f64);

impl GapConductance {
    /// Contact conductance commonly used away from the tool.
    pub const DEFAULT: f64 = 1000.0;

    pub fn new(h_gap: f64) -> Result<Self> {
        require_positive("gap conductance", h_gap).map(Self)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// How the bottom of the workpiece exchanges heat with the backing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BottomContactCondition {
    /// No backing plate; the bottom surface is insulated.
    Adiabatic,
    /// Full backing plate in perfect thermal contact.
    PerfectContact,
    /// Backing spar in perfect contact under the weld line; insulated elsewhere.
    SparContact(BackingSpar),
    /// Full backing plate coupled through a contact conductance, with perfect
    /// contact under the shoulder footprint.
    GapConductance(GapConductance),
}

impl BottomContactCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Adiabatic => "adiabatic",
            Self::PerfectContact => "perfect",
            Self::SparContact(_) => "spar",
            Self::GapConductance(_) => "gap",
        }
    }

    /// Whether backing cells are part of the computational domain.
    pub fn has_backing(&self) -> bool {
        !matches!(self, Self::Adiabatic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseKind {
    Plunge,
    Dwell,
    Traverse,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Plunge => "plunge",
            Self::Dwell => "dwell",
            Self::Traverse => "traverse",
        }
    }
}

/// One segment of the weld schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeldPhase {
    kind: PhaseKind,
    duration: f64,
    omega: f64,
    traverse_speed: f64,
    plunge_rate: f64,
}

impl WeldPhase {
    pub fn plunge(duration: f64, omega: f64, plunge_rate: f64) -> Result<Self> {
        require_non_negative("plunge rate", plunge_rate)?;
        Self::build(PhaseKind::Plunge, duration, omega, 0.0, plunge_rate)
    }

    pub fn dwell(duration: f64, omega: f64) -> Result<Self> {
        Self::build(PhaseKind::Dwell, duration, omega, 0.0, 0.0)
    }

    pub fn traverse(duration: f64, omega: f64, traverse_speed: f64) -> Result<Self> {
        require_positive("traverse speed", traverse_speed)?;
        Self::build(PhaseKind::Traverse, duration, omega, traverse_speed, 0.0)
    }

    fn build(
        kind: PhaseKind,
        duration: f64,
        omega: f64,
        traverse_speed: f64,
        plunge_rate: f64,
    ) -> Result<Self> {
        require_positive("phase duration", duration)?;
        require_positive("phase rotational speed", omega)?;
        Ok(Self {
            kind,
            duration,
            omega,
            traverse_speed,
            plunge_rate,
        })
    }

    pub fn kind(&self) -> PhaseKind {
        self.kind
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn traverse_speed(&self) -> f64 {
        self.traverse_speed
    }

    pub fn plunge_rate(&self) -> f64 {
        self.plunge_rate
    }
}

/// Ordered plunge / dwell / traverse timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct WeldSchedule {
    phases: Vec<WeldPhase>,
}

impl WeldSchedule {
    /// Phases must appear in plunge, dwell, traverse order; any of them may be
    /// absent and a kind may repeat (e.g. two traverse speeds).
    pub fn new(phases: Vec<WeldPhase>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::invalid(
                "weld schedule",
                "at least one phase is required",
            ));
        }
        for pair in phases.windows(2) {
            if pair[1].kind < pair[0].kind {
                return Err(Error::invalid(
                    "weld schedule",
                    format!(
                        "{} phase cannot follow a {} phase",
                        pair[1].kind.name(),
                        pair[0].kind.name()
                    ),
                ));
            }
        }
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[WeldPhase] {
        &self.phases
    }

    pub fn total_duration(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// Distance the tool travels over the whole schedule.
    pub fn traverse_distance(&self) -> f64 {
        self.phases
            .iter()
            .map(|p| p.duration * p.traverse_speed)
            .sum()
    }
}

/// Mean contact pressure of the downward force over the shoulder annulus.
pub fn shoulder_contact_pressure(downward_force: f64, tool: &ToolGeometry) -> Result<f64> {
    require_non_negative("downward force", downward_force)?;
    let area = tool.shoulder_annulus_area();
    if area <= 0.0 {
        return Err(Error::invalid(
            "tool geometry",
            "shoulder annulus has zero area",
        ));
    }
    Ok(downward_force / area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_tool() -> ToolGeometry {
        ToolGeometry::new(9e-3, 3e-3, 4e-3, 10f64.to_radians()).unwrap()
    }

    #[test]
    fn tool_invariants_rejected() {
        assert!(ToolGeometry::new(3e-3, 3e-3, 4e-3, 0.0).is_err());
        assert!(ToolGeometry::new(3e-3, 4e-3, 4e-3, 0.0).is_err());
        assert!(ToolGeometry::new(9e-3, 0.0, 4e-3, 0.0).is_err());
        assert!(ToolGeometry::new(9e-3, 3e-3, 0.0, 0.0).is_err());
        assert!(ToolGeometry::new(9e-3, 3e-3, 4e-3, FRAC_PI_2).is_err());
        assert!(ToolGeometry::new(9e-3, 3e-3, 4e-3, -0.1).is_err());
        assert!(reference_tool().with_tilt(-1.0).is_err());
        assert_eq!(reference_tool().with_tilt(0.04).unwrap().tilt_angle(), 0.04);
    }

    #[test]
    fn other_invariants_rejected() {
        assert!(ProcessParameters::new(0.0, 0.0, 1.0).is_err());
        assert!(ProcessParameters::new(1.0, 0.0, 1.0)
            .unwrap()
            .with_efficiency(1.1)
            .is_err());
        assert_eq!(
            ProcessParameters::new(1.0, 0.0, 1.0).unwrap().efficiency(),
            0.95
        );
        assert!(ContactModel::new(1.2, 0.3, 1.0).is_err());
        assert!(ContactModel::new(0.5, 0.0, 1.0).is_err());
        assert!(ContactModel::new(0.5, 0.3, -1.0).is_err());
        assert!(WorkpieceGeometry::new(0.1, 0.0, 0.005).is_err());
        let plate = WorkpieceGeometry::new(0.1, 0.05, 0.003).unwrap();
        assert_eq!(plate.joint_line_offset(), 0.025);
        assert!(plate.with_joint_line(0.05).is_err());
        assert!(plate.check_tool(&reference_tool()).is_err());
        assert!(BackingSpar::new(0.0, 0.01).is_err());
        assert!(GapConductance::new(-5.0).is_err());
    }

    #[test]
    fn schedule_order_and_durations() {
        let p = WeldPhase::plunge(1.0, 40.0, 1e-3).unwrap();
        let d = WeldPhase::dwell(2.0, 40.0).unwrap();
        let t = WeldPhase::traverse(5.0, 40.0, 5e-3).unwrap();
        let s = WeldSchedule::new(alloc::vec![p, d, t, t]).unwrap();
        assert_eq!(s.total_duration(), 13.0);
        assert_relative_eq!(s.traverse_distance(), 0.05);
        assert!(WeldSchedule::new(alloc::vec![d, p]).is_err());
        assert!(WeldSchedule::new(alloc::vec![t, d]).is_err());
        assert!(WeldSchedule::new(alloc::vec![]).is_err());
        assert!(WeldPhase::traverse(5.0, 40.0, 0.0).is_err());
        assert!(WeldPhase::dwell(0.0, 40.0).is_err());
    }

    #[test]
    fn slip_rate_follows_delta() {
        let c = ContactModel::new(0.25, 0.3, 1e7).unwrap();
        assert_relative_eq!(c.slip_rate(2.0), 1.5);
        assert_relative_eq!(c.workpiece_velocity(2.0), 0.5);
        assert_relative_eq!(c.friction_shear_stress(), 3e6);
    }

    #[test]
    fn contact_pressure_examples() {
        let tool = reference_tool();
        assert_eq!(shoulder_contact_pressure(0.0, &tool).unwrap(), 0.0);
        let unit = PI * (9e-3f64.powi(2) - 3e-3f64.powi(2));
        assert_relative_eq!(
            shoulder_contact_pressure(unit, &tool).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // 10 kN on the 9/3 mm annulus.
        let p = shoulder_contact_pressure(10_000.0, &tool).unwrap();
        assert_relative_eq!(p, 10_000.0 / (PI * 72e-6), max_relative = 1e-12);
        assert_relative_eq!(p, 4.42e7, max_relative = 1e-3);
        assert!(shoulder_contact_pressure(-1.0, &tool).is_err());
    }

    proptest! {
        #[test]
        fn pressure_linear_in_force_and_decreasing_in_shoulder(
            force in 0.0..5e4f64,
            rp in 1e-3..5e-3f64,
            extra in 1e-4..1e-2f64,
            bump in 1e-5..5e-3f64,
        ) {
            let a = ToolGeometry::new(rp + extra, rp, 2e-3, 0.0).unwrap();
            let b = ToolGeometry::new(rp + extra + bump, rp, 2e-3, 0.0).unwrap();
            let pa = shoulder_contact_pressure(force, &a).unwrap();
            let pa2 = shoulder_contact_pressure(2.0 * force, &a).unwrap();
            prop_assert!((pa2 - 2.0 * pa).abs() <= 1e-12 * pa2.abs().max(1.0));
            let pb = shoulder_contact_pressure(force, &b).unwrap();
            if force > 0.0 {
                prop_assert!(pb < pa);
            }
        }
    }
}
