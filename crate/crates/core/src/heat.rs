//! Analytical heat generation at the tool/workpiece interface.
//!
//! Heat is generated over three tool surfaces: the (possibly conical) shoulder,
//! the cylindrical probe side and the flat probe tip. With a uniform contact
//! shear stress `tau` each surface element contributes `omega * r * tau dA`,
//! which integrates to
//!
//! ```text
//! Q1 = 2/3 pi omega tau (Rs^3 - Rp^3)(1 + tan alpha)
//! Q2 = 2   pi omega tau Rp^2 Hp
//! Q3 = 2/3 pi omega tau Rp^3
//! ```
//!
//! The contact shear stress is the yield shear stress for sticking, `mu p`
//! for sliding, and a `delta`-weighted blend of the two otherwise.

use core::f64::consts::PI;

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};
use crate::material::yield_shear_stress;
use crate::math;
use crate::types::ToolGeometry;

/// Per-surface heat generation and the corresponding fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatBreakdown {
    pub shoulder: f64,
    pub probe_side: f64,
    pub probe_tip: f64,
    pub total: f64,
    pub fractions: HeatFractions,
}

/// Share of the total heat generated on each tool surface. Depends on the
/// tool geometry only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatFractions {
    pub shoulder: f64,
    pub probe_side: f64,
    pub probe_tip: f64,
}

/// Split of a heat input into a volumetric and a surface contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatPartition {
    pub gamma: f64,
    pub volumetric: f64,
    pub surface: f64,
    /// Taylor-Quinney coefficient associated with the volumetric part.
    pub taylor_quinney: f64,
}

/// Mechanical power derived from the measured torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorquePower {
    /// `M * omega`
    pub rotational: f64,
    /// `F_trans * v_trans`, always computed so its share can be reported.
    pub traverse: f64,
    /// Power used downstream: rotational only, or rotational + traverse.
    pub total: f64,
}

impl TorquePower {
    /// Traverse term as a fraction of the full power `M omega + F v`.
    pub fn traverse_share(&self) -> f64 {
        let full = self.rotational + self.traverse;
        if full > 0.0 {
            self.traverse / full
        } else {
            0.0
        }
    }
}

/// Geometric factors such that `Q_i = 2/3 pi omega tau g_i`.
#[derive(Debug, Clone, Copy)]
struct SurfaceFactors {
    shoulder: f64,
    probe_side: f64,
    probe_tip: f64,
}

impl SurfaceFactors {
    fn of(tool: &ToolGeometry) -> Self {
        let rs = tool.shoulder_radius();
        let rp = tool.probe_radius();
        let hp = tool.probe_height();
        let cone = 1.0 + math::tan(tool.cone_angle());
        Self {
            shoulder: (rs * rs * rs - rp * rp * rp) * cone,
            probe_side: 3.0 * rp * rp * hp,
            probe_tip: rp * rp * rp,
        }
    }

    fn sum(&self) -> f64 {
        self.shoulder + self.probe_side + self.probe_tip
    }
}

/// Contact state variable `delta = v_workpiece / v_tool`.
pub fn contact_state_variable(v_workpiece: f64, v_tool: f64) -> Result<f64> {
    if !(v_tool.is_finite() && v_tool > 0.0) {
        return Err(Error::invalid("tool surface velocity", "must be > 0"));
    }
    require_non_negative("workpiece surface velocity", v_workpiece)?;
    if v_workpiece > v_tool {
        return Err(Error::invalid(
            "workpiece surface velocity",
            alloc::format!("{v_workpiece} exceeds the tool velocity {v_tool}"),
        ));
    }
    Ok(v_workpiece / v_tool)
}

/// Angular form of [`contact_state_variable`]: both surfaces at the same
/// radius, so the radius cancels.
pub fn contact_state_from_rotation(omega_workpiece: f64, omega_tool: f64) -> Result<f64> {
    contact_state_variable(omega_workpiece, omega_tool)
}

/// Heat generated on each tool surface for a uniform contact shear stress.
pub fn surface_heat_components(tool: &ToolGeometry, omega: f64, tau_contact: f64) -> HeatBreakdown {
    let g = SurfaceFactors::of(tool);
    let scale = 2.0 / 3.0 * PI * omega * tau_contact;
    let shoulder = scale * g.shoulder;
    let probe_side = scale * g.probe_side;
    let probe_tip = scale * g.probe_tip;
    HeatBreakdown {
        shoulder,
        probe_side,
        probe_tip,
        total: shoulder + probe_side + probe_tip,
        fractions: heat_fractions(tool),
    }
}

/// Closed-form total for a flat shoulder, `2/3 pi omega tau (Rs^3 + 3 Rp^2 Hp)`.
///
/// Only meaningful when the cone angle is zero.
pub fn flat_shoulder_total(tool: &ToolGeometry, omega: f64, tau_contact: f64) -> f64 {
    let rs = tool.shoulder_radius();
    let rp = tool.probe_radius();
    let hp = tool.probe_height();
    2.0 / 3.0 * PI * omega * tau_contact * (rs * rs * rs + 3.0 * rp * rp * hp)
}

pub fn heat_fractions(tool: &ToolGeometry) -> HeatFractions {
    let g = SurfaceFactors::of(tool);
    let sum = g.sum();
    HeatFractions {
        shoulder: g.shoulder / sum,
        probe_side: g.probe_side / sum,
        probe_tip: g.probe_tip / sum,
    }
}

/// Total heat for full sticking: `tau = sigma_yield / sqrt(3)`.
pub fn total_heat_sticking(tool: &ToolGeometry, omega: f64, sigma_yield: f64) -> f64 {
    surface_heat_components(tool, omega, yield_shear_stress(sigma_yield)).total
}

/// Total heat for pure sliding: `tau = mu p`.
pub fn total_heat_sliding(
    tool: &ToolGeometry,
    omega: f64,
    friction_coefficient: f64,
    pressure: f64,
) -> f64 {
    surface_heat_components(tool, omega, friction_coefficient * pressure).total
}

/// `delta * Q_sticking + (1 - delta) * Q_sliding`.
pub fn total_heat_mixed(
    tool: &ToolGeometry,
    omega: f64,
    delta: f64,
    sigma_yield: f64,
    friction_coefficient: f64,
    pressure: f64,
) -> Result<f64> {
    require_unit_interval("contact state variable", delta)?;
    let sticking = total_heat_sticking(tool, omega, sigma_yield);
    let sliding = total_heat_sliding(tool, omega, friction_coefficient, pressure);
    Ok(delta * sticking + (1.0 - delta) * sliding)
}

/// Tool power from torque, `P = M omega (+ F_trans v_trans)`.
pub fn power_from_torque(
    torque: f64,
    omega: f64,
    traverse_force: f64,
    traverse_speed: f64,
    include_traverse: bool,
) -> Result<TorquePower> {
    require_non_negative("torque", torque)?;
    require_non_negative("rotational speed", omega)?;
    require_non_negative("traverse force", traverse_force)?;
    require_non_negative("traverse speed", traverse_speed)?;
    let rotational = torque * omega;
    let traverse = traverse_force * traverse_speed;
    let total = if include_traverse {
        rotational + traverse
    } else {
        rotational
    };
    Ok(TorquePower {
        rotational,
        traverse,
        total,
    })
}

/// Heat entering the weld, `Q = P eta`.
pub fn heat_input(power: f64, efficiency: f64) -> Result<f64> {
    require_unit_interval("efficiency", efficiency)?;
    Ok(power * efficiency)
}

impl HeatPartition {
    /// Mid-range Taylor-Quinney value used when none is given.
    pub const DEFAULT_TAYLOR_QUINNEY: f64 = 0.9;

    pub fn with_taylor_quinney(mut self, beta: f64) -> Result<Self> {
        self.taylor_quinney = require_unit_interval("Taylor-Quinney coefficient", beta)?;
        Ok(self)
    }
}

/// `Q_v = gamma Q`, `Q_s = (1 - gamma) Q`.
pub fn partition_heat(heat: f64, gamma: f64) -> Result<HeatPartition> {
    require_unit_interval("volume fraction gamma", gamma)?;
    let volumetric = gamma * heat;
    Ok(HeatPartition {
        gamma,
        volumetric,
        surface: heat - volumetric,
        taylor_quinney: HeatPartition::DEFAULT_TAYLOR_QUINNEY,
    })
}

/// Plastic dissipation per unit volume from effective stress and strain rate.
///
/// Values of `beta` outside the usual 0.8..0.99 band are accepted with a warning.
pub fn volumetric_dissipation_density(
    effective_stress: f64,
    effective_strain_rate: f64,
    beta: f64,
) -> Result<f64> {
    require_non_negative("effective stress", effective_stress)?;
    require_non_negative("effective strain rate", effective_strain_rate)?;
    require_positive("Taylor-Quinney coefficient", beta)?;
    if !(0.8..=0.99).contains(&beta) {
        log::warn!("Taylor-Quinney coefficient {beta} is outside the typical range 0.8..0.99");
    }
    Ok(beta * effective_stress * effective_strain_rate)
}
