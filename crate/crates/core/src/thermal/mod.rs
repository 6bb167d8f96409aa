//! Transient heat conduction in the workpiece and its backing.
//!
//! The domain is a uniform cell-centred grid. Each cell carries its enthalpy
//! per unit volume; an explicit (forward Euler) update of the enthalpy keeps
//! the energy bookkeeping exact even with temperature-dependent `c_p`, and the
//! temperature is recovered by inverting the enthalpy curve. Face
//! conductances use half-cell resistances in series (the harmonic mean of the
//! two conductivities), with an extra contact resistance across the
//! workpiece/backing interface where one is modelled.

mod boundary;
mod field;
mod solver;
mod source;
mod weld;

pub use boundary::{
    bottom_coupling, top_surface_loss, BottomCoupling, Boundaries, Face, FaceCondition,
    STEFAN_BOLTZMANN,
};
pub use field::{CellTag, Grid, ThermalField};
pub use solver::{stable_timestep, ConductionSolver, EnergyLedger, Materials, STABILITY_SAFETY};
pub use source::{apply_tool_source, SourceLayout};
pub use weld::{
    run, GridResolution, HeatSourceModel, PhaseEnergy, PowerModel, Probe, RunHistory, RunObserver,
    RunOptions, WeldSetup, WeldSimulation, YieldSource,
};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::types::BottomContactCondition;

/// Radial shape of the surface heat flux over the shoulder annulus and probe tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxProfile {
    #[default]
    Uniform,
    /// Flux density proportional to the radius, as `omega r tau` implies.
    LinearInR,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DtPolicy {
    /// Use the stability limit of the current field at every step.
    #[default]
    Auto,
    /// Fixed step in seconds; a step above the stability limit is refused.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceMode {
    /// All heat enters through the tool contact surfaces.
    #[default]
    SurfaceFlux,
    /// A fraction `gamma` is deposited in the probe-swept volume.
    SurfacePlusVolumetric,
}

impl SourceMode {
    /// Volume fraction used when none is configured.
    pub fn default_gamma(self) -> f64 {
        match self {
            SourceMode::SurfaceFlux => 0.0,
            SourceMode::SurfacePlusVolumetric => 1.0,
        }
    }
}

/// Boundary, source and time-step settings of a weld simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub ambient_temperature: f64,
    /// Defaults to the ambient temperature.
    pub initial_temperature: Option<f64>,
    /// Convection coefficient on the top surface outside the shoulder.
    pub h_top: f64,
    /// Convection coefficient on the lateral faces and on the exposed faces of the backing.
    pub h_side: f64,
    pub bottom: BottomContactCondition,
    pub stefan_boltzmann: f64,
    pub flux_profile: FluxProfile,
    pub dt_policy: DtPolicy,
    pub source_mode: SourceMode,
    /// Backing plate thickness for the perfect-contact and gap options.
    pub backing_thickness: f64,
}

impl SolverConfig {
    pub const DEFAULT_BACKING_THICKNESS: f64 = 12e-3;
    pub const MAX_BACKING_THICKNESS: f64 = 60e-3;

    pub fn new(
        ambient_temperature: f64,
        h_top: f64,
        h_side: f64,
        bottom: BottomContactCondition,
    ) -> Result<Self> {
        let config = Self {
            ambient_temperature,
            initial_temperature: None,
            h_top,
            h_side,
            bottom,
            stefan_boltzmann: STEFAN_BOLTZMANN,
            flux_profile: FluxProfile::Uniform,
            dt_policy: DtPolicy::Auto,
            source_mode: SourceMode::SurfaceFlux,
            backing_thickness: Self::DEFAULT_BACKING_THICKNESS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("ambient temperature", self.ambient_temperature)?;
        if let Some(t) = self.initial_temperature {
            require_positive("initial temperature", t)?;
        }
        require_non_negative("top convection coefficient", self.h_top)?;
        require_non_negative("side convection coefficient", self.h_side)?;
        require_non_negative("Stefan-Boltzmann constant", self.stefan_boltzmann)?;
        if let DtPolicy::Fixed(dt) = self.dt_policy {
            require_positive("fixed time step", dt)?;
        }
        if !(self.backing_thickness > 0.0 && self.backing_thickness <= Self::MAX_BACKING_THICKNESS)
        {
            return Err(Error::invalid(
                "backing thickness",
                alloc::format!("must lie in (0, 60 mm], got {} m", self.backing_thickness),
            ));
        }
        Ok(())
    }

    pub fn initial_temperature(&self) -> f64 {
        self.initial_temperature.unwrap_or(self.ambient_temperature)
    }
}
