//! Kinematic picture of the material flow around the probe.
//!
//! Three solenoidal fields are superposed in a tool-centred frame (tool axis
//! along z, travel towards +x, counter-clockwise rotation seen from +z):
//!
//! - rotation: angular speed `omega` at the probe surface, tapering linearly
//!   to zero at the edge of the shear zone;
//! - translation: uniform `v_trans` along +x;
//! - ring vortex: a Rankine vortex circulating in the r-z plane around a ring
//!   of radius `R` lying in the plane `z = 0`.
//!
//! The vortex is derived from the Stokes stream function `psi = R Phi(s)`,
//! where `s` is the distance to the vortex ring core and `Phi' = u(s)` is the
//! Rankine speed profile. Taking `v_r = -(1/r) dpsi/dz` and `v_z = (1/r) dpsi/dr`
//! makes the field divergence free by construction.
//!
//! With this convention the advancing side (tool surface moving along the
//! travel direction) is `y < 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowFieldConfig {
    probe_radius: f64,
    shear_zone_radius: f64,
    omega: f64,
    traverse_speed: f64,
    circulation: f64,
    core_radius: f64,
    ring_radius: f64,
    domain: Option<[[f64; 3]; 2]>,
}

impl FlowFieldConfig {
    /// `circulation` may be negative to reverse the vortex sense.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        probe_radius: f64,
        shear_zone_radius: f64,
        omega: f64,
        traverse_speed: f64,
        circulation: f64,
        core_radius: f64,
        ring_radius: f64,
    ) -> Result<Self> {
        require_positive("probe radius", probe_radius)?;
        if !(shear_zone_radius.is_finite() && shear_zone_radius >= probe_radius) {
            return Err(Error::invalid(
                "shear zone radius",
                alloc::format!("must be >= probe radius {probe_radius}, got {shear_zone_radius}"),
            ));
        }
        require_non_negative("flow rotational speed", omega)?;
        require_non_negative("traverse speed", traverse_speed)?;
        if !circulation.is_finite() {
            return Err(Error::invalid("circulation", "must be finite"));
        }
        require_positive("vortex core radius", core_radius)?;
        if !(ring_radius > probe_radius && ring_radius <= shear_zone_radius) {
            return Err(Error::invalid(
                "vortex ring radius",
                alloc::format!(
                    "must lie in ({probe_radius}, {shear_zone_radius}], got {ring_radius}"
                ),
            ));
        }
        Ok(Self {
            probe_radius,
            shear_zone_radius,
            omega,
            traverse_speed,
            circulation,
            core_radius,
            ring_radius,
            domain: None,
        })
    }

    /// Tracers leaving the box `[min, max]` are stopped.
    pub fn with_domain(mut self, min: [f64; 3], max: [f64; 3]) -> Result<Self> {
        if (0..3).any(|a| !(min[a] < max[a])) {
            return Err(Error::invalid(
                "flow domain",
                "min must be below max on every axis",
            ));
        }
        self.domain = Some([min, max]);
        Ok(self)
    }

    pub fn probe_radius(&self) -> f64 {
        self.probe_radius
    }

    pub fn shear_zone_radius(&self) -> f64 {
        self.shear_zone_radius
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn traverse_speed(&self) -> f64 {
        self.traverse_speed
    }

    pub fn circulation(&self) -> f64 {
        self.circulation
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn ring_radius(&self) -> f64 {
        self.ring_radius
    }

    pub fn domain(&self) -> Option<[[f64; 3]; 2]> {
        self.domain
    }

    /// Angular speed of the rotation field at radius `r`.
    pub fn angular_speed(&self, r: f64) -> f64 {
        let (rp, rs) = (self.probe_radius, self.shear_zone_radius);
        if r >= rs {
            0.0
        } else if r <= rp || rs == rp {
            self.omega
        } else {
            self.omega * (rs - r) / (rs - rp)
        }
    }

    fn contains(&self, p: [f64; 3]) -> bool {
        match self.domain {
            None => true,
            Some([lo, hi]) => (0..3).all(|a| p[a] >= lo[a] && p[a] <= hi[a]),
        }
    }

    /// Rankine speed at distance `s` from the ring core.
    fn vortex_speed(&self, s: f64) -> f64 {
        let rc = self.core_radius;
        if s < rc {
            self.circulation * s / (2.0 * PI * rc * rc)
        } else {
            self.circulation / (2.0 * PI * s)
        }
    }
}

/// Composed velocity at `point` (m, tool-centred), in m/s.
pub fn velocity_at(point: [f64; 3], config: &FlowFieldConfig) -> Result<[f64; 3]> {
    let [x, y, z] = point;
    let r = math::hypot(x, y);
    if r < config.probe_radius {
        return Err(Error::InsideProbe {
            radius: r,
            probe_radius: config.probe_radius,
        });
    }
    let w = config.angular_speed(r);
    let mut v = [-w * y + config.traverse_speed, w * x, 0.0];

    if config.circulation != 0.0 {
        let big_r = config.ring_radius;
        let dr = r - big_r;
        let s = math::hypot(dr, z);
        if s > 0.0 {
            let scale = big_r / r * config.vortex_speed(s) / s;
            let v_r = -scale * z;
            v[2] = scale * dr;
            v[0] += v_r * x / r;
            v[1] += v_r * y / r;
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracerStatus {
    Completed,
    ExitedDomain,
    EnteredProbe,
}

impl TracerStatus {
    pub fn name(self) -> &'static str {
        match self {
            TracerStatus::Completed => "completed",
            TracerStatus::ExitedDomain => "exited_domain",
            TracerStatus::EnteredProbe => "entered_probe",
        }
    }
}

/// Tracer path sampled at every step, starting at the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Streamline {
    pub points: Vec<[f64; 3]>,
    pub status: TracerStatus,
}

fn axpy(p: [f64; 3], a: f64, v: [f64; 3]) -> [f64; 3] {
    [p[0] + a * v[0], p[1] + a * v[1], p[2] + a * v[2]]
}

fn rk4(p: [f64; 3], dt: f64, config: &FlowFieldConfig) -> Result<[f64; 3]> {
    let k1 = velocity_at(p, config)?;
    let k2 = velocity_at(axpy(p, 0.5 * dt, k1), config)?;
    let k3 = velocity_at(axpy(p, 0.5 * dt, k2), config)?;
    let k4 = velocity_at(axpy(p, dt, k3), config)?;
    let mut out = p;
    for a in 0..3 {
        out[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    Ok(out)
}

/// Advect each seed with classical fourth-order Runge-Kutta up to `t_end`.
///
/// The step is shortened uniformly so that a whole number of steps ends
/// exactly at `t_end`. A seed outside the field (inside the probe) yields an
/// error for that seed only.
pub fn advect_tracers(
    seeds: &[[f64; 3]],
    config: &FlowFieldConfig,
    t_end: f64,
    dt: f64,
) -> Result<Vec<Result<Streamline>>> {
    require_positive("tracer time step", dt)?;
    require_non_negative("tracer end time", t_end)?;
    let steps = math::ceil(t_end / dt - 1e-9).max(0.0) as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    Ok(seeds
        .iter()
        .map(|&seed| trace(seed, config, steps, h))
        .collect())
}

fn trace(seed: [f64; 3], config: &FlowFieldConfig, steps: usize, h: f64) -> Result<Streamline> {
    velocity_at(seed, config)?;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(seed);
    let mut p = seed;
    for _ in 0..steps {
        match rk4(p, h, config) {
            Ok(next) => {
                if !config.contains(next) {
                    return Ok(Streamline {
                        points,
                        status: TracerStatus::ExitedDomain,
                    });
                }
                if math::hypot(next[0], next[1]) < config.probe_radius {
                    return Ok(Streamline {
                        points,
                        status: TracerStatus::EnteredProbe,
                    });
                }
                points.push(next);
                p = next;
            }
            Err(Error::InsideProbe { .. }) => {
                return Ok(Streamline {
                    points,
                    status: TracerStatus::EnteredProbe,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Streamline {
        points,
        status: TracerStatus::Completed,
    })
}
