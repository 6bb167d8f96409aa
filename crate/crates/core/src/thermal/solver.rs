use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{require_positive, Error, Result};
use crate::material::ThermophysicalTable;
use crate::thermal::boundary::{BottomCoupling, Boundaries, Face};
use crate::thermal::field::{CellTag, ThermalField};

/// Fraction of the explicit stability limit actually used.
pub const STABILITY_SAFETY: f64 = 0.9;

/// Material of the workpiece and, when modelled, of the backing.
#[derive(Debug, Clone, PartialEq)]
pub struct Materials {
    pub workpiece: ThermophysicalTable,
    pub backing: Option<ThermophysicalTable>,
}

impl Materials {
    pub fn workpiece_only(workpiece: ThermophysicalTable) -> Self {
        Self {
            workpiece,
            backing: None,
        }
    }

    #[inline]
    fn of(&self, tag: CellTag) -> Option<&ThermophysicalTable> {
        match tag {
            CellTag::Void => None,
            CellTag::Workpiece => Some(&self.workpiece),
            CellTag::Backing => self.backing.as_ref(),
        }
    }
}

/// Largest stable explicit step for the current field:
/// `0.9 * 0.5 / (kappa_max (1/dx^2 + 1/dy^2 + 1/dz^2))`.
pub fn stable_timestep(field: &ThermalField, materials: &Materials) -> f64 {
    let g = field.grid();
    let kappa_max = field
        .temperatures()
        .iter()
        .zip(field.tags())
        .filter_map(|(t, tag)| materials.of(*tag).map(|m| m.diffusivity(*t)))
        .fold(0.0, f64::max);
    let inv = 1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy) + 1.0 / (g.dz * g.dz);
    STABILITY_SAFETY * 0.5 / (kappa_max * inv)
}

/// Running energy balance in joules.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    /// Heat deposited by sources.
    pub deposited: f64,
    /// Change of the total enthalpy of the domain.
    pub stored: f64,
    /// Heat that left through each face of the bounding box, indexed by [`Face::index`].
    pub losses: [f64; 6],
}

impl EnergyLedger {
    pub fn loss(&self, face: Face) -> f64 {
        self.losses[face.index()]
    }

    pub fn total_loss(&self) -> f64 {
        self.losses.iter().sum()
    }

    /// `deposited - stored - lost`; zero for an exact balance.
    pub fn residual(&self) -> f64 {
        self.deposited - self.stored - self.total_loss()
    }

    /// Residual relative to the largest energy flow in the balance.
    pub fn relative_error(&self) -> f64 {
        let scale = self
            .deposited
            .abs()
            .max(self.stored.abs() + self.losses.iter().map(|l| l.abs()).sum::<f64>());
        if scale > 0.0 {
            self.residual().abs() / scale
        } else {
            0.0
        }
    }

    /// Balance accumulated between `earlier` and `self`.
    pub fn since(&self, earlier: &EnergyLedger) -> EnergyLedger {
        let mut losses = [0.0; 6];
        for (i, l) in losses.iter_mut().enumerate() {
            *l = self.losses[i] - earlier.losses[i];
        }
        EnergyLedger {
            deposited: self.deposited - earlier.deposited,
            stored: self.stored - earlier.stored,
            losses,
        }
    }
}

/// Explicit enthalpy-form conduction solver on a [`ThermalField`].
#[derive(Debug, Clone)]
pub struct ConductionSolver {
    field: ThermalField,
    materials: Materials,
    boundaries: Boundaries,
    interface: BottomCoupling,
    /// Per (i, j) column: fraction of the top face covered by the tool. Covered
    /// area loses no heat to the ambient and is in perfect contact with the
    /// backing underneath when the interface is a gap conductance.
    cover: Vec<f64>,
    enthalpy: Vec<f64>,
    peak: Vec<f64>,
    initial_energy: f64,
    deposited: f64,
    losses: [f64; 6],
    conductivity: Vec<f64>,
    net: Vec<f64>,
}

impl ConductionSolver {
    pub fn new(field: ThermalField, materials: Materials, boundaries: Boundaries) -> Result<Self> {
        for (idx, tag) in field.tags().iter().enumerate() {
            if *tag != CellTag::Void && materials.of(*tag).is_none() {
                return Err(Error::invalid(
                    "materials",
                    format!("cell {idx} is tagged {tag:?} but no such material is defined"),
                ));
            }
        }
        let n = field.grid().len();
        let columns = field.grid().nx * field.grid().ny;
        let enthalpy: Vec<f64> = field
            .temperatures()
            .iter()
            .zip(field.tags())
            .map(|(t, tag)| {
                materials
                    .of(*tag)
                    .map_or(0.0, |m| m.volumetric_enthalpy(*t))
            })
            .collect();
        let peak = field.temperatures().to_vec();
        let mut solver = Self {
            field,
            materials,
            boundaries,
            interface: BottomCoupling::Perfect,
            cover: vec![0.0; columns],
            enthalpy,
            peak,
            initial_energy: 0.0,
            deposited: 0.0,
            losses: [0.0; 6],
            conductivity: vec![0.0; n],
            net: vec![0.0; n],
        };
        solver.initial_energy = solver.total_enthalpy();
        Ok(solver)
    }

    /// Coupling across faces between workpiece and backing cells.
    pub fn with_interface(mut self, coupling: BottomCoupling) -> Self {
        self.interface = coupling;
        self
    }

    pub fn field(&self) -> &ThermalField {
        &self.field
    }

    pub(crate) fn field_mut(&mut self) -> &mut ThermalField {
        &mut self.field
    }

    pub fn materials(&self) -> &Materials {
        &self.materials
    }

    pub fn boundaries(&self) -> &Boundaries {
        &self.boundaries
    }

    /// All-time maximum temperature of every cell.
    pub fn peak_temperatures(&self) -> &[f64] {
        &self.peak
    }

    /// Total enthalpy of the domain in joules, measured from 0 K.
    pub fn total_enthalpy(&self) -> f64 {
        let v = self.field.grid().cell_volume();
        self.enthalpy.iter().sum::<f64>() * v
    }

    pub fn ledger(&self) -> EnergyLedger {
        EnergyLedger {
            deposited: self.deposited,
            stored: self.total_enthalpy() - self.initial_energy,
            losses: self.losses,
        }
    }

    pub fn stable_timestep(&self) -> f64 {
        stable_timestep(&self.field, &self.materials)
    }

    /// Replace the tool cover map with `(column, fraction)` entries.
    pub fn set_tool_cover(&mut self, cover: &[(usize, f64)]) {
        self.cover.iter_mut().for_each(|c| *c = 0.0);
        for &(col, f) in cover {
            self.cover[col] = f.clamp(0.0, 1.0);
        }
    }

    pub fn tool_cover(&self) -> &[f64] {
        &self.cover
    }

    /// Advance by `dt` seconds with `sources` given as `(cell, watts)`.
    ///
    /// Refuses steps above the stability limit instead of shortening them.
    pub fn step(&mut self, dt: f64, sources: &[(usize, f64)]) -> Result<()> {
        require_positive("time step", dt)?;
        let limit = self.stable_timestep();
        if dt > limit * (1.0 + 1e-9) {
            return Err(Error::TimestepTooLarge { dt, limit });
        }

        let g = *self.field.grid();
        let (nx, ny, nz) = (g.nx, g.ny, g.nz);
        let layer = nx * ny;
        let (ax, ay, az) = (g.dy * g.dz, g.dx * g.dz, g.dx * g.dy);
        let (hx, hy, hz) = (0.5 * g.dx, 0.5 * g.dy, 0.5 * g.dz);
        let sigma = self.boundaries.stefan_boltzmann;
        let tags = self.field.tags();
        let temps = self.field.temperatures();

        for (c, kc) in self.conductivity.iter_mut().enumerate() {
            *kc = self
                .materials
                .of(tags[c])
                .map_or(0.0, |m| m.conductivity(temps[c]));
        }
        self.net.iter_mut().for_each(|q| *q = 0.0);

        let mut deposited = 0.0;
        for &(c, power) in sources {
            if tags[c] == CellTag::Void {
                return Err(Error::invalid("heat source", format!("cell {c} is void")));
            }
            self.net[c] += power;
            deposited += power * dt;
        }

        let kcond = &self.conductivity;
        let net = &mut self.net;
        let mut losses = [0.0; 6];
        let boundaries = &self.boundaries;
        let mut exterior = |face: Face, c: usize, area: f64, half: f64, net: &mut [f64]| {
            let q = boundaries
                .get(face)
                .outgoing_flux(temps[c], kcond[c], half, sigma)
                * area;
            net[c] -= q;
            losses[face.index()] += q * dt;
        };

        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let c = g.index(i, j, k);
                    if tags[c] == CellTag::Void {
                        continue;
                    }
                    let t = temps[c];
                    let kc = kcond[c];

                    if i + 1 < nx {
                        let n = c + 1;
                        if tags[n] != CellTag::Void {
                            let q = ax / (hx / kc + hx / kcond[n]) * (t - temps[n]);
                            net[c] -= q;
                            net[n] += q;
                        }
                    } else {
                        exterior(Face::XMax, c, ax, hx, net);
                    }
                    if i == 0 {
                        exterior(Face::XMin, c, ax, hx, net);
                    }

                    if j + 1 < ny {
                        let n = c + nx;
                        if tags[n] != CellTag::Void {
                            let q = ay / (hy / kc + hy / kcond[n]) * (t - temps[n]);
                            net[c] -= q;
                            net[n] += q;
                        }
                    } else {
                        exterior(Face::YMax, c, ay, hy, net);
                    }
                    if j == 0 {
                        exterior(Face::YMin, c, ay, hy, net);
                    }

                    let col = g.column(i, j);
                    if k + 1 < nz {
                        let n = c + layer;
                        if tags[n] != CellTag::Void {
                            let r = hz / kc + hz / kcond[n];
                            let conductance = if tags[n] == tags[c] {
                                az / r
                            } else {
                                match self.interface {
                                    BottomCoupling::Perfect => az / r,
                                    BottomCoupling::Insulated => 0.0,
                                    BottomCoupling::Gap(h) => {
                                        let f = self.cover[col];
                                        az * (f / r + (1.0 - f) / (r + 1.0 / h))
                                    }
                                }
                            };
                            let q = conductance * (t - temps[n]);
                            net[c] -= q;
                            net[n] += q;
                        }
                    } else {
                        let exposed = 1.0 - self.cover[col];
                        if exposed > 0.0 {
                            exterior(Face::ZMax, c, az * exposed, hz, net);
                        }
                    }
                    if k == 0 {
                        exterior(Face::ZMin, c, az, hz, net);
                    }
                }
            }
        }

        let inv_volume = 1.0 / g.cell_volume();
        let tags = self.field.tags().to_vec();
        let temps = self.field.temperatures_mut();
        for c in 0..temps.len() {
            let q = self.net[c];
            if q == 0.0 {
                continue;
            }
            let Some(material) = self.materials.of(tags[c]) else {
                continue;
            };
            self.enthalpy[c] += dt * q * inv_volume;
            let t = material.temperature_from_enthalpy(self.enthalpy[c]);
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(
                    "temperature",
                    format!("cell {c} reached a non-physical temperature {t}"),
                ));
            }
            temps[c] = t;
            if t > self.peak[c] {
                self.peak[c] = t;
            }
        }

        self.deposited += deposited;
        for (acc, l) in self.losses.iter_mut().zip(losses) {
            *acc += l;
        }
        let time = self.field.time() + dt;
        self.field.set_time(time);
        Ok(())
    }
}
