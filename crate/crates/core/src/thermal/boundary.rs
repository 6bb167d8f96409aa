use crate::thermal::SolverConfig;
use crate::types::BottomContactCondition;

/// Stefan-Boltzmann constant, W/(m^2 K^4).
pub const STEFAN_BOLTZMANN: f64 = 5.670_374_419e-8;

/// The six faces of the grid's bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XMin,
        Face::XMax,
        Face::YMin,
        Face::YMax,
        Face::ZMin,
        Face::ZMax,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XMin => "x_min",
            Face::XMax => "x_max",
            Face::YMin => "y_min",
            Face::YMax => "y_max",
            Face::ZMin => "z_min",
            Face::ZMax => "z_max",
        }
    }
}

/// Thermal condition on one face of the bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceCondition {
    Adiabatic,
    /// Convection plus grey-body radiation to the ambient.
    Convective {
        h: f64,
        ambient: f64,
        emissivity: f64,
    },
    /// Prescribed face temperature, coupled through the half cell.
    FixedTemperature(f64),
}

impl FaceCondition {
    /// Heat flux leaving the cell through this face, W/m^2.
    ///
    /// `conductivity` and `half_width` describe the half cell between the
    /// cell centre and the face.
    pub fn outgoing_flux(
        &self,
        temperature: f64,
        conductivity: f64,
        half_width: f64,
        stefan_boltzmann: f64,
    ) -> f64 {
        match *self {
            FaceCondition::Adiabatic => 0.0,
            FaceCondition::Convective {
                h,
                ambient,
                emissivity,
            } => radiative_convective_flux(temperature, ambient, h, emissivity, stefan_boltzmann),
            FaceCondition::FixedTemperature(t_face) => {
                conductivity * (temperature - t_face) / half_width
            }
        }
    }
}

fn radiative_convective_flux(t: f64, ambient: f64, h: f64, emissivity: f64, sigma: f64) -> f64 {
    let t2 = t * t;
    let a2 = ambient * ambient;
    sigma * emissivity * (t2 * t2 - a2 * a2) + h * (t - ambient)
}

/// Conditions on all six faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    faces: [FaceCondition; 6],
    pub stefan_boltzmann: f64,
}

impl Boundaries {
    pub fn adiabatic() -> Self {
        Self {
            faces: [FaceCondition::Adiabatic; 6],
            stefan_boltzmann: STEFAN_BOLTZMANN,
        }
    }

    pub fn with(mut self, face: Face, condition: FaceCondition) -> Self {
        self.faces[face.index()] = condition;
        self
    }

    pub fn get(&self, face: Face) -> FaceCondition {
        self.faces[face.index()]
    }
}

/// Heat flux lost by the top surface outside the shoulder: radiation plus
/// convection to the ambient, W/m^2.
pub fn top_surface_loss(temperature: f64, config: &SolverConfig, emissivity: f64) -> f64 {
    radiative_convective_flux(
        temperature,
        config.ambient_temperature,
        config.h_top,
        emissivity,
        config.stefan_boltzmann,
    )
}

/// Local thermal coupling between the workpiece bottom and the backing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BottomCoupling {
    /// No heat crosses the interface.
    Insulated,
    /// Temperature is continuous; heat flows by conduction only.
    Perfect,
    /// Contact conductance in W/(m^2 K).
    Gap(f64),
}

impl BottomCoupling {
    /// Flux from the workpiece surface into the backing surface, W/m^2.
    /// `None` for perfect contact, where the flux is set by conduction on
    /// both sides rather than by the surface temperatures.
    pub fn surface_flux(&self, workpiece_surface: f64, backing_surface: f64) -> Option<f64> {
        match *self {
            BottomCoupling::Insulated => Some(0.0),
            BottomCoupling::Perfect => None,
            BottomCoupling::Gap(h) => Some(h * (workpiece_surface - backing_surface)),
        }
    }
}

/// Coupling at a point of the workpiece bottom.
///
/// `under_tool` marks points below the shoulder footprint; `lateral_offset`
/// is the distance from the joint line across the weld.
pub fn bottom_coupling(
    condition: &BottomContactCondition,
    under_tool: bool,
    lateral_offset: f64,
) -> BottomCoupling {
    match condition {
        BottomContactCondition::Adiabatic => BottomCoupling::Insulated,
        BottomContactCondition::PerfectContact => BottomCoupling::Perfect,
        BottomContactCondition::SparContact(spar) => {
            if lateral_offset.abs() <= 0.5 * spar.width() {
                BottomCoupling::Perfect
            } else {
                BottomCoupling::Insulated
            }
        }
        BottomContactCondition::GapConductance(gap) => {
            if under_tool {
                BottomCoupling::Perfect
            } else {
                BottomCoupling::Gap(gap.value())
            }
        }
    }
}
