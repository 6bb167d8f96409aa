//! Physical quantities with explicit unit suffixes.
//!
//! Every dimensional value in a config file carries a unit; the first unit
//! listed for a dimension is the SI one the serializer writes back.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Angle,
    AngularSpeed,
    Speed,
    Force,
    Torque,
    Temperature,
    Time,
    Stress,
    InverseStress,
    Density,
    Conductivity,
    SpecificHeat,
    HeatTransfer,
    StrainRate,
    MolarEnergy,
    Circulation,
}

/// `(suffix, scale, offset)`: SI value = number * scale + offset. A negative
/// scale `-d` means divide by `d`, which keeps `9 mm` exactly `0.009 m`.
type Unit = (&'static str, f64, f64);

impl Dimension {
    fn units(self) -> &'static [Unit] {
        match self {
            Dimension::Length => &[("m", 1.0, 0.0), ("mm", -1e3, 0.0)],
            Dimension::Angle => &[("rad", 1.0, 0.0), ("deg", PI / 180.0, 0.0)],
            Dimension::AngularSpeed => &[("rad/s", 1.0, 0.0), ("rpm", 2.0 * PI / 60.0, 0.0)],
            Dimension::Speed => &[
                ("m/s", 1.0, 0.0),
                ("mm/s", -1e3, 0.0),
                ("mm/min", -6e4, 0.0),
            ],
            Dimension::Force => &[("N", 1.0, 0.0), ("kN", 1e3, 0.0)],
            Dimension::Torque => &[("N*m", 1.0, 0.0), ("Nm", 1.0, 0.0)],
            Dimension::Temperature => &[("K", 1.0, 0.0), ("degC", 1.0, 273.15)],
            Dimension::Time => &[("s", 1.0, 0.0), ("ms", -1e3, 0.0), ("min", 60.0, 0.0)],
            Dimension::Stress => &[("Pa", 1.0, 0.0), ("kPa", 1e3, 0.0), ("MPa", 1e6, 0.0)],
            Dimension::InverseStress => &[("1/Pa", 1.0, 0.0), ("1/MPa", -1e6, 0.0)],
            Dimension::Density => &[("kg/m3", 1.0, 0.0)],
            Dimension::Conductivity => &[("W/mK", 1.0, 0.0)],
            Dimension::SpecificHeat => &[("J/kgK", 1.0, 0.0)],
            Dimension::HeatTransfer => &[("W/m2K", 1.0, 0.0)],
            Dimension::StrainRate => &[("1/s", 1.0, 0.0)],
            Dimension::MolarEnergy => &[("J/mol", 1.0, 0.0), ("kJ/mol", 1e3, 0.0)],
            Dimension::Circulation => &[("m2/s", 1.0, 0.0), ("mm2/s", -1e6, 0.0)],
        }
    }

    pub fn si_unit(self) -> &'static str {
        self.units()[0].0
    }

    /// Accepted suffixes, comma separated, for error messages.
    pub fn accepted(self) -> String {
        self.units()
            .iter()
            .map(|u| u.0)
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Converts `value` given in `unit` to SI. `None` if the unit is not accepted.
    pub fn to_si(self, value: f64, unit: &str) -> Option<f64> {
        self.units()
            .iter()
            .find(|u| u.0 == unit)
            .map(|&(_, scale, offset)| if scale < 0.0 { value / -scale } else { value * scale } + offset)
    }
}

/// Shortest text that parses back to exactly `v`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
