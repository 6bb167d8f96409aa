//! Flow-stress laws and temperature-dependent thermophysical properties.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};
use crate::math;

/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Parameters of the hyperbolic-sine (Sellars-Tegart) hot-working law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellarsTegartParams {
    /// Pre-exponential factor, 1/s.
    pub a: f64,
    /// Stress multiplier, 1/Pa.
    pub alpha: f64,
    /// Stress exponent.
    pub n: f64,
    /// Activation energy, J/mol.
    pub activation_energy: f64,
}

impl SellarsTegartParams {
    pub fn new(a: f64, alpha: f64, n: f64, activation_energy: f64) -> Result<Self> {
        require_positive("Sellars-Tegart A", a)?;
        require_positive("Sellars-Tegart alpha", alpha)?;
        require_positive("Sellars-Tegart n", n)?;
        require_positive("activation energy", activation_energy)?;
        Ok(Self {
            a,
            alpha,
            n,
            activation_energy,
        })
    }
}

/// Temperature-compensated strain rate `Z = eps_dot exp(Q / (R T))`.
pub fn zener_hollomon(
    strain_rate: f64,
    temperature: f64,
    params: &SellarsTegartParams,
) -> Result<f64> {
    require_positive("strain rate", strain_rate)?;
    require_positive("temperature", temperature)?;
    let arg = params.activation_energy / (GAS_CONSTANT * temperature);
    let z = strain_rate * math::exp(arg);
    if !z.is_finite() {
        return Err(Error::Overflow(format!(
            "Zener-Hollomon parameter overflows: Q/(R T) = {arg:.1} at T = {temperature} K"
        )));
    }
    Ok(z)
}

/// Steady-state flow stress `sigma = asinh((Z / A)^(1/n)) / alpha`.
pub fn sellars_tegart_flow_stress(
    strain_rate: f64,
    temperature: f64,
    params: &SellarsTegartParams,
) -> Result<f64> {
    let z = zener_hollomon(strain_rate, temperature, params)?;
    let x = math::powf(z / params.a, 1.0 / params.n);
    Ok(math::asinh(x) / params.alpha)
}

/// Johnson-Cook hardening, rate and thermal-softening parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnsonCookParams {
    /// Initial yield stress, Pa.
    pub a: f64,
    /// Hardening modulus, Pa.
    pub b: f64,
    /// Strain-rate sensitivity.
    pub c: f64,
    /// Hardening exponent.
    pub n: f64,
    /// Thermal softening exponent.
    pub m: f64,
    pub melt_temperature: f64,
    pub reference_temperature: f64,
    /// Normalising plastic strain rate, 1/s.
    pub reference_strain_rate: f64,
}

impl JohnsonCookParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        c: f64,
        n: f64,
        m: f64,
        melt_temperature: f64,
        reference_temperature: f64,
        reference_strain_rate: f64,
    ) -> Result<Self> {
        require_non_negative("Johnson-Cook A", a)?;
        require_non_negative("Johnson-Cook B", b)?;
        require_non_negative("Johnson-Cook C", c)?;
        require_non_negative("Johnson-Cook n", n)?;
        require_positive("Johnson-Cook m", m)?;
        require_positive("reference temperature", reference_temperature)?;
        require_positive("reference strain rate", reference_strain_rate)?;
        if !(melt_temperature > reference_temperature) {
            return Err(Error::invalid(
                "melt temperature",
                format!("{melt_temperature} must exceed the reference temperature {reference_temperature}"),
            ));
        }
        Ok(Self {
            a,
            b,
            c,
            n,
            m,
            melt_temperature,
            reference_temperature,
            reference_strain_rate,
        })
    }
}

/// Johnson-Cook yield stress.
///
/// The thermal factor is 1 below the reference temperature and 0 above the
/// melt temperature; the rate factor is floored at 0 for very slow rates. The
/// result is therefore never negative.
pub fn johnson_cook_yield(
    plastic_strain: f64,
    plastic_strain_rate: f64,
    temperature: f64,
    params: &JohnsonCookParams,
) -> Result<f64> {
    require_non_negative("plastic strain", plastic_strain)?;
    require_positive("plastic strain rate", plastic_strain_rate)?;
    let hardening = params.a + params.b * math::powf(plastic_strain, params.n);
    let rate =
        (1.0 + params.c * math::ln(plastic_strain_rate / params.reference_strain_rate)).max(0.0);
    let homologous = (temperature - params.reference_temperature)
        / (params.melt_temperature - params.reference_temperature);
    let thermal = if homologous <= 0.0 {
        1.0
    } else if homologous >= 1.0 {
        0.0
    } else {
        1.0 - math::powf(homologous, params.m)
    };
    Ok((hardening * rate * thermal).max(0.0))
}

/// Von Mises yield shear stress `sigma / sqrt(3)`.
pub fn yield_shear_stress(sigma_yield: f64) -> f64 {
    sigma_yield / math::sqrt(3.0)
}

/// Piecewise-linear function of temperature, clamped outside its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCurve {
    knots: Vec<(f64, f64)>,
}

impl PropertyCurve {
    /// Knots must be strictly increasing in temperature with finite values that
    /// are positive (or zero when `allow_zero`). A single knot is a constant.
    fn new(name: &'static str, mut knots: Vec<(f64, f64)>, allow_zero: bool) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid(name, "table needs at least one entry"));
        }
        for (t, v) in &knots {
            require_positive(name, *t)?;
            let ok = v.is_finite() && if allow_zero { *v >= 0.0 } else { *v > 0.0 };
            if !ok {
                return Err(Error::invalid(
                    name,
                    format!("value {v} at {t} K is not allowed"),
                ));
            }
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid(
                name,
                "temperatures must be strictly increasing",
            ));
        }
        if knots.len() == 1 {
            let (t, v) = knots[0];
            knots.push((t + 1.0, v));
        }
        Ok(Self { knots })
    }

    /// Two-knot curve with the same value everywhere.
    fn constant(value: f64) -> Self {
        Self {
            knots: alloc::vec![(1.0, value), (2.0, value)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let last = k.len() - 1;
        if t <= k[0].0 {
            return k[0].1;
        }
        if t >= k[last].0 {
            return k[last].1;
        }
        let i = k.partition_point(|(kt, _)| *kt <= t) - 1;
        let (t0, v0) = k[i];
        let (t1, v1) = k[i + 1];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// Specific enthalpy `h(T) = integral_0^T c_p` for a clamped piecewise-linear
/// `c_p`, plus its inverse. Constant extension below the first knot makes
/// `h(0) = 0`, so enthalpies of physical states are strictly positive.
#[derive(Debug, Clone, PartialEq)]
struct EnthalpyCurve {
    /// `h` at each c_p knot.
    at_knots: Vec<f64>,
}

impl EnthalpyCurve {
    fn new(cp: &PropertyCurve) -> Self {
        let k = cp.knots();
        let mut at_knots = Vec::with_capacity(k.len());
        let mut h = k[0].1 * k[0].0;
        at_knots.push(h);
        for w in k.windows(2) {
            h += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
            at_knots.push(h);
        }
        Self { at_knots }
    }

    fn enthalpy(&self, cp: &PropertyCurve, t: f64) -> f64 {
        let k = cp.knots();
        let last = k.len() - 1;
        if t <= k[0].0 {
            return k[0].1 * t;
        }
        if t >= k[last].0 {
            return self.at_knots[last] + k[last].1 * (t - k[last].0);
        }
        let i = k.partition_point(|(kt, _)| *kt <= t) - 1;
        let (t0, c0) = k[i];
        let (t1, c1) = k[i + 1];
        let x = t - t0;
        let slope = (c1 - c0) / (t1 - t0);
        self.at_knots[i] + c0 * x + 0.5 * slope * x * x
    }

    fn temperature(&self, cp: &PropertyCurve, h: f64) -> f64 {
        let k = cp.knots();
        let last = k.len() - 1;
        if h <= self.at_knots[0] {
            return h / k[0].1;
        }
        if h >= self.at_knots[last] {
            return k[last].0 + (h - self.at_knots[last]) / k[last].1;
        }
        let i = self.at_knots.partition_point(|hk| *hk <= h) - 1;
        let (t0, c0) = k[i];
        let (t1, c1) = k[i + 1];
        let a = 0.5 * (c1 - c0) / (t1 - t0);
        let dh = h - self.at_knots[i];
        // Root of a x^2 + c0 x - dh = 0 in the cancellation-free form.
        let x = 2.0 * dh / (c0 + math::sqrt(c0 * c0 + 4.0 * a * dh));
        t0 + x
    }
}

/// Which tabulated property to look up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Conductivity,
    SpecificHeat,
    YieldStress,
}

/// Density plus temperature tables for conductivity, specific heat and yield stress.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermophysicalTable {
    density: f64,
    conductivity: PropertyCurve,
    specific_heat: PropertyCurve,
    yield_stress: PropertyCurve,
    emissivity: f64,
    enthalpy: EnthalpyCurve,
}

impl ThermophysicalTable {
    /// Tables are `(temperature K, value)` pairs. Yield stress may fall to zero;
    /// the other properties must stay positive.
    pub fn new(
        density: f64,
        conductivity: Vec<(f64, f64)>,
        specific_heat: Vec<(f64, f64)>,
        yield_stress: Vec<(f64, f64)>,
        emissivity: f64,
    ) -> Result<Self> {
        require_positive("density", density)?;
        require_unit_interval("emissivity", emissivity)?;
        let conductivity = PropertyCurve::new("conductivity table", conductivity, false)?;
        let specific_heat = PropertyCurve::new("specific heat table", specific_heat, false)?;
        let yield_stress = PropertyCurve::new("yield stress table", yield_stress, true)?;
        let enthalpy = EnthalpyCurve::new(&specific_heat);
        Ok(Self {
            density,
            conductivity,
            specific_heat,
            yield_stress,
            emissivity,
            enthalpy,
        })
    }

    /// Temperature-independent material (yield stress zero, emissivity zero).
    pub fn constant(density: f64, conductivity: f64, specific_heat: f64) -> Result<Self> {
        require_positive("density", density)?;
        require_positive("conductivity", conductivity)?;
        require_positive("specific heat", specific_heat)?;
        let specific_heat = PropertyCurve::constant(specific_heat);
        let enthalpy = EnthalpyCurve::new(&specific_heat);
        Ok(Self {
            density,
            conductivity: PropertyCurve::constant(conductivity),
            specific_heat,
            yield_stress: PropertyCurve::constant(0.0),
            emissivity: 0.0,
            enthalpy,
        })
    }

    pub fn with_emissivity(mut self, emissivity: f64) -> Result<Self> {
        self.emissivity = require_unit_interval("emissivity", emissivity)?;
        Ok(self)
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn emissivity(&self) -> f64 {
        self.emissivity
    }

    pub fn curve(&self, which: Property) -> &PropertyCurve {
        match which {
            Property::Conductivity => &self.conductivity,
            Property::SpecificHeat => &self.specific_heat,
            Property::YieldStress => &self.yield_stress,
        }
    }

    pub fn property_at(&self, which: Property, temperature: f64) -> f64 {
        self.curve(which).eval(temperature)
    }

    pub fn conductivity(&self, temperature: f64) -> f64 {
        self.conductivity.eval(temperature)
    }

    pub fn specific_heat(&self, temperature: f64) -> f64 {
        self.specific_heat.eval(temperature)
    }

    pub fn yield_stress(&self, temperature: f64) -> f64 {
        self.yield_stress.eval(temperature)
    }

    pub fn diffusivity(&self, temperature: f64) -> f64 {
        self.conductivity(temperature) / (self.density * self.specific_heat(temperature))
    }

    /// Upper bound of the diffusivity over all temperatures.
    pub fn max_diffusivity(&self) -> f64 {
        let c = &self.conductivity;
        let cp = &self.specific_heat;
        // k/cp is linear-fractional between knots, so its extremes sit on knots.
        c.knots()
            .iter()
            .chain(cp.knots())
            .map(|(t, _)| self.diffusivity(*t))
            .fold(0.0, f64::max)
    }

    /// Enthalpy per unit volume, J/m^3, measured from 0 K.
    pub fn volumetric_enthalpy(&self, temperature: f64) -> f64 {
        self.density * self.enthalpy.enthalpy(&self.specific_heat, temperature)
    }

    /// Inverse of [`Self::volumetric_enthalpy`].
    pub fn temperature_from_enthalpy(&self, volumetric_enthalpy: f64) -> f64 {
        self.enthalpy
            .temperature(&self.specific_heat, volumetric_enthalpy / self.density)
    }
}
