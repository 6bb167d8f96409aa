//! Fitting contact and loss parameters to measured thermocouple traces.
//!
//! The free parameters are searched in normalised coordinates on the unit
//! box with a bounded Nelder-Mead simplex. The gap conductance spans four
//! decades, so it is searched on a log10 scale; the others are linear.

mod simplex;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{require_positive, Error, Result};
use crate::math;
use crate::thermal::{run, GridResolution, Probe, RunHistory, RunOptions, WeldSetup};
use crate::types::{BottomContactCondition, GapConductance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CalibParameter {
    /// Contact state variable.
    Delta,
    FrictionCoefficient,
    /// Fraction of tool power entering the workpiece.
    Efficiency,
    /// Workpiece/backing contact conductance, W/(m^2 K).
    GapConductance,
}

impl CalibParameter {
    pub const ALL: [CalibParameter; 4] = [
        CalibParameter::Delta,
        CalibParameter::FrictionCoefficient,
        CalibParameter::Efficiency,
        CalibParameter::GapConductance,
    ];

    /// Widest range a search may use.
    pub fn allowed_bounds(self) -> (f64, f64) {
        match self {
            CalibParameter::Delta => (0.0, 1.0),
            CalibParameter::FrictionCoefficient => (0.05, 1.0),
            CalibParameter::Efficiency => (0.9, 1.0),
            CalibParameter::GapConductance => (10.0, 1e5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CalibParameter::Delta => "delta",
            CalibParameter::FrictionCoefficient => "mu",
            CalibParameter::Efficiency => "eta",
            CalibParameter::GapConductance => "h_gap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    fn logarithmic(self) -> bool {
        self == CalibParameter::GapConductance
    }

    /// Write `value` into `setup`.
    pub fn apply(self, setup: &mut WeldSetup, value: f64) -> Result<()> {
        match self {
            CalibParameter::Delta => {
                setup.heat.delta = crate::error::require_unit_interval("delta", value)?
            }
            CalibParameter::FrictionCoefficient => {
                setup.heat.friction_coefficient = crate::error::require_non_negative("mu", value)?
            }
            CalibParameter::Efficiency => setup.process = setup.process.with_efficiency(value)?,
            CalibParameter::GapConductance => match setup.solver.bottom {
                BottomContactCondition::GapConductance(_) => {
                    setup.solver.bottom =
                        BottomContactCondition::GapConductance(GapConductance::new(value)?)
                }
                other => {
                    return Err(Error::invalid(
                        "h_gap",
                        format!("needs the gap bottom condition, found {}", other.name()),
                    ))
                }
            },
        }
        Ok(())
    }

    /// Current value of this parameter in `setup`.
    pub fn read(self, setup: &WeldSetup) -> Option<f64> {
        match self {
            CalibParameter::Delta => Some(setup.heat.delta),
            CalibParameter::FrictionCoefficient => Some(setup.heat.friction_coefficient),
            CalibParameter::Efficiency => Some(setup.process.efficiency()),
            CalibParameter::GapConductance => match setup.solver.bottom {
                BottomContactCondition::GapConductance(g) => Some(g.value()),
                _ => None,
            },
        }
    }
}

/// A parameter to fit with its search range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParameter {
    parameter: CalibParameter,
    lower: f64,
    upper: f64,
}

impl FreeParameter {
    /// Search over the full allowed range.
    pub fn new(parameter: CalibParameter) -> Self {
        let (lower, upper) = parameter.allowed_bounds();
        Self {
            parameter,
            lower,
            upper,
        }
    }

    /// Narrower range; must lie within the allowed one.
    pub fn with_bounds(parameter: CalibParameter, lower: f64, upper: f64) -> Result<Self> {
        let (lo, hi) = parameter.allowed_bounds();
        if !(lower.is_finite() && upper.is_finite() && lower < upper && lower >= lo && upper <= hi)
        {
            return Err(Error::invalid(
                "calibration bounds",
                format!(
                    "{} bounds [{lower}, {upper}] must satisfy {lo} <= lower < upper <= {hi}",
                    parameter.name()
                ),
            ));
        }
        Ok(Self {
            parameter,
            lower,
            upper,
        })
    }

    pub fn parameter(&self) -> CalibParameter {
        self.parameter
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    fn to_value(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if self.parameter.logarithmic() {
            let (a, b) = (math::log10(self.lower), math::log10(self.upper));
            math::powf(10.0, a + u * (b - a)).clamp(self.lower, self.upper)
        } else {
            (self.lower + u * (self.upper - self.lower)).clamp(self.lower, self.upper)
        }
    }

    fn to_unit(self, value: f64) -> f64 {
        let u = if self.parameter.logarithmic() {
            let (a, b) = (math::log10(self.lower), math::log10(self.upper));
            (math::log10(value) - a) / (b - a)
        } else {
            (value - self.lower) / (self.upper - self.lower)
        };
        u.clamp(0.0, 1.0)
    }
}

/// Measured temperature history at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTrace {
    pub probe: Probe,
    pub times: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub weight: f64,
}

impl TargetTrace {
    pub fn new(probe: Probe, times: Vec<f64>, temperatures: Vec<f64>, weight: f64) -> Result<Self> {
        if times.is_empty() || times.len() != temperatures.len() {
            return Err(Error::invalid(
                "target trace",
                format!(
                    "{}: needs matching, non-empty time and temperature series",
                    probe.name
                ),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
            return Err(Error::invalid(
                "target trace",
                format!(
                    "{}: times must be non-negative and strictly increasing",
                    probe.name
                ),
            ));
        }
        require_positive("trace weight", weight)?;
        Ok(Self {
            probe,
            times,
            temperatures,
            weight,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    pub max_evaluations: usize,
    /// Relative objective spread at which the simplex is considered converged.
    pub tolerance: f64,
    /// Initial simplex edge in normalised coordinates.
    pub initial_step: f64,
    /// Probe sampling cadence of the forward runs, in steps.
    pub record_every: usize,
    /// Grid for a final confirmation run at the best parameters.
    pub confirm_resolution: Option<GridResolution>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 200,
            tolerance: 1e-6,
            initial_step: 0.1,
            record_every: 1,
            confirm_resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationProblem {
    /// Forward model; its grid is the one used during the search.
    pub base: WeldSetup,
    pub free: Vec<FreeParameter>,
    pub targets: Vec<TargetTrace>,
    pub options: CalibrationOptions,
}

impl CalibrationProblem {
    pub fn new(
        base: WeldSetup,
        free: Vec<FreeParameter>,
        targets: Vec<TargetTrace>,
    ) -> Result<Self> {
        let problem = Self {
            base,
            free,
            targets,
            options: CalibrationOptions::default(),
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_options(mut self, options: CalibrationOptions) -> Result<Self> {
        self.options = options;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::invalid(
                "calibration",
                "at least one free parameter is required",
            ));
        }
        for (i, a) in self.free.iter().enumerate() {
            if self.free[..i].iter().any(|b| b.parameter == a.parameter) {
                return Err(Error::invalid(
                    "calibration",
                    format!("{} is listed twice", a.parameter.name()),
                ));
            }
            if a.parameter.read(&self.base).is_none() {
                return Err(Error::invalid(
                    "calibration",
                    format!("{} needs the gap bottom condition", a.parameter.name()),
                ));
            }
        }
        if self.targets.is_empty() {
            return Err(Error::invalid(
                "calibration",
                "at least one target trace is required",
            ));
        }
        let horizon = self.base.schedule.total_duration();
        for t in &self.targets {
            if t.times.last().copied().unwrap_or(0.0) > horizon * (1.0 + 1e-12) {
                return Err(Error::invalid(
                    "target trace",
                    format!(
                        "{} extends past the end of the schedule ({horizon} s)",
                        t.probe.name
                    ),
                ));
            }
        }
        if self.options.max_evaluations == 0 {
            return Err(Error::invalid(
                "calibration",
                "evaluation budget must be positive",
            ));
        }
        require_positive("calibration tolerance", self.options.tolerance)?;
        if !(self.options.initial_step > 0.0 && self.options.initial_step <= 0.5) {
            return Err(Error::invalid(
                "calibration",
                "initial step must lie in (0, 0.5]",
            ));
        }
        Ok(())
    }

    /// Setup with `values` (one per free parameter) applied and the target probes installed.
    pub fn setup_for(&self, values: &[f64]) -> Result<WeldSetup> {
        if values.len() != self.free.len() {
            return Err(Error::invalid(
                "calibration",
                "one value per free parameter is required",
            ));
        }
        let mut setup = self.base.clone();
        for (p, v) in self.free.iter().zip(values) {
            let (lo, hi) = p.bounds();
            if !(*v >= lo && *v <= hi) {
                return Err(Error::invalid(
                    "calibration",
                    format!("{} = {v} lies outside [{lo}, {hi}]", p.parameter.name()),
                ));
            }
            p.parameter.apply(&mut setup, *v)?;
        }
        setup.probes = self.targets.iter().map(|t| t.probe.clone()).collect();
        Ok(setup)
    }

    fn describe(&self, values: &[f64]) -> String {
        let parts: Vec<String> = self
            .free
            .iter()
            .zip(values)
            .map(|(p, v)| format!("{}={v}", p.parameter.name()))
            .collect();
        parts.join(", ")
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            record_every: self.options.record_every,
        }
    }

    /// Weighted sum of squared residuals between a simulation at `values`
    /// and the targets.
    pub fn objective(&self, values: &[f64]) -> Result<f64> {
        let wrap = |e: Error| Error::Objective {
            params: self.describe(values),
            source: Box::new(e),
        };
        let setup = self.setup_for(values).map_err(wrap)?;
        let history = run(&setup, &self.run_options()).map_err(wrap)?;
        Ok(misfit(&history, &self.targets))
    }

    fn objective_at_resolution(&self, values: &[f64], resolution: GridResolution) -> Result<f64> {
        let mut problem = self.clone();
        problem.base.resolution = resolution;
        problem.objective(values)
    }
}

/// Weighted squared misfit of `history` against `targets`. Trace `i` of the
/// history must belong to target `i`.
pub fn misfit(history: &RunHistory, targets: &[TargetTrace]) -> f64 {
    targets
        .iter()
        .enumerate()
        .map(|(i, target)| {
            let simulated = &history.samples[i];
            let sum: f64 = target
                .times
                .iter()
                .zip(&target.temperatures)
                .map(|(t, measured)| {
                    let r = interpolate(&history.times, simulated, *t) - measured;
                    r * r
                })
                .sum();
            target.weight * sum
        })
        .sum()
}

/// Piecewise-linear interpolation, clamped at the ends.
pub fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let n = times.len();
    if t <= times[0] {
        return values[0];
    }
    if t >= times[n - 1] {
        return values[n - 1];
    }
    let i = times.partition_point(|x| *x <= t) - 1;
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] + w * (values[i + 1] - values[i])
}

/// Best point after one simplex iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub iteration: usize,
    pub evaluations: usize,
    pub objective: f64,
    pub spread: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub parameters: Vec<CalibParameter>,
    pub values: Vec<f64>,
    pub objective: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// Objective spread across the final simplex.
    pub spread: f64,
    pub converged: bool,
    pub start: Vec<f64>,
    pub history: Vec<ConvergenceRecord>,
    /// Objective of the confirmation run on the fine grid, if requested.
    pub confirmation_objective: Option<f64>,
}

impl CalibrationReport {
    pub fn value(&self, parameter: CalibParameter) -> Option<f64> {
        self.parameters
            .iter()
            .position(|p| *p == parameter)
            .map(|i| self.values[i])
    }
}

/// Fit the free parameters. Without a seed the search starts at the centre
/// of the (normalised) box; a seed draws a reproducible random start.
pub fn calibrate(problem: &CalibrationProblem, seed: Option<u64>) -> Result<CalibrationReport> {
    let start: Vec<f64> = match seed {
        None => alloc::vec![0.5; problem.free.len()],
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..problem.free.len())
                .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
                .collect()
        }
    };
    let values_at_unit = |u: &[f64]| -> Vec<f64> {
        problem
            .free
            .iter()
            .zip(u)
            .map(|(p, u)| p.to_value(*u))
            .collect()
    };
    calibrate_from(problem, &values_at_unit(&start))
}

/// Fit the free parameters starting from explicit values.
pub fn calibrate_from(problem: &CalibrationProblem, start: &[f64]) -> Result<CalibrationReport> {
    problem.validate()?;
    if start.len() != problem.free.len() {
        return Err(Error::invalid(
            "calibration",
            "one start value per free parameter is required",
        ));
    }
    let to_values = |u: &[f64]| -> Vec<f64> {
        problem
            .free
            .iter()
            .zip(u)
            .map(|(p, u)| p.to_value(*u))
            .collect()
    };
    let unit_start: Vec<f64> = problem
        .free
        .iter()
        .zip(start)
        .map(|(p, v)| p.to_unit(*v))
        .collect();
    let settings = simplex::Settings {
        step: problem.options.initial_step,
        tolerance: problem.options.tolerance,
        max_evaluations: problem.options.max_evaluations,
    };
    let mut history = Vec::new();
    let outcome = simplex::minimize(
        |u| problem.objective(&to_values(u)),
        &unit_start,
        &settings,
        |it| {
            log::debug!(
                "calibration iteration {} evals {} objective {:.6e} spread {:.3e}",
                it.iteration,
                it.evaluations,
                it.best_value,
                it.spread
            );
            history.push(ConvergenceRecord {
                iteration: it.iteration,
                evaluations: it.evaluations,
                objective: it.best_value,
                spread: it.spread,
                values: to_values(&it.best),
            })
        },
    )?;
    if !outcome.converged {
        log::warn!(
            "calibration stopped after {} evaluations without converging (spread {:.3e})",
            outcome.evaluations,
            outcome.spread
        );
    }
    let values = to_values(&outcome.best);
    let confirmation_objective = match problem.options.confirm_resolution {
        Some(res) => Some(problem.objective_at_resolution(&values, res)?),
        None => None,
    };
    Ok(CalibrationReport {
        parameters: problem.free.iter().map(|p| p.parameter).collect(),
        values,
        objective: outcome.best_value,
        evaluations: outcome.evaluations,
        iterations: outcome.iterations,
        spread: outcome.spread,
        converged: outcome.converged,
        start: start.to_vec(),
        history,
        confirmation_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_linear_and_clamped() {
        let t = [0.0, 1.0, 3.0];
        let v = [300.0, 310.0, 330.0];
        assert_eq!(interpolate(&t, &v, -1.0), 300.0);
        assert_eq!(interpolate(&t, &v, 0.5), 305.0);
        assert_eq!(interpolate(&t, &v, 2.0), 320.0);
        assert_eq!(interpolate(&t, &v, 9.0), 330.0);
    }

    #[test]
    fn unit_mapping_roundtrips() {
        let gap = FreeParameter::new(CalibParameter::GapConductance);
        assert!((gap.to_value(0.5) - 1000.0).abs() < 1e-9);
        assert_eq!(gap.to_value(0.0), 10.0);
        assert_eq!(gap.to_value(1.0), 1e5);
        assert!((gap.to_unit(1000.0) - 0.5).abs() < 1e-12);
        let mu = FreeParameter::new(CalibParameter::FrictionCoefficient);
        assert!((mu.to_value(mu.to_unit(0.3)) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bounds_must_be_inside_allowed_range() {
        assert!(FreeParameter::with_bounds(CalibParameter::Efficiency, 0.8, 1.0).is_err());
        assert!(FreeParameter::with_bounds(CalibParameter::Delta, 0.5, 0.5).is_err());
        assert!(FreeParameter::with_bounds(CalibParameter::Delta, 0.2, 0.6).is_ok());
        assert_eq!(
            CalibParameter::from_name("h_gap"),
            Some(CalibParameter::GapConductance)
        );
    }

    #[test]
    fn target_traces_validated() {
        let p = Probe::new("tc", [0.0; 3]);
        assert!(TargetTrace::new(
            p.clone(),
            alloc::vec![1.0, 0.5],
            alloc::vec![300.0, 301.0],
            1.0
        )
        .is_err());
        assert!(TargetTrace::new(p.clone(), alloc::vec![0.0], alloc::vec![], 1.0).is_err());
        assert!(
            TargetTrace::new(p, alloc::vec![0.0, 1.0], alloc::vec![300.0, 301.0], 0.0).is_err()
        );
    }
}
