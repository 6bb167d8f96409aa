//! Bounded Nelder-Mead on the unit box.

use alloc::vec::Vec;

use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
/// Simplex diameter below which the search stops even if the values still differ.
const MIN_DIAMETER: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Iteration {
    pub iteration: usize,
    pub evaluations: usize,
    pub best: Vec<f64>,
    pub best_value: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub spread: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Settings {
    pub step: f64,
    pub tolerance: f64,
    pub max_evaluations: usize,
}

fn clip(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

fn along(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    let mut p: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
    clip(&mut p);
    p
}

/// Minimise `f` over `[0, 1]^n` starting from `start`. Trial points are
/// clipped to the box. `observe` sees the state after every iteration.
pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    start: &[f64],
    settings: &Settings,
    mut observe: impl FnMut(&Iteration),
) -> Result<Outcome> {
    let n = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clip(&mut x0);
    let f0 = eval(&x0, &mut evaluations)?;
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] = if x[i] + settings.step <= 1.0 {
            x[i] + settings.step
        } else {
            x[i] - settings.step
        };
        let fx = eval(&x, &mut evaluations)?;
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best_value = simplex[0].1;
        let spread = simplex[n].1 - best_value;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        observe(&Iteration {
            iteration: iterations,
            evaluations,
            best: simplex[0].0.clone(),
            best_value,
            spread,
        });
        let converged =
            spread < settings.tolerance * (1.0 + best_value.abs()) || diameter < MIN_DIAMETER;
        if converged || evaluations >= settings.max_evaluations {
            return Ok(Outcome {
                best: simplex[0].0.clone(),
                best_value,
                spread,
                evaluations,
                iterations,
                converged,
            });
        }
        iterations += 1;

        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = along(&centroid, &worst.0, -REFLECT);
        let fr = eval(&xr, &mut evaluations)?;

        if fr < simplex[0].1 {
            let xe = along(&centroid, &worst.0, -REFLECT * EXPAND);
            let fe = eval(&xe, &mut evaluations)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(&centroid, &xr, CONTRACT);
            let fc = eval(&xc, &mut evaluations)?;
            (xc, fc)
        } else {
            let xc = along(&centroid, &worst.0, CONTRACT);
            let fc = eval(&xc, &mut evaluations)?;
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = along(&best, &vertex.0, SHRINK);
            let fx = eval(&x, &mut evaluations)?;
            *vertex = (x, fx);
        }
    }
}
