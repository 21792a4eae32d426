//! Qubit control pulses and a derivative-free search for sequences whose
//! average fidelity stays high across amplitude and detuning errors.

use crate::error::{Error, Result};
use crate::haar::SplitMix64;
use crate::matrix::{Complex64, ComplexMatrix};

/// One resonant rotation: flip angle theta about the equatorial axis at
/// azimuth phi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub theta: f64,
    pub phi: f64,
}

/// Non-empty list of pulses, applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::EmptySequence);
        }
        for p in &pulses {
            if !p.theta.is_finite() {
                return Err(Error::NonFiniteParameter {
                    name: "theta",
                    value: p.theta,
                });
            }
            if !p.phi.is_finite() {
                return Err(Error::NonFiniteParameter {
                    name: "phi",
                    value: p.phi,
                });
            }
        }
        Ok(Self { pulses })
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }
}

/// Grid of systematic errors to average over: every pulse amplitude is
/// multiplied by a scale, and a detuning rotation acts during every pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrid {
    amplitude_scales: Vec<f64>,
    detunings: Vec<f64>,
}

impl ErrorGrid {
    pub fn new(amplitude_scales: Vec<f64>, detunings: Vec<f64>) -> Result<Self> {
        if amplitude_scales.is_empty() || detunings.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for &s in &amplitude_scales {
            if !s.is_finite() {
                return Err(Error::NonFiniteParameter {
                    name: "amplitude_scale",
                    value: s,
                });
            }
        }
        for &d in &detunings {
            if !d.is_finite() {
                return Err(Error::NonFiniteParameter {
                    name: "detuning",
                    value: d,
                });
            }
        }
        Ok(Self {
            amplitude_scales,
            detunings,
        })
    }

    /// Error-free grid: unit amplitude, zero detuning.
    pub fn nominal() -> Self {
        Self {
            amplitude_scales: vec![1.0],
            detunings: vec![0.0],
        }
    }

    pub fn amplitude_scales(&self) -> &[f64] {
        &self.amplitude_scales
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn points(&self) -> usize {
        self.amplitude_scales.len() * self.detunings.len()
    }
}

/// Unitary realized by a sequence under the given errors. Each pulse acts
/// as diag(e^{-i d/2}, e^{i d/2}) . R(theta * scale, phi), later pulses
/// multiplying from the left.
pub fn sequence_unitary(seq: &PulseSequence, amplitude_scale: f64, detuning: f64) -> ComplexMatrix {
    let rz = ComplexMatrix::from_diagonal(&[
        Complex64::from_polar(1.0, -0.5 * detuning),
        Complex64::from_polar(1.0, 0.5 * detuning),
    ])
    .expect("finite diagonal");
    let mut u = ComplexMatrix::identity(2);
    for p in seq.pulses() {
        let half = 0.5 * p.theta * amplitude_scale;
        let cos = Complex64::new(half.cos(), 0.0);
        let minus_i_sin = Complex64::new(0.0, -half.sin());
        let r = ComplexMatrix::new(
            2,
            2,
            vec![
                cos,
                minus_i_sin * Complex64::from_polar(1.0, -p.phi),
                minus_i_sin * Complex64::from_polar(1.0, p.phi),
                cos,
            ],
        )
        .expect("finite rotation entries");
        u = rz.multiply(&r).expect("2x2").multiply(&u).expect("2x2");
    }
    u
}

/// Average fidelity against `target`, averaged uniformly over the grid.
pub fn robust_fidelity(seq: &PulseSequence, target: &ComplexMatrix, grid: &ErrorGrid) -> Result<f64> {
    target.require_unitary(1e-9)?;
    if target.rows() != 2 {
        return Err(Error::DimensionMismatch {
            left: target.rows(),
            right: 2,
        });
    }
    let adjoint = target.adjoint();
    let mut total = 0.0;
    for &scale in grid.amplitude_scales() {
        for &detuning in grid.detunings() {
            let u = sequence_unitary(seq, scale, detuning);
            let tr = adjoint.multiply(&u)?.trace()?;
            total += (2.0 + tr.norm_sqr()) / 6.0;
        }
    }
    Ok(total / grid.points() as f64)
}

/// Search settings. The budget counts objective evaluations across the
/// whole run, restart included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptOptions {
    pub max_evaluations: u64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 10_000,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// Outcome of a search. `converged` is false when the evaluation budget
/// ran out before the simplex spread dropped below the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best: PulseSequence,
    pub best_objective: f64,
    pub evaluations: u64,
    pub converged: bool,
}

const SIMPLEX_STEP: f64 = 0.25;

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn try_eval(&mut self, x: &[f64], f: &impl Fn(&[f64]) -> f64) -> Option<f64> {
        if self.used >= self.cap {
            return None;
        }
        self.used += 1;
        Some(f(x))
    }
}

fn nelder_mead(
    start: &[f64],
    tolerance: f64,
    budget: &mut Budget,
    f: &impl Fn(&[f64]) -> f64,
) -> (Vec<f64>, f64, bool) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let push = |x: Vec<f64>, simplex: &mut Vec<(Vec<f64>, f64)>, budget: &mut Budget| -> bool {
        match budget.try_eval(&x, f) {
            Some(v) => {
                simplex.push((x, v));
                true
            }
            None => false,
        }
    };
    if !push(start.to_vec(), &mut simplex, budget) {
        return (start.to_vec(), f64::INFINITY, false);
    }
    for i in 0..d {
        let mut x = start.to_vec();
        x[i] += SIMPLEX_STEP;
        if !push(x, &mut simplex, budget) {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (x, v) = simplex.swap_remove(0);
            return (x, v, false);
        }
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[d].1 - simplex[0].1 <= tolerance {
            let (x, v) = simplex.swap_remove(0);
            return (x, v, true);
        }
        let bail = |simplex: Vec<(Vec<f64>, f64)>| {
            let (x, v) = simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
            (x, v, false)
        };
        let mut centroid = vec![0.0; d];
        for vertex in &simplex[..d] {
            for (c, &xi) in centroid.iter_mut().zip(&vertex.0) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= d as f64;
        }
        let worst = simplex[d].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(&c, &w)| 2.0 * c - w)
            .collect();
        let fr = match budget.try_eval(&reflected, f) {
            Some(v) => v,
            None => return bail(simplex),
        };
        if fr < simplex[0].1 {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(&c, &r)| c + 2.0 * (r - c))
                .collect();
            match budget.try_eval(&expanded, f) {
                Some(fe) if fe < fr => simplex[d] = (expanded, fe),
                Some(_) => simplex[d] = (reflected, fr),
                None => {
                    simplex[d] = (reflected, fr);
                    return bail(simplex);
                }
            }
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
            continue;
        }
        let (anchor, anchor_value, accept_strict) = if fr < worst.1 {
            (reflected.clone(), fr, false)
        } else {
            (worst.0.clone(), worst.1, true)
        };
        let contracted: Vec<f64> = centroid
            .iter()
            .zip(&anchor)
            .map(|(&c, &a)| c + 0.5 * (a - c))
            .collect();
        let fc = match budget.try_eval(&contracted, f) {
            Some(v) => v,
            None => return bail(simplex),
        };
        let accepted = if accept_strict { fc < anchor_value } else { fc <= anchor_value };
        if accepted {
            simplex[d] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (xi, &bi) in vertex.0.iter_mut().zip(&best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            match budget.try_eval(&vertex.0, f) {
                Some(v) => vertex.1 = v,
                None => return bail(simplex),
            }
        }
    }
}

fn flatten(seq: &PulseSequence) -> Vec<f64> {
    seq.pulses().iter().flat_map(|p| [p.theta, p.phi]).collect()
}

fn unflatten(x: &[f64]) -> PulseSequence {
    let pulses = x
        .chunks_exact(2)
        .map(|c| Pulse {
            theta: c[0],
            phi: c[1],
        })
        .collect();
    PulseSequence::new(pulses).expect("optimizer keeps parameters finite")
}

/// Maximizes the grid-averaged fidelity over the pulse parameters with a
/// Nelder-Mead simplex plus one seeded restart from a perturbed optimum.
pub fn optimize(
    seq0: &PulseSequence,
    target: &ComplexMatrix,
    grid: &ErrorGrid,
    options: OptOptions,
) -> Result<OptResult> {
    robust_fidelity(seq0, target, grid)?;
    if options.max_evaluations == 0 {
        return Err(Error::TooFewSamples { samples: 0 });
    }
    let objective = |x: &[f64]| -> f64 {
        1.0 - robust_fidelity(&unflatten(x), target, grid).expect("validated inputs")
    };
    let mut budget = Budget {
        used: 0,
        cap: options.max_evaluations,
    };
    let start = flatten(seq0);
    let (mut best_x, mut best_value, first_converged) =
        nelder_mead(&start, options.tolerance, &mut budget, &objective);
    let mut converged = first_converged;
    if budget.used < budget.cap {
        let mut rng = SplitMix64::new(options.seed);
        let perturbed: Vec<f64> = best_x
            .iter()
            .map(|&xi| {
                let (g, _) = rng.next_gaussian_pair();
                xi + 0.1 * g
            })
            .collect();
        let (second_x, second_value, second_converged) =
            nelder_mead(&perturbed, options.tolerance, &mut budget, &objective);
        converged = converged && second_converged;
        if second_value < best_value {
            best_x = second_x;
            best_value = second_value;
        }
    }
    Ok(OptResult {
        best: unflatten(&best_x),
        best_objective: 1.0 - best_value,
        evaluations: budget.used,
        converged,
    })
}
