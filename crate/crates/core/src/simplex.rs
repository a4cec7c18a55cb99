//! Derivative-free Nelder-Mead simplex minimization over raw parameter
//! vectors, with the standard reflection/expansion/contraction/shrink
//! coefficients 1, 2, ½, ½.
//!
//! The objective callback returns `Result<f64>` so a genuinely undefined
//! evaluation aborts the search; `+inf` values are legal and simply lose
//! every comparison (used to reject the measure-zero all-zero parameter
//! vector without constraint handling).

use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Copy, Debug)]
pub struct SimplexConfig {
    /// Stop when the objective spread across the simplex drops below this.
    pub f_tol: f64,
    /// Hard iteration cap.
    pub max_iter: usize,
    /// Per-coordinate offset used to build the initial simplex.
    pub initial_edge: f64,
}

#[derive(Clone, Debug)]
pub struct SimplexOutcome {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn minimize<F>(mut objective: F, start: &[f64], cfg: &SimplexConfig) -> Result<SimplexOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = start.len();
    assert!(n >= 1, "empty parameter vector");

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    vertices.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += cfg.initial_edge;
        vertices.push(v);
    }
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    for v in &vertices {
        values.push(objective(v)?);
    }

    let mut iterations = 0;
    let mut converged = false;

    loop {
        // order best → worst
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| vertices[i].clone()).collect();
        let revalued: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        vertices = reordered;
        values = revalued;

        let spread = values[n] - values[0];
        if spread < cfg.f_tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        iterations += 1;

        // centroid of everything but the worst vertex
        let mut centroid = vec![0.0; n];
        for v in vertices.iter().take(n) {
            for (ci, vi) in centroid.iter_mut().zip(v.iter()) {
                *ci += vi;
            }
        }
        for ci in centroid.iter_mut() {
            *ci /= n as f64;
        }

        let blend = |coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(vertices[n].iter())
                .map(|(&c, &w)| c + coeff * (c - w))
                .collect()
        };

        let reflected = blend(REFLECT);
        let f_reflected = objective(&reflected)?;

        if f_reflected < values[0] {
            let expanded = blend(EXPAND);
            let f_expanded = objective(&expanded)?;
            if f_expanded < f_reflected {
                vertices[n] = expanded;
                values[n] = f_expanded;
            } else {
                vertices[n] = reflected;
                values[n] = f_reflected;
            }
        } else if f_reflected < values[n - 1] {
            vertices[n] = reflected;
            values[n] = f_reflected;
        } else if f_reflected < values[n] {
            // outside contraction
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(reflected.iter())
                .map(|(&c, &r)| c + CONTRACT * (r - c))
                .collect();
            let f_contracted = objective(&contracted)?;
            if f_contracted <= f_reflected {
                vertices[n] = contracted;
                values[n] = f_contracted;
            } else {
                shrink(&mut vertices, &mut values, &mut objective)?;
            }
        } else {
            // inside contraction
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(vertices[n].iter())
                .map(|(&c, &w)| c + CONTRACT * (w - c))
                .collect();
            let f_contracted = objective(&contracted)?;
            if f_contracted < values[n] {
                vertices[n] = contracted;
                values[n] = f_contracted;
            } else {
                shrink(&mut vertices, &mut values, &mut objective)?;
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    Ok(SimplexOutcome {
        best: vertices[best].clone(),
        best_value: values[best],
        iterations,
        converged,
    })
}

fn shrink<F>(vertices: &mut [Vec<f64>], values: &mut [f64], objective: &mut F) -> Result<()>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let best = vertices[0].clone();
    for i in 1..vertices.len() {
        for (vi, &bi) in vertices[i].iter_mut().zip(best.iter()) {
            *vi = bi + SHRINK * (*vi - bi);
        }
        values[i] = objective(&vertices[i])?;
    }
    Ok(())
}
