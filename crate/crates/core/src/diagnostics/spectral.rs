//! Two extreme adjacency eigenvalues by matrix-free power iteration.

use serde::{Deserialize, Serialize};

use crate::graph::GraphState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    /// Largest eigenvalue.
    pub lambda1: f64,
    /// Largest-magnitude eigenvalue on the complement of the top eigenvector,
    /// signed by its Rayleigh quotient.
    pub lambda2: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn adjacency_mul(x: &GraphState, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = x.neighbors_zero_based(i).map(|j| v[j]).sum();
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `λ_1` from iterating `A + I` from the all-ones vector; `λ_2` from iterating
/// `A²` projected off the first eigenvector.
pub fn top_two_eigenvalues(x: &GraphState, opts: &SpectralOptions) -> SpectralEstimate {
    let n = x.n();
    let mut tmp = vec![0.0; n];
    let mut iterations = 0;
    let mut converged1 = false;

    let mut v = vec![1.0; n];
    normalize(&mut v);
    let mut lambda1 = 0.0;
    for _ in 0..opts.max_iterations {
        iterations += 1;
        adjacency_mul(x, &v, &mut tmp);
        tmp.iter_mut().zip(&v).for_each(|(t, a)| *t += a);
        let next = dot(&v, &tmp) - 1.0;
        normalize(&mut tmp);
        std::mem::swap(&mut v, &mut tmp);
        let done = (next - lambda1).abs() <= opts.tol * next.abs().max(1.0);
        lambda1 = next;
        if done {
            converged1 = true;
            break;
        }
    }

    // Deterministic start with no special alignment to any eigenvector.
    let mut w: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * 0.754_877_666).fract() - 0.5).collect();
    let project = |w: &mut [f64]| {
        let c = dot(w, &v);
        w.iter_mut().zip(&v).for_each(|(a, b)| *a -= c * b);
    };
    project(&mut w);
    let mut mu = 0.0;
    let mut converged2 = n < 2;
    let mut tmp2 = vec![0.0; n];
    if normalize(&mut w) > 0.0 {
        for _ in 0..opts.max_iterations {
            iterations += 1;
            adjacency_mul(x, &w, &mut tmp);
            adjacency_mul(x, &tmp, &mut tmp2);
            project(&mut tmp2);
            let next = dot(&w, &tmp2);
            if normalize(&mut tmp2) == 0.0 {
                mu = 0.0;
                converged2 = true;
                break;
            }
            std::mem::swap(&mut w, &mut tmp2);
            let done = (next - mu).abs() <= opts.tol * next.abs().max(1.0);
            mu = next;
            if done {
                converged2 = true;
                break;
            }
        }
    }
    adjacency_mul(x, &w, &mut tmp);
    let rayleigh = dot(&w, &tmp);
    let magnitude = mu.max(0.0).sqrt();
    let lambda2 = if rayleigh < 0.0 { -magnitude } else { magnitude };
    SpectralEstimate {
        lambda1,
        lambda2,
        iterations,
        converged: converged1 && converged2,
    }
}
