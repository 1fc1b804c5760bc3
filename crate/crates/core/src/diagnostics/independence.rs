//! Joint law of a few edge indicators against a product of Bernoullis.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::burn_in::resolve_p_star;
use crate::dynamics::{ChainState, Kernel};
use crate::error::{ErgmError, Result};
use crate::exact::ExactDistribution;
use crate::graph::{EdgeId, GraphState};
use crate::model::ModelSpec;
use crate::rng::seeded_rng;

/// Largest edge tuple accepted.
pub const MAX_TUPLE: usize = 6;

/// Smallest sample count accepted by [`independence_test`].
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceOptions {
    pub samples: u64,
    /// Steps between retained samples; `n²` when absent.
    #[serde(default)]
    pub gap_steps: Option<u64>,
    /// Steps discarded before sampling; `10 n²` when absent.
    #[serde(default)]
    pub burn_in_steps: Option<u64>,
    #[serde(default)]
    pub p_star: Option<f64>,
    #[serde(default)]
    pub kernel: Kernel,
}

impl IndependenceOptions {
    pub fn new(samples: u64) -> Self {
        Self {
            samples,
            gap_steps: None,
            burn_in_steps: None,
            p_star: None,
            kernel: Kernel::Glauber,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// 1-based endpoints.
    pub edges: Vec<(usize, usize)>,
    /// Reference marginal per edge.
    pub marginals: Vec<f64>,
    /// 0 for the exact table.
    pub samples: u64,
    /// Indexed by `a`, with bit `i` holding `a_i`.
    pub frequencies: Vec<f64>,
    /// `Π_i q_i^{a_i} (1-q_i)^{1-a_i}`.
    pub reference: Vec<f64>,
    pub max_deviation: f64,
    /// Largest binomial standard error of a cell frequency, 0 for the exact table.
    pub standard_error: f64,
}

fn product_reference(marginals: &[f64]) -> Vec<f64> {
    (0..1usize << marginals.len())
        .map(|a| {
            marginals
                .iter()
                .enumerate()
                .map(|(i, &q)| if a >> i & 1 == 1 { q } else { 1.0 - q })
                .product()
        })
        .collect()
}

fn report(edges: &[EdgeId], marginals: Vec<f64>, samples: u64, frequencies: Vec<f64>) -> IndependenceReport {
    let reference = product_reference(&marginals);
    let max_deviation = frequencies
        .iter()
        .zip(&reference)
        .map(|(f, r)| (f - r).abs())
        .fold(0.0, f64::max);
    let standard_error = if samples == 0 {
        0.0
    } else {
        reference
            .iter()
            .map(|r| (r * (1.0 - r) / samples as f64).sqrt())
            .fold(0.0, f64::max)
    };
    IndependenceReport {
        edges: edges.iter().map(|e| e.endpoints()).collect(),
        marginals,
        samples,
        frequencies,
        reference,
        max_deviation,
        standard_error,
    }
}

/// Validates a tuple and rebuilds its ids for `n` vertices.
fn check_tuple(edges: &[EdgeId], n: usize) -> Result<Vec<EdgeId>> {
    if edges.is_empty() || edges.len() > MAX_TUPLE {
        return Err(ErgmError::InvalidArgument(format!(
            "edge tuples must have 1..={MAX_TUPLE} edges, got {}",
            edges.len()
        )));
    }
    for (i, e) in edges.iter().enumerate() {
        if e.endpoints().1 > n {
            return Err(ErgmError::VertexOutOfRange {
                vertex: e.endpoints().1,
                n,
            });
        }
        if edges[..i].contains(e) {
            return Err(ErgmError::IdenticalEdges);
        }
    }
    edges
        .iter()
        .map(|e| {
            let (i, j) = e.endpoints();
            EdgeId::new(n, i, j)
        })
        .collect()
}

fn pattern_of(x: &GraphState, edges: &[EdgeId]) -> usize {
    edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (x.has(e) as usize) << i)
        .sum()
}

/// Samples one chain from the empty graph and tallies every tuple in
/// `edge_sets` at the same retained states.
pub fn independence_test(
    model: &ModelSpec,
    n: usize,
    edge_sets: &[Vec<EdgeId>],
    opts: &IndependenceOptions,
    seed: u64,
) -> Result<Vec<IndependenceReport>> {
    let edge_sets = edge_sets
        .iter()
        .map(|edges| check_tuple(edges, n))
        .collect::<Result<Vec<_>>>()?;
    if opts.samples < MIN_SAMPLES {
        return Err(ErgmError::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            opts.samples
        )));
    }
    let p_star = resolve_p_star(model, opts.p_star)?;
    let n2 = (n * n) as u64;
    let gap = opts.gap_steps.unwrap_or(n2).max(1);
    let burn = opts.burn_in_steps.unwrap_or(10 * n2);
    let inst = Arc::new(model.bind(n)?);
    let mut chain = ChainState::with_rng(inst, GraphState::empty(n), seeded_rng(seed))?;
    chain.run(burn, opts.kernel);
    let mut tallies: Vec<Vec<u64>> = edge_sets.iter().map(|e| vec![0; 1 << e.len()]).collect();
    for _ in 0..opts.samples {
        chain.run(gap, opts.kernel);
        for (t, edges) in tallies.iter_mut().zip(&edge_sets) {
            t[pattern_of(chain.graph(), edges)] += 1;
        }
    }
    Ok(tallies
        .into_iter()
        .zip(&edge_sets)
        .map(|(t, edges)| {
            let freq = t.iter().map(|&c| c as f64 / opts.samples as f64).collect();
            report(edges, vec![p_star; edges.len()], opts.samples, freq)
        })
        .collect())
}

/// Exact joint law of `edges` against the product of their exact marginals.
pub fn exact_independence(dist: &ExactDistribution, edges: &[EdgeId]) -> Result<IndependenceReport> {
    let edges = &check_tuple(edges, dist.n())?;
    let marginals = edges
        .iter()
        .map(|&e| dist.edge_marginal(e))
        .collect::<Result<Vec<_>>>()?;
    let mut freq = vec![0.0; 1 << edges.len()];
    for (mask, p) in dist.probabilities().iter().enumerate() {
        let a: usize = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (mask >> e.index() & 1) << i)
            .sum();
        freq[a] += p;
    }
    Ok(report(edges, marginals, 0, freq))
}
