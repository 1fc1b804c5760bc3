//! Exact Gibbs measure for tiny `n` by enumerating all `2^{C(n,2)}` graphs.
//!
//! States are indexed by the edge bitmask of `GraphState::to_mask`, i.e. bit
//! `k` is `x_e` for the edge with linear index `k`.

use std::fmt::Write as _;

use crate::error::{ErgmError, Result};
use crate::graph::{pair_count, EdgeId, GraphState};
use crate::model::ModelSpec;

/// Largest `n` accepted by [`exact_distribution`] (2^15 states).
pub const EXACT_MAX_N: usize = 6;

#[derive(Debug, Clone)]
pub struct ExactDistribution {
    n: usize,
    log_weights: Vec<f64>,
    log_z: f64,
    probabilities: Vec<f64>,
}

/// `p_n(X) = exp(H(X)) / Z_n(β)` for every `X`, normalized in log space.
pub fn exact_distribution(model: &ModelSpec, n: usize) -> Result<ExactDistribution> {
    if n > EXACT_MAX_N {
        return Err(ErgmError::ExactTooLarge {
            n,
            limit: EXACT_MAX_N,
        });
    }
    let inst = model.bind(n)?;
    let states = 1usize << pair_count(n);
    let mut log_weights = Vec::with_capacity(states);
    for mask in 0..states as u64 {
        let x = GraphState::from_mask(n, mask)?;
        log_weights.push(inst.hamiltonian(&x)?);
    }
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_weights.iter().map(|h| (h - max).exp()).sum();
    let log_z = max + sum.ln();
    let probabilities = log_weights.iter().map(|h| (h - log_z).exp()).collect();
    Ok(ExactDistribution {
        n,
        log_weights,
        log_z,
        probabilities,
    })
}

impl ExactDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        self.probabilities.len()
    }

    /// `H(X)` per state.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `log Z_n(β)`.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, x: &GraphState) -> Result<f64> {
        self.check_n(x.n())?;
        Ok(self.probabilities[x.to_mask().expect("small n") as usize])
    }

    /// `P(x_e = 1)`.
    pub fn edge_marginal(&self, e: EdgeId) -> Result<f64> {
        self.joint_marginal(&[e], &[true])
    }

    /// `P(x_{e_1} = a_1, ..., x_{e_k} = a_k)`.
    pub fn joint_marginal(&self, edges: &[EdgeId], values: &[bool]) -> Result<f64> {
        if edges.len() != values.len() {
            return Err(ErgmError::InvalidArgument(
                "edge and value lists differ in length".into(),
            ));
        }
        for e in edges {
            self.check_n(e.endpoints().1)?;
        }
        Ok(self
            .probabilities
            .iter()
            .enumerate()
            .filter(|(mask, _)| {
                edges
                    .iter()
                    .zip(values)
                    .all(|(e, &a)| (mask >> e.index() & 1 == 1) == a)
            })
            .map(|(_, p)| p)
            .sum())
    }

    /// `(1/2) Σ_X |p(X) - q(X)|` against an empirical histogram.
    pub fn tv_distance(&self, empirical: &StateHistogram) -> Result<f64> {
        if empirical.n != self.n {
            return Err(ErgmError::MismatchedSize {
                left: self.n,
                right: empirical.n,
            });
        }
        if empirical.total == 0 {
            return Err(ErgmError::InvalidArgument("empty histogram".into()));
        }
        let total = empirical.total as f64;
        Ok(0.5
            * self
                .probabilities
                .iter()
                .zip(&empirical.counts)
                .map(|(p, &c)| (p - c as f64 / total).abs())
                .sum::<f64>())
    }

    /// CSV with header `mask,hamiltonian,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,hamiltonian,probability\n");
        for (mask, (h, p)) in self.log_weights.iter().zip(&self.probabilities).enumerate() {
            let _ = writeln!(out, "{mask},{h},{p}");
        }
        out
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n {
            return Err(ErgmError::MismatchedSize {
                left: self.n,
                right: n,
            });
        }
        Ok(())
    }
}

/// `P(x_e = 1)` under the exact distribution.
pub fn exact_edge_marginal(d: &ExactDistribution, e: EdgeId) -> Result<f64> {
    d.edge_marginal(e)
}

/// Visit counts over the state space of graphs on `n <= 6` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct StateHistogram {
    n: usize,
    counts: Vec<u64>,
    total: u64,
}

impl StateHistogram {
    pub fn new(n: usize) -> Result<Self> {
        if n > EXACT_MAX_N || n == 0 {
            return Err(ErgmError::ExactTooLarge {
                n,
                limit: EXACT_MAX_N,
            });
        }
        Ok(Self {
            n,
            counts: vec![0; 1 << pair_count(n)],
            total: 0,
        })
    }

    pub fn record(&mut self, x: &GraphState) {
        debug_assert_eq!(x.n(), self.n);
        let mask = x.to_mask().expect("small n") as usize;
        self.counts[mask] += 1;
        self.total += 1;
    }

    /// Point mass on a single configuration.
    pub fn point_mass(x: &GraphState) -> Result<Self> {
        let mut h = Self::new(x.n())?;
        h.record(x);
        Ok(h)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// `tv_distance` as a free function.
pub fn tv_distance(d: &ExactDistribution, empirical: &StateHistogram) -> Result<f64> {
    d.tv_distance(empirical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_edges;
    use crate::model::sigmoid;

    #[test]
    fn uniform_when_no_field() {
        let d = exact_distribution(&ModelSpec::edges_only(0.0).unwrap(), 3).unwrap();
        assert_eq!(d.state_count(), 8);
        for &p in d.probabilities() {
            assert!((p - 0.125).abs() < 1e-15);
        }
        for e in all_edges(3) {
            assert!((exact_edge_marginal(&d, e).unwrap() - 0.5).abs() < 1e-15);
        }
        let empty = StateHistogram::point_mass(&GraphState::empty(3)).unwrap();
        assert!((tv_distance(&d, &empty).unwrap() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn product_measure_marginals() {
        let d = exact_distribution(&ModelSpec::edges_only(0.5).unwrap(), 4).unwrap();
        let total: f64 = d.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for e in all_edges(4) {
            let m = d.edge_marginal(e).unwrap();
            assert!((m - sigmoid(1.0)).abs() < 1e-12);
            assert!((m - 0.7311).abs() < 1e-4);
        }
        // Independence of two edges.
        let (e, f) = (EdgeId::new(4, 1, 2).unwrap(), EdgeId::new(4, 3, 4).unwrap());
        let joint = d.joint_marginal(&[e, f], &[true, false]).unwrap();
        assert!((joint - sigmoid(1.0) * (1.0 - sigmoid(1.0))).abs() < 1e-12);
    }

    #[test]
    fn triangle_model_favours_complete_graph() {
        let d = exact_distribution(&ModelSpec::edge_triangle(0.0, 0.3).unwrap(), 4).unwrap();
        let (argmax, _) = d
            .probabilities()
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (k, &p)| if p > best.1 { (k, p) } else { best });
        assert_eq!(argmax, 63);
        let ratio = d.probability(&GraphState::complete(4)).unwrap()
            / d.probability(&GraphState::empty(4)).unwrap();
        assert!((ratio.ln() - 0.3 * 24.0 / 4.0).abs() < 1e-12);
        let first = d.edge_marginal(EdgeId::new(4, 1, 2).unwrap()).unwrap();
        for e in all_edges(4) {
            assert!((d.edge_marginal(e).unwrap() - first).abs() < 1e-12);
        }
        assert!(d.probabilities().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn refuses_large_n_and_survives_large_beta() {
        assert!(matches!(
            exact_distribution(&ModelSpec::edges_only(0.0).unwrap(), 7),
            Err(ErgmError::ExactTooLarge { .. })
        ));
        let d = exact_distribution(&ModelSpec::edge_triangle(50.0, 40.0).unwrap(), 5).unwrap();
        let total: f64 = d.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.log_z().is_finite());
    }

    #[test]
    fn identical_histogram_has_zero_distance() {
        let d = exact_distribution(&ModelSpec::edges_only(0.0).unwrap(), 2).unwrap();
        let mut h = StateHistogram::new(2).unwrap();
        h.record(&GraphState::empty(2));
        h.record(&GraphState::complete(2));
        assert_eq!(d.tv_distance(&h).unwrap(), 0.0);
        assert!(d.tv_distance(&StateHistogram::new(3).unwrap()).is_err());
        let csv = d.to_csv();
        assert!(csv.starts_with("mask,hamiltonian,probability\n0,0,0.5\n"));
    }
}
