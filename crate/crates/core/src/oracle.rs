//! Brute-force reference implementations.
//!
//! Everything here enumerates tuples or states directly from the definitions
//! and touches graphs only through `GraphState` accessors, so it can be used
//! to check the fast paths in `counts`, `model` and `dynamics`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dynamics::Kernel;
use crate::error::{ErgmError, Result};
use crate::graph::{pair_count, GraphState};
use crate::model::ModelSpec;
use crate::pattern::SubgraphPattern;

/// Largest `n^{|V|}` tuple count the naive counters will enumerate.
pub const NAIVE_WORK_LIMIT: u128 = 100_000_000;

/// Largest `n` for explicit transition matrices.
pub const MATRIX_MAX_N: usize = 4;

fn guard(n: usize, g: &SubgraphPattern) -> Result<()> {
    let work = (n as u128).pow(g.vertex_count() as u32);
    if work > NAIVE_WORK_LIMIT {
        return Err(ErgmError::GuardExceeded {
            work,
            limit: NAIVE_WORK_LIMIT,
        });
    }
    Ok(())
}

/// Calls `f` on every ordered tuple of `m` distinct vertices in `0..n`.
fn for_each_injective(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; m];
    'outer: loop {
        let distinct = (0..m).all(|i| (0..i).all(|j| t[i] != t[j]));
        if distinct {
            f(&t);
        }
        for i in (0..m).rev() {
            t[i] += 1;
            if t[i] < n {
                continue 'outer;
            }
            t[i] = 0;
        }
        break;
    }
}

fn unordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Pattern edges as 0-based pairs.
fn pattern_edges(g: &SubgraphPattern) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(a, b)| (a - 1, b - 1)).collect()
}

/// Host pair `(i, j)` present in `X` or among `extra` (all 1-based input
/// converted to 0-based here).
fn present(x: &GraphState, extra: &[(usize, usize)], i: usize, j: usize) -> bool {
    let p = unordered(i, j);
    extra.contains(&p) || x.has_pair(i + 1, j + 1).expect("vertices in range")
}

fn edge_pair(e: crate::EdgeId) -> (usize, usize) {
    let (i, j) = e.endpoints();
    (i - 1, j - 1)
}

/// `N_G(X)`: injective maps with every pattern edge on a host edge.
pub fn naive_count_global(x: &GraphState, g: &SubgraphPattern) -> Result<u64> {
    guard(x.n(), g)?;
    let pe = pattern_edges(g);
    let mut c = 0;
    for_each_injective(x.n(), g.vertex_count(), |t| {
        if pe.iter().all(|&(a, b)| present(x, &[], t[a], t[b])) {
            c += 1;
        }
    });
    Ok(c)
}

/// `N_G(X, e)`: injective maps hitting `e` with some pattern edge, all pattern
/// edges present in `X ∪ {e}`.
pub fn naive_count_at_edge(x: &GraphState, g: &SubgraphPattern, e: crate::EdgeId) -> Result<u64> {
    guard(x.n(), g)?;
    let pe = pattern_edges(g);
    let target = edge_pair(e);
    let mut c = 0;
    for_each_injective(x.n(), g.vertex_count(), |t| {
        let hits = pe.iter().any(|&(a, b)| unordered(t[a], t[b]) == target);
        if hits && pe.iter().all(|&(a, b)| present(x, &[target], t[a], t[b])) {
            c += 1;
        }
    });
    Ok(c)
}

/// `N_G(X, e, e')`: injective maps hitting both `e` and `e'`, all pattern
/// edges present in `X ∪ {e, e'}`.
pub fn naive_count_at_edge_pair(
    x: &GraphState,
    g: &SubgraphPattern,
    e: crate::EdgeId,
    e2: crate::EdgeId,
) -> Result<u64> {
    if e == e2 {
        return Err(ErgmError::IdenticalEdges);
    }
    guard(x.n(), g)?;
    let pe = pattern_edges(g);
    let (t1, t2) = (edge_pair(e), edge_pair(e2));
    let mut c = 0;
    for_each_injective(x.n(), g.vertex_count(), |t| {
        let images: Vec<_> = pe.iter().map(|&(a, b)| unordered(t[a], t[b])).collect();
        if images.contains(&t1)
            && images.contains(&t2)
            && pe.iter().all(|&(a, b)| present(x, &[t1, t2], t[a], t[b]))
        {
            c += 1;
        }
    });
    Ok(c)
}

/// `N*_G(X)`: injective maps with pattern adjacency equal to host adjacency.
pub fn naive_count_induced(x: &GraphState, g: &SubgraphPattern) -> Result<u64> {
    guard(x.n(), g)?;
    let pe = pattern_edges(g);
    let m = g.vertex_count();
    let mut c = 0;
    for_each_injective(x.n(), m, |t| {
        let ok = (0..m).all(|a| {
            (a + 1..m).all(|b| pe.contains(&(a, b)) == present(x, &[], t[a], t[b]))
        });
        if ok {
            c += 1;
        }
    });
    Ok(c)
}

/// `H(X)` from naive counts.
pub fn naive_hamiltonian(x: &GraphState, model: &ModelSpec) -> Result<f64> {
    let n = x.n() as f64;
    let mut h = 0.0;
    for (g, &b) in model.patterns().iter().zip(model.betas()) {
        h += b * naive_count_global(x, g)? as f64 / n.powi(g.vertex_count() as i32 - 2);
    }
    Ok(h)
}

/// Row-stochastic transition matrix over all graphs on `n` vertices, states
/// indexed by edge bitmask.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n: usize,
    p: DMatrix<f64>,
}

/// Builds the one-step matrix of `kernel` from naive Hamiltonians.
pub fn build_transition_matrix(model: &ModelSpec, n: usize, kernel: Kernel) -> Result<TransitionMatrix> {
    if n > MATRIX_MAX_N {
        return Err(ErgmError::ExactTooLarge {
            n,
            limit: MATRIX_MAX_N,
        });
    }
    if n < 2 {
        return Err(ErgmError::TooFewVertices { min: 2, got: n });
    }
    model.validate()?;
    let pairs = pair_count(n);
    let size = 1usize << pairs;
    let h: Vec<f64> = (0..size as u64)
        .map(|mask| naive_hamiltonian(&GraphState::from_mask(n, mask)?, model))
        .collect::<Result<_>>()?;
    let mut p = DMatrix::zeros(size, size);
    let choose = 1.0 / pairs as f64;
    for s in 0..size {
        for k in 0..pairs {
            let on = s | 1 << k;
            let off = s & !(1 << k);
            let field = h[on] - h[off];
            match kernel {
                Kernel::Glauber => {
                    let q = 1.0 / (1.0 + (-field).exp());
                    p[(s, on)] += choose * q;
                    p[(s, off)] += choose * (1.0 - q);
                }
                Kernel::Metropolis => {
                    let t = s ^ 1 << k;
                    let a = (h[t] - h[s]).exp().min(1.0);
                    p[(s, t)] += choose * a;
                    p[(s, s)] += choose * (1.0 - a);
                }
            }
        }
    }
    Ok(TransitionMatrix { n, p })
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.p.nrows()
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// `max_x |Σ_y P(x, y) - 1|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.p
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_{x,y} |π(x) P(x, y) - π(y) P(y, x)|`.
    pub fn detailed_balance_residual(&self, pi: &[f64]) -> f64 {
        let s = self.size();
        let mut worst = 0.0f64;
        for x in 0..s {
            for y in 0..s {
                worst = worst.max((pi[x] * self.p[(x, y)] - pi[y] * self.p[(y, x)]).abs());
            }
        }
        worst
    }

    /// `max_y |(πP)(y) - π(y)|`.
    pub fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        let v = DVector::from_column_slice(pi);
        let moved = self.p.tr_mul(&v);
        (moved - v).amax()
    }

    /// Solves `π P = π`, `Σ π = 1` directly.
    pub fn stationary_vector(&self) -> Result<Vec<f64>> {
        let s = self.size();
        let mut a = self.p.transpose() - DMatrix::identity(s, s);
        let mut b = DVector::zeros(s);
        for j in 0..s {
            a[(s - 1, j)] = 1.0;
        }
        b[s - 1] = 1.0;
        let pi = a
            .lu()
            .solve(&b)
            .ok_or_else(|| ErgmError::InvalidModel("singular stationary system".into()))?;
        Ok(pi.iter().cloned().collect())
    }

    /// Eigenvalues of the reversible chain, in decreasing order, via the
    /// symmetrization `D^{1/2} P D^{-1/2}` with `D = diag(π)`.
    pub fn eigenvalues(&self, pi: &[f64]) -> Vec<f64> {
        let s = self.size();
        let root: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
        let sym = DMatrix::from_fn(s, s, |i, j| {
            let a = root[i] * self.p[(i, j)] / root[j];
            let b = root[j] * self.p[(j, i)] / root[i];
            0.5 * (a + b)
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// `1 - λ_2`.
    pub fn spectral_gap(&self, pi: &[f64]) -> f64 {
        let ev = self.eigenvalues(pi);
        1.0 - ev.get(1).copied().unwrap_or(0.0)
    }
}
