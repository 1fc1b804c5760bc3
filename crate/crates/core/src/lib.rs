//! Exponential random graph models on labeled graphs with `n` vertices.
//!
//! The Gibbs measure `p(X) ∝ exp(H(X))` with
//! `H(X) = Σ_i β_i N_{G_i}(X) / n^{|V_i|-2}`, its single-edge Markov chains,
//! mean-field phase analysis, and empirical diagnostics of mixing and
//! pseudo-randomness. Small instances can be solved exactly.

pub mod counts;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod pattern;
pub mod phase;
pub mod rng;

pub use counts::{
    complete_graph_count, complete_graph_count_at_edge, count_at_edge, count_at_edge_pair,
    count_four_cycles, count_global, count_induced_global, induced_census, r_extremes,
    r_statistic, CountReport, InducedCensus,
};
pub use dynamics::{
    coupling_time, default_max_steps, run_trace, ChainState, CoupledPair, CouplingResult, Kernel,
    Observable, StepOutcome, Trace,
};
pub use error::{ErgmError, Result};
pub use exact::{exact_distribution, exact_edge_marginal, tv_distance, ExactDistribution, StateHistogram};
pub use graph::{all_edges, pair_count, EdgeId, GraphState};
pub use model::{hamiltonian, local_field, sigmoid, ModelInstance, ModelSpec};
pub use pattern::SubgraphPattern;
pub use phase::{
    classify, find_fixed_points, phase_sweep, phi, phi_prime, psi, FixedPoint, Phase, PhaseOptions,
    PhaseReport, Stability,
};
pub use rng::{seeded_rng, split_rng, ChainRng, RNG_ALGORITHM};
