use std::sync::Arc;

use ergm_core::oracle::build_transition_matrix;
use ergm_core::{
    exact_distribution, local_field, sigmoid, ChainState, EdgeId, GraphState, Kernel, ModelSpec, StateHistogram,
};

fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::edges_only(0.0).unwrap(),
        ModelSpec::edges_only(-0.7).unwrap(),
        ModelSpec::edge_triangle(0.2, 0.1).unwrap(),
        ModelSpec::edge_two_star(-0.4, 0.3).unwrap(),
        ModelSpec::edge_triangle(-1.5, 1.5).unwrap(),
    ]
}

#[test]
fn reversible_against_gibbs_measure() {
    for m in models() {
        for n in m.max_pattern_vertices().max(2)..=4 {
            let d = exact_distribution(&m, n).unwrap();
            for kernel in [Kernel::Glauber, Kernel::Metropolis] {
                let t = build_transition_matrix(&m, n, kernel).unwrap();
                assert!(t.row_sum_residual() < 1e-12);
                assert!(t.detailed_balance_residual(d.probabilities()) < 1e-10);
                assert!(t.stationarity_residual(d.probabilities()) < 1e-10);
                let pi = t.stationary_vector().unwrap();
                for (a, b) in pi.iter().zip(d.probabilities()) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn transitions_only_between_neighbours() {
    let t = build_transition_matrix(&ModelSpec::edge_triangle(0.2, 0.1).unwrap(), 4, Kernel::Glauber).unwrap();
    for a in 0..t.size() {
        for b in 0..t.size() {
            if (a ^ b).count_ones() > 1 {
                assert_eq!(t.entry(a, b), 0.0);
            }
        }
    }
}

#[test]
fn uniform_chain_gap() {
    let t = build_transition_matrix(&ModelSpec::edges_only(0.0).unwrap(), 3, Kernel::Glauber).unwrap();
    let pi = vec![0.125; 8];
    let ev = t.eigenvalues(&pi);
    // Eigenvalues 1 - |S|/3 with multiplicities C(3, |S|).
    let expect = [1.0, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
    for (a, b) in ev.iter().zip(expect) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!((t.spectral_gap(&pi) - 1.0 / 3.0).abs() < 1e-10);
}

fn empirical_tv(m: &ModelSpec, n: usize, kernel: Kernel, steps: u64, thin: u64, seed: u64) -> f64 {
    let d = exact_distribution(m, n).unwrap();
    let inst = Arc::new(m.bind(n).unwrap());
    let mut c = ChainState::new(inst, GraphState::empty(n), seed).unwrap();
    c.run(1000, kernel);
    let mut h = StateHistogram::new(n).unwrap();
    for _ in 0..steps / thin {
        c.run(thin, kernel);
        h.record(c.graph());
    }
    d.tv_distance(&h).unwrap()
}

#[test]
fn metropolis_samples_gibbs_measure() {
    let m = ModelSpec::edge_triangle(0.2, 0.1).unwrap();
    assert!(empirical_tv(&m, 4, Kernel::Metropolis, 10_000_000, 10, 17) < 0.05);
}

#[test]
fn glauber_samples_gibbs_measure() {
    let m = ModelSpec::edge_two_star(-0.4, 0.3).unwrap();
    assert!(empirical_tv(&m, 4, Kernel::Glauber, 10_000_000, 10, 18) < 0.05);
}

/// After an update of `e` the new value is Bernoulli(σ(∂_e H)) whatever the
/// old value was. Chi-square over the two groups split by the old value.
#[test]
fn heat_bath_conditional_law() {
    let n = 6;
    let m = ModelSpec::edge_triangle(-0.3, 0.8).unwrap();
    let inst = Arc::new(m.bind(n).unwrap());
    let target = EdgeId::new(n, 1, 2).unwrap();
    let mut c = ChainState::new(inst, GraphState::empty(n), 99).unwrap();
    // (updates, ones, expected ones, variance) by previous value.
    let mut groups = [(0u64, 0u64, 0.0f64, 0.0f64); 2];
    while groups[0].0 + groups[1].0 < 100_000 {
        let before = c.graph().clone();
        let out = c.glauber_step();
        if out.edge != target {
            continue;
        }
        let q = sigmoid(local_field(&before, &m, target).unwrap());
        let g = &mut groups[before.has(target) as usize];
        g.0 += 1;
        g.1 += c.graph().has(target) as u64;
        g.2 += q;
        g.3 += q * (1.0 - q);
    }
    let chi2: f64 = groups.iter().map(|g| (g.1 as f64 - g.2).powi(2) / g.3).sum();
    // 99.9% quantile of chi-square with 2 degrees of freedom.
    assert!(chi2 < 13.82, "chi2 = {chi2}, groups = {groups:?}");
    assert!(groups.iter().all(|g| g.0 > 1000));
}
