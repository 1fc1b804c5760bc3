//! Model specification and the Hamiltonian
//! `H(X) = Σ_i β_i N_{G_i}(X) / n^{|V_i|-2}`.

use serde::{Deserialize, Serialize};

use crate::counts::{at_edge_unchecked, count_global};
use crate::error::{ErgmError, Result};
use crate::graph::{all_edges, EdgeId, GraphState};
use crate::pattern::SubgraphPattern;

/// Largest pattern admitted into a model.
pub const MODEL_PATTERN_CAP: usize = 6;

/// Patterns `G_1, ..., G_s` (with `G_1` the edge graph) and parameters
/// `β_1, ..., β_s`.
///
/// Counts use the labeled convention, so `β_i` multiplies `|Aut(G_i)|` copies
/// per unlabeled subgraph; divide by `|Aut(G_i)|` to compare with the
/// unlabeled convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    patterns: Vec<SubgraphPattern>,
    betas: Vec<f64>,
    /// Admit negative interaction parameters. Monotone coupling is not valid
    /// for such models.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    allow_repulsive: bool,
}

impl ModelSpec {
    /// Validated model with non-negative interactions `β_i >= 0` for `i >= 2`.
    pub fn new(patterns: Vec<SubgraphPattern>, betas: Vec<f64>) -> Result<Self> {
        let spec = Self {
            patterns,
            betas,
            allow_repulsive: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Like [`ModelSpec::new`] but accepts negative interactions.
    pub fn new_repulsive(patterns: Vec<SubgraphPattern>, betas: Vec<f64>) -> Result<Self> {
        let spec = Self {
            patterns,
            betas,
            allow_repulsive: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Only the edge pattern: the product measure `G(n, σ(2β_1))`.
    pub fn edges_only(beta1: f64) -> Result<Self> {
        Self::new(vec![SubgraphPattern::edge()], vec![beta1])
    }

    pub fn edge_triangle(beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(
            vec![SubgraphPattern::edge(), SubgraphPattern::triangle()],
            vec![beta1, beta2],
        )
    }

    pub fn edge_two_star(beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(
            vec![SubgraphPattern::edge(), SubgraphPattern::two_star()],
            vec![beta1, beta2],
        )
    }

    /// Re-runs validation; needed after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.patterns.is_empty() {
            return Err(ErgmError::InvalidModel("at least the edge pattern is required".into()));
        }
        if !self.patterns[0].is_edge_pattern() {
            return Err(ErgmError::InvalidModel(format!(
                "the first pattern must be the edge graph, found `{}`",
                self.patterns[0].name()
            )));
        }
        if self.patterns.len() != self.betas.len() {
            return Err(ErgmError::InvalidModel(format!(
                "{} patterns but {} parameters",
                self.patterns.len(),
                self.betas.len()
            )));
        }
        for (k, g) in self.patterns.iter().enumerate() {
            if g.vertex_count() > MODEL_PATTERN_CAP {
                return Err(ErgmError::InvalidModel(format!(
                    "pattern `{}` has {} vertices; models allow at most {MODEL_PATTERN_CAP}",
                    g.name(),
                    g.vertex_count()
                )));
            }
            if g.edge_count() == 0 {
                return Err(ErgmError::InvalidModel(format!("pattern #{k} has no edges")));
            }
        }
        for (k, &b) in self.betas.iter().enumerate() {
            if !b.is_finite() {
                return Err(ErgmError::InvalidModel(format!("beta_{} is not finite", k + 1)));
            }
            if k > 0 && b < 0.0 && !self.allow_repulsive {
                return Err(ErgmError::InvalidModel(format!(
                    "beta_{} = {b} is negative; interactions must be >= 0 unless allow_repulsive is set",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn patterns(&self) -> &[SubgraphPattern] {
        &self.patterns
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn allows_repulsive(&self) -> bool {
        self.allow_repulsive
    }

    /// All interaction parameters are non-negative.
    pub fn is_ferromagnetic(&self) -> bool {
        self.betas.iter().skip(1).all(|&b| b >= 0.0)
    }

    /// Copy with parameter `index` (0-based) replaced.
    pub fn with_beta(&self, index: usize, value: f64) -> Result<Self> {
        if index >= self.betas.len() {
            return Err(ErgmError::InvalidArgument(format!(
                "parameter index {index} out of range for {} parameters",
                self.betas.len()
            )));
        }
        let mut out = self.clone();
        out.betas[index] = value;
        out.validate()?;
        Ok(out)
    }

    /// Largest pattern vertex count.
    pub fn max_pattern_vertices(&self) -> usize {
        self.patterns.iter().map(|g| g.vertex_count()).max().unwrap_or(2)
    }

    /// Binds the model to a vertex count, caching normalizers.
    pub fn bind(&self, n: usize) -> Result<ModelInstance> {
        ModelInstance::new(self.clone(), n)
    }
}

/// A [`ModelSpec`] bound to a fixed `n`, with cached normalizers
/// `n^{|V_i|-2}` and the pair table used to draw edges by index.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    spec: ModelSpec,
    n: usize,
    /// `β_i / n^{|V_i|-2}`.
    weights: Vec<f64>,
    edges: Vec<EdgeId>,
}

impl ModelInstance {
    pub fn new(spec: ModelSpec, n: usize) -> Result<Self> {
        spec.validate()?;
        if n < 2 {
            return Err(ErgmError::TooFewVertices { min: 2, got: n });
        }
        if let Some(g) = spec.patterns.iter().find(|g| g.vertex_count() > n) {
            return Err(ErgmError::PatternTooLarge {
                pattern: g.name().to_string(),
                pattern_vertices: g.vertex_count(),
                n,
            });
        }
        let weights = spec
            .patterns
            .iter()
            .zip(&spec.betas)
            .map(|(g, &b)| b / (n as f64).powi(g.vertex_count() as i32 - 2))
            .collect();
        Ok(Self {
            spec,
            n,
            weights,
            edges: all_edges(n),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge with linear index `k`.
    #[inline]
    pub fn edge_at(&self, k: usize) -> EdgeId {
        self.edges[k]
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    fn check(&self, x: &GraphState) -> Result<()> {
        if x.n() != self.n {
            return Err(ErgmError::MismatchedSize {
                left: x.n(),
                right: self.n,
            });
        }
        Ok(())
    }

    /// `H(X)`.
    pub fn hamiltonian(&self, x: &GraphState) -> Result<f64> {
        self.check(x)?;
        let mut h = 0.0;
        for (g, w) in self.spec.patterns.iter().zip(&self.weights) {
            h += w * count_global(x, g)? as f64;
        }
        Ok(h)
    }

    /// `∂_e H(X) = Σ_i β_i N_{G_i}(X, e) / n^{|V_i|-2} = H(X_{e+}) - H(X_{e-})`.
    pub fn local_field(&self, x: &GraphState, e: EdgeId) -> Result<f64> {
        self.check(x)?;
        if e.hi() >= self.n {
            return Err(ErgmError::VertexOutOfRange {
                vertex: e.hi() + 1,
                n: self.n,
            });
        }
        Ok(self.field_unchecked(x, e))
    }

    #[inline]
    pub(crate) fn field_unchecked(&self, x: &GraphState, e: EdgeId) -> f64 {
        let mut f = 0.0;
        for (g, &w) in self.spec.patterns.iter().zip(&self.weights) {
            if w != 0.0 {
                f += w * at_edge_unchecked(x, g, e) as f64;
            }
        }
        f
    }
}

/// `H(X)` for a model; binds to `X.n()` on every call.
pub fn hamiltonian(x: &GraphState, model: &ModelSpec) -> Result<f64> {
    model.bind(x.n())?.hamiltonian(x)
}

/// `∂_e H(X)`; binds to `X.n()` on every call.
pub fn local_field(x: &GraphState, model: &ModelSpec, e: EdgeId) -> Result<f64> {
    model.bind(x.n())?.local_field(x, e)
}

/// Logistic function `e^t / (1 + e^t)`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let z = t.exp();
        z / (1.0 + z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation_rules() {
        assert!(ModelSpec::new(vec![SubgraphPattern::triangle()], vec![1.0]).is_err());
        assert!(ModelSpec::new(vec![SubgraphPattern::edge()], vec![]).is_err());
        assert!(ModelSpec::edge_triangle(0.1, -0.2).is_err());
        assert!(ModelSpec::edge_triangle(-3.0, 0.0).is_ok());
        assert!(ModelSpec::edges_only(f64::NAN).is_err());
        let rep = ModelSpec::new_repulsive(
            vec![SubgraphPattern::edge(), SubgraphPattern::triangle()],
            vec![0.1, -0.2],
        )
        .unwrap();
        assert!(!rep.is_ferromagnetic());
        let big = SubgraphPattern::cycle(7).unwrap();
        assert!(ModelSpec::new(vec![SubgraphPattern::edge(), big], vec![0.0, 1.0]).is_err());
        assert!(ModelSpec::edge_triangle(0.0, 1.0).unwrap().bind(2).is_err());
    }

    #[test]
    fn config_round_trip_rejects_unknown_keys() {
        let m: ModelSpec =
            serde_json::from_str(r#"{"patterns":["edge","triangle"],"betas":[0.5,0.2]}"#).unwrap();
        assert_eq!(m, ModelSpec::edge_triangle(0.5, 0.2).unwrap());
        assert!(serde_json::from_str::<ModelSpec>(r#"{"patterns":["edge"],"betas":[0.5],"beta":1}"#).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let m = ModelSpec::edges_only(0.7).unwrap();
        let x = GraphState::from_pairs(6, &[(1, 2), (3, 4), (5, 6), (1, 6)]).unwrap();
        assert!((hamiltonian(&x, &m).unwrap() - 0.7 * 8.0).abs() < 1e-12);
        let et = ModelSpec::edge_triangle(0.5, 0.2).unwrap();
        assert_eq!(hamiltonian(&GraphState::empty(5), &et).unwrap(), 0.0);
        let h = hamiltonian(&GraphState::complete(4), &et).unwrap();
        assert!((h - 7.2).abs() < 1e-12);
    }

    #[test]
    fn field_examples() {
        let m = ModelSpec::edges_only(-0.4).unwrap().bind(7).unwrap();
        let x = GraphState::complete(7);
        for &e in m.edges() {
            assert_eq!(m.local_field(&x, e).unwrap(), -0.8);
        }
        let et = ModelSpec::edge_triangle(0.3, 0.9).unwrap().bind(5).unwrap();
        let e = EdgeId::new(5, 2, 4).unwrap();
        assert_eq!(et.local_field(&GraphState::empty(5), e).unwrap(), 0.6);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1.0) - 0.7310585786300049).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((sigmoid(-3.0) + sigmoid(3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_scaling_is_cauchy() {
        let m = ModelSpec::edge_triangle(0.5, 0.2).unwrap();
        let ratios: Vec<f64> = [20, 40, 80]
            .iter()
            .map(|&n| hamiltonian(&GraphState::complete(n), &m).unwrap() / (n * n) as f64)
            .collect();
        // Leading term Σ β_i.
        for w in ratios.windows(2) {
            assert!((w[1] - w[0]).abs() / w[1] < 0.10, "{ratios:?}");
        }
        assert!((ratios[2] - 0.7).abs() < 0.05);
    }

    fn models() -> impl Strategy<Value = ModelSpec> {
        (-1.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0usize..3).prop_map(|(b1, b2, b3, kind)| {
            let mut patterns = vec![SubgraphPattern::edge(), SubgraphPattern::triangle()];
            let mut betas = vec![b1, b2];
            match kind {
                1 => {
                    patterns.push(SubgraphPattern::two_star());
                    betas.push(b3);
                }
                2 => {
                    patterns.push(SubgraphPattern::cycle(4).unwrap());
                    betas.push(b3);
                }
                _ => {}
            }
            ModelSpec::new(patterns, betas).unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_is_hamiltonian_difference(m in models(), n in 4usize..=8, seed in any::<u64>(), k in 0usize..28) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = GraphState::erdos_renyi(n, 0.5, &mut rng);
            let inst = m.bind(n).unwrap();
            let e = inst.edge_at(k % inst.pair_count());
            let diff = inst.hamiltonian(&x.with_edge(e)).unwrap() - inst.hamiltonian(&x.without_edge(e)).unwrap();
            let f = inst.local_field(&x, e).unwrap();
            prop_assert!((diff - f).abs() < 1e-10, "diff {} field {}", diff, f);
        }

        #[test]
        fn field_is_monotone(m in models(), n in 4usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = GraphState::erdos_renyi(n, 0.6, &mut rng);
            let mut x = y.clone();
            for e in y.edges() {
                if rand::Rng::random::<bool>(&mut rng) { x.set(e, false); }
            }
            let inst = m.bind(n).unwrap();
            for &e in inst.edges() {
                prop_assert!(inst.local_field(&x, e).unwrap() <= inst.local_field(&y, e).unwrap() + 1e-12);
            }
        }
    }
}
