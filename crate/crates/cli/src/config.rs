//! Experiment configuration files.
//!
//! A config is one JSON object:
//!
//! ```json
//! {
//!   "model": { "patterns": ["edge", "triangle"], "betas": [-0.2, 0.2] },
//!   "experiment": { "kind": "couple", "n": 24 },
//!   "seeds": { "base_seed": 1, "count": 20 },
//!   "out_dir": "out/couple"
//! }
//! ```
//!
//! Unknown keys anywhere are rejected before anything runs.

use std::path::Path;

use ergm_core::diagnostics::{PseudoRandomOptions, StartState};
use ergm_core::dynamics::{Kernel, Observable};
use ergm_core::phase::SweepAxis;
use ergm_core::{EdgeId, ModelSpec, SubgraphPattern};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub experiment: Experiment,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range(SeedRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub base_seed: u64,
    pub count: u64,
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self::Range(SeedRange {
            base_seed: 0,
            count: 1,
        })
    }
}

impl SeedSpec {
    /// Seeds in order; a range expands to `base_seed + i`.
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Range(r) => (0..r.count).map(|i| r.base_seed.wrapping_add(i)).collect(),
        }
    }

    /// Replaces the base seed (or the seed list with a shifted copy).
    pub fn with_base(&self, base: u64) -> Self {
        let count = self.seeds().len() as u64;
        Self::Range(SeedRange { base_seed: base, count })
    }
}

fn default_tol() -> f64 {
    1e-12
}
fn default_margin() -> f64 {
    1e-3
}
fn default_grid() -> usize {
    10_000
}
fn default_thin() -> u64 {
    1
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_observables() -> Vec<Observable> {
    vec![Observable::EdgeDensity, Observable::Hamiltonian]
}
fn default_start() -> StartState {
    StartState::Empty
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Phase {
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_margin")]
        critical_margin: f64,
        #[serde(default = "default_grid")]
        grid: usize,
        /// Points of the `(p, φ, φ')` table; none when absent.
        #[serde(default)]
        curve_points: Option<usize>,
    },
    PhaseSweep {
        x: SweepAxis,
        #[serde(default)]
        y: Option<SweepAxis>,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_margin")]
        critical_margin: f64,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    Sample {
        n: usize,
        steps: u64,
        #[serde(default = "default_thin")]
        thin: u64,
        #[serde(default)]
        kernel: Kernel,
        #[serde(default = "default_start")]
        start: StartState,
        #[serde(default = "default_observables")]
        observables: Vec<Observable>,
        #[serde(default)]
        extra_patterns: Vec<SubgraphPattern>,
    },
    Couple {
        n: usize,
        /// `⌈50 n² ln n⌉` when absent.
        #[serde(default)]
        max_steps: Option<u64>,
    },
    MixScan {
        n_list: Vec<usize>,
        #[serde(default)]
        max_steps: Option<u64>,
    },
    DiagBurnIn {
        n: usize,
        steps: u64,
        thin: u64,
        #[serde(default = "default_start")]
        start: StartState,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default)]
        extra_patterns: Vec<SubgraphPattern>,
        #[serde(default)]
        p_star: Option<f64>,
    },
    DiagIndependence {
        n: usize,
        /// Tuples of 1-based vertex pairs.
        edge_sets: Vec<Vec<[usize; 2]>>,
        samples: u64,
        #[serde(default)]
        gap_steps: Option<u64>,
        #[serde(default)]
        burn_in_steps: Option<u64>,
        #[serde(default)]
        p_star: Option<f64>,
        /// Also report the exact joint law at this small `n`.
        #[serde(default)]
        exact_n: Option<usize>,
    },
    DiagHysteresis {
        n: usize,
        steps: u64,
        #[serde(default)]
        threshold: Option<f64>,
    },
    DiagPseudo {
        n: usize,
        graph: GraphSource,
        /// Reference density; the model's fixed point when absent.
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        options: PseudoRandomOptions,
    },
    ExactCompare {
        n: usize,
        steps: u64,
        #[serde(default = "default_thin")]
        thin: u64,
        #[serde(default)]
        kernel: Kernel,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// Glauber chain from the empty graph after `steps` steps.
    Sample { steps: u64 },
    ErdosRenyi { p: f64 },
    CompleteBipartite,
    /// Edge-list file.
    File { path: String },
}

impl Experiment {
    /// Subcommand that runs this experiment.
    pub fn command(&self) -> &'static str {
        match self {
            Self::Phase { .. } => "phase",
            Self::PhaseSweep { .. } => "phase-sweep",
            Self::Sample { .. } => "sample",
            Self::Couple { .. } => "couple",
            Self::MixScan { .. } => "mix-scan",
            Self::DiagBurnIn { .. } => "diag burn-in",
            Self::DiagIndependence { .. } => "diag independence",
            Self::DiagHysteresis { .. } => "diag hysteresis",
            Self::DiagPseudo { .. } => "diag pseudo",
            Self::ExactCompare { .. } => "exact compare",
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Canonical JSON used for hashing and embedding.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(|e| field_err("model", e.to_string()))?;
        if self.seeds.seeds().is_empty() {
            return Err(field_err("seeds", "at least one seed is required"));
        }
        let need_n = |n: usize, field: &str| -> Result<(), ConfigError> {
            if n < 2 {
                return Err(field_err(field, format!("need n >= 2, got {n}")));
            }
            if self.model.max_pattern_vertices() > n {
                return Err(field_err(
                    field,
                    format!(
                        "n = {n} is smaller than a model pattern ({} vertices)",
                        self.model.max_pattern_vertices()
                    ),
                ));
            }
            Ok(())
        };
        let positive = |v: u64, field: &str| -> Result<(), ConfigError> {
            if v == 0 {
                return Err(field_err(field, "must be at least 1"));
            }
            Ok(())
        };
        let prob = |p: Option<f64>, field: &str| -> Result<(), ConfigError> {
            match p {
                Some(p) if !(p > 0.0 && p < 1.0) => Err(field_err(field, format!("must lie in (0, 1), got {p}"))),
                _ => Ok(()),
            }
        };
        match &self.experiment {
            Experiment::Phase { tol, grid, critical_margin, .. }
            | Experiment::PhaseSweep { tol, grid, critical_margin, .. } => {
                if !(*tol > 0.0) {
                    return Err(field_err("experiment.tol", "must be positive"));
                }
                if *grid < 2 {
                    return Err(field_err("experiment.grid", "must be at least 2"));
                }
                if !(*critical_margin >= 0.0) {
                    return Err(field_err("experiment.critical_margin", "must be non-negative"));
                }
                if let Experiment::PhaseSweep { x, y, .. } = &self.experiment {
                    for (name, ax) in std::iter::once(("experiment.x", x)).chain(y.iter().map(|a| ("experiment.y", a))) {
                        if ax.index >= self.model.betas().len() {
                            return Err(field_err(
                                &format!("{name}.index"),
                                format!("model has {} parameters", self.model.betas().len()),
                            ));
                        }
                        if ax.count == 0 {
                            return Err(field_err(&format!("{name}.count"), "must be at least 1"));
                        }
                    }
                }
            }
            Experiment::Sample { n, thin, observables, .. } => {
                need_n(*n, "experiment.n")?;
                positive(*thin, "experiment.thin")?;
                if observables.is_empty() {
                    return Err(field_err("experiment.observables", "list is empty"));
                }
            }
            Experiment::Couple { n, max_steps } => {
                need_n(*n, "experiment.n")?;
                if let Some(m) = max_steps {
                    positive(*m, "experiment.max_steps")?;
                }
                self.require_monotone()?;
            }
            Experiment::MixScan { n_list, max_steps } => {
                if n_list.is_empty() {
                    return Err(field_err("experiment.n_list", "list is empty"));
                }
                for &n in n_list {
                    need_n(n, "experiment.n_list")?;
                }
                if let Some(m) = max_steps {
                    positive(*m, "experiment.max_steps")?;
                }
                self.require_monotone()?;
            }
            Experiment::DiagBurnIn { n, thin, epsilon, p_star, .. } => {
                need_n(*n, "experiment.n")?;
                positive(*thin, "experiment.thin")?;
                if !(*epsilon > 0.0) {
                    return Err(field_err("experiment.epsilon", "must be positive"));
                }
                prob(*p_star, "experiment.p_star")?;
            }
            Experiment::DiagIndependence { n, edge_sets, samples, p_star, exact_n, .. } => {
                need_n(*n, "experiment.n")?;
                if edge_sets.is_empty() {
                    return Err(field_err("experiment.edge_sets", "list is empty"));
                }
                for set in edge_sets {
                    edge_ids(*n, set).map_err(|m| field_err("experiment.edge_sets", m))?;
                    if let Some(k) = exact_n {
                        edge_ids(*k, set).map_err(|m| field_err("experiment.exact_n", m))?;
                    }
                }
                if *samples < ergm_core::diagnostics::independence::MIN_SAMPLES {
                    return Err(field_err(
                        "experiment.samples",
                        format!("need at least {}", ergm_core::diagnostics::independence::MIN_SAMPLES),
                    ));
                }
                prob(*p_star, "experiment.p_star")?;
                if let Some(k) = exact_n {
                    need_n(*k, "experiment.exact_n")?;
                    if *k > ergm_core::exact::EXACT_MAX_N {
                        return Err(field_err(
                            "experiment.exact_n",
                            format!("at most {}", ergm_core::exact::EXACT_MAX_N),
                        ));
                    }
                }
            }
            Experiment::DiagHysteresis { n, threshold, .. } => {
                need_n(*n, "experiment.n")?;
                prob(*threshold, "experiment.threshold")?;
            }
            Experiment::DiagPseudo { n, graph, p, options } => {
                need_n(*n, "experiment.n")?;
                prob(*p, "experiment.p")?;
                if let GraphSource::ErdosRenyi { p } = graph {
                    if !(0.0..=1.0).contains(p) {
                        return Err(field_err("experiment.graph.p", "must lie in [0, 1]"));
                    }
                }
                if !(2..=6).contains(&options.induced_order) || options.induced_order > *n {
                    return Err(field_err("experiment.options.induced_order", "must lie in 2..=min(6, n)"));
                }
                if options.cycle_lengths.iter().any(|&l| !(3..=8).contains(&l) || l > *n) {
                    return Err(field_err("experiment.options.cycle_lengths", "lengths must lie in 3..=min(8, n)"));
                }
            }
            Experiment::ExactCompare { n, thin, .. } => {
                need_n(*n, "experiment.n")?;
                positive(*thin, "experiment.thin")?;
                if *n > ergm_core::exact::EXACT_MAX_N {
                    return Err(field_err(
                        "experiment.n",
                        format!("exact comparison supports n <= {}", ergm_core::exact::EXACT_MAX_N),
                    ));
                }
            }
        }
        Ok(())
    }

    fn require_monotone(&self) -> Result<(), ConfigError> {
        if self.model.is_ferromagnetic() {
            Ok(())
        } else {
            Err(field_err(
                "model.betas",
                "coupling needs non-negative interaction parameters",
            ))
        }
    }
}

/// Converts 1-based vertex pairs to edge ids on `n` vertices.
pub fn edge_ids(n: usize, pairs: &[[usize; 2]]) -> Result<Vec<EdgeId>, String> {
    pairs
        .iter()
        .map(|&[i, j]| EdgeId::new(n, i, j).map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "model": {"patterns": ["edge", "triangle"], "betas": [-0.2, 0.2]},
        "experiment": {"kind": "couple", "n": 12},
        "seeds": {"base_seed": 5, "count": 3}
    }"#;

    #[test]
    fn parses_and_expands_seeds() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.seeds.seeds(), vec![5, 6, 7]);
        assert_eq!(cfg.experiment.command(), "couple");
        assert_eq!(cfg.seeds.with_base(100).seeds(), vec![100, 101, 102]);
        let again = ExperimentConfig::from_json(&cfg.canonical_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = BASE.replace("\"n\": 12", "\"n\": 12, \"typo\": 1");
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(ConfigError::Parse(_))));
        let bad = BASE.replace("\"seeds\"", "\"extra\": 0, \"seeds\"");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn names_offending_field() {
        let bad = BASE.replace("\"n\": 12", "\"n\": 1");
        match ExperimentConfig::from_json(&bad) {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "experiment.n"),
            other => panic!("{other:?}"),
        }
        let bad = BASE.replace("[-0.2, 0.2]", "[-0.2]");
        match ExperimentConfig::from_json(&bad) {
            Err(ConfigError::Parse(_)) | Err(ConfigError::Field { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_seed_list() {
        let text = BASE.replace("{\"base_seed\": 5, \"count\": 3}", "[9, 4]");
        assert_eq!(ExperimentConfig::from_json(&text).unwrap().seeds.seeds(), vec![9, 4]);
    }
}
