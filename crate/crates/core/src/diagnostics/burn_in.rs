//! Traces of the `r` statistic extremes while a chain relaxes.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{r_patterns, run_trace, ChainState, Kernel, Observable};
use crate::error::{ErgmError, Result};
use crate::graph::GraphState;
use crate::model::ModelSpec;
use crate::pattern::SubgraphPattern;
use crate::phase::{classify, Phase};
use crate::rng::{seeded_rng, split_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum StartState {
    Empty,
    Complete,
    /// A `G(n, p)` draw from a stream of the run seed.
    ErdosRenyi { p: f64 },
    Graph { graph: GraphState },
}

impl StartState {
    pub fn build(&self, n: usize, seed: u64) -> Result<GraphState> {
        Ok(match self {
            Self::Empty => GraphState::empty(n),
            Self::Complete => GraphState::complete(n),
            Self::ErdosRenyi { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(ErgmError::ProbabilityOutOfRange(*p));
                }
                GraphState::erdos_renyi(n, *p, &mut split_rng(seed, 1))
            }
            Self::Graph { graph } => {
                if graph.n() != n {
                    return Err(ErgmError::MismatchedSize {
                        left: graph.n(),
                        right: n,
                    });
                }
                graph.clone()
            }
        })
    }
}

/// The fixed point diagnostics compare against: `explicit` if given, else
/// the unique fixed point of a high-temperature model.
pub fn resolve_p_star(model: &ModelSpec, explicit: Option<f64>) -> Result<f64> {
    if let Some(p) = explicit {
        if !(p > 0.0 && p < 1.0) {
            return Err(ErgmError::ProbabilityOutOfRange(p));
        }
        return Ok(p);
    }
    let report = classify(model, 1e-12)?;
    match report.classification {
        Phase::HighTemperature => Ok(report.fixed_points[0].p_star),
        other => Err(ErgmError::AmbiguousFixedPoint(format!(
            "model is {other:?} with {} fixed points; pass p_star explicitly",
            report.fixed_points.len()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurnInOptions {
    pub steps: u64,
    pub thin: u64,
    /// Half-width of the band around `p*`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub extra_patterns: Vec<SubgraphPattern>,
    #[serde(default)]
    pub p_star: Option<f64>,
    #[serde(default)]
    pub kernel: Kernel,
}

fn default_epsilon() -> f64 {
    0.05
}

impl BurnInOptions {
    pub fn new(steps: u64, thin: u64) -> Self {
        Self {
            steps,
            thin,
            epsilon: default_epsilon(),
            extra_patterns: Vec::new(),
            p_star: None,
            kernel: Kernel::Glauber,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurnInRow {
    pub step: u64,
    pub r_max: f64,
    pub r_min: f64,
    pub edge_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurnInTrace {
    pub n: usize,
    pub seed: u64,
    pub p_star: f64,
    pub epsilon: f64,
    pub patterns: Vec<String>,
    pub rows: Vec<BurnInRow>,
    /// First recorded step with both extremes inside `p* ± ε`.
    pub entered_at: Option<u64>,
}

impl BurnInTrace {
    pub fn inside(&self, row: &BurnInRow) -> bool {
        (row.r_max - self.p_star).abs() < self.epsilon && (row.r_min - self.p_star).abs() < self.epsilon
    }

    /// Every recorded row at or after `step` lies inside the band.
    pub fn stays_inside_from(&self, step: u64) -> bool {
        self.rows.iter().filter(|r| r.step >= step).all(|r| self.inside(r))
    }

    /// Largest `max(|r_max - p*|, |r_min - p*|)` at or after `step`.
    pub fn max_deviation_from(&self, step: u64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.step >= step)
            .map(|r| (r.r_max - self.p_star).abs().max((r.r_min - self.p_star).abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,r_max,r_min,edge_density\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.step, r.r_max, r.r_min, r.edge_density);
        }
        out
    }
}

pub fn burn_in_trace(
    model: &ModelSpec,
    n: usize,
    start: &StartState,
    opts: &BurnInOptions,
    seed: u64,
) -> Result<BurnInTrace> {
    let p_star = resolve_p_star(model, opts.p_star)?;
    let patterns = r_patterns(model, &opts.extra_patterns)?;
    if patterns.is_empty() {
        return Err(ErgmError::RStatisticUndefined(
            "no tracked pattern has two or more edges".into(),
        ));
    }
    let inst = Arc::new(model.bind(n)?);
    let x0 = start.build(n, seed)?;
    let mut chain = ChainState::with_rng(inst, x0, seeded_rng(seed))?;
    let obs = [Observable::RMax, Observable::RMin, Observable::EdgeDensity];
    let trace = run_trace(&mut chain, opts.steps, &obs, opts.thin, opts.kernel, &opts.extra_patterns)?;
    let rows: Vec<BurnInRow> = trace
        .steps
        .iter()
        .zip(&trace.values)
        .map(|(&step, v)| BurnInRow {
            step,
            r_max: v[0],
            r_min: v[1],
            edge_density: v[2],
        })
        .collect();
    let mut out = BurnInTrace {
        n,
        seed,
        p_star,
        epsilon: opts.epsilon,
        patterns: patterns.iter().map(|g| g.name().to_string()).collect(),
        rows,
        entered_at: None,
    };
    out.entered_at = out.rows.iter().find(|r| out.inside(r)).map(|r| r.step);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sigmoid;

    #[test]
    fn ambiguous_low_temperature() {
        let m = ModelSpec::edge_triangle(-1.5, 1.5).unwrap();
        assert!(matches!(resolve_p_star(&m, None), Err(ErgmError::AmbiguousFixedPoint(_))));
        assert_eq!(resolve_p_star(&m, Some(0.2)).unwrap(), 0.2);
        let opts = BurnInOptions::new(10, 1);
        assert!(burn_in_trace(&m, 10, &StartState::Empty, &opts, 1).is_err());
    }

    #[test]
    fn edges_only_tracks_triangle_statistic() {
        let m = ModelSpec::edges_only(0.2).unwrap();
        let n = 40;
        let mut opts = BurnInOptions::new(20 * 1600, 1600);
        opts.extra_patterns = vec![SubgraphPattern::triangle()];
        opts.epsilon = 0.3;
        let t = burn_in_trace(&m, n, &StartState::Empty, &opts, 3).unwrap();
        assert_eq!(t.rows.len(), 21);
        assert!((t.p_star - sigmoid(0.4)).abs() < 1e-10);
        assert_eq!(t.rows[0].r_max, 0.0);
        let last = t.rows.last().unwrap();
        assert!(last.r_min <= last.r_max);
        assert!((last.edge_density - sigmoid(0.4)).abs() < 0.1);
        assert!(t.entered_at.is_some());
        assert!(t.to_csv().starts_with("step,r_max,r_min,edge_density\n0,0,0,0\n"));
    }

    #[test]
    fn random_start_uses_requested_density() {
        let g = StartState::ErdosRenyi { p: 0.5 }.build(60, 4).unwrap();
        assert!((g.edge_density() - 0.5).abs() < 0.05);
        assert_eq!(g, StartState::ErdosRenyi { p: 0.5 }.build(60, 4).unwrap());
        assert!(StartState::Graph { graph: GraphState::empty(3) }.build(4, 0).is_err());
    }
}
