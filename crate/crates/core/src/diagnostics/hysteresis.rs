//! Chains from the empty and the complete graph, checked for crossings of
//! the density separating the two basins.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ChainState, Kernel};
use crate::error::{ErgmError, Result};
use crate::graph::GraphState;
use crate::model::ModelSpec;
use crate::phase::{classify, Phase};
use crate::rng::split_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HysteresisOptions {
    pub steps: u64,
    pub seeds: Vec<u64>,
    /// Density whose crossing is counted. Defaults to the repelling fixed
    /// point of a bistable model, or the unique fixed point otherwise.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub kernel: Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub seed: u64,
    pub final_density: f64,
    /// Step at which the density first reached the far side of the threshold.
    pub first_crossing: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisReport {
    pub n: usize,
    pub steps: u64,
    pub classification: Phase,
    pub warning: Option<String>,
    pub threshold: f64,
    pub from_empty: Vec<StartOutcome>,
    pub from_complete: Vec<StartOutcome>,
    pub mean_empty: f64,
    pub mean_complete: f64,
    pub pooled_sd: f64,
    /// `|mean_complete - mean_empty| / pooled_sd`; infinite when the pooled
    /// deviation is zero and the means differ.
    pub separation: f64,
    pub crossings: usize,
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    } else {
        0.0
    };
    (m, var)
}

fn run_one(
    inst: &Arc<crate::ModelInstance>,
    seed: u64,
    from_complete: bool,
    threshold_edges: f64,
    opts: &HysteresisOptions,
) -> Result<StartOutcome> {
    let n = inst.n();
    let (x0, stream) = if from_complete {
        (GraphState::complete(n), 1)
    } else {
        (GraphState::empty(n), 0)
    };
    let mut chain = ChainState::with_rng(inst.clone(), x0, split_rng(seed, stream))?;
    let mut first_crossing = None;
    for _ in 0..opts.steps {
        chain.step(opts.kernel);
        if first_crossing.is_none() {
            let m = chain.graph().edge_count() as f64;
            let crossed = if from_complete {
                m < threshold_edges
            } else {
                m > threshold_edges
            };
            if crossed {
                first_crossing = Some(chain.step_count());
            }
        }
    }
    Ok(StartOutcome {
        seed,
        final_density: chain.graph().edge_density(),
        first_crossing,
    })
}

/// Runs both starts for every seed, in parallel across seeds.
pub fn hysteresis_probe(model: &ModelSpec, n: usize, opts: &HysteresisOptions) -> Result<HysteresisReport> {
    if opts.seeds.is_empty() {
        return Err(ErgmError::InvalidArgument("seed list is empty".into()));
    }
    let phase = classify(model, 1e-12)?;
    let warning = (phase.classification != Phase::LowTemperature)
        .then(|| format!("model is {:?}, not LowTemperature", phase.classification));
    let threshold = match opts.threshold {
        Some(t) => t,
        None => match phase.bistable_roots() {
            Some((_, mid, _)) => mid,
            None => phase.fixed_points[phase.fixed_points.len() / 2].p_star,
        },
    };
    if !(0.0..=1.0).contains(&threshold) {
        return Err(ErgmError::ProbabilityOutOfRange(threshold));
    }
    let inst = Arc::new(model.bind(n)?);
    let threshold_edges = threshold * inst.pair_count() as f64;
    let jobs: Vec<(u64, bool)> = opts
        .seeds
        .iter()
        .flat_map(|&s| [(s, false), (s, true)])
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(seed, complete)| run_one(&inst, seed, complete, threshold_edges, opts))
        .collect::<Result<Vec<_>>>()?;
    let from_empty: Vec<StartOutcome> = outcomes.iter().step_by(2).copied().collect();
    let from_complete: Vec<StartOutcome> = outcomes.iter().skip(1).step_by(2).copied().collect();
    let dens = |v: &[StartOutcome]| v.iter().map(|o| o.final_density).collect::<Vec<_>>();
    let (mean_empty, var_empty) = mean_var(&dens(&from_empty));
    let (mean_complete, var_complete) = mean_var(&dens(&from_complete));
    let pooled_sd = (0.5 * (var_empty + var_complete)).sqrt();
    let gap = (mean_complete - mean_empty).abs();
    let separation = if pooled_sd > 0.0 {
        gap / pooled_sd
    } else if gap > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let crossings = outcomes.iter().filter(|o| o.first_crossing.is_some()).count();
    Ok(HysteresisReport {
        n,
        steps: opts.steps,
        classification: phase.classification,
        warning,
        threshold,
        from_empty,
        from_complete,
        mean_empty,
        mean_complete,
        pooled_sd,
        separation,
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_temperature_starts_agree() {
        let m = ModelSpec::edge_triangle(-0.2, 0.2).unwrap();
        let opts = HysteresisOptions {
            steps: 40_000,
            seeds: (0..6).collect(),
            threshold: None,
            kernel: Kernel::Glauber,
        };
        let r = hysteresis_probe(&m, 20, &opts).unwrap();
        assert_eq!(r.classification, Phase::HighTemperature);
        assert!(r.warning.is_some());
        assert!((r.mean_empty - r.mean_complete).abs() < 0.05);
        assert_eq!(r.from_empty.len(), 6);
        assert_eq!(r.from_complete[3].seed, 3);
    }

    #[test]
    fn bistable_starts_separate() {
        let m = ModelSpec::edge_triangle(-1.5, 1.5).unwrap();
        let opts = HysteresisOptions {
            steps: 200_000,
            seeds: vec![1, 2, 3],
            threshold: None,
            kernel: Kernel::Glauber,
        };
        let r = hysteresis_probe(&m, 32, &opts).unwrap();
        assert_eq!(r.classification, Phase::LowTemperature);
        assert!(r.warning.is_none());
        assert!(r.mean_complete - r.mean_empty > 0.5);
        assert_eq!(r.crossings, 0);
    }
}
