//! Experiment drivers. Each one writes its artifacts through an
//! [`ArtifactWriter`]; results never depend on thread count or completion
//! order.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use ergm_core::diagnostics::{
    burn_in_trace, exact_independence, hysteresis_probe, independence_test, pseudo_random_check, resolve_p_star,
    BurnInOptions, HysteresisOptions, IndependenceOptions,
};
use ergm_core::dynamics::run_trace;
use ergm_core::phase::{classify_with, phase_sweep, PhaseOptions};
use ergm_core::{
    coupling_time, default_max_steps, exact_distribution, phi, phi_prime, split_rng, ChainState, CouplingResult,
    GraphState, ModelSpec, StateHistogram,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{edge_ids, Experiment, ExperimentConfig, GraphSource};
use crate::fit::{fit_mixing_scaling, scaling_rows};
use crate::output::{csv_field, ArtifactWriter, Manifest};

/// Runs `cfg` and writes every artifact plus `manifest.json` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Manifest> {
    let seeds = cfg.seeds.seeds();
    let mut w = ArtifactWriter::new(out_dir, &cfg.canonical_json(), seeds.clone())?;
    let m = &cfg.model;
    match &cfg.experiment {
        Experiment::Phase { tol, critical_margin, grid, curve_points } => {
            let opts = PhaseOptions { tol: *tol, grid: *grid, critical_margin: *critical_margin };
            let report = classify_with(m, &opts)?;
            w.json("phase.json", &report)?;
            if let Some(k) = curve_points {
                let k = (*k).max(2);
                let mut csv = String::from("p,phi,phi_prime\n");
                for i in 0..k {
                    let p = i as f64 / (k - 1) as f64;
                    let _ = writeln!(csv, "{p},{},{}", phi(m, p)?, phi_prime(m, p)?);
                }
                w.csv("phase_curve.csv", &csv)?;
            }
        }
        Experiment::PhaseSweep { x, y, tol, critical_margin, grid } => {
            let opts = PhaseOptions { tol: *tol, grid: *grid, critical_margin: *critical_margin };
            let rows = phase_sweep(m, x, y.as_ref(), &opts)?;
            let mut csv = String::new();
            for j in 0..m.betas().len() {
                let _ = write!(csv, "beta{},", j + 1);
            }
            csv.push_str("classification,fixed_points,p_stars\n");
            for r in &rows {
                for b in &r.betas {
                    let _ = write!(csv, "{b},");
                }
                let ps: Vec<String> = r.fixed_points.iter().map(|f| f.p_star.to_string()).collect();
                let _ = writeln!(
                    csv,
                    "{:?},{},{}",
                    r.classification,
                    r.fixed_points.len(),
                    csv_field(&ps.join(";"))
                );
            }
            w.csv("phase_sweep.csv", &csv)?;
            w.json("phase_sweep.json", &rows)?;
        }
        Experiment::Sample { n, steps, thin, kernel, start, observables, extra_patterns } => {
            let inst = Arc::new(m.bind(*n)?);
            let results: Vec<(u64, GraphState, String)> = seeds
                .par_iter()
                .map(|&seed| -> Result<_> {
                    let x0 = start.build(*n, seed)?;
                    let mut chain = ChainState::new(inst.clone(), x0, seed)?;
                    let trace = run_trace(&mut chain, *steps, observables, *thin, *kernel, extra_patterns)?;
                    Ok((seed, chain.into_graph(), trace.to_csv()))
                })
                .collect::<Result<_>>()?;
            for (seed, graph, trace) in results {
                w.csv(&format!("trace_seed{seed}.csv"), &trace)?;
                w.text(&format!("final_seed{seed}.edges"), &graph.to_edge_list())?;
            }
        }
        Experiment::Couple { n, max_steps } => {
            let max = max_steps.unwrap_or_else(|| default_max_steps(*n));
            let results = couple_all(m, &[*n], &seeds, |_| max)?;
            for r in &results {
                w.json(&format!("couple_seed{}.json", r.seed), r)?;
            }
            w.csv("couple.csv", &coupling_csv(&results))?;
        }
        Experiment::MixScan { n_list, max_steps } => {
            let results = couple_all(m, n_list, &seeds, |n| max_steps.unwrap_or_else(|| default_max_steps(n)))?;
            w.csv("mix_scan.csv", &coupling_csv(&results))?;
            let rows = scaling_rows(&results);
            #[derive(Serialize)]
            struct ScanSummary {
                rows: Vec<crate::fit::ScalingRow>,
                fit: Option<crate::fit::MixingScalingFit>,
                fit_error: Option<String>,
            }
            let (fit, fit_error) = match fit_mixing_scaling(&rows) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            w.json("mix_scan_fit.json", &ScanSummary { rows, fit, fit_error })?;
        }
        Experiment::DiagBurnIn { n, steps, thin, start, epsilon, extra_patterns, p_star } => {
            let opts = BurnInOptions {
                steps: *steps,
                thin: *thin,
                epsilon: *epsilon,
                extra_patterns: extra_patterns.clone(),
                p_star: *p_star,
                kernel: Default::default(),
            };
            let traces = seeds
                .par_iter()
                .map(|&seed| burn_in_trace(m, *n, start, &opts, seed))
                .collect::<ergm_core::Result<Vec<_>>>()?;
            for t in &traces {
                w.csv(&format!("burn_in_seed{}.csv", t.seed), &t.to_csv())?;
            }
            #[derive(Serialize)]
            struct Summary {
                seed: u64,
                p_star: f64,
                epsilon: f64,
                entered_at: Option<u64>,
                patterns: Vec<String>,
            }
            let summary: Vec<Summary> = traces
                .iter()
                .map(|t| Summary {
                    seed: t.seed,
                    p_star: t.p_star,
                    epsilon: t.epsilon,
                    entered_at: t.entered_at,
                    patterns: t.patterns.clone(),
                })
                .collect();
            w.json("burn_in.json", &summary)?;
        }
        Experiment::DiagIndependence { n, edge_sets, samples, gap_steps, burn_in_steps, p_star, exact_n } => {
            let opts = IndependenceOptions {
                samples: *samples,
                gap_steps: *gap_steps,
                burn_in_steps: *burn_in_steps,
                p_star: *p_star,
                kernel: Default::default(),
            };
            let sets = edge_sets
                .iter()
                .map(|s| edge_ids(*n, s).map_err(anyhow::Error::msg))
                .collect::<Result<Vec<_>>>()?;
            let per_seed = seeds
                .par_iter()
                .map(|&seed| independence_test(m, *n, &sets, &opts, seed).map(|r| (seed, r)))
                .collect::<ergm_core::Result<Vec<_>>>()?;
            let exact = match exact_n {
                Some(k) => {
                    let d = exact_distribution(m, *k)?;
                    let reports = edge_sets
                        .iter()
                        .map(|s| exact_independence(&d, &edge_ids(*k, s).map_err(anyhow::Error::msg)?).map_err(Into::into))
                        .collect::<Result<Vec<_>>>()?;
                    Some(reports)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct SeedReports {
                seed: u64,
                reports: Vec<ergm_core::diagnostics::IndependenceReport>,
            }
            #[derive(Serialize)]
            struct Out {
                sampled: Vec<SeedReports>,
                exact: Option<Vec<ergm_core::diagnostics::IndependenceReport>>,
            }
            let mut csv = String::from("seed,tuple,pattern,frequency,reference\n");
            for (seed, reports) in &per_seed {
                for (t, r) in reports.iter().enumerate() {
                    for (a, (f, q)) in r.frequencies.iter().zip(&r.reference).enumerate() {
                        let _ = writeln!(csv, "{seed},{t},{a},{f},{q}");
                    }
                }
            }
            w.csv("independence.csv", &csv)?;
            let sampled = per_seed.into_iter().map(|(seed, reports)| SeedReports { seed, reports }).collect();
            w.json("independence.json", &Out { sampled, exact })?;
        }
        Experiment::DiagHysteresis { n, steps, threshold } => {
            let opts = HysteresisOptions { steps: *steps, seeds: seeds.clone(), threshold: *threshold, kernel: Default::default() };
            let report = hysteresis_probe(m, *n, &opts)?;
            let mut csv = String::from("seed,start,final_density,first_crossing\n");
            for (label, outs) in [("empty", &report.from_empty), ("complete", &report.from_complete)] {
                for o in outs {
                    let crossing = o.first_crossing.map(|s| s.to_string()).unwrap_or_default();
                    let _ = writeln!(csv, "{},{label},{},{crossing}", o.seed, o.final_density);
                }
            }
            w.csv("hysteresis.csv", &csv)?;
            w.json("hysteresis.json", &report)?;
        }
        Experiment::DiagPseudo { n, graph, p, options } => {
            let p_ref = match p {
                Some(p) => *p,
                None => resolve_p_star(m, None)?,
            };
            let reports = seeds
                .par_iter()
                .map(|&seed| -> Result<_> {
                    let x = build_graph(m, *n, graph, seed)?;
                    let mut o = options.clone();
                    o.seed = seed;
                    Ok((seed, pseudo_random_check(&x, p_ref, &o)?))
                })
                .collect::<Result<Vec<_>>>()?;
            #[derive(Serialize)]
            struct SeedReport {
                seed: u64,
                report: ergm_core::diagnostics::PseudoRandomReport,
            }
            let out: Vec<SeedReport> = reports.into_iter().map(|(seed, report)| SeedReport { seed, report }).collect();
            w.json("pseudo.json", &out)?;
        }
        Experiment::ExactCompare { n, steps, thin, kernel } => {
            let d = exact_distribution(m, *n)?;
            w.csv("exact_distribution.csv", &d.to_csv())?;
            let inst = Arc::new(m.bind(*n)?);
            let tvs = seeds
                .par_iter()
                .map(|&seed| -> Result<(u64, f64)> {
                    let mut chain = ChainState::new(inst.clone(), GraphState::empty(*n), seed)?;
                    let mut h = StateHistogram::new(*n)?;
                    for _ in 0..steps / thin {
                        chain.run(*thin, *kernel);
                        h.record(chain.graph());
                    }
                    Ok((seed, d.tv_distance(&h)?))
                })
                .collect::<Result<Vec<_>>>()?;
            #[derive(Serialize)]
            struct Tv {
                seed: u64,
                tv_distance: f64,
            }
            #[derive(Serialize)]
            struct Out {
                n: usize,
                log_partition_function: f64,
                samples_per_seed: u64,
                runs: Vec<Tv>,
            }
            w.json(
                "exact_compare.json",
                &Out {
                    n: *n,
                    log_partition_function: d.log_z(),
                    samples_per_seed: steps / thin,
                    runs: tvs.into_iter().map(|(seed, tv_distance)| Tv { seed, tv_distance }).collect(),
                },
            )?;
        }
    }
    w.finish(cfg.experiment.command())
}

fn build_graph(m: &ModelSpec, n: usize, source: &GraphSource, seed: u64) -> Result<GraphState> {
    Ok(match source {
        GraphSource::Sample { steps } => {
            let inst = Arc::new(m.bind(n)?);
            let mut chain = ChainState::new(inst, GraphState::empty(n), seed)?;
            chain.run(*steps, Default::default());
            chain.into_graph()
        }
        GraphSource::ErdosRenyi { p } => GraphState::erdos_renyi(n, *p, &mut split_rng(seed, 1)),
        GraphSource::CompleteBipartite => GraphState::complete_bipartite_halves(n),
        GraphSource::File { path } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read graph file {path}"))?;
            let g = GraphState::parse_edge_list(&text)?;
            anyhow::ensure!(g.n() == n, "graph file has n = {}, config says {n}", g.n());
            g
        }
    })
}

/// Coupling times for every `(n, seed)`, ordered by `n` then seed.
pub fn couple_all(
    m: &ModelSpec,
    n_list: &[usize],
    seeds: &[u64],
    max_steps: impl Fn(usize) -> u64 + Sync,
) -> Result<Vec<CouplingResult>> {
    let jobs: Vec<(usize, u64)> = n_list.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    Ok(jobs
        .par_iter()
        .map(|&(n, seed)| coupling_time(m, n, max_steps(n), seed))
        .collect::<ergm_core::Result<Vec<_>>>()?)
}

fn coupling_csv(results: &[CouplingResult]) -> String {
    let mut csv = String::from("n,seed,steps,timeout\n");
    for r in results {
        let steps = r.coalescence_step.unwrap_or(r.max_steps);
        let _ = writeln!(csv, "{},{},{steps},{}", r.n, r.seed, r.timeout);
    }
    csv
}
