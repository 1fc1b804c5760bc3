//! Single-edge Markov chains on graphs and their monotone coupling.
//!
//! Every step draws exactly one edge index and then one uniform in `[0, 1)`,
//! whatever the kernel and whether or not the state changes. Two chains fed
//! from the same generator therefore stay in lock step.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counts::r_extremes;
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, GraphState};
use crate::model::{sigmoid, ModelInstance, ModelSpec};
use crate::pattern::SubgraphPattern;
use crate::rng::{seeded_rng, ChainRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Heat bath: `x_e ← [u < σ(∂_e H)]`.
    #[default]
    Glauber,
    /// Flip `x_e` when `u < exp(±∂_e H)`.
    Metropolis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub edge: EdgeId,
    pub uniform: f64,
    pub changed: bool,
}

#[inline]
fn draw(rng: &mut ChainRng, pairs: usize) -> (usize, f64) {
    let k = rng.random_range(0..pairs);
    let u = rng.random::<f64>();
    (k, u)
}

/// A single chain `X(t)`.
#[derive(Debug, Clone)]
pub struct ChainState {
    graph: GraphState,
    model: Arc<ModelInstance>,
    step_count: u64,
    rng: ChainRng,
}

impl ChainState {
    pub fn new(model: Arc<ModelInstance>, graph: GraphState, seed: u64) -> Result<Self> {
        Self::with_rng(model, graph, seeded_rng(seed))
    }

    pub fn with_rng(model: Arc<ModelInstance>, graph: GraphState, rng: ChainRng) -> Result<Self> {
        if graph.n() != model.n() {
            return Err(ErgmError::MismatchedSize {
                left: graph.n(),
                right: model.n(),
            });
        }
        Ok(Self {
            graph,
            model,
            step_count: 0,
            rng,
        })
    }

    pub fn graph(&self) -> &GraphState {
        &self.graph
    }

    pub fn model(&self) -> &ModelInstance {
        &self.model
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn rng(&self) -> &ChainRng {
        &self.rng
    }

    pub fn into_graph(self) -> GraphState {
        self.graph
    }

    pub fn glauber_step(&mut self) -> StepOutcome {
        let (k, u) = draw(&mut self.rng, self.model.pair_count());
        let e = self.model.edge_at(k);
        let on = u < sigmoid(self.model.field_unchecked(&self.graph, e));
        self.step_count += 1;
        StepOutcome {
            edge: e,
            uniform: u,
            changed: self.graph.set(e, on),
        }
    }

    pub fn metropolis_step(&mut self) -> StepOutcome {
        let (k, u) = draw(&mut self.rng, self.model.pair_count());
        let e = self.model.edge_at(k);
        let field = self.model.field_unchecked(&self.graph, e);
        let delta = if self.graph.has(e) { -field } else { field };
        let accept = u < delta.exp();
        if accept {
            self.graph.flip(e);
        }
        self.step_count += 1;
        StepOutcome {
            edge: e,
            uniform: u,
            changed: accept,
        }
    }

    #[inline]
    pub fn step(&mut self, kernel: Kernel) -> StepOutcome {
        match kernel {
            Kernel::Glauber => self.glauber_step(),
            Kernel::Metropolis => self.metropolis_step(),
        }
    }

    pub fn run(&mut self, steps: u64, kernel: Kernel) {
        for _ in 0..steps {
            self.step(kernel);
        }
    }
}

/// Two Glauber chains driven by shared randomness, `lower ≤ upper`.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    upper: GraphState,
    lower: GraphState,
    model: Arc<ModelInstance>,
    rng: ChainRng,
    step_count: u64,
    hamming: usize,
    coupled_at: Option<u64>,
}

impl CoupledPair {
    pub fn new(model: Arc<ModelInstance>, upper: GraphState, lower: GraphState, seed: u64) -> Result<Self> {
        for g in [&upper, &lower] {
            if g.n() != model.n() {
                return Err(ErgmError::MismatchedSize {
                    left: g.n(),
                    right: model.n(),
                });
            }
        }
        if !lower.is_subconfiguration(&upper)? {
            return Err(ErgmError::InvalidArgument(
                "lower graph must be a subgraph of the upper graph".into(),
            ));
        }
        let hamming = upper.hamming_distance(&lower)?;
        Ok(Self {
            upper,
            lower,
            model,
            rng: seeded_rng(seed),
            step_count: 0,
            hamming,
            coupled_at: (hamming == 0).then_some(0),
        })
    }

    /// Chains started from the complete and the empty graph.
    pub fn extremal(model: Arc<ModelInstance>, seed: u64) -> Result<Self> {
        let n = model.n();
        Self::new(model, GraphState::complete(n), GraphState::empty(n), seed)
    }

    pub fn upper(&self) -> &GraphState {
        &self.upper
    }

    pub fn lower(&self) -> &GraphState {
        &self.lower
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Current Hamming distance between the chains.
    pub fn distance(&self) -> usize {
        self.hamming
    }

    /// First step at which the chains agreed.
    pub fn coupled_at(&self) -> Option<u64> {
        self.coupled_at
    }

    /// One shared-randomness Glauber step. Fails if the new states are not
    /// ordered, which can only happen for a model with a repulsive term.
    pub fn coupled_step(&mut self) -> Result<StepOutcome> {
        let (k, u) = draw(&mut self.rng, self.model.pair_count());
        let e = self.model.edge_at(k);
        self.step_count += 1;
        let field_u = self.model.field_unchecked(&self.upper, e);
        let (on_u, on_l) = if self.hamming == 0 {
            let on = u < sigmoid(field_u);
            (on, on)
        } else {
            let field_l = self.model.field_unchecked(&self.lower, e);
            (u < sigmoid(field_u), u < sigmoid(field_l))
        };
        if on_l && !on_u {
            return Err(ErgmError::OrderViolation {
                step: self.step_count,
                edge: e.index(),
            });
        }
        let differed = self.upper.has(e) != self.lower.has(e);
        let changed_u = self.upper.set(e, on_u);
        let changed_l = self.lower.set(e, on_l);
        let differs = on_u != on_l;
        match (differed, differs) {
            (true, false) => self.hamming -= 1,
            (false, true) => self.hamming += 1,
            _ => {}
        }
        if self.hamming == 0 && self.coupled_at.is_none() {
            self.coupled_at = Some(self.step_count);
        }
        Ok(StepOutcome {
            edge: e,
            uniform: u,
            changed: changed_u || changed_l,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingResult {
    pub n: usize,
    /// `None` on timeout.
    pub coalescence_step: Option<u64>,
    pub timeout: bool,
    pub max_steps: u64,
    pub seed: u64,
}

/// `⌈50 n² ln n⌉`.
pub fn default_max_steps(n: usize) -> u64 {
    let n = n as f64;
    (50.0 * n * n * n.ln()).ceil().max(1.0) as u64
}

/// Runs the coupled pair from (complete, empty) until the graphs agree or
/// `max_steps` steps have been taken.
pub fn coupling_time(model: &ModelSpec, n: usize, max_steps: u64, seed: u64) -> Result<CouplingResult> {
    if max_steps == 0 {
        return Err(ErgmError::InvalidArgument("max_steps must be at least 1".into()));
    }
    let inst = Arc::new(model.bind(n)?);
    let mut pair = CoupledPair::extremal(inst, seed)?;
    while pair.coupled_at().is_none() && pair.step_count() < max_steps {
        pair.coupled_step()?;
    }
    let coalescence_step = pair.coupled_at();
    Ok(CouplingResult {
        n,
        coalescence_step,
        timeout: coalescence_step.is_none(),
        max_steps,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    EdgeDensity,
    EdgeCount,
    Hamiltonian,
    /// Largest `r_G(X, e)` over all pairs and tracked patterns.
    RMax,
    /// Smallest `r_G(X, e)` over all pairs and tracked patterns.
    RMin,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Self::EdgeDensity => "edge_density",
            Self::EdgeCount => "edge_count",
            Self::Hamiltonian => "hamiltonian",
            Self::RMax => "r_max",
            Self::RMin => "r_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub observables: Vec<Observable>,
    pub steps: Vec<u64>,
    /// One row per recorded step, columns in `observables` order.
    pub values: Vec<Vec<f64>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn column(&self, o: Observable) -> Option<Vec<f64>> {
        let j = self.observables.iter().position(|&p| p == o)?;
        Some(self.values.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for o in &self.observables {
            out.push(',');
            out.push_str(o.name());
        }
        out.push('\n');
        for (s, row) in self.steps.iter().zip(&self.values) {
            let _ = write!(out, "{s}");
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Patterns whose `r` statistic is tracked for a model: those with at least
/// two edges, followed by `extra`.
pub fn r_patterns(model: &ModelSpec, extra: &[SubgraphPattern]) -> Result<Vec<SubgraphPattern>> {
    if let Some(g) = extra.iter().find(|g| g.edge_count() < 2) {
        return Err(ErgmError::RStatisticUndefined(g.name().to_string()));
    }
    let mut out: Vec<SubgraphPattern> = model
        .patterns()
        .iter()
        .filter(|g| g.edge_count() >= 2)
        .cloned()
        .collect();
    for g in extra {
        if !out.iter().any(|h| h.canonical_mask() == g.canonical_mask() && h.vertex_count() == g.vertex_count()) {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Advances `chain` by `steps`, recording observables at the start and after
/// every `thin` steps: `floor(steps / thin) + 1` rows.
pub fn run_trace(
    chain: &mut ChainState,
    steps: u64,
    observables: &[Observable],
    thin: u64,
    kernel: Kernel,
    extra_patterns: &[SubgraphPattern],
) -> Result<Trace> {
    if thin == 0 {
        return Err(ErgmError::InvalidArgument("thin must be at least 1".into()));
    }
    let needs_r = observables
        .iter()
        .any(|o| matches!(o, Observable::RMax | Observable::RMin));
    let patterns = if needs_r {
        let p = r_patterns(chain.model().spec(), extra_patterns)?;
        if p.is_empty() {
            return Err(ErgmError::RStatisticUndefined(
                "model has no pattern with two or more edges".into(),
            ));
        }
        p
    } else {
        Vec::new()
    };
    let record = |chain: &ChainState| -> Result<Vec<f64>> {
        let x = chain.graph();
        let r = if needs_r { Some(r_extremes(x, &patterns)?) } else { None };
        observables
            .iter()
            .map(|o| {
                Ok(match o {
                    Observable::EdgeDensity => x.edge_density(),
                    Observable::EdgeCount => x.edge_count() as f64,
                    Observable::Hamiltonian => chain.model().hamiltonian(x)?,
                    Observable::RMax => r.expect("computed").0,
                    Observable::RMin => r.expect("computed").1,
                })
            })
            .collect()
    };
    let rows = steps / thin;
    let mut trace = Trace {
        observables: observables.to_vec(),
        steps: Vec::with_capacity(rows as usize + 1),
        values: Vec::with_capacity(rows as usize + 1),
    };
    trace.steps.push(chain.step_count());
    trace.values.push(record(chain)?);
    for _ in 0..rows {
        chain.run(thin, kernel);
        trace.steps.push(chain.step_count());
        trace.values.push(record(chain)?);
    }
    chain.run(steps - rows * thin, kernel);
    Ok(trace)
}
