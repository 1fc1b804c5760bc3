//! Labeled subgraph counts.
//!
//! All counts range over ordered tuples of distinct host vertices
//! `(v_1, ..., v_m)` such that every pattern edge `(i, j)` maps to a present
//! host edge `(v_i, v_j)`. Extra host edges are allowed, except for the
//! induced count. A pattern with `k` automorphisms is therefore counted `k`
//! times per unlabeled copy; dividing a model parameter by `k` converts to
//! the unlabeled convention.
//!
//! The per-edge count `N_G(X, e)` counts tuples in which `e` is the image of
//! some pattern edge, with all pattern edges present in `X ∪ {e}`; it is the
//! jump `N_G(X_{e+}) - N_G(X_{e-})` and does not depend on `x_e`.

use crate::error::{ErgmError, Result};
use crate::graph::{all_edges, EdgeId, GraphState};
use crate::pattern::{canonical_table, pair_index, Shape, SubgraphPattern, MAX_PATTERN_VERTICES};

/// A global count together with its `n^{|V|-2}` normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub pattern: SubgraphPattern,
    pub value: u64,
    /// `n^{|V|-2}` as an exact integer.
    pub normalizer: u64,
    /// `value / normalizer`.
    pub normalized: f64,
}

impl CountReport {
    pub fn new(x: &GraphState, g: &SubgraphPattern) -> Result<Self> {
        let value = count_global(x, g)?;
        let normalizer = (x.n() as u64).pow(g.vertex_count() as u32 - 2);
        Ok(Self {
            pattern: g.clone(),
            value,
            normalizer,
            normalized: value as f64 / normalizer as f64,
        })
    }
}

fn check_fits(x: &GraphState, g: &SubgraphPattern) -> Result<()> {
    if g.vertex_count() > x.n() {
        return Err(ErgmError::PatternTooLarge {
            pattern: g.name().to_string(),
            pattern_vertices: g.vertex_count(),
            n: x.n(),
        });
    }
    Ok(())
}

/// `N_G(X)`.
pub fn count_global(x: &GraphState, g: &SubgraphPattern) -> Result<u64> {
    check_fits(x, g)?;
    let n = x.n();
    Ok(match g.shape() {
        Shape::Edge => 2 * x.edge_count() as u64,
        Shape::TwoStar => (0..n)
            .map(|v| {
                let d = x.degree_zero_based(v) as u64;
                d * d.saturating_sub(1)
            })
            .sum(),
        Shape::Triangle => {
            let mut s = 0u64;
            for e in x.edges() {
                s += x.codegree(e.lo(), e.hi()) as u64;
            }
            2 * s
        }
        Shape::General => Search::new(Host::plain(x), g, false).run(&[]),
    })
}

/// `N_G(X, e)`.
pub fn count_at_edge(x: &GraphState, g: &SubgraphPattern, e: EdgeId) -> Result<u64> {
    check_fits(x, g)?;
    check_edge(x, e)?;
    Ok(at_edge_unchecked(x, g, e))
}

/// Hot-path variant for callers that already validated sizes.
#[inline]
pub(crate) fn at_edge_unchecked(x: &GraphState, g: &SubgraphPattern, e: EdgeId) -> u64 {
    let (a, b) = (e.lo(), e.hi());
    match g.shape() {
        Shape::Edge => 2,
        Shape::Triangle => 6 * x.codegree(a, b) as u64,
        Shape::TwoStar => {
            let present = x.has_zero_based(a, b) as usize;
            let da = x.degree_zero_based(a) - present;
            let db = x.degree_zero_based(b) - present;
            2 * (da + db) as u64
        }
        Shape::General => {
            let mut search = Search::new(Host::with_extra(x, &[(a, b)]), g, false);
            let mut total = 0;
            for &(i, j) in g.edges() {
                let (p, q) = (i - 1, j - 1);
                total += search.run(&[(p, a), (q, b)]);
                total += search.run(&[(p, b), (q, a)]);
            }
            total
        }
    }
}

/// `N_G(X, e, e')`: tuples in which both `e` and `e'` are images of pattern
/// edges and every pattern edge is present in `X ∪ {e, e'}`. Vertex-disjoint
/// edges need a pattern with at least four vertices, otherwise the count is 0.
pub fn count_at_edge_pair(x: &GraphState, g: &SubgraphPattern, e: EdgeId, e2: EdgeId) -> Result<u64> {
    check_fits(x, g)?;
    check_edge(x, e)?;
    check_edge(x, e2)?;
    if e == e2 {
        return Err(ErgmError::IdenticalEdges);
    }
    let host_edges = [(e.lo(), e.hi()), (e2.lo(), e2.hi())];
    let mut search = Search::new(Host::with_extra(x, &host_edges), g, false);
    let mut total = 0;
    for (ka, &(i, j)) in g.edges().iter().enumerate() {
        for (kb, &(k, l)) in g.edges().iter().enumerate() {
            if ka == kb {
                continue;
            }
            for (a, b) in [(e.lo(), e.hi()), (e.hi(), e.lo())] {
                for (c, d) in [(e2.lo(), e2.hi()), (e2.hi(), e2.lo())] {
                    let pre = [(i - 1, a), (j - 1, b), (k - 1, c), (l - 1, d)];
                    if let Some(merged) = merge_assignment(&pre) {
                        total += search.run(&merged);
                    }
                }
            }
        }
    }
    Ok(total)
}

/// `N*_G(X)`: labeled copies whose induced subgraph equals `G` exactly.
pub fn count_induced_global(x: &GraphState, g: &SubgraphPattern) -> Result<u64> {
    check_fits(x, g)?;
    Ok(match g.shape() {
        Shape::Edge => 2 * x.edge_count() as u64,
        _ => Search::new(Host::plain(x), g, true).run(&[]),
    })
}

/// `N_G(K_n) = C(n, |V|) |V|!`.
pub fn complete_graph_count(n: usize, g: &SubgraphPattern) -> Result<u64> {
    if g.vertex_count() > n {
        return Err(ErgmError::PatternTooLarge {
            pattern: g.name().to_string(),
            pattern_vertices: g.vertex_count(),
            n,
        });
    }
    Ok(falling(n as u64, g.vertex_count() as u64))
}

/// `N_G(K_n, e) = 2|E| C(n-2, |V|-2) (|V|-2)!`.
pub fn complete_graph_count_at_edge(n: usize, g: &SubgraphPattern) -> Result<u64> {
    complete_graph_count(n, g)?;
    Ok(2 * g.edge_count() as u64 * falling(n as u64 - 2, g.vertex_count() as u64 - 2))
}

fn falling(n: u64, k: u64) -> u64 {
    (0..k).map(|i| n - i).product()
}

/// `r_G(X, e) = (N_G(X, e) / (2|E| n^{|V|-2}))^{1/(|E|-1)}`, defined for `|E| >= 2`.
pub fn r_statistic(x: &GraphState, g: &SubgraphPattern, e: EdgeId) -> Result<f64> {
    if g.edge_count() < 2 {
        return Err(ErgmError::RStatisticUndefined(g.name().to_string()));
    }
    let count = count_at_edge(x, g, e)?;
    Ok(r_from_count(x.n(), g, count))
}

#[inline]
fn r_from_count(n: usize, g: &SubgraphPattern, count: u64) -> f64 {
    let norm = 2.0 * g.edge_count() as f64 * (n as f64).powi(g.vertex_count() as i32 - 2);
    (count as f64 / norm).powf(1.0 / (g.edge_count() as f64 - 1.0))
}

/// `(max, min)` of `r_G(X, e)` over all `C(n, 2)` pairs `e` and all patterns.
pub fn r_extremes(x: &GraphState, patterns: &[SubgraphPattern]) -> Result<(f64, f64)> {
    if patterns.is_empty() {
        return Err(ErgmError::EmptyPatternList);
    }
    for g in patterns {
        if g.edge_count() < 2 {
            return Err(ErgmError::RStatisticUndefined(g.name().to_string()));
        }
        check_fits(x, g)?;
    }
    if x.pair_count() == 0 {
        return Err(ErgmError::TooFewVertices { min: 2, got: x.n() });
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for g in patterns {
        // r is monotone in the count, so track integer extremes first.
        let (mut cmax, mut cmin) = (0u64, u64::MAX);
        for e in all_edges(x.n()) {
            let c = at_edge_unchecked(x, g, e);
            cmax = cmax.max(c);
            cmin = cmin.min(c);
        }
        hi = hi.max(r_from_count(x.n(), g, cmax));
        lo = lo.min(r_from_count(x.n(), g, cmin));
    }
    Ok((hi, lo))
}

/// Number of `l`-vertex subsets of `X` in each isomorphism class of induced
/// subgraph, keyed by canonical mask (see `SubgraphPattern::canonical_mask`).
#[derive(Debug, Clone)]
pub struct InducedCensus {
    pub order: usize,
    classes: Vec<(u64, u64)>,
}

impl InducedCensus {
    /// Number of `order`-subsets inducing a graph isomorphic to `g`.
    pub fn subsets(&self, g: &SubgraphPattern) -> u64 {
        let key = g.canonical_mask();
        self.classes
            .iter()
            .find(|(m, _)| *m == key)
            .map_or(0, |&(_, c)| c)
    }

    /// `N*_G(X) = |Aut(G)| * subsets(G)`.
    pub fn induced_count(&self, g: &SubgraphPattern) -> u64 {
        g.automorphism_count() as u64 * self.subsets(g)
    }

    pub fn classes(&self) -> &[(u64, u64)] {
        &self.classes
    }
}

/// Classifies every `l`-subset of vertices, `2 <= l <= 6`.
pub fn induced_census(x: &GraphState, l: usize) -> Result<InducedCensus> {
    if !(2..=6).contains(&l) {
        return Err(ErgmError::InvalidArgument(format!(
            "induced census supports 2..=6 vertices, got {l}"
        )));
    }
    if l > x.n() {
        return Err(ErgmError::InvalidArgument(format!(
            "census order {l} exceeds n = {}",
            x.n()
        )));
    }
    let table = canonical_table(l);
    let mut tally = vec![0u64; table.len()];
    let mut chosen = [0usize; 6];

    fn rec(
        x: &GraphState,
        l: usize,
        depth: usize,
        start: usize,
        mask: usize,
        chosen: &mut [usize; 6],
        tally: &mut [u64],
    ) {
        if depth == l {
            tally[mask] += 1;
            return;
        }
        for v in start..=x.n() - (l - depth) {
            let mut m = mask;
            for (k, &u) in chosen[..depth].iter().enumerate() {
                if x.has_zero_based(u, v) {
                    m |= 1 << pair_index(l, k, depth);
                }
            }
            chosen[depth] = v;
            rec(x, l, depth + 1, v + 1, m, chosen, tally);
        }
    }
    rec(x, l, 0, 0, 0, &mut chosen, &mut tally);

    let mut by_class = std::collections::BTreeMap::new();
    for (mask, &c) in tally.iter().enumerate() {
        if c > 0 {
            *by_class.entry(table[mask] as u64).or_insert(0u64) += c;
        }
    }
    Ok(InducedCensus {
        order: l,
        classes: by_class.into_iter().collect(),
    })
}

/// Ordered count of 4-cycles, `Σ_{a≠c} codeg(a,c)(codeg(a,c)-1)`; equals
/// `count_global(X, C_4)`.
pub fn count_four_cycles(x: &GraphState) -> u64 {
    let mut total = 0u64;
    for a in 0..x.n() {
        for c in a + 1..x.n() {
            let d = x.codegree(a, c) as u64;
            total += d * d.saturating_sub(1);
        }
    }
    2 * total
}

fn check_edge(x: &GraphState, e: EdgeId) -> Result<()> {
    if e.hi() >= x.n() {
        return Err(ErgmError::VertexOutOfRange {
            vertex: e.hi() + 1,
            n: x.n(),
        });
    }
    Ok(())
}

/// Combines pattern-vertex → host-vertex pins, rejecting contradictions and
/// non-injective maps.
fn merge_assignment(pre: &[(usize, usize)]) -> Option<Vec<(usize, usize)>> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(pre.len());
    for &(p, h) in pre {
        match out.iter().find(|&&(q, _)| q == p) {
            Some(&(_, h2)) if h2 != h => return None,
            Some(_) => {}
            None => {
                if out.iter().any(|&(_, h2)| h2 == h) {
                    return None;
                }
                out.push((p, h));
            }
        }
    }
    Some(out)
}

/// Host graph, optionally with up to two edges forced present.
struct Host<'a> {
    g: &'a GraphState,
    extra: [(usize, usize); 2],
    n_extra: usize,
}

impl<'a> Host<'a> {
    fn plain(g: &'a GraphState) -> Self {
        Self {
            g,
            extra: [(0, 0); 2],
            n_extra: 0,
        }
    }

    fn with_extra(g: &'a GraphState, edges: &[(usize, usize)]) -> Self {
        let mut h = Self::plain(g);
        for &e in edges {
            h.extra[h.n_extra] = e;
            h.n_extra += 1;
        }
        h
    }

    #[inline]
    fn has(&self, u: usize, v: usize) -> bool {
        self.g.has_zero_based(u, v)
            || self.extra[..self.n_extra]
                .iter()
                .any(|&(a, b)| (a == u && b == v) || (a == v && b == u))
    }

    /// `acc &= N(v)` (or `acc &= !N(v)` when `negate`), extra edges included.
    #[inline]
    fn apply_row(&self, v: usize, acc: &mut [u64], negate: bool) {
        let row = self.g.row(v);
        let mut targets = [usize::MAX; 2];
        for (t, &(a, b)) in targets.iter_mut().zip(&self.extra[..self.n_extra]) {
            if a == v {
                *t = b;
            } else if b == v {
                *t = a;
            }
        }
        for (k, (w, &r)) in acc.iter_mut().zip(row).enumerate() {
            let mut r = r;
            for &t in &targets {
                if t != usize::MAX && t / 64 == k {
                    r |= 1 << (t % 64);
                }
            }
            if negate {
                *w &= !r;
            } else {
                *w &= r;
            }
        }
    }
}

/// Backtracking enumeration of injective maps from pattern vertices to host
/// vertices. Candidate sets are bitset intersections of the neighbourhoods
/// of already-placed pattern neighbours; the last vertex is counted by popcount.
struct Search<'a> {
    host: Host<'a>,
    adj: [u8; MAX_PATTERN_VERTICES],
    m: usize,
    induced: bool,
    words: usize,
    all: Vec<u64>,
    scratch: Vec<u64>,
    assign: [usize; MAX_PATTERN_VERTICES],
}

impl<'a> Search<'a> {
    fn new(host: Host<'a>, g: &SubgraphPattern, induced: bool) -> Self {
        let n = host.g.n();
        let words = host.g.words();
        let mut all = vec![u64::MAX; words];
        if !n.is_multiple_of(64) {
            all[words - 1] = (1u64 << (n % 64)) - 1;
        }
        Self {
            host,
            adj: *g.adjacency(),
            m: g.vertex_count(),
            induced,
            words,
            all,
            scratch: vec![0; words * (g.vertex_count() + 1)],
            assign: [usize::MAX; MAX_PATTERN_VERTICES],
        }
    }

    /// Counts completions of the pinned partial map `pre` (pattern vertex, host vertex).
    fn run(&mut self, pre: &[(usize, usize)]) -> u64 {
        let mut placed = 0u8;
        let mut used = self.all.iter().map(|_| 0u64).collect::<Vec<_>>();
        for &(p, h) in pre {
            self.assign[p] = h;
            placed |= 1 << p;
            used[h / 64] |= 1 << (h % 64);
        }
        // Constraints among the pinned vertices themselves.
        for &(p, hp) in pre {
            for &(q, hq) in pre {
                if p < q {
                    let edge = self.adj[p] >> q & 1 == 1;
                    let present = self.host.has(hp, hq);
                    if (edge && !present) || (self.induced && !edge && present) {
                        return 0;
                    }
                }
            }
        }
        if pre.len() == self.m {
            return 1;
        }
        self.rec(0, placed, &mut used)
    }

    fn rec(&mut self, depth: usize, placed: u8, used: &mut [u64]) -> u64 {
        let full: u8 = ((1u16 << self.m) - 1) as u8;
        // Most constrained unplaced pattern vertex.
        let w = (0..self.m)
            .filter(|&v| placed >> v & 1 == 0)
            .max_by_key(|&v| ((self.adj[v] & placed).count_ones(), std::cmp::Reverse(v)))
            .expect("an unplaced vertex");
        let base = depth * self.words;
        for k in 0..self.words {
            self.scratch[base + k] = self.all[k] & !used[k];
        }
        let nbrs = self.adj[w] & placed;
        for u in 0..self.m {
            if nbrs >> u & 1 == 1 {
                let h = self.assign[u];
                self.host
                    .apply_row(h, &mut self.scratch[base..base + self.words], false);
            } else if self.induced && placed >> u & 1 == 1 {
                let h = self.assign[u];
                self.host
                    .apply_row(h, &mut self.scratch[base..base + self.words], true);
            }
        }
        let placed_next = placed | 1 << w;
        if placed_next == full {
            return self.scratch[base..base + self.words]
                .iter()
                .map(|x| x.count_ones() as u64)
                .sum();
        }
        let mut total = 0;
        for k in 0..self.words {
            let mut bits = self.scratch[base + k];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let h = k * 64 + b;
                self.assign[w] = h;
                used[k] |= 1 << b;
                total += self.rec(depth + 1, placed_next, used);
                used[k] &= !(1 << b);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> GraphState {
        GraphState::from_pairs(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap()
    }

    #[test]
    fn global_examples() {
        let t = SubgraphPattern::triangle();
        assert_eq!(count_global(&GraphState::complete(3), &t).unwrap(), 6);
        assert_eq!(count_global(&c4(), &t).unwrap(), 0);
        let g = GraphState::from_pairs(6, &[(1, 2), (3, 4), (2, 5)]).unwrap();
        assert_eq!(count_global(&g, &SubgraphPattern::edge()).unwrap(), 6);
        assert_eq!(count_global(&GraphState::empty(5), &t).unwrap(), 0);
        assert!(count_global(&GraphState::complete(2), &t).is_err());
    }

    #[test]
    fn at_edge_examples() {
        let t = SubgraphPattern::triangle();
        let k4 = GraphState::complete(4);
        for e in all_edges(4) {
            assert_eq!(count_at_edge(&k4, &t, e).unwrap(), 12);
        }
        let x = c4();
        let e = x.edge(1, 3).unwrap();
        assert_eq!(count_at_edge(&x, &SubgraphPattern::edge(), e).unwrap(), 2);
        assert_eq!(count_at_edge(&GraphState::empty(4), &t, e).unwrap(), 0);
        // x_e does not matter.
        let with = x.with_edge(e);
        assert_eq!(
            count_at_edge(&with, &t, e).unwrap(),
            count_at_edge(&x, &t, e).unwrap()
        );
    }

    #[test]
    fn pair_examples() {
        let t = SubgraphPattern::triangle();
        let k5 = GraphState::complete(5);
        let e = k5.edge(1, 2).unwrap();
        let disjoint = k5.edge(3, 4).unwrap();
        assert_eq!(count_at_edge_pair(&k5, &t, e, disjoint).unwrap(), 0);
        assert_eq!(count_at_edge_pair(&k5, &t, e, e), Err(ErgmError::IdenticalEdges));
        let total: u64 = all_edges(5)
            .into_iter()
            .filter(|&f| f != e)
            .map(|f| count_at_edge_pair(&k5, &t, e, f).unwrap())
            .sum();
        assert_eq!(total, 2 * count_at_edge(&k5, &t, e).unwrap());
        let empty = GraphState::empty(5);
        let c4p = SubgraphPattern::cycle(4).unwrap();
        assert_eq!(
            count_at_edge_pair(&empty, &c4p, e, empty.edge(1, 3).unwrap()).unwrap(),
            0
        );
    }

    #[test]
    fn induced_examples() {
        let k3 = GraphState::complete(3);
        assert_eq!(count_induced_global(&k3, &SubgraphPattern::triangle()).unwrap(), 6);
        assert_eq!(
            count_induced_global(&GraphState::complete(4), &SubgraphPattern::edge()).unwrap(),
            12
        );
        assert_eq!(count_induced_global(&k3, &SubgraphPattern::two_star()).unwrap(), 0);
    }

    #[test]
    fn closed_forms() {
        let t = SubgraphPattern::triangle();
        assert_eq!(complete_graph_count(5, &t).unwrap(), 60);
        assert_eq!(complete_graph_count_at_edge(5, &t).unwrap(), 18);
        assert_eq!(complete_graph_count_at_edge(5, &SubgraphPattern::two_star()).unwrap(), 12);
    }

    #[test]
    fn r_examples() {
        let t = SubgraphPattern::triangle();
        let e = EdgeId::new(50, 1, 2).unwrap();
        assert_eq!(r_statistic(&GraphState::empty(50), &t, e).unwrap(), 0.0);
        let r = r_statistic(&GraphState::complete(50), &t, e).unwrap();
        assert!((r - (48.0f64 / 50.0).sqrt()).abs() < 1e-12);
        assert!((r - 0.9798).abs() < 1e-4);
        assert!(matches!(
            r_statistic(&GraphState::empty(4), &SubgraphPattern::edge(), EdgeId::new(4, 1, 2).unwrap()),
            Err(ErgmError::RStatisticUndefined(_))
        ));
        assert_eq!(r_extremes(&GraphState::empty(6), &[t.clone()]).unwrap(), (0.0, 0.0));
        let (hi, lo) = r_extremes(&GraphState::complete(20), &[t]).unwrap();
        assert!((hi - lo).abs() < 1e-15 && (hi - 0.9f64.sqrt()).abs() < 1e-12);
        assert_eq!(r_extremes(&GraphState::empty(6), &[]), Err(ErgmError::EmptyPatternList));
    }

    /// On G(200, 0.3) the triangle r is sqrt(codegree / n). Its mean square is
    /// near p²(n-2)/n, but the extremes over 19900 pairs sit about 4 codegree
    /// standard deviations out, far beyond p ± 0.05.
    #[test]
    fn r_on_random_graph() {
        let n = 200;
        let p = 0.3;
        let x = GraphState::erdos_renyi(n, p, &mut crate::rng::seeded_rng(7));
        let t = SubgraphPattern::triangle();
        let mean_sq = all_edges(n)
            .into_iter()
            .map(|e| r_statistic(&x, &t, e).unwrap().powi(2))
            .sum::<f64>()
            / crate::graph::pair_count(n) as f64;
        assert!((mean_sq - p * p * (n - 2) as f64 / n as f64).abs() < 0.005, "{mean_sq}");
        let (hi, lo) = r_extremes(&x, &[t]).unwrap();
        assert!(lo < p - 0.1 && hi > p + 0.05, "({lo}, {hi})");
    }

    #[test]
    fn census_totals() {
        let x = c4();
        let census = induced_census(&x, 3).unwrap();
        let total: u64 = census.classes().iter().map(|&(_, c)| c).sum();
        assert_eq!(total, 4);
        assert_eq!(census.induced_count(&SubgraphPattern::two_star()), 8);
        assert_eq!(count_four_cycles(&x), 8);
        assert_eq!(
            count_global(&GraphState::complete(6), &SubgraphPattern::cycle(4).unwrap()).unwrap(),
            count_four_cycles(&GraphState::complete(6))
        );
    }
}
