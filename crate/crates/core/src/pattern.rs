//! Small template graphs `G` whose labeled copies are counted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};

/// Largest pattern accepted by the counting kernels.
pub const MAX_PATTERN_VERTICES: usize = 8;

/// Structural shortcuts for the common patterns; detected from the edge set,
/// not from the name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    Edge,
    TwoStar,
    Triangle,
    General,
}

/// A fixed graph on the vertices `{1, ..., |V|}`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "PatternLiteral", into = "PatternRecord")]
pub struct SubgraphPattern {
    name: String,
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: [u8; MAX_PATTERN_VERTICES],
    shape: Shape,
}

impl SubgraphPattern {
    /// Validates and builds a pattern from 1-based edges. Edges are stored
    /// normalized (`i < j`) and sorted.
    pub fn new(name: impl Into<String>, vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::build(name.into(), vertex_count, edges, true)?;
        p.shape = p.detect_shape();
        Ok(p)
    }

    fn build(
        name: String,
        vertex_count: usize,
        edges: &[(usize, usize)],
        require_edge: bool,
    ) -> Result<Self> {
        if !(2..=MAX_PATTERN_VERTICES).contains(&vertex_count) {
            return Err(ErgmError::InvalidPattern(format!(
                "`{name}`: vertex count {vertex_count} outside 2..={MAX_PATTERN_VERTICES}"
            )));
        }
        if require_edge && edges.is_empty() {
            return Err(ErgmError::InvalidPattern(format!("`{name}` has no edges")));
        }
        let mut adjacency = [0u8; MAX_PATTERN_VERTICES];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > vertex_count || j > vertex_count {
                return Err(ErgmError::InvalidPattern(format!(
                    "`{name}`: edge ({i},{j}) leaves 1..={vertex_count}"
                )));
            }
            if i == j {
                return Err(ErgmError::InvalidPattern(format!("`{name}`: self-loop at {i}")));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if adjacency[a - 1] >> (b - 1) & 1 == 1 {
                return Err(ErgmError::InvalidPattern(format!(
                    "`{name}`: duplicate edge ({a},{b})"
                )));
            }
            adjacency[a - 1] |= 1 << (b - 1);
            adjacency[b - 1] |= 1 << (a - 1);
            normalized.push((a, b));
        }
        normalized.sort_unstable();
        Ok(Self {
            name,
            vertex_count,
            edges: normalized,
            adjacency,
            shape: Shape::General,
        })
    }

    /// The edge graph `G_1`: two vertices joined by one edge.
    pub fn edge() -> Self {
        Self::new("edge", 2, &[(1, 2)]).expect("valid")
    }

    /// Path on three vertices centred at vertex 2.
    pub fn two_star() -> Self {
        Self::new("two_star", 3, &[(1, 2), (2, 3)]).expect("valid")
    }

    pub fn triangle() -> Self {
        Self::new("triangle", 3, &[(1, 2), (1, 3), (2, 3)]).expect("valid")
    }

    /// Cycle `C_l`, `3 <= l <= 8`.
    pub fn cycle(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(ErgmError::InvalidPattern(format!("cycle length {l} < 3")));
        }
        let edges: Vec<_> = (1..=l).map(|i| (i, i % l + 1)).collect();
        Self::new(format!("cycle_{l}"), l, &edges)
    }

    /// Complete graph `K_k`.
    pub fn clique(k: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=k)
            .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
            .collect();
        Self::new(format!("clique_{k}"), k, &edges)
    }

    /// One of the named shorthands `edge`, `two_star`, `triangle`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "edge" => Ok(Self::edge()),
            "two_star" => Ok(Self::two_star()),
            "triangle" => Ok(Self::triangle()),
            other => Err(ErgmError::InvalidPattern(format!(
                "unknown shorthand `{other}` (expected edge, two_star or triangle)"
            ))),
        }
    }

    /// Graph on `vertex_count` vertices whose edge set is given as a bitmask in
    /// lexicographic pair order (the same layout as `GraphState::to_mask`).
    /// Unlike [`SubgraphPattern::new`], the edgeless graph is allowed; such
    /// templates are only meaningful for induced counts.
    pub fn from_mask(name: impl Into<String>, vertex_count: usize, mask: u64) -> Result<Self> {
        let edges = mask_to_pairs(vertex_count, mask);
        let mut p = Self::build(name.into(), vertex_count, &edges, false)?;
        p.shape = p.detect_shape();
        Ok(p)
    }

    /// `G_α`: the same vertex set with edge `index` (into [`SubgraphPattern::edges`]) removed.
    pub fn without_edge(&self, index: usize) -> Result<Self> {
        if index >= self.edges.len() {
            return Err(ErgmError::InvalidArgument(format!(
                "pattern `{}` has no edge #{index}",
                self.name
            )));
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != index)
            .map(|(_, &e)| e)
            .collect();
        let (a, b) = self.edges[index];
        let mut p = Self::build(format!("{}-({a},{b})", self.name), self.vertex_count, &edges, false)?;
        p.shape = p.detect_shape();
        Ok(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// 1-based edges, normalized and sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_edge_pattern(&self) -> bool {
        self.shape == Shape::Edge
    }

    /// Edge set as a bitmask in lexicographic pair order.
    pub fn to_mask(&self) -> u64 {
        let l = self.vertex_count;
        self.edges
            .iter()
            .fold(0, |m, &(i, j)| m | 1 << pair_index(l, i - 1, j - 1))
    }

    /// `|Aut(G)|`: each unlabeled copy is counted this many times by the
    /// labeled counts.
    pub fn automorphism_count(&self) -> usize {
        let l = self.vertex_count;
        let mask = self.to_mask();
        permutations(l)
            .into_iter()
            .filter(|perm| permute_mask(l, mask, perm) == mask)
            .count()
    }

    /// Smallest edge mask over all relabelings; equal for isomorphic patterns.
    pub fn canonical_mask(&self) -> u64 {
        canonical_mask(self.vertex_count, self.to_mask())
    }

    #[inline]
    pub(crate) fn adjacency(&self) -> &[u8; MAX_PATTERN_VERTICES] {
        &self.adjacency
    }

    #[inline]
    pub(crate) fn shape(&self) -> Shape {
        self.shape
    }

    fn detect_shape(&self) -> Shape {
        match (self.vertex_count, self.edges.len()) {
            (2, 1) => Shape::Edge,
            (3, 2) => Shape::TwoStar,
            (3, 3) => Shape::Triangle,
            _ => Shape::General,
        }
    }
}

impl PartialEq for SubgraphPattern {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.vertex_count == other.vertex_count
            && self.edges == other.edges
    }
}

impl fmt::Debug for SubgraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{|V|={}, E={:?}}}", self.name, self.vertex_count, self.edges)
    }
}

/// Config-file form of a pattern: a shorthand string or an explicit record.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PatternLiteral {
    Shorthand(String),
    Record(PatternRecord),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternRecord {
    pub name: String,
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<PatternLiteral> for SubgraphPattern {
    type Error = ErgmError;

    fn try_from(lit: PatternLiteral) -> Result<Self> {
        match lit {
            PatternLiteral::Shorthand(s) => Self::named(&s),
            PatternLiteral::Record(r) => {
                let edges: Vec<_> = r.edges.iter().map(|&[i, j]| (i, j)).collect();
                Self::new(r.name, r.vertex_count, &edges)
            }
        }
    }
}

impl From<SubgraphPattern> for PatternRecord {
    fn from(p: SubgraphPattern) -> Self {
        PatternRecord {
            name: p.name,
            vertex_count: p.vertex_count,
            edges: p.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

/// Representatives of every isomorphism class of graphs on `l` vertices,
/// ordered by canonical mask (the edgeless graph first).
pub fn all_graphs_on(l: usize) -> Result<Vec<SubgraphPattern>> {
    if !(2..=6).contains(&l) {
        return Err(ErgmError::InvalidArgument(format!(
            "graph enumeration supports 2..=6 vertices, got {l}"
        )));
    }
    let table = canonical_table(l);
    let mut reps: Vec<u64> = table.iter().map(|&c| c as u64).collect();
    reps.sort_unstable();
    reps.dedup();
    reps.into_iter()
        .map(|m| SubgraphPattern::from_mask(format!("g{l}_{m}"), l, m))
        .collect()
}

/// Linear index of the 0-based pair `(i, j)`, `i < j`, among `C(l, 2)` pairs.
#[inline]
pub(crate) fn pair_index(l: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < l);
    i * (2 * l - i - 1) / 2 + (j - i - 1)
}

fn mask_to_pairs(l: usize, mask: u64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            if mask >> pair_index(l, i, j) & 1 == 1 {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

fn permutations(l: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(l), &mut vec![false; l], &mut out);
    out
}

fn permute_mask(l: usize, mask: u64, perm: &[usize]) -> u64 {
    let mut out = 0;
    for i in 0..l {
        for j in i + 1..l {
            if mask >> pair_index(l, i, j) & 1 == 1 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                out |= 1 << pair_index(l, a, b);
            }
        }
    }
    out
}

fn canonical_mask(l: usize, mask: u64) -> u64 {
    permutations(l)
        .iter()
        .map(|p| permute_mask(l, mask, p))
        .min()
        .unwrap_or(mask)
}

/// `table[mask]` is the canonical form of `mask` for graphs on `l <= 6` vertices.
pub(crate) fn canonical_table(l: usize) -> Vec<u32> {
    let pairs = l * (l - 1) / 2;
    let perms = permutations(l);
    let mut table = vec![u32::MAX; 1 << pairs];
    for mask in 0..(1u64 << pairs) {
        if table[mask as usize] != u32::MAX {
            continue;
        }
        let orbit: Vec<u64> = perms.iter().map(|p| permute_mask(l, mask, p)).collect();
        let canon = *orbit.iter().min().expect("nonempty") as u32;
        for m in orbit {
            table[m as usize] = canon;
        }
    }
    table
}
