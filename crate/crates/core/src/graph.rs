//! Labeled simple graphs on the vertex set `{1, ..., n}`.
//!
//! Every vertex owns a row bitset of its neighbours, so edge queries and
//! flips are O(1) and neighbourhood intersections (co-degrees) cost
//! O(n / 64) word operations. Vertices are 1-based at the public surface;
//! the 0-based storage index never leaves this crate.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};

/// Number of unordered vertex pairs, `C(n, 2)`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An unordered vertex pair `{i, j}` with `i < j`, together with its dense
/// linear index in `[0, C(n, 2))`.
///
/// Pairs are ordered lexicographically: `(1,2), (1,3), ..., (1,n), (2,3), ...`.
/// This order defines the bit layout of [`GraphState::to_mask`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    lo: u32,
    hi: u32,
    index: usize,
}

impl EdgeId {
    /// Edge between the 1-based vertices `i` and `j` of a graph on `n` vertices.
    /// The endpoints may be given in either order.
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self> {
        for v in [i, j] {
            if v == 0 || v > n {
                return Err(ErgmError::VertexOutOfRange { vertex: v, n });
            }
        }
        if i == j {
            return Err(ErgmError::SelfLoop(i));
        }
        let (lo, hi) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
        Ok(Self::from_zero_based(n, lo, hi))
    }

    /// Inverse of [`EdgeId::index`].
    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        let pairs = pair_count(n);
        if index >= pairs {
            return Err(ErgmError::EdgeIndexOutOfRange { index, pairs });
        }
        let mut lo = 0;
        let mut start = 0;
        loop {
            let row = n - lo - 1;
            if index < start + row {
                let hi = lo + 1 + (index - start);
                return Ok(Self::from_zero_based(n, lo, hi));
            }
            start += row;
            lo += 1;
        }
    }

    pub(crate) fn from_zero_based(n: usize, lo: usize, hi: usize) -> Self {
        debug_assert!(lo < hi && hi < n);
        let index = lo * (2 * n - lo - 1) / 2 + (hi - lo - 1);
        Self {
            lo: lo as u32,
            hi: hi as u32,
            index,
        }
    }

    /// 1-based endpoints `(i, j)` with `i < j`.
    pub fn endpoints(&self) -> (usize, usize) {
        (self.lo as usize + 1, self.hi as usize + 1)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// True if the two edges have a vertex in common.
    pub fn shares_vertex(&self, other: &EdgeId) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }

    #[inline]
    pub(crate) fn lo(&self) -> usize {
        self.lo as usize
    }

    #[inline]
    pub(crate) fn hi(&self) -> usize {
        self.hi as usize
    }

    fn valid_for(&self, n: usize) -> bool {
        (self.hi as usize) < n
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.endpoints();
        write!(f, "({i},{j})")
    }
}

/// All `C(n, 2)` pairs in linear-index order.
pub fn all_edges(n: usize) -> Vec<EdgeId> {
    let mut out = Vec::with_capacity(pair_count(n));
    for lo in 0..n {
        for hi in lo + 1..n {
            out.push(EdgeId::from_zero_based(n, lo, hi));
        }
    }
    out
}

/// A configuration `X = (x_e)` of the graph space on `n` labeled vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GraphState {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
    edge_count: usize,
}

impl GraphState {
    /// The graph with no edges. Panics if `n == 0`.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "a graph needs at least one vertex");
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            rows: vec![0; n * words],
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    /// The complete graph `K_n`. Panics if `n == 0`.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 0..n {
            let row = &mut g.rows[v * g.words..(v + 1) * g.words];
            for u in 0..n {
                if u != v {
                    row[u / 64] |= 1 << (u % 64);
                }
            }
            g.degrees[v] = (n - 1) as u32;
        }
        g.edge_count = pair_count(n);
        g
    }

    /// Erdős–Rényi `G(n, p)` sample.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for lo in 0..n {
            for hi in lo + 1..n {
                if rng.random::<f64>() < p {
                    g.set_zero_based(lo, hi, true);
                }
            }
        }
        g
    }

    /// Complete bipartite graph between `{1..=k}` and `{k+1..=n}` with `k = n / 2`.
    pub fn complete_bipartite_halves(n: usize) -> Self {
        let mut g = Self::empty(n);
        let k = n / 2;
        for lo in 0..k {
            for hi in k..n {
                g.set_zero_based(lo, hi, true);
            }
        }
        g
    }

    /// Graph with the given edge set, as 1-based vertex pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(ErgmError::TooFewVertices { min: 1, got: 0 });
        }
        let mut g = Self::empty(n);
        for &(i, j) in pairs {
            let e = EdgeId::new(n, i, j)?;
            g.set(e, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of present edges `m`.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `C(n, 2)`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// `m / C(n, 2)`; zero for `n = 1`.
    pub fn edge_density(&self) -> f64 {
        let pairs = self.pair_count();
        if pairs == 0 {
            0.0
        } else {
            self.edge_count as f64 / pairs as f64
        }
    }

    /// Edge for 1-based endpoints of this graph.
    pub fn edge(&self, i: usize, j: usize) -> Result<EdgeId> {
        EdgeId::new(self.n, i, j)
    }

    #[inline]
    pub fn has(&self, e: EdgeId) -> bool {
        self.has_zero_based(e.lo(), e.hi())
    }

    /// Membership query on 1-based endpoints; symmetric in `i`, `j`.
    pub fn has_pair(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.has(self.edge(i, j)?))
    }

    /// Sets `x_e` to `value`, returning whether the configuration changed.
    ///
    /// Panics if `e` was built for a larger vertex count.
    #[inline]
    pub fn set(&mut self, e: EdgeId, value: bool) -> bool {
        assert!(e.valid_for(self.n), "edge {e} does not fit a graph on {} vertices", self.n);
        self.set_zero_based(e.lo(), e.hi(), value)
    }

    /// `set` on 1-based endpoints.
    pub fn set_pair(&mut self, i: usize, j: usize, value: bool) -> Result<bool> {
        let e = self.edge(i, j)?;
        Ok(self.set(e, value))
    }

    /// Toggles `x_e`, returning the new value.
    pub fn flip(&mut self, e: EdgeId) -> bool {
        let now = !self.has(e);
        self.set(e, now);
        now
    }

    /// Copy of `self` with `x_e = 1` (the `X_{e+}` configuration).
    pub fn with_edge(&self, e: EdgeId) -> Self {
        let mut g = self.clone();
        g.set(e, true);
        g
    }

    /// Copy of `self` with `x_e = 0` (the `X_{e-}` configuration).
    pub fn without_edge(&self, e: EdgeId) -> Self {
        let mut g = self.clone();
        g.set(e, false);
        g
    }

    /// Degree of the 1-based vertex `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v == 0 || v > self.n {
            return Err(ErgmError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(self.degrees[v - 1] as usize)
    }

    /// Present edges in linear-index order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.n).flat_map(move |lo| {
            self.neighbors_zero_based(lo)
                .filter(move |&hi| hi > lo)
                .map(move |hi| EdgeId::from_zero_based(self.n, lo, hi))
        })
    }

    /// Number of pairs on which the two configurations disagree.
    pub fn hamming_distance(&self, other: &GraphState) -> Result<usize> {
        self.check_same_size(other)?;
        let bits: u32 = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        Ok(bits as usize / 2)
    }

    /// True iff every edge of `self` is also an edge of `other`.
    pub fn is_subconfiguration(&self, other: &GraphState) -> Result<bool> {
        self.check_same_size(other)?;
        Ok(self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0))
    }

    /// Edge set as a bitmask in linear-index order. `None` when `C(n, 2) > 64`.
    pub fn to_mask(&self) -> Option<u64> {
        if self.pair_count() > 64 {
            return None;
        }
        Some(self.edges().fold(0u64, |m, e| m | (1 << e.index())))
    }

    /// Inverse of [`GraphState::to_mask`]. Bits at or above `C(n, 2)` are rejected.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n == 0 {
            return Err(ErgmError::TooFewVertices { min: 1, got: 0 });
        }
        let pairs = pair_count(n);
        if pairs > 64 {
            return Err(ErgmError::InvalidArgument(format!(
                "masks cover at most 64 pairs; n = {n} has {pairs}"
            )));
        }
        if pairs < 64 && mask >> pairs != 0 {
            return Err(ErgmError::EdgeIndexOutOfRange {
                index: 63 - mask.leading_zeros() as usize,
                pairs,
            });
        }
        let mut g = Self::empty(n);
        for e in all_edges(n) {
            if mask >> e.index() & 1 == 1 {
                g.set(e, true);
            }
        }
        Ok(g)
    }

    /// Edge-list text: a `n=<count>` header, then one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for e in self.edges() {
            let (i, j) = e.endpoints();
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Parses the format written by [`GraphState::to_edge_list`]. Blank lines
    /// and `#` comments are ignored; duplicate edges are accepted.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(ErgmError::Parse {
            line: 1,
            message: "missing `n=<count>` header".into(),
        })?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| ErgmError::Parse {
                line,
                message: format!("expected `n=<count>`, found `{header}`"),
            })?;
        if n == 0 {
            return Err(ErgmError::Parse {
                line,
                message: "n must be at least 1".into(),
            });
        }
        let mut g = Self::empty(n);
        for (line, text) in lines {
            let mut parts = text.split_whitespace();
            let mut next = || -> Result<usize> {
                parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| ErgmError::Parse {
                        line,
                        message: format!("expected `i j`, found `{text}`"),
                    })
            };
            let (i, j) = (next()?, next()?);
            if parts.next().is_some() {
                return Err(ErgmError::Parse {
                    line,
                    message: format!("trailing tokens in `{text}`"),
                });
            }
            let e = EdgeId::new(n, i, j).map_err(|err| ErgmError::Parse {
                line,
                message: err.to_string(),
            })?;
            g.set(e, true);
        }
        Ok(g)
    }

    fn check_same_size(&self, other: &GraphState) -> Result<()> {
        if self.n != other.n {
            return Err(ErgmError::MismatchedSize {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    // Crate-internal 0-based access used by the counting kernels.

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub(crate) fn has_zero_based(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn degree_zero_based(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    /// `|N(u) ∩ N(v)|`.
    #[inline]
    pub(crate) fn codegree(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub(crate) fn neighbors_zero_based(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    #[inline]
    pub(crate) fn set_zero_based(&mut self, u: usize, v: usize, value: bool) -> bool {
        if self.has_zero_based(u, v) == value {
            return false;
        }
        let w = self.words;
        self.rows[u * w + v / 64] ^= 1 << (v % 64);
        self.rows[v * w + u / 64] ^= 1 << (u % 64);
        if value {
            self.degrees[u] += 1;
            self.degrees[v] += 1;
            self.edge_count += 1;
        } else {
            self.degrees[u] -= 1;
            self.degrees[v] -= 1;
            self.edge_count -= 1;
        }
        true
    }
}

impl fmt::Debug for GraphState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphState")
            .field("n", &self.n)
            .field("edges", &self.edges().map(|e| e.endpoints()).collect::<Vec<_>>())
            .finish()
    }
}

impl FromStr for GraphState {
    type Err = ErgmError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_edge_list(s)
    }
}

/// Serializes as the edge-list text format.
impl Serialize for GraphState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_edge_list())
    }
}

impl<'de> Deserialize<'de> for GraphState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse_edge_list(&text).map_err(serde::de::Error::custom)
    }
}

/// Iterates the positions of set bits.
pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            }
        })
    })
}
