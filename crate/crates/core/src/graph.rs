//! Canonical dense representations of edges, edge subsets of `K_n`, and
//! graphs, plus seeded `G(n,p)` / `G(n,m)` sampling.
//!
//! Edges live on a fixed lexicographic index `0..C(n,2)`, so edge subsets are
//! bitmasks with O(1) membership and word-parallel overlap counting. The
//! audits enumerate millions of subsets; everything downstream leans on this
//! layout.

use crate::bits;
use crate::error::{Error, Result};
use crate::rng::{Prob, RngStream};
use crate::MAX_N;
use smallvec::SmallVec;
use std::fmt;

/// An edge of `K_n` in canonical orientation `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: u32,
    v: u32,
}

impl Edge {
    /// Canonicalizes the orientation; panics on a loop.
    pub fn new(a: u32, b: u32) -> Self {
        assert!(a != b, "loops are not edges of K_n");
        Self {
            u: a.min(b),
            v: a.max(b),
        }
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// Lexicographic index of this edge among the edges of `K_n`.
    pub fn index(&self, n: u32) -> usize {
        debug_assert!(self.v < n);
        let u = self.u as usize;
        let v = self.v as usize;
        let n = n as usize;
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    /// Inverse of [`Edge::index`].
    pub fn from_index(n: u32, mut idx: usize) -> Self {
        let mut u = 0u32;
        let mut row = (n - 1) as usize;
        while idx >= row {
            idx -= row;
            row -= 1;
            u += 1;
        }
        Edge::new(u, u + 1 + idx as u32)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// `C(n, 2)`, the size of the edge universe of `K_n`.
pub fn complete_edge_count(n: u32) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

fn words_for(n: u32) -> usize {
    (complete_edge_count(n) as usize).div_ceil(64)
}

pub fn check_vertex_count(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::VertexCountTooSmall { n, min: 1 });
    }
    if n > MAX_N {
        return Err(Error::VertexCountTooLarge { n, max: MAX_N });
    }
    Ok(())
}

/// A subset of the canonical edges of `K_n`, stored as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: u32,
    words: SmallVec<[u64; 2]>,
}

impl EdgeSet {
    pub fn empty(n: u32) -> Self {
        assert!((1..=MAX_N).contains(&n));
        Self {
            n,
            words: SmallVec::from_elem(0, words_for(n).max(1)),
        }
    }

    pub fn complete(n: u32) -> Self {
        let mut s = Self::empty(n);
        let m = complete_edge_count(n) as usize;
        for i in 0..m {
            bits::set(&mut s.words, i);
        }
        s
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut s = Self::empty(n);
        for e in edges {
            s.insert(e);
        }
        s
    }

    /// Rebuilds from raw words; bits beyond `C(n,2)` must be clear.
    pub fn from_words(n: u32, words: &[u64]) -> Self {
        let mut s = Self::empty(n);
        assert_eq!(words.len(), s.words.len());
        s.words.copy_from_slice(words);
        let m = complete_edge_count(n) as usize;
        debug_assert!(bits::iter_ones(&s.words).all(|i| i < m));
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> u32 {
        bits::count(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, e: Edge) {
        assert!(e.v < self.n, "edge {e} out of range for n = {}", self.n);
        bits::set(&mut self.words, e.index(self.n));
    }

    pub fn remove(&mut self, e: Edge) {
        bits::clear(&mut self.words, e.index(self.n));
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.v < self.n && bits::get(&self.words, e.index(self.n))
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        bits::is_subset(&self.words, &other.words)
    }

    pub fn intersection_count(&self, other: &EdgeSet) -> u32 {
        debug_assert_eq!(self.n, other.n);
        bits::intersection_count(&self.words, &other.words)
    }

    pub fn difference_count(&self, other: &EdgeSet) -> u32 {
        debug_assert_eq!(self.n, other.n);
        bits::difference_count(&self.words, &other.words)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        bits::union_into(&mut out.words, &other.words);
        out
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        bits::difference_into(&mut out.words, &other.words);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        bits::iter_ones(&self.words).map(|i| Edge::from_index(self.n, i))
    }

    /// The bitmask as a hexadecimal big integer (edge index 0 = lowest bit).
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        let mut leading = true;
        for &w in self.words.iter().rev() {
            if leading {
                if w != 0 {
                    out.push_str(&format!("{w:x}"));
                    leading = false;
                }
            } else {
                out.push_str(&format!("{w:016x}"));
            }
        }
        if leading {
            out.push('0');
        }
        out
    }
}

/// `(ℓ, c, v)`: edge count, component count, and vertex count of an edge
/// subset. Vertices are the endpoints actually used, so there are no
/// isolated vertices by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeSubsetStats {
    pub edges: u32,
    pub components: u32,
    pub vertices: u32,
}

/// Component statistics of the subgraph spanned by an edge subset.
pub fn stats(set: &EdgeSet) -> EdgeSubsetStats {
    let n = set.n as usize;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    let mut used = 0u64;
    let mut edges = 0u32;
    for e in set.iter() {
        edges += 1;
        used |= 1 << e.u;
        used |= 1 << e.v;
        let ru = find(&mut parent, e.u);
        let rv = find(&mut parent, e.v);
        if ru != rv {
            parent[ru as usize] = rv;
        }
    }
    let mut components = 0u32;
    for v in 0..n as u32 {
        if used >> v & 1 == 1 && find(&mut parent, v) == v {
            components += 1;
        }
    }
    EdgeSubsetStats {
        edges,
        components,
        vertices: used.count_ones(),
    }
}

/// A graph on `[n]`: the vertex count plus a canonical edge subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: EdgeSet,
}

impl Graph {
    pub fn new(n: u32, edges: EdgeSet) -> Self {
        assert_eq!(n, edges.n());
        Self { n, edges }
    }

    pub fn complete(n: u32) -> Self {
        Self::new(n, EdgeSet::complete(n))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.len()
    }

    /// Adjacency rows as vertex bitmasks (valid because `n <= 64`).
    pub fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n as usize];
        for e in self.edges.iter() {
            adj[e.u as usize] |= 1 << e.v;
            adj[e.v as usize] |= 1 << e.u;
        }
        adj
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adjacency()[v as usize].count_ones()
    }

    /// Text format: first line `n m`, then one `u v` line per edge with
    /// `0 <= u < v < n`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for e in self.edges.iter() {
            out.push_str(&format!("{} {}\n", e.u(), e.v()));
        }
        out
    }

    /// Parses the text format, rejecting duplicates and out-of-range or
    /// disoriented endpoints.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::GraphFormat("empty input".into()))?;
        let mut it = header.split_whitespace();
        let n: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::GraphFormat("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::GraphFormat("bad edge count".into()))?;
        check_vertex_count(n)?;
        let mut edges = EdgeSet::empty(n);
        let mut seen = 0usize;
        for line in lines {
            let mut it = line.split_whitespace();
            let u: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GraphFormat(format!("bad edge line: {line}")))?;
            let v: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GraphFormat(format!("bad edge line: {line}")))?;
            if it.next().is_some() {
                return Err(Error::GraphFormat(format!("trailing tokens: {line}")));
            }
            if u >= v || v >= n {
                return Err(Error::GraphFormat(format!(
                    "edge {u} {v} violates 0 <= u < v < {n}"
                )));
            }
            let e = Edge::new(u, v);
            if edges.contains(e) {
                return Err(Error::GraphFormat(format!("duplicate edge {u} {v}")));
            }
            edges.insert(e);
            seen += 1;
        }
        if seen != m {
            return Err(Error::GraphFormat(format!(
                "header says {m} edges, found {seen}"
            )));
        }
        Ok(Self::new(n, edges))
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}

/// `G(n,p)`: each canonical edge independently with probability `p`,
/// deterministic given the stream.
pub fn sample_gnp(n: u32, p: f64, stream: RngStream) -> Result<Graph> {
    check_vertex_count(n)?;
    let prob = Prob::from_f64(p)?;
    Ok(sample_gnp_prob(n, prob, stream))
}

/// `G(n,p)` at an exact dyadic probability. Edges are decided in index
/// order, one draw each, so the draw sequence is part of the contract.
pub fn sample_gnp_prob(n: u32, prob: Prob, stream: RngStream) -> Graph {
    let mut rng = stream.rng();
    let m = complete_edge_count(n) as usize;
    let mut edges = EdgeSet::empty(n);
    for i in 0..m {
        if prob.sample(&mut rng) {
            bits::set(&mut edges.words, i);
        }
    }
    Graph::new(n, edges)
}

/// One uniform word per canonical edge; the shared-randomness source for
/// coupled threshold sweeps.
pub fn edge_uniforms(n: u32, stream: RngStream) -> Vec<u64> {
    use rand::RngCore;
    let mut rng = stream.rng();
    (0..complete_edge_count(n)).map(|_| rng.next_u64()).collect()
}

/// Thresholds shared uniforms into a graph; for a fixed uniform vector the
/// result is monotone in `prob`.
pub fn gnp_from_uniforms(n: u32, uniforms: &[u64], prob: Prob) -> Graph {
    debug_assert_eq!(uniforms.len() as u64, complete_edge_count(n));
    let mut edges = EdgeSet::empty(n);
    let threshold = prob.threshold();
    for (i, &u) in uniforms.iter().enumerate() {
        if (u as u128) < threshold {
            bits::set(&mut edges.words, i);
        }
    }
    Graph::new(n, edges)
}

/// `G(n,m)`: a uniformly random `m_edges`-subset of the edges of `K_n`.
pub fn sample_gnm(n: u32, m_edges: u64, stream: RngStream) -> Result<Graph> {
    check_vertex_count(n)?;
    let m = complete_edge_count(n);
    if m_edges > m {
        return Err(Error::EdgeCountExceedsComplete {
            requested: m_edges,
            n,
            max: m,
        });
    }
    let mut rng = stream.rng();
    let picked = rand::seq::index::sample(&mut rng, m as usize, m_edges as usize);
    let mut edges = EdgeSet::empty(n);
    for i in picked {
        bits::set(&mut edges.words, i);
    }
    Ok(Graph::new(n, edges))
}

/// Uniform `size`-subset of an arbitrary edge pool.
pub fn sample_subset(
    n: u32,
    pool: &[Edge],
    size: usize,
    rng: &mut impl rand::Rng,
) -> EdgeSet {
    assert!(size <= pool.len());
    let picked = rand::seq::index::sample(rng, pool.len(), size);
    EdgeSet::from_edges(n, picked.iter().map(|i| pool[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_roundtrip() {
        for n in [2u32, 5, 9, 64] {
            let m = complete_edge_count(n) as usize;
            let mut last = None;
            for idx in 0..m {
                let e = Edge::from_index(n, idx);
                assert_eq!(e.index(n), idx);
                // Lexicographic on (u, v).
                if let Some(prev) = last {
                    assert!(prev < (e.u, e.v));
                }
                last = Some((e.u, e.v));
            }
        }
    }

    #[test]
    fn gnp_extremes() {
        let full = sample_gnp(5, 1.0, RngStream::new(1, 0)).unwrap();
        assert_eq!(full.edge_count(), 10);
        let empty = sample_gnp(5, 0.0, RngStream::new(99, 5)).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert!(sample_gnp(5, 1.5, RngStream::new(0, 0)).is_err());
        assert!(sample_gnp(0, 0.5, RngStream::new(0, 0)).is_err());
        assert!(sample_gnp(65, 0.5, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        let s = RngStream::new(20260817, 7);
        let a = sample_gnp(20, 0.5, s).unwrap();
        let b = sample_gnp(20, 0.5, s).unwrap();
        assert_eq!(a, b);
        let c = sample_gnp(20, 0.5, s.with_stream(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gnm_extremes() {
        let full = sample_gnm(5, 10, RngStream::new(3, 0)).unwrap();
        assert_eq!(full.edges(), &EdgeSet::complete(5));
        let empty = sample_gnm(5, 0, RngStream::new(3, 1)).unwrap();
        assert!(empty.edges().is_empty());
        assert!(sample_gnm(5, 11, RngStream::new(3, 2)).is_err());
    }

    #[test]
    fn gnm_is_uniform_per_edge() {
        // Each of the 45 edges of K_10 should appear with frequency 7/45.
        let n = 10u32;
        let trials = 100_000u64;
        let mut counts = vec![0u64; 45];
        for t in 0..trials {
            let g = sample_gnm(n, 7, RngStream::new(42, t)).unwrap();
            for e in g.edges().iter() {
                counts[e.index(n)] += 1;
            }
        }
        assert_eq!(counts.iter().sum::<u64>(), 7 * trials);
        let p = 7.0 / 45.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        // 4.5 sigma per edge keeps the union over 45 edges below 2e-4.
        for &c in &counts {
            let freq = c as f64 / trials as f64;
            assert!(
                (freq - p).abs() <= 4.5 * sigma,
                "edge frequency {freq} too far from {p}"
            );
        }
    }

    #[test]
    fn stats_examples() {
        // Two paths: 0-1, 1-2, 3-4.
        let s = EdgeSet::from_edges(
            5,
            [Edge::new(0, 1), Edge::new(1, 2), Edge::new(3, 4)],
        );
        assert_eq!(
            stats(&s),
            EdgeSubsetStats {
                edges: 3,
                components: 2,
                vertices: 5
            }
        );
        assert_eq!(
            stats(&EdgeSet::empty(6)),
            EdgeSubsetStats {
                edges: 0,
                components: 0,
                vertices: 0
            }
        );
    }

    #[test]
    fn graph_text_roundtrip_and_rejections() {
        let g = sample_gnp(9, 0.4, RngStream::new(5, 1)).unwrap();
        let text = g.to_text();
        assert_eq!(Graph::from_text(&text).unwrap(), g);
        // Comment lines are tool metadata, not graph data.
        let commented = format!("# provenance\n{text}");
        assert_eq!(Graph::from_text(&commented).unwrap(), g);

        assert!(Graph::from_text("3 1\n0 0\n").is_err()); // loop
        assert!(Graph::from_text("3 1\n1 0\n").is_err()); // disoriented
        assert!(Graph::from_text("3 1\n0 3\n").is_err()); // out of range
        assert!(Graph::from_text("3 2\n0 1\n0 1\n").is_err()); // duplicate
        assert!(Graph::from_text("3 2\n0 1\n").is_err()); // count mismatch
    }

    #[test]
    fn coupled_uniforms_are_monotone() {
        let n = 12;
        let uniforms = edge_uniforms(n, RngStream::new(11, 0));
        let lo = gnp_from_uniforms(n, &uniforms, Prob::from_f64(0.3).unwrap());
        let hi = gnp_from_uniforms(n, &uniforms, Prob::from_f64(0.7).unwrap());
        assert!(lo.edges().is_subset_of(hi.edges()));
        let all = gnp_from_uniforms(n, &uniforms, Prob::ONE);
        assert_eq!(all.edge_count() as u64, complete_edge_count(n));
    }
}
