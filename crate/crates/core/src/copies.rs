//! The catalog of copies of the k-th power of a Hamilton cycle in `K_n`.
//!
//! A copy is determined by a cyclic ordering of the vertices up to rotation
//! and reflection, so there are `(n-1)!/2` of them; we fix the
//! representative with `order[0] = 0` and `order[1] < order[n-1]`. The
//! catalog materializes every copy as a flat array of orderings and edge
//! bitmasks, which is what makes exhaustive spread and overlap audits
//! affordable up to `n = 11`.

use crate::error::{Error, Result};
use crate::exact::factorial;
use crate::graph::{complete_edge_count, check_vertex_count, Edge, EdgeSet, Graph};
use crate::par;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// A cyclic vertex ordering in canonical form: `order[0] = 0` and
/// `order[1] < order[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicOrdering {
    order: Vec<u8>,
}

impl CyclicOrdering {
    /// Canonicalizes an arbitrary vertex cycle by rotation and reflection.
    pub fn from_cycle(seq: &[u8]) -> Result<Self> {
        let n = seq.len();
        if n < 3 {
            return Err(Error::VertexCountTooSmall {
                n: n as u32,
                min: 3,
            });
        }
        if n as u32 > crate::MAX_N {
            return Err(Error::VertexCountTooLarge {
                n: n as u32,
                max: crate::MAX_N,
            });
        }
        let mut seen = vec![false; n];
        for &v in seq {
            if (v as usize) >= n || seen[v as usize] {
                return Err(Error::GraphFormat(format!(
                    "sequence is not a permutation of 0..{n}"
                )));
            }
            seen[v as usize] = true;
        }
        let zero = seq.iter().position(|&v| v == 0).unwrap();
        let mut order: Vec<u8> = (0..n).map(|i| seq[(zero + i) % n]).collect();
        if order[1] > order[n - 1] {
            order[1..].reverse();
        }
        Ok(Self { order })
    }

    /// The ordering `0, 1, ..., n-1`.
    pub fn identity(n: u32) -> Self {
        assert!((3..=crate::MAX_N).contains(&n));
        Self {
            order: (0..n as u8).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.order.len() as u32
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.order
    }

    /// Edges between vertices at cyclic distance at most `k`. For
    /// `n >= 2k+1` there are exactly `k*n` of them; below that the pairs
    /// collapse in the bitmask.
    pub fn power_edges(&self, k: u32) -> EdgeSet {
        power_edges_of(&self.order, k)
    }
}

pub fn power_edges_of(order: &[u8], k: u32) -> EdgeSet {
    let n = order.len() as u32;
    let mut set = EdgeSet::empty(n);
    for i in 0..order.len() {
        for d in 1..=k as usize {
            let u = order[i] as u32;
            let v = order[(i + d) % order.len()] as u32;
            if u != v {
                set.insert(Edge::new(u, v));
            }
        }
    }
    set
}

/// `(n-1)!/2`, the number of copies for `n >= 3`.
pub fn count_copies(n: u32) -> BigUint {
    assert!(n >= 3);
    factorial(n as u64 - 1) / BigUint::from(2u32)
}

/// Every copy of the k-th power of a Hamilton cycle on `[n]`, in a fixed
/// deterministic order, stored flat.
#[derive(Debug)]
pub struct CopyCatalog {
    n: u32,
    k: u32,
    count: usize,
    words_per_set: usize,
    orderings: Vec<u8>,
    edge_words: Vec<u64>,
}

impl CopyCatalog {
    pub const DEFAULT_BUDGET: u64 = 20_000_000;

    /// Enumerates all `(n-1)!/2` copies. Requires `n >= 2k+1` so copies are
    /// pairwise distinct `k*n`-edge graphs, and refuses counts beyond
    /// `budget` before allocating.
    pub fn enumerate(n: u32, k: u32, budget: u64) -> Result<Self> {
        check_vertex_count(n)?;
        if k == 0 {
            return Err(Error::OutsideHypothesis(
                "power must be at least 1".into(),
            ));
        }
        if n < 2 * k + 1 {
            return Err(Error::VertexCountTooSmall { n, min: 2 * k + 1 });
        }
        let required = count_copies(n);
        let count = match required.to_u64() {
            Some(c) if c <= budget => c as usize,
            _ => {
                return Err(Error::CatalogBudget {
                    n,
                    required,
                    budget,
                })
            }
        };
        let words_per_set = (complete_edge_count(n) as usize).div_ceil(64);

        // Chunk by the pair (order[1], order[n-1]); each chunk enumerates
        // the (n-3)! middle permutations in lexicographic order, so the
        // global order is fixed no matter how chunks are scheduled.
        let mut pairs = Vec::new();
        for a in 1..n as u8 {
            for b in (a + 1)..n as u8 {
                pairs.push((a, b));
            }
        }
        let per_chunk = count / pairs.len();

        let chunks = par::map_vec(pairs.len(), |pi| {
            let (a, b) = pairs[pi];
            let mut middle: Vec<u8> =
                (1..n as u8).filter(|&v| v != a && v != b).collect();
            let mut order = vec![0u8; n as usize];
            order[1] = a;
            order[n as usize - 1] = b;
            let mut orderings = Vec::with_capacity(per_chunk * n as usize);
            let mut edge_words = Vec::with_capacity(per_chunk * words_per_set);
            let mut words = vec![0u64; words_per_set];
            loop {
                order[2..n as usize - 1].copy_from_slice(&middle);
                words.iter_mut().for_each(|w| *w = 0);
                write_power_words(&order, k, n, &mut words);
                orderings.extend_from_slice(&order);
                edge_words.extend_from_slice(&words);
                if !next_permutation(&mut middle) {
                    break;
                }
            }
            (orderings, edge_words)
        });

        let mut orderings = Vec::with_capacity(count * n as usize);
        let mut edge_words = Vec::with_capacity(count * words_per_set);
        for (o, w) in chunks {
            orderings.extend_from_slice(&o);
            edge_words.extend_from_slice(&w);
        }
        debug_assert_eq!(orderings.len(), count * n as usize);
        Ok(Self {
            n,
            k,
            count,
            words_per_set,
            orderings,
            edge_words,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn words_per_set(&self) -> usize {
        self.words_per_set
    }

    pub fn ordering(&self, i: usize) -> &[u8] {
        let n = self.n as usize;
        &self.orderings[i * n..(i + 1) * n]
    }

    pub fn edge_words_of(&self, i: usize) -> &[u64] {
        &self.edge_words[i * self.words_per_set..(i + 1) * self.words_per_set]
    }

    pub fn edge_set(&self, i: usize) -> EdgeSet {
        EdgeSet::from_words(self.n, self.edge_words_of(i))
    }

    /// Number of copies whose edge set contains `within`.
    pub fn extension_count(&self, within: &EdgeSet) -> u64 {
        assert_eq!(within.n(), self.n);
        let target = within.words();
        let wps = self.words_per_set;
        let all = &self.edge_words;
        par::sum_u64(self.count, |i| {
            let words = &all[i * wps..(i + 1) * wps];
            crate::bits::is_subset(target, words) as u64
        })
    }

    /// Number of distinct edge sets among the copies.
    pub fn distinct_edge_sets(&self) -> usize {
        let mut sets: Vec<&[u64]> = (0..self.count).map(|i| self.edge_words_of(i)).collect();
        sets.sort_unstable();
        sets.dedup();
        sets.len()
    }

    /// Index of the first copy contained in `g`, scanning catalog order.
    pub fn first_copy_within(&self, g: &Graph) -> Option<usize> {
        assert_eq!(g.n(), self.n);
        let host = g.edges().words();
        (0..self.count).find(|&i| crate::bits::is_subset(self.edge_words_of(i), host))
    }
}

fn write_power_words(order: &[u8], k: u32, n: u32, words: &mut [u64]) {
    let len = order.len();
    for i in 0..len {
        let u = order[i] as u32;
        for d in 1..=k as usize {
            let v = order[(i + d) % len] as u32;
            let e = Edge::new(u, v);
            let idx = e.index(n);
            words[idx / 64] |= 1 << (idx % 64);
        }
    }
}

/// Advances `a` to its lexicographic successor in place; false at the end.
fn next_permutation(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
