//! Exact searches over cyclic orderings: the containment decision "does G
//! have a spanning k-th power of a Hamilton cycle", and the constrained
//! variant that minimizes how many edges a copy needs outside a given set.
//!
//! Both are depth-first searches that extend a vertex sequence; an appended
//! vertex must be adjacent to the previous k placed, with wrap constraints
//! arming for the last k positions, so a completed sequence is a genuine
//! copy with no post-check. Rotation is killed by fixing the root, the
//! reflection by requiring `order[1] < order[n-1]`. Exceeded budgets always
//! surface as an explicit unknown, never as a false "no".

use crate::copies::CyclicOrdering;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, Graph};
use crate::rng::RngStream;
use rand::seq::SliceRandom;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    /// Maximum vertex placements before giving up.
    pub node_limit: u64,
    /// Wall-clock cap, checked coarsely; `None` keeps searches
    /// deterministic.
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self {
            node_limit: u64::MAX,
            time_limit: None,
        }
    }

    pub fn nodes(node_limit: u64) -> Self {
        Self {
            node_limit,
            time_limit: None,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::unlimited()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStatus {
    /// A copy exists; the witness ordering is canonical.
    Found(CyclicOrdering),
    /// Complete search, no copy.
    ExhaustedNo,
    /// Budget ran out first.
    BudgetUnknown,
}

impl SearchStatus {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchStatus::Found(_))
    }

    pub fn witness(&self) -> Option<&CyclicOrdering> {
        match self {
            SearchStatus::Found(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub nodes_expanded: u64,
}

/// Decides containment of the k-th power of a Hamilton cycle, with
/// fail-first value ordering (rng breaks ties) and degree pruning.
pub fn find_power_ham(
    g: &Graph,
    k: u32,
    budget: &SearchBudget,
    stream: RngStream,
) -> Result<SearchOutcome> {
    find_power_ham_with(g, k, budget, stream, true)
}

/// Same search with the degree-pruning lookahead switchable; the toggle
/// never changes the decision, only the node count.
pub fn find_power_ham_with(
    g: &Graph,
    k: u32,
    budget: &SearchBudget,
    stream: RngStream,
    degree_pruning: bool,
) -> Result<SearchOutcome> {
    if k == 0 {
        return Err(Error::OutsideHypothesis("power must be at least 1".into()));
    }
    if g.n() < 3 {
        return Err(Error::VertexCountTooSmall { n: g.n(), min: 3 });
    }
    let n = g.n() as usize;
    let adj = g.adjacency();
    // Every copy is spanning, so rooting at a minimum-degree vertex is
    // free and anchors the search at the most constrained spot.
    let root = (0..n)
        .min_by_key(|&v| adj[v].count_ones())
        .unwrap() as u8;
    let mut tiebreak: Vec<u8> = (0..n as u8).collect();
    tiebreak.shuffle(&mut stream.rng());
    let mut rank = vec![0u8; n];
    for (pos, &v) in tiebreak.iter().enumerate() {
        rank[v as usize] = pos as u8;
    }

    let mut search = Search {
        n,
        k: k as usize,
        adj: &adj,
        rank: &rank,
        budget: *budget,
        started: Instant::now(),
        degree_pruning,
        order: vec![0; n],
        placed: 0,
        nodes: 0,
    };
    let status = match search.run(root) {
        Flow::Found => {
            let witness = CyclicOrdering::from_cycle(&search.order)?;
            debug_assert!(witness.power_edges(k).is_subset_of(g.edges()));
            SearchStatus::Found(witness)
        }
        Flow::Exhausted => SearchStatus::ExhaustedNo,
        Flow::OutOfBudget => SearchStatus::BudgetUnknown,
    };
    Ok(SearchOutcome {
        status,
        nodes_expanded: search.nodes,
    })
}

enum Flow {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    n: usize,
    k: usize,
    adj: &'a [u64],
    rank: &'a [u8],
    budget: SearchBudget,
    started: Instant,
    degree_pruning: bool,
    order: Vec<u8>,
    placed: u64,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, root: u8) -> Flow {
        self.order[0] = root;
        self.placed = 1 << root;
        self.nodes = 1;
        if self.degree_pruning && !self.lookahead_ok(0) {
            return Flow::Exhausted;
        }
        self.extend(1)
    }

    fn over_budget(&self) -> bool {
        if self.nodes >= self.budget.node_limit {
            return true;
        }
        match self.budget.time_limit {
            // Coarse check keeps the hot loop cheap.
            Some(limit) => self.nodes.is_multiple_of(4096) && self.started.elapsed() > limit,
            None => false,
        }
    }

    /// Vertices adjacent to every placed vertex at cyclic distance <= k
    /// from position `t`.
    fn candidate_mask(&self, t: usize) -> u64 {
        let mut mask = !self.placed & (u64::MAX >> (64 - self.n));
        for d in 1..=self.k.min(t) {
            mask &= self.adj[self.order[t - d] as usize];
        }
        for d in 1..=self.k {
            if t + d >= self.n {
                mask &= self.adj[self.order[t + d - self.n] as usize];
            }
        }
        mask
    }

    /// Every unplaced vertex must still see min(2k, n-1) potential
    /// cycle-neighbors: unplaced vertices, the last k placed, or the first
    /// k placed.
    fn lookahead_ok(&self, t: usize) -> bool {
        let unplaced = !self.placed & (u64::MAX >> (64 - self.n));
        let mut reachable = unplaced;
        for d in 0..self.k.min(t + 1) {
            reachable |= 1 << self.order[t - d];
            reachable |= 1 << self.order[d];
        }
        let need = (2 * self.k).min(self.n - 1) as u32;
        let mut rest = unplaced;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (self.adj[w] & reachable).count_ones() < need {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, t: usize) -> Flow {
        if t == self.n {
            return Flow::Found;
        }
        let above_order1 = u64::MAX.checked_shl(self.order[1] as u32 + 1).unwrap_or(0);
        if t >= 2 && (!self.placed & above_order1) == 0 {
            // order[n-1] must exceed order[1] and no unplaced vertex can.
            return Flow::Exhausted;
        }
        let mut mask = self.candidate_mask(t);
        if t == self.n - 1 {
            // Keep the representative with order[1] < order[n-1].
            mask &= above_order1;
        }
        // Fail-first: try the candidate with the fewest follow-ups.
        let mut cands: Vec<(u32, u8, u8)> = Vec::with_capacity(mask.count_ones() as usize);
        let mut rest = mask;
        while rest != 0 {
            let u = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            self.order[t] = u;
            self.placed |= 1 << u;
            let followers = if t + 1 == self.n {
                0
            } else {
                self.candidate_mask(t + 1).count_ones()
            };
            self.placed &= !(1 << u);
            cands.push((followers, self.rank[u as usize], u));
        }
        cands.sort_unstable();
        for (_, _, u) in cands {
            if self.over_budget() {
                return Flow::OutOfBudget;
            }
            self.nodes += 1;
            self.order[t] = u;
            self.placed |= 1 << u;
            let viable =
                !self.degree_pruning || t + 1 == self.n || self.lookahead_ok(t);
            if viable {
                match self.extend(t + 1) {
                    Flow::Exhausted => {}
                    other => return other,
                }
            }
            self.placed &= !(1 << u);
        }
        Flow::Exhausted
    }
}

/// Outcome of a capped fragment minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentSearch {
    /// The minimum fragment size, which is <= the cap.
    Min(u32),
    /// Complete search: every fragment exceeds the cap.
    ExceedsCap,
    /// Budget ran out before the search completed.
    Unknown,
}

impl FragmentSearch {
    pub fn value(&self) -> Option<u32> {
        match self {
            FragmentSearch::Min(v) => Some(*v),
            _ => None,
        }
    }
}

/// The copy achieving a fragment minimum, with its fragment (the copy's
/// power edges outside `W`).
#[derive(Debug, Clone)]
pub struct FragmentWitness {
    pub copy: CyclicOrdering,
    pub fragment: EdgeSet,
}

/// Minimum, over copies J with power edges inside `power_edges(S) ∪ W`, of
/// the number of J's power edges outside `W`; branch-and-bound pruned above
/// `cap`.
pub fn min_fragment(
    s: &CyclicOrdering,
    w: &EdgeSet,
    k: u32,
    cap: u32,
    budget: &SearchBudget,
) -> Result<FragmentSearch> {
    Ok(min_fragment_witness(s, w, k, cap, budget)?.0)
}

/// [`min_fragment`] plus the minimizing copy whenever a minimum was found.
pub fn min_fragment_witness(
    s: &CyclicOrdering,
    w: &EdgeSet,
    k: u32,
    cap: u32,
    budget: &SearchBudget,
) -> Result<(FragmentSearch, Option<FragmentWitness>)> {
    let n = s.n();
    if w.n() != n {
        return Err(Error::VertexCountMismatch {
            left: n,
            right: w.n(),
        });
    }
    if k == 0 || n < 2 * k + 1 {
        return Err(Error::OutsideHypothesis(format!(
            "fragments need n >= 2k+1 and k >= 1, got n = {n}, k = {k}"
        )));
    }
    let host_edges = s.power_edges(k).union(w);
    let host = Graph::new(n, host_edges);
    let adj = host.adjacency();
    // S itself is always a copy inside S ∪ W, so the minimum exists and is
    // at most k*n; capping there keeps the sentinel arithmetic safe.
    let cap_eff = cap.min(k * n);
    let mut search = FragSearch {
        n: n as usize,
        k: k as usize,
        adj: &adj,
        free: w,
        budget: *budget,
        started: Instant::now(),
        order: vec![0; n as usize],
        placed: 0,
        nodes: 0,
        best: cap_eff + 1,
        best_order: None,
        complete: true,
    };
    search.extend(1, 0);
    let status = if search.best <= cap_eff {
        FragmentSearch::Min(search.best)
    } else if search.complete {
        FragmentSearch::ExceedsCap
    } else {
        FragmentSearch::Unknown
    };
    let witness = match status {
        FragmentSearch::Min(v) => search.best_order.map(|o| {
            let copy = CyclicOrdering::from_cycle(&o).expect("search emits canonical cycles");
            let fragment = copy.power_edges(k).difference(w);
            debug_assert_eq!(fragment.len(), v);
            FragmentWitness { copy, fragment }
        }),
        _ => None,
    };
    Ok((status, witness))
}

/// Catalog oracle for [`min_fragment`]: scans every copy. Never unknown.
pub fn min_fragment_exhaustive(
    catalog: &crate::copies::CopyCatalog,
    s: &CyclicOrdering,
    w: &EdgeSet,
    cap: u32,
) -> FragmentSearch {
    assert_eq!(catalog.n(), s.n());
    let host = s.power_edges(catalog.k()).union(w);
    let host_words = host.words();
    let w_words = w.words();
    let mut best = u32::MAX;
    for i in 0..catalog.len() {
        let jw = catalog.edge_words_of(i);
        if crate::bits::is_subset(jw, host_words) {
            best = best.min(crate::bits::difference_count(jw, w_words));
        }
    }
    if best <= cap {
        FragmentSearch::Min(best)
    } else {
        FragmentSearch::ExceedsCap
    }
}

struct FragSearch<'a> {
    n: usize,
    k: usize,
    adj: &'a [u64],
    free: &'a EdgeSet,
    budget: SearchBudget,
    started: Instant,
    order: Vec<u8>,
    placed: u64,
    nodes: u64,
    best: u32,
    best_order: Option<Vec<u8>>,
    complete: bool,
}

impl FragSearch<'_> {
    /// Cost a placement adds: power edges from `u` to already-placed
    /// cyclic neighbors that are not in the free set. Every power edge of
    /// the finished copy is charged exactly once (n >= 2k+1).
    fn placement_cost(&self, u: u8, t: usize) -> u32 {
        let mut cost = 0;
        for d in 1..=self.k.min(t) {
            let v = self.order[t - d];
            if !self.free.contains(Edge::new(u as u32, v as u32)) {
                cost += 1;
            }
        }
        for d in 1..=self.k {
            if t + d >= self.n {
                let v = self.order[t + d - self.n];
                if !self.free.contains(Edge::new(u as u32, v as u32)) {
                    cost += 1;
                }
            }
        }
        cost
    }

    fn candidate_mask(&self, t: usize) -> u64 {
        let mut mask = !self.placed & (u64::MAX >> (64 - self.n));
        for d in 1..=self.k.min(t) {
            mask &= self.adj[self.order[t - d] as usize];
        }
        for d in 1..=self.k {
            if t + d >= self.n {
                mask &= self.adj[self.order[t + d - self.n] as usize];
            }
        }
        mask
    }

    fn extend(&mut self, t: usize, cost: u32) {
        if t == 1 {
            // Root at 0: every copy is spanning.
            self.order[0] = 0;
            self.placed = 1;
            self.nodes = 1;
        }
        if t == self.n {
            // The cost prune guarantees completions strictly improve.
            debug_assert!(cost < self.best);
            self.best = cost;
            self.best_order = Some(self.order.clone());
            return;
        }
        let above_order1 = u64::MAX.checked_shl(self.order[1] as u32 + 1).unwrap_or(0);
        if t >= 2 && (!self.placed & above_order1) == 0 {
            return;
        }
        let mut mask = self.candidate_mask(t);
        if t == self.n - 1 {
            mask &= above_order1;
        }
        let mut rest = mask;
        while rest != 0 {
            let u = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            if self.best == 0 {
                return;
            }
            if self.nodes >= self.budget.node_limit
                || self
                    .budget
                    .time_limit
                    .is_some_and(|l| self.nodes.is_multiple_of(4096) && self.started.elapsed() > l)
            {
                self.complete = false;
                return;
            }
            let next_cost = cost + self.placement_cost(u, t);
            // Cost only grows along a branch, so the bound is admissible.
            if next_cost >= self.best {
                continue;
            }
            self.nodes += 1;
            self.order[t] = u;
            self.placed |= 1 << u;
            self.extend(t + 1, next_cost);
            self.placed &= !(1 << u);
        }
    }
}
