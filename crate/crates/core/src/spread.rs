//! Exact audits of the counting facts behind the spread analysis: the
//! spread scale `q`, extension-count and subgraph-count bounds, rooted
//! subgraph counts, overlap histograms between copies, and the binomial
//! identities driving the expected high-overlap count.
//!
//! Every comparison is carried out in integer or rational arithmetic.
//! Right-hand sides involving `e` or fractional powers are certified
//! enclosures with outward rounding, so a reported `holds` is trustworthy
//! while a failure may also mean the enclosure was too wide.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::copies::{CopyCatalog, CyclicOrdering};
use crate::error::{Error, Result};
use crate::exact::{
    big_to_rational, binomial, euler_interval, factorial, falling, mean_std, nth_root_interval,
    pow_rational, rational_of, RatInterval, ROOT_DIGITS,
};
use crate::graph::{complete_edge_count, stats, Edge, EdgeSet, EdgeSubsetStats, Graph};
use crate::rng::RngStream;
use crate::{bits, par};

/// Cap on exhaustive enumerations (subset tables, subgraph recursions).
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Certified enclosure of the spread scale q = (2/(n-1)!)^(1/(2n)) for the
/// square-cycle copy family on n vertices.
#[derive(Debug, Clone)]
pub struct SpreadParams {
    pub n: u32,
    pub q: RatInterval,
}

pub fn spread_params(n: u32) -> Result<SpreadParams> {
    Ok(SpreadParams {
        n,
        q: spread_scale_pow(n, 2 * n, 1)?,
    })
}

/// Enclosure of ((2/(n-1)!)^(1/copy_edges))^i. Exact whenever `copy_edges`
/// divides `i`, in particular at i = copy_edges where it is 2/(n-1)! itself.
pub fn spread_scale_pow(n: u32, copy_edges: u32, i: u32) -> Result<RatInterval> {
    if n < 3 {
        return Err(Error::VertexCountTooSmall { n, min: 3 });
    }
    assert!(copy_edges >= 1);
    if i == 0 {
        return Ok(RatInterval::exact(BigRational::one()));
    }
    let base = BigRational::new(2.into(), factorial(n as u64 - 1).into());
    if i.is_multiple_of(copy_edges) {
        return Ok(RatInterval::exact(pow_rational(&base, i / copy_edges)));
    }
    Ok(nth_root_interval(
        &pow_rational(&base, i),
        copy_edges,
        ROOT_DIGITS,
    ))
}

/// Outcome of one exact bound check. `holds` certifies lhs <= rhs against
/// the lower end of the enclosure, except for identity statements where it
/// records exact equality (noted on the producing function).
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub statement: &'static str,
    pub instance: String,
    pub lhs: BigRational,
    pub rhs: RatInterval,
    pub holds: bool,
}

impl AuditReport {
    fn bound(statement: &'static str, instance: String, lhs: BigRational, rhs: RatInterval) -> Self {
        let holds = rhs.certainly_at_least(&lhs);
        Self {
            statement,
            instance,
            lhs,
            rhs,
            holds,
        }
    }

    /// lhs < rhs with certainty (the strict form of `holds`).
    pub fn strict(&self) -> bool {
        self.lhs < self.rhs.lo
    }
}

/// Result of sweeping a bound over a whole instance family.
#[derive(Debug, Clone)]
pub struct ExhaustiveAudit {
    pub checked: u64,
    pub violations: Vec<AuditReport>,
}

impl ExhaustiveAudit {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

fn merge_vec_add(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Pascal table of C(p, j) for p <= max_p, j <= max_j.
fn binom_table(max_p: usize, max_j: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; max_j + 1]; max_p + 1];
    for (p, row) in t.iter_mut().enumerate() {
        row[0] = 1;
        for (j, slot) in row.iter_mut().enumerate().take(max_j.min(p) + 1).skip(1) {
            *slot = binomial(p as u64, j as u64).to_u64().expect("table overflow");
        }
    }
    t
}

/// Extension counts for every subset of `base` with at most `max_size`
/// edges, addressed by size block + colex rank of positions within `base`.
struct SubsetCounts {
    base_edges: Vec<Edge>,
    offsets: Vec<usize>,
    counts: Vec<u64>,
}

fn subset_extension_counts(
    catalog: &CopyCatalog,
    base: &EdgeSet,
    max_size: u32,
    budget: u64,
) -> Result<SubsetCounts> {
    let b = base.len() as usize;
    let max = (max_size as usize).min(b);
    let table = binom_table(b, max + 1);
    let mut offsets = vec![0usize; max + 2];
    for s in 0..=max {
        offsets[s + 1] = offsets[s] + table[b][s] as usize;
    }
    let total = offsets[max + 1];
    if total as u64 > budget {
        return Err(Error::EnumerationBudget(format!(
            "subset table of {total} entries exceeds budget {budget}"
        )));
    }
    let n = base.n();
    let mut pos = vec![u32::MAX; complete_edge_count(n) as usize];
    let base_edges: Vec<Edge> = base.iter().collect();
    for (p, e) in base_edges.iter().enumerate() {
        pos[e.index(n)] = p as u32;
    }
    let counts = par::fold_merge(
        catalog.len(),
        || vec![0u64; total],
        |mut acc, j| {
            let mut shared: SmallVec<[u32; 32]> = SmallVec::new();
            for (w, (cw, bw)) in catalog
                .edge_words_of(j)
                .iter()
                .zip(base.words())
                .enumerate()
            {
                let mut x = cw & bw;
                while x != 0 {
                    shared.push(pos[w * 64 + x.trailing_zeros() as usize]);
                    x &= x - 1;
                }
            }
            acc[0] += 1;
            subset_ranks(&shared, max, &table, &mut |s, rank| {
                acc[offsets[s] + rank] += 1
            });
            acc
        },
        merge_vec_add,
    );
    Ok(SubsetCounts {
        base_edges,
        offsets,
        counts,
    })
}

/// Emits (size, colex rank) for every nonempty subset of `shared` with at
/// most `max` elements. Positions must be strictly increasing.
fn subset_ranks(
    shared: &[u32],
    max: usize,
    table: &[Vec<u64>],
    emit: &mut impl FnMut(usize, usize),
) {
    fn rec(
        shared: &[u32],
        start: usize,
        depth: usize,
        max: usize,
        rank: usize,
        table: &[Vec<u64>],
        emit: &mut impl FnMut(usize, usize),
    ) {
        for idx in start..shared.len() {
            let r = rank + table[shared[idx] as usize][depth + 1] as usize;
            emit(depth + 1, r);
            if depth + 1 < max {
                rec(shared, idx + 1, depth + 1, max, r, table, emit);
            }
        }
    }
    if max > 0 {
        rec(shared, 0, 0, max, 0, table, emit);
    }
}

/// Visits every nonempty subset of positions 0..b with at most `max`
/// elements as (size, colex rank, positions).
fn for_each_subset(
    b: usize,
    max: usize,
    table: &[Vec<u64>],
    f: &mut impl FnMut(usize, usize, &[u32]),
) {
    fn rec(
        b: usize,
        start: usize,
        max: usize,
        rank: usize,
        table: &[Vec<u64>],
        chosen: &mut Vec<u32>,
        f: &mut impl FnMut(usize, usize, &[u32]),
    ) {
        for p in start..b {
            chosen.push(p as u32);
            let r = rank + table[p][chosen.len()] as usize;
            f(chosen.len(), r, chosen);
            if chosen.len() < max {
                rec(b, p + 1, max, r, table, chosen, f);
            }
            chosen.pop();
        }
    }
    if max > 0 {
        rec(b, 0, max, 0, table, &mut Vec::with_capacity(max), f);
    }
}

fn extension_bound_hypothesis(n: u32, edges: u32) -> Result<()> {
    if 3 * edges > n {
        return Err(Error::OutsideHypothesis(format!(
            "extension bound needs 3*edges <= n, got edges={edges} at n={n}"
        )));
    }
    Ok(())
}

fn extension_bound_report(n: u32, st: &EdgeSubsetStats, lhs: u64) -> AuditReport {
    let (l, c) = (st.edges as u64, st.components as u64);
    let arg = n as u64 - (l + c).div_ceil(2) - 1;
    let rhs = BigUint::from(16u32).pow(st.edges) * factorial(arg);
    AuditReport::bound(
        "extension_bound",
        format!("n={n} edges={l} components={c}"),
        big_to_rational(BigUint::from(lhs)),
        RatInterval::from_integer(rhs),
    )
}

/// Checks extension_count(I) <= 16^l * (n - ceil((l+c)/2) - 1)! where I has
/// l edges and c components. Valid for 3l <= n; the factorial argument stays
/// nonnegative there because c <= l.
pub fn check_extension_bound(catalog: &CopyCatalog, i_set: &EdgeSet) -> Result<AuditReport> {
    if i_set.n() != catalog.n() {
        return Err(Error::VertexCountMismatch {
            left: i_set.n(),
            right: catalog.n(),
        });
    }
    let st = stats(i_set);
    extension_bound_hypothesis(catalog.n(), st.edges)?;
    let lhs = catalog.extension_count(i_set);
    Ok(extension_bound_report(catalog.n(), &st, lhs))
}

/// Sweeps the extension bound over every subset of the identity copy with
/// at most `max_edges` edges. Extension counts are invariant under vertex
/// relabeling, so these subsets represent every subset of every copy.
pub fn audit_extension_bound_exhaustive(
    catalog: &CopyCatalog,
    max_edges: u32,
    budget: u64,
) -> Result<ExhaustiveAudit> {
    extension_bound_hypothesis(catalog.n(), max_edges)?;
    let n = catalog.n();
    let base = CyclicOrdering::identity(n).power_edges(catalog.k());
    let sc = subset_extension_counts(catalog, &base, max_edges, budget)?;
    let mut checked = 1u64;
    let mut violations = Vec::new();
    let empty = extension_bound_report(n, &stats(&EdgeSet::empty(n)), sc.counts[0]);
    if !empty.holds {
        violations.push(empty);
    }
    let table = binom_table(sc.base_edges.len(), max_edges as usize);
    for_each_subset(
        sc.base_edges.len(),
        max_edges as usize,
        &table,
        &mut |s, rank, positions| {
            let set = EdgeSet::from_edges(n, positions.iter().map(|&p| sc.base_edges[p as usize]));
            let rep = extension_bound_report(n, &stats(&set), sc.counts[sc.offsets[s] + rank]);
            checked += 1;
            if !rep.holds {
                violations.push(rep);
            }
        },
    );
    Ok(ExhaustiveAudit { checked, violations })
}

#[derive(Debug, Clone)]
pub enum ProfileMode {
    Exhaustive,
    Sampled { per_size: u64 },
}

#[derive(Debug, Clone)]
pub struct ProfileEntry {
    pub size: u32,
    pub examined: u64,
    pub max_extension: u64,
    pub max_local_spread: RatInterval,
    /// Some(true) when the maximum is certainly <= q, Some(false) when it
    /// certainly exceeds q, None when the enclosures overlap.
    pub within_q: Option<bool>,
    /// Approximate local spreads per sample; empty in exhaustive mode.
    pub sampled: Vec<f64>,
}

/// Maximum of (extension_count(I)/total)^(1/|I|) over edge subsets I of
/// copies, per requested size. Size 0 is skipped (undefined exponent).
/// Exhaustive mode scans subsets of the identity copy, which relabeling
/// invariance makes representative of all copies.
pub fn local_spread_profile(
    catalog: &CopyCatalog,
    sizes: &[u32],
    mode: ProfileMode,
    stream: RngStream,
) -> Result<Vec<ProfileEntry>> {
    let n = catalog.n();
    let q = spread_params(n)?.q;
    let total = catalog.len() as u64;
    let base = CyclicOrdering::identity(n).power_edges(catalog.k());
    let wanted: Vec<u32> = sizes
        .iter()
        .copied()
        .filter(|&s| s >= 1 && s <= base.len())
        .collect();
    let mut out = Vec::with_capacity(wanted.len());
    match mode {
        ProfileMode::Exhaustive => {
            let max_size = wanted.iter().copied().max().unwrap_or(0);
            let sc = subset_extension_counts(catalog, &base, max_size, DEFAULT_ENUM_BUDGET)?;
            for &s in &wanted {
                let block = &sc.counts[sc.offsets[s as usize]..sc.offsets[s as usize + 1]];
                let max_ext = block.iter().copied().max().expect("nonempty block");
                out.push(profile_entry(s, block.len() as u64, max_ext, total, &q, Vec::new()));
            }
        }
        ProfileMode::Sampled { per_size } => {
            if per_size == 0 {
                return Err(Error::DegenerateData("sampled profile needs per_size >= 1".into()));
            }
            let mut rng = stream.rng();
            for &s in &wanted {
                let mut max_ext = 0u64;
                let mut sampled = Vec::with_capacity(per_size as usize);
                for _ in 0..per_size {
                    let j = rand::Rng::gen_range(&mut rng, 0..catalog.len());
                    let copy_edges: Vec<Edge> = catalog.edge_set(j).iter().collect();
                    let subset =
                        crate::graph::sample_subset(n, &copy_edges, s as usize, &mut rng);
                    let ext = catalog.extension_count(&subset);
                    debug_assert!(ext >= 1, "subsets of a copy always extend");
                    max_ext = max_ext.max(ext);
                    sampled.push((ext as f64 / total as f64).powf(1.0 / s as f64));
                }
                out.push(profile_entry(s, per_size, max_ext, total, &q, sampled));
            }
        }
    }
    Ok(out)
}

fn profile_entry(
    size: u32,
    examined: u64,
    max_ext: u64,
    total: u64,
    q: &RatInterval,
    sampled: Vec<f64>,
) -> ProfileEntry {
    let ratio = rational_of(max_ext, total);
    let spread = if size == 1 {
        RatInterval::exact(ratio)
    } else {
        nth_root_interval(&ratio, size, ROOT_DIGITS)
    };
    let within_q = if spread.hi <= q.lo {
        Some(true)
    } else if spread.lo > q.hi {
        Some(false)
    } else {
        None
    };
    ProfileEntry {
        size,
        examined,
        max_extension: max_ext,
        max_local_spread: spread,
        within_q,
        sampled,
    }
}

fn subgraph_count_rhs(h: u32, l: u32, c: u32) -> RatInterval {
    let scale = big_to_rational(BigUint::from(8u32).pow(l) * binomial(2 * h as u64, c as u64));
    euler_interval().pow(l).scale(&scale)
}

/// Counts l-edge, c-component subgraphs of `f` by enumeration and checks
/// the count against (8e)^l * C(2h, c) with h = |f|.
pub fn check_subgraph_count_bound(f: &EdgeSet, l: u32, c: u32, budget: u64) -> Result<AuditReport> {
    let h = f.len();
    let work = binomial(h as u64, l as u64);
    if work > BigUint::from(budget) {
        return Err(Error::EnumerationBudget(format!(
            "C({h},{l}) subsets exceed budget {budget}"
        )));
    }
    let edges: Vec<Edge> = f.iter().collect();
    let mut count = 0u64;
    let table = binom_table(h as usize, l as usize);
    if l == 0 {
        count = (c == 0) as u64;
    } else {
        for_each_subset(h as usize, l as usize, &table, &mut |s, _rank, positions| {
            if s == l as usize {
                let sub = EdgeSet::from_edges(f.n(), positions.iter().map(|&p| edges[p as usize]));
                if stats(&sub).components == c {
                    count += 1;
                }
            }
        });
    }
    Ok(AuditReport::bound(
        "subgraph_count_bound",
        format!("h={h} edges={l} components={c}"),
        big_to_rational(BigUint::from(count)),
        subgraph_count_rhs(h, l, c),
    ))
}

/// One pass over all subsets of `f`, reporting every (l, c) pair that
/// occurs. Budget bounds the 2^h enumeration.
pub fn audit_subgraph_count_bound_all(f: &EdgeSet, budget: u64) -> Result<Vec<AuditReport>> {
    let h = f.len();
    if h >= 63 || (1u64 << h) > budget {
        return Err(Error::EnumerationBudget(format!(
            "2^{h} subsets exceed budget {budget}"
        )));
    }
    let edges: Vec<Edge> = f.iter().collect();
    let mut counts = vec![vec![0u64; h as usize + 1]; h as usize + 1];
    for mask in 0u64..(1u64 << h) {
        let sub = EdgeSet::from_edges(
            f.n(),
            edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e),
        );
        let st = stats(&sub);
        counts[st.edges as usize][st.components as usize] += 1;
    }
    let mut out = Vec::new();
    for l in 0..=h {
        for c in 0..=l {
            let cnt = counts[l as usize][c as usize];
            if cnt > 0 {
                out.push(AuditReport::bound(
                    "subgraph_count_bound",
                    format!("h={h} edges={l} components={c}"),
                    big_to_rational(BigUint::from(cnt)),
                    subgraph_count_rhs(h, l, c),
                ));
            }
        }
    }
    Ok(out)
}

/// Number of v-vertex subtrees of the infinite rooted tree where every node
/// has `delta` children, counted by composition recursion over child loads.
pub fn rooted_subtree_count(delta: u32, v: u32) -> BigUint {
    assert!(delta >= 1);
    let mut t: Vec<BigUint> = vec![BigUint::one()];
    for size in 1..=v as usize {
        let mut acc = vec![BigUint::zero(); size];
        acc[0] = BigUint::one();
        for _ in 0..delta {
            let mut next = vec![BigUint::zero(); size];
            for (i, a) in acc.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, b) in t.iter().enumerate().take(size - i) {
                    next[i + j] += a * b;
                }
            }
            acc = next;
        }
        t.push(acc[size - 1].clone());
    }
    t[v as usize].clone()
}

/// Closed form C(delta*v, v) / ((delta-1)*v + 1) for the same count.
pub fn rooted_subtree_formula(delta: u32, v: u32) -> BigUint {
    assert!(delta >= 1);
    let num = binomial(delta as u64 * v as u64, v as u64);
    let den = BigUint::from((delta as u64 - 1) * v as u64 + 1);
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Counts connected subgraphs of `g` with exactly `h` edges whose vertex
/// set contains `root`. Each subgraph is generated once by extending a
/// boundary edge and banning the already-tried alternatives.
pub fn count_connected_subgraphs(g: &Graph, root: u32, h: u32, budget: u64) -> Result<u64> {
    if root >= g.n() {
        return Err(Error::DegenerateData(format!(
            "root {root} out of range for n = {}",
            g.n()
        )));
    }
    let edges: Vec<Edge> = g.edges().iter().collect();
    let mut incident: Vec<SmallVec<[u32; 8]>> = vec![SmallVec::new(); g.n() as usize];
    for (i, e) in edges.iter().enumerate() {
        incident[e.u() as usize].push(i as u32);
        incident[e.v() as usize].push(i as u32);
    }
    let mut st = SubgraphSearch {
        edges: &edges,
        incident: &incident,
        h: h as usize,
        budget,
        nodes: 0,
        banned: vec![false; edges.len()],
        chosen: vec![false; edges.len()],
        vmask: 1u64 << root,
    };
    st.run(0)
}

struct SubgraphSearch<'a> {
    edges: &'a [Edge],
    incident: &'a [SmallVec<[u32; 8]>],
    h: usize,
    budget: u64,
    nodes: u64,
    banned: Vec<bool>,
    chosen: Vec<bool>,
    vmask: u64,
}

impl SubgraphSearch<'_> {
    fn run(&mut self, depth: usize) -> Result<u64> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::EnumerationBudget(format!(
                "connected subgraph enumeration exceeded {} nodes",
                self.budget
            )));
        }
        if depth == self.h {
            return Ok(1);
        }
        let mut boundary: SmallVec<[u32; 32]> = SmallVec::new();
        let mut vm = self.vmask;
        while vm != 0 {
            let v = vm.trailing_zeros();
            vm &= vm - 1;
            for &ei in &self.incident[v as usize] {
                if !self.banned[ei as usize] && !self.chosen[ei as usize] {
                    boundary.push(ei);
                }
            }
        }
        boundary.sort_unstable();
        boundary.dedup();
        let mut total = 0u64;
        for &ei in &boundary {
            let e = self.edges[ei as usize];
            self.chosen[ei as usize] = true;
            let saved = self.vmask;
            self.vmask |= (1u64 << e.u()) | (1u64 << e.v());
            let r = self.run(depth + 1);
            self.chosen[ei as usize] = false;
            self.vmask = saved;
            total += r?;
            self.banned[ei as usize] = true;
        }
        for &ei in &boundary {
            self.banned[ei as usize] = false;
        }
        Ok(total)
    }
}

/// Checks that the number of connected h-edge subgraphs through `root` is
/// at most (e*maxdeg)^h.
pub fn check_rooted_subgraph_bound(
    g: &Graph,
    root: u32,
    h: u32,
    budget: u64,
) -> Result<AuditReport> {
    if h == 0 {
        return Err(Error::DegenerateData("subgraph bound needs h >= 1".into()));
    }
    let adj = g.adjacency();
    let delta = adj.iter().map(|row| row.count_ones()).max().unwrap_or(0);
    let lhs = count_connected_subgraphs(g, root, h, budget)?;
    let rhs = euler_interval()
        .pow(h)
        .scale(&big_to_rational(BigUint::from(delta as u64).pow(h)));
    Ok(AuditReport::bound(
        "rooted_subgraph_bound",
        format!("n={} root={root} h={h} max_degree={delta}", g.n()),
        big_to_rational(BigUint::from(lhs)),
        rhs,
    ))
}

fn component_edge_report(n: u32, st: &EdgeSubsetStats) -> AuditReport {
    let rhs = 2 * st.vertices as i64 - 3 * st.components as i64;
    debug_assert!(rhs >= 0, "components have at least two vertices");
    AuditReport::bound(
        "component_edge_bound",
        format!(
            "n={n} edges={} vertices={} components={}",
            st.edges, st.vertices, st.components
        ),
        big_to_rational(BigUint::from(st.edges as u64)),
        RatInterval::from_integer(BigUint::from(rhs as u64)),
    )
}

/// Checks edges <= 2*vertices - 3*components. Holds for every edge subset
/// of a copy with at most n/3 edges: components that small cannot wrap
/// around the cycle, so each spans a subpath.
pub fn check_component_edge_bound(i_set: &EdgeSet) -> Result<AuditReport> {
    let st = stats(i_set);
    extension_bound_hypothesis(i_set.n(), st.edges)?;
    Ok(component_edge_report(i_set.n(), &st))
}

/// Sweeps the component edge bound over all subsets of the identity copy's
/// edges with at most `max_edges` edges. Needs no catalog.
pub fn audit_component_edge_bound_exhaustive(
    n: u32,
    k: u32,
    max_edges: u32,
    budget: u64,
) -> Result<ExhaustiveAudit> {
    extension_bound_hypothesis(n, max_edges)?;
    let base = CyclicOrdering::identity(n).power_edges(k);
    let b = base.len() as usize;
    let max = max_edges as usize;
    let table = binom_table(b, max + 1);
    let total: u64 = (0..=max).map(|s| table[b][s]).sum();
    if total > budget {
        return Err(Error::EnumerationBudget(format!(
            "{total} subsets exceed budget {budget}"
        )));
    }
    let base_edges: Vec<Edge> = base.iter().collect();
    let mut checked = 1u64;
    let mut violations = Vec::new();
    for_each_subset(b, max, &table, &mut |_s, _rank, positions| {
        let set = EdgeSet::from_edges(n, positions.iter().map(|&p| base_edges[p as usize]));
        let rep = component_edge_report(n, &stats(&set));
        checked += 1;
        if !rep.holds {
            violations.push(rep);
        }
    });
    Ok(ExhaustiveAudit { checked, violations })
}

/// Distribution of |edges(J) ∩ edges(S)| over all copies J, for a fixed
/// copy S. Vertex-transitivity makes the histogram independent of S.
#[derive(Debug, Clone)]
pub struct OverlapHistogram {
    pub n: u32,
    /// Edges per copy; counts and f are indexed by overlap 0..=copy_edges.
    pub copy_edges: u32,
    pub counts: Vec<u64>,
    pub f: Vec<BigRational>,
    pub total: BigUint,
}

pub fn overlap_histogram(catalog: &CopyCatalog) -> OverlapHistogram {
    overlap_histogram_for(catalog, &CyclicOrdering::identity(catalog.n()))
}

pub fn overlap_histogram_for(catalog: &CopyCatalog, s: &CyclicOrdering) -> OverlapHistogram {
    assert_eq!(s.n(), catalog.n());
    let base = s.power_edges(catalog.k());
    let len = base.len() as usize + 1;
    let counts = par::fold_merge(
        catalog.len(),
        || vec![0u64; len],
        |mut acc, j| {
            acc[bits::intersection_count(catalog.edge_words_of(j), base.words()) as usize] += 1;
            acc
        },
        merge_vec_add,
    );
    let total = BigUint::from(catalog.len() as u64);
    let f = counts
        .iter()
        .map(|&c| BigRational::new(c.into(), (catalog.len() as u64).into()))
        .collect();
    OverlapHistogram {
        n: catalog.n(),
        copy_edges: base.len(),
        counts,
        f,
        total,
    }
}

#[derive(Debug, Clone)]
pub struct OverlapBound {
    pub i: u32,
    pub report: AuditReport,
    /// f_i * n^(i/2), reported for inspection; the fraction bound is only
    /// informative while this stays moderate.
    pub scaled_ratio: f64,
}

/// Checks f_i <= C(copy_edges, i) * q^i for ceil(n/3) <= i <= copy_edges.
pub fn check_overlap_fraction_bounds(hist: &OverlapHistogram) -> Result<Vec<OverlapBound>> {
    let n = hist.n;
    let mut out = Vec::new();
    for i in n.div_ceil(3)..=hist.copy_edges {
        let rhs = spread_scale_pow(n, hist.copy_edges, i)?
            .scale(&big_to_rational(binomial(hist.copy_edges as u64, i as u64)));
        let f = hist.f[i as usize].clone();
        let scaled_ratio =
            f.to_f64().unwrap_or(f64::NAN) * (n as f64).sqrt().powi(i as i32);
        out.push(OverlapBound {
            i,
            report: AuditReport::bound(
                "overlap_fraction_bound",
                format!("n={n} i={i}"),
                f,
                rhs,
            ),
            scaled_ratio,
        });
    }
    Ok(out)
}

/// Exact expectation of |{copies J ⊆ S ∪ Y : |edges(J) ∩ edges(S)| >= k_cut}|
/// for Y uniform over w'-subsets of the non-S edges:
/// sum over i >= k_cut of counts[i] * C(w', L-i) / C(m-L, L-i), L = copy_edges.
pub fn expected_high_overlap(
    hist: &OverlapHistogram,
    w_prime: u64,
    k_cut: u32,
) -> Result<BigRational> {
    let l = hist.copy_edges;
    let free = complete_edge_count(hist.n) - l as u64;
    if w_prime > free {
        return Err(Error::OutsideHypothesis(format!(
            "w'={w_prime} exceeds the {free} edges outside a copy at n={}",
            hist.n
        )));
    }
    let mut sum = BigRational::zero();
    for i in k_cut..=l {
        let cnt = hist.counts[i as usize];
        if cnt == 0 {
            continue;
        }
        let need = (l - i) as u64;
        let den = binomial(free, need);
        debug_assert!(!den.is_zero(), "a copy never needs more edges than exist");
        let num = BigUint::from(cnt) * binomial(w_prime, need);
        sum += BigRational::new(num.into(), den.into());
    }
    Ok(sum)
}

#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Monte Carlo cross-check of `expected_high_overlap`: draws Y directly and
/// counts qualifying copies by catalog scan.
pub fn expected_high_overlap_mc(
    catalog: &CopyCatalog,
    w_prime: u64,
    k_cut: u32,
    samples: u64,
    stream: RngStream,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::DegenerateData("need at least one sample".into()));
    }
    let n = catalog.n();
    let s = CyclicOrdering::identity(n).power_edges(catalog.k());
    let pool: Vec<Edge> = EdgeSet::complete(n).difference(&s).iter().collect();
    if w_prime > pool.len() as u64 {
        return Err(Error::OutsideHypothesis(format!(
            "w'={w_prime} exceeds the {} edges outside a copy at n={n}",
            pool.len()
        )));
    }
    let mut rng = stream.rng();
    let mut vals = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let y = crate::graph::sample_subset(n, &pool, w_prime as usize, &mut rng);
        let host = s.union(&y);
        let hit = par::sum_u64(catalog.len(), |j| {
            let w = catalog.edge_words_of(j);
            (bits::is_subset(w, host.words()) && bits::intersection_count(w, s.words()) >= k_cut)
                as u64
        });
        vals.push(hit as f64);
    }
    let (mean, std) = mean_std(&vals);
    Ok(McEstimate {
        mean,
        std_error: std / (samples as f64).sqrt(),
        samples,
    })
}

/// Verifies the exact identity
/// [C(w',2n-i)/C(m-2n,2n-i)] / [C(w'+2n,2n)/C(m,2n)]
///   = (w')_{2n-i}/(w'+2n)_{2n-i} * (m)_{2n-i}/(m-2n)_{2n-i} * (m-2n+i)_i/(w'+i)_i
/// in rational arithmetic. `holds` records exact equality, not <=.
pub fn check_overlap_ratio_identity(n: u32, w_prime: u64, i: u32) -> Result<AuditReport> {
    if n < 5 {
        return Err(Error::VertexCountTooSmall { n, min: 5 });
    }
    let m = complete_edge_count(n);
    let l = 2 * n as u64;
    let i = i as u64;
    if i > l {
        return Err(Error::OutsideHypothesis(format!("i={i} exceeds 2n={l}")));
    }
    let need = l - i;
    if need > m - l {
        return Err(Error::OutsideHypothesis(format!(
            "C({}, {need}) undefined: overlap i={i} is below 4n-m",
            m - l
        )));
    }
    let lhs = big_to_rational(binomial(w_prime, need) * binomial(m, l))
        / big_to_rational(binomial(m - l, need) * binomial(w_prime + l, l));
    let rhs = big_to_rational(falling(w_prime, need) * falling(m, need) * falling(m - l + i, i))
        / big_to_rational(
            falling(w_prime + l, need) * falling(m - l, need) * falling(w_prime + i, i),
        );
    let holds = lhs == rhs;
    Ok(AuditReport {
        statement: "overlap_ratio_identity",
        instance: format!("n={n} w'={w_prime} i={i}"),
        lhs,
        rhs: RatInterval::exact(rhs),
        holds,
    })
}
