//! Two-round exposure experiments.
//!
//! The first exposure round draws W0, each Hamilton-square copy S is
//! classified by the minimum number of edges its best completion still
//! needs after W0 (its minimum fragment), and the good copies contribute
//! one padded fragment each to a family whose members the second round W1
//! must cover. Counting covered members gives a statistic X whose second
//! moment controls the failure probability; every positive X is
//! cross-checked against the direct solver on W0 union W1.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::bits;
use crate::copies::{CopyCatalog, CyclicOrdering};
use crate::error::{Error, Result};
use crate::exact::{big_to_rational, binomial, wilson_interval};
use crate::graph::{
    check_vertex_count, complete_edge_count, sample_gnp_prob, sample_subset, Edge, EdgeSet, Graph,
};
use crate::par;
use crate::rng::{pack_stream, Prob, RngStream};
use crate::solver::{
    find_power_ham, min_fragment, min_fragment_witness, FragmentSearch, SearchBudget, SearchStatus,
};

/// Confidence level used by every Wilson interval in this module.
pub const CI_Z: f64 = 1.96;

const STREAM_CENSUS: u64 = 1;
const STREAM_ASSESS: u64 = 2;
const STREAM_ROUND: u64 = 3;
const STREAM_COVER_SIM: u64 = 4;

/// Per-trial RNG stream, disjoint across (kind, cell, trial) by construction.
fn substream(base: RngStream, kind: u64, cell: u64, trial: u64) -> RngStream {
    base.with_stream(base.stream_id.wrapping_add(pack_stream(kind, cell, trial)))
}

/// Parameters of a two-round exposure at a given vertex count.
///
/// Both rounds sample edges at `const / sqrt(n)`; the first-round constant
/// is a surrogate for the (large, unquantified) constant the absorption
/// argument needs, so small-n runs usually push `p0` to 1.
#[derive(Debug, Clone)]
pub struct TwoRoundPlan {
    pub n: u32,
    pub c0_surrogate: f64,
    pub big_c: f64,
    pub p0: Prob,
    pub p1: Prob,
    /// Exact inclusion probability of the union of the two rounds,
    /// p0 + p1 - p0 p1 over the dyadic values actually sampled.
    pub p: BigRational,
    /// Fragment cutoff: pairs whose minimum fragment has at most this many
    /// edges are good. Defaults to ceil(4 sqrt(n)).
    pub k: u32,
    /// First-round edge count for fixed-size censuses, ceil(big_c n^{3/2})
    /// by default. Consumers clamp it to the complete-graph edge count.
    pub w: u64,
}

impl TwoRoundPlan {
    pub fn new(n: u32, c0_surrogate: f64, big_c: f64) -> Result<Self> {
        check_vertex_count(n)?;
        if n < 5 {
            return Err(Error::VertexCountTooSmall { n, min: 5 });
        }
        let root = (n as f64).sqrt();
        let p0 = Prob::from_f64(c0_surrogate / root)?;
        let p1 = Prob::from_f64(big_c / root)?;
        let p = p0.union(&p1);
        let w = (big_c * n as f64 * root).ceil() as u64;
        Ok(Self {
            n,
            c0_surrogate,
            big_c,
            p0,
            p1,
            p,
            k: default_fragment_cutoff(n),
            w,
        })
    }

    pub fn with_cutoff(mut self, k: u32) -> Self {
        assert!(k >= 1, "cutoff must be positive");
        self.k = k;
        self
    }

    pub fn with_first_round_size(mut self, w: u64) -> Self {
        self.w = w;
        self
    }

    /// First-round size usable on K_n, `w` clamped to the edge count.
    pub fn clamped_w(&self) -> u64 {
        self.w.min(complete_edge_count(self.n))
    }
}

/// ceil(4 sqrt(n)) in exact integer arithmetic.
pub fn default_fragment_cutoff(n: u32) -> u32 {
    let target = 16 * u64::from(n);
    let s = target.isqrt();
    (if s * s == target { s } else { s + 1 }) as u32
}

/// Outcome of classifying one (copy, first-round set) pair.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub s: CyclicOrdering,
    pub w: EdgeSet,
    pub min_fragment: FragmentSearch,
}

impl PairClassification {
    /// Some(true) good, Some(false) bad, None unresolved within budget.
    pub fn good(&self) -> Option<bool> {
        match self.min_fragment {
            FragmentSearch::Min(_) => Some(true),
            FragmentSearch::ExceedsCap => Some(false),
            FragmentSearch::Unknown => None,
        }
    }
}

/// Classifies (S, W): good when some copy inside power_edges(S) union W
/// has at most `cutoff` of its edges outside W.
pub fn classify_pair(
    s: &CyclicOrdering,
    w: &EdgeSet,
    cutoff: u32,
    budget: &SearchBudget,
) -> Result<PairClassification> {
    let min = min_fragment(s, w, 2, cutoff, budget)?;
    Ok(PairClassification {
        s: s.clone(),
        w: w.clone(),
        min_fragment: min,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    good: u64,
    bad: u64,
    unresolved: u64,
}

impl Tally {
    fn add(&mut self, verdict: Option<bool>) {
        match verdict {
            Some(true) => self.good += 1,
            Some(false) => self.bad += 1,
            None => self.unresolved += 1,
        }
    }

    fn resolved(&self) -> u64 {
        self.good + self.bad
    }

    fn total(&self) -> u64 {
        self.good + self.bad + self.unresolved
    }

    /// Is `bad` at most half of `total`? None when unresolved rows straddle
    /// the verdict.
    fn at_most_half_bad(&self) -> Option<bool> {
        if 2 * self.bad > self.total() {
            Some(false)
        } else if 2 * (self.bad + self.unresolved) <= self.total() {
            Some(true)
        } else {
            None
        }
    }

    fn fraction_bad(&self) -> f64 {
        self.bad as f64 / self.resolved() as f64
    }
}

/// Bad-pair frequency over random (copy, fixed-size set) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub trials: u64,
    /// First-round size actually used (the plan's `w` clamped to K_n).
    pub w_used: u64,
    pub good: u64,
    pub bad: u64,
    pub unresolved: u64,
    /// Bad fraction among resolved trials; NaN when nothing resolved.
    pub fraction_bad: f64,
    /// Wilson interval for the bad fraction over resolved trials.
    pub ci: (f64, f64),
    /// 2 big_c^{-k/3}, the shape of the target bound. The statement behind
    /// it kicks in only for large big_c, so this column is for reading
    /// trends, not a per-run assertion.
    pub reference_bound: f64,
}

/// Samples `trials` pairs (uniform copy S, uniform edge set W of the plan's
/// size) and classifies each against the plan's cutoff.
pub fn bad_pair_census(
    catalog: &CopyCatalog,
    plan: &TwoRoundPlan,
    trials: u64,
    budget: &SearchBudget,
    stream: RngStream,
) -> Result<CensusReport> {
    if catalog.n() != plan.n {
        return Err(Error::VertexCountMismatch {
            left: catalog.n(),
            right: plan.n,
        });
    }
    if trials == 0 {
        return Err(Error::DegenerateData("census needs at least one trial".into()));
    }
    let w_used = plan.clamped_w();
    let pool: Vec<Edge> = EdgeSet::complete(plan.n).iter().collect();
    let verdicts: Vec<Result<Option<bool>>> = par::map_vec(trials as usize, |t| {
        let mut rng = substream(stream, STREAM_CENSUS, 0, t as u64).rng();
        let idx = rng.gen_range(0..catalog.len());
        let s = CyclicOrdering::from_cycle(catalog.ordering(idx)).expect("catalog is canonical");
        let w = sample_subset(plan.n, &pool, w_used as usize, &mut rng);
        classify_pair(&s, &w, plan.k, budget).map(|c| c.good())
    });
    let mut tally = Tally::default();
    for v in verdicts {
        tally.add(v?);
    }
    Ok(CensusReport {
        trials,
        w_used,
        good: tally.good,
        bad: tally.bad,
        unresolved: tally.unresolved,
        fraction_bad: tally.fraction_bad(),
        ci: wilson_interval(tally.bad, tally.resolved(), CI_Z),
        reference_bound: 2.0 * plan.big_c.powf(-(f64::from(plan.k)) / 3.0),
    })
}

/// How `assess_w0` walks the copy family.
#[derive(Debug, Clone, Copy)]
pub enum ScanMode {
    /// Classify every copy in the catalog.
    All,
    /// Classify `count` uniformly random copies.
    Sampled { count: u64 },
}

/// Verdict on one concrete first-round set.
#[derive(Debug, Clone, PartialEq)]
pub struct W0Assessment {
    pub scanned: u64,
    pub good: u64,
    pub bad: u64,
    pub unresolved: u64,
    /// True when at most half the scanned copies form a bad pair with W0;
    /// None when unresolved classifications straddle that verdict.
    pub successful: Option<bool>,
    /// Bad fraction among resolved copies; NaN when nothing resolved.
    pub fraction_bad: f64,
    /// Wilson interval in sampled mode; an exhaustive scan is exact and
    /// reports none.
    pub ci: Option<(f64, f64)>,
}

/// Counts bad (S, W0) pairs over the copy family, exhaustively or on a
/// uniform sample of copies.
pub fn assess_w0(
    catalog: &CopyCatalog,
    w0: &EdgeSet,
    cutoff: u32,
    mode: ScanMode,
    budget: &SearchBudget,
    stream: RngStream,
) -> Result<W0Assessment> {
    if catalog.n() != w0.n() {
        return Err(Error::VertexCountMismatch {
            left: catalog.n(),
            right: w0.n(),
        });
    }
    let verdicts: Vec<Result<Option<bool>>> = match mode {
        ScanMode::All => par::map_vec(catalog.len(), |i| {
            let s = CyclicOrdering::from_cycle(catalog.ordering(i)).expect("catalog is canonical");
            classify_pair(&s, w0, cutoff, budget).map(|c| c.good())
        }),
        ScanMode::Sampled { count } => {
            if count == 0 {
                return Err(Error::DegenerateData("sampled scan needs count >= 1".into()));
            }
            par::map_vec(count as usize, |t| {
                let mut rng = substream(stream, STREAM_ASSESS, 0, t as u64).rng();
                let idx = rng.gen_range(0..catalog.len());
                let s =
                    CyclicOrdering::from_cycle(catalog.ordering(idx)).expect("catalog is canonical");
                classify_pair(&s, w0, cutoff, budget).map(|c| c.good())
            })
        }
    };
    let mut tally = Tally::default();
    for v in verdicts {
        tally.add(v?);
    }
    let ci = match mode {
        ScanMode::All => None,
        ScanMode::Sampled { .. } => Some(wilson_interval(tally.bad, tally.resolved(), CI_Z)),
    };
    Ok(W0Assessment {
        scanned: tally.total(),
        good: tally.good,
        bad: tally.bad,
        unresolved: tally.unresolved,
        successful: tally.at_most_half_bad(),
        fraction_bad: tally.fraction_bad(),
        ci,
    })
}

/// The covering family built from one first-round set: one `cutoff`-edge
/// member per good copy, kept as a multiset in catalog order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentFamily {
    pub n: u32,
    pub cutoff: u32,
    pub members: Vec<EdgeSet>,
    /// Catalog index of each member's source copy.
    pub sources: Vec<usize>,
}

impl FragmentFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The covering statistic X: members entirely inside `w1`.
    pub fn count_within(&self, w1: &EdgeSet) -> u64 {
        self.members
            .iter()
            .filter(|m| m.is_subset_of(w1))
            .count() as u64
    }
}

#[derive(Debug, Clone)]
pub struct FamilyBuild {
    pub family: FragmentFamily,
    pub good: u64,
    pub bad: u64,
    pub unresolved: u64,
}

impl FamilyBuild {
    /// At-most-half-bad verdict over the whole catalog, None when
    /// unresolved copies straddle it.
    pub fn w0_successful(&self) -> Option<bool> {
        Tally {
            good: self.good,
            bad: self.bad,
            unresolved: self.unresolved,
        }
        .at_most_half_bad()
    }
}

enum FamilyRow {
    Good(EdgeSet),
    Bad,
    Unresolved,
}

/// Pads `fragment` to exactly `cutoff` edges with the smallest-index edges
/// of `s_edges` outside it. The rule is a fixed tiebreak so identical
/// inputs rebuild the identical family.
fn pad_fragment(s_edges: &EdgeSet, fragment: &EdgeSet, cutoff: u32) -> EdgeSet {
    debug_assert!(fragment.is_subset_of(s_edges));
    let mut member = fragment.clone();
    let mut have = member.len();
    for e in s_edges.iter() {
        if have >= cutoff {
            break;
        }
        if !member.contains(e) {
            member.insert(e);
            have += 1;
        }
    }
    debug_assert_eq!(member.len(), cutoff);
    member
}

/// Scans every copy S against W0 and, for each good pair, records its
/// minimum fragment padded to exactly `cutoff` edges of S. Each member
/// therefore contains a full fragment, so covering a member in the second
/// round completes some copy inside W0 union W1.
pub fn build_fragment_family(
    catalog: &CopyCatalog,
    w0: &EdgeSet,
    cutoff: u32,
    budget: &SearchBudget,
) -> Result<FamilyBuild> {
    if catalog.n() != w0.n() {
        return Err(Error::VertexCountMismatch {
            left: catalog.n(),
            right: w0.n(),
        });
    }
    let copy_edges = 2 * catalog.n();
    if cutoff == 0 || cutoff > copy_edges {
        return Err(Error::OutsideHypothesis(format!(
            "cutoff {cutoff} must lie in 1..={copy_edges}"
        )));
    }
    let rows: Vec<Result<FamilyRow>> = par::map_vec(catalog.len(), |i| {
        let s = CyclicOrdering::from_cycle(catalog.ordering(i)).expect("catalog is canonical");
        let (status, witness) = min_fragment_witness(&s, w0, 2, cutoff, budget)?;
        Ok(match status {
            FragmentSearch::Min(_) => {
                let wit = witness.expect("a finite minimum carries a witness");
                FamilyRow::Good(pad_fragment(&s.power_edges(2), &wit.fragment, cutoff))
            }
            FragmentSearch::ExceedsCap => FamilyRow::Bad,
            FragmentSearch::Unknown => FamilyRow::Unresolved,
        })
    });
    let mut members = Vec::new();
    let mut sources = Vec::new();
    let mut tally = Tally::default();
    for (i, row) in rows.into_iter().enumerate() {
        match row? {
            FamilyRow::Good(member) => {
                members.push(member);
                sources.push(i);
                tally.good += 1;
            }
            FamilyRow::Bad => tally.bad += 1,
            FamilyRow::Unresolved => tally.unresolved += 1,
        }
    }
    Ok(FamilyBuild {
        family: FragmentFamily {
            n: catalog.n(),
            cutoff,
            members,
            sources,
        },
        good: tally.good,
        bad: tally.bad,
        unresolved: tally.unresolved,
    })
}

/// Exact first and second moments of the covering statistic X under an
/// independent second round, with a simulated tail check.
#[derive(Debug, Clone)]
pub struct SecondMomentReport {
    pub members: u64,
    /// members * p1^cutoff.
    pub mu: BigRational,
    /// Sum over members of p1^{|member|}; equals `mu` because members all
    /// have exactly `cutoff` edges.
    pub exact_mean: BigRational,
    pub exact_variance: BigRational,
    /// Sum of p1^{|A union B|} over ordered member pairs that share an edge,
    /// an upper bound for the variance that drops the centering terms.
    pub var_bound: BigRational,
    /// var_bound / mu^2, the Chebyshev bound on Pr(X = 0); None when mu = 0.
    pub chebyshev_bound: Option<BigRational>,
    pub empirical_p_x0: f64,
    pub empirical_ci: (f64, f64),
    pub sim_trials: u64,
}

impl SecondMomentReport {
    /// One-sided check that the simulated Pr(X = 0) does not exceed the
    /// Chebyshev bound by more than four binomial standard errors.
    /// None when mu = 0 (the bound says nothing).
    pub fn chebyshev_consistent(&self) -> Option<bool> {
        let bound = self
            .chebyshev_bound
            .as_ref()?
            .to_f64()
            .expect("bound fits in f64");
        if bound >= 1.0 {
            return Some(true);
        }
        let sigma = (bound * (1.0 - bound) / self.sim_trials as f64).sqrt();
        Some(self.empirical_p_x0 <= bound + 4.0 * sigma)
    }
}

/// Computes mean, variance, and the pairwise-over-counting variance bound
/// of X exactly from the member-pair intersection histogram, then samples
/// `sim_trials` second rounds to estimate Pr(X = 0).
pub fn second_moment(
    family: &FragmentFamily,
    p1: Prob,
    sim_trials: u64,
    stream: RngStream,
) -> Result<SecondMomentReport> {
    if sim_trials == 0 {
        return Err(Error::DegenerateData("tail estimate needs sim_trials >= 1".into()));
    }
    let k = family.cutoff as usize;
    let p = p1.as_rational();
    let mut pow = Vec::with_capacity(2 * k + 1);
    pow.push(BigRational::one());
    for i in 1..=2 * k {
        let next = &pow[i - 1] * &p;
        pow.push(next);
    }

    let members = family.members.len();
    let mu = BigRational::from_integer(members.into()) * pow[k].clone();
    let mut exact_mean = BigRational::zero();
    for m in &family.members {
        exact_mean += &pow[m.len() as usize];
    }

    // Histogram of |A intersect B| over ordered member pairs; members all
    // have k edges, so |A union B| = 2k - |A intersect B|.
    let inter = par::fold_merge(
        members,
        || vec![0u64; k + 1],
        |mut acc, i| {
            let a = &family.members[i];
            for b in &family.members {
                acc[a.intersection_count(b) as usize] += 1;
            }
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );

    let mut second = BigRational::zero();
    let mut var_bound = BigRational::zero();
    for (j, &count) in inter.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let term = BigRational::from_integer(count.into()) * &pow[2 * k - j];
        if j > 0 {
            var_bound += &term;
        }
        second += term;
    }
    let exact_variance = second - &exact_mean * &exact_mean;
    debug_assert!(exact_variance >= BigRational::zero());
    debug_assert!(exact_variance <= var_bound);
    let chebyshev_bound = if mu.is_zero() {
        None
    } else {
        Some(&var_bound / (&mu * &mu))
    };

    let zeros = par::sum_u64(sim_trials as usize, |t| {
        let w1 = sample_gnp_prob(family.n, p1, substream(stream, STREAM_COVER_SIM, 0, t as u64));
        u64::from(family.count_within(w1.edges()) == 0)
    });
    Ok(SecondMomentReport {
        members: members as u64,
        mu,
        exact_mean,
        exact_variance,
        var_bound,
        chebyshev_bound,
        empirical_p_x0: zeros as f64 / sim_trials as f64,
        empirical_ci: wilson_interval(zeros, sim_trials, CI_Z),
        sim_trials,
    })
}

/// Bad-pair census restricted to the copies living inside one fixed edge
/// set Z, classified against W = Z minus the copy's own edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PathologyReport {
    pub z_size: u64,
    /// Copies of the catalog entirely contained in Z.
    pub candidates: u64,
    pub good: u64,
    pub bad: u64,
    pub unresolved: u64,
    /// big_c^{-cutoff/3} |family| C(|Z|, 2n) / C(m, 2n): the expected
    /// number of copies inside a random set of |Z| edges, damped by the
    /// target bad-pair rate.
    pub threshold: f64,
    /// bad > threshold, None when unresolved candidates straddle it.
    pub pathological: Option<bool>,
}

/// Z is pathological when more of its copies than `threshold` form a bad
/// pair with the rest of Z.
pub fn pathological_census(
    catalog: &CopyCatalog,
    z: &EdgeSet,
    cutoff: u32,
    big_c: f64,
    budget: &SearchBudget,
) -> Result<PathologyReport> {
    if catalog.n() != z.n() {
        return Err(Error::VertexCountMismatch {
            left: catalog.n(),
            right: z.n(),
        });
    }
    // NaN fails this comparison too, which is the intended rejection.
    if big_c.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateData(format!(
            "reference constant must be positive, got {big_c}"
        )));
    }
    let verdicts: Vec<Result<Option<Option<bool>>>> = par::map_vec(catalog.len(), |i| {
        if !bits::is_subset(catalog.edge_words_of(i), z.words()) {
            return Ok(None);
        }
        let s = CyclicOrdering::from_cycle(catalog.ordering(i)).expect("catalog is canonical");
        let w = z.difference(&s.power_edges(2));
        classify_pair(&s, &w, cutoff, budget).map(|c| Some(c.good()))
    });
    let mut tally = Tally::default();
    for v in verdicts {
        if let Some(verdict) = v? {
            tally.add(verdict);
        }
    }
    let n = catalog.n();
    let copy_edges = u64::from(2 * n);
    let density = big_to_rational(binomial(z.len() as u64, copy_edges))
        / big_to_rational(binomial(complete_edge_count(n), copy_edges));
    let expected_candidates = BigRational::from_integer(catalog.len().into()) * density;
    let threshold = big_c.powf(-f64::from(cutoff) / 3.0)
        * expected_candidates.to_f64().expect("expected count fits in f64");
    let pathological = if tally.bad as f64 > threshold {
        Some(true)
    } else if (tally.bad + tally.unresolved) as f64 <= threshold {
        Some(false)
    } else {
        None
    };
    Ok(PathologyReport {
        z_size: u64::from(z.len()),
        candidates: tally.total(),
        good: tally.good,
        bad: tally.bad,
        unresolved: tally.unresolved,
        threshold,
        pathological,
    })
}

/// One full two-round run: W0, its fragment family, W1, the covering count
/// X, and the direct solver verdict on the union.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: u64,
    pub w0_size: u64,
    pub good: u64,
    pub bad: u64,
    pub unresolved: u64,
    /// At-most-half-bad verdict for this W0 over the whole catalog.
    pub w0_successful: Option<bool>,
    pub family_size: u64,
    /// Family members covered by W1.
    pub x: u64,
    /// Some(true) found, Some(false) exhausted without a copy, None when
    /// the solver ran out of budget.
    pub solver_found: Option<bool>,
    pub solver_nodes: u64,
    pub seconds: f64,
}

impl TrialRecord {
    /// A covered member completes a copy inside W0 union W1, so X > 0 must
    /// come with a solver find. Budget-truncated solver runs report
    /// unsound here; rerun them with a bigger budget instead of trusting X.
    pub fn sound(&self) -> bool {
        self.x == 0 || self.solver_found == Some(true)
    }
}

/// Runs `trials` independent two-round experiments under `plan`, sharing
/// `budget` between the per-copy classification and the final solver call.
pub fn two_round_experiment(
    catalog: &CopyCatalog,
    plan: &TwoRoundPlan,
    trials: u64,
    budget: &SearchBudget,
    stream: RngStream,
) -> Result<Vec<TrialRecord>> {
    if catalog.n() != plan.n {
        return Err(Error::VertexCountMismatch {
            left: catalog.n(),
            right: plan.n,
        });
    }
    if trials == 0 {
        return Err(Error::DegenerateData("experiment needs at least one trial".into()));
    }
    par::map_vec(trials as usize, |t| {
        two_round_trial(catalog, plan, budget, stream, t as u64)
    })
    .into_iter()
    .collect()
}

fn two_round_trial(
    catalog: &CopyCatalog,
    plan: &TwoRoundPlan,
    budget: &SearchBudget,
    stream: RngStream,
    trial: u64,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let w0 = sample_gnp_prob(plan.n, plan.p0, substream(stream, STREAM_ROUND, 0, trial));
    let build = build_fragment_family(catalog, w0.edges(), plan.k, budget)?;
    let w1 = sample_gnp_prob(plan.n, plan.p1, substream(stream, STREAM_ROUND, 1, trial));
    let x = build.family.count_within(w1.edges());
    let union_graph = Graph::new(plan.n, w0.edges().union(w1.edges()));
    let outcome = find_power_ham(
        &union_graph,
        2,
        budget,
        substream(stream, STREAM_ROUND, 2, trial),
    )?;
    let solver_found = match outcome.status {
        SearchStatus::Found(_) => Some(true),
        SearchStatus::ExhaustedNo => Some(false),
        SearchStatus::BudgetUnknown => None,
    };
    Ok(TrialRecord {
        trial,
        w0_size: u64::from(w0.edge_count()),
        good: build.good,
        bad: build.bad,
        unresolved: build.unresolved,
        w0_successful: build.w0_successful(),
        family_size: build.family.len() as u64,
        x,
        solver_found,
        solver_nodes: outcome.nodes_expanded,
        seconds: started.elapsed().as_secs_f64(),
    })
}
