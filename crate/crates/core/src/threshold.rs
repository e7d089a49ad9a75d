//! Monte Carlo threshold curves over p = C/sqrt(n).
//!
//! A grid of (n, C) cells is decided by the exact solver on seeded G(n, p)
//! draws; success rates get Wilson intervals, a logistic fit in log C
//! locates the empirical crossing, and the exact first-moment curve
//! provides the expected-copy-count-one constant the crossing is compared
//! against.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    big_to_rational, factorial, pow_rational, rational_of, sqrt_interval, wilson_interval,
    RatInterval, ROOT_DIGITS,
};
use crate::graph::{check_vertex_count, edge_uniforms, gnp_from_uniforms, sample_gnp_prob, Graph};
use crate::par;
use crate::rng::{pack_stream, Prob, RngStream};
use crate::solver::{find_power_ham, SearchBudget, SearchStatus};
use crate::spread::spread_params;

/// Confidence level of every Wilson interval in this module.
pub const CI_Z: f64 = 1.96;

const STREAM_GRAPH: u64 = 5;
const STREAM_SOLVE: u64 = 6;
const STREAM_COUPLED: u64 = 7;

fn substream(base: RngStream, kind: u64, cell: u64, trial: u64) -> RngStream {
    base.with_stream(base.stream_id.wrapping_add(pack_stream(kind, cell, trial)))
}

/// A fully validated experiment plan: every (n, C) pair is one cell.
#[derive(Debug, Clone)]
pub struct ThresholdGrid {
    n_values: Vec<u32>,
    c_values: Vec<f64>,
    trials: u64,
    budget: SearchBudget,
    stream: RngStream,
}

impl ThresholdGrid {
    pub fn new(
        n_values: Vec<u32>,
        c_values: Vec<f64>,
        trials: u64,
        budget: SearchBudget,
        stream: RngStream,
    ) -> Result<Self> {
        if n_values.is_empty() || c_values.is_empty() {
            return Err(Error::DegenerateData("grid needs n and C values".into()));
        }
        for &n in &n_values {
            check_vertex_count(n)?;
            if n < 5 {
                return Err(Error::VertexCountTooSmall { n, min: 5 });
            }
        }
        for pair in c_values.windows(2) {
            // NaN fails this comparison too, which is the intended rejection.
            if pair[0].partial_cmp(&pair[1]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::DegenerateData(
                    "C values must be strictly increasing".into(),
                ));
            }
        }
        if !c_values.iter().all(|c| c.is_finite() && *c >= 0.0) {
            return Err(Error::DegenerateData("C values must be finite and nonnegative".into()));
        }
        if trials == 0 {
            return Err(Error::DegenerateData("grid needs at least one trial".into()));
        }
        Ok(Self {
            n_values,
            c_values,
            trials,
            budget,
            stream,
        })
    }

    pub fn n_values(&self) -> &[u32] {
        &self.n_values
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c_values
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }
}

/// Aggregated outcome of one (n, C) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub n: u32,
    pub big_c: f64,
    /// Edge probability C/sqrt(n), clamped into [0, 1].
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    /// Trials the solver could not decide within budget; excluded from the
    /// estimate so truncated searches never masquerade as refutations.
    pub unknowns: u64,
    /// Success rate over decided trials; NaN when nothing was decided.
    pub estimate: f64,
    /// Wilson interval over decided trials.
    pub ci: (f64, f64),
}

impl CellResult {
    fn from_outcomes(n: u32, big_c: f64, p: f64, outcomes: &[TrialOutcome]) -> Self {
        let successes = outcomes.iter().filter(|o| **o == TrialOutcome::Success).count() as u64;
        let failures = outcomes.iter().filter(|o| **o == TrialOutcome::Failure).count() as u64;
        let unknowns = outcomes.len() as u64 - successes - failures;
        let resolved = successes + failures;
        CellResult {
            n,
            big_c,
            p,
            trials: outcomes.len() as u64,
            successes,
            failures,
            unknowns,
            estimate: successes as f64 / resolved as f64,
            ci: wilson_interval(successes, resolved, CI_Z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TrialOutcome {
    Success,
    Failure,
    Unknown,
}

fn cell_prob(n: u32, big_c: f64) -> Prob {
    let p = (big_c / (n as f64).sqrt()).clamp(0.0, 1.0);
    Prob::from_f64(p).expect("clamped probability is valid")
}

fn decide(g: &Graph, budget: &SearchBudget, stream: RngStream) -> TrialOutcome {
    let outcome = find_power_ham(g, 2, budget, stream).expect("grid inputs are validated");
    match outcome.status {
        SearchStatus::Found(_) => TrialOutcome::Success,
        SearchStatus::ExhaustedNo => TrialOutcome::Failure,
        SearchStatus::BudgetUnknown => TrialOutcome::Unknown,
    }
}

/// Runs every cell on independent G(n, p) draws. Deterministic in the
/// grid's stream; cells and trials are independent parallel units.
pub fn run_grid(grid: &ThresholdGrid) -> Vec<CellResult> {
    let c_count = grid.c_values.len();
    let mut cells = Vec::with_capacity(grid.n_values.len() * c_count);
    for (ni, &n) in grid.n_values.iter().enumerate() {
        for (ci, &big_c) in grid.c_values.iter().enumerate() {
            let prob = cell_prob(n, big_c);
            let cell = (ni * c_count + ci) as u64;
            let outcomes = par::map_vec(grid.trials as usize, |t| {
                let g = sample_gnp_prob(n, prob, substream(grid.stream, STREAM_GRAPH, cell, t as u64));
                decide(&g, &grid.budget, substream(grid.stream, STREAM_SOLVE, cell, t as u64))
            });
            cells.push(CellResult::from_outcomes(n, big_c, prob.as_f64(), &outcomes));
        }
    }
    cells
}

/// Coupled-mode grid: same cells plus the count of per-trial monotonicity
/// violations, which sharing uniforms across C makes exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledGrid {
    pub cells: Vec<CellResult>,
    /// Ordered cell pairs within one trial where a success at smaller C
    /// degraded to a refutation at larger C. Coupling plus a correct solver
    /// forces zero; unknowns never count.
    pub inversions: u64,
}

/// Runs the grid with one uniform variate per edge shared across all C in
/// a trial, so the sampled graphs are nested and per-trial outcomes are
/// monotone in C by construction.
pub fn run_grid_coupled(grid: &ThresholdGrid) -> CoupledGrid {
    let c_count = grid.c_values.len();
    let mut cells = Vec::with_capacity(grid.n_values.len() * c_count);
    let mut inversions = 0u64;
    for (ni, &n) in grid.n_values.iter().enumerate() {
        let probs: Vec<Prob> = grid.c_values.iter().map(|&c| cell_prob(n, c)).collect();
        let rows: Vec<Vec<TrialOutcome>> = par::map_vec(grid.trials as usize, |t| {
            let uniforms = edge_uniforms(n, substream(grid.stream, STREAM_COUPLED, ni as u64, t as u64));
            probs
                .iter()
                .enumerate()
                .map(|(ci, &prob)| {
                    let g = gnp_from_uniforms(n, &uniforms, prob);
                    let cell = (ni * c_count + ci) as u64;
                    decide(&g, &grid.budget, substream(grid.stream, STREAM_SOLVE, cell, t as u64))
                })
                .collect()
        });
        for row in &rows {
            for i in 0..row.len() {
                if row[i] != TrialOutcome::Success {
                    continue;
                }
                inversions += row[i + 1..]
                    .iter()
                    .filter(|o| **o == TrialOutcome::Failure)
                    .count() as u64;
            }
        }
        for (ci, &big_c) in grid.c_values.iter().enumerate() {
            let column: Vec<TrialOutcome> = rows.iter().map(|r| r[ci]).collect();
            cells.push(CellResult::from_outcomes(n, big_c, probs[ci].as_f64(), &column));
        }
    }
    CoupledGrid { cells, inversions }
}

/// Logistic crossing fit for the cells of one n.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingFit {
    pub n: u32,
    /// C at fitted success probability 1/2; None when the data admit no fit.
    pub c_half: Option<f64>,
    /// Intercept of the logistic model in x = log C.
    pub intercept: f64,
    /// Slope in log C.
    pub slope: f64,
    /// Grouped-binomial deviance of the fitted model.
    pub deviance: f64,
    /// Cells that entered the fit (decided trials and C > 0).
    pub cells_used: u64,
    /// Cells with an estimate strictly between 0 and 1.
    pub interior_cells: u64,
    /// All-success or all-failure data: no crossing information at all.
    pub degenerate: bool,
    /// The fitted crossing lies outside the sampled C range.
    pub extrapolated: bool,
    /// Fewer than four interior cells; the location is poorly pinned.
    pub low_confidence: bool,
}

/// Maximum-likelihood logistic fit of success probability against log C
/// over the cells of a single n, by damped Newton iteration.
pub fn fit_crossing(cells: &[CellResult]) -> Result<CrossingFit> {
    let n = cells
        .first()
        .ok_or_else(|| Error::DegenerateData("no cells to fit".into()))?
        .n;
    if cells.iter().any(|c| c.n != n) {
        return Err(Error::DegenerateData("crossing fit needs a single n".into()));
    }
    // (log C, successes, decided)
    let pts: Vec<(f64, f64, f64)> = cells
        .iter()
        .filter(|c| c.big_c > 0.0 && c.successes + c.failures > 0)
        .map(|c| {
            (
                c.big_c.ln(),
                c.successes as f64,
                (c.successes + c.failures) as f64,
            )
        })
        .collect();
    let interior = cells
        .iter()
        .filter(|c| {
            let resolved = c.successes + c.failures;
            resolved > 0 && c.successes > 0 && c.successes < resolved
        })
        .count() as u64;
    let total_s: f64 = pts.iter().map(|p| p.1).sum();
    let total_m: f64 = pts.iter().map(|p| p.2).sum();
    let no_fit = |degenerate| CrossingFit {
        n,
        c_half: None,
        intercept: f64::NAN,
        slope: f64::NAN,
        deviance: f64::NAN,
        cells_used: pts.len() as u64,
        interior_cells: interior,
        degenerate,
        extrapolated: false,
        low_confidence: true,
    };
    if pts.len() < 2 {
        return Ok(no_fit(true));
    }
    if total_s == 0.0 || total_s == total_m {
        return Ok(no_fit(true));
    }

    let mean_rate = (total_s / total_m).clamp(1e-6, 1.0 - 1e-6);
    let mut a = (mean_rate / (1.0 - mean_rate)).ln();
    let mut b = 0.0f64;
    for _ in 0..200 {
        let mut g0 = 0.0;
        let mut g1 = 0.0;
        let mut h00 = 0.0;
        let mut h01 = 0.0;
        let mut h11 = 0.0;
        for &(x, k, m) in &pts {
            let mu = logistic(a + b * x);
            let w = m * mu * (1.0 - mu);
            let r = k - m * mu;
            g0 += r;
            g1 += r * x;
            h00 += w;
            h01 += w * x;
            h11 += w * x * x;
        }
        let det = h00 * h11 - h01 * h01;
        if det.abs() < 1e-12 {
            break;
        }
        let da = ((g0 * h11 - g1 * h01) / det).clamp(-5.0, 5.0);
        let db = ((g1 * h00 - g0 * h01) / det).clamp(-5.0, 5.0);
        a += da;
        b += db;
        if da.abs() + db.abs() < 1e-12 {
            break;
        }
    }

    let mut deviance = 0.0;
    for &(x, k, m) in &pts {
        let mu = (logistic(a + b * x)).clamp(1e-12, 1.0 - 1e-12);
        if k > 0.0 {
            deviance += 2.0 * k * (k / (m * mu)).ln();
        }
        if k < m {
            deviance += 2.0 * (m - k) * ((m - k) / (m * (1.0 - mu))).ln();
        }
    }

    let c_half = (b != 0.0 && b.is_finite() && a.is_finite()).then(|| (-a / b).exp());
    let extrapolated = match c_half {
        Some(ch) => {
            let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
            let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
            ch < lo || ch > hi
        }
        None => false,
    };
    Ok(CrossingFit {
        n,
        c_half,
        intercept: a,
        slope: b,
        deviance,
        cells_used: pts.len() as u64,
        interior_cells: interior,
        degenerate: false,
        extrapolated,
        low_confidence: interior < 4,
    })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Exact first-moment curve at one point, with the expected-count-one
/// constant it crosses.
#[derive(Debug, Clone)]
pub struct FirstMomentReport {
    pub n: u32,
    /// (n-1)! p^{2n} / 2 as an exact rational.
    pub expected_copies: BigRational,
    /// Enclosure of the p where the expectation equals one,
    /// (2/(n-1)!)^{1/(2n)}.
    pub q: RatInterval,
    /// Enclosure of q sqrt(n), which drifts toward sqrt(e) as n grows.
    pub q_root_n: RatInterval,
}

/// Expected number of copies of the squared cycle in G(n, p), exactly.
/// Unlike the samplers this is pure arithmetic, so n may exceed the dense
/// graph ceiling.
pub fn first_moment_curve(n: u32, p: &BigRational) -> Result<FirstMomentReport> {
    if n < 3 {
        return Err(Error::VertexCountTooSmall { n, min: 3 });
    }
    if p < &BigRational::zero() || p > &BigRational::from_integer(1.into()) {
        return Err(Error::InvalidProbability {
            p: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    let expected_copies = big_to_rational(factorial(u64::from(n) - 1)) * pow_rational(p, 2 * n)
        / rational_of(2, 1);
    let q = spread_params(n)?.q;
    let root_n = sqrt_interval(&RatInterval::exact(rational_of(u64::from(n), 1)), ROOT_DIGITS);
    let q_root_n = q.mul(&root_n);
    Ok(FirstMomentReport {
        n,
        expected_copies,
        q,
        q_root_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{certainly_within, euler_interval};
    use num_bigint::BigInt;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn grid(n: u32, cs: &[f64], trials: u64, seed: u64) -> ThresholdGrid {
        ThresholdGrid::new(
            vec![n],
            cs.to_vec(),
            trials,
            SearchBudget::unlimited(),
            RngStream::new(seed, 0),
        )
        .unwrap()
    }

    #[test]
    fn grid_validation_rejects_bad_inputs() {
        let budget = SearchBudget::unlimited();
        let stream = RngStream::new(1, 0);
        assert!(matches!(
            ThresholdGrid::new(vec![], vec![1.0], 5, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![9], vec![], 5, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![9], vec![1.0, 1.0], 5, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![9], vec![2.0, 1.0], 5, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![9], vec![-1.0, 1.0], 5, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![9], vec![1.0], 0, budget, stream),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![4], vec![1.0], 5, budget, stream),
            Err(Error::VertexCountTooSmall { .. })
        ));
        assert!(matches!(
            ThresholdGrid::new(vec![80], vec![1.0], 5, budget, stream),
            Err(Error::VertexCountTooLarge { .. })
        ));
    }

    #[test]
    fn extreme_cells_pin_the_rates() {
        let cells = run_grid(&grid(9, &[0.0, 4.0], 25, 5));
        assert_eq!(cells.len(), 2);
        let empty = &cells[0];
        assert_eq!(empty.p, 0.0);
        assert_eq!(empty.successes, 0);
        assert_eq!(empty.failures, 25);
        assert_eq!(empty.estimate, 0.0);
        let full = &cells[1];
        assert_eq!(full.p, 1.0);
        assert_eq!(full.successes, 25);
        assert_eq!(full.estimate, 1.0);
        for c in &cells {
            assert_eq!(c.successes + c.failures + c.unknowns, c.trials);
        }
    }

    #[test]
    fn budget_exhaustion_becomes_unknowns() {
        let g = ThresholdGrid::new(
            vec![9],
            vec![2.4],
            20,
            SearchBudget::nodes(2),
            RngStream::new(8, 0),
        )
        .unwrap();
        let cells = run_grid(&g);
        let cell = &cells[0];
        assert!(cell.unknowns > 0);
        assert_eq!(cell.successes + cell.failures + cell.unknowns, 20);
        if cell.successes + cell.failures == 0 {
            assert!(cell.estimate.is_nan());
        }
    }

    #[test]
    fn coupled_grid_is_monotone_and_deterministic() {
        let g = grid(9, &[0.6, 1.2, 1.8, 2.4], 60, 13);
        let run = run_grid_coupled(&g);
        assert_eq!(run.inversions, 0);
        assert_eq!(run.cells.len(), 4);
        for pair in run.cells.windows(2) {
            assert!(pair[0].estimate <= pair[1].estimate);
        }
        let again = run_grid_coupled(&g);
        assert_eq!(run, again);
    }

    #[test]
    fn coupled_and_independent_rates_agree() {
        let g = grid(8, &[1.0, 2.0], 120, 17);
        let independent = run_grid(&g);
        let coupled = run_grid_coupled(&g).cells;
        for (a, b) in independent.iter().zip(&coupled) {
            assert_eq!(a.unknowns, 0);
            assert_eq!(b.unknowns, 0);
            // Two independent estimates of the same rate, 120 trials each.
            assert!((a.estimate - b.estimate).abs() < 0.2);
        }
    }

    #[test]
    fn success_at_the_first_moment_point_is_below_its_double() {
        let q = first_moment_curve(9, &rational(1, 2))
            .unwrap()
            .q
            .to_f64();
        let g = grid(9, &[3.0 * q, 6.0 * q], 150, 19);
        let cells = run_grid(&g);
        // p = 2q clamps to 1, so the upper cell always succeeds.
        assert_eq!(cells[1].p, 1.0);
        assert_eq!(cells[1].estimate, 1.0);
        assert!(cells[0].estimate < cells[1].estimate);
    }

    #[test]
    fn fit_recovers_a_symmetric_crossing() {
        let c_star = 2.0f64;
        let r = 1.5f64;
        let rates = [(100u64, 0), (300, 1), (500, 2), (700, 3), (900, 4)];
        let cells: Vec<CellResult> = rates
            .iter()
            .map(|&(s, i)| {
                let big_c = c_star * r.powi(i - 2);
                CellResult {
                    n: 16,
                    big_c,
                    p: big_c / 4.0,
                    trials: 1000,
                    successes: s,
                    failures: 1000 - s,
                    unknowns: 0,
                    estimate: s as f64 / 1000.0,
                    ci: wilson_interval(s, 1000, CI_Z),
                }
            })
            .collect();
        let fit = fit_crossing(&cells).unwrap();
        assert!(!fit.degenerate);
        assert!(!fit.extrapolated);
        assert!(!fit.low_confidence);
        assert_eq!(fit.interior_cells, 5);
        assert!(fit.slope > 0.0);
        let c_half = fit.c_half.unwrap();
        assert!(
            (c_half - c_star).abs() < 1e-6,
            "c_half = {c_half}, want {c_star}"
        );
    }

    #[test]
    fn fit_flags_degenerate_and_extrapolated_data() {
        let constant = |rate: f64, big_c: f64| {
            let s = (rate * 400.0).round() as u64;
            CellResult {
                n: 9,
                big_c,
                p: big_c / 3.0,
                trials: 400,
                successes: s,
                failures: 400 - s,
                unknowns: 0,
                estimate: rate,
                ci: wilson_interval(s, 400, CI_Z),
            }
        };
        let all_success: Vec<CellResult> =
            [1.0, 2.0, 3.0].map(|c| constant(1.0, c)).to_vec();
        let fit = fit_crossing(&all_success).unwrap();
        assert!(fit.degenerate);
        assert!(fit.c_half.is_none());
        assert!(fit.low_confidence);

        let high_tail: Vec<CellResult> = [(0.6, 1.0), (0.7, 2.0), (0.8, 4.0), (0.9, 8.0)]
            .map(|(rate, c)| constant(rate, c))
            .to_vec();
        let fit = fit_crossing(&high_tail).unwrap();
        assert!(!fit.degenerate);
        let c_half = fit.c_half.unwrap();
        assert!(c_half < 1.0);
        assert!(fit.extrapolated);
    }

    #[test]
    fn fit_rejects_empty_or_mixed_input() {
        assert!(fit_crossing(&[]).is_err());
        let g = grid(8, &[1.0, 2.0], 10, 3);
        let mut cells = run_grid(&g);
        cells[1].n = 9;
        assert!(fit_crossing(&cells).is_err());
    }

    #[test]
    fn grid_fit_is_reproducible_bit_for_bit() {
        let g = grid(8, &[0.8, 1.2, 1.6, 2.0, 2.4], 80, 29);
        let fit_a = fit_crossing(&run_grid(&g)).unwrap();
        let fit_b = fit_crossing(&run_grid(&g)).unwrap();
        assert_eq!(fit_a, fit_b);
    }

    #[test]
    fn first_moment_matches_the_closed_form() {
        let at_one = first_moment_curve(9, &rational(1, 1)).unwrap();
        assert_eq!(at_one.expected_copies, rational(20160, 1));
        let at_zero = first_moment_curve(9, &BigRational::zero()).unwrap();
        assert!(at_zero.expected_copies.is_zero());
        let harder = first_moment_curve(7, &rational(1, 2)).unwrap();
        assert_eq!(harder.expected_copies, rational(45, 2048));
    }

    #[test]
    fn first_moment_rejects_bad_probabilities() {
        assert!(matches!(
            first_moment_curve(9, &rational(3, 2)),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            first_moment_curve(9, &rational(-1, 2)),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            first_moment_curve(2, &rational(1, 2)),
            Err(Error::VertexCountTooSmall { .. })
        ));
    }

    #[test]
    fn expectation_is_one_inside_the_q_enclosure() {
        // The q interval brackets the expected-count-one point: evaluating
        // the curve at its endpoints straddles 1.
        let report = first_moment_curve(9, &rational(1, 2)).unwrap();
        let lo = first_moment_curve(9, &report.q.lo).unwrap().expected_copies;
        let hi = first_moment_curve(9, &report.q.hi).unwrap().expected_copies;
        assert!(lo <= BigRational::from_integer(1.into()));
        assert!(hi >= BigRational::from_integer(1.into()));
    }

    #[test]
    fn q_scaled_by_root_n_drifts_toward_root_e() {
        // Far beyond the sampler ceiling: this is pure arithmetic.
        let report = first_moment_curve(49, &rational(1, 2)).unwrap();
        let root_e = sqrt_interval(&euler_interval(), ROOT_DIGITS);
        assert!(certainly_within(&report.q_root_n, &root_e, &rational(5, 100)));
        assert!(!certainly_within(&report.q_root_n, &root_e, &rational(1, 100)));
    }
}
