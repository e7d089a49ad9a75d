//! Acceptance gate for the laboratory. Each test checks one numbered
//! criterion and prints a single PASS/FAIL line with the measured
//! quantities; run `cargo test --test acceptance -- --nocapture` to see
//! every line. All tolerances are fixed here, not tunable.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use once_cell::sync::Lazy;
use rand::Rng;

use hamsq_core::bits;
use hamsq_core::copies::{CopyCatalog, CyclicOrdering};
use hamsq_core::exact::{
    certainly_within, euler_interval, factorial, rational_of, sqrt_interval, ROOT_DIGITS,
};
use hamsq_core::fragments::{build_fragment_family, second_moment, two_round_experiment, TwoRoundPlan};
use hamsq_core::graph::{complete_edge_count, sample_gnp, sample_subset, EdgeSet, Graph};
use hamsq_core::rng::{Prob, RngStream};
use hamsq_core::solver::{find_power_ham, SearchBudget, SearchStatus};
use hamsq_core::spread::{
    audit_component_edge_bound_exhaustive, audit_extension_bound_exhaustive,
    audit_subgraph_count_bound_all, check_overlap_fraction_bounds, check_overlap_ratio_identity,
    check_rooted_subgraph_bound, expected_high_overlap, expected_high_overlap_mc,
    local_spread_profile, overlap_histogram, overlap_histogram_for, rooted_subtree_count,
    rooted_subtree_formula, ProfileMode, DEFAULT_ENUM_BUDGET,
};
use hamsq_core::threshold::{first_moment_curve, run_grid_coupled, ThresholdGrid};
use hamsq_core::Error;

fn catalog(n: u32) -> CopyCatalog {
    CopyCatalog::enumerate(n, 2, CopyCatalog::DEFAULT_BUDGET).unwrap()
}

static CAT7: Lazy<CopyCatalog> = Lazy::new(|| catalog(7));
static CAT8: Lazy<CopyCatalog> = Lazy::new(|| catalog(8));
static CAT9: Lazy<CopyCatalog> = Lazy::new(|| catalog(9));
static CAT10: Lazy<CopyCatalog> = Lazy::new(|| catalog(10));
static CAT11: Lazy<CopyCatalog> = Lazy::new(|| catalog(11));

fn verdict(num: u32, name: &str, pass: bool, detail: &str) {
    let line = format!(
        "ACCEPTANCE {num:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn acceptance_01_copy_counts() {
    let mut detail = Vec::new();
    let mut pass = true;
    for (n, want) in [(5u32, 12u64), (7, 360), (9, 20160), (11, 1_814_400)] {
        let t = Instant::now();
        let cat = catalog(n);
        let secs = t.elapsed().as_secs_f64();
        pass &= cat.len() as u64 == want && secs < 60.0;
        detail.push(format!("n={n}:{} in {secs:.2}s", cat.len()));
    }
    verdict(1, "copy-counts", pass, &detail.join(", "));
}

#[test]
fn acceptance_02_extension_symmetry() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (cat, n) in [(&CAT7, 7u64), (&CAT8, 8), (&CAT9, 9)] {
        let want = factorial(n - 2) * 2u32;
        let ok = EdgeSet::complete(n as u32).iter().all(|e| {
            let single = EdgeSet::from_edges(n as u32, [e]);
            num_bigint::BigUint::from(cat.extension_count(&single)) == want
        });
        pass &= ok;
        detail.push(format!("n={n}:2(n-2)!={want}"));
    }
    verdict(2, "extension-symmetry", pass, &detail.join(", "));
}

#[test]
fn acceptance_03_extension_bound_sweep() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (cat, n) in [(&CAT9, 9), (&CAT10, 10), (&CAT11, 11)] {
        let t = Instant::now();
        let sweep = audit_extension_bound_exhaustive(cat, 3, DEFAULT_ENUM_BUDGET).unwrap();
        pass &= sweep.violations.is_empty();
        detail.push(format!(
            "n={n}: {} subsets, {} violations in {:.2}s",
            sweep.checked,
            sweep.violations.len(),
            t.elapsed().as_secs_f64()
        ));
    }
    verdict(3, "extension-bound-sweep", pass, &detail.join("; "));
}

#[test]
fn acceptance_04_subgraph_count_sampled() {
    let pool: Vec<_> = CyclicOrdering::identity(8).power_edges(2).iter().collect();
    let mut rng = RngStream::new(4, 0).rng();
    let mut checked = 0u64;
    let mut violations = 0u64;
    for _ in 0..100 {
        let size = rng.gen_range(0..=12usize);
        let f = sample_subset(8, &pool, size, &mut rng);
        for report in audit_subgraph_count_bound_all(&f, DEFAULT_ENUM_BUDGET).unwrap() {
            checked += 1;
            violations += (!report.holds) as u64;
        }
    }
    verdict(
        4,
        "subgraph-count-sampled",
        violations == 0,
        &format!("100 sets, {checked} (l,c) classes, {violations} violations"),
    );
}

#[test]
fn acceptance_05_tree_lemma() {
    let mut pass = true;
    for delta in 2..=4u32 {
        for v in 0..=8u32 {
            pass &= rooted_subtree_count(delta, v) == rooted_subtree_formula(delta, v);
        }
    }
    let g = Graph::new(9, CyclicOrdering::identity(9).power_edges(2));
    let mut counts = Vec::new();
    for h in 1..=5u32 {
        let report = check_rooted_subgraph_bound(&g, 0, h, DEFAULT_ENUM_BUDGET).unwrap();
        pass &= report.holds;
        counts.push(report.lhs.to_integer().to_string());
    }
    verdict(
        5,
        "tree-lemma",
        pass,
        &format!(
            "closed form matches for delta<=4, v<=8; subgraph counts h=1..5: {}",
            counts.join(",")
        ),
    );
}

#[test]
fn acceptance_06_component_edge_bound() {
    let sweep = audit_component_edge_bound_exhaustive(12, 2, 4, DEFAULT_ENUM_BUDGET).unwrap();
    verdict(
        6,
        "component-edge-bound",
        sweep.violations.is_empty(),
        &format!(
            "n=12 subsets up to 4 edges: {} checked, {} violations",
            sweep.checked,
            sweep.violations.len()
        ),
    );
}

#[test]
fn acceptance_07_overlap_histogram() {
    let hist7 = overlap_histogram(&CAT7);
    let mut pass = (0..7).all(|i| hist7.counts[i] == 0);
    pass &= hist7.f[14] == rational_of(1, 360);
    for cat in [&CAT7, &CAT8, &CAT9] {
        let hist = overlap_histogram(cat);
        pass &= hist.f.iter().sum::<BigRational>() == rational_of(1, 1);
    }
    let other1 = CyclicOrdering::from_cycle(&[0, 2, 4, 6, 1, 3, 5]).unwrap();
    let other2 = CyclicOrdering::from_cycle(&[0, 3, 1, 5, 2, 6, 4]).unwrap();
    pass &= overlap_histogram_for(&CAT7, &other1).counts == hist7.counts;
    pass &= overlap_histogram_for(&CAT7, &other2).counts == hist7.counts;
    verdict(
        7,
        "overlap-histogram",
        pass,
        "n=7: f_i=0 below 7, f_14=1/360; sums exact at n=7,8,9; S-independent",
    );
}

#[test]
fn acceptance_08_overlap_fraction_bounds() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (cat, n) in [(&CAT9, 9), (&CAT10, 10), (&CAT11, 11)] {
        let bounds = check_overlap_fraction_bounds(&overlap_histogram(cat)).unwrap();
        let bad = bounds.iter().filter(|b| !b.report.holds).count();
        pass &= bad == 0;
        detail.push(format!("n={n}: {} bounds, {bad} violations", bounds.len()));
    }
    // The known n=7 marginal case: single edges have local spread 2/3,
    // a hair over q(7). It is reported here and intentionally not failed.
    let prof = local_spread_profile(&CAT7, &[1], ProfileMode::Exhaustive, RngStream::new(8, 0))
        .unwrap();
    pass &= prof[0].within_q == Some(false);
    detail.push(format!(
        "n=7 single-edge spread {:.4} exceeds q as documented",
        prof[0].max_local_spread.lo.to_f64().unwrap()
    ));
    verdict(8, "overlap-fraction-bounds", pass, &detail.join("; "));
}

#[test]
fn acceptance_09_high_overlap_expectation() {
    // Only m - 2n = 12 edges lie outside a copy at n=8, so the w' values
    // 30 and 60 name impossible draws; the lab must refuse them, and the
    // Monte Carlo agreement is checked at the feasible sizes instead.
    let hist = overlap_histogram(&CAT8);
    let mut pass = [30u64, 60].iter().all(|&w| {
        matches!(expected_high_overlap(&hist, w, 0), Err(Error::OutsideHypothesis(_)))
    });
    let mut detail = vec!["w'=30,60 rejected (only 12 free edges)".to_string()];
    for w_prime in [6u64, 12] {
        for k_cut in [0u32, 8] {
            let exact = expected_high_overlap(&hist, w_prime, k_cut)
                .unwrap()
                .to_f64()
                .unwrap();
            let mc = expected_high_overlap_mc(
                &CAT8,
                w_prime,
                k_cut,
                100_000,
                RngStream::new(9, u64::from(k_cut) * 100 + w_prime),
            )
            .unwrap();
            let gap = (exact - mc.mean).abs();
            let ok = gap <= 4.0 * mc.std_error || gap == 0.0;
            pass &= ok;
            detail.push(format!(
                "w'={w_prime} k={k_cut}: exact {exact:.5} vs mc {:.5} (4se {:.5})",
                mc.mean,
                4.0 * mc.std_error
            ));
        }
    }
    verdict(9, "high-overlap-expectation", pass, &detail.join("; "));
}

#[test]
fn acceptance_10_ratio_identity() {
    let mut rng = RngStream::new(10, 0).rng();
    let mut pass = true;
    for _ in 0..200 {
        let n = rng.gen_range(5..=12u32);
        let m = complete_edge_count(n);
        let l = 2 * u64::from(n);
        let lo = l.saturating_sub(m - l) as u32;
        let i = rng.gen_range(lo..=2 * n);
        let w_prime = rng.gen_range(0..=2 * m);
        pass &= check_overlap_ratio_identity(n, w_prime, i).unwrap().holds;
    }
    verdict(
        10,
        "ratio-identity",
        pass,
        "200 random (n,w',i) triples, exact rational equality",
    );
}

#[test]
fn acceptance_11_solver_oracle_equivalence() {
    let base = RngStream::new(11, 0);
    let unlimited = SearchBudget::unlimited();
    let ps = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut pass = true;
    let mut found = 0u64;
    for t in 0..500u64 {
        let g = sample_gnp(8, ps[(t % 7) as usize], base.with_stream(t)).unwrap();
        let brute = (0..CAT8.len())
            .any(|i| bits::is_subset(CAT8.edge_words_of(i), g.edges().words()));
        let outcome = find_power_ham(&g, 2, &unlimited, base.with_stream(1000 + t)).unwrap();
        pass &= outcome.status.is_found() == brute;
        found += brute as u64;
    }
    let mut refuted = true;
    for n in [8u32, 9, 10] {
        let s = CyclicOrdering::identity(n).power_edges(2);
        for e in s.iter() {
            let g = Graph::new(n, s.difference(&EdgeSet::from_edges(n, [e])));
            let outcome = find_power_ham(&g, 2, &unlimited, base.with_stream(9000)).unwrap();
            refuted &= matches!(outcome.status, SearchStatus::ExhaustedNo);
        }
    }
    pass &= refuted;
    verdict(
        11,
        "solver-oracle-equivalence",
        pass,
        &format!("500 graphs agree ({found} contain a square); single-edge deletions all refuted"),
    );
}

#[test]
fn acceptance_12_fragment_soundness() {
    let plan = TwoRoundPlan::new(9, 3.0, 2.0).unwrap();
    assert!(plan.p0.is_one(), "c0=3 at n=9 saturates the first round");
    let records =
        two_round_experiment(&CAT9, &plan, 200, &SearchBudget::unlimited(), RngStream::new(12, 0))
            .unwrap();
    let covered = records.iter().filter(|r| r.x > 0).count();
    let unsound = records.iter().filter(|r| !r.sound()).count();
    verdict(
        12,
        "fragment-soundness",
        records.len() == 200 && unsound == 0,
        &format!("200 trials, {covered} with X>0, {unsound} unsound"),
    );
}

#[test]
fn acceptance_13_second_moment() {
    let budget = SearchBudget::unlimited();
    let mut pass = true;
    // Variance never exceeds the uncentered bound on any constructed family.
    let mut families = 0;
    for (cat, n, w0_size, cutoff) in
        [(&CAT7, 7u32, 21u64, 8u32), (&CAT8, 8, 28, 12), (&CAT8, 8, 20, 10)]
    {
        let pool: Vec<_> = EdgeSet::complete(n).iter().collect();
        let mut rng = RngStream::new(13, u64::from(n) * 100 + w0_size).rng();
        let w0 = sample_subset(n, &pool, w0_size as usize, &mut rng);
        let build = build_fragment_family(cat, &w0, cutoff, &budget).unwrap();
        let report = second_moment(
            &build.family,
            Prob::from_f64(0.5).unwrap(),
            100,
            RngStream::new(13, 7000 + u64::from(n)),
        )
        .unwrap();
        pass &= report.exact_variance <= report.var_bound;
        families += 1;
    }
    // Chebyshev consistency at n=8: full first round, 10^4 second rounds.
    let build = build_fragment_family(&CAT8, &EdgeSet::complete(8), 12, &budget).unwrap();
    let report = second_moment(
        &build.family,
        Prob::from_f64(2.0 / 8f64.sqrt()).unwrap(),
        10_000,
        RngStream::new(13, 0),
    )
    .unwrap();
    let consistent = report.chebyshev_consistent() == Some(true);
    pass &= consistent;
    verdict(
        13,
        "second-moment",
        pass,
        &format!(
            "variance bound holds on {families} families; Pr(X=0) {:.4} within Chebyshev+4se of {:.4}",
            report.empirical_p_x0,
            report
                .chebyshev_bound
                .as_ref()
                .and_then(|b| b.to_f64())
                .unwrap_or(f64::NAN)
        ),
    );
}

#[test]
fn acceptance_14_threshold_coupling() {
    let c_values: Vec<f64> = (0..9).map(|i| 0.8 + 0.4 * f64::from(i)).collect();
    let grid = ThresholdGrid::new(
        vec![16],
        c_values,
        500,
        SearchBudget::nodes(2_000_000),
        RngStream::new(14, 0),
    )
    .unwrap();
    let first = run_grid_coupled(&grid);
    let second = run_grid_coupled(&grid);
    let pass = first.inversions == 0 && second.inversions == 0 && first.cells == second.cells;
    let unknowns: u64 = first.cells.iter().map(|c| c.unknowns).sum();
    verdict(
        14,
        "threshold-coupling",
        pass,
        &format!(
            "n=16, 9 C-values, 500 trials: {} inversions, rerun identical, {unknowns} budget-limited trials",
            first.inversions
        ),
    );
}

#[test]
fn acceptance_15_first_moment_constant() {
    let report = first_moment_curve(100, &rational_of(1, 2)).unwrap();
    let root_e = sqrt_interval(&euler_interval(), ROOT_DIGITS);
    let pass = certainly_within(&report.q_root_n, &root_e, &rational_of(3, 100));
    verdict(
        15,
        "first-moment-constant",
        pass,
        &format!(
            "q*sqrt(n) = {:.5} at n=100 vs sqrt(e) = {:.5}, certified within 0.03",
            report.q_root_n.lo.to_f64().unwrap(),
            root_e.lo.to_f64().unwrap()
        ),
    );
}
