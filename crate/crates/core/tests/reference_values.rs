//! Published reference values at the default simulation sizes and seed.

use hetssd::evidence::Side;
use hetssd::predictive::{simulate_bf_m0, simulate_bf_m1, DesignPriorSample, RunStreams};
use hetssd::prelude::*;

const SEED: u64 = 42;

fn pair(n: u64, m: u32) -> (LogBfSample, LogBfSample) {
    let d = DesignPoint::new(n, m).unwrap();
    let s = RunStreams::new(SEED, m);
    let pa = AnalysisPriorSample::draw(&PriorSpec::default_analysis(), 10_000, s.analysis).unwrap();
    let pd = DesignPriorSample::draw(&PriorSpec::default_design(), 50_000, s.design).unwrap();
    (
        simulate_bf_m0(d, &pa, 50_000, s.q).unwrap(),
        simulate_bf_m1(d, &pa, &pd, 50_000, s.q).unwrap(),
    )
}

#[test]
fn null_lower_threshold_at_100_8() {
    let (m0, _) = pair(100, 8);
    let inv_k1 = threshold_from_alpha(&m0, 0.01, Side::Lower).unwrap();
    assert!((inv_k1 - 0.215).abs() <= 0.015, "1/k1 = {inv_k1}");
}

#[test]
fn alternative_upper_threshold_at_158_8() {
    let (_, m1) = pair(158, 8);
    let k0 = threshold_from_alpha(&m1, 0.01, Side::Upper).unwrap();
    assert!((k0 - 2.015).abs() <= 0.1, "k0 = {k0}");
}

#[test]
fn moderate_evidence_for_heterogeneity_at_80_8() {
    let (m0, m1) = pair(80, 8);
    let p1 = m1.prob_below(1.0 / 3.0);
    assert!((p1 - 0.78).abs() <= 0.02, "P(BF01 < 1/3 | M1) = {p1}");
    assert!(m0.prob_below(1.0 / 3.0) < 0.05);
}

#[test]
fn gap_changes_sign_near_100_at_m8() {
    let target = SsdTarget::conditional(0.8, 0.01);
    let gap = |n| criterion_gap(n, 8, target, &SsdPriors::default(), SimSizes::FULL, SEED).unwrap().gap;
    assert!(gap(90) < 0.0);
    assert!(gap(110) >= 0.0);
    let r = find_n_star(8, target, &SsdPriors::default(), SimSizes::FULL, &SearchConfig::default(), SEED).unwrap();
    assert!(gap(r.n_star) >= 0.0 && gap(r.n_star - 1) < 0.0);
    assert!((r.n_star as f64 / 100.0 - 1.0).abs() <= 0.10);
}

fn column(target: SsdTarget) -> Vec<SsdResult> {
    let ms: Vec<u32> = (3..=17).collect();
    sweep_m(&ms, target, &SsdPriors::default(), SimSizes::FULL, &SearchConfig::default(), SEED)
        .into_iter()
        .map(|(_, r)| r.unwrap())
        .collect()
}

#[test]
fn conditional_column_decreases_in_m() {
    let published = [518, 268, 184, 143, 117, 100, 88, 79, 72, 67, 62, 58, 55, 52, 49];
    let rs = column(SsdTarget::conditional(0.8, 0.01));
    for (r, n) in rs.iter().zip(published) {
        assert!((r.n_star as f64 / n as f64 - 1.0).abs() <= 0.10, "m={} n*={} vs {n}", r.m, r.n_star);
    }
    assert!(rs.windows(2).all(|w| w[1].n_star <= w[0].n_star));
}

#[test]
fn cost_selection_matches_brute_force() {
    let rs = column(SsdTarget::conditional(0.8, 0.05));
    let cost = CostSpec::new(1.0, 100.0).unwrap();
    let (best, total) = cost_select(&rs, &cost).unwrap();
    let mut brute = (f64::INFINITY, 0, 0);
    for r in &rs {
        let c = r.m as f64 * (r.n_star as f64 + 100.0);
        if c < brute.0 {
            brute = (c, r.m, r.n_star);
        }
    }
    assert_eq!((total, best.m, best.n_star), brute);
}
