//! Optimal subjects per site `n*` for a fixed number of sites `m`.
//!
//! For each candidate `n` the *gap* is the achieved probability of correct
//! evidence minus the power target, with thresholds pinned by empirical
//! quantiles so that the misleading-evidence rate equals `alpha`:
//!
//! * conditional: `1/k1` is the alpha-quantile of BF01 under M0, and the gap
//!   is `P(BF01 < 1/k1 | M1) - power`;
//! * unconditional: additionally `k0` is the (1 - alpha)-quantile under M1,
//!   and the gap is `pi0 P(BF01 > k0 | M0) + pi1 P(BF01 < 1/k1 | M1) - power`.
//!
//! Every random draw (analysis prior, design prior, chi-squared) is taken
//! once per `(seed, m)` and reused for all `n`, which makes the gap a
//! deterministic step function of `n`. `n*` is its first non-negative point,
//! located by false position on integers.
//!
//! Two evaluation routes are provided. [`GapMethod::Full`] simulates both
//! predictive samples and classifies them. [`GapMethod::OrderStatistic`]
//! uses that BF01 is strictly decreasing in Q: every comparison of Bayes
//! factors reduces to a comparison of (inflated) Q draws, so only the two
//! threshold Bayes factors need the prior-sample average. Both routes count
//! the same events; tests check they agree.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bayes_factor::{AnalysisPriorSample, BfKernel};
use crate::distributions::{self, PriorSpec};
use crate::evidence::{
    classify_forced, empirical_quantile, nearest_rank, EvidenceProbs, ThresholdDerivation,
    Thresholds,
};
use crate::exec::Backend;
use crate::model::DesignPoint;
use crate::predictive::{self, inflate_q, LogBfSample, ModelKind, RunStreams, SampleMeta, SampleSeeds};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    Conditional,
    Unconditional,
}

fn default_pi0() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsdTarget {
    pub mode: TargetMode,
    /// Misleading-evidence rate.
    pub alpha: f64,
    /// Required probability of correct evidence, `1 - beta`.
    pub power: f64,
    /// Prior probability of M0; only read in unconditional mode.
    #[serde(default = "default_pi0")]
    pub pi0: f64,
}

impl SsdTarget {
    pub fn conditional(power: f64, alpha: f64) -> Self {
        SsdTarget {
            mode: TargetMode::Conditional,
            alpha,
            power,
            pi0: 0.5,
        }
    }

    pub fn unconditional(power: f64, alpha: f64, pi0: f64) -> Self {
        SsdTarget {
            mode: TargetMode::Unconditional,
            alpha,
            power,
            pi0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::Domain {
                what: "alpha",
                value: self.alpha,
                domain: "(0, 0.5)",
            });
        }
        if !(self.power > 0.5 && self.power < 1.0) {
            return Err(Error::Domain {
                what: "power",
                value: self.power,
                domain: "(0.5, 1)",
            });
        }
        if !(0.0..=1.0).contains(&self.pi0) {
            return Err(Error::Domain {
                what: "pi0",
                value: self.pi0,
                domain: "[0, 1]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsdPriors {
    pub analysis: PriorSpec,
    pub design: PriorSpec,
}

impl Default for SsdPriors {
    fn default() -> Self {
        SsdPriors {
            analysis: PriorSpec::default_analysis(),
            design: PriorSpec::default_design(),
        }
    }
}

/// Analysis-prior sample size `s` and predictive replicates `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimSizes {
    pub s: usize,
    pub t: usize,
}

impl SimSizes {
    pub const FULL: SimSizes = SimSizes { s: 10_000, t: 50_000 };
    pub const REDUCED: SimSizes = SimSizes { s: 2000, t: 5000 };
}

impl Default for SimSizes {
    fn default() -> Self {
        Self::FULL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    /// Simulate and classify both predictive samples: O(S T) per `n`.
    Full,
    /// Compare Q draws directly: O(T + S) per `n`.
    #[default]
    OrderStatistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "SearchConfig::default_n_init")]
    pub n_init: u64,
    #[serde(default = "SearchConfig::default_n_max")]
    pub n_max: u64,
    #[serde(default)]
    pub method: GapMethod,
}

impl SearchConfig {
    fn default_n_init() -> u64 {
        10
    }

    fn default_n_max() -> u64 {
        1_000_000
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_init: Self::default_n_init(),
            n_max: Self::default_n_max(),
            method: GapMethod::default(),
        }
    }
}

/// Gap at one `n`, with the thresholds and probabilities behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEval {
    pub n: u64,
    pub gap: f64,
    pub thresholds: Thresholds,
    pub probs: EvidenceProbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsdResult {
    pub m: u32,
    pub n_star: u64,
    pub thresholds: Thresholds,
    pub probs: EvidenceProbs,
    /// Distinct values of `n` at which the gap was evaluated.
    pub evaluations: usize,
    pub seed: u64,
}

/// Per-subject cost `c1` and per-site cost `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub c1: f64,
    pub c2: f64,
}

impl CostSpec {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        let c = CostSpec { c1, c2 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 >= 0.0 && self.c2 >= 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return Err(Error::invalid("costs must be finite and >= 0"));
        }
        if self.c1 == 0.0 && self.c2 == 0.0 {
            return Err(Error::invalid("at least one cost must be positive"));
        }
        Ok(())
    }

    /// Total cost `m (c1 n + c2)`.
    pub fn total(&self, n: u64, m: u32) -> f64 {
        m as f64 * (self.c1 * n as f64 + self.c2)
    }
}

fn check_sites(m: u32) -> Result<()> {
    if m < 3 {
        return Err(Error::Domain {
            what: "m",
            value: m as f64,
            domain: "[3, inf) for sample size searches",
        });
    }
    Ok(())
}

/// Common random numbers for one `(seed, m)` and a gap evaluator over `n`.
#[derive(Debug, Clone)]
pub struct GapEvaluator {
    m: u32,
    target: SsdTarget,
    priors: SsdPriors,
    prior_a: AnalysisPriorSample,
    design_gammas: Vec<f64>,
    null_q: Vec<f64>,
    // order statistic of the null draws that sets 1/k1
    null_q_star: f64,
    method: GapMethod,
    seed: u64,
    streams: RunStreams,
    backend: Backend,
}

impl GapEvaluator {
    pub fn new(
        m: u32,
        target: SsdTarget,
        priors: &SsdPriors,
        sizes: SimSizes,
        master_seed: u64,
        method: GapMethod,
    ) -> Result<Self> {
        check_sites(m)?;
        target.validate()?;
        let backend = Backend::default();
        let streams = RunStreams::new(master_seed, m);
        let prior_a = AnalysisPriorSample::draw(&priors.analysis, sizes.s, streams.analysis)?;
        let design_prior = priors.design.build()?;
        let design_gammas = distributions::sample_with(&design_prior, sizes.t, streams.design, backend)?;
        // n only enters through the inflation factor, so any n gives the null draws
        let probe = DesignPoint::new(1, m)?;
        let null_q = predictive::draw_null_q(probe, sizes.t, streams.q, backend)?;
        let t = null_q.len();
        // the r-th smallest BF is the r-th largest Q
        let r = nearest_rank(target.alpha, t);
        let null_q_star = kth_smallest(&null_q, t - r);
        Ok(GapEvaluator {
            m,
            target,
            priors: *priors,
            prior_a,
            design_gammas,
            null_q,
            null_q_star,
            method,
            seed: master_seed,
            streams,
            backend,
        })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn evaluate(&self, n: u64) -> Result<GapEval> {
        let design = DesignPoint::new(n, self.m)?;
        // a point-mass analysis prior makes BF01 constant in Q
        match self.method {
            GapMethod::OrderStatistic if !self.prior_a.is_degenerate() => self.evaluate_ordered(design),
            _ => self.evaluate_full(design),
        }
    }

    /// Both predictive samples at `n`, as the full route sees them.
    pub fn samples(&self, n: u64) -> Result<(LogBfSample, LogBfSample)> {
        let design = DesignPoint::new(n, self.m)?;
        let kernel = BfKernel::new(design, &self.prior_a)?;
        let t = self.null_q.len();
        let meta = |model, design_prior| SampleMeta {
            model,
            design,
            s: self.prior_a.len(),
            t_count: t,
            seeds: SampleSeeds {
                q_stream: self.streams.q.key(),
                analysis_prior: Some(self.streams.analysis.key()),
                design_prior,
            },
            analysis_prior: Some(self.priors.analysis),
            design_prior: design_prior.map(|_| self.priors.design),
        };
        let v0 = kernel.log_bf01_batch(&self.null_q, self.backend);
        let q1 = inflate_q(&self.null_q, &self.design_gammas, n);
        let v1 = kernel.log_bf01_batch(&q1, self.backend);
        Ok((
            LogBfSample::new(v0, meta(ModelKind::M0, None))?,
            LogBfSample::new(v1, meta(ModelKind::M1, Some(self.streams.design.key())))?,
        ))
    }

    fn evaluate_full(&self, design: DesignPoint) -> Result<GapEval> {
        let (s0, s1) = self.samples(design.n)?;
        let alpha = self.target.alpha;
        let inv_k1 = empirical_quantile(s0.values(), alpha).exp();
        let k0 = match self.target.mode {
            TargetMode::Conditional => f64::INFINITY,
            TargetMode::Unconditional => empirical_quantile(s1.values(), 1.0 - alpha).exp(),
        };
        let thresholds = Thresholds::new(k0, inv_k1, ThresholdDerivation::FromAlpha { alpha })?;
        let probs = classify_forced(&s0, &s1, &thresholds, self.pi0(), true)?;
        Ok(self.finish(design.n, thresholds, probs))
    }

    fn evaluate_ordered(&self, design: DesignPoint) -> Result<GapEval> {
        let kernel = BfKernel::new(design, &self.prior_a)?;
        let alpha = self.target.alpha;
        let t = self.null_q.len();
        let q1 = inflate_q(&self.null_q, &self.design_gammas, design.n);
        let q0_star = self.null_q_star;
        let inv_k1 = kernel.log_bf01(q0_star).exp();
        // BF01 > k0  <=>  Q < q1_star
        let (k0, q1_star) = match self.target.mode {
            TargetMode::Conditional => (f64::INFINITY, f64::NEG_INFINITY),
            TargetMode::Unconditional => {
                let r = nearest_rank(1.0 - alpha, t);
                let q1_star = kth_smallest(&q1, t - r);
                (kernel.log_bf01(q1_star).exp(), q1_star)
            }
        };
        let thresholds = Thresholds::new(k0, inv_k1, ThresholdDerivation::FromAlpha { alpha })?;

        let (mut c0, mut mis0) = (0, 0);
        for &q in &self.null_q {
            if q < q1_star {
                c0 += 1;
            } else if q > q0_star {
                mis0 += 1;
            }
        }
        let (mut c1, mut mis1) = (0, 0);
        for &q in &q1 {
            if q > q0_star {
                c1 += 1;
            } else if q < q1_star {
                mis1 += 1;
            }
        }
        let probs = EvidenceProbs::from_counts((c0, mis0, t), (c1, mis1, t), self.pi0());
        Ok(self.finish(design.n, thresholds, probs))
    }

    fn pi0(&self) -> f64 {
        match self.target.mode {
            TargetMode::Conditional => 0.5,
            TargetMode::Unconditional => self.target.pi0,
        }
    }

    fn finish(&self, n: u64, thresholds: Thresholds, probs: EvidenceProbs) -> GapEval {
        let achieved = match self.target.mode {
            TargetMode::Conditional => probs.p1_c,
            TargetMode::Unconditional => probs.p_c,
        };
        GapEval {
            n,
            gap: achieved - self.target.power,
            thresholds,
            probs,
        }
    }
}

fn kth_smallest(xs: &[f64], k: usize) -> f64 {
    let mut v = xs.to_vec();
    *v.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Gap at a single `n` (builds the common random numbers from scratch).
pub fn criterion_gap(
    n: u64,
    m: u32,
    target: SsdTarget,
    priors: &SsdPriors,
    sizes: SimSizes,
    master_seed: u64,
) -> Result<GapEval> {
    GapEvaluator::new(m, target, priors, sizes, master_seed, GapMethod::default())?.evaluate(n)
}

/// Integer false position on a non-decreasing step function.
struct Search<'a> {
    eval: &'a GapEvaluator,
    cache: BTreeMap<u64, GapEval>,
}

impl Search<'_> {
    fn gap(&mut self, n: u64) -> Result<f64> {
        if let Some(e) = self.cache.get(&n) {
            return Ok(e.gap);
        }
        let e = self.eval.evaluate(n)?;
        self.cache.insert(n, e);
        Ok(e.gap)
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Moved {
    Lo,
    Hi,
}

/// Smallest `n` with a non-negative gap, for an already prepared evaluator.
pub fn find_n_star_with(eval: &GapEvaluator, cfg: &SearchConfig) -> Result<SsdResult> {
    if cfg.n_init == 0 || cfg.n_max < cfg.n_init {
        return Err(Error::invalid("search needs 1 <= n_init <= n_max"));
    }
    let mut s = Search {
        eval,
        cache: BTreeMap::new(),
    };

    // bracket: gap(lo) < 0 <= gap(hi)
    let mut lo = cfg.n_init;
    let mut g_lo = s.gap(lo)?;
    let mut hi;
    let mut g_hi;
    if g_lo >= 0.0 {
        hi = lo;
        g_hi = g_lo;
        loop {
            if lo == 1 {
                return Ok(result(eval, &s.cache, 1));
            }
            lo = (lo / 2).max(1);
            g_lo = s.gap(lo)?;
            if g_lo < 0.0 {
                break;
            }
            hi = lo;
            g_hi = g_lo;
        }
    } else {
        loop {
            if lo >= cfg.n_max {
                return Err(Error::Infeasible {
                    n_max: cfg.n_max,
                    last_gap: g_lo,
                });
            }
            hi = (lo * 2).min(cfg.n_max);
            g_hi = s.gap(hi)?;
            if g_hi >= 0.0 {
                break;
            }
            lo = hi;
            g_lo = g_hi;
        }
    }

    let mut last = None;
    let mut streak = 0;
    while hi - lo > 1 {
        let next = if streak >= 2 {
            streak = 0;
            last = None;
            lo + (hi - lo) / 2
        } else {
            let x = lo as f64 - g_lo * (hi - lo) as f64 / (g_hi - g_lo);
            (x.round() as u64).clamp(lo + 1, hi - 1)
        };
        let g = s.gap(next)?;
        let moved = if g >= 0.0 {
            hi = next;
            g_hi = g;
            Moved::Hi
        } else {
            lo = next;
            g_lo = g;
            Moved::Lo
        };
        if last == Some(moved) {
            streak += 1;
        } else {
            streak = 1;
            last = Some(moved);
        }
    }
    Ok(result(eval, &s.cache, hi))
}

fn result(eval: &GapEvaluator, cache: &BTreeMap<u64, GapEval>, n: u64) -> SsdResult {
    let e = cache[&n];
    SsdResult {
        m: eval.m(),
        n_star: n,
        thresholds: e.thresholds,
        probs: e.probs,
        evaluations: cache.len(),
        seed: eval.seed(),
    }
}

pub fn find_n_star(
    m: u32,
    target: SsdTarget,
    priors: &SsdPriors,
    sizes: SimSizes,
    cfg: &SearchConfig,
    master_seed: u64,
) -> Result<SsdResult> {
    let eval = GapEvaluator::new(m, target, priors, sizes, master_seed, cfg.method)?;
    find_n_star_with(&eval, cfg)
}

/// Independent searches for each `m`, in input order. Failures are returned
/// per entry and do not stop the sweep.
pub fn sweep_m(
    m_values: &[u32],
    target: SsdTarget,
    priors: &SsdPriors,
    sizes: SimSizes,
    cfg: &SearchConfig,
    master_seed: u64,
) -> Vec<(u32, Result<SsdResult>)> {
    sweep_m_with_progress(m_values, target, priors, sizes, cfg, master_seed, &|_, _, _| {})
}

pub type Progress<'a> = dyn Fn(u32, &Result<SsdResult>, Duration) + Sync + 'a;

pub fn sweep_m_with_progress(
    m_values: &[u32],
    target: SsdTarget,
    priors: &SsdPriors,
    sizes: SimSizes,
    cfg: &SearchConfig,
    master_seed: u64,
    progress: &Progress<'_>,
) -> Vec<(u32, Result<SsdResult>)> {
    let run = |&m: &u32| {
        let start = Instant::now();
        let r = find_n_star(m, target, priors, sizes, cfg, master_seed);
        progress(m, &r, start.elapsed());
        (m, r)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        m_values.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        m_values.iter().map(run).collect()
    }
}

/// The design with the lowest total cost; ties go to fewer sites, then
/// fewer subjects.
pub fn cost_select(results: &[SsdResult], cost: &CostSpec) -> Result<(SsdResult, f64)> {
    cost.validate()?;
    results
        .iter()
        .map(|r| (*r, cost.total(r.n_star, r.m)))
        .min_by(|(a, ca), (b, cb)| {
            ca.total_cmp(cb)
                .then(a.m.cmp(&b.m))
                .then(a.n_star.cmp(&b.n_star))
        })
        .ok_or(Error::Empty("no sample size results to choose from"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: SimSizes = SimSizes { s: 500, t: 4000 };

    fn evaluator(m: u32, target: SsdTarget, method: GapMethod) -> GapEvaluator {
        GapEvaluator::new(m, target, &SsdPriors::default(), SMALL, 17, method).unwrap()
    }

    #[test]
    fn routes_agree() {
        for target in [SsdTarget::conditional(0.8, 0.01), SsdTarget::unconditional(0.8, 0.05, 0.5)] {
            let fast = evaluator(6, target, GapMethod::OrderStatistic);
            let full = evaluator(6, target, GapMethod::Full);
            for n in [5, 40, 90, 160, 400] {
                let a = fast.evaluate(n).unwrap();
                let b = full.evaluate(n).unwrap();
                assert_eq!(a.probs, b.probs, "n = {n}");
                assert_eq!(a.gap, b.gap);
                assert!((a.thresholds.inv_k1 - b.thresholds.inv_k1).abs() < 1e-12);
                if b.thresholds.k0.is_finite() {
                    assert!((a.thresholds.k0 / b.thresholds.k0 - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gap_nondecreasing_on_grid() {
        let e = evaluator(8, SsdTarget::conditional(0.8, 0.01), GapMethod::OrderStatistic);
        let gaps: Vec<f64> = [40, 60, 80, 100, 120].iter().map(|&n| e.evaluate(n).unwrap().gap).collect();
        assert!(gaps.windows(2).all(|w| w[0] <= w[1]), "{gaps:?}");
    }

    #[test]
    fn zero_design_prior_never_reaches_power() {
        let priors = SsdPriors {
            design: PriorSpec::folded_t(4.0, 0.0, 1e-12),
            ..SsdPriors::default()
        };
        let target = SsdTarget::conditional(0.8, 0.01);
        let e = GapEvaluator::new(8, target, &priors, SMALL, 3, GapMethod::OrderStatistic).unwrap();
        for n in [10, 1000, 100_000] {
            let g = e.evaluate(n).unwrap().gap;
            assert!((g - (0.01 - 0.8)).abs() <= 1.0 / SMALL.t as f64 + 1e-12, "{g}");
        }
        let cfg = SearchConfig {
            n_max: 5000,
            ..SearchConfig::default()
        };
        match find_n_star(8, target, &priors, SMALL, &cfg, 3) {
            Err(Error::Infeasible { n_max, last_gap }) => {
                assert_eq!(n_max, 5000);
                assert!(last_gap < 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn search_is_minimal_by_scan() {
        for target in [SsdTarget::conditional(0.8, 0.05), SsdTarget::unconditional(0.8, 0.05, 0.5)] {
            let e = evaluator(8, target, GapMethod::OrderStatistic);
            let r = find_n_star_with(&e, &SearchConfig::default()).unwrap();
            let scan = (1..=2 * r.n_star).find(|&n| e.evaluate(n).unwrap().gap >= 0.0).unwrap();
            assert_eq!(r.n_star, scan);
            assert!(r.evaluations < 40);
        }
    }

    #[test]
    fn tiny_targets_halve_below_n_init() {
        let priors = SsdPriors {
            design: PriorSpec::folded_t(4.0, 2.0, 0.1),
            ..SsdPriors::default()
        };
        let cfg = SearchConfig {
            n_init: 64,
            ..SearchConfig::default()
        };
        let r = find_n_star(5, SsdTarget::conditional(0.8, 0.05), &priors, SMALL, &cfg, 1).unwrap();
        assert!(r.n_star < 64);
        let e = GapEvaluator::new(5, SsdTarget::conditional(0.8, 0.05), &priors, SMALL, 1, GapMethod::OrderStatistic).unwrap();
        assert!(e.evaluate(r.n_star).unwrap().gap >= 0.0);
        if r.n_star > 1 {
            assert!(e.evaluate(r.n_star - 1).unwrap().gap < 0.0);
        }
    }

    #[test]
    fn rejects_two_sites() {
        let r = find_n_star(2, SsdTarget::conditional(0.8, 0.05), &SsdPriors::default(), SMALL, &SearchConfig::default(), 1);
        assert!(matches!(r, Err(Error::Domain { what: "m", .. })));
    }

    #[test]
    fn sweep_singleton_matches_direct() {
        let t = SsdTarget::conditional(0.8, 0.05);
        let cfg = SearchConfig::default();
        let sweep = sweep_m(&[7], t, &SsdPriors::default(), SMALL, &cfg, 9);
        let direct = find_n_star(7, t, &SsdPriors::default(), SMALL, &cfg, 9).unwrap();
        assert_eq!(sweep[0].1.as_ref().unwrap(), &direct);
    }

    #[test]
    fn sweep_reports_failures_individually() {
        let t = SsdTarget::conditional(0.8, 0.05);
        let out = sweep_m(&[2, 6], t, &SsdPriors::default(), SMALL, &SearchConfig::default(), 9);
        assert!(out[0].1.is_err());
        assert!(out[1].1.is_ok());
    }

    fn fake(m: u32, n: u64) -> SsdResult {
        let th = Thresholds::fixed(3.0, 3.0).unwrap();
        SsdResult {
            m,
            n_star: n,
            thresholds: th,
            probs: EvidenceProbs::from_counts((0, 0, 1), (0, 0, 1), 0.5),
            evaluations: 1,
            seed: 0,
        }
    }

    #[test]
    fn cost_selection_rules() {
        let rs = vec![fake(3, 328), fake(4, 178), fake(5, 126), fake(8, 71), fake(17, 36)];
        let (best, c) = cost_select(&rs, &CostSpec::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!((best.m, best.n_star), (8, 71));
        assert_eq!(c, 568.0);
        let (best, _) = cost_select(&rs, &CostSpec::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(best.m, 3);
        // equal cost: 2 * 10 == 4 * 5 -> fewer sites wins
        let (best, _) = cost_select(&[fake(4, 5), fake(2, 10)], &CostSpec::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(best.m, 2);
        assert!(cost_select(&[], &CostSpec::new(1.0, 1.0).unwrap()).is_err());
        assert!(CostSpec::new(0.0, 0.0).is_err());
        assert!(CostSpec::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn target_validation() {
        assert!(SsdTarget::conditional(0.8, 0.5).validate().is_err());
        assert!(SsdTarget::conditional(0.4, 0.05).validate().is_err());
        assert!(SsdTarget::unconditional(0.8, 0.05, 1.2).validate().is_err());
        assert!(SsdTarget::unconditional(0.9, 0.01, 0.3).validate().is_ok());
    }
}
