//! Correct / Misleading / Undetermined evidence probabilities.
//!
//! | true model | Correct         | Misleading      | Undetermined          |
//! |------------|-----------------|-----------------|-----------------------|
//! | M0         | BF01 > k0       | BF01 < 1/k1     | 1/k1 <= BF01 <= k0    |
//! | M1         | BF01 < 1/k1     | BF01 > k0       | 1/k1 <= BF01 <= k0    |
//!
//! A Bayes factor exactly on a cut-off is Undetermined.

use serde::{Deserialize, Serialize};

use crate::predictive::LogBfSample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdDerivation {
    Fixed,
    FromAlpha { alpha: f64 },
}

/// Evidence cut-offs: `BF01 > k0` favours M0, `BF01 < 1/k1` favours M1.
///
/// `k0 = +inf` disables evidence for M0; it serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    #[serde(with = "finite_or_null")]
    pub k0: f64,
    pub inv_k1: f64,
    pub derivation: ThresholdDerivation,
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_some(x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl Thresholds {
    pub fn new(k0: f64, inv_k1: f64, derivation: ThresholdDerivation) -> Result<Self> {
        if k0.is_nan() || k0 <= 0.0 {
            return Err(Error::invalid(format!("k0 must be > 0, got {k0}")));
        }
        if !(inv_k1 > 0.0 && inv_k1.is_finite()) {
            return Err(Error::invalid(format!("1/k1 must be > 0, got {inv_k1}")));
        }
        Ok(Thresholds {
            k0,
            inv_k1,
            derivation,
        })
    }

    /// Fixed thresholds `k0` and `k1` (note: `k1`, not `1/k1`).
    pub fn fixed(k0: f64, k1: f64) -> Result<Self> {
        Self::new(k0, 1.0 / k1, ThresholdDerivation::Fixed)
    }

    /// Empty undetermined region: the scale of evidence loses its meaning.
    pub fn is_degenerate(&self) -> bool {
        self.inv_k1 >= self.k0
    }
}

/// Conditional and overall evidence probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceProbs {
    pub p0_c: f64,
    pub p0_m: f64,
    pub p0_u: f64,
    pub p1_c: f64,
    pub p1_m: f64,
    pub p1_u: f64,
    pub p_c: f64,
    pub p_m: f64,
    pub p_u: f64,
    pub pi0: f64,
    /// Replicates behind the M0 and M1 proportions.
    pub t0: usize,
    pub t1: usize,
}

/// Binomial Monte Carlo standard errors matching [`EvidenceProbs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSe {
    pub p0_c: f64,
    pub p0_m: f64,
    pub p0_u: f64,
    pub p1_c: f64,
    pub p1_m: f64,
    pub p1_u: f64,
    pub p_c: f64,
    pub p_m: f64,
    pub p_u: f64,
}

/// JSON export: probabilities, thresholds and standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub thresholds: Thresholds,
    pub probs: EvidenceProbs,
    pub se: EvidenceSe,
}

impl EvidenceProbs {
    /// Builds the overall row from raw counts. In each conditional row the
    /// Correct event takes precedence, then Misleading, so the row stays on
    /// the simplex even for degenerate thresholds.
    pub(crate) fn from_counts(
        m0: (usize, usize, usize),
        m1: (usize, usize, usize),
        pi0: f64,
    ) -> Self {
        let (c0, mis0, t0) = m0;
        let (c1, mis1, t1) = m1;
        let f0 = |k: usize| k as f64 / t0 as f64;
        let f1 = |k: usize| k as f64 / t1 as f64;
        let (p0_c, p0_m, p0_u) = (f0(c0), f0(mis0), f0(t0 - c0 - mis0));
        let (p1_c, p1_m, p1_u) = (f1(c1), f1(mis1), f1(t1 - c1 - mis1));
        let pi1 = 1.0 - pi0;
        EvidenceProbs {
            p0_c,
            p0_m,
            p0_u,
            p1_c,
            p1_m,
            p1_u,
            p_c: pi0 * p0_c + pi1 * p1_c,
            p_m: pi0 * p0_m + pi1 * p1_m,
            p_u: pi0 * p0_u + pi1 * p1_u,
            pi0,
            t0,
            t1,
        }
    }

    pub fn standard_errors(&self) -> EvidenceSe {
        let se = |p: f64, t: usize| (p * (1.0 - p) / t as f64).sqrt();
        let pi1 = 1.0 - self.pi0;
        let mix = |a: f64, b: f64| {
            ((self.pi0 * se(a, self.t0)).powi(2) + (pi1 * se(b, self.t1)).powi(2)).sqrt()
        };
        EvidenceSe {
            p0_c: se(self.p0_c, self.t0),
            p0_m: se(self.p0_m, self.t0),
            p0_u: se(self.p0_u, self.t0),
            p1_c: se(self.p1_c, self.t1),
            p1_m: se(self.p1_m, self.t1),
            p1_u: se(self.p1_u, self.t1),
            p_c: mix(self.p0_c, self.p1_c),
            p_m: mix(self.p0_m, self.p1_m),
            p_u: mix(self.p0_u, self.p1_u),
        }
    }

    pub fn report(&self, thresholds: Thresholds) -> EvidenceReport {
        EvidenceReport {
            thresholds,
            probs: *self,
            se: self.standard_errors(),
        }
    }
}

fn check_pi0(pi0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pi0) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "pi0",
            value: pi0,
            domain: "[0, 1]",
        })
    }
}

/// Classifies both predictive samples; rejects degenerate thresholds.
pub fn classify(
    sample_m0: &LogBfSample,
    sample_m1: &LogBfSample,
    th: &Thresholds,
    pi0: f64,
) -> Result<EvidenceProbs> {
    classify_forced(sample_m0, sample_m1, th, pi0, false)
}

/// As [`classify`]; with `force` degenerate thresholds are accepted and each
/// replicate is counted Correct first, then Misleading, then Undetermined.
pub fn classify_forced(
    sample_m0: &LogBfSample,
    sample_m1: &LogBfSample,
    th: &Thresholds,
    pi0: f64,
    force: bool,
) -> Result<EvidenceProbs> {
    check_pi0(pi0)?;
    let (d0, d1) = (sample_m0.design(), sample_m1.design());
    if d0 != d1 {
        return Err(Error::DesignMismatch {
            n0: d0.n,
            m0: d0.m,
            n1: d1.n,
            m1: d1.m,
        });
    }
    if th.is_degenerate() && !force {
        return Err(Error::DegenerateThresholds {
            k0: th.k0,
            inv_k1: th.inv_k1,
        });
    }
    // compare on the BF scale: thresholds are exp(order statistic), and
    // ln(exp(v)) need not round-trip to v
    let (k0, inv_k1) = (th.k0, th.inv_k1);
    let favours_m0 = |v: f64| v.exp() > k0;
    let favours_m1 = |v: f64| v.exp() < inv_k1;

    let mut c0 = 0;
    let mut mis0 = 0;
    for &v in sample_m0.values() {
        if favours_m0(v) {
            c0 += 1;
        } else if favours_m1(v) {
            mis0 += 1;
        }
    }
    let mut c1 = 0;
    let mut mis1 = 0;
    for &v in sample_m1.values() {
        if favours_m1(v) {
            c1 += 1;
        } else if favours_m0(v) {
            mis1 += 1;
        }
    }
    Ok(EvidenceProbs::from_counts(
        (c0, mis0, sample_m0.len()),
        (c1, mis1, sample_m1.len()),
        pi0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `1/k1`: the alpha-quantile.
    Lower,
    /// `k0`: the (1 - alpha)-quantile.
    Upper,
}

/// 1-based nearest rank `ceil(p * len)`, clamped to `1..=len`.
pub fn nearest_rank(p: f64, len: usize) -> usize {
    // guard against p * len landing a hair above an integer
    let r = (p * len as f64 - 1e-9).ceil();
    (r.max(1.0) as usize).min(len)
}

/// Nearest-rank empirical quantile of a sample.
pub fn empirical_quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[nearest_rank(p, sorted.len()) - 1]
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "(0, 0.5)",
        })
    }
}

/// Threshold on the BF scale from the alpha-quantile (lower) or
/// (1 - alpha)-quantile (upper) of a log BF sample.
pub fn threshold_from_alpha(sample: &LogBfSample, alpha: f64, side: Side) -> Result<f64> {
    check_alpha(alpha)?;
    let p = match side {
        Side::Lower => alpha,
        Side::Upper => 1.0 - alpha,
    };
    Ok(empirical_quantile(sample.values(), p).exp())
}

/// Verbal strength of a Bayes factor, informational only.
pub fn evidence_band(bf01: f64) -> String {
    let (strength, favoured) = if bf01 >= 1.0 { (bf01, "M0") } else { (1.0 / bf01, "M1") };
    let label = match strength {
        s if s < 3.0 => "anecdotal",
        s if s < 10.0 => "moderate",
        s if s < 30.0 => "strong",
        s if s < 100.0 => "very strong",
        _ => "extreme",
    };
    format!("{label} evidence for {favoured}")
}
