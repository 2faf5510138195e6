//! Bayes factors and Bayesian sample size determination for testing
//! between-site heterogeneity in multi-site replication studies.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`]: Half-t analysis prior, Folded-t design prior and the
//!   chi-squared law of the Q statistic.
//! * [`model`]: balanced hierarchical data model and the Q statistic.
//! * [`bayes_factor`]: log-space marginal likelihoods and BF01, with a
//!   quadrature reference implementation.
//! * [`predictive`]: prior predictive simulation of log BF01 under M0 and M1.
//! * [`evidence`]: Correct / Misleading / Undetermined probabilities and
//!   quantile-derived thresholds.
//! * [`ssd`]: optimal per-site sample size for a given number of sites.
//!
//! Monte Carlo work is split into fixed-size chunks, each with its own
//! counter-based random stream, so results do not depend on the number of
//! worker threads. With the `parallel` feature (on by default) chunks run on
//! the rayon pool; without it they run in order on the calling thread.

pub mod bayes_factor;
pub mod distributions;
pub mod error;
pub mod evidence;
pub mod exec;
pub mod io;
pub mod model;
pub mod predictive;
pub mod quadrature;
pub mod rng;
pub mod ssd;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bayes_factor::{
        bf01_from_data, log_bf01, log_m0, log_m1_mc, log_m1_quadrature, AnalysisPriorSample,
        BfKernel,
    };
    pub use crate::distributions::{ChiSquared, Family, FoldedT, HalfT, Prior, PriorSpec};
    pub use crate::evidence::{
        classify, threshold_from_alpha, EvidenceProbs, Side, ThresholdDerivation, Thresholds,
    };
    pub use crate::exec::Backend;
    pub use crate::model::{compute_q, DesignPoint, EffectSizeVector, HierarchicalModelSpec};
    pub use crate::predictive::{
        simulate_bf_m0, simulate_bf_m1, DesignPriorSample, LogBfSample, ModelKind,
    };
    pub use crate::rng::RngStream;
    pub use crate::ssd::{
        cost_select, criterion_gap, find_n_star, sweep_m, CostSpec, GapMethod, SearchConfig,
        SimSizes, SsdPriors, SsdResult, SsdTarget, TargetMode,
    };
    pub use crate::{Error, Result};
}
