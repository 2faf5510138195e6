use std::io::{self as stdio, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hetssd::bayes_factor::{bf01_from_data, AnalysisPriorSample};
use hetssd::distributions::PriorSpec;
use hetssd::evidence::{classify, evidence_band, EvidenceReport, Thresholds};
use hetssd::io::{self, SensitivityRow, SsdRow};
use hetssd::model::{compute_q, DesignPoint};
use hetssd::predictive::{simulate_pair, RunStreams};
use hetssd::ssd::{cost_select, sweep_m_with_progress, SsdPriors, SsdResult, SsdTarget};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run metadata written next to every table.
#[derive(Debug, Serialize)]
pub struct RunSidecar {
    pub command: &'static str,
    pub seed: u64,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub priors: SsdPriors,
    pub target: SsdTarget,
    pub wall_time_ms: u128,
    pub version: &'static str,
}

impl RunSidecar {
    fn new(command: &'static str, cfg: &RunConfig, started: Instant) -> Self {
        RunSidecar {
            command,
            seed: cfg.seed,
            s: cfg.s,
            t: cfg.t_count,
            priors: cfg.priors(),
            target: cfg.target,
            wall_time_ms: started.elapsed().as_millis(),
            version: VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub m: u32,
    pub error: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostChoice {
    pub m: u32,
    pub n_star: u64,
    pub total_cost: f64,
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    io::write_rows(&mut buf, rows)?;
    Ok(buf)
}

fn progress_line(prefix: &str, m: u32, r: &hetssd::Result<SsdResult>, secs: f64) {
    match r {
        Ok(r) => eprintln!(
            "{prefix}m={m:>3}: n*={:<6} 1/k1={:.3} ({} evaluations, {secs:.1}s){}",
            r.n_star,
            r.thresholds.inv_k1,
            r.evaluations,
            if r.thresholds.is_degenerate() { " warning: degenerate thresholds, 1/k1 >= k0" } else { "" }
        ),
        Err(e) => eprintln!("{prefix}m={m:>3}: failed after {secs:.1}s: {e}"),
    }
}

/// Splits sweep output and turns the first failure into the exit status.
fn split(results: Vec<(u32, hetssd::Result<SsdResult>)>) -> (Vec<SsdResult>, Vec<Failure>, Option<CliError>) {
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    let mut first = None;
    for (m, r) in results {
        match r {
            Ok(r) => ok.push(r),
            Err(e) => {
                failures.push(Failure { m, error: e.to_string() });
                let e = CliError::from(e);
                if first.is_none() {
                    first = Some(match e {
                        CliError::Infeasible(msg) => CliError::Infeasible(format!("m={m}: {msg}")),
                        other => other,
                    });
                }
            }
        }
    }
    (ok, failures, first)
}

fn run_sweep(cfg: &RunConfig, priors: &SsdPriors, prefix: &str) -> Vec<(u32, hetssd::Result<SsdResult>)> {
    sweep_m_with_progress(
        &cfg.m_values,
        cfg.target,
        priors,
        cfg.sizes(),
        &cfg.search,
        cfg.seed,
        &|m, r, t| progress_line(prefix, m, r, t.as_secs_f64()),
    )
}

fn print_summary(out: &mut impl Write, results: &[SsdResult]) -> stdio::Result<()> {
    writeln!(out, "{:>4} {:>7} {:>7} {:>7} {:>7} {:>7}", "m", "n*", "1/k1", "k0", "p_c", "p_m")?;
    for r in results {
        let k0 = r.thresholds.k0;
        let k0 = if k0.is_finite() { format!("{k0:.3}") } else { "-".into() };
        writeln!(
            out,
            "{:>4} {:>7} {:>7.3} {:>7} {:>7.3} {:>7.3}",
            r.m, r.n_star, r.thresholds.inv_k1, k0, r.probs.p_c, r.probs.p_m
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SsdJson<'a> {
    rows: Vec<SsdRow>,
    failures: &'a [Failure],
    #[serde(skip_serializing_if = "Option::is_none")]
    cost_selection: Option<CostChoice>,
}

#[derive(Debug, Serialize)]
struct SsdSidecar {
    #[serde(flatten)]
    run: RunSidecar,
    m_values: Vec<u32>,
    failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost_selection: Option<CostChoice>,
}

/// Sample size sweep over `m_values`.
pub fn ssd(cfg: &RunConfig) -> CliResult<()> {
    let started = Instant::now();
    let (results, failures, err) = split(run_sweep(cfg, &cfg.priors(), ""));
    let choice = match (&cfg.cost, results.is_empty()) {
        (Some(c), false) => {
            let (r, total) = cost_select(&results, c)?;
            Some(CostChoice {
                m: r.m,
                n_star: r.n_star,
                total_cost: total,
            })
        }
        _ => None,
    };

    let rows: Vec<SsdRow> = results.iter().map(SsdRow::from).collect();
    let body = match cfg.output.format {
        Format::Csv => csv_bytes(&rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&SsdJson {
                rows,
                failures: &failures,
                cost_selection: choice,
            })?;
            s.push('\n');
            s.into_bytes()
        }
    };

    let stdout = stdio::stdout();
    let mut out = stdout.lock();
    match &cfg.output.path {
        Some(path) => {
            write_file(path, &body)?;
            let sidecar = SsdSidecar {
                run: RunSidecar::new("ssd", cfg, started),
                m_values: cfg.m_values.clone(),
                failures: failures.clone(),
                cost_selection: choice,
            };
            write_json_file(&io::sidecar_path(path), &sidecar)?;
            print_summary(&mut out, &results)?;
            if let Some(c) = choice {
                writeln!(out, "lowest cost: (n*, m) = ({}, {}), total cost {}", c.n_star, c.m, c.total_cost)?;
            }
            writeln!(out, "wrote {}", path.display())?;
        }
        None => {
            out.write_all(&body)?;
            if let (Some(c), Format::Csv) = (choice, cfg.output.format) {
                eprintln!("lowest cost: (n*, m) = ({}, {}), total cost {}", c.n_star, c.m, c.total_cost);
            }
        }
    }
    err.map_or(Ok(()), Err)
}

/// Summary of a predictive run at one design point.
#[derive(Debug, Serialize)]
pub struct PredictiveSummary {
    #[serde(flatten)]
    pub run: RunSidecar,
    pub n: u64,
    pub m: u32,
    pub k0: f64,
    pub k1: f64,
    pub evidence: EvidenceReport,
    /// `P(BF01 < 1/k1 | M1)`
    pub p_below_inv_k1_m1: f64,
    /// `P(BF01 > k0 | M0)`
    pub p_above_k0_m0: f64,
    pub max_log10_bf01_m0: f64,
    pub min_log10_bf01_m1: f64,
}

/// Predictive log BF01 samples under both models at one `(n, m)`.
pub fn predictive(cfg: &RunConfig, n: u64, m: u32, k0: f64, k1: f64) -> CliResult<PathBuf> {
    let started = Instant::now();
    let design = DesignPoint::new(n, m)?;
    let dir = cfg
        .output
        .path
        .clone()
        .ok_or_else(|| CliError::config("predictive needs an output directory (--out DIR)"))?;
    let thresholds = Thresholds::fixed(k0, k1)?;
    let (s0, s1) = simulate_pair(design, &cfg.analysis_prior, &cfg.design_prior, cfg.s, cfg.t_count, cfg.seed)?;
    let probs = classify(&s0, &s1, &thresholds, cfg.target.pi0)?;
    let ln10 = std::f64::consts::LN_10;
    let summary = PredictiveSummary {
        run: RunSidecar::new("predictive", cfg, started),
        n,
        m,
        k0,
        k1,
        evidence: probs.report(thresholds),
        p_below_inv_k1_m1: probs.p1_c,
        p_above_k0_m0: probs.p0_c,
        max_log10_bf01_m0: s0.max() / ln10,
        min_log10_bf01_m1: s1.min() / ln10,
    };

    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    io::save_log_bf_sample(&dir.join("m0.csv"), &s0)?;
    io::save_log_bf_sample(&dir.join("m1.csv"), &s1)?;
    write_json_file(&dir.join("summary.json"), &summary)?;

    let mut out = stdio::stdout().lock();
    writeln!(out, "(n, m) = ({n}, {m}), k0 = {k0}, k1 = {k1}, S = {}, T = {}", cfg.s, cfg.t_count)?;
    writeln!(out, "under M0: correct {:.4}  misleading {:.4}  undetermined {:.4}", probs.p0_c, probs.p0_m, probs.p0_u)?;
    writeln!(out, "under M1: correct {:.4}  misleading {:.4}  undetermined {:.4}", probs.p1_c, probs.p1_m, probs.p1_u)?;
    writeln!(
        out,
        "log10 BF01 range: max under M0 {:.3}, min under M1 {:.3}",
        summary.max_log10_bf01_m0, summary.min_log10_bf01_m1
    )?;
    writeln!(out, "wrote {}", dir.display())?;
    Ok(dir)
}

#[derive(Debug, Serialize)]
struct SensitivityJson<'a> {
    rows: &'a [SensitivityRow],
    failures: &'a [SensitivityFailure],
}

#[derive(Debug, Clone, Serialize)]
struct SensitivityFailure {
    mu_gamma: f64,
    m: u32,
    error: String,
}

#[derive(Debug, Serialize)]
struct SensitivitySidecar<'a> {
    #[serde(flatten)]
    run: RunSidecar,
    mu_gamma: &'a [f64],
    m_values: &'a [u32],
    failures: &'a [SensitivityFailure],
}

/// Repeats the sweep with the design-prior location set to each `mu_gamma`.
pub fn sensitivity(cfg: &RunConfig, mu_gamma: &[f64]) -> CliResult<()> {
    let started = Instant::now();
    if mu_gamma.is_empty() {
        return Err(CliError::config("--mu-gamma needs at least one value"));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut first_err = None;
    for &mu in mu_gamma {
        let d = cfg.design_prior;
        let design = PriorSpec::folded_t(d.nu, mu, d.sigma);
        design.build().map_err(|e| CliError::config(format!("mu_gamma {mu}: {e}")))?;
        let priors = SsdPriors {
            analysis: cfg.analysis_prior,
            design,
        };
        let (results, fails, err) = split(run_sweep(cfg, &priors, &format!("mu_gamma={mu} ")));
        rows.extend(results.iter().map(|r| SensitivityRow::new(mu, r)));
        failures.extend(fails.into_iter().map(|f| SensitivityFailure {
            mu_gamma: mu,
            m: f.m,
            error: f.error,
        }));
        if first_err.is_none() {
            first_err = err;
        }
    }

    let body = match cfg.output.format {
        Format::Csv => csv_bytes(&rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&SensitivityJson {
                rows: &rows,
                failures: &failures,
            })?;
            s.push('\n');
            s.into_bytes()
        }
    };
    match &cfg.output.path {
        Some(path) => {
            write_file(path, &body)?;
            let sidecar = SensitivitySidecar {
                run: RunSidecar::new("sensitivity", cfg, started),
                mu_gamma,
                m_values: &cfg.m_values,
                failures: &failures,
            };
            write_json_file(&io::sidecar_path(path), &sidecar)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => stdio::stdout().lock().write_all(&body)?,
    }
    first_err.map_or(Ok(()), Err)
}

/// Bayes factor for one observed set of site estimates.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct AnalyzeReport {
    pub sites: u32,
    pub n: u64,
    pub sigma: f64,
    pub q: f64,
    pub log_bf01: f64,
    pub bf01: f64,
    pub band: String,
    pub s: usize,
    pub seed: u64,
}

pub fn analyze(
    cfg: &RunConfig,
    data: &Path,
    n: u64,
    sigma: f64,
    format: Option<Format>,
    out: Option<&Path>,
) -> CliResult<AnalyzeReport> {
    let t = io::read_effect_sizes_path(data).map_err(|e| match e {
        hetssd::Error::Io(err) => CliError::Io(format!("{}: {err}", data.display())),
        other => CliError::config(format!("{}: {other}", data.display())),
    })?;
    let m = t.sites();
    let stream = RunStreams::new(cfg.seed, m).analysis;
    let prior = AnalysisPriorSample::draw(&cfg.analysis_prior, cfg.s, stream)?;
    let q = compute_q(&t, n, sigma)?;
    let log_bf01 = bf01_from_data(&t, n, sigma, &prior)?;
    let bf01 = log_bf01.exp();
    let report = AnalyzeReport {
        sites: m,
        n,
        sigma,
        q,
        log_bf01,
        bf01,
        band: evidence_band(bf01),
        s: cfg.s,
        seed: cfg.seed,
    };

    let rendered = match format {
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s.into_bytes()
        }
        Some(Format::Csv) => csv_bytes(std::slice::from_ref(&report))?,
        None => format!(
            "sites      {m}\nn          {n}\nsigma      {sigma}\nQ          {q:.6}\nlog BF01   {log_bf01:.6}\nBF01       {bf01:.6}\nevidence   {}\n",
            report.band
        )
        .into_bytes(),
    };
    match out {
        Some(path) => {
            write_file(path, &rendered)?;
            println!("BF01 = {bf01:.4} ({}); wrote {}", report.band, path.display());
        }
        None => stdio::stdout().lock().write_all(&rendered)?,
    }
    Ok(report)
}
