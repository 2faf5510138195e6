//! File formats: effect-size CSV input, log BF sample CSV + JSON sidecar,
//! and the sample size table CSV.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::evidence::Thresholds;
use crate::model::EffectSizeVector;
use crate::predictive::{LogBfSample, SampleMeta};
use crate::ssd::SsdResult;
use crate::{Error, Result};

/// Reads site estimates: a column named `t`, or the first column when the
/// file has no header.
pub fn read_effect_sizes<R: Read>(reader: R) -> Result<EffectSizeVector> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut column = 0;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i == 0 {
            if let Some(pos) = rec.iter().position(|h| h.eq_ignore_ascii_case("t")) {
                column = pos;
                continue;
            }
            if rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                return Err(Error::invalid("effect-size CSV header has no `t` column"));
            }
        }
        let field = rec
            .get(column)
            .ok_or_else(|| Error::invalid(format!("row {} has no column {column}", i + 1)))?;
        if field.is_empty() {
            continue;
        }
        let v = field
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("row {}: `{field}` is not a number", i + 1)))?;
        values.push(v);
    }
    EffectSizeVector::new(values)
}

pub fn read_effect_sizes_path(path: &Path) -> Result<EffectSizeVector> {
    read_effect_sizes(File::open(path)?)
}

/// Sidecar path: `foo.csv` -> `foo.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Single `log_bf01` column.
pub fn write_log_bf_csv<W: Write>(writer: W, sample: &LogBfSample) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["log_bf01"])?;
    for v in sample.values() {
        w.write_record([v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_log_bf_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = rec.get(0).unwrap_or_default();
        out.push(
            f.parse::<f64>()
                .map_err(|_| Error::invalid(format!("`{f}` is not a number")))?,
        );
    }
    Ok(out)
}

/// Writes `path` and its metadata sidecar.
pub fn save_log_bf_sample(path: &Path, sample: &LogBfSample) -> Result<()> {
    write_log_bf_csv(File::create(path)?, sample)?;
    let meta = serde_json::to_string_pretty(sample.meta())?;
    std::fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

pub fn load_log_bf_sample(path: &Path) -> Result<LogBfSample> {
    let values = read_log_bf_csv(File::open(path)?)?;
    let meta: SampleMeta = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    LogBfSample::new(values, meta)
}

/// One row of the sample size table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsdRow {
    pub m: u32,
    pub n_star: u64,
    pub inv_k1: f64,
    /// Empty in conditional mode.
    pub k0: Option<f64>,
    pub p0_c: f64,
    pub p0_m: f64,
    pub p0_u: f64,
    pub p1_c: f64,
    pub p1_m: f64,
    pub p1_u: f64,
    pub p_c: f64,
    pub p_m: f64,
    pub p_u: f64,
    pub evaluations: usize,
    pub seed: u64,
}

impl From<&SsdResult> for SsdRow {
    fn from(r: &SsdResult) -> Self {
        let Thresholds { k0, inv_k1, .. } = r.thresholds;
        let p = &r.probs;
        SsdRow {
            m: r.m,
            n_star: r.n_star,
            inv_k1,
            k0: k0.is_finite().then_some(k0),
            p0_c: p.p0_c,
            p0_m: p.p0_m,
            p0_u: p.p0_u,
            p1_c: p.p1_c,
            p1_m: p.p1_m,
            p1_u: p.p1_u,
            p_c: p.p_c,
            p_m: p.p_m,
            p_u: p.p_u,
            evaluations: r.evaluations,
            seed: r.seed,
        }
    }
}

/// Sensitivity sweeps prepend the design-prior location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub mu_gamma: f64,
    pub m: u32,
    pub n_star: u64,
    pub inv_k1: f64,
    pub k0: Option<f64>,
    pub p0_c: f64,
    pub p0_m: f64,
    pub p0_u: f64,
    pub p1_c: f64,
    pub p1_m: f64,
    pub p1_u: f64,
    pub p_c: f64,
    pub p_m: f64,
    pub p_u: f64,
    pub evaluations: usize,
    pub seed: u64,
}

impl SensitivityRow {
    pub fn new(mu_gamma: f64, r: &SsdResult) -> Self {
        let s = SsdRow::from(r);
        SensitivityRow {
            mu_gamma,
            m: s.m,
            n_star: s.n_star,
            inv_k1: s.inv_k1,
            k0: s.k0,
            p0_c: s.p0_c,
            p0_m: s.p0_m,
            p0_u: s.p0_u,
            p1_c: s.p1_c,
            p1_m: s.p1_m,
            p1_u: s.p1_u,
            p_c: s.p_c,
            p_m: s.p_m,
            p_u: s.p_u,
            evaluations: s.evaluations,
            seed: s.seed,
        }
    }
}

pub fn write_rows<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_ssd_csv<W: Write>(writer: W, results: &[SsdResult]) -> Result<()> {
    let rows: Vec<SsdRow> = results.iter().map(SsdRow::from).collect();
    write_rows(writer, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes_factor::AnalysisPriorSample;
    use crate::distributions::PriorSpec;
    use crate::model::DesignPoint;
    use crate::predictive::simulate_bf_m0;
    use crate::rng::RngStream;
    use crate::ssd::{find_n_star, SearchConfig, SimSizes, SsdPriors, SsdTarget};

    #[test]
    fn effect_sizes_with_and_without_header() {
        let a = read_effect_sizes("t\n0.1\n0.2\n0.3\n".as_bytes()).unwrap();
        let b = read_effect_sizes("0.1\n0.2\n0.3\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        let c = read_effect_sizes("site,t\nA,0.1\nB, 0.2\nC,0.3\n".as_bytes()).unwrap();
        assert_eq!(a, c);
        assert!(read_effect_sizes("x\n1\n2\n".as_bytes()).is_err());
        assert!(read_effect_sizes("t\n1\n".as_bytes()).is_err());
        assert!(read_effect_sizes("t\n1\nabc\n".as_bytes()).is_err());
    }

    #[test]
    fn log_bf_sample_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m0.csv");
        let pa = AnalysisPriorSample::draw(&PriorSpec::default_analysis(), 200, RngStream::new(1)).unwrap();
        let s = simulate_bf_m0(DesignPoint::new(30, 4).unwrap(), &pa, 1000, RngStream::new(2)).unwrap();
        save_log_bf_sample(&path, &s).unwrap();
        assert!(sidecar_path(&path).ends_with("m0.meta.json"));
        let back = load_log_bf_sample(&path).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn ssd_table_round_trip() {
        let sizes = SimSizes { s: 300, t: 2000 };
        let cfg = SearchConfig::default();
        let rs: Vec<SsdResult> = [
            SsdTarget::conditional(0.8, 0.05),
            SsdTarget::unconditional(0.8, 0.05, 0.5),
        ]
        .iter()
        .map(|t| find_n_star(6, *t, &SsdPriors::default(), sizes, &cfg, 4).unwrap())
        .collect();
        let mut buf = Vec::new();
        write_ssd_csv(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "m,n_star,inv_k1,k0,p0_c,p0_m,p0_u,p1_c,p1_m,p1_u,p_c,p_m,p_u,evaluations,seed\n"
        ));
        // conditional row leaves k0 empty
        assert!(text.lines().nth(1).unwrap().split(',').nth(3).unwrap().is_empty());
        let rows: Vec<SsdRow> = read_rows(buf.as_slice()).unwrap();
        let expect: Vec<SsdRow> = rs.iter().map(SsdRow::from).collect();
        assert_eq!(rows, expect);
    }
}
