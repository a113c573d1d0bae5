//! Experiment reports and CSV sample tables.

use std::fs;
use std::path::Path;

use serde::Serialize;
use shotnoise_core::TestResult;

use crate::config::ExperimentConfig;
use crate::error::{AppError, Result};

/// How a test's statistic is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Pass iff `statistic < threshold`.
    StatisticBelow,
    /// Pass iff `p_value > threshold`.
    PValueAbove,
    /// Pass iff `statistic == threshold`.
    Exact,
    /// Pass iff `statistic > threshold`.
    StatisticAbove,
    /// Pass iff the check held on every sample.
    Holds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestRecord {
    pub name: String,
    /// e.g. `ks_one_sample`, `ks_two_sample`, `chi2_independence`, `identity`.
    pub kind: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub n: usize,
    pub m: Option<usize>,
    pub df: Option<u32>,
    pub rule: Rule,
    pub threshold: f64,
    pub passed: bool,
    /// Informational tests never affect the verdict.
    pub mandatory: bool,
    pub detail: Option<String>,
}

impl TestRecord {
    fn judge(rule: Rule, statistic: f64, p_value: Option<f64>, threshold: f64) -> bool {
        match rule {
            Rule::StatisticBelow => statistic < threshold,
            Rule::PValueAbove => p_value.is_some_and(|p| p > threshold),
            Rule::Exact => statistic == threshold,
            Rule::StatisticAbove => statistic > threshold,
            Rule::Holds => statistic == 0.0,
        }
    }

    pub fn from_result(name: impl Into<String>, kind: &str, r: &TestResult, rule: Rule, threshold: f64) -> Self {
        TestRecord {
            name: name.into(),
            kind: kind.to_string(),
            statistic: r.statistic,
            p_value: r.p_value,
            n: r.n,
            m: r.m,
            df: r.df,
            rule,
            threshold,
            passed: Self::judge(rule, r.statistic, r.p_value, threshold),
            mandatory: true,
            detail: None,
        }
    }

    /// A scalar check with no p-value.
    pub fn scalar(name: impl Into<String>, kind: &str, statistic: f64, n: usize, rule: Rule, threshold: f64) -> Self {
        TestRecord {
            name: name.into(),
            kind: kind.to_string(),
            statistic,
            p_value: None,
            n,
            m: None,
            df: None,
            rule,
            threshold,
            passed: Self::judge(rule, statistic, None, threshold),
            mandatory: true,
            detail: None,
        }
    }

    /// A property that must hold on every one of `n` items; `violations` counts failures.
    pub fn holds(name: impl Into<String>, violations: usize, n: usize) -> Self {
        Self::scalar(name, "identity", violations as f64, n, Rule::Holds, 0.0)
    }

    pub fn informational(mut self) -> Self {
        self.mandatory = false;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Summary {
    /// `None` for an empty sample.
    pub fn of(name: impl Into<String>, sample: &[f64]) -> Option<Self> {
        if sample.is_empty() {
            return None;
        }
        let mut s = sample.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let mean = s.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let q = |p: f64| s[((p * (n - 1) as f64).round() as usize).min(n - 1)];
        Some(Summary {
            name: name.into(),
            n,
            mean,
            sd: var.sqrt(),
            min: s[0],
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: s[n - 1],
        })
    }
}

/// A named numeric profile, e.g. a decay curve over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub derivation: String,
    pub streams: Vec<String>,
    pub replicas: usize,
}

pub const DERIVATION_RULE: &str = "replica r of stream family F uses RngStream::new(seed).derive(fnv1a64(F)).derive(r); \
     draws are Philox4x32-10 blocks keyed by the derived 64-bit key with counters 0, 1, 2, ..., \
     each 64-bit output x mapped to U = ((x >> 12) + 0.5) * 2^-52";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Demo-grade run: only structural checks decide, and a failure there still fails.
    Demo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportBody {
    pub experiment: String,
    pub description: String,
    pub config: ExperimentConfig,
    pub l_family: String,
    pub provenance: Provenance,
    pub tests: Vec<TestRecord>,
    pub summaries: Vec<Summary>,
    pub profiles: Vec<Profile>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl ReportBody {
    pub fn failed_tests(&self) -> impl Iterator<Item = &TestRecord> {
        self.tests.iter().filter(|t| t.mandatory && !t.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    #[serde(flatten)]
    pub body: ReportBody,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    /// The deterministic part, as pretty JSON.
    pub fn body_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.body)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn passed(&self) -> bool {
        self.body.verdict != Verdict::Fail
    }
}

/// Per-replica samples written as `samples_<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTable {
    pub name: String,
    pub index_name: String,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SampleTable {
    pub fn new(name: impl Into<String>, index_name: impl Into<String>) -> Self {
        SampleTable {
            name: name.into(),
            index_name: index_name.into(),
            columns: Vec::new(),
        }
    }

    /// Panics if the column length differs from earlier columns.
    pub fn column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        if let Some((_, first)) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "sample table columns must have equal length");
        }
        self.columns.push((name.into(), values));
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![self.index_name.clone()];
        header.extend(self.columns.iter().map(|(n, _)| n.clone()));
        out.write_record(&header)?;
        for i in 0..self.rows() {
            let mut rec = vec![i.to_string()];
            rec.extend(self.columns.iter().map(|(_, c)| format_value(c[i])));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| AppError::io("<csv>", e))?;
        Ok(())
    }
}

fn format_value(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // Shortest representation that round-trips.
        format!("{x:?}")
    }
}

/// Everything one run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub samples: Vec<SampleTable>,
}

impl RunOutput {
    /// Writes `report.json` and one CSV per sample table into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let report_path = dir.join("report.json");
        fs::write(&report_path, self.report.to_json()? + "\n").map_err(|e| AppError::io(&report_path, e))?;
        for t in &self.samples {
            let path = dir.join(format!("samples_{}.csv", t.name));
            let file = fs::File::create(&path).map_err(|e| AppError::io(&path, e))?;
            t.write_csv(std::io::BufWriter::new(file))?;
        }
        Ok(())
    }
}
