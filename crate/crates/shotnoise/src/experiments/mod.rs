//! Experiment runners. Each one turns an [`ExperimentConfig`] into a report
//! plus per-replica sample tables.

mod darling;
mod extremal;
mod j1;
mod lemma;
mod renewal;
mod srw2d;
mod uniformity;

use std::time::Instant;

use shotnoise_core::stats::{chi2_independence, ks_one_sample, ks_two_sample};
use shotnoise_core::SlowVaryFn;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{AppError, Result};
use crate::lspec::parse_l_spec;
use crate::report::{
    ExperimentReport, Profile, Provenance, ReportBody, Rule, RunOutput, SampleTable, Summary, TestRecord, Verdict,
    DERIVATION_RULE,
};
use crate::runner::Runner;

/// Stream family shared by every experiment that simulates renewal walks, so
/// runs on the same seed see the same walks.
pub const WALK_STREAM: &str = "walk";
/// Bins per axis of the independence test, when the sample allows.
pub const CHI2_BINS: usize = 5;
/// Minimum expected count per cell of the independence test.
pub const CHI2_MIN_CELL: usize = 50;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub l: &'a SlowVaryFn,
    pub runner: &'a Runner,
}

#[derive(Default)]
pub(crate) struct Outcome {
    pub tests: Vec<TestRecord>,
    pub summaries: Vec<Summary>,
    pub profiles: Vec<Profile>,
    pub notes: Vec<String>,
    pub samples: Vec<SampleTable>,
    pub streams: Vec<String>,
}

impl Outcome {
    pub fn test(&mut self, t: TestRecord) {
        self.tests.push(t);
    }

    pub fn summary(&mut self, name: impl Into<String>, sample: &[f64]) {
        self.summaries.extend(Summary::of(name, sample));
    }

    pub fn stream(&mut self, label: &str) {
        if !self.streams.iter().any(|s| s == label) {
            self.streams.push(label.to_string());
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn profile(&mut self, name: impl Into<String>, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) {
        self.profiles.push(Profile {
            name: name.into(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            points,
        });
    }
}

pub(crate) const D_POLICY_NOTE: &str = "KS distance thresholds on pre-asymptotic quantities are a calibration policy \
     (error scale log(tau)/tau plus sampling noise about 1.95/sqrt(n)), not a proven rate of convergence";

/// One-sample KS judged on the distance `D < d_max`.
pub(crate) fn ks_distance<F: Fn(f64) -> f64>(name: impl Into<String>, sample: &[f64], cdf: F, d_max: f64) -> Result<TestRecord> {
    let r = ks_one_sample(sample, cdf)?;
    Ok(TestRecord::from_result(name, "ks_one_sample", &r, Rule::StatisticBelow, d_max))
}

/// One-sample KS judged on the p-value `p > p_min`.
pub(crate) fn ks_pvalue<F: Fn(f64) -> f64>(name: impl Into<String>, sample: &[f64], cdf: F, p_min: f64) -> Result<TestRecord> {
    let r = ks_one_sample(sample, cdf)?.at_level(p_min);
    Ok(TestRecord::from_result(name, "ks_one_sample", &r, Rule::PValueAbove, p_min))
}

pub(crate) fn ks2_distance(name: impl Into<String>, a: &[f64], b: &[f64], d_max: f64) -> Result<TestRecord> {
    let r = ks_two_sample(a, b)?;
    Ok(TestRecord::from_result(name, "ks_two_sample", &r, Rule::StatisticBelow, d_max))
}

pub(crate) fn exp_cdf(mean: f64) -> impl Fn(f64) -> f64 {
    move |x| if x <= 0.0 { 0.0 } else { -(-x / mean).exp_m1() }
}

pub(crate) fn uniform_cdf(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

pub(crate) fn pareto_cdf(x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        1.0 - 1.0 / x
    }
}

pub(crate) fn frechet_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

pub(crate) fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i]).collect()
}

/// The fixed projection vectors `(1,0,…)`, `(0,…,1)`, `(1,…,1)`, `(1,2,…,n)`,
/// without duplicates (they coincide for `n = 1`).
pub(crate) fn projections(n: usize) -> Vec<Vec<f64>> {
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    let mut last = vec![0.0; n];
    last[n - 1] = 1.0;
    let ones = vec![1.0; n];
    let ramp: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for g in [first, last, ones, ramp] {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

pub(crate) fn project(rows: &[Vec<f64>], gamma: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(gamma).map(|(x, g)| x * g).sum())
        .collect()
}

pub(crate) fn gamma_label(gamma: &[f64]) -> String {
    let parts: Vec<String> = gamma.iter().map(|g| format!("{g}")).collect();
    format!("({})", parts.join(","))
}

pub(crate) fn u_label(u: f64) -> String {
    format!("u{u}")
}

/// Runs an experiment end to end. Nothing is written to disk.
/// Chi-square independence on the largest grid up to `CHI2_BINS` the sample
/// fills; skipped with a note when not even a 2 x 2 grid fits.
fn independence(out: &mut Outcome, name: &str, x: &[f64], y: &[f64], level: f64) -> Result<()> {
    let k = (1..=CHI2_BINS).rev().find(|k| x.len() >= CHI2_MIN_CELL * k * k).unwrap_or(1);
    if k < 2 {
        out.note(format!("{name}: skipped, {} samples fill no 2 x 2 grid", x.len()));
        return Ok(());
    }
    let chi = chi2_independence(x, y, k)?.at_level(level);
    out.test(TestRecord::from_result(name, "chi2_independence", &chi, Rule::PValueAbove, level));
    Ok(())
}

/// Walk experiments need `L^←(τu)` to be representable for every level.
fn check_levels(cfg: &ExperimentConfig, l: &SlowVaryFn) -> Result<()> {
    use Experiment::*;
    let top = match cfg.experiment {
        NuExponential | FddInverse | ShotnoiseFdd => cfg.u_grid.iter().fold(1.0f64, |m, &u| m.max(u)),
        LastOvershoot | J1Failure => 1.0,
        _ => return Ok(()),
    };
    match l.inverse(cfg.tau * top) {
        Err(shotnoise_core::Error::Overflow) => Err(AppError::config(format!(
            "L^<-(tau * {top}) is not representable for L = {}; lower tau or the largest u",
            l.describe()
        ))),
        r => r.map(drop).map_err(Into::into),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let l = parse_l_spec(&cfg.l_spec)?;
    let runner = Runner::new(cfg.seed, cfg.threads)?;
    let ctx = Ctx {
        cfg,
        l: &l,
        runner: &runner,
    };
    check_levels(cfg, &l)?;
    let mut out = Outcome::default();
    match cfg.experiment {
        Experiment::Darling => darling::run(&ctx, &mut out)?,
        Experiment::NuExponential => renewal::nu_exponential(&ctx, &mut out)?,
        Experiment::FddInverse => renewal::fdd_inverse(&ctx, &mut out)?,
        Experiment::ShotnoiseFdd => renewal::shotnoise_fdd(&ctx, &mut out)?,
        Experiment::LastOvershoot => renewal::last_overshoot(&ctx, &mut out)?,
        Experiment::SelfSimilarity => extremal::self_similarity(&ctx, &mut out)?,
        Experiment::J1Failure => j1::run(&ctx, &mut out)?,
        Experiment::Uniformity => uniformity::run(&ctx, &mut out)?,
        Experiment::LemmaL1 => lemma::run(&ctx, &mut out)?,
        Experiment::Srw2d => srw2d::run(&ctx, &mut out)?,
    }
    let failed = out.tests.iter().any(|t| t.mandatory && !t.passed);
    let verdict = match (failed, cfg.experiment.is_demo()) {
        (true, _) => Verdict::Fail,
        (false, true) => Verdict::Demo,
        (false, false) => Verdict::Pass,
    };
    let body = ReportBody {
        experiment: cfg.experiment.name().to_string(),
        description: cfg.experiment.summary().to_string(),
        config: cfg.clone(),
        l_family: l.describe(),
        provenance: Provenance {
            seed: cfg.seed,
            derivation: DERIVATION_RULE.to_string(),
            streams: out.streams,
            replicas: cfg.replicas,
        },
        tests: out.tests,
        summaries: out.summaries,
        profiles: out.profiles,
        notes: out.notes,
        verdict,
    };
    Ok(RunOutput {
        report: ExperimentReport {
            body,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
        samples: out.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_set() {
        assert_eq!(projections(1), vec![vec![1.0]]);
        assert_eq!(projections(2).len(), 4);
        assert_eq!(projections(3)[3], vec![1.0, 2.0, 3.0]);
        let rows = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(project(&rows, &[1.0, 2.0]), vec![5.0, 11.0]);
        assert_eq!(gamma_label(&[1.0, 0.5]), "(1,0.5)");
    }
}
