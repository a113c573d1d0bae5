//! Desk-scale acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;

use shotnoise::experiments;
use shotnoise::report::{RunOutput, SampleTable, TestRecord, Verdict};
use shotnoise::runner::Runner;
use shotnoise::{AppError, Experiment, ExperimentConfig, Result};
use shotnoise_core::extremal::{
    joint_cdf_pre_post, pre_post_from_path, sample_inverse_fdd, sample_path_to_level, sample_pre_post,
};
use shotnoise_core::stats::{ks_one_sample, ks_two_sample};
use shotnoise_core::Error as CoreError;

const SEED: u64 = 42;
const D_RENEWAL: f64 = 0.03;
const D_SCALING: f64 = 0.02;
const D_CROSS: f64 = 0.02;
const P_EXACT: f64 = 1e-3;
const CDF_ABS: f64 = 0.01;
const UNIFORM_SUP: f64 = 1e-2;
const RATIO_IDENTITY: f64 = 1e-6;
const EXTREMAL_N: usize = 100_000;
const CROSS_N: usize = 10_000;
const CROSS_FLOOR_FACTOR: f64 = 1e-3;
const J_EPS: f64 = 0.5;
const DETERMINISM_REPLICAS: usize = 200;
const DETERMINISM_TAU: f64 = 1e3;
const THREADS: [usize; 2] = [1, 4];

struct Check {
    ok: bool,
    lines: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { ok: true, lines: Vec::new() }
    }

    fn expect(&mut self, ok: bool, line: impl Into<String>) {
        self.ok &= ok;
        self.lines.push(format!("{}{}", if ok { "" } else { "[fail] " }, line.into()));
    }

    fn below(&mut self, what: &str, value: f64, limit: f64) {
        self.expect(value < limit, format!("{what} = {value:.4e} < {limit:e}"));
    }

    fn above(&mut self, what: &str, value: f64, limit: f64) {
        self.expect(value > limit, format!("{what} = {value:.4e} > {limit:e}"));
    }

    fn verdict(&mut self, out: &RunOutput, want: Verdict) {
        let v = out.report.body.verdict;
        let failed: Vec<&str> = out.report.body.failed_tests().map(|t| t.name.as_str()).collect();
        self.expect(v == want, format!("{} verdict {v:?} (failed: {failed:?})", out.report.body.experiment));
    }

    /// Every test whose name starts with `prefix`; at least one must exist.
    fn stats_below(&mut self, out: &RunOutput, prefix: &str, limit: f64) {
        let found: Vec<&TestRecord> = tests(out, prefix);
        self.expect(!found.is_empty(), format!("tests named '{prefix}...' present"));
        for t in found {
            self.below(&t.name, t.statistic, limit);
        }
    }

    fn p_above(&mut self, out: &RunOutput, prefix: &str, limit: f64) {
        let found: Vec<&TestRecord> = tests(out, prefix);
        self.expect(!found.is_empty(), format!("tests named '{prefix}...' present"));
        for t in found {
            self.above(&format!("{} p", t.name), t.p_value.unwrap_or(f64::NAN), limit);
        }
    }
}

fn tests<'a>(out: &'a RunOutput, prefix: &str) -> Vec<&'a TestRecord> {
    out.report.body.tests.iter().filter(|t| t.name.starts_with(prefix)).collect()
}

fn run_with(e: Experiment, edit: impl FnOnce(&mut ExperimentConfig)) -> Result<RunOutput> {
    let mut cfg = ExperimentConfig::defaults(e);
    cfg.seed = SEED;
    edit(&mut cfg);
    experiments::run(&cfg)
}

fn table<'a>(out: &'a RunOutput, name: &str) -> Result<&'a SampleTable> {
    out.samples
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| AppError::config(format!("no sample table '{name}'")))
}

fn csv_body(t: &SampleTable) -> Result<String> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    let text = String::from_utf8(buf).map_err(|e| AppError::config(e.to_string()))?;
    Ok(text.lines().skip(1).collect::<Vec<_>>().join("\n"))
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn exp_cdf(mean: f64) -> impl Fn(f64) -> f64 {
    move |x| if x <= 0.0 { 0.0 } else { -(-x / mean).exp_m1() }
}

fn pareto_cdf(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        1.0 - 1.0 / x
    }
}

fn extremal_samplers() -> Result<Check> {
    let mut c = Check::new();
    let runner = Runner::new(SEED, None)?;
    let grid = [0.5, 1.0, 2.0];
    let m = runner.replicas("acceptance/m-inverse", EXTREMAL_N, |_, rng| Ok(sample_inverse_fdd(&grid, rng)?))?;
    for (i, &u) in grid.iter().enumerate() {
        let col: Vec<f64> = m.iter().map(|r| r[i]).collect();
        let p = ks_one_sample(&col, exp_cdf(u))?.p_value.unwrap_or(f64::NAN);
        c.above(&format!("m<-({u}) vs Exp(mean {u}) KS p"), p, P_EXACT);
    }
    let exact = joint_cdf_pre_post(0.5, 2.0)?;
    c.expect((exact - 0.25).abs() < 1e-15, format!("closed-form joint cdf at (0.5, 2) = {exact}"));
    for u in grid {
        let label = format!("acceptance/pre-post/u{u}");
        let pp = runner.replicas(&label, EXTREMAL_N, |_, rng| Ok(sample_pre_post(u, rng)?))?;
        if u == 1.0 {
            let hits = pp.iter().filter(|p| p.pre <= 0.5 && p.post <= 2.0).count();
            let emp = hits as f64 / EXTREMAL_N as f64;
            c.below("|joint cdf at (0.5, 2) - 0.25|", (emp - 0.25).abs(), CDF_ABS);
        }
        let post: Vec<f64> = pp.iter().map(|p| p.post / u).collect();
        let p = ks_one_sample(&post, pareto_cdf)?.p_value.unwrap_or(f64::NAN);
        c.above(&format!("post/u at u={u} vs Pareto(1) KS p"), p, P_EXACT);
    }
    Ok(c)
}

fn cross_oracle() -> Result<Check> {
    let mut c = Check::new();
    let runner = Runner::new(SEED, None)?;
    let u = 1.0;
    let direct = runner.replicas("acceptance/cross/direct", CROSS_N, |_, rng| Ok(sample_pre_post(u, rng)?))?;
    let scanned = runner.replicas("acceptance/cross/path", CROSS_N, |_, rng| {
        let path = sample_path_to_level(u, u * CROSS_FLOOR_FACTOR, rng)?;
        pre_post_from_path(&path, u).ok_or(AppError::Numeric(CoreError::Degenerate("path never exceeds u")))
    })?;
    let split = |s: &[shotnoise_core::PrePostJump]| -> (Vec<f64>, Vec<f64>) {
        (s.iter().map(|p| p.pre).collect(), s.iter().map(|p| p.post).collect())
    };
    let (dp, dq) = split(&direct);
    let (sp, sq) = split(&scanned);
    c.below("pre: direct vs path-scanning D", ks_two_sample(&dp, &sp)?.statistic, D_CROSS);
    c.below("post: direct vs path-scanning D", ks_two_sample(&dq, &sq)?.statistic, D_CROSS);
    Ok(c)
}

fn nu_exponential(out: &RunOutput) -> Result<Check> {
    let mut c = Check::new();
    c.stats_below(out, "nu/tau at u=1 ", D_RENEWAL);
    c.verdict(out, Verdict::Pass);
    Ok(c)
}

fn fdd_inverse(out: &RunOutput) -> Result<Check> {
    let mut c = Check::new();
    c.expect(out.report.body.config.u_grid == [0.5, 1.0, 2.0], "u grid {0.5, 1, 2}");
    c.stats_below(out, "nu/tau at u=", D_RENEWAL);
    c.stats_below(out, "projection ", D_RENEWAL);
    c.verdict(out, Verdict::Pass);
    Ok(c)
}

fn shotnoise(nu: &RunOutput, fdd: &RunOutput) -> Result<Check> {
    let mut c = Check::new();
    for alpha in [-0.5, 0.0, 1.0] {
        let out = run_with(Experiment::ShotnoiseFdd, |cfg| cfg.alpha = alpha)?;
        c.lines.push(format!("alpha = {alpha}:"));
        c.stats_below(&out, "scaled Y at u=", D_RENEWAL);
        c.verdict(&out, Verdict::Pass);
        if alpha == 0.0 {
            let shot = table(&out, "prelimit")?;
            let same = csv_body(shot)? == csv_body(table(fdd, "prelimit")?)?;
            c.expect(same, "alpha = 0 prelimit CSV rows byte-identical to fdd-inverse");
            let at_one = shot.columns.iter().position(|(n, _)| n == "y_scaled_u1");
            let nu_col = &table(nu, "nu")?.columns[0].1;
            let same_nu = at_one.is_some_and(|i| bits(&shot.columns[i].1) == bits(nu_col));
            c.expect(same_nu, "alpha = 0 column at u=1 bit-identical to nu-exponential");
        }
    }
    Ok(c)
}

fn last_overshoot() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::LastOvershoot, |_| {})?;
    c.stats_below(&out, "L(last)/tau ~ Uniform", D_RENEWAL);
    c.stats_below(&out, "L(first exceedance)/tau ~ Pareto", D_RENEWAL);
    c.p_above(&out, "independence of L(last)/tau", P_EXACT);
    c.verdict(&out, Verdict::Pass);
    Ok(c)
}

fn self_similarity() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::SelfSimilarity, |cfg| cfg.u_grid = vec![3.0])?;
    c.stats_below(&out, "pre at u=3 vs", D_SCALING);
    c.stats_below(&out, "post at u=3 vs", D_SCALING);
    c.verdict(&out, Verdict::Pass);
    Ok(c)
}

fn j1_failure() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::J1Failure, |_| {})?;
    for t in tests(&out, "J = 1/tau on every path") {
        c.expect(t.passed && t.statistic == 0.0, format!("{}: {} violations", t.name, t.statistic));
    }
    c.expect(!tests(&out, "J = 1/tau on every path").is_empty(), "exact-jump test present");
    let name = format!("P{{J(m<-) > {J_EPS}}}");
    let freq = tests(&out, &name);
    c.expect(!freq.is_empty(), format!("{name} test present"));
    for t in freq {
        c.above(&t.name, t.statistic, 0.0);
    }
    c.verdict(&out, Verdict::Pass);
    Ok(c)
}

fn uniformity() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::Uniformity, |cfg| {
        cfg.alpha = 1.0;
        cfg.u_grid = vec![2.0];
        cfg.margin = 0.5;
    })?;
    c.stats_below(&out, "sup deviation at t = ", UNIFORM_SUP);
    c.verdict(&out, Verdict::Pass);
    let flat = run_with(Experiment::Uniformity, |cfg| cfg.alpha = 0.0)?;
    let zero = tests(&flat, "sup deviation");
    c.expect(!zero.is_empty(), "alpha = 0 sup tests present");
    for t in zero {
        c.expect(t.statistic == 0.0, format!("alpha = 0: {} = {}", t.name, t.statistic));
    }
    let sup = &table(&flat, "uniformity")?.columns[1].1;
    c.expect(sup.iter().all(|&s| s == 0.0), "alpha = 0 sup column identically 0");
    Ok(c)
}

fn lemma() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::LemmaL1, |_| {})?;
    for t in tests(&out, "") {
        if t.name.ends_with(": L1(0)") || t.name.contains("strictly increasing") {
            c.expect(t.passed && t.statistic == 0.0, format!("{} = {}", t.name, t.statistic));
        }
    }
    c.stats_below(&out, "inverse-log: L1/L = 1 - exp(-I(x))", RATIO_IDENTITY);
    c.verdict(&out, Verdict::Pass);
    Ok(c)
}

fn determinism() -> Result<Check> {
    let mut c = Check::new();
    for e in Experiment::ALL {
        let bodies = THREADS
            .iter()
            .map(|&n| {
                let out = run_with(e, |cfg| {
                    cfg.replicas = DETERMINISM_REPLICAS;
                    if !matches!(e, Experiment::Uniformity | Experiment::LemmaL1) {
                        cfg.tau = DETERMINISM_TAU;
                    }
                    cfg.threads = Some(n);
                })?;
                out.report.body_json()
            })
            .collect::<Result<Vec<_>>>()?;
        c.expect(bodies.windows(2).all(|w| w[0] == w[1]), format!("{e}: identical bodies for threads {THREADS:?}"));
    }
    Ok(c)
}

fn srw2d() -> Result<Check> {
    let mut c = Check::new();
    let out = run_with(Experiment::Srw2d, |_| {})?;
    c.expect(out.report.body.config.tau == 1e3, "n = 1000");
    for t in &out.report.body.tests {
        c.expect(t.passed, format!("{}: statistic {:.4e} threshold {:e}", t.name, t.statistic, t.threshold));
    }
    c.verdict(&out, Verdict::Demo);
    Ok(c)
}

fn report(title: &str, check: Result<Check>) -> bool {
    match check {
        Ok(c) => {
            println!("{}  {title}", if c.ok { "PASS" } else { "FAIL" });
            for l in &c.lines {
                println!("        {l}");
            }
            c.ok
        }
        Err(e) => {
            println!("FAIL  {title}\n        error: {e}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report("exact extremal samplers", extremal_samplers());
    ok &= report("pre/post direct sampler vs path-scanning oracle", cross_oracle());
    let nu = run_with(Experiment::NuExponential, |_| {});
    let fdd = run_with(Experiment::FddInverse, |_| {});
    let (nu, fdd) = match (nu, fdd) {
        (Ok(nu), Ok(fdd)) => (nu, fdd),
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL  renewal runs\n        error: {e}");
            return ExitCode::FAILURE;
        }
    };
    ok &= report("nu(L<-(tau))/tau ~ Exponential(1)", nu_exponential(&nu));
    ok &= report("fdd of nu(L<-(tau u))/tau", fdd_inverse(&fdd));
    ok &= report("scaled shot noise at alpha in {-0.5, 0, 1}", shotnoise(&nu, &fdd));
    ok &= report("last renewal before and first after L<-(tau)", last_overshoot());
    ok &= report("pre/post scaling at u = 3", self_similarity());
    ok &= report("J1 failure", j1_failure());
    ok &= report("uniform convergence on compacts", uniformity());
    ok &= report("regularized L1", lemma());
    ok &= report("determinism across thread counts", determinism());
    ok &= report("planar random walk demo", srw2d());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
