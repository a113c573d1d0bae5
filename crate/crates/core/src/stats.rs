//! Empirical distributions and the goodness-of-fit tests used by every
//! experiment: one- and two-sample Kolmogorov–Smirnov with asymptotic
//! p-values, and a rank-based chi-square test of independence.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Significance level used when a caller does not pick one.
pub const DEFAULT_LEVEL: f64 = 1e-3;

/// Minimum sample size accepted by the KS tests.
pub const KS_MIN_N: usize = 10;

/// A sorted sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EcdfView {
    sorted: Vec<f64>,
}

impl EcdfView {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::SampleTooSmall { got: 0, need: 1 });
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(invalid("sample contains NaN"));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(EcdfView { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// `F_n(x) = #{x_i ≤ x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Empirical `q`-quantile (lower), `q ∈ [0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let k = (libm::ceil(q.clamp(0.0, 1.0) * n as f64) as usize).clamp(1, n);
        self.sorted[k - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    /// `None` when no p-value applies.
    pub p_value: Option<f64>,
    pub n: usize,
    /// Second sample size of a two-sample test.
    pub m: Option<usize>,
    /// Degrees of freedom of a chi-square test.
    pub df: Option<u32>,
    pub level: f64,
    pub rejected: bool,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, n: usize, m: Option<usize>, df: Option<u32>) -> Self {
        TestResult {
            statistic,
            p_value: Some(p_value),
            n,
            m,
            df,
            level: DEFAULT_LEVEL,
            rejected: p_value < DEFAULT_LEVEL,
        }
    }

    /// Re-evaluates the verdict at another level.
    pub fn at_level(mut self, level: f64) -> Self {
        self.level = level;
        self.rejected = self.p_value.is_some_and(|p| p < level);
        self
    }
}

/// Asymptotic Kolmogorov distribution `Q(λ) = 1 − 2Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_cdf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    if lambda < 1.18 {
        // Theta-function form; the alternating series cancels badly here.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=50u32 {
            let j = (2 * k - 1) as f64;
            let term = libm::exp(c * j * j);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (libm::sqrt(2.0 * PI) / lambda * sum).min(1.0)
    } else {
        1.0 - kolmogorov_sf(lambda)
    }
}

/// `1 − Q(λ)`, accurate in the far tail.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        return 1.0 - kolmogorov_cdf(lambda);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100u32 {
        let kf = k as f64;
        let term = libm::exp(-2.0 * kf * kf * lambda * lambda);
        sum += sign * term;
        if term < 1e-12 * sum.abs() || term == 0.0 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test of `sample` against a continuous `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<TestResult> {
    if sample.len() < KS_MIN_N {
        return Err(Error::SampleTooSmall {
            got: sample.len(),
            need: KS_MIN_N,
        });
    }
    ks_one_sample_sorted(&EcdfView::new(sample)?, cdf)
}

pub fn ks_one_sample_sorted<F: Fn(f64) -> f64>(ecdf: &EcdfView, cdf: F) -> Result<TestResult> {
    let n = ecdf.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in ecdf.values().iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidCdf(f));
        }
        let above = (i + 1) as f64 / nf - f;
        let below = f - i as f64 / nf;
        d = d.max(above).max(below);
    }
    Ok(TestResult::new(d, kolmogorov_sf(libm::sqrt(nf) * d), n, None, None))
}

/// `sup |F_n − G_m|` of two samples.
pub fn ks_two_sample_statistic(a: &EcdfView, b: &EcdfView) -> f64 {
    let (xs, ys) = (a.values(), b.values());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_N {
            return Err(Error::SampleTooSmall {
                got: s.len(),
                need: KS_MIN_N,
            });
        }
    }
    let (ea, eb) = (EcdfView::new(a)?, EcdfView::new(b)?);
    let d = ks_two_sample_statistic(&ea, &eb);
    let (n, m) = (a.len(), b.len());
    let scale = libm::sqrt((n as f64 * m as f64) / (n + m) as f64);
    Ok(TestResult::new(d, kolmogorov_sf(scale * d), n, Some(m), None))
}

/// Ordinal ranks `0..n`, ties broken by position.
fn ranks(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut r = alloc::vec![0usize; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank;
    }
    r
}

/// Spearman rank correlation (ordinal ranks).
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid("rank correlation needs paired samples of equal length"));
    }
    if x.len() < 3 {
        return Err(Error::SampleTooSmall { got: x.len(), need: 3 });
    }
    if x.iter().chain(y).any(|t| t.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (*a as f64 - mean, *b as f64 - mean);
        sxy += da * db;
        sxx += da * da;
    }
    Ok(sxy / sxx)
}

/// Pearson chi-square test of independence on a `k × k` grid of rank-transformed data.
pub fn chi2_independence(x: &[f64], y: &[f64], k: usize) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(invalid("chi-square needs paired samples of equal length"));
    }
    if k < 2 {
        return Err(invalid("need at least 2 bins per axis"));
    }
    let n = x.len();
    if n < 50 * k * k {
        return Err(Error::SampleTooSmall { got: n, need: 50 * k * k });
    }
    for v in [x, y] {
        if v.iter().any(|t| t.is_nan()) {
            return Err(invalid("sample contains NaN"));
        }
        if v.iter().all(|&t| t == v[0]) {
            return Err(Error::Degenerate("constant coordinate"));
        }
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mut counts = alloc::vec![0u64; k * k];
    for (a, b) in rx.iter().zip(&ry) {
        counts[(a * k / n) * k + b * k / n] += 1;
    }
    let row: Vec<f64> = (0..k).map(|i| counts[i * k..(i + 1) * k].iter().sum::<u64>() as f64).collect();
    let col: Vec<f64> = (0..k).map(|j| (0..k).map(|i| counts[i * k + j]).sum::<u64>() as f64).collect();
    let nf = n as f64;
    let mut stat = 0.0;
    for i in 0..k {
        for j in 0..k {
            let e = row[i] * col[j] / nf;
            let o = counts[i * k + j] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    let df = ((k - 1) * (k - 1)) as u32;
    Ok(TestResult::new(stat, chi2_sf(stat, df as f64), n, None, Some(df)))
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    gamma_q(0.5 * df, 0.5 * x)
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let log_prefix = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        // Series for P(a, x).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (1.0 - sum * libm::exp(log_prefix)).clamp(0.0, 1.0)
    } else {
        // Modified Lentz continued fraction for Q(a, x).
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (libm::exp(log_prefix) * h).clamp(0.0, 1.0)
    }
}
