//! Random walks with slowly varying step tails, first passage, and renewal
//! shot noise, all in log-domain arithmetic.
//!
//! Steps follow the exact tail `P{ξ > x} = min(1, 1/L(x))`, sampled as
//! `ξ = L^←(1/U)`, so `L(ξ)` is exactly Pareto(1).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numscale::LogNum;
use crate::rngcore::UniformSource;
use crate::slowvary::SlowVaryFn;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotForm {
    /// `h(x) = L(x)^α`; for `α < 0`, `h(x) = max(L(x), 1)^α` to stay locally bounded.
    LPower,
    /// `h ≡ 1`.
    Constant,
}

/// Response function `h` of the shot noise. `h ∘ L^←` is regularly varying
/// with index `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotShape {
    alpha: f64,
    form: ShotForm,
}

impl ShotShape {
    pub fn l_power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(invalid("shot exponent must be finite"));
        }
        Ok(ShotShape {
            alpha,
            form: ShotForm::LPower,
        })
    }

    pub fn constant() -> Self {
        ShotShape {
            alpha: 0.0,
            form: ShotForm::Constant,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn form(&self) -> ShotForm {
        self.form
    }

    fn is_unit(&self) -> bool {
        self.form == ShotForm::Constant || self.alpha == 0.0
    }

    /// `h(x)`.
    #[inline]
    pub fn eval(&self, l: &SlowVaryFn, x: LogNum) -> Result<f64> {
        if self.is_unit() {
            return Ok(1.0);
        }
        let mut v = l.eval(x)?;
        if self.alpha < 0.0 {
            v = v.max(1.0);
        }
        let a = self.alpha;
        Ok(if a == 1.0 {
            v
        } else if a == 0.5 {
            libm::sqrt(v)
        } else if a == -0.5 {
            1.0 / libm::sqrt(v)
        } else if a == 2.0 {
            v * v
        } else {
            libm::pow(v, a)
        })
    }
}

/// `(ν(t), S_{ν(t)−1}, S_{ν(t)})` for one level `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenewalCrossing {
    pub nu: u64,
    pub last: LogNum,
    /// Saturates at [`LogNum::MAX`] when `ln S_ν` leaves the `f64` range.
    pub first_exceed: LogNum,
    /// `L(S_ν)`, exact even when `first_exceed` saturates.
    pub first_exceed_l: f64,
}

/// `ξ = L^←(1/U)`.
#[inline]
pub fn sample_increment<R: UniformSource + ?Sized>(l: &SlowVaryFn, rng: &mut R) -> Result<LogNum> {
    l.inverse(1.0 / rng.uniform())
}

/// The partial sums `S_1, S_2, …` of one walk.
///
/// A step whose logarithm overflows `f64` (possible for `loglog`, where
/// `ln ξ = e^{1/U} − 1`) exceeds every representable level. The sum then
/// saturates at [`LogNum::MAX`] and `L(S)` is carried separately: it equals
/// `1/U` of the largest such step, because that step dominates the sum by a
/// doubly exponential factor.
pub struct Walk<'a, R: ?Sized> {
    l: &'a SlowVaryFn,
    rng: &'a mut R,
    sum: LogNum,
    steps: u64,
    cap: u64,
    beyond: Option<f64>,
}

impl<'a, R: UniformSource + ?Sized> Walk<'a, R> {
    pub fn new(l: &'a SlowVaryFn, rng: &'a mut R) -> Self {
        Self::with_cap(l, rng, DEFAULT_STEP_CAP)
    }

    pub fn with_cap(l: &'a SlowVaryFn, rng: &'a mut R, cap: u64) -> Self {
        Walk {
            l,
            rng,
            sum: LogNum::ZERO,
            steps: 0,
            cap,
            beyond: None,
        }
    }

    /// Advances one step and returns `(ξ_k, S_k)`.
    #[inline]
    pub fn step(&mut self) -> Result<(LogNum, LogNum)> {
        if self.steps >= self.cap {
            return Err(Error::IterationCap(self.cap));
        }
        let y = 1.0 / self.rng.uniform();
        let xi = match self.l.inverse(y) {
            Ok(xi) => xi,
            Err(Error::Overflow) => {
                self.beyond = Some(self.beyond.map_or(y, |b| b.max(y)));
                LogNum::MAX
            }
            Err(e) => return Err(e),
        };
        self.sum += xi;
        self.steps += 1;
        Ok((xi, self.sum))
    }

    pub fn sum(&self) -> LogNum {
        self.sum
    }

    /// `L(S_k)`.
    pub fn sum_l(&self) -> Result<f64> {
        match self.beyond {
            Some(y) => Ok(y),
            None => self.l.eval(self.sum),
        }
    }

    /// Whether the sum has left the representable range.
    pub fn is_beyond_range(&self) -> bool {
        self.beyond.is_some()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// `L(S_n)`.
pub fn l_of_sum_after<R: UniformSource + ?Sized>(l: &SlowVaryFn, n: u64, rng: &mut R) -> Result<f64> {
    let mut walk = Walk::new(l, rng);
    for _ in 0..n {
        walk.step()?;
    }
    walk.sum_l()
}

/// Everything one walk reveals about a set of increasing levels.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScan {
    pub crossings: Vec<RenewalCrossing>,
    /// `Y(t_i)`, present when a shot shape was supplied.
    pub shot_noise: Option<Vec<f64>>,
}

/// Walks until the last level is passed, recording `ν`, last value and
/// first exceedance for each level and, optionally, `Y(t_i) = Σ_{k<ν(t_i)} h(t_i − S_k)`.
pub fn scan_levels<R: UniformSource + ?Sized>(
    l: &SlowVaryFn,
    levels: &[LogNum],
    shot: Option<&ShotShape>,
    rng: &mut R,
    step_cap: u64,
) -> Result<LevelScan> {
    if levels.is_empty() || levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("levels must be nonempty and nondecreasing"));
    }
    let n = levels.len();
    let mut crossings = Vec::with_capacity(n);
    let mut ys = shot.map(|_| vec![0.0; n]);
    let mut walk = Walk::with_cap(l, rng, step_cap);
    loop {
        let current = walk.sum();
        // `current` = S_k with S_k ≤ t_i for all i ≥ crossings.len().
        if let (Some(h), Some(ys)) = (shot, ys.as_mut()) {
            for i in crossings.len()..n {
                let gap = levels[i] - current;
                ys[i] += h.eval(l, gap)?;
            }
        }
        let (_, next) = walk.step()?;
        if next > levels[crossings.len()] {
            let next_l = walk.sum_l()?;
            while crossings.len() < n && next > levels[crossings.len()] {
                crossings.push(RenewalCrossing {
                    nu: walk.steps(),
                    last: current,
                    first_exceed: next,
                    first_exceed_l: next_l,
                });
            }
        }
        if crossings.len() == n {
            break;
        }
    }
    Ok(LevelScan {
        crossings,
        shot_noise: ys,
    })
}

/// `(ν(t), S_{ν(t)−1}, S_{ν(t)})`.
pub fn first_passage<R: UniformSource + ?Sized>(l: &SlowVaryFn, t: LogNum, rng: &mut R) -> Result<RenewalCrossing> {
    first_passage_capped(l, t, rng, DEFAULT_STEP_CAP)
}

pub fn first_passage_capped<R: UniformSource + ?Sized>(
    l: &SlowVaryFn,
    t: LogNum,
    rng: &mut R,
    step_cap: u64,
) -> Result<RenewalCrossing> {
    Ok(scan_levels(l, &[t], None, rng, step_cap)?.crossings[0])
}

fn scaled_levels(l: &SlowVaryFn, tau: f64, u_grid: &[f64]) -> Result<Vec<LogNum>> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid("tau must be positive"));
    }
    if u_grid.is_empty() || !(u_grid[0] > 0.0) || u_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("u grid must be positive and strictly increasing"));
    }
    u_grid.iter().map(|&u| l.inverse(tau * u)).collect()
}

/// One sample of `(ν(L^←(τu_i))/τ)_i` from a single walk.
pub fn scaled_nu_fdd<R: UniformSource + ?Sized>(
    l: &SlowVaryFn,
    tau: f64,
    u_grid: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let levels = scaled_levels(l, tau, u_grid)?;
    let scan = scan_levels(l, &levels, None, rng, DEFAULT_STEP_CAP)?;
    Ok(scan.crossings.iter().map(|c| c.nu as f64 / tau).collect())
}

/// `Y(t)`.
pub fn shot_noise<R: UniformSource + ?Sized>(l: &SlowVaryFn, h: &ShotShape, t: LogNum, rng: &mut R) -> Result<f64> {
    let scan = scan_levels(l, &[t], Some(h), rng, DEFAULT_STEP_CAP)?;
    Ok(scan.shot_noise.expect("shot shape supplied")[0])
}

/// `h(L^←(τ))`, the normalization of the scaled shot noise.
pub fn shot_normalizer(l: &SlowVaryFn, h: &ShotShape, tau: f64) -> Result<f64> {
    h.eval(l, l.inverse(tau)?)
}

/// One sample of `(Y(L^←(τu_i)) / (τ·h(L^←(τ))))_i` from a single walk.
pub fn scaled_shot_noise_fdd<R: UniformSource + ?Sized>(
    l: &SlowVaryFn,
    h: &ShotShape,
    tau: f64,
    u_grid: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let levels = scaled_levels(l, tau, u_grid)?;
    let norm = tau * shot_normalizer(l, h, tau)?;
    let scan = scan_levels(l, &levels, Some(h), rng, DEFAULT_STEP_CAP)?;
    Ok(scan
        .shot_noise
        .expect("shot shape supplied")
        .iter()
        .map(|y| y / norm)
        .collect())
}

/// Jump structure of `u ↦ ν(L^←(τu))/τ` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpProfile {
    pub nu: u64,
    /// Largest jump of the path. Jump locations are the partial sums
    /// `S_k ≤ L^←(τ)`, which are distinct because every step is positive.
    pub max_jump: f64,
    /// Largest jump seen when locations that coincide in `f64` are merged.
    /// Steps that are negligible next to `S_{k−1}` collapse onto it, so this
    /// mimics the macroscopic jumps of the limit.
    pub max_jump_unresolved: f64,
}

pub fn scaled_path_jumps<R: UniformSource + ?Sized>(l: &SlowVaryFn, tau: f64, rng: &mut R) -> Result<JumpProfile> {
    let t = scaled_levels(l, tau, &[1.0])?[0];
    let mut walk = Walk::new(l, rng);
    let mut exact_run = 0u64;
    let mut exact_max = 0u64;
    let mut float_run = 0u64;
    let mut float_max = 0u64;
    let mut prev = LogNum::ZERO;
    loop {
        let (xi, s) = walk.step()?;
        if s > t {
            break;
        }
        // A jump at S_k absorbs earlier k' only if S_k = S_{k'}.
        exact_run = if xi.is_zero() { exact_run + 1 } else { 1 };
        float_run = if walk.steps() > 1 && s == prev { float_run + 1 } else { 1 };
        exact_max = exact_max.max(exact_run);
        float_max = float_max.max(float_run);
        prev = s;
    }
    Ok(JumpProfile {
        nu: walk.steps(),
        max_jump: exact_max as f64 / tau,
        max_jump_unresolved: float_max as f64 / tau,
    })
}

/// Return times to the origin of a simple symmetric walk on `Z²` within `n_steps`.
pub fn srw2d_returns<R: UniformSource + ?Sized>(n_steps: u64, rng: &mut R) -> Result<Vec<u64>> {
    if n_steps == 0 {
        return Err(invalid("n_steps must be at least 1"));
    }
    let (mut x, mut y) = (0i64, 0i64);
    let mut out = Vec::new();
    for n in 1..=n_steps {
        match (rng.uniform() * 4.0) as u32 {
            0 => x += 1,
            1 => x -= 1,
            2 => y += 1,
            _ => y -= 1,
        }
        if x == 0 && y == 0 {
            out.push(n);
        }
    }
    Ok(out)
}
