//! Exact samplers for the Poisson random measure with intensity `dt × y⁻² dy`,
//! its extremal process `m(u) = max{y_k : t_k ≤ u}` and the inverse
//! `m^←(u) = inf{y ≥ 0 : m(y) > u}`.
//!
//! Marks above a level `x` arrive at rate `1/x` in time and, given that they
//! exceed `x`, are Pareto with survival `x/z`. Every sampler below is built
//! from that fact.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::rngcore::UniformSource;

/// Safety valve on the number of arrivals simulated by one call.
pub const ARRIVAL_CAP: u64 = 10_000_000;

/// A point `(t, y)` of the Poisson measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkedPoint {
    pub t: f64,
    pub y: f64,
}

/// A right-continuous piecewise-constant path: `initial` before the first
/// jump time, then the value of the latest jump at or before the argument.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPath {
    initial: f64,
    jumps: Vec<(f64, f64)>,
}

impl StepPath {
    /// Panics unless jump times are strictly increasing.
    pub fn new(initial: f64, jumps: Vec<(f64, f64)>) -> Self {
        assert!(
            jumps.windows(2).all(|w| w[0].0 < w[1].0),
            "step path times must be strictly increasing"
        );
        StepPath { initial, jumps }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.initial
        } else {
            self.jumps[k - 1].1
        }
    }

    /// `sup |f(u) − f(u−)|` over jump times `u ∈ (lo, hi]`; 0 if there are none.
    pub fn max_jump_on(&self, lo: f64, hi: f64) -> f64 {
        let mut prev = self.initial;
        let mut best = 0.0f64;
        for &(t, v) in &self.jumps {
            if t > hi {
                break;
            }
            if t > lo {
                best = best.max((v - prev).abs());
            }
            prev = v;
        }
        best
    }

    /// Generalized inverse `u ↦ inf{t : f(t) > u}` of a path with strictly
    /// increasing values.
    ///
    /// The result starts at `0` and jumps at each value of the path to the
    /// time the path first exceeds it. It is defined on `[0, v_last)` where
    /// `v_last` is the final value; past that it is left constant.
    pub fn inverse(&self) -> StepPath {
        let mut jumps = Vec::with_capacity(self.jumps.len());
        // Level `initial` is first exceeded at the first jump time.
        let mut level = self.initial;
        for &(t, v) in &self.jumps {
            jumps.push((level, t));
            level = v;
        }
        StepPath::new(0.0, jumps)
    }
}

/// The pair `(m(m^←(u)−), m(m^←(u)))` straddling a level `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrePostJump {
    pub pre: f64,
    pub post: f64,
}

fn check_grid(u_grid: &[f64]) -> Result<()> {
    if u_grid.is_empty() {
        return Err(invalid("level grid must be nonempty"));
    }
    if !(u_grid[0] > 0.0) || u_grid.windows(2).any(|w| !(w[0] < w[1])) || !u_grid.iter().all(|u| u.is_finite()) {
        return Err(invalid("level grid must be positive, finite and strictly increasing"));
    }
    Ok(())
}

/// One joint sample of `(m^←(u₁), …, m^←(u_n))`.
pub fn sample_inverse_fdd<R: UniformSource + ?Sized>(u_grid: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_grid(u_grid)?;
    let base = u_grid[0];
    let top = u_grid[u_grid.len() - 1];
    let mut out = Vec::with_capacity(u_grid.len());
    let mut t = 0.0;
    let mut arrivals = 0u64;
    loop {
        t += rng.exponential(base);
        let mark = base / rng.uniform();
        while out.len() < u_grid.len() && mark > u_grid[out.len()] {
            out.push(t);
        }
        if mark > top {
            return Ok(out);
        }
        arrivals += 1;
        if arrivals >= ARRIVAL_CAP {
            return Err(Error::IterationCap(ARRIVAL_CAP));
        }
    }
}

fn check_floor(floor: f64) -> Result<()> {
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(invalid("floor must be positive"));
    }
    Ok(())
}

/// Path of `max(m(u), floor)` on `[0, horizon]` as a jump chain: from state
/// `x`, wait Exponential(mean `x`) and jump to `x/W`.
pub fn sample_path<R: UniformSource + ?Sized>(horizon: f64, floor: f64, rng: &mut R) -> Result<StepPath> {
    if !(horizon > 0.0) {
        return Err(invalid("horizon must be positive"));
    }
    check_floor(floor)?;
    let mut x = floor;
    let mut t = 0.0;
    let mut jumps = Vec::new();
    loop {
        t += rng.exponential(x);
        if t > horizon {
            return Ok(StepPath::new(floor, jumps));
        }
        x /= rng.uniform();
        jumps.push((t, x));
        if jumps.len() as u64 >= ARRIVAL_CAP {
            return Err(Error::IterationCap(ARRIVAL_CAP));
        }
    }
}

/// Path of `max(m(u), floor)` up to and including the first record above `level`.
pub fn sample_path_to_level<R: UniformSource + ?Sized>(level: f64, floor: f64, rng: &mut R) -> Result<StepPath> {
    check_floor(floor)?;
    if !(level >= floor) {
        return Err(invalid("level must not be below the floor"));
    }
    let mut x = floor;
    let mut t = 0.0;
    let mut jumps = Vec::new();
    while x <= level {
        t += rng.exponential(x);
        x /= rng.uniform();
        jumps.push((t, x));
        if jumps.len() as u64 >= ARRIVAL_CAP {
            return Err(Error::IterationCap(ARRIVAL_CAP));
        }
    }
    Ok(StepPath::new(floor, jumps))
}

/// Exact `(m(m^←(u)−), m(m^←(u)))`: with `T = m^←(u)` Exponential(mean `u`),
/// `P{pre ≤ x | T} = exp(−T(1/x − 1/u))`, and `post` is Pareto above `u`.
pub fn sample_pre_post<R: UniformSource + ?Sized>(u: f64, rng: &mut R) -> Result<PrePostJump> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(invalid("level must be positive"));
    }
    let t = rng.exponential(u);
    let e = rng.exponential(1.0);
    let w = rng.uniform();
    Ok(PrePostJump {
        pre: 1.0 / (1.0 / u + e / t),
        post: u / w,
    })
}

/// The pre/post pair read off a simulated path: the last record at or below
/// `u` and the first above it. Records below `floor` show up as `floor`.
pub fn pre_post_from_path(path: &StepPath, u: f64) -> Option<PrePostJump> {
    let mut pre = path.initial();
    for &(_, v) in path.jumps() {
        if v > u {
            return Some(PrePostJump { pre, post: v });
        }
        pre = v;
    }
    None
}

/// `P{m(m^←(1)−) ≤ x₁, m(m^←(1)) ≤ x₂} = x₁(1 − 1/x₂)` for `0 < x₁ < 1 < x₂`.
pub fn joint_cdf_pre_post(x1: f64, x2: f64) -> Result<f64> {
    if !(x1 > 0.0 && x1 < 1.0 && x2 > 1.0) {
        return Err(invalid("joint cdf needs 0 < x1 < 1 < x2"));
    }
    Ok(x1 * (1.0 - 1.0 / x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngcore::{RngStream, ScriptedUniforms};
    use alloc::vec;

    #[test]
    fn joint_cdf_values() {
        assert_eq!(joint_cdf_pre_post(0.5, 2.0).unwrap(), 0.25);
        assert_eq!(joint_cdf_pre_post(0.25, 4.0).unwrap(), 0.1875);
        assert!((joint_cdf_pre_post(1.0 - 1e-12, 1e12).unwrap() - 1.0).abs() < 1e-11);
        assert!(joint_cdf_pre_post(1.0, 2.0).is_err());
        assert!(joint_cdf_pre_post(0.5, 1.0).is_err());
    }

    #[test]
    fn inverse_fdd_is_monotone() {
        let mut rng = RngStream::new(3);
        for _ in 0..1000 {
            let s = sample_inverse_fdd(&[0.5, 1.0, 2.0, 4.0], &mut rng).unwrap();
            assert_eq!(s.len(), 4);
            assert!(s.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn inverse_fdd_scripted() {
        // Arrival 1: t = 1 (U = e^-1), mark 1/0.8 = 1.25 > 1.
        // Arrival 2: t = 2, mark 1/0.25 = 4 > 2.
        let e1 = (-1.0f64).exp();
        let mut s = ScriptedUniforms::new(vec![e1, 0.8, e1, 0.25]);
        let out = sample_inverse_fdd(&[1.0, 2.0], &mut s).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
        assert!((out[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bad_grids_rejected() {
        let mut rng = RngStream::new(1);
        assert!(sample_inverse_fdd(&[], &mut rng).is_err());
        assert!(sample_inverse_fdd(&[1.0, 1.0], &mut rng).is_err());
        assert!(sample_inverse_fdd(&[0.0, 1.0], &mut rng).is_err());
        assert!(sample_path(0.0, 1.0, &mut rng).is_err());
        assert!(sample_path(1.0, 0.0, &mut rng).is_err());
        assert!(sample_pre_post(-1.0, &mut rng).is_err());
    }

    #[test]
    fn path_records_increase() {
        let mut rng = RngStream::new(9);
        for _ in 0..200 {
            let p = sample_path(5.0, 1e-3, &mut rng).unwrap();
            let mut prev = p.initial();
            for &(t, v) in p.jumps() {
                assert!(t <= 5.0);
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn pre_post_invariant() {
        let mut rng = RngStream::new(11);
        for &u in &[0.1, 1.0, 3.0, 100.0] {
            for _ in 0..1000 {
                let pp = sample_pre_post(u, &mut rng).unwrap();
                assert!(0.0 <= pp.pre && pp.pre <= u && u < pp.post, "{pp:?} at {u}");
            }
        }
    }

    #[test]
    fn step_path_inverse_and_jumps() {
        let p = StepPath::new(0.1, vec![(1.0, 0.5), (1.5, 2.0), (4.0, 3.0)]);
        assert_eq!(p.value_at(0.5), 0.1);
        assert_eq!(p.value_at(1.0), 0.5);
        assert_eq!(p.value_at(3.9), 2.0);
        let inv = p.inverse();
        assert_eq!(inv.jumps(), &[(0.1, 1.0), (0.5, 1.5), (2.0, 4.0)]);
        assert_eq!(inv.value_at(0.3), 1.0);
        assert_eq!(inv.value_at(1.0), 1.5);
        // Jumps of the inverse on (0.1, 1] are only the one at level 0.5.
        assert_eq!(inv.max_jump_on(0.1, 1.0), 0.5);
        assert_eq!(inv.max_jump_on(0.0, 3.0), 2.5);
        let pp = pre_post_from_path(&p, 1.0).unwrap();
        assert_eq!(pp, PrePostJump { pre: 0.5, post: 2.0 });
        assert_eq!(pre_post_from_path(&p, 5.0), None);
    }

    #[test]
    fn path_to_level_ends_above_level() {
        let mut rng = RngStream::new(5);
        for _ in 0..500 {
            let p = sample_path_to_level(1.0, 1e-3, &mut rng).unwrap();
            let last = p.jumps().last().unwrap().1;
            assert!(last > 1.0);
            assert!(p.jumps()[..p.jumps().len() - 1].iter().all(|&(_, v)| v <= 1.0));
        }
    }
}
