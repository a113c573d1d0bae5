//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance per integral.
    pub tol: f64,
    /// Maximum bisection depth of a panel.
    pub max_depth: u32,
    /// Lower log-abscissa used for integrals over `(0, 1]`; `e^floor` stands in for 0.
    pub unit_floor_ln: f64,
    /// Log-abscissa `ln u` out to which divergence of `∫ ε₁(u) du/u` is checked.
    pub cutoff_ln: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: 1e-12,
            max_depth: 48,
            unit_floor_ln: -40.0,
            cutoff_ln: 1e6,
        }
    }
}

/// `∫_a^b f`, with `f` fallible so integrands can reject bad inputs.
pub fn simpson<F>(f: &mut F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 64.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
    if delta.abs() <= 15.0 * tol || b - a <= floor {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { lo: a, hi: b });
    }
    let half = 0.5 * tol;
    Ok(refine(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}
