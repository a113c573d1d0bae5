//! Parsing of `--L` strings: `logpow:<beta>`, `loglog`, `repr:<path>`.
//!
//! A representation file holds `key=value` lines (`#` comments):
//!
//! ```text
//! c = 1
//! epsilon = inverse-log   # inverse-log | gapped | vanishing
//! tol = 1e-12
//! max_depth = 48
//! unit_floor_ln = -40
//! cutoff_ln = 1e6
//! ```
//!
//! Only `epsilon` is required.

use std::path::Path;

use shotnoise_core::slowvary::QuadratureConfig;
use shotnoise_core::{Epsilon, RepresentationSpec, SlowVaryFn};

use crate::config::{parse_count, parse_key_values};
use crate::error::{AppError, Result};

pub fn parse_l_spec(spec: &str) -> Result<SlowVaryFn> {
    let spec = spec.trim();
    match spec.strip_prefix("repr:") {
        Some(path) => {
            let path = Path::new(path.trim());
            let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
            Ok(SlowVaryFn::from_representation(parse_representation(&text)?)?)
        }
        None => SlowVaryFn::parse_canonical(spec).map_err(|e| AppError::config(format!("L spec '{spec}': {e}"))),
    }
}

pub fn parse_representation(text: &str) -> Result<RepresentationSpec> {
    let mut c = 1.0;
    let mut epsilon = None;
    let mut quad = QuadratureConfig::default();
    for (k, v) in parse_key_values(text)? {
        let num = || -> Result<f64> {
            v.parse()
                .map_err(|_| AppError::config(format!("representation key {k}: invalid number '{v}'")))
        };
        match k.as_str() {
            "c" => c = num()?,
            "epsilon" => epsilon = Some(Epsilon::preset(&v).map_err(|e| AppError::config(e.to_string()))?),
            "tol" => quad.tol = num()?,
            "max_depth" => {
                quad.max_depth = u32::try_from(parse_count(&k, &v)?)
                    .map_err(|_| AppError::config("max_depth out of range"))?
            }
            "unit_floor_ln" => quad.unit_floor_ln = num()?,
            "cutoff_ln" => quad.cutoff_ln = num()?,
            other => return Err(AppError::config(format!("unknown representation key '{other}'"))),
        }
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(AppError::config(format!("representation constant c must be positive, got {c}")));
    }
    let epsilon = epsilon.ok_or_else(|| AppError::config("representation file needs an 'epsilon' preset"))?;
    let mut spec = RepresentationSpec::new(c, epsilon);
    spec.quadrature = quad;
    Ok(spec)
}

/// `true` for the `logpow` family, whose pre-asymptotics the default thresholds are sized for.
pub fn is_logpow(l: &SlowVaryFn) -> bool {
    l.describe().starts_with("logpow")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_specs() {
        assert_eq!(parse_l_spec("logpow:1").unwrap().describe(), "logpow:1");
        assert_eq!(parse_l_spec(" loglog ").unwrap().describe(), "loglog");
        assert!(matches!(parse_l_spec("logpow:-1"), Err(AppError::Config(_))));
        assert!(matches!(parse_l_spec("cosh"), Err(AppError::Config(_))));
        assert!(matches!(parse_l_spec("repr:/nonexistent/file"), Err(AppError::Io { .. })));
    }

    #[test]
    fn representation_file() {
        let spec = parse_representation("c = 2\nepsilon = gapped # comment\ntol=1e-10\nmax_depth=40").unwrap();
        assert_eq!(spec.c, 2.0);
        assert_eq!(spec.epsilon.name(), "gapped");
        assert_eq!(spec.quadrature.tol, 1e-10);
        assert_eq!(spec.quadrature.max_depth, 40);
        assert!(parse_representation("c=1").is_err());
        assert!(parse_representation("epsilon=nope").is_err());
        assert!(parse_representation("epsilon=gapped\nc=0").is_err());
        assert!(parse_representation("epsilon=gapped\ncolour=3").is_err());
    }
}
