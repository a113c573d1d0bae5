// Reference constants are kept exactly as printed by the oracle.
#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use shotnoise_core::{Epsilon, LogNum, RepresentationSpec, SlowVaryFn};

// Reference values from an independent 40-digit quadrature of
// ∫₀^x ε(u) du/u = 1 + ∫₀^{ln x} ε(e^s) ds.
const INVLOG_I_AT_1E4: f64 = 3.670607707879447;
const INVLOG_L1_AT_1E4: f64 = 38.27576680228601;
const INVLOG_LNX_AT_I_3_9: f64 = 11.585121041078636;
const INVLOG_I_AT_LN_X: [(f64, f64); 6] = [
    (1.0, 1.6776012675975800),
    (10.0, 3.7528643659516146),
    (100.0, 6.0554484178197555),
    (1e3, 8.3580335108138012),
    (1e4, 10.660618603807847),
    (1e6, 15.265788789795938),
];
const GAPPED_B: f64 = -0.09893352802229738;
// (ln x, I, I₁, L₁ with c = 2)
const GAPPED_AT_LN_X: [(f64, f64, f64, f64); 3] = [
    (3.0, 2.1858181370233676, 2.2713663518921163, 15.747628852482610),
    (20.0, 3.4851863403820963, 3.5841198684043937, 63.445407270526908),
    (1e3, 7.3972093457974599, 7.4961428738197572, 3261.0390493049413),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn families() -> Vec<SlowVaryFn> {
    vec![
        SlowVaryFn::log_power(1.0).unwrap(),
        SlowVaryFn::log_power(0.5).unwrap(),
        SlowVaryFn::log_power(3.0).unwrap(),
        SlowVaryFn::log_log(),
        SlowVaryFn::from_representation(RepresentationSpec::new(1.0, Epsilon::inverse_log())).unwrap(),
        SlowVaryFn::from_representation(RepresentationSpec::new(2.0, Epsilon::gapped())).unwrap(),
    ]
}

/// `ln x` on a geometric grid over `[10^-3, 10^6]`, plus 0.
fn log_grid(points: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    for i in 0..points {
        g.push(10f64.powf(-3.0 + 9.0 * i as f64 / (points - 1) as f64));
    }
    g
}

#[test]
fn round_trip_on_log_grid() {
    for l in families() {
        for lx in log_grid(300) {
            let x = LogNum::from_ln(lx);
            let y = l.eval(x).unwrap();
            let back = l.inverse(y).unwrap().ln();
            assert!(
                (back - lx).abs() <= 1e-10 * lx.abs().max(1.0),
                "{}: ln x = {lx}, got {back}",
                l.describe()
            );
        }
    }
}

#[test]
fn round_trip_at_small_arguments() {
    for l in families() {
        for lx in [-30.0, -5.0, -1.0, -0.1] {
            let back = l.inverse(l.eval(LogNum::from_ln(lx)).unwrap()).unwrap().ln();
            assert!((back - lx).abs() <= 1e-10 * lx.abs(), "{}: {lx} -> {back}", l.describe());
        }
        assert_eq!(l.eval(LogNum::ZERO).unwrap(), 0.0);
        assert_eq!(l.inverse(0.0).unwrap(), LogNum::ZERO);
    }
}

#[test]
fn slow_variation_decays_along_grid() {
    for l in families() {
        for lambda in [0.5f64, 2.0, 10.0] {
            let mut prev = f64::INFINITY;
            let mut last = 0.0;
            // Starts past the gapped preset's zero set, where L₁ is nearly flat.
            for k in 3..=12 {
                let lx = 10f64.powf(0.5 * k as f64);
                let a = l.eval(LogNum::from_ln(lx)).unwrap();
                let b = l.eval(LogNum::from_ln(lx + lambda.ln())).unwrap();
                let dev = (b / a - 1.0).abs();
                assert!(dev <= prev + 1e-9, "{} λ={lambda}: not decaying at ln x = {lx}", l.describe());
                prev = dev;
                last = dev;
            }
            assert!(last < 1e-2, "{} λ={lambda}: final deviation {last}", l.describe());
        }
    }
}

#[test]
fn strictly_increasing_on_grid() {
    for l in families() {
        let mut prev = l.eval(LogNum::ZERO).unwrap();
        for i in 0..1000 {
            let lx = -7.0 + 37.0 * i as f64 / 999.0;
            let v = l.eval(LogNum::from_ln(lx)).unwrap();
            assert!(v > prev, "{}: not increasing at ln x = {lx}", l.describe());
            prev = v;
        }
    }
}

#[test]
fn inverse_log_representation_matches_oracle() {
    let l = SlowVaryFn::from_representation(RepresentationSpec::new(1.0, Epsilon::inverse_log())).unwrap();
    let r = l.representation().unwrap();
    let x = LogNum::from_value(1e4);
    assert!(rel(r.integral_eps(x).unwrap(), INVLOG_I_AT_1E4) < 1e-10);
    assert!(rel(l.eval(x).unwrap(), INVLOG_L1_AT_1E4) < 1e-8);
    for (lx, i) in INVLOG_I_AT_LN_X {
        let x = LogNum::from_ln(lx);
        assert!(rel(r.integral_eps(x).unwrap(), i) < 1e-10, "ln x = {lx}");
        // ε₁ = ε for this preset.
        assert!(rel(r.integral_eps1(x).unwrap(), i) < 1e-10, "ln x = {lx}");
    }
    // Round trip through the oracle value.
    let back = l.inverse(INVLOG_L1_AT_1E4).unwrap();
    assert!((back.ln() - 1e4f64.ln()).abs() < 1e-8 * 1e4f64.ln());
}

#[test]
fn ratio_identity_at_integral_3_9() {
    let l = SlowVaryFn::from_representation(RepresentationSpec::new(1.0, Epsilon::inverse_log())).unwrap();
    let r = l.representation().unwrap();
    let x = LogNum::from_ln(INVLOG_LNX_AT_I_3_9);
    let i = r.integral_eps(x).unwrap();
    assert!((i - 3.9).abs() < 1e-10);
    let ratio = l.eval(x).unwrap() / (r.c() * i.exp());
    assert!((ratio - (1.0 - (-3.9f64).exp())).abs() < 1e-10);
    assert!((ratio - 0.9797580885541956).abs() < 1e-10);
}

#[test]
fn gapped_representation_matches_oracle() {
    let l = SlowVaryFn::from_representation(RepresentationSpec::new(2.0, Epsilon::gapped())).unwrap();
    let r = l.representation().unwrap();
    assert!((r.b() - GAPPED_B).abs() < 1e-12);
    for (lx, i, i1, l1) in GAPPED_AT_LN_X {
        let x = LogNum::from_ln(lx);
        assert!(rel(r.integral_eps(x).unwrap(), i) < 1e-10, "ln x = {lx}");
        assert!(rel(r.integral_eps1(x).unwrap(), i1) < 1e-10, "ln x = {lx}");
        assert!(rel(l.eval(x).unwrap(), l1) < 1e-9, "ln x = {lx}");
    }
}

#[test]
fn lemma_ratio_tends_to_one() {
    for (c, eps) in [(1.0, Epsilon::inverse_log()), (2.0, Epsilon::gapped())] {
        let l = SlowVaryFn::from_representation(RepresentationSpec::new(c, eps)).unwrap();
        let r = l.representation().unwrap();
        let x = LogNum::from_ln(1e6);
        let ratio = l.eval(x).unwrap() / r.base_ln(x).unwrap().exp();
        assert!((ratio - 1.0).abs() < 5e-2, "ratio {ratio}");
    }
}

#[test]
fn negative_epsilon_is_rejected() {
    use std::sync::Arc;
    let eps = Epsilon::new("neg", Arc::new(|u| u), Arc::new(|_| -0.1), vec![]).unwrap();
    assert!(SlowVaryFn::from_representation(RepresentationSpec::new(1.0, eps)).is_err());
    let eps = Epsilon::inverse_log();
    assert!(SlowVaryFn::from_representation(RepresentationSpec::new(0.0, eps)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn logpow_round_trip_random(beta in 0.1..5.0f64, lx in -20.0..1e6f64) {
        let l = SlowVaryFn::log_power(beta).unwrap();
        let back = l.inverse(l.eval(LogNum::from_ln(lx)).unwrap()).unwrap().ln();
        prop_assert!((back - lx).abs() <= 1e-10 * lx.abs().max(1.0));
    }

    #[test]
    fn eval_is_monotone_random(la in -20.0..1e6f64, lb in -20.0..1e6f64) {
        let l = SlowVaryFn::log_power(1.5).unwrap();
        let (a, b) = (LogNum::from_ln(la), LogNum::from_ln(lb));
        if a < b {
            prop_assert!(l.eval(a).unwrap() <= l.eval(b).unwrap());
        }
    }
}
