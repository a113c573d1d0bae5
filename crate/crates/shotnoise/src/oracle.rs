//! Gauss–Legendre quadrature oracle for representation integrals.
//!
//! Shares no code with the adaptive Simpson rule in the core crate, so the
//! two can cross-check each other.

use shotnoise_core::Epsilon;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    max_width: f64,
}

impl Default for GaussLegendre {
    fn default() -> Self {
        Self::new(20, 0.125)
    }
}

impl GaussLegendre {
    /// `n`-point rule on panels no wider than `max_width`.
    pub fn new(n: usize, max_width: f64) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussLegendre {
            nodes,
            weights,
            max_width,
        }
    }

    /// Composite `∫_a^b f` with panel edges at every point of `breaks` inside `(a, b)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut edges: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
        edges.push(a);
        edges.push(b);
        edges.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let panels = ((w[1] - w[0]) / self.max_width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let lo = w[0] + p as f64 * h;
                let (mid, half) = (lo + 0.5 * h, 0.5 * h);
                acc += half
                    * self
                        .nodes
                        .iter()
                        .zip(&self.weights)
                        .map(|(x, wt)| wt * f(mid + half * x))
                        .sum::<f64>();
            }
        }
        acc
    }
}

/// Lower log-abscissa standing in for 0 in `∫_0^1 ε(u) du/u`.
pub const UNIT_FLOOR_LN: f64 = -40.0;

/// Independent evaluation of the integrals behind a representation.
pub struct RepresentationOracle<'a> {
    eps: &'a Epsilon,
    gl: GaussLegendre,
}

impl<'a> RepresentationOracle<'a> {
    pub fn new(eps: &'a Epsilon) -> Self {
        RepresentationOracle {
            eps,
            gl: GaussLegendre::default(),
        }
    }

    fn eps1_log(&self, s: f64) -> f64 {
        let e = self.eps.at_log(s);
        if e > 0.0 {
            e
        } else {
            (-s).exp()
        }
    }

    fn zero_breaks(&self) -> Vec<f64> {
        self.eps
            .zero_set()
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|p| p.is_finite())
            .collect()
    }

    /// `∫_0^{e^s} g(u) du/u` for `s > 0`, `g` given in log-abscissa on `(1, ∞)`
    /// and `unit` on `(0, 1]`.
    fn integral<G: Fn(f64) -> f64>(&self, unit: f64, g: G, s: f64) -> f64 {
        let breaks = self.zero_breaks();
        let near = self.gl.integrate(&g, 0.0, s.min(1.0), &breaks);
        let far = if s > 1.0 {
            let rb: Vec<f64> = breaks.iter().filter(|&&p| p > 0.0).map(|p| p.ln()).collect();
            self.gl.integrate(
                |r| {
                    let sig = r.exp();
                    g(sig) * sig
                },
                0.0,
                s.ln(),
                &rb,
            )
        } else {
            0.0
        };
        unit + near + far
    }

    fn unit_eps(&self) -> f64 {
        self.gl
            .integrate(|t| self.eps.at_unit(t.exp()), UNIT_FLOOR_LN, 0.0, &[])
    }

    /// `I(x) = ∫₀^x ε(u) du/u` at `ln x = s > 0`.
    pub fn i(&self, s: f64) -> f64 {
        self.integral(self.unit_eps(), |sig| self.eps.at_log(sig), s)
    }

    /// `I₁(x) = ∫₀^x ε₁(u) du/u` at `ln x = s > 0`; `ε₁(u) = u` on `(0, 1]`.
    pub fn i1(&self, s: f64) -> f64 {
        self.integral(1.0, |sig| self.eps1_log(sig), s)
    }

    /// `b = ∫₀^∞ (ε − ε₁)(u) du/u`.
    pub fn b(&self) -> f64 {
        let unit = self.gl.integrate(
            |t| self.eps.at_unit(t.exp()) - t.exp(),
            UNIT_FLOOR_LN,
            0.0,
            &[],
        );
        let zero: f64 = self
            .eps
            .zero_set()
            .iter()
            .map(|&(lo, hi)| {
                // Beyond 60 units past `lo` the remaining mass is below e^{-60}.
                let top = hi.min(lo + 60.0);
                self.gl.integrate(|s| (-s).exp(), lo, top, &[])
            })
            .sum();
        unit - zero
    }

    /// `L₁(x)/L(x) = e^{b + I₁ − I}(1 − e^{−I₁})`, independent of `c`.
    pub fn ratio(&self, s: f64) -> f64 {
        let (i, i1) = (self.i(s), self.i1(s));
        (self.b() + i1 - i).exp() * -(-i1).exp_m1()
    }

    /// `ln L₁(x) = ln c + b + ln(e^{I₁} − 1)`.
    pub fn ln_l1(&self, c: f64, s: f64) -> f64 {
        let i1 = self.i1(s);
        c.ln() + self.b() + i1 + (-(-i1).exp_m1()).ln()
    }

    /// The `ln x > 0` at which `I(x) = target`, by bisection.
    pub fn solve_i(&self, target: f64) -> Option<f64> {
        let (mut lo, mut hi) = (1e-9, 1.0);
        while self.i(hi) < target {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        if self.i(lo) > target {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.i(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}
