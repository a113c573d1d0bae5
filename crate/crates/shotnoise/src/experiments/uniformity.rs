use shotnoise_core::{Error as CoreError, LogNum, ShotShape};

use super::{Ctx, Outcome};
use crate::error::{AppError, Result};
use crate::report::{Rule, SampleTable, TestRecord};

pub const Y_POINTS: usize = 1000;
/// Bound on the `y = 0` deviation, which is rounding error only.
pub const Y0_TOL: f64 = 1e-12;

/// `t = 10^{k/2}` from 10 up to `top`, with `top` itself appended when off-grid.
pub fn t_grid(top: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (2..)
        .map(|k| 10f64.powf(k as f64 / 2.0))
        .take_while(|&t| t <= top * (1.0 + 1e-12))
        .collect();
    if out.last().map_or(true, |&t| t < top * (1.0 - 1e-12)) {
        out.push(top);
    }
    out
}

struct Row {
    t: f64,
    sup: f64,
    y0: f64,
    sv: f64,
    x_t: LogNum,
}

/// Deterministic sup over `y ∈ [0, u − ε]` of `|h(L^←(tu) − L^←(ty))/h(L^←(t)) − u^α|`.
pub(crate) fn run(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let l = ctx.l;
    let tol = &cfg.tolerances;
    let u = cfg.u_grid[cfg.u_grid.len() - 1];
    let eps = cfg.margin;
    let h = if cfg.alpha == 0.0 {
        ShotShape::constant()
    } else {
        ShotShape::l_power(cfg.alpha)?
    };
    let target = u.powf(cfg.alpha);
    let ys: Vec<f64> = (0..Y_POINTS)
        .map(|j| (u - eps) * j as f64 / (Y_POINTS - 1) as f64)
        .collect();
    let two = LogNum::from_value(2.0);

    let mut rows = Vec::new();
    for t in t_grid(cfg.tau) {
        let x_u = match l.inverse(t * u) {
            Ok(x) => x,
            Err(CoreError::Overflow) => {
                out.note(format!(
                    "t-grid stops before t = {t}: L<-(t u) leaves the double-precision log range"
                ));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let x_t = l.inverse(t)?;
        let h_t = h.eval(l, x_t)?;
        let mut sup = 0.0f64;
        let mut y0 = 0.0;
        for (j, &y) in ys.iter().enumerate() {
            let x_y = l.inverse(t * y)?;
            let gap = x_u
                .checked_sub(x_y)
                .ok_or(AppError::Numeric(CoreError::Degenerate("L<- is not monotone on the y-grid")))?;
            let dev = (h.eval(l, gap)? / h_t - target).abs();
            if j == 0 {
                y0 = dev;
            }
            sup = sup.max(dev);
        }
        let sv = (h.eval(l, x_t * two)? / h_t - 1.0).abs();
        rows.push(Row { t, sup, y0, sv, x_t });
    }
    let last = rows.last().ok_or(AppError::Numeric(CoreError::Overflow))?;

    out.test(
        TestRecord::scalar(
            format!("sup deviation at t = {}", last.t),
            "uniform_deviation",
            last.sup,
            Y_POINTS,
            Rule::StatisticBelow,
            tol.uniformity_sup,
        )
        .with_detail(format!("u = {u}, epsilon = {eps}, L<-(t) = {}", last.x_t)),
    );
    let y0_max = rows.iter().map(|r| r.y0).fold(0.0, f64::max);
    out.test(TestRecord::scalar(
        "y = 0 deviation over the t-grid",
        "uniform_deviation",
        y0_max,
        rows.len(),
        Rule::StatisticBelow,
        Y0_TOL,
    ));
    if cfg.alpha == 0.0 {
        let sup_all = rows.iter().map(|r| r.sup).fold(0.0, f64::max);
        out.test(TestRecord::scalar(
            "sup deviation with h = 1 is identically 0",
            "uniform_deviation",
            sup_all,
            rows.len() * Y_POINTS,
            Rule::Exact,
            0.0,
        ));
    }
    out.test(TestRecord::scalar(
        format!("|h(2x)/h(x) - 1| at x = L<-({})", last.t),
        "slow_variation",
        last.sv,
        1,
        Rule::StatisticBelow,
        tol.slow_variation,
    ));
    let rises = rows.windows(2).filter(|w| w[1].sup > w[0].sup).count();
    out.test(TestRecord::holds("sup deviation nonincreasing along the t-grid", rises, rows.len()).informational());

    out.profile("sup deviation", "t", "sup", rows.iter().map(|r| (r.t, r.sup)).collect());
    out.profile("slow variation of h", "t", "|h(2x)/h(x) - 1|", rows.iter().map(|r| (r.t, r.sv)).collect());
    out.samples.push(
        SampleTable::new("uniformity", "grid_point")
            .column("t", rows.iter().map(|r| r.t).collect())
            .column("sup_deviation", rows.iter().map(|r| r.sup).collect())
            .column("y0_deviation", rows.iter().map(|r| r.y0).collect())
            .column("slow_variation", rows.iter().map(|r| r.sv).collect()),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::t_grid;

    #[test]
    fn grid_is_half_decades() {
        let g = t_grid(1e3);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[4], 1000.0);
        assert_eq!(t_grid(50.0).last(), Some(&50.0));
        assert_eq!(t_grid(3.0), vec![3.0]);
    }
}
