use std::f64::consts::PI;

use shotnoise_core::renewal::srw2d_returns;

use super::{u_label, Ctx, Outcome};
use crate::error::Result;
use crate::report::{Rule, SampleTable, TestRecord};

pub const STREAM: &str = "srw2d";
/// Walks run for this multiple of `n` so the return-count profile has room.
pub const HORIZON_FACTOR: u64 = 10;

fn count_upto(returns: &[u64], time: f64) -> usize {
    returns.partition_point(|&r| (r as f64) <= time)
}

/// Return times of the planar simple random walk. Demo grade: convergence
/// is logarithmic, so only structure and a coarse tail band are checked.
pub(crate) fn run(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let n = cfg.tau.ceil().max(2.0) as u64;
    let horizon = HORIZON_FACTOR * n;
    let walks = ctx
        .runner
        .replicas(STREAM, cfg.replicas, |_, rng| Ok(srw2d_returns(horizon, rng)?))?;
    out.stream(STREAM);
    let reps = walks.len();

    let odd = walks.iter().filter(|r| r.iter().any(|t| t % 2 != 0)).count();
    out.test(TestRecord::holds("return times are even", odd, reps));
    let unordered = walks.iter().filter(|r| r.windows(2).any(|w| w[0] >= w[1])).count();
    out.test(TestRecord::holds("return times strictly increase", unordered, reps));

    // ν(e^{tu}) with t = ln(horizon), so u = 1 is the whole walk.
    let t = (horizon as f64).ln();
    let grid: Vec<f64> = cfg.u_grid.iter().copied().filter(|&u| u <= 1.0).collect();
    let counts: Vec<Vec<f64>> = walks
        .iter()
        .map(|r| grid.iter().map(|&u| count_upto(r, (t * u).exp()) as f64).collect())
        .collect();
    let non_monotone = counts.iter().filter(|c| c.windows(2).any(|w| w[0] > w[1])).count();
    out.test(TestRecord::holds("return count nondecreasing in u", non_monotone, reps));

    let first: Vec<f64> = walks
        .iter()
        .map(|r| r.first().map_or(f64::INFINITY, |&x| x as f64))
        .collect();
    let tail = first.iter().filter(|&&x| x > n as f64).count() as f64 / reps as f64;
    let target = PI / (n as f64).ln();
    let f = cfg.tolerances.srw_factor;
    out.test(
        TestRecord::scalar(
            format!("P{{xi_1 > {n}}} within a factor {f} of pi/ln n"),
            "tail_ratio",
            (tail / target).ln().abs(),
            reps,
            Rule::StatisticBelow,
            f.ln(),
        )
        .with_detail(format!("empirical {tail}, pi/ln n = {target}")),
    );

    let tail_profile: Vec<(f64, f64)> = (1..)
        .map(|k| 10f64.powi(k))
        .take_while(|&m| m <= horizon as f64)
        .map(|m| {
            let p = first.iter().filter(|&&x| x > m).count() as f64 / reps as f64;
            (m, p * m.ln() / PI)
        })
        .collect();
    out.profile("P{xi_1 > m} ln(m)/pi", "m", "ratio", tail_profile);
    let scaled: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(i, &u)| (u, counts.iter().map(|c| c[i]).sum::<f64>() / reps as f64 / t))
        .collect();
    out.profile("mean of nu(e^(t u))/t, t = ln(horizon)", "u", "scaled count", scaled);
    out.note(format!(
        "demo grade: P{{xi_1 > n}} ~ pi/ln n converges logarithmically; walks run {horizon} steps, unreturned walks count as xi_1 = inf"
    ));

    let mut table = SampleTable::new("srw2d", "replica")
        .column("first_return", first)
        .column("returns", walks.iter().map(|r| r.len() as f64).collect());
    for (i, &u) in grid.iter().enumerate() {
        table = table.column(format!("nu_scaled_{}", u_label(u)), counts.iter().map(|c| c[i] / t).collect());
    }
    out.samples.push(table);
    Ok(())
}
