use shotnoise_core::extremal::sample_path_to_level;
use shotnoise_core::renewal::scaled_path_jumps;

use super::{Ctx, Outcome, WALK_STREAM};
use crate::error::Result;
use crate::report::{Rule, SampleTable, TestRecord};

pub const LIMIT_STREAM: &str = "j1-failure/limit";
/// Records of `m` below this level are not simulated.
pub const PATH_FLOOR: f64 = 1e-3;
pub const EPSILONS: [f64; 2] = [0.1, 0.5];

/// Largest jump `J` of scaled renewal paths and of `m^←` on `[0, 1]`.
pub(crate) fn run(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let (l, tau) = (ctx.l, cfg.tau);
    let pre = ctx
        .runner
        .replicas(WALK_STREAM, cfg.replicas, |_, rng| Ok(scaled_path_jumps(l, tau, rng)?))?;
    out.stream(WALK_STREAM);
    let with_jumps: Vec<_> = pre.iter().filter(|j| j.nu >= 2).collect();
    let wrong = with_jumps.iter().filter(|j| j.max_jump != 1.0 / tau).count();
    out.test(
        TestRecord::holds("J = 1/tau on every path with a jump", wrong, with_jumps.len())
            .with_detail(format!("{} of {} paths have nu >= 2", with_jumps.len(), pre.len())),
    );
    let merged = pre.iter().filter(|j| j.max_jump_unresolved > 1.0 / tau).count();
    out.test(
        TestRecord::scalar(
            "fraction of paths whose jump locations merge in double precision",
            "informational",
            merged as f64 / pre.len() as f64,
            pre.len(),
            Rule::StatisticAbove,
            -1.0,
        )
        .informational(),
    );

    let limit = ctx.runner.replicas(LIMIT_STREAM, cfg.replicas, |_, rng| {
        let m = sample_path_to_level(1.0, PATH_FLOOR, rng)?;
        Ok(m.inverse().max_jump_on(PATH_FLOOR, 1.0))
    })?;
    out.stream(LIMIT_STREAM);
    for eps in EPSILONS {
        let frac = limit.iter().filter(|&&j| j > eps).count() as f64 / limit.len() as f64;
        out.test(TestRecord::scalar(
            format!("P{{J(m<-) > {eps}}} > 0"),
            "frequency",
            frac,
            limit.len(),
            Rule::StatisticAbove,
            0.0,
        ));
    }
    out.summary("J(m<-) on [0,1]", &limit);
    out.note(format!(
        "limit paths start from records above {PATH_FLOOR}; jumps of m<- at levels below it are not seen"
    ));
    out.note("jumps of the pre-limit path sit at the distinct partial sums, so J counts exact unit jumps of nu");
    out.samples.push(
        SampleTable::new("prelimit", "replica")
            .column("nu", pre.iter().map(|j| j.nu as f64).collect())
            .column("j", pre.iter().map(|j| j.max_jump).collect())
            .column("j_merged", pre.iter().map(|j| j.max_jump_unresolved).collect()),
    );
    out.samples
        .push(SampleTable::new("limit", "replica").column("j", limit));
    Ok(())
}
