use shotnoise_core::renewal::l_of_sum_after;

use super::{frechet_cdf, ks_distance, Ctx, Outcome, D_POLICY_NOTE};
use crate::error::Result;
use crate::report::SampleTable;

pub const STREAM: &str = "darling";

/// `L(S_n)/n` at `n = ⌈τ⌉` against the standard Fréchet law.
pub(crate) fn run(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let n = cfg.tau.ceil() as u64;
    let l = ctx.l;
    let sample = ctx
        .runner
        .replicas(STREAM, cfg.replicas, |_, rng| Ok(l_of_sum_after(l, n, rng)? / n as f64))?;
    out.stream(STREAM);
    out.test(ks_distance("L(S_n)/n ~ Frechet", &sample, frechet_cdf, cfg.tolerances.d_renewal)?);
    out.summary("L(S_n)/n", &sample);
    out.note(format!("n = {n}"));
    out.note(D_POLICY_NOTE);
    out.samples
        .push(SampleTable::new("darling", "replica").column("l_sum_over_n", sample));
    Ok(())
}
