use shotnoise_core::extremal::{joint_cdf_pre_post, sample_pre_post};
use shotnoise_core::PrePostJump;

use super::{independence, ks2_distance, ks_pvalue, pareto_cdf, u_label, uniform_cdf, Ctx, Outcome};
use crate::error::Result;
use crate::report::{Rule, SampleTable, TestRecord};

pub const BASE_STREAM: &str = "self-similarity/base";
pub const SCALED_STREAM: &str = "self-similarity/scaled";
pub const SPOT_STREAM: &str = "self-similarity/spot";
/// Minimum size of the sample behind the joint-CDF spot checks.
pub const SPOT_MIN: usize = 100_000;
pub const SPOTS: [(f64, f64); 4] = [(0.5, 2.0), (0.25, 4.0), (0.75, 1.5), (0.9, 10.0)];

fn split(s: &[PrePostJump]) -> (Vec<f64>, Vec<f64>) {
    (s.iter().map(|p| p.pre).collect(), s.iter().map(|p| p.post).collect())
}

/// Pre/post pair at level `u` against `u` times the pair at level 1.
pub(crate) fn self_similarity(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let tol = &cfg.tolerances;
    let n = cfg.replicas;
    let draw = |label: &str, u: f64, n: usize| {
        ctx.runner
            .replicas(label, n, move |_, rng| Ok(sample_pre_post(u, rng)?))
    };
    let base = draw(BASE_STREAM, 1.0, n)?;
    out.stream(BASE_STREAM);
    let (base_pre, base_post) = split(&base);

    let mut table = SampleTable::new("base", "replica")
        .column("pre", base_pre.clone())
        .column("post", base_post.clone());
    for (k, &u) in cfg.u_grid.iter().enumerate() {
        let scaled = ctx.runner.replicas(SCALED_STREAM, n, |_, rng| {
            let mut rng = rng.derive(k as u64);
            Ok(sample_pre_post(u, &mut rng)?)
        })?;
        let (pre, post) = split(&scaled);
        let pre_ref: Vec<f64> = base_pre.iter().map(|x| u * x).collect();
        let post_ref: Vec<f64> = base_post.iter().map(|x| u * x).collect();
        out.test(ks2_distance(format!("pre at u={u} vs {u} x pre at u=1"), &pre, &pre_ref, tol.d_scaling)?);
        out.test(ks2_distance(format!("post at u={u} vs {u} x post at u=1"), &post, &post_ref, tol.d_scaling)?);
        out.summary(format!("pre/u at u={u}"), &pre.iter().map(|x| x / u).collect::<Vec<_>>());
        table = table
            .column(format!("pre_{}", u_label(u)), pre)
            .column(format!("post_{}", u_label(u)), post);
    }
    out.stream(SCALED_STREAM);

    // The same seed and family must reproduce the base sample exactly.
    let again = draw(BASE_STREAM, 1.0, n)?;
    let (again_pre, again_post) = split(&again);
    let d_pre = ks2_distance("pre at u=1 vs itself (same seed)", &base_pre, &again_pre, 0.0)?;
    let d_post = ks2_distance("post at u=1 vs itself (same seed)", &base_post, &again_post, 0.0)?;
    for t in [d_pre, d_post] {
        out.test(TestRecord::scalar(t.name, "ks_two_sample", t.statistic, n, Rule::Exact, 0.0));
    }

    let spot_n = n.max(SPOT_MIN);
    let spot = draw(SPOT_STREAM, 1.0, spot_n)?;
    out.stream(SPOT_STREAM);
    for (x1, x2) in SPOTS {
        let hits = spot.iter().filter(|p| p.pre <= x1 && p.post <= x2).count();
        let emp = hits as f64 / spot_n as f64;
        let exact = joint_cdf_pre_post(x1, x2)?;
        out.test(
            TestRecord::scalar(
                format!("joint cdf at ({x1}, {x2})"),
                "cdf_abs_error",
                (emp - exact).abs(),
                spot_n,
                Rule::StatisticBelow,
                tol.cdf_abs,
            )
            .with_detail(format!("empirical {emp}, exact {exact}")),
        );
    }
    let (spot_pre, spot_post) = split(&spot);
    out.test(ks_pvalue("pre at u=1 ~ Uniform(0,1)", &spot_pre, uniform_cdf, tol.p_exact)?);
    out.test(ks_pvalue("post at u=1 ~ Pareto(1)", &spot_post, pareto_cdf, tol.p_exact)?);
    let inv_post: Vec<f64> = spot_post.iter().map(|v| 1.0 / v).collect();
    independence(out, "independence of pre and 1/post at u=1", &spot_pre, &inv_post, tol.p_exact)?;
    out.note(format!("joint cdf, marginal and independence checks use a separate sample of {spot_n}"));
    out.samples.push(table);
    Ok(())
}
