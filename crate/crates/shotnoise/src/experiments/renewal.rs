use shotnoise_core::extremal::{sample_inverse_fdd, sample_pre_post};
use shotnoise_core::renewal::{first_passage, scaled_nu_fdd, scaled_shot_noise_fdd, scan_levels, DEFAULT_STEP_CAP};
use shotnoise_core::{LogNum, ShotShape};

use super::{
    column, exp_cdf, gamma_label, independence, ks2_distance, ks_distance, ks_pvalue, pareto_cdf, project, projections, u_label,
    uniform_cdf, Ctx, Outcome, D_POLICY_NOTE, WALK_STREAM,
};
use crate::error::Result;
use crate::report::{SampleTable, TestRecord};

pub const IDENTITY_STREAM: &str = "nu-exponential/identity";
pub const IDENTITY_REPLICAS: usize = 100;
pub const FDD_LIMIT_STREAM: &str = "fdd-inverse/limit";
pub const SHOT_LIMIT_STREAM: &str = "shotnoise-fdd/limit";
pub const OVERSHOOT_LIMIT_STREAM: &str = "last-overshoot/limit";

fn monotone_violations(rows: &[Vec<f64>]) -> usize {
    rows.iter()
        .filter(|r| r.windows(2).any(|w| !(w[0] <= w[1])))
        .count()
}

fn table(name: &str, grid: &[f64], prefix: &str, rows: &[Vec<f64>]) -> SampleTable {
    grid.iter()
        .enumerate()
        .fold(SampleTable::new(name, "replica"), |t, (i, &u)| {
            t.column(format!("{prefix}_{}", u_label(u)), column(rows, i))
        })
}

/// Joint pre-limit samples against joint limit samples along the fixed projections.
fn projection_tests(out: &mut Outcome, pre: &[Vec<f64>], limit: &[Vec<f64>], d_max: f64) -> Result<()> {
    for g in projections(pre[0].len()) {
        let name = format!("projection {} two-sample", gamma_label(&g));
        out.test(ks2_distance(name, &project(pre, &g), &project(limit, &g), d_max)?);
    }
    Ok(())
}

/// `ν(L^←(τu))/τ` against Exponential(mean `u`), plus the `h ≡ 1` identity.
pub(crate) fn nu_exponential(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let (l, grid, tau) = (ctx.l, &cfg.u_grid, cfg.tau);
    let rows = ctx
        .runner
        .replicas(WALK_STREAM, cfg.replicas, |_, rng| Ok(scaled_nu_fdd(l, tau, grid, rng)?))?;
    out.stream(WALK_STREAM);
    for (i, &u) in grid.iter().enumerate() {
        let s = column(&rows, i);
        out.test(ks_distance(
            format!("nu/tau at u={u} ~ Exp(mean {u})"),
            &s,
            exp_cdf(u),
            cfg.tolerances.d_renewal,
        )?);
        out.summary(format!("nu/tau at u={u}"), &s);
    }

    let levels: Vec<LogNum> = grid.iter().map(|&u| l.inverse(tau * u)).collect::<shotnoise_core::Result<Vec<_>>>()?;
    let h = ShotShape::constant();
    let mismatches = ctx.runner.replicas(IDENTITY_STREAM, IDENTITY_REPLICAS, |_, rng| {
        let scan = scan_levels(l, &levels, Some(&h), rng, DEFAULT_STEP_CAP)?;
        let ys = scan.shot_noise.unwrap_or_default();
        Ok(scan.crossings.iter().zip(&ys).filter(|(c, y)| **y != c.nu as f64).count())
    })?;
    out.stream(IDENTITY_STREAM);
    out.test(TestRecord::holds(
        "shot noise with h = 1 equals nu",
        mismatches.iter().sum(),
        IDENTITY_REPLICAS * grid.len(),
    ));
    out.note(D_POLICY_NOTE);
    out.samples.push(table("nu", grid, "nu_over_tau", &rows));
    Ok(())
}

/// Joint law of `ν(L^←(τu_i))/τ` against the inverse extremal process.
pub(crate) fn fdd_inverse(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let (l, grid, tau) = (ctx.l, &cfg.u_grid, cfg.tau);
    let d = cfg.tolerances.d_renewal;
    let pre = ctx
        .runner
        .replicas(WALK_STREAM, cfg.replicas, |_, rng| Ok(scaled_nu_fdd(l, tau, grid, rng)?))?;
    let limit = ctx
        .runner
        .replicas(FDD_LIMIT_STREAM, cfg.replicas, |_, rng| Ok(sample_inverse_fdd(grid, rng)?))?;
    out.stream(WALK_STREAM);
    out.stream(FDD_LIMIT_STREAM);
    for (i, &u) in grid.iter().enumerate() {
        let s = column(&pre, i);
        out.test(ks_distance(format!("nu/tau at u={u} ~ Exp(mean {u})"), &s, exp_cdf(u), d)?);
        out.test(ks_pvalue(
            format!("limit m<-({u}) ~ Exp(mean {u})"),
            &column(&limit, i),
            exp_cdf(u),
            cfg.tolerances.p_exact,
        )?);
        out.summary(format!("nu/tau at u={u}"), &s);
    }
    out.test(TestRecord::holds("pre-limit coordinates nondecreasing in u", monotone_violations(&pre), pre.len()));
    out.test(TestRecord::holds("limit coordinates nondecreasing in u", monotone_violations(&limit), limit.len()));
    projection_tests(out, &pre, &limit, d)?;
    out.note(D_POLICY_NOTE);
    out.samples.push(table("prelimit", grid, "nu_over_tau", &pre));
    out.samples.push(table("limit", grid, "m_inverse", &limit));
    Ok(())
}

/// Scaled shot noise `Y(L^←(τu))/(τ h(L^←(τ)))` against `u^α m^←(u)`.
pub(crate) fn shotnoise_fdd(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let (l, grid, tau, alpha) = (ctx.l, &cfg.u_grid, cfg.tau, cfg.alpha);
    let d = cfg.tolerances.d_renewal;
    let h = ShotShape::l_power(alpha)?;
    let pre = ctx.runner.replicas(WALK_STREAM, cfg.replicas, |_, rng| {
        Ok(scaled_shot_noise_fdd(l, &h, tau, grid, rng)?)
    })?;
    let limit = ctx.runner.replicas(SHOT_LIMIT_STREAM, cfg.replicas, |_, rng| {
        let m = sample_inverse_fdd(grid, rng)?;
        Ok(m.iter().zip(grid).map(|(m, u)| u.powf(alpha) * m).collect::<Vec<f64>>())
    })?;
    out.stream(WALK_STREAM);
    out.stream(SHOT_LIMIT_STREAM);
    for (i, &u) in grid.iter().enumerate() {
        let mean = u.powf(alpha + 1.0);
        let s = column(&pre, i);
        out.test(ks_distance(
            format!("scaled Y at u={u} ~ Exp(mean u^(alpha+1) = {mean})"),
            &s,
            exp_cdf(mean),
            d,
        )?);
        out.test(ks_pvalue(
            format!("limit u^alpha m<-(u) at u={u} ~ Exp(mean {mean})"),
            &column(&limit, i),
            exp_cdf(mean),
            cfg.tolerances.p_exact,
        )?);
        out.summary(format!("scaled Y at u={u}"), &s);
    }
    projection_tests(out, &pre, &limit, d)?;
    if alpha < 0.0 {
        out.note("for alpha < 0 the shot is h(x) = max(L(x), 1)^alpha, which keeps h locally bounded near 0");
    }
    out.note(D_POLICY_NOTE);
    out.samples.push(table("prelimit", grid, "y_scaled", &pre));
    out.samples.push(table("limit", grid, "u_alpha_m_inverse", &limit));
    Ok(())
}

/// `(L(S_{ν−1})/τ, L(S_ν)/τ)` at `t = L^←(τ)` against independent uniform and Pareto(1).
pub(crate) fn last_overshoot(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg;
    let (l, tau) = (ctx.l, cfg.tau);
    let tol = &cfg.tolerances;
    let t = l.inverse(tau)?;
    let rows = ctx.runner.replicas(WALK_STREAM, cfg.replicas, |_, rng| {
        let c = first_passage(l, t, rng)?;
        let ordered = c.last <= t && t < c.first_exceed;
        Ok((l.eval(c.last)? / tau, c.first_exceed_l / tau, ordered))
    })?;
    let limit = ctx
        .runner
        .replicas(OVERSHOOT_LIMIT_STREAM, cfg.replicas, |_, rng| Ok(sample_pre_post(1.0, rng)?))?;
    out.stream(WALK_STREAM);
    out.stream(OVERSHOOT_LIMIT_STREAM);

    let last: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let first: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let bad_order = rows.iter().filter(|r| !r.2).count();
    let bad_scaled = rows.iter().filter(|r| !(r.0 <= 1.0 && 1.0 < r.1)).count();
    out.test(ks_distance("L(last)/tau ~ Uniform(0,1)", &last, uniform_cdf, tol.d_renewal)?);
    out.test(ks_distance("L(first exceedance)/tau ~ Pareto(1)", &first, pareto_cdf, tol.d_renewal)?);
    independence(out, "independence of L(last)/tau and L(first exceedance)/tau", &last, &first, tol.p_exact)?;
    out.test(TestRecord::holds("last <= t < first exceedance", bad_order, rows.len()));
    out.test(TestRecord::holds("L(last)/tau <= 1 < L(first exceedance)/tau", bad_scaled, rows.len()));
    let pre: Vec<f64> = limit.iter().map(|p| p.pre).collect();
    let post: Vec<f64> = limit.iter().map(|p| p.post).collect();
    out.test(ks2_distance("L(last)/tau vs limit pre-jump value", &last, &pre, tol.d_renewal)?);
    out.test(ks2_distance("L(first exceedance)/tau vs limit post-jump value", &first, &post, tol.d_renewal)?);
    out.summary("L(last)/tau", &last);
    out.summary("L(first exceedance)/tau", &first);
    out.note(D_POLICY_NOTE);
    out.samples.push(
        SampleTable::new("overshoot", "replica")
            .column("l_last_over_tau", last)
            .column("l_first_exceed_over_tau", first),
    );
    out.samples.push(
        SampleTable::new("limit", "replica")
            .column("pre", pre)
            .column("post", post),
    );
    Ok(())
}
