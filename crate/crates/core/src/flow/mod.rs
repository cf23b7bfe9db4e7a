//! Explicit time integration of the scalar capillary flows for u = log ρ.
//!
//! A ball normal speed f (1/F for the inverse curvature flow, -H for mean
//! curvature flow) moves the radial graph by ∂_t u = -v·(D/2)/ρ·f: the
//! enclosed region maps to the outside of the graph, so expansion in the
//! ball lowers ρ.

mod config;
mod trace;

pub use config::{
    apex_flattening_epsilon, FlowConfig, FlowKind, InitialData, MonitorCadence, PerturbTerm,
    StopThresholds, CONVEXITY_TOL, PROFILE_BC_TOL,
};
pub use trace::{FlowTrace, StepStats, StopReason, TraceRow};

use crate::error::{CapflowError, Result};
use crate::geometry::{fundamental_forms, GridMode, HalfSphereGrid, SurfaceFields};
use crate::quermass::assemble_w;
use crate::symfunc::{af_rhs_a, sphere_area};

/// Outward slope ∂_β u = -cot θ √(1 + t²) demanded by the contact angle at a
/// boundary node with tangential derivative t.
pub fn contact_slope(theta: f64, tangential: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(CapflowError::Config(format!("contact angle {theta} outside (0, π/2]")));
    }
    let cot = crate::mobius::cos_theta(theta) / theta.sin();
    Ok(-cot * (1.0 + tangential * tangential).sqrt())
}

/// Geometry of the current state with speeds.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub fields: SurfaceFields,
    /// Ball normal speed per node.
    pub speed: Vec<f64>,
    /// ∂_t u per node.
    pub rate: Vec<f64>,
    /// Diffusion coefficient of the linearized operator per node.
    pub diffusion: Vec<f64>,
    /// F per node where admissible (NaN otherwise).
    pub f: Vec<f64>,
}

/// Speeds of the flow at the current grid.
pub fn evaluate(grid: &HalfSphereGrid, cfg: &FlowConfig, t: f64) -> Result<Evaluation> {
    let fields = fundamental_forms(grid)?;
    let n = grid.spec.n;
    let m = fields.nodes.len();
    let mut speed = Vec::with_capacity(m);
    let mut rate = Vec::with_capacity(m);
    let mut diffusion = Vec::with_capacity(m);
    let mut fvals = Vec::with_capacity(m);
    for p in &fields.nodes {
        let f = p.kappa.curvature_function(&cfg.curvature, n);
        fvals.push(f.unwrap_or(f64::NAN));
        let geo = p.v * p.stretch * (-p.u).exp();
        let scale = (p.stretch * (-p.u).exp() / p.v).powi(2);
        let (s, g) = match cfg.kind {
            FlowKind::Icf => {
                let f = f.ok_or_else(|| CapflowError::ConvexityLoss {
                    t,
                    detail: format!(
                        "curvatures ({:e}, {:e}) at β = {} leave the cone of {}",
                        p.kappa.a, p.kappa.b, p.beta, cfg.curvature
                    ),
                })?;
                (1.0 / f, p.kappa.gradient_sum(&cfg.curvature, n) / (f * f))
            }
            FlowKind::Mcf => (-p.kappa.mean_sum(n), n as f64),
        };
        speed.push(s);
        rate.push(-geo * s);
        diffusion.push(scale * g);
    }
    Ok(Evaluation {
        fields,
        speed,
        rate,
        diffusion,
        f: fvals,
    })
}

/// Stable step for the midpoint rule: dt_safety · 2/λ_max with
/// λ ≈ a (4/h² + ξ-term), capped so no node moves u by more than 0.1.
pub fn dt_control(ev: &Evaluation, cfg: &FlowConfig) -> Result<f64> {
    let s = &cfg.grid;
    let h = s.h();
    let mut lambda: f64 = 0.0;
    for (idx, (a, p)) in ev.diffusion.iter().zip(&ev.fields.nodes).enumerate() {
        let mut l = 4.0 / (h * h);
        if s.mode == GridMode::Full2d {
            let i = idx / s.n_xi;
            l = if i == 0 {
                8.0 / (h * h)
            } else {
                let m = s.n_xi as f64;
                l + m * m / (4.0 * p.beta.sin().powi(2))
            };
        }
        lambda = lambda.max(a * l);
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(CapflowError::Numerical(format!("invalid diffusion scale {lambda}")));
    }
    let mut dt = cfg.dt_safety * 2.0 / lambda;
    let vmax = ev.rate.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if vmax > 0.0 {
        dt = dt.min(0.1 / vmax);
    }
    Ok(dt)
}

fn advance(grid: &HalfSphereGrid, rate: &[f64], dt: f64) -> Result<HalfSphereGrid> {
    let mut out = grid.clone();
    for (u, r) in out.u.iter_mut().zip(rate) {
        *u += dt * r;
    }
    out.enforce_pole();
    if out.u.iter().any(|v| !v.is_finite()) {
        return Err(CapflowError::Numerical("non-finite graph values".into()));
    }
    Ok(out)
}

/// One midpoint step; returns the new grid.
pub fn step(grid: &HalfSphereGrid, ev: &Evaluation, cfg: &FlowConfig, t: f64, dt: f64) -> Result<HalfSphereGrid> {
    if dt == 0.0 {
        return Ok(grid.clone());
    }
    let half = advance(grid, &ev.rate, 0.5 * dt)?;
    let mid = evaluate(&half, cfg, t + 0.5 * dt)?;
    advance(grid, &mid.rate, dt)
}

/// Q = W_1^{-(n-2)/n} (W_3 + (n-2)/(n-1) W_1), n ≥ 3.
pub fn q_monitor(n: usize, w: &[f64]) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    let nf = n as f64;
    w[1].powf(-(nf - 2.0) / nf) * (w[3] + (nf - 2.0) / (nf - 1.0) * w[1])
}

/// Limit of Q at the flat disk: n^{(n-2)/n}/(n-1) · (ω_{n-1}/(n+1))^{2/n}.
pub fn q_limit(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf((nf - 2.0) / nf) / (nf - 1.0) * (sphere_area(n - 1) / (nf + 1.0)).powf(2.0 / nf)
}

/// φ_k = (W_{2k+1} - A_k(W_1)) / W_1^{(n-2k)/n} for k = 1..=(n-1)/2.
pub fn af_deficits(n: usize, w: &[f64]) -> Vec<f64> {
    (1..=(n.saturating_sub(1)) / 2)
        .map(|k| match af_rhs_a(n, k, w[1]) {
            Ok(a) => (w[2 * k + 1] - a) / w[1].powf((n - 2 * k) as f64 / n as f64),
            Err(_) => f64::NAN,
        })
        .collect()
}

/// Remaining time (1/n) log(b_n / |Σ|) for F = E_1.
pub fn remaining_time(n: usize, area: f64) -> f64 {
    let b = sphere_area(n - 1) / n as f64;
    (b / area).ln() / n as f64
}

fn monitors(ev: &Evaluation, cfg: &FlowConfig, t: f64, dt: f64, step: usize) -> Result<TraceRow> {
    let fields = &ev.fields;
    let n = fields.n();
    let q = assemble_w(fields)?;
    let w = q.w_theta.clone();
    let (max_f, max_h) = extremes(ev);
    let kappa_min = fields.kappa_min();
    let (hmin, hmax) = fields.height_range();
    let convexity = if kappa_min > 0.0 && hmin > 0.0 {
        fields
            .nodes
            .iter()
            .map(|p| {
                let ht = 1.0 / p.kappa.a + (n - 1) as f64 / p.kappa.b;
                ht.ln() - p.height().ln()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        f64::NAN
    };
    let flux: Vec<f64> = (0..=n)
        .map(|k| {
            fields
                .nodes
                .iter()
                .zip(&ev.speed)
                .map(|(p, s)| p.weight * p.kappa.e(n, k) * s)
                .sum()
        })
        .collect();
    let t_star_remaining = if cfg.kind == FlowKind::Icf && cfg.curvature == crate::symfunc::CurvatureSpec::MEAN {
        Some(remaining_time(n, q.area()))
    } else {
        None
    };
    Ok(TraceRow {
        step,
        t,
        q_monitor: q_monitor(n, &w),
        phi: af_deficits(n, &w),
        w,
        max_f,
        max_h,
        convexity,
        height_min: hmin,
        height_max: hmax,
        angle_residual: fields.boundary.contact_residual,
        kappa_min,
        dt,
        flux,
        t_star_remaining,
        min_f: ev.f.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Integrates from `initial` until t_max or a stop threshold.
pub fn run(cfg: &FlowConfig, initial: HalfSphereGrid) -> Result<FlowTrace> {
    cfg.validate()?;
    if initial.spec != cfg.grid {
        return Err(CapflowError::Config("initial grid does not match the flow grid".into()));
    }
    let mut grid = initial;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut ev = evaluate(&grid, cfg, t)?;
    let mut rows = vec![monitors(&ev, cfg, t, 0.0, 0)?];
    let mut last_row_t = 0.0;
    let mut last_dt = 0.0;
    let mut failure: Option<String> = None;
    let mut stats = StepStats::default();
    let (mut prev_f, mut prev_h) = extremes(&ev);

    let stop = loop {
        let min_f = ev.f.iter().copied().fold(f64::INFINITY, f64::min);
        if cfg.kind == FlowKind::Icf && min_f < cfg.stop.min_f {
            break StopReason::MinCurvature;
        }
        let umax = grid.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if umax > cfg.stop.max_abs_u {
            break StopReason::MaxHeight;
        }
        if ev.fields.boundary.contact_residual > cfg.stop.max_angle_residual {
            break StopReason::AngleResidual;
        }
        if t >= cfg.t_max * (1.0 - 1e-14) {
            break StopReason::TMax;
        }
        if cfg.max_steps.is_some_and(|m| steps >= m) {
            break StopReason::MaxSteps;
        }
        let mut dt = dt_control(&ev, cfg)?;
        if t + dt > cfg.t_max {
            dt = cfg.t_max - t;
        }
        let next = step(&grid, &ev, cfg, t, dt).and_then(|g| {
            let e = evaluate(&g, cfg, t + dt)?;
            Ok((g, e))
        });
        match next {
            Ok((g, e)) => {
                grid = g;
                ev = e;
            }
            Err(CapflowError::ConvexityLoss { detail, .. }) => {
                failure = Some(detail);
                break StopReason::ConvexityLoss;
            }
            Err(CapflowError::Numerical(m)) | Err(CapflowError::MeshQuality(m)) => {
                failure = Some(m);
                break StopReason::NumericalFailure;
            }
            Err(e) => return Err(e),
        }
        t += dt;
        steps += 1;
        last_dt = dt;
        let (mf, mh) = extremes(&ev);
        stats.record(prev_f, mf, prev_h, mh);
        (prev_f, prev_h) = (mf, mh);
        let due_steps = steps % cfg.monitor.every_steps == 0;
        let due_time = cfg.monitor.every_time.is_some_and(|d| t - last_row_t >= d * (1.0 - 1e-12));
        if due_steps || due_time {
            rows.push(monitors(&ev, cfg, t, dt, steps)?);
            last_row_t = t;
        }
    };
    if rows.last().map(|r| r.step) != Some(steps) {
        rows.push(monitors(&ev, cfg, t, last_dt, steps)?);
    }
    Ok(FlowTrace {
        config: cfg.clone(),
        rows,
        stop,
        steps,
        t_final: t,
        failure,
        final_grid: grid,
        step_stats: stats,
    })
}

/// (max F, max H) over the nodes; max F is NaN outside the cone.
fn extremes(ev: &Evaluation) -> (f64, f64) {
    let n = ev.fields.n();
    let mf = if ev.f.iter().any(|f| f.is_nan()) {
        f64::NAN
    } else {
        ev.f.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let mh = ev
        .fields
        .nodes
        .iter()
        .map(|p| p.kappa.mean_sum(n))
        .fold(f64::NEG_INFINITY, f64::max);
    (mf, mh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use crate::mobius::CapRadius;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn contact_slopes() {
        assert_eq!(contact_slope(FRAC_PI_2, 0.7).unwrap(), 0.0);
        assert!((contact_slope(PI / 3.0, 0.0).unwrap() + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((contact_slope(FRAC_PI_4, 1.0).unwrap() + 2f64.sqrt()).abs() < 1e-15);
        assert!(contact_slope(2.0, 0.0).is_err());
    }

    #[test]
    fn q_limit_value() {
        let expect = 3f64.powf(1.0 / 3.0) * PI.powf(2.0 / 3.0) / 2.0;
        assert!((q_limit(3) - expect).abs() < 1e-14);
    }

    #[test]
    fn zero_step_is_identity() {
        let spec = GridSpec::axisymmetric(2, 40, FRAC_PI_2);
        let cfg = FlowConfig::new(FlowKind::Icf, spec, 0.1);
        let g = InitialData::Cap { radius: CapRadius::Finite(1.0) }.build(spec, 0).unwrap();
        let ev = evaluate(&g, &cfg, 0.0).unwrap();
        assert_eq!(step(&g, &ev, &cfg, 0.0, 0.0).unwrap(), g);
    }

    #[test]
    fn icf_speed_is_reciprocal_mean_curvature() {
        let spec = GridSpec::axisymmetric(2, 40, FRAC_PI_2);
        let cfg = FlowConfig::new(FlowKind::Icf, spec, 0.1);
        let g = InitialData::Cap { radius: CapRadius::Finite(1.0) }.build(spec, 0).unwrap();
        let ev = evaluate(&g, &cfg, 0.0).unwrap();
        for (s, p) in ev.speed.iter().zip(&ev.fields.nodes) {
            assert!((s * p.kappa.e(2, 1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_disk_is_static_under_mcf() {
        let spec = GridSpec::axisymmetric(3, 40, FRAC_PI_2);
        let cfg = FlowConfig::new(FlowKind::Mcf, spec, 0.1);
        let g = InitialData::Cap { radius: CapRadius::Infinite }.build(spec, 0).unwrap();
        let ev = evaluate(&g, &cfg, 0.0).unwrap();
        assert!(ev.rate.iter().all(|r| r.abs() < 1e-12));
    }
}
