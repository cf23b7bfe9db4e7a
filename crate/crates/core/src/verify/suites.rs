//! Fixtures, flow scenarios and the named suites built from them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI};

use super::checks::*;
use super::report::CheckReport;
use crate::error::{CapflowError, Result};
use crate::flow::{run, FlowConfig, FlowKind, FlowTrace, InitialData, PerturbTerm};
use crate::geometry::{conformal_graph_kernel, fundamental_forms, GridSpec, HalfSphereGrid, SurfaceFields};
use crate::mobius::{CapRadius, CapSpec};
use crate::quermass::{assemble_w, cap_quermass, flat_disk_quermass, CapTable, QuermassVector};

/// Flat-disk equality through the analytic values.
pub const FLAT_ANALYTIC_TOL: f64 = 1e-8;
/// Flat-disk equality through the full pipeline at N_β = 400.
pub const FLAT_PIPELINE_TOL: f64 = 1e-4;
/// Required ratio of strict margins to the discretization estimate.
pub const STRICT_FACTOR: f64 = 10.0;
/// Convergence order demanded of the curvature kernels.
pub const KERNEL_ORDER: f64 = 1.8;
/// Convergence order demanded of the boundary identities.
pub const BOUNDARY_ORDER: f64 = 1.5;
/// Curvature errors below this count as exact.
pub const EXACT_FLOOR: f64 = 1e-10;
/// Agreement of the 2D and axisymmetric kernels on axisymmetric data.
pub const MODE_AGREEMENT_TOL: f64 = 1e-8;
/// Relative tolerance of the W_1 growth law.
pub const GROWTH_REL_TOL: f64 = 1e-3;
/// Contact residual allowed during MCF regularization.
pub const REGULARIZATION_ANGLE_TOL: f64 = 1e-2;
/// Minimum grid for the cap-table comparisons, whose strict margins are
/// around 3e-5 for the default perturbation.
pub const CAP_AF_MIN_N_BETA: usize = 800;
/// Flat-point tolerance of the weakly convex fixture.
pub const FLAT_POINT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Mobius,
    Geometry,
    Pointwise,
    AfMain,
    #[serde(rename = "af_thmB")]
    AfThmB,
    #[serde(rename = "af_thmC")]
    AfThmC,
    Monotonicity,
    Limits,
    Variational,
    Regularization,
    All,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Identities,
        Suite::Mobius,
        Suite::Geometry,
        Suite::Pointwise,
        Suite::AfMain,
        Suite::AfThmB,
        Suite::AfThmC,
        Suite::Monotonicity,
        Suite::Limits,
        Suite::Variational,
        Suite::Regularization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Mobius => "mobius",
            Suite::Geometry => "geometry",
            Suite::Pointwise => "pointwise",
            Suite::AfMain => "af_main",
            Suite::AfThmB => "af_thmB",
            Suite::AfThmC => "af_thmC",
            Suite::Monotonicity => "monotonicity",
            Suite::Limits => "limits",
            Suite::Variational => "variational",
            Suite::Regularization => "regularization",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        Suite::ALL
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                CapflowError::Config(format!("unknown suite {s:?}; expected one of {} or all", names.join(", ")))
            })
    }
}

fn default_theta() -> f64 {
    FRAC_PI_2
}

/// Extra inputs for the af_main suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fixture {
    /// A sampled hypersurface run through the pipeline.
    Surface {
        #[serde(default)]
        label: Option<String>,
        n: usize,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default)]
        n_beta: Option<usize>,
        initial: InitialData,
    },
    /// The free-boundary flat disk with analytic quermassintegrals.
    FlatDisk { n: usize },
    /// A given vector W_0..W_{n+1}.
    Quermass {
        #[serde(default)]
        label: Option<String>,
        n: usize,
        w: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per property in the identities suite.
    pub samples: usize,
    pub mobius_samples: usize,
    /// Grid for fixture-based checks.
    pub n_beta: usize,
    /// Additional af_main fixtures.
    pub fixtures: Vec<Fixture>,
    /// Run only `fixtures` in af_main.
    pub fixtures_only: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100_000,
            mobius_samples: 1000,
            n_beta: 200,
            fixtures: Vec::new(),
            fixtures_only: false,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_beta < 8 {
            return Err(CapflowError::Config(format!("n_beta = {} must be at least 8", self.n_beta)));
        }
        if self.samples == 0 || self.mobius_samples == 0 {
            return Err(CapflowError::Config("sample counts must be positive".into()));
        }
        Ok(())
    }
}

/// Pipeline output for one surface, plus a Richardson estimate of the
/// discretization error from the half-resolution grid.
pub struct Evaluated {
    pub label: String,
    pub fields: SurfaceFields,
    pub q: QuermassVector,
    /// Same surface at N_β / 2.
    pub coarse: QuermassVector,
    /// max_k |W_k(N) - W_k(N/2)| / 3.
    pub w_error: f64,
    /// |A(N) - A(N/2)| / 3.
    pub area_error: f64,
}

pub fn evaluate_surface(label: &str, n: usize, theta: f64, n_beta: usize, init: &InitialData, seed: u64) -> Result<Evaluated> {
    let fine = GridSpec::axisymmetric(n, n_beta, theta);
    let coarse = GridSpec::axisymmetric(n, n_beta / 2, theta);
    let fields = fundamental_forms(&init.build(fine, seed)?)?;
    let q = assemble_w(&fields)?;
    let fc = fundamental_forms(&init.build(coarse, seed)?)?;
    let qc = assemble_w(&fc)?;
    let w_error = q
        .w_theta
        .iter()
        .zip(&qc.w_theta)
        .map(|(a, b)| (a - b).abs() / 3.0)
        .fold(0.0, f64::max);
    let area_error = (fields.area() - fc.area()).abs() / 3.0;
    Ok(Evaluated {
        label: label.to_string(),
        fields,
        q,
        coarse: qc,
        w_error,
        area_error,
    })
}

fn cap(r: f64) -> InitialData {
    InitialData::Cap {
        radius: CapRadius::Finite(r),
    }
}

fn perturbed(r: f64, eps: f64) -> InitialData {
    InitialData::PerturbedCap {
        radius: CapRadius::Finite(r),
        epsilon: eps,
        terms: vec![PerturbTerm { power: 2, coeff: 1.0 }],
        azimuthal: 0.0,
        random_terms: None,
    }
}

/// Strictly convex free-boundary fixtures: (label, n, initial data).
pub fn convex_fixtures() -> Vec<(String, usize, InitialData)> {
    vec![
        ("cap[n=2,r=1]".into(), 2, cap(1.0)),
        ("cap[n=3,r=0.5]".into(), 3, cap(0.5)),
        ("cap[n=5,r=2]".into(), 5, cap(2.0)),
        ("perturbed[n=2,r=1,ε=0.05]".into(), 2, perturbed(1.0, 0.05)),
        ("perturbed[n=3,r=1,ε=0.05]".into(), 3, perturbed(1.0, 0.05)),
        ("perturbed[n=5,r=1,ε=0.05]".into(), 5, perturbed(1.0, 0.05)),
    ]
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    match suite {
        Suite::Identities => identities(cfg),
        Suite::Mobius => check_mobius(cfg.mobius_samples, cfg.seed),
        Suite::Geometry => geometry(),
        Suite::Pointwise => pointwise(cfg),
        Suite::AfMain => af_main(cfg),
        Suite::AfThmB => cap_af(cfg, CapAfFamily::B),
        Suite::AfThmC => cap_af(cfg, CapAfFamily::C),
        Suite::Monotonicity => monotonicity(),
        Suite::Limits => limits(),
        Suite::Variational => variational(),
        Suite::Regularization => regularization(),
        Suite::All => {
            let parts: Vec<Result<Vec<CheckReport>>> = Suite::ALL.par_iter().map(|s| run_suite(*s, cfg)).collect();
            let mut out = Vec::new();
            for p in parts {
                out.extend(p?);
            }
            Ok(out)
        }
    }
}

fn identities(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = check_identities(60, 7)?;
    out.extend(check_sampled_properties(cfg.samples, cfg.seed)?);
    Ok(out)
}

/// Max over nodes of |κ - 1/r| for both curvature slots.
fn cap_error(kappa: impl Iterator<Item = (f64, f64)>, r: f64) -> f64 {
    kappa.map(|(a, b)| (a - 1.0 / r).abs().max((b - 1.0 / r).abs())).fold(0.0, f64::max)
}

fn geometry() -> Result<Vec<CheckReport>> {
    let grids = [100usize, 200, 400];
    let cases = [(FRAC_PI_2, 1.0), (PI / 3.0, 2.0)];
    let mut out = Vec::new();
    for (theta, r) in cases {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        let mut ed = Vec::new();
        for &nb in &grids {
            let spec = GridSpec::axisymmetric(2, nb, theta);
            let g = HalfSphereGrid::from_cap(spec, &CapSpec::new(theta, r)?)?;
            let k1: Vec<_> = fundamental_forms(&g)?.nodes.iter().map(|p| (p.kappa.a, p.kappa.b)).collect();
            let k2: Vec<_> = conformal_graph_kernel(&g)?.kappa.iter().map(|p| (p.a, p.b)).collect();
            e1.push(cap_error(k1.iter().copied(), r));
            e2.push(cap_error(k2.iter().copied(), r));
            ed.push(
                k1.iter()
                    .zip(&k2)
                    .map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs()))
                    .fold(0.0, f64::max),
            );
        }
        let tag = format!("θ={theta:.4},r={r}");
        let inputs = json!({"theta": theta, "r": r, "n_beta": grids});
        out.push(check_order(format!("kernel_fundamental_order[{tag}]"), &inputs, &e1, EXACT_FLOOR, KERNEL_ORDER));
        out.push(check_order(format!("kernel_graph_order[{tag}]"), &inputs, &e2, EXACT_FLOOR, KERNEL_ORDER));
        out.push(check_order(format!("kernel_agreement_order[{tag}]"), &inputs, &ed, EXACT_FLOOR, KERNEL_ORDER));
    }

    // 2D kernel against the axisymmetric one on rotationally symmetric data
    let theta = PI / 3.0;
    let c = CapSpec::new(theta, 2.0)?;
    let ax = fundamental_forms(&HalfSphereGrid::from_cap(GridSpec::axisymmetric(2, 100, theta), &c)?)?;
    let fd = fundamental_forms(&HalfSphereGrid::from_cap(GridSpec::full2d(100, 16, theta), &c)?)?;
    let sorted = |a: f64, b: f64| (a.min(b), a.max(b));
    let mut diff = 0.0f64;
    for (idx, p) in fd.nodes.iter().enumerate() {
        let q = &ax.nodes[idx / 16];
        let (x0, x1) = sorted(p.kappa.a, p.kappa.b);
        let (y0, y1) = sorted(q.kappa.a, q.kappa.b);
        diff = diff.max((x0 - y0).abs()).max((x1 - y1).abs());
    }
    out.push(
        CheckReport::equal(
            "kernel_mode_agreement[θ=1.0472,r=2]",
            &json!({"n_beta": 100, "n_xi": 16}),
            diff,
            0.0,
            MODE_AGREEMENT_TOL,
        )
        .note("max curvature difference between full2d and axisymmetric grids"),
    );

    // boundary frame identities under refinement
    let init = perturbed(1.0, 0.05);
    let mut diag = Vec::new();
    let mut contact = Vec::new();
    for &nb in &grids {
        let f = fundamental_forms(&init.build(GridSpec::axisymmetric(2, nb, theta), 0)?)?;
        diag.push(f.boundary.diagonal_residual);
        contact.push(f.boundary.contact_residual);
    }
    let inputs = json!({"fixture": "perturbed[n=2,r=1,ε=0.05]", "theta": theta, "n_beta": grids});
    out.push(check_order("boundary_diagonal_order", &inputs, &diag, EXACT_FLOOR, BOUNDARY_ORDER));
    out.push(check_order("boundary_contact_order", &inputs, &contact, EXACT_FLOOR, BOUNDARY_ORDER));

    let az = InitialData::PerturbedCap {
        radius: CapRadius::Finite(1.0),
        epsilon: 0.05,
        terms: vec![PerturbTerm { power: 2, coeff: 1.0 }],
        azimuthal: 0.5,
        random_terms: None,
    };
    let mut off = Vec::new();
    for &nb in &[50usize, 100, 200] {
        let f = fundamental_forms(&az.build(GridSpec::full2d(nb, 16, theta), 0)?)?;
        off.push(f.boundary.offdiag_residual);
    }
    out.push(check_order(
        "boundary_offdiag_order[full2d]",
        &json!({"fixture": "azimuthal perturbation", "theta": theta, "n_beta": [50, 100, 200]}),
        &off,
        EXACT_FLOOR,
        BOUNDARY_ORDER,
    ));
    Ok(out)
}

fn pointwise(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let parts: Vec<Result<Vec<CheckReport>>> = convex_fixtures()
        .par_iter()
        .map(|(label, n, init)| {
            let ev = evaluate_surface(label, *n, FRAC_PI_2, cfg.n_beta, init, cfg.seed)?;
            let mut out = check_pointwise_lemmas(label, &ev.fields, &ev.q)?;
            out.extend(check_area_bounds(label, &ev.fields, STRICT_FACTOR * ev.area_error));
            let flat = cap_quermass(*n, FRAC_PI_2, CapRadius::Infinite, cfg.n_beta)?;
            out.push(check_height_estimate(label, &ev.fields, &ev.q, flat.w(1)));
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    // capillary height estimate
    let theta = PI / 3.0;
    let ev = evaluate_surface("cap[n=2,θ=π/3,r=1]", 2, theta, cfg.n_beta, &cap(1.0), cfg.seed)?;
    let flat = cap_quermass(2, theta, CapRadius::Infinite, cfg.n_beta)?;
    out.push(check_height_estimate(&ev.label, &ev.fields, &ev.q, flat.w(1)));
    Ok(out)
}

fn af_fixture_reports(fx: &Fixture, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let ks = |n: usize| 1..=(n.saturating_sub(1)) / 2;
    let mut out = Vec::new();
    match fx {
        Fixture::FlatDisk { n } => {
            let w = flat_disk_quermass(*n);
            for k in ks(*n) {
                let r = check_af_main(&w, *n, FRAC_PI_2, k, 0.0)?;
                out.push(
                    CheckReport::equal(format!("{}[flat,analytic]", r.id), &w, r.lhs, r.rhs, FLAT_ANALYTIC_TOL)
                        .note("equality case"),
                );
            }
        }
        Fixture::Quermass { label, n, w } => {
            for k in ks(*n) {
                let mut r = check_af_main(w, *n, FRAC_PI_2, k, 0.0)?;
                if let Some(l) = label {
                    r.id = format!("{}[{l}]", r.id);
                }
                out.push(r);
            }
        }
        Fixture::Surface {
            label,
            n,
            theta,
            n_beta,
            initial,
        } => {
            let name = label.clone().unwrap_or_else(|| "surface".into());
            let ev = evaluate_surface(&name, *n, *theta, n_beta.unwrap_or(cfg.n_beta), initial, cfg.seed)?;
            for k in ks(*n) {
                let mut r = check_af_main(&ev.q.w_theta, *n, *theta, k, ev.w_error)?;
                r.id = format!("{}[{name}]", r.id);
                out.push(r.note(format!("tolerance is the Richardson error estimate {:.2e}", ev.w_error)));
            }
        }
    }
    Ok(out)
}

fn af_main(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if !cfg.fixtures_only {
        out.extend(af_fixture_reports(&Fixture::FlatDisk { n: 3 }, cfg)?);
        // pipeline flat disk
        let q = cap_quermass(3, FRAC_PI_2, CapRadius::Infinite, 400)?;
        let r = check_af_main(&q.w_theta, 3, FRAC_PI_2, 1, 0.0)?;
        out.push(
            CheckReport::equal(format!("{}[flat,pipeline]", r.id), &q.w_theta, r.lhs, r.rhs, FLAT_PIPELINE_TOL)
                .note("equality case at N_β = 400"),
        );
        let strict: Vec<(usize, usize, String, InitialData)> = vec![
            (3, 1, "perturbed[r=1,ε=0.05]".into(), perturbed(1.0, 0.05)),
            (5, 1, "perturbed[r=1,ε=0.05]".into(), perturbed(1.0, 0.05)),
            (5, 2, "perturbed[r=1,ε=0.05]".into(), perturbed(1.0, 0.05)),
            (5, 2, "cap[r=2]".into(), cap(2.0)),
        ];
        let parts: Vec<Result<CheckReport>> = strict
            .par_iter()
            .map(|(n, k, label, init)| {
                let ev = evaluate_surface(label, *n, FRAC_PI_2, cfg.n_beta, init, cfg.seed)?;
                let mut r = check_af_main(&ev.q.w_theta, *n, FRAC_PI_2, *k, -ev.w_error)?;
                r.id = format!("{}[{label}]", r.id);
                Ok(r.note(format!("strict: margin must exceed the Richardson error {:.2e}", ev.w_error)))
            })
            .collect();
        for p in parts {
            out.push(p?);
        }
    }
    for fx in &cfg.fixtures {
        out.extend(af_fixture_reports(fx, cfg)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CapAfFamily {
    B,
    C,
}

fn cap_af(cfg: &VerifyConfig, which: CapAfFamily) -> Result<Vec<CheckReport>> {
    let n = 2;
    let n_beta = cfg.n_beta.max(CAP_AF_MIN_N_BETA);
    let parts: Vec<Result<Vec<CheckReport>>> = [FRAC_PI_2, PI / 3.0]
        .par_iter()
        .map(|&theta| {
            let table = CapTable::build(n, theta, n_beta, CapTable::default_radii())?;
            let checks = |w: &[f64], t: &CapTable| -> Result<Vec<CheckReport>> {
                match which {
                    CapAfFamily::C => Ok(vec![check_af_thm_c(w, t, 1, 0.0)?]),
                    CapAfFamily::B => (0..n).map(|k| check_af_thm_b(w, t, k, 0.0)).collect(),
                }
            };
            let mut out = Vec::new();
            let fixtures = [
                ("cap[r=1]", cap(1.0), false),
                ("flat", InitialData::Cap { radius: CapRadius::Infinite }, false),
                ("perturbed[r=1,ε=0.05]", perturbed(1.0, 0.05), true),
            ];
            for (label, init, strict) in fixtures {
                let ev = evaluate_surface(label, n, theta, n_beta, &init, cfg.seed)?;
                let w = &ev.q.w_theta;
                let inputs = json!({"w": w, "theta": theta});
                if !strict {
                    let disc = ev.w_error.max(1e-9);
                    for r in checks(w, &table)? {
                        out.push(
                            CheckReport::equal(format!("{}[{label}]", r.id), &inputs, r.lhs, r.rhs, disc)
                                .note(format!("equality case; tolerance is the Richardson error {disc:.2e}")),
                        );
                    }
                    continue;
                }
                // Richardson estimate of each margin; the coarse table cannot resolve
                // W_n near r = ∞, so only the surface is coarsened
                let coarse = checks(&ev.coarse.w_theta, &table)?;
                for (r, c) in checks(w, &table)?.into_iter().zip(coarse) {
                    let disc = (r.margin - c.margin).abs() / 3.0;
                    out.push(
                        CheckReport::at_least(format!("{}[{label}]", r.id), &inputs, r.lhs, r.rhs, -STRICT_FACTOR * disc)
                            .note(format!("strict: margin must exceed 10 × its Richardson error {disc:.2e}")),
                    );
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// ICF with F = E_1 from C_{π/2,1}, n = 2, N_β = 200, up to half of T*.
pub fn growth_run() -> Result<FlowTrace> {
    let spec = GridSpec::axisymmetric(2, 200, FRAC_PI_2);
    let g = cap(1.0).build(spec, 0)?;
    let area = fundamental_forms(&g)?.area();
    let t_star = free_boundary_t_star(2, area);
    let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 0.5 * t_star);
    cfg.monitor.every_steps = 500;
    run(&cfg, g)
}

/// ICF with F = E_1 from C_{π/2,1} until min F = 0.02.
pub fn limit_run(n: usize, n_beta: usize) -> Result<FlowTrace> {
    let spec = GridSpec::axisymmetric(n, n_beta, FRAC_PI_2);
    let g = cap(1.0).build(spec, 0)?;
    let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 100.0);
    cfg.monitor.every_steps = 1000;
    cfg.monitor.every_time = Some(0.01);
    run(&cfg, g)
}

fn monotonicity() -> Result<Vec<CheckReport>> {
    let runs: Vec<Result<FlowTrace>> = [0usize, 1].par_iter().map(|&i| if i == 0 { growth_run() } else { limit_run(3, 100) }).collect();
    let mut it = runs.into_iter();
    let growth = it.next().unwrap()?;
    let lim = it.next().unwrap()?;
    let t_star = free_boundary_t_star(2, growth.rows[0].w[1] * 3.0);
    let mut out = vec![check_w1_growth(&growth, 0.5 * t_star, GROWTH_REL_TOL)?];
    out.extend(check_monotone_extremes(&growth));
    out.push(check_height_lower_bound(&growth));
    out.extend(check_monotone_extremes(&lim));
    out.push(check_q_decreasing(&lim, 0.01));
    out.push(check_height_lower_bound(&lim));
    Ok(out)
}

fn limits() -> Result<Vec<CheckReport>> {
    let runs: Vec<Result<FlowTrace>> = [(3usize, 100usize), (2, 100)].par_iter().map(|&(n, nb)| limit_run(n, nb)).collect();
    let mut out = Vec::new();
    for r in runs {
        out.extend(check_limits(&r?));
    }
    Ok(out)
}

/// Short ICF and MCF runs used for the variational identity.
pub fn variational_scenarios() -> Vec<(FlowKind, usize, f64, InitialData)> {
    vec![
        (FlowKind::Icf, 2, FRAC_PI_2, cap(1.0)),
        (FlowKind::Icf, 3, PI / 3.0, cap(1.0)),
        (FlowKind::Icf, 2, 1.2, perturbed(1.0, 0.05)),
        (FlowKind::Mcf, 2, PI / 3.0, cap(1.0)),
        (FlowKind::Mcf, 3, FRAC_PI_2, cap(1.0)),
        (FlowKind::Mcf, 2, 1.2, perturbed(1.0, 0.05)),
    ]
}

pub fn variational_run(kind: FlowKind, n: usize, theta: f64, init: &InitialData) -> Result<FlowTrace> {
    let spec = GridSpec::axisymmetric(n, 200, theta);
    let t_max = 0.05;
    let mut cfg = FlowConfig::new(kind, spec, t_max);
    cfg.monitor.every_steps = usize::MAX;
    cfg.monitor.every_time = Some(t_max / 40.0);
    run(&cfg, init.build(spec, 0)?)
}

fn variational() -> Result<Vec<CheckReport>> {
    let parts: Vec<Result<Vec<CheckReport>>> = variational_scenarios()
        .par_iter()
        .map(|(kind, n, theta, init)| Ok(check_variational(&variational_run(*kind, *n, *theta, init)?)))
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// MCF for time 1e-3 from the cap C_{π/2,1} flattened at the apex.
pub fn regularization_run() -> Result<(f64, FlowTrace)> {
    let spec = GridSpec::axisymmetric(2, 200, FRAC_PI_2);
    let g = InitialData::FlattenedCap {
        radius: CapRadius::Finite(1.0),
        power: 4,
    }
    .build(spec, 0)?;
    let kappa0 = fundamental_forms(&g)?.kappa_min();
    let mut cfg = FlowConfig::new(FlowKind::Mcf, spec, 1e-3);
    cfg.monitor.every_steps = 10;
    Ok((kappa0, run(&cfg, g)?))
}

fn regularization() -> Result<Vec<CheckReport>> {
    let (kappa0, trace) = regularization_run()?;
    let mut out = vec![CheckReport::equal(
        "weakly_convex_fixture",
        &json!({"radius": 1.0, "power": 4}),
        kappa0,
        0.0,
        FLAT_POINT_TOL,
    )
    .note("initial κ_min")];
    out.extend(check_regularization(&trace, kappa0, REGULARIZATION_ANGLE_TOL));
    Ok(out)
}
