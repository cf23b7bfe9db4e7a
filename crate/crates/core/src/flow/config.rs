use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{CapflowError, Result};
use crate::geometry::{fundamental_forms, GridMode, GridSpec, HalfSphereGrid};
use crate::mobius::{cap_graph_u, CapRadius, CapSpec};
use crate::symfunc::CurvatureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// Expanding inverse curvature flow, normal speed 1/F.
    Icf,
    /// Mean curvature flow, normal speed -H.
    Mcf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopThresholds {
    /// Stop once min F drops below this (approach to the flat ball).
    pub min_f: f64,
    pub max_abs_u: f64,
    pub max_angle_residual: f64,
}

impl Default for StopThresholds {
    fn default() -> Self {
        Self {
            min_f: 0.02,
            max_abs_u: 6.0,
            max_angle_residual: 0.1,
        }
    }
}

/// A trace row is written every `every_steps` steps or whenever
/// `every_time` has elapsed since the last row, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonitorCadence {
    pub every_steps: usize,
    pub every_time: Option<f64>,
}

impl Default for MonitorCadence {
    fn default() -> Self {
        Self {
            every_steps: 100,
            every_time: None,
        }
    }
}

fn default_dt_safety() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub kind: FlowKind,
    #[serde(default)]
    pub curvature: CurvatureSpec,
    pub grid: GridSpec,
    #[serde(default = "default_dt_safety")]
    pub dt_safety: f64,
    pub t_max: f64,
    #[serde(default)]
    pub stop: StopThresholds,
    #[serde(default)]
    pub monitor: MonitorCadence,
    /// Hard cap on the number of steps.
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl FlowConfig {
    pub fn new(kind: FlowKind, grid: GridSpec, t_max: f64) -> Self {
        Self {
            kind,
            curvature: CurvatureSpec::MEAN,
            grid,
            dt_safety: default_dt_safety(),
            t_max,
            stop: StopThresholds::default(),
            monitor: MonitorCadence::default(),
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CapflowError::Config(m));
        self.grid.validate()?;
        if !(self.grid.theta > 0.0 && self.grid.theta <= FRAC_PI_2 + 1e-15) {
            return bad(format!("flows need θ in (0, π/2], got {}", self.grid.theta));
        }
        self.curvature
            .validate(self.grid.n)
            .map_err(|e| CapflowError::Config(e.to_string()))?;
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return bad(format!("dt_safety = {} must lie in (0, 1]", self.dt_safety));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        let s = &self.stop;
        if !(s.min_f > 0.0 && s.max_abs_u > 0.0 && s.max_angle_residual > 0.0) {
            return bad("stop thresholds must be positive".into());
        }
        if self.monitor.every_steps == 0 {
            return bad("monitor.every_steps must be at least 1".into());
        }
        if let Some(dt) = self.monitor.every_time {
            if !(dt > 0.0) {
                return bad("monitor.every_time must be positive".into());
            }
        }
        Ok(())
    }
}

/// One term c·cos^p β of a rim-flat perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbTerm {
    pub power: u32,
    pub coeff: f64,
}

fn default_terms() -> Vec<PerturbTerm> {
    vec![PerturbTerm { power: 2, coeff: 1.0 }]
}

fn default_flat_power() -> u32 {
    4
}

/// Initial hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// The cap C_{θ,r}; r may be "inf".
    Cap { radius: CapRadius },
    /// u = u_cap + ε ψ with ψ = Σ c_p cos^p β (p ≥ 2), optionally times
    /// (1 + a sin β cos ξ) in full2d mode. With `random_terms = m` the
    /// coefficients of cos^2 .. cos^{m+1} are drawn from the seed instead.
    PerturbedCap {
        radius: CapRadius,
        epsilon: f64,
        #[serde(default = "default_terms")]
        terms: Vec<PerturbTerm>,
        #[serde(default)]
        azimuthal: f64,
        #[serde(default)]
        random_terms: Option<usize>,
    },
    /// u = u_cap + ε cos^p β with ε chosen so the apex curvature vanishes:
    /// weakly convex with a flat point.
    FlattenedCap {
        radius: CapRadius,
        #[serde(default = "default_flat_power")]
        power: u32,
    },
    /// u = Σ a_j cos^j β; the contact condition requires a_1 = cot θ.
    Polynomial { coefficients: Vec<f64> },
}

/// Largest allowed negative curvature in initial data.
pub const CONVEXITY_TOL: f64 = 1e-6;
/// Allowed mismatch between a_1 and cot θ for polynomial profiles.
pub const PROFILE_BC_TOL: f64 = 1e-8;

fn perturbed(spec: GridSpec, cap: &CapSpec, eps: f64, terms: &[PerturbTerm], az: f64) -> Result<HalfSphereGrid> {
    HalfSphereGrid::from_fn(spec, |b, xi| {
        let c = b.cos();
        let psi: f64 = terms.iter().map(|t| t.coeff * c.powi(t.power as i32)).sum();
        let ang = if spec.mode == GridMode::Full2d {
            1.0 + az * b.sin() * xi.cos()
        } else {
            1.0
        };
        Ok(cap_graph_u(cap, b.min(FRAC_PI_2))? + eps * psi * ang)
    })
}

/// ε for which u_cap + ε cos^p β has zero discrete apex curvature.
pub fn apex_flattening_epsilon(spec: GridSpec, radius: CapRadius, power: u32) -> Result<f64> {
    let cap = CapSpec {
        theta: spec.theta,
        radius,
    };
    let terms = [PerturbTerm { power, coeff: 1.0 }];
    let apex = |eps: f64| -> Result<f64> {
        let g = perturbed(spec, &cap, eps, &terms, 0.0)?;
        Ok(fundamental_forms(&g)?.nodes[0].kappa.a)
    };
    // Increasing ε raises u'' at the apex and lowers its curvature.
    let (mut lo, mut hi) = (0.0, 1.0);
    if apex(lo)? <= 0.0 {
        return Err(CapflowError::Config("cap apex is already flat".into()));
    }
    let mut tries = 0;
    while apex(hi)? > 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 30 {
            return Err(CapflowError::Numerical("no flattening perturbation found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if apex(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl InitialData {
    /// Samples the data on the grid and checks convexity and the contact
    /// condition.
    pub fn build(&self, spec: GridSpec, seed: u64) -> Result<HalfSphereGrid> {
        spec.validate()?;
        let cap_of = |r: CapRadius| {
            let c = CapSpec {
                theta: spec.theta,
                radius: r,
            };
            c.validate().map_err(|e| CapflowError::Config(e.to_string()))?;
            Ok::<_, CapflowError>(c)
        };
        let grid = match self {
            InitialData::Cap { radius } => HalfSphereGrid::from_cap(spec, &cap_of(*radius)?)?,
            InitialData::PerturbedCap {
                radius,
                epsilon,
                terms,
                azimuthal,
                random_terms,
            } => {
                let drawn: Vec<PerturbTerm>;
                let terms = match random_terms {
                    Some(m) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        drawn = (0..*m)
                            .map(|i| PerturbTerm {
                                power: 2 + i as u32,
                                coeff: rng.gen_range(-1.0..1.0),
                            })
                            .collect();
                        &drawn
                    }
                    None => terms,
                };
                if terms.iter().any(|t| t.power < 2) {
                    return Err(CapflowError::Config(
                        "perturbation powers must be at least 2 to keep the contact angle".into(),
                    ));
                }
                perturbed(spec, &cap_of(*radius)?, *epsilon, terms, *azimuthal)?
            }
            InitialData::FlattenedCap { radius, power } => {
                if *power < 2 {
                    return Err(CapflowError::Config("power must be at least 2".into()));
                }
                let eps = apex_flattening_epsilon(spec, *radius, *power)?;
                let terms = [PerturbTerm {
                    power: *power,
                    coeff: 1.0,
                }];
                perturbed(spec, &cap_of(*radius)?, eps, &terms, 0.0)?
            }
            InitialData::Polynomial { coefficients } => {
                if spec.mode != GridMode::Axisymmetric {
                    return Err(CapflowError::Config("polynomial profiles are axisymmetric".into()));
                }
                let a1 = coefficients.get(1).copied().unwrap_or(0.0);
                if (a1 - spec.cot_theta()).abs() > PROFILE_BC_TOL {
                    return Err(CapflowError::Config(format!(
                        "profile violates the contact condition: a_1 = {a1}, cot θ = {}",
                        spec.cot_theta()
                    )));
                }
                HalfSphereGrid::from_fn(spec, |b, _| {
                    let c = b.cos();
                    Ok(coefficients.iter().rev().fold(0.0, |acc, a| acc * c + a))
                })?
            }
        };
        let fields = fundamental_forms(&grid)?;
        let kmin = fields.kappa_min();
        if kmin < -CONVEXITY_TOL {
            return Err(CapflowError::Config(format!(
                "initial data is not convex (min curvature {kmin:e})"
            )));
        }
        Ok(grid)
    }
}
