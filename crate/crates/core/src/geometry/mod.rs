//! Discretized radial graphs over the upper hemisphere and the geometry of
//! their images in the ball.
//!
//! A hypersurface is stored as `u = log ρ` sampled on a uniform grid in the
//! polar angle β ∈ [0, π/2] (and, in `Full2d` mode, a periodic grid in the
//! azimuth ξ). The ball surface is X = φ⁻¹(e^u z).

mod fields;
mod graph;
mod profile;
mod spectral;

pub use fields::{
    fundamental_forms, sine_power_integral, BoundaryData, NodeFields, Principal, SurfaceFields,
};
pub use graph::{conformal_graph_kernel, GraphCurvature};
pub use profile::{profile_curvatures, Profile};
pub use spectral::FourierDiff;

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{CapflowError, Result};
use crate::mobius::{cap_graph_u, cos_theta, CapSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// Rotationally symmetric surfaces in any dimension; u = u(β).
    #[default]
    Axisymmetric,
    /// General surfaces for n = 2; u = u(β, ξ).
    Full2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Hypersurface dimension.
    pub n: usize,
    #[serde(default)]
    pub mode: GridMode,
    /// Number of β intervals; nodes are i = 0..=n_beta.
    pub n_beta: usize,
    /// Azimuthal nodes (Full2d only).
    #[serde(default = "default_n_xi")]
    pub n_xi: usize,
    /// Contact angle.
    pub theta: f64,
}

fn default_n_xi() -> usize {
    16
}

impl GridSpec {
    pub fn axisymmetric(n: usize, n_beta: usize, theta: f64) -> Self {
        Self {
            n,
            mode: GridMode::Axisymmetric,
            n_beta,
            n_xi: 1,
            theta,
        }
    }

    pub fn full2d(n_beta: usize, n_xi: usize, theta: f64) -> Self {
        Self {
            n: 2,
            mode: GridMode::Full2d,
            n_beta,
            n_xi,
            theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CapflowError::Config(m));
        if self.n < 2 {
            return bad(format!("dimension n = {} must be at least 2", self.n));
        }
        if self.n_beta < 4 {
            return bad(format!("n_beta = {} must be at least 4", self.n_beta));
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return bad(format!("contact angle {} outside (0, π)", self.theta));
        }
        if self.mode == GridMode::Full2d {
            if self.n != 2 {
                return bad("full2d mode requires n = 2".into());
            }
            if self.n_xi < 8 || self.n_xi % 8 != 0 {
                return bad(format!("n_xi = {} must be a positive multiple of 8", self.n_xi));
            }
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        FRAC_PI_2 / self.n_beta as f64
    }

    pub fn beta(&self, i: isize) -> f64 {
        i as f64 * self.h()
    }

    pub fn xi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_xi as f64
    }

    /// Azimuthal nodes actually stored per β row.
    pub fn row_len(&self) -> usize {
        match self.mode {
            GridMode::Axisymmetric => 1,
            GridMode::Full2d => self.n_xi,
        }
    }

    pub fn cot_theta(&self) -> f64 {
        cos_theta(self.theta) / self.theta.sin()
    }

    pub fn node_count(&self) -> usize {
        (self.n_beta + 1) * self.row_len()
    }
}

/// Sampled u on the grid, row-major in (β, ξ). The pole row is stored
/// `row_len` times and kept constant.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSphereGrid {
    pub spec: GridSpec,
    pub u: Vec<f64>,
}

impl HalfSphereGrid {
    pub fn new(spec: GridSpec, u: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if u.len() != spec.node_count() {
            return Err(CapflowError::Config(format!(
                "expected {} node values, got {}",
                spec.node_count(),
                u.len()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(CapflowError::Numerical("non-finite graph values".into()));
        }
        Ok(Self { spec, u })
    }

    /// Samples `f(β, ξ)`; the pole row uses ξ = 0 for every entry.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> Result<f64>) -> Result<Self> {
        spec.validate()?;
        let m = spec.row_len();
        let mut u = Vec::with_capacity(spec.node_count());
        for i in 0..=spec.n_beta {
            let b = spec.beta(i as isize);
            for j in 0..m {
                let xi = if i == 0 { 0.0 } else { spec.xi(j) };
                u.push(f(b, xi)?);
            }
        }
        Self::new(spec, u)
    }

    pub fn from_cap(spec: GridSpec, cap: &CapSpec) -> Result<Self> {
        if (cap.theta - spec.theta).abs() > 1e-14 {
            return Err(CapflowError::Config("cap angle differs from grid angle".into()));
        }
        Self::from_fn(spec, |b, _| cap_graph_u(cap, b.min(FRAC_PI_2)))
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.spec.row_len() + j]
    }

    /// Replaces the pole row by its mean.
    pub fn enforce_pole(&mut self) {
        let m = self.spec.row_len();
        let mean = self.u[..m].iter().sum::<f64>() / m as f64;
        self.u[..m].iter_mut().for_each(|v| *v = mean);
    }

    /// Values with ghost rows at i = -1 and i = n_beta + 1.
    pub(crate) fn extended(&self, fd: Option<&FourierDiff>) -> Extended {
        let s = &self.spec;
        let m = s.row_len();
        let nb = s.n_beta;
        let mut rows = vec![0.0; (nb + 3) * m];
        rows[m..m * (nb + 2)].copy_from_slice(&self.u);
        // Pole: reflection through the axis.
        for j in 0..m {
            rows[j] = self.at(1, (j + m / 2) % m);
        }
        // Boundary: third-order one-sided derivative matched to the contact condition.
        let cot = s.cot_theta();
        let h = s.h();
        let uxi = match (s.mode, fd) {
            (GridMode::Full2d, Some(fd)) => fd.d1(&self.u[nb * m..(nb + 1) * m]),
            _ => vec![0.0; m],
        };
        for j in 0..m {
            let g = -cot * (1.0 + uxi[j] * uxi[j]).sqrt();
            let un = self.at(nb, j);
            let um1 = self.at(nb - 1, j);
            let um2 = self.at(nb - 2, j);
            rows[(nb + 2) * m + j] = 3.0 * h * g - 1.5 * un + 3.0 * um1 - 0.5 * um2;
        }
        Extended { m, rows }
    }
}

/// Grid values with one ghost row on each side.
#[derive(Debug, Clone)]
pub(crate) struct Extended {
    m: usize,
    rows: Vec<f64>,
}

impl Extended {
    #[inline]
    pub fn get(&self, i: isize, j: usize) -> f64 {
        self.rows[(i + 1) as usize * self.m + j]
    }

    pub fn row(&self, i: isize) -> &[f64] {
        let s = (i + 1) as usize * self.m;
        &self.rows[s..s + self.m]
    }
}

/// Trapezoid weight of node i on [0, π/2].
pub(crate) fn trapezoid(spec: &GridSpec, i: usize) -> f64 {
    if i == 0 || i == spec.n_beta {
        0.5 * spec.h()
    } else {
        spec.h()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridSpec::axisymmetric(1, 100, 1.0).validate().is_err());
        assert!(GridSpec::full2d(50, 12, 1.0).validate().is_err());
        assert!(GridSpec::full2d(50, 16, 1.0).validate().is_ok());
        let s = GridSpec::axisymmetric(3, 100, 1.0);
        assert!(HalfSphereGrid::new(s, vec![0.0; 7]).is_err());
    }

    #[test]
    fn ghosts_reproduce_cubic_slope() {
        // u = a (β - π/2)^3 + g (β - π/2) has slope g at the rim; the
        // third-order ghost is exact for cubics.
        let theta = 1.2;
        let spec = GridSpec::axisymmetric(2, 40, theta);
        let g = -spec.cot_theta();
        let f = |b: f64| 0.3 * (b - FRAC_PI_2).powi(3) + g * (b - FRAC_PI_2) + 0.1;
        let grid = HalfSphereGrid::from_fn(spec, |b, _| Ok(f(b))).unwrap();
        let ext = grid.extended(None);
        let nb = spec.n_beta as isize;
        assert!((ext.get(nb + 1, 0) - f(spec.beta(nb + 1))).abs() < 1e-14);
        assert_eq!(ext.get(-1, 0), grid.at(1, 0));
    }
}
