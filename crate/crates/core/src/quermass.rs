//! Quermassintegrals of the enclosed domain and of the boundary body in the
//! sphere, and reference tables for the cap family.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CapflowError, Result};
use crate::geometry::{fundamental_forms, sine_power_integral, GridSpec, HalfSphereGrid, SurfaceFields};
use crate::mobius::{cos_theta, CapRadius, CapSpec};
use crate::symfunc::{binomial, double_factorial, sphere_area};
use num_traits::ToPrimitive;

/// W_{0,θ}..W_{n+1,θ} together with the parts they are assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuermassVector {
    pub n: usize,
    pub theta: f64,
    pub w_theta: Vec<f64>,
    /// W_0..W_n of the boundary body in the sphere.
    pub w_sphere: Vec<f64>,
    /// ∫ E_k dA, k = 0..=n.
    pub curvature_integrals: Vec<f64>,
    /// ∫_{∂Σ} E_j ds over ∂Σ in the sphere, j = 0..n-1.
    pub boundary_integrals: Vec<f64>,
    /// ∫ ⟨x, ν⟩ dA.
    pub support_integral: f64,
}

impl QuermassVector {
    pub fn w(&self, k: usize) -> f64 {
        self.w_theta[k]
    }

    pub fn area(&self) -> f64 {
        self.curvature_integrals[0]
    }
}

/// ∫ E_k dA.
pub fn curvature_integral(fields: &SurfaceFields, k: usize) -> Result<f64> {
    let n = fields.n();
    if k > n {
        return Err(CapflowError::Domain(format!("E_{k} undefined for n = {n}")));
    }
    Ok(fields.integrate(|p| p.kappa.e(n, k)))
}

/// |Σ̂| by the divergence theorem over Σ and the spherical boundary piece.
pub fn enclosed_volume(fields: &SurfaceFields) -> f64 {
    let n = fields.n();
    (fields.integrate(|p| p.support()) + fields.boundary.region_area) / (n + 1) as f64
}

pub fn sphere_region_area(fields: &SurfaceFields) -> f64 {
    fields.boundary.region_area
}

/// W_0..W_n of a body in S^n from its area and ∫ E_j ds, j = 0..n-1.
pub fn sphere_quermass(n: usize, region_area: f64, boundary_integrals: &[f64]) -> Result<Vec<f64>> {
    if boundary_integrals.len() < n {
        return Err(CapflowError::Domain(format!(
            "need {n} boundary integrals, got {}",
            boundary_integrals.len()
        )));
    }
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    w[0] = region_area;
    w[1] = boundary_integrals[0] / nf;
    for k in 2..=n {
        w[k] = boundary_integrals[k - 1] / nf + (k - 1) as f64 / (n - k + 2) as f64 * w[k - 2];
    }
    Ok(w)
}

/// Closed-form W_0..W_n of the geodesic ball of radius ρ about a point of S^n.
pub fn geodesic_ball_quermass(n: usize, rho: f64) -> Vec<f64> {
    let omega = sphere_area(n - 1);
    let (s, c) = rho.sin_cos();
    let length = omega * s.powi(n as i32 - 1);
    let hat = c / s;
    let bi: Vec<f64> = (0..n).map(|j| length * hat.powi(j as i32)).collect();
    let area = omega * sine_power_integral(n - 1, rho);
    sphere_quermass(n, area, &bi).expect("sizes match")
}

/// W_{2k-1} of a hemisphere of S^n: (ω_{n-1}/n) (2k-2)!! (n-2k+1)!! / (n-1)!!.
pub fn hemisphere_odd_quermass(n: usize, k: usize) -> Result<f64> {
    if k == 0 || 2 * k - 1 > n {
        return Err(CapflowError::Domain(format!("need 1 <= 2k-1 <= n, got n = {n}, k = {k}")));
    }
    let num = double_factorial(2 * k as i64 - 2) * double_factorial(n as i64 - 2 * k as i64 + 1);
    let ratio = num.to_f64().unwrap() / double_factorial(n as i64 - 1).to_f64().unwrap();
    Ok(sphere_area(n - 1) / n as f64 * ratio)
}

/// Exact W_0..W_{n+1} of the free-boundary flat disk through the origin.
pub fn flat_disk_quermass(n: usize) -> Vec<f64> {
    let ws = geodesic_ball_quermass(n, std::f64::consts::FRAC_PI_2);
    let nf = n as f64;
    let mut w = vec![sphere_area(n) / (2.0 * (nf + 1.0)), sphere_area(n - 1) / (nf * (nf + 1.0))];
    for k in 1..=n {
        w.push(k as f64 / (n - k + 1) as f64 * ws[k - 1] / (nf + 1.0));
    }
    w
}

/// W_{k+1,θ} from ∫ E_k and the sphere quermassintegrals, 0 <= k <= n.
fn assemble_one(n: usize, theta: f64, k: usize, int_ek: f64, ws: &[f64]) -> f64 {
    let c = cos_theta(theta);
    let s = theta.sin();
    let nf = n as f64;
    let mut corr = c * s.powi(k as i32) * ws[k];
    for l in 0..k {
        let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
        let bracket = (n - k) as f64 * c * c + (k - l) as f64;
        corr += sign / (nf - l as f64)
            * binomial(k, l)
            * bracket
            * c.powi((k - 1 - l) as i32)
            * s.powi(l as i32)
            * ws[l];
    }
    (int_ek - corr) / (nf + 1.0)
}

/// Fills W_{0,θ}..W_{n+1,θ}.
pub fn assemble_w(fields: &SurfaceFields) -> Result<QuermassVector> {
    let n = fields.n();
    let theta = fields.spec.theta;
    let ci = fields.curvature_integrals();
    let bi = fields.boundary.sphere_integrals.clone();
    let ws = sphere_quermass(n, fields.boundary.region_area, &bi)?;
    let support = fields.integrate(|p| p.support());
    let mut w = Vec::with_capacity(n + 2);
    w.push((support + fields.boundary.region_area) / (n + 1) as f64);
    for k in 0..=n {
        w.push(assemble_one(n, theta, k, ci[k], &ws));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(CapflowError::Numerical("non-finite quermassintegral".into()));
    }
    Ok(QuermassVector {
        n,
        theta,
        w_theta: w,
        w_sphere: ws,
        curvature_integrals: ci,
        boundary_integrals: bi,
        support_integral: support,
    })
}

/// Free-boundary form W_{k+1} = (∫E_k + k/(n-k+1) W_{k-1}^S)/(n+1), k = 0..=n.
pub fn free_boundary_w(q: &QuermassVector) -> Vec<f64> {
    let n = q.n;
    (0..=n)
        .map(|k| {
            let extra = if k == 0 {
                0.0
            } else {
                k as f64 / (n - k + 1) as f64 * q.w_sphere[k - 1]
            };
            (q.curvature_integrals[k] + extra) / (n + 1) as f64
        })
        .collect()
}

/// Quermassintegrals of the discretized cap C_{θ,r}.
pub fn cap_quermass(n: usize, theta: f64, r: CapRadius, n_beta: usize) -> Result<QuermassVector> {
    let spec = GridSpec::axisymmetric(n, n_beta, theta);
    let cap = CapSpec { theta, radius: r };
    cap.validate()?;
    let grid = HalfSphereGrid::from_cap(spec, &cap)?;
    assemble_w(&fundamental_forms(&grid)?)
}

/// Tabulated W_{k,θ} along the cap family, with pipeline-backed inverses.
#[derive(Debug, Clone, Serialize)]
pub struct CapTable {
    pub n: usize,
    pub theta: f64,
    pub n_beta: usize,
    pub radii: Vec<CapRadius>,
    /// values[i][k] = W_{k,θ}(C_{θ, radii[i]}), k = 0..=n+1.
    pub values: Vec<Vec<f64>>,
    /// Whether column k increases strictly along `radii`. On coarse grids
    /// W_n can flatten below the discretization error near r = ∞.
    pub monotone: Vec<bool>,
}

/// Smallest radius in the default table.
pub const TABLE_R_MIN: f64 = 0.1;
pub const TABLE_R_MAX: f64 = 50.0;

impl CapTable {
    /// 64 log-spaced radii in [0.1, 50] and r = ∞.
    pub fn default_radii() -> Vec<CapRadius> {
        let (a, b) = (TABLE_R_MIN.ln(), TABLE_R_MAX.ln());
        let mut r: Vec<CapRadius> = (0..64)
            .map(|i| CapRadius::Finite((a + (b - a) * i as f64 / 63.0).exp()))
            .collect();
        r.push(CapRadius::Infinite);
        r
    }

    pub fn build(n: usize, theta: f64, n_beta: usize, radii: Vec<CapRadius>) -> Result<Self> {
        if radii.len() < 2 {
            return Err(CapflowError::Config("cap table needs at least two radii".into()));
        }
        for w in radii.windows(2) {
            if !(w[0].as_f64() < w[1].as_f64()) {
                return Err(CapflowError::Config("cap radii must be strictly increasing".into()));
            }
        }
        let values: Vec<Vec<f64>> = radii
            .par_iter()
            .map(|r| cap_quermass(n, theta, *r, n_beta).map(|q| q.w_theta))
            .collect::<Result<_>>()?;
        let monotone = (0..=n + 1)
            .map(|k| values.windows(2).all(|w| w[1][k] > w[0][k]))
            .collect();
        Ok(Self {
            n,
            theta,
            n_beta,
            radii,
            values,
            monotone,
        })
    }

    /// f_k(r) through the full pipeline.
    pub fn f(&self, k: usize, r: CapRadius) -> Result<f64> {
        self.check_k(k)?;
        Ok(cap_quermass(self.n, self.theta, r, self.n_beta)?.w(k))
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.n + 1 {
            return Err(CapflowError::Domain(format!("no W_{k} for n = {}", self.n)));
        }
        Ok(())
    }

    /// f_k⁻¹(w): bracket in the table, then bisect in s = 1/r to 1e-10.
    pub fn inverse(&self, k: usize, w: f64) -> Result<CapRadius> {
        self.check_k(k)?;
        if k > self.n {
            return Err(CapflowError::Domain(format!("W_{k} is constant along caps")));
        }
        if !self.monotone[k] {
            return Err(CapflowError::Numerical(format!(
                "W_{k} is not strictly increasing on this table; refine n_beta"
            )));
        }
        let col: Vec<f64> = self.values.iter().map(|v| v[k]).collect();
        let last = col.len() - 1;
        if !(w >= col[0] && w <= col[last]) {
            return Err(CapflowError::Range(format!(
                "W_{k} = {w} outside [{}, {}]",
                col[0], col[last]
            )));
        }
        let i = col.partition_point(|&c| c < w).clamp(1, last);
        if col[i] == w {
            return Ok(self.radii[i]);
        }
        let mut s_small = 1.0 / self.radii[i].as_f64(); // larger r
        let mut s_large = 1.0 / self.radii[i - 1].as_f64();
        while s_large - s_small > 1e-10 * s_large.max(1.0) {
            let mid = 0.5 * (s_small + s_large);
            let fm = self.f(k, CapRadius::from_f64(1.0 / mid))?;
            if fm < w {
                s_large = mid;
            } else {
                s_small = mid;
            }
        }
        Ok(CapRadius::from_f64(2.0 / (s_small + s_large)))
    }

    /// f_j(f_k⁻¹(w)).
    pub fn compose(&self, j: usize, k: usize, w: f64) -> Result<f64> {
        let r = self.inverse(k, w)?;
        self.f(j, r)
    }

    /// CSV with columns r, f_k for the requested k.
    pub fn to_csv(&self, ks: &[usize]) -> Result<String> {
        for &k in ks {
            self.check_k(k)?;
        }
        let mut out = String::from("r");
        for k in ks {
            out.push_str(&format!(",f_{k}"));
        }
        out.push('\n');
        for (r, vals) in self.radii.iter().zip(&self.values) {
            match r {
                CapRadius::Infinite => out.push_str("inf"),
                CapRadius::Finite(x) => out.push_str(&crate::io::fmt_f64(*x)),
            }
            for &k in ks {
                out.push(',');
                out.push_str(&crate::io::fmt_f64(vals[k]));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn geodesic_circle_w2_is_pi() {
        for rho in [0.2, 1.0, 2.5] {
            let w = geodesic_ball_quermass(2, rho);
            assert!((w[2] - PI).abs() < 1e-13);
        }
    }

    #[test]
    fn hemisphere_recursion_agrees() {
        for n in 1..=7 {
            let w = geodesic_ball_quermass(n, FRAC_PI_2);
            for k in 1..=(n + 1) / 2 {
                let closed = hemisphere_odd_quermass(n, k).unwrap();
                assert!((w[2 * k - 1] - closed).abs() < 1e-12, "n={n} k={k}");
            }
        }
        assert!((hemisphere_odd_quermass(3, 1).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_flat_disk_limits() {
        let w = flat_disk_quermass(3);
        assert!((w[1] - PI / 3.0).abs() < 1e-14);
        assert!((w[3] - PI / 3.0).abs() < 1e-14);
        let num = cap_quermass(3, FRAC_PI_2, CapRadius::Infinite, 200).unwrap();
        for k in 0..=4 {
            assert!((num.w(k) - w[k]).abs() < 1e-3, "k={k}");
        }
    }

    #[test]
    fn flat_disk_values() {
        let q = cap_quermass(3, FRAC_PI_2, CapRadius::Infinite, 64).unwrap();
        // quadrature is second order; W_3 only sees the exact boundary terms
        assert!((q.w(1) - PI / 3.0).abs() < 1e-3);
        assert!((q.w(3) - PI / 3.0).abs() < 1e-12);
        let fb = free_boundary_w(&q);
        for k in 0..=3 {
            assert!((fb[k] - q.w(k + 1)).abs() < 1e-14);
        }
    }
}
