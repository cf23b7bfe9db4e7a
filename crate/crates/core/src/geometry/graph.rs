//! Second kernel: curvatures of the flat radial graph y = e^u z, carried to
//! the ball through the conformal change of metric.

use super::fields::reduced_eigen2;
use super::{FourierDiff, GridMode, HalfSphereGrid, Principal};
use crate::error::Result;

/// Principal curvatures per node, in the node order of
/// [`SurfaceFields::nodes`](super::SurfaceFields).
#[derive(Debug, Clone)]
pub struct GraphCurvature {
    pub kappa: Vec<Principal>,
}

/// Ball curvature from the flat one: κ = (D/2)(∂_N ω - κ̃), with N = -ν̃ the
/// inward graph normal and ∇ω = -2(y', y_{n+1} + 1)/D.
fn to_ball(y: [f64; 3], inward: [f64; 3], flat: (f64, f64)) -> Principal {
    let d = y[0] * y[0] + y[1] * y[1] + (y[2] + 1.0) * (y[2] + 1.0);
    let grad = [-2.0 * y[0] / d, -2.0 * y[1] / d, -2.0 * (y[2] + 1.0) / d];
    let dn = grad[0] * inward[0] + grad[1] * inward[1] + grad[2] * inward[2];
    Principal {
        a: 0.5 * d * (dn - flat.0),
        b: 0.5 * d * (dn - flat.1),
    }
}

pub fn conformal_graph_kernel(grid: &HalfSphereGrid) -> Result<GraphCurvature> {
    let s = grid.spec;
    s.validate()?;
    let h = s.h();
    let nb = s.n_beta as isize;
    match s.mode {
        GridMode::Axisymmetric => {
            let ext = grid.extended(None);
            let kappa = (0..=nb)
                .map(|i| {
                    let (um, u, up) = (ext.get(i - 1, 0), ext.get(i, 0), ext.get(i + 1, 0));
                    let ub = (up - um) / (2.0 * h);
                    let ubb = (up - 2.0 * u + um) / (h * h);
                    let v2 = 1.0 + ub * ub;
                    let v = v2.sqrt();
                    let eu = (-u).exp();
                    let beta = s.beta(i);
                    let (sb, cb) = beta.sin_cos();
                    let kb = eu * (v2 - ubb) / (v2 * v);
                    let kr = if i == 0 { kb } else { eu * (1.0 - cb / sb * ub) / v };
                    let rho = u.exp();
                    let y = [rho * sb, 0.0, rho * cb];
                    let inward = [-(sb - ub * cb) / v, 0.0, -(cb + ub * sb) / v];
                    to_ball(y, inward, (kb, kr))
                })
                .collect();
            Ok(GraphCurvature { kappa })
        }
        GridMode::Full2d => {
            let m = s.n_xi;
            let fd = FourierDiff::new(m);
            let ext = grid.extended(Some(&fd));
            let mut kappa = Vec::with_capacity(grid.u.len());

            let u0 = ext.get(0, 0);
            let r1 = ext.row(1);
            let (e, nn, w, so) = (0, m / 4, m / 2, 3 * m / 4);
            let ux = (r1[e] - r1[w]) / (2.0 * h);
            let uy = (r1[nn] - r1[so]) / (2.0 * h);
            let uxx = (r1[e] - 2.0 * u0 + r1[w]) / (h * h);
            let uyy = (r1[nn] - 2.0 * u0 + r1[so]) / (h * h);
            let uxy = (r1[m / 8] - r1[3 * m / 8] + r1[5 * m / 8] - r1[7 * m / 8]) / (2.0 * h * h);
            let b = [1.0 + ux * ux, ux * uy, 1.0 + uy * uy];
            let (m1, m2) = reduced_eigen2(b, [uxx, uxy, uyy])?;
            let v = (1.0 + ux * ux + uy * uy).sqrt();
            let eu = (-u0).exp();
            let pole = to_ball(
                [0.0, 0.0, u0.exp()],
                [ux / v, uy / v, -1.0 / v],
                (eu * (1.0 - m1) / v, eu * (1.0 - m2) / v),
            );
            kappa.extend(std::iter::repeat(pole).take(m));

            for i in 1..=nb {
                let row = ext.row(i);
                let ubr: Vec<f64> = (0..m)
                    .map(|j| (ext.get(i + 1, j) - ext.get(i - 1, j)) / (2.0 * h))
                    .collect();
                let uxr = fd.d1(row);
                let uxxr = fd.d2(row);
                let ubxr = fd.d1(&ubr);
                let (sb, cb) = s.beta(i).sin_cos();
                for j in 0..m {
                    let u = row[j];
                    let ub = ubr[j];
                    let ubb = (ext.get(i + 1, j) - 2.0 * u + ext.get(i - 1, j)) / (h * h);
                    let ux = uxr[j];
                    let bm = [1.0 + ub * ub, ub * ux, sb * sb + ux * ux];
                    let hm = [ubb, ubxr[j] - cb / sb * ux, uxxr[j] + sb * cb * ub];
                    let (m1, m2) = reduced_eigen2(bm, hm)?;
                    let v = (1.0 + ub * ub + ux * ux / (sb * sb)).sqrt();
                    let eu = (-u).exp();
                    let (sx, cx) = s.xi(j).sin_cos();
                    let z = [sb * cx, sb * sx, cb];
                    let eb = [cb * cx, cb * sx, -sb];
                    let ex = [-sx, cx, 0.0];
                    let g = ux / sb;
                    let inward = [
                        -(z[0] - ub * eb[0] - g * ex[0]) / v,
                        -(z[1] - ub * eb[1] - g * ex[1]) / v,
                        -(z[2] - ub * eb[2] - g * ex[2]) / v,
                    ];
                    let rho = u.exp();
                    kappa.push(to_ball(
                        [rho * z[0], rho * z[1], rho * z[2]],
                        inward,
                        (eu * (1.0 - m1) / v, eu * (1.0 - m2) / v),
                    ));
                }
            }
            Ok(GraphCurvature { kappa })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use crate::mobius::CapSpec;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn orthogonal_cap_is_exact() {
        // u is constant for θ = π/2 caps, so differencing is exact here.
        let spec = GridSpec::axisymmetric(2, 50, FRAC_PI_2);
        let cap = CapSpec::new(FRAC_PI_2, 1.0).unwrap();
        let g = conformal_graph_kernel(&HalfSphereGrid::from_cap(spec, &cap).unwrap()).unwrap();
        for p in &g.kappa {
            assert!((p.a - 1.0).abs() < 1e-11 && (p.b - 1.0).abs() < 1e-11);
        }
    }
}
