use super::{GridMode, HalfSphereGrid};
use crate::error::{CapflowError, Result};

/// Meridian (r, h) of a rotationally symmetric surface, from the axis to the
/// boundary, sampled at equal parameter steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    /// Optional extra node past the boundary for central differences there.
    pub ghost: Option<(f64, f64)>,
}

impl Profile {
    /// Profile of an axisymmetric grid, ghost node included.
    pub fn from_grid(grid: &HalfSphereGrid) -> Result<Self> {
        if grid.spec.mode != GridMode::Axisymmetric {
            return Err(CapflowError::Config("profiles need an axisymmetric grid".into()));
        }
        let s = grid.spec;
        let ext = grid.extended(None);
        let point = |i: isize| {
            let rho = ext.get(i, 0).exp();
            let (sb, cb) = s.beta(i).sin_cos();
            let d = rho * rho + 2.0 * rho * cb + 1.0;
            (2.0 * rho * sb / d, (rho * rho - 1.0) / d)
        };
        let (r, h) = (0..=s.n_beta as isize).map(point).unzip();
        Ok(Self {
            r,
            h,
            ghost: Some(point(s.n_beta as isize + 1)),
        })
    }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Profile and rotational curvatures (κ_p, κ_rot) from arclength formulas,
/// κ_p = (r'h'' - h'r'')/L³ and κ_rot = h'/(L r), normal (h', -r')/L.
pub fn profile_curvatures(p: &Profile) -> Result<Vec<(f64, f64)>> {
    let n = p.r.len();
    if n < 4 || p.h.len() != n {
        return Err(CapflowError::Config("profile needs at least 4 nodes of (r, h)".into()));
    }
    let pts: Vec<(f64, f64)> = p.r.iter().copied().zip(p.h.iter().copied()).collect();
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return Err(CapflowError::MeshQuality(format!(
                    "profile self-intersects between segments {i} and {j}"
                )));
            }
        }
    }
    let at = |i: isize| -> (f64, f64) {
        if i < 0 {
            (-pts[(-i) as usize].0, pts[(-i) as usize].1)
        } else if (i as usize) < n {
            pts[i as usize]
        } else {
            p.ghost.expect("ghost requested without one")
        }
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n as isize {
        let (d1, d2) = if (i as usize) < n - 1 || p.ghost.is_some() {
            let (a, b, c) = (at(i - 1), at(i), at(i + 1));
            (
                (0.5 * (c.0 - a.0), 0.5 * (c.1 - a.1)),
                (c.0 - 2.0 * b.0 + a.0, c.1 - 2.0 * b.1 + a.1),
            )
        } else {
            let (a, b, c, d) = (at(i - 3), at(i - 2), at(i - 1), at(i));
            (
                (0.5 * (3.0 * d.0 - 4.0 * c.0 + b.0), 0.5 * (3.0 * d.1 - 4.0 * c.1 + b.1)),
                (
                    2.0 * d.0 - 5.0 * c.0 + 4.0 * b.0 - a.0,
                    2.0 * d.1 - 5.0 * c.1 + 4.0 * b.1 - a.1,
                ),
            )
        };
        let l = d1.0.hypot(d1.1);
        if !(l > 1e-14) {
            return Err(CapflowError::MeshQuality(format!("profile degenerates at node {i}")));
        }
        let kp = (d1.0 * d2.1 - d1.1 * d2.0) / (l * l * l);
        let kr = if i == 0 { kp } else { d1.1 / (l * pts[i as usize].0) };
        out.push((kp, kr));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_arc() {
        // Lower arc of the unit circle centred at (0, 1): curvature 1.
        let n = 200;
        let t: Vec<f64> = (0..n).map(|i| 1.2 * i as f64 / (n - 1) as f64).collect();
        let p = Profile {
            r: t.iter().map(|s| s.sin()).collect(),
            h: t.iter().map(|s| 1.0 - s.cos()).collect(),
            ghost: None,
        };
        for (kp, kr) in profile_curvatures(&p).unwrap() {
            assert!((kp - 1.0).abs() < 1e-3 && (kr - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn self_intersection_rejected() {
        let p = Profile {
            r: vec![0.0, 1.0, 1.0, 0.5, 0.5, 2.0],
            h: vec![0.0, 0.0, 1.0, 1.0, -1.0, -1.0],
            ghost: None,
        };
        assert!(matches!(profile_curvatures(&p), Err(CapflowError::MeshQuality(_))));
    }
}
