//! The Möbius map between the unit ball and the upper half-space, polar
//! coordinates on the half-space, and the radial-graph images of capillary
//! caps.
//!
//! Points live in R^{n+1} and are passed as slices; the last coordinate is the
//! axis direction `e`. The map sends `e` to infinity, the unit sphere to the
//! boundary hyperplane `y_{n+1} = 0` and the origin to `(0, 1)`.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{domain, CapflowError, Result};

/// Closest allowed approach to the pole `e`.
pub const POLE_TOL: f64 = 1e-8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// φ(x) = (2x', 1 - |x|²) / |x - e|².
pub fn ball_to_halfspace(x: &[f64]) -> Result<Vec<f64>> {
    let m = x.len();
    if m < 2 {
        return domain("points need at least two coordinates");
    }
    let r2 = dot(x, x);
    if r2 > 1.0 + 1e-12 {
        return domain(format!("|x| = {} exceeds 1", r2.sqrt()));
    }
    let last = x[m - 1] - 1.0;
    let d2 = r2 - x[m - 1] * x[m - 1] + last * last;
    if d2.sqrt() < POLE_TOL {
        return Err(CapflowError::Pole { distance: d2.sqrt() });
    }
    let mut y: Vec<f64> = x[..m - 1].iter().map(|v| 2.0 * v / d2).collect();
    y.push((1.0 - r2).max(0.0) / d2);
    Ok(y)
}

fn halfspace_denominator(y: &[f64]) -> f64 {
    let m = y.len();
    let p = y[m - 1] + 1.0;
    dot(&y[..m - 1], &y[..m - 1]) + p * p
}

/// φ⁻¹(y) = (2y', |y|² - 1) / (|y'|² + (y_{n+1} + 1)²).
pub fn halfspace_to_ball(y: &[f64]) -> Result<Vec<f64>> {
    let m = y.len();
    if m < 2 {
        return domain("points need at least two coordinates");
    }
    if y[m - 1] < -1e-12 || y.iter().any(|v| !v.is_finite()) {
        return domain(format!("{y:?} is not in the closed upper half-space"));
    }
    let d = halfspace_denominator(y);
    let mut x: Vec<f64> = y[..m - 1].iter().map(|v| 2.0 * v / d).collect();
    x.push((dot(y, y) - 1.0) / d);
    Ok(x)
}

/// Stretch |φ_* ν| = (|y'|² + (y_{n+1} + 1)²) / 2 of unit vectors carried from
/// the ball to the half-space; its reciprocal is the conformal factor of the
/// ball metric in half-space coordinates. Equals 1/2 at the origin and 1 on
/// the unit sphere of the boundary hyperplane.
pub fn conformal_factor(y: &[f64]) -> Result<f64> {
    let m = y.len();
    if m < 2 || y[m - 1] < -1e-12 {
        return domain("conformal factor needs a point of the closed upper half-space");
    }
    Ok(halfspace_denominator(y) / 2.0)
}

/// Differential of φ⁻¹ at `y` applied to `w`.
pub fn pushforward_to_ball(y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let m = y.len();
    if w.len() != m {
        return domain("vector and point dimensions differ");
    }
    let d = halfspace_denominator(y);
    let x = halfspace_to_ball(y)?;
    let dd = 2.0 * dot(&y[..m - 1], &w[..m - 1]) + 2.0 * (y[m - 1] + 1.0) * w[m - 1];
    let mut out: Vec<f64> = (0..m - 1).map(|i| 2.0 * w[i] / d - x[i] * dd / d).collect();
    out.push(2.0 * dot(y, w) / d - x[m - 1] * dd / d);
    Ok(out)
}

/// Spherical coordinates around the axis: y = ρ (sin β ξ, cos β).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCoords {
    pub rho: f64,
    pub beta: f64,
    /// Unit vector in R^n.
    pub xi: Vec<f64>,
}

impl PolarCoords {
    pub fn to_cartesian(&self) -> Vec<f64> {
        let (s, c) = self.beta.sin_cos();
        let mut y: Vec<f64> = self.xi.iter().map(|v| self.rho * s * v).collect();
        y.push(self.rho * c);
        y
    }

    /// Inverse of [`to_cartesian`](Self::to_cartesian); on the axis ξ = e_1.
    pub fn from_cartesian(y: &[f64]) -> Result<Self> {
        let m = y.len();
        if m < 2 {
            return domain("points need at least two coordinates");
        }
        let rho = dot(y, y).sqrt();
        let rp = dot(&y[..m - 1], &y[..m - 1]).sqrt();
        let beta = rp.atan2(y[m - 1]);
        let xi = if rp > 0.0 {
            y[..m - 1].iter().map(|v| v / rp).collect()
        } else {
            let mut e1 = vec![0.0; m - 1];
            e1[0] = 1.0;
            e1
        };
        Ok(Self { rho, beta, xi })
    }
}

/// Radius of a spherical cap; `Infinite` is the flat ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapRadius {
    Finite(f64),
    Infinite,
}

impl CapRadius {
    pub fn as_f64(&self) -> f64 {
        match self {
            CapRadius::Finite(r) => *r,
            CapRadius::Infinite => f64::INFINITY,
        }
    }

    pub fn from_f64(r: f64) -> Self {
        if r.is_infinite() {
            CapRadius::Infinite
        } else {
            CapRadius::Finite(r)
        }
    }
}

impl Serialize for CapRadius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CapRadius::Finite(r) => s.serialize_f64(*r),
            CapRadius::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CapRadius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = CapRadius;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<CapRadius, E> {
                Ok(CapRadius::from_f64(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CapRadius, E> {
                Ok(CapRadius::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CapRadius, E> {
                Ok(CapRadius::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CapRadius, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" | "+inf" => Ok(CapRadius::Infinite),
                    _ => v.parse::<f64>().map(CapRadius::from_f64).map_err(E::custom),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// The capillary cap C_{θ,r}: the part inside the ball of the sphere of
/// radius r centred at √(r² + 2r cos θ + 1) e, meeting the unit sphere at
/// angle θ. For r = ∞ it is the flat ball {x_{n+1} = cos θ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub theta: f64,
    pub radius: CapRadius,
}

/// Image of a cap under φ: the sphere |y - m e| = R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapImage {
    pub center: f64,
    pub radius: f64,
}

/// cos θ with θ = π/2 snapped to exactly zero.
pub fn cos_theta(theta: f64) -> f64 {
    if (theta - FRAC_PI_2).abs() < 1e-15 {
        0.0
    } else {
        theta.cos()
    }
}

impl CapSpec {
    pub fn new(theta: f64, radius: f64) -> Result<Self> {
        let s = Self {
            theta,
            radius: CapRadius::from_f64(radius),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < std::f64::consts::PI) {
            return domain(format!("contact angle {} outside (0, π)", self.theta));
        }
        if let CapRadius::Finite(r) = self.radius {
            if !(r > 0.0) || !r.is_finite() {
                return domain(format!("cap radius {r} must be positive"));
            }
        }
        Ok(())
    }

    /// Height of the cap's apex on the axis.
    pub fn apex_height(&self) -> f64 {
        let c = cos_theta(self.theta);
        match self.radius {
            CapRadius::Infinite => c,
            CapRadius::Finite(r) => (r * r + 2.0 * r * c + 1.0).sqrt() - r,
        }
    }

    pub fn image(&self) -> Result<CapImage> {
        self.validate()?;
        let c = cos_theta(self.theta);
        let p1 = |a: f64| (1.0 + a) / (1.0 - a);
        match self.radius {
            CapRadius::Infinite => Ok(CapImage {
                center: c / (1.0 - c),
                radius: 1.0 / (1.0 - c),
            }),
            CapRadius::Finite(r) => {
                let cd = (r * r + 2.0 * r * c + 1.0).sqrt();
                let a1 = cd - r;
                let a2 = cd + r;
                let (q1, q2) = (p1(a1), p1(a2));
                Ok(CapImage {
                    center: 0.5 * (q1 + q2),
                    radius: 0.5 * (q1 - q2).abs(),
                })
            }
        }
    }
}

impl CapImage {
    /// ρ(β) = m cos β + √(R² - m² sin² β).
    pub fn rho(&self, beta: f64) -> f64 {
        let (s, c) = beta.sin_cos();
        let m = self.center;
        self.center * c + (self.radius * self.radius - m * m * s * s).sqrt()
    }

    /// dρ/dβ.
    pub fn rho_beta(&self, beta: f64) -> f64 {
        let (s, c) = beta.sin_cos();
        let m = self.center;
        let q = (self.radius * self.radius - m * m * s * s).sqrt();
        -m * s - m * m * s * c / q
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(-1e-14..=FRAC_PI_2 + 1e-14).contains(&beta) {
        return domain(format!("polar angle {beta} outside [0, π/2]"));
    }
    Ok(())
}

/// u = log ρ of the cap image as a radial graph over the upper hemisphere.
pub fn cap_graph_u(spec: &CapSpec, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(spec.image()?.rho(beta).ln())
}

/// Point of the cap above the direction `z` of the closed upper hemisphere.
pub fn cap_embedding(spec: &CapSpec, z: &[f64]) -> Result<Vec<f64>> {
    let m = z.len();
    let nz = dot(z, z).sqrt();
    if m < 2 || (nz - 1.0).abs() > 1e-12 {
        return domain("direction must be a unit vector");
    }
    let beta = dot(&z[..m - 1], &z[..m - 1]).sqrt().atan2(z[m - 1]);
    check_beta(beta)?;
    let rho = spec.image()?.rho(beta);
    let y: Vec<f64> = z.iter().map(|v| rho * v).collect();
    halfspace_to_ball(&y)
}
