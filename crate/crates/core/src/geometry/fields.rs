//! First kernel: the ball surface X = φ⁻¹(e^u z) is built node by node, its
//! tangent frame and second derivatives are differenced on the grid, and
//! principal curvatures come from the reduced shape operator.

use std::f64::consts::PI;

use super::{trapezoid, FourierDiff, GridMode, GridSpec, HalfSphereGrid};
use crate::error::{CapflowError, Result};
use crate::mobius::cos_theta;
use crate::symfunc::{sphere_area, CurvatureSpec, CONE_TOL};

/// Principal curvatures at a node: `a` once and `b` with multiplicity n-1.
/// For axisymmetric surfaces `a` is the profile curvature and `b` the
/// rotational one; for n = 2 they are simply the two curvatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Principal {
    pub a: f64,
    pub b: f64,
}

impl Principal {
    pub fn min(&self) -> f64 {
        self.a.min(self.b)
    }

    pub fn max(&self) -> f64 {
        self.a.max(self.b)
    }

    /// Full ascending list of n principal curvatures.
    pub fn values(&self, n: usize) -> Vec<f64> {
        let mut v = vec![self.b; n];
        v[0] = self.a;
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    }

    /// Normalized E_k = ((n-k)/n) b^k + (k/n) a b^{k-1}.
    pub fn e(&self, n: usize, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let nf = n as f64;
        let kf = k as f64;
        (nf - kf) / nf * self.b.powi(k as i32) + kf / nf * self.a * self.b.powi(k as i32 - 1)
    }

    pub fn e_all(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.e(n, k)).collect()
    }

    /// Unnormalized mean curvature H = Σ κ_i.
    pub fn mean_sum(&self, n: usize) -> f64 {
        self.a + (n - 1) as f64 * self.b
    }

    pub fn admissible(&self, spec: &CurvatureSpec, n: usize) -> bool {
        let scale = 1.0f64.max(self.a.abs()).max(self.b.abs());
        if spec.k == 1 && spec.l == 0 {
            self.e(n, 1) > CONE_TOL * scale
        } else {
            self.min() > CONE_TOL * scale
        }
    }

    /// F at this node, `None` outside the admissible cone.
    pub fn curvature_function(&self, spec: &CurvatureSpec, n: usize) -> Option<f64> {
        if !self.admissible(spec, n) {
            return None;
        }
        let ek = self.e(n, spec.k);
        let el = self.e(n, spec.l);
        let p = spec.k - spec.l;
        Some(if p == 1 { ek / el } else { (ek / el).powf(1.0 / p as f64) })
    }

    /// Σ_i ∂F/∂κ_i = F/(k-l) (k E_{k-1}/E_k - l E_{l-1}/E_l).
    pub fn gradient_sum(&self, spec: &CurvatureSpec, n: usize) -> f64 {
        if spec.k == 1 && spec.l == 0 {
            return 1.0;
        }
        let f = self.curvature_function(spec, n).unwrap_or(f64::NAN);
        let term = |k: usize| {
            if k == 0 {
                0.0
            } else {
                k as f64 * self.e(n, k - 1) / self.e(n, k)
            }
        };
        f / (spec.k - spec.l) as f64 * (term(spec.k) - term(spec.l))
    }
}

/// Geometry at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFields {
    pub beta: f64,
    pub xi: f64,
    /// Ball position. Axisymmetric surfaces use the meridian through e_1, so
    /// only components 0 (distance from the axis) and 2 (height) are set.
    pub pos: [f64; 3],
    /// Unit normal pointing out of the enclosed region, same layout as `pos`.
    pub normal: [f64; 3],
    pub kappa: Principal,
    /// Area quadrature weight.
    pub weight: f64,
    pub u: f64,
    /// v = √(1 + |∇u|²) on the unit sphere.
    pub v: f64,
    /// Stretch |φ_* ν| at the graph point.
    pub stretch: f64,
}

impl NodeFields {
    pub fn support(&self) -> f64 {
        dot(&self.pos, &self.normal)
    }

    pub fn height(&self) -> f64 {
        self.pos[2]
    }
}

/// Boundary quantities of Σ and of ∂Σ as a hypersurface of the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    /// max |⟨x, ν⟩ + cos θ| over boundary nodes.
    pub contact_residual: f64,
    /// max |h(μ, e_α)|.
    pub offdiag_residual: f64,
    /// max |h(e_α, e_α) - (sin θ ĥ - cos θ)|.
    pub diagonal_residual: f64,
    /// |∂Σ|.
    pub length: f64,
    /// ∫_{∂Σ} E_j(ĥ) ds for j = 0..n-1, ĥ the second form of ∂Σ in the sphere.
    pub sphere_integrals: Vec<f64>,
    /// Area of the spherical region bounded by ∂Σ that contains e.
    pub region_area: f64,
    /// Mean geodesic distance of ∂Σ from e.
    pub geodesic_radius: f64,
}

#[derive(Debug, Clone)]
pub struct SurfaceFields {
    pub spec: GridSpec,
    pub nodes: Vec<NodeFields>,
    pub boundary: BoundaryData,
}

impl SurfaceFields {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn integrate(&self, f: impl Fn(&NodeFields) -> f64) -> f64 {
        self.nodes.iter().map(|p| p.weight * f(p)).sum()
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// ∫ E_k dA for k = 0..=n.
    pub fn curvature_integrals(&self) -> Vec<f64> {
        let n = self.n();
        let mut acc = vec![0.0; n + 1];
        for p in &self.nodes {
            for (k, a) in acc.iter_mut().enumerate() {
                *a += p.weight * p.kappa.e(n, k);
            }
        }
        acc
    }

    pub fn kappa_min(&self) -> f64 {
        self.nodes.iter().map(|p| p.kappa.min()).fold(f64::INFINITY, f64::min)
    }

    pub fn kappa_max(&self) -> f64 {
        self.nodes.iter().map(|p| p.kappa.max()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn height_range(&self) -> (f64, f64) {
        self.nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.height()), hi.max(p.height()))
        })
    }
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn scale(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn second_diff(p: &[f64; 3], c: &[f64; 3], m: &[f64; 3], h2: f64) -> [f64; 3] {
    [
        (p[0] - 2.0 * c[0] + m[0]) / h2,
        (p[1] - 2.0 * c[1] + m[1]) / h2,
        (p[2] - 2.0 * c[2] + m[2]) / h2,
    ]
}

fn central(p: &[f64; 3], m: &[f64; 3], h: f64) -> [f64; 3] {
    scale(&sub(p, m), 0.5 / h)
}

/// Graph point y = ρ z and its image in the ball.
#[derive(Debug, Clone, Copy)]
struct Lifted {
    y: [f64; 3],
    x: [f64; 3],
    d: f64,
}

fn lift(u: f64, beta: f64, xi: f64) -> Result<Lifted> {
    if !(u.abs() < 700.0) {
        return Err(CapflowError::Numerical(format!("graph value u = {u} overflows")));
    }
    let rho = u.exp();
    let (sb, cb) = beta.sin_cos();
    let (sx, cx) = xi.sin_cos();
    let y = [rho * sb * cx, rho * sb * sx, rho * cb];
    let d = y[0] * y[0] + y[1] * y[1] + (y[2] + 1.0) * (y[2] + 1.0);
    let yy = dot(&y, &y);
    Ok(Lifted {
        y,
        x: [2.0 * y[0] / d, 2.0 * y[1] / d, (yy - 1.0) / d],
        d,
    })
}

/// Dφ⁻¹ at y applied to the inward radial direction -y/|y|.
fn inward_pushforward(l: &Lifted) -> [f64; 3] {
    let ny = norm(&l.y);
    let w = scale(&l.y, -1.0 / ny);
    let dd = 2.0 * (l.y[0] * w[0] + l.y[1] * w[1]) + 2.0 * (l.y[2] + 1.0) * w[2];
    let yw = dot(&l.y, &w);
    [
        2.0 * w[0] / l.d - l.x[0] * dd / l.d,
        2.0 * w[1] / l.d - l.x[1] * dd / l.d,
        2.0 * yw / l.d - l.x[2] * dd / l.d,
    ]
}

/// Eigenvalues of g⁻¹h for symmetric 2x2 g > 0, via Cholesky reduction.
pub(crate) fn reduced_eigen2(g: [f64; 3], h: [f64; 3]) -> Result<(f64, f64)> {
    let [g11, g12, g22] = g;
    let [h11, h12, h22] = h;
    let det = g11 * g22 - g12 * g12;
    if !(g11 > 0.0) || !(det > 1e-14 * g11 * g22) {
        return Err(CapflowError::MeshQuality(format!(
            "degenerate metric (g11 = {g11:e}, det = {det:e})"
        )));
    }
    let l11 = g11.sqrt();
    let l21 = g12 / l11;
    let l22 = (g22 - l21 * l21).sqrt();
    // M = L⁻¹ h L⁻ᵀ with L⁻¹ = [[1/l11, 0], [-l21/(l11 l22), 1/l22]]
    let a = 1.0 / l11;
    let c = -l21 / (l11 * l22);
    let d = 1.0 / l22;
    let m11 = a * a * h11;
    let m12 = a * (c * h11 + d * h12);
    let m22 = c * c * h11 + 2.0 * c * d * h12 + d * d * h22;
    let mean = 0.5 * (m11 + m22);
    let rad = (0.25 * (m11 - m22) * (m11 - m22) + m12 * m12).sqrt();
    Ok((mean - rad, mean + rad))
}

/// ∫_0^a sin^m s ds.
pub fn sine_power_integral(m: usize, a: f64) -> f64 {
    match m {
        0 => a,
        1 => 1.0 - a.cos(),
        _ => {
            -a.sin().powi(m as i32 - 1) * a.cos() / m as f64
                + (m - 1) as f64 / m as f64 * sine_power_integral(m - 2, a)
        }
    }
}

/// Geometry of the discretized surface with the first kernel.
pub fn fundamental_forms(grid: &HalfSphereGrid) -> Result<SurfaceFields> {
    grid.spec.validate()?;
    match grid.spec.mode {
        GridMode::Axisymmetric => axisymmetric(grid),
        GridMode::Full2d => full2d(grid),
    }
}

fn axisymmetric(grid: &HalfSphereGrid) -> Result<SurfaceFields> {
    let s = grid.spec;
    let n = s.n;
    let nb = s.n_beta;
    let h = s.h();
    let omega = sphere_area(n - 1);
    let ext = grid.extended(None);
    let lifted: Vec<Lifted> = (-1..=nb as isize + 1)
        .map(|i| lift(ext.get(i, 0), s.beta(i), 0.0))
        .collect::<Result<_>>()?;
    let at = |i: isize| &lifted[(i + 1) as usize];

    let mut nodes = Vec::with_capacity(nb + 1);
    for i in 0..=nb as isize {
        let (p, c, m) = (at(i + 1), at(i), at(i - 1));
        let xb = central(&p.x, &m.x, h);
        let xbb = second_diff(&p.x, &c.x, &m.x, h * h);
        let len = norm(&xb);
        if !(len > 1e-12) {
            return Err(CapflowError::MeshQuality(format!("collapsed profile at node {i}")));
        }
        let mut nu = [xb[2] / len, 0.0, -xb[0] / len];
        if dot(&nu, &inward_pushforward(c)) < 0.0 {
            nu = scale(&nu, -1.0);
        }
        let kp = -dot(&xbb, &nu) / (len * len);
        let r = c.x[0];
        let kr = if i == 0 { kp } else { nu[0] / r };
        if i > 0 && !(r > 0.0) {
            return Err(CapflowError::MeshQuality(format!("profile crosses the axis at node {i}")));
        }
        let ub = (ext.get(i + 1, 0) - ext.get(i - 1, 0)) / (2.0 * h);
        nodes.push(NodeFields {
            beta: s.beta(i),
            xi: 0.0,
            pos: c.x,
            normal: nu,
            kappa: Principal { a: kp, b: kr },
            weight: trapezoid(&s, i as usize) * omega * r.abs().powi(n as i32 - 1) * len,
            u: ext.get(i, 0),
            v: (1.0 + ub * ub).sqrt(),
            stretch: 0.5 * c.d,
        });
    }

    let last = nodes[nb];
    let (rn, hn) = (last.pos[0], last.pos[2]);
    let cos_t = cos_theta(s.theta);
    let hat = hn / rn;
    let rb = rn.atan2(hn);
    let length = omega * rn.powi(n as i32 - 1);
    let boundary = BoundaryData {
        contact_residual: (last.support() + cos_t).abs(),
        offdiag_residual: 0.0,
        diagonal_residual: (last.kappa.b - (s.theta.sin() * hat - cos_t)).abs(),
        length,
        sphere_integrals: (0..n).map(|j| length * hat.powi(j as i32)).collect(),
        region_area: omega * sine_power_integral(n - 1, rb),
        geodesic_radius: rb,
    };
    Ok(SurfaceFields {
        spec: s,
        nodes,
        boundary,
    })
}

struct FrameData {
    tb: [f64; 3],
    tx: [f64; 3],
    h: [f64; 3],
}

fn full2d(grid: &HalfSphereGrid) -> Result<SurfaceFields> {
    let s = grid.spec;
    let nb = s.n_beta;
    let m = s.n_xi;
    let h = s.h();
    let dxi = 2.0 * PI / m as f64;
    let fd = FourierDiff::new(m);
    let ext = grid.extended(Some(&fd));

    let mut lifted: Vec<Vec<Lifted>> = Vec::with_capacity(nb + 3);
    for i in -1..=nb as isize + 1 {
        let row = (0..m)
            .map(|j| lift(ext.get(i, j), s.beta(i), s.xi(j)))
            .collect::<Result<Vec<_>>>()?;
        lifted.push(row);
    }
    let xs = |i: isize| -> Vec<[f64; 3]> { lifted[(i + 1) as usize].iter().map(|l| l.x).collect() };

    let mut nodes = Vec::with_capacity((nb + 1) * m);

    // Pole: Cartesian stencil on the first ring.
    {
        let x0 = lifted[1][0].x;
        let r1 = xs(1);
        let (e, nn, w, so) = (0, m / 4, m / 2, 3 * m / 4);
        let tx = central(&r1[e], &r1[w], h);
        let ty = central(&r1[nn], &r1[so], h);
        let xxx = second_diff(&r1[e], &x0, &r1[w], h * h);
        let xyy = second_diff(&r1[nn], &x0, &r1[so], h * h);
        let mut xxy = [0.0; 3];
        for c in 0..3 {
            xxy[c] = (r1[m / 8][c] - r1[3 * m / 8][c] + r1[5 * m / 8][c] - r1[7 * m / 8][c])
                / (2.0 * h * h);
        }
        let mut nu = cross(&tx, &ty);
        let nl = norm(&nu);
        if !(nl > 1e-14) {
            return Err(CapflowError::MeshQuality("degenerate tangent plane at the pole".into()));
        }
        nu = scale(&nu, 1.0 / nl);
        if dot(&nu, &inward_pushforward(&lifted[1][0])) < 0.0 {
            nu = scale(&nu, -1.0);
        }
        let g = [dot(&tx, &tx), dot(&tx, &ty), dot(&ty, &ty)];
        let hh = [-dot(&xxx, &nu), -dot(&xxy, &nu), -dot(&xyy, &nu)];
        let (k1, k2) = reduced_eigen2(g, hh)?;
        let u1 = ext.row(1);
        let ux = (u1[e] - u1[w]) / (2.0 * h);
        let uy = (u1[nn] - u1[so]) / (2.0 * h);
        for j in 0..m {
            nodes.push(NodeFields {
                beta: 0.0,
                xi: s.xi(j),
                pos: x0,
                normal: nu,
                kappa: Principal { a: k1, b: k2 },
                weight: 0.0,
                u: ext.get(0, j),
                v: (1.0 + ux * ux + uy * uy).sqrt(),
                stretch: 0.5 * lifted[1][0].d,
            });
        }
    }

    let mut rim: Vec<FrameData> = Vec::new();
    for i in 1..=nb as isize {
        let (xp, xc, xm) = (xs(i + 1), xs(i), xs(i - 1));
        let tb: Vec<[f64; 3]> = (0..m).map(|j| central(&xp[j], &xm[j], h)).collect();
        let xbb: Vec<[f64; 3]> = (0..m).map(|j| second_diff(&xp[j], &xc[j], &xm[j], h * h)).collect();
        let tx = fd.d1_vec(&xc);
        let xxx = fd.d2_vec(&xc);
        let xbx = fd.d1_vec(&tb);
        let urow = ext.row(i);
        let uxi = fd.d1(urow);
        let sb = s.beta(i).sin();
        for j in 0..m {
            let l = &lifted[(i + 1) as usize][j];
            let mut nu = cross(&tb[j], &tx[j]);
            let nl = norm(&nu);
            if !(nl > 1e-14) {
                return Err(CapflowError::MeshQuality(format!("degenerate tangent plane at ({i}, {j})")));
            }
            nu = scale(&nu, 1.0 / nl);
            if dot(&nu, &inward_pushforward(l)) < 0.0 {
                nu = scale(&nu, -1.0);
            }
            let g = [dot(&tb[j], &tb[j]), dot(&tb[j], &tx[j]), dot(&tx[j], &tx[j])];
            let hh = [-dot(&xbb[j], &nu), -dot(&xbx[j], &nu), -dot(&xxx[j], &nu)];
            let (k1, k2) = reduced_eigen2(g, hh)?;
            let ub = (ext.get(i + 1, j) - ext.get(i - 1, j)) / (2.0 * h);
            let detg = g[0] * g[2] - g[1] * g[1];
            nodes.push(NodeFields {
                beta: s.beta(i),
                xi: s.xi(j),
                pos: l.x,
                normal: nu,
                kappa: Principal { a: k1, b: k2 },
                weight: trapezoid(&s, i as usize) * dxi * detg.sqrt(),
                u: urow[j],
                v: (1.0 + ub * ub + uxi[j] * uxi[j] / (sb * sb)).sqrt(),
                stretch: 0.5 * l.d,
            });
            if i == nb as isize {
                rim.push(FrameData { tb: tb[j], tx: tx[j], h: hh });
            }
        }
    }

    // Boundary curve in the unit sphere.
    let gamma = xs(nb as isize);
    let g1 = fd.d1_vec(&gamma);
    let g2 = fd.d2_vec(&gamma);
    let cos_t = cos_theta(s.theta);
    let sin_t = s.theta.sin();
    let mut bd = BoundaryData {
        contact_residual: 0.0,
        offdiag_residual: 0.0,
        diagonal_residual: 0.0,
        length: 0.0,
        sphere_integrals: vec![0.0; 2],
        region_area: 0.0,
        geodesic_radius: 0.0,
    };
    for j in 0..m {
        let x = gamma[j];
        let speed = norm(&g1[j]);
        let t = scale(&g1[j], 1.0 / speed);
        let mut nb_hat = cross(&x, &t);
        nb_hat = scale(&nb_hat, 1.0 / norm(&nb_hat));
        if nb_hat[2] > 0.0 {
            nb_hat = scale(&nb_hat, -1.0);
        }
        let hat = -dot(&g2[j], &nb_hat) / (speed * speed);
        let ds = speed * dxi;
        bd.length += ds;
        bd.sphere_integrals[0] += ds;
        bd.sphere_integrals[1] += hat * ds;
        bd.geodesic_radius += (x[0].hypot(x[1])).atan2(x[2]) / m as f64;

        let node = &nodes[nb * m + j];
        bd.contact_residual = bd.contact_residual.max((node.support() + cos_t).abs());
        let f = &rim[j];
        let txn = norm(&f.tx);
        let tbt = dot(&f.tb, &t);
        let mu_raw = sub(&f.tb, &scale(&t, tbt));
        let mu_len = norm(&mu_raw);
        let [_, h12, h22] = f.h;
        let h_tt = h22 / (txn * txn);
        let c2 = -tbt / txn;
        let h_mt = (h12 + c2 * h22) / (mu_len * txn);
        bd.offdiag_residual = bd.offdiag_residual.max(h_mt.abs());
        bd.diagonal_residual = bd.diagonal_residual.max((h_tt - (sin_t * hat - cos_t)).abs());
    }
    bd.region_area = 2.0 * PI - bd.sphere_integrals[1];
    Ok(SurfaceFields {
        spec: s,
        nodes,
        boundary: bd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::CapSpec;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn principal_e_matches_general() {
        let p = Principal { a: 0.4, b: 1.3 };
        let all = crate::symfunc::elementary_symmetric_all(&p.values(5));
        for k in 0..=5 {
            assert!((p.e(5, k) - all[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen2_diagonal_and_rotated() {
        let (a, b) = reduced_eigen2([4.0, 0.0, 1.0], [2.0, 0.0, 3.0]).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 3.0).abs() < 1e-15);
        assert!(reduced_eigen2([1.0, 1.0, 1.0], [1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn flat_disk_is_flat() {
        let spec = GridSpec::axisymmetric(3, 64, FRAC_PI_2);
        let cap = CapSpec::new(FRAC_PI_2, f64::INFINITY).unwrap();
        let f = fundamental_forms(&HalfSphereGrid::from_cap(spec, &cap).unwrap()).unwrap();
        assert!(f.kappa_min().abs() < 1e-12 && f.kappa_max().abs() < 1e-12);
        assert!(f.boundary.contact_residual < 1e-14);
        for p in &f.nodes {
            assert!(p.pos[2].abs() < 1e-15);
            assert!((p.normal[2] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_power_integral_values() {
        assert!((sine_power_integral(2, FRAC_PI_2) - PI / 4.0).abs() < 1e-15);
        assert!((sine_power_integral(3, FRAC_PI_2) - 2.0 / 3.0).abs() < 1e-15);
    }
}
