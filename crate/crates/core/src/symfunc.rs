//! Normalized elementary symmetric functions, curvature functions built from
//! them, and the exact rational constants that appear in the quermassintegral
//! inequalities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{domain, Result};

/// Relative threshold for membership in the positive cone.
pub const CONE_TOL: f64 = 1e-12;

/// Principal curvatures, stored ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaVector {
    values: Vec<f64>,
}

impl KappaVector {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return domain("curvature vector must be non-empty");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("curvature vector has non-finite entries");
        }
        let mut values = values.to_vec();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `min κ > 1e-12 · max(1, max|κ|)`.
    pub fn in_positive_cone(&self) -> bool {
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        self.min() > CONE_TOL * scale
    }
}

/// Binomial coefficient as a float (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// Unnormalized σ_0..σ_n by expanding ∏(1 + κ_i t).
fn sigma_all(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let mut s = vec![0.0; n + 1];
    s[0] = 1.0;
    for (i, &x) in kappa.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            s[j] += x * s[j - 1];
        }
    }
    s
}

/// All normalized E_0..E_n.
pub fn elementary_symmetric_all(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    sigma_all(kappa)
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / binomial(n, k))
        .collect()
}

/// Normalized E_k = σ_k / C(n, k).
pub fn elementary_symmetric(kappa: &KappaVector, k: usize) -> Result<f64> {
    let n = kappa.dim();
    if k > n {
        return domain(format!("E_{k} undefined for n = {n}"));
    }
    Ok(elementary_symmetric_all(kappa.values())[k])
}

fn without(kappa: &[f64], i: usize) -> Vec<f64> {
    kappa
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .collect()
}

/// ∂E_k/∂κ_i = (k/n) E_{k-1}(κ without κ_i).
pub fn elementary_symmetric_gradient(kappa: &KappaVector, k: usize) -> Result<Vec<f64>> {
    let n = kappa.dim();
    if k > n {
        return domain(format!("E_{k} undefined for n = {n}"));
    }
    if k == 0 {
        return Ok(vec![0.0; n]);
    }
    Ok((0..n)
        .map(|i| {
            let rest = without(kappa.values(), i);
            k as f64 / n as f64 * elementary_symmetric_all(&rest)[k - 1]
        })
        .collect())
}

/// Curvature function F = (E_k / E_l)^{1/(k-l)}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureSpec {
    pub k: usize,
    pub l: usize,
}

impl Default for CurvatureSpec {
    fn default() -> Self {
        Self::MEAN
    }
}

impl fmt::Display for CurvatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.l == 0 {
            write!(f, "E{}^(1/{})", self.k, self.k)
        } else {
            write!(f, "(E{}/E{})^(1/{})", self.k, self.l, self.k - self.l)
        }
    }
}

impl CurvatureSpec {
    /// Normalized mean curvature E_1.
    pub const MEAN: CurvatureSpec = CurvatureSpec { k: 1, l: 0 };

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.l >= self.k || self.k > n {
            return domain(format!(
                "curvature function needs 0 <= l < k <= n, got k = {}, l = {}, n = {n}",
                self.k, self.l
            ));
        }
        Ok(())
    }

    /// Whether κ lies in the cone where this F is admissible:
    /// E_1 > 0 for F = E_1, the positive cone otherwise.
    pub fn admissible(&self, kappa: &KappaVector) -> bool {
        if self.k == 1 && self.l == 0 {
            let e1 = kappa.values().iter().sum::<f64>() / kappa.dim() as f64;
            let scale = kappa.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            e1 > CONE_TOL * scale
        } else {
            kappa.in_positive_cone()
        }
    }

    fn check(&self, kappa: &KappaVector) -> Result<()> {
        self.validate(kappa.dim())?;
        if !self.admissible(kappa) {
            return domain(format!(
                "curvature {:?} outside the admissible cone of {self}",
                kappa.values()
            ));
        }
        Ok(())
    }

    /// Value of F at κ.
    pub fn eval(&self, kappa: &KappaVector) -> Result<f64> {
        self.check(kappa)?;
        Ok(self.eval_unchecked(kappa.values()))
    }

    /// F without cone checks; callers guarantee admissibility.
    pub fn eval_unchecked(&self, kappa: &[f64]) -> f64 {
        let e = elementary_symmetric_all(kappa);
        let p = (self.k - self.l) as f64;
        if self.k - self.l == 1 {
            e[self.k] / e[self.l]
        } else {
            (e[self.k] / e[self.l]).powf(1.0 / p)
        }
    }

    /// Gradient ∂F/∂κ_i.
    pub fn gradient(&self, kappa: &KappaVector) -> Result<Vec<f64>> {
        self.check(kappa)?;
        let f = self.eval_unchecked(kappa.values());
        let ek = elementary_symmetric(kappa, self.k)?;
        let el = elementary_symmetric(kappa, self.l)?;
        let gk = elementary_symmetric_gradient(kappa, self.k)?;
        let gl = elementary_symmetric_gradient(kappa, self.l)?;
        let p = (self.k - self.l) as f64;
        Ok(gk
            .iter()
            .zip(&gl)
            .map(|(a, b)| f / p * (a / ek - b / el))
            .collect())
    }

    /// Sum of ∂F/∂κ_i without checks.
    pub fn gradient_sum_unchecked(&self, kappa: &[f64]) -> f64 {
        let n = kappa.len();
        if self.k == 1 && self.l == 0 {
            return 1.0;
        }
        // Σ_i ∂σ_k/∂κ_i = (n-k+1) σ_{k-1}
        let s = sigma_all(kappa);
        let f = self.eval_unchecked(kappa);
        let p = (self.k - self.l) as f64;
        let dk = (n - self.k + 1) as f64 * s[self.k - 1] / s[self.k];
        let dl = if self.l == 0 {
            0.0
        } else {
            (n - self.l + 1) as f64 * s[self.l - 1] / s[self.l]
        };
        f / p * (dk - dl)
    }

    /// Inverse-concave dual F_*(κ) = 1 / F(1/κ).
    pub fn dual(&self, kappa: &KappaVector) -> Result<f64> {
        if !kappa.in_positive_cone() {
            return domain("dual curvature function needs the positive cone");
        }
        let inv: Vec<f64> = kappa.values().iter().map(|v| 1.0 / v).collect();
        let inv = KappaVector::new(&inv)?;
        Ok(1.0 / self.eval(&inv)?)
    }
}

/// n!! as an exact integer; 0!! = (-1)!! = 1.
pub fn double_factorial(n: i64) -> BigUint {
    let mut acc = BigUint::one();
    let mut m = n;
    while m > 1 {
        acc *= BigUint::from(m as u64);
        m -= 2;
    }
    acc
}

/// |S^m|, by ω_0 = 2, ω_1 = 2π, ω_m = 2π ω_{m-2} / (m-1).
pub fn sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(m - 2) / (m - 1) as f64,
    }
}

/// Constants attached to dimension n.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionConstants {
    pub n: usize,
    /// n!!
    pub double_factorial: f64,
    /// ω_{n-1} = |S^{n-1}|
    pub omega: f64,
    /// b_n = ω_{n-1}/n, the volume of the unit n-ball
    pub b: f64,
}

pub fn double_factorial_constants(n: usize) -> Result<DimensionConstants> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    let omega = sphere_area(n - 1);
    Ok(DimensionConstants {
        n,
        double_factorial: double_factorial(n as i64).to_f64().unwrap_or(f64::INFINITY),
        omega,
        b: omega / n as f64,
    })
}

/// Exact rational number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalScalar(pub BigRational);

impl RationalScalar {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl fmt::Display for RationalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_s_domain(n: usize, k: usize) -> Result<()> {
    if n == 0 || 2 * k + 1 > n {
        return domain(format!("alternating sum needs 2k+1 <= n, got n = {n}, k = {k}"));
    }
    Ok(())
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// S(n,k) = Σ_{i=0}^k (-1)^i C(k,i) / (n - 2k + 2i), summed exactly.
pub fn alternating_sum_s(n: usize, k: usize) -> Result<RationalScalar> {
    check_s_domain(n, k)?;
    let mut acc = BigRational::zero();
    for i in 0..=k {
        let den = BigInt::from(n - 2 * k + 2 * i);
        let term = BigRational::new(binomial_big(k, i), den);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(RationalScalar(acc))
}

/// Closed form (2k)!! / ∏_{j=0}^k (n - 2j).
pub fn alternating_sum_closed_form(n: usize, k: usize) -> Result<RationalScalar> {
    check_s_domain(n, k)?;
    let num = BigInt::from(double_factorial(2 * k as i64));
    let mut den = BigInt::one();
    for j in 0..=k {
        den *= BigInt::from(n - 2 * j);
    }
    Ok(RationalScalar(BigRational::new(num, den)))
}

/// S(n,k) through S(n,k) = S(n-2,k-1) - S(n,k-1) down to S(m,0) = 1/m.
pub fn alternating_sum_recursive(n: usize, k: usize) -> Result<RationalScalar> {
    check_s_domain(n, k)?;
    // row[i] holds S(n - 2i, j) while j climbs from 0 to k
    let mut row: Vec<BigRational> = (0..=k)
        .map(|i| BigRational::new(BigInt::one(), BigInt::from(n - 2 * i)))
        .collect();
    for j in 1..=k {
        for i in 0..=k - j {
            row[i] = &row[i + 1] - &row[i];
        }
    }
    Ok(RationalScalar(row.swap_remove(0)))
}

/// Right-hand side A_k(W_1) of the sharp Alexandrov-Fenchel inequality
/// W_{2k+1} >= A_k(W_1) for free-boundary hypersurfaces.
pub fn af_rhs_a(n: usize, k: usize, w1: f64) -> Result<f64> {
    check_s_domain(n, k)?;
    if !(w1 > 0.0) || !w1.is_finite() {
        return domain(format!("W_1 must be positive and finite, got {w1}"));
    }
    let omega = sphere_area(n - 1);
    let mut pre = omega / n as f64;
    for j in 0..=k {
        pre *= (n - 2 * j) as f64 / (n + 1 - 2 * j) as f64;
    }
    let base = n as f64 * (n + 1) as f64 * w1 / omega;
    let mut sum = 0.0;
    for i in 0..=k {
        let m = (n - 2 * k + 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(k, i) / m * base.powf(m / n as f64);
    }
    Ok(pre * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(v: &[f64]) -> KappaVector {
        KappaVector::new(v).unwrap()
    }

    #[test]
    fn small_by_hand() {
        let k = kv(&[3.0, 1.0, 2.0]);
        assert_eq!(k.values(), &[1.0, 2.0, 3.0]);
        assert!((elementary_symmetric(&k, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((elementary_symmetric(&k, 2).unwrap() - 11.0 / 3.0).abs() < 1e-15);
        assert!((elementary_symmetric(&k, 3).unwrap() - 6.0).abs() < 1e-15);
        let f = CurvatureSpec { k: 2, l: 1 }.eval(&k).unwrap();
        assert!((f - 11.0 / 6.0).abs() < 1e-15);
        assert!(elementary_symmetric(&k, 4).is_err());
    }

    #[test]
    fn umbilic_gives_common_value() {
        let k = kv(&[0.7; 5]);
        for (kk, l) in [(1, 0), (3, 1), (5, 2), (4, 0)] {
            let f = CurvatureSpec { k: kk, l }.eval(&k).unwrap();
            assert!((f - 0.7).abs() < 1e-14, "{kk} {l}: {f}");
        }
    }

    #[test]
    fn cone_rules() {
        let k = kv(&[-0.1, 1.0, 1.0]);
        assert!(CurvatureSpec::MEAN.eval(&k).is_ok());
        assert!(CurvatureSpec { k: 2, l: 1 }.eval(&k).is_err());
        assert!(CurvatureSpec::MEAN.eval(&kv(&[-1.0, 0.5])).is_err());
        assert!(CurvatureSpec { k: 3, l: 3 }.validate(3).is_err());
    }

    #[test]
    fn gradient_sum_matches_gradient() {
        let k = kv(&[0.3, 0.9, 1.7, 2.2]);
        for (kk, l) in [(1, 0), (2, 0), (3, 1), (4, 2)] {
            let spec = CurvatureSpec { k: kk, l };
            let g: f64 = spec.gradient(&k).unwrap().iter().sum();
            assert!((g - spec.gradient_sum_unchecked(k.values())).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_examples() {
        assert_eq!(alternating_sum_s(5, 2).unwrap(), RationalScalar::from_ratio(8, 15));
        assert_eq!(alternating_sum_closed_form(5, 2).unwrap(), RationalScalar::from_ratio(8, 15));
        assert_eq!(alternating_sum_s(3, 1).unwrap(), RationalScalar::from_ratio(2, 3));
        assert!(alternating_sum_s(4, 2).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        let c = double_factorial_constants(3).unwrap();
        assert_eq!(c.double_factorial, 3.0);
        assert!((c.b - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn af_rhs_examples() {
        let a = af_rhs_a(3, 1, PI / 3.0).unwrap();
        assert!((a - PI / 3.0).abs() < 1e-14);
        for w1 in [0.1, 1.0, 7.0] {
            assert!((af_rhs_a(6, 0, w1).unwrap() - w1).abs() < 1e-13 * w1.max(1.0));
        }
        assert!(af_rhs_a(3, 1, -1.0).is_err());
    }
}
