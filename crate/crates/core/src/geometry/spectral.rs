use std::f64::consts::PI;

/// Fourier differentiation matrices on an even periodic grid of `m` nodes.
#[derive(Debug, Clone)]
pub struct FourierDiff {
    m: usize,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl FourierDiff {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2 && m % 2 == 0, "Fourier grid needs an even node count");
        let h = 2.0 * PI / m as f64;
        let mut d1 = vec![0.0; m * m];
        let mut d2 = vec![0.0; m * m];
        for j in 0..m {
            for k in 0..m {
                let idx = j * m + k;
                if j == k {
                    d2[idx] = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
                } else {
                    let d = j as isize - k as isize;
                    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let half = d as f64 * h / 2.0;
                    d1[idx] = 0.5 * sign / half.tan();
                    d2[idx] = -0.5 * sign / (half.sin() * half.sin());
                }
            }
        }
        Self { m, d1, d2 }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    fn apply(mat: &[f64], m: usize, v: &[f64]) -> Vec<f64> {
        (0..m)
            .map(|j| mat[j * m..(j + 1) * m].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn d1(&self, v: &[f64]) -> Vec<f64> {
        Self::apply(&self.d1, self.m, v)
    }

    pub fn d2(&self, v: &[f64]) -> Vec<f64> {
        Self::apply(&self.d2, self.m, v)
    }

    /// Derivative of a ring of 3-vectors, component-wise.
    pub fn d1_vec(&self, v: &[[f64; 3]]) -> Vec<[f64; 3]> {
        self.apply_vec(&self.d1, v)
    }

    pub fn d2_vec(&self, v: &[[f64; 3]]) -> Vec<[f64; 3]> {
        self.apply_vec(&self.d2, v)
    }

    fn apply_vec(&self, mat: &[f64], v: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let m = self.m;
        (0..m)
            .map(|j| {
                let mut acc = [0.0; 3];
                for (a, x) in mat[j * m..(j + 1) * m].iter().zip(v) {
                    for c in 0..3 {
                        acc[c] += a * x[c];
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_trig_polynomials() {
        let m = 16;
        let fd = FourierDiff::new(m);
        let xs: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let f: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin() + 0.5 * (x).cos()).collect();
        let df = fd.d1(&f);
        let ddf = fd.d2(&f);
        for (j, x) in xs.iter().enumerate() {
            assert!((df[j] - (3.0 * (3.0 * x).cos() - 0.5 * x.sin())).abs() < 1e-12);
            assert!((ddf[j] - (-9.0 * (3.0 * x).sin() - 0.5 * x.cos())).abs() < 1e-11);
        }
    }
}
