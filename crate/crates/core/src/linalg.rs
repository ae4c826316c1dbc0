//! Small dense complex kernels.
//!
//! Cluster sizes stay in the single digits, so the Hermitian solves below are
//! plain row-major loops over a `Vec` rather than a general matrix type.

use num_complex::Complex64;

pub type CVector = Vec<Complex64>;

/// `a^H b`.
pub fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `Σ a_i b_i` without conjugation.
pub fn dot_t(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Dense square Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// `self += weight · g g^H`.
    pub fn add_outer(&mut self, weight: f64, g: &[Complex64]) {
        debug_assert_eq!(g.len(), self.n);
        for (row, gi) in self.data.chunks_exact_mut(self.n).zip(g) {
            let gi = gi * weight;
            for (a, gj) in row.iter_mut().zip(g) {
                *a += gi * gj.conj();
            }
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> CVector {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Solves `self · x = b` by Cholesky factorization. Returns `None` when a
    /// pivot is not strictly positive, i.e. the matrix is not numerically PD.
    pub fn cholesky_solve(&self, b: &[Complex64]) -> Option<CVector> {
        let n = self.n;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.data[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        // L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        // L^H x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i].conj() * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        Some(y)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let x = HermitianMatrix::identity(2).cholesky_solve(&b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_matches_dense_inverse() {
        let mut a = HermitianMatrix::identity(3);
        a.add_outer(2.0, &[c(0.3, -0.1), c(1.0, 0.4), c(-0.2, 0.9)]);
        a.add_outer(0.7, &[c(-1.1, 0.2), c(0.0, 0.5), c(0.6, 0.6)]);
        let b = vec![c(1.0, 0.0), c(0.2, -0.3), c(-0.4, 1.0)];
        let x = a.cholesky_solve(&b).unwrap();

        let dense = nalgebra::DMatrix::from_fn(3, 3, |i, j| a.get(i, j));
        let inv = dense.try_inverse().unwrap();
        let expect = inv * nalgebra::DVector::from_column_slice(&b);
        for i in 0..3 {
            assert!((x[i] - expect[i]).norm() < 1e-12);
        }
        let r = a.mul_vec(&x);
        for i in 0..3 {
            assert!((r[i] - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let mut a = HermitianMatrix::identity(2);
        a.add_outer(-2.0, &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(a.cholesky_solve(&[c(1.0, 0.0), c(1.0, 0.0)]).is_none());
    }

    #[test]
    fn eigenvalues_of_rank_one_update() {
        let mut a = HermitianMatrix::identity(2);
        a.add_outer(1.0, &[c(0.0, 1.0), c(1.0, 0.0)]);
        let ev = a.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_and_sesquilinear_products() {
        let a = [c(0.0, 1.0)];
        let b = [c(0.0, 1.0)];
        assert_eq!(dot_h(&a, &b), c(1.0, 0.0));
        assert_eq!(dot_t(&a, &b), c(-1.0, 0.0));
    }
}
