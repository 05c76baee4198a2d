//! Small dense linear algebra on row-major square matrices.

use nalgebra::{DMatrix, SymmetricEigen};

/// Row-major square matrix of order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    n: usize,
    data: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Determinant by LU factorization with partial pivoting. The empty matrix has determinant 1.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .unwrap_or(col);
            let p = a[pivot * n + col];
            if p == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                if factor != 0.0 {
                    for j in col + 1..n {
                        a[r * n + j] -= factor * a[col * n + j];
                    }
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Square> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Square::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 }).data;
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))?;
            let p = a[pivot * n + col];
            if p == 0.0 || !p.is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            for j in 0..n {
                a[col * n + j] /= p;
                inv[col * n + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[r * n + j] -= factor * a[col * n + j];
                        inv[r * n + j] -= factor * inv[col * n + j];
                    }
                }
            }
        }
        Some(Square { n, data: inv })
    }

    /// Cholesky test for positive definiteness (symmetric input assumed).
    pub fn is_positive_definite(&self) -> bool {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Symmetric eigendecomposition: eigenvalues with matching column eigenvectors.
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Square) {
        let n = self.n;
        if n == 0 {
            return (Vec::new(), Square::zeros(0));
        }
        let m = DMatrix::from_row_slice(n, n, &self.data);
        let eig = SymmetricEigen::new(m);
        let vectors = Square::from_fn(n, |i, j| eig.eigenvectors[(i, j)]);
        (eig.eigenvalues.iter().copied().collect(), vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &Square) -> f64 {
        let n = m.order();
        if n == 0 {
            return 1.0;
        }
        if n == 1 {
            return m.get(0, 0);
        }
        (0..n)
            .map(|j| {
                let minor =
                    Square::from_fn(n - 1, |r, c| m.get(r + 1, if c < j { c } else { c + 1 }));
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m.get(0, j) * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn lu_determinant_matches_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 0..=5 {
            for _ in 0..50 {
                let m = Square::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
                let lu = m.determinant();
                let exact = cofactor_det(&m);
                assert!(
                    (lu - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                    "n={n}: {lu} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn determinant_of_singular_and_permuted() {
        let m = Square::from_fn(3, |i, j| (i * 3 + j) as f64);
        assert!(m.determinant().abs() < 1e-12);
        let p = Square::from_fn(2, |i, j| if i != j { 1.0 } else { 0.0 });
        assert_eq!(p.determinant(), -1.0);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Square::from_fn(3, |i, j| {
            if i == j {
                4.0
            } else {
                1.0 + (i + j) as f64 * 0.1
            }
        });
        let inv = m.inverse().unwrap();
        for i in 0..3 {
            for l in 0..3 {
                let s: f64 = (0..3).map(|k| m.get(i, k) * inv.get(k, l)).sum();
                let want = if i == l { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
        assert!(Square::zeros(2).inverse().is_none());
    }

    #[test]
    fn cholesky_positive_definiteness() {
        assert!(Square::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 }).is_positive_definite());
        assert!(!Square::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 }).is_positive_definite());
        assert!(!Square::from_fn(2, |i, j| if i == j { -1.0 } else { 0.0 }).is_positive_definite());
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = Square::from_fn(3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let (mut vals, _) = m.symmetric_eigen();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals.len(), 3);
        for (v, want) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - want).abs() < 1e-12);
        }
    }
}
