//! Tridiagonal matrices and a banded LU solver with partial pivoting.

use crate::error::{invalid, Error, Result};

/// Tridiagonal `Q × Q` matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagMatrix {
    /// `A[i+1][i]`, length `Q - 1`.
    pub sub: Vec<f64>,
    /// `A[i][i]`, length `Q`.
    pub diag: Vec<f64>,
    /// `A[i][i+1]`, length `Q - 1`.
    pub sup: Vec<f64>,
    pub symmetric: bool,
}

impl TriDiagMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let q = diag.len();
        if q == 0 || sub.len() + 1 != q || sup.len() + 1 != q {
            return invalid(format!(
                "inconsistent diagonal lengths {}/{}/{}",
                sub.len(),
                q,
                sup.len()
            ));
        }
        let symmetric = sub == sup;
        Ok(TriDiagMatrix {
            sub,
            diag,
            sup,
            symmetric,
        })
    }

    pub fn identity(q: usize) -> Self {
        TriDiagMatrix {
            sub: vec![0.0; q.saturating_sub(1)],
            diag: vec![1.0; q],
            sup: vec![0.0; q.saturating_sub(1)],
            symmetric: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let q = self.dim();
        debug_assert!(x.len() == q && y.len() == q);
        if q == 1 {
            y[0] = self.diag[0] * x[0];
            return;
        }
        y[0] = self.diag[0] * x[0] + self.sup[0] * x[1];
        for i in 1..q - 1 {
            y[i] = self.sub[i - 1] * x[i - 1] + self.diag[i] * x[i] + self.sup[i] * x[i + 1];
        }
        y[q - 1] = self.sub[q - 2] * x[q - 2] + self.diag[q - 1] * x[q - 1];
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &TriDiagMatrix) -> TriDiagMatrix {
        let zip = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        TriDiagMatrix {
            sub: zip(&self.sub, &other.sub),
            diag: zip(&self.diag, &other.diag),
            sup: zip(&self.sup, &other.sup),
            symmetric: self.symmetric && other.symmetric,
        }
    }

    /// Column sums `1ᵀ A`.
    pub fn column_sums(&self) -> Vec<f64> {
        let q = self.dim();
        let mut s = self.diag.clone();
        for i in 0..q.saturating_sub(1) {
            s[i] += self.sub[i];
            s[i + 1] += self.sup[i];
        }
        s
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let q = self.dim();
        let mut a = vec![vec![0.0; q]; q];
        for i in 0..q {
            a[i][i] = self.diag[i];
            if i + 1 < q {
                a[i][i + 1] = self.sup[i];
                a[i + 1][i] = self.sub[i];
            }
        }
        a
    }

    pub fn factor(&self) -> Result<TriDiagLu> {
        TriDiagLu::new(self)
    }
}

/// LU factors `P A = L U` of a tridiagonal matrix; `U` has two superdiagonals.
#[derive(Debug, Clone)]
pub struct TriDiagLu {
    multipliers: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
    pivot_growth: f64,
}

impl TriDiagLu {
    fn new(a: &TriDiagMatrix) -> Result<Self> {
        let q = a.dim();
        let mut d = a.diag.clone();
        let mut du = a.sup.clone();
        let mut dl = a.sub.clone();
        let mut du2 = vec![0.0; q.saturating_sub(2)];
        let mut swapped = vec![false; q.saturating_sub(1)];
        for i in 0..q.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularMatrix { row: i });
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                // swap rows i and i+1
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < q {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if d[q - 1] == 0.0 {
            return Err(Error::SingularMatrix { row: q - 1 });
        }
        let scale = a.max_abs();
        let umax = d
            .iter()
            .chain(&du)
            .chain(&du2)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let pivot_growth = if scale > 0.0 { umax / scale } else { 1.0 };
        Ok(TriDiagLu {
            multipliers: dl,
            d,
            du,
            du2,
            swapped,
            pivot_growth,
        })
    }

    /// `max |U_ij| / max |A_ij|`.
    pub fn pivot_growth(&self) -> f64 {
        self.pivot_growth
    }

    /// Smallest pivot magnitude relative to the largest.
    pub fn pivot_ratio(&self) -> f64 {
        let (lo, hi) = self
            .d
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
        lo / hi
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let q = self.d.len();
        debug_assert_eq!(b.len(), q);
        for i in 0..q.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.multipliers[i] * b[i];
            } else {
                b[i + 1] -= self.multipliers[i] * b[i];
            }
        }
        b[q - 1] /= self.d[q - 1];
        if q > 1 {
            b[q - 2] = (b[q - 2] - self.du[q - 2] * b[q - 1]) / self.d[q - 2];
        }
        for i in (0..q.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Solution of a tridiagonal system and the pivot growth of its factorization.
#[derive(Debug, Clone)]
pub struct TriDiagSolution {
    pub x: Vec<f64>,
    pub pivot_growth: f64,
}

/// Solve `A x = rhs` by banded LU with partial pivoting.
pub fn solve_tridiagonal(a: &TriDiagMatrix, rhs: &[f64]) -> Result<TriDiagSolution> {
    if rhs.len() != a.dim() {
        return invalid(format!(
            "right-hand side has length {}, matrix is {}",
            rhs.len(),
            a.dim()
        ));
    }
    let lu = a.factor()?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Ok(TriDiagSolution {
        x,
        pivot_growth: lu.pivot_growth(),
    })
}

/// `max_i |(A x - b)_i|`.
pub fn residual_max_norm(a: &TriDiagMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (ax, bi)| m.max((ax - bi).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5, 0.25];
        let s = solve_tridiagonal(&TriDiagMatrix::identity(4), &b).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.pivot_growth, 1.0);
    }

    #[test]
    fn one_by_one() {
        let a = TriDiagMatrix::new(vec![], vec![4.0], vec![]).unwrap();
        assert_eq!(solve_tridiagonal(&a, &[2.0]).unwrap().x, vec![0.5]);
    }

    #[test]
    fn random_diagonally_dominant_against_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let q = rng.gen_range(1..60);
            let sub: Vec<f64> = (0..q - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sup: Vec<f64> = (0..q - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..q)
                .map(|_| rng.gen_range(2.1..5.0) * if rng.gen() { 1.0 } else { -1.0 })
                .collect();
            let a = TriDiagMatrix::new(sub, diag, sup).unwrap();
            let b: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = solve_tridiagonal(&a, &b).unwrap().x;
            let y = dense_solve(a.to_dense(), b.clone());
            let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() <= 1e-11 * scale, "trial {trial}");
            }
        }
    }

    #[test]
    fn pivoting_handles_small_diagonal() {
        // zero leading diagonal forces a row swap
        let a = TriDiagMatrix::new(
            vec![1.0, 1.0, 2.0],
            vec![0.0, 1e-3, 0.0, 1.0],
            vec![2.0, 3.0, 1.0],
        )
        .unwrap();
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let x = solve_tridiagonal(&a, &b).unwrap().x;
        assert!(residual_max_norm(&a, &x, &b) < 1e-12);
        let y = dense_solve(a.to_dense(), b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let a = TriDiagMatrix::new(vec![0.0], vec![1.0, 0.0], vec![0.0]).unwrap();
        assert!(matches!(
            solve_tridiagonal(&a, &[1.0, 1.0]),
            Err(Error::SingularMatrix { row: 1 })
        ));
    }

    #[test]
    fn dimension_checks() {
        assert!(TriDiagMatrix::new(vec![1.0], vec![1.0], vec![]).is_err());
        assert!(solve_tridiagonal(&TriDiagMatrix::identity(3), &[1.0]).is_err());
    }
}
