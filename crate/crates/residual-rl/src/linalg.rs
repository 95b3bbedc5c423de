//! Small dense linear-algebra kernels.
//!
//! Everything here is plain `f64`, row-major, and sized for desk-scale
//! problems (tens of states, single-digit feature dimensions). The exact
//! solvers in [`crate::mdp`] and [`crate::objectives`] are built on these;
//! they are deliberately direct (LU, cyclic Jacobi) rather than iterative so
//! that oracle values carry no solver noise.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: expected {c} columns, found {}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Solves `a x = b` by LU decomposition with partial pivoting.
///
/// `name` labels the matrix in the singularity error.
pub fn lu_solve(a: &Mat, b: &[f64], name: &str) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "lu_solve: {}x{} matrix with rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut lu = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    let scale = lu
        .data
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(1.0);

    for col in 0..n {
        // Pivot.
        let mut pivot_row = col;
        let mut pivot_val = lu.get(col, col).abs();
        for r in col + 1..n {
            let v = lu.get(r, col).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val < 1e-13 * scale {
            return Err(Error::SingularMatrix { name: name.to_string() });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
            x.swap(col, pivot_row);
        }
        // Eliminate.
        let p = lu.get(col, col);
        for r in col + 1..n {
            let f = lu.get(r, col) / p;
            if f == 0.0 {
                continue;
            }
            lu.set(r, col, 0.0);
            for j in col + 1..n {
                lu.set(r, j, lu.get(r, j) - f * lu.get(col, j));
            }
            x[r] -= f * x[col];
        }
    }
    // Back substitution.
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= lu.get(i, j) * x[j];
        }
        x[i] = s / lu.get(i, i);
    }
    Ok(x)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns,
/// sorted by descending eigenvalue.
pub fn symmetric_eigen(a: &Mat) -> Result<(Vec<f64>, Mat)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("symmetric_eigen: non-square".into()));
    }
    let mut m = a.clone();
    let mut v = Mat::identity(n);

    let frob: f64 = a.data.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-15 * frob;

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m.get(p, q).abs();
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    idx.sort_by(|&i, &j| eig[j].partial_cmp(&eig[i]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| eig[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v.get(r, idx[c]));
    Ok((values, vectors))
}

/// Solution of a weighted least-squares problem.
#[derive(Debug, Clone)]
pub struct WlsSolution {
    pub weights: Vec<f64>,
    /// True when the normal-equation matrix was rank deficient and the
    /// minimum-norm solution was returned.
    pub rank_deficient: bool,
}

/// Minimizes `|| target - design * w ||^2_D` where `D = diag(state_weights)`.
///
/// Full-rank systems are solved through the eigendecomposition of the
/// normal-equation matrix; rank-deficient systems fall back to the
/// pseudo-inverse, returning the minimum-norm minimizer.
pub fn weighted_least_squares(
    design: &Mat,
    state_weights: &[f64],
    target: &[f64],
) -> Result<WlsSolution> {
    let n = design.rows();
    let d = design.cols();
    if state_weights.len() != n || target.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "weighted_least_squares: design {}x{}, weights {}, target {}",
            n,
            d,
            state_weights.len(),
            target.len()
        )));
    }
    // G = A^T D A, rhs = A^T D t.
    let mut g = Mat::zeros(d, d);
    let mut rhs = vec![0.0; d];
    for s in 0..n {
        let w = state_weights[s];
        if w == 0.0 {
            continue;
        }
        let row = design.row(s);
        for i in 0..d {
            rhs[i] += w * row[i] * target[s];
            for j in i..d {
                let v = g.get(i, j) + w * row[i] * row[j];
                g.set(i, j, v);
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            g.set(i, j, g.get(j, i));
        }
    }

    let (eigvals, eigvecs) = symmetric_eigen(&g)?;
    let max_eig = eigvals.first().copied().unwrap_or(0.0).max(0.0);
    let tol = max_eig * 1e-12;
    let mut rank_deficient = false;
    let mut weights = vec![0.0; d];
    // w = V diag(1/lambda) V^T rhs over the numerically nonzero spectrum.
    for k in 0..d {
        if eigvals[k] <= tol || eigvals[k] <= 0.0 {
            rank_deficient = true;
            continue;
        }
        let mut proj = 0.0;
        for i in 0..d {
            proj += eigvecs.get(i, k) * rhs[i];
        }
        let coef = proj / eigvals[k];
        for i in 0..d {
            weights[i] += coef * eigvecs.get(i, k);
        }
    }
    Ok(WlsSolution { weights, rank_deficient })
}

/// Max-norm of a vector.
pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Euclidean norm of a vector.
pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weighted squared norm `sum_i w_i v_i^2`.
pub fn weighted_sq_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(x, wi)| wi * x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lu_solves_small_system() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = lu_solve(&a, &[5.0, 10.0], "a").unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lu_reports_singular() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        match lu_solve(&a, &[1.0, 2.0], "key matrix") {
            Err(Error::SingularMatrix { name }) => assert_eq!(name, "key matrix"),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn lu_random_residuals_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..8);
            let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
                .sub(&Mat::identity(n).scale(-2.0)); // diagonally bumped
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = lu_solve(&a, &b, "a").unwrap();
            let r = a.matvec(&x);
            for i in 0..n {
                assert!((r[i] - b[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_recovers_diagonal() {
        let a = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (vals, _) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let b = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a = {
            // A = B + B^T is symmetric.
            let bt = b.transpose();
            Mat::from_fn(n, n, |i, j| b.get(i, j) + bt.get(i, j))
        };
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        // Check A v_k = lambda_k v_k.
        for k in 0..n {
            let vk: Vec<f64> = (0..n).map(|i| vecs.get(i, k)).collect();
            let av = a.matvec(&vk);
            for i in 0..n {
                assert!(
                    (av[i] - vals[k] * vk[i]).abs() < 1e-9,
                    "eigenpair {k} mismatch"
                );
            }
        }
    }

    #[test]
    fn wls_matches_unweighted_normal_equations() {
        // Single column: w = <x, t>_D / <x, x>_D.
        let x = Mat::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let sol = weighted_least_squares(&x, &[0.5, 0.5], &[2.0, 2.0]).unwrap();
        assert!(!sol.rank_deficient);
        assert!((sol.weights[0] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn wls_rank_deficient_returns_min_norm() {
        // Two identical columns: minimizers form a line; min-norm splits evenly.
        let x = Mat::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let sol = weighted_least_squares(&x, &[0.5, 0.5], &[1.0, 2.0]).unwrap();
        assert!(sol.rank_deficient);
        assert!((sol.weights[0] - 0.5).abs() < 1e-10);
        assert!((sol.weights[1] - 0.5).abs() < 1e-10);
    }
}
