//! Dense symmetric linear algebra helpers shared by the pencil solvers:
//! generalized symmetric eigendecompositions, deterministic iterative
//! refinement for large pencils, and an operator-norm power iteration.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Eigen-pairs of the pencil `(A, M)` with `A` symmetric and `M` symmetric
/// positive definite: `A v = lambda M v`, `V^T M V = I`, eigenvalues
/// ascending.
pub struct GeneralizedEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are M-orthonormal eigenvectors.
    pub eigenvectors: DMatrix<f64>,
}

/// Forces exact symmetry by mirroring the upper triangle.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn max_abs_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn symmetric_eigen_sorted(mat: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mat.nrows();
    let eig = mat
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenSolver("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Returns true when `m` is diagonal (all off-diagonal entries exactly zero).
pub fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}

/// Generalized symmetric eigendecomposition. A diagonal mass matrix is
/// reduced by diagonal scaling (exact and cheap, the common case for lumped
/// interior mass); otherwise a Cholesky reduction of `M` is used.
pub fn generalized_symmetric_eigen(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    let n = a.nrows();
    if a.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil blocks must be square and equal-sized: A is {}x{}, M is {}x{}",
            a.nrows(),
            a.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    if is_diagonal(m) {
        let d = m.diagonal();
        if d.iter().any(|&v| v <= 0.0) {
            return Err(Error::NotPositiveDefinite("diagonal mass has a non-positive entry".into()));
        }
        let inv_sqrt: DVector<f64> = d.map(|v| 1.0 / v.sqrt());
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = a[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let (values, y) = symmetric_eigen_sorted(b)?;
        let mut vectors = y;
        for i in 0..n {
            let s = inv_sqrt[i];
            for k in 0..n {
                vectors[(i, k)] *= s;
            }
        }
        Ok(GeneralizedEigen { eigenvalues: values, eigenvectors: vectors })
    } else {
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("mass matrix Cholesky failed".into()))?;
        // B = L^-1 A L^-T, symmetrized against round-off.
        let l = chol.l();
        let mut b = a.clone();
        l.solve_lower_triangular_mut(&mut b);
        b.transpose_mut();
        l.solve_lower_triangular_mut(&mut b);
        symmetrize(&mut b);
        let (values, y) = symmetric_eigen_sorted(b)?;
        // Back-substitute: V = L^-T Y.
        let mut vectors = y;
        l.transpose().solve_upper_triangular_mut(&mut vectors);
        Ok(GeneralizedEigen { eigenvalues: values, eigenvectors: vectors })
    }
}

/// Smallest `count` eigenpairs of `(A, M)` by shift-invert subspace iteration
/// with a deterministic seeded start block. Intended for pencils too large
/// for the dense path; the shift must stay below the spectrum.
pub fn shift_invert_lowest(
    a: &DMatrix<f64>,
    m: &DMatrix<f64>,
    count: usize,
    shift: f64,
    max_iter: usize,
    tol: f64,
) -> Result<GeneralizedEigen> {
    let n = a.nrows();
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!("count {count} out of range 1..={n}")));
    }
    let block = (count + 8).min(n);
    let shifted = a - m * shift;
    let chol = shifted
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("shift must stay below the spectrum".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut x = DMatrix::from_fn(n, block, |_, _| rng.gen::<f64>() - 0.5);
    let mut prev: Option<Vec<f64>> = None;
    let mut ritz_values = Vec::new();
    let mut ritz_vectors = DMatrix::zeros(n, block);
    for _ in 0..max_iter {
        // x <- (A - shift M)^-1 M x, then M-orthonormalize.
        let mut y = m * &x;
        chol.solve_mut(&mut y);
        m_orthonormalize(&mut y, m);
        // Rayleigh-Ritz on the block.
        let ax = a * &y;
        let mut small_a = y.transpose() * ax;
        symmetrize(&mut small_a);
        let (vals, vecs) = symmetric_eigen_sorted(small_a)?;
        ritz_vectors = &y * &vecs;
        ritz_values = vals;
        if let Some(p) = &prev {
            let delta = ritz_values
                .iter()
                .take(count)
                .zip(p.iter())
                .map(|(c, o)| (c - o).abs() / (1.0 + c.abs()))
                .fold(0.0f64, f64::max);
            if delta < tol {
                break;
            }
        }
        prev = Some(ritz_values.iter().take(count).copied().collect());
        x = ritz_vectors.clone();
    }
    let eigenvalues: Vec<f64> = ritz_values.iter().take(count).copied().collect();
    let eigenvectors = ritz_vectors.columns(0, count).into_owned();
    Ok(GeneralizedEigen { eigenvalues, eigenvectors })
}

/// Modified Gram-Schmidt in the M-inner product.
fn m_orthonormalize(x: &mut DMatrix<f64>, m: &DMatrix<f64>) {
    let cols = x.ncols();
    for j in 0..cols {
        for k in 0..j {
            let mk = m * x.column(k);
            let proj = x.column(j).dot(&mk);
            let col_k = x.column(k).into_owned();
            let mut col_j = x.column_mut(j);
            col_j.axpy(-proj, &col_k, 1.0);
        }
        let mj = m * x.column(j);
        let nrm = x.column(j).dot(&mj).sqrt();
        if nrm > 0.0 {
            x.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
}

/// Largest singular value of a linear operator given by a matrix-free apply
/// of `C` and `C^T`, via deterministic power iteration on `C^T C`.
pub fn operator_norm<F, G>(n: usize, apply: F, apply_t: G, max_iter: usize, tol: f64) -> f64
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0x7517_ed00);
    let mut v = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
    v /= v.norm();
    let mut sigma2 = 0.0f64;
    for _ in 0..max_iter {
        let w = apply_t(&apply(&v));
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        let rel = (next - sigma2).abs() / next.max(f64::MIN_POSITIVE);
        v = w / next;
        if rel < tol && sigma2 > 0.0 {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    sigma2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn generalized_eigen_diagonal_mass() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let g = generalized_symmetric_eigen(&a, &m).unwrap();
        // Characteristic polynomial: det([2-l, 1; 1, 2-4l]) = 4l^2 - 10l + 3.
        let disc = (100.0f64 - 48.0).sqrt();
        let expect = [(10.0 - disc) / 8.0, (10.0 + disc) / 8.0];
        assert_relative_eq!(g.eigenvalues[0], expect[0], epsilon = 1e-12);
        assert_relative_eq!(g.eigenvalues[1], expect[1], epsilon = 1e-12);
        // M-orthonormality.
        let v = &g.eigenvectors;
        let gram = v.transpose() * &m * v;
        assert_relative_eq!(gram[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(gram[(1, 1)], 1.0, epsilon = 1e-12);
        assert!(gram[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn generalized_eigen_dense_mass_matches_diagonal_path() {
        // Same pencil, mass given as a dense (non-diagonal) SPD matrix.
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 2.0, 0.5, 0.0, 0.5, 2.0]);
        let g = generalized_symmetric_eigen(&a, &m).unwrap();
        for k in 0..3 {
            let v = g.eigenvectors.column(k);
            let res = (&a * v - &m * v * g.eigenvalues[k]).norm();
            assert!(res < 1e-10, "residual {res}");
        }
    }

    #[test]
    fn shift_invert_matches_dense() {
        let n = 30;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let m = DMatrix::from_diagonal(&DVector::from_element(n, 0.5));
        let dense = generalized_symmetric_eigen(&a, &m).unwrap();
        let iter = shift_invert_lowest(&a, &m, 4, -1.0, 200, 1e-12).unwrap();
        for k in 0..4 {
            assert_relative_eq!(iter.eigenvalues[k], dense.eigenvalues[k], epsilon = 1e-8);
        }
    }

    #[test]
    fn operator_norm_of_symmetric_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 3.0]);
        let norm = operator_norm(
            2,
            |v| &a * v,
            |v| a.transpose() * v,
            500,
            1e-14,
        );
        assert_relative_eq!(norm, 4.0, epsilon = 1e-10);
    }
}
