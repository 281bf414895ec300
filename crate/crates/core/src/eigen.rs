//! Cyclic Jacobi eigenvalues for real symmetric and complex Hermitian matrices.
//!
//! A Hermitian `H = A + iB` is handled through its real symmetric embedding
//! `[[A, -B], [B, A]]`, whose spectrum is the spectrum of `H` with every
//! eigenvalue doubled. Sweeps stop once the off-diagonal Frobenius norm drops
//! to `OFF_DIAGONAL_TOLERANCE`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}

/// Eigenvalues in ascending order and matching unit eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

pub fn jacobi_symmetric(matrix: &DMatrix<f64>) -> Result<SymmetricEigen, EigenError> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(EigenError::NotSquare {
            rows: n,
            cols: matrix.ncols(),
        });
    }
    let mut a = (matrix + matrix.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_TOLERANCE {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(EigenError::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation annihilating a[p][q] (Rutishauser's stable form).
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Real symmetric `2n x 2n` embedding of a complex `n x n` matrix.
pub fn real_embedding(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<Complex64>,
}

/// Eigen-decomposition of a Hermitian matrix; only its Hermitian part is used.
pub fn jacobi_hermitian(h: &DMatrix<Complex64>) -> Result<HermitianEigen, EigenError> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(EigenError::NotSquare {
            rows: n,
            cols: h.ncols(),
        });
    }
    let sym = real_embedding(&((h + h.adjoint()) * Complex64::new(0.5, 0.0)));
    let eig = jacobi_symmetric(&sym)?;

    // Each eigenvalue shows up twice; the embedded vectors (u, w) map to u + iw.
    // Greedy Gram-Schmidt over the candidate vectors picks an orthonormal set of n.
    let mut values = Vec::with_capacity(n);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if basis.len() == n {
            break;
        }
        let mut z = DVector::from_fn(n, |r, _| {
            Complex64::new(eig.vectors[(r, k)], eig.vectors[(r + n, k)])
        });
        for b in &basis {
            let overlap = b.dotc(&z);
            z -= b * overlap;
        }
        let norm = z.norm();
        if norm > 0.5 {
            basis.push(z / Complex64::new(norm, 0.0));
            values.push(lambda);
        }
    }
    // Pairs are exact in theory; should greedy selection fall short, take every other value.
    if basis.len() < n {
        values = eig.values.iter().step_by(2).copied().collect();
        basis.clear();
        for k in (0..2 * n).step_by(2) {
            basis.push(DVector::from_fn(n, |r, _| {
                Complex64::new(eig.vectors[(r, k)], eig.vectors[(r + n, k)])
            }));
        }
    }
    Ok(HermitianEigen {
        values,
        vectors: DMatrix::from_columns(&basis),
    })
}

pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>, EigenError> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(EigenError::NotSquare {
            rows: n,
            cols: h.ncols(),
        });
    }
    let sym = real_embedding(&((h + h.adjoint()) * Complex64::new(0.5, 0.0)));
    let eig = jacobi_symmetric(&sym)?;
    Ok(eig.values.iter().step_by(2).copied().collect())
}

pub fn largest_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64, EigenError> {
    Ok(hermitian_eigenvalues(h)?
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let eig = jacobi_symmetric(&m).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let eig = jacobi_symmetric(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_has_spectrum_plus_minus_one() {
        let i = Complex64::i();
        let y = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)]);
        let values = hermitian_eigenvalues(&y).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-13 && (values[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn agrees_with_nalgebra_on_random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..20 {
                let h = random_hermitian(n, &mut rng);
                let ours = jacobi_hermitian(&h).unwrap();
                let mut reference: Vec<f64> =
                    h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                reference.sort_by(f64::total_cmp);
                for (a, b) in ours.values.iter().zip(&reference) {
                    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
                }
                let plain = hermitian_eigenvalues(&h).unwrap();
                for (a, b) in plain.iter().zip(&reference) {
                    assert!((a - b).abs() < 1e-10);
                }
                // H V = V diag(values), V unitary
                let v = &ours.vectors;
                let d = DMatrix::from_diagonal(&DVector::from_iterator(
                    n,
                    ours.values.iter().map(|&x| Complex64::new(x, 0.0)),
                ));
                assert!((&h * v - v * d).norm() < 1e-9);
                assert!((v.adjoint() * v - DMatrix::identity(n, n)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let h = DMatrix::<Complex64>::identity(4, 4);
        let eig = jacobi_hermitian(&h).unwrap();
        assert!(eig.values.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!((eig.vectors.adjoint() * &eig.vectors - DMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            jacobi_symmetric(&m),
            Err(EigenError::NotSquare { rows: 2, cols: 3 })
        ));
    }
}
