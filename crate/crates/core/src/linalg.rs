//! Dense Hermitian eigensolver and small matrix helpers.
//!
//! A cyclic complex Jacobi iteration keeps the whole crate generic over the
//! scalar type; the matrices here are at most a few hundred rows, where
//! Jacobi is plenty fast and unconditionally stable.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::scalar::Scalar;

/// Eigendecomposition of a Hermitian matrix: `values` ascending, `vectors`
/// holding the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Scalar> {
    pub values: Array1<T>,
    pub vectors: Array2<Complex<T>>,
}

/// Diagonalize a Hermitian matrix by cyclic Jacobi rotations.
///
/// Only the Hermitian part of the input is seen, so the tiny anti-Hermitian
/// residue of a numerically symmetrized operator does not perturb the result.
pub fn eigh<T: Scalar>(matrix: &Array2<Complex<T>>) -> HermitianEigen<T> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "eigh requires a square matrix");

    // work on the explicit Hermitian average
    let mut a = Array2::<Complex<T>>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (matrix[(i, j)] + matrix[(j, i)].conj()) * Complex::new(T::cast(0.5), T::zero());
        }
    }
    let mut v = Array2::<Complex<T>>::zeros((n, n));
    for i in 0..n {
        v[(i, i)] = Complex::new(T::one(), T::zero());
    }

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt().max(T::min_positive_value());
    let stop = scale * T::epsilon() * T::from_index(n);
    let skip = scale * T::epsilon() * T::cast(1e-2);

    for _sweep in 0..60 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs_apq = apq.norm();
                if abs_apq <= skip {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (abs_apq + abs_apq);
                let t = if tau >= T::zero() {
                    -T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                // s = t*c*exp(-i arg(apq))
                let s = apq.conj() * Complex::new(t * c / abs_apq, T::zero());
                let s_conj = s.conj();
                let cc = Complex::new(c, T::zero());

                // A <- A R (columns p, q)
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cc + aiq * s;
                    a[(i, q)] = aiq * cc - aip * s_conj;
                }
                // A <- R^dag A (rows p, q)
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cc + aqj * s_conj;
                    a[(q, j)] = aqj * cc - apj * s;
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

                // V <- V R
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cc + viq * s;
                    v[(i, q)] = viq * cc - vip * s_conj;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let values = Array1::from_iter(order.iter().map(|&i| a[(i, i)].re));
    let mut vectors = Array2::<Complex<T>>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    HermitianEigen { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Scalar>(matrix: &Array2<Complex<T>>) -> T {
    eigh(matrix).values[0]
}

/// Orthonormalize the columns of a tall matrix in place (modified
/// Gram-Schmidt with one re-orthogonalization pass). Requires full column
/// rank, which holds almost surely for the random matrices fed to it.
pub fn orthonormalize_columns<T: Scalar>(m: &mut Array2<Complex<T>>) {
    let (rows, cols) = m.dim();
    assert!(cols <= rows);
    for j in 0..cols {
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = Complex::new(T::zero(), T::zero());
                for r in 0..rows {
                    proj += m[(r, i)].conj() * m[(r, j)];
                }
                for r in 0..rows {
                    let mi = m[(r, i)];
                    m[(r, j)] -= mi * proj;
                }
            }
        }
        let norm = (0..rows).map(|r| m[(r, j)].norm_sqr()).sum::<T>().sqrt();
        let inv = Complex::new(T::one() / norm, T::zero());
        for r in 0..rows {
            m[(r, j)] *= inv;
        }
    }
}
