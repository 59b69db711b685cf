//! Discrete Weyl translations on the torus and the chord (characteristic
//! function) representation they induce.
//!
//! `T_{a,b} = exp(i pi a b / N) * V_a * W_b`, where `W_b` multiplies
//! amplitude `i` by exp(2 pi i b i / N) and `V_a` shifts amplitude `i` to
//! `i + a (mod N)`. The symmetric Weyl phase makes the adjoint a translation
//! with negated indices, and the N^2 translations form an orthogonal
//! operator basis: `Tr(T^dag_{mu,nu} T_{a,b}) = N delta delta`. Channels
//! that mix translations act diagonally on the chord coefficients
//! `chi(mu,nu) = Tr(T^dag_{mu,nu} rho)`, which is what makes the fast
//! noise path below possible.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::fft;
use crate::scalar::{phase, Scalar};
use crate::torus::{DensityOperator, StateVector, TorusGeometry};

/// Integer displacement (a, b): `a/N` in position, `b/N` in momentum,
/// both reduced modulo N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TranslationIndex {
    a: usize,
    b: usize,
}

impl TranslationIndex {
    pub fn new(dim: usize, a: i64, b: i64) -> Self {
        let n = dim as i64;
        Self {
            a: a.rem_euclid(n) as usize,
            b: b.rem_euclid(n) as usize,
        }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl<T: Scalar> StateVector<T> {
    /// Apply `T_{a,b}`.
    pub fn translate(&self, t: TranslationIndex) -> Self {
        let n = self.geometry().dim();
        let nf = T::from_index(n);
        let weyl = phase(T::PI() * T::from_index(t.a) * T::from_index(t.b) / nf);
        let two_pi = T::cast(2.0) * T::PI();
        let src = self.amplitudes();
        let mut out = Array1::zeros(n);
        for i in 0..n {
            let j = (i + n - t.a) % n;
            out[i] = weyl * phase(two_pi * T::from_index(t.b) * T::from_index(j) / nf) * src[j];
        }
        Self::from_parts_unchecked(self.geometry(), out)
    }

    /// Apply `T^dag_{a,b}`; exact inverse of [`Self::translate`].
    pub fn translate_adjoint(&self, t: TranslationIndex) -> Self {
        let n = self.geometry().dim();
        let nf = T::from_index(n);
        let weyl = phase(-T::PI() * T::from_index(t.a) * T::from_index(t.b) / nf);
        let two_pi = T::cast(2.0) * T::PI();
        let src = self.amplitudes();
        let mut out = Array1::zeros(n);
        for i in 0..n {
            let j = (i + t.a) % n;
            out[i] = weyl * phase(-two_pi * T::from_index(t.b) * T::from_index(i) / nf) * src[j];
        }
        Self::from_parts_unchecked(self.geometry(), out)
    }
}

impl<T: Scalar> DensityOperator<T> {
    /// Conjugate by a translation: `T rho T^dag`. The Weyl phases cancel,
    /// leaving `rho'_{ij} = rho_{i-a,j-a} exp(2 pi i b (i-j)/N)`.
    pub fn translate(&self, t: TranslationIndex) -> Self {
        let n = self.geometry().dim();
        let nf = T::from_index(n);
        let two_pi = T::cast(2.0) * T::PI();
        let src = self.matrix();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            let si = (i + n - t.a) % n;
            for j in 0..n {
                let sj = (j + n - t.a) % n;
                let d = (i + n - j) % n;
                out[(i, j)] = src[(si, sj)]
                    * phase(two_pi * T::from_index(t.b) * T::from_index(d) / nf);
            }
        }
        Self::from_parts_unchecked(self.geometry(), out)
    }

    /// Expand rho over the translation basis.
    ///
    /// Each coefficient is a single trace `Tr(T^dag_{mu,nu} rho)`; the
    /// shift-plus-phase structure of `T` reduces it to a length-N transform
    /// of one cyclic diagonal, so the full table costs O(N^2 log N).
    pub fn chord_transform(&self) -> ChordCoefficients<T> {
        let n = self.geometry().dim();
        let nf = T::from_index(n);
        let src = self.matrix();
        let mut chi = Array2::zeros((n, n));
        let mut diag: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
        for mu in 0..n {
            for i in 0..n {
                diag[i] = src[((i + mu) % n, i)];
            }
            fft::forward(&mut diag);
            for nu in 0..n {
                chi[(mu, nu)] = diag[nu]
                    * phase(-T::PI() * T::from_index(mu) * T::from_index(nu) / nf);
            }
        }
        ChordCoefficients {
            geometry: self.geometry(),
            chi,
        }
    }
}

/// Chord-space coefficients `chi(mu, nu) = Tr(T^dag_{mu,nu} rho)`.
#[derive(Clone, Debug)]
pub struct ChordCoefficients<T: Scalar> {
    geometry: TorusGeometry<T>,
    chi: Array2<Complex<T>>,
}

impl<T: Scalar> ChordCoefficients<T> {
    pub fn geometry(&self) -> TorusGeometry<T> {
        self.geometry
    }

    pub fn coefficients(&self) -> &Array2<Complex<T>> {
        &self.chi
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.chi
    }

    /// Reconstruct `rho = (1/N) sum_{mu,nu} chi(mu,nu) T_{mu,nu}`.
    pub fn inverse(&self) -> DensityOperator<T> {
        let n = self.geometry.dim();
        let nf = T::from_index(n);
        let scale = Complex::new(T::one() / nf, T::zero());
        let mut matrix = Array2::zeros((n, n));
        let mut row: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
        for mu in 0..n {
            for (nu, slot) in row.iter_mut().enumerate() {
                *slot = self.chi[(mu, nu)]
                    * phase(T::PI() * T::from_index(mu) * T::from_index(nu) / nf);
            }
            fft::inverse(&mut row);
            for c in 0..n {
                matrix[((c + mu) % n, c)] = row[c] * scale;
            }
        }
        DensityOperator::from_parts_unchecked(self.geometry, matrix)
    }
}
