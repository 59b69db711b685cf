//! Finite Hilbert space over the unit torus.
//!
//! A register of `k` qubits spans an N = 2^k dimensional space whose
//! computational basis is read as a position basis with q_i = i/N. The
//! momentum basis follows by discrete Fourier transform, and a single basis
//! state occupies phase-space area 1/N, so the effective Planck constant is
//! 1/(2*pi*N).

use ndarray::{Array1, Array2};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fft;
use crate::linalg;
use crate::scalar::{circle_distance, phase, wrap_unit, Scalar};

/// Smallest supported qubit count.
pub const MIN_QUBITS: u32 = 2;
/// Largest supported qubit count (memory guard: N^2 density operators).
pub const MAX_QUBITS: u32 = 14;

/// A point (q, p) on the unit torus, both coordinates in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<T: Scalar> {
    pub q: T,
    pub p: T,
}

impl<T: Scalar> PhasePoint<T> {
    /// Wraps both coordinates onto `[0, 1)`.
    pub fn new(q: T, p: T) -> Self {
        Self {
            q: wrap_unit(q),
            p: wrap_unit(p),
        }
    }

    /// Euclidean distance on the torus (minimum image in both coordinates).
    pub fn distance(&self, other: &Self) -> T {
        let dq = circle_distance(self.q, other.q);
        let dp = circle_distance(self.p, other.p);
        (dq * dq + dp * dp).sqrt()
    }
}

/// Dimensions of the quantized torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusGeometry<T: Scalar> {
    k: u32,
    n: usize,
    hbar_eff: T,
}

impl<T: Scalar> TorusGeometry<T> {
    /// Build the geometry for `k` qubits (N = 2^k, hbar_eff = 1/(2 pi N)).
    pub fn new(k: u32) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&k) {
            return Err(Error::QubitCountOutOfRange {
                k,
                min: MIN_QUBITS,
                max: MAX_QUBITS,
            });
        }
        let n = 1usize << k;
        let hbar_eff = T::one() / (T::cast(2.0) * T::PI() * T::from_index(n));
        Ok(Self { k, n, hbar_eff })
    }

    pub fn qubits(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hbar_eff(&self) -> T {
        self.hbar_eff
    }

    /// Position (equivalently momentum) coordinate of basis label `i`.
    pub fn coordinate(&self, i: usize) -> T {
        T::from_index(i) / T::from_index(self.n)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeometryMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Pure state of the register, amplitudes in the position basis.
///
/// Qubit `j` corresponds to bit `j` (least significant) of the position
/// index; every entanglement quantity in this crate relies on that fixed
/// tensor factorization.
#[derive(Clone, Debug)]
pub struct StateVector<T: Scalar> {
    geometry: TorusGeometry<T>,
    amplitudes: Array1<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Wrap a full amplitude vector, enforcing normalization.
    pub fn from_amplitudes(
        geometry: TorusGeometry<T>,
        amplitudes: Array1<Complex<T>>,
    ) -> Result<Self> {
        if amplitudes.len() != geometry.dim() {
            return Err(Error::DimensionMismatch {
                len: amplitudes.len(),
                expected: geometry.dim(),
            });
        }
        let state = Self {
            geometry,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - T::one()).abs() > T::UNIT_TOL {
            return Err(Error::NotNormalized {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(state)
    }

    /// Position eigenstate `|i>`.
    pub fn basis_state(geometry: TorusGeometry<T>, index: usize) -> Result<Self> {
        if index >= geometry.dim() {
            return Err(Error::DimensionMismatch {
                len: index,
                expected: geometry.dim(),
            });
        }
        let mut amplitudes = Array1::zeros(geometry.dim());
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            geometry,
            amplitudes,
        })
    }

    /// Minimum-uncertainty wave packet centred at `(q0, p0)`.
    ///
    /// Gaussian of width 1/sqrt(N) in position and momentum, periodized over
    /// the integer images m = -1, 0, 1 (further images are below 1e-30 for
    /// N >= 16) and normalized after construction:
    ///
    /// `psi_i ~ sum_m exp(-pi N (q_i - q0 + m)^2) exp(2 pi i N p0 (q_i + m))`
    pub fn coherent(geometry: TorusGeometry<T>, center: PhasePoint<T>) -> Self {
        let n = geometry.dim();
        let nf = T::from_index(n);
        let two_pi = T::cast(2.0) * T::PI();
        let mut amplitudes = Array1::zeros(n);
        for i in 0..n {
            let qi = geometry.coordinate(i);
            let mut acc = Complex::new(T::zero(), T::zero());
            for m in [-1.0, 0.0, 1.0] {
                let m = T::cast(m);
                let dq = qi - center.q + m;
                let gauss = (-T::PI() * nf * dq * dq).exp();
                acc += phase(two_pi * nf * center.p * (qi + m)) * gauss;
            }
            amplitudes[i] = acc;
        }
        let mut state = Self {
            geometry,
            amplitudes,
        };
        state.renormalize();
        state
    }

    /// `(|0..0> + |1..1>)/sqrt(2)`.
    pub fn ghz(geometry: TorusGeometry<T>) -> Self {
        let n = geometry.dim();
        let mut amplitudes = Array1::zeros(n);
        let w = Complex::new(T::one() / T::cast(2.0).sqrt(), T::zero());
        amplitudes[0] = w;
        amplitudes[n - 1] = w;
        Self {
            geometry,
            amplitudes,
        }
    }

    /// Haar-random pure state: normalized vector of iid complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(geometry: TorusGeometry<T>, rng: &mut R) -> Self {
        let n = geometry.dim();
        let mut amplitudes = Array1::zeros(n);
        for a in amplitudes.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *a = Complex::new(T::cast(re), T::cast(im));
        }
        let mut state = Self {
            geometry,
            amplitudes,
        };
        state.renormalize();
        state
    }

    pub fn geometry(&self) -> TorusGeometry<T> {
        self.geometry
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Array1<Complex<T>> {
        &mut self.amplitudes
    }

    pub(crate) fn from_parts_unchecked(
        geometry: TorusGeometry<T>,
        amplitudes: Array1<Complex<T>>,
    ) -> Self {
        Self {
            geometry,
            amplitudes,
        }
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm();
        let inv = Complex::new(T::one() / norm, T::zero());
        for a in self.amplitudes.iter_mut() {
            *a *= inv;
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Unitary change to the momentum representation: the returned vector
    /// holds `<p_m|psi>` with kernel exp(-2 pi i m n / N)/sqrt(N).
    pub fn to_momentum(&self) -> Self {
        let mut data: Vec<Complex<T>> = self.amplitudes.to_vec();
        fft::forward(&mut data);
        let scale = Complex::new(T::one() / T::from_index(self.geometry.dim()).sqrt(), T::zero());
        for v in data.iter_mut() {
            *v *= scale;
        }
        Self {
            geometry: self.geometry,
            amplitudes: Array1::from_vec(data),
        }
    }

    /// Inverse of [`Self::to_momentum`].
    pub fn to_position(&self) -> Self {
        let mut data: Vec<Complex<T>> = self.amplitudes.to_vec();
        fft::inverse(&mut data);
        let scale = Complex::new(T::one() / T::from_index(self.geometry.dim()).sqrt(), T::zero());
        for v in data.iter_mut() {
            *v *= scale;
        }
        Self {
            geometry: self.geometry,
            amplitudes: Array1::from_vec(data),
        }
    }

    /// Circular mean of the position distribution, on `[0, 1)`.
    pub fn position_mean(&self) -> T {
        circular_mean(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }

    /// Circular mean of the momentum distribution, on `[0, 1)`.
    pub fn momentum_mean(&self) -> T {
        circular_mean(self.to_momentum().amplitudes.iter().map(|a| a.norm_sqr()))
    }

    /// Density operator `|psi><psi|`.
    pub fn outer(&self) -> DensityOperator<T> {
        let n = self.geometry.dim();
        let mut matrix = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                matrix[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityOperator {
            geometry: self.geometry,
            matrix,
        }
    }

    /// Husimi distribution `|<coherent(q,p)|psi>|^2` on an `res x res` grid.
    pub fn husimi(&self, res: usize) -> Array2<T> {
        let mut grid = Array2::zeros((res, res));
        for iq in 0..res {
            for ip in 0..res {
                let center = PhasePoint::new(
                    T::from_index(iq) / T::from_index(res),
                    T::from_index(ip) / T::from_index(res),
                );
                let probe = Self::coherent(self.geometry, center);
                grid[(iq, ip)] = probe.inner(self).norm_sqr();
            }
        }
        grid
    }

    /// Phase-space centroid of the Husimi distribution (circular mean per
    /// coordinate), used for quantum-classical comparisons.
    pub fn husimi_centroid(&self, res: usize) -> PhasePoint<T> {
        let grid = self.husimi(res);
        let two_pi = T::cast(2.0) * T::PI();
        let mut zq = Complex::new(T::zero(), T::zero());
        let mut zp = Complex::new(T::zero(), T::zero());
        for iq in 0..res {
            for ip in 0..res {
                let w = grid[(iq, ip)];
                zq += phase(two_pi * T::from_index(iq) / T::from_index(res)) * w;
                zp += phase(two_pi * T::from_index(ip) / T::from_index(res)) * w;
            }
        }
        PhasePoint::new(
            wrap_unit(zq.arg() / two_pi),
            wrap_unit(zp.arg() / two_pi),
        )
    }
}

fn circular_mean<T: Scalar, I: IntoIterator<Item = T>>(weights: I) -> T {
    let weights: Vec<T> = weights.into_iter().collect();
    let n = weights.len();
    let two_pi = T::cast(2.0) * T::PI();
    let mut z = Complex::new(T::zero(), T::zero());
    for (i, w) in weights.iter().enumerate() {
        z += phase(two_pi * T::from_index(i) / T::from_index(n)) * *w;
    }
    wrap_unit(z.arg() / two_pi)
}

/// Mixed state of the register, an N x N matrix in the position basis.
#[derive(Clone, Debug)]
pub struct DensityOperator<T: Scalar> {
    geometry: TorusGeometry<T>,
    matrix: Array2<Complex<T>>,
}

impl<T: Scalar> DensityOperator<T> {
    /// Wrap a matrix, enforcing Hermiticity and unit trace.
    pub fn from_matrix(geometry: TorusGeometry<T>, matrix: Array2<Complex<T>>) -> Result<Self> {
        if matrix.nrows() != geometry.dim() || matrix.ncols() != geometry.dim() {
            return Err(Error::DimensionMismatch {
                len: matrix.nrows(),
                expected: geometry.dim(),
            });
        }
        let op = Self { geometry, matrix };
        let herm = op.hermiticity_residual();
        if herm > T::UNIT_TOL {
            return Err(Error::NotHermitian {
                residual: herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = op.trace();
        if (tr.re - T::one()).abs() > T::UNIT_TOL || tr.im.abs() > T::UNIT_TOL {
            return Err(Error::TraceNotOne {
                trace: tr.re.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(op)
    }

    pub fn from_pure(state: &StateVector<T>) -> Self {
        state.outer()
    }

    /// `I/N`.
    pub fn maximally_mixed(geometry: TorusGeometry<T>) -> Self {
        let n = geometry.dim();
        let mut matrix = Array2::zeros((n, n));
        let w = Complex::new(T::one() / T::from_index(n), T::zero());
        for i in 0..n {
            matrix[(i, i)] = w;
        }
        Self { geometry, matrix }
    }

    pub(crate) fn from_parts_unchecked(
        geometry: TorusGeometry<T>,
        matrix: Array2<Complex<T>>,
    ) -> Self {
        Self { geometry, matrix }
    }

    pub fn geometry(&self) -> TorusGeometry<T> {
        self.geometry
    }

    pub fn matrix(&self) -> &Array2<Complex<T>> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.matrix
    }

    pub fn trace(&self) -> Complex<T> {
        let mut tr = Complex::new(T::zero(), T::zero());
        for i in 0..self.geometry.dim() {
            tr += self.matrix[(i, i)];
        }
        tr
    }

    /// `Tr rho^2`, evaluated as the squared Frobenius norm.
    pub fn purity(&self) -> T {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max_ij |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_residual(&self) -> T {
        let n = self.geometry.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Smallest eigenvalue; `O(N^3)`, intended for diagnostics and tests.
    pub fn min_eigenvalue(&self) -> T {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// Replace rho by its Hermitian average. Channel and propagator
    /// implementations call this so accumulated rounding never leaks an
    /// anti-Hermitian component.
    pub(crate) fn symmetrize(&mut self) {
        let n = self.geometry.dim();
        let half = Complex::new(T::cast(0.5), T::zero());
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * half;
                self.matrix[(i, j)] = avg;
                self.matrix[(j, i)] = avg.conj();
            }
            let d = self.matrix[(i, i)];
            self.matrix[(i, i)] = Complex::new(d.re, T::zero());
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), |acc, d| acc.max(d))
    }
}
