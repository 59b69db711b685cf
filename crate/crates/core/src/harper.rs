//! The kicked Harper map: classical iteration on the torus and its quantum
//! propagator on the finite Hilbert space.
//!
//! One classical step applies the momentum kick first and then the drift
//! with the updated momentum:
//!
//! ```text
//! p' = p - chi1 sin(2 pi q)
//! q' = q + chi2 sin(2 pi p')     (mod 1)
//! ```
//!
//! The dynamics is regular for kick strengths below roughly 0.11 and fully
//! chaotic above roughly 0.63; the default 0.4964 sits in between and gives
//! a mixed phase space with a resonance island embedded in a chaotic sea.
//!
//! The quantum step is the split unitary
//! `U = exp(i N chi2 cos(2 pi q^)) exp(i N chi1 cos(2 pi p^))`,
//! applied right to left: transform to momentum, multiply by the cached
//! momentum phases, transform back, multiply by the position phases. One
//! application costs O(N log N).

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::Result;
use crate::scalar::{phase, Scalar};
use crate::torus::{DensityOperator, PhasePoint, StateVector, TorusGeometry};

/// Kick strength used throughout the mixed-phase-space experiments.
pub const DEFAULT_KICK: f64 = 0.4964;

/// Even-iterate excursion below which a classical orbit counts as trapped
/// in a resonance island (the islands sit on a period-2 orbit, so odd
/// iterates visit the partner lobe).
pub const ISLAND_CONFINEMENT_RADIUS: f64 = 0.2;

/// Kick strengths of the two Harper factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarperParams<T: Scalar> {
    pub chi1: T,
    pub chi2: T,
}

impl<T: Scalar> Default for HarperParams<T> {
    fn default() -> Self {
        Self::uniform(T::cast(DEFAULT_KICK))
    }
}

impl<T: Scalar> HarperParams<T> {
    pub fn new(chi1: T, chi2: T) -> Self {
        Self { chi1, chi2 }
    }

    pub fn uniform(chi: T) -> Self {
        Self { chi1: chi, chi2: chi }
    }

    /// One step of the classical map.
    pub fn step(&self, x: PhasePoint<T>) -> PhasePoint<T> {
        let two_pi = T::cast(2.0) * T::PI();
        let p = x.p - self.chi1 * (two_pi * x.q).sin();
        let q = x.q + self.chi2 * (two_pi * p).sin();
        PhasePoint::new(q, p)
    }

    /// The seed followed by `iterations` iterates.
    pub fn orbit(&self, seed: PhasePoint<T>, iterations: usize) -> Vec<PhasePoint<T>> {
        let mut points = Vec::with_capacity(iterations + 1);
        let mut x = seed;
        points.push(x);
        for _ in 0..iterations {
            x = self.step(x);
            points.push(x);
        }
        points
    }

    /// Largest distance of any even iterate from the seed.
    pub fn island_excursion(&self, seed: PhasePoint<T>, iterations: usize) -> T {
        let mut x = seed;
        let mut worst = T::zero();
        for it in 1..=iterations {
            x = self.step(x);
            if it % 2 == 0 {
                worst = worst.max(x.distance(&seed));
            }
        }
        worst
    }

    /// Whether the orbit of `seed` stays trapped in a resonance island.
    pub fn is_island(&self, seed: PhasePoint<T>, iterations: usize) -> bool {
        self.island_excursion(seed, iterations) < T::cast(ISLAND_CONFINEMENT_RADIUS)
    }
}

/// The quantized Harper step with its diagonal phase factors cached.
#[derive(Clone, Debug)]
pub struct QuantumPropagator<T: Scalar> {
    geometry: TorusGeometry<T>,
    params: HarperParams<T>,
    position_phase: Array1<Complex<T>>,
    momentum_phase: Array1<Complex<T>>,
}

impl<T: Scalar> QuantumPropagator<T> {
    pub fn new(geometry: TorusGeometry<T>, params: HarperParams<T>) -> Self {
        let n = geometry.dim();
        let nf = T::from_index(n);
        let two_pi = T::cast(2.0) * T::PI();
        let mut position_phase = Array1::zeros(n);
        let mut momentum_phase = Array1::zeros(n);
        for i in 0..n {
            let angle = two_pi * T::from_index(i) / nf;
            position_phase[i] = phase(nf * params.chi2 * angle.cos());
            momentum_phase[i] = phase(nf * params.chi1 * angle.cos());
        }
        Self {
            geometry,
            params,
            position_phase,
            momentum_phase,
        }
    }

    pub fn geometry(&self) -> TorusGeometry<T> {
        self.geometry
    }

    pub fn params(&self) -> HarperParams<T> {
        self.params
    }

    pub fn position_phases(&self) -> &Array1<Complex<T>> {
        &self.position_phase
    }

    pub fn momentum_phases(&self) -> &Array1<Complex<T>> {
        &self.momentum_phase
    }

    /// Apply one step of `U` to a pure state.
    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        self.geometry.check_same(&state.geometry())?;
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, state: &mut StateVector<T>) {
        let n = self.geometry.dim();
        let inv_n = Complex::new(T::one() / T::from_index(n), T::zero());
        let amps = state.amplitudes_mut();
        let mut buf: Vec<Complex<T>> = amps.to_vec();
        crate::fft::forward(&mut buf);
        for (v, d) in buf.iter_mut().zip(self.momentum_phase.iter()) {
            *v *= d;
        }
        crate::fft::inverse(&mut buf);
        for ((a, v), d) in amps.iter_mut().zip(buf).zip(self.position_phase.iter()) {
            *a = v * inv_n * d;
        }
    }

    /// Apply `t` steps of `U`.
    pub fn apply_steps(&self, state: &StateVector<T>, t: usize) -> Result<StateVector<T>> {
        self.geometry.check_same(&state.geometry())?;
        let mut out = state.clone();
        for _ in 0..t {
            self.apply_in_place(&mut out);
        }
        Ok(out)
    }

    /// Conjugate a density operator: `U rho U^dag`, via the split step on
    /// every column of `rho` and then on every column of the adjoint.
    pub fn apply_density(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        self.geometry.check_same(&rho.geometry())?;
        let n = self.geometry.dim();
        let mut work = rho.matrix().clone();
        self.apply_to_columns(&mut work);
        // (U (U rho)^dag)^dag = U rho U^dag
        let mut adj = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                adj[(i, j)] = work[(j, i)].conj();
            }
        }
        self.apply_to_columns(&mut adj);
        for i in 0..n {
            for j in 0..n {
                work[(i, j)] = adj[(j, i)].conj();
            }
        }
        let mut out = DensityOperator::from_parts_unchecked(self.geometry, work);
        out.symmetrize();
        Ok(out)
    }

    fn apply_to_columns(&self, m: &mut Array2<Complex<T>>) {
        let n = self.geometry.dim();
        let inv_n = Complex::new(T::one() / T::from_index(n), T::zero());
        let mut buf: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..n {
            for i in 0..n {
                buf[i] = m[(i, j)];
            }
            crate::fft::forward(&mut buf);
            for (v, d) in buf.iter_mut().zip(self.momentum_phase.iter()) {
                *v *= d;
            }
            crate::fft::inverse(&mut buf);
            for i in 0..n {
                m[(i, j)] = buf[i] * inv_n * self.position_phase[i];
            }
        }
    }
}
