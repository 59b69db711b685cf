//! The three noise channels: diffusive Gaussian translations, phase damping
//! and depolarizing. All three are mixtures of Weyl translations, which
//! gives every channel two consistent faces: an exact action on density
//! operators and a stochastic unraveling over pure-state trajectories.
//!
//! The diffusive channel weights come from the closed-form chord-space
//! kernel
//!
//! `c~(mu,nu) = exp[-1/2 (eps N / pi)^2 (sin^2(pi mu/N) + sin^2(pi nu/N))]`
//!
//! whose discrete Fourier transform `c(q,p)` is a periodic Gaussian of
//! width eps/(2 pi) around the origin: with high probability the state is
//! left untouched, otherwise it is displaced by a few lattice sites.
//! Because translation conjugation is diagonal in the chord basis, the
//! whole channel is an elementwise multiply by `c~` there; the literal
//! Kraus sum is kept as the independent slow path.

use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fft;
use crate::scalar::Scalar;
use crate::torus::{DensityOperator, TorusGeometry};
use crate::weyl::TranslationIndex;

/// Matrix dimension at which the chord path takes over from the Kraus sum.
pub const CHORD_PATH_MIN_DIM: usize = 64;

/// Diffusive-channel weights for one noise strength.
#[derive(Clone, Debug)]
pub struct NoiseKernel<T: Scalar> {
    geometry: TorusGeometry<T>,
    epsilon: T,
    /// Chord-space damping factors, `c_tilde[(mu, nu)] = f[mu] f[nu]`.
    c_tilde: Array2<T>,
    /// Translation weights, normalized to sum to one.
    weights: Array2<T>,
    /// Surviving (translation, weight) pairs after truncation, renormalized,
    /// sorted by descending weight.
    kept: Vec<(TranslationIndex, T)>,
    /// Cumulative distribution aligned with `kept`.
    cdf: Vec<T>,
    /// Total weight removed by truncation.
    truncation_error: T,
}

impl<T: Scalar> NoiseKernel<T> {
    pub fn new(geometry: TorusGeometry<T>, epsilon: T) -> Result<Self> {
        if epsilon < T::zero() {
            return Err(Error::EpsilonOutOfRange {
                epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
                context: "[0, inf) for the diffusive channel",
            });
        }
        let n = geometry.dim();
        let nf = T::from_index(n);

        // 1D chord factor f[mu] = exp(-1/2 (eps N/pi)^2 sin^2(pi mu/N))
        let alpha = epsilon * nf / T::PI();
        let half = T::cast(0.5);
        let f: Vec<T> = (0..n)
            .map(|mu| {
                let s = (T::PI() * T::from_index(mu) / nf).sin();
                (-half * alpha * alpha * s * s).exp()
            })
            .collect();

        let mut c_tilde = Array2::zeros((n, n));
        for mu in 0..n {
            for nu in 0..n {
                c_tilde[(mu, nu)] = f[mu] * f[nu];
            }
        }

        // g = DFT(f)/N is real and nonnegative up to rounding, because f is
        // an even positive-definite sequence; the weights factorize as
        // c(a, b) = g[a] g[b].
        let mut spectrum: Vec<Complex<T>> = f
            .iter()
            .map(|&x| Complex::new(x, T::zero()))
            .collect();
        fft::forward(&mut spectrum);
        let mut g: Vec<T> = Vec::with_capacity(n);
        for z in &spectrum {
            let v = z.re / nf;
            if v < -T::UNIT_TOL {
                return Err(Error::KernelNegativity {
                    weight: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            g.push(v.max(T::zero()));
        }

        let mut weights = Array2::zeros((n, n));
        let mut total = T::zero();
        for a in 0..n {
            for b in 0..n {
                let w = g[a] * g[b];
                weights[(a, b)] = w;
                total += w;
            }
        }
        for w in weights.iter_mut() {
            *w /= total;
        }

        // truncate relative to the peak, renormalize survivors
        let peak = weights.iter().fold(T::zero(), |acc, &w| acc.max(w));
        let cutoff = peak * T::WEIGHT_CUTOFF;
        let mut kept: Vec<(TranslationIndex, T)> = Vec::new();
        let mut kept_sum = T::zero();
        for a in 0..n {
            for b in 0..n {
                let w = weights[(a, b)];
                if w >= cutoff && w > T::zero() {
                    kept.push((TranslationIndex::new(n, a as i64, b as i64), w));
                    kept_sum += w;
                }
            }
        }
        let truncation_error = T::one() - kept_sum;
        for (_, w) in kept.iter_mut() {
            *w /= kept_sum;
        }
        kept.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
        let mut cdf = Vec::with_capacity(kept.len());
        let mut acc = T::zero();
        for (_, w) in &kept {
            acc += *w;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = T::one();
        }

        Ok(Self {
            geometry,
            epsilon,
            c_tilde,
            weights,
            kept,
            cdf,
            truncation_error,
        })
    }

    pub fn geometry(&self) -> TorusGeometry<T> {
        self.geometry
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn chord_factors(&self) -> &Array2<T> {
        &self.c_tilde
    }

    pub fn weights(&self) -> &Array2<T> {
        &self.weights
    }

    pub fn kept(&self) -> &[(TranslationIndex, T)] {
        &self.kept
    }

    pub fn truncation_error(&self) -> T {
        self.truncation_error
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn min_weight(&self) -> T {
        self.weights.iter().fold(T::infinity(), |acc, &w| acc.min(w))
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon == T::zero()
    }

    /// Literal Kraus sum over the surviving translations.
    pub fn apply_kraus(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        self.geometry.check_same(&rho.geometry())?;
        if self.is_identity() {
            return Ok(rho.clone());
        }
        let n = self.geometry.dim();
        let mut acc = Array2::<Complex<T>>::zeros((n, n));
        for &(t, w) in &self.kept {
            let term = rho.translate(t);
            let wz = Complex::new(w, T::zero());
            for (dst, src) in acc.iter_mut().zip(term.matrix().iter()) {
                *dst += *src * wz;
            }
        }
        let mut out = DensityOperator::from_parts_unchecked(self.geometry, acc);
        out.symmetrize();
        Ok(out)
    }

    /// Fast path: damp each chord coefficient by `c~` and transform back.
    pub fn apply_chord(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        self.geometry.check_same(&rho.geometry())?;
        if self.is_identity() {
            return Ok(rho.clone());
        }
        let mut chi = rho.chord_transform();
        for (z, &damp) in chi
            .coefficients_mut()
            .iter_mut()
            .zip(self.c_tilde.iter())
        {
            *z = z.scale(damp);
        }
        let mut out = chi.inverse();
        out.symmetrize();
        Ok(out)
    }

    /// Default application: chord path for large N, Kraus sum otherwise.
    pub fn apply(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        if self.geometry.dim() >= CHORD_PATH_MIN_DIM {
            self.apply_chord(rho)
        } else {
            self.apply_kraus(rho)
        }
    }

    /// Draw one translation with probability given by the weight table.
    pub fn sample_translation<R: Rng + ?Sized>(&self, rng: &mut R) -> TranslationIndex {
        sample_from_cdf(&self.kept, &self.cdf, rng)
    }

    /// Mixture view used by the trajectory estimators.
    pub fn mixture(&self) -> TranslationMixture<T> {
        TranslationMixture {
            entries: self.kept.clone(),
            cdf: self.cdf.clone(),
        }
    }

    /// Diagnostics helper: a copy with all weights scaled by `factor`,
    /// deliberately breaking normalization. Used to exercise the negative
    /// control of the channel verification suite.
    pub fn with_scaled_weights(&self, factor: T) -> Self {
        let mut out = self.clone();
        for w in out.weights.iter_mut() {
            *w *= factor;
        }
        for (_, w) in out.kept.iter_mut() {
            *w *= factor;
        }
        out
    }
}

fn sample_from_cdf<T: Scalar, R: Rng + ?Sized>(
    entries: &[(TranslationIndex, T)],
    cdf: &[T],
    rng: &mut R,
) -> TranslationIndex {
    // draw in f64 so identical streams give identical draws at any scalar
    let u = T::cast(rng.random::<f64>());
    match cdf.binary_search_by(|probe| {
        probe
            .partial_cmp(&u)
            .unwrap_or(std::cmp::Ordering::Greater)
    }) {
        Ok(i) => entries[(i + 1).min(entries.len() - 1)].0,
        Err(i) => entries[i.min(entries.len() - 1)].0,
    }
}

/// A finite mixture of translations with its sampling table; the common
/// currency between the exact channels and the trajectory unraveling.
#[derive(Clone, Debug)]
pub struct TranslationMixture<T: Scalar> {
    entries: Vec<(TranslationIndex, T)>,
    cdf: Vec<T>,
}

impl<T: Scalar> TranslationMixture<T> {
    pub fn from_entries(entries: Vec<(TranslationIndex, T)>) -> Self {
        let mut cdf = Vec::with_capacity(entries.len());
        let mut acc = T::zero();
        for (_, w) in &entries {
            acc += *w;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = T::one();
        }
        Self { entries, cdf }
    }

    /// Phase damping as a uniform mixture of the N momentum boosts:
    /// identity with weight 1 - eps + eps/N, each `T_{0,b}` with eps/N.
    pub fn phase_damping(geometry: TorusGeometry<T>, epsilon: T) -> Self {
        let n = geometry.dim();
        let nf = T::from_index(n);
        let mut entries = Vec::with_capacity(n);
        entries.push((
            TranslationIndex::new(n, 0, 0),
            T::one() - epsilon + epsilon / nf,
        ));
        for b in 1..n {
            entries.push((TranslationIndex::new(n, 0, b as i64), epsilon / nf));
        }
        Self::from_entries(entries)
    }

    /// Depolarizing as the uniform mixture over all N^2 translations.
    pub fn depolarizing(geometry: TorusGeometry<T>, epsilon: T) -> Self {
        let n = geometry.dim();
        let n2 = T::from_index(n * n);
        let mut entries = Vec::with_capacity(n * n);
        entries.push((
            TranslationIndex::new(n, 0, 0),
            T::one() - epsilon + epsilon / n2,
        ));
        for a in 0..n {
            for b in 0..n {
                if a == 0 && b == 0 {
                    continue;
                }
                entries.push((
                    TranslationIndex::new(n, a as i64, b as i64),
                    epsilon / n2,
                ));
            }
        }
        Self::from_entries(entries)
    }

    pub fn entries(&self) -> &[(TranslationIndex, T)] {
        &self.entries
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TranslationIndex {
        sample_from_cdf(&self.entries, &self.cdf, rng)
    }

    /// Explicit Kraus application of the mixture:
    /// `sum_i w_i T_i rho T_i^dag`.
    pub fn apply(&self, rho: &DensityOperator<T>) -> DensityOperator<T> {
        let n = rho.geometry().dim();
        let mut acc = Array2::<Complex<T>>::zeros((n, n));
        for &(t, w) in &self.entries {
            let term = rho.translate(t);
            let wz = Complex::new(w, T::zero());
            for (dst, src) in acc.iter_mut().zip(term.matrix().iter()) {
                *dst += *src * wz;
            }
        }
        let mut out = DensityOperator::from_parts_unchecked(rho.geometry(), acc);
        out.symmetrize();
        out
    }
}

/// Phase damping: keep the position diagonal, scale every off-diagonal
/// element by `1 - eps`.
pub fn apply_pdc<T: Scalar>(rho: &DensityOperator<T>, epsilon: T) -> Result<DensityOperator<T>> {
    check_unit_interval(epsilon, "[0, 1] for the phase damping channel")?;
    let n = rho.geometry().dim();
    let keep = Complex::new(T::one() - epsilon, T::zero());
    let mut out = rho.clone();
    let m = out.matrix_mut();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[(i, j)] *= keep;
            }
        }
    }
    Ok(out)
}

/// Depolarizing: blend with the maximally mixed state,
/// `(1 - eps) rho + eps I/N`.
pub fn apply_dpc<T: Scalar>(rho: &DensityOperator<T>, epsilon: T) -> Result<DensityOperator<T>> {
    check_unit_interval(epsilon, "[0, 1] for the depolarizing channel")?;
    let n = rho.geometry().dim();
    let keep = Complex::new(T::one() - epsilon, T::zero());
    let lift = epsilon / T::from_index(n);
    let mut out = rho.clone();
    let m = out.matrix_mut();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= keep;
        }
        m[(i, i)] += Complex::new(lift, T::zero());
    }
    Ok(out)
}

fn check_unit_interval<T: Scalar>(epsilon: T, context: &'static str) -> Result<()> {
    if epsilon < T::zero() || epsilon > T::one() {
        return Err(Error::EpsilonOutOfRange {
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
            context,
        });
    }
    Ok(())
}

/// One of the three noise models, with a uniform interface for exact
/// density-operator application and trajectory unraveling.
#[derive(Clone, Debug)]
pub enum NoiseChannel<T: Scalar> {
    Diffusive(NoiseKernel<T>),
    PhaseDamping { epsilon: T },
    Depolarizing { epsilon: T },
}

impl<T: Scalar> NoiseChannel<T> {
    pub fn apply(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        match self {
            Self::Diffusive(kernel) => kernel.apply(rho),
            Self::PhaseDamping { epsilon } => apply_pdc(rho, *epsilon),
            Self::Depolarizing { epsilon } => apply_dpc(rho, *epsilon),
        }
    }

    pub fn mixture(&self, geometry: TorusGeometry<T>) -> Result<TranslationMixture<T>> {
        match self {
            Self::Diffusive(kernel) => {
                kernel.geometry().check_same(&geometry)?;
                Ok(kernel.mixture())
            }
            Self::PhaseDamping { epsilon } => {
                Ok(TranslationMixture::phase_damping(geometry, *epsilon))
            }
            Self::Depolarizing { epsilon } => {
                Ok(TranslationMixture::depolarizing(geometry, *epsilon))
            }
        }
    }
}
