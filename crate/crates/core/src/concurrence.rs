//! Multipartite concurrence.
//!
//! For a pure state of k qubits,
//!
//! `C_k = 2^(1 - k/2) sqrt( sum_A (1 - Tr rho_A^2) )`,
//!
//! the sum running over all 2^k - 2 nonempty proper subsets A of the
//! qubits (each subset and its complement counted separately). It vanishes
//! exactly on fully separable states and obeys the reduction property
//! `C_k(|phi> (x) |psi>) = C_{k-1}(|psi>)`, which fixes the subset count
//! and prefactor jointly.
//!
//! Mixed states are bracketed from two sides: a stochastic unraveling of
//! the noise gives the average over one concrete convex decomposition (an
//! upper bound on the convex roof), while bipartition purities of the
//! exactly evolved density operator give a lower bound,
//! `C_k(rho) >= 2^(1 - k/2) sqrt( sum_A max(0, Tr rho^2 - Tr rho_A^2) )`.
//! A small-system search over decompositions tightens the upper bound
//! toward the convex roof itself.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harper::QuantumPropagator;
use crate::linalg;
use crate::noise::TranslationMixture;
use crate::rng::stream_rng;
use crate::scalar::Scalar;
use crate::torus::{DensityOperator, StateVector, TorusGeometry};

/// Which estimator produced a concurrence value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcurrenceKind {
    /// Exact evaluation of the pure-state formula.
    PureExact,
    /// Trajectory average over one convex decomposition (upper bound).
    MixedUpperBound,
    /// Bipartition-purity bound on the convex roof (lower bound).
    MixedLowerBound,
    /// Decomposition search (upper bound converging to the convex roof).
    MixedOptimized,
}

#[derive(Clone, Debug)]
pub enum ConcurrenceDetail<T: Scalar> {
    /// `Tr rho_A^2` for every nonempty proper subset, indexed by `mask - 1`.
    BipartitionPurities(Vec<T>),
    /// Ensemble size and standard error of the trajectory mean.
    Ensemble { trajectories: usize, std_error: T },
    /// Global purity that entered the lower bound.
    GlobalPurity(T),
    /// Search effort behind an optimized value.
    Search { restarts: usize, members: usize },
}

#[derive(Clone, Debug)]
pub struct ConcurrenceResult<T: Scalar> {
    pub value: T,
    pub kind: ConcurrenceKind,
    pub detail: ConcurrenceDetail<T>,
}

/// `2^(1 - k/2)`, the balancing prefactor of the concurrence formula.
fn prefactor<T: Scalar>(k: u32) -> T {
    T::cast(2f64.powf(1.0 - k as f64 / 2.0))
}

/// Closed-form concurrence of the k-qubit GHZ state: all proper-subset
/// purities equal 1/2, so `C_k = 2^(1-k/2) sqrt(2^(k-1) - 1)`.
pub fn ghz_concurrence<T: Scalar>(k: u32) -> T {
    T::cast(2f64.powf(1.0 - k as f64 / 2.0) * (2f64.powi(k as i32 - 1) - 1.0).sqrt())
}

/// Global maximum of the pure-state formula, `2^(1-k/2) sqrt(2^k - 2)`.
pub fn max_pure_concurrence<T: Scalar>(k: u32) -> T {
    T::cast(2f64.powf(1.0 - k as f64 / 2.0) * (2f64.powi(k as i32) - 2.0).sqrt())
}

fn check_subset(mask: usize, k: u32) -> Result<()> {
    let full = (1usize << k) - 1;
    if mask == 0 || mask >= full {
        return Err(Error::InvalidSubset { mask, k });
    }
    Ok(())
}

/// `Tr rho_A^2` for the reduced state of a pure state on the qubits in
/// `mask` (bit j of the position index is qubit j).
///
/// The amplitudes are reshaped into a 2^|A| x 2^(k-|A|) matrix M and the
/// purity read off as the squared Frobenius norm of M M^dag; since the
/// purity of a pure state's subsystem equals its complement's, the smaller
/// side is always used.
pub fn subset_purity<T: Scalar>(state: &StateVector<T>, mask: usize) -> Result<T> {
    let k = state.geometry().qubits();
    check_subset(mask, k)?;
    let full = (1usize << k) - 1;
    let a = mask.count_ones();
    let side = if a as usize * 2 <= k as usize {
        mask
    } else {
        full ^ mask
    };
    Ok(subset_purity_unchecked(state, side, k))
}

fn gather_positions(mask: usize, k: u32) -> Vec<usize> {
    (0..k as usize).filter(|j| mask >> j & 1 == 1).collect()
}

fn subset_purity_unchecked<T: Scalar>(state: &StateVector<T>, mask: usize, k: u32) -> T {
    let full = (1usize << k) - 1;
    let rows_bits = gather_positions(mask, k);
    let cols_bits = gather_positions(full ^ mask, k);
    let dr = 1usize << rows_bits.len();
    let dc = 1usize << cols_bits.len();

    let amps = state.amplitudes();
    let mut m = vec![Complex::new(T::zero(), T::zero()); dr * dc];
    for idx in 0..amps.len() {
        let mut r = 0usize;
        for (pos, &j) in rows_bits.iter().enumerate() {
            r |= (idx >> j & 1) << pos;
        }
        let mut c = 0usize;
        for (pos, &j) in cols_bits.iter().enumerate() {
            c |= (idx >> j & 1) << pos;
        }
        m[r * dc + c] = amps[idx];
    }

    // purity = || M M^dag ||_F^2
    let mut purity = T::zero();
    for r1 in 0..dr {
        for r2 in 0..dr {
            let mut g = Complex::new(T::zero(), T::zero());
            for c in 0..dc {
                g += m[r1 * dc + c] * m[r2 * dc + c].conj();
            }
            purity += g.norm_sqr();
        }
    }
    purity
}

/// All 2^k - 2 proper-subset purities of a pure state, indexed by
/// `mask - 1`. Complement pairs are computed once.
pub fn all_subset_purities<T: Scalar>(state: &StateVector<T>) -> Vec<T> {
    let k = state.geometry().qubits();
    let full = (1usize << k) - 1;
    let mut purities = vec![T::zero(); full - 1];
    for mask in 1..full {
        let co = full ^ mask;
        if mask > co {
            continue;
        }
        let a = mask.count_ones() as usize;
        let side = if 2 * a <= k as usize { mask } else { co };
        let p = subset_purity_unchecked(state, side, k);
        purities[mask - 1] = p;
        purities[co - 1] = p;
    }
    purities
}

/// Exact multipartite concurrence of a pure state.
pub fn pure_concurrence<T: Scalar>(state: &StateVector<T>) -> Result<ConcurrenceResult<T>> {
    let norm = state.norm();
    if (norm - T::one()).abs() > T::UNIT_TOL * T::cast(1e3) {
        return Err(Error::NotNormalized {
            norm: norm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let k = state.geometry().qubits();
    let purities = all_subset_purities(state);
    let deficit: T = purities.iter().map(|&p| T::one() - p).sum();
    let value = prefactor::<T>(k) * deficit.max(T::zero()).sqrt();
    Ok(ConcurrenceResult {
        value,
        kind: ConcurrenceKind::PureExact,
        detail: ConcurrenceDetail::BipartitionPurities(purities),
    })
}

/// Shorthand used in hot loops.
pub fn pure_concurrence_value<T: Scalar>(state: &StateVector<T>) -> T {
    let k = state.geometry().qubits();
    let deficit: T = all_subset_purities(state)
        .iter()
        .map(|&p| T::one() - p)
        .sum();
    prefactor::<T>(k) * deficit.max(T::zero()).sqrt()
}

/// `Tr rho_A^2` for a (generally mixed) density operator. No complement
/// symmetry holds here, so the requested subset is traced literally.
pub fn reduced_purity<T: Scalar>(rho: &DensityOperator<T>, mask: usize) -> Result<T> {
    let k = rho.geometry().qubits();
    check_subset(mask, k)?;
    Ok(reduced_purity_unchecked(rho, mask, k))
}

fn reduced_purity_unchecked<T: Scalar>(rho: &DensityOperator<T>, mask: usize, k: u32) -> T {
    let full = (1usize << k) - 1;
    let a_bits = gather_positions(mask, k);
    let b_bits = gather_positions(full ^ mask, k);
    let da = 1usize << a_bits.len();
    let db = 1usize << b_bits.len();

    let scatter = |sub: usize, bits: &[usize]| -> usize {
        let mut idx = 0usize;
        for (pos, &j) in bits.iter().enumerate() {
            idx |= (sub >> pos & 1) << j;
        }
        idx
    };
    let rows: Vec<usize> = (0..da).map(|r| scatter(r, &a_bits)).collect();
    let cols: Vec<usize> = (0..db).map(|c| scatter(c, &b_bits)).collect();

    let m = rho.matrix();
    let mut purity = T::zero();
    for r1 in 0..da {
        for r2 in 0..da {
            let mut e = Complex::new(T::zero(), T::zero());
            for &c in &cols {
                e += m[(rows[r1] | c, rows[r2] | c)];
            }
            purity += e.norm_sqr();
        }
    }
    purity
}

/// Purity-based lower bound on the convex-roof concurrence:
/// each bipartite concurrence obeys `c_A(rho)^2 >= 2 (Tr rho^2 - Tr rho_A^2)`,
/// and aggregating the bipartitions exactly as in the pure formula gives
/// `C_k(rho) >= 2^(1-k/2) sqrt( sum_A max(0, Tr rho^2 - Tr rho_A^2) )`.
/// Coincides with the exact value on pure states.
pub fn mixed_concurrence_lower<T: Scalar>(rho: &DensityOperator<T>) -> ConcurrenceResult<T> {
    let k = rho.geometry().qubits();
    let full = (1usize << k) - 1;
    let global = rho.purity();
    let mut sum = T::zero();
    for mask in 1..full {
        let deficit = global - reduced_purity_unchecked(rho, mask, k);
        sum += deficit.max(T::zero());
    }
    ConcurrenceResult {
        value: prefactor::<T>(k) * sum.sqrt(),
        kind: ConcurrenceKind::MixedLowerBound,
        detail: ConcurrenceDetail::GlobalPurity(global),
    }
}

/// Summary statistics of the concurrence over Haar-random pure states; the
/// most probable value is the saturation benchmark for chaotic dynamics.
#[derive(Clone, Copy, Debug)]
pub struct ConcurrenceProfile<T: Scalar> {
    pub samples: usize,
    pub mean: T,
    pub median: T,
    /// Kernel-density mode estimate.
    pub most_probable: T,
    pub std_dev: T,
    pub min: T,
    pub max: T,
}

pub fn random_state_concurrence_profile<T: Scalar, R: Rng + ?Sized>(
    geometry: TorusGeometry<T>,
    samples: usize,
    rng: &mut R,
) -> ConcurrenceProfile<T> {
    assert!(samples >= 1, "need at least one sample");
    let mut values: Vec<T> = (0..samples)
        .map(|_| pure_concurrence_value(&StateVector::haar_random(geometry, rng)))
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let nf = T::from_index(samples);
    let mean = values.iter().copied().sum::<T>() / nf;
    let median = if samples % 2 == 1 {
        values[samples / 2]
    } else {
        (values[samples / 2 - 1] + values[samples / 2]) / T::cast(2.0)
    };
    let var = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<T>()
        / nf;
    let std_dev = var.sqrt();
    let min = values[0];
    let max = values[samples - 1];

    ConcurrenceProfile {
        samples,
        mean,
        median,
        most_probable: kde_mode(&values, std_dev),
        std_dev,
        min,
        max,
    }
}

/// Mode of a sorted sample via a Gaussian kernel density on a fixed grid
/// (Silverman's bandwidth). Deterministic given the sample.
fn kde_mode<T: Scalar>(sorted: &[T], std_dev: T) -> T {
    let n = sorted.len();
    if n == 1 || std_dev == T::zero() {
        return sorted[n / 2];
    }
    let nf = T::from_index(n);
    let h = T::cast(1.06) * std_dev * nf.powf(-T::cast(0.2));
    let lo = sorted[0] - h;
    let hi = sorted[n - 1] + h;
    let grid = 256usize;
    let mut best = (T::neg_infinity(), lo);
    for gi in 0..=grid {
        let x = lo + (hi - lo) * T::from_index(gi) / T::from_index(grid);
        let mut density = T::zero();
        for &v in sorted {
            let z = (x - v) / h;
            density += (-z * z / T::cast(2.0)).exp();
        }
        if density > best.0 {
            best = (density, x);
        }
    }
    best.1
}

/// Pure-state trajectories under "propagate, then one sampled translation
/// per step", with the concurrence of every trajectory recorded at every
/// step. The ensemble mean is the average over one concrete convex
/// decomposition of rho(t) and therefore an upper bound on its convex-roof
/// concurrence.
#[derive(Clone, Debug)]
pub struct TrajectoryEnsemble<T: Scalar> {
    /// Concurrence of trajectory `i` at step `t`; shape (trajectories, steps + 1).
    pub values: Array2<T>,
    pub mean: Vec<T>,
    pub std_error: Vec<T>,
}

impl<T: Scalar> TrajectoryEnsemble<T> {
    /// Standard error of the per-trajectory difference C(t2) - C(t1);
    /// the right scale for judging step-to-step changes of the mean.
    pub fn paired_difference_std_error(&self, t1: usize, t2: usize) -> T {
        let n = self.values.nrows();
        let nf = T::from_index(n);
        let mut mean = T::zero();
        for i in 0..n {
            mean += self.values[(i, t2)] - self.values[(i, t1)];
        }
        mean /= nf;
        let mut var = T::zero();
        for i in 0..n {
            let d = self.values[(i, t2)] - self.values[(i, t1)] - mean;
            var += d * d;
        }
        (var / (nf - T::one())).sqrt() / nf.sqrt()
    }
}

pub fn trajectory_concurrence<T: Scalar>(
    initial: &StateVector<T>,
    propagator: &QuantumPropagator<T>,
    mixture: &TranslationMixture<T>,
    steps: usize,
    trajectories: usize,
    seed: u64,
    stream_base: u64,
) -> Result<TrajectoryEnsemble<T>> {
    if trajectories < 2 {
        return Err(Error::TooFewTrajectories { got: trajectories });
    }
    propagator.geometry().check_same(&initial.geometry())?;

    let c0 = pure_concurrence_value(initial);
    let rows: Vec<Vec<T>> = (0..trajectories)
        .into_par_iter()
        .map(|traj| {
            let mut rng = stream_rng(seed, stream_base + traj as u64);
            let mut state = initial.clone();
            let mut row = Vec::with_capacity(steps + 1);
            row.push(c0);
            for _ in 0..steps {
                state = propagator.apply(&state).expect("geometry checked");
                let t = mixture.sample(&mut rng);
                if !t.is_identity() {
                    state = state.translate(t);
                }
                row.push(pure_concurrence_value(&state));
            }
            row
        })
        .collect();

    let mut values = Array2::zeros((trajectories, steps + 1));
    for (i, row) in rows.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            values[(i, t)] = v;
        }
    }
    let nf = T::from_index(trajectories);
    let mut mean = Vec::with_capacity(steps + 1);
    let mut std_error = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        // identical columns (t = 0, or no sampling branch at eps = 0) carry
        // exactly zero error
        if (0..trajectories).all(|i| values[(i, t)] == values[(0, t)]) {
            mean.push(values[(0, t)]);
            std_error.push(T::zero());
            continue;
        }
        let m = (0..trajectories).map(|i| values[(i, t)]).sum::<T>() / nf;
        let var = (0..trajectories)
            .map(|i| (values[(i, t)] - m) * (values[(i, t)] - m))
            .sum::<T>()
            / (nf - T::one());
        mean.push(m);
        std_error.push(var.sqrt() / nf.sqrt());
    }
    Ok(TrajectoryEnsemble {
        values,
        mean,
        std_error,
    })
}

/// Maximum system size accepted by the decomposition search.
pub const OPTIMIZER_MAX_QUBITS: u32 = 4;
/// Maximum spectral rank accepted by the decomposition search.
pub const OPTIMIZER_MAX_RANK: usize = 8;

/// Upper-bound the convex-roof concurrence of a small mixed state by
/// searching over convex decompositions.
///
/// The eigendecomposition `rho = B B^dag` (columns of B scaled by the root
/// eigenvalues) parameterizes every size-m decomposition as `B W^T` with W
/// an m x r isometry; the search does stochastic descent on W over several
/// restarts and decomposition sizes, keeping the best average concurrence
/// found.
pub fn mixed_concurrence_optimized<T: Scalar, R: Rng + ?Sized>(
    rho: &DensityOperator<T>,
    iterations: usize,
    rng: &mut R,
) -> Result<ConcurrenceResult<T>> {
    let geometry = rho.geometry();
    let k = geometry.qubits();
    let n = geometry.dim();

    let eig = linalg::eigh(rho.matrix());
    let floor = T::POSITIVITY_TOL;
    let kept: Vec<usize> = (0..n).filter(|&i| eig.values[i] > floor).collect();
    let rank = kept.len();
    if k > OPTIMIZER_MAX_QUBITS || rank > OPTIMIZER_MAX_RANK {
        return Err(Error::OptimizerSizeGuard {
            k,
            rank,
            max_k: OPTIMIZER_MAX_QUBITS,
            max_rank: OPTIMIZER_MAX_RANK,
        });
    }

    // rank one: the state is pure
    if rank == 1 {
        let col = kept[0];
        let amps = Array1::from_iter((0..n).map(|i| eig.vectors[(i, col)]));
        let mut state = StateVector::from_parts_unchecked(geometry, amps);
        state.renormalize();
        let value = pure_concurrence_value(&state);
        return Ok(ConcurrenceResult {
            value,
            kind: ConcurrenceKind::MixedOptimized,
            detail: ConcurrenceDetail::Search {
                restarts: 0,
                members: 1,
            },
        });
    }

    // B: n x r, column i = sqrt(lambda_i) v_i
    let mut b = Array2::<Complex<T>>::zeros((n, rank));
    for (ci, &col) in kept.iter().enumerate() {
        let scale = eig.values[col].sqrt();
        for i in 0..n {
            b[(i, ci)] = eig.vectors[(i, col)].scale(scale);
        }
    }

    let average = |w: &Array2<Complex<T>>| -> T {
        let members = w.nrows();
        let mut total = T::zero();
        for j in 0..members {
            let mut amps = Array1::<Complex<T>>::zeros(n);
            for i in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for c in 0..rank {
                    acc += b[(i, c)] * w[(j, c)];
                }
                amps[i] = acc;
            }
            let weight: T = amps.iter().map(|z| z.norm_sqr()).sum();
            if weight <= T::epsilon() {
                continue;
            }
            let inv = Complex::new(T::one() / weight.sqrt(), T::zero());
            for a in amps.iter_mut() {
                *a *= inv;
            }
            let member = StateVector::from_parts_unchecked(geometry, amps);
            total += weight * pure_concurrence_value(&member);
        }
        total
    };

    let gaussian = |rng: &mut R, rows: usize, cols: usize, sigma: T| {
        let mut g = Array2::<Complex<T>>::zeros((rows, cols));
        for v in g.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v = Complex::new(T::cast(re) * sigma, T::cast(im) * sigma);
        }
        g
    };

    let restarts = 6usize;
    let per_restart = (iterations / restarts).max(1);
    let mut best = T::infinity();
    let mut best_members = rank;
    for restart in 0..restarts {
        let members = if restart % 2 == 0 { rank } else { 2 * rank };
        let mut w = gaussian(rng, members, rank, T::one());
        linalg::orthonormalize_columns(&mut w);
        let mut current = average(&w);
        let mut sigma = T::cast(0.4);
        let mut stall = 0usize;
        for _ in 0..per_restart {
            let mut candidate = &w + &gaussian(rng, members, rank, sigma);
            linalg::orthonormalize_columns(&mut candidate);
            let value = average(&candidate);
            if value < current {
                current = value;
                w = candidate;
                stall = 0;
            } else {
                stall += 1;
                if stall >= 20 {
                    sigma *= T::cast(0.6);
                    stall = 0;
                    if sigma < T::cast(1e-4) {
                        break;
                    }
                }
            }
        }
        if current < best {
            best = current;
            best_members = members;
        }
    }

    Ok(ConcurrenceResult {
        value: best,
        kind: ConcurrenceKind::MixedOptimized,
        detail: ConcurrenceDetail::Search {
            restarts,
            members: best_members,
        },
    })
}
