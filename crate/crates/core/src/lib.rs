//! Quantized Harper map on the torus.
//!
//! A register of k qubits is read as the position basis of a toroidal
//! phase space (q_i = i/N, N = 2^k). The crate provides the quantized
//! kicked Harper propagator and its classical counterpart, three noise
//! channels built from discrete Weyl translations, and the multipartite
//! concurrence machinery needed to follow how entanglement produced by the
//! dynamics survives the noise.
//!
//! Everything numerical is generic over the real scalar via [`Scalar`];
//! the `*64`/`*32` aliases below fix the two concrete precisions. f64 is
//! the precision all reference values and the CLI use.

pub mod concurrence;
pub mod error;
pub mod fft;
pub mod harper;
pub mod linalg;
pub mod noise;
pub mod rng;
pub mod scalar;
pub mod torus;
pub mod weyl;

pub use concurrence::{
    all_subset_purities, ghz_concurrence, max_pure_concurrence, mixed_concurrence_lower,
    mixed_concurrence_optimized, pure_concurrence, pure_concurrence_value,
    random_state_concurrence_profile, reduced_purity, subset_purity, trajectory_concurrence,
    ConcurrenceDetail, ConcurrenceKind, ConcurrenceProfile, ConcurrenceResult,
    TrajectoryEnsemble, OPTIMIZER_MAX_QUBITS, OPTIMIZER_MAX_RANK,
};
pub use error::{Error, Result};
pub use harper::{HarperParams, QuantumPropagator, DEFAULT_KICK, ISLAND_CONFINEMENT_RADIUS};
pub use noise::{
    apply_dpc, apply_pdc, NoiseChannel, NoiseKernel, TranslationMixture, CHORD_PATH_MIN_DIM,
};
pub use rng::stream_rng;
pub use scalar::Scalar;
pub use torus::{DensityOperator, PhasePoint, StateVector, TorusGeometry, MAX_QUBITS, MIN_QUBITS};
pub use weyl::{ChordCoefficients, TranslationIndex};

/// Double-precision aliases; the default working types.
pub type TorusGeometry64 = TorusGeometry<f64>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type StateVector64 = StateVector<f64>;
pub type DensityOperator64 = DensityOperator<f64>;
pub type ChordCoefficients64 = ChordCoefficients<f64>;
pub type HarperParams64 = HarperParams<f64>;
pub type QuantumPropagator64 = QuantumPropagator<f64>;
pub type NoiseKernel64 = NoiseKernel<f64>;
pub type NoiseChannel64 = NoiseChannel<f64>;
pub type TranslationMixture64 = TranslationMixture<f64>;
pub type ConcurrenceResult64 = ConcurrenceResult<f64>;

/// Single-precision aliases.
pub type TorusGeometry32 = TorusGeometry<f32>;
pub type PhasePoint32 = PhasePoint<f32>;
pub type StateVector32 = StateVector<f32>;
pub type DensityOperator32 = DensityOperator<f32>;
pub type HarperParams32 = HarperParams<f32>;
pub type QuantumPropagator32 = QuantumPropagator<f32>;
pub type NoiseKernel32 = NoiseKernel<f32>;
