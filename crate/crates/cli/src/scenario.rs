//! Experiment drivers: concurrence evolution, the momentum sweep, classical
//! phase portraits, GHZ reference values and the channel verification suite.
//!
//! The noise protocol is one channel application after each propagator
//! application. Noisy runs report two mixed-state estimates side by side:
//! the trajectory decomposition average (an upper bound on the convex-roof
//! concurrence) and the bipartition-purity lower bound evaluated on the
//! exactly evolved density operator, which also yields purity and trace
//! diagnostics.
//!
//! Every stochastic work item derives its generator from the master seed
//! and a fixed stream counter, so sweeps are reproducible and independent
//! of execution order.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use qharper_core::{
    apply_dpc, apply_pdc, ghz_concurrence, max_pure_concurrence, mixed_concurrence_lower,
    mixed_concurrence_optimized, pure_concurrence_value, stream_rng, trajectory_concurrence,
    DensityOperator64, HarperParams, HarperParams64, NoiseChannel64, NoiseKernel,
    PhasePoint, PhasePoint64, QuantumPropagator, StateVector,
    StateVector64, TorusGeometry, TorusGeometry64, TranslationMixture,
};

use crate::config::{ChannelKind, InitialState, ScenarioConfig};
use crate::error::{HarnessError, Result};

/// Stream ids 1000.. are trajectory streams (one per trajectory).
const TRAJECTORY_STREAM_BASE: u64 = 1_000;
/// Stream ids 2_000_000.. seed the per-step decomposition search.
const OPTIMIZER_STREAM_BASE: u64 = 2_000_000;
/// Stream stride between sweep grid points.
const SWEEP_STREAM_STRIDE: u64 = 100_000;
/// Largest k for which the density operator is evolved exactly alongside
/// the trajectories (N^2 storage).
pub const DENSITY_DIAGNOSTICS_MAX_K: u32 = 10;
/// Iteration budget of the per-step decomposition search.
const OPTIMIZER_ITERATIONS: usize = 6_000;
/// Residual allowed on trace and Hermiticity during density evolution.
const EVOLUTION_RESIDUAL_TOL: f64 = 1e-10;

/// Extra per-step output carried by noisy runs.
#[derive(Clone, Copy, Debug)]
pub struct StepDiagnostics {
    /// Trajectory decomposition average (upper bound).
    pub upper: f64,
    pub upper_std_error: f64,
    /// Bipartition-purity lower bound from the exact density operator.
    pub lower: Option<f64>,
    /// Global purity of the exact density operator.
    pub purity: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SeriesRecord {
    pub step: usize,
    pub concurrence: f64,
    pub std_error: f64,
    pub diagnostics: Option<StepDiagnostics>,
    /// Elapsed wall clock when the record was produced. Diagnostics only;
    /// never serialized into the deterministic outputs.
    pub wall_time: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct ConcurrenceSeries {
    pub records: Vec<SeriesRecord>,
}

impl ConcurrenceSeries {
    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.concurrence).collect()
    }

    pub fn has_diagnostics(&self) -> bool {
        self.records.iter().any(|r| r.diagnostics.is_some())
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub series: ConcurrenceSeries,
    pub wall: Duration,
}

pub(crate) fn build_geometry(config: &ScenarioConfig) -> Result<TorusGeometry64> {
    Ok(TorusGeometry::new(config.k)?)
}

pub(crate) fn build_initial(
    geometry: TorusGeometry64,
    config: &ScenarioConfig,
) -> Result<StateVector64> {
    Ok(match config.initial {
        InitialState::Coherent { q0, p0 } => {
            StateVector::coherent(geometry, PhasePoint::new(q0, p0))
        }
        InitialState::Ghz => StateVector::ghz(geometry),
        InitialState::Basis { index } => StateVector::basis_state(geometry, index)?,
    })
}

pub(crate) fn build_channel(
    geometry: TorusGeometry64,
    channel: ChannelKind,
    epsilon: f64,
) -> Result<Option<NoiseChannel64>> {
    Ok(match channel {
        ChannelKind::None => None,
        ChannelKind::Diffusive => Some(NoiseChannel64::Diffusive(NoiseKernel::new(
            geometry, epsilon,
        )?)),
        ChannelKind::Pdc => Some(NoiseChannel64::PhaseDamping { epsilon }),
        ChannelKind::Dpc => Some(NoiseChannel64::Depolarizing { epsilon }),
    })
}

fn check_density_health(rho: &DensityOperator64, step: usize) -> Result<()> {
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > EVOLUTION_RESIDUAL_TOL || trace.im.abs() > EVOLUTION_RESIDUAL_TOL
    {
        return Err(HarnessError::Invariant(format!(
            "trace drifted to {} at step {step}",
            trace.re
        )));
    }
    let herm = rho.hermiticity_residual();
    if herm > EVOLUTION_RESIDUAL_TOL {
        return Err(HarnessError::Invariant(format!(
            "hermiticity residual {herm} at step {step}"
        )));
    }
    Ok(())
}

/// Headline concurrence for one exactly evolved density operator of a
/// pdc/dpc run: the decomposition search when the system is small enough,
/// the purity lower bound otherwise. The qubit guard is checked up front
/// so large systems never pay for the spectral rank probe.
fn optimized_or_lower(rho: &DensityOperator64, k: u32, seed: u64, step: usize) -> f64 {
    if k > qharper_core::OPTIMIZER_MAX_QUBITS {
        return mixed_concurrence_lower(rho).value;
    }
    let mut rng = stream_rng(seed, OPTIMIZER_STREAM_BASE + step as u64);
    match mixed_concurrence_optimized(rho, OPTIMIZER_ITERATIONS, &mut rng) {
        Ok(result) => result.value,
        Err(_) => mixed_concurrence_lower(rho).value,
    }
}

/// Evolve the configured initial state and record the concurrence at t = 0
/// and after every [propagate; apply channel] step.
pub fn run_evolution(config: &ScenarioConfig) -> Result<EvolutionResult> {
    let start = Instant::now();
    let geometry = build_geometry(config)?;
    let params = HarperParams::new(config.chi1, config.chi2);
    let propagator = QuantumPropagator::new(geometry, params);
    let initial = build_initial(geometry, config)?;
    let steps = config.steps_or(50);
    let channel = build_channel(geometry, config.channel, config.epsilon)?;

    let mut series = ConcurrenceSeries::default();

    let Some(channel) = channel else {
        // unitary run: exact pure-state concurrence at every step
        let mut psi = initial;
        series.records.push(SeriesRecord {
            step: 0,
            concurrence: pure_concurrence_value(&psi),
            std_error: 0.0,
            diagnostics: None,
            wall_time: start.elapsed(),
        });
        for step in 1..=steps {
            psi = propagator.apply(&psi)?;
            series.records.push(SeriesRecord {
                step,
                concurrence: pure_concurrence_value(&psi),
                std_error: 0.0,
                diagnostics: None,
                wall_time: start.elapsed(),
            });
        }
        return Ok(EvolutionResult {
            series,
            wall: start.elapsed(),
        });
    };

    // trajectory unraveling
    let mixture = channel.mixture(geometry)?;
    let ensemble = trajectory_concurrence(
        &initial,
        &propagator,
        &mixture,
        steps,
        config.trajectories,
        config.seed,
        TRAJECTORY_STREAM_BASE,
    )?;

    // exact density evolution alongside, where N^2 storage is reasonable
    let track_density = config.k <= DENSITY_DIAGNOSTICS_MAX_K;
    let mut rho = track_density.then(|| initial.outer());

    for step in 0..=steps {
        let (lower, purity) = match rho.as_ref() {
            Some(r) => (
                Some(mixed_concurrence_lower(r).value),
                Some(r.purity()),
            ),
            None => (None, None),
        };
        let (concurrence, std_error) = match (config.channel, rho.as_ref()) {
            // diffusive headline: the trajectory decomposition average
            (ChannelKind::Diffusive, _) => (ensemble.mean[step], ensemble.std_error[step]),
            // pdc/dpc headline: decomposition search when the system is
            // small enough, otherwise the purity lower bound
            (_, Some(r)) => (optimized_or_lower(r, config.k, config.seed, step), 0.0),
            // density tracking disabled: fall back to the trajectory bound
            (_, None) => (ensemble.mean[step], ensemble.std_error[step]),
        };
        series.records.push(SeriesRecord {
            step,
            concurrence,
            std_error,
            diagnostics: Some(StepDiagnostics {
                upper: ensemble.mean[step],
                upper_std_error: ensemble.std_error[step],
                lower,
                purity,
            }),
            wall_time: start.elapsed(),
        });

        if step < steps {
            if let Some(r) = rho.take() {
                let advanced = channel.apply(&propagator.apply_density(&r)?)?;
                check_density_health(&advanced, step + 1)?;
                rho = Some(advanced);
            }
        }
    }

    Ok(EvolutionResult {
        series,
        wall: start.elapsed(),
    })
}

/// Whether sweep grid points run on the rayon pool or sequentially; both
/// orders produce identical tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Parallel,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub q0: f64,
    pub p0: f64,
    /// Classical orbit of the seed stays confined to a resonance island.
    pub island: bool,
    pub c_initial: f64,
    pub c_unitary: f64,
    pub c_noisy_upper: f64,
    pub c_noisy_upper_err: f64,
    pub c_noisy_lower: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub steps: usize,
    pub epsilon: f64,
    pub channel: ChannelKind,
    pub wall: Duration,
}

/// Initial-momentum sweep: q0 in {0.25, 0.5}, p0 from 0 to 1 in steps
/// of 0.05, concurrence after a fixed number of map iterations with and
/// without noise.
pub fn run_momentum_sweep(config: &ScenarioConfig, parallelism: Parallelism) -> Result<SweepTable> {
    let start = Instant::now();
    let geometry = build_geometry(config)?;
    let params = HarperParams::new(config.chi1, config.chi2);
    let steps = config.steps_or(16);
    // the sweep contrasts unitary and noisy evolution; default to the
    // diffusive channel when none is configured
    let channel_kind = match config.channel {
        ChannelKind::None => ChannelKind::Diffusive,
        other => other,
    };
    let channel = build_channel(geometry, channel_kind, config.epsilon)?
        .expect("sweep channel is never `none`");

    let mut grid: Vec<(f64, f64)> = Vec::new();
    for q0 in [0.25, 0.5] {
        for i in 0..=20 {
            grid.push((q0, i as f64 * 0.05));
        }
    }

    let worker = |(index, &(q0, p0)): (usize, &(f64, f64))| -> Result<SweepRow> {
        sweep_point(
            geometry,
            params,
            &channel,
            config,
            steps,
            index,
            q0,
            p0,
        )
    };

    let rows: Result<Vec<SweepRow>> = match parallelism {
        Parallelism::Serial => grid.iter().enumerate().map(worker).collect(),
        Parallelism::Parallel => grid
            .par_iter()
            .enumerate()
            .map(worker)
            .collect::<Vec<_>>()
            .into_iter()
            .collect(),
    };

    Ok(SweepTable {
        rows: rows?,
        steps,
        epsilon: config.epsilon,
        channel: channel_kind,
        wall: start.elapsed(),
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_point(
    geometry: TorusGeometry64,
    params: HarperParams64,
    channel: &NoiseChannel64,
    config: &ScenarioConfig,
    steps: usize,
    index: usize,
    q0: f64,
    p0: f64,
) -> Result<SweepRow> {
    let propagator = QuantumPropagator::new(geometry, params);
    let seed_point: PhasePoint64 = PhasePoint::new(q0, p0);
    let initial = StateVector::coherent(geometry, seed_point);
    let c_initial = pure_concurrence_value(&initial);

    // unitary reference
    let unitary = propagator.apply_steps(&initial, steps)?;
    let c_unitary = pure_concurrence_value(&unitary);

    // noisy: trajectory ensemble plus exact density evolution
    let mixture = channel.mixture(geometry)?;
    let ensemble = trajectory_concurrence(
        &initial,
        &propagator,
        &mixture,
        steps,
        config.trajectories,
        config.seed,
        TRAJECTORY_STREAM_BASE + index as u64 * SWEEP_STREAM_STRIDE,
    )?;

    let c_noisy_lower = if config.k <= DENSITY_DIAGNOSTICS_MAX_K {
        let mut rho = initial.outer();
        for step in 1..=steps {
            rho = channel.apply(&propagator.apply_density(&rho)?)?;
            check_density_health(&rho, step)?;
        }
        Some(mixed_concurrence_lower(&rho).value)
    } else {
        None
    };

    Ok(SweepRow {
        q0,
        p0,
        island: params.is_island(seed_point, 1000),
        c_initial,
        c_unitary,
        c_noisy_upper: ensemble.mean[steps],
        c_noisy_upper_err: ensemble.std_error[steps],
        c_noisy_lower,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitRow {
    pub seed_id: usize,
    pub step: usize,
    pub q: f64,
    pub p: f64,
}

/// Classical phase portrait: an evenly spaced seed grid plus the two
/// reference launch points used by the quantum experiments (island center
/// and chaotic-sea marker).
pub fn run_portrait(config: &ScenarioConfig) -> Result<Vec<OrbitRow>> {
    let params: HarperParams64 = HarperParams::new(config.chi1, config.chi2);
    let g = config.portrait_grid;
    let iterations = config.portrait_iterations;

    let mut seeds: Vec<PhasePoint64> = Vec::with_capacity(g * g + 2);
    for iq in 0..g {
        for ip in 0..g {
            seeds.push(PhasePoint::new(iq as f64 / g as f64, ip as f64 / g as f64));
        }
    }
    seeds.push(PhasePoint::new(0.25, 0.25));
    seeds.push(PhasePoint::new(0.25, 0.0));

    let mut rows = Vec::with_capacity(seeds.len() * (iterations + 1));
    for (seed_id, &seed) in seeds.iter().enumerate() {
        for (step, point) in params.orbit(seed, iterations).into_iter().enumerate() {
            rows.push(OrbitRow {
                seed_id,
                step,
                q: point.q,
                p: point.p,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug)]
pub struct GhzReport {
    pub k: u32,
    pub closed_form: f64,
    pub from_state: f64,
    pub formula_max: f64,
}

/// GHZ reference values: the closed form and the value recomputed from the
/// explicitly constructed state.
pub fn ghz_reference(config: &ScenarioConfig) -> Result<GhzReport> {
    let geometry = build_geometry(config)?;
    let state = StateVector::ghz(geometry);
    Ok(GhzReport {
        k: config.k,
        closed_form: ghz_concurrence(config.k),
        from_state: pure_concurrence_value(&state),
        formula_max: max_pure_concurrence(config.k),
    })
}

#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckEntry {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SelfCheckReport {
    pub k: u32,
    pub epsilon: f64,
    pub entries: Vec<CheckEntry>,
}

impl SelfCheckReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Full channel verification suite: kernel normalization, CPTP contracts
/// for all three channels, Kraus-vs-chord equivalence, and the exact
/// identity limit at epsilon = 0. `corrupt_kernel` scales the diffusive
/// weights to exercise the negative control.
pub fn channel_selfcheck(
    config: &ScenarioConfig,
    corrupt_kernel: Option<f64>,
) -> Result<SelfCheckReport> {
    let geometry = build_geometry(config)?;
    let epsilon = if config.epsilon > 0.0 { config.epsilon } else { 0.04 };
    let mut kernel = NoiseKernel::new(geometry, epsilon)?;
    if let Some(factor) = corrupt_kernel {
        kernel = kernel.with_scaled_weights(factor);
    }

    // deterministic generic mixed state: blend of a few random projectors
    let mut rng = stream_rng(config.seed, 0);
    let mut rho = StateVector::haar_random(geometry, &mut rng).outer();
    for _ in 0..2 {
        let other = StateVector::haar_random(geometry, &mut rng).outer();
        let mut m = rho.matrix().clone();
        for (dst, src) in m.iter_mut().zip(other.matrix().iter()) {
            *dst = *dst * 0.5 + *src * 0.5;
        }
        rho = DensityOperator64::from_matrix(geometry, m)
            .map_err(|e| HarnessError::Invariant(e.to_string()))?;
    }

    let mut entries = Vec::new();
    entries.push(CheckEntry::new(
        "kernel-normalization",
        (kernel.weight_sum() - 1.0).abs(),
        1e-12,
    ));
    entries.push(CheckEntry::new(
        "kernel-nonnegative",
        (-kernel.min_weight()).max(0.0),
        1e-14,
    ));
    // weight mass dropped by Kraus truncation, reported with the results
    entries.push(CheckEntry::new(
        "kernel-truncation-error",
        kernel.truncation_error().abs(),
        1e-9,
    ));

    let kraus = kernel.apply_kraus(&rho)?;
    let chord = kernel.apply_chord(&rho)?;
    entries.push(CheckEntry::new(
        "diffusive-trace",
        (kraus.trace().re - 1.0).abs() + kraus.trace().im.abs(),
        1e-12,
    ));
    entries.push(CheckEntry::new(
        "diffusive-hermiticity",
        kraus.hermiticity_residual(),
        1e-12,
    ));
    entries.push(CheckEntry::new(
        "diffusive-positivity",
        (-kraus.min_eigenvalue()).max(0.0),
        1e-10,
    ));
    entries.push(CheckEntry::new(
        "kraus-chord-equivalence",
        kraus.max_abs_diff(&chord),
        1e-10,
    ));

    let eps_unit = epsilon.min(1.0);
    for (name, out) in [
        ("pdc", apply_pdc(&rho, eps_unit)?),
        ("dpc", apply_dpc(&rho, eps_unit)?),
    ] {
        entries.push(CheckEntry::new(
            &format!("{name}-trace"),
            (out.trace().re - 1.0).abs() + out.trace().im.abs(),
            1e-12,
        ));
        entries.push(CheckEntry::new(
            &format!("{name}-hermiticity"),
            out.hermiticity_residual(),
            1e-12,
        ));
        entries.push(CheckEntry::new(
            &format!("{name}-positivity"),
            (-out.min_eigenvalue()).max(0.0),
            1e-10,
        ));
    }

    // epsilon = 0 must be the identity channel exactly on both paths
    let identity_kernel = NoiseKernel::new(geometry, 0.0)?;
    let ka = identity_kernel.apply_kraus(&rho)?;
    let ch = identity_kernel.apply_chord(&rho)?;
    entries.push(CheckEntry::new(
        "identity-limit-exact",
        ka.max_abs_diff(&rho).max(ch.max_abs_diff(&rho)),
        0.0,
    ));

    // uniform-mixture identities for the nonlocal channels
    let pdc_mix = TranslationMixture::phase_damping(geometry, eps_unit);
    let dpc_mix = TranslationMixture::depolarizing(geometry, eps_unit);
    entries.push(CheckEntry::new(
        "pdc-translation-mixture",
        apply_pdc(&rho, eps_unit)?.max_abs_diff(&pdc_mix.apply(&rho)),
        1e-12,
    ));
    entries.push(CheckEntry::new(
        "dpc-translation-mixture",
        apply_dpc(&rho, eps_unit)?.max_abs_diff(&dpc_mix.apply(&rho)),
        1e-12,
    ));

    Ok(SelfCheckReport {
        k: config.k,
        epsilon,
        entries,
    })
}
