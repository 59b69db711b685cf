//! Scenario runner for the quantized Harper map experiments: configuration,
//! experiment drivers, and deterministic CSV/manifest outputs. The `qharper`
//! binary is a thin CLI over this library.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{ChannelKind, InitialState, RawConfig, ScenarioConfig, CONFIG_SCHEMA};
pub use error::{HarnessError, Result, EXIT_CONFIG, EXIT_INVARIANT};
pub use scenario::{
    channel_selfcheck, ghz_reference, run_evolution, run_momentum_sweep, run_portrait,
    CheckEntry, ConcurrenceSeries, EvolutionResult, GhzReport, OrbitRow, Parallelism,
    SelfCheckReport, SeriesRecord, StepDiagnostics, SweepRow, SweepTable,
    DENSITY_DIAGNOSTICS_MAX_K,
};
