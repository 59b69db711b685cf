//! Harness-level interface tests: config handling, output formats,
//! determinism, and process exit codes.

use std::process::Command;

use qharper_cli::config::{ChannelKind, InitialState, RawConfig, ScenarioConfig};
use qharper_cli::output;
use qharper_cli::scenario::{self, Parallelism};

fn write_tmp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qharper-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn resolve(text: &str) -> qharper_cli::Result<ScenarioConfig> {
    let path = write_tmp("cfg.toml", text);
    ScenarioConfig::resolve(&RawConfig::from_file(&path)?)
}

fn with<F: FnOnce(&mut RawConfig)>(f: F) -> ScenarioConfig {
    let mut raw = RawConfig::default();
    f(&mut raw);
    ScenarioConfig::resolve(&raw).unwrap()
}

// ---------------------------------------------------------------------------
// config file contract
// ---------------------------------------------------------------------------

#[test]
fn valid_config_file_parses() {
    let cfg = resolve(
        "schema = 1\nk = 5\nchannel = \"diffusive\"\nepsilon = 0.04\nq0 = 0.25\np0 = 0.25\nseed = 9\n",
    )
    .unwrap();
    assert_eq!(cfg.k, 5);
    assert_eq!(cfg.channel, ChannelKind::Diffusive);
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.initial, InitialState::Coherent { q0: 0.25, p0: 0.25 });
}

#[test]
fn unknown_key_is_an_error() {
    let err = resolve("schema = 1\nwavelength = 3\n").unwrap_err();
    assert!(err.to_string().contains("wavelength"), "{err}");
    assert_eq!(err.exit_code(), qharper_cli::EXIT_CONFIG);
}

#[test]
fn missing_or_wrong_schema_is_an_error() {
    assert!(resolve("k = 5\n").unwrap_err().to_string().contains("schema"));
    assert!(resolve("schema = 2\n")
        .unwrap_err()
        .to_string()
        .contains("unsupported schema"));
}

#[test]
fn bad_channel_is_an_error() {
    let err = resolve("schema = 1\nchannel = \"thermal\"\n").unwrap_err();
    assert!(err.to_string().contains("thermal"));
}

// ---------------------------------------------------------------------------
// evolution driver
// ---------------------------------------------------------------------------

#[test]
fn zero_steps_yields_single_record() {
    let cfg = with(|r| {
        r.k = Some(4);
        r.steps = Some(0);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    assert_eq!(result.series.records.len(), 1);
    assert_eq!(result.series.records[0].step, 0);
}

#[test]
fn series_steps_are_contiguous_from_zero() {
    let cfg = with(|r| {
        r.k = Some(4);
        r.steps = Some(7);
        r.channel = Some("diffusive".into());
        r.epsilon = Some(0.04);
        r.trajectories = Some(4);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    for (i, rec) in result.series.records.iter().enumerate() {
        assert_eq!(rec.step, i);
    }
    assert_eq!(result.series.records.len(), 8);
}

#[test]
fn ghz_initial_state_reproduces_reference() {
    let cfg = with(|r| {
        r.k = Some(5);
        r.initial = Some("ghz".into());
        r.steps = Some(0);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    let c0 = result.series.records[0].concurrence;
    assert!((c0 - qharper_core::ghz_concurrence::<f64>(5)).abs() < 1e-12);
}

#[test]
fn basis_initial_state_is_separable() {
    let cfg = with(|r| {
        r.k = Some(4);
        r.initial = Some("basis".into());
        r.basis_index = Some(5);
        r.steps = Some(0);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    assert!(result.series.records[0].concurrence < 1e-12);
}

#[test]
fn small_k_pdc_series_uses_decomposition_search() {
    // at k = 3 the density operator stays within the optimizer guards, so
    // the headline must sit between the lower bound and the trajectory
    // average
    let cfg = with(|r| {
        r.k = Some(3);
        r.steps = Some(4);
        r.channel = Some("pdc".into());
        r.epsilon = Some(0.2);
        r.trajectories = Some(512);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    for rec in &result.series.records[1..] {
        let d = rec.diagnostics.unwrap();
        let lower = d.lower.unwrap();
        assert!(
            rec.concurrence >= lower - 1e-9,
            "step {}: headline {} below lower bound {lower}",
            rec.step,
            rec.concurrence
        );
        assert!(
            rec.concurrence <= d.upper + 4.0 * d.upper_std_error + 1e-6,
            "step {}: headline {} above trajectory bound {} +- {}",
            rec.step,
            rec.concurrence,
            d.upper,
            d.upper_std_error
        );
    }
}

#[test]
fn noise_is_applied_after_each_propagator_step() {
    // one noisy step must equal channel(U rho U^dag), not U(channel(rho))U^dag
    let cfg = with(|r| {
        r.k = Some(4);
        r.steps = Some(1);
        r.channel = Some("pdc".into());
        r.epsilon = Some(0.3);
        r.trajectories = Some(4);
        r.q0 = Some(0.25);
        r.p0 = Some(0.25);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    let got = result.series.records[1].diagnostics.unwrap().lower.unwrap();

    let geometry = qharper_core::TorusGeometry::new(4).unwrap();
    let u = qharper_core::QuantumPropagator::new(geometry, qharper_core::HarperParams::default());
    let rho0 = qharper_core::StateVector::coherent(
        geometry,
        qharper_core::PhasePoint::new(0.25, 0.25),
    )
    .outer();
    let after = qharper_core::apply_pdc(&u.apply_density(&rho0).unwrap(), 0.3).unwrap();
    let want = qharper_core::mixed_concurrence_lower(&after).value;
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");

    let swapped = u
        .apply_density(&qharper_core::apply_pdc(&rho0, 0.3).unwrap())
        .unwrap();
    let wrong_order = qharper_core::mixed_concurrence_lower(&swapped).value;
    assert!(
        (got - wrong_order).abs() > 1e-6,
        "ordering test cannot distinguish the two orders here"
    );
}

// ---------------------------------------------------------------------------
// determinism
// ---------------------------------------------------------------------------

#[test]
fn identical_seeds_give_byte_identical_series() {
    let cfg = with(|r| {
        r.k = Some(5);
        r.steps = Some(10);
        r.channel = Some("diffusive".into());
        r.epsilon = Some(0.04);
        r.trajectories = Some(16);
        r.seed = Some(1234);
    });
    let a = output::series_csv(&scenario::run_evolution(&cfg).unwrap().series);
    let b = output::series_csv(&scenario::run_evolution(&cfg).unwrap().series);
    assert_eq!(a, b);

    let cfg2 = with(|r| {
        r.k = Some(5);
        r.steps = Some(10);
        r.channel = Some("diffusive".into());
        r.epsilon = Some(0.04);
        r.trajectories = Some(16);
        r.seed = Some(1235);
    });
    let c = output::series_csv(&scenario::run_evolution(&cfg2).unwrap().series);
    assert_ne!(a, c);
}

#[test]
fn parallel_and_serial_sweeps_agree() {
    let cfg = with(|r| {
        r.k = Some(4);
        r.channel = Some("diffusive".into());
        r.epsilon = Some(0.02);
        r.trajectories = Some(8);
        r.steps = Some(4);
    });
    let par = scenario::run_momentum_sweep(&cfg, Parallelism::Parallel).unwrap();
    let ser = scenario::run_momentum_sweep(&cfg, Parallelism::Serial).unwrap();
    assert_eq!(output::sweep_csv(&par), output::sweep_csv(&ser));
}

// ---------------------------------------------------------------------------
// portrait driver
// ---------------------------------------------------------------------------

#[test]
fn portrait_row_count_and_fixed_point() {
    let cfg = with(|r| {
        r.portrait_grid = Some(4);
        r.portrait_iterations = Some(25);
    });
    let rows = scenario::run_portrait(&cfg).unwrap();
    // 4x4 grid plus the island and chaotic reference seeds
    assert_eq!(rows.len(), (16 + 2) * 26);
    // the (0, 0) seed is a fixed point of the map
    for row in rows.iter().filter(|r| r.seed_id == 0) {
        assert_eq!(row.q, 0.0);
        assert_eq!(row.p, 0.0);
    }
    // the island marker seed never approaches the chaotic marker
    let island_id = 16;
    for row in rows.iter().filter(|r| r.seed_id == island_id) {
        let dq = (row.q - 0.25).abs().min(1.0 - (row.q - 0.25).abs());
        let dp = row.p.min(1.0 - row.p);
        assert!(dq.hypot(dp) > 0.05);
    }
}

#[test]
fn weak_kick_portrait_is_regular() {
    // In the regular regime every orbit hugs a level set of the effective
    // energy cos(2 pi p) + cos(2 pi q). A plain p-band test would be wrong:
    // even at chi = 0.05 seeds landing in the thin stochastic layer around
    // the separatrix drift through the full momentum range. Measured
    // drifts over a 5x5 grid, 300 iterates: 0.30 at chi = 0.05 versus 3.62
    // at chi = 0.8.
    let energy = |q: f64, p: f64| {
        (2.0 * std::f64::consts::PI * p).cos() + (2.0 * std::f64::consts::PI * q).cos()
    };

    let cfg = with(|r| {
        r.chi = Some(0.05);
        r.portrait_grid = Some(5);
        r.portrait_iterations = Some(300);
    });
    let rows = scenario::run_portrait(&cfg).unwrap();
    for seed_id in 0..25 {
        let orbit: Vec<_> = rows.iter().filter(|r| r.seed_id == seed_id).collect();
        let h0 = energy(orbit[0].q, orbit[0].p);
        for row in &orbit {
            let drift = (energy(row.q, row.p) - h0).abs();
            assert!(drift < 0.5, "seed {seed_id} drifted by {drift}");
        }
    }

    let cfg = with(|r| {
        r.chi = Some(0.8);
        r.portrait_grid = Some(5);
        r.portrait_iterations = Some(300);
    });
    let rows = scenario::run_portrait(&cfg).unwrap();
    let mut worst: f64 = 0.0;
    for seed_id in 0..25 {
        let orbit: Vec<_> = rows.iter().filter(|r| r.seed_id == seed_id).collect();
        let h0 = energy(orbit[0].q, orbit[0].p);
        for row in &orbit {
            worst = worst.max((energy(row.q, row.p) - h0).abs());
        }
    }
    assert!(worst > 1.5, "chaotic regime should break conservation, drift {worst}");
}

// ---------------------------------------------------------------------------
// outputs and manifest
// ---------------------------------------------------------------------------

#[test]
fn manifest_checksums_match_written_files() {
    let dir = std::env::temp_dir().join(format!("qharper-manifest-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);

    let cfg = with(|r| {
        r.k = Some(4);
        r.steps = Some(3);
    });
    let result = scenario::run_evolution(&cfg).unwrap();
    let csv = output::series_csv(&result.series);
    let entry = output::write_output(&dir, "series.csv", &csv).unwrap();
    output::write_manifest(&dir, "evolve", cfg.seed, &cfg.manifest_entries(), &[entry]).unwrap();

    let written = std::fs::read_to_string(dir.join("series.csv")).unwrap();
    let manifest = std::fs::read_to_string(dir.join("manifest.toml")).unwrap();
    let hash = output::sha256_hex(&written);
    assert!(manifest.contains(&hash), "manifest should pin the data file");
    assert!(manifest.contains("command = \"evolve\""));
    assert!(manifest.contains(&format!("seed = {}", cfg.seed)));
}

#[test]
fn series_csv_headers() {
    let unitary = scenario::run_evolution(&with(|r| {
        r.k = Some(4);
        r.steps = Some(1);
    }))
    .unwrap();
    assert!(output::series_csv(&unitary.series).starts_with("step,concurrence,std_error\n"));

    let noisy = scenario::run_evolution(&with(|r| {
        r.k = Some(4);
        r.steps = Some(1);
        r.channel = Some("diffusive".into());
        r.trajectories = Some(4);
    }))
    .unwrap();
    assert!(output::series_csv(&noisy.series)
        .starts_with("step,concurrence,std_error,concurrence_upper,upper_std_error,concurrence_lower,purity\n"));
}

// ---------------------------------------------------------------------------
// process-level behaviour of the binary
// ---------------------------------------------------------------------------

fn qharper() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qharper"))
}

fn tmp_out(tag: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("qharper-bin-{}-{tag}", std::process::id()))
}

#[test]
fn binary_success_exit_code() {
    let out = tmp_out("ok");
    let status = qharper()
        .args(["ghz", "--k", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("ghz.csv").exists());
    assert!(out.join("manifest.toml").exists());
}

#[test]
fn binary_config_error_exits_2() {
    let path = write_tmp("bad.toml", "schema = 1\nnotakey = 1\n");
    let status = qharper()
        .args(["evolve", "--config"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // bad flag value goes through the same path
    let status = qharper()
        .args(["evolve", "--k", "1", "--out"])
        .arg(tmp_out("badk"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn binary_invariant_violation_exits_3() {
    let output = qharper()
        .args(["selfcheck", "--k", "4", "--corrupt-kernel", "0.9", "--out"])
        .arg(tmp_out("corrupt"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("FAIL kernel-normalization"),
        "stdout: {stdout}"
    );
}

#[test]
fn binary_selfcheck_epsilon_zero_has_exact_identity() {
    let output = qharper()
        .args(["selfcheck", "--k", "4", "--epsilon", "0.0", "--out"])
        .arg(tmp_out("eps0"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS identity-limit-exact"));
}

#[test]
fn binary_writes_deterministic_outputs() {
    let (a, b) = (tmp_out("det-a"), tmp_out("det-b"));
    for out in [&a, &b] {
        let status = qharper()
            .args([
                "evolve",
                "--k",
                "4",
                "--channel",
                "dpc",
                "--epsilon",
                "0.1",
                "--steps",
                "5",
                "--trajectories",
                "8",
                "--seed",
                "77",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let file_a = std::fs::read(a.join("series.csv")).unwrap();
    let file_b = std::fs::read(b.join("series.csv")).unwrap();
    assert_eq!(file_a, file_b);
}
