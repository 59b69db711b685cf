//! Cross-module physics invariants: translation algebra at scale,
//! quantum-classical correspondence, channel contracts, and the structural
//! properties of the multipartite concurrence.

use num_complex::Complex64;
use qharper_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn geo(k: u32) -> TorusGeometry64 {
    TorusGeometry::new(k).unwrap()
}

/// Blend of a few Haar states: a generic full-rank mixed test operator.
fn random_mixed(g: TorusGeometry64, seed: u64, parts: usize) -> DensityOperator64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = g.dim();
    let mut acc = ndarray::Array2::<Complex64>::zeros((n, n));
    let w = 1.0 / parts as f64;
    for _ in 0..parts {
        let psi = StateVector::haar_random(g, &mut rng);
        for (dst, src) in acc.iter_mut().zip(psi.outer().matrix().iter()) {
            *dst += *src * w;
        }
    }
    DensityOperator::from_matrix(g, acc).unwrap()
}

// ---------------------------------------------------------------------------
// translation algebra
// ---------------------------------------------------------------------------

/// Apply the composition law on states, handling index reduction phases:
/// T_{a+N,b} = (-1)^b T_{a,b} and T_{a,b+N} = (-1)^a T_{a,b}.
fn check_group_law_on_state(psi: &StateVector64, a: usize, b: usize, c: usize, d: usize) {
    let n = psi.geometry().dim();
    let pi = std::f64::consts::PI;
    let lhs = psi
        .translate(TranslationIndex::new(n, c as i64, d as i64))
        .translate(TranslationIndex::new(n, a as i64, b as i64));

    let cocycle = Complex64::from_polar(1.0, pi * ((b * c) as f64 - (a * d) as f64) / n as f64);
    let sum_a = a + c;
    let sum_b = b + d;
    let alpha = sum_a % n;
    let mut wrap = 1.0;
    if sum_a >= n && sum_b % 2 == 1 {
        wrap = -wrap;
    }
    if sum_b >= n && alpha % 2 == 1 {
        wrap = -wrap;
    }
    let rhs = psi.translate(TranslationIndex::new(n, alpha as i64, (sum_b % n) as i64));
    for (l, r) in lhs.amplitudes().iter().zip(rhs.amplitudes().iter()) {
        let want = r * cocycle * wrap;
        assert!(
            (l - want).norm() < 1e-12,
            "a={a} b={b} c={c} d={d}: {l} vs {want}"
        );
    }
}

#[test]
fn translation_group_law_exhaustive_small_n() {
    for k in 2..=3u32 {
        let g = geo(k);
        let n = g.dim();
        let mut rng = ChaCha12Rng::seed_from_u64(100 + k as u64);
        let psi = StateVector::haar_random(g, &mut rng);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        check_group_law_on_state(&psi, a, b, c, d);
                    }
                }
            }
        }
    }
}

#[test]
fn translation_group_law_random_pairs_n256() {
    let g = geo(8);
    let n = g.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(104);
    let psi = StateVector::haar_random(g, &mut rng);
    for _ in 0..100 {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        let d = rng.random_range(0..n);
        check_group_law_on_state(&psi, a, b, c, d);
    }
}

// ---------------------------------------------------------------------------
// chord transform
// ---------------------------------------------------------------------------

#[test]
fn chord_roundtrip_up_to_n256() {
    for (k, seed) in [(3u32, 7u64), (5, 8), (8, 9)] {
        let g = geo(k);
        let rho = random_mixed(g, seed, 4);
        let back = rho.chord_transform().inverse();
        assert!(rho.max_abs_diff(&back) < 1e-12, "k={k}");
    }
}

// ---------------------------------------------------------------------------
// quantum-classical correspondence
// ---------------------------------------------------------------------------

#[test]
fn husimi_centroid_follows_island_orbit() {
    let g = geo(8);
    let params = HarperParams::default();
    let u = QuantumPropagator::new(g, params);
    let bound = 2.0 * g.hbar_eff().sqrt();

    let mut psi = StateVector::coherent(g, PhasePoint::new(0.25, 0.25));
    let mut x = PhasePoint::new(0.25, 0.25);
    for step in 1..=5 {
        psi = u.apply(&psi).unwrap();
        x = params.step(x);
        let centroid = psi.husimi_centroid(32);
        let dist = centroid.distance(&x);
        assert!(
            dist < bound,
            "step {step}: centroid ({}, {}) vs classical ({}, {}), dist {dist} >= {bound}",
            centroid.q,
            centroid.p,
            x.q,
            x.p
        );
    }
}

#[test]
fn regular_to_chaotic_transition() {
    // Weak kicks: the orbit through (0.25, 0) follows the effective-
    // Hamiltonian contour, whose p-libration amplitude is 1/4; a band of
    // 0.3 contains it. Strong kicks wander across the full torus.
    let regular = HarperParams::uniform(0.05);
    let mut worst: f64 = 0.0;
    let mut x: PhasePoint64 = PhasePoint::new(0.25, 0.0);
    for _ in 0..500 {
        x = regular.step(x);
        worst = worst.max(f64::min(x.p, 1.0 - x.p));
    }
    assert!(worst < 0.3, "regular excursion {worst}");

    let chaotic = HarperParams::uniform(0.8);
    let mut worst: f64 = 0.0;
    let mut x: PhasePoint64 = PhasePoint::new(0.25, 0.0);
    for _ in 0..500 {
        x = chaotic.step(x);
        worst = worst.max(f64::min(x.p, 1.0 - x.p));
    }
    assert!(worst > 0.3, "chaotic excursion {worst}");
}

// ---------------------------------------------------------------------------
// channel contracts
// ---------------------------------------------------------------------------

#[test]
fn all_channels_preserve_trace_hermiticity_positivity() {
    let g = geo(5);
    let rho = random_mixed(g, 20, 3);
    let kernel = NoiseKernel::new(g, 0.04).unwrap();
    let channels: Vec<(&str, DensityOperator64)> = vec![
        ("diffusive-kraus", kernel.apply_kraus(&rho).unwrap()),
        ("diffusive-chord", kernel.apply_chord(&rho).unwrap()),
        ("pdc", apply_pdc(&rho, 0.3).unwrap()),
        ("dpc", apply_dpc(&rho, 0.3).unwrap()),
    ];
    for (name, out) in channels {
        assert!(
            (out.trace().re - 1.0).abs() < 1e-12,
            "{name}: trace {}",
            out.trace().re
        );
        assert!(out.trace().im.abs() < 1e-12, "{name}");
        assert_eq!(out.hermiticity_residual(), 0.0, "{name}");
        let min = out.min_eigenvalue();
        assert!(min > -1e-10, "{name}: min eigenvalue {min}");
    }
}

#[test]
fn noise_strength_tracks_effective_planck_constant() {
    // eps = 0.04 at k=5 and eps = 0.005 at k=8 probe the same ratio
    // eps / hbar_eff ~ 8.04.
    let r5 = 0.04 / geo(5).hbar_eff();
    let r8 = 0.005 / geo(8).hbar_eff();
    assert!((r5 - r8).abs() / r8 < 0.005, "{r5} vs {r8}");
    assert!((r5 - 8.04).abs() < 0.01);
}

#[test]
fn kraus_chord_equivalence_on_mixed_states() {
    let g = geo(5);
    let kernel = NoiseKernel::new(g, 0.04).unwrap();
    for seed in [30, 31] {
        let rho = random_mixed(g, seed, 4);
        let a = kernel.apply_kraus(&rho).unwrap();
        let b = kernel.apply_chord(&rho).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }
}

// ---------------------------------------------------------------------------
// concurrence structure
// ---------------------------------------------------------------------------

#[test]
fn reduction_property_k3_to_k8() {
    let mut rng = ChaCha12Rng::seed_from_u64(40);
    for k in 3..=8u32 {
        let g_small = geo(k - 1);
        let g_big = geo(k);
        let psi = StateVector::haar_random(g_small, &mut rng);
        // random single-qubit factor
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let phase: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let phi0 = Complex64::new((theta / 2.0).cos(), 0.0);
        let phi1 = Complex64::from_polar((theta / 2.0).sin(), phase);

        // product with the factor on the top qubit (bit k-1)
        let half = g_small.dim();
        let mut amps = ndarray::Array1::<Complex64>::zeros(g_big.dim());
        for i in 0..half {
            amps[i] = phi0 * psi.amplitudes()[i];
            amps[i + half] = phi1 * psi.amplitudes()[i];
        }
        let product = StateVector::from_amplitudes(g_big, amps).unwrap();

        let ck = pure_concurrence_value(&product);
        let ck1 = pure_concurrence_value(&psi);
        assert!((ck - ck1).abs() < 1e-10, "k={k}: {ck} vs {ck1}");
    }
}

#[test]
fn local_unitary_invariance() {
    let g = geo(4);
    let mut rng = ChaCha12Rng::seed_from_u64(41);
    let psi = StateVector::haar_random(g, &mut rng);
    let before = pure_concurrence_value(&psi);

    // independent Haar-ish single-qubit unitaries on every qubit
    let mut amps = psi.amplitudes().clone();
    for qubit in 0..4usize {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let alpha: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let beta: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let u00 = Complex64::from_polar((theta / 2.0).cos(), alpha);
        let u01 = Complex64::from_polar((theta / 2.0).sin(), beta);
        let u10 = -u01.conj();
        let u11 = u00.conj();
        let bit = 1usize << qubit;
        for i in 0..amps.len() {
            if i & bit == 0 {
                let lo = amps[i];
                let hi = amps[i | bit];
                amps[i] = u00 * lo + u01 * hi;
                amps[i | bit] = u10 * lo + u11 * hi;
            }
        }
    }
    let rotated = StateVector::from_amplitudes(g, amps).unwrap();
    let after = pure_concurrence_value(&rotated);
    assert!((before - after).abs() < 1e-10);
}

#[test]
fn estimator_ordering_on_common_instance() {
    // lower bound <= optimized upper bound <= trajectory decomposition
    // average (within sampling error), all on the same evolved mixed state
    let g = geo(3);
    let params = HarperParams::default();
    let u = QuantumPropagator::new(g, params);
    let kernel = NoiseKernel::new(g, 0.1).unwrap();
    let initial = StateVector::coherent(g, PhasePoint::new(0.25, 0.25));

    let steps = 3usize;
    let mut rho = initial.outer();
    for _ in 0..steps {
        rho = u.apply_density(&rho).unwrap();
        rho = kernel.apply_kraus(&rho).unwrap();
    }

    let ensemble = trajectory_concurrence(
        &initial,
        &u,
        &kernel.mixture(),
        steps,
        4096,
        7,
        0,
    )
    .unwrap();
    let upper = ensemble.mean[steps];
    let sigma = ensemble.std_error[steps];

    let lower = mixed_concurrence_lower(&rho).value;
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let optimized = mixed_concurrence_optimized(&rho, 3000, &mut rng)
        .unwrap()
        .value;

    assert!(lower <= optimized + 1e-6, "lower {lower} vs opt {optimized}");
    assert!(
        optimized <= upper + 3.0 * sigma,
        "opt {optimized} vs traj {upper} +- {sigma}"
    );
}

#[test]
fn haar_profile_bounds_at_k8() {
    let g = geo(8);
    let mut rng = ChaCha12Rng::seed_from_u64(60);
    let profile = random_state_concurrence_profile(g, 500, &mut rng);
    assert!(profile.most_probable > 1.4088, "mode {}", profile.most_probable);
    assert!(profile.most_probable < max_pure_concurrence::<f64>(8));
    // the distribution is tightly concentrated at this dimension
    assert!(profile.std_dev < 0.02);
    assert!((profile.mean - profile.median).abs() < 0.01);
}

#[test]
fn pure_concurrence_runtime_at_k8() {
    let g = geo(8);
    let mut rng = ChaCha12Rng::seed_from_u64(43);
    let psi = StateVector::haar_random(g, &mut rng);
    let start = std::time::Instant::now();
    let _ = pure_concurrence_value(&psi);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 0.5,
        "k=8 concurrence took {elapsed:?}"
    );
}

// ---------------------------------------------------------------------------
// trajectory estimator
// ---------------------------------------------------------------------------

#[test]
fn zero_noise_trajectories_coincide_with_unitary_series() {
    let g = geo(4);
    let u = QuantumPropagator::new(g, HarperParams::default());
    let kernel = NoiseKernel::new(g, 0.0).unwrap();
    let initial = StateVector::coherent(g, PhasePoint::new(0.25, 0.0));

    let steps = 6usize;
    let ensemble =
        trajectory_concurrence(&initial, &u, &kernel.mixture(), steps, 4, 11, 0).unwrap();

    let mut psi = initial.clone();
    for t in 0..=steps {
        let exact = pure_concurrence_value(&psi);
        assert_eq!(ensemble.mean[t], exact, "t={t}");
        assert_eq!(ensemble.std_error[t], 0.0, "t={t}");
        psi = u.apply(&psi).unwrap();
    }
}

#[test]
fn trajectory_standard_error_shrinks_with_sample_size() {
    let g = geo(4);
    let u = QuantumPropagator::new(g, HarperParams::default());
    let kernel = NoiseKernel::new(g, 0.08).unwrap();
    let initial = StateVector::coherent(g, PhasePoint::new(0.25, 0.0));

    let small = trajectory_concurrence(&initial, &u, &kernel.mixture(), 8, 256, 13, 0).unwrap();
    let large =
        trajectory_concurrence(&initial, &u, &kernel.mixture(), 8, 512, 13, 1000).unwrap();
    // doubling trajectories shrinks the error by about 1/sqrt(2)
    let ratio = large.std_error[8] / small.std_error[8];
    let expect = 1.0 / 2.0f64.sqrt();
    assert!(
        (ratio - expect).abs() / expect < 0.3,
        "ratio {ratio}, expected about {expect}"
    );
}

#[test]
fn trajectories_are_deterministic_and_stream_derived() {
    let g = geo(3);
    let u = QuantumPropagator::new(g, HarperParams::default());
    let kernel = NoiseKernel::new(g, 0.1).unwrap();
    let initial = StateVector::ghz(g);

    let a = trajectory_concurrence(&initial, &u, &kernel.mixture(), 5, 8, 17, 0).unwrap();
    let b = trajectory_concurrence(&initial, &u, &kernel.mixture(), 5, 8, 17, 0).unwrap();
    assert_eq!(a.values, b.values);

    let c = trajectory_concurrence(&initial, &u, &kernel.mixture(), 5, 8, 18, 0).unwrap();
    assert_ne!(a.values, c.values);
}

// ---------------------------------------------------------------------------
// convex-roof search against the analytic two-qubit oracle
// ---------------------------------------------------------------------------

/// Werner state w |Psi-><Psi-| + (1-w) I/4; its concurrence is
/// max(0, (3w-1)/2).
fn werner(g: TorusGeometry64, w: f64) -> DensityOperator64 {
    let mut m = ndarray::Array2::<Complex64>::zeros((4, 4));
    for i in 0..4 {
        m[(i, i)] = Complex64::new((1.0 - w) / 4.0, 0.0);
    }
    // |Psi-> = (|01> - |10>)/sqrt(2) at indices 1 and 2
    m[(1, 1)] += Complex64::new(w / 2.0, 0.0);
    m[(2, 2)] += Complex64::new(w / 2.0, 0.0);
    m[(1, 2)] -= Complex64::new(w / 2.0, 0.0);
    m[(2, 1)] -= Complex64::new(w / 2.0, 0.0);
    DensityOperator::from_matrix(g, m).unwrap()
}

#[test]
fn optimizer_matches_werner_concurrence() {
    let g = geo(2);
    let mut rng = ChaCha12Rng::seed_from_u64(50);
    for (w, expect) in [(1.0 / 3.0, 0.0), (0.6, 0.4), (0.9, 0.85)] {
        let rho = werner(g, w);
        let got = mixed_concurrence_optimized(&rho, 12_000, &mut rng)
            .unwrap()
            .value;
        assert!(
            (got - expect).abs() < 2e-2,
            "w={w}: got {got}, expected {expect}"
        );
    }
}

// ---------------------------------------------------------------------------
// generic-scalar smoke test
// ---------------------------------------------------------------------------

#[test]
fn single_precision_path_is_consistent() {
    let g32: TorusGeometry32 = TorusGeometry::new(4).unwrap();
    let g64 = geo(4);
    let psi32 = StateVector::coherent(g32, PhasePoint::new(0.25f32, 0.25));
    let psi64 = StateVector::coherent(g64, PhasePoint::new(0.25f64, 0.25));
    assert!((psi32.norm() - 1.0).abs() < f32::UNIT_TOL);

    let u32 = QuantumPropagator::new(g32, HarperParams::uniform(0.4964f32));
    let out32 = u32.apply(&psi32).unwrap();
    assert!((out32.norm() - 1.0).abs() < 1e-5);

    let c32 = pure_concurrence_value(&psi32);
    let c64 = pure_concurrence_value(&psi64);
    assert!(
        (c32 as f64 - c64).abs() < 1e-3,
        "f32 {c32} vs f64 {c64}"
    );
}
