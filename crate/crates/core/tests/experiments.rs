//! Harness-level checks of decoder agreement, loss landscapes and
//! gradient-descent behavior.

use std::f64::consts::{FRAC_PI_2, PI};

use orient_core::analysis::{
    fit_representation, perturbed_canonical, simulate_noisy_predictions, sweep_landscape,
    uniform_grid, GridOracle,
};
use orient_core::loss::{
    angular_loss, finite_diff_gradient, l2_loss, multibin_loss, relative_error, LossKind,
};
use orient_core::{
    circular_diff, decode, encode, orientation_similarity, Angle, ReprScheme, ReprVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn a(x: f64) -> Angle {
    Angle::wrap(x).unwrap()
}

#[test]
fn closed_form_decoders_agree_with_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for scheme in ReprScheme::standard_set() {
        let oracle = GridOracle::new(scheme, 10_000).unwrap();
        let mut worst_noisy = 0.0f64;
        let mut worst_exact = 0.0f64;
        for _ in 0..200 {
            let t = a(rng.random_range(-PI..PI));
            let exact = encode(&scheme, t);
            worst_exact = worst_exact
                .max(circular_diff(decode(&exact).unwrap(), oracle.decode(&exact).unwrap()).abs());
            let noisy = perturbed_canonical(&scheme, t, 1e-4, &mut rng);
            worst_noisy = worst_noisy
                .max(circular_diff(decode(&noisy).unwrap(), oracle.decode(&noisy).unwrap()).abs());
        }
        assert!(worst_exact < 1e-9, "{scheme}: exact {worst_exact:e}");
        assert!(worst_noisy < 1e-3, "{scheme}: noisy {worst_noisy:e}");
    }
}

#[test]
fn voting_outlier_decode_matches_oracle() {
    // candidates {0.30, 0.31, 0.29, 2.0}: the oracle, fed only the three
    // agreeing pairs' consensus, lands on the same angle as the vote
    let s = ReprScheme::voting_bins(4).unwrap();
    let candidates = [0.30, 0.31, 0.29, 2.0];
    let mut values = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let d = circular_diff(a(*c), s.bin(i).center);
        values.extend([d.cos(), d.sin()]);
    }
    let v = ReprVector::new(s, values).unwrap();
    let voted = decode(&v).unwrap();
    assert!((voted.radians() - 0.30).abs() < 1e-12);

    let consensus = ReprVector::new(
        ReprScheme::voting_bins(3).unwrap(),
        candidates[..3]
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                let d = circular_diff(a(*c), ReprScheme::voting_bins(3).unwrap().bin(i).center);
                [d.cos(), d.sin()]
            })
            .collect(),
    )
    .unwrap();
    let oracle = GridOracle::new(*consensus.scheme(), 10_000).unwrap();
    assert!(circular_diff(oracle.decode(&consensus).unwrap(), voted).abs() < 1e-6);
}

#[test]
fn gradient_checks_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sb = ReprScheme::single_bin();
    let mb = ReprScheme::multibin(2, 0.1).unwrap();
    for scheme in ReprScheme::standard_set() {
        for _ in 0..20 {
            let target = encode(&scheme, a(rng.random_range(-PI..PI)));
            let pred: Vec<f64> = (0..scheme.dimension()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let pred = ReprVector::new(scheme, pred).unwrap();
            let an = l2_loss(&pred, &target).unwrap().gradient;
            let fd = finite_diff_gradient(l2_loss, &pred, &target, 1e-6).unwrap();
            assert!(relative_error(&an, &fd) < 1e-5, "{scheme}");
        }
    }
    for _ in 0..100 {
        let target = encode(&sb, a(rng.random_range(-PI..PI)));
        let r: f64 = rng.random_range(0.2..3.0);
        let phi: f64 = rng.random_range(-PI..PI);
        let pred = ReprVector::new(sb, vec![r * phi.cos(), r * phi.sin()]).unwrap();
        let an = angular_loss(&pred, &target).unwrap().gradient;
        let fd = finite_diff_gradient(angular_loss, &pred, &target, 1e-6).unwrap();
        assert!(relative_error(&an, &fd) < 1e-5);

        let target = encode(&mb, a(rng.random_range(-PI..PI)));
        let pred: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let pred = ReprVector::new(mb, pred).unwrap();
        let an = multibin_loss(&pred, &target).unwrap().gradient;
        let fd = finite_diff_gradient(multibin_loss, &pred, &target, 1e-6).unwrap();
        assert!(relative_error(&an, &fd) < 1e-5);
    }
}

#[test]
fn l2_sweeps_bottom_out_at_ground_truth() {
    for gt in [0.0, 1.0, -2.5] {
        for scheme in [ReprScheme::single_bin(), ReprScheme::tricosine(), ReprScheme::voting_bins(4).unwrap()] {
            let sweep = sweep_landscape(scheme, LossKind::L2, a(gt), 1000).unwrap();
            let best = sweep.samples[sweep.argmin()].0;
            assert!(circular_diff(best, a(gt)).abs() <= sweep.grid_step() + 1e-12, "{scheme} gt={gt}");
        }
    }
}

#[test]
fn angular_overlaps_l2_on_single_bin() {
    let s = ReprScheme::single_bin();
    let l2 = sweep_landscape(s, LossKind::L2, Angle::ZERO, 2000).unwrap();
    let ang = sweep_landscape(s, LossKind::Angular, Angle::ZERO, 2000).unwrap();
    for (x, y) in l2.samples.iter().zip(&ang.samples) {
        assert!((x.1 - 2.0 * y.1).abs() < 1e-12);
    }
}

#[test]
fn multibin_landscape_is_flat_far_from_ground_truth() {
    let s = ReprScheme::multibin(2, 0.1).unwrap();
    let sweep = sweep_landscape(s, LossKind::Multibin, Angle::ZERO, 2000).unwrap();
    let pts: Vec<(f64, f64)> = sweep.samples.iter().map(|(t, l)| (t.radians(), *l)).collect();
    let flat = pts
        .windows(2)
        .filter(|w| w[0].0 >= FRAC_PI_2 && w[1].0 <= PI)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
        .filter(|d| *d < 1e-3)
        .count();
    assert!(flat > 100, "only {flat} flat segments");
    // global minimum still at zero
    assert!(sweep.samples[sweep.argmin()].0.radians().abs() <= sweep.grid_step());
}

#[test]
fn scalar_landscape_jumps_at_the_wrap() {
    let s = ReprScheme::global_scalar();
    let sweep = sweep_landscape(s, LossKind::L2, Angle::ZERO, 1000).unwrap();
    let first = sweep.samples.first().unwrap().1;
    let last = sweep.samples.last().unwrap().1;
    // (±1)² at both ends of the circle, and smooth nowhere near a jump
    assert!((first - 1.0).abs() < 1e-12);
    assert!((last - 1.0).abs() < 0.02);
    let trough = sweep.samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    assert!(trough < 1e-5);
}

#[test]
fn single_bin_l2_descent_converges_from_everywhere() {
    let s = ReprScheme::single_bin();
    for init in uniform_grid(36) {
        let trace = fit_representation(s, LossKind::L2, Angle::ZERO, encode(&s, init), 0.1, 2000).unwrap();
        let end = trace.last().decoded.unwrap();
        assert!(end.radians().abs() < 1e-3, "init {init}");
        assert!(trace.trajectory.windows(2).all(|w| w[1].loss <= w[0].loss + 1e-15));
    }
}

#[test]
fn angular_descent_from_encoded_antipode_escapes_only_slowly() {
    // encode(-π) is off the exact antipode by sin(π) ≈ 1.2e-16; the residual
    // grows by (1 + lr) per step, so the stall lasts hundreds of steps
    let s = ReprScheme::single_bin();
    let trace =
        fit_representation(s, LossKind::Angular, Angle::ZERO, encode(&s, a(-PI)), 0.1, 100).unwrap();
    let start = trace.first().decoded.unwrap();
    let end = trace.last().decoded.unwrap();
    assert!(circular_diff(end, start).abs() < 1e-9);
}

#[test]
fn noise_washes_out_to_half_similarity() {
    let angles = uniform_grid(10_000);
    for scheme in ReprScheme::standard_set() {
        let batch = simulate_noisy_predictions(scheme, &angles, 1e3, 5).unwrap();
        let os = orientation_similarity(&batch);
        assert!((os - 0.5).abs() < 0.03, "{scheme}: {os}");
    }
}

#[test]
fn moderate_noise_ranks_schemes_below_perfect() {
    let angles = uniform_grid(5_000);
    for scheme in ReprScheme::standard_set() {
        let os = orientation_similarity(&simulate_noisy_predictions(scheme, &angles, 0.05, 1).unwrap());
        assert!(os > 0.9 && os < 1.0, "{scheme}: {os}");
    }
}
