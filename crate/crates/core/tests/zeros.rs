use chebias::zeros::{Convention, ZeroCountModel, ZeroError, ZeroSet, ZeroSource};
use proptest::prelude::*;

/// Ordinates of ζ below 50.
const ZETA: [f64; 10] = [
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739189,
    37.586178158825671,
    40.918719012147495,
    43.327073280914999,
    48.005150881167159,
    49.773832477672302,
];

#[test]
fn zeta_zeros_against_the_main_term() {
    let zs = ZeroSet::new("zeta", ZETA.to_vec(), 50.0).unwrap();
    let model = ZeroCountModel::new(0.0f64, 1).unwrap();
    // N(T) = main term + 7/8 + S(T), |S(T)| small at this height
    let n = model.main_term(50.0) + 0.875;
    assert!((n - 10.0).abs() < 1.0, "{n}");
    assert!((zs.len() as f64 - model.expected_count(50.0)).abs() <= model.count_tolerance(50.0));
    let direct: f64 = ZETA.iter().map(|g| 1.0 / (0.25 + g * g)).sum();
    assert!((zs.b0(Convention::OneSided) - direct).abs() < 1e-15);
    assert_eq!(
        zs.b0(Convention::TwoSided),
        2.0 * zs.b0(Convention::OneSided)
    );
    // Σ_{γ>0} 1/(1/4+γ²) = 1 + γ_E/2 - log(4π)/2
    let full = 1.0 + 0.5772156649015329 / 2.0 - (4.0 * std::f64::consts::PI).ln() / 2.0;
    assert!((full - 0.023095708966121).abs() < 1e-12);
    let truncated = zs.b0(Convention::OneSided);
    assert!(truncated < full);
    assert!((truncated + model.b0_tail(50.0) - full).abs() < 2e-3);
    let ps = zs.partial_inverse_sum(30.0).unwrap();
    assert!(
        (ps - ZETA[..3]
            .iter()
            .map(|g| 1.0 / (0.25 + g * g).sqrt())
            .sum::<f64>())
        .abs()
            < 1e-15
    );
    assert!(
        (zs.partial_inverse_sum(50.0).unwrap() - model.partial_sum_main_term(50.0)).abs()
            <= model.partial_sum_tolerance(50.0)
    );
    assert!(matches!(
        zs.partial_inverse_sum(51.0),
        Err(ZeroError::Horizon { .. })
    ));
}

#[test]
fn file_roundtrip() {
    let model = ZeroCountModel::new(4.5, 2).unwrap();
    let zs = model.sample(80.0, 11, "psi_1").unwrap();
    let back = ZeroSet::<f64>::from_text(&zs.to_text()).unwrap();
    assert_eq!(back.ordinates(), zs.ordinates());
    assert_eq!(back.t_max(), zs.t_max());
    assert_eq!(back.character, "psi_1");
    assert_eq!(back.log_conductor, Some(4.5));
    assert_eq!(back.degree, Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi_1.txt");
    zs.save(&path).unwrap();
    let loaded = ZeroSet::<f64>::load(&path).unwrap();
    assert_eq!(loaded.ordinates(), zs.ordinates());
    assert!(matches!(loaded.source, ZeroSource::File(_)));
}

#[test]
fn parse_errors() {
    let bad = |t: &str| ZeroSet::<f64>::from_text(t).unwrap_err();
    assert!(matches!(
        bad("14.1\n12.0\n"),
        ZeroError::NotIncreasing { line: 2, .. }
    ));
    assert!(matches!(
        bad("14.1\n14.1\n"),
        ZeroError::NotIncreasing { .. }
    ));
    assert!(matches!(bad("-3\n"), ZeroError::Parse { line: 1, .. }));
    assert!(matches!(
        bad("# c\nabc\n"),
        ZeroError::Parse { line: 2, .. }
    ));
    assert!(matches!(
        bad("# T_max: 10\n14.1\n"),
        ZeroError::BeyondHorizon { .. }
    ));
    assert!(matches!(bad("# degree: two\n"), ZeroError::Parse { .. }));
    // headers are optional; horizon falls back to the last ordinate
    let zs = ZeroSet::<f64>::from_text("# note: anything\n\n3.0\n7.5\n").unwrap();
    assert_eq!(zs.t_max(), 7.5);
    assert!(ZeroSet::new("x", vec![2.0, 1.0], 5.0).is_err());
    assert!(ZeroSet::new("x", vec![0.0], 5.0).is_err());
    assert!(ZeroCountModel::new(-1.0, 1).is_err());
    assert!(ZeroCountModel::new(1.0, 0).is_err());
    assert!(ZeroCountModel::new(1.0, 1)
        .unwrap()
        .sample(0.5, 0, "x")
        .is_err());
}

#[test]
fn synthetic_counts_follow_the_main_term() {
    for (log_a, deg) in [(0.0f64, 1), (3.0, 1), (10.0, 2), (40.0, 2)] {
        let model = ZeroCountModel::new(log_a, deg).unwrap();
        let t_max = 200.0;
        let mean = model.cumulative_intensity(t_max);
        // the clamped intensity exceeds the main term by at most its negative dip
        assert!(
            mean >= model.expected_count(t_max)
                && mean - model.expected_count(t_max) <= deg as f64 + 1e-4,
            "{mean} {}",
            model.expected_count(t_max)
        );
        let mut total = 0.0;
        let runs = 40;
        for seed in 0..runs {
            let zs = model.sample(t_max, seed, "c").unwrap();
            assert!(
                (zs.len() as f64 - model.expected_count(t_max)).abs()
                    <= model.count_tolerance(t_max)
            );
            // counts below each checkpoint track the compensator
            for t in [20.0, 80.0, 150.0] {
                let k = zs.ordinates().iter().filter(|&&g| g <= t).count() as f64;
                let lam = model.cumulative_intensity(t);
                assert!(
                    (k - lam).abs() <= 6.0 * lam.sqrt() + 2.0,
                    "{log_a} {t} {k} {lam}"
                );
            }
            total += zs.len() as f64;
        }
        let avg = total / runs as f64;
        assert!(
            (avg - mean).abs() <= 4.0 * (mean / runs as f64).sqrt(),
            "{avg} vs {mean}"
        );
    }
}

#[test]
fn b0_tail_matches_synthetic_tail() {
    let model = ZeroCountModel::new(8.0, 2).unwrap();
    let mut tail = 0.0;
    let runs = 10;
    for seed in 0..runs {
        let zs = model.sample(3000.0, seed, "c").unwrap();
        let head = zs.truncate(100.0).unwrap();
        assert_eq!(head.t_max(), 100.0);
        tail += zs.b0(Convention::OneSided) - head.b0(Convention::OneSided);
    }
    tail /= runs as f64;
    let predicted = model.b0_tail(100.0) - model.b0_tail(3000.0);
    assert!(
        (tail - predicted).abs() < 0.05 * predicted,
        "{tail} vs {predicted}"
    );
}

#[test]
fn sampling_is_deterministic_and_generic() {
    let model = ZeroCountModel::new(5.0, 1).unwrap();
    assert_eq!(
        model.sample(60.0, 3, "a").unwrap(),
        model.sample(60.0, 3, "a").unwrap()
    );
    assert_ne!(
        model.sample(60.0, 3, "a").unwrap().ordinates(),
        model.sample(60.0, 4, "a").unwrap().ordinates()
    );
    let m32 = ZeroCountModel::new(5.0f32, 1).unwrap();
    let z32 = m32.sample(60.0, 3, "a").unwrap();
    assert!((z32.len() as i64 - model.sample(60.0, 3, "a").unwrap().len() as i64).abs() <= 1);
    assert!(z32.b0(Convention::OneSided) > 0.0);
}

proptest! {
    #[test]
    fn intensity_is_increasing_and_dominates(log_a in 0.0f64..50.0, deg in 1u32..4, t in 1.0f64..500.0) {
        let m = ZeroCountModel::new(log_a, deg).unwrap();
        prop_assert!(m.cumulative_intensity(t * 1.01) > m.cumulative_intensity(t));
        prop_assert!(m.cumulative_intensity(t) + 1e-9 >= m.expected_count(t));
        prop_assert!(m.density(t) > 0.0);
        let h = 1e-4 * t;
        let fd = (m.cumulative_intensity(t + h) - m.cumulative_intensity(t - h)) / (2.0 * h);
        prop_assert!((fd - m.density(t)).abs() < 1e-5 * (1.0 + m.density(t)));
    }

    #[test]
    fn samples_are_valid(seed in any::<u64>(), log_a in 0.0f64..20.0) {
        let zs = ZeroCountModel::new(log_a, 1).unwrap().sample(40.0, seed, "c").unwrap();
        prop_assert!(zs.ordinates().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(zs.ordinates().iter().all(|&g| g > 0.0 && g <= 40.0));
        let back = ZeroSet::<f64>::from_text(&zs.to_text()).unwrap();
        prop_assert_eq!(back.ordinates(), zs.ordinates());
    }
}
