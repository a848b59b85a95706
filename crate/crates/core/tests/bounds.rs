use chebias::bounds::{
    bound_report, clt_estimate, fit_lower_constants, lower_bound, mo_tail, q_factor, upper_bound,
    Bound, BoundConstants, TailObservation,
};
use chebias::characters::{sr_partition, CharacterId};
use chebias::density::{density_fourier, FourierConfig};
use chebias::group::{ClassLabel, Family, Group, GroupKind};
use chebias::race::{weights, RaceModel, RaceSpec};
use proptest::prelude::*;

#[test]
fn h8_q_factor_uses_the_reduced_form() {
    let kind = GroupKind::new(Family::Quaternion, 3).unwrap();
    let g = Group::new(kind).unwrap();
    let sr = sr_partition(&g.level(3).unwrap()).unwrap();
    assert!(sr.r.is_empty());
    // (1, -1): only ψ separates, weight 4
    let q = q_factor(
        &RaceSpec::new(kind, 3, ClassLabel::One, ClassLabel::MinusOne, 1).unwrap(),
        &sr,
        1.0,
    )
    .unwrap();
    assert!(q.reduced);
    assert_eq!((q.b3, q.b4, q.q), (4.0, 4.0, 2.0));
    assert_eq!(q.lambda_star, CharacterId::Psi(1));
    // (1, i): χ2, χ3, ψ all at weight 2, λ* is the first of them
    let q = q_factor(
        &RaceSpec::new(kind, 3, ClassLabel::One, ClassLabel::Power(1), 1).unwrap(),
        &sr,
        1.5,
    )
    .unwrap();
    assert_eq!((q.b3, q.b4), (2.0, 2.0));
    assert!((q.q - 3.0).abs() < 1e-12);
    assert_eq!(q.lambda_star, CharacterId::Chi(2));
}

#[test]
fn q_factor_matches_its_definition_below_the_top() {
    for family in [Family::Dihedral, Family::Quaternion] {
        let kind = GroupKind::new(family, 6).unwrap();
        let g = Group::new(kind).unwrap();
        for i in 3..6 {
            let lvl = g.level(i).unwrap();
            let sr = sr_partition(&lvl).unwrap();
            assert!(!sr.r.is_empty());
            for o in [0, 1] {
                for c1 in lvl.group().classes() {
                    for c2 in lvl.group().classes() {
                        let Ok(spec) = RaceSpec::new(kind, i, c1, c2, o) else {
                            continue;
                        };
                        if !spec.is_defined() {
                            continue;
                        }
                        let q = q_factor(&spec, &sr, 1.0).unwrap();
                        let w = weights(&spec).unwrap();
                        let nz: Vec<_> = w.iter().filter(|x| !x.is_zero).collect();
                        let b3 = nz.iter().map(|x| x.value).fold(0.0, f64::max);
                        let b4 = nz.iter().map(|x| x.value).fold(f64::INFINITY, f64::min);
                        let star = nz.iter().find(|x| (x.value - b3).abs() < 1e-9).unwrap();
                        // symplectic characters only exist at quaternion levels, and restrict to R only via ψ
                        let m = 1 + if family == Family::Quaternion {
                            spec.level_orders()
                                .unwrap()
                                .iter()
                                .zip(chebias::characters::character_ids(lvl.group()))
                                .filter(|(_, id)| sr.r.contains(id))
                                .map(|(o, _)| *o)
                                .max()
                                .unwrap_or(0)
                        } else {
                            0
                        };
                        let expected = ((m * sr.b1 * sr.b2) as f64 / (star.degree as f64 * b3))
                            .sqrt()
                            .exp()
                            .max(b3 / b4)
                            .max(1.0);
                        assert!((q.q - expected).abs() < 1e-12 * expected);
                        assert_eq!(q.lambda_star, star.id);
                        assert!(q.q >= 1.0);
                    }
                }
            }
        }
    }
}

#[test]
fn bound_shapes() {
    assert_eq!(upper_bound(-1.0, 0.1), Bound::NotApplicable);
    assert_eq!(upper_bound(0.0, 0.1), Bound::NotApplicable);
    assert_eq!(upper_bound(2.0, 1.0 / 16.0), Bound::Value((-0.25f64).exp()));
    assert_eq!(lower_bound(-2.0, 2.0, 0.3, 0.5), Bound::NotApplicable);
    assert_eq!(
        lower_bound(1.0, 2.0, 0.3, 0.5).value(),
        Some(0.3 * (-1.0f64).exp())
    );
    let c = clt_estimate(0.5, 100.0).unwrap();
    assert!((c.estimate - (0.5 + 0.5 / (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
    assert!((c.budget - (0.125 + 100f64.powf(-1.0 / 3.0))).abs() < 1e-15);
    assert!(clt_estimate(0.5, 0.0).is_none());
    let k = BoundConstants::default();
    assert_eq!((k.c3, k.c_q), (1.0 / 16.0, 1.0));
    assert!(k.c1 > 0.0 && k.c1 <= 1.0);
}

#[test]
fn mo_tail_sums() {
    let t = mo_tail(&[3.0, 2.0, 0.5, 0.5], 4.0, 1.0, 0.4, 0.5).unwrap();
    assert_eq!((t.sum_large, t.sum_small_sq), (5.0, 0.5));
    assert!(!t.upper_applicable && !t.lower_applicable);
    assert!((t.upper_value - (-2.0f64).exp()).abs() < 1e-15);
    assert!((t.lower_value - 0.4 * (-16.0f64).exp()).abs() < 1e-15);
    let t = mo_tail(&[0.5, 0.25], 2.0, 1.0, 0.4, 0.5).unwrap();
    assert!(t.upper_applicable);
    let t = mo_tail(&[5.0, 0.25], 2.0, 1.0, 0.4, 0.5).unwrap();
    assert!(t.lower_applicable);
    assert!(mo_tail(&[1.0], -1.0, 1.0, 0.4, 0.5).is_err());
    assert!(mo_tail(&[1.0], 1.0, 0.0, 0.4, 0.5).is_err());
}

#[test]
fn fit_takes_the_coverage_quantile() {
    let obs: Vec<TailObservation> = (1..=10)
        .map(|k| TailObservation {
            tail: 0.1 * k as f64 * (-1.0f64).exp(),
            q: 1.0,
            bias: 1.0,
        })
        .collect();
    let all = fit_lower_constants(&obs, 1.0, 1.0).unwrap();
    assert!((all - 0.1).abs() < 1e-12);
    let most = fit_lower_constants(&obs, 1.0, 0.8).unwrap();
    assert!((most - 0.3).abs() < 1e-12);
    for o in &obs {
        assert!(lower_bound(o.bias, o.q, all, 1.0).value().unwrap() <= o.tail + 1e-15);
    }
    assert!(fit_lower_constants(
        &[TailObservation {
            tail: 0.1,
            q: 1.0,
            bias: -1.0
        }],
        1.0,
        1.0
    )
    .is_none());
}

#[test]
fn report_orientation() {
    let kind = GroupKind::new(Family::Quaternion, 3).unwrap();
    let g = Group::new(kind).unwrap();
    let sr = sr_partition(&g.level(3).unwrap()).unwrap();
    let spec = RaceSpec::new(kind, 3, ClassLabel::MinusOne, ClassLabel::One, 1).unwrap();
    let model = RaceModel::from_terms(4, vec![2.0, 1.0, 1.0]);
    let r = bound_report(&spec, &model, &sr, &BoundConstants::default());
    assert!(r.bias > 0.0);
    assert!(r.upper_one_minus_delta.value().is_some());
    assert!(r.lower_one_minus_delta.value().unwrap() <= r.upper_one_minus_delta.value().unwrap());
    let r = bound_report(
        &spec.swapped(),
        &model.with_mean(-4),
        &sr,
        &BoundConstants::default(),
    );
    assert_eq!(r.upper_one_minus_delta, Bound::NotApplicable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn upper_bound_holds(m in 1i64..6, count in 5usize..30, scale in 0.5f64..3.0, seed in any::<u64>()) {
        let terms: Vec<f64> = (0..count).map(|k| scale * (1.0 + ((seed >> (k % 60)) & 7) as f64) / (k as f64 + 2.0)).collect();
        let model = RaceModel::from_terms(m, terms);
        let f = density_fourier(&model, &FourierConfig::default()).unwrap();
        let b = model.bias_factor;
        let upper = upper_bound(b, 1.0 / 16.0).value().unwrap();
        prop_assert!(1.0 - f.value <= upper + f.error_bound, "1-δ = {} > {upper}", 1.0 - f.value);
        // sub-Gaussian tail of a bounded symmetric sum
        prop_assert!(1.0 - f.value <= (-b * b / 4.0).exp() + f.error_bound);
    }
}
