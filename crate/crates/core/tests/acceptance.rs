//! Acceptance checks. Prints one PASS/FAIL line per criterion with its
//! sub-checks underneath and exits nonzero only when a check fails that is not
//! listed as a known disagreement.
//!
//! Run alone with `cargo test --release -p chebias --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chebias::arith::{
    conductor_discriminant, conductor_exponent, tame_discriminant_exponent, ArithmeticScenario,
    RamificationData,
};
use chebias::bounds::BoundConstants;
use chebias::characters::{
    character_ids, induce, inner_product, psi_matrix, symplectic_value_sum, CharacterId,
    CharacterTable, Cyclo, FsType,
};
use chebias::density::{density_fourier, density_montecarlo, FourierConfig};
use chebias::experiments::{
    horizontal_experiment, monotonicity_experiment, parse_class, reproduce_table, sandwich_races,
    tower_experiment, ExperimentConfig, ExperimentId, RaceOutcome, Verdict,
};
use chebias::group::{ClassLabel, Element, Family, Group, GroupKind};
use chebias::race::{mean_table, RaceModel, RowStatus};
use chebias::reference::printed_induction;
use chebias::zeros::{ZeroCountModel, ZeroSet};

/// Seed for the sandwich races; the constants were fitted on a different one.
const SANDWICH_SEED: u64 = 0xACCE_97;
/// Published `δ(4; 3, 1)` for the mod 4 race.
const MOD4_DELTA: f64 = 0.9959;

struct Check {
    name: String,
    ok: bool,
    /// reason the check is expected to fail
    known: Option<&'static str>,
    detail: String,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        ok,
        known: None,
        detail: detail.into(),
    }
}

fn known(
    name: impl Into<String>,
    ok: bool,
    detail: impl Into<String>,
    reason: &'static str,
) -> Check {
    Check {
        name: name.into(),
        ok,
        known: Some(reason),
        detail: detail.into(),
    }
}

fn within(name: &str, elapsed: Duration, limit: Duration) -> Check {
    check(
        format!("{name} under {:?}", limit),
        elapsed <= limit,
        format!("{:.2?}", elapsed),
    )
}

fn sign(k: u32) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn groups(lo: u32, hi: u32) -> Vec<Group> {
    (lo..=hi)
        .flat_map(|n| [Group::dihedral(n).unwrap(), Group::quaternion(n).unwrap()])
        .collect()
}

fn value(g: &Group, id: CharacterId, x: Element) -> Cyclo {
    let m = g.rotation_order();
    let (e, f) = (x.exponent, x.flip as u32);
    match id {
        CharacterId::Chi(0) => Cyclo::one(m),
        CharacterId::Chi(1) => Cyclo::integer(m, sign(f)),
        CharacterId::Chi(2) => Cyclo::integer(m, sign(e)),
        CharacterId::Chi(3) => Cyclo::integer(m, sign(e + f)),
        CharacterId::Psi(j) => {
            let p = psi_matrix(g, j, x);
            &p[0][0] + &p[1][1]
        }
        CharacterId::Chi(_) => unreachable!(),
    }
}

fn criterion_1() -> Vec<Check> {
    let start = Instant::now();
    let (mut counts, mut sizes, mut rows, mut cols, mut fs, mut faithful) =
        (true, true, true, true, true, true);
    for g in groups(3, 8) {
        let table = CharacterTable::new(&g);
        counts &= g.class_count() == (1 << (g.n() - 2)) + 3 && table.len() == g.class_count();
        sizes &= g.classes().iter().map(|&c| g.class_size(c)).sum::<u64>() == g.order();
        for (a, x) in table.characters().iter().enumerate() {
            for (b, y) in table.characters().iter().enumerate() {
                rows &=
                    inner_product(&g, &x.values, &y.values).ok() == Some(((a == b) as i64).into());
            }
            let symplectic = g.family() == Family::Quaternion
                && matches!(x.id, CharacterId::Psi(j) if j % 2 == 1);
            fs &= x.fs
                == if symplectic {
                    FsType::Symplectic
                } else {
                    FsType::Orthogonal
                };
            faithful &= x.faithful == matches!(x.id, CharacterId::Psi(j) if j % 2 == 1);
        }
        let m = g.rotation_order();
        let classes = g.classes();
        for (c, &cl) in classes.iter().enumerate() {
            for d in 0..classes.len() {
                let mut acc = Cyclo::zero(m);
                for ch in table.characters() {
                    acc.add_product(&ch.values.values[c], &ch.values.values[d].conj(), &1);
                }
                let expected = if c == d {
                    (g.order() / g.class_size(cl)) as i64
                } else {
                    0
                };
                cols &= acc == Cyclo::integer(m, expected);
            }
        }
    }
    vec![
        check("class count 2^{n-2}+3", counts, ""),
        check("class sizes sum to 2^n", sizes, ""),
        check("row orthogonality exact", rows, ""),
        check("column orthogonality exact", cols, ""),
        check(
            "indicator classification",
            fs,
            "quaternion psi_odd symplectic, all others orthogonal",
        ),
        check("faithful exactly for psi_odd", faithful, ""),
        within("n = 3..8", start.elapsed(), Duration::from_secs(10)),
    ]
}

fn criterion_2() -> Vec<Check> {
    let start = Instant::now();
    let mut oracle = true;
    let mut verbatim_other = true;
    let mut verbatim_linear = true;
    let mut cases = 0;
    for g in groups(3, 6) {
        let m = g.rotation_order();
        for i in 3..=g.n() {
            let lvl = g.level(i).unwrap();
            let h = lvl.group();
            for phi in character_ids(h) {
                let dec = induce(&lvl, phi).unwrap();
                // multiplicities by element sums over H
                for lam in character_ids(&g) {
                    let mut acc = Cyclo::zero(m);
                    for x in h.elements() {
                        acc = &acc
                            + &(&value(h, phi, x).lift(m) * &value(&g, lam, lvl.embed(x)).conj());
                    }
                    let s = acc.as_integer().unwrap();
                    oracle &= s % h.order() as i64 == 0
                        && s / h.order() as i64 == dec.multiplicity(lam) as i64;
                }
                cases += 1;
                if let Some(printed) = printed_induction(g.n(), i, phi) {
                    let same = printed == dec.components;
                    match phi {
                        CharacterId::Chi(0) | CharacterId::Chi(1) => verbatim_linear &= same,
                        _ => verbatim_other &= same,
                    }
                }
            }
        }
    }
    vec![
        check(
            "induce() equals the reciprocity oracle",
            oracle,
            format!("{cases} characters"),
        ),
        check(
            "displayed images of chi_2, chi_3, psi_k",
            verbatim_other,
            "",
        ),
        known(
            "displayed image of chi_0, chi_1",
            verbatim_linear,
            "the displayed image adds the other two linear characters",
            "the printed formula lists all four linear characters; reciprocity gives two",
        ),
        within("3 <= i <= n <= 6", start.elapsed(), Duration::from_secs(30)),
    ]
}

fn criterion_3() -> Vec<Check> {
    let start = Instant::now();
    let mut ok = true;
    let mut count = 0;
    for i in 3..=10u32 {
        for k in 1..(1u32 << (i - 2)) {
            ok &= symplectic_value_sum(i, k)
                .map(|c| c.is_zero())
                .unwrap_or(false);
            count += 1;
        }
    }
    vec![
        check("sums vanish exactly", ok, format!("{count} (i, k) pairs")),
        within("i = 3..10", start.elapsed(), Duration::from_secs(1)),
    ]
}

fn criterion_4() -> Vec<Check> {
    let start = Instant::now();
    let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0D1);
    let mut identity = true;
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let g = if rng.gen() {
            Group::dihedral(n).unwrap()
        } else {
            Group::quaternion(n).unwrap()
        };
        let mut pool = primes.to_vec();
        let chosen: Vec<(u64, Element)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let p = pool.remove(rng.gen_range(0..pool.len()));
                let x = loop {
                    let x = Element {
                        exponent: rng.gen_range(0..g.rotation_order()),
                        flip: rng.gen(),
                    };
                    if x != Element::IDENTITY {
                        break x;
                    }
                };
                (p, x)
            })
            .collect();
        let ram = RamificationData::explicit(&g, &chosen).unwrap();
        let table = CharacterTable::new(&g);
        let disc = conductor_discriminant(&table, &ram);
        for (k, q) in ram.primes.iter().enumerate() {
            let sum: u64 = table
                .characters()
                .iter()
                .map(|ch| ch.degree as u64 * conductor_exponent(&g, ch.id, q.inertia) as u64)
                .sum();
            let tame = tame_discriminant_exponent(g.order(), g.element_order(q.inertia));
            identity &= sum == tame && disc.exponents[k] as u64 == tame;
        }
    }
    let h8 = Group::quaternion(3).unwrap();
    let table = CharacterTable::new(&h8);
    let mut pattern = true;
    for (x, e) in [
        (Element::rotation(2), 4),
        (Element::rotation(1), 6),
        (Element::flipped(0), 6),
        (Element::flipped(1), 6),
    ] {
        let ram = RamificationData::explicit(&h8, &[(7, x)]).unwrap();
        pattern &= conductor_discriminant(&table, &ram).exponents == vec![e]
            && conductor_exponent(&h8, CharacterId::Psi(1), x) == 2;
    }
    let mut bracket = true;
    let choices = [
        Element::rotation(2),
        Element::rotation(1),
        Element::flipped(0),
        Element::flipped(1),
    ];
    for _ in 0..100 {
        let count = rng.gen_range(1..=5);
        let ps: Vec<(u64, Element)> = primes[..count]
            .iter()
            .map(|&p| (p, choices[rng.gen_range(0..4)]))
            .collect();
        let s =
            ArithmeticScenario::new(h8.kind(), RamificationData::explicit(&h8, &ps).unwrap(), 1)
                .unwrap();
        let a = s.conductors()[4].log_conductor;
        bracket &= 2.0 * a <= s.log_disc + 1e-9 && s.log_disc <= 3.0 * a + 1e-9;
    }
    vec![
        check("exact identity on 200 random tame scenarios", identity, ""),
        check("H8 exponents: p^4 for e = 2, p^6 for e = 4", pattern, ""),
        check("A(psi)^2 <= |d| <= A(psi)^3", bracket, "100 H8 scenarios"),
        within("conductor checks", start.elapsed(), Duration::from_secs(10)),
    ]
}

fn criterion_5() -> Vec<Check> {
    let start = Instant::now();
    let (mut q_rows, mut q_minus, mut q_minus_rows, mut d_rows, mut d_flagged) =
        (true, true, 0, true, true);
    let mut q_minus_detail = String::new();
    for n in 3..=8 {
        for i in 3..=n {
            for w in [1i8, -1] {
                for r in
                    mean_table(GroupKind::new(Family::Quaternion, n).unwrap(), i, w, None).unwrap()
                {
                    if r.status == RowStatus::Undefined {
                        continue;
                    }
                    let hit = r.mean_formula == r.mean_reference;
                    if matches!((r.c1, r.c2), (ClassLabel::MinusOne, ClassLabel::Power(_))) {
                        q_minus_rows += 1;
                        if !hit && q_minus {
                            q_minus_detail = format!(
                                "n={n} i={i} W={w} {}/{}: {:?} vs {:?}",
                                r.c1_name, r.c2_name, r.mean_formula, r.mean_reference
                            );
                        }
                        q_minus &= hit;
                    } else {
                        q_rows &= hit;
                    }
                }
            }
            for r in mean_table(GroupKind::new(Family::Dihedral, n).unwrap(), i, 1, None).unwrap() {
                if r.status == RowStatus::Undefined {
                    continue;
                }
                if r.c1 == ClassLabel::One || r.c2 == ClassLabel::One {
                    d_flagged &= r.status == RowStatus::Match
                        || (r.status == RowStatus::OpenQuestion
                            && r.mean_formula.is_some()
                            && r.mean_reference.is_some());
                } else {
                    d_rows &= r.mean_formula == r.mean_reference;
                }
            }
        }
    }
    let h8 = reproduce_table(ExperimentId::H8Table, 3, 3, 1).unwrap();
    let h8_ok = h8.h8_rows.len() == 20 && h8.h8_rows.iter().all(|r| r.status == RowStatus::Match);
    vec![
        check(
            "quaternion rows other than (C_-1, C_x^k)",
            q_rows,
            "3 <= i <= n <= 8, W = +1, -1",
        ),
        known(
            "quaternion (C_-1, C_x^k) rows",
            q_minus,
            format!("{q_minus_rows} rows; first mismatch {q_minus_detail}"),
            "sign slip in the printed (-1)^k term; computed value differs by 2(-1)^k",
        ),
        check("dihedral rows without C_1", d_rows, ""),
        check(
            "dihedral C_1 rows emitted with both values",
            d_flagged,
            "flagged open-question, computed value one below",
        ),
        check("H8 means and variances, o in {0, 1}", h8_ok, ""),
        within("mean tables", start.elapsed(), Duration::from_secs(5)),
    ]
}

fn random_model(rng: &mut ChaCha8Rng) -> RaceModel<f64> {
    let mut terms = Vec::new();
    let characters = rng.gen_range(2..=5);
    for c in 0..characters {
        let model = ZeroCountModel::new(rng.gen_range(2.0..20.0), rng.gen_range(1..=2)).unwrap();
        let w: f64 = [1.0, 2.0, 4.0][rng.gen_range(0..3)];
        let zs = model
            .sample(rng.gen_range(60.0..120.0), rng.gen(), format!("c{c}"))
            .unwrap();
        terms.extend(
            zs.ordinates()
                .iter()
                .map(|g: &f64| 2.0 * w / (0.25 + g * g).sqrt()),
        );
    }
    let m = rng.gen_range(1..=6) * if rng.gen() { 1 } else { -1 };
    RaceModel::from_terms(m, terms)
}

fn criterion_6() -> Vec<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE75);
    let cfg = FourierConfig::default();
    let (mut agree, mut half, mut complement) = (true, true, true);
    let mut worst = 0.0f64;
    let mut min_terms = usize::MAX;
    for k in 0..50 {
        let model = random_model(&mut rng);
        min_terms = min_terms.min(model.terms.len());
        let mc = density_montecarlo(&model, 100_000, 100 + k).unwrap();
        let fo = density_fourier(&model, &cfg).unwrap();
        let diff = (mc.value - fo.value).abs();
        let tol = (3.0 * mc.error_bound).max(1e-3);
        worst = worst.max(diff / tol);
        agree &= diff <= tol;
        let neg = model.with_mean(-model.mean);
        let fo_neg = density_fourier(&neg, &cfg).unwrap();
        let mc_neg = density_montecarlo(&neg, 100_000, 100 + k).unwrap();
        complement &=
            (fo.value + fo_neg.value - 1.0).abs() <= fo.error_bound + fo_neg.error_bound + 1e-12;
        complement &= (mc.value + mc_neg.value - 1.0).abs() <= mc.error_bound + mc_neg.error_bound;
        if k < 10 {
            let zero = model.with_mean(0);
            let f0 = density_fourier(&zero, &cfg).unwrap();
            let m0 = density_montecarlo(&zero, 100_000, k).unwrap();
            half &= f0.value == 0.5 && (m0.value - 0.5).abs() <= m0.error_bound;
        }
    }
    vec![
        check(
            "at least 200 terms per model",
            min_terms >= 200,
            format!("min {min_terms}"),
        ),
        check(
            "|MC - Fourier| <= max(3 CI, 1e-3)",
            agree,
            format!("worst ratio {worst:.3}"),
        ),
        check("mean 0 gives 1/2", half, ""),
        check("delta(m) + delta(-m) = 1", complement, ""),
        within("50 models", start.elapsed(), Duration::from_secs(600)),
    ]
}

fn class_of_name(family: Family, n: u32, name: &str) -> ClassLabel {
    parse_class(
        &Group::new(GroupKind::new(family, n).unwrap()).unwrap(),
        name,
    )
    .unwrap()
}

/// The printed exactly-1/2 row for `(C_-1, C_x^odd)` with `W = -1`.
fn is_known_half_row(r: &RaceOutcome) -> bool {
    if r.family != Family::Quaternion || r.w != -1 {
        return false;
    }
    let (a, b) = (
        class_of_name(r.family, r.n, &r.c1),
        class_of_name(r.family, r.n, &r.c2),
    );
    matches!((a, b), (ClassLabel::MinusOne, ClassLabel::Power(k)) | (ClassLabel::Power(k), ClassLabel::MinusOne) if k % 2 == 1)
}

struct TowerTally {
    sides: usize,
    side_fail: Vec<String>,
    halves: usize,
    half_fail: Vec<String>,
    known_halves: usize,
    known_fail: usize,
    extreme_one: usize,
    extreme_one_fail: Vec<String>,
    extreme_count: usize,
}

fn tally(family: Family, ns: &[u32], ws: &[i8]) -> TowerTally {
    let mut t = TowerTally {
        sides: 0,
        side_fail: Vec::new(),
        halves: 0,
        half_fail: Vec::new(),
        known_halves: 0,
        known_fail: 0,
        extreme_one: 0,
        extreme_one_fail: Vec::new(),
        extreme_count: 0,
    };
    for &n in ns {
        for &w in ws {
            let mut cfg = ExperimentConfig::new(if family == Family::Dihedral {
                ExperimentId::TabD
            } else {
                ExperimentId::TabQ
            });
            cfg.n = Some(n);
            cfg.w = w;
            let report = tower_experiment(&cfg).unwrap();
            for r in &report.races {
                let Some(side) = r.expected.and_then(|b| b.side()) else {
                    continue;
                };
                let m = r.mean_formula.unwrap();
                let tag = format!("n={n} W={} {}/{}", r.w, r.c1, r.c2);
                if r.observed.is_some_and(|b| b.is_extreme()) {
                    t.extreme_count += 1;
                }
                if side == 0 {
                    let exact = m == 0
                        && r.delta_mc.as_ref().is_some_and(|d| d.value == 0.5)
                        && r.delta_fourier.as_ref().is_some_and(|d| d.value == 0.5);
                    if is_known_half_row(r) {
                        t.known_halves += 1;
                        t.known_fail += !exact as usize;
                    } else {
                        t.halves += 1;
                        if !exact {
                            t.half_fail.push(tag);
                        }
                    }
                    continue;
                }
                t.sides += 1;
                let ok = m.signum() as i8 == side && r.delta_consistent != Some(false);
                if !ok {
                    t.side_fail.push(tag.clone());
                }
                if class_of_name(family, n, &r.c1) == ClassLabel::One
                    || class_of_name(family, n, &r.c2) == ClassLabel::One
                {
                    t.extreme_one += 1;
                    if !ok {
                        t.extreme_one_fail.push(tag);
                    }
                }
            }
        }
    }
    t
}

fn first(v: &[String]) -> String {
    v.first().cloned().unwrap_or_default()
}

fn criterion_7() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();
    for w in [-1i8, 1] {
        let mut cfg = ExperimentConfig::new(ExperimentId::Horizontal);
        cfg.w = w;
        let h = horizontal_experiment(&cfg).unwrap();
        let deltas: Vec<String> = h
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{:.4}",
                    r.delta_mc
                        .as_ref()
                        .or(r.delta_fourier.as_ref())
                        .map(|d| d.value)
                        .unwrap_or(f64::NAN)
                )
            })
            .collect();
        out.push(check(
            format!("(a) W = {w:+}: side of 1/2"),
            h.sides_ok,
            deltas.join(", "),
        ));
        out.push(check(
            format!("(a) W = {w:+}: |delta - 1/2| decreasing in f"),
            h.decreasing,
            "",
        ));
    }
    let q = tally(Family::Quaternion, &[4, 5, 6], &[1, -1]);
    out.push(check(
        "(b) W-controlled sides",
        q.side_fail.is_empty(),
        format!("{} rows {}", q.sides, first(&q.side_fail)),
    ));
    out.push(check(
        "(b) exactly-1/2 rows",
        q.half_fail.is_empty(),
        format!("{} rows {}", q.halves, first(&q.half_fail)),
    ));
    out.push(known(
        "(b) (C_-1, C_x^odd), W = -1 at 1/2",
        q.known_fail == 0,
        format!("{}/{} rows off 1/2, mean -2", q.known_fail, q.known_halves),
        "the listed row inherits the sign slip of the (C_-1, C_x^k) mean",
    ));
    let d = tally(Family::Dihedral, &[4, 5, 6], &[1]);
    out.push(check(
        "(c) exactly-1/2 rows",
        d.half_fail.is_empty(),
        format!("{} rows {}", d.halves, first(&d.half_fail)),
    ));
    out.push(check(
        "(c) sign of the (C_1, .) rows",
        d.extreme_one_fail.is_empty(),
        format!(
            "{} rows, {} of all rows with |B| >= 1",
            d.extreme_one, d.extreme_count
        ),
    ));
    out.push(check(
        "(c) remaining sides",
        d.side_fail.is_empty(),
        format!("{} rows {}", d.sides, first(&d.side_fail)),
    ));
    for (family, w, label) in [
        (Family::Dihedral, 1i8, "dihedral"),
        (Family::Quaternion, 1, "quaternion W = +1"),
        (Family::Quaternion, -1, "quaternion W = -1"),
    ] {
        let mut cfg = ExperimentConfig::new(ExperimentId::Monotonicity);
        cfg.family = Some(family);
        cfg.n = Some(12);
        cfg.w = w;
        cfg.epsilon = 0.1;
        cfg.methods.fourier = false;
        let m = monotonicity_experiment(&cfg).unwrap();
        let held = m
            .pairs
            .iter()
            .filter(|p| p.2 == chebias::experiments::PairVerdict::Holds)
            .count();
        let detail = format!(
            "{held}/{} pairs separated, verdict {:?}",
            m.pairs.len(),
            m.verdict
        );
        let ok = m.verdict == Verdict::Holds;
        if family == Family::Quaternion && w == -1 {
            out.push(known(
                format!("(d) {label}, n = 12"),
                ok,
                detail,
                "at n = 12 every level sits at delta = 0 within Monte Carlo resolution, so no pair separates",
            ));
        } else {
            out.push(check(format!("(d) {label}, n = 12"), ok, detail));
        }
    }
    out.push(within(
        "qualitative runs",
        start.elapsed(),
        Duration::from_secs(1800),
    ));
    out
}

fn criterion_8() -> Vec<Check> {
    let start = Instant::now();
    let k = BoundConstants::default();
    let rows = sandwich_races(SANDWICH_SEED, 100, 3, 100_000, &k).unwrap();
    let inside = rows.iter().filter(|r| r.inside()).count();
    let above = rows.iter().filter(|r| r.tail > r.upper).count();
    let below = rows.iter().filter(|r| r.tail < r.lower).count();
    let biased = rows.iter().all(|r| r.bias > 1.0);
    vec![
        check(
            "100 races with B > 1",
            rows.len() == 100 && biased,
            format!("{} races", rows.len()),
        ),
        check(
            "lower <= 1 - delta <= upper in >= 95%",
            inside * 100 >= 95 * rows.len(),
            format!(
                "{inside} inside, {below} below, {above} above; c1 = {}, c2 = {}, c3 = {}",
                k.c1, k.c2, k.c3
            ),
        ),
        within("sandwich", start.elapsed(), Duration::from_secs(900)),
    ]
}

/// Optional: zeros of `L(s, χ_{-4})` from `CHEBIAS_MOD4_ZEROS`.
fn criterion_9() -> Option<Vec<Check>> {
    let path = std::env::var_os("CHEBIAS_MOD4_ZEROS")?;
    let zs = match ZeroSet::<f64>::load(std::path::Path::new(&path)) {
        Ok(z) => z,
        Err(e) => return Some(vec![check("read zero file", false, e.to_string())]),
    };
    let terms: Vec<f64> = zs
        .ordinates()
        .iter()
        .map(|g| 2.0 / (0.25 + g * g).sqrt())
        .collect();
    let model = RaceModel::from_terms(1, terms);
    let f = density_fourier(&model, &FourierConfig::default()).unwrap();
    let diff = f.value - MOD4_DELTA;
    Some(vec![check(
        "delta(4; 3, 1) against the published value",
        diff.abs() < 1e-3,
        format!(
            "{} zeros up to {:.0}: delta = {:.5}, published {MOD4_DELTA}, difference {diff:+.5}",
            zs.len(),
            zs.t_max(),
            f.value
        ),
    )])
}

fn report(id: &str, title: &str, checks: &[Check], gating: bool) -> bool {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
    let unexpected = failed.iter().any(|c| c.known.is_none());
    let status = if failed.is_empty() { "PASS" } else { "FAIL" };
    let note = if !failed.is_empty() && !unexpected {
        "  (known disagreements only)"
    } else {
        ""
    };
    let gate = if gating { "" } else { "  (optional)" };
    println!("{status} [{id}] {title}{note}{gate}");
    for c in checks {
        let mark = match (c.ok, c.known) {
            (true, None) => "ok   ",
            (true, Some(_)) => "ok*  ",
            (false, Some(_)) => "known",
            (false, None) => "FAIL ",
        };
        let detail = if c.detail.is_empty() {
            String::new()
        } else {
            format!(": {}", c.detail)
        };
        println!("      {mark} {}{detail}", c.name);
        if let (false, Some(reason)) = (c.ok, c.known) {
            println!("            {reason}");
        }
    }
    !(gating && unexpected)
}

fn main() -> ExitCode {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let wanted = |id: &str| filter.as_deref().is_none_or(|f| f == id);
    let criteria: [(&str, &str, fn() -> Vec<Check>); 8] = [
        ("1", "character tables exact for n = 3..8", criterion_1),
        ("2", "induction against Frobenius reciprocity", criterion_2),
        ("3", "symplectic value sums", criterion_3),
        ("4", "conductor-discriminant identity", criterion_4),
        ("5", "mean tables", criterion_5),
        ("6", "density engine cross-validation", criterion_6),
        ("7", "qualitative behaviour on synthetic zeros", criterion_7),
        ("8", "bound sandwich with pinned constants", criterion_8),
    ];
    let mut ok = true;
    for (id, title, f) in criteria {
        if wanted(id) {
            ok &= report(id, title, &f(), true);
        }
    }
    if wanted("9") {
        match criterion_9() {
            Some(checks) => {
                report("9", "mod 4 race from external zeros", &checks, false);
            }
            None => println!("SKIP [9] mod 4 race from external zeros  (optional; set CHEBIAS_MOD4_ZEROS to a zero file)"),
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
