//! Published closed forms and expected qualitative outcomes, stored as data so
//! that reports and tests read the same declarations. Values here are the
//! printed ones; where they disagree with direct computation the disagreement
//! is reported by the callers, never patched here.

use serde::Serialize;

use crate::characters::CharacterId;
use crate::group::{ClassLabel, Family, GroupKind};

fn sign(k: u32) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn pow2(e: u32) -> i64 {
    1i64 << e
}

fn is_flip(c: ClassLabel) -> bool {
    matches!(c, ClassLabel::FlipEven | ClassLabel::FlipOdd)
}

/// Printed mean of `X(C1, C2)` at level `i`, oriented as given; tries the
/// reversed pair (negated) when only that orientation is tabulated.
pub fn mean_reference(
    kind: GroupKind,
    i: u32,
    w: i8,
    _symplectic_order: u32,
    c1: ClassLabel,
    c2: ClassLabel,
) -> Option<i64> {
    let f = |a, b| match kind.family {
        Family::Quaternion => quaternion_row(kind.n, i, w, a, b),
        Family::Dihedral => dihedral_row(i, a, b),
    };
    f(c1, c2).or_else(|| f(c2, c1).map(|v| -v))
}

/// Quaternion table at level `i` of `H_{2^n}`, `(1-W)` kept symbolic in `W`.
pub fn quaternion_row(n: u32, i: u32, w: i8, c1: ClassLabel, c2: ClassLabel) -> Option<i64> {
    use ClassLabel::*;
    let one_minus_w = 1 - w as i64;
    Some(match (c1, c2) {
        (One, MinusOne) => -pow2(n - 1) * one_minus_w + pow2(i - 1),
        (One, Power(k)) => -pow2(n - 2) * one_minus_w + sign(k) - 1,
        (One, b) if is_flip(b) => -pow2(n - 2) * one_minus_w - 2,
        (MinusOne, Power(k)) => pow2(n - 2) * one_minus_w - 1 - sign(k) - pow2(i - 1),
        (MinusOne, b) if is_flip(b) => pow2(n - 2) * one_minus_w - 2 - pow2(i - 1),
        (Power(k), Power(l)) if k != l => sign(l) - sign(k),
        (Power(k), b) if is_flip(b) => -sign(k) - 1,
        (FlipEven, FlipOdd) => 0,
        _ => return None,
    })
}

/// Dihedral table at level `i`.
pub fn dihedral_row(i: u32, c1: ClassLabel, c2: ClassLabel) -> Option<i64> {
    use ClassLabel::*;
    Some(match (c1, c2) {
        (One, MinusOne) => -pow2(i - 1) + 1,
        (One, Power(k)) => -pow2(i - 1) + sign(k),
        (One, b) if is_flip(b) => -pow2(i - 1) - 1,
        (MinusOne, Power(k)) => sign(k) - 1,
        (MinusOne, b) if is_flip(b) => -2,
        (Power(k), Power(l)) if k != l => sign(l) - sign(k),
        (Power(k), b) if is_flip(b) => -sign(k) - 1,
        (FlipEven, FlipOdd) => 0,
        _ => return None,
    })
}

/// `H_8` mean table in terms of the central order `o` of `ψ`.
/// Classes: `Power(1)` is `i`, `FlipEven` is `j`, `FlipOdd` is `k`.
pub fn h8_mean_reference(o: u32, c1: ClassLabel, c2: ClassLabel) -> Option<i64> {
    use ClassLabel::*;
    let o = o as i64;
    let row = |a, b| match (a, b) {
        (One, MinusOne) => Some(4 * (1 - 2 * o)),
        (One, b) if h8_unit(b) => Some(-2 * (1 + 2 * o)),
        (MinusOne, b) if h8_unit(b) => Some(2 * (2 * o - 3)),
        (a, b) if h8_unit(a) && h8_unit(b) && a != b => Some(0),
        _ => None,
    };
    row(c1, c2).or_else(|| row(c2, c1).map(|v| -v))
}

fn h8_unit(c: ClassLabel) -> bool {
    matches!(
        c,
        ClassLabel::Power(1) | ClassLabel::FlipEven | ClassLabel::FlipOdd
    )
}

/// The nontrivial linear character of `H_8` trivial on the class `c` of `i, j, k`.
pub fn h8_kernel_character(c: ClassLabel) -> Option<CharacterId> {
    match c {
        ClassLabel::Power(1) => Some(CharacterId::Chi(1)),
        ClassLabel::FlipEven => Some(CharacterId::Chi(2)),
        ClassLabel::FlipOdd => Some(CharacterId::Chi(3)),
        _ => None,
    }
}

/// Printed `H_8` variances as coefficients of `B0(λ)` summed over all zeros
/// `γ ≠ 0`. The printed `Σ_{χ ≠ χ_b}` is read with `χ0` excluded.
pub fn h8_variance_reference(c1: ClassLabel, c2: ClassLabel) -> Option<Vec<(CharacterId, i64)>> {
    use ClassLabel::*;
    let all_linear = [
        CharacterId::Chi(1),
        CharacterId::Chi(2),
        CharacterId::Chi(3),
        CharacterId::Psi(1),
    ];
    let (a, b) = if matches!(c2, One | MinusOne) {
        (c2, c1)
    } else {
        (c1, c2)
    };
    let mut out: Vec<(CharacterId, i64)> = match (a, b) {
        (One, MinusOne) | (MinusOne, One) => vec![(CharacterId::Psi(1), 16)],
        (One | MinusOne, b) if h8_unit(b) => {
            let skip = h8_kernel_character(b)?;
            all_linear
                .iter()
                .filter(|&&c| c != skip)
                .map(|&c| (c, 4))
                .collect()
        }
        (a, b) if h8_unit(a) && h8_unit(b) && a != b => {
            vec![(h8_kernel_character(a)?, 4), (h8_kernel_character(b)?, 4)]
        }
        _ => return None,
    };
    out.sort();
    Some(out)
}

/// Printed induction images from level `i < n` (the three displayed formulas).
pub fn printed_induction(n: u32, i: u32, source: CharacterId) -> Option<Vec<(CharacterId, u32)>> {
    if i >= n || i < 3 {
        return None;
    }
    let psi_count = (1u32 << (n - 2)) - 1;
    let modulus = 1u32 << (i - 1);
    let psis = |residue: u32| {
        (1..=psi_count)
            .filter(move |j| j % modulus == residue)
            .map(|j| (CharacterId::Psi(j), 1))
    };
    let mut out: Vec<(CharacterId, u32)> = match source {
        CharacterId::Chi(0) | CharacterId::Chi(1) => (0..4)
            .map(|a| (CharacterId::Chi(a), 1))
            .chain(psis(0))
            .collect(),
        CharacterId::Chi(2) | CharacterId::Chi(3) => psis(1 << (i - 2)).collect(),
        CharacterId::Psi(k) => (1..=psi_count)
            .filter(|j| (j + k) % modulus == 0 || (j + modulus - k % modulus) % modulus == 0)
            .map(|j| (CharacterId::Psi(j), 1))
            .collect(),
        _ => return None,
    };
    out.sort();
    Some(out)
}

/// Printed S/R data for a proper level: `R = {χ2, χ3}`, `b1 = b2 = 2`.
pub fn printed_sr_partition(n: u32, i: u32) -> Option<(Vec<CharacterId>, u32, u32)> {
    (i < n).then(|| (vec![CharacterId::Chi(2), CharacterId::Chi(3)], 2, 2))
}

/// Qualitative behaviour of `δ = P(X(C_a, C_b) > 0)` for the base race.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Behaviour {
    ExtremeTowardZero,
    ExtremeTowardOne,
    ModerateBelowHalf,
    ModerateAboveHalf,
    ExactlyHalf,
    /// `δ` extremely close to `(1 - W)/2`
    RootNumberSide,
    Undetermined,
}

impl Behaviour {
    /// The same statement for the swapped race, `δ ↦ 1 - δ`.
    pub fn mirrored(self) -> Self {
        use Behaviour::*;
        match self {
            ExtremeTowardZero => ExtremeTowardOne,
            ExtremeTowardOne => ExtremeTowardZero,
            ModerateBelowHalf => ModerateAboveHalf,
            ModerateAboveHalf => ModerateBelowHalf,
            other => other,
        }
    }

    /// Resolves the root-number side for a given `W`.
    pub fn resolve(self, w: i8) -> Self {
        match self {
            Behaviour::RootNumberSide if w == 1 => Behaviour::ExtremeTowardZero,
            Behaviour::RootNumberSide => Behaviour::ExtremeTowardOne,
            other => other,
        }
    }

    /// `-1` below one half, `0` exactly one half, `1` above, `None` if unknown.
    pub fn side(self) -> Option<i8> {
        use Behaviour::*;
        match self {
            ExtremeTowardZero | ModerateBelowHalf => Some(-1),
            ExtremeTowardOne | ModerateAboveHalf => Some(1),
            ExactlyHalf => Some(0),
            RootNumberSide | Undetermined => None,
        }
    }

    pub fn is_extreme(self) -> bool {
        matches!(
            self,
            Behaviour::ExtremeTowardZero | Behaviour::ExtremeTowardOne
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: u32) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Class pattern in a behaviour table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    One,
    MinusOne,
    Power(Option<Parity>),
    Flip,
}

impl Pattern {
    pub fn matches(self, c: ClassLabel) -> bool {
        match (self, c) {
            (Pattern::One, ClassLabel::One) | (Pattern::MinusOne, ClassLabel::MinusOne) => true,
            (Pattern::Power(p), ClassLabel::Power(k)) => p.map_or(true, |p| p == Parity::of(k)),
            (Pattern::Flip, c) => is_flip(c),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BehaviourRow {
    pub a: Pattern,
    pub b: Pattern,
    pub w: Option<i8>,
    /// for two powers: whether their exponents must share parity
    pub same_parity: Option<bool>,
    pub behaviour: Behaviour,
}

const fn row(
    a: Pattern,
    b: Pattern,
    w: Option<i8>,
    same_parity: Option<bool>,
    behaviour: Behaviour,
) -> BehaviourRow {
    BehaviourRow {
        a,
        b,
        w,
        same_parity,
        behaviour,
    }
}

use Behaviour as B;
use Pattern as P;

const EVEN: Option<Parity> = Some(Parity::Even);
const ODD: Option<Parity> = Some(Parity::Odd);

/// Dihedral tower, base `Q`.
pub const DIHEDRAL_TOWER: &[BehaviourRow] = &[
    row(P::One, P::MinusOne, None, None, B::ExtremeTowardZero),
    row(P::One, P::Flip, None, None, B::ExtremeTowardZero),
    row(P::One, P::Power(None), None, None, B::ExtremeTowardZero),
    row(P::MinusOne, P::Power(EVEN), None, None, B::ExactlyHalf),
    row(P::MinusOne, P::Flip, None, None, B::ModerateBelowHalf),
    row(
        P::Power(None),
        P::Power(None),
        None,
        Some(true),
        B::ExactlyHalf,
    ),
    row(P::Power(ODD), P::Flip, None, None, B::ExactlyHalf),
    row(P::Flip, P::Flip, None, None, B::ExactlyHalf),
    row(P::Power(ODD), P::MinusOne, None, None, B::Undetermined),
    row(
        P::Power(None),
        P::Power(None),
        None,
        Some(false),
        B::Undetermined,
    ),
    row(P::Power(EVEN), P::Flip, None, None, B::Undetermined),
];

/// Quaternion tower, base `Q`.
pub const QUATERNION_TOWER: &[BehaviourRow] = &[
    row(P::MinusOne, P::One, None, None, B::RootNumberSide),
    row(P::MinusOne, P::Flip, Some(1), None, B::ExtremeTowardZero),
    row(P::MinusOne, P::Flip, Some(-1), None, B::ModerateBelowHalf),
    row(
        P::MinusOne,
        P::Power(None),
        Some(1),
        None,
        B::ExtremeTowardZero,
    ),
    row(P::MinusOne, P::Power(ODD), Some(-1), None, B::ExactlyHalf),
    row(P::One, P::Power(EVEN), Some(1), None, B::ExactlyHalf),
    row(P::One, P::Power(None), Some(-1), None, B::ExtremeTowardZero),
    row(P::One, P::Flip, Some(1), None, B::ModerateBelowHalf),
    row(P::One, P::Flip, Some(-1), None, B::ExtremeTowardZero),
    row(
        P::Power(None),
        P::Power(None),
        None,
        Some(true),
        B::ExactlyHalf,
    ),
    row(P::Power(ODD), P::Flip, None, None, B::ExactlyHalf),
    row(P::Flip, P::Flip, None, None, B::ExactlyHalf),
    row(P::Power(ODD), P::One, Some(1), None, B::Undetermined),
    row(P::Power(EVEN), P::MinusOne, Some(-1), None, B::Undetermined),
    row(
        P::Power(None),
        P::Power(None),
        None,
        Some(false),
        B::Undetermined,
    ),
    row(P::Power(EVEN), P::Flip, None, None, B::Undetermined),
];

pub fn tower_rows(family: Family) -> &'static [BehaviourRow] {
    match family {
        Family::Dihedral => DIHEDRAL_TOWER,
        Family::Quaternion => QUATERNION_TOWER,
    }
}

fn row_matches(r: &BehaviourRow, w: i8, c1: ClassLabel, c2: ClassLabel) -> bool {
    if !(r.a.matches(c1) && r.b.matches(c2)) || r.w.is_some_and(|rw| rw != w) {
        return false;
    }
    match (r.same_parity, c1, c2) {
        (Some(same), ClassLabel::Power(k), ClassLabel::Power(l)) => (k % 2 == l % 2) == same,
        (Some(_), _, _) => false,
        (None, _, _) => true,
    }
}

/// Expected behaviour of the base race `(c1, c2)` and the index of the table
/// row it came from. `W` is ignored for the dihedral family.
pub fn expected_behaviour(
    family: Family,
    w: i8,
    c1: ClassLabel,
    c2: ClassLabel,
) -> Option<(Behaviour, usize)> {
    let rows = tower_rows(family);
    if let Some(idx) = rows.iter().position(|r| row_matches(r, w, c1, c2)) {
        return Some((rows[idx].behaviour.resolve(w), idx));
    }
    rows.iter()
        .position(|r| row_matches(r, w, c2, c1))
        .map(|idx| (rows[idx].behaviour.resolve(w).mirrored(), idx))
}

/// Direction of the level-by-level claim for `(C1^{(i)}, C-1^{(i)})` races.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelOrdering {
    /// `δ(j) < δ(i)` for qualifying `i < j`
    Decreasing,
    /// `δ(j) > δ(i)`, stated as `1 - δ(j) < 1 - δ(i)`
    Increasing,
}

/// The published ordering for a family and root number.
pub fn monotonicity_claim(family: Family, w: i8) -> LevelOrdering {
    match (family, w) {
        (Family::Quaternion, 1) => LevelOrdering::Increasing,
        _ => LevelOrdering::Decreasing,
    }
}

/// Level pairs `(i, j)` with `3 <= i < j <= n`, `i <= n(1+ε)/2` and
/// `j >= n(1+3ε)/2`.
pub fn qualifying_pairs(n: u32, eps: f64) -> Vec<(u32, u32)> {
    let nf = n as f64;
    let mut out = Vec::new();
    for i in 3..=n {
        for j in i + 1..=n {
            if i as f64 <= nf * (1.0 + eps) / 2.0 && j as f64 >= nf * (1.0 + 3.0 * eps) / 2.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Published sign of `δ(C1, C-1) - 1/2` in the fixed-group family: below
/// one half with a central zero (`W = -1`), above without.
pub fn horizontal_side(w: i8) -> i8 {
    if w < 0 {
        -1
    } else {
        1
    }
}
