//! Irreducible characters of the dihedral and generalized quaternion 2-groups,
//! with exact values in `Z[ζ]`, `ζ = exp(2πi/2^{n-1})`.
//!
//! Abelian characters: `χ0` trivial, `χ1` with kernel `<a>`, `χ2` with
//! `a ↦ -1, b ↦ 1`, `χ3` with `a ↦ -1, ab ↦ 1`. Two-dimensional characters
//! `ψ_j`, `1 <= j <= 2^{n-2} - 1`, come from `a ↦ diag(ζ^j, ζ^{-j})`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::group::{ClassLabel, Element, Family, Group, GroupError, SubgroupLevel};

pub type Cyclo = Cyclotomic<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("character {0} does not exist in a group of order 2^{1}")]
    NoSuchCharacter(CharacterId, u32),
    #[error("inner product is not rational: {0}")]
    NotRational(String),
    #[error("class function lives on {0} classes, group has {1}")]
    Shape(usize, usize),
    #[error("induced value is not an algebraic integer multiple at class {0}")]
    NotIntegral(ClassLabel),
    #[error("cannot parse character id from {0:?}")]
    Parse(String),
    #[error("invalid symplectic sum arguments i={i}, k={k}")]
    BadSumArgs { i: u32, k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CharacterId {
    /// abelian character `χ0..χ3`
    Chi(u8),
    /// two-dimensional character `ψ_j`
    Psi(u32),
}

impl fmt::Display for CharacterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterId::Chi(a) => write!(f, "chi{a}"),
            CharacterId::Psi(j) => write!(f, "psi_{j}"),
        }
    }
}

impl FromStr for CharacterId {
    type Err = CharError;
    fn from_str(s: &str) -> Result<Self, CharError> {
        let t = s.trim();
        let err = || CharError::Parse(s.to_string());
        if let Some(rest) = t.strip_prefix("chi") {
            let a: u8 = rest.trim_start_matches('_').parse().map_err(|_| err())?;
            return if a < 4 {
                Ok(CharacterId::Chi(a))
            } else {
                Err(err())
            };
        }
        if let Some(rest) = t.strip_prefix("psi") {
            let j: u32 = rest.trim_start_matches('_').parse().map_err(|_| err())?;
            return if j >= 1 {
                Ok(CharacterId::Psi(j))
            } else {
                Err(err())
            };
        }
        Err(err())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FsType {
    Orthogonal,
    Symplectic,
    Unitary,
}

impl FsType {
    pub fn from_indicator(e: i64) -> Self {
        match e {
            1 => FsType::Orthogonal,
            -1 => FsType::Symplectic,
            _ => FsType::Unitary,
        }
    }

    pub fn indicator(self) -> i64 {
        match self {
            FsType::Orthogonal => 1,
            FsType::Symplectic => -1,
            FsType::Unitary => 0,
        }
    }
}

/// A class function stored by class index (canonical order of
/// [`Group::classes`]) with values in `Z[ζ_m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    pub values: Vec<Cyclo>,
}

impl ClassFunction {
    pub fn modulus(&self) -> u32 {
        self.values.first().map(|v| v.modulus()).unwrap_or(2)
    }

    pub fn lift(&self, m: u32) -> ClassFunction {
        ClassFunction {
            values: self.values.iter().map(|v| v.lift(m)).collect(),
        }
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        let m = self.modulus().max(other.modulus());
        let (a, b) = (self.lift(m), other.lift(m));
        ClassFunction {
            values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub id: CharacterId,
    pub degree: u32,
    pub values: ClassFunction,
    pub fs: FsType,
    pub faithful: bool,
}

/// Exact value of an irreducible character on a class.
pub fn character_value(group: &Group, id: CharacterId, c: ClassLabel) -> Cyclo {
    let m = group.rotation_order();
    let int = |v: i64| Cyclo::integer(m, v);
    let sign = |k: u32| if k % 2 == 0 { 1 } else { -1 };
    match id {
        CharacterId::Chi(0) => int(1),
        CharacterId::Chi(1) => match c {
            ClassLabel::FlipEven | ClassLabel::FlipOdd => int(-1),
            _ => int(1),
        },
        CharacterId::Chi(a) => match c {
            ClassLabel::One => int(1),
            ClassLabel::MinusOne => int(sign(group.half())),
            ClassLabel::Power(k) => int(sign(k)),
            ClassLabel::FlipEven => int(if a == 2 { 1 } else { -1 }),
            ClassLabel::FlipOdd => int(if a == 2 { -1 } else { 1 }),
        },
        CharacterId::Psi(j) => match c {
            ClassLabel::One => int(2),
            ClassLabel::MinusOne => Cyclo::two_cos(m, j as i64 * group.half() as i64),
            ClassLabel::Power(k) => Cyclo::two_cos(m, j as i64 * k as i64),
            ClassLabel::FlipEven | ClassLabel::FlipOdd => int(0),
        },
    }
}

/// All irreducible character ids in canonical order `χ0..χ3, ψ_1, ...`.
pub fn character_ids(group: &Group) -> Vec<CharacterId> {
    (0..4u8)
        .map(CharacterId::Chi)
        .chain((1..group.half()).map(CharacterId::Psi))
        .collect()
}

pub fn is_character(group: &Group, id: CharacterId) -> bool {
    match id {
        CharacterId::Chi(a) => a < 4,
        CharacterId::Psi(j) => j >= 1 && j < group.half(),
    }
}

/// Evaluates `f` on every class of `group`.
pub fn class_function(group: &Group, f: impl Fn(ClassLabel) -> Cyclo) -> ClassFunction {
    ClassFunction {
        values: group.classes().into_iter().map(f).collect(),
    }
}

/// `(1/|G|) Σ_C |C| f(C) conj(g(C))`, exactly.
pub fn inner_product(
    group: &Group,
    f: &ClassFunction,
    g: &ClassFunction,
) -> Result<Ratio<i64>, CharError> {
    let k = group.class_count();
    if f.values.len() != k {
        return Err(CharError::Shape(f.values.len(), k));
    }
    if g.values.len() != k {
        return Err(CharError::Shape(g.values.len(), k));
    }
    let m = f.modulus().max(g.modulus());
    let (f, g) = (f.lift(m), g.lift(m));
    let mut acc = Cyclo::zero(m);
    for (c, (x, y)) in group
        .classes()
        .into_iter()
        .zip(f.values.iter().zip(&g.values))
    {
        acc.add_product(x, &y.conj(), &(group.class_size(c) as i64));
    }
    let total = acc
        .as_integer()
        .ok_or_else(|| CharError::NotRational(acc.to_string()))?;
    Ok(Ratio::new(total, group.order() as i64))
}

/// Frobenius-Schur indicator `(1/|G|) Σ_g χ(g²)`, summed class by class
/// (squares of conjugate elements are conjugate).
pub fn frobenius_schur(group: &Group, values: &ClassFunction) -> Result<i64, CharError> {
    let m = values.modulus();
    let mut acc = Cyclo::zero(m);
    for c in group.classes() {
        let g = group.representative(c);
        let sq = group.class_of(group.multiply(g, g));
        let idx = group.class_index(sq).expect("square lies in a class");
        acc.add_product(
            &Cyclo::integer(m, group.class_size(c) as i64),
            &values.values[idx],
            &1,
        );
    }
    let total = acc
        .as_integer()
        .ok_or_else(|| CharError::NotRational(acc.to_string()))?;
    let r = Ratio::new(total, group.order() as i64);
    if !r.is_integer() {
        return Err(CharError::NotRational(r.to_string()));
    }
    Ok(r.to_integer())
}

/// True iff `χ(g) = χ(1)` only at the identity.
pub fn is_faithful(group: &Group, values: &ClassFunction) -> bool {
    let deg = &values.values[0];
    group
        .classes()
        .into_iter()
        .enumerate()
        .skip(1)
        .all(|(idx, _)| &values.values[idx] != deg)
}

/// The character table of `group`.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: Group,
    characters: Vec<Character>,
}

impl CharacterTable {
    pub fn new(group: &Group) -> Self {
        let characters = character_ids(group)
            .into_iter()
            .map(|id| {
                let values = class_function(group, |c| character_value(group, id, c));
                let degree = values.values[0].as_integer().expect("degree is an integer") as u32;
                let fs = FsType::from_indicator(
                    frobenius_schur(group, &values)
                        .expect("irreducible characters have integral indicators"),
                );
                let faithful = is_faithful(group, &values);
                Character {
                    id,
                    degree,
                    values,
                    fs,
                    faithful,
                }
            })
            .collect();
        CharacterTable {
            group: *group,
            characters,
        }
    }

    /// Process-wide cached table for `group`.
    pub fn shared(group: &Group) -> Arc<CharacterTable> {
        static CACHE: OnceLock<Mutex<HashMap<Group, Arc<CharacterTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().expect("table cache").get(group) {
            return Arc::clone(t);
        }
        // built outside the lock; a concurrent duplicate build is harmless
        let table = Arc::new(CharacterTable::new(group));
        Arc::clone(
            cache
                .lock()
                .expect("table cache")
                .entry(*group)
                .or_insert(table),
        )
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn index_of(&self, id: CharacterId) -> Option<usize> {
        if !is_character(&self.group, id) {
            return None;
        }
        Some(match id {
            CharacterId::Chi(a) => a as usize,
            CharacterId::Psi(j) => 3 + j as usize,
        })
    }

    pub fn get(&self, id: CharacterId) -> Result<&Character, CharError> {
        self.index_of(id)
            .map(|i| &self.characters[i])
            .ok_or(CharError::NoSuchCharacter(id, self.group.n()))
    }

    pub fn value(&self, id: CharacterId, c: ClassLabel) -> Result<&Cyclo, CharError> {
        let idx = self
            .group
            .class_index(c)
            .ok_or(GroupError::BadClass(c, self.group.n()))?;
        Ok(&self.get(id)?.values.values[idx])
    }

    /// Multiplicities `⟨f, χ⟩` for every irreducible, as rationals.
    pub fn decompose(
        &self,
        f: &ClassFunction,
    ) -> Result<Vec<(CharacterId, Ratio<i64>)>, CharError> {
        self.characters
            .iter()
            .map(|ch| Ok((ch.id, inner_product(&self.group, f, &ch.values)?)))
            .collect()
    }

    /// CSV with classes as columns and characters as rows (float values).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("character,degree,fs,faithful");
        for c in self.group.classes() {
            out.push(',');
            out.push_str(&self.group.class_name(c));
        }
        out.push('\n');
        for ch in &self.characters {
            out.push_str(&format!(
                "{},{},{},{}",
                ch.id,
                ch.degree,
                ch.fs.indicator(),
                ch.faithful
            ));
            for v in &ch.values.values {
                let x = v.to_f64();
                // avoid printing "-0"
                let x = if x.abs() < 1e-12 { 0.0 } else { x };
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// 2×2 matrix over `Z[ζ]`.
pub type Mat2 = [[Cyclo; 2]; 2];

/// Matrix of `g` in the representation affording `ψ_j`:
/// `a ↦ diag(ζ^j, ζ^{-j})`, `b ↦ [[0,1],[1,0]]` (dihedral) or `[[0,(-1)^j],[1,0]]`
/// (quaternion).
pub fn psi_matrix(group: &Group, j: u32, g: Element) -> Mat2 {
    let m = group.rotation_order();
    let e = j as i64 * g.exponent as i64;
    let z = Cyclo::zero(m);
    let d1 = Cyclo::root(m, e);
    let d2 = Cyclo::root(m, -e);
    if !g.flip {
        return [[d1, z.clone()], [z, d2]];
    }
    // diag(ζ^e, ζ^{-e}) · B
    match group.family() {
        Family::Dihedral => [[z.clone(), d1], [d2, z]],
        // b² = a^{m/2} acts as (-1)^j
        Family::Quaternion if j % 2 == 1 => [[z.clone(), -&d1], [d2, z]],
        Family::Quaternion => [[z.clone(), d1], [d2, z]],
    }
}

pub fn mat_sub_identity(a: &Mat2) -> Mat2 {
    let m = a[0][0].modulus();
    let one = Cyclo::one(m);
    [
        [&a[0][0] - &one, a[0][1].clone()],
        [a[1][0].clone(), &a[1][1] - &one],
    ]
}

/// Rank over `Q(ζ)` of a 2×2 matrix.
pub fn mat_rank(a: &Mat2) -> u32 {
    if a.iter().flatten().all(|x| x.is_zero()) {
        return 0;
    }
    let det = &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]);
    if det.is_zero() {
        1
    } else {
        2
    }
}

/// Restriction of a full-group class function to `G_i`, as a class function
/// of `G_i` (values stay in the full group's ring).
pub fn restrict(level: &SubgroupLevel, f: &ClassFunction) -> ClassFunction {
    let full = level.full();
    let sub = level.group();
    class_function(sub, |c| {
        let g = level.embed(sub.representative(c));
        f.values[full.class_index(full.class_of(g)).expect("class exists")].clone()
    })
}

/// Induced class function from `G_i` to the full group:
/// `Ind f(C) = [G:G_i]/|C| · Σ_{D ⊂ C} |D| f(D)`.
pub fn induced_class_function(
    level: &SubgroupLevel,
    f: &ClassFunction,
) -> Result<ClassFunction, CharError> {
    let full = level.full();
    let sub = level.group();
    let m = full.rotation_order();
    let f = f.lift(m);
    let index = (full.order() / sub.order()) as i64;
    let mut sums: Vec<Cyclo> = vec![Cyclo::zero(m); full.class_count()];
    for (d, v) in sub.classes().into_iter().zip(&f.values) {
        let c = level.fuse(d);
        let idx = full.class_index(c).expect("fused class exists");
        sums[idx].add_product(&Cyclo::integer(m, sub.class_size(d) as i64), v, &index);
    }
    let values = full
        .classes()
        .into_iter()
        .zip(sums)
        .map(|(c, s)| {
            let size = full.class_size(c) as i64;
            if s.terms().any(|(_, x)| x % size != 0) {
                return Err(CharError::NotIntegral(c));
            }
            let mut q = Cyclo::zero(m);
            for (j, x) in s.terms() {
                q.add_root(j as i64, x / size);
            }
            Ok(q)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClassFunction { values })
}

/// Decomposition of an induced character into full-group irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedDecomposition {
    pub level: u32,
    pub n: u32,
    pub source: CharacterId,
    /// full-group characters with positive multiplicity, canonical order
    pub components: Vec<(CharacterId, u32)>,
}

impl InducedDecomposition {
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .map(|(id, mult)| {
                mult * if matches!(id, CharacterId::Psi(_)) {
                    2
                } else {
                    1
                }
            })
            .sum()
    }

    pub fn multiplicity(&self, id: CharacterId) -> u32 {
        self.components
            .iter()
            .find(|(c, _)| *c == id)
            .map(|(_, k)| *k)
            .unwrap_or(0)
    }

    fn from_map(level: u32, n: u32, source: CharacterId, map: BTreeMap<CharacterId, u32>) -> Self {
        InducedDecomposition {
            level,
            n,
            source,
            components: map.into_iter().filter(|(_, k)| *k > 0).collect(),
        }
    }
}

/// Closed-form induction from `G_i` to the full group.
///
/// Below the top level `Ind χ0 = χ0 + χ2 + Σ ψ_j` and `Ind χ1 = χ1 + χ3 + Σ ψ_j`
/// over `j ≡ 0 mod 2^{i-1}`; `Ind χ2 = Ind χ3 = Σ ψ_j` over
/// `j ≡ 2^{i-2} mod 2^{i-1}`; `Ind ψ_k = Σ ψ_l` over `l ≡ ±k mod 2^{i-1}`.
pub fn induce(
    level: &SubgroupLevel,
    source: CharacterId,
) -> Result<InducedDecomposition, CharError> {
    let sub = level.group();
    let full = level.full();
    let (i, n) = (level.i(), full.n());
    if !is_character(sub, source) {
        return Err(CharError::NoSuchCharacter(source, i));
    }
    let mut map = BTreeMap::new();
    if level.is_top() {
        map.insert(source, 1);
        return Ok(InducedDecomposition::from_map(i, n, source, map));
    }
    let period = 1u32 << (i - 1);
    let psis = 1..full.half();
    match source {
        CharacterId::Chi(a) if a <= 1 => {
            map.insert(CharacterId::Chi(a), 1);
            map.insert(CharacterId::Chi(a + 2), 1);
            for j in psis.filter(|j| j % period == 0) {
                map.insert(CharacterId::Psi(j), 1);
            }
        }
        CharacterId::Chi(_) => {
            for j in psis.filter(|j| j % period == period / 2) {
                map.insert(CharacterId::Psi(j), 1);
            }
        }
        CharacterId::Psi(k) => {
            for l in psis.filter(|l| l % period == k || l % period == period - k) {
                map.insert(CharacterId::Psi(l), 1);
            }
        }
    }
    Ok(InducedDecomposition::from_map(i, n, source, map))
}

/// The character partition `S`/`R` attached to a level: `S` holds the
/// characters whose inductions share no component with any other induction,
/// `R` the remaining nontrivial ones; `b1 = max deg over R`, `b2 = |R|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrPartition {
    pub level: u32,
    pub s: Vec<CharacterId>,
    pub r: Vec<CharacterId>,
    pub b1: u32,
    pub b2: u32,
}

pub fn sr_partition(level: &SubgroupLevel) -> Result<SrPartition, CharError> {
    let sub = level.group();
    let ids = character_ids(sub);
    let decomps = ids
        .iter()
        .map(|&id| induce(level, id))
        .collect::<Result<Vec<_>, _>>()?;
    let overlaps = |a: &InducedDecomposition, b: &InducedDecomposition| {
        a.components.iter().any(|(id, _)| b.multiplicity(*id) > 0)
    };
    let mut s = Vec::new();
    let mut r = Vec::new();
    for (idx, id) in ids.iter().enumerate() {
        let isolated = decomps
            .iter()
            .enumerate()
            .all(|(jdx, other)| jdx == idx || !overlaps(&decomps[idx], other));
        if isolated {
            s.push(*id);
        } else if *id != CharacterId::Chi(0) {
            r.push(*id);
        }
    }
    let b1 = r
        .iter()
        .map(|id| {
            if matches!(id, CharacterId::Psi(_)) {
                2
            } else {
                1
            }
        })
        .max()
        .unwrap_or(0);
    let b2 = r.len() as u32;
    Ok(SrPartition {
        level: level.i(),
        s,
        r,
        b1,
        b2,
    })
}

/// `Σ_{j odd, 1 <= j <= 2^{i-2}-1} (ζ_i^{jk} + ζ_i^{-jk})` with
/// `ζ_i = exp(2πi/2^{i-1})`; vanishes identically.
pub fn symplectic_value_sum(i: u32, k: u32) -> Result<Cyclo, CharError> {
    if !(3..=31).contains(&i) || k < 1 || k >= 1u32 << (i - 2) {
        return Err(CharError::BadSumArgs { i, k });
    }
    let m = 1u32 << (i - 1);
    let mut acc = Cyclo::zero(m);
    for j in (1..(m / 2)).step_by(2) {
        acc.add_root(j as i64 * k as i64, 1);
        acc.add_root(-(j as i64 * k as i64), 1);
    }
    Ok(acc)
}
