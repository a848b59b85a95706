//! The limiting random variable of a two-class prime race
//! `X = m + Σ r_n cos(2π U_n)`: exact mean, variance, bias factor and the
//! amplitude list built from zero data.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{top_level_orders, vanishing_orders, ArithError, ArithmeticScenario};
use crate::characters::{character_ids, CharError, CharacterId, CharacterTable, Cyclo};
use crate::group::{ClassLabel, Group, GroupError, GroupKind, SubgroupLevel};
use crate::scalar::Real;
use crate::zeros::{Convention, ZeroSet};

#[derive(Debug, Error)]
pub enum RaceError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("race undefined: {c1} and {c2} fuse to the same class, the counting functions are identical")]
    Undefined { c1: ClassLabel, c2: ClassLabel },
    #[error("a race needs two distinct classes, got {0} twice")]
    SameClass(ClassLabel),
    #[error("variance is zero")]
    ZeroVariance,
    #[error("no zero set for weighted character {0}")]
    MissingZeros(CharacterId),
    #[error("value {0} is not a rational integer")]
    NotInteger(String),
    #[error("expected {expected} B0 values, got {got}")]
    Shape { expected: usize, got: usize },
}

/// `|C^{1/2}| / |C|`, an integer for both families.
pub fn sqrt_ratio(group: &Group, c: ClassLabel) -> i64 {
    let count = group.square_root_count(c);
    let size = group.class_size(c);
    debug_assert_eq!(count % size, 0);
    (count / size) as i64
}

/// `z(C) = 2 Σ_{χ ≠ χ0} χ(C) ord(χ)` with `orders` in canonical character order.
pub fn z_value(group: &Group, c: ClassLabel, orders: &[u32]) -> Result<i64, RaceError> {
    let table = CharacterTable::shared(group);
    let m = group.rotation_order();
    let mut acc = Cyclo::zero(m);
    for (ch, &o) in table.characters().iter().zip(orders).skip(1) {
        if o > 0 {
            acc.add_product(
                table.value(ch.id, c)?,
                &Cyclo::integer(m, 1),
                &(2 * o as i64),
            );
        }
    }
    acc.as_integer()
        .ok_or_else(|| RaceError::NotInteger(acc.to_string()))
}

/// A race between two classes of `G_i`, counted in the extension `K/K_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceSpec {
    pub kind: GroupKind,
    pub level: u32,
    pub c1: ClassLabel,
    pub c2: ClassLabel,
    /// central vanishing order of each top-level symplectic character
    pub symplectic_order: u32,
}

impl RaceSpec {
    pub fn new(
        kind: GroupKind,
        level: u32,
        c1: ClassLabel,
        c2: ClassLabel,
        symplectic_order: u32,
    ) -> Result<Self, RaceError> {
        let spec = RaceSpec {
            kind,
            level,
            c1,
            c2,
            symplectic_order,
        };
        let lvl = spec.subgroup()?;
        lvl.group().check_class(c1)?;
        lvl.group().check_class(c2)?;
        if c1 == c2 {
            return Err(RaceError::SameClass(c1));
        }
        Ok(spec)
    }

    pub fn from_scenario(
        s: &ArithmeticScenario,
        level: u32,
        c1: ClassLabel,
        c2: ClassLabel,
    ) -> Result<Self, RaceError> {
        Self::new(s.kind, level, c1, c2, s.symplectic_order)
    }

    pub fn full(&self) -> Group {
        Group::new(self.kind).expect("validated kind")
    }

    pub fn subgroup(&self) -> Result<SubgroupLevel, RaceError> {
        Ok(self.full().level(self.level)?)
    }

    pub fn swapped(&self) -> Self {
        RaceSpec {
            c1: self.c2,
            c2: self.c1,
            ..self.clone()
        }
    }

    /// `(C1⁺, C2⁺)`, or the undefined-race error when they coincide.
    pub fn fused(&self) -> Result<(ClassLabel, ClassLabel), RaceError> {
        let lvl = self.subgroup()?;
        let (f1, f2) = (lvl.fuse(self.c1), lvl.fuse(self.c2));
        if f1 == f2 {
            return Err(RaceError::Undefined {
                c1: self.c1,
                c2: self.c2,
            });
        }
        Ok((f1, f2))
    }

    pub fn is_defined(&self) -> bool {
        self.fused().is_ok()
    }

    /// Vanishing orders of the characters of `G_i`.
    pub fn level_orders(&self) -> Result<Vec<u32>, RaceError> {
        let lvl = self.subgroup()?;
        Ok(vanishing_orders(
            &lvl,
            &top_level_orders(&self.full(), self.symplectic_order),
        )?)
    }
}

/// `|C2^{1/2}|/|C2| - |C1^{1/2}|/|C1| + z(C2) - z(C1)`, computed in `G_i`.
pub fn mean(spec: &RaceSpec) -> Result<i64, RaceError> {
    spec.fused()?;
    let lvl = spec.subgroup()?;
    let g = lvl.group();
    let orders = spec.level_orders()?;
    Ok(
        sqrt_ratio(g, spec.c2) - sqrt_ratio(g, spec.c1) + z_value(g, spec.c2, &orders)?
            - z_value(g, spec.c1, &orders)?,
    )
}

/// `|λ(C1⁺) - λ(C2⁺)|` for one full-group character, with an exact zero test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    pub id: CharacterId,
    pub degree: u32,
    pub value: f64,
    pub is_zero: bool,
}

pub fn weights(spec: &RaceSpec) -> Result<Vec<Weight>, RaceError> {
    let (f1, f2) = spec.fused()?;
    let table = CharacterTable::shared(&spec.full());
    table
        .characters()
        .iter()
        .map(|ch| {
            let d = table.value(ch.id, f1)? - table.value(ch.id, f2)?;
            Ok(Weight {
                id: ch.id,
                degree: ch.degree,
                value: d.to_f64().abs(),
                is_zero: d.is_zero(),
            })
        })
        .collect()
}

/// `Σ_λ |λ(C1⁺) - λ(C2⁺)|² B0(λ)` coefficients, i.e. the squared weights.
pub fn squared_weights(spec: &RaceSpec) -> Result<Vec<(CharacterId, i64)>, RaceError> {
    weights(spec)?
        .into_iter()
        .map(|w| {
            let sq = (w.value * w.value).round();
            Ok((w.id, sq as i64))
        })
        .collect()
}

fn check_len<T>(spec: &RaceSpec, b0: &[T]) -> Result<(), RaceError> {
    let expected = spec.full().class_count();
    if b0.len() != expected {
        return Err(RaceError::Shape {
            expected,
            got: b0.len(),
        });
    }
    Ok(())
}

/// `2 Σ_λ |λ(C1⁺) - λ(C2⁺)|² B0(λ)` with one-sided `B0`, the variance of `X`.
pub fn variance<T: Real>(spec: &RaceSpec, b0: &[T]) -> Result<T, RaceError> {
    check_len(spec, b0)?;
    let w = weights(spec)?;
    Ok(w.iter()
        .zip(b0)
        .filter(|(w, _)| !w.is_zero)
        .map(|(w, &b)| T::lit(2.0 * w.value * w.value) * b)
        .sum())
}

pub fn bias_factor<T: Real>(spec: &RaceSpec, b0: &[T]) -> Result<T, RaceError> {
    let v = variance(spec, b0)?;
    if !(v > T::zero()) {
        return Err(RaceError::ZeroVariance);
    }
    Ok(T::lit(mean(spec)? as f64) / v.sqrt())
}

/// The random variable `X = mean + Σ r_n cos(2π U_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceModel<T> {
    pub mean: i64,
    /// amplitudes, descending
    pub terms: Vec<T>,
    /// `Σ r² / 2`
    pub variance: T,
    /// `mean / √variance`, zero when the variance vanishes
    pub bias_factor: T,
    pub weights: Vec<(CharacterId, T)>,
    /// main-term estimate of `Σ r²/2` over zeros beyond each set's horizon
    pub tail_variance: T,
}

impl<T: Real> RaceModel<T> {
    /// A model from raw amplitudes (sorted here).
    pub fn from_terms(mean: i64, mut terms: Vec<T>) -> Self {
        terms.retain(|r| *r > T::zero());
        terms.sort_by(|a, b| b.partial_cmp(a).expect("finite amplitudes"));
        let variance: T = terms.iter().map(|&r| r * r).sum::<T>() / T::lit(2.0);
        let bias_factor = if variance > T::zero() {
            T::lit(mean as f64) / variance.sqrt()
        } else {
            T::zero()
        };
        RaceModel {
            mean,
            terms,
            variance,
            bias_factor,
            weights: Vec::new(),
            tail_variance: T::zero(),
        }
    }

    pub fn with_mean(&self, mean: i64) -> Self {
        let mut out = self.clone();
        out.mean = mean;
        out.bias_factor = if self.variance > T::zero() {
            T::lit(mean as f64) / self.variance.sqrt()
        } else {
            T::zero()
        };
        out
    }

    pub fn sum_of_squares(&self) -> T {
        self.terms.iter().map(|&r| r * r).sum()
    }
}

/// Materializes the amplitudes `r = 2 w(λ) / √(1/4 + γ²)` from one zero set
/// per full-group character (canonical order; `None` allowed where the weight
/// vanishes).
pub fn term_list<T: Real>(
    spec: &RaceSpec,
    zero_sets: &[Option<&ZeroSet<T>>],
) -> Result<RaceModel<T>, RaceError> {
    check_len(spec, zero_sets)?;
    let m = mean(spec)?;
    let w = weights(spec)?;
    let mut terms = Vec::new();
    let mut tail = T::zero();
    for (wt, zs) in w.iter().zip(zero_sets) {
        if wt.is_zero {
            continue;
        }
        let zs = zs.ok_or(RaceError::MissingZeros(wt.id))?;
        let two_w = T::lit(2.0 * wt.value);
        terms.extend(
            zs.ordinates()
                .iter()
                .map(|&g| two_w / (T::lit(0.25) + g * g).sqrt()),
        );
        if let (Some(l), Some(d)) = (zs.log_conductor, zs.degree) {
            let model = crate::zeros::ZeroCountModel {
                log_conductor: l,
                degree: d,
            };
            tail = tail + T::lit(2.0 * wt.value * wt.value) * model.b0_tail(zs.t_max());
        }
    }
    let mut model = RaceModel::from_terms(m, terms);
    model.weights = w.iter().map(|x| (x.id, T::lit(x.value))).collect();
    model.tail_variance = tail;
    Ok(model)
}

/// One-sided `B0` of each zero set, zero where absent.
pub fn b0_vector<T: Real>(zero_sets: &[Option<&ZeroSet<T>>]) -> Vec<T> {
    zero_sets
        .iter()
        .map(|z| {
            z.map(|z| z.b0(Convention::OneSided))
                .unwrap_or_else(T::zero)
        })
        .collect()
}

/// Status of one row of a mean table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    /// computed and reference values differ; both are reported
    OpenQuestion,
    /// the two classes fuse; no race exists
    Undefined,
    NoReference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRow {
    pub c1: ClassLabel,
    pub c2: ClassLabel,
    pub c1_name: String,
    pub c2_name: String,
    pub mean_formula: Option<i64>,
    pub mean_reference: Option<i64>,
    pub status: RowStatus,
    /// coefficients of `B0(λ)` (two-sided convention) in the variance
    pub variance_coefficients: Vec<(CharacterId, i64)>,
}

/// Means for all unordered class pairs `C1 < C2` of `G_i` (canonical class
/// order), with the reference closed forms alongside.
pub fn mean_table(
    kind: GroupKind,
    level: u32,
    w: i8,
    symplectic_order: Option<u32>,
) -> Result<Vec<MeanRow>, RaceError> {
    let full = Group::new(kind)?;
    let lvl = full.level(level)?;
    let sub = lvl.group();
    let o = symplectic_order.unwrap_or(crate::arith::order_from_root_number(w));
    let classes = sub.classes();
    let mut rows = Vec::new();
    for (a, &c1) in classes.iter().enumerate() {
        for &c2 in &classes[a + 1..] {
            let spec = RaceSpec::new(kind, level, c1, c2, o)?;
            let reference = crate::reference::mean_reference(kind, level, w, o, c1, c2);
            let (formula, coeffs) = match mean(&spec) {
                Ok(m) => (
                    Some(m),
                    squared_weights(&spec)?
                        .into_iter()
                        .filter(|(_, c)| *c != 0)
                        .collect(),
                ),
                Err(RaceError::Undefined { .. }) => (None, Vec::new()),
                Err(e) => return Err(e),
            };
            let status = match (formula, reference) {
                (None, _) => RowStatus::Undefined,
                (Some(_), None) => RowStatus::NoReference,
                (Some(x), Some(y)) if x == y => RowStatus::Match,
                _ => RowStatus::OpenQuestion,
            };
            rows.push(MeanRow {
                c1,
                c2,
                c1_name: sub.class_name(c1),
                c2_name: sub.class_name(c2),
                mean_formula: formula,
                mean_reference: reference,
                status,
                variance_coefficients: coeffs,
            });
        }
    }
    Ok(rows)
}

/// Full-group character ids, for labelling zero sets.
pub fn full_character_ids(kind: GroupKind) -> Result<Vec<CharacterId>, RaceError> {
    Ok(character_ids(&Group::new(kind)?))
}
