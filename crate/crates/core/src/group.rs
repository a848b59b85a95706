//! Dihedral groups `D_{2^{n-1}} = <r, s>` and generalized quaternion groups
//! `H_{2^n} = <x, y>` of order `2^n`, their conjugacy classes and the chain of
//! subgroups `G_i = <a^{2^{n-i}}, b>`.
//!
//! Both families share one element encoding: `a^e b^f` with `a` the rotation
//! generator (`r` or `x`) and `b` the second generator (`s` or `y`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_N: u32 = 3;
pub const MAX_N: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order 2^{0} is below the supported minimum 2^3")]
    TooSmall(u32),
    #[error("group order 2^{0} exceeds the supported maximum 2^20")]
    TooLarge(u32),
    #[error("level {i} is outside 3..={n}")]
    BadLevel { i: u32, n: u32 },
    #[error("class {0} does not exist in a group of order 2^{1}")]
    BadClass(ClassLabel, u32),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dihedral,
    Quaternion,
}

impl Family {
    /// Letters used for the two generators when printing elements.
    pub fn letters(self) -> (char, char) {
        match self {
            Family::Dihedral => ('r', 's'),
            Family::Quaternion => ('x', 'y'),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Dihedral => "dihedral",
            Family::Quaternion => "quaternion",
        })
    }
}

impl FromStr for Family {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dihedral" | "d" => Ok(Family::Dihedral),
            "quaternion" | "generalized-quaternion" | "generalizedquaternion" | "q" | "h" => {
                Ok(Family::Quaternion)
            }
            _ => Err(GroupError::Parse {
                what: "family",
                input: s.to_string(),
            }),
        }
    }
}

/// A family together with `n`, the group having order `2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupKind {
    pub family: Family,
    pub n: u32,
}

impl GroupKind {
    pub fn new(family: Family, n: u32) -> Result<Self, GroupError> {
        if n < MIN_N {
            return Err(GroupError::TooSmall(n));
        }
        if n > MAX_N {
            return Err(GroupError::TooLarge(n));
        }
        Ok(GroupKind { family, n })
    }
}

/// `a^exponent b^flip` in normal form, exponent reduced mod `2^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub exponent: u32,
    pub flip: bool,
}

impl Element {
    pub const IDENTITY: Element = Element {
        exponent: 0,
        flip: false,
    };

    pub fn rotation(exponent: u32) -> Self {
        Element {
            exponent,
            flip: false,
        }
    }

    pub fn flipped(exponent: u32) -> Self {
        Element {
            exponent,
            flip: true,
        }
    }

    /// Parses `1`, `a^k`, `b`, `a^k b`, `ab`, using any of the letter pairs
    /// `a/b`, `r/s`, `x/y`. Whitespace and `*` separators are ignored.
    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let err = || GroupError::Parse {
            what: "element",
            input: s.to_string(),
        };
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '*')
            .collect();
        if t == "1" || t == "e" {
            return Ok(Element::IDENTITY);
        }
        let mut chars = t.chars().peekable();
        let mut exponent = 0u32;
        let mut flip = false;
        if let Some(&c) = chars.peek() {
            if matches!(c, 'a' | 'r' | 'x') {
                chars.next();
                exponent = 1;
                if chars.peek() == Some(&'^') {
                    chars.next();
                    let digits: String =
                        std::iter::from_fn(|| chars.next_if(|c| c.is_ascii_digit())).collect();
                    exponent = digits.parse().map_err(|_| err())?;
                }
            }
        }
        if let Some(c) = chars.next() {
            if matches!(c, 'b' | 's' | 'y') {
                flip = true;
            } else {
                return Err(err());
            }
        }
        if chars.next().is_some() || (exponent == 0 && !flip) {
            return Err(err());
        }
        Ok(Element { exponent, flip })
    }
}

/// Conjugacy class labels. `FlipEven` is the class of `b`, `FlipOdd` the class
/// of `ab`; `Power(k)` is `{a^k, a^{-k}}` with `1 <= k <= 2^{n-2} - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    One,
    MinusOne,
    Power(u32),
    FlipEven,
    FlipOdd,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::One => f.write_str("1"),
            ClassLabel::MinusOne => f.write_str("-1"),
            ClassLabel::Power(k) => write!(f, "a^{k}"),
            ClassLabel::FlipEven => f.write_str("b"),
            ClassLabel::FlipOdd => f.write_str("ab"),
        }
    }
}

impl FromStr for ClassLabel {
    type Err = GroupError;
    /// Accepts `1`, `-1`, `a^k`, `b`, `ab` (or the r/s, x/y letters), with an
    /// optional `C` / `C_` prefix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t
            .strip_prefix("C_")
            .or_else(|| t.strip_prefix('C'))
            .unwrap_or(t);
        match t {
            "1" => return Ok(ClassLabel::One),
            "-1" => return Ok(ClassLabel::MinusOne),
            _ => {}
        }
        let e = Element::parse(t).map_err(|_| GroupError::Parse {
            what: "class",
            input: s.to_string(),
        })?;
        Ok(match (e.flip, e.exponent) {
            (true, k) if k % 2 == 0 => ClassLabel::FlipEven,
            (true, _) => ClassLabel::FlipOdd,
            (false, k) => ClassLabel::Power(k),
        })
    }
}

/// One of the two 2-groups, with element arithmetic and class structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Group {
    kind: GroupKind,
    /// order of the rotation generator, `2^{n-1}`
    m: u32,
}

impl Group {
    pub fn new(kind: GroupKind) -> Result<Self, GroupError> {
        let kind = GroupKind::new(kind.family, kind.n)?;
        Ok(Group {
            kind,
            m: 1 << (kind.n - 1),
        })
    }

    pub fn dihedral(n: u32) -> Result<Self, GroupError> {
        Self::new(GroupKind {
            family: Family::Dihedral,
            n,
        })
    }

    pub fn quaternion(n: u32) -> Result<Self, GroupError> {
        Self::new(GroupKind {
            family: Family::Quaternion,
            n,
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn family(&self) -> Family {
        self.kind.family
    }

    pub fn n(&self) -> u32 {
        self.kind.n
    }

    pub fn order(&self) -> u64 {
        1u64 << self.kind.n
    }

    /// `2^{n-1}`, the order of `a`.
    pub fn rotation_order(&self) -> u32 {
        self.m
    }

    /// Exponent `2^{n-2}` of the central element `-1 = a^{2^{n-2}}`.
    pub fn half(&self) -> u32 {
        self.m / 2
    }

    pub fn element(&self, exponent: i64, flip: bool) -> Element {
        Element {
            exponent: exponent.rem_euclid(self.m as i64) as u32,
            flip,
        }
    }

    pub fn contains(&self, g: Element) -> bool {
        g.exponent < self.m
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.m)
            .map(Element::rotation)
            .chain((0..self.m).map(Element::flipped))
    }

    pub fn multiply(&self, g: Element, h: Element) -> Element {
        let m = self.m;
        match (g.flip, h.flip) {
            (false, f) => Element {
                exponent: (g.exponent + h.exponent) % m,
                flip: f,
            },
            (true, false) => Element {
                exponent: (g.exponent + m - h.exponent) % m,
                flip: true,
            },
            (true, true) => {
                // a^e b a^k b = a^{e-k} b^2
                let extra = match self.kind.family {
                    Family::Dihedral => 0,
                    Family::Quaternion => m / 2,
                };
                Element {
                    exponent: (g.exponent + m - h.exponent + extra) % m,
                    flip: false,
                }
            }
        }
    }

    pub fn inverse(&self, g: Element) -> Element {
        if !g.flip {
            return self.element(-(g.exponent as i64), false);
        }
        match self.kind.family {
            Family::Dihedral => g,
            Family::Quaternion => self.element(g.exponent as i64 + self.half() as i64, true),
        }
    }

    pub fn pow(&self, g: Element, k: u64) -> Element {
        let mut acc = Element::IDENTITY;
        let mut base = g;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(acc, base);
            }
            base = self.multiply(base, base);
            k >>= 1;
        }
        acc
    }

    /// `x g x^{-1}`.
    pub fn conjugate(&self, g: Element, by: Element) -> Element {
        self.multiply(self.multiply(by, g), self.inverse(by))
    }

    pub fn element_order(&self, g: Element) -> u64 {
        let mut h = g;
        let mut k = 1;
        while h != Element::IDENTITY {
            h = self.multiply(h, g);
            k += 1;
        }
        k
    }

    pub fn class_of(&self, g: Element) -> ClassLabel {
        if g.flip {
            return if g.exponent % 2 == 0 {
                ClassLabel::FlipEven
            } else {
                ClassLabel::FlipOdd
            };
        }
        match g.exponent {
            0 => ClassLabel::One,
            e if e == self.half() => ClassLabel::MinusOne,
            e => ClassLabel::Power(e.min(self.m - e)),
        }
    }

    pub fn class_count(&self) -> usize {
        self.half() as usize + 3
    }

    /// All classes in canonical order: `1, -1, a^1, ..., a^{2^{n-2}-1}, b, ab`.
    pub fn classes(&self) -> Vec<ClassLabel> {
        let mut out = Vec::with_capacity(self.class_count());
        out.push(ClassLabel::One);
        out.push(ClassLabel::MinusOne);
        out.extend((1..self.half()).map(ClassLabel::Power));
        out.push(ClassLabel::FlipEven);
        out.push(ClassLabel::FlipOdd);
        out
    }

    pub fn is_class(&self, c: ClassLabel) -> bool {
        match c {
            ClassLabel::Power(k) => k >= 1 && k < self.half(),
            _ => true,
        }
    }

    pub fn check_class(&self, c: ClassLabel) -> Result<(), GroupError> {
        if self.is_class(c) {
            Ok(())
        } else {
            Err(GroupError::BadClass(c, self.n()))
        }
    }

    /// Position of `c` in [`Group::classes`].
    pub fn class_index(&self, c: ClassLabel) -> Option<usize> {
        if !self.is_class(c) {
            return None;
        }
        Some(match c {
            ClassLabel::One => 0,
            ClassLabel::MinusOne => 1,
            ClassLabel::Power(k) => 1 + k as usize,
            ClassLabel::FlipEven => self.half() as usize + 1,
            ClassLabel::FlipOdd => self.half() as usize + 2,
        })
    }

    pub fn class_size(&self, c: ClassLabel) -> u64 {
        match c {
            ClassLabel::One | ClassLabel::MinusOne => 1,
            ClassLabel::Power(_) => 2,
            ClassLabel::FlipEven | ClassLabel::FlipOdd => self.half() as u64,
        }
    }

    pub fn representative(&self, c: ClassLabel) -> Element {
        match c {
            ClassLabel::One => Element::IDENTITY,
            ClassLabel::MinusOne => Element::rotation(self.half()),
            ClassLabel::Power(k) => Element::rotation(k),
            ClassLabel::FlipEven => Element::flipped(0),
            ClassLabel::FlipOdd => Element::flipped(1),
        }
    }

    pub fn class_members(&self, c: ClassLabel) -> Vec<Element> {
        match c {
            ClassLabel::One | ClassLabel::MinusOne => vec![self.representative(c)],
            ClassLabel::Power(k) => vec![Element::rotation(k), Element::rotation(self.m - k)],
            ClassLabel::FlipEven => (0..self.m).step_by(2).map(Element::flipped).collect(),
            ClassLabel::FlipOdd => (1..self.m).step_by(2).map(Element::flipped).collect(),
        }
    }

    /// `|{g : g^2 in C}|`.
    pub fn square_root_count(&self, c: ClassLabel) -> u64 {
        let m = self.m as u64;
        let flips_square_to_one = self.kind.family == Family::Dihedral;
        match c {
            // a^0, a^{m/2}, plus every flip in the dihedral case
            ClassLabel::One => 2 + if flips_square_to_one { m } else { 0 },
            // a^{m/4}, a^{3m/4}, plus every flip in the quaternion case
            ClassLabel::MinusOne => 2 + if flips_square_to_one { 0 } else { m },
            // a^{±k} each have two square roots when k is even
            ClassLabel::Power(k) => {
                if k % 2 == 0 {
                    4
                } else {
                    0
                }
            }
            ClassLabel::FlipEven | ClassLabel::FlipOdd => 0,
        }
    }

    pub fn level(&self, i: u32) -> Result<SubgroupLevel, GroupError> {
        SubgroupLevel::new(*self, i)
    }

    /// Human-readable element using the family's generator letters.
    pub fn format_element(&self, g: Element) -> String {
        let (a, b) = self.family().letters();
        match (g.exponent, g.flip) {
            (0, false) => "1".into(),
            (0, true) => b.to_string(),
            (1, f) => format!("{a}{}", if f { b.to_string() } else { String::new() }),
            (e, f) => format!("{a}^{e}{}", if f { b.to_string() } else { String::new() }),
        }
    }

    /// Class name using the family's letters, e.g. `C_x^3`, `C_y`, `C_rs`.
    pub fn class_name(&self, c: ClassLabel) -> String {
        let (a, b) = self.family().letters();
        match c {
            ClassLabel::One => "C_1".into(),
            ClassLabel::MinusOne => "C_-1".into(),
            ClassLabel::Power(k) => format!("C_{a}^{k}"),
            ClassLabel::FlipEven => format!("C_{b}"),
            ClassLabel::FlipOdd => format!("C_{a}{b}"),
        }
    }
}

/// The subgroup `G_i = <a^{2^{n-i}}, b>` of a group of order `2^n`, itself a
/// group of the same family with order `2^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubgroupLevel {
    full: Group,
    sub: Group,
    i: u32,
}

impl SubgroupLevel {
    pub fn new(full: Group, i: u32) -> Result<Self, GroupError> {
        if i < MIN_N || i > full.n() {
            return Err(GroupError::BadLevel { i, n: full.n() });
        }
        let sub = Group::new(GroupKind {
            family: full.family(),
            n: i,
        })?;
        Ok(SubgroupLevel { full, sub, i })
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn full(&self) -> &Group {
        &self.full
    }

    /// `G_i` as an abstract group in its own coordinates.
    pub fn group(&self) -> &Group {
        &self.sub
    }

    pub fn is_top(&self) -> bool {
        self.i == self.full.n()
    }

    /// `2^{n-i}`.
    pub fn stride(&self) -> u32 {
        1 << (self.full.n() - self.i)
    }

    /// Generators `(a^{2^{n-i}}, b)` in full-group coordinates.
    pub fn generators(&self) -> (Element, Element) {
        (Element::rotation(self.stride()), Element::flipped(0))
    }

    /// Maps an element of `G_i` (own coordinates) into the full group.
    pub fn embed(&self, g: Element) -> Element {
        Element {
            exponent: g.exponent * self.stride(),
            flip: g.flip,
        }
    }

    pub fn contains(&self, g: Element) -> bool {
        g.exponent % self.stride() == 0
    }

    /// Inverse of [`SubgroupLevel::embed`] on `G_i`.
    pub fn restrict(&self, g: Element) -> Option<Element> {
        self.contains(g).then(|| Element {
            exponent: g.exponent / self.stride(),
            flip: g.flip,
        })
    }

    /// The full-group class containing the `G_i`-class `c`.
    pub fn fuse(&self, c: ClassLabel) -> ClassLabel {
        match c {
            ClassLabel::One => ClassLabel::One,
            ClassLabel::MinusOne => ClassLabel::MinusOne,
            ClassLabel::Power(k) => ClassLabel::Power(k * self.stride()),
            ClassLabel::FlipEven => ClassLabel::FlipEven,
            ClassLabel::FlipOdd if self.is_top() => ClassLabel::FlipOdd,
            ClassLabel::FlipOdd => ClassLabel::FlipEven,
        }
    }
}
