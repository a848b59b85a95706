//! Exact arithmetic in `Z[ζ]` with `ζ = exp(2πi/m)`, `m` a power of two.
//!
//! For `m = 2^k` the cyclotomic polynomial is `X^{m/2} + 1`, so elements are
//! integer combinations of `ζ^0, ..., ζ^{m/2-1}` and `ζ^{m/2} = -1`.
//! Only nonzero coefficients are stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Integer coefficient type for [`Cyclotomic`].
pub trait CycloInt: Integer + Signed + Clone + fmt::Debug + FromPrimitive + ToPrimitive {}
impl<T: Integer + Signed + Clone + fmt::Debug + FromPrimitive + ToPrimitive> CycloInt for T {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T = i64> {
    m: u32,
    terms: BTreeMap<u32, T>,
}

impl<T: CycloInt> Cyclotomic<T> {
    fn check_modulus(m: u32) {
        assert!(
            m >= 2 && m.is_power_of_two(),
            "cyclotomic modulus must be a power of two >= 2, got {m}"
        );
    }

    pub fn zero(m: u32) -> Self {
        Self::check_modulus(m);
        Cyclotomic {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn integer(m: u32, c: T) -> Self {
        let mut z = Self::zero(m);
        z.add_root(0, c);
        z
    }

    pub fn one(m: u32) -> Self {
        Self::integer(m, T::one())
    }

    /// `ζ^a`.
    pub fn root(m: u32, a: i64) -> Self {
        let mut z = Self::zero(m);
        z.add_root(a, T::one());
        z
    }

    /// `ζ^a + ζ^{-a}`.
    pub fn two_cos(m: u32, a: i64) -> Self {
        let mut z = Self::zero(m);
        z.add_root(a, T::one());
        z.add_root(-a, T::one());
        z
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Nonzero `(j, c_j)` in the power basis, increasing `j`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &T)> + '_ {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    /// Dense coefficient vector of length `m/2`.
    pub fn coeffs(&self) -> Vec<T> {
        let mut v = vec![T::zero(); (self.m / 2) as usize];
        for (j, c) in &self.terms {
            v[*j as usize] = c.clone();
        }
        v
    }

    fn phi(&self) -> i64 {
        (self.m / 2) as i64
    }

    /// Adds `c·ζ^a` in place.
    pub fn add_root(&mut self, a: i64, c: T) {
        if c.is_zero() {
            return;
        }
        let a = a.rem_euclid(self.m as i64);
        let phi = self.phi();
        let (j, c) = if a < phi {
            (a as u32, c)
        } else {
            ((a - phi) as u32, -c)
        };
        let slot = self.terms.entry(j).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&j);
        }
    }

    /// `self += c · a · b`.
    pub fn add_product(&mut self, a: &Self, b: &Self, c: &T) {
        assert!(a.m == self.m && b.m == self.m, "mixed cyclotomic moduli");
        for (i, x) in &a.terms {
            for (j, y) in &b.terms {
                self.add_root(*i as i64 + *j as i64, x.clone() * y.clone() * c.clone());
            }
        }
    }

    /// Complex conjugate, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let mut z = Self::zero(self.m);
        for (j, c) in &self.terms {
            z.add_root(-(*j as i64), c.clone());
        }
        z
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut z = Self::zero(self.m);
        for (j, x) in &self.terms {
            z.add_root(*j as i64, x.clone() * c.clone());
        }
        z
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as an integer, if it lies in `Z`.
    pub fn as_integer(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Reinterprets in `Z[ζ_{m'}]` for a multiple `m'` of `m`.
    pub fn lift(&self, m2: u32) -> Self {
        assert!(m2 % self.m == 0, "cannot lift modulus {} to {m2}", self.m);
        let step = (m2 / self.m) as i64;
        let mut z = Self::zero(m2);
        for (j, c) in &self.terms {
            z.add_root(*j as i64 * step, c.clone());
        }
        z
    }

    /// `(re, im)` in floating point.
    pub fn to_complex(&self) -> (f64, f64) {
        let w = std::f64::consts::TAU / self.m as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in &self.terms {
            let c = c.to_f64().expect("coefficient fits in f64");
            let (s, co) = (w * *j as f64).sin_cos();
            re += c * co;
            im += c * s;
        }
        (re, im)
    }

    /// Real part; character values of both families are real.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().0
    }
}

impl<T: CycloInt> Add for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, rhs: Self) -> Cyclotomic<T> {
        assert_eq!(self.m, rhs.m, "mixed cyclotomic moduli");
        let mut z = self.clone();
        for (j, c) in &rhs.terms {
            z.add_root(*j as i64, c.clone());
        }
        z
    }
}

impl<T: CycloInt> Sub for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, rhs: Self) -> Cyclotomic<T> {
        assert_eq!(self.m, rhs.m, "mixed cyclotomic moduli");
        let mut z = self.clone();
        for (j, c) in &rhs.terms {
            z.add_root(*j as i64, -c.clone());
        }
        z
    }
}

impl<T: CycloInt> Mul for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, rhs: Self) -> Cyclotomic<T> {
        let mut z = Cyclotomic::zero(self.m);
        z.add_product(self, rhs, &T::one());
        z
    }
}

impl<T: CycloInt> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        self.scale(&-T::one())
    }
}

impl<T: CycloInt> fmt::Debug for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: CycloInt> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&j, c) in &self.terms {
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match (j, a.is_one()) {
                (0, _) => write!(f, "{a:?}")?,
                (_, true) => write!(f, "z{}^{j}", self.m)?,
                (_, false) => write!(f, "{a:?}*z{}^{j}", self.m)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
