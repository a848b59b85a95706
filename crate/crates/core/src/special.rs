//! Bessel `J0` on the real line.
//!
//! Power series below 5, Miller's backward recurrence on `[5, 25)` and the
//! Hankel asymptotic expansion beyond.

use crate::scalar::Real;

const SERIES_MAX: f64 = 5.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

pub fn bessel_j0<T: Real>(x: T) -> T {
    let x = x.abs();
    let xf = x.as_f64();
    if xf < SERIES_MAX {
        series(x)
    } else if xf < ASYMPTOTIC_MIN {
        miller(x)
    } else {
        hankel(x)
    }
}

/// `|J0(x)| <= min(1, sqrt(2/(πx)))`.
pub fn bessel_j0_envelope<T: Real>(x: T) -> T {
    let x = x.abs();
    if x <= T::zero() {
        return T::one();
    }
    (T::lit(2.0) / (T::PI() * x)).sqrt().min(T::one())
}

fn series<T: Real>(x: T) -> T {
    let q = -(x * x) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..60 {
        let kk = T::of_usize(k);
        term = term * q / (kk * kk);
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs().max(T::one()) {
            break;
        }
    }
    sum
}

fn miller<T: Real>(x: T) -> T {
    // start well above x so that J_N is negligible
    let start = (x.as_f64() + 30.0 + 3.0 * x.as_f64().sqrt()) as usize;
    let start = start + start % 2;
    let two_over_x = T::lit(2.0) / x;
    let mut next = T::zero();
    let mut cur = T::lit(1e-30);
    let mut norm = T::zero();
    let mut j0 = T::zero();
    for k in (1..=start).rev() {
        let prev = T::of_usize(k) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm = norm + T::lit(2.0) * cur;
        }
        if k - 1 == 0 {
            j0 = cur;
        }
        if cur.abs() > T::lit(1e200) {
            let s = T::lit(1e-200);
            cur = cur * s;
            next = next * s;
            norm = norm * s;
            j0 = j0 * s;
        }
    }
    norm = norm + j0;
    j0 / norm
}

fn hankel<T: Real>(x: T) -> T {
    // P0, Q0 asymptotic series in 1/(8x)
    let z = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut k = 1usize;
    let mut last = T::infinity();
    loop {
        let a = (2 * k - 1) as f64;
        term = term * T::lit(-a * a) / (T::of_usize(k) * z);
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 1 {
            q = q + signed;
        } else {
            p = p + signed;
        }
        let mag = term.abs();
        if mag <= T::epsilon() * T::lit(1e-2) || mag > last || k > 60 {
            break;
        }
        last = mag;
        k += 1;
    }
    let chi = x - T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
