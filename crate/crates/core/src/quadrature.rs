//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// sum of the per-panel `|K15 - G7|` estimates
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panels: 100_000,
            initial_panels: 1,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One G7/K15 panel: `(kronrod, |kronrod - gauss|)`.
pub fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let c = (a + b) / T::lit(2.0);
    let h = (b - a) / T::lit(2.0);
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        k = k + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            g = g + s * T::lit(WG[j / 2]);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `∫_a^b f`, bisecting the panel with the largest error estimate until the
/// total estimate meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    cfg: &QuadConfig,
) -> QuadResult<T> {
    let mut heap = BinaryHeap::new();
    let n0 = cfg.initial_panels.max(1);
    let width = (b - a) / T::of_usize(n0);
    let mut evaluations = 0;
    let mut value = T::zero();
    let mut error = T::zero();
    for p in 0..n0 {
        let lo = a + width * T::of_usize(p);
        let hi = if p + 1 == n0 { b } else { lo + width };
        let (v, e) = gk15(&mut f, lo, hi);
        evaluations += 15;
        value = value + v;
        error = error + e;
        heap.push(Panel {
            a: lo,
            b: hi,
            value: v,
            error: e,
        });
    }
    let tol = |v: T| T::lit(cfg.abs_tol).max(T::lit(cfg.rel_tol) * v.abs());
    while error > tol(value) && heap.len() < cfg.max_panels {
        let worst = heap.pop().expect("nonempty heap");
        let mid = (worst.a + worst.b) / T::lit(2.0);
        if !(mid > worst.a && mid < worst.b) {
            // panel at floating-point resolution
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        value = value - worst.value + v1 + v2;
        error = error - worst.error + e1 + e2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // resum to shed accumulated cancellation from the running updates
    let value = heap.iter().map(|p| p.value).sum::<T>();
    let error = heap.iter().map(|p| p.error).sum::<T>();
    QuadResult {
        value,
        error,
        evaluations,
        converged: error <= tol(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x: f64| x.powi(5) - 3.0 * x * x,
            0.0,
            2.0,
            &QuadConfig::default(),
        );
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x: f64| (50.0 * x).sin(), 0.0, 1.0, &QuadConfig::default());
        assert!((r.value - (1.0 - 50f64.cos()) / 50.0).abs() < 1e-10);
        assert!(r.converged);
    }
}
