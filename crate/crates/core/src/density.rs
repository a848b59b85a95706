//! `δ = P(X > 0)` for `X = m + Σ r_n cos(2π U_n)`, by Monte Carlo and by
//! Fourier inversion of `t ↦ e^{imt} Π J0(r_n t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate, QuadConfig};
use crate::race::RaceModel;
use crate::scalar::Real;
use crate::special::bessel_j0;

/// Smallest accepted Monte Carlo sample count.
pub const MIN_SAMPLES: u64 = 10_000;
/// Antithetic pairs per deterministic chunk.
pub const CHUNK_PAIRS: u64 = 2048;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("the model has no terms")]
    EmptyTerms,
    #[error("at least {MIN_SAMPLES} samples required, got {0}")]
    TooFewSamples(u64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    MonteCarlo,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub method: Method,
    /// Monte Carlo: 99% half-width; Fourier: quadrature plus truncation budget
    pub error_bound: f64,
    pub samples_or_nodes: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DensityEstimate {
    pub fn interval(&self) -> (f64, f64) {
        (
            (self.value - self.error_bound).max(0.0),
            (self.value + self.error_bound).min(1.0),
        )
    }
}

/// Monte Carlo over antithetic pairs `(U, U + 1/2)`, which map each
/// `cos(2πU)` to its negative. Deterministic per `(seed, samples)`.
pub fn density_montecarlo<T: Real>(
    model: &RaceModel<T>,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate, DensityError> {
    let mut out = density_montecarlo_multi(&model.terms, &[model.mean as f64], samples, seed)?;
    Ok(out.remove(0))
}

/// Several means against the same draws of `S = Σ r cos(2πU)`.
pub fn density_montecarlo_multi<T: Real>(
    terms: &[T],
    means: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<DensityEstimate>, DensityError> {
    if terms.is_empty() {
        return Err(DensityError::EmptyTerms);
    }
    if samples < MIN_SAMPLES {
        return Err(DensityError::TooFewSamples(samples));
    }
    let pairs = samples / 2;
    let chunks = pairs.div_ceil(CHUNK_PAIRS);
    let terms: Vec<f64> = terms.iter().map(|r| r.as_f64()).collect();
    let k = means.len();
    // per mean: (Σ c, Σ c²) with c ∈ {0, 1, 2} positive draws per pair
    let totals = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let start = chunk * CHUNK_PAIRS;
            let count = CHUNK_PAIRS.min(pairs - start);
            let mut acc = vec![(0u64, 0u64); k];
            for _ in 0..count {
                let s: f64 = terms
                    .iter()
                    .map(|&r| r * (std::f64::consts::TAU * rng.gen::<f64>()).cos())
                    .sum();
                for (a, &m) in acc.iter_mut().zip(means) {
                    let c = (m + s > 0.0) as u64 + (m - s > 0.0) as u64;
                    a.0 += c;
                    a.1 += c * c;
                }
            }
            acc
        })
        .reduce(
            || vec![(0u64, 0u64); k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.0 += y.0;
                    x.1 += y.1;
                }
                a
            },
        );
    let n = pairs as f64;
    Ok(totals
        .into_iter()
        .map(|(s1, s2)| {
            let mean_c = s1 as f64 / n;
            let var_c = (s2 as f64 / n - mean_c * mean_c).max(0.0) * n / (n - 1.0);
            let value = mean_c / 2.0;
            let half = Z99 * (var_c / 4.0).sqrt() / n.sqrt();
            DensityEstimate {
                value,
                method: Method::MonteCarlo,
                error_bound: half,
                samples_or_nodes: 2 * pairs,
                warnings: Vec::new(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierConfig {
    /// upper integration limit; chosen from the truncation bound when `None`
    pub t_max: Option<f64>,
    /// target for the truncation tail when `t_max` is automatic
    pub tail_tol: f64,
    pub abs_tol: f64,
    /// cap on quadrature panels
    pub nodes: usize,
}

impl Default for FourierConfig {
    fn default() -> Self {
        FourierConfig {
            t_max: None,
            tail_tol: 1e-10,
            abs_tol: 1e-10,
            nodes: 200_000,
        }
    }
}

/// `Π J0(r_n t)`, stopping once the product underflows.
pub fn characteristic_function<T: Real>(terms: &[T], t: T) -> T {
    let mut p = T::one();
    for &r in terms {
        p = p * bessel_j0(r * t);
        if p.abs() < T::min_positive_value() * T::lit(1e10) {
            return T::zero();
        }
    }
    p
}

/// Bound on `(1/π) ∫_T^∞ |Π J0(r_n t)| / t dt` from
/// `|J0(x)| <= sqrt(2/(πx))`, using the terms with `r T >= 2/π`.
pub fn truncation_bound<T: Real>(terms: &[T], t: f64) -> f64 {
    let mut log_env = 0.0;
    let mut k = 0usize;
    for r in terms {
        let x = r.as_f64() * t;
        if x * std::f64::consts::PI >= 2.0 {
            log_env += 0.5 * (2.0 / (std::f64::consts::PI * x)).ln();
            k += 1;
        }
    }
    if k == 0 {
        return f64::INFINITY;
    }
    std::f64::consts::FRAC_1_PI * (2.0 / k as f64) * log_env.exp()
}

/// Bound on `∫_T^∞ |Π J0(r_n t)| dt`, infinite unless more than two terms
/// satisfy `r T >= 2/π`.
pub fn envelope_integral<T: Real>(terms: &[T], t: f64) -> f64 {
    let mut log_env = 0.0;
    let mut k = 0usize;
    for r in terms {
        let x = r.as_f64() * t;
        if x * std::f64::consts::PI >= 2.0 {
            log_env += 0.5 * (2.0 / (std::f64::consts::PI * x)).ln();
            k += 1;
        }
    }
    if k <= 2 {
        return f64::INFINITY;
    }
    t * log_env.exp() / (k as f64 / 2.0 - 1.0)
}

fn auto_t_max<T: Real>(terms: &[T], tail_tol: f64) -> (f64, f64) {
    let ss: f64 = terms.iter().map(|r| r.as_f64().powi(2)).sum();
    let mut t = 1.0 / ss.sqrt().max(1e-300);
    let mut bound = truncation_bound(terms, t);
    let mut steps = 0;
    while bound > tail_tol && steps < 80 {
        t *= 2.0;
        bound = truncation_bound(terms, t);
        steps += 1;
    }
    (t, bound)
}

fn sin_over_t(m: f64, t: f64) -> f64 {
    let x = m * t;
    if x.abs() < 1e-4 {
        m * (1.0 - x * x / 6.0)
    } else {
        (m * t).sin() / t
    }
}

/// `δ = 1/2 + (1/π) ∫_0^∞ sin(mt) Π J0(r_n t) / t dt`, plus the effect of
/// the model's neglected zero tail when it is recorded.
pub fn density_fourier<T: Real>(
    model: &RaceModel<T>,
    cfg: &FourierConfig,
) -> Result<DensityEstimate, DensityError> {
    if model.terms.is_empty() {
        return Err(DensityError::EmptyTerms);
    }
    let mut warnings = Vec::new();
    if model.terms.len() < 3 {
        warnings.push(format!(
            "only {} terms: slow decay of the integrand, consider a larger t_max",
            model.terms.len()
        ));
    }
    let m = model.mean as f64;
    let terms: Vec<f64> = model.terms.iter().map(|r| r.as_f64()).collect();
    if model.mean == 0 {
        return Ok(DensityEstimate {
            value: 0.5,
            method: Method::Fourier,
            error_bound: 0.0,
            samples_or_nodes: 0,
            warnings,
        });
    }
    let (t_max, tail) = match cfg.t_max {
        Some(t) if t > 0.0 => (t, truncation_bound(&terms, t)),
        Some(t) => {
            return Err(DensityError::BadParameter(format!(
                "t_max must be positive, got {t}"
            )))
        }
        None => auto_t_max(&terms, cfg.tail_tol),
    };
    let r_max = terms.iter().cloned().fold(0.0, f64::max);
    let periods = t_max * (m.abs() + r_max) / std::f64::consts::PI;
    let qcfg = QuadConfig {
        abs_tol: cfg.abs_tol,
        rel_tol: 0.0,
        max_panels: cfg.nodes.max(16),
        initial_panels: (periods.ceil() as usize + 1).clamp(1, cfg.nodes.max(16) / 4),
    };
    let q = integrate(
        |t: f64| sin_over_t(m, t) * characteristic_function(&terms, t),
        0.0,
        t_max,
        &qcfg,
    );
    if !q.converged {
        warnings.push(format!(
            "quadrature did not reach {:.1e} (estimate {:.1e})",
            cfg.abs_tol, q.error
        ));
    }
    let mut value = 0.5 + q.value / std::f64::consts::PI;
    let mut error = q.error / std::f64::consts::PI + tail;
    let tail_sd = model.tail_variance.as_f64().max(0.0).sqrt();
    if tail_sd > 0.0 {
        // |Δδ| <= sup density · E|Z| with sup density <= (1/π) ∫_0^∞ |Π J0|
        let cfg_abs = QuadConfig {
            abs_tol: 1e-6,
            rel_tol: 1e-4,
            ..qcfg
        };
        let f = integrate(
            |t: f64| characteristic_function(&terms, t).abs(),
            0.0,
            t_max,
            &cfg_abs,
        );
        let sup = (f.value + f.error + envelope_integral(&terms, t_max)) / std::f64::consts::PI;
        error += sup * tail_sd;
    }
    value = value.clamp(0.0, 1.0);
    Ok(DensityEstimate {
        value,
        method: Method::Fourier,
        error_bound: error,
        samples_or_nodes: q.evaluations as u64,
        warnings,
    })
}
