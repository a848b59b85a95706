//! Zero ordinates of Artin L-functions: file ingestion, synthetic sampling
//! calibrated to the Riemann-von Mangoldt main term, and the sums `B0` and
//! `Σ 1/√(1/4 + γ²)`.
//!
//! Ordinates are one-sided (`γ > 0`). Two-sided quantities are requested
//! explicitly through [`Convention`].

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Lower clamp on the sampling intensity.
pub const DENSITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: ordinate {value} is not above the previous one ({previous})")]
    NotIncreasing {
        line: usize,
        value: f64,
        previous: f64,
    },
    #[error("ordinate {value} is not positive")]
    NotPositive { value: f64 },
    #[error("ordinate {value} lies beyond T_max = {t_max}")]
    BeyondHorizon { value: f64, t_max: f64 },
    #[error("requested T = {t} exceeds the completeness horizon {t_max}")]
    Horizon { t: f64, t_max: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// sum over `γ > 0`
    OneSided,
    /// sum over `γ ≠ 0`, twice the one-sided value
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroSource {
    File(String),
    Synthetic { seed: u64 },
    Literal,
}

/// Main-term zero counting model for `L(s, χ)` over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountModel<T> {
    /// `log A(χ)`
    pub log_conductor: T,
    /// `χ(1)`
    pub degree: u32,
}

impl<T: Real> ZeroCountModel<T> {
    pub fn new(log_conductor: T, degree: u32) -> Result<Self, ZeroError> {
        if !(log_conductor >= T::zero()) || !log_conductor.is_finite() {
            return Err(ZeroError::BadParameter(format!(
                "log conductor must be >= 0, got {log_conductor}"
            )));
        }
        if degree == 0 {
            return Err(ZeroError::BadParameter("degree must be positive".into()));
        }
        Ok(ZeroCountModel {
            log_conductor,
            degree,
        })
    }

    fn deg(&self) -> T {
        T::from_u32(self.degree).expect("degree fits")
    }

    /// Signed main term `(T/2π)(log A + deg·log(T/2πe))`.
    pub fn main_term(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let tau = T::TAU();
        t / tau * (self.log_conductor + self.deg() * (t / (tau * T::E())).ln())
    }

    /// `max(0, main term)`.
    pub fn expected_count(&self, t: T) -> T {
        self.main_term(t).max(T::zero())
    }

    /// Derivative of the main term, `(1/2π)(log A + deg·log(T/2π))`, clamped
    /// below at [`DENSITY_FLOOR`].
    pub fn density(&self, t: T) -> T {
        let tau = T::TAU();
        ((self.log_conductor + self.deg() * (t / tau).ln()) / tau).max(T::lit(DENSITY_FLOOR))
    }

    /// Point where the unclamped density equals the floor.
    fn floor_point(&self) -> T {
        let tau = T::TAU();
        (tau * ((tau * T::lit(DENSITY_FLOOR) - self.log_conductor) / self.deg()).exp())
            .max(T::zero())
    }

    /// `∫_0^t density`, the compensator of the sampled process.
    pub fn cumulative_intensity(&self, t: T) -> T {
        let s0 = self.floor_point();
        let floor = T::lit(DENSITY_FLOOR);
        if t <= s0 {
            floor * t
        } else {
            floor * s0 + self.main_term(t) - self.main_term(s0)
        }
    }

    /// Inverse of [`ZeroCountModel::cumulative_intensity`] near `guess`.
    fn invert_intensity(&self, target: T, guess: T) -> T {
        let s0 = self.floor_point();
        let floor = T::lit(DENSITY_FLOOR);
        if target <= floor * s0 {
            return target / floor;
        }
        // Newton on a convex increasing function, started at or right of s0
        let mut t = guess.max(s0);
        for _ in 0..100 {
            let f = self.cumulative_intensity(t) - target;
            let step = f / self.density(t);
            let next = (t - step).max(s0);
            if (next - t).abs() <= T::epsilon() * T::lit(4.0) * t.max(T::one()) {
                return next;
            }
            t = next;
        }
        t
    }

    /// Samples an inhomogeneous Poisson process on `(0, t_max]` with intensity
    /// [`ZeroCountModel::density`]: unit exponential gaps in the cumulative
    /// intensity, mapped back to ordinates.
    pub fn sample(
        &self,
        t_max: T,
        seed: u64,
        id: impl Into<String>,
    ) -> Result<ZeroSet<T>, ZeroError> {
        if !(t_max >= T::one()) || !t_max.is_finite() {
            return Err(ZeroError::BadParameter(format!(
                "T_max must be >= 1, got {t_max}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = self.cumulative_intensity(t_max);
        let mut level = T::zero();
        let mut prev = T::zero();
        let mut ordinates = Vec::new();
        loop {
            let u: f64 = rng.gen();
            level = level + T::lit(-(1.0 - u).ln());
            if level > total {
                break;
            }
            let mut g = self.invert_intensity(level, prev);
            if g <= prev {
                g = next_up(prev);
            }
            if g > t_max {
                break;
            }
            ordinates.push(g);
            prev = g;
        }
        Ok(ZeroSet {
            character: id.into(),
            ordinates,
            t_max,
            log_conductor: Some(self.log_conductor),
            degree: Some(self.degree),
            source: ZeroSource::Synthetic { seed },
        })
    }

    /// Main term of `Σ_{γ ≤ T} 1/√(1/4+γ²)`: `(log T/2π)(log A + deg·log(√T/2πe))`.
    pub fn partial_sum_main_term(&self, t: T) -> T {
        let tau = T::TAU();
        t.ln() / tau * (self.log_conductor + self.deg() * (t.sqrt() / (tau * T::E())).ln())
    }

    /// Allowed deviation `5(1 + log(A (T+4)^deg))` of partial sums from the
    /// main term.
    pub fn partial_sum_tolerance(&self, t: T) -> T {
        T::lit(5.0) * (T::one() + self.log_conductor + self.deg() * (t + T::lit(4.0)).ln())
    }

    /// Allowed deviation `5(1 + log(A T^deg))` of the zero count.
    pub fn count_tolerance(&self, t: T) -> T {
        T::lit(5.0) * (T::one() + self.log_conductor + self.deg() * t.ln())
    }

    /// `Σ_{γ > T} 1/(1/4+γ²)` predicted by the main term,
    /// `∫_T^∞ density(t)/t² dt = (log A + deg·log(T/2π) + deg) / (2π T)`.
    pub fn b0_tail(&self, t: T) -> T {
        let tau = T::TAU();
        ((self.log_conductor + self.deg() * ((t / tau).ln() + T::one())) / (tau * t)).max(T::zero())
    }
}

fn next_up<T: Real>(x: T) -> T {
    let bump = (x.abs() * T::epsilon()).max(T::min_positive_value());
    x + bump
}

/// Positive ordinates `0 < γ_1 < γ_2 < ... <= T_max` for one character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet<T> {
    pub character: String,
    ordinates: Vec<T>,
    t_max: T,
    pub log_conductor: Option<T>,
    pub degree: Option<u32>,
    pub source: ZeroSource,
}

impl<T: Real> ZeroSet<T> {
    /// Validates ordering, positivity and the horizon.
    pub fn new(
        character: impl Into<String>,
        ordinates: Vec<T>,
        t_max: T,
    ) -> Result<Self, ZeroError> {
        validate(&ordinates, t_max)?;
        Ok(ZeroSet {
            character: character.into(),
            ordinates,
            t_max,
            log_conductor: None,
            degree: None,
            source: ZeroSource::Literal,
        })
    }

    pub fn ordinates(&self) -> &[T] {
        &self.ordinates
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// `Σ 1/(1/4+γ²)`.
    pub fn b0(&self, convention: Convention) -> T {
        let s: T = self
            .ordinates
            .iter()
            .map(|&g| (T::lit(0.25) + g * g).recip())
            .sum();
        match convention {
            Convention::OneSided => s,
            Convention::TwoSided => s + s,
        }
    }

    /// `Σ_{γ ≤ T} 1/√(1/4+γ²)`.
    pub fn partial_inverse_sum(&self, t: T) -> Result<T, ZeroError> {
        if t > self.t_max {
            return Err(ZeroError::Horizon {
                t: t.as_f64(),
                t_max: self.t_max.as_f64(),
            });
        }
        Ok(self
            .ordinates
            .iter()
            .take_while(|&&g| g <= t)
            .map(|&g| (T::lit(0.25) + g * g).sqrt().recip())
            .sum())
    }

    /// Keeps the ordinates up to `t`, which becomes the new horizon.
    pub fn truncate(&self, t: T) -> Result<Self, ZeroError> {
        if t > self.t_max {
            return Err(ZeroError::Horizon {
                t: t.as_f64(),
                t_max: self.t_max.as_f64(),
            });
        }
        let mut out = self.clone();
        out.ordinates.retain(|&g| g <= t);
        out.t_max = t;
        Ok(out)
    }

    /// File text: metadata header, then one ordinate per line with 17
    /// significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# character: {}", self.character);
        let _ = writeln!(s, "# T_max: {:.16e}", self.t_max.as_f64());
        if let Some(l) = self.log_conductor {
            let _ = writeln!(s, "# log_conductor: {:.16e}", l.as_f64());
        }
        if let Some(d) = self.degree {
            let _ = writeln!(s, "# degree: {d}");
        }
        for g in &self.ordinates {
            let _ = writeln!(s, "{:.16e}", g.as_f64());
        }
        s
    }

    /// Parses the text written by [`ZeroSet::to_text`]. Unknown `#` lines are
    /// ignored; without a `T_max` header the largest ordinate is used.
    pub fn from_text(text: &str) -> Result<Self, ZeroError> {
        let mut character = String::new();
        let mut t_max: Option<f64> = None;
        let mut log_conductor = None;
        let mut degree = None;
        let mut ordinates: Vec<T> = Vec::new();
        let mut previous = 0.0f64;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() {
                continue;
            }
            if let Some(meta) = body.strip_prefix('#') {
                if let Some((key, value)) = meta.split_once(':') {
                    let value = value.trim();
                    let num = || {
                        value.parse::<f64>().map_err(|e| ZeroError::Parse {
                            line,
                            msg: format!("{}: {e}", key.trim()),
                        })
                    };
                    match key.trim() {
                        "character" => character = value.to_string(),
                        "T_max" => t_max = Some(num()?),
                        "log_conductor" => log_conductor = Some(T::lit(num()?)),
                        "degree" => {
                            degree = Some(value.parse::<u32>().map_err(|e| ZeroError::Parse {
                                line,
                                msg: format!("degree: {e}"),
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let g: f64 = body.parse().map_err(|e| ZeroError::Parse {
                line,
                msg: format!("{body:?}: {e}"),
            })?;
            if !(g > 0.0) || !g.is_finite() {
                return Err(ZeroError::Parse {
                    line,
                    msg: format!("ordinate {body} is not a positive number"),
                });
            }
            if g <= previous {
                return Err(ZeroError::NotIncreasing {
                    line,
                    value: g,
                    previous,
                });
            }
            previous = g;
            ordinates.push(T::lit(g));
        }
        let t_max = T::lit(t_max.unwrap_or(previous));
        let mut zs = ZeroSet::new(character, ordinates, t_max)?;
        zs.log_conductor = log_conductor;
        zs.degree = degree;
        Ok(zs)
    }

    pub fn load(path: &Path) -> Result<Self, ZeroError> {
        let mut zs = Self::from_text(&std::fs::read_to_string(path)?)?;
        zs.source = ZeroSource::File(path.display().to_string());
        Ok(zs)
    }

    pub fn save(&self, path: &Path) -> Result<(), ZeroError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn validate<T: Real>(ordinates: &[T], t_max: T) -> Result<(), ZeroError> {
    let mut previous = T::zero();
    for (idx, &g) in ordinates.iter().enumerate() {
        if !(g > T::zero()) {
            return Err(ZeroError::NotPositive { value: g.as_f64() });
        }
        if idx > 0 && g <= previous {
            return Err(ZeroError::NotIncreasing {
                line: idx + 1,
                value: g.as_f64(),
                previous: previous.as_f64(),
            });
        }
        previous = g;
    }
    if previous > t_max {
        return Err(ZeroError::BeyondHorizon {
            value: previous.as_f64(),
            t_max: t_max.as_f64(),
        });
    }
    Ok(())
}
