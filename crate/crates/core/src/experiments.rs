//! Named, seeded experiments composing the race and density engines, with
//! JSON and CSV reports.

use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    horizontal_scenario, scenario_generator, ArithError, ArithmeticScenario, ScalingRegime,
};
use crate::bounds::{bound_report, BoundConstants, BoundReport};
use crate::characters::{sr_partition, CharacterTable};
use crate::density::{
    density_fourier, density_montecarlo, density_montecarlo_multi, DensityEstimate, FourierConfig,
};
use crate::group::{ClassLabel, Element, Family, Group, GroupError, GroupKind};
use crate::race::{
    mean, mean_table, squared_weights, term_list, weights, MeanRow, RaceError, RaceSpec, RowStatus,
};
use crate::reference::{
    expected_behaviour, h8_mean_reference, h8_variance_reference, horizontal_side,
    monotonicity_claim, qualifying_pairs, Behaviour, LevelOrdering,
};
use crate::zeros::{ZeroCountModel, ZeroError, ZeroSet};

/// `|B|` at or above which a finite-`n` race is labelled extreme.
pub const EXTREME_BIAS: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Race(#[from] RaceError),
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("output error: {0}")]
    Output(String),
}

impl ExperimentError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Group(_) | ExperimentError::Zero(_) => 2,
            ExperimentError::Arith(
                ArithError::Parse { .. } | ArithError::Io(_) | ArithError::BadParameter(_),
            ) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    H8Table,
    EspQ,
    EspD,
    Horizontal,
    TabD,
    TabQ,
    Monotonicity,
    Race,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ZeroSourceConfig {
    /// sampled from the counting main term
    Synthetic { t_max: f64 },
    /// one file per character, `<dir>/<id>.txt` (e.g. `psi_3.txt`)
    Files { dir: PathBuf },
}

impl Default for ZeroSourceConfig {
    fn default() -> Self {
        ZeroSourceConfig::Synthetic { t_max: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Methods {
    pub montecarlo: bool,
    pub fourier: bool,
}

impl Default for Methods {
    fn default() -> Self {
        Methods {
            montecarlo: true,
            fourier: true,
        }
    }
}

fn default_w() -> i8 {
    1
}
fn default_seed() -> u64 {
    1
}
fn default_samples() -> u64 {
    100_000
}
fn default_f_values() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 4.0]
}
fn default_epsilon() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default)]
    pub family: Option<Family>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default = "default_w")]
    pub w: i8,
    #[serde(default)]
    pub level: Option<u32>,
    /// class pairs such as `["1", "-1"]` or `["x^3", "xy"]`
    #[serde(default)]
    pub pairs: Vec<(String, String)>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub fourier: FourierConfig,
    #[serde(default)]
    pub methods: Methods,
    #[serde(default)]
    pub zeros: ZeroSourceConfig,
    #[serde(default = "default_f_values")]
    pub f_values: Vec<f64>,
    #[serde(default)]
    pub d_index: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub constants: BoundConstants,
    #[serde(default)]
    pub scaling: ScalingRegime,
    /// explicit scenario file, used instead of the generator when present
    #[serde(default)]
    pub scenario: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        ExperimentConfig {
            experiment,
            family: None,
            n: None,
            w: 1,
            level: None,
            pairs: Vec::new(),
            seed: default_seed(),
            samples: default_samples(),
            fourier: FourierConfig::default(),
            methods: Methods::default(),
            zeros: ZeroSourceConfig::default(),
            f_values: default_f_values(),
            d_index: 0,
            epsilon: default_epsilon(),
            constants: BoundConstants::default(),
            scaling: ScalingRegime::default(),
            scenario: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn kind(&self) -> Result<GroupKind, ExperimentError> {
        let family = match self.experiment {
            ExperimentId::H8Table | ExperimentId::Horizontal => {
                return Ok(GroupKind::new(Family::Quaternion, 3)?)
            }
            ExperimentId::EspQ | ExperimentId::TabQ => Family::Quaternion,
            ExperimentId::EspD | ExperimentId::TabD => Family::Dihedral,
            _ => self
                .family
                .ok_or_else(|| ExperimentError::Config("`family` is required".into()))?,
        };
        let n = self
            .n
            .ok_or_else(|| ExperimentError::Config("`n` is required".into()))?;
        Ok(GroupKind::new(family, n)?)
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.w != 1 && self.w != -1 {
            return Err(ExperimentError::Config(format!(
                "W must be +1 or -1, got {}",
                self.w
            )));
        }
        let kind = self.kind()?;
        if let Some(i) = self.level {
            Group::new(kind)?.level(i)?;
        }
        if self.methods.montecarlo && self.samples < crate::density::MIN_SAMPLES {
            return Err(ExperimentError::Config(format!(
                "samples must be >= {}",
                crate::density::MIN_SAMPLES
            )));
        }
        if let Some(path) = &self.scenario {
            if !path.exists() {
                return Err(ExperimentError::Config(format!(
                    "scenario file {} does not exist",
                    path.display()
                )));
            }
        }
        match &self.zeros {
            ZeroSourceConfig::Synthetic { t_max } if !(*t_max >= 1.0) => {
                return Err(ExperimentError::Config(format!(
                    "synthetic t_max must be >= 1, got {t_max}"
                )))
            }
            ZeroSourceConfig::Files { dir } => {
                let group = Group::new(kind)?;
                for ch in CharacterTable::shared(&group).characters().iter().skip(1) {
                    let p = dir.join(format!("{}.txt", ch.id));
                    if !p.exists() {
                        return Err(ExperimentError::Config(format!(
                            "zero file {} does not exist",
                            p.display()
                        )));
                    }
                }
            }
            _ => {}
        }
        match self.experiment {
            ExperimentId::Horizontal if self.f_values.iter().any(|f| !(*f > 0.0)) => {
                Err(ExperimentError::Config("f values must be positive".into()))
            }
            ExperimentId::Race if self.pairs.is_empty() => {
                Err(ExperimentError::Config("`pairs` is required".into()))
            }
            _ => {
                let lvl = Group::new(kind)?.level(self.level.unwrap_or(kind.n))?;
                for (a, b) in &self.pairs {
                    parse_class(lvl.group(), a)?;
                    parse_class(lvl.group(), b)?;
                }
                Ok(())
            }
        }
    }
}

/// Parses a class of `group` from a label or any element of the class.
pub fn parse_class(group: &Group, s: &str) -> Result<ClassLabel, ExperimentError> {
    let t = s.trim();
    let t = t
        .strip_prefix("C_")
        .or_else(|| t.strip_prefix('C'))
        .unwrap_or(t);
    let c = match t {
        "1" => ClassLabel::One,
        "-1" => ClassLabel::MinusOne,
        _ => {
            let e = Element::parse(t).map_err(|e| ExperimentError::Config(e.to_string()))?;
            group.class_of(group.element(e.exponent as i64, e.flip))
        }
    };
    Ok(c)
}

/// Deterministic sub-seed for `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index + 1);
    rng.next_u64()
}

/// Zero sets for the full-group characters flagged in `needed`.
pub fn zero_bank(
    scenario: &ArithmeticScenario,
    source: &ZeroSourceConfig,
    seed: u64,
    needed: &[bool],
) -> Result<Vec<Option<ZeroSet<f64>>>, ExperimentError> {
    let conductors = scenario.conductors();
    conductors
        .par_iter()
        .enumerate()
        .map(|(k, c)| {
            if !needed.get(k).copied().unwrap_or(false) {
                return Ok(None);
            }
            let zs = match source {
                ZeroSourceConfig::Synthetic { t_max } => ZeroCountModel::new(
                    c.log_conductor,
                    c.degree,
                )?
                .sample(*t_max, derive_seed(seed, k as u64), c.id.to_string())?,
                ZeroSourceConfig::Files { dir } => {
                    ZeroSet::load(&dir.join(format!("{}.txt", c.id)))?
                }
            };
            Ok(Some(zs))
        })
        .collect()
}

fn weighted_characters(specs: &[RaceSpec], count: usize) -> Result<Vec<bool>, RaceError> {
    let mut needed = vec![false; count];
    for s in specs {
        if !s.is_defined() {
            continue;
        }
        for (k, w) in weights(s)?.iter().enumerate() {
            needed[k] |= !w.is_zero;
        }
    }
    Ok(needed)
}

/// Finite-`n` label of a computed race.
pub fn classify(mean: i64, bias: f64) -> Behaviour {
    use Behaviour::*;
    match (mean.signum(), bias.abs() >= EXTREME_BIAS) {
        (0, _) => ExactlyHalf,
        (-1, true) => ExtremeTowardZero,
        (-1, false) => ModerateBelowHalf,
        (_, true) => ExtremeTowardOne,
        (_, false) => ModerateAboveHalf,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceOutcome {
    pub family: Family,
    pub n: u32,
    pub level: u32,
    pub w: i8,
    pub c1: String,
    pub c2: String,
    pub defined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub mean_formula: Option<i64>,
    pub mean_reference: Option<i64>,
    pub mean_status: RowStatus,
    pub variance: Option<f64>,
    pub bias_factor: Option<f64>,
    pub terms: usize,
    pub delta_mc: Option<DensityEstimate>,
    pub delta_fourier: Option<DensityEstimate>,
    pub bounds: Option<BoundReport>,
    pub expected: Option<Behaviour>,
    pub observed: Option<Behaviour>,
    /// `None` when nothing is claimed for the row
    pub agrees: Option<bool>,
    /// the density estimates lie on the side given by the sign of the mean
    pub delta_consistent: Option<bool>,
}

pub struct RaceContext<'a> {
    pub zero_sets: &'a [Option<ZeroSet<f64>>],
    pub methods: Methods,
    pub samples: u64,
    pub seed: u64,
    pub fourier: FourierConfig,
    pub constants: BoundConstants,
    pub w: i8,
    pub with_expectation: bool,
}

/// Mean, variance, densities and bounds for one race.
pub fn evaluate_race(spec: &RaceSpec, ctx: &RaceContext) -> Result<RaceOutcome, ExperimentError> {
    let lvl = spec.subgroup()?;
    let sub = lvl.group();
    let reference = crate::reference::mean_reference(
        spec.kind,
        spec.level,
        ctx.w,
        spec.symplectic_order,
        spec.c1,
        spec.c2,
    );
    let mut out = RaceOutcome {
        family: spec.kind.family,
        n: spec.kind.n,
        level: spec.level,
        w: ctx.w,
        c1: sub.class_name(spec.c1),
        c2: sub.class_name(spec.c2),
        defined: true,
        note: None,
        mean_formula: None,
        mean_reference: reference,
        mean_status: RowStatus::Undefined,
        variance: None,
        bias_factor: None,
        terms: 0,
        delta_mc: None,
        delta_fourier: None,
        bounds: None,
        expected: None,
        observed: None,
        agrees: None,
        delta_consistent: None,
    };
    if ctx.with_expectation && spec.level == spec.kind.n {
        out.expected =
            expected_behaviour(spec.kind.family, ctx.w, spec.c1, spec.c2).map(|(b, _)| b);
    }
    let m = match mean(spec) {
        Ok(m) => m,
        Err(e @ RaceError::Undefined { .. }) => {
            out.defined = false;
            out.note = Some(e.to_string());
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    out.mean_formula = Some(m);
    out.mean_status = match reference {
        None => RowStatus::NoReference,
        Some(r) if r == m => RowStatus::Match,
        Some(_) => RowStatus::OpenQuestion,
    };
    let sets: Vec<Option<&ZeroSet<f64>>> = ctx.zero_sets.iter().map(|z| z.as_ref()).collect();
    let model = term_list(spec, &sets)?;
    out.terms = model.terms.len();
    out.variance = Some(model.variance);
    out.bias_factor = Some(model.bias_factor);
    let observed = classify(m, model.bias_factor);
    out.observed = Some(observed);
    if let Some(e) = out.expected {
        out.agrees = match (e.side(), observed.side()) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        };
    }
    if !model.terms.is_empty() {
        if ctx.methods.montecarlo {
            out.delta_mc = Some(
                density_montecarlo(&model, ctx.samples, ctx.seed)
                    .map_err(|e| ExperimentError::Config(e.to_string()))?,
            );
        }
        if ctx.methods.fourier {
            out.delta_fourier = Some(
                density_fourier(&model, &ctx.fourier)
                    .map_err(|e| ExperimentError::Config(e.to_string()))?,
            );
        }
        let sr = sr_partition(&lvl).map_err(RaceError::from)?;
        let oriented = if model.bias_factor < 0.0 {
            spec.swapped()
        } else {
            spec.clone()
        };
        let oriented_model = if model.bias_factor < 0.0 {
            model.with_mean(-m)
        } else {
            model.clone()
        };
        out.bounds = Some(bound_report(
            &oriented,
            &oriented_model,
            &sr,
            &ctx.constants,
        ));
    }
    let side = m.signum() as f64;
    let consistent = |d: &DensityEstimate| {
        if side == 0.0 {
            (d.value - 0.5).abs() <= d.error_bound + 1e-12
        } else {
            (d.value - 0.5) * side > -d.error_bound
        }
    };
    let checks: Vec<bool> = out
        .delta_mc
        .iter()
        .chain(out.delta_fourier.iter())
        .map(consistent)
        .collect();
    if !checks.is_empty() {
        out.delta_consistent = Some(checks.iter().all(|&c| c));
    }
    Ok(out)
}

fn scenario_for(
    cfg: &ExperimentConfig,
    kind: GroupKind,
) -> Result<ArithmeticScenario, ExperimentError> {
    match &cfg.scenario {
        Some(path) => {
            let s = ArithmeticScenario::load(path)?;
            if s.kind != kind {
                return Err(ExperimentError::Config(format!(
                    "scenario is {:?}, config asks for {:?}",
                    s.kind, kind
                )));
            }
            Ok(s)
        }
        None => Ok(scenario_generator(
            kind.family,
            kind.n,
            cfg.w,
            cfg.seed,
            cfg.scaling,
        )?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceReport {
    pub scenario_log_disc: f64,
    pub races: Vec<RaceOutcome>,
}

/// Ad hoc races at one level of one scenario. Undefined pairs are reported,
/// not raised.
pub fn run_race(cfg: &ExperimentConfig) -> Result<RaceReport, ExperimentError> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let level = cfg.level.unwrap_or(kind.n);
    let scenario = scenario_for(cfg, kind)?;
    let group = Group::new(kind)?;
    let lvl = group.level(level)?;
    let specs = cfg
        .pairs
        .iter()
        .map(|(a, b)| {
            let (c1, c2) = (parse_class(lvl.group(), a)?, parse_class(lvl.group(), b)?);
            Ok(RaceSpec::from_scenario(&scenario, level, c1, c2)?)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let needed = weighted_characters(&specs, group.class_count())?;
    let bank = zero_bank(&scenario, &cfg.zeros, cfg.seed, &needed)?;
    let races = specs
        .par_iter()
        .enumerate()
        .map(|(k, spec)| {
            let ctx = RaceContext {
                zero_sets: &bank,
                methods: cfg.methods,
                samples: cfg.samples,
                seed: derive_seed(cfg.seed, 1000 + k as u64),
                fourier: cfg.fourier,
                constants: cfg.constants,
                w: scenario.w,
                with_expectation: true,
            };
            evaluate_race(spec, &ctx)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RaceReport {
        scenario_log_disc: scenario.log_disc,
        races,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H8Row {
    pub o: u32,
    pub c1: String,
    pub c2: String,
    pub mean_formula: i64,
    pub mean_reference: Option<i64>,
    /// coefficients of `B0(λ)` summed over all nonzero ordinates
    pub variance_formula: Vec<(String, i64)>,
    pub variance_reference: Option<Vec<(String, i64)>>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub id: ExperimentId,
    pub n: u32,
    pub level: u32,
    pub w: i8,
    pub rows: Vec<MeanRow>,
    pub h8_rows: Vec<H8Row>,
    /// failures of internal identities; empty when the engine is consistent
    pub inconsistencies: Vec<String>,
}

impl TableReport {
    pub fn open_questions(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::OpenQuestion)
            .count()
            + self
                .h8_rows
                .iter()
                .filter(|r| r.status == RowStatus::OpenQuestion)
                .count()
    }
}

/// Mean (and for `H_8`, variance) tables next to the printed closed forms.
pub fn reproduce_table(
    id: ExperimentId,
    n: u32,
    level: u32,
    w: i8,
) -> Result<TableReport, ExperimentError> {
    let family = match id {
        ExperimentId::EspQ | ExperimentId::H8Table => Family::Quaternion,
        ExperimentId::EspD => Family::Dihedral,
        other => return Err(ExperimentError::Config(format!("{other:?} is not a table"))),
    };
    let (n, level) = if id == ExperimentId::H8Table {
        (3, 3)
    } else {
        (n, level)
    };
    let kind = GroupKind::new(family, n)?;
    let mut report = TableReport {
        id,
        n,
        level,
        w,
        rows: Vec::new(),
        h8_rows: Vec::new(),
        inconsistencies: Vec::new(),
    };
    if id == ExperimentId::H8Table {
        let group = Group::new(kind)?;
        let classes = group.classes();
        for o in [0u32, 1] {
            for (a, &c1) in classes.iter().enumerate() {
                for &c2 in &classes[a + 1..] {
                    let spec = RaceSpec::new(kind, 3, c1, c2, o)?;
                    let m = mean(&spec)?;
                    let reference = h8_mean_reference(o, c1, c2);
                    let var: Vec<(String, i64)> = squared_weights(&spec)?
                        .into_iter()
                        .filter(|(_, c)| *c != 0)
                        .map(|(id, c)| (id.to_string(), c))
                        .collect();
                    let var_ref = h8_variance_reference(c1, c2).map(|v| {
                        v.into_iter()
                            .map(|(id, c)| (id.to_string(), c))
                            .collect::<Vec<_>>()
                    });
                    let status = if reference == Some(m) && var_ref.as_ref() == Some(&var) {
                        RowStatus::Match
                    } else if reference.is_none() {
                        RowStatus::NoReference
                    } else {
                        RowStatus::OpenQuestion
                    };
                    report.h8_rows.push(H8Row {
                        o,
                        c1: group.class_name(c1),
                        c2: group.class_name(c2),
                        mean_formula: m,
                        mean_reference: reference,
                        variance_formula: var,
                        variance_reference: var_ref,
                        status,
                    });
                }
            }
        }
    } else {
        report.rows = mean_table(kind, level, w, None)?;
    }
    // antisymmetry of the mean is an identity of the engine
    let o = crate::arith::order_from_root_number(w);
    let lvl = Group::new(kind)?.level(level)?;
    for r in &report.rows {
        if let Some(m) = r.mean_formula {
            let back = mean(&RaceSpec::new(kind, level, r.c2, r.c1, o)?)?;
            if back != -m {
                report.inconsistencies.push(format!(
                    "mean({}, {}) = {m} but reversed gives {back}",
                    r.c1_name, r.c2_name
                ));
            }
        } else if lvl.fuse(r.c1) != lvl.fuse(r.c2) {
            report.inconsistencies.push(format!(
                "{} / {} marked undefined without fusing",
                r.c1_name, r.c2_name
            ));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizontalRow {
    pub f: f64,
    pub log_conductor_psi: f64,
    pub mean: i64,
    pub variance: f64,
    pub bias_factor: f64,
    pub delta_mc: Option<DensityEstimate>,
    pub delta_fourier: Option<DensityEstimate>,
    pub side_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizontalReport {
    pub w: i8,
    pub d: u64,
    pub rows: Vec<HorizontalRow>,
    /// every `δ - 1/2` has the sign predicted by `W`
    pub sides_ok: bool,
    /// `|δ - 1/2|` strictly decreases along the `f` values (point estimates,
    /// Monte Carlo when available)
    pub decreasing: bool,
    /// no consecutive pair is CI-separated in the wrong direction
    pub decreasing_within_ci: bool,
}

fn best(mc: &Option<DensityEstimate>, fo: &Option<DensityEstimate>) -> Option<DensityEstimate> {
    mc.clone().or_else(|| fo.clone())
}

/// `δ(C1, C-1)` in `H_8` fields whose second ramified prime exceeds `e^{f³}`.
pub fn horizontal_experiment(cfg: &ExperimentConfig) -> Result<HorizontalReport, ExperimentError> {
    let mut f_values = cfg.f_values.clone();
    if f_values.iter().any(|f| !(*f > 0.0)) || f_values.windows(2).any(|p| p[0] >= p[1]) {
        return Err(ExperimentError::Config(
            "f values must be positive and increasing".into(),
        ));
    }
    f_values.dedup();
    let rows = f_values
        .par_iter()
        .map(|&f| {
            let scenario = horizontal_scenario(cfg.d_index, f, cfg.w)?;
            let spec =
                RaceSpec::from_scenario(&scenario, 3, ClassLabel::One, ClassLabel::MinusOne)?;
            let needed = weighted_characters(std::slice::from_ref(&spec), 5)?;
            let bank = zero_bank(&scenario, &cfg.zeros, cfg.seed, &needed)?;
            let ctx = RaceContext {
                zero_sets: &bank,
                methods: cfg.methods,
                samples: cfg.samples,
                seed: derive_seed(cfg.seed, 7),
                fourier: cfg.fourier,
                constants: cfg.constants,
                w: cfg.w,
                with_expectation: false,
            };
            let out = evaluate_race(&spec, &ctx)?;
            let psi = scenario.conductors()[4].log_conductor;
            let est = best(&out.delta_mc, &out.delta_fourier);
            let side_ok = est
                .as_ref()
                .is_some_and(|d| ((d.value - 0.5).signum() as i8) == horizontal_side(cfg.w));
            Ok(HorizontalRow {
                f,
                log_conductor_psi: psi,
                mean: out.mean_formula.unwrap_or(0),
                variance: out.variance.unwrap_or(0.0),
                bias_factor: out.bias_factor.unwrap_or(0.0),
                delta_mc: out.delta_mc,
                delta_fourier: out.delta_fourier,
                side_ok,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let dev = |r: &HorizontalRow| {
        best(&r.delta_mc, &r.delta_fourier).map(|d| ((d.value - 0.5).abs(), d.error_bound))
    };
    let devs: Vec<_> = rows.iter().filter_map(dev).collect();
    let decreasing = devs.len() == rows.len() && devs.windows(2).all(|p| p[1].0 < p[0].0);
    let decreasing_within_ci = devs.windows(2).all(|p| p[1].0 - p[1].1 <= p[0].0 + p[0].1);
    Ok(HorizontalReport {
        w: cfg.w,
        d: crate::arith::horizontal_d(cfg.d_index),
        sides_ok: rows.iter().all(|r| r.side_ok),
        rows,
        decreasing,
        decreasing_within_ci,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerReport {
    pub family: Family,
    pub n: u32,
    pub w: i8,
    pub log_disc: f64,
    pub races: Vec<RaceOutcome>,
    pub checked: usize,
    pub agreed: usize,
    pub undetermined: usize,
}

/// Every class pair of the top level, classified and compared with the
/// declared behaviour table.
pub fn tower_experiment(cfg: &ExperimentConfig) -> Result<TowerReport, ExperimentError> {
    let kind = cfg.kind()?;
    if kind.n > 12 {
        return Err(ExperimentError::Config(format!(
            "tower experiments support n <= 12, got {}",
            kind.n
        )));
    }
    let scenario = scenario_for(cfg, kind)?;
    let group = Group::new(kind)?;
    let classes = group.classes();
    let mut specs = Vec::new();
    for (a, &c1) in classes.iter().enumerate() {
        for &c2 in &classes[a + 1..] {
            specs.push(RaceSpec::from_scenario(&scenario, kind.n, c1, c2)?);
        }
    }
    let needed = weighted_characters(&specs, group.class_count())?;
    let bank = zero_bank(&scenario, &cfg.zeros, cfg.seed, &needed)?;
    let races = specs
        .par_iter()
        .enumerate()
        .map(|(k, spec)| {
            let ctx = RaceContext {
                zero_sets: &bank,
                methods: cfg.methods,
                samples: cfg.samples,
                seed: derive_seed(cfg.seed, 1000 + k as u64),
                fourier: cfg.fourier,
                constants: cfg.constants,
                w: scenario.w,
                with_expectation: true,
            };
            evaluate_race(spec, &ctx)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let checked = races.iter().filter(|r| r.agrees.is_some()).count();
    let agreed = races.iter().filter(|r| r.agrees == Some(true)).count();
    let undetermined = races
        .iter()
        .filter(|r| r.expected == Some(Behaviour::Undetermined))
        .count();
    Ok(TowerReport {
        family: kind.family,
        n: kind.n,
        w: scenario.w,
        log_disc: scenario.log_disc,
        races,
        checked,
        agreed,
        undetermined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: u32,
    pub mean: i64,
    pub variance: f64,
    pub bias_factor: f64,
    pub delta_mc: Option<DensityEstimate>,
    pub delta_fourier: Option<DensityEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairVerdict {
    Holds,
    Violated,
    /// the two intervals overlap
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub family: Family,
    pub n: u32,
    pub w: i8,
    pub epsilon: f64,
    pub claim: LevelOrdering,
    pub levels: Vec<LevelRow>,
    pub pairs: Vec<(u32, u32, PairVerdict)>,
    pub verdict: Verdict,
}

/// `δ(C1^{(i)}, C-1^{(i)})` at every level from one zero bank, compared
/// with the published ordering over the qualifying level pairs.
pub fn monotonicity_experiment(
    cfg: &ExperimentConfig,
) -> Result<MonotonicityReport, ExperimentError> {
    let kind = cfg.kind()?;
    let scenario = scenario_for(cfg, kind)?;
    let group = Group::new(kind)?;
    let specs = (3..=kind.n)
        .map(|i| RaceSpec::from_scenario(&scenario, i, ClassLabel::One, ClassLabel::MinusOne))
        .collect::<Result<Vec<_>, _>>()?;
    let needed = weighted_characters(&specs, group.class_count())?;
    let bank = zero_bank(&scenario, &cfg.zeros, cfg.seed, &needed)?;
    let sets: Vec<Option<&ZeroSet<f64>>> = bank.iter().map(|z| z.as_ref()).collect();
    let models = specs
        .iter()
        .map(|s| term_list(s, &sets))
        .collect::<Result<Vec<_>, _>>()?;
    // levels with identical amplitudes share one set of draws
    let mut mc: Vec<Option<DensityEstimate>> = vec![None; models.len()];
    if cfg.methods.montecarlo {
        let mut done = vec![false; models.len()];
        for a in 0..models.len() {
            if done[a] {
                continue;
            }
            let group_idx: Vec<usize> = (a..models.len())
                .filter(|&b| !done[b] && models[b].terms == models[a].terms)
                .collect();
            let means: Vec<f64> = group_idx.iter().map(|&b| models[b].mean as f64).collect();
            let est = density_montecarlo_multi(
                &models[a].terms,
                &means,
                cfg.samples,
                derive_seed(cfg.seed, 500 + a as u64),
            )
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
            for (&b, e) in group_idx.iter().zip(est) {
                mc[b] = Some(e);
                done[b] = true;
            }
        }
    }
    let fourier: Vec<Option<DensityEstimate>> = models
        .par_iter()
        .map(|m| {
            if cfg.methods.fourier {
                density_fourier(m, &cfg.fourier).ok()
            } else {
                None
            }
        })
        .collect();
    let levels: Vec<LevelRow> = specs
        .iter()
        .zip(&models)
        .zip(mc.into_iter().zip(fourier))
        .map(|((s, m), (dmc, dfo))| LevelRow {
            level: s.level,
            mean: m.mean,
            variance: m.variance,
            bias_factor: m.bias_factor,
            delta_mc: dmc,
            delta_fourier: dfo,
        })
        .collect();
    let claim = monotonicity_claim(kind.family, scenario.w);
    let est = |i: u32| {
        best(
            &levels[(i - 3) as usize].delta_mc,
            &levels[(i - 3) as usize].delta_fourier,
        )
    };
    let pairs: Vec<(u32, u32, PairVerdict)> = qualifying_pairs(kind.n, cfg.epsilon)
        .into_iter()
        .map(|(i, j)| {
            let (di, dj) = (est(i), est(j));
            let v = match (di, dj) {
                (Some(di), Some(dj)) => {
                    // orient so that the claim reads "low < high"
                    let (low, high) = match claim {
                        LevelOrdering::Decreasing => (dj, di),
                        LevelOrdering::Increasing => (di, dj),
                    };
                    if low.value + low.error_bound < high.value - high.error_bound {
                        PairVerdict::Holds
                    } else if low.value - low.error_bound > high.value + high.error_bound {
                        PairVerdict::Violated
                    } else {
                        PairVerdict::Inconclusive
                    }
                }
                _ => PairVerdict::Inconclusive,
            };
            (i, j, v)
        })
        .collect();
    let verdict = if pairs.is_empty() {
        Verdict::Vacuous
    } else if pairs.iter().all(|p| p.2 == PairVerdict::Holds) {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(MonotonicityReport {
        family: kind.family,
        n: kind.n,
        w: scenario.w,
        epsilon: cfg.epsilon,
        claim,
        levels,
        pairs,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
pub enum ExperimentReport {
    Table(TableReport),
    Race(RaceReport),
    Horizontal(HorizontalReport),
    Tower(TowerReport),
    Monotonicity(MonotonicityReport),
}

/// Dispatches on the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        id @ (ExperimentId::H8Table | ExperimentId::EspQ | ExperimentId::EspD) => {
            let kind = cfg.kind()?;
            let report = reproduce_table(id, kind.n, cfg.level.unwrap_or(kind.n), cfg.w)?;
            if !report.inconsistencies.is_empty() {
                return Err(ExperimentError::Inconsistent(
                    report.inconsistencies.join("; "),
                ));
            }
            ExperimentReport::Table(report)
        }
        ExperimentId::Race => ExperimentReport::Race(run_race(cfg)?),
        ExperimentId::Horizontal => ExperimentReport::Horizontal(horizontal_experiment(cfg)?),
        ExperimentId::TabD | ExperimentId::TabQ => ExperimentReport::Tower(tower_experiment(cfg)?),
        ExperimentId::Monotonicity => ExperimentReport::Monotonicity(monotonicity_experiment(cfg)?),
    })
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Flat CSV: table rows, race rows, or `(x, y)` series for sweeps.
    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| ExperimentError::Output(e.to_string());
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_default();
        let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
        match self {
            ExperimentReport::Table(t) if !t.h8_rows.is_empty() => {
                w.write_record([
                    "o",
                    "C1",
                    "C2",
                    "mean_formula",
                    "mean_reference",
                    "variance_formula",
                    "variance_reference",
                    "status",
                ])
                .map_err(err)?;
                for r in &t.h8_rows {
                    let v = |x: &[(String, i64)]| {
                        x.iter()
                            .map(|(c, k)| format!("{k}*B0({c})"))
                            .collect::<Vec<_>>()
                            .join(" + ")
                    };
                    w.write_record([
                        r.o.to_string(),
                        r.c1.clone(),
                        r.c2.clone(),
                        r.mean_formula.to_string(),
                        opt(r.mean_reference),
                        v(&r.variance_formula),
                        r.variance_reference.as_deref().map(v).unwrap_or_default(),
                        status_name(r.status).into(),
                    ])
                    .map_err(err)?;
                }
            }
            ExperimentReport::Table(t) => {
                w.write_record([
                    "C1",
                    "C2",
                    "mean_formula",
                    "mean_reference",
                    "variance",
                    "status",
                ])
                .map_err(err)?;
                for r in &t.rows {
                    let v = r
                        .variance_coefficients
                        .iter()
                        .map(|(c, k)| format!("{k}*B0({c})"))
                        .collect::<Vec<_>>()
                        .join(" + ");
                    w.write_record([
                        r.c1_name.clone(),
                        r.c2_name.clone(),
                        opt(r.mean_formula),
                        opt(r.mean_reference),
                        v,
                        status_name(r.status).into(),
                    ])
                    .map_err(err)?;
                }
            }
            ExperimentReport::Race(RaceReport { races, .. })
            | ExperimentReport::Tower(TowerReport { races, .. }) => {
                w.write_record([
                    "level",
                    "C1",
                    "C2",
                    "mean_formula",
                    "mean_reference",
                    "variance",
                    "bias_factor",
                    "delta_mc",
                    "ci_mc",
                    "delta_fourier",
                    "err_fourier",
                    "expected",
                    "observed",
                    "agrees",
                ])
                .map_err(err)?;
                for r in races {
                    w.write_record([
                        r.level.to_string(),
                        r.c1.clone(),
                        r.c2.clone(),
                        opt(r.mean_formula),
                        opt(r.mean_reference),
                        fmt(r.variance),
                        fmt(r.bias_factor),
                        fmt(r.delta_mc.as_ref().map(|d| d.value)),
                        fmt(r.delta_mc.as_ref().map(|d| d.error_bound)),
                        fmt(r.delta_fourier.as_ref().map(|d| d.value)),
                        fmt(r.delta_fourier.as_ref().map(|d| d.error_bound)),
                        r.expected.map(|b| format!("{b:?}")).unwrap_or_default(),
                        r.observed
                            .map(|b| format!("{b:?}"))
                            .unwrap_or_else(|| "undefined".into()),
                        r.agrees.map(|a| a.to_string()).unwrap_or_default(),
                    ])
                    .map_err(err)?;
                }
            }
            ExperimentReport::Horizontal(h) => {
                w.write_record([
                    "f",
                    "log_conductor_psi",
                    "mean",
                    "bias_factor",
                    "delta",
                    "error",
                ])
                .map_err(err)?;
                for r in &h.rows {
                    let d = best(&r.delta_mc, &r.delta_fourier);
                    w.write_record([
                        r.f.to_string(),
                        format!("{:.10}", r.log_conductor_psi),
                        r.mean.to_string(),
                        format!("{:.10}", r.bias_factor),
                        fmt(d.as_ref().map(|d| d.value)),
                        fmt(d.as_ref().map(|d| d.error_bound)),
                    ])
                    .map_err(err)?;
                }
            }
            ExperimentReport::Monotonicity(m) => {
                w.write_record(["level", "mean", "bias_factor", "delta", "error"])
                    .map_err(err)?;
                for r in &m.levels {
                    let d = best(&r.delta_mc, &r.delta_fourier);
                    w.write_record([
                        r.level.to_string(),
                        r.mean.to_string(),
                        format!("{:.10}", r.bias_factor),
                        fmt(d.as_ref().map(|d| d.value)),
                        fmt(d.as_ref().map(|d| d.error_bound)),
                    ])
                    .map_err(err)?;
                }
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| ExperimentError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| ExperimentError::Output(e.to_string()))
    }
}

fn status_name(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Match => "match",
        RowStatus::OpenQuestion => "open-question",
        RowStatus::Undefined => "undefined",
        RowStatus::NoReference => "no-reference",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCheck {
    pub character: String,
    pub count: usize,
    pub t_max: f64,
    pub b0_one_sided: f64,
    /// present when a counting model was supplied
    pub expected_count: Option<f64>,
    pub count_tolerance: Option<f64>,
    pub partial_sum: Option<f64>,
    pub partial_sum_main_term: Option<f64>,
    pub partial_sum_tolerance: Option<f64>,
    pub ok: bool,
}

/// Sanity check of a loaded zero set, optionally against the counting main
/// term for `(log A, degree)`.
pub fn check_zero_set(
    zs: &ZeroSet<f64>,
    model: Option<&ZeroCountModel<f64>>,
) -> Result<ZeroCheck, ExperimentError> {
    let t = zs.t_max();
    let mut out = ZeroCheck {
        character: zs.character.clone(),
        count: zs.len(),
        t_max: t,
        b0_one_sided: zs.b0(crate::zeros::Convention::OneSided),
        expected_count: None,
        count_tolerance: None,
        partial_sum: None,
        partial_sum_main_term: None,
        partial_sum_tolerance: None,
        ok: true,
    };
    if let Some(m) = model {
        let expected = m.expected_count(t);
        let tol = m.count_tolerance(t);
        let ps = zs.partial_inverse_sum(t)?;
        let main = m.partial_sum_main_term(t);
        let ps_tol = m.partial_sum_tolerance(t);
        out.ok = (zs.len() as f64 - expected).abs() <= tol && (ps - main).abs() <= ps_tol;
        out.expected_count = Some(expected);
        out.count_tolerance = Some(tol);
        out.partial_sum = Some(ps);
        out.partial_sum_main_term = Some(main);
        out.partial_sum_tolerance = Some(ps_tol);
    }
    Ok(out)
}

/// Smallest and largest bias factor admitted in sandwich races.
pub const SANDWICH_BIAS: (f64, f64) = (1.0, 3.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub family: Family,
    pub n: u32,
    pub level: u32,
    pub scenario_seed: u64,
    pub c1: String,
    pub c2: String,
    pub bias: f64,
    pub q: f64,
    /// Monte Carlo `1 - δ`
    pub tail: f64,
    pub tail_ci: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SandwichRow {
    pub fn inside(&self) -> bool {
        self.lower <= self.tail && self.tail <= self.upper
    }
}

/// `count` races from synthetic towers (`n = 4..6`, both families, both
/// root numbers, all levels) oriented so that `B > 0`, with
/// `1 < B <= 3`, at most `per_scenario` from each scenario.
pub fn sandwich_races(
    master_seed: u64,
    count: usize,
    per_scenario: usize,
    samples: u64,
    constants: &BoundConstants,
) -> Result<Vec<SandwichRow>, ExperimentError> {
    let shapes: Vec<(Family, u32, i8)> = [Family::Dihedral, Family::Quaternion]
        .into_iter()
        .flat_map(|f| [4u32, 5, 6].into_iter().map(move |n| (f, n)))
        .flat_map(|(f, n)| {
            if f == Family::Dihedral {
                vec![(f, n, 1)]
            } else {
                vec![(f, n, 1), (f, n, -1)]
            }
        })
        .collect();
    let mut picked: Vec<(RaceSpec, u64, crate::race::RaceModel<f64>)> = Vec::new();
    let mut round = 0u64;
    while picked.len() < count && round < 200 {
        for (k, &(family, n, w)) in shapes.iter().enumerate() {
            if picked.len() >= count {
                break;
            }
            let seed = derive_seed(master_seed, round * shapes.len() as u64 + k as u64);
            let scenario = scenario_generator(family, n, w, seed, ScalingRegime::default())?;
            let group = scenario.group();
            let mut specs = Vec::new();
            for i in 3..=n {
                let sub = group.level(i)?;
                let classes = sub.group().classes();
                for (a, &c1) in classes.iter().enumerate() {
                    for &c2 in &classes[a + 1..] {
                        if let Ok(s) = RaceSpec::from_scenario(&scenario, i, c1, c2) {
                            if s.is_defined() && mean(&s)? != 0 {
                                specs.push(s);
                            }
                        }
                    }
                }
            }
            let needed = weighted_characters(&specs, group.class_count())?;
            let bank = zero_bank(&scenario, &ZeroSourceConfig::default(), seed, &needed)?;
            let sets: Vec<Option<&ZeroSet<f64>>> = bank.iter().map(|z| z.as_ref()).collect();
            let mut here = Vec::new();
            for s in specs {
                let model = term_list(&s, &sets)?;
                let (s, model) = if model.bias_factor < 0.0 {
                    (s.swapped(), model.with_mean(-model.mean))
                } else {
                    (s, model)
                };
                if model.bias_factor > SANDWICH_BIAS.0 && model.bias_factor <= SANDWICH_BIAS.1 {
                    here.push((s, seed, model));
                }
            }
            // spread the picks over the qualifying list
            let take = per_scenario.min(here.len());
            for k in 0..take {
                let idx = k * here.len() / take;
                if picked.len() < count {
                    picked.push(here[idx].clone());
                }
            }
        }
        round += 1;
    }
    picked
        .par_iter()
        .enumerate()
        .map(|(k, (spec, seed, model))| {
            let d = density_montecarlo(model, samples, derive_seed(master_seed ^ 0x5a5a, k as u64))
                .map_err(|e| ExperimentError::Config(e.to_string()))?;
            let lvl = spec.subgroup()?;
            let sr = sr_partition(&lvl).map_err(RaceError::from)?;
            let report = bound_report(spec, model, &sr, constants);
            let sub = lvl.group();
            Ok(SandwichRow {
                family: spec.kind.family,
                n: spec.kind.n,
                level: spec.level,
                scenario_seed: *seed,
                c1: sub.class_name(spec.c1),
                c2: sub.class_name(spec.c2),
                bias: model.bias_factor,
                q: report.q.as_ref().map(|q| q.q).unwrap_or(f64::NAN),
                tail: 1.0 - d.value,
                tail_ci: d.error_bound,
                lower: report.lower_one_minus_delta.value().unwrap_or(0.0),
                upper: report.upper_one_minus_delta.value().unwrap_or(1.0),
            })
        })
        .collect()
}
