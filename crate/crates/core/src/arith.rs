//! Ramification data, tame Artin conductors, discriminants, root-number axioms
//! and simulated arithmetic scenarios.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{
    character_ids, character_value, induce, mat_rank, mat_sub_identity, psi_matrix, CharError,
    CharacterId, CharacterTable, Cyclo, FsType,
};
use crate::group::{Element, Family, Group, GroupError, GroupKind, SubgroupLevel, MAX_N};

#[derive(Debug, Error)]
pub enum ArithError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime {0} listed twice")]
    DuplicatePrime(u64),
    #[error("inertia at {0} is trivial; the prime would be unramified")]
    TrivialInertia(String),
    #[error("inertia generated by {0:?} is not cyclic")]
    NonCyclic(Vec<Element>),
    #[error("element {0:?} is not in the group")]
    NotInGroup(Element),
    #[error("root number must be +1 or -1, got {0}")]
    BadRootNumber(i64),
    #[error("log discriminant {given} disagrees with the conductors ({computed})")]
    InconsistentDisc { given: f64, computed: f64 },
    #[error("invalid scenario parameter: {0}")]
    BadParameter(String),
    #[error("scenario line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: f64) -> u64 {
    let mut p = (x.floor() as u64 + 1).max(3);
    while !is_odd_prime(p) {
        p += 1;
    }
    p
}

/// Subgroup generated by `gens`, by closure.
pub fn generated_subgroup(group: &Group, gens: &[Element]) -> Vec<Element> {
    let mut elems = vec![Element::IDENTITY];
    let mut frontier = vec![Element::IDENTITY];
    while let Some(g) = frontier.pop() {
        for &h in gens {
            let p = group.multiply(g, h);
            if !elems.contains(&p) {
                elems.push(p);
                frontier.push(p);
            }
        }
    }
    elems.sort();
    elems
}

/// Reduces a generating set of an inertia group to a single generator.
/// Tame inertia is cyclic, so anything else is rejected.
pub fn cyclic_generator(group: &Group, gens: &[Element]) -> Result<Element, ArithError> {
    for &g in gens {
        if !group.contains(g) {
            return Err(ArithError::NotInGroup(g));
        }
    }
    let sub = generated_subgroup(group, gens);
    sub.iter()
        .copied()
        .find(|&g| group.element_order(g) == sub.len() as u64)
        .ok_or_else(|| ArithError::NonCyclic(gens.to_vec()))
}

/// A ramified prime. `p` is `None` for simulated primes known only by size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamifiedPrime {
    pub p: Option<u64>,
    pub log_p: f64,
    /// generator of the (cyclic) inertia group
    pub inertia: Element,
}

impl RamifiedPrime {
    pub fn label(&self) -> String {
        match self.p {
            Some(p) => p.to_string(),
            None => format!("~{:?}", self.log_p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamificationData {
    pub primes: Vec<RamifiedPrime>,
}

impl RamificationData {
    /// Explicit odd primes with inertia generators.
    pub fn explicit(group: &Group, primes: &[(u64, Element)]) -> Result<Self, ArithError> {
        let mut out = Vec::new();
        for &(p, g) in primes {
            if !is_odd_prime(p) {
                return Err(ArithError::NotOddPrime(p));
            }
            if out.iter().any(|q: &RamifiedPrime| q.p == Some(p)) {
                return Err(ArithError::DuplicatePrime(p));
            }
            out.push(RamifiedPrime {
                p: Some(p),
                log_p: (p as f64).ln(),
                inertia: g,
            });
        }
        let data = RamificationData { primes: out };
        data.validate(group)?;
        Ok(data)
    }

    pub fn validate(&self, group: &Group) -> Result<(), ArithError> {
        for q in &self.primes {
            if !group.contains(q.inertia) {
                return Err(ArithError::NotInGroup(q.inertia));
            }
            if q.inertia == Element::IDENTITY {
                return Err(ArithError::TrivialInertia(q.label()));
            }
            if !(q.log_p.is_finite() && q.log_p > 0.0) {
                return Err(ArithError::BadParameter(format!(
                    "log size of prime {} must be positive",
                    q.label()
                )));
            }
            if let Some(p) = q.p {
                if !is_odd_prime(p) {
                    return Err(ArithError::NotOddPrime(p));
                }
            }
        }
        Ok(())
    }

    pub fn is_explicit(&self) -> bool {
        self.primes.iter().all(|q| q.p.is_some())
    }
}

/// `n(χ,p) = χ(1) - dim V^{I}` for cyclic inertia `I = <g>`. Two-dimensional
/// characters use the rank of `ρ(g) - 1`; abelian ones use kernel membership.
pub fn conductor_exponent(group: &Group, id: CharacterId, inertia: Element) -> u32 {
    match id {
        CharacterId::Psi(j) => mat_rank(&mat_sub_identity(&psi_matrix(group, j, inertia))),
        CharacterId::Chi(_) => {
            let v = character_value(group, id, group.class_of(inertia));
            if v == Cyclo::one(group.rotation_order()) {
                0
            } else {
                1
            }
        }
    }
}

/// Conductor data for one character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharConductor {
    pub id: CharacterId,
    pub degree: u32,
    /// `n(χ,p)` for each ramified prime, in the order of the ramification data
    pub exponents: Vec<u32>,
    pub log_conductor: f64,
}

impl CharConductor {
    /// `A(χ)` as prime powers, when every prime is explicit.
    pub fn factored(&self, ram: &RamificationData) -> Option<Vec<(u64, u32)>> {
        ram.primes
            .iter()
            .zip(&self.exponents)
            .filter(|(_, e)| **e > 0)
            .map(|(q, e)| q.p.map(|p| (p, *e)))
            .collect()
    }
}

pub fn conductors(table: &CharacterTable, ram: &RamificationData) -> Vec<CharConductor> {
    let group = table.group();
    table
        .characters()
        .iter()
        .map(|ch| {
            let exponents: Vec<u32> = ram
                .primes
                .iter()
                .map(|q| conductor_exponent(group, ch.id, q.inertia))
                .collect();
            let log_conductor = exponents
                .iter()
                .zip(&ram.primes)
                .map(|(e, q)| *e as f64 * q.log_p)
                .sum();
            CharConductor {
                id: ch.id,
                degree: ch.degree,
                exponents,
                log_conductor,
            }
        })
        .collect()
}

/// `|d| = Π_χ A(χ)^{χ(1)}` as exponents per ramified prime, plus its log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discriminant {
    pub exponents: Vec<u32>,
    pub log_abs: f64,
}

impl Discriminant {
    pub fn factored(&self, ram: &RamificationData) -> Option<Vec<(u64, u32)>> {
        ram.primes
            .iter()
            .zip(&self.exponents)
            .filter(|(_, e)| **e > 0)
            .map(|(q, e)| q.p.map(|p| (p, *e)))
            .collect()
    }
}

pub fn conductor_discriminant(table: &CharacterTable, ram: &RamificationData) -> Discriminant {
    let conds = conductors(table, ram);
    let exponents: Vec<u32> = (0..ram.primes.len())
        .map(|k| conds.iter().map(|c| c.degree * c.exponents[k]).sum())
        .collect();
    let log_abs = exponents
        .iter()
        .zip(&ram.primes)
        .map(|(e, q)| *e as f64 * q.log_p)
        .sum();
    Discriminant { exponents, log_abs }
}

/// Discriminant exponent of a tamely ramified prime with inertia order `e`
/// in a Galois extension of degree `|G|`: `|G| (1 - 1/e)`.
pub fn tame_discriminant_exponent(group_order: u64, inertia_order: u64) -> u64 {
    group_order - group_order / inertia_order
}

/// Central vanishing orders of `L(s, χ, K/K_i)` for every character of `G_i`,
/// obtained by inducing to the full group: `ord χ = Σ_λ ⟨Ind χ, λ⟩ ord λ`.
pub fn vanishing_orders(level: &SubgroupLevel, top_orders: &[u32]) -> Result<Vec<u32>, ArithError> {
    let full = level.full();
    let ids = character_ids(full);
    character_ids(level.group())
        .into_iter()
        .map(|id| {
            let d = induce(level, id)?;
            Ok(d.components
                .iter()
                .map(|(lam, mult)| {
                    mult * top_orders[ids.iter().position(|x| x == lam).expect("full character")]
                })
                .sum())
        })
        .collect()
}

/// Orders at the top level under the axiom that every symplectic character
/// vanishes to order `(1 - W)/2` (or the override `o`), all others not at all.
pub fn top_level_orders(group: &Group, symplectic_order: u32) -> Vec<u32> {
    let table = CharacterTable::shared(group);
    table
        .characters()
        .iter()
        .map(|ch| {
            if ch.fs == FsType::Symplectic {
                symplectic_order
            } else {
                0
            }
        })
        .collect()
}

pub fn order_from_root_number(w: i8) -> u32 {
    if w < 0 {
        1
    } else {
        0
    }
}

/// Parameters of the scaled log-discriminant regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRegime {
    pub c_lo: f64,
    pub c_hi: f64,
}

impl Default for ScalingRegime {
    fn default() -> Self {
        ScalingRegime {
            c_lo: 0.5,
            c_hi: 1.0,
        }
    }
}

/// A simulated Galois extension of `Q` with group `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArithmeticScenario {
    pub kind: GroupKind,
    pub ramification: RamificationData,
    /// common root number of the symplectic characters (+1 for dihedral)
    pub w: i8,
    /// central vanishing order of each symplectic character at the top level
    pub symplectic_order: u32,
    pub log_disc: f64,
    /// sampled log-discriminant regime, `None` for hand-built scenarios
    pub scaling: Option<ScalingRegime>,
}

impl ArithmeticScenario {
    /// Builds a scenario and derives `log_disc` from the conductors.
    pub fn new(kind: GroupKind, ramification: RamificationData, w: i8) -> Result<Self, ArithError> {
        if w != 1 && w != -1 {
            return Err(ArithError::BadRootNumber(w as i64));
        }
        let group = Group::new(kind)?;
        ramification.validate(&group)?;
        let w = if kind.family == Family::Dihedral {
            1
        } else {
            w
        };
        let table = CharacterTable::shared(&group);
        let log_disc = conductor_discriminant(&table, &ramification).log_abs;
        Ok(ArithmeticScenario {
            kind,
            ramification,
            w,
            symplectic_order: order_from_root_number(w),
            log_disc,
            scaling: None,
        })
    }

    /// Overrides the central order of the symplectic characters.
    pub fn with_symplectic_order(mut self, o: u32) -> Self {
        self.symplectic_order = o;
        self
    }

    pub fn group(&self) -> Group {
        Group::new(self.kind).expect("scenario kind was validated")
    }

    pub fn is_explicit(&self) -> bool {
        self.ramification.is_explicit()
    }

    pub fn conductors(&self) -> Vec<CharConductor> {
        conductors(&CharacterTable::shared(&self.group()), &self.ramification)
    }

    /// `log A(λ)` for each full-group character, canonical order.
    pub fn log_conductors(&self) -> Vec<f64> {
        self.conductors()
            .into_iter()
            .map(|c| c.log_conductor)
            .collect()
    }

    pub fn top_orders(&self) -> Vec<u32> {
        top_level_orders(&self.group(), self.symplectic_order)
    }

    pub fn orders_at(&self, i: u32) -> Result<Vec<u32>, ArithError> {
        let level = self.group().level(i)?;
        vanishing_orders(&level, &self.top_orders())
    }

    pub fn check_consistency(&self) -> Result<(), ArithError> {
        let computed =
            conductor_discriminant(&CharacterTable::shared(&self.group()), &self.ramification)
                .log_abs;
        if (computed - self.log_disc).abs() > 1e-9 * computed.abs().max(1.0) {
            return Err(ArithError::InconsistentDisc {
                given: self.log_disc,
                computed,
            });
        }
        Ok(())
    }

    /// Key-value text form, see [`ArithmeticScenario::from_text`].
    pub fn to_text(&self) -> String {
        let group = self.group();
        let mut s = String::new();
        let _ = writeln!(s, "family = {}", self.kind.family);
        let _ = writeln!(s, "n = {}", self.kind.n);
        let _ = writeln!(s, "W = {}", self.w);
        let _ = writeln!(s, "symplectic_order = {}", self.symplectic_order);
        for q in &self.ramification.primes {
            let _ = writeln!(
                s,
                "prime = {} {}",
                q.label(),
                group.format_element(q.inertia)
            );
        }
        let _ = writeln!(s, "log_disc = {:?}", self.log_disc);
        if let Some(r) = self.scaling {
            let _ = writeln!(s, "c_lo = {:?}", r.c_lo);
            let _ = writeln!(s, "c_hi = {:?}", r.c_hi);
        }
        s
    }

    /// Parses the key-value form:
    ///
    /// ```text
    /// # comment
    /// family = quaternion
    /// n = 3
    /// W = -1
    /// symplectic_order = 1      (optional, defaults to (1 - W)/2)
    /// prime = 5 y               (explicit prime and inertia generator)
    /// prime = ~12.5 x           (simulated prime given by its log)
    /// log_disc = 34.2           (optional for explicit primes)
    /// c_lo = 0.5                (optional scaling regime)
    /// c_hi = 1.0
    /// ```
    pub fn from_text(text: &str) -> Result<Self, ArithError> {
        let mut family = None;
        let mut n = None;
        let mut w: i8 = 1;
        let mut order = None;
        let mut primes: Vec<(usize, String, String)> = Vec::new();
        let mut log_disc = None;
        let (mut c_lo, mut c_hi) = (None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let perr = |msg: String| ArithError::Parse { line, msg };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| perr("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| perr(format!("{key}: {e}")));
            match key {
                "family" => {
                    family = Some(value.parse::<Family>().map_err(|e| perr(e.to_string()))?)
                }
                "n" => n = Some(value.parse::<u32>().map_err(|e| perr(format!("n: {e}")))?),
                "W" | "w" => {
                    w = match value {
                        "1" | "+1" => 1,
                        "-1" => -1,
                        _ => return Err(perr(format!("W must be +1 or -1, got {value}"))),
                    }
                }
                "symplectic_order" => {
                    order = Some(
                        value
                            .parse::<u32>()
                            .map_err(|e| perr(format!("{key}: {e}")))?,
                    )
                }
                "prime" => {
                    let (p, g) = value
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr("prime = <p> <generator>".into()))?;
                    primes.push((line, p.trim().to_string(), g.trim().to_string()));
                }
                "log_disc" => log_disc = Some(num(value)?),
                "c_lo" => c_lo = Some(num(value)?),
                "c_hi" => c_hi = Some(num(value)?),
                _ => return Err(perr(format!("unknown key {key}"))),
            }
        }
        let family = family.ok_or(ArithError::Parse {
            line: 0,
            msg: "missing family".into(),
        })?;
        let n = n.ok_or(ArithError::Parse {
            line: 0,
            msg: "missing n".into(),
        })?;
        let kind = GroupKind::new(family, n)?;
        let group = Group::new(kind)?;
        let mut ram = Vec::new();
        for (line, p, g) in primes {
            let perr = |msg: String| ArithError::Parse { line, msg };
            let inertia = Element::parse(&g).map_err(|e| perr(e.to_string()))?;
            let inertia = group.element(inertia.exponent as i64, inertia.flip);
            let q = if let Some(logp) = p.strip_prefix('~') {
                RamifiedPrime {
                    p: None,
                    log_p: logp.parse().map_err(|e| perr(format!("prime size: {e}")))?,
                    inertia,
                }
            } else {
                let p: u64 = p.parse().map_err(|e| perr(format!("prime: {e}")))?;
                if ram.iter().any(|q: &RamifiedPrime| q.p == Some(p)) {
                    return Err(ArithError::DuplicatePrime(p));
                }
                RamifiedPrime {
                    p: Some(p),
                    log_p: (p as f64).ln(),
                    inertia,
                }
            };
            ram.push(q);
        }
        let mut s = ArithmeticScenario::new(kind, RamificationData { primes: ram }, w)?;
        if let Some(o) = order {
            s.symplectic_order = o;
        }
        if let Some(d) = log_disc {
            s.log_disc = d;
            s.check_consistency()?;
        }
        match (c_lo, c_hi) {
            (Some(c_lo), Some(c_hi)) => s.scaling = Some(ScalingRegime { c_lo, c_hi }),
            (None, None) => {}
            _ => {
                return Err(ArithError::Parse {
                    line: 0,
                    msg: "c_lo and c_hi must appear together".into(),
                })
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ArithError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ArithError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Simulated tower extension with two tamely ramified primes: the first with
/// inertia generated by a flip (`b` or `ab`, by seed), the second with inertia
/// `<a>`. `log_disc` is drawn uniformly from `[c_lo 2^n, c_hi n 2^n]`; the
/// first prime gets size `min(log 5, log_disc / (2 d_1))` and the second
/// absorbs the rest, so the conductors reproduce `log_disc` exactly.
pub fn scenario_generator(
    family: Family,
    n: u32,
    w: i8,
    seed: u64,
    regime: ScalingRegime,
) -> Result<ArithmeticScenario, ArithError> {
    if n > MAX_N {
        return Err(GroupError::TooLarge(n).into());
    }
    if !(regime.c_lo > 0.0 && regime.c_hi * n as f64 >= regime.c_lo) {
        return Err(ArithError::BadParameter(format!(
            "bad scaling constants {regime:?}"
        )));
    }
    let kind = GroupKind::new(family, n)?;
    let group = Group::new(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = (1u64 << n) as f64;
    let log_disc = rng.gen_range(regime.c_lo * size..=regime.c_hi * n as f64 * size);
    let flip = Element::flipped(rng.gen_range(0..2));
    let rot = Element::rotation(1);
    let d1 = tame_discriminant_exponent(group.order(), group.element_order(flip)) as f64;
    let d2 = tame_discriminant_exponent(group.order(), group.element_order(rot)) as f64;
    let l1 = 5f64.ln().min(log_disc / (2.0 * d1));
    let l2 = (log_disc - d1 * l1) / d2;
    let p1 = if l1 == 5f64.ln() { Some(5) } else { None };
    let ram = RamificationData {
        primes: vec![
            RamifiedPrime {
                p: p1,
                log_p: l1,
                inertia: flip,
            },
            RamifiedPrime {
                p: None,
                log_p: l2,
                inertia: rot,
            },
        ],
    };
    let mut s = ArithmeticScenario::new(kind, ram, w)?;
    s.scaling = Some(regime);
    Ok(s)
}

/// `d`, the `d_index`-th prime congruent to 1 mod 4 (5, 13, 17, ...).
pub fn horizontal_d(d_index: usize) -> u64 {
    (5u64..)
        .step_by(4)
        .filter(|&p| is_odd_prime(p))
        .nth(d_index)
        .expect("infinitely many primes")
}

/// `H_8` scenario with root number `W`: a prime `d ≡ 1 mod 4` with inertia
/// `<y>` and a second prime above `e^{f³}` with inertia `<x>`, so that
/// `log A(ψ) ≥ 2 f³`. The second prime is explicit while it fits in 40 bits
/// and simulated by its size `f³` beyond that.
pub fn horizontal_scenario(
    d_index: usize,
    f_value: f64,
    w: i8,
) -> Result<ArithmeticScenario, ArithError> {
    if !(f_value > 0.0 && f_value.is_finite()) {
        return Err(ArithError::BadParameter(format!(
            "f must be positive, got {f_value}"
        )));
    }
    let group = Group::quaternion(3)?;
    let d = horizontal_d(d_index);
    let threshold = f_value.powi(3);
    let big = if threshold < 40.0 * 2f64.ln() {
        let mut p = next_prime_above(threshold.exp());
        while p == d {
            p = next_prime_above(p as f64);
        }
        RamifiedPrime {
            p: Some(p),
            log_p: (p as f64).ln(),
            inertia: Element::rotation(1),
        }
    } else {
        RamifiedPrime {
            p: None,
            log_p: threshold,
            inertia: Element::rotation(1),
        }
    };
    let ram = RamificationData {
        primes: vec![
            RamifiedPrime {
                p: Some(d),
                log_p: (d as f64).ln(),
                inertia: Element::flipped(0),
            },
            big,
        ],
    };
    ram.validate(&group)?;
    ArithmeticScenario::new(group.kind(), ram, w)
}
