//! Bounding the exceptional primes.
//!
//! Each step of the sieve produces, for every qualifying record, a list of
//! values whose prime divisors (together with the record's own `p`) are the
//! primes that record fails to rule out. A prime is a candidate for the step
//! when every qualifying record fails to rule it out. Candidates are found by
//! taking the gcd across records and trial-dividing it, and are then confirmed
//! prime by prime against every record.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::conditions;
use crate::dirichlet::{enumerate_cubic, enumerate_quadratic, DirichletCharacter};
use crate::eisenstein::{divides_above, EisensteinInt, PrimeType};
use crate::frobdata::{charpoly, exterior_square, Dataset, FrobeniusRecord};
use crate::poly::BinomialResultant;

pub const DEFAULT_CONDUCTOR: u64 = 27 * 64;
pub const DEFAULT_CUTOFF: u64 = 11;
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

pub const STEP_NAMES: [&str; 7] = [
    "reducible (charpoly roots η·p^i)",
    "reducible 2+2 (exterior square roots η·p^i)",
    "monomial, quadratic character",
    "monomial, cubic character",
    "index-2 subgroup",
    "self-dual (orthogonal or symplectic)",
    "scalar extension",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("{p} is not invertible modulo {c}")]
    NotCoprime { p: u64, c: u64 },
    #[error("the conductor must be at least 1")]
    ZeroConductor,
}

/// Multiplicative order of `p` modulo `c`.
pub fn mult_order(p: u64, c: u64) -> Result<u64, SieveError> {
    if c == 0 {
        return Err(SieveError::ZeroConductor);
    }
    if c == 1 {
        return Ok(1);
    }
    if num_integer::gcd(p, c) != 1 {
        return Err(SieveError::NotCoprime { p, c });
    }
    let mut order = arith::euler_phi(c);
    for q in arith::prime_divisors(order) {
        while order.is_multiple_of(q) && arith::pow_mod(p, order / q, c) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExclusionMode {
    #[serde(rename = "none")]
    None,
    D1D2,
}

/// Which constant term step 4 uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step4Variant {
    /// `a²b + p⁶ − p³·norm(a)`.
    Cubed,
    /// `a²b + p⁶ − norm(a)`.
    Uncubed,
}

impl Step4Variant {
    fn other(self) -> Self {
        match self {
            Step4Variant::Cubed => Step4Variant::Uncubed,
            Step4Variant::Uncubed => Step4Variant::Cubed,
        }
    }

    fn expression(self, rec: &FrobeniusRecord) -> EisensteinInt {
        match self {
            Step4Variant::Cubed => conditions::cubic_monomial_expression(rec),
            Step4Variant::Uncubed => conditions::cubic_monomial_expression_uncubed(rec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveConfig {
    pub conductor: u64,
    pub cutoff: u64,
    pub exclusion: ExclusionMode,
    pub step4_variant: Step4Variant,
    /// Also run step 4 with the other variant and report it separately.
    pub compare_step4: bool,
    pub trial_division_bound: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            conductor: DEFAULT_CONDUCTOR,
            cutoff: DEFAULT_CUTOFF,
            exclusion: ExclusionMode::D1D2,
            step4_variant: Step4Variant::Cubed,
            compare_step4: false,
            trial_division_bound: DEFAULT_TRIAL_BOUND,
        }
    }
}

/// What one qualifying record says about the primes it cannot rule out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// `ℓ` divides one of the integers.
    Integers(Vec<BigInt>),
    /// Some prime above `ℓ` divides one of the Eisenstein integers.
    Eisenstein(Vec<EisensteinInt>),
    /// Inert `ℓ` only: `ℓ | b`, or `ℓ` divides both coordinates of
    /// `a² − ā²`.
    ScalarExtension { b: BigInt, diff: EisensteinInt },
}

impl Evidence {
    /// Whether a record at `p` with this evidence fails to rule out `ell`.
    pub fn flags(&self, p: u64, ell: u64) -> bool {
        if let Evidence::ScalarExtension { .. } = self {
            if PrimeType::of(ell) != PrimeType::Inert {
                return false;
            }
        }
        if ell == p {
            return true;
        }
        match self {
            Evidence::Integers(vs) => vs.iter().any(|v| arith::bigint_mod(v, ell) == 0),
            Evidence::Eisenstein(vs) => vs.iter().any(|v| divides_above(ell, v)),
            Evidence::ScalarExtension { b, diff } => {
                arith::bigint_mod(b, ell) == 0 || diff.divisible_by_integer(&BigInt::from(ell))
            }
        }
    }

    /// A nonzero integer whose prime divisors contain every flagged prime.
    fn enumerator(&self, p: u64) -> BigInt {
        let p = BigInt::from(p);
        match self {
            Evidence::Integers(vs) => vs.iter().fold(p, |acc, v| acc * v.abs()),
            Evidence::Eisenstein(vs) => vs.iter().fold(p, |acc, v| acc * v.norm()),
            Evidence::ScalarExtension { b, diff } => p * b.abs() * diff.content(),
        }
    }

    fn is_degenerate(&self) -> bool {
        match self {
            Evidence::Integers(vs) => vs.iter().any(Zero::is_zero),
            Evidence::Eisenstein(vs) => vs.iter().any(EisensteinInt::is_zero),
            Evidence::ScalarExtension { b, diff } => b.is_zero() || diff.is_zero(),
        }
    }
}

/// One step, or one character within a step, together with the evidence of
/// its qualifying records.
#[derive(Clone, Debug)]
pub struct Group {
    pub step: u8,
    pub character: Option<DirichletCharacter>,
    pub evidence: Vec<(u64, Evidence)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inconclusive {
    NoQualifyingRecord,
    /// The gcd kept a factor above the trial-division bound that is not
    /// provably prime.
    ResidualCofactor {
        digits: usize,
        /// Omitted when longer than 60 digits.
        #[serde(skip_serializing_if = "Option::is_none")]
        cofactor: Option<String>,
    },
}

impl fmt::Display for Inconclusive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconclusive::NoQualifyingRecord => write!(f, "no qualifying record"),
            Inconclusive::ResidualCofactor { digits, cofactor } => match cofactor {
                Some(c) => write!(f, "unfactored cofactor {c}"),
                None => write!(f, "unfactored cofactor of {digits} digits"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub step: u8,
    #[serde(serialize_with = "crate::serde_big::display_opt")]
    pub character: Option<DirichletCharacter>,
    pub qualifying_records: Vec<u64>,
    /// Prime divisors of the gcd.
    pub enumerated: Vec<u64>,
    /// Enumerated primes flagged by every qualifying record.
    pub confirmed: Vec<u64>,
    pub inconclusive: Option<Inconclusive>,
}

impl Group {
    pub fn records(&self) -> Vec<u64> {
        self.evidence.iter().map(|(p, _)| *p).collect()
    }

    /// Whether every qualifying record flags `ell`.
    pub fn confirms(&self, ell: u64) -> bool {
        !self.evidence.is_empty() && self.evidence.iter().all(|(p, ev)| ev.flags(*p, ell))
    }

    /// gcd of the per-record enumerators, or `None` without records.
    pub fn gcd(&self) -> Option<BigInt> {
        self.evidence
            .par_iter()
            .map(|(p, ev)| ev.enumerator(*p))
            .reduce_with(|a, b| a.gcd(&b))
    }

    pub fn analyse(&self, trial_bound: u64) -> GroupReport {
        let mut report = GroupReport {
            step: self.step,
            character: self.character.clone(),
            qualifying_records: self.records(),
            enumerated: Vec::new(),
            confirmed: Vec::new(),
            inconclusive: None,
        };
        let Some(g) = self.gcd() else {
            report.inconclusive = Some(Inconclusive::NoQualifyingRecord);
            return report;
        };
        let td = arith::trial_divide(&g, trial_bound);
        if !td.complete {
            let text = td.cofactor.to_string();
            report.inconclusive = Some(Inconclusive::ResidualCofactor {
                digits: text.len(),
                cofactor: (text.len() <= 60).then_some(text),
            });
        }
        report.enumerated = td.primes();
        report.enumerated.sort_unstable();
        report.confirmed = report
            .enumerated
            .iter()
            .copied()
            .filter(|&ell| self.confirms(ell))
            .collect();
        report
    }

    /// Primes `ℓ ≤ bound` flagged by every qualifying record, found by
    /// testing each prime directly.
    pub fn confirmed_up_to(&self, bound: u64) -> Vec<u64> {
        arith::primes_up_to(bound)
            .into_par_iter()
            .filter(|&ell| self.confirms(ell))
            .collect()
    }
}

/// `Res(Pol_p, x^d − p^{id})` for `i = 0, 1, 2, 3`, `d` the order of `p` mod `c`.
pub fn step1_resultants(rec: &FrobeniusRecord, c: u64) -> Result<Vec<EisensteinInt>, SieveError> {
    let d = mult_order(rec.p, c)?;
    let f = charpoly(rec);
    let mut res = BinomialResultant::new(&f, d).expect("charpoly is monic");
    Ok((0..4u64)
        .map(|i| res.at(&EisensteinInt::rational(Pow::pow(rec.p_big(), i * d))))
        .collect())
}

/// `Res(Q_p, x^d − p^{id})` for `i = 1, …, 5`.
pub fn step2_resultants(rec: &FrobeniusRecord, c: u64) -> Result<Vec<BigInt>, SieveError> {
    let d = mult_order(rec.p, c)?;
    let q = exterior_square(rec);
    let mut res = BinomialResultant::new(&q, d).expect("exterior square is monic");
    Ok((1..=5u64)
        .map(|i| res.at(&Pow::pow(rec.p_big(), i * d)))
        .collect())
}

/// `|R_i|` and `|R_{3−i}|` agree up to powers of `p`, so exponents `i` and
/// `3 − i` flag the same primes other than `p`.
pub fn step1_symmetry_holds(rec: &FrobeniusRecord, c: u64) -> Result<bool, SieveError> {
    let rs = step1_resultants(rec, c)?;
    let p = rec.p_big();
    let strip = |mut n: BigInt| {
        if n.is_zero() {
            return n;
        }
        while (&n % &p).is_zero() {
            n /= &p;
        }
        n
    };
    let norms: Vec<BigInt> = rs.iter().map(|r| strip(r.norm())).collect();
    Ok((0..4).all(|i| norms[i] == norms[3 - i]))
}

fn keep(evidence: Vec<(u64, Evidence)>) -> Vec<(u64, Evidence)> {
    evidence.into_iter().filter(|(_, ev)| !ev.is_degenerate()).collect()
}

fn per_record<F>(ds: &Dataset, f: F) -> Result<Vec<(u64, Evidence)>, SieveError>
where
    F: Fn(&FrobeniusRecord) -> Result<Option<Evidence>, SieveError> + Sync,
{
    let out: Result<Vec<_>, _> = ds
        .records
        .par_iter()
        .map(|r| f(r).map(|ev| ev.map(|ev| (r.p, ev))))
        .collect();
    Ok(keep(out?.into_iter().flatten().collect()))
}

fn character_groups(
    ds: &Dataset,
    step: u8,
    chars: Vec<DirichletCharacter>,
    f: impl Fn(&DirichletCharacter, &FrobeniusRecord) -> Option<Evidence> + Sync,
) -> Vec<Group> {
    chars
        .into_iter()
        .map(|chi| {
            let evidence = per_record(ds, |r| Ok(f(&chi, r))).expect("infallible");
            Group {
                step,
                character: Some(chi),
                evidence,
            }
        })
        .collect()
}

fn step4_groups(ds: &Dataset, variant: Step4Variant) -> Vec<Group> {
    character_groups(ds, 4, enumerate_cubic(ds.n), |phi, r| {
        (!phi.evaluate(r.p as i64).is_one()).then(|| Evidence::Eisenstein(vec![variant.expression(r)]))
    })
}

/// The evidence groups of all seven steps.
pub fn build_groups(ds: &Dataset, cfg: &SieveConfig) -> Result<Vec<Group>, SieveError> {
    let c = cfg.conductor;
    let mut groups = vec![
        Group {
            step: 1,
            character: None,
            evidence: per_record(ds, |r| Ok(Some(Evidence::Eisenstein(step1_resultants(r, c)?))))?,
        },
        Group {
            step: 2,
            character: None,
            evidence: per_record(ds, |r| Ok(Some(Evidence::Integers(step2_resultants(r, c)?))))?,
        },
    ];
    groups.extend(character_groups(ds, 3, enumerate_quadratic(ds.n), |psi, r| {
        psi.evaluate(r.p as i64)
            .is_minus_one()
            .then(|| Evidence::Integers(vec![conditions::odd_monomial_expression(r)]))
    }));
    groups.extend(step4_groups(ds, cfg.step4_variant));
    groups.extend(character_groups(ds, 5, enumerate_quadratic(ds.n), |mu, r| {
        mu.evaluate(r.p as i64)
            .is_minus_one()
            .then(|| Evidence::Eisenstein(vec![r.a.clone()]))
    }));
    groups.push(Group {
        step: 6,
        character: None,
        evidence: per_record(ds, |r| {
            Ok(Some(Evidence::Eisenstein(vec![conditions::self_dual_expression(r)])))
        })?,
    });
    groups.push(Group {
        step: 7,
        character: None,
        evidence: per_record(ds, |r| {
            Ok(Some(Evidence::ScalarExtension {
                b: r.b.clone(),
                diff: conditions::self_dual_expression(r),
            }))
        })?,
    });
    Ok(groups)
}

/// Why a prime was removed from the final set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    Small { cutoff: u64 },
    DividesLevel { n: u64 },
    Ramified,
    /// Membership in D1 (split) or D2 (inert) through `ℓ ≡ residue mod modulus`.
    Congruence {
        set: &'static str,
        ell: u64,
        residue: i64,
        modulus: u64,
    },
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exclusion::Small { cutoff } => write!(f, "ℓ ≤ {cutoff}"),
            Exclusion::DividesLevel { n } => write!(f, "ℓ | N = {n}"),
            Exclusion::Ramified => write!(f, "ramified in ℚ(ζ)"),
            Exclusion::Congruence {
                set,
                ell,
                residue,
                modulus,
            } => write!(f, "{set}: {ell} ≡ {residue} mod {modulus}"),
        }
    }
}

/// Membership in the sets D1 (split primes) and D2 (inert primes) that the
/// conductor 27·64 cannot control. 3 is always excluded.
pub fn is_excluded(ell: u64) -> Option<Exclusion> {
    let hit = |residue: i64, modulus: u64| {
        (ell as i64 - residue).rem_euclid(modulus as i64) == 0
    };
    let make = |set, residue, modulus| Exclusion::Congruence {
        set,
        ell,
        residue,
        modulus,
    };
    match PrimeType::of(ell) {
        PrimeType::Ramified => Some(Exclusion::Ramified),
        PrimeType::Split => [(1, 27), (1, 32)]
            .into_iter()
            .find(|&(r, m)| hit(r, m))
            .map(|(r, m)| make("D1", r, m)),
        PrimeType::Inert => [(-1, 27), (1, 16), (-1, 16)]
            .into_iter()
            .find(|&(r, m)| hit(r, m))
            .map(|(r, m)| make("D2", r, m)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ImageLabel {
    PSL4,
    DetSquareSubgroup,
    PSU4,
    Excluded,
    Small,
    BadReduction,
    PossiblyExceptional,
}

impl fmt::Display for ImageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ImageLabel::PSL4 => "PSL(4)",
            ImageLabel::DetSquareSubgroup => "{x ∈ PGL(4) : det x is a square}",
            ImageLabel::PSU4 => "PSU(4)",
            ImageLabel::Excluded => "excluded",
            ImageLabel::Small => "small prime",
            ImageLabel::BadReduction => "bad reduction",
            ImageLabel::PossiblyExceptional => "possibly exceptional",
        };
        f.write_str(s)
    }
}

/// The parts of a sieve run that determine image labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelContext {
    pub n: u64,
    pub cutoff: u64,
    pub exclusion: ExclusionMode,
    pub final_set: Vec<u64>,
    pub inconclusive: bool,
}

impl LabelContext {
    /// Reads a serialized [`SieveReport`].
    pub fn from_json(report: &serde_json::Value) -> Option<LabelContext> {
        let config = report.get("config")?;
        let exclusion = match config.get("exclusion")?.as_str()? {
            "none" => ExclusionMode::None,
            "D1D2" => ExclusionMode::D1D2,
            _ => return None,
        };
        let final_set = report
            .get("final")?
            .as_array()?
            .iter()
            .map(|v| v.as_u64())
            .collect::<Option<Vec<u64>>>()?;
        Some(LabelContext {
            n: report.get("n")?.as_u64()?,
            cutoff: config.get("cutoff")?.as_u64()?,
            exclusion,
            final_set,
            inconclusive: !report.get("inconclusive")?.as_array()?.is_empty(),
        })
    }
}

/// Expected projective image at the prime `ell`.
pub fn expected_image(ell: u64, ctx: &LabelContext) -> ImageLabel {
    if ctx.n.is_multiple_of(ell) {
        return ImageLabel::BadReduction;
    }
    if ell <= ctx.cutoff {
        return ImageLabel::Small;
    }
    let kind = PrimeType::of(ell);
    if kind == PrimeType::Ramified || (ctx.exclusion == ExclusionMode::D1D2 && is_excluded(ell).is_some()) {
        return ImageLabel::Excluded;
    }
    if ctx.inconclusive || ctx.final_set.contains(&ell) {
        return ImageLabel::PossiblyExceptional;
    }
    match (kind, ell % 4) {
        (PrimeType::Inert, _) => ImageLabel::PSU4,
        (_, 3) => ImageLabel::PSL4,
        _ => ImageLabel::DetSquareSubgroup,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub prime: u64,
    pub contributing_records: Vec<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub step: u8,
    pub name: &'static str,
    pub candidates: Vec<Candidate>,
    pub groups: Vec<GroupReport>,
}

impl StepReport {
    fn assemble(step: u8, groups: Vec<GroupReport>) -> Self {
        let mut by_prime: BTreeMap<u64, (BTreeSet<u64>, Vec<String>)> = BTreeMap::new();
        for g in &groups {
            let scope = match &g.character {
                Some(chi) => format!("{chi}"),
                None => "all".to_string(),
            };
            for &ell in &g.confirmed {
                let entry = by_prime.entry(ell).or_default();
                entry.0.extend(&g.qualifying_records);
                entry.1.push(scope.clone());
            }
        }
        let candidates = by_prime
            .into_iter()
            .map(|(prime, (records, scopes))| Candidate {
                prime,
                contributing_records: records.into_iter().collect(),
                reason: format!(
                    "flagged by every qualifying record ({})",
                    scopes.join("; ")
                ),
            })
            .collect();
        StepReport {
            step,
            name: STEP_NAMES[step as usize - 1],
            candidates,
            groups,
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        self.groups.iter().any(|g| g.inconclusive.is_some())
    }

    /// Candidate primes, or `None` when an inconclusive group leaves every
    /// prime possible.
    pub fn candidate_set(&self) -> Option<BTreeSet<u64>> {
        (!self.is_inconclusive()).then(|| self.candidates.iter().map(|c| c.prime).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InconclusiveEntry {
    pub step: u8,
    #[serde(serialize_with = "crate::serde_big::display_opt")]
    pub character: Option<DirichletCharacter>,
    pub reason: Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedPrime {
    pub prime: u64,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveReport {
    pub config: SieveConfig,
    pub n: u64,
    pub records: Vec<u64>,
    pub conditions_pass: bool,
    pub per_step: Vec<StepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step4_comparison: Option<StepReport>,
    pub inconclusive: Vec<InconclusiveEntry>,
    pub excluded: Vec<ExcludedPrime>,
    #[serde(rename = "final")]
    pub final_set: Vec<u64>,
    pub labels: BTreeMap<u64, ImageLabel>,
    pub notes: Vec<String>,
}

impl SieveReport {
    /// Reasons to drop `ell` before it can reach the final set.
    pub fn exclusions(&self, ell: u64) -> Vec<Exclusion> {
        let mut out = Vec::new();
        if ell <= self.config.cutoff {
            out.push(Exclusion::Small {
                cutoff: self.config.cutoff,
            });
        }
        if self.n.is_multiple_of(ell) {
            out.push(Exclusion::DividesLevel { n: self.n });
        }
        if self.config.exclusion == ExclusionMode::D1D2 {
            out.extend(is_excluded(ell));
        }
        out
    }

    pub fn is_inconclusive(&self) -> bool {
        !self.inconclusive.is_empty()
    }

    pub fn label_context(&self) -> LabelContext {
        LabelContext {
            n: self.n,
            cutoff: self.config.cutoff,
            exclusion: self.config.exclusion,
            final_set: self.final_set.clone(),
            inconclusive: self.is_inconclusive(),
        }
    }

    /// Expected projective image of the residual representation at `ell`.
    pub fn label(&self, ell: u64) -> ImageLabel {
        expected_image(ell, &self.label_context())
    }

    /// Fills `labels` for every prime up to `bound`.
    pub fn label_primes_up_to(&mut self, bound: u64) {
        self.labels = arith::primes_up_to(bound)
            .into_iter()
            .map(|ell| (ell, self.label(ell)))
            .collect();
    }

    pub fn step(&self, step: u8) -> &StepReport {
        &self.per_step[step as usize - 1]
    }
}

fn group_reports(groups: &[Group], trial_bound: u64) -> Vec<GroupReport> {
    groups.par_iter().map(|g| g.analyse(trial_bound)).collect()
}

/// Runs all seven steps and assembles the report.
pub fn run_sieve(ds: &Dataset, cfg: &SieveConfig) -> Result<SieveReport, SieveError> {
    if cfg.conductor == 0 {
        return Err(SieveError::ZeroConductor);
    }
    for r in &ds.records {
        mult_order(r.p, cfg.conductor)?;
    }
    let groups = build_groups(ds, cfg)?;
    let reports = group_reports(&groups, cfg.trial_division_bound);
    let per_step: Vec<StepReport> = (1..=7u8)
        .map(|s| {
            let gs = reports.iter().filter(|g| g.step == s).cloned().collect();
            StepReport::assemble(s, gs)
        })
        .collect();

    let step4_comparison = cfg.compare_step4.then(|| {
        let gs = step4_groups(ds, cfg.step4_variant.other());
        StepReport::assemble(4, group_reports(&gs, cfg.trial_division_bound))
    });

    let inconclusive = reports
        .iter()
        .filter_map(|g| {
            g.inconclusive.clone().map(|reason| InconclusiveEntry {
                step: g.step,
                character: g.character.clone(),
                reason,
            })
        })
        .collect();

    let variant_note = match cfg.step4_variant {
        Step4Variant::Cubed => "step 4 evaluates a²b + p⁶ − p³·norm(a); the variant without the p³ factor is available for comparison",
        Step4Variant::Uncubed => "step 4 evaluates a²b + p⁶ − norm(a), without the p³ factor used by condition 4",
    };
    let mut report = SieveReport {
        config: cfg.clone(),
        n: ds.n,
        records: ds.records.iter().map(|r| r.p).collect(),
        conditions_pass: conditions::check_all(ds).pass,
        per_step,
        step4_comparison,
        inconclusive,
        excluded: Vec::new(),
        final_set: Vec::new(),
        labels: BTreeMap::new(),
        notes: vec![
            "the conductor only enters steps 1 and 2; exclusions apply to the final set".to_string(),
            variant_note.to_string(),
        ],
    };

    let union: BTreeSet<u64> = report
        .per_step
        .iter()
        .flat_map(|s| s.candidates.iter().map(|c| c.prime))
        .collect();
    for ell in union {
        let reasons = report.exclusions(ell);
        if reasons.is_empty() {
            report.final_set.push(ell);
        } else {
            report.excluded.push(ExcludedPrime {
                prime: ell,
                reasons: reasons.iter().map(ToString::to_string).collect(),
            });
        }
    }
    Ok(report)
}

/// Fraction of split and inert primes below `bound` (ℓ ≠ 3) in D1 ∪ D2.
pub fn exclusion_densities(bound: u64) -> (f64, f64) {
    let mut counts = [[0u64; 2]; 2];
    for ell in arith::primes_up_to(bound) {
        let idx = match PrimeType::of(ell) {
            PrimeType::Split => 0,
            PrimeType::Inert => 1,
            PrimeType::Ramified => continue,
        };
        counts[idx][0] += 1;
        if is_excluded(ell).is_some() {
            counts[idx][1] += 1;
        }
    }
    let frac = |c: [u64; 2]| c[1] as f64 / c[0].max(1) as f64;
    (frac(counts[0]), frac(counts[1]))
}
