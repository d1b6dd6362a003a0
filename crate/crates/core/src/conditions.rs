//! The seven large-image conditions, checked exactly with explicit witnesses.
//!
//! Every condition asks for the existence of a suitable record. The checkers
//! report all records that qualify, not just the first one.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::dirichlet::{enumerate_cubic, enumerate_quadratic, DirichletCharacter};
use crate::eisenstein::EisensteinInt;
use crate::frobdata::{charpoly, exterior_square, Dataset, FrobeniusRecord};
use crate::poly::{BinomialResultant, Scalar, UniPoly};

/// Orders `d` of roots of unity with `φ(d) ≤ bound`.
pub fn cyclotomic_orders(bound: u64) -> Vec<u64> {
    // φ(d) ≥ √(d/2)
    (1..=2 * bound * bound)
        .filter(|&d| arith::euler_phi(d) <= bound)
        .collect()
}

/// Roots of unity that can occur among the roots of a quartic over ℚ(ζ).
pub fn d8() -> Vec<u64> {
    cyclotomic_orders(8)
}

/// Roots of unity that can occur among the roots of the exterior square.
pub fn d12() -> Vec<u64> {
    cyclotomic_orders(12)
}

/// Pairs `(d, i)` with `Res(f, x^d − p^{id}) = 0`, i.e. `f` has a root of the
/// form `η p^i` with `η^d = 1`.
pub fn cyclotomic_root_hits<C: Scalar + Send + Sync>(
    f: &UniPoly<C>,
    p: u64,
    orders: &[u64],
    exponents: &[u32],
) -> Vec<(u64, u32)> {
    orders
        .par_iter()
        .flat_map_iter(|&d| {
            let mut res = BinomialResultant::new(f, d).expect("f is monic");
            exponents
                .iter()
                .filter_map(|&i| {
                    let cst: BigInt = Pow::pow(BigInt::from(p), i as u64 * d);
                    res.at(&C::from_integer(cst)).is_zero().then_some((d, i))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WitnessValue {
    Integer(#[serde(serialize_with = "crate::serde_big::display")] BigInt),
    Eisenstein(#[serde(serialize_with = "crate::serde_big::display")] EisensteinInt),
    /// Number of resultants checked, all nonzero.
    NonzeroResultants(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub p: u64,
    pub value: WitnessValue,
}

/// Verdict for one condition, or for one character of conditions 3–5.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: u8,
    #[serde(serialize_with = "crate::serde_big::display_opt")]
    pub character: Option<DirichletCharacter>,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
}

impl ConditionResult {
    fn from_witnesses(condition: u8, character: Option<DirichletCharacter>, witnesses: Vec<Witness>) -> Self {
        ConditionResult {
            condition,
            character,
            pass: !witnesses.is_empty(),
            witnesses,
        }
    }

    pub fn witness_primes(&self) -> Vec<u64> {
        self.witnesses.iter().map(|w| w.p).collect()
    }
}

fn collect<F>(ds: &Dataset, f: F) -> Vec<Witness>
where
    F: Fn(&FrobeniusRecord) -> Option<WitnessValue> + Sync,
{
    ds.records
        .par_iter()
        .filter_map(|r| f(r).map(|value| Witness { p: r.p, value }))
        .collect()
}

/// Condition 1 at one record: no root of the charpoly is `η p^i`,
/// `i ∈ {0, 1, 2, 3}`.
pub fn condition_1_at(rec: &FrobeniusRecord) -> Option<WitnessValue> {
    let orders = d8();
    let exps = [0, 1, 2, 3];
    let hits = cyclotomic_root_hits(&charpoly(rec), rec.p, &orders, &exps);
    hits.is_empty()
        .then_some(WitnessValue::NonzeroResultants(orders.len() * exps.len()))
}

/// Condition 2 at one record: no root of the exterior square is `η p^i`,
/// `i ∈ {1, …, 5}`.
pub fn condition_2_at(rec: &FrobeniusRecord) -> Option<WitnessValue> {
    let orders = d12();
    let exps = [1, 2, 3, 4, 5];
    let hits = cyclotomic_root_hits(&exterior_square(rec), rec.p, &orders, &exps);
    hits.is_empty()
        .then_some(WitnessValue::NonzeroResultants(orders.len() * exps.len()))
}

/// `p³(a² + ā²) − norm(a)·b`.
pub fn odd_monomial_expression(rec: &FrobeniusRecord) -> BigInt {
    rec.p_pow(3) * rec.a.square().trace() - rec.a.norm() * &rec.b
}

/// `a²b + p⁶ − p³·norm(a)`.
pub fn cubic_monomial_expression(rec: &FrobeniusRecord) -> EisensteinInt {
    let constant = rec.p_pow(6) - rec.p_pow(3) * rec.a.norm();
    rec.a.square().scale(&rec.b) + EisensteinInt::rational(constant)
}

/// The same expression without the `p³` factor on `norm(a)`.
pub fn cubic_monomial_expression_uncubed(rec: &FrobeniusRecord) -> EisensteinInt {
    let constant = rec.p_pow(6) - rec.a.norm();
    rec.a.square().scale(&rec.b) + EisensteinInt::rational(constant)
}

/// `a² − ā²`, zero exactly when `a² ∈ ℤ`.
pub fn self_dual_expression(rec: &FrobeniusRecord) -> EisensteinInt {
    let a2 = rec.a.square();
    let c = a2.conj();
    a2 - c
}

pub fn condition_3_at(psi: &DirichletCharacter, rec: &FrobeniusRecord) -> Option<WitnessValue> {
    if !psi.evaluate(rec.p as i64).is_minus_one() {
        return None;
    }
    let e = odd_monomial_expression(rec);
    (!Zero::is_zero(&e)).then_some(WitnessValue::Integer(e))
}

pub fn condition_4_at(phi: &DirichletCharacter, rec: &FrobeniusRecord) -> Option<WitnessValue> {
    if phi.evaluate(rec.p as i64).is_one() {
        return None;
    }
    let e = cubic_monomial_expression(rec);
    // a²b ∉ ℤ already forces e ≠ 0
    if !rec.a.square().scale(&rec.b).is_rational() {
        return Some(WitnessValue::Eisenstein(e));
    }
    (!e.is_zero()).then_some(WitnessValue::Eisenstein(e))
}

pub fn condition_5_at(mu: &DirichletCharacter, rec: &FrobeniusRecord) -> Option<WitnessValue> {
    (mu.evaluate(rec.p as i64).is_minus_one() && !rec.a.is_zero())
        .then(|| WitnessValue::Eisenstein(rec.a.clone()))
}

pub fn condition_6_at(rec: &FrobeniusRecord) -> Option<WitnessValue> {
    let a2 = rec.a.square();
    (!a2.is_rational()).then_some(WitnessValue::Eisenstein(a2))
}

pub fn condition_7_at(rec: &FrobeniusRecord) -> Option<WitnessValue> {
    if Zero::is_zero(&rec.b) {
        return None;
    }
    condition_6_at(rec)
}

pub fn check_condition_1(ds: &Dataset) -> ConditionResult {
    ConditionResult::from_witnesses(1, None, collect(ds, condition_1_at))
}

pub fn check_condition_2(ds: &Dataset) -> ConditionResult {
    ConditionResult::from_witnesses(2, None, collect(ds, condition_2_at))
}

fn per_character(
    ds: &Dataset,
    id: u8,
    chars: Vec<DirichletCharacter>,
    check: fn(&DirichletCharacter, &FrobeniusRecord) -> Option<WitnessValue>,
) -> Vec<ConditionResult> {
    chars
        .into_iter()
        .map(|chi| {
            let witnesses = collect(ds, |r| check(&chi, r));
            ConditionResult::from_witnesses(id, Some(chi), witnesses)
        })
        .collect()
}

pub fn check_condition_3(ds: &Dataset) -> Vec<ConditionResult> {
    per_character(ds, 3, enumerate_quadratic(ds.n), condition_3_at)
}

pub fn check_condition_4(ds: &Dataset) -> Vec<ConditionResult> {
    per_character(ds, 4, enumerate_cubic(ds.n), condition_4_at)
}

pub fn check_condition_5(ds: &Dataset) -> Vec<ConditionResult> {
    per_character(ds, 5, enumerate_quadratic(ds.n), condition_5_at)
}

pub fn check_condition_6(ds: &Dataset) -> ConditionResult {
    ConditionResult::from_witnesses(6, None, collect(ds, condition_6_at))
}

pub fn check_condition_7(ds: &Dataset) -> ConditionResult {
    ConditionResult::from_witnesses(7, None, collect(ds, condition_7_at))
}

/// Verdict for one of the seven conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdict {
    pub condition: u8,
    pub pass: bool,
    /// One entry, or one per character for conditions 3–5.
    pub checks: Vec<ConditionResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionsReport {
    pub pass: bool,
    pub conditions: Vec<ConditionVerdict>,
}

impl ConditionsReport {
    pub fn verdict(&self, condition: u8) -> &ConditionVerdict {
        &self.conditions[condition as usize - 1]
    }

    /// Ids of the failing conditions.
    pub fn failures(&self) -> Vec<u8> {
        self.conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.condition)
            .collect()
    }
}

/// Runs all seven checkers. An empty dataset fails every condition, including
/// the per-character ones when there are no characters.
pub fn check_all(ds: &Dataset) -> ConditionsReport {
    let nonempty = !ds.records.is_empty();
    let single = |r: ConditionResult| ConditionVerdict {
        condition: r.condition,
        pass: r.pass,
        checks: vec![r],
    };
    let many = |condition: u8, checks: Vec<ConditionResult>| ConditionVerdict {
        condition,
        pass: nonempty && checks.iter().all(|c| c.pass),
        checks,
    };
    let conditions = vec![
        single(check_condition_1(ds)),
        single(check_condition_2(ds)),
        many(3, check_condition_3(ds)),
        many(4, check_condition_4(ds)),
        many(5, check_condition_5(ds)),
        single(check_condition_6(ds)),
        single(check_condition_7(ds)),
    ];
    ConditionsReport {
        pass: conditions.iter().all(|c| c.pass),
        conditions,
    }
}
