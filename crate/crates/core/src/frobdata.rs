//! Frobenius data: characteristic polynomials, purity checks, exterior
//! squares, and the JSON dataset format.
//!
//! A record `(p, a, b)` stands for the characteristic polynomial
//!
//! ```text
//! x⁴ − a x³ + b x² − p³ ā x + p⁶,   a ∈ ℤ[ζ], b ∈ ℤ.
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::arith;
use crate::eisenstein::EisensteinInt;
use crate::poly::{Scalar, UniPoly};

/// The bundled Scholten dataset (N = 6, primes 5 through 29).
pub const SCHOLTEN_JSON: &str = include_str!("../data/scholten.json");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusRecord {
    pub p: u64,
    /// Trace of Frobenius.
    pub a: EisensteinInt,
    /// Quadratic coefficient.
    pub b: BigInt,
}

impl FrobeniusRecord {
    pub fn new(p: u64, a: EisensteinInt, b: impl Into<BigInt>) -> Self {
        FrobeniusRecord { p, a, b: b.into() }
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `p^k` as a big integer.
    pub fn p_pow(&self, k: u32) -> BigInt {
        Pow::pow(self.p_big(), k)
    }

    /// `16 p³`, the bound on `norm(a)` equivalent to `|a| ≤ 4 p^{3/2}`.
    pub fn purity_bound(&self) -> BigInt {
        self.p_pow(3) * 16
    }
}

/// `x⁴ − a x³ + b x² − p³ ā x + p⁶`.
pub fn charpoly(rec: &FrobeniusRecord) -> UniPoly<EisensteinInt> {
    UniPoly::new(vec![
        EisensteinInt::rational(rec.p_pow(6)),
        -rec.a.conj().scale(&rec.p_pow(3)),
        EisensteinInt::rational(rec.b.clone()),
        -rec.a.clone(),
        EisensteinInt::one(),
    ])
}

/// Characteristic polynomial of the exterior square of a 4×4 matrix whose
/// characteristic polynomial is `x⁴ − e₁x³ + e₂x² − e₃x + e₄`.
///
/// Its roots are the six pairwise products of the four roots.
pub fn exterior_square_of_quartic<C: Scalar>(e: [&C; 4]) -> UniPoly<C> {
    let [e1, e2, e3, e4] = e;
    let e13_minus_e4 = e1.mul(e3).sub(e4);
    let two_e2e4 = e2.mul(e4).add(&e2.mul(e4));
    let cubic = e1.mul(e1).mul(e4).sub(&two_e2e4).add(&e3.mul(e3));
    UniPoly::new(vec![
        e4.mul(e4).mul(e4),
        e2.mul(e4).mul(e4).neg(),
        e4.mul(&e13_minus_e4),
        cubic.neg(),
        e13_minus_e4,
        e2.neg(),
        C::one(),
    ])
}

/// Degree-6 integer polynomial whose roots are the pairwise products of the
/// roots of [`charpoly`].
pub fn exterior_square(rec: &FrobeniusRecord) -> UniPoly<BigInt> {
    let e1 = rec.a.clone();
    let e2 = EisensteinInt::rational(rec.b.clone());
    let e3 = rec.a.conj().scale(&rec.p_pow(3));
    let e4 = EisensteinInt::rational(rec.p_pow(6));
    let q = exterior_square_of_quartic([&e1, &e2, &e3, &e4]);
    q.map(|c| {
        debug_assert!(c.is_rational(), "exterior square coefficient {c} not rational");
        c.x.clone()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecordViolation {
    NotPrime {
        p: u64,
    },
    /// `norm(a) > 16 p³`.
    PurityBound {
        #[serde(serialize_with = "crate::serde_big::display")]
        norm: BigInt,
        #[serde(serialize_with = "crate::serde_big::display")]
        bound: BigInt,
    },
    /// The coefficient of `x^degree` breaks `x⁴·P̄(p³/x) = p⁶·P(x)`.
    FunctionalEquation {
        degree: usize,
    },
}

impl fmt::Display for RecordViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordViolation::NotPrime { p } => write!(f, "p = {p} is not prime"),
            RecordViolation::PurityBound { norm, bound } => {
                write!(f, "norm(a) = {norm} exceeds 16p³ = {bound}")
            }
            RecordViolation::FunctionalEquation { degree } => write!(
                f,
                "coefficient of x^{degree} violates the conjugate-reciprocal symmetry"
            ),
        }
    }
}

/// Outcome of [`verify_record`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordCheck {
    pub p: u64,
    pub ok: bool,
    pub violations: Vec<RecordViolation>,
}

/// Checks the purity bound and the conjugate-reciprocal symmetry
/// `x⁴·P̄(p³/x) = p⁶·P(x)` of the characteristic polynomial.
pub fn verify_record(rec: &FrobeniusRecord) -> RecordCheck {
    let mut violations = Vec::new();
    if !arith::is_prime(rec.p) {
        violations.push(RecordViolation::NotPrime { p: rec.p });
    }
    let norm = rec.a.norm();
    let bound = rec.purity_bound();
    if norm > bound {
        violations.push(RecordViolation::PurityBound { norm, bound });
    }
    let pol = charpoly(rec);
    let p3 = rec.p_pow(3);
    let p6 = rec.p_pow(6);
    for k in 0..=4usize {
        // coefficient of x^k in x⁴·P̄(p³/x) is conj(c_{4−k})·p^{3(4−k)}
        let lhs = pol
            .coeff(4 - k)
            .conj()
            .scale(&Pow::pow(&p3, (4 - k) as u32));
        let rhs = pol.coeff(k).scale(&p6);
        if lhs != rhs {
            violations.push(RecordViolation::FunctionalEquation { degree: k });
        }
    }
    RecordCheck {
        p: rec.p,
        ok: violations.is_empty(),
        violations,
    }
}

/// A validated list of Frobenius records for a family with bad primes
/// dividing `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// Product of the primes of bad reduction.
    pub n: u64,
    /// Free-form metadata, carried but not interpreted.
    pub twist: Value,
    pub records: Vec<FrobeniusRecord>,
}

impl Dataset {
    pub fn new(n: u64, records: Vec<FrobeniusRecord>) -> Self {
        Dataset {
            n,
            twist: Value::Null,
            records,
        }
    }

    /// The bundled Scholten dataset.
    pub fn scholten() -> Self {
        load_dataset(SCHOLTEN_JSON).expect("bundled dataset is valid")
    }

    /// At least one trace is not a rational integer.
    pub fn traces_generate_field(&self) -> bool {
        self.records.iter().any(|r| !r.a.is_rational())
    }

    pub fn bad_primes(&self) -> Vec<u64> {
        arith::prime_divisors(self.n)
    }

    /// The first `k` records.
    pub fn truncated(&self, k: usize) -> Dataset {
        Dataset {
            n: self.n,
            twist: self.twist.clone(),
            records: self.records.iter().take(k).cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    DividesLevel { n: u64 },
    Duplicate { first_index: usize },
    Record { violations: Vec<RecordViolation> },
}

/// A problem with one record, located by its index in `records`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetIssue {
    pub index: usize,
    pub p: u64,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl fmt::Display for DatasetIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "records[{}] (p = {}): ", self.index, self.p)?;
        match &self.kind {
            IssueKind::DividesLevel { n } => write!(f, "p divides N = {n}"),
            IssueKind::Duplicate { first_index } => {
                write!(f, "duplicate of records[{first_index}]")
            }
            IssueKind::Record { violations } => {
                let parts: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", parts.join("; "))
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Schema { location: String, message: String },
    #[error("{}", .0.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid(Vec<DatasetIssue>),
}

impl DatasetError {
    /// Parse-level failures (unreadable, malformed, wrong shape) as opposed
    /// to well-formed data violating an invariant.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, DatasetError::Invalid(_))
    }
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> DatasetError {
    DatasetError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

fn integer(value: &Value, location: &str) -> Result<BigInt, DatasetError> {
    let Value::Number(n) = value else {
        return Err(schema(location, "expected an integer"));
    };
    n.to_string()
        .parse::<BigInt>()
        .map_err(|_| schema(location, format!("expected an integer, found {n}")))
}

fn small(value: &Value, location: &str) -> Result<u64, DatasetError> {
    let n = integer(value, location)?;
    u64::try_from(&n).map_err(|_| schema(location, format!("{n} is not a positive machine integer")))
}

/// Parses the dataset document without checking record invariants.
pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| DatasetError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(top) = &doc else {
        return Err(schema("$", "expected an object"));
    };
    let n = small(top.get("N").ok_or_else(|| schema("$", "missing field `N`"))?, "$.N")?;
    if n == 0 {
        return Err(schema("$.N", "N must be positive"));
    }
    let twist = top.get("twist").cloned().unwrap_or(Value::Null);
    let Some(Value::Array(items)) = top.get("records") else {
        return Err(schema("$", "missing array `records`"));
    };
    let mut records = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let loc = format!("$.records[{i}]");
        let Value::Object(obj) = item else {
            return Err(schema(loc, "expected an object"));
        };
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| schema(&loc, format!("missing field `{name}`")))
        };
        let p = small(field("p")?, &format!("{loc}.p"))?;
        let a = match field("a")? {
            Value::Array(xy) if xy.len() == 2 => EisensteinInt::new(
                integer(&xy[0], &format!("{loc}.a[0]"))?,
                integer(&xy[1], &format!("{loc}.a[1]"))?,
            ),
            _ => return Err(schema(format!("{loc}.a"), "expected [x, y]")),
        };
        let b = integer(field("b")?, &format!("{loc}.b"))?;
        records.push(FrobeniusRecord { p, a, b });
    }
    Ok(Dataset { n, twist, records })
}

/// Every invariant violation in the dataset, in record order.
pub fn validate(ds: &Dataset) -> Vec<DatasetIssue> {
    let mut issues = Vec::new();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for (index, rec) in ds.records.iter().enumerate() {
        let p = rec.p;
        if let Some(&first_index) = seen.get(&p) {
            issues.push(DatasetIssue {
                index,
                p,
                kind: IssueKind::Duplicate { first_index },
            });
        } else {
            seen.insert(p, index);
        }
        if p != 0 && ds.n.is_multiple_of(p) {
            issues.push(DatasetIssue {
                index,
                p,
                kind: IssueKind::DividesLevel { n: ds.n },
            });
        }
        let check = verify_record(rec);
        if !check.ok {
            issues.push(DatasetIssue {
                index,
                p,
                kind: IssueKind::Record {
                    violations: check.violations,
                },
            });
        }
    }
    issues
}

/// Parses and validates a dataset document.
///
/// A dataset whose traces are all rational is accepted; see
/// [`Dataset::traces_generate_field`].
pub fn load_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let ds = parse_dataset(text)?;
    let issues = validate(&ds);
    if issues.is_empty() {
        Ok(ds)
    } else {
        Err(DatasetError::Invalid(issues))
    }
}

pub fn read_dataset_text(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_dataset_file(path: &Path) -> Result<Dataset, DatasetError> {
    load_dataset(&read_dataset_text(path)?)
}

/// True when all six coefficients of the exterior square satisfy
/// `coeff(x^{6−k}) = p^{6(k−3)}·coeff(x^k)` (scaled to stay integral).
pub fn exterior_square_is_balanced(rec: &FrobeniusRecord, q: &UniPoly<BigInt>) -> bool {
    // coeff(x^k) = p^{6(3−k)} coeff(x^{6−k}) for k = 0, 1, 2
    (0..3u32).all(|k| {
        let scale = rec.p_pow(6 * (3 - k));
        q.coeff(k as usize) == &scale * q.coeff(6 - k as usize)
    }) && !Scalar::is_zero(&q.coeff(6))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(x: i64, y: i64) -> EisensteinInt {
        EisensteinInt::new(x, y)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn five() -> FrobeniusRecord {
        FrobeniusRecord::new(5, e(-3, 10), -5)
    }

    #[test]
    fn charpoly_at_five() {
        let pol = charpoly(&five());
        let expected = UniPoly::new(vec![
            EisensteinInt::rational(15625),
            e(13, 10).scale(&big(125)),
            EisensteinInt::rational(-5),
            e(3, -10),
            EisensteinInt::one(),
        ]);
        assert_eq!(pol, expected);
        assert!(pol.is_monic());
        assert_eq!(pol.degree(), Some(4));
    }

    #[test]
    fn charpoly_at_nineteen() {
        let pol = charpoly(&FrobeniusRecord::new(19, e(-73, -81), -4275));
        // x⁴ − conj(8 + 81ζ)x³ − 4275x² − 19³(8 + 81ζ)x + 19⁶
        assert_eq!(pol.coeff(3), -e(8, 81).conj());
        assert_eq!(pol.coeff(1), -e(8, 81).scale(&big(19 * 19 * 19)));
        assert_eq!(pol.coeff(0), EisensteinInt::rational(47_045_881));
    }

    #[test]
    fn zero_trace_shape() {
        let pol = charpoly(&FrobeniusRecord::new(7, EisensteinInt::zero(), 0));
        assert_eq!(pol.coeffs().len(), 5);
        assert!(pol.coeff(1).is_zero() && pol.coeff(2).is_zero() && pol.coeff(3).is_zero());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_record(&five()).ok);
        let bad = verify_record(&FrobeniusRecord::new(5, e(100, 0), 0));
        assert!(!bad.ok);
        assert_eq!(
            bad.violations,
            vec![RecordViolation::PurityBound {
                norm: big(10_000),
                bound: big(2000)
            }]
        );
        assert!(verify_record(&FrobeniusRecord::new(2, EisensteinInt::zero(), 0)).ok);
        let composite = verify_record(&FrobeniusRecord::new(9, e(1, 0), 0));
        assert!(composite.violations.contains(&RecordViolation::NotPrime { p: 9 }));
    }

    #[test]
    fn exterior_square_identity_like() {
        let q = exterior_square_of_quartic([&big(4), &big(6), &big(4), &big(1)]);
        let expected: Vec<BigInt> = [1, -6, 15, -20, 15, -6, 1].iter().map(|&v| big(v)).collect();
        assert_eq!(q.coeffs(), &expected[..]);
    }

    #[test]
    fn exterior_square_at_five() {
        let q = exterior_square(&five());
        let p13 = Pow::pow(big(5), 13u32);
        let p18 = Pow::pow(big(5), 18u32);
        let expected = [p18,
            p13,
            big(27_343_750),
            big(187_500),
            big(1750),
            big(5),
            big(1)];
        assert_eq!(q.coeffs(), &expected[..]);
        assert!(exterior_square_is_balanced(&five(), &q));
    }

    #[test]
    fn exterior_square_integer_roots() {
        // roots {1, 2, 3, 4}: e = (10, 35, 50, 24); products {2, 3, 4, 6, 8, 12}
        let q = exterior_square_of_quartic([&big(10), &big(35), &big(50), &big(24)]);
        let expected = UniPoly::from_roots(&[2, 3, 4, 6, 8, 12].map(BigInt::from));
        assert_eq!(q, expected);
    }

    #[test]
    fn scholten_loads() {
        let ds = Dataset::scholten();
        assert_eq!(ds.n, 6);
        let ps: Vec<u64> = ds.records.iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![5, 7, 11, 13, 17, 19, 23, 29]);
        let bs: Vec<BigInt> = ds.records.iter().map(|r| r.b.clone()).collect();
        let expected: Vec<BigInt> = [-5, -189, 517, -1742, -1802, -4275, 14536, 16936]
            .iter()
            .map(|&v| big(v))
            .collect();
        assert_eq!(bs, expected);
        assert!(ds.traces_generate_field());
        for rec in &ds.records {
            let q = exterior_square(rec);
            assert_eq!(q.coeff(5), -rec.b.clone());
            assert!(exterior_square_is_balanced(rec, &q));
        }
    }

    #[test]
    fn rejects_prime_dividing_level() {
        let text = r#"{"N": 6, "records": [{"p": 3, "a": [1, 1], "b": 0}]}"#;
        match load_dataset(text) {
            Err(DatasetError::Invalid(issues)) => {
                assert_eq!(issues[0].index, 0);
                assert_eq!(issues[0].kind, IssueKind::DividesLevel { n: 6 });
            }
            other => panic!("expected invalid dataset, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_and_reports_location() {
        let text = r#"{"N": 6, "records": [
            {"p": 5, "a": [1, 1], "b": 0},
            {"p": 5, "a": [2, 1], "b": 0}]}"#;
        let Err(DatasetError::Invalid(issues)) = load_dataset(text) else {
            panic!("duplicate accepted");
        };
        assert_eq!(issues[0].index, 1);
        assert_eq!(issues[0].kind, IssueKind::Duplicate { first_index: 0 });
        assert!(issues[0].to_string().starts_with("records[1] (p = 5)"));
    }

    #[test]
    fn empty_records_are_accepted_but_flagged() {
        let ds = load_dataset(r#"{"N": 6, "twist": {}, "records": []}"#).unwrap();
        assert!(ds.records.is_empty());
        assert!(!ds.traces_generate_field());
    }

    #[test]
    fn parse_errors_carry_locations() {
        let err = load_dataset("{\"N\": 6,\n \"records\": [}").unwrap_err();
        assert!(matches!(err, DatasetError::Syntax { line: 2, .. }), "{err}");
        assert!(err.is_parse_error());

        let err = load_dataset(r#"{"N": 6, "records": [{"p": 5, "a": [1], "b": 0}]}"#).unwrap_err();
        assert_eq!(err.to_string(), "$.records[0].a: expected [x, y]");

        let err = load_dataset(r#"{"N": 6, "records": [{"p": 5, "a": [1, 2], "b": 0.5}]}"#)
            .unwrap_err();
        assert!(err.to_string().starts_with("$.records[0].b"), "{err}");

        let err = load_dataset(r#"{"records": []}"#).unwrap_err();
        assert!(err.to_string().contains("`N`"));
    }

    #[test]
    fn big_coefficients_survive_parsing() {
        let text = r#"{"N": 1, "records": [{"p": 5, "a": [0, 0], "b": 123456789012345678901234567890}]}"#;
        let ds = parse_dataset(text).unwrap();
        assert_eq!(
            ds.records[0].b.to_string(),
            "123456789012345678901234567890"
        );
    }
}
