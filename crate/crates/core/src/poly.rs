//! Dense univariate polynomials over ℤ and ℤ[ζ] with exact resultants.
//!
//! Coefficients are stored in ascending degree order and the leading
//! coefficient is always nonzero (the zero polynomial has no coefficients).

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::eisenstein::EisensteinInt;

mod roots;

pub use roots::{complex_roots, RootError};

/// Coefficient ring of a [`UniPoly`]: an integral domain with exact division.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / rhs` when the quotient exists in the ring.
    fn exact_div(&self, rhs: &Self) -> Option<Self>;
    fn from_integer(n: BigInt) -> Self;
    /// Image under the fixed complex embedding (ζ ↦ (−1 + √−3)/2).
    fn to_complex(&self) -> Complex64;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if Zero::is_zero(rhs) {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        Zero::is_zero(&r).then_some(q)
    }
    fn from_integer(n: BigInt) -> Self {
        n
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Scalar for EisensteinInt {
    fn zero() -> Self {
        EisensteinInt::zero()
    }
    fn one() -> Self {
        EisensteinInt::one()
    }
    fn is_zero(&self) -> bool {
        EisensteinInt::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        self.checked_div(rhs)
    }
    fn from_integer(n: BigInt) -> Self {
        EisensteinInt::rational(n)
    }
    fn to_complex(&self) -> Complex64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        Complex64::new(x - 0.5 * y, 0.5 * 3f64.sqrt() * y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("resultant of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("binomial degree must be at least 1")]
    ZeroDegree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> UniPoly<C> {
    /// Builds a polynomial from ascending coefficients, trimming zeros.
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = C::one();
        UniPoly { coeffs }
    }

    /// `x^d − cst`.
    pub fn binomial(d: usize, cst: C) -> Self {
        let mut coeffs = vec![C::zero(); d + 1];
        coeffs[d] = C::one();
        coeffs[0] = coeffs[0].sub(&cst);
        UniPoly::new(coeffs)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C]) -> Self {
        roots.iter().fold(UniPoly::constant(C::one()), |acc, r| {
            acc.mul(&UniPoly::new(vec![r.neg(), C::one()]))
        })
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Scalar::is_one)
    }

    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc.mul(x).add(c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k).add(&rhs.coeff(k))).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k).sub(&rhs.coeff(k))).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, k: &C) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c.mul(k)).collect())
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&C::from_integer(BigInt::from(k))))
                .collect(),
        )
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(&self, modulus: &Self) -> Result<Self, PolyError> {
        if !modulus.is_monic() {
            return Err(PolyError::NotMonic);
        }
        let n = modulus.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        while r.len() > n {
            let top = r.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let shift = r.len() - n;
            for (j, m) in modulus.coeffs[..n].iter().enumerate() {
                r[shift + j] = r[shift + j].sub(&top.mul(m));
            }
        }
        Ok(UniPoly::new(r))
    }

    /// `x^d mod modulus` by repeated squaring in the quotient ring.
    pub fn pow_x_mod(d: u64, modulus: &Self) -> Result<Self, PolyError> {
        let mut acc = UniPoly::constant(C::one()).rem_monic(modulus)?;
        let mut base = UniPoly::monomial(1).rem_monic(modulus)?;
        let mut e = d;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem_monic(modulus)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem_monic(modulus)?;
            }
        }
        Ok(acc)
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> UniPoly<D> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Scalar::to_complex).collect()
    }
}

impl<C: Scalar> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let monomial = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k > 0 && c.is_one() {
                write!(f, "{monomial}")?;
            } else if k == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}){monomial}")?;
            }
        }
        Ok(())
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant<C: Scalar>(matrix: &[Vec<C>]) -> C {
    let n = matrix.len();
    if n == 0 {
        return C::one();
    }
    let mut m = matrix.to_vec();
    let mut negate = false;
    let mut prev = C::one();
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return C::zero();
        };
        if pivot != k {
            m.swap(k, pivot);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("Bareiss quotients are exact in an integral domain");
            }
            m[i][k] = C::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Sylvester matrix with the `deg g` shifted rows of `f` first, coefficients
/// in descending order.
pub fn sylvester_matrix<C: Scalar>(f: &UniPoly<C>, g: &UniPoly<C>) -> Vec<Vec<C>> {
    let m = f.degree().unwrap_or(0);
    let n = g.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (shift, count, p, deg) in [(0, n, f, m), (0, m, g, n)] {
        for r in 0..count {
            let mut row = vec![C::zero(); size];
            for k in 0..=deg {
                row[shift + r + (deg - k)] = p.coeff(k);
            }
            rows.push(row);
        }
    }
    rows
}

/// `Res(f, g) = det(Sylvester(f, g))`, equal to `lc(f)^{deg g} ∏ g(α)` over
/// the roots α of f.
pub fn resultant<C: Scalar>(f: &UniPoly<C>, g: &UniPoly<C>) -> Result<C, PolyError> {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Err(PolyError::ZeroPolynomial);
    };
    if m == 0 {
        return Ok(pow(&f.coeffs[0], n));
    }
    if n == 0 {
        return Ok(pow(&g.coeffs[0], m));
    }
    Ok(determinant(&sylvester_matrix(f, g)))
}

fn pow<C: Scalar>(c: &C, e: usize) -> C {
    (0..e).fold(C::one(), |acc, _| acc.mul(c))
}

/// `∏ r(α)` over the roots of a monic `f`, as the determinant of
/// multiplication by `r` on ℤ[x]/(f).
pub fn norm_in_quotient<C: Scalar>(f: &UniPoly<C>, r: &UniPoly<C>) -> Result<C, PolyError> {
    if !f.is_monic() {
        return Err(PolyError::NotMonic);
    }
    let n = f.degree().expect("monic polynomials are nonzero");
    let mut columns = Vec::with_capacity(n);
    let mut cur = r.rem_monic(f)?;
    for _ in 0..n {
        columns.push(cur.clone());
        cur = cur.mul(&UniPoly::monomial(1)).rem_monic(f)?;
    }
    let matrix: Vec<Vec<C>> = (0..n)
        .map(|i| columns.iter().map(|col| col.coeff(i)).collect())
        .collect();
    Ok(determinant(&matrix))
}

/// `Res(f, x^d − cst) = ∏ (α^d − cst)` for monic `f`.
///
/// `x^d` is first reduced modulo `f`, so the cost depends on `log d` and the
/// degree of `f`, not on `d`.
pub fn resultant_with_binomial<C: Scalar>(
    f: &UniPoly<C>,
    d: u64,
    cst: &C,
) -> Result<C, PolyError> {
    let mut binomial = BinomialResultant::new(f, d)?;
    Ok(binomial.at(cst))
}

/// Reuses `x^d mod f` across several constants.
#[derive(Debug, Clone)]
pub struct BinomialResultant<'a, C> {
    f: &'a UniPoly<C>,
    reduced: UniPoly<C>,
}

impl<'a, C: Scalar> BinomialResultant<'a, C> {
    pub fn new(f: &'a UniPoly<C>, d: u64) -> Result<Self, PolyError> {
        if !f.is_monic() {
            return Err(PolyError::NotMonic);
        }
        if d == 0 {
            return Err(PolyError::ZeroDegree);
        }
        Ok(BinomialResultant {
            f,
            reduced: UniPoly::pow_x_mod(d, f)?,
        })
    }

    /// `Res(f, x^d − cst)`.
    pub fn at(&mut self, cst: &C) -> C {
        let r = self.reduced.sub(&UniPoly::constant(cst.clone()));
        norm_in_quotient(self.f, &r).expect("f is monic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zpoly(c: &[i64]) -> UniPoly<BigInt> {
        UniPoly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn construction_trims() {
        let p = zpoly(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(zpoly(&[0, 0]).is_zero());
        assert_eq!(zpoly(&[]).degree(), None);
        assert_eq!(UniPoly::binomial(3, big(8)), zpoly(&[-8, 0, 0, 1]));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&zpoly(&[-1, 0, 1]), &zpoly(&[-1, 1])), Ok(big(0)));
        assert_eq!(resultant(&zpoly(&[1, 0, 1]), &zpoly(&[-2, 0, 1])), Ok(big(9)));
        // Res(x − a, x − b) = a − b with f-rows first
        for (a, b) in [(3, 7), (-2, 5), (0, 0), (11, -4)] {
            assert_eq!(
                resultant(&zpoly(&[-a, 1]), &zpoly(&[-b, 1])),
                Ok(big(a - b))
            );
        }
        assert_eq!(
            resultant(&zpoly(&[]), &zpoly(&[1, 1])),
            Err(PolyError::ZeroPolynomial)
        );
        // constant against degree-3
        assert_eq!(resultant(&zpoly(&[2]), &zpoly(&[1, 0, 0, 1])), Ok(big(8)));
    }

    #[test]
    fn resultant_matches_numeric_root_product() {
        // ∏ over roots ±i of (α² − 2) computed in floating point
        let roots = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let prod: Complex64 = roots.iter().map(|a| a * a - 2.0).product();
        assert!((prod - Complex64::new(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(resultant_with_binomial(&zpoly(&[-2, 1]), 3, &big(8)), Ok(big(0)));
        assert_eq!(resultant_with_binomial(&zpoly(&[-2, 0, 1]), 2, &big(3)), Ok(big(1)));
        assert_eq!(
            resultant(&zpoly(&[-2, 0, 1]), &UniPoly::binomial(2, big(3))),
            Ok(big(1))
        );
        assert_eq!(
            resultant_with_binomial(&zpoly(&[-2, 2]), 3, &big(8)),
            Err(PolyError::NotMonic)
        );
        assert_eq!(
            resultant_with_binomial(&zpoly(&[-2, 1]), 0, &big(8)),
            Err(PolyError::ZeroDegree)
        );
    }

    #[test]
    fn eisenstein_resultant() {
        // f = (x − ζ)(x − 2), g = x − ζ share a root
        let z = EisensteinInt::zeta();
        let two = EisensteinInt::rational(2);
        let f = UniPoly::from_roots(&[z.clone(), two.clone()]);
        let g = UniPoly::from_roots(std::slice::from_ref(&z));
        assert!(resultant(&f, &g).unwrap().is_zero());
        // Res(f, x − 1) = (ζ − 1)(2 − 1)
        let h = UniPoly::from_roots(&[EisensteinInt::one()]);
        let expected = &(&z - &EisensteinInt::one()) * &EisensteinInt::one();
        assert_eq!(resultant(&f, &h).unwrap(), expected);
        assert_eq!(
            resultant_with_binomial(&f, 3, &EisensteinInt::one()).unwrap(),
            EisensteinInt::zero()
        );
    }

    #[test]
    fn determinant_small() {
        let m = vec![
            vec![big(2), big(0), big(1)],
            vec![big(1), big(3), big(2)],
            vec![big(1), big(1), big(1)],
        ];
        assert_eq!(determinant(&m), big(2 + (1 - 3)));
        let pivot_swap = vec![vec![big(0), big(1)], vec![big(1), big(0)]];
        assert_eq!(determinant(&pivot_swap), big(-1));
    }

    #[test]
    fn derivative_and_eval() {
        let p = zpoly(&[1, -3, 0, 2]);
        assert_eq!(p.derivative(), zpoly(&[-3, 0, 6]));
        assert_eq!(p.eval(&big(2)), big(11));
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = UniPoly<BigInt>> {
        proptest::collection::vec(-20i64..20, 1..=max_deg + 1)
            .prop_map(|c| zpoly(&c))
            .prop_filter("nonzero", |p| !p.is_zero())
    }

    fn monic_poly(max_deg: usize) -> impl Strategy<Value = UniPoly<BigInt>> {
        proptest::collection::vec(-20i64..20, 0..=max_deg).prop_map(|mut c| {
            c.push(1);
            zpoly(&c)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn resultant_antisymmetry(f in small_poly(5), g in small_poly(5)) {
            let m = f.degree().unwrap();
            let n = g.degree().unwrap();
            let sign = if (m * n) % 2 == 0 { big(1) } else { big(-1) };
            prop_assert_eq!(resultant(&f, &g).unwrap(), sign * resultant(&g, &f).unwrap());
        }

        #[test]
        fn resultant_multiplicative(f in small_poly(4), g in small_poly(3), h in small_poly(3)) {
            let gh = g.mul(&h);
            prop_assert_eq!(
                resultant(&f, &gh).unwrap(),
                resultant(&f, &g).unwrap() * resultant(&f, &h).unwrap()
            );
        }

        #[test]
        fn resultant_with_integer_roots(roots in proptest::collection::vec(-9i64..9, 1..5), g in small_poly(4)) {
            let f = UniPoly::from_roots(&roots.iter().map(|&r| big(r)).collect::<Vec<_>>());
            let expected: BigInt = roots.iter().map(|&r| g.eval(&big(r))).product();
            prop_assert_eq!(resultant(&f, &g).unwrap(), expected);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn binomial_shortcut_agrees_with_sylvester(f in monic_poly(6), d in 1u64..=50, cst in -50i64..50) {
            let fast = resultant_with_binomial(&f, d, &big(cst)).unwrap();
            let slow = resultant(&f, &UniPoly::binomial(d as usize, big(cst))).unwrap();
            prop_assert_eq!(fast, slow);
        }
    }
}
