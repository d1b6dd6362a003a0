//! Brute-force and numerical oracles for the identities the checkers rely on.
//!
//! Nothing here calls into [`crate::conditions`] or [`crate::sieve`].

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::frobdata::{charpoly, exterior_square, Dataset, FrobeniusRecord};
use crate::poly::{complex_roots, RootError};

pub const DEFAULT_SEED: u64 = 0x6a1e_7e9c;
pub const DEFAULT_TRIALS: usize = 500;

/// Primes used as matrix coefficient fields.
const FIELDS: [u64; 8] = [5, 7, 11, 13, 17, 19, 23, 101];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{suite}: counterexample {witness}")]
    Counterexample { suite: &'static str, witness: String },
    #[error("p = {p}: norm(a) = {norm} exceeds 16p³ = {bound}")]
    NormBound { p: u64, norm: String, bound: String },
    #[error("p = {p}: root {root} has |α| = {modulus}, expected {expected}")]
    OffCircle {
        p: u64,
        root: Complex64,
        modulus: f64,
        expected: f64,
    },
    #[error("p = {p}: exterior square roots {exterior:?} differ from pairwise products {products:?}")]
    ProductMismatch {
        p: u64,
        exterior: Vec<Complex64>,
        products: Vec<Complex64>,
    },
    #[error("p = {p}: {source}")]
    Roots { p: u64, source: RootError },
}

/// Independent generator for trial `index` of a suite.
fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `(t₁, t₂, t₃, t₄)` of `∏ (x − r)`.
pub fn quartic_from_roots(r: [i128; 4]) -> [i128; 4] {
    let e1 = r.iter().sum::<i128>();
    let mut e2 = 0;
    let mut e3 = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            e2 += r[i] * r[j];
            for k in j + 1..4 {
                e3 += r[i] * r[j] * r[k];
            }
        }
    }
    let e4 = r.iter().product::<i128>();
    [-e1, e2, -e3, e4]
}

/// `t₃² + t₄t₁² = t₁t₂t₃`, satisfied when two roots are opposite.
pub fn opposite_root_relation(t: [i128; 4], q: Option<u64>) -> bool {
    let [t1, t2, t3, t4] = t;
    let diff = t3 * t3 + t4 * t1 * t1 - t1 * t2 * t3;
    match q {
        Some(q) => diff.rem_euclid(q as i128) == 0,
        None => diff == 0,
    }
}

/// `t₁²t₂ + t₄ = t₃t₁`, satisfied when three roots sum to zero.
pub fn sum_zero_relation(t: [i128; 4], q: Option<u64>) -> bool {
    let [t1, t2, t3, t4] = t;
    let diff = t1 * t1 * t2 + t4 - t3 * t1;
    match q {
        Some(q) => diff.rem_euclid(q as i128) == 0,
        None => diff == 0,
    }
}

/// A 4×4 matrix over `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteFieldMatrix {
    pub q: u64,
    pub entries: [[u64; 4]; 4],
}

impl FiniteFieldMatrix {
    pub fn new(q: u64, entries: [[u64; 4]; 4]) -> Self {
        let mut m = FiniteFieldMatrix { q, entries };
        for row in &mut m.entries {
            for x in row {
                *x %= q;
            }
        }
        m
    }

    pub fn identity(q: u64) -> Self {
        Self::diagonal(q, [1, 1, 1, 1])
    }

    pub fn diagonal(q: u64, d: [u64; 4]) -> Self {
        let mut e = [[0; 4]; 4];
        for i in 0..4 {
            e[i][i] = d[i];
        }
        Self::new(q, e)
    }

    /// The matrix sending basis vector `j` to `scales[j]` times basis vector
    /// `perm[j]`.
    pub fn monomial(q: u64, perm: [usize; 4], scales: [u64; 4]) -> Self {
        let mut e = [[0; 4]; 4];
        for j in 0..4 {
            e[perm[j]][j] = scales[j];
        }
        Self::new(q, e)
    }

    /// The standard alternating form with blocks `[[0, I], [−I, 0]]`.
    pub fn standard_form(q: u64) -> Self {
        let mut e = [[0; 4]; 4];
        e[0][2] = 1;
        e[1][3] = 1;
        e[2][0] = q - 1;
        e[3][1] = q - 1;
        Self::new(q, e)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut e = [[0u64; 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum::<u64>() % self.q;
            }
        }
        FiniteFieldMatrix { q: self.q, entries: e }
    }

    pub fn transpose(&self) -> Self {
        let mut e = [[0; 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.entries[j][i];
            }
        }
        FiniteFieldMatrix { q: self.q, entries: e }
    }

    pub fn scale(&self, s: u64) -> Self {
        let mut m = *self;
        for row in &mut m.entries {
            for x in row {
                *x = *x * s % self.q;
            }
        }
        m
    }

    fn minor(&self, idx: &[usize]) -> i128 {
        let n = idx.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return self.entries[idx[0]][idx[0]] as i128;
        }
        // Laplace expansion along the first chosen row
        let r = idx[0];
        let mut total = 0i128;
        for (pos, &c) in idx.iter().enumerate() {
            let rows: Vec<usize> = idx[1..].to_vec();
            let cols: Vec<usize> = idx.iter().copied().filter(|&x| x != c).collect();
            let sub = self.submatrix_det(&rows, &cols);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            total += sign * self.entries[r][c] as i128 * sub;
        }
        total.rem_euclid(self.q as i128)
    }

    fn submatrix_det(&self, rows: &[usize], cols: &[usize]) -> i128 {
        if rows.is_empty() {
            return 1;
        }
        let mut total = 0i128;
        for (pos, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            total += sign * self.entries[rows[0]][c] as i128 * self.submatrix_det(&rows[1..], &rest);
        }
        total.rem_euclid(self.q as i128)
    }

    pub fn det(&self) -> u64 {
        self.minor(&[0, 1, 2, 3]) as u64
    }

    /// `(t₁, …, t₄)` with `det(x − M) = x⁴ + t₁x³ + t₂x² + t₃x + t₄`, reduced
    /// mod `q`, from sums of principal minors.
    pub fn charpoly(&self) -> [i128; 4] {
        let q = self.q as i128;
        let mut sums = [0i128; 5];
        for mask in 1u32..16 {
            let idx: Vec<usize> = (0..4).filter(|&i| mask & (1 << i) != 0).collect();
            sums[idx.len()] += self.minor(&idx);
        }
        [
            (-sums[1]).rem_euclid(q),
            sums[2].rem_euclid(q),
            (-sums[3]).rem_euclid(q),
            sums[4].rem_euclid(q),
        ]
    }
}

fn random_units(rng: &mut ChaCha8Rng, q: u64) -> [u64; 4] {
    [(); 4].map(|_| rng.gen_range(1..q))
}

fn run_trials<F>(suite: &'static str, trials: usize, seed: u64, trial: F) -> Result<(), OracleError>
where
    F: Fn(&mut ChaCha8Rng) -> Option<String> + Sync,
{
    let failure = (0..trials)
        .into_par_iter()
        .filter_map(|i| trial(&mut trial_rng(seed, i)).map(|w| (i, w)))
        .min_by_key(|(i, _)| *i);
    match failure {
        Some((_, witness)) => Err(OracleError::Counterexample { suite, witness }),
        None => Ok(()),
    }
}

/// Random integer quartics with two opposite roots, then random monomial
/// matrices with odd permutation part, all satisfy the opposite-root relation.
pub fn opposite_root_identity_check(trials: usize, seed: u64) -> Result<(), OracleError> {
    run_trials("opposite roots", trials, seed, |rng| {
        let a: i128 = rng.gen_range(-50..=50);
        let roots = [a, -a, rng.gen_range(-50..=50), rng.gen_range(-50..=50)];
        let t = quartic_from_roots(roots);
        if !opposite_root_relation(t, None) {
            return Some(format!("roots {roots:?}"));
        }
        let q = FIELDS[rng.gen_range(0..FIELDS.len())];
        let perm = ODD_PERMUTATIONS[rng.gen_range(0..ODD_PERMUTATIONS.len())];
        let m = FiniteFieldMatrix::monomial(q, perm, random_units(rng, q));
        (!opposite_root_relation(m.charpoly(), Some(q))).then(|| format!("{m:?}"))
    })
}

/// As [`opposite_root_identity_check`], for three roots summing to zero and
/// monomial matrices whose permutation is a 3-cycle.
pub fn sum_zero_identity_check(trials: usize, seed: u64) -> Result<(), OracleError> {
    run_trials("sum zero", trials, seed, |rng| {
        let a: i128 = rng.gen_range(-50..=50);
        let b: i128 = rng.gen_range(-50..=50);
        let roots = [a, b, -a - b, rng.gen_range(-50..=50)];
        let t = quartic_from_roots(roots);
        if !sum_zero_relation(t, None) {
            return Some(format!("roots {roots:?}"));
        }
        let q = FIELDS[rng.gen_range(0..FIELDS.len())];
        let perm = THREE_CYCLES[rng.gen_range(0..THREE_CYCLES.len())];
        let m = FiniteFieldMatrix::monomial(q, perm, random_units(rng, q));
        (!sum_zero_relation(m.charpoly(), Some(q))).then(|| format!("{m:?}"))
    })
}

/// All transpositions and 4-cycles of S₄, as images of 0..4.
pub const ODD_PERMUTATIONS: [[usize; 4]; 12] = [
    [1, 0, 2, 3],
    [2, 1, 0, 3],
    [3, 1, 2, 0],
    [0, 2, 1, 3],
    [0, 3, 2, 1],
    [0, 1, 3, 2],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [2, 0, 3, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 2, 0, 1],
];

/// All 3-cycles of S₄.
pub const THREE_CYCLES: [[usize; 4]; 8] = [
    [1, 2, 0, 3],
    [2, 0, 1, 3],
    [1, 3, 2, 0],
    [3, 0, 2, 1],
    [2, 1, 3, 0],
    [3, 1, 0, 2],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
];

/// A random symplectic similitude over `F_q` and its multiplier: a product of
/// transvections `I + t·v·vᵀJ`, a multiplier matrix `diag(1, 1, m, m)` and a
/// scalar.
pub fn random_symplectic_similitude(rng: &mut ChaCha8Rng, q: u64) -> (FiniteFieldMatrix, u64) {
    let j = FiniteFieldMatrix::standard_form(q);
    let mut g = FiniteFieldMatrix::identity(q);
    for _ in 0..rng.gen_range(1..=8) {
        let v: [u64; 4] = [(); 4].map(|_| rng.gen_range(0..q));
        let t = rng.gen_range(0..q);
        let mut outer = [[0u64; 4]; 4];
        for (r, row) in outer.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = v[r] * v[c] % q * t % q;
            }
        }
        let n = FiniteFieldMatrix::new(q, outer).mul(&j);
        let mut tr = FiniteFieldMatrix::identity(q);
        for r in 0..4 {
            for c in 0..4 {
                tr.entries[r][c] = (tr.entries[r][c] + n.entries[r][c]) % q;
            }
        }
        g = g.mul(&tr);
    }
    let m = rng.gen_range(1..q);
    let s = rng.gen_range(1..q);
    let d = FiniteFieldMatrix::diagonal(q, [1, 1, m, m]);
    let g = g.mul(&d).scale(s);
    (g, m * s % q * s % q)
}

/// Whether `MᵀJM = μJ`.
pub fn is_symplectic_similitude(m: &FiniteFieldMatrix, mu: u64) -> bool {
    let j = FiniteFieldMatrix::standard_form(m.q);
    m.transpose().mul(&j).mul(m) == j.scale(mu)
}

/// Characteristic polynomials of symplectic similitudes with multiplier `m`
/// satisfy `t₃ = m·t₁` and `t₄ = m²`.
pub fn reciprocal_pairs_check(trials: usize, seed: u64) -> Result<(), OracleError> {
    run_trials("reciprocal pairs", trials, seed, |rng| {
        let q = FIELDS[rng.gen_range(0..FIELDS.len())];
        let (g, mu) = random_symplectic_similitude(rng, q);
        if !is_symplectic_similitude(&g, mu) {
            return Some(format!("sampler left the group: {g:?}"));
        }
        reciprocal_violation(&g, mu)
    })
}

fn reciprocal_violation(g: &FiniteFieldMatrix, mu: u64) -> Option<String> {
    let q = g.q as i128;
    let mu = mu as i128;
    let [t1, _, t3, t4] = g.charpoly();
    let ok = (t3 - mu * t1).rem_euclid(q) == 0 && (t4 - mu * mu).rem_euclid(q) == 0;
    (!ok).then(|| format!("{g:?} with multiplier {mu}"))
}

/// Complex roots of the exterior square agree with the pairwise products of
/// the roots of the characteristic polynomial.
pub fn exterior_square_numeric_check(rec: &FrobeniusRecord) -> Result<(), OracleError> {
    let roots_err = |source| OracleError::Roots { p: rec.p, source };
    let alpha = complex_roots(&charpoly(rec)).map_err(roots_err)?;
    let exterior = complex_roots(&exterior_square(rec)).map_err(roots_err)?;
    let mut products = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            products.push(alpha[i] * alpha[j]);
        }
    }
    if multisets_close(&exterior, &products, 1e-6) {
        Ok(())
    } else {
        Err(OracleError::ProductMismatch {
            p: rec.p,
            exterior,
            products,
        })
    }
}

/// Greedy matching within relative tolerance.
pub fn multisets_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - b[i]).norm().total_cmp(&(x - b[j]).norm()));
        match best {
            Some(j) if (x - b[j]).norm() <= tol * x.norm().max(1.0) => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

/// Exact norm bound, then every complex root on `|α| = p^{3/2}`.
pub fn purity_numeric_check(rec: &FrobeniusRecord) -> Result<(), OracleError> {
    let norm = rec.a.norm();
    let bound = rec.purity_bound();
    if norm > bound {
        return Err(OracleError::NormBound {
            p: rec.p,
            norm: norm.to_string(),
            bound: bound.to_string(),
        });
    }
    let expected = rec.p_big().to_f64().unwrap_or(f64::NAN).powf(1.5);
    let roots = complex_roots(&charpoly(rec)).map_err(|source| OracleError::Roots { p: rec.p, source })?;
    for root in roots {
        let modulus = root.norm();
        if (modulus - expected).abs() > 1e-6 * expected {
            return Err(OracleError::OffCircle {
                p: rec.p,
                root,
                modulus,
                expected,
            });
        }
    }
    Ok(())
}

/// Outcome of one oracle suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub trials: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

fn suite(suite: &'static str, trials: usize, result: Result<(), OracleError>) -> SuiteResult {
    SuiteResult {
        suite,
        trials,
        pass: result.is_ok(),
        failure: result.err().map(|e| e.to_string()),
    }
}

fn per_record(ds: &Dataset, check: fn(&FrobeniusRecord) -> Result<(), OracleError>) -> Result<(), OracleError> {
    ds.records.iter().try_for_each(check)
}

/// Every suite, with the randomized ones at `trials` trials.
pub fn run_all(ds: &Dataset, trials: usize, seed: u64) -> Vec<SuiteResult> {
    vec![
        suite("opposite_roots", trials, opposite_root_identity_check(trials, seed)),
        suite("sum_zero", trials, sum_zero_identity_check(trials, seed)),
        suite("reciprocal_pairs", trials, reciprocal_pairs_check(trials, seed)),
        suite(
            "exterior_square_numeric",
            ds.records.len(),
            per_record(ds, exterior_square_numeric_check),
        ),
        suite("purity_numeric", ds.records.len(), per_record(ds, purity_numeric_check)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::EisensteinInt;
    use crate::frobdata::exterior_square_of_quartic;
    use crate::poly::UniPoly;
    use num_bigint::BigInt;

    #[test]
    fn relation_examples() {
        assert!(opposite_root_relation(quartic_from_roots([2, -2, 3, 5]), None));
        assert!(sum_zero_relation(quartic_from_roots([1, 2, -3, 7]), None));
        assert!(!sum_zero_relation(quartic_from_roots([1, 1, 1, 1]), None));
        assert_eq!(quartic_from_roots([1, 2, -3, 7]), [-7, -7, 55, -42]);
    }

    #[test]
    fn opposite_relation_fails_without_opposite_roots() {
        assert!(!opposite_root_relation(quartic_from_roots([1, 2, 3, 4]), None));
        let mut rng = trial_rng(DEFAULT_SEED, 0);
        let failures = (0..100)
            .filter(|_| {
                let r = [(); 4].map(|_| rng.gen_range(1..=50i128));
                !opposite_root_relation(quartic_from_roots(r), None)
            })
            .count();
        assert!(failures > 0);
    }

    #[test]
    fn four_cycle_over_f13() {
        let mut rng = trial_rng(7, 1);
        for _ in 0..20 {
            let m = FiniteFieldMatrix::monomial(13, [1, 2, 3, 0], random_units(&mut rng, 13));
            let t = m.charpoly();
            assert_eq!(&t[..3], &[0, 0, 0]);
            assert!(opposite_root_relation(t, Some(13)));
        }
    }

    #[test]
    fn three_cycles_over_f7() {
        let mut rng = trial_rng(11, 2);
        for perm in THREE_CYCLES {
            let m = FiniteFieldMatrix::monomial(7, perm, random_units(&mut rng, 7));
            assert!(sum_zero_relation(m.charpoly(), Some(7)));
        }
    }

    #[test]
    fn permutation_tables_have_the_right_cycle_types() {
        fn cycle_lengths(p: [usize; 4]) -> Vec<usize> {
            let mut seen = [false; 4];
            let mut out = Vec::new();
            for s in 0..4 {
                let (mut k, mut len) = (s, 0);
                while !seen[k] {
                    seen[k] = true;
                    k = p[k];
                    len += 1;
                }
                if len > 0 {
                    out.push(len);
                }
            }
            out.sort_unstable();
            out
        }
        for p in ODD_PERMUTATIONS {
            let c = cycle_lengths(p);
            assert!(c == vec![1, 1, 2] || c == vec![4], "{p:?}");
        }
        for p in THREE_CYCLES {
            assert_eq!(cycle_lengths(p), vec![1, 3]);
        }
    }

    #[test]
    fn charpoly_over_field_matches_integer_expansion() {
        let q = 101;
        let m = FiniteFieldMatrix::diagonal(q, [2, 3, 5, 7]);
        let t = quartic_from_roots([2, 3, 5, 7]).map(|x| x.rem_euclid(q as i128));
        assert_eq!(m.charpoly(), t);
        assert_eq!(m.det(), 210 % q);
    }

    #[test]
    fn identity_and_diagonal_similitudes() {
        let q = 11;
        let id = FiniteFieldMatrix::identity(q);
        let t = id.charpoly();
        assert_eq!(t, [(-4i128).rem_euclid(11), 6, (-4i128).rem_euclid(11), 1]);
        assert!(reciprocal_violation(&id, 1).is_none());
        // diag(u, v, m/u, m/v)
        let (u, v, m) = (3u64, 5u64, 7u64);
        let inv = |x: u64| crate::arith::pow_mod(x, q - 2, q);
        let d = FiniteFieldMatrix::diagonal(q, [u, v, m * inv(u) % q, m * inv(v) % q]);
        assert!(is_symplectic_similitude(&d, m));
        assert!(reciprocal_violation(&d, m).is_none());
    }

    #[test]
    fn sampler_stays_in_the_group_over_f11() {
        for i in 0..200 {
            let mut rng = trial_rng(DEFAULT_SEED, i);
            let (g, mu) = random_symplectic_similitude(&mut rng, 11);
            assert!(is_symplectic_similitude(&g, mu));
            assert!(reciprocal_violation(&g, mu).is_none());
        }
    }

    #[test]
    fn randomized_suites_pass() {
        assert_eq!(opposite_root_identity_check(500, DEFAULT_SEED), Ok(()));
        assert_eq!(sum_zero_identity_check(500, DEFAULT_SEED), Ok(()));
        assert_eq!(reciprocal_pairs_check(500, DEFAULT_SEED), Ok(()));
    }

    #[test]
    fn suites_are_deterministic() {
        let ds = Dataset::scholten();
        assert_eq!(run_all(&ds, 50, 3), run_all(&ds, 50, 3));
    }

    #[test]
    fn numeric_checks_on_scholten() {
        for r in &Dataset::scholten().records {
            exterior_square_numeric_check(r).unwrap();
            purity_numeric_check(r).unwrap();
        }
    }

    #[test]
    fn exterior_square_of_integer_roots() {
        let t = quartic_from_roots([1, 2, 3, 4]);
        let e = [-t[0], t[1], -t[2], t[3]].map(BigInt::from);
        let q = exterior_square_of_quartic([&e[0], &e[1], &e[2], &e[3]]);
        let expected = UniPoly::from_roots(&[2, 3, 4, 6, 8, 12].map(BigInt::from));
        assert_eq!(q, expected);
    }

    #[test]
    fn exterior_square_formula_on_random_quartics() {
        let mut rng = trial_rng(DEFAULT_SEED, 99);
        for _ in 0..20 {
            let roots = [(); 4].map(|_| rng.gen_range(-9..=9i128));
            let t = quartic_from_roots(roots);
            let e = [-t[0], t[1], -t[2], t[3]].map(BigInt::from);
            let q = exterior_square_of_quartic([&e[0], &e[1], &e[2], &e[3]]);
            let mut products = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    products.push(BigInt::from(roots[i] * roots[j]));
                }
            }
            assert_eq!(q, UniPoly::from_roots(&products));
        }
    }

    #[test]
    fn purity_failures() {
        let bad = FrobeniusRecord::new(5, EisensteinInt::rational(50), 0);
        assert!(matches!(purity_numeric_check(&bad), Err(OracleError::NormBound { .. })));
        for p in [2u64, 5, 29] {
            let p3 = BigInt::from(p).pow(3);
            let r = FrobeniusRecord::new(p, EisensteinInt::zero(), p3 * 2);
            purity_numeric_check(&r).unwrap();
        }
        // within the norm bound but off the circle
        let off = FrobeniusRecord::new(5, EisensteinInt::rational(40), 0);
        assert!(matches!(purity_numeric_check(&off), Err(OracleError::OffCircle { .. })));
    }
}
