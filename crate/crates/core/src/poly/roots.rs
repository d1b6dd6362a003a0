//! Floating-point root finding (Aberth–Ehrlich iteration).
//!
//! Only used by the numerical oracles; nothing in the certifying path
//! depends on these values.

use num_complex::Complex64;
use thiserror::Error;

use super::{Scalar, UniPoly};

const MAX_ITERATIONS: usize = 5000;
const CLUSTER: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("coefficients do not fit in double precision")]
    Overflow,
    #[error("root iteration did not converge after {iterations} steps (worst backward error {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// All `deg f` complex roots of `f`, with multiplicity.
pub fn complex_roots<C: Scalar>(f: &UniPoly<C>) -> Result<Vec<Complex64>, RootError> {
    if f.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let coeffs = f.to_complex();
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(RootError::Overflow);
    }
    roots_of(&coeffs)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |c_k| |z|^k`, the scale against which a residual is judged.
fn magnitude(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

fn roots_of(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    // zero roots are exact
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let lead = *coeffs.last().unwrap();
    let poly: Vec<Complex64> = coeffs[zeros..].iter().map(|c| c / lead).collect();
    let n = poly.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }

    let radius = poly[0].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(&poly, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let delta = w / (Complex64::new(1.0, 0.0) - w * s);
            if !delta.re.is_finite() || !delta.im.is_finite() {
                continue;
            }
            z[k] -= delta;
            worst = worst.max(delta.norm() / z[k].norm().max(f64::MIN_POSITIVE));
        }
        if worst < 1e-15 {
            break;
        }
    }

    let residual = z
        .iter()
        .map(|&r| horner(&poly, r).0.norm() / magnitude(&poly, r))
        .fold(0.0, f64::max);
    if residual > 1e-8 || z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(RootError::NoConvergence {
            iterations,
            residual,
        });
    }

    merge_clusters(&poly, &mut z);
    roots.extend(z);
    Ok(roots)
}

/// A root of multiplicity m is only found to about `eps^{1/m}`; replace each
/// tight cluster by the zero of the (m−1)-th derivative near its mean.
fn merge_clusters(poly: &[Complex64], z: &mut [Complex64]) {
    let n = z.len();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let scale = z[i].norm().max(1.0);
        // grow the cluster transitively
        let mut members = vec![i];
        let mut k = 0;
        while k < members.len() {
            let c = z[members[k]];
            for j in i + 1..n {
                if !assigned[j] && !members.contains(&j) && (z[j] - c).norm() < CLUSTER * scale {
                    members.push(j);
                }
            }
            k += 1;
        }
        if members.len() < 2 {
            continue;
        }
        let m = members.len();
        let mean = members.iter().map(|&j| z[j]).sum::<Complex64>() / m as f64;

        let mut derivs = vec![poly.to_vec()];
        for _ in 1..m {
            derivs.push(derivative(derivs.last().unwrap()));
        }
        let target = &derivs[m - 1];
        let mut x = mean;
        for _ in 0..50 {
            let (p, dp) = horner(target, x);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.norm() <= 1e-16 * x.norm().max(1.0) {
                break;
            }
        }
        // keep the merge only if x really is a common zero of f, ..., f^(m−1)
        // within the rounding error bound of Horner's rule
        let genuine = derivs.iter().all(|d| {
            let bound = 2.0 * d.len() as f64 * f64::EPSILON * magnitude(d, x);
            horner(d, x).0.norm() <= bound
        });
        if genuine && (x - mean).norm() < CLUSTER * scale {
            for &j in &members {
                z[j] = x;
                assigned[j] = true;
            }
        }
    }
}
