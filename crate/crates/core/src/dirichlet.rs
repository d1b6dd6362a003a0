//! Quadratic and cubic Dirichlet characters unramified outside `N`.
//!
//! Values live in μ₆ ∪ {0} and are stored as exponents of a fixed primitive
//! sixth root of unity, so ω = e^{2πi/3} is exponent 2 and −1 is exponent 3.

use std::fmt;

use serde::Serialize;

use crate::arith;

/// A value in μ₆ ∪ {0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CharValue {
    Zero,
    /// `e^{2πi k/6}` for the stored `k` in `0..6`.
    Unit(u8),
}

impl CharValue {
    pub const ONE: CharValue = CharValue::Unit(0);
    pub const MINUS_ONE: CharValue = CharValue::Unit(3);
    pub const OMEGA: CharValue = CharValue::Unit(2);
    pub const OMEGA_SQUARED: CharValue = CharValue::Unit(4);

    pub fn unit(k: u64) -> CharValue {
        CharValue::Unit((k % 6) as u8)
    }

    pub fn is_one(self) -> bool {
        self == CharValue::ONE
    }

    pub fn is_minus_one(self) -> bool {
        self == CharValue::MINUS_ONE
    }
}

impl std::ops::Mul for CharValue {
    type Output = CharValue;

    fn mul(self, rhs: CharValue) -> CharValue {
        match (self, rhs) {
            (CharValue::Unit(a), CharValue::Unit(b)) => CharValue::Unit((a + b) % 6),
            _ => CharValue::Zero,
        }
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CharValue::Zero => "0",
            CharValue::Unit(0) => "1",
            CharValue::Unit(1) => "-ω²",
            CharValue::Unit(2) => "ω",
            CharValue::Unit(3) => "-1",
            CharValue::Unit(4) => "ω²",
            CharValue::Unit(_) => "-ω",
        };
        f.write_str(s)
    }
}

/// One cyclic factor of a cubic character: `g ↦ ω^exponent` on `(ℤ/modulus)*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubicComponent {
    pub modulus: u64,
    pub generator: u64,
    /// 1 or 2.
    pub exponent: u8,
}

impl CubicComponent {
    fn eval(&self, n: u64) -> CharValue {
        let m = self.modulus;
        let r = n % m;
        if num_integer::gcd(r, m) != 1 {
            return CharValue::Zero;
        }
        // the discrete log mod 3 is read off from the image in the 3-torsion
        let k = arith::euler_phi(m) / 3;
        let target = arith::pow_mod(r, k, m);
        let g = arith::pow_mod(self.generator, k, m);
        let log3 = if target == 1 {
            0
        } else if target == g {
            1
        } else {
            debug_assert_eq!(target, arith::mul_mod(g, g, m));
            2
        };
        CharValue::unit(2 * log3 * self.exponent as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletCharacter {
    /// The Kronecker symbol `(d/·)` of a fundamental discriminant.
    Quadratic { discriminant: i64 },
    /// Product of order-3 characters on prime-power moduli.
    Cubic { components: Vec<CubicComponent> },
}

impl DirichletCharacter {
    pub fn quadratic(discriminant: i64) -> Self {
        DirichletCharacter::Quadratic { discriminant }
    }

    /// The conductor-9 character with `χ(2) = ω`.
    pub fn cubic_conductor_nine() -> Self {
        DirichletCharacter::Cubic {
            components: vec![CubicComponent {
                modulus: 9,
                generator: 2,
                exponent: 1,
            }],
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            DirichletCharacter::Quadratic { .. } => 2,
            DirichletCharacter::Cubic { .. } => 3,
        }
    }

    /// Conductor, which is also a period.
    pub fn conductor(&self) -> u64 {
        match self {
            DirichletCharacter::Quadratic { discriminant } => discriminant.unsigned_abs(),
            DirichletCharacter::Cubic { components } => components.iter().map(|c| c.modulus).product(),
        }
    }

    pub fn evaluate(&self, n: i64) -> CharValue {
        match self {
            DirichletCharacter::Quadratic { discriminant } => match kronecker(*discriminant, n) {
                0 => CharValue::Zero,
                1 => CharValue::ONE,
                _ => CharValue::MINUS_ONE,
            },
            DirichletCharacter::Cubic { components } => {
                let m = self.conductor();
                let r = n.rem_euclid(m as i64) as u64;
                components
                    .iter()
                    .fold(CharValue::ONE, |acc, c| acc * c.eval(r))
            }
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirichletCharacter::Quadratic { discriminant } => write!(f, "({discriminant}/·)"),
            DirichletCharacter::Cubic { components } => {
                write!(f, "cubic mod {}:", self.conductor())?;
                for c in components {
                    let image = if c.exponent == 1 { "ω" } else { "ω²" };
                    write!(f, " χ({}) = {image} mod {}", c.generator, c.modulus)?;
                }
                Ok(())
            }
        }
    }
}

/// The Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return i8::from(a == 1 || a == -1);
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut sign = 1i8;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= twos;
    }
    // Jacobi symbol (a/n) for odd positive n
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// All nontrivial quadratic characters unramified outside the primes of `n`,
/// one per fundamental discriminant.
pub fn enumerate_quadratic(n: u64) -> Vec<DirichletCharacter> {
    let primes = arith::prime_divisors(n);
    let mut discs = vec![1i64];
    for &p in primes.iter().filter(|&&p| p != 2) {
        let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        let more: Vec<i64> = discs.iter().map(|d| d * star).collect();
        discs.extend(more);
    }
    if primes.first() == Some(&2) {
        let odd = discs.clone();
        for two in [-4, 8, -8] {
            discs.extend(odd.iter().map(|d| d * two));
        }
    }
    discs.retain(|&d| d != 1);
    discs.sort_by_key(|&d| (d.unsigned_abs(), d > 0));
    discs.into_iter().map(DirichletCharacter::quadratic).collect()
}

/// All cubic characters unramified outside the primes of `n`.
pub fn enumerate_cubic(n: u64) -> Vec<DirichletCharacter> {
    let slots: Vec<(u64, u64)> = arith::prime_divisors(n)
        .into_iter()
        .filter_map(|q| match q % 3 {
            0 => Some((9, 2)),
            1 => Some((q, arith::primitive_root(q))),
            _ => None,
        })
        .collect();
    let total = 3usize.pow(slots.len() as u32);
    (1..total)
        .map(|mut code| {
            let mut components = Vec::new();
            for &(modulus, generator) in &slots {
                let exponent = (code % 3) as u8;
                code /= 3;
                if exponent > 0 {
                    components.push(CubicComponent {
                        modulus,
                        generator,
                        exponent,
                    });
                }
            }
            DirichletCharacter::Cubic { components }
        })
        .collect()
}
