//! Arithmetic in the prime field Z_p.
//!
//! Moduli are capped below 2^31 so that the product of two residues always
//! fits in a `u64` without widening. Primality is checked with a
//! deterministic Miller-Rabin test that is exact over the whole `u64` range.

use std::fmt;

use crate::error::{Error, Result};

/// Exclusive upper bound on an admissible field modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Witness set for which Miller-Rabin is exact on every 64-bit input.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Returns `true` iff `candidate` is prime.
pub fn is_prime(candidate: u64) -> bool {
    if candidate < 2 {
        return false;
    }
    for &w in &MR_WITNESSES {
        if candidate == w {
            return true;
        }
        if candidate % w == 0 {
            return false;
        }
    }
    // candidate - 1 = d * 2^s with d odd
    let s = (candidate - 1).trailing_zeros();
    let d = (candidate - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let mut x = pow_mod_u64(w, d, candidate);
        if x == 1 || x == candidate - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, candidate);
            if x == candidate - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= floor` that is still a valid field modulus.
pub fn next_prime(floor: u64) -> Result<u64> {
    let mut c = floor.max(2);
    while c < MAX_MODULUS {
        if is_prime(c) {
            return Ok(c);
        }
        c += 1;
    }
    Err(Error::Overflow(format!("no prime >= {floor} below 2^31")))
}

/// A validated prime modulus `p` with `2 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldPrime(u64);

impl FieldPrime {
    pub fn new(value: u64) -> Result<Self> {
        if value >= MAX_MODULUS {
            return Err(Error::Overflow(format!(
                "modulus {value} must be below 2^31"
            )));
        }
        if !is_prime(value) {
            return Err(Error::NotPrime(value));
        }
        Ok(FieldPrime(value))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            residue: value % self.0,
            modulus: self,
        }
    }

    #[inline]
    pub(crate) fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub(crate) fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    /// Inverse of a nonzero residue by the extended Euclidean algorithm.
    pub(crate) fn inv(self, a: u64) -> Result<u64> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::NotInvertible { modulus: self.0 });
        }
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i64) as u64)
    }
}

impl fmt::Display for FieldPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A residue in `[0, p)` tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    residue: u64,
    modulus: FieldPrime,
}

impl FieldElement {
    pub fn new(value: u64, modulus: FieldPrime) -> Self {
        modulus.element(value)
    }

    #[inline]
    pub fn residue(self) -> u64 {
        self.residue
    }

    #[inline]
    pub fn modulus(self) -> FieldPrime {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    fn check(self, other: FieldElement) -> Result<FieldPrime> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(self.modulus)
    }

    pub fn mod_add(self, other: FieldElement) -> Result<FieldElement> {
        let p = self.check(other)?;
        Ok(FieldElement {
            residue: p.add(self.residue, other.residue),
            modulus: p,
        })
    }

    pub fn mod_sub(self, other: FieldElement) -> Result<FieldElement> {
        let p = self.check(other)?;
        Ok(FieldElement {
            residue: p.sub(self.residue, other.residue),
            modulus: p,
        })
    }

    pub fn mod_mul(self, other: FieldElement) -> Result<FieldElement> {
        let p = self.check(other)?;
        Ok(FieldElement {
            residue: p.mul(self.residue, other.residue),
            modulus: p,
        })
    }

    pub fn mod_inverse(self) -> Result<FieldElement> {
        Ok(FieldElement {
            residue: self.modulus.inv(self.residue)?,
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}
