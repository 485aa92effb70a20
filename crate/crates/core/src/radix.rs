//! Fixed-length base-p expansions and the choice of `(p, n)`.
//!
//! Digit order is little-endian: `digits[0]` is the least significant digit.
//! The order is part of the on-disk token layout and must not change.

use crate::error::{Error, Result};
use crate::field::{next_prime, FieldPrime};

/// Largest supported digit count.
pub const MAX_DIGITS: usize = 64;

/// A length-n vector of residues in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    digits: Vec<u32>,
    modulus: FieldPrime,
}

impl DigitVector {
    /// Validates every digit against the modulus.
    pub fn new(digits: Vec<u32>, modulus: FieldPrime) -> Result<Self> {
        check_digits(&digits, modulus)?;
        Ok(DigitVector { digits, modulus })
    }

    pub(crate) fn from_raw(digits: Vec<u32>, modulus: FieldPrime) -> Self {
        debug_assert!(digits.iter().all(|&d| (d as u64) < modulus.get()));
        DigitVector { digits, modulus }
    }

    pub fn zeros(len: usize, modulus: FieldPrime) -> Self {
        DigitVector {
            digits: vec![0; len],
            modulus,
        }
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn modulus(&self) -> FieldPrime {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.digits
    }
}

pub(crate) fn check_digits(digits: &[u32], modulus: FieldPrime) -> Result<()> {
    match digits.iter().position(|&d| d as u64 >= modulus.get()) {
        Some(position) => Err(Error::DigitOutOfRange {
            digit: digits[position] as u64,
            position,
            modulus: modulus.get(),
        }),
        None => Ok(()),
    }
}

/// A modulus, a digit count, and the resulting capacity `p^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RadixParams {
    p: FieldPrime,
    n: usize,
    capacity: u128,
}

impl RadixParams {
    /// Fails if `n` is outside `1..=64` or `p^n` does not fit in 128 bits.
    pub fn new(p: FieldPrime, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "digit count {n} outside 1..={MAX_DIGITS}"
            )));
        }
        let capacity = checked_pow(p.get(), n)
            .ok_or_else(|| Error::Overflow(format!("{p}^{n} does not fit in 128 bits")))?;
        Ok(RadixParams { p, n, capacity })
    }

    pub fn prime(&self) -> FieldPrime {
        self.p
    }

    pub fn digits(&self) -> usize {
        self.n
    }

    /// `p^n`, the number of distinct ids representable.
    pub fn capacity(&self) -> u128 {
        self.capacity
    }

    /// Base-p expansion of `id`, zero-padded to `n` digits.
    pub fn to_digits(&self, id: u64) -> Result<DigitVector> {
        let mut digits = vec![0u32; self.n];
        self.write_digits(id, &mut digits)?;
        Ok(DigitVector::from_raw(digits, self.p))
    }

    pub(crate) fn write_digits(&self, id: u64, out: &mut [u32]) -> Result<()> {
        debug_assert_eq!(out.len(), self.n);
        if id as u128 >= self.capacity {
            return Err(Error::IdOutOfRange {
                id: id as u128,
                capacity: self.capacity,
            });
        }
        let p = self.p.get();
        let mut rest = id;
        for d in out.iter_mut() {
            *d = (rest % p) as u32;
            rest /= p;
        }
        Ok(())
    }

    /// `sum(digits[i] * p^i)`. The result may exceed `u64` when `p^n` does.
    pub fn from_digits(&self, v: &DigitVector) -> Result<u128> {
        if v.modulus() != self.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: v.modulus().get(),
            });
        }
        self.value_of_slice(v.digits())
    }

    pub(crate) fn value_of_slice(&self, digits: &[u32]) -> Result<u128> {
        if digits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: digits.len(),
            });
        }
        check_digits(digits, self.p)?;
        let p = self.p.get() as u128;
        // Horner from the most significant digit; cannot overflow since the
        // value is below capacity, which fits in u128.
        Ok(digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * p + d as u128))
    }
}

/// Base-p expansion of `id`; see [`RadixParams::to_digits`].
pub fn to_digits(id: u64, params: &RadixParams) -> Result<DigitVector> {
    params.to_digits(id)
}

/// Integer value of a digit vector, whose length fixes `n`.
pub fn from_digits(v: &DigitVector) -> Result<u128> {
    let params = RadixParams::new(v.modulus(), v.len())?;
    params.from_digits(v)
}

fn checked_pow(base: u64, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// Fixes `p` and returns the smallest `n >= 1` with `p^n > vocab_size`.
pub fn select_n(p: FieldPrime, vocab_size: u64) -> Result<RadixParams> {
    if vocab_size == 0 {
        return Err(Error::InvalidArgument(
            "vocab_size must be at least 1".into(),
        ));
    }
    let mut capacity: u128 = 1;
    for n in 1..=MAX_DIGITS {
        capacity = capacity
            .checked_mul(p.get() as u128)
            .ok_or_else(|| Error::Overflow(format!("{p}^{n} does not fit in 128 bits")))?;
        if capacity > vocab_size as u128 {
            return Ok(RadixParams { p, n, capacity });
        }
    }
    Err(Error::Overflow(format!(
        "p = {p} needs more than {MAX_DIGITS} digits for vocab_size {vocab_size}"
    )))
}

/// Fixes `n` and returns the smallest prime `p` with `p^n > vocab_size`.
pub fn select_p(n: usize, vocab_size: u64) -> Result<RadixParams> {
    if vocab_size == 0 {
        return Err(Error::InvalidArgument(
            "vocab_size must be at least 1".into(),
        ));
    }
    if n == 0 || n > MAX_DIGITS {
        return Err(Error::InvalidArgument(format!(
            "digit count {n} outside 1..={MAX_DIGITS}"
        )));
    }
    // floor(vocab_size^(1/n)) + 1 is the smallest integer base clearing the
    // bound; start from a float estimate and correct it exactly.
    let exceeds = |b: u64| checked_pow(b, n).map_or(true, |c| c > vocab_size as u128);
    let mut base = (vocab_size as f64).powf(1.0 / n as f64).floor() as u64;
    base = base.max(1);
    while base > 1 && exceeds(base - 1) {
        base -= 1;
    }
    while !exceeds(base) {
        base += 1;
    }
    let candidate = next_prime(base.max(2))
        .map_err(|_| Error::Overflow(format!("no prime p < 2^31 with p^{n} > {vocab_size}")))?;
    RadixParams::new(FieldPrime::new(candidate)?, n)
}
