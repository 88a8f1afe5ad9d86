//! Exact arithmetic in `Z/p^e` and the factorial valuations `ord_p`, `ord_p^{-1}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Word;

/// Largest prime accepted without `trusted` construction.
pub const DEFAULT_MAX_PRIME: u64 = 257;

/// Trusted moduli still get trial division below this bound (√ of it is 2^20).
const TRUSTED_TRIAL_DIVISION_LIMIT: u64 = 1 << 40;

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Exponent of `p` in `n!`, by Legendre's sum of `⌊n/p^i⌋`.
pub fn factorial_valuation(p: u64, n: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut q = n;
    let mut total = 0;
    while q > 0 {
        q /= p;
        total += q;
    }
    total
}

/// Smallest `n` with `p^e | n!`.
///
/// Scans `n = 0, p, 2p, …` keeping a running valuation; only multiples of `p`
/// move it.
///
/// # Panics
///
/// If the answer does not fit in a `u64`.
pub fn factorial_valuation_inverse(p: u64, e: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut n = 0u64;
    let mut valuation = 0u64;
    while valuation < e {
        n = n.checked_add(p).expect("ord_inv exceeds u64");
        let mut k = n;
        while k.is_multiple_of(p) {
            k /= p;
            valuation += 1;
        }
    }
    n
}

/// The ring `Z/p^e`, with the modulus held in word type `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus<T> {
    p: u64,
    e: u32,
    modulus: T,
}

impl<T: Word> PrimePowerModulus<T> {
    /// Checked construction: `p` prime and at most [`DEFAULT_MAX_PRIME`], `e ≥ 1`.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if p > DEFAULT_MAX_PRIME {
            return Err(Error::InvalidParams(format!(
                "p = {p} exceeds {DEFAULT_MAX_PRIME}; larger primes need trusted construction"
            )));
        }
        Self::new_trusted(p, e)
    }

    /// Like [`new`](Self::new) but without the size cap on `p`. Primality is
    /// still checked by trial division below 2^40 and assumed above it.
    pub fn new_trusted(p: u64, e: u32) -> Result<Self> {
        if e < 1 {
            return Err(Error::InvalidParams(format!(
                "e must be at least 1 (got {e})"
            )));
        }
        if p < 2 || (p < TRUSTED_TRIAL_DIVISION_LIMIT && !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        Self::from_parts(p, e)
    }

    fn from_parts(p: u64, e: u32) -> Result<Self> {
        let base = T::from_u64_word(p);
        let mut modulus = T::one();
        for _ in 0..e {
            modulus = modulus
                .checked_mul(&base)
                .ok_or_else(|| Error::Overflow(format!("{p}^{e} does not fit the word type")))?;
        }
        Ok(Self { p, e, modulus })
    }

    /// Same prime, different exponent. The prime was validated already.
    pub fn with_exponent(&self, e: u32) -> Result<Self> {
        if e < 1 {
            return Err(Error::InvalidParams(format!(
                "e must be at least 1 (got {e})"
            )));
        }
        Self::from_parts(self.p, e)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    pub fn p_word(&self) -> T {
        T::from_u64_word(self.p)
    }

    /// `p^k` as a word, for `k ≤ e`.
    pub fn p_pow(&self, k: u32) -> T {
        assert!(k <= self.e, "p^{k} exceeds the modulus p^{}", self.e);
        let base = self.p_word();
        let mut acc = T::one();
        for _ in 0..k {
            acc = acc * base.clone();
        }
        acc
    }

    /// Number of residues, when it fits in `usize`.
    pub fn size(&self) -> Result<usize> {
        self.modulus.to_usize().ok_or_else(|| {
            Error::Overflow(format!("{} residues do not fit in usize", self.modulus))
        })
    }

    pub fn reduce(&self, v: T) -> T {
        if v < self.modulus {
            v
        } else {
            v % self.modulus.clone()
        }
    }

    pub fn from_u64(&self, v: u64) -> T {
        self.reduce(T::from_u64_word(v))
    }

    pub fn from_i64(&self, v: i64) -> T {
        let magnitude = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(&magnitude)
        } else {
            magnitude
        }
    }

    #[inline]
    pub fn add(&self, a: &T, b: &T) -> T {
        a.add_mod(b, &self.modulus)
    }

    #[inline]
    pub fn sub(&self, a: &T, b: &T) -> T {
        a.sub_mod(b, &self.modulus)
    }

    #[inline]
    pub fn mul(&self, a: &T, b: &T) -> T {
        a.mul_mod(b, &self.modulus)
    }

    pub fn neg(&self, a: &T) -> T {
        T::zero().sub_mod(a, &self.modulus)
    }

    pub fn pow(&self, a: &T, mut exp: u64) -> T {
        let mut base = a.clone();
        let mut acc = self.reduce(T::one());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Residue of `a` modulo `p`.
    pub fn low_digit(&self, a: &T) -> u64 {
        (a.clone() % self.p_word())
            .to_u64()
            .expect("a residue mod p fits in u64")
    }

    pub fn is_unit(&self, a: &T) -> bool {
        self.low_digit(a) != 0
    }

    /// p-adic valuation of the canonical lift of `a`, capped at `e` (so zero maps to `e`).
    pub fn valuation(&self, a: &T) -> u32 {
        let p = self.p_word();
        let mut v = 0;
        let mut rest = a.clone();
        while v < self.e && !rest.is_zero() {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            rest = q;
            v += 1;
        }
        self.e
    }

    /// Inverse of a unit, by Hensel lifting the inverse mod `p`.
    pub fn inv(&self, a: &T) -> Result<T> {
        let low = self.low_digit(a);
        if low == 0 {
            return Err(Error::NonUnit {
                value: a.to_string(),
                modulus: self.modulus.to_string(),
            });
        }
        let mut b = T::from_u64_word(inverse_mod_prime(low, self.p));
        let two = self.from_u64(2);
        let mut precision = 1u32;
        while precision < self.e {
            // b <- b(2 - ab) doubles the number of correct p-adic digits
            let ab = self.mul(a, &b);
            b = self.mul(&b, &self.sub(&two, &ab));
            precision = precision.saturating_mul(2);
        }
        let b = self.reduce(b);
        debug_assert!(self.mul(a, &b).is_one() || self.modulus.is_one());
        Ok(b)
    }

    pub fn residue(&self, v: T) -> Residue<T> {
        Residue::new(self.clone(), v)
    }

    /// `ord_p(n)`: largest `ν` with `p^ν | n!`.
    pub fn ord(&self, n: u64) -> u64 {
        factorial_valuation(self.p, n)
    }

    /// `ord_p^{-1}(k)`: smallest `n` with `p^k | n!`.
    pub fn ord_inv(&self, k: u64) -> u64 {
        factorial_valuation_inverse(self.p, k)
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.p == other.p && self.e == other.e {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl<T: Word> fmt::Display for PrimePowerModulus<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.e)
    }
}

fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    // a^(p-2) mod p
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.mul_mod(&base, &p);
        }
        base = base.mul_mod(&base, &p);
        exp >>= 1;
    }
    acc
}

/// A canonical representative in `[0, p^e)` together with its ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residue<T> {
    value: T,
    ctx: PrimePowerModulus<T>,
}

impl<T: Word> Residue<T> {
    pub fn new(ctx: PrimePowerModulus<T>, value: T) -> Self {
        let value = ctx.reduce(value);
        Self { value, ctx }
    }

    pub fn from_u64(ctx: &PrimePowerModulus<T>, v: u64) -> Self {
        Self {
            value: ctx.from_u64(v),
            ctx: ctx.clone(),
        }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn into_value(self) -> T {
        self.value
    }

    pub fn context(&self) -> &PrimePowerModulus<T> {
        &self.ctx
    }

    pub fn invert_unit(&self) -> Result<Self> {
        Ok(Self {
            value: self.ctx.inv(&self.value)?,
            ctx: self.ctx.clone(),
        })
    }
}

impl<T: Word> fmt::Display for Residue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.ctx.modulus)
    }
}
