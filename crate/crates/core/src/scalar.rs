//! Integer word types the residue arithmetic is generic over.
//!
//! `u64` is the fast path: every modulus must fit in 64 bits and products are
//! formed in `u128`, so no intermediate can wrap. [`BigUint`] lifts the size
//! restriction entirely. Constructing a modulus that does not fit the chosen
//! word is an explicit [`Error::Overflow`](crate::Error::Overflow), never a
//! silent wraparound.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedMul, FromPrimitive, Num, One, ToPrimitive, Zero};

/// Unsigned integer usable as the representative of a residue class.
///
/// Implementations must keep `add_mod`, `sub_mod` and `mul_mod` exact for any
/// operands already reduced below `m`.
pub trait Word:
    Clone
    + Eq
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Integer
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self;
    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self;
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self;

    fn from_u64_word(v: u64) -> Self {
        Self::from_u64(v).expect("every word type holds a u64")
    }

    /// Parses a canonical decimal string: no sign, no leading zeros.
    fn parse_decimal(s: &str) -> Option<Self> {
        let canonical = !s.is_empty()
            && s.bytes().all(|b| b.is_ascii_digit())
            && (s == "0" || !s.starts_with('0'));
        if !canonical {
            return None;
        }
        <Self as Num>::from_str_radix(s, 10).ok()
    }
}

impl Word for u64 {
    #[inline]
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        ((*self as u128 + *rhs as u128) % *m as u128) as u64
    }

    #[inline]
    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self - rhs
        } else {
            // rhs < m, so m - rhs + self < m
            m - rhs + self
        }
    }

    #[inline]
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        ((*self as u128 * *rhs as u128) % *m as u128) as u64
    }
}

impl Word for BigUint {
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self + rhs) % m
    }

    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self - rhs
        } else {
            m - rhs + self
        }
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self * rhs) % m
    }
}
