//! Polynomials over `Z/p^e` in the monomial and falling-factorial bases.
//!
//! Coefficients are kept canonical (in `[0, p^e)`) and trailing zeros are
//! trimmed after every operation, so two polynomials are equal exactly when
//! their coefficient vectors are. The zero polynomial has no degree:
//! [`Poly::degree`] returns `None` for it.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{PrimePowerModulus, Residue};
use crate::scalar::Word;

/// Polynomial in the monomial basis; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    ctx: PrimePowerModulus<T>,
    coeffs: Vec<T>,
}

/// Polynomial in the falling-factorial basis; `coeffs[u]` multiplies
/// `x(x-1)⋯(x-u+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPoly<T> {
    ctx: PrimePowerModulus<T>,
    coeffs: Vec<T>,
}

fn trim<T: Zero>(coeffs: &mut Vec<T>) {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
}

impl<T: Word> Poly<T> {
    /// Reduces every coefficient and trims.
    pub fn new(ctx: &PrimePowerModulus<T>, coeffs: Vec<T>) -> Self {
        let mut coeffs: Vec<T> = coeffs.into_iter().map(|c| ctx.reduce(c)).collect();
        trim(&mut coeffs);
        Self {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn from_i64s(ctx: &PrimePowerModulus<T>, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    pub fn zero(ctx: &PrimePowerModulus<T>) -> Self {
        Self {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(ctx: &PrimePowerModulus<T>, c: T) -> Self {
        Self::new(ctx, vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x(ctx: &PrimePowerModulus<T>) -> Self {
        Self::monomial(ctx, 1)
    }

    pub fn monomial(ctx: &PrimePowerModulus<T>, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = ctx.reduce(T::one());
        Self::new(ctx, coeffs)
    }

    /// `x - a`.
    pub fn linear_root(ctx: &PrimePowerModulus<T>, a: u64) -> Self {
        Self::new(ctx, vec![ctx.neg(&ctx.from_u64(a)), T::one()])
    }

    pub fn context(&self) -> &PrimePowerModulus<T> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(One::is_one)
    }

    /// Horner evaluation on a raw canonical word.
    pub fn eval_word(&self, x: &T) -> T {
        let ctx = &self.ctx;
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| ctx.add(&ctx.mul(&acc, x), c))
    }

    pub fn eval(&self, x: &Residue<T>) -> Result<Residue<T>> {
        self.ctx.ensure_same(x.context())?;
        Ok(self.ctx.residue(self.eval_word(x.value())))
    }

    pub fn eval_u64(&self, x: u64) -> T {
        self.eval_word(&self.ctx.from_u64(x))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let ctx = &self.ctx;
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = T::zero();
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                ctx.sub(a, b)
            })
            .collect();
        Ok(Self::new(ctx, coeffs))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale(&self, c: &T) -> Self {
        let ctx = &self.ctx;
        Self::new(ctx, self.coeffs.iter().map(|a| ctx.mul(a, c)).collect())
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let ctx = &self.ctx;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut coeffs = long.clone();
        for (c, s) in coeffs.iter_mut().zip(short) {
            *c = ctx.add(c, s);
        }
        Self::new(ctx, coeffs)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let ctx = &self.ctx;
        if self.is_zero() || other.is_zero() {
            return Self::zero(ctx);
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = ctx.add(&coeffs[i + j], &ctx.mul(a, b));
            }
        }
        Self::new(ctx, coeffs)
    }

    /// `self(inner(x))`, by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.ctx.ensure_same(&inner.ctx)?;
        let ctx = &self.ctx;
        let mut acc = Self::zero(ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul_unchecked(inner)
                .add_unchecked(&Self::constant(ctx, c.clone()));
        }
        Ok(acc)
    }

    /// `self(inner) rem modulus`, reducing after every Horner step.
    pub fn compose_mod(&self, inner: &Self, modulus: &Self) -> Result<Self> {
        self.ctx.ensure_same(&inner.ctx)?;
        let ctx = &self.ctx;
        let inner = inner.rem_monic(modulus)?;
        let mut acc = Self::zero(ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul_unchecked(&inner)
                .add_unchecked(&Self::constant(ctx, c.clone()))
                .rem_monic(modulus)?;
        }
        Ok(acc)
    }

    /// Remainder modulo a monic divisor by repeated subtraction of shifted
    /// multiples; no coefficient inversion is needed.
    pub fn rem_monic(&self, divisor: &Self) -> Result<Self> {
        self.div_rem_monic(divisor).map(|(_, r)| r)
    }

    pub fn div_rem_monic(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.ctx.ensure_same(&divisor.ctx)?;
        if !divisor.is_monic() {
            return Err(Error::NotMonic);
        }
        let ctx = &self.ctx;
        let m = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= m {
            return Ok((Self::zero(ctx), self.clone()));
        }
        let mut quot = vec![T::zero(); rem.len() - m];
        for top in (m..rem.len()).rev() {
            let lead = rem[top].clone();
            if lead.is_zero() {
                continue;
            }
            let shift = top - m;
            for (k, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] = ctx.sub(&rem[shift + k], &ctx.mul(&lead, d));
            }
            quot[shift] = lead;
        }
        rem.truncate(m);
        Ok((Self::new(ctx, quot), Self::new(ctx, rem)))
    }

    /// Re-reads the coefficients in a ring whose modulus divides this one's
    /// (or lifts canonical representatives into a larger one).
    pub fn change_context(&self, ctx: &PrimePowerModulus<T>) -> Result<Self> {
        if ctx.p() != self.ctx.p() {
            return Err(Error::ContextMismatch {
                left: self.ctx.to_string(),
                right: ctx.to_string(),
            });
        }
        Ok(Self::new(ctx, self.coeffs.clone()))
    }

    /// Falling-factorial form, by synthetic division by `x`, `x-1`, `x-2`, …
    pub fn to_newton(&self) -> NewtonPoly<T> {
        let ctx = &self.ctx;
        let mut current = self.coeffs.clone();
        let mut out = Vec::with_capacity(current.len());
        let mut root = 0u64;
        while !current.is_empty() {
            // divide current by (x - root): Horner from the top
            let r = ctx.from_u64(root);
            let mut carry = T::zero();
            let mut quotient = vec![T::zero(); current.len() - 1];
            for i in (0..current.len()).rev() {
                carry = ctx.add(&current[i], &ctx.mul(&carry, &r));
                if i > 0 {
                    quotient[i - 1] = carry.clone();
                }
            }
            out.push(carry);
            current = quotient;
            root += 1;
        }
        NewtonPoly::new(ctx, out)
    }
}

impl<T: Word> NewtonPoly<T> {
    pub fn new(ctx: &PrimePowerModulus<T>, coeffs: Vec<T>) -> Self {
        let mut coeffs: Vec<T> = coeffs.into_iter().map(|c| ctx.reduce(c)).collect();
        trim(&mut coeffs);
        Self {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn context(&self) -> &PrimePowerModulus<T> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Nested evaluation `a_0 + x(a_1 + (x-1)(a_2 + …))`.
    pub fn eval_word(&self, x: &T) -> T {
        let ctx = &self.ctx;
        let mut acc = T::zero();
        for (u, a) in self.coeffs.iter().enumerate().rev() {
            let shifted = ctx.sub(x, &ctx.from_u64(u as u64));
            acc = ctx.add(a, &ctx.mul(&acc, &shifted));
        }
        acc
    }

    pub fn eval(&self, x: &Residue<T>) -> Result<Residue<T>> {
        self.ctx.ensure_same(x.context())?;
        Ok(self.ctx.residue(self.eval_word(x.value())))
    }

    /// Monomial form: `acc ← acc·(x - u) + a_u` from the top coefficient down.
    pub fn to_monomial(&self) -> Poly<T> {
        let ctx = &self.ctx;
        let mut acc = Poly::zero(ctx);
        for (u, a) in self.coeffs.iter().enumerate().rev() {
            acc = acc
                .mul_unchecked(&Poly::linear_root(ctx, u as u64))
                .add_unchecked(&Poly::constant(ctx, a.clone()));
        }
        acc
    }
}

/// Forward differences `Δ^u v(0)` for `u = 0 … len-1`, in place over raw words.
pub fn forward_differences<T: Word>(ctx: &PrimePowerModulus<T>, values: &[T]) -> Vec<T> {
    let mut table: Vec<T> = values.iter().map(|v| ctx.reduce(v.clone())).collect();
    let n = table.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = ctx.sub(&table[i], &table[i - 1]);
        }
    }
    table
}

/// Forward differences of a value table given as residues.
pub fn finite_differences<T: Word>(values: &[Residue<T>]) -> Result<Vec<Residue<T>>> {
    let Some(first) = values.first() else {
        return Err(Error::InvalidParams(
            "difference table needs at least one value".into(),
        ));
    };
    let ctx = first.context().clone();
    for v in values {
        ctx.ensure_same(v.context())?;
    }
    let raw: Vec<T> = values.iter().map(|v| v.value().clone()).collect();
    Ok(forward_differences(&ctx, &raw)
        .into_iter()
        .map(|b| ctx.residue(b))
        .collect())
}

/// Coefficient lifted to the symmetric range, for display.
fn signed_parts<T: Word>(ctx: &PrimePowerModulus<T>, c: &T) -> (bool, T) {
    let m = ctx.modulus();
    let half = m.clone() / (T::one() + T::one());
    if *c > half {
        (true, m.clone() - c.clone())
    } else {
        (false, c.clone())
    }
}

impl<T: Word> fmt::Display for Poly<T> {
    /// Sparse signed form such as `x^4 - 2x^3 + x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (negative, mag) = signed_parts(&self.ctx, c);
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let show_mag = !mag.is_one() || i == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Coefficient basis named in a [`PolyRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Falling,
}

/// Text record shared by files and the CLI. Integers other than `e` are
/// decimal strings; `coeffs[0]` is the constant term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub p: String,
    pub e: u32,
    pub basis: Basis,
    pub coeffs: Vec<String>,
}

impl PolyRecord {
    fn context<T: Word>(&self) -> Result<PrimePowerModulus<T>> {
        let p = u64::parse_decimal(&self.p)
            .ok_or_else(|| Error::Parse(format!("p = {:?} is not a canonical decimal", self.p)))?;
        PrimePowerModulus::new_trusted(p, self.e)
    }

    fn words<T: Word>(&self, ctx: &PrimePowerModulus<T>) -> Result<Vec<T>> {
        let words = self
            .coeffs
            .iter()
            .map(|s| {
                let v = T::parse_decimal(s).ok_or_else(|| {
                    Error::Parse(format!("coefficient {s:?} is not a canonical decimal"))
                })?;
                if v >= *ctx.modulus() {
                    return Err(Error::Parse(format!(
                        "coefficient {s} is not reduced mod {}",
                        ctx.modulus()
                    )));
                }
                Ok(v)
            })
            .collect::<Result<Vec<T>>>()?;
        if words.last().is_some_and(Zero::is_zero) {
            return Err(Error::Parse("trailing zero coefficient".into()));
        }
        Ok(words)
    }

    /// Reads the record in whichever basis it declares, converting to monomial.
    pub fn to_poly<T: Word>(&self) -> Result<Poly<T>> {
        let ctx = self.context()?;
        let words = self.words(&ctx)?;
        Ok(match self.basis {
            Basis::Monomial => Poly::new(&ctx, words),
            Basis::Falling => NewtonPoly::new(&ctx, words).to_monomial(),
        })
    }

    pub fn to_newton<T: Word>(&self) -> Result<NewtonPoly<T>> {
        let ctx = self.context()?;
        let words = self.words(&ctx)?;
        Ok(match self.basis {
            Basis::Monomial => Poly::new(&ctx, words).to_newton(),
            Basis::Falling => NewtonPoly::new(&ctx, words),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serialisation is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: Word> Poly<T> {
    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            p: self.ctx.p().to_string(),
            e: self.ctx.e(),
            basis: Basis::Monomial,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }
}

impl<T: Word> NewtonPoly<T> {
    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            p: self.ctx.p().to_string(),
            e: self.ctx.e(),
            basis: Basis::Falling,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }
}
