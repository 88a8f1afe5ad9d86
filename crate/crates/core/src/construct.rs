//! Lifting polynomial, composed lowest-digit extractor, null polynomials and
//! their reductions.
//!
//! Every constructor verifies its defining property exhaustively before
//! returning, as long as `p^e` is at most [`Constructor::self_check_limit`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{forward_differences, NewtonPoly, Poly};
use crate::ring::PrimePowerModulus;
use crate::scalar::Word;

/// Default cap on `p^{e-1}` for the unreduced composition.
pub const DEFAULT_MAX_COMPOSED_DEGREE: u64 = 1 << 14;

pub const DEFAULT_SELF_CHECK_LIMIT: u64 = 100_000;

/// Null polynomial used to cut the degree of the composed extractor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reducer {
    /// `(x^p - x)^e`, degree `ep`.
    Fermat,
    /// `x(x-1)⋯(x-d+1)` with `d = ord_p^{-1}(e)`.
    Minimal,
}

/// Every polynomial this module can build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    Lift,
    Hs15,
    ZeroFermat,
    ZeroMinimal,
    FermatReduced,
    MinimalReduced,
}

impl Construction {
    pub const ALL: [Construction; 6] = [
        Construction::Lift,
        Construction::Hs15,
        Construction::ZeroFermat,
        Construction::ZeroMinimal,
        Construction::FermatReduced,
        Construction::MinimalReduced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Lift => "lift",
            Construction::Hs15 => "hs15",
            Construction::ZeroFermat => "zero-fermat",
            Construction::ZeroMinimal => "zero-minimal",
            Construction::FermatReduced => "fermat-reduced",
            Construction::MinimalReduced => "minimal-reduced",
        }
    }

    /// Whether the result is a lowest-digit extractor over `Z/p^e`.
    pub fn is_extractor(self) -> bool {
        matches!(
            self,
            Construction::Hs15 | Construction::FermatReduced | Construction::MinimalReduced
        )
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown construction {s:?}")))
    }
}

/// Construction settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    /// Exhaustive self-checks run when `p^e` is at most this.
    pub self_check_limit: u64,
    /// Accept primes above the default cap.
    pub trust_prime: bool,
    /// Largest unreduced composed-extractor degree `p^{e-1}` that is built.
    pub max_composed_degree: u64,
}

impl Default for Constructor {
    fn default() -> Self {
        Self {
            self_check_limit: DEFAULT_SELF_CHECK_LIMIT,
            trust_prime: false,
            max_composed_degree: DEFAULT_MAX_COMPOSED_DEGREE,
        }
    }
}

/// First `x` in `[0, n)` failing `holds`, found in parallel but reported
/// deterministically.
pub(crate) fn first_failure<F>(n: u64, holds: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    (0..n).into_par_iter().find_first(|&x| !holds(x))
}

fn check<F>(what: &str, n: u64, holds: F) -> Result<()>
where
    F: Fn(u64) -> bool + Sync,
{
    match first_failure(n, holds) {
        None => Ok(()),
        Some(x) => Err(Error::SelfCheckFailed {
            what: what.to_string(),
            x: x.to_string(),
        }),
    }
}

/// `x ↦ x mod p` holds for `f` at every `x ∈ [p^e]`, evaluated in `Z/p^e`.
pub fn first_extraction_failure<T: Word>(f: &Poly<T>) -> Result<Option<u64>> {
    let ctx = f.context();
    let n = ctx.size()? as u64;
    Ok(first_failure(n, |x| {
        f.eval_u64(x) == T::from_u64_word(x % ctx.p())
    }))
}

impl Constructor {
    pub fn modulus<T: Word>(&self, p: u64, e: u32) -> Result<PrimePowerModulus<T>> {
        if self.trust_prime {
            PrimePowerModulus::new_trusted(p, e)
        } else {
            PrimePowerModulus::new(p, e)
        }
    }

    /// Whether constructions over `ctx` get their exhaustive self-check.
    pub fn checks<T: Word>(&self, ctx: &PrimePowerModulus<T>) -> bool {
        ctx.modulus()
            .to_u64()
            .is_some_and(|m| m <= self.self_check_limit)
    }

    pub fn build<T: Word>(&self, kind: Construction, p: u64, e: u32) -> Result<Poly<T>> {
        match kind {
            Construction::Lift => self.lift_poly(p, e),
            Construction::Hs15 => self.lowest_digit_poly_hs15(p, e),
            Construction::ZeroFermat => self.zero_poly_fermat(p, e),
            Construction::ZeroMinimal => self.zero_poly_minimal(p, e),
            Construction::FermatReduced => self.lowest_digit_poly(p, e, Reducer::Fermat),
            Construction::MinimalReduced => self.lowest_digit_poly(p, e, Reducer::Minimal),
        }
    }

    /// Degree-`p` lifting polynomial over `Z/p^{e+1}`:
    /// `F(z_0 + p^{e'} z_1) ≡ z_0 (mod p^{e'+1})` for `z_0 ∈ [p]`, `1 ≤ e' ≤ e`.
    ///
    /// Built as `x^p + p·h(x)` where `h` interpolates `(z_0 - z_0^p)/p` on
    /// `[p]`. Then `F(z_0) ≡ z_0` and `F' ≡ 0 (mod p)`, which is all the Taylor
    /// expansion around `z_0` needs.
    pub fn lift_poly<T: Word>(&self, p: u64, e: u32) -> Result<Poly<T>> {
        let ctx = self.modulus::<T>(p, e)?;
        let hi = ctx.with_exponent(e + 1)?;
        let p_word = ctx.p_word();

        let samples: Vec<T> = (0..p)
            .map(|z| {
                let z = hi.from_u64(z);
                let diff = hi.sub(&z, &hi.pow(&z, p));
                debug_assert!((diff.clone() % p_word.clone()).is_zero());
                diff / p_word.clone()
            })
            .collect();

        // Newton coefficients Δ^u/u!; u < p so u! is a unit
        let mut factorial = T::one();
        let newton: Vec<T> = forward_differences(&ctx, &samples)
            .into_iter()
            .enumerate()
            .map(|(u, b)| {
                if u > 1 {
                    factorial = ctx.mul(&factorial, &ctx.from_u64(u as u64));
                }
                ctx.inv(&factorial).map(|inv| ctx.mul(&b, &inv))
            })
            .collect::<Result<_>>()?;
        let h = NewtonPoly::new(&ctx, newton).to_monomial();

        let lift = Poly::monomial(&hi, p as usize)
            .try_add(&h.change_context(&hi)?.scale(&hi.reduce(p_word.clone())))?;

        if self.checks(&ctx) {
            let modulus_e = ctx.size()? as u64;
            check("lifting polynomial", p * modulus_e, |idx| {
                let (z0, z1) = (idx % p, idx / p);
                (1..=e).all(|ep| {
                    let step = ctx.p_pow(ep);
                    let arg = hi.add(&hi.from_u64(z0), &hi.mul(&step, &hi.from_u64(z1)));
                    let target = step * p_word.clone();
                    lift.eval_word(&arg) % target == T::from_u64_word(z0)
                })
            })?;
        }
        Ok(lift)
    }

    /// `F_e` composed with itself `e-1` times, reduced mod `p^e` after every
    /// step. Degree `p^{e-1}`; `e = 1` gives the identity.
    pub fn lowest_digit_poly_hs15<T: Word>(&self, p: u64, e: u32) -> Result<Poly<T>> {
        let ctx = self.modulus::<T>(p, e)?;
        let degree = (p as u128).checked_pow(e - 1).unwrap_or(u128::MAX);
        if degree > self.max_composed_degree as u128 {
            return Err(Error::GuardExceeded {
                work: format!("composed degree {p}^{}", e - 1),
                limit: self.max_composed_degree.to_string(),
            });
        }
        let g = self.compose_lifts(&ctx, None)?;
        self.check_extraction("composed extractor", &g)?;
        Ok(g)
    }

    /// `e-1` compositions of the lifting polynomial, optionally taken modulo
    /// a monic `null` after each step.
    fn compose_lifts<T: Word>(
        &self,
        ctx: &PrimePowerModulus<T>,
        null: Option<&Poly<T>>,
    ) -> Result<Poly<T>> {
        let (p, e) = (ctx.p(), ctx.e());
        let mut g = Poly::x(ctx);
        if e > 1 {
            let lift = self.lift_poly::<T>(p, e)?.change_context(ctx)?;
            for _ in 1..e {
                g = match null {
                    Some(null) => lift.compose_mod(&g, null)?,
                    None => lift.compose(&g)?,
                };
            }
        }
        Ok(g)
    }

    /// `(x^p - x)^e`, vanishing on all of `Z/p^e`.
    pub fn zero_poly_fermat<T: Word>(&self, p: u64, e: u32) -> Result<Poly<T>> {
        let ctx = self.modulus::<T>(p, e)?;
        let base = Poly::monomial(&ctx, p as usize).try_sub(&Poly::x(&ctx))?;
        let mut acc = Poly::constant(&ctx, T::one());
        for _ in 0..e {
            acc = acc.try_mul(&base)?;
        }
        self.check_null("fermat null polynomial", &acc)?;
        Ok(acc)
    }

    /// `∏_{i < d} (x - i)` with `d = ord_p^{-1}(e)`, the least-degree monic
    /// null polynomial.
    pub fn zero_poly_minimal<T: Word>(&self, p: u64, e: u32) -> Result<Poly<T>> {
        let ctx = self.modulus::<T>(p, e)?;
        let d = ctx.ord_inv(e as u64);
        let mut acc = Poly::constant(&ctx, T::one());
        for i in 0..d {
            acc = acc.try_mul(&Poly::linear_root(&ctx, i))?;
        }
        self.check_null("minimal null polynomial", &acc)?;
        Ok(acc)
    }

    /// The composed extractor reduced modulo a monic null polynomial.
    /// Never materialises the degree-`p^{e-1}` composition.
    pub fn lowest_digit_poly<T: Word>(&self, p: u64, e: u32, reducer: Reducer) -> Result<Poly<T>> {
        let ctx = self.modulus::<T>(p, e)?;
        let null = match reducer {
            Reducer::Fermat => self.zero_poly_fermat::<T>(p, e)?,
            Reducer::Minimal => self.zero_poly_minimal::<T>(p, e)?,
        };
        // reducing after each composition gives the same remainder as
        // reducing the full composition once
        let reduced = self.compose_lifts(&ctx, Some(&null))?.rem_monic(&null)?;
        self.check_extraction("reduced extractor", &reduced)?;
        Ok(reduced)
    }

    fn check_extraction<T: Word>(&self, what: &str, f: &Poly<T>) -> Result<()> {
        if !self.checks(f.context()) {
            return Ok(());
        }
        match first_extraction_failure(f)? {
            None => Ok(()),
            Some(x) => Err(Error::SelfCheckFailed {
                what: what.to_string(),
                x: x.to_string(),
            }),
        }
    }

    fn check_null<T: Word>(&self, what: &str, f: &Poly<T>) -> Result<()> {
        if !f.is_monic() {
            return Err(Error::SelfCheckFailed {
                what: format!("{what} (not monic)"),
                x: "-".into(),
            });
        }
        if !self.checks(f.context()) {
            return Ok(());
        }
        let n = f.context().size()? as u64;
        check(what, n, |x| f.eval_u64(x).is_zero())
    }
}

/// Degree `(e-1)(p-1) + 1` of the lower-degree extractor this crate compares
/// against; that polynomial itself is not built.
pub fn ch18_degree(p: u64, e: u32) -> u64 {
    (e as u64 - 1) * (p - 1) + 1
}

pub fn lift_poly<T: Word>(p: u64, e: u32) -> Result<Poly<T>> {
    Constructor::default().lift_poly(p, e)
}

pub fn lowest_digit_poly_hs15<T: Word>(p: u64, e: u32) -> Result<Poly<T>> {
    Constructor::default().lowest_digit_poly_hs15(p, e)
}

pub fn zero_poly_fermat<T: Word>(p: u64, e: u32) -> Result<Poly<T>> {
    Constructor::default().zero_poly_fermat(p, e)
}

pub fn zero_poly_minimal<T: Word>(p: u64, e: u32) -> Result<Poly<T>> {
    Constructor::default().zero_poly_minimal(p, e)
}

pub fn lowest_digit_poly<T: Word>(p: u64, e: u32, reducer: Reducer) -> Result<Poly<T>> {
    Constructor::default().lowest_digit_poly(p, e, reducer)
}
