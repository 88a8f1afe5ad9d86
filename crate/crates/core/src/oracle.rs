//! Exact representability of functions `Z/p^e → Z/p^e` by integer polynomials.
//!
//! Write a candidate `f = Σ a_u x(x-1)⋯(x-u+1)`. Its forward differences at 0
//! are `Δ^u f(0) = u!·a_u`, so a target table with differences `b_u` is induced
//! by some polynomial iff every congruence `u!·a_u ≡ b_u (mod p^e)` is
//! solvable, i.e. iff `p^{min(e, ord_p(u))}` divides `b_u`. The largest `u`
//! with `b_u ≠ 0` is then the exact minimal degree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construct::first_failure;
use crate::error::{Error, Result};
use crate::poly::{forward_differences, NewtonPoly, Poly, PolyRecord};
use crate::ring::{PrimePowerModulus, Residue};
use crate::scalar::Word;

/// Limit on `(p^e)^degree_cap` for [`brute_force_min_monic_zero`].
pub const BRUTE_FORCE_GUARD: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TargetLabel<T> {
    LowestDigit,
    RemoveLowDigits(u32),
    KeepLowDigits(u32),
    Constant(T),
    Custom,
}

impl<T: Word> fmt::Display for TargetLabel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetLabel::LowestDigit => f.write_str("lowest-digit"),
            TargetLabel::RemoveLowDigits(r) => write!(f, "remove-low-digits({r})"),
            TargetLabel::KeepLowDigits(r) => write!(f, "keep-low-digits({r})"),
            TargetLabel::Constant(c) => write!(f, "constant({c})"),
            TargetLabel::Custom => f.write_str("custom"),
        }
    }
}

/// A function on `Z/p^e` given by its full value table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetFunction<T> {
    ctx: PrimePowerModulus<T>,
    values: Vec<T>,
    label: TargetLabel<T>,
}

impl<T: Word> TargetFunction<T> {
    fn tabulate(
        ctx: &PrimePowerModulus<T>,
        label: TargetLabel<T>,
        f: impl Fn(u64) -> u64,
    ) -> Result<Self> {
        let n = ctx.size()? as u64;
        Ok(Self {
            ctx: ctx.clone(),
            values: (0..n).map(|x| T::from_u64_word(f(x))).collect(),
            label,
        })
    }

    /// `x ↦ x mod p`.
    pub fn lowest_digit(ctx: &PrimePowerModulus<T>) -> Result<Self> {
        let p = ctx.p();
        Self::tabulate(ctx, TargetLabel::LowestDigit, |x| x % p)
    }

    /// `x ↦ x - (x mod p^r)`. For `r ≥ e` this is the zero function.
    pub fn remove_low_digits(ctx: &PrimePowerModulus<T>, r: u32) -> Result<Self> {
        let pr = low_block(ctx, r)?;
        Self::tabulate(ctx, TargetLabel::RemoveLowDigits(r), |x| x - x % pr)
    }

    /// `x ↦ x mod p^r`. For `r ≥ e` this is the identity.
    pub fn keep_low_digits(ctx: &PrimePowerModulus<T>, r: u32) -> Result<Self> {
        let pr = low_block(ctx, r)?;
        Self::tabulate(ctx, TargetLabel::KeepLowDigits(r), |x| x % pr)
    }

    pub fn constant(ctx: &PrimePowerModulus<T>, c: T) -> Result<Self> {
        let c = ctx.reduce(c);
        let n = ctx.size()?;
        Ok(Self {
            ctx: ctx.clone(),
            values: vec![c.clone(); n],
            label: TargetLabel::Constant(c),
        })
    }

    pub fn custom(ctx: &PrimePowerModulus<T>, values: Vec<T>) -> Result<Self> {
        let n = ctx.size()?;
        if values.len() != n {
            return Err(Error::InvalidParams(format!(
                "target table has {} entries, expected {n}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| *v >= ctx.modulus()) {
            return Err(Error::InvalidParams(format!(
                "target value {v} is not reduced"
            )));
        }
        Ok(Self {
            ctx: ctx.clone(),
            values,
            label: TargetLabel::Custom,
        })
    }

    /// `x ↦ x - f(x)`. Swaps the remove/keep labels.
    pub fn complement(&self) -> Self {
        let ctx = &self.ctx;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(x, v)| ctx.sub(&ctx.from_u64(x as u64), v))
            .collect();
        let label = match self.label {
            TargetLabel::RemoveLowDigits(r) => TargetLabel::KeepLowDigits(r),
            TargetLabel::KeepLowDigits(r) => TargetLabel::RemoveLowDigits(r),
            _ => TargetLabel::Custom,
        };
        Self {
            ctx: ctx.clone(),
            values,
            label,
        }
    }

    pub fn context(&self) -> &PrimePowerModulus<T> {
        &self.ctx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn label(&self) -> &TargetLabel<T> {
        &self.label
    }
}

/// `p^min(r, e)` as a u64; the table size already fits, so this does too.
fn low_block<T: Word>(ctx: &PrimePowerModulus<T>, r: u32) -> Result<u64> {
    ctx.size()?;
    Ok(ctx.p().pow(r.min(ctx.e())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict<T> {
    Representable {
        minimal_degree: usize,
        witness: Poly<T>,
    },
    NotRepresentable {
        failing_index: usize,
        required_divisor: T,
        actual_difference: Residue<T>,
    },
}

impl<T: Word> OracleVerdict<T> {
    pub fn minimal_degree(&self) -> Option<usize> {
        match self {
            OracleVerdict::Representable { minimal_degree, .. } => Some(*minimal_degree),
            OracleVerdict::NotRepresentable { .. } => None,
        }
    }

    pub fn is_representable(&self) -> bool {
        matches!(self, OracleVerdict::Representable { .. })
    }

    pub fn to_record(&self) -> VerdictRecord {
        match self {
            OracleVerdict::Representable {
                minimal_degree,
                witness,
            } => VerdictRecord::Representable {
                p: witness.context().p().to_string(),
                e: witness.context().e().to_string(),
                minimal_degree: minimal_degree.to_string(),
                witness: witness.to_record(),
            },
            OracleVerdict::NotRepresentable {
                failing_index,
                required_divisor,
                actual_difference,
            } => VerdictRecord::NotRepresentable {
                p: actual_difference.context().p().to_string(),
                e: actual_difference.context().e().to_string(),
                failing_index: failing_index.to_string(),
                required_divisor: required_divisor.to_string(),
                actual_difference: actual_difference.value().to_string(),
            },
        }
    }
}

/// Serialised verdict; every integer is a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictRecord {
    Representable {
        p: String,
        e: String,
        minimal_degree: String,
        witness: PolyRecord,
    },
    NotRepresentable {
        p: String,
        e: String,
        failing_index: String,
        required_divisor: String,
        actual_difference: String,
    },
}

/// Decides whether some integer polynomial induces `target`, returning a
/// least-degree witness or the first unsolvable difference.
///
/// `degree_cap` defaults to `p^e - 1`, past which falling factorials add
/// nothing as functions.
pub fn represent_function<T: Word>(
    target: &TargetFunction<T>,
    degree_cap: Option<usize>,
) -> Result<OracleVerdict<T>> {
    let ctx = &target.ctx;
    let n = target.values.len();
    let e = ctx.e();
    let diffs = forward_differences(ctx, &target.values);
    let top = diffs.iter().rposition(|b| !b.is_zero()).unwrap_or(0);

    // Running u! = p^ord · unit
    let mut ord = 0u32;
    let mut unit = T::one();
    let mut newton = Vec::with_capacity(top + 1);
    for (u, b) in diffs.iter().enumerate().take(top + 1) {
        if u > 0 {
            let mut k = u as u64;
            while k.is_multiple_of(ctx.p()) {
                k /= ctx.p();
                ord = ord.saturating_add(1);
            }
            unit = ctx.mul(&unit, &ctx.from_u64(k));
        }
        let needed = ord.min(e);
        if ctx.valuation(b) < needed {
            return Ok(OracleVerdict::NotRepresentable {
                failing_index: u,
                required_divisor: ctx.p_pow(needed),
                actual_difference: ctx.residue(b.clone()),
            });
        }
        newton.push(if ord >= e {
            T::zero()
        } else {
            // smallest a in [0, p^(e-ord)) with p^ord·unit·a ≡ b
            let reduced = b.clone() / ctx.p_pow(ord);
            let a = ctx.mul(&reduced, &ctx.inv(&unit)?);
            a % ctx.p_pow(e - ord)
        });
    }

    let cap = degree_cap.unwrap_or(n.saturating_sub(1));
    if top > cap {
        return Err(Error::CapExceeded { degree: top, cap });
    }

    let witness = NewtonPoly::new(ctx, newton).to_monomial();
    if witness.degree().unwrap_or(0) != top {
        return Err(Error::VerificationFailure {
            x: format!("degree {:?} instead of {top}", witness.degree()),
        });
    }
    if let Some(x) = first_failure(n as u64, |x| {
        witness.eval_u64(x) == target.values[x as usize]
    }) {
        return Err(Error::VerificationFailure { x: x.to_string() });
    }
    Ok(OracleVerdict::Representable {
        minimal_degree: top,
        witness,
    })
}

/// Least degree of any polynomial with `f(x) ≡ x mod p` on `Z/p^e`.
pub fn minimal_extraction_degree<T: Word>(ctx: &PrimePowerModulus<T>) -> Result<usize> {
    let target = TargetFunction::lowest_digit(ctx)?;
    match represent_function(&target, None)? {
        OracleVerdict::Representable { minimal_degree, .. } => Ok(minimal_degree),
        OracleVerdict::NotRepresentable { failing_index, .. } => Err(Error::VerificationFailure {
            x: format!("lowest-digit target rejected at difference {failing_index}"),
        }),
    }
}

/// One target-value constraint `f(point) ≡ value (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence<T> {
    pub point: T,
    pub value: T,
    pub modulus: T,
}

/// Hand-checkable refutation that any polynomial removes the lowest `r > 1`
/// digits modulo `p^e`.
///
/// With `f = a_0 + a_1 x + a_2 x^2 + ⋯`, the constraints at `x = 0`,
/// `p^{e-1}` and `p` fix `a_0 ≡ 0`, force `a_1 ≡ 1 (mod p)` and, read mod
/// `p^2`, force `a_1 ≡ 0 (mod p)`. The admissible classes of `a_1 mod p` under
/// each are enumerated explicitly and must be disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpossibilityCertificate<T> {
    pub p: u64,
    pub r: u32,
    pub e: u32,
    /// At `0`, `p^{e-1}` and `p`, in that order.
    pub constraints: [Congruence<T>; 3],
    /// `p^{e-1} mod p^r = 0`, which needs `r ≤ e - 1`.
    pub top_point_clears_low_digits: bool,
    /// `p mod p^r = p`, which needs `r > 1`.
    pub p_is_all_low_digits: bool,
    /// Classes of `a_1 mod p` consistent with the first two constraints.
    pub a1_from_top_point: Vec<u64>,
    /// Classes of `a_1 mod p` consistent with the first and third, mod `p^2`.
    pub a1_from_p: Vec<u64>,
}

impl<T: Word> ImpossibilityCertificate<T> {
    pub fn contradiction(&self) -> bool {
        self.top_point_clears_low_digits
            && self.p_is_all_low_digits
            && !self.a1_from_top_point.is_empty()
            && self
                .a1_from_top_point
                .iter()
                .all(|a| !self.a1_from_p.contains(a))
    }

    /// The constraints restate `target` at their points.
    pub fn matches_target(&self, target: &TargetFunction<T>) -> bool {
        let ctx = target.context();
        ctx.p() == self.p
            && ctx.e() == self.e
            && self.constraints.iter().all(|c| {
                c.modulus == *ctx.modulus()
                    && c.point
                        .to_usize()
                        .and_then(|x| target.values().get(x))
                        .is_some_and(|v| *v == c.value)
            })
    }

    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            kind: "impossibility_certificate".into(),
            p: self.p.to_string(),
            r: self.r.to_string(),
            e: self.e.to_string(),
            constraints: self
                .constraints
                .iter()
                .map(|c| {
                    [
                        c.point.to_string(),
                        c.value.to_string(),
                        c.modulus.to_string(),
                    ]
                })
                .collect(),
            top_point_clears_low_digits: self.top_point_clears_low_digits,
            p_is_all_low_digits: self.p_is_all_low_digits,
            a1_mod_p_from_top_point: self
                .a1_from_top_point
                .iter()
                .map(ToString::to_string)
                .collect(),
            a1_mod_p_from_p: self.a1_from_p.iter().map(ToString::to_string).collect(),
            contradiction: self.contradiction(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: String,
    pub p: String,
    pub r: String,
    pub e: String,
    /// `[point, value, modulus]` triples.
    pub constraints: Vec<[String; 3]>,
    pub top_point_clears_low_digits: bool,
    pub p_is_all_low_digits: bool,
    pub a1_mod_p_from_top_point: Vec<String>,
    pub a1_mod_p_from_p: Vec<String>,
    pub contradiction: bool,
}

/// Builds and machine-checks the refutation for `1 < r < e`. For `r = 1` an
/// extractor exists, so that regime is rejected.
pub fn impossibility_certificate<T: Word>(
    ctx: &PrimePowerModulus<T>,
    r: u32,
) -> Result<ImpossibilityCertificate<T>> {
    let (p, e) = (ctx.p(), ctx.e());
    if !(1 < r && r < e) {
        return Err(Error::InvalidParams(format!(
            "need 1 < r < e (got r = {r}, e = {e})"
        )));
    }
    let block = ctx.p_pow(r);
    let remove = |x: &T| ctx.sub(x, &(x.clone() % block.clone()));

    let points = [T::zero(), ctx.p_pow(e - 1), ctx.p_word()];
    let constraints = points.clone().map(|x| Congruence {
        value: remove(&x),
        point: x,
        modulus: ctx.modulus().clone(),
    });

    let top_point_clears_low_digits = (points[1].clone() % block.clone()).is_zero();
    let p_is_all_low_digits = points[2].clone() % block.clone() == points[2];

    // a_0 is pinned by the first constraint; a_1·p^{e-1} mod p^e and
    // a_1·p mod p^2 only see a_1 mod p.
    let a0 = &constraints[0].value;
    let a1_from_top_point = (0..p)
        .filter(|&a1| {
            let lhs = ctx.add(a0, &ctx.mul(&ctx.from_u64(a1), &points[1]));
            lhs == constraints[1].value
        })
        .collect();
    let p_sq = ctx.p_pow(2);
    let a1_from_p = (0..p)
        .filter(|&a1| {
            let lhs = ctx.add(a0, &ctx.mul(&ctx.from_u64(a1), &points[2]));
            lhs % p_sq.clone() == constraints[2].value.clone() % p_sq.clone()
        })
        .collect();

    let cert = ImpossibilityCertificate {
        p,
        r,
        e,
        constraints,
        top_point_clears_low_digits,
        p_is_all_low_digits,
        a1_from_top_point,
        a1_from_p,
    };
    if !cert.contradiction() {
        return Err(Error::VerificationFailure {
            x: format!("certificate for p = {p}, r = {r}, e = {e} does not close"),
        });
    }
    Ok(cert)
}

/// Smallest degree `k ≥ 1` admitting a monic polynomial that vanishes on all
/// of `Z/p^e`, found by enumerating every candidate up to `degree_cap`.
pub fn brute_force_min_monic_zero(p: u64, e: u32, degree_cap: usize) -> Result<Option<usize>> {
    let ctx = PrimePowerModulus::<u64>::new(p, e)?;
    let m = *ctx.modulus();
    let work = (m as u128)
        .checked_pow(degree_cap as u32)
        .filter(|w| *w <= BRUTE_FORCE_GUARD);
    if work.is_none() {
        return Err(Error::GuardExceeded {
            work: format!("({m})^{degree_cap}"),
            limit: BRUTE_FORCE_GUARD.to_string(),
        });
    }
    for k in 1..=degree_cap {
        // lower coefficients c_0 … c_{k-1} as a base-m counter
        let mut lower = vec![0u64; k];
        loop {
            let vanishes = (0..m).all(|x| {
                let top = lower
                    .iter()
                    .rev()
                    .fold(1u64, |acc, c| ctx.add(&ctx.mul(&acc, &x), c));
                top == 0
            });
            if vanishes {
                return Ok(Some(k));
            }
            if !increment(&mut lower, m) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances a little-endian base-`m` counter; false once it wraps.
fn increment(digits: &mut [u64], m: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}
