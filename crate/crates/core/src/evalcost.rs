//! Multiplication counts and depth of polynomial evaluation strategies, and
//! digit decomposition driven by the lowest-digit extractor.
//!
//! A multiplication is *non-scalar* when both operands depend on the input;
//! only those add depth. Multiplying by a known coefficient is a scalar
//! multiplication and is free in depth.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::construct::{ch18_degree, Constructor, Reducer};
use crate::error::{Error, Result};
use crate::oracle::{represent_function, OracleVerdict, TargetFunction};
use crate::poly::Poly;
use crate::ring::{PrimePowerModulus, Residue};
use crate::scalar::Word;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostReport {
    pub nonscalar_mults: u64,
    pub scalar_mults: u64,
    pub depth: u32,
}

/// A value flowing through an instrumented evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingValue<T> {
    value: T,
    depth: u32,
    dependent: bool,
}

impl<T> CountingValue<T> {
    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_input_dependent(&self) -> bool {
        self.dependent
    }
}

/// Arithmetic on [`CountingValue`]s with a tally private to one evaluation.
pub struct Counter<'a, T> {
    ctx: &'a PrimePowerModulus<T>,
    nonscalar: Cell<u64>,
    scalar: Cell<u64>,
}

impl<'a, T: Word> Counter<'a, T> {
    pub fn new(ctx: &'a PrimePowerModulus<T>) -> Self {
        Self {
            ctx,
            nonscalar: Cell::new(0),
            scalar: Cell::new(0),
        }
    }

    pub fn input(&self, x: &T) -> CountingValue<T> {
        CountingValue {
            value: x.clone(),
            depth: 0,
            dependent: true,
        }
    }

    pub fn constant(&self, c: &T) -> CountingValue<T> {
        CountingValue {
            value: c.clone(),
            depth: 0,
            dependent: false,
        }
    }

    /// A constant placed in the input domain (an encoded plaintext, say), so
    /// products with it count as non-scalar.
    pub fn encode(&self, c: &T) -> CountingValue<T> {
        CountingValue {
            value: c.clone(),
            depth: 0,
            dependent: true,
        }
    }

    pub fn mul(&self, a: &CountingValue<T>, b: &CountingValue<T>) -> CountingValue<T> {
        let value = self.ctx.mul(&a.value, &b.value);
        match (a.dependent, b.dependent) {
            (true, true) => {
                self.nonscalar.set(self.nonscalar.get() + 1);
                CountingValue {
                    value,
                    depth: a.depth.max(b.depth) + 1,
                    dependent: true,
                }
            }
            (false, false) => CountingValue {
                value,
                depth: 0,
                dependent: false,
            },
            _ => {
                self.scalar.set(self.scalar.get() + 1);
                CountingValue {
                    value,
                    depth: a.depth.max(b.depth),
                    dependent: true,
                }
            }
        }
    }

    pub fn add(&self, a: &CountingValue<T>, b: &CountingValue<T>) -> CountingValue<T> {
        CountingValue {
            value: self.ctx.add(&a.value, &b.value),
            depth: a.depth.max(b.depth),
            dependent: a.dependent || b.dependent,
        }
    }

    pub fn report(&self, result: &CountingValue<T>) -> CostReport {
        CostReport {
            nonscalar_mults: self.nonscalar.get(),
            scalar_mults: self.scalar.get(),
            depth: result.depth,
        }
    }
}

/// Horner's rule with the accumulator in the input domain from the start:
/// exactly `deg f` non-scalar multiplications and depth `deg f`.
pub fn eval_horner_counting<T: Word>(
    f: &Poly<T>,
    x: &Residue<T>,
) -> Result<(Residue<T>, CostReport)> {
    let ctx = f.context();
    ctx.ensure_same(x.context())?;
    let counter = Counter::new(ctx);
    let Some((lead, rest)) = f.coeffs().split_last() else {
        return Ok((ctx.residue(T::zero()), CostReport::default()));
    };
    let input = counter.input(x.value());
    let mut acc = counter.encode(lead);
    for c in rest.iter().rev() {
        acc = counter.mul(&acc, &input);
        acc = counter.add(&acc, &counter.constant(c));
    }
    Ok((ctx.residue(acc.value.clone()), counter.report(&acc)))
}

/// `⌈√n⌉`.
fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r < n {
        r + 1
    } else {
        r
    }
}

/// `x, x^2, …, x^top`; `x^j = x^⌈j/2⌉ · x^⌊j/2⌋`, so `x^j` sits at depth `⌈log2 j⌉`.
fn power_table<T: Word>(
    counter: &Counter<'_, T>,
    x: &CountingValue<T>,
    top: usize,
) -> Vec<CountingValue<T>> {
    let mut pows = Vec::with_capacity(top + 1);
    pows.push(counter.constant(&T::one()));
    if top >= 1 {
        pows.push(x.clone());
    }
    for j in 2..=top {
        let next = counter.mul(&pows[j.div_ceil(2)], &pows[j / 2]);
        pows.push(next);
    }
    pows
}

/// Baby-step/giant-step evaluation with block size `k = ⌈√(d+1)⌉`: baby
/// steps `x … x^{k-1}` (plus `x^k` when there is more than one block), then
/// Horner in `x^k` over the blocks.
pub fn eval_bsgs_counting<T: Word>(
    f: &Poly<T>,
    x: &Residue<T>,
) -> Result<(Residue<T>, CostReport)> {
    let ctx = f.context();
    ctx.ensure_same(x.context())?;
    let counter = Counter::new(ctx);
    let Some(d) = f.degree() else {
        return Ok((ctx.residue(T::zero()), CostReport::default()));
    };
    let k = ceil_sqrt(d as u64 + 1) as usize;
    let blocks: Vec<&[T]> = f.coeffs().chunks(k).collect();
    let input = counter.input(x.value());
    let top_power = if blocks.len() > 1 { k } else { k - 1 };
    let pows = power_table(&counter, &input, top_power);

    let eval_block = |block: &[T]| {
        let mut acc = counter.constant(&block[0]);
        for (i, c) in block.iter().enumerate().skip(1) {
            if !c.is_zero() {
                let term = counter.mul(&counter.constant(c), &pows[i]);
                acc = counter.add(&acc, &term);
            }
        }
        acc
    };

    let mut acc = eval_block(blocks[blocks.len() - 1]);
    for block in blocks[..blocks.len() - 1].iter().rev() {
        acc = counter.mul(&acc, &pows[k]);
        acc = counter.add(&acc, &eval_block(block));
    }
    Ok((ctx.residue(acc.value.clone()), counter.report(&acc)))
}

/// Strips and reports base-`p` digits using only extractor evaluations and
/// exact division by `p`. Extractors are built lazily per exponent and
/// cached, and the cache is safe to share between threads.
pub struct DigitDecomposer<T> {
    constructor: Constructor,
    ctx: PrimePowerModulus<T>,
    extractors: Vec<OnceLock<Poly<T>>>,
}

impl<T: Word> DigitDecomposer<T> {
    pub fn new(ctx: &PrimePowerModulus<T>) -> Self {
        Self::with_constructor(ctx, Constructor::default())
    }

    pub fn with_constructor(ctx: &PrimePowerModulus<T>, constructor: Constructor) -> Self {
        Self {
            constructor,
            ctx: ctx.clone(),
            extractors: (0..ctx.e()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Reduced extractor for `Z/p^level`, `1 ≤ level ≤ e`.
    pub fn extractor(&self, level: u32) -> Result<&Poly<T>> {
        let cell = self
            .extractors
            .get(level.wrapping_sub(1) as usize)
            .ok_or_else(|| {
                Error::InvalidParams(format!("level {level} outside 1..={}", self.ctx.e()))
            })?;
        if let Some(poly) = cell.get() {
            return Ok(poly);
        }
        let built = self
            .constructor
            .lowest_digit_poly(self.ctx.p(), level, Reducer::Fermat)?;
        Ok(cell.get_or_init(|| built))
    }

    fn check_ring(&self, x: &Residue<T>) -> Result<()> {
        let c = x.context();
        if c.p() != self.ctx.p() || c.e() > self.ctx.e() {
            return Err(Error::ContextMismatch {
                left: c.to_string(),
                right: self.ctx.to_string(),
            });
        }
        Ok(())
    }

    /// `(x - L(x)) / p` as an element of `Z/p^{e-1}`.
    pub fn remove_lowest_digit(&self, x: &Residue<T>) -> Result<Residue<T>> {
        self.check_ring(x)?;
        let ctx = x.context();
        if ctx.e() < 2 {
            return Err(Error::InvalidParams("removing a digit needs e ≥ 2".into()));
        }
        let digit = self.extractor(ctx.e())?.eval_word(x.value());
        self.strip(x, &digit)
    }

    fn strip(&self, x: &Residue<T>, digit: &T) -> Result<Residue<T>> {
        let ctx = x.context();
        let (quotient, rem) = ctx.sub(x.value(), digit).div_rem(&ctx.p_word());
        if !rem.is_zero() {
            return Err(Error::VerificationFailure {
                x: x.value().to_string(),
            });
        }
        Ok(ctx.with_exponent(ctx.e() - 1)?.residue(quotient))
    }

    /// Digits `d_0, …, d_{e-1}` with `x = Σ d_i p^i`, least significant first.
    pub fn digit_decompose(&self, x: &Residue<T>) -> Result<Vec<u64>> {
        self.check_ring(x)?;
        let mut current = x.clone();
        let mut digits = Vec::with_capacity(current.context().e() as usize);
        loop {
            let level = current.context().e();
            let digit = self.extractor(level)?.eval_word(current.value());
            digits.push(digit.to_u64().expect("a digit is below p"));
            if level == 1 {
                return Ok(digits);
            }
            current = self.strip(&current, &digit)?;
        }
    }
}

pub fn remove_lowest_digit<T: Word>(x: &Residue<T>) -> Result<Residue<T>> {
    DigitDecomposer::new(x.context()).remove_lowest_digit(x)
}

pub fn digit_decompose<T: Word>(x: &Residue<T>) -> Result<Vec<u64>> {
    DigitDecomposer::new(x.context()).digit_decompose(x)
}

/// Row labels of the comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Hs15,
    Ch18Analytic,
    FermatReduced,
    MinimalReduced,
    OracleMinimal,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Hs15,
        Method::Ch18Analytic,
        Method::FermatReduced,
        Method::MinimalReduced,
        Method::OracleMinimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hs15 => "hs15",
            Method::Ch18Analytic => "ch18-analytic",
            Method::FermatReduced => "fermat-reduced",
            Method::MinimalReduced => "minimal-reduced",
            Method::OracleMinimal => "oracle-minimal",
        }
    }

    /// Builds the extractor, or `None` for the analytic-only row.
    pub fn polynomial<T: Word>(
        self,
        constructor: &Constructor,
        p: u64,
        e: u32,
    ) -> Result<Option<Poly<T>>> {
        Ok(Some(match self {
            Method::Hs15 => constructor.lowest_digit_poly_hs15(p, e)?,
            Method::Ch18Analytic => return Ok(None),
            Method::FermatReduced => constructor.lowest_digit_poly(p, e, Reducer::Fermat)?,
            Method::MinimalReduced => constructor.lowest_digit_poly(p, e, Reducer::Minimal)?,
            Method::OracleMinimal => {
                let ctx = constructor.modulus::<T>(p, e)?;
                match represent_function(&TargetFunction::lowest_digit(&ctx)?, None)? {
                    OracleVerdict::Representable { witness, .. } => witness,
                    OracleVerdict::NotRepresentable { failing_index, .. } => {
                        return Err(Error::VerificationFailure {
                            x: format!(
                                "lowest-digit target rejected at difference {failing_index}"
                            ),
                        })
                    }
                }
            }
        }))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Horner,
    Bsgs,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Horner => "horner",
            Strategy::Bsgs => "bsgs",
        }
    }

    pub fn eval<T: Word>(self, f: &Poly<T>, x: &Residue<T>) -> Result<(Residue<T>, CostReport)> {
        match self {
            Strategy::Horner => eval_horner_counting(f, x),
            Strategy::Bsgs => eval_bsgs_counting(f, x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub p: u64,
    pub e: u32,
    pub method: Method,
    pub degree: u64,
    /// BSGS cost; absent for the analytic row.
    pub cost: Option<CostReport>,
}

/// Degrees and BSGS costs of every extractor at one `(p, e)`.
pub fn comparison_table<T: Word>(
    constructor: &Constructor,
    p: u64,
    e: u32,
) -> Result<Vec<TableRow>> {
    Method::ALL
        .into_iter()
        .map(|method| {
            let Some(poly) = method.polynomial::<T>(constructor, p, e)? else {
                return Ok(TableRow {
                    p,
                    e,
                    method,
                    degree: ch18_degree(p, e),
                    cost: None,
                });
            };
            let x = poly.context().residue(T::zero());
            let (_, cost) = eval_bsgs_counting(&poly, &x)?;
            Ok(TableRow {
                p,
                e,
                method,
                degree: poly.degree().unwrap_or(0) as u64,
                cost: Some(cost),
            })
        })
        .collect()
}

/// One cost measurement for the bench output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub p: u64,
    pub e: u32,
    pub method: Method,
    pub strategy: Strategy,
    pub degree: u64,
    pub cost: CostReport,
}

/// Horner and BSGS costs for every constructed extractor at one `(p, e)`.
pub fn bench_rows<T: Word>(constructor: &Constructor, p: u64, e: u32) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for method in Method::ALL {
        let Some(poly) = method.polynomial::<T>(constructor, p, e)? else {
            continue;
        };
        let x = poly.context().residue(T::zero());
        for strategy in [Strategy::Horner, Strategy::Bsgs] {
            let (_, cost) = strategy.eval(&poly, &x)?;
            rows.push(BenchRow {
                p,
                e,
                method,
                strategy,
                degree: poly.degree().unwrap_or(0) as u64,
                cost,
            });
        }
    }
    Ok(rows)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is ascii")
}

/// CSV with header `p,e,method,degree,nonscalar_mults,depth`; the analytic
/// row leaves the cost cells empty.
pub fn table_csv(rows: &[TableRow]) -> String {
    csv_string(
        &["p", "e", "method", "degree", "nonscalar_mults", "depth"],
        rows.iter().map(|r| {
            vec![
                r.p.to_string(),
                r.e.to_string(),
                r.method.name().to_string(),
                r.degree.to_string(),
                r.cost
                    .map(|c| c.nonscalar_mults.to_string())
                    .unwrap_or_default(),
                r.cost.map(|c| c.depth.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    csv_string(
        &[
            "p",
            "e",
            "method",
            "strategy",
            "degree",
            "nonscalar_mults",
            "scalar_mults",
            "depth",
        ],
        rows.iter().map(|r| {
            vec![
                r.p.to_string(),
                r.e.to_string(),
                r.method.name().to_string(),
                r.strategy.name().to_string(),
                r.degree.to_string(),
                r.cost.nonscalar_mults.to_string(),
                r.cost.scalar_mults.to_string(),
                r.cost.depth.to_string(),
            ]
        }),
    )
}

/// Structured form of a [`TableRow`]; integers as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowRecord {
    pub p: String,
    pub e: String,
    pub method: String,
    pub degree: String,
    pub nonscalar_mults: Option<String>,
    pub depth: Option<String>,
}

impl From<&TableRow> for TableRowRecord {
    fn from(r: &TableRow) -> Self {
        Self {
            p: r.p.to_string(),
            e: r.e.to_string(),
            method: r.method.name().to_string(),
            degree: r.degree.to_string(),
            nonscalar_mults: r.cost.map(|c| c.nonscalar_mults.to_string()),
            depth: r.cost.map(|c| c.depth.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRowRecord {
    pub p: String,
    pub e: String,
    pub method: String,
    pub strategy: String,
    pub degree: String,
    pub nonscalar_mults: String,
    pub scalar_mults: String,
    pub depth: String,
}

impl From<&BenchRow> for BenchRowRecord {
    fn from(r: &BenchRow) -> Self {
        Self {
            p: r.p.to_string(),
            e: r.e.to_string(),
            method: r.method.name().to_string(),
            strategy: r.strategy.name().to_string(),
            degree: r.degree.to_string(),
            nonscalar_mults: r.cost.nonscalar_mults.to_string(),
            scalar_mults: r.cost.scalar_mults.to_string(),
            depth: r.cost.depth.to_string(),
        }
    }
}
