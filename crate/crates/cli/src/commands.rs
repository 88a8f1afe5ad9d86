use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use lowdigit::construct::{first_extraction_failure, Constructor, DEFAULT_MAX_COMPOSED_DEGREE};
use lowdigit::evalcost::{
    bench_csv, bench_rows, comparison_table, table_csv, BenchRowRecord, TableRow, TableRowRecord,
};
use lowdigit::oracle::{
    impossibility_certificate, represent_function, ImpossibilityCertificate, OracleVerdict,
    TargetFunction,
};
use lowdigit::ring::{is_prime, DEFAULT_MAX_PRIME};
use lowdigit::{BigUint, Error, Poly, PolyRecord, PrimePowerModulus, Word};
use serde::Serialize;

use crate::args::{Command, Common, Format, Method, Target};

/// Exhaustive subcommands refuse `p^e` above this without `--unsafe-cap`.
pub const EXHAUSTIVE_CAP: u64 = 100_000;

/// Primes the table walks without `--unsafe-cap`.
const TABLE_PRIME_CAP: u64 = 13;

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SELF_CHECK: u8 = 3;
pub const EXIT_GUARD: u8 = 4;

#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl Exit {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_GUARD,
            message: message.into(),
        }
    }
}

impl From<Error> for Exit {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::SelfCheckFailed { .. } | Error::VerificationFailure { .. } => EXIT_SELF_CHECK,
            Error::GuardExceeded { .. } | Error::CapExceeded { .. } => EXIT_GUARD,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// Whether `p^e` fits a `u64` word.
fn fits_u64(p: u64, e: u32) -> bool {
    (p as u128)
        .checked_pow(e)
        .is_some_and(|v| v <= u64::MAX as u128)
}

/// Runs `$body` with `$T` bound to `u64` when `p^e` fits, `BigUint` otherwise.
macro_rules! with_word {
    ($p:expr, $e:expr, $f:ident ( $($arg:expr),* )) => {
        if fits_u64($p, $e) {
            $f::<u64>($($arg),*)
        } else {
            $f::<BigUint>($($arg),*)
        }
    };
}

fn constructor(common: &Common) -> Constructor {
    Constructor {
        self_check_limit: common.self_check_limit,
        trust_prime: common.trust_prime,
        max_composed_degree: if common.unsafe_cap {
            u64::MAX
        } else {
            DEFAULT_MAX_COMPOSED_DEGREE
        },
    }
}

fn check_prime_size(common: &Common, p: u64) -> Result<(), Exit> {
    if p > DEFAULT_MAX_PRIME && !common.trust_prime {
        return Err(Exit::usage(format!(
            "p = {p} exceeds {DEFAULT_MAX_PRIME}; pass --trust-prime"
        )));
    }
    Ok(())
}

fn check_exhaustive_cap(common: &Common, p: u64, e: u32) -> Result<(), Exit> {
    let size = (p as u128).checked_pow(e);
    if common.unsafe_cap || size.is_some_and(|s| s <= EXHAUSTIVE_CAP as u128) {
        Ok(())
    } else {
        Err(Exit::guard(format!(
            "{p}^{e} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; pass --unsafe-cap to run anyway"
        )))
    }
}

fn log(common: &Common, start: Instant, what: &str) {
    if common.verbose {
        eprintln!("{what}: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    }
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialise");
    s.push('\n');
    s
}

pub fn dispatch(command: &Command, common: &Common) -> Result<Outcome, Exit> {
    match *command {
        Command::Construct { p, e, method } => {
            // the lifting polynomial lives one power higher
            with_word!(p, e + 1, construct(common, p, e, method))
        }
        Command::Verify {
            ref poly_file,
            p,
            e,
        } => verify(common, poly_file, p, e),
        Command::Oracle {
            p,
            e,
            target,
            r,
            c,
            degree_cap,
        } => with_word!(p, e, oracle(common, p, e, target, r, c, degree_cap)),
        Command::Impossible { p, r, e } => with_word!(p, e, impossible(common, p, r, e)),
        Command::Bench { p, e } => with_word!(p, e + 1, bench(common, p, e)),
        Command::Table { pmax, emax } => table(common, pmax, emax),
    }
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    #[serde(flatten)]
    poly: PolyRecord,
    method: &'a str,
    degree: Option<String>,
    self_check: &'a str,
}

fn construct<T: Word>(common: &Common, p: u64, e: u32, method: Method) -> Result<Outcome, Exit> {
    let c = constructor(common);
    let ctx = c.modulus::<T>(p, e)?;
    let start = Instant::now();
    let (poly, checked) = match method.construction() {
        Some(kind) => (c.build::<T>(kind, p, e)?, c.checks(&ctx)),
        None => {
            check_exhaustive_cap(common, p, e)?;
            (oracle_witness(&ctx)?, true)
        }
    };
    let elapsed = start.elapsed();
    log(
        common,
        start,
        &format!("construct {} p={p} e={e}", method.name()),
    );
    let self_check = if checked { "passed" } else { "skipped" };

    let text = match common.format.unwrap_or(Format::Human) {
        Format::Json => to_json(&ConstructOutput {
            poly: poly.to_record(),
            method: method.name(),
            degree: poly.degree().map(|d| d.to_string()),
            self_check,
        }),
        Format::Human => {
            let mut s = String::new();
            let _ = writeln!(s, "method:     {}", method.name());
            let _ = writeln!(s, "ring:       {}", poly.context());
            let _ = writeln!(s, "degree:     {}", degree_text(&poly));
            let _ = writeln!(s, "self-check: {self_check}");
            let _ = writeln!(s, "time:       {:.3} ms", elapsed.as_secs_f64() * 1e3);
            let _ = writeln!(s, "f(x) = {poly}");
            s
        }
        Format::Csv => return Err(Exit::usage("construct has no csv form; use human or json")),
    };
    Ok(Outcome::ok(text))
}

fn degree_text<T: Word>(poly: &Poly<T>) -> String {
    poly.degree()
        .map_or_else(|| "none (zero polynomial)".into(), |d| d.to_string())
}

fn oracle_witness<T: Word>(ctx: &PrimePowerModulus<T>) -> Result<Poly<T>, Exit> {
    match represent_function(&TargetFunction::lowest_digit(ctx)?, None)? {
        OracleVerdict::Representable { witness, .. } => Ok(witness),
        OracleVerdict::NotRepresentable { failing_index, .. } => Err(Error::VerificationFailure {
            x: format!("lowest-digit target rejected at difference {failing_index}"),
        }
        .into()),
    }
}

fn read_input(path: &Path) -> Result<String, Exit> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Exit::usage(format!("cannot read standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Exit::usage(format!("cannot read {}: {e}", path.display())))
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    p: String,
    e: String,
    degree: Option<String>,
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<Counterexample>,
}

#[derive(Serialize)]
struct Counterexample {
    x: String,
    value: String,
    expected: String,
}

fn verify(
    common: &Common,
    path: &Path,
    want_p: Option<u64>,
    want_e: Option<u32>,
) -> Result<Outcome, Exit> {
    let record = PolyRecord::from_json(&read_input(path)?)?;
    let p = u64::parse_decimal(&record.p)
        .ok_or_else(|| Exit::usage(format!("bad prime {:?}", record.p)))?;
    let e = record.e;
    if want_p.is_some_and(|q| q != p) || want_e.is_some_and(|q| q != e) {
        return Err(Exit::usage(format!(
            "file holds a polynomial over Z/{p}^{e}"
        )));
    }
    check_prime_size(common, p)?;
    check_exhaustive_cap(common, p, e)?;
    with_word!(p, e, verify_record(common, &record))
}

fn verify_record<T: Word>(common: &Common, record: &PolyRecord) -> Result<Outcome, Exit> {
    let poly: Poly<T> = record.to_poly()?;
    let ctx = poly.context();
    let start = Instant::now();
    let failure = first_extraction_failure(&poly)?;
    log(common, start, "verify");

    let counterexample = failure.map(|x| Counterexample {
        x: x.to_string(),
        value: poly.eval_u64(x).to_string(),
        expected: (x % ctx.p()).to_string(),
    });
    let text = match common.format.unwrap_or(Format::Human) {
        Format::Json => to_json(&VerifyOutput {
            p: ctx.p().to_string(),
            e: ctx.e().to_string(),
            degree: poly.degree().map(|d| d.to_string()),
            result: if counterexample.is_some() {
                "fail"
            } else {
                "pass"
            },
            counterexample,
        }),
        Format::Human => match &counterexample {
            None => format!(
                "PASS: f(x) ≡ x mod {} for every x in Z/{}^{} (degree {})\n",
                ctx.p(),
                ctx.p(),
                ctx.e(),
                degree_text(&poly)
            ),
            Some(c) => format!(
                "FAIL at x = {}: f(x) = {}, expected {} (mod {})\n",
                c.x,
                c.value,
                c.expected,
                ctx.modulus()
            ),
        },
        Format::Csv => return Err(Exit::usage("verify has no csv form; use human or json")),
    };
    Ok(Outcome {
        code: if failure.is_some() {
            EXIT_VERIFY_FAILED
        } else {
            0
        },
        text,
    })
}

#[allow(clippy::too_many_arguments)]
fn oracle<T: Word>(
    common: &Common,
    p: u64,
    e: u32,
    target: Target,
    r: Option<u32>,
    c: Option<u64>,
    degree_cap: Option<usize>,
) -> Result<Outcome, Exit> {
    let ctx = constructor(common).modulus::<T>(p, e)?;
    check_exhaustive_cap(common, p, e)?;
    let needs_r = matches!(target, Target::RemoveLowDigits | Target::KeepLowDigits);
    if needs_r != r.is_some() {
        return Err(Exit::usage(if needs_r {
            "--r is required for the remove/keep targets"
        } else {
            "--r only applies to the remove/keep targets"
        }));
    }
    if (target == Target::Constant) != c.is_some() {
        return Err(Exit::usage(
            "--c is required for, and only for, the constant target",
        ));
    }
    let table = match target {
        Target::LowestDigit => TargetFunction::lowest_digit(&ctx)?,
        Target::RemoveLowDigits => TargetFunction::remove_low_digits(&ctx, r.unwrap_or_default())?,
        Target::KeepLowDigits => TargetFunction::keep_low_digits(&ctx, r.unwrap_or_default())?,
        Target::Constant => {
            TargetFunction::constant(&ctx, T::from_u64_word(c.unwrap_or_default()))?
        }
    };
    if let Some(r) = r {
        if r <= 1 || r >= e {
            eprintln!("note: r = {r} is outside 1 < r < e, where no such polynomial exists");
        }
    }

    let start = Instant::now();
    let verdict = represent_function(&table, degree_cap)?;
    log(common, start, "oracle");

    let text = match common.format.unwrap_or(Format::Human) {
        Format::Json => to_json(&verdict.to_record()),
        Format::Human => match &verdict {
            OracleVerdict::Representable {
                minimal_degree,
                witness,
            } => format!(
                "target {} on {ctx}: representable\nminimal degree: {minimal_degree}\nwitness: {witness}\n",
                table.label()
            ),
            OracleVerdict::NotRepresentable {
                failing_index,
                required_divisor,
                actual_difference,
            } => format!(
                "target {} on {ctx}: not representable\n\
                 difference {failing_index} is {} but must be divisible by {required_divisor}\n",
                table.label(),
                actual_difference.value()
            ),
        },
        Format::Csv => return Err(Exit::usage("oracle has no csv form; use human or json")),
    };
    Ok(Outcome::ok(text))
}

fn impossible<T: Word>(common: &Common, p: u64, r: u32, e: u32) -> Result<Outcome, Exit> {
    let ctx = constructor(common).modulus::<T>(p, e)?;
    let cert = impossibility_certificate(&ctx, r)?;
    let text = match common.format.unwrap_or(Format::Human) {
        Format::Json => to_json(&cert.to_record()),
        Format::Human => certificate_text(&cert),
        Format::Csv => return Err(Exit::usage("impossible has no csv form; use human or json")),
    };
    Ok(Outcome::ok(text))
}

fn certificate_text<T: Word>(cert: &ImpossibilityCertificate<T>) -> String {
    let set = |v: &[u64]| {
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "no polynomial removes the lowest {} digits modulo {}^{}",
        cert.r, cert.p, cert.e
    );
    for c in &cert.constraints {
        let _ = writeln!(s, "  f({}) ≡ {} (mod {})", c.point, c.value, c.modulus);
    }
    let _ = writeln!(
        s,
        "  a_0 ≡ {} (mod {})",
        cert.constraints[0].value, cert.constraints[0].modulus
    );
    let _ = writeln!(
        s,
        "  from f({}): a_1 mod {} ∈ {{{}}}",
        cert.constraints[1].point,
        cert.p,
        set(&cert.a1_from_top_point)
    );
    let _ = writeln!(
        s,
        "  from f({}) mod {}^2: a_1 mod {} ∈ {{{}}}",
        cert.constraints[2].point,
        cert.p,
        cert.p,
        set(&cert.a1_from_p)
    );
    let _ = writeln!(
        s,
        "  contradiction: {}",
        if cert.contradiction() { "yes" } else { "no" }
    );
    s
}

fn bench<T: Word>(common: &Common, p: u64, e: u32) -> Result<Outcome, Exit> {
    check_prime_size(common, p)?;
    check_exhaustive_cap(common, p, e)?;
    let start = Instant::now();
    let rows = bench_rows::<T>(&constructor(common), p, e)?;
    log(common, start, "bench");
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => bench_csv(&rows),
        Format::Json => to_json(&rows.iter().map(BenchRowRecord::from).collect::<Vec<_>>()),
        Format::Human => align(&bench_csv(&rows)),
    };
    Ok(Outcome::ok(text))
}

fn table(common: &Common, pmax: u64, emax: u32) -> Result<Outcome, Exit> {
    if pmax > TABLE_PRIME_CAP && !common.unsafe_cap {
        return Err(Exit::guard(format!(
            "--pmax above {TABLE_PRIME_CAP} needs --unsafe-cap"
        )));
    }
    check_prime_size(common, pmax)?;
    let c = constructor(common);
    let start = Instant::now();
    let mut rows: Vec<TableRow> = Vec::new();
    for p in (2..=pmax).filter(|&p| is_prime(p)) {
        for e in 1..=emax {
            if check_exhaustive_cap(common, p, e).is_err() {
                break;
            }
            rows.extend(with_word!(p, e + 1, table_point(&c, p, e))?);
        }
    }
    log(common, start, "table");
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => table_csv(&rows),
        Format::Json => to_json(&rows.iter().map(TableRowRecord::from).collect::<Vec<_>>()),
        Format::Human => align(&table_csv(&rows)),
    };
    Ok(Outcome::ok(text))
}

fn table_point<T: Word>(c: &Constructor, p: u64, e: u32) -> Result<Vec<TableRow>, Exit> {
    Ok(comparison_table::<T>(c, p, e)?)
}

/// Pads CSV columns into a plain-text table.
fn align(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|i| {
            rows.iter()
                .map(|r| r.get(i).map_or(0, |c| c.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
