//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification finds violations,
//! 2 on bad input.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::CycloScalar;
use crate::finite_field::{BasisKind, ElementRepr, FieldError, FieldSpec, DEFAULT_MAX_D};
use crate::matrix::CMatrix;
use crate::mub::{self, MubError};
use crate::suite;
use crate::tensor::{self, TensorError};
use crate::weyl::{self, ClassId, CommutingClass, WeylError};

/// Bound on `d` for commands that build `d × d` matrices.
pub const MATRIX_MAX_D: u64 = 32;
/// Environment variable overriding both dimension bounds.
pub const MAX_D_ENV: &str = "MUBFORGE_MAX_D";

#[derive(Debug, Parser)]
#[command(
    name = "mubforge",
    version,
    about = "Exact mutually unbiased bases in prime-power dimensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field elements, traces, characters and the Jacobi logarithm table.
    FieldInfo(FieldArgs),
    /// Operator matrices: Z_q, X_q, X_qZ_r, F and V (or X, Z, F, V for n = 1).
    Operators(OperatorArgs),
    /// The d+1 commuting classes.
    Classes(ClassArgs),
    /// The verified family of d+1 mutually unbiased bases.
    Mubs(FieldArgs),
    /// Run the full identity suite and report violations.
    Verify(FieldArgs),
    /// Tensor-product Pauli words for every class member.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Polynomial,
    Normal,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Polynomial => BasisKind::Polynomial,
            BasisArg::Normal => BasisKind::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpKind {
    Z,
    X,
    Xz,
    F,
    V,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Characteristic (a prime).
    #[arg(long)]
    pub p: u32,
    /// Extension degree; d = p^n.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Only this operator family.
    #[arg(long, value_enum)]
    pub op: Option<OpKind>,
    /// Subscript q (n ≥ 2).
    #[arg(long)]
    pub q: Option<u32>,
    /// Subscript r (n ≥ 2): X_qZ_r, or V_q^(r).
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Only this class: diagonal, shift, or mixed:<r>.
    #[arg(long)]
    pub class: Option<ClassId>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value_t = BasisArg::Polynomial)]
    pub basis: BasisArg,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// A finished command: the document to emit and the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub document: String,
    pub status: i32,
}

fn bound(default: u64) -> Result<u64, CliError> {
    match std::env::var(MAX_D_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_D_ENV} must be a positive integer"))),
        Err(_) => Ok(default),
    }
}

fn field(args: &FieldArgs, default_bound: u64) -> Result<FieldSpec, CliError> {
    Ok(FieldSpec::with_bound(
        args.p,
        args.n,
        bound(default_bound)?,
    )?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

/// Runs a parsed command. Errors map to exit status 2.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let (outcome, args) = match &cli.command {
        Command::FieldInfo(a) => (field_info(a)?, a),
        Command::Operators(a) => (operators(a)?, &a.field),
        Command::Classes(a) => (classes(a)?, &a.field),
        Command::Mubs(a) => (mubs(a)?, a),
        Command::Verify(a) => (verify(a)?, a),
        Command::Decompose(a) => (decompose(a)?, &a.field),
    };
    if let Some(path) = &args.out {
        std::fs::write(path, &outcome.document).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        return Ok(Outcome {
            document: String::new(),
            status: outcome.status,
        });
    }
    Ok(outcome)
}

/// Parses `args`, runs the command, prints the result, and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.document);
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn ok(document: String) -> Outcome {
    Outcome {
        document,
        status: 0,
    }
}

fn modulus_text(spec: &FieldSpec) -> String {
    let terms: Vec<String> = spec
        .modulus()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let coeff = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            match i {
                0 => coeff,
                1 => format!("{coeff}θ"),
                _ => format!("{coeff}θ^{i}"),
            }
        })
        .collect();
    terms.join(" + ")
}

fn element_text(power: Option<u32>) -> String {
    match power {
        None => "0".into(),
        Some(0) => "1".into(),
        Some(1) => "α".into(),
        Some(k) => format!("α^{k}"),
    }
}

#[derive(Serialize)]
struct ElementRow {
    position: usize,
    element: ElementRepr,
    coeffs: Vec<u32>,
    trace: u32,
    character: CycloScalar,
}

#[derive(Serialize)]
struct FieldInfoDoc<'a> {
    field: &'a FieldSpec,
    d: u32,
    elements: Vec<ElementRow>,
    jacobi: &'a [Option<u32>],
}

fn field_info(args: &FieldArgs) -> Result<Outcome, CliError> {
    let spec = field(args, DEFAULT_MAX_D)?;
    let rows: Vec<ElementRow> = spec
        .elements()
        .enumerate()
        .map(|(position, e)| ElementRow {
            position,
            element: ElementRepr::from(&e),
            coeffs: e.coeffs(),
            trace: spec.trace(&e),
            character: spec.character(&e),
        })
        .collect();
    if args.format == Format::Json {
        return Ok(ok(to_json(&FieldInfoDoc {
            field: &spec,
            d: spec.d(),
            elements: rows,
            jacobi: spec.jacobi_table(),
        })));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "GF({}^{}), d = {}, modulus {}",
        spec.p(),
        spec.n(),
        spec.d(),
        modulus_text(&spec)
    );
    let _ = writeln!(s, "\npos  element  coeffs (c0..)  tr  χ");
    for r in &rows {
        let power = match r.element {
            ElementRepr::Power { power } => Some(power),
            ElementRepr::Zero { .. } => None,
        };
        let coeffs: Vec<String> = r.coeffs.iter().map(u32::to_string).collect();
        let _ = writeln!(
            s,
            "{:<4} {:<8} {:<14} {:<3} {}",
            r.position,
            element_text(power),
            format!("({})", coeffs.join(", ")),
            r.trace,
            r.character
        );
    }
    let _ = writeln!(s, "\nJacobi logarithm: 1 + α^m = α^L(m)");
    for (m, l) in spec.jacobi_table().iter().enumerate() {
        let shown = l.map_or("⊥ (sum is 0)".to_string(), |v| v.to_string());
        let _ = writeln!(s, "L({m}) = {shown}");
    }
    Ok(ok(s))
}

#[derive(Serialize)]
struct NamedMatrix {
    name: String,
    matrix: CMatrix,
}

#[derive(Serialize)]
struct OperatorsDoc {
    p: u32,
    n: u32,
    operators: Vec<NamedMatrix>,
}

fn named(name: impl Into<String>, matrix: CMatrix) -> NamedMatrix {
    NamedMatrix {
        name: name.into(),
        matrix,
    }
}

fn operators(args: &OperatorArgs) -> Result<Outcome, CliError> {
    let spec = field(&args.field, MATRIX_MAX_D)?;
    let wants = |k: OpKind| args.op.is_none_or(|o| o == k);
    let mut ops = Vec::new();
    if spec.n() == 1 {
        if args.q.is_some() || args.r.is_some() {
            return Err(CliError::Usage(
                "--q and --r select subscripts of prime-power operators (n ≥ 2)".into(),
            ));
        }
        if args.op == Some(OpKind::Xz) {
            return Err(CliError::Usage(
                "--op xz needs n ≥ 2; prime products appear under `classes`".into(),
            ));
        }
        let d = spec.p();
        let (x, z, _) = weyl::prime_generators(d)?;
        if wants(OpKind::X) {
            ops.push(named("X", x));
        }
        if wants(OpKind::Z) {
            ops.push(named("Z", z));
        }
        if wants(OpKind::F) {
            ops.push(named("F", weyl::prime_fourier(d)?));
        }
        if wants(OpKind::V) {
            ops.push(named("V", weyl::prime_v(d)?));
        }
    } else {
        let order = spec.d() - 1;
        let qs: Vec<u32> = match args.q {
            Some(q) => vec![q],
            None => (0..order).collect(),
        };
        if wants(OpKind::Z) {
            for &q in &qs {
                ops.push(named(format!("Z_{q}"), weyl::build_zq(&spec, q)?));
            }
        }
        if wants(OpKind::X) {
            for &q in &qs {
                ops.push(named(format!("X_{q}"), weyl::build_xq(&spec, q)?));
            }
        }
        if args.op == Some(OpKind::Xz) {
            let rs: Vec<u32> = match args.r {
                Some(r) => vec![r],
                None => (0..order).collect(),
            };
            for &q in &qs {
                for &r in &rs {
                    ops.push(named(format!("X_{q}Z_{r}"), weyl::build_xqzr(&spec, q, r)?));
                }
            }
        }
        if wants(OpKind::F) && args.q.is_none() {
            ops.push(named("F", weyl::build_f(&spec)));
        }
        if wants(OpKind::V) && (spec.p() != 2 || args.op == Some(OpKind::V)) {
            let r = args.r.unwrap_or(0);
            for &q in &qs {
                ops.push(named(format!("V_{q}^({r})"), weyl::build_vqr(&spec, q, r)?));
            }
        }
    }
    if args.field.format == Format::Json {
        return Ok(ok(to_json(&OperatorsDoc {
            p: spec.p(),
            n: spec.n(),
            operators: ops,
        })));
    }
    let mut s = String::new();
    for op in &ops {
        if op.matrix.is_diagonal() {
            let _ = writeln!(s, "{} = {}", op.name, op.matrix);
        } else {
            let _ = writeln!(s, "{} =\n{}\n", op.name, op.matrix);
        }
    }
    Ok(ok(s))
}

#[derive(Serialize)]
struct ClassesDoc<'a> {
    d: u32,
    classes: Vec<&'a CommutingClass>,
}

fn classes(args: &ClassArgs) -> Result<Outcome, CliError> {
    let spec = field(&args.field, MATRIX_MAX_D)?;
    let all = if spec.n() == 1 {
        weyl::prime_classes(spec.p())?
    } else {
        weyl::build_classes(&spec)?
    };
    let chosen: Vec<&CommutingClass> = all
        .iter()
        .filter(|c| args.class.is_none_or(|id| id == c.class_id))
        .collect();
    if chosen.is_empty() {
        return Err(CliError::Usage(format!(
            "no class {} for d = {}",
            args.class.map(|c| c.to_string()).unwrap_or_default(),
            spec.d()
        )));
    }
    if args.field.format == Format::Json {
        return Ok(ok(to_json(&ClassesDoc {
            d: spec.d(),
            classes: chosen,
        })));
    }
    let mut s = String::new();
    for class in chosen {
        let labels: Vec<String> = class.members.iter().map(|m| m.label.to_string()).collect();
        let _ = writeln!(s, "class {}: {{{}}}", class.class_id, labels.join(", "));
        for m in &class.members {
            if m.matrix.is_diagonal() {
                let _ = writeln!(s, "{} = {}", m.label, m.matrix);
            } else {
                let _ = writeln!(s, "{} =\n{}", m.label, m.matrix);
            }
        }
        s.push('\n');
    }
    Ok(ok(s))
}

fn mubs(args: &FieldArgs) -> Result<Outcome, CliError> {
    let spec = field(args, MATRIX_MAX_D)?;
    let family = match mub::build_mubs(&spec) {
        Ok(f) => f,
        Err(MubError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            return Ok(Outcome {
                document: String::new(),
                status: 1,
            });
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    // fail closed: re-check the finished family before emitting it
    let violations = mub::verify_unbiased(&family);
    if !violations.is_empty() {
        eprintln!("verification failed: {} violating pairs", violations.len());
        return Ok(Outcome {
            document: to_json(&violations),
            status: 1,
        });
    }
    if args.format == Format::Json {
        return Ok(ok(to_json(&family)));
    }
    let mut s = format!(
        "d = {}, route {}, {} bases, all cross overlaps |<u|w>|² = 1/{}\n",
        family.d,
        family.route.as_str(),
        family.bases.len(),
        family.d
    );
    for (i, b) in family.bases.iter().enumerate() {
        let _ = writeln!(s, "\nbasis {i} ({}), {}", b.class, b.ordering);
        for (j, v) in b.vectors.iter().enumerate() {
            let _ = writeln!(s, "  v{j} = {v}");
        }
    }
    Ok(ok(s))
}

fn verify(args: &FieldArgs) -> Result<Outcome, CliError> {
    let spec = field(args, MATRIX_MAX_D)?;
    let report = suite::run(&spec);
    let status = i32::from(!report.passed());
    if args.format == Format::Json {
        return Ok(Outcome {
            document: to_json(&report),
            status,
        });
    }
    let mut s = format!("GF({}^{}), d = {}\n", report.p, report.n, report.d);
    for c in &report.checks {
        let mark = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{mark} {} ({} cases)", c.name, c.cases);
        for v in &c.violations {
            let _ = writeln!(s, "    {v}");
        }
    }
    let _ = writeln!(s, "{} violations", report.violation_count);
    Ok(Outcome {
        document: s,
        status,
    })
}

fn decompose(args: &DecomposeArgs) -> Result<Outcome, CliError> {
    let spec = field(&args.field, MATRIX_MAX_D)?;
    let table = tensor::decomposition_table(&spec, args.basis.into())?;
    if args.field.format == Format::Json {
        return Ok(ok(to_json(&table)));
    }
    let kind = match table.basis {
        BasisKind::Polynomial => "polynomial",
        BasisKind::Normal => "normal",
    };
    let mut s = format!("GF({}^{}), {kind} basis\n", table.p, table.n);
    let kets: Vec<String> = table
        .kets
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let e = if i == 0 {
                None
            } else {
                Some(i as u32 % (spec.d() - 1))
            };
            format!("|{}⟩ = {k}", element_text(e))
        })
        .collect();
    let _ = writeln!(s, "{}", kets.join(", "));
    for row in &table.rows {
        let words: Vec<String> = row.entries.iter().map(|e| e.word.to_string()).collect();
        let _ = writeln!(s, "{}: {}", row.set, words.join(", "));
    }
    let _ = writeln!(
        s,
        "F factorizes as F_{}^⊗{}: {}",
        table.p,
        table.n,
        if table.fourier_factorizes {
            "yes"
        } else {
            "no"
        }
    );
    Ok(ok(s))
}
