use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdc_core::bounds::{self, BoundResult};
use cdc_core::cdc::{lifted_mrd, parallelism_2_of_f_q4, spread, Cdc};
use cdc_core::constructions::recipes::import_slots;
use cdc_core::constructions::{recipe, recipe_names, Imports};
use cdc_core::error::Error;
use cdc_core::gf::Field;
use cdc_core::io::{self as cio, Order};
use cdc_core::linalg::gaussian_binomial;
use cdc_core::rankmetric::{gabidulin_mrd, rank_distribution, rank_histogram};
use cdc_core::verify::{
    self, coverage_check, enumerate_subspaces, family_coverage_check, full_pairwise_check,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

#[derive(Parser)]
#[command(name = "cdc", version, about = "Constant-dimension subspace codes")]
struct Cli {
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a code from a named recipe.
    Construct(ConstructArgs),
    /// Check the minimum distance of a code file.
    Verify(VerifyArgs),
    /// Print the known bounds for A_q(n,d;k).
    Bound(BoundArgs),
    /// Evaluate a named lower-bound polynomial.
    Formula(FormulaArgs),
    /// Validate a code file and summarise it.
    Import(ImportArgs),
    /// Write a standard object, or rewrite a code file in another order.
    Export(ExportArgs),
    /// Run a brute-force cross-check.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    recipe: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: Option<usize>,
    /// External code for an import slot, as SLOT=PATH.
    #[arg(long = "import", value_parser = parse_slot)]
    imports: Vec<(String, PathBuf)>,
    /// Partial-spread subcode of an imported code, as SLOT=PATH.
    #[arg(long = "subcode", value_parser = parse_slot)]
    subcodes: Vec<(String, PathBuf)>,
    /// Output file, `-` for standard output.
    #[arg(long)]
    out: Option<String>,
    /// Hold the whole code in memory before writing.
    #[arg(long)]
    materialize: bool,
    #[arg(long, value_enum, default_value_t = OrderArg::Generation)]
    order: OrderArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Sample,
}

#[derive(Args)]
struct VerifyArgs {
    /// Code file, `-` for standard input.
    #[arg(long)]
    file: String,
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    mode: Mode,
    #[arg(long, default_value_t = 1_000_000)]
    pairs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest code accepted in full mode.
    #[arg(long, default_value_t = verify::FULL_CHECK_CAP)]
    cap: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula name such as `A_q(12,6;6)`; `list` prints all names.
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    k: Option<usize>,
    /// Size of the base code, for `A_q(3k,4;k)`.
    #[arg(long)]
    lambda: Option<BigUint>,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    file: String,
    #[arg(long)]
    subcode: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    LiftedMrd,
    Spread,
    Parallelism,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Canonical,
    Generation,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::Canonical => Order::Canonical,
            OrderArg::Generation => Order::Generation,
        }
    }
}

#[derive(Args)]
struct ExportArgs {
    #[arg(
        long,
        value_enum,
        conflicts_with = "file",
        required_unless_present = "file"
    )]
    object: Option<Object>,
    /// Existing code file to rewrite.
    #[arg(long)]
    file: Option<String>,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_enum, default_value_t = OrderArg::Canonical)]
    order: OrderArg,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Rank histogram of a Gabidulin code against the rank distribution.
    RankHistogram,
    /// Enumerated k-subspaces against the Gaussian binomial.
    Enumerate,
    /// Point coverage of a claimed spread file.
    Coverage,
    /// Line coverage of the parallelism of PG(3,q).
    Parallelism,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(value_enum)]
    kind: OracleKind,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    file: Option<String>,
}

enum Fail {
    Violation(String),
    Usage(String),
    Io(String),
    Precondition(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Violation(_) => 1,
            Fail::Usage(_) => 2,
            Fail::Io(_) => 3,
            Fail::Precondition(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Violation(m) | Fail::Usage(m) | Fail::Io(m) | Fail::Precondition(m) => m,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let m = e.to_string();
        match e {
            Error::UnknownRecipe(_) | Error::MissingImport(_) => Fail::Usage(m),
            Error::Format(_) | Error::Io(_) => Fail::Io(m),
            Error::Verification(_) => Fail::Violation(m),
            _ => Fail::Precondition(m),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Fail {
        Fail::Io(e.to_string())
    }
}

type Out = Result<(), Fail>;

fn parse_slot(s: &str) -> Result<(String, PathBuf), String> {
    let (slot, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected SLOT=PATH, got `{s}`"))?;
    Ok((slot.to_string(), PathBuf::from(path)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let r = match cli.cmd {
        Cmd::Construct(a) => construct(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Bound(a) => bound(a),
        Cmd::Formula(a) => formula(a),
        Cmd::Import(a) => import(a),
        Cmd::Export(a) => export(a),
        Cmd::Oracle(a) => oracle(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_input(path: &str) -> Result<Cdc, Fail> {
    if path == "-" {
        Ok(cio::read_code(io::stdin().lock())?)
    } else {
        let f = File::open(path).map_err(|e| Fail::Io(format!("{path}: {e}")))?;
        Ok(cio::read_code(BufReader::new(f))?)
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, Fail> {
    if path == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let f = File::create(path).map_err(|e| Fail::Io(format!("{path}: {e}")))?;
        Ok(Box::new(f))
    }
}

fn construct(a: ConstructArgs) -> Out {
    if !recipe_names().contains(&a.recipe.as_str()) {
        return Err(Fail::Usage(format!(
            "unknown recipe `{}`; known: {}",
            a.recipe,
            recipe_names().join(", ")
        )));
    }
    let slots = import_slots(&a.recipe, a.k);
    for (slot, _) in a.imports.iter().chain(&a.subcodes) {
        if !slots.iter().any(|s| s.name == slot) {
            return Err(Fail::Usage(format!(
                "recipe {} has no import slot `{slot}`",
                a.recipe
            )));
        }
    }
    let mut imports = Imports::new();
    for (slot, path) in &a.imports {
        let sub = a.subcodes.iter().find(|(s, _)| s == slot).map(|(_, p)| p);
        let c = match sub {
            Some(sp) => cio::import_with_subcode(path, sp)?.0,
            None => cio::import(path)?,
        };
        imports.insert(slot.clone(), c);
    }
    if let Some((slot, _)) = a.subcodes.iter().find(|(s, _)| !imports.contains_key(s)) {
        return Err(Fail::Usage(format!(
            "--subcode {slot} given without --import {slot}"
        )));
    }
    let out = recipe(&a.recipe, a.q, a.k, &imports)?;
    // status goes to stderr when the code itself is on stdout
    let to_stdout = a.out.as_deref() == Some("-");
    let mut status: Box<dyn Write> = if to_stdout {
        Box::new(io::stderr())
    } else {
        Box::new(io::stdout())
    };
    writeln!(
        status,
        "recipe: {} q={} (n,d;k)=({},{};{})",
        out.name, out.q, out.n, out.d, out.k
    )?;
    writeln!(status, "expected: {}", out.expected_size)?;
    for note in &out.notes {
        writeln!(status, "note: {note}")?;
    }
    let Some(code) = out.code else {
        writeln!(status, "generated: none (bound only)")?;
        return Ok(());
    };
    let code = if a.materialize {
        code.materialize()?
    } else {
        code
    };
    let generated = BigUint::from(code.len());
    writeln!(status, "generated: {generated}")?;
    if let Some(path) = &a.out {
        cio::write_code(&code, a.order.into(), open_output(path)?)?;
    }
    if generated == out.expected_size {
        writeln!(status, "status: equal")?;
        Ok(())
    } else {
        writeln!(status, "status: mismatch")?;
        Err(Fail::Violation(format!(
            "generated {generated} codewords, expected {}",
            out.expected_size
        )))
    }
}

fn verify_cmd(a: VerifyArgs) -> Out {
    let c = read_input(&a.file)?;
    let report = match a.mode {
        Mode::Full => full_pairwise_check(&c, a.cap)?,
        Mode::Sample => verify::sampled_check(&c, a.pairs, a.seed)?,
    };
    println!("{}", report.to_json_line());
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Violation(format!(
            "{} pairs below distance {}",
            report.violations_total, report.d_claim
        )))
    }
}

fn bound(a: BoundArgs) -> Out {
    let (q, n, d, k) = (a.q, a.n, a.d, a.k);
    Field::of_order(q)?;
    let mut rows: Vec<(&str, BoundResult)> = Vec::new();
    if let Some(e) = bounds::exact_registry(q, n, d, k) {
        rows.push(("exact", e));
    }
    rows.push(("johnson", bounds::johnson_upper(q, n, d, k)?));
    rows.push(("singleton", bounds::singleton_like_upper(q, n, d, k)?));
    for b in bounds::lower_bound_registry(q, n, d, k) {
        rows.push(("lower", b));
    }
    let mut w = io::stdout().lock();
    if a.csv {
        writeln!(w, "source,kind,value,derivation")?;
        for (src, b) in &rows {
            let deriv = b.derivation.join("; ").replace('"', "'");
            writeln!(w, "{src},{:?},{},\"{deriv}\"", b.kind, b.value)?;
        }
    } else {
        writeln!(w, "A_{q}({n},{d};{k})")?;
        for (src, b) in &rows {
            writeln!(
                w,
                "{src:<10} {:<6} {}",
                format!("{:?}", b.kind).to_lowercase(),
                b.value
            )?;
            for line in &b.derivation {
                writeln!(w, "           {line}")?;
            }
        }
    }
    Ok(())
}

fn formula(a: FormulaArgs) -> Out {
    if a.name == "list" {
        for n in bounds::formula_names() {
            println!("{n}");
        }
        return Ok(());
    }
    if !bounds::formula_names().contains(&a.name.as_str())
        && !recipe_names().contains(&a.name.as_str())
    {
        return Err(Fail::Usage(format!("unknown formula `{}`", a.name)));
    }
    let v = bounds::formula(&a.name, a.q, a.k, a.lambda.as_ref())?;
    println!("{v}");
    Ok(())
}

fn import(a: ImportArgs) -> Out {
    let (c, sub) = match &a.subcode {
        Some(sp) => {
            if a.file == "-" {
                return Err(Fail::Usage("--subcode needs a file path, not stdin".into()));
            }
            let (c, s) = cio::import_with_subcode(Path::new(&a.file), sp)?;
            (c, Some(s))
        }
        None => (read_input(&a.file)?, None),
    };
    let f = c.field();
    println!(
        "q={} n={} k={} d={} count={}",
        f.q(),
        c.n(),
        c.k(),
        c.d_claim(),
        c.len()
    );
    println!("provenance: {}", c.provenance().recipe);
    if let Some(s) = sub {
        println!("subcode: count={} d={}", s.len(), s.d_claim());
    }
    Ok(())
}

fn need(v: Option<usize>, flag: &str) -> Result<usize, Fail> {
    v.ok_or_else(|| Fail::Usage(format!("--{flag} is required")))
}

fn export(a: ExportArgs) -> Out {
    let order: Order = a.order.into();
    if let Some(path) = &a.file {
        let c = read_input(path)?;
        cio::write_code(&c, order, open_output(&a.out)?)?;
        return Ok(());
    }
    let field = Field::of_order(a.q)?;
    match a.object.expect("clap enforces object or file") {
        Object::LiftedMrd => {
            let c = lifted_mrd(field, need(a.n, "n")?, need(a.k, "k")?, need(a.d, "d")?)?;
            cio::write_code(&c, order, open_output(&a.out)?)?;
        }
        Object::Spread => {
            let c = spread(field, need(a.n, "n")?, need(a.k, "k")?)?;
            cio::write_code(&c, order, open_output(&a.out)?)?;
        }
        Object::Parallelism => {
            let fam = parallelism_2_of_f_q4(field)?;
            cio::write_family(&fam, open_output(&a.out)?)?;
        }
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> Out {
    let field = Field::of_order(a.q)?;
    match a.kind {
        OracleKind::RankHistogram => {
            let (m, n, d) = (need(a.m, "m")?, need(a.n, "n")?, need(a.d, "d")?);
            let h = gabidulin_mrd(field, m, n, d)?;
            let hist = rank_histogram(&h);
            let mut ok = true;
            for (r, &count) in hist.iter().enumerate() {
                let want = rank_distribution(a.q, m, n, d, r)?;
                let same = BigUint::from(count) == want;
                ok &= same;
                println!(
                    "rank {r}: {count} expected {want}{}",
                    if same { "" } else { " MISMATCH" }
                );
            }
            if ok {
                Ok(())
            } else {
                Err(Fail::Violation(
                    "rank histogram differs from the rank distribution".into(),
                ))
            }
        }
        OracleKind::Enumerate => {
            let (n, k) = (need(a.n, "n")?, need(a.k, "k")?);
            let got = enumerate_subspaces(field, n, k, verify::ENUMERATION_CAP)?.len();
            let want = gaussian_binomial(n as u32, k as u32, a.q);
            println!("enumerated {got} expected {want}");
            if BigUint::from(got) == want {
                Ok(())
            } else {
                Err(Fail::Violation(
                    "subspace count differs from the Gaussian binomial".into(),
                ))
            }
        }
        OracleKind::Coverage => {
            let path = a
                .file
                .ok_or_else(|| Fail::Usage("--file is required".into()))?;
            let r = coverage_check(&read_input(&path)?);
            report_coverage(&r)
        }
        OracleKind::Parallelism => {
            let r = family_coverage_check(&parallelism_2_of_f_q4(field)?)?;
            report_coverage(&r)
        }
    }
}

fn report_coverage(r: &verify::CoverageReport) -> Out {
    println!(
        "universe {} once {} uncovered {} multiple {}",
        r.universe, r.covered_once, r.uncovered, r.multiply_covered
    );
    if r.exact() {
        Ok(())
    } else {
        Err(Fail::Violation("coverage is not exact".into()))
    }
}
