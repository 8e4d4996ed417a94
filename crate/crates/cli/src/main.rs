use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qecc_forge::codes::{mds_generator, GeneratorMatrix, DEFAULT_BUDGET};
use qecc_forge::construct::{kuniform_code, modified_shorten, shorten_with, QuantumCode, ShortenOptions};
use qecc_forge::record::CodeRecord;
use qecc_forge::verify::{code_distance, verify_code, Budget, DistanceMethod, VerificationReport, VerifyOptions};
use qecc_forge::{Error, PrimeField};

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;

#[derive(Parser)]
#[command(name = "qecc-forge", version, about = "Build and verify qudit stabilizer codes from AME and k-uniform states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code, verify it and write its JSON record.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        seed: SeedArgs,
        /// Number of shortening steps.
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Keep only the first c X operators of the logical (one-step shortening).
        #[arg(long)]
        truncate_x: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a code record. Exit 0 pass, 1 fail, 2 budget exceeded.
    Verify {
        record: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        skip_distance: bool,
    },
    /// Measure the distance of a code record.
    Distance {
        record: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Shortening chain [[n-r, r, k-r+1]]_q for r = 0..k-1.
    Table1 {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Shortening vs modified shortening of the AME state on q+1 parties.
    Table2 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        gamma: Option<u64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the MDS generator matrix in text form.
    Export {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ame,
    Shorten,
    ModShorten,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Overlap,
    Symplectic,
    Both,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long)]
    q: Option<u64>,
    /// Primitive element of GF(q); defaults to the smallest primitive root.
    #[arg(long)]
    gamma: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Generator matrix file ("q k n" header, then rows) overriding --q/--n/--k.
    #[arg(long)]
    seed: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Skip the error sweeps; the distance stays claimed.
    #[arg(long)]
    skip_distance: bool,
}

impl RunArgs {
    fn options(&self) -> VerifyOptions {
        VerifyOptions { budget: self.budget, skip_distance: self.skip_distance, ..VerifyOptions::default() }
    }
}

impl SeedArgs {
    fn field(&self) -> anyhow::Result<PrimeField> {
        let q = self.q.context("--q is required")?;
        Ok(PrimeField::new(q, self.gamma)?)
    }

    fn generator(&self) -> anyhow::Result<GeneratorMatrix> {
        if let Some(path) = &self.seed {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(GeneratorMatrix::from_text(&text, self.gamma)?);
        }
        let field = self.field()?;
        let n = self.n.context("--n is required")?;
        let k = self.k.context("--k is required")?;
        Ok(mds_generator(field, k, n)?)
    }
}

fn budget_exceeded(err: &anyhow::Error) -> bool {
    matches!(err.downcast_ref::<Error>(), Some(Error::BudgetExceeded { .. }))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_checks(report: &VerificationReport) {
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        eprintln!("  {:<20} {status}  ({} operators)", c.name, c.operators_examined);
        if let Some(w) = &c.witness {
            eprintln!("    witness: {}", serde_json::to_string(w).expect("witnesses serialize"));
        }
    }
}

fn status_code(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn construct(kind: Kind, seed: &SeedArgs, r: usize, truncate_x: Option<usize>, run: &RunArgs, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let code = match kind {
        Kind::Ame => kuniform_code(&seed.generator()?, run.budget)?,
        Kind::Shorten => shorten_with(&seed.generator()?, r, ShortenOptions { truncate_x }, run.budget)?,
        Kind::ModShorten => modified_shorten(seed.field()?, run.budget)?,
    };
    let report = verify_code(&code, &run.options())?;
    let summary = code.label();
    let record = CodeRecord::new(&code, Some(report.clone()));
    write_or_print(out, &record.to_json())?;
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    print_checks(&report);
    Ok(status_code(report.passed))
}

fn verify(path: &Path, budget: Option<u64>, skip_distance: bool) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let record = CodeRecord::from_json(&text)?;
    let code = record.to_code()?;
    let mut options = record.verification.as_ref().map(|r| r.options.clone()).unwrap_or_default();
    if let Some(b) = budget {
        options.budget = b;
    }
    options.skip_distance |= skip_distance;
    let report = verify_code(&code, &options)?;
    println!("{} {}", code.label(), if report.passed { "pass" } else { "FAIL" });
    print_checks(&report);
    let mut passed = report.passed;
    if let Some(embedded) = &record.verification {
        if embedded.options == options {
            let fresh = serde_json::to_string(&report)?;
            if serde_json::to_string(embedded)? != fresh {
                eprintln!("  embedded transcript differs from the fresh run");
                passed = false;
            }
        }
    }
    Ok(status_code(passed))
}

fn distance(path: &Path, method: Method, budget: u64) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let code = CodeRecord::from_json(&text)?.to_code()?;
    let methods = match method {
        Method::Overlap => vec![DistanceMethod::Overlap],
        Method::Symplectic => vec![DistanceMethod::Symplectic],
        Method::Both => vec![DistanceMethod::Overlap, DistanceMethod::Symplectic],
    };
    let mut budget = Budget::new(budget);
    let mut ok = true;
    for m in methods {
        let r = code_distance(&code, m, &mut budget)?;
        println!("{} {:?} distance {} witness {} ({} operators)", code.label(), m, r.distance, r.witness, r.examined);
        ok &= r.distance == code.distance_claimed;
    }
    Ok(status_code(ok))
}

/// One table row: verifies the code, retrying without the error sweeps when
/// the budget runs out so the distance is reported as claimed.
fn table_row(code: &QuantumCode, run: &RunArgs) -> anyhow::Result<(VerificationReport, bool)> {
    match verify_code(code, &run.options()) {
        Ok(report) => Ok((report, !run.skip_distance)),
        Err(Error::BudgetExceeded { .. }) => {
            let options = VerifyOptions { skip_distance: true, ..run.options() };
            Ok((verify_code(code, &options)?, false))
        }
        Err(e) => Err(e.into()),
    }
}

fn row_line(construction: &str, code: &QuantumCode, subspace: &str, report: &VerificationReport, measured: bool) -> String {
    let uniformity = report
        .check("codeword_uniformity")
        .and_then(|c| c.parameters.get("measured_min"))
        .map_or("-".to_string(), |v| v.to_string());
    let distance = match report.distance.as_ref() {
        Some(d) if measured => d.symplectic.or(d.overlap).map_or("-".to_string(), |v| v.to_string()),
        _ => format!("{} (claimed)", code.distance_claimed),
    };
    let status = match (report.passed, measured) {
        (false, _) => "FAIL",
        (true, true) => "verified",
        (true, false) => "claimed",
    };
    format!("{construction:<14} {:<14} {subspace:<12} {uniformity:<10} {distance:<14} {status}", code.label())
}

fn header() -> String {
    format!("{:<14} {:<14} {:<12} {:<10} {:<14} {}", "construction", "code", "subspace", "uniformity", "distance", "status")
}

fn table1(seed: &SeedArgs, run: &RunArgs) -> anyhow::Result<ExitCode> {
    let g = seed.generator()?;
    let q = g.field().modulus();
    println!("{}", header());
    let mut ok = true;
    for r in 0..g.k() {
        let code = if r == 0 { kuniform_code(&g, run.budget)? } else { shorten_with(&g, r, ShortenOptions::default(), run.budget)? };
        let (report, measured) = table_row(&code, run)?;
        let u = g.k() - r;
        let subspace = if r == 0 { format!("{u}-uniform") } else { format!("{}x {u}-unif", q.pow(r as u32)) };
        println!("{}", row_line(if r == 0 { "seed" } else { "shortening" }, &code, &subspace, &report, measured));
        ok &= report.passed;
    }
    Ok(status_code(ok))
}

fn table2(q: u64, gamma: Option<u64>, run: &RunArgs) -> anyhow::Result<ExitCode> {
    let field = PrimeField::new(q, gamma)?;
    let n = q as usize + 1;
    let shortened = shorten_with(&mds_generator(field, n / 2, n)?, 1, ShortenOptions::default(), run.budget)?;
    let modified = modified_shorten(field, run.budget)?;
    println!("{}", header());
    let mut ok = true;
    for (name, code) in [("shortening", &shortened), ("mod-shortening", &modified)] {
        let (report, measured) = table_row(code, run)?;
        let subspace = format!("AME({},{q})", code.n);
        println!("{}", row_line(name, code, &subspace, &report, measured));
        ok &= report.passed;
    }
    Ok(status_code(ok))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Construct { kind, seed, r, truncate_x, run, out } => construct(kind, &seed, r, truncate_x, &run, out.as_deref()),
        Command::Verify { record, budget, skip_distance } => verify(&record, budget, skip_distance),
        Command::Distance { record, method, budget } => distance(&record, method, budget),
        Command::Table1 { seed, run } => table1(&seed, &run),
        Command::Table2 { q, gamma, run } => table2(q, gamma, &run),
        Command::Export { seed, out } => {
            write_or_print(out.as_deref(), &seed.generator()?.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("QECC_FORGE_THREADS") {
        let threads: usize = v.parse().with_context(|| format!("QECC_FORGE_THREADS={v} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(code) => code,
        Err(e) if budget_exceeded(&e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
