//! Command line harness around the `permlike` library: analyze a single
//! instance, sweep phase configurations, emit and re-verify certificates,
//! and tabulate the closed-form characteristic polynomials.
//!
//! Exit codes: 0 success; 2 malformed input, invalid parameters or I/O
//! failure; 3 input group is not permutation-like; 4 verification failure
//! or theorem violations (counterexample material). Reports are
//! deterministic: identical inputs produce byte-identical output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use permlike::certify::{
    certify_group, charpoly_table, verify_subspace_recursion, Certificate, CertifyError, SubspaceRecursionReport,
};
use permlike::cyclotomic::verify_certificate;
use permlike::group::{GroupDescriptor, GroupSpec};
use permlike::numtheory::Orbit;
use permlike::permsim::{is_permutation_like_group, ElementWitness};
use permlike::sweep::{rows_to_csv, run_sweep, SweepConfig, SweepReport};

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_PERMUTATION_LIKE: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "permlike",
    version,
    about = "Decide and certify permutation-likeness of monomial matrix groups <A, C> \
             with a maximal cycle C of odd prime power order",
    after_help = "Exit codes: 0 ok, 2 bad input or I/O, 3 not permutation-like, \
                  4 verification failure or theorem violations.\n\
                  Sweeps parallelize over configurations; set RAYON_NUM_THREADS to pin \
                  the thread count (reports are deterministic either way)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one group instance: orbits, order decomposition, per-element
    /// cycle types, certification and recursion checks
    Analyze(AnalyzeArgs),
    /// Sweep phase configurations for one (p, n) over selected r values
    Enumerate(EnumerateArgs),
    /// Produce a verified certificate for a group, or re-verify one
    Certify(CertifyArgs),
    /// Tabulate computed vs closed-form characteristic polynomials on the
    /// unit eigenlines
    Charpoly(CharpolyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Group descriptor JSON: {"p", "n", "r", "M"?, "phases": [{"orbit_rep", "exp"}]}
    file: PathBuf,
    /// Also run the dense cyclotomic oracle on the certificate
    #[arg(long)]
    oracle: bool,
    /// Print the JSON report to stdout instead of the plain-text summary
    #[arg(long)]
    json: bool,
    /// Write the JSON report to this path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Odd prime p
    #[arg(long)]
    p: u64,
    /// Exponent n of the cycle order d = p^n
    #[arg(long)]
    n: u32,
    /// Phase modulus M (default: s * p^n per r, recorded in the report)
    #[arg(long, value_name = "M")]
    modulus: Option<u64>,
    /// Restrict to these r values (repeatable; default: all units mod p^n)
    #[arg(long, value_name = "R")]
    r: Vec<u64>,
    /// Skip configurations whose group order exceeds this cap
    #[arg(long, default_value_t = 10_000, value_name = "ORDER")]
    max_group_order: u64,
    /// Enumerate exhaustively up to this many configurations per row,
    /// sample above it
    #[arg(long, default_value_t = 100_000, value_name = "COUNT")]
    exhaustive_cap: u64,
    /// Sample size for rows too large to exhaust
    #[arg(long, default_value_t = 10_000, value_name = "COUNT")]
    sample: u64,
    /// Seed for the sampled rows
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the dense cyclotomic oracle on each certificate
    #[arg(long)]
    no_oracle: bool,
    /// Run the structure-lemma battery on every permutation-like instance
    #[arg(long)]
    lemmas: bool,
    /// Record wall-clock timings (makes reports non-reproducible)
    #[arg(long)]
    timing: bool,
    /// Write sweep.json and sweep.csv into this directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Group descriptor JSON, or a certificate JSON with --verify-only
    file: PathBuf,
    /// Re-run the dense cyclotomic oracle on the produced certificate
    #[arg(long)]
    oracle: bool,
    /// Treat the input as an existing certificate and only verify it
    #[arg(long)]
    verify_only: bool,
    /// Write the certificate JSON to this path instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharpolyArgs {
    /// Odd prime p
    #[arg(long)]
    p: u64,
    /// Exponent n of the cycle order d = p^n
    #[arg(long)]
    n: u32,
    /// Depth a of the p-part: tabulates the instance with ord(r) = p^a,
    /// requires 0 <= a < n
    #[arg(long)]
    a: u32,
    /// Write the CSV table to this path instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// A failure with the exit code it maps to. Messages go to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VERIFICATION, message: message.into() }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Enumerate(args) => cmd_enumerate(&args),
        Command::Certify(args) => cmd_certify(&args),
        Command::Charpoly(args) => cmd_charpoly(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout, treating a closed pipe as a normal early exit rather
/// than a failure (`permlike certify ... | head` must not panic).
fn emit(text: &str) -> CliResult {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::input(format!("cannot write to stdout: {e}"))),
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<GroupSpec, Failure> {
    let raw = read_to_string(path)?;
    let desc: GroupDescriptor = serde_json::from_str(&raw)
        .map_err(|e| Failure::input(format!("{} is not a group descriptor: {e}", path.display())))?;
    GroupSpec::from_descriptor(&desc)
        .map_err(|e| Failure::input(format!("invalid group parameters: {e}")))
}

/// Exit-code mapping for certification failures: impossible inputs are the
/// caller's problem, failed invariants on a permutation-like group are
/// counterexample material.
fn map_certify_error(e: CertifyError) -> Failure {
    match e {
        CertifyError::NotPermutationLike { .. } => {
            Failure { code: EXIT_NOT_PERMUTATION_LIKE, message: e.to_string() }
        }
        CertifyError::InvariantFailed { .. }
        | CertifyError::OmegaOrderBound { .. }
        | CertifyError::Verification(_) => Failure::verification(e.to_string()),
        CertifyError::Group(_)
        | CertifyError::Monomial(_)
        | CertifyError::NumTheory(_)
        | CertifyError::Cyclo(_) => Failure::input(e.to_string()),
    }
}

#[derive(Serialize)]
struct OrderDecompReport {
    order: u64,
    s: u64,
    a: u32,
    u: u64,
    v: i64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    descriptor: GroupDescriptor,
    dimension: u64,
    phase_modulus: u64,
    group_order: u64,
    quotient_order: u64,
    order_decomposition: OrderDecompReport,
    orbits: Vec<Orbit>,
    permutation_like: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<ElementWitness>,
    /// Cycle type rendered as `l^c ...` -> number of elements with it.
    cycle_type_census: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subspace_recursion: Option<SubspaceRecursionReport>,
}

fn cmd_analyze(args: &AnalyzeArgs) -> CliResult {
    let g = load_group(&args.file)?;
    let scan = is_permutation_like_group(&g);

    let mut census: BTreeMap<String, u64> = BTreeMap::new();
    for ty in scan.cycle_types.values() {
        *census.entry(ty.to_string()).or_insert(0) += 1;
    }

    let certificate = if scan.verdict {
        Some(certify_group(&g, args.oracle).map_err(map_certify_error)?)
    } else {
        None
    };
    let subspace_recursion = if scan.verdict && g.decomp().s == 1 {
        Some(verify_subspace_recursion(&g).map_err(map_certify_error)?)
    } else {
        None
    };

    let report = AnalyzeReport {
        descriptor: g.descriptor().map_err(|e| Failure::input(e.to_string()))?,
        dimension: g.dim(),
        phase_modulus: g.phase_modulus(),
        group_order: g.group_order(),
        quotient_order: g.quotient_order(),
        order_decomposition: OrderDecompReport {
            order: g.decomp().order,
            s: g.decomp().s,
            a: g.decomp().a,
            u: g.decomp().u.value(),
            v: g.decomp().v,
        },
        orbits: g.orbits().orbits.clone(),
        permutation_like: scan.verdict,
        witness: scan.witness,
        cycle_type_census: census,
        certificate,
        subspace_recursion,
    };

    let json = to_pretty_json(&report)?;
    if let Some(path) = &args.out {
        write_output(path, &json)?;
    }
    if args.json {
        emit(&json)?;
    } else {
        emit(&render_analyze_text(&report))?;
    }
    Ok(())
}

fn render_analyze_text(report: &AnalyzeReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let d = &report.descriptor;
    let dec = &report.order_decomposition;
    writeln!(
        out,
        "instance: p = {}, n = {}, d = {}, r = {}, M = {}",
        d.p, d.n, report.dimension, d.r, report.phase_modulus
    )
    .unwrap();
    writeln!(
        out,
        "ord(r) = {} = s * p^a with s = {}, a = {} (torsion part u = {}, v = {})",
        dec.order, dec.s, dec.a, dec.u, dec.v
    )
    .unwrap();
    let orbit_list: Vec<String> = report
        .orbits
        .iter()
        .map(|o| {
            let members: Vec<String> = o.members.iter().map(u64::to_string).collect();
            format!("{{{}}}", members.join(" "))
        })
        .collect();
    writeln!(out, "orbits of j -> {} j mod {}: {}", d.r, report.dimension, orbit_list.join(" "))
        .unwrap();
    writeln!(
        out,
        "group order: {} = d * Q with Q = {}",
        report.group_order, report.quotient_order
    )
    .unwrap();
    writeln!(out, "permutation-like: {}", if report.permutation_like { "yes" } else { "no" })
        .unwrap();
    if let Some(w) = &report.witness {
        writeln!(out, "witness: element {}: {}", w.element, w.error).unwrap();
    }
    if !report.cycle_type_census.is_empty() {
        let parts: Vec<String> =
            report.cycle_type_census.iter().map(|(ty, c)| format!("{ty} x{c}")).collect();
        writeln!(out, "cycle types: {}", parts.join(", ")).unwrap();
    }
    if let Some(cert) = &report.certificate {
        writeln!(
            out,
            "certificate: case {}, adjust exponent {}, exponent route verified{}",
            cert.case,
            cert.adjust_exponent,
            if cert.oracle_checked { "; dense oracle verified" } else { "" }
        )
        .unwrap();
    }
    if let Some(rec) = &report.subspace_recursion {
        writeln!(
            out,
            "subspace recursion: {} (V^p dimension {}{})",
            if rec.passed() { "pass" } else { "FAIL" },
            rec.subspace_dimension,
            match rec.a_restricts_to_identity {
                Some(true) => ", A|_V^p = I",
                Some(false) => ", A|_V^p != I",
                None => "",
            }
        )
        .unwrap();
    }
    out
}

fn cmd_enumerate(args: &EnumerateArgs) -> CliResult {
    let config = SweepConfig {
        pairs: vec![(args.p, args.n)],
        modulus_override: args.modulus,
        r_filter: if args.r.is_empty() { None } else { Some(args.r.clone()) },
        max_group_order: args.max_group_order,
        exhaustive_cap: args.exhaustive_cap,
        sample_count: args.sample,
        seed: args.seed,
        oracle: !args.no_oracle,
        lemma_checks: args.lemmas,
        timing: args.timing,
    };
    let report = run_sweep(&config).map_err(|e| {
        if args.p == 2 {
            Failure::input(format!(
                "{e}; the theorem hypotheses require an odd prime, and the order \
                 decomposition underlying every case is specific to odd p"
            ))
        } else {
            Failure::input(e.to_string())
        }
    })?;

    emit(&render_sweep_text(&report))?;

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
        let json = to_pretty_json(&report)?;
        write_output(&dir.join("sweep.json"), &json)?;
        let csv = rows_to_csv(&report)
            .map_err(|e| Failure::input(format!("cannot render CSV: {e}")))?;
        write_output(&dir.join("sweep.csv"), &csv)?;
        emit(&format!(
            "reports: {}, {}\n",
            dir.join("sweep.json").display(),
            dir.join("sweep.csv").display()
        ))?;
    }

    if report.summary.violations > 0 {
        for row in &report.rows {
            for v in &row.violations {
                eprintln!("violation: {v}");
            }
        }
        return Err(Failure::verification(format!(
            "{} theorem violations; this sweep output is counterexample material",
            report.summary.violations
        )));
    }
    Ok(())
}

fn render_sweep_text(report: &SweepReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(
        out,
        "{:>3} {:>2} {:>4} {:>5} {:>10} {:>9} {:>7} {:>8} {:>9} {:>9} {:>7} {:>10}",
        "p", "n", "r", "M", "mode", "configs", "invalid", "skipped", "permlike", "certified",
        "oracle", "violations"
    )
    .unwrap();
    for row in &report.rows {
        let mode = match row.mode {
            permlike::sweep::SweepMode::Exhaustive => "exhaustive",
            permlike::sweep::SweepMode::Sampled => "sampled",
        };
        let oracle_checked =
            row.permutation_like.iter().filter(|h| h.oracle_checked).count();
        let certified = row.permutation_like.iter().filter(|h| h.certified).count();
        writeln!(
            out,
            "{:>3} {:>2} {:>4} {:>5} {:>10} {:>9} {:>7} {:>8} {:>9} {:>9} {:>7} {:>10}",
            row.p,
            row.n,
            row.r,
            row.m,
            mode,
            row.configs_checked,
            row.invalid_configs,
            row.skipped_configs,
            row.permutation_like.len(),
            certified,
            oracle_checked,
            row.violations.len()
        )
        .unwrap();
    }
    let s = &report.summary;
    writeln!(
        out,
        "totals: {} configurations, {} permutation-like, {} certified, {} oracle-verified, {} violations",
        s.configs_checked, s.permutation_like, s.certified, s.oracle_checked, s.violations
    )
    .unwrap();
    out
}

fn cmd_certify(args: &CertifyArgs) -> CliResult {
    if args.verify_only {
        let raw = read_to_string(&args.file)?;
        let cert: Certificate = serde_json::from_str(&raw).map_err(|e| {
            Failure::input(format!("{} is not a certificate: {e}", args.file.display()))
        })?;
        verify_certificate(&cert)
            .map_err(|e| Failure::verification(format!("certificate rejected: {e}")))?;
        emit("certificate verifies: g P = P pi(g) for both generators, det(P) != 0\n")?;
        return Ok(());
    }

    let g = load_group(&args.file)?;
    let cert = certify_group(&g, args.oracle).map_err(map_certify_error)?;
    let json = to_pretty_json(&cert)?;
    match &args.out {
        Some(path) => {
            write_output(path, &json)?;
            emit(&format!(
                "certificate: case {}, adjust exponent {}, written to {}\n",
                cert.case,
                cert.adjust_exponent,
                path.display()
            ))?;
        }
        None => emit(&json)?,
    }
    Ok(())
}

fn cmd_charpoly(args: &CharpolyArgs) -> CliResult {
    let rows = charpoly_table(args.p, args.n, args.a)
        .map_err(|e| Failure::input(format!("invalid table parameters: {e}")))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["l", "k", "computed", "closed_form", "equal", "hypothesis_applicable"])
        .and_then(|()| {
            rows.iter().try_for_each(|row| {
                w.write_record([
                    row.l.to_string(),
                    row.k.to_string(),
                    row.computed.clone(),
                    row.closed_form.clone(),
                    row.equal.to_string(),
                    row.hypothesis_applicable.to_string(),
                ])
            })
        })
        .map_err(|e| Failure::input(format!("cannot render CSV: {e}")))?;
    let csv_text = String::from_utf8(
        w.into_inner().map_err(|e| Failure::input(format!("cannot render CSV: {e}")))?,
    )
    .expect("csv output is UTF-8");
    match &args.out {
        Some(path) => write_output(path, &csv_text)?,
        None => emit(&csv_text)?,
    }
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::input(format!("cannot serialize report: {e}")))
}
