use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use borel_rees::inversions::reduction_level;
use borel_rees::monomial::Monomial;
use borel_rees::oracle::{run_suite, VerifyOptions};
use borel_rees::presentation::{Basis, TPolynomial};
use borel_rees::{certify, Error, Execution, LeveledFamily, Mode};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "borel-rees",
    version,
    about = "Gröbner bases and certificates for multi-Rees algebras of principal strongly stable ideals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide closure under comparability and compare with the Borel characterization
    Check {
        file: PathBuf,
        /// Report every violating pair instead of the first 32
        #[arg(long)]
        all_witnesses: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the marked quadratic basis
    Basis {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emit a certificate for the algebra defined by the family
    Certify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the bounded-degree verification suites
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Run single-threaded
        #[arg(long)]
        sequential: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Remove rule k from the basis before verifying (negative control)
        #[arg(long, hide = true)]
        drop_rule: Option<usize>,
    },
    /// Reduce a rational combination of T-monomials to normal form
    NormalForm {
        file: PathBuf,
        expression: String,
        /// Print each rewrite with the measure of the rewritten monomial
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the principal strongly stable set of a monomial, revlex-descending
    Bset {
        monomial: String,
        /// Number of variables (defaults to the largest index used)
        #[arg(short, long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    if let Error::NotClosed(witnesses) = err {
        for w in witnesses {
            eprintln!("  {w}");
        }
        return ExitCode::from(EXIT_NEGATIVE);
    }
    if err.is_resource_cap() {
        ExitCode::from(EXIT_RESOURCE)
    } else {
        ExitCode::from(EXIT_INPUT)
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    }
}

fn load(path: &Path) -> Result<LeveledFamily, Error> {
    let (fam, warnings) = LeveledFamily::from_path(path)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(fam)
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => fail(&err),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Check {
            file,
            all_witnesses,
            format,
        } => check(&file, all_witnesses, format),
        Command::Basis { file, format } => basis(&file, format),
        Command::Certify { file, format } => {
            let cert = certify(&load(&file)?)?;
            match format {
                Format::Json => print_json(&cert),
                Format::Text => {
                    println!("closed: {}", cert.closed);
                    if let Some(size) = cert.basis_size {
                        println!("basis size: {size}");
                        println!("quadratic: {}", cert.quadratic.unwrap_or(false));
                        println!(
                            "squarefree leads: {}",
                            cert.squarefree_leads.unwrap_or(false)
                        );
                        println!("confluent: {}", cert.confluent.unwrap_or(false));
                    }
                    for c in &cert.conclusions {
                        println!("conclusion: {c}");
                    }
                    for c in &cert.citations {
                        println!("citation: {c}");
                    }
                    for n in &cert.notes {
                        println!("note: {n}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            file,
            max_degree,
            sequential,
            format,
            drop_rule,
        } => verify(&file, max_degree, sequential, format, drop_rule),
        Command::NormalForm {
            file,
            expression,
            trace,
            format,
        } => normal_form(&file, &expression, trace, format),
        Command::Bset {
            monomial,
            n,
            format,
        } => bset(&monomial, n, format),
    }
}

#[derive(Serialize)]
struct CheckOutput {
    closure: borel_rees::ClosureReport,
    characterization: borel_rees::family::CharacterizationReport,
}

fn check(file: &Path, all_witnesses: bool, format: Format) -> Result<ExitCode, Error> {
    let fam = load(file)?;
    let limit = (!all_witnesses).then_some(borel_rees::family::DEFAULT_WITNESS_LIMIT);
    let closure = fam.closure_report(limit, Execution::default());
    let characterization = fam.characterize();
    let closed = closure.closed;
    match format {
        Format::Json => print_json(&CheckOutput {
            closure,
            characterization,
        }),
        Format::Text => {
            println!("mode: {}", fam.mode());
            println!("generators: {} ({:?} per level)", fam.len(), fam.sizes());
            println!("closed: {closed}");
            println!(
                "incomparable pairs: {}, violations: {}",
                closure.incomparable_pairs, closure.violations
            );
            for w in &closure.witnesses {
                println!("  witness: {w}");
            }
            println!("level  bottom          borel_equal  borel_subset");
            for l in &characterization.levels {
                println!(
                    "{:<6} {:<15} {:<12} {}",
                    l.level, l.bottom, l.borel_equal, l.borel_subset
                );
            }
            for c in &characterization.chain {
                println!("chain {} -> {}: {}", c.lower, c.upper, c.holds);
            }
            println!("characterization: {}", characterization.conjunction);
            match fam.mode() {
                Mode::Rees => println!("agreement: {}", characterization.consistent),
                Mode::Fiber => println!("fiber implications hold: {}", characterization.consistent),
            }
        }
    }
    Ok(verdict(closed))
}

fn basis(file: &Path, format: Format) -> Result<ExitCode, Error> {
    let fam = load(file)?;
    let basis = Basis::build(&fam)?;
    let listing = basis.listing();
    match format {
        Format::Json => print_json(&listing),
        Format::Text => {
            println!("{} relations over {} T-variables", listing.count, fam.len());
            println!("quadratic: {}", listing.quadratic);
            println!("squarefree leads: {}", listing.squarefree_leads);
            for r in &listing.relations {
                println!("[{}] - {}", r.lead, r.trail);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(
    file: &Path,
    max_degree: usize,
    sequential: bool,
    format: Format,
    drop_rule: Option<usize>,
) -> Result<ExitCode, Error> {
    let fam = load(file)?;
    let mut basis = Basis::build(&fam)?;
    if let Some(k) = drop_rule {
        if k >= basis.len() {
            return Err(Error::InvalidRef(format!(
                "rule {k} (basis has {})",
                basis.len()
            )));
        }
        basis = basis.without_rule(k);
    }
    let opts = VerifyOptions {
        max_degree,
        execution: if sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
        ..VerifyOptions::default()
    };
    let start = Instant::now();
    let report = run_suite(&fam, &basis, &opts)?;
    let elapsed = start.elapsed();
    match format {
        Format::Json => print_json(&report),
        Format::Text => {
            let c = &report.confluence;
            println!(
                "confluence: {} ({} rules, {} S-pairs, {} failures, longest reduction {})",
                pass(c.passed),
                c.rules,
                c.pairs,
                c.failures,
                c.max_reduction_length
            );
            if let Some(f) = &c.first_failure {
                println!("  {f}");
            }
            let u = &report.unique_normal_forms;
            println!(
                "unique normal forms: {} ({} monomials, {} fibers, largest {}, {} failing)",
                pass(u.passed),
                u.monomials,
                u.fibers,
                u.max_fiber_size,
                u.failing_fibers
            );
            if let Some(w) = &u.witness {
                println!(
                    "  fiber {}: reduced {:?}, normal forms {:?}",
                    w.image, w.completely_reduced, w.normal_forms
                );
            }
            let k = &report.kernel_generation;
            println!(
                "kernel generation: {} ({} differences, {} failures)",
                pass(k.passed),
                k.differences,
                k.failures
            );
            if let Some(w) = &k.witness {
                println!("  {w}");
            }
            let m = &report.measure;
            println!(
                "measure decrease: {} ({} monomials, {} steps, longest chain {}, {} violations)",
                pass(m.passed),
                m.monomials,
                m.steps,
                m.longest_chain,
                m.violations
            );
            println!("degree bound {max_degree}, {:.3} s", elapsed.as_secs_f64());
        }
    }
    Ok(verdict(report.passed))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct TraceLine {
    rewritten: String,
    measure: (u64, u64),
    rule: String,
    replacement: String,
    replacement_measure: (u64, u64),
}

#[derive(Serialize)]
struct NormalFormOutput {
    input: String,
    normal_form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceLine>>,
}

fn normal_form(
    file: &Path,
    expression: &str,
    trace: bool,
    format: Format,
) -> Result<ExitCode, Error> {
    let fam = load(file)?;
    let f = TPolynomial::parse(expression)?;
    f.check(&fam)?;
    let basis = Basis::build(&fam)?;
    let reduction = basis.normal_form_traced(&f, borel_rees::presentation::DEFAULT_STEP_CAP)?;
    let lines = if trace {
        let mut lines = Vec::with_capacity(reduction.steps.len());
        for step in &reduction.steps {
            let before = reduction_level(&step.rewritten, &fam)?;
            let after = reduction_level(&step.replacement, &fam)?;
            lines.push(TraceLine {
                rewritten: step.rewritten.to_string(),
                measure: (before.c, before.e),
                rule: basis.rules()[step.rule].to_string(),
                replacement: step.replacement.to_string(),
                replacement_measure: (after.c, after.e),
            });
        }
        Some(lines)
    } else {
        None
    };
    let out = NormalFormOutput {
        input: f.to_string(),
        normal_form: reduction.result.to_string(),
        trace: lines,
    };
    match format {
        Format::Json => print_json(&out),
        Format::Text => {
            if let Some(lines) = &out.trace {
                for l in lines {
                    println!(
                        "{}  (c,e): {} {}  ->  {}  (c,e): {} {}  by {}",
                        l.rewritten,
                        l.measure.0,
                        l.measure.1,
                        l.replacement,
                        l.replacement_measure.0,
                        l.replacement_measure.1,
                        l.rule
                    );
                }
            }
            println!("{}", out.normal_form);
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BsetOutput {
    monomial: String,
    variables: usize,
    size: usize,
    members: Vec<String>,
}

/// Largest variable index mentioned in a monomial string.
fn largest_index(text: &str) -> usize {
    let mut best = 0;
    let mut digits = String::new();
    let mut in_var = false;
    for ch in text.chars().chain(std::iter::once(' ')) {
        if in_var && ch.is_ascii_digit() {
            digits.push(ch);
            continue;
        }
        if in_var {
            best = best.max(digits.parse().unwrap_or(0));
            digits.clear();
        }
        in_var = ch == 'x' || ch == 'X';
    }
    best.max(1)
}

fn bset(text: &str, n: Option<usize>, format: Format) -> Result<ExitCode, Error> {
    let n = n.unwrap_or_else(|| largest_index(text));
    let u = Monomial::parse(text, n)?;
    let members = borel_rees::borel_closure(&u)?;
    match format {
        Format::Json => print_json(&BsetOutput {
            monomial: u.to_string(),
            variables: n,
            size: members.len(),
            members: members.iter().map(ToString::to_string).collect(),
        }),
        Format::Text => {
            for (j, m) in members.iter().enumerate() {
                println!("{:>3}  {m}", j + 1);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
