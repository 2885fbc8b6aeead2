use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jetforge::checks::{self, CheckResult, Options, Status};
use jetforge::dsl::parse::Diagnostic;
use jetforge::report::Report;
use jetforge::suite;
use jetforge::workspace::{self, Workspace};

#[derive(Parser)]
#[command(name = "jetforge", version, about = "Symbolic jet-space checks for coverings, quotient equations and structure equations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Suite seed for the oracle's sample points.
    #[arg(long, global = true, env = "JETFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Exact sample points per oracle confirmation.
    #[arg(long, global = true, default_value_t = jetforge_core::oracle::DEFAULT_POINTS)]
    points: usize,
    /// Highest jet order a reduction may reach.
    #[arg(long = "max-order", global = true, default_value_t = jetforge_core::jet::DEFAULT_MAX_ORDER)]
    max_order: u32,
    /// Directory for report.json and report.txt (suite default: current directory).
    #[arg(long = "report-dir", global = true)]
    report_dir: Option<PathBuf>,
    /// Worker threads for `suite`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Record wall time per check (makes reports differ between runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Covering checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Derivations.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Structure equations of the Maurer-Cartan forms.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Unknown coefficients in structure equations.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Direct use of the numeric oracle.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run every check declared in a manifest.
    Suite {
        manifest: String,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// D_y(f_t) - D_t(f_y) on the solution manifold.
    Compat { covering: String },
    /// The cross-difference off the manifold, factored through the base equation.
    Offshell { covering: String },
    /// The covering's pseudopotential solves `equation`.
    Autobacklund { covering: String, equation: String },
}

#[derive(Subcommand)]
enum DeriveCmd {
    /// Quotient residual of an inverse system (or of a covering solved for the base
    /// unknown); with an equation, factor it through that equation.
    Quotient { system: String, equation: Option<String> },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Structure {
        name: String,
        /// Replace a definition for this run, e.g. `--with U1=U1_m`.
        #[arg(long = "with")]
        with: Vec<String>,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Solve for coefficient symbols (default: every symbol named A followed by digits).
    Coeffs { name: String, unknowns: Vec<String> },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Decide whether a definition in a `.jf` file vanishes identically.
    Eval {
        file: PathBuf,
        /// Which `let` to evaluate.
        #[arg(long, default_value = "expr")]
        name: String,
    },
}

enum Kind {
    Covering,
    Inverse,
}

fn print_diags(ds: &[Diagnostic]) {
    for d in ds {
        eprintln!("error: {d}");
    }
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".jf") || s.contains('/')
}

/// Disk path if it exists, else the bundled copy of `paper/...`.
fn load(path: &str) -> Result<(Workspace, String), Diagnostic> {
    let p = Path::new(path);
    if p.exists() {
        return Ok((Workspace::load_path(p)?, p.display().to_string()));
    }
    let rel = path.strip_prefix("paper/").unwrap_or(path);
    if workspace::bundled(rel).is_some() {
        return Ok((Workspace::load_bundled(rel)?, format!("<bundled>/paper/{rel}")));
    }
    Err(Diagnostic::plain(format!("no such file: {path}")))
}

/// A name, or a file defining exactly one object of the wanted kind.
fn resolve(arg: &str, kind: Kind) -> Result<(Workspace, String), Diagnostic> {
    if !looks_like_path(arg) {
        return Ok((Workspace::all_bundled()?, arg.to_string()));
    }
    let (ws, _) = load(arg)?;
    let root = ws.files.first().cloned().unwrap_or_default();
    let names: Vec<&String> = match kind {
        Kind::Covering => ws.coverings.iter().filter(|(_, i)| i.file == root).map(|(n, _)| n).collect(),
        Kind::Inverse => ws
            .inverses
            .iter()
            .filter(|(_, i)| i.file == root)
            .map(|(n, _)| n)
            .chain(ws.coverings.iter().filter(|(_, i)| i.file == root).map(|(n, _)| n))
            .collect(),
    };
    match names.as_slice() {
        [n] => {
            let n = n.to_string();
            Ok((ws, n))
        }
        [] => Err(Diagnostic::plain(format!("{arg} defines no suitable declaration"))),
        _ => Err(Diagnostic::plain(format!("{arg} defines several candidates; pass a name instead"))),
    }
}

fn options(g: &Global) -> Options {
    Options { seed: g.seed, points: g.points, max_order: g.max_order, timings: g.timings }
}

fn run_one(ws: &Workspace, decl: jetforge::workspace::Item<jetforge::workspace::CheckDecl>, g: &Global) -> ExitCode {
    if let Err(d) = checks::validate(ws, &decl) {
        print_diags(&[d]);
        return ExitCode::from(1);
    }
    let opts = options(g);
    let r: CheckResult = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(suite::STACK)
            .spawn_scoped(s, || checks::run(ws, &decl, &opts))
            .expect("spawn worker")
            .join()
            .expect("check thread")
    });
    let pass = r.status == Status::Pass;
    let report = Report::new(&decl.file, &opts, vec![r]);
    print!("{}", report.text());
    if let Some(dir) = &g.report_dir {
        if let Err(e) = report.write(dir) {
            eprintln!("error: cannot write reports to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let single = |arg: &str, kind: Kind, op: &str, rest: &[&str]| -> ExitCode {
        match resolve(arg, kind) {
            Ok((ws, name)) => {
                let mut args = vec![name.as_str()];
                args.extend_from_slice(rest);
                let decl = checks::adhoc(&format!("{op}_{name}"), op, &args, "<command line>");
                run_one(&ws, decl, g)
            }
            Err(d) => {
                print_diags(&[d]);
                ExitCode::from(1)
            }
        }
    };
    match &cli.command {
        Command::Check(CheckCmd::Compat { covering }) => single(covering, Kind::Covering, "compat", &[]),
        Command::Check(CheckCmd::Offshell { covering }) => single(covering, Kind::Covering, "offshell", &[]),
        Command::Check(CheckCmd::Autobacklund { covering, equation }) => {
            single(covering, Kind::Covering, "autobacklund", &[equation.as_str()])
        }
        Command::Derive(DeriveCmd::Quotient { system, equation }) => match equation {
            Some(eq) => single(system, Kind::Covering, "quotient", &[eq.as_str()]),
            None => single(system, Kind::Inverse, "discover", &[]),
        },
        Command::Verify(VerifyCmd::Structure { name, with }) => {
            let ov = format!("\"{}\"", with.join(","));
            let rest: Vec<&str> = if with.is_empty() { vec![] } else { vec![ov.as_str()] };
            match Workspace::all_bundled() {
                Ok(ws) => run_one(&ws, checks::adhoc(&format!("structure_{name}"), "structure", &[&[name.as_str()], &rest[..]].concat(), "<command line>"), g),
                Err(d) => {
                    print_diags(&[d]);
                    ExitCode::from(1)
                }
            }
        }
        Command::Solve(SolveCmd::Coeffs { name, unknowns }) => match Workspace::all_bundled() {
            Ok(ws) => {
                let mut args = vec![name.clone()];
                if unknowns.is_empty() {
                    args.extend(ws.symbols.iter().filter(|s| s.len() > 1 && s.starts_with('A') && s[1..].bytes().all(|b| b.is_ascii_digit())).cloned());
                } else {
                    args.extend(unknowns.iter().cloned());
                }
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                run_one(&ws, checks::adhoc(&format!("coeffs_{name}"), "solve_coeffs", &args, "<command line>"), g)
            }
            Err(d) => {
                print_diags(&[d]);
                ExitCode::from(1)
            }
        },
        Command::Oracle(OracleCmd::Eval { file, name }) => match Workspace::load_path(file) {
            Ok(ws) => {
                let label = file.display().to_string();
                run_one(&ws, checks::adhoc(&format!("eval_{name}"), "eval", &[name.as_str()], &label), g)
            }
            Err(d) => {
                print_diags(&[d]);
                ExitCode::from(1)
            }
        },
        Command::Suite { manifest } => {
            let (ws, label) = match load(manifest) {
                Ok(x) => x,
                Err(d) => {
                    print_diags(&[d]);
                    return ExitCode::from(1);
                }
            };
            let report = match suite::run(&ws, &label, &options(g), g.jobs) {
                Ok(r) => r,
                Err(ds) => {
                    print_diags(&ds);
                    return ExitCode::from(1);
                }
            };
            for c in &report.checks {
                let note = if c.matched { String::new() } else { format!("  (expected {})", c.expected) };
                println!("{:<28} {}{note}", c.name, c.status.as_str());
            }
            let k = &report.counts;
            println!("{} PASS, {} FAIL, {} SKIPPED-UNDERSPECIFIED, {} ERROR; {} unexpected", k.pass, k.fail, k.skipped, k.error, k.mismatched);
            let dir = g.report_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            if let Err(e) = report.write(&dir) {
                eprintln!("error: cannot write reports to {}: {e}", dir.display());
                return ExitCode::from(1);
            }
            if report.all_matched() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
