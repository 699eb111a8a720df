//! Command-line surface. Verdicts travel through exit codes and JSON
//! documents; standard error carries human diagnostics only.
//!
//! Exit codes: 0 success (valid / facet-certified / oracle-unique),
//! 1 certification or oracle failure, 2 invalid function, 64 malformed
//! document or bad usage, 65 grid mismatch, 66 unsupported dimension for
//! plot data, 70 internal self-test failure, 74 output I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use groupcert::catalog;
use groupcert::certify::{certify_facet, Verdict};
use groupcert::doc::{self, FunctionDocument, ValidationDocument};
use groupcert::oracle::{oracle_extremality, restrict_to_grid, OracleVerdict};
use groupcert::plf::PeriodicPLF;
use groupcert::rational::{format_rat, format_vec, parse_rat, vec_mod1, Rat};

#[derive(Parser)]
#[command(
    name = "groupcert",
    version,
    about = "Exact minimality and facet certification for periodic piecewise linear cut functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a document describes a valid candidate function
    Validate {
        file: PathBuf,
        /// Emit a machine-readable validation report on standard output
        #[arg(long)]
        json: bool,
    },
    /// Run the facet certification pipeline and emit the report document
    Certify {
        file: PathBuf,
        /// Write the report to this path instead of standard output
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
    },
    /// Decide extremality of the restriction to the (1/q)-grid by brute force
    Oracle {
        file: PathBuf,
        /// Grid modulus; f and every breakpoint must lie on the (1/q)-grid
        #[arg(long)]
        q: u64,
        /// Emit the oracle report as JSON on standard output
        #[arg(long)]
        json: bool,
    },
    /// Emit cells with slope-class indices for external plotting (k <= 2)
    PlotData { file: PathBuf },
    /// Write a catalog fixture as a function document
    Gen {
        /// One of: gmi, wrong-peak, spike, three-slope, triangle,
        /// diagonal-lift, random
        name: String,
        /// Component of f; repeat per coordinate where applicable
        #[arg(long = "f", value_name = "RAT")]
        f: Vec<String>,
        /// Dimension for the random fixture
        #[arg(long)]
        k: Option<usize>,
        /// Grid resolution for the random fixture
        #[arg(long)]
        q: Option<u64>,
        /// Seed for the random fixture
        #[arg(long)]
        seed: Option<u64>,
        /// Write to a file instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `GROUPCERT_THREADS` caps the worker pool; unset means the rayon default.
fn configure_threads() {
    if let Ok(raw) = std::env::var("GROUPCERT_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("ignoring GROUPCERT_THREADS={raw:?}: expected a positive integer"),
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Validate { file, json } => {
            let bytes = read_bytes(&file)?;
            let raw = doc::parse_function(&bytes)
                .map_err(|e| Failure::new(64, format!("{}: {e}", file.display())))?;
            match PeriodicPLF::validate(raw) {
                Ok(phi) => {
                    eprintln!(
                        "valid: k = {}, {} cells, {} slope classes",
                        phi.k(),
                        phi.cells().len(),
                        phi.slope_partition().classes.len()
                    );
                    if json {
                        print!(
                            "{}",
                            doc::to_canonical_json(&ValidationDocument::passed(&phi, &bytes))
                        );
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("invalid function: {e}");
                    if json {
                        print!(
                            "{}",
                            doc::to_canonical_json(&ValidationDocument::failed(&e, &bytes))
                        );
                    }
                    Ok(ExitCode::from(2))
                }
            }
        }

        Command::Certify { file, json } => {
            let (bytes, phi) = load_valid(&file)?;
            let cert = certify_facet(&phi)
                .map_err(|e| Failure::new(70, format!("internal self-test failure: {e}")))?;
            let payload = doc::to_canonical_json(&doc::report_from_certificate(&cert, &bytes));
            match &json {
                Some(path) => {
                    write_bytes(path, payload.as_bytes())?;
                    eprintln!("report written to {}", path.display());
                }
                None => print!("{payload}"),
            }
            eprintln!("verdict: {}", cert.verdict.as_str());
            if let Some(stage) = cert.failure_stage {
                eprintln!("failure stage: {stage}");
            }
            for note in &cert.notes {
                eprintln!("note: {note}");
            }
            Ok(if cert.verdict == Verdict::FacetCertified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Oracle { file, q, json } => {
            let (bytes, phi) = load_valid(&file)?;
            let model = restrict_to_grid(&phi, q)
                .map_err(|e| Failure::new(65, format!("grid mismatch: {e}")))?;
            let report = oracle_extremality(&model);
            let mut summary = format!(
                "oracle at q = {q}: {}; {} unknowns, {} tight rows, rank {}",
                report.verdict.as_str(),
                report.unknowns,
                report.rows,
                report.rank
            );
            for w in report.minimality.violations() {
                summary.push_str(&format!(
                    "\nviolated {:?} at ({}): {} vs {}",
                    w.kind,
                    w.points
                        .iter()
                        .map(|p| format_vec(p).join(", "))
                        .collect::<Vec<_>>()
                        .join("), ("),
                    format_rat(&w.lhs),
                    format_rat(&w.rhs)
                ));
            }
            if let Some(p) = &report.perturbation {
                summary.push_str(&format!(
                    "\nperturbation pair: epsilon = {}, delta = [{}]",
                    format_rat(&p.epsilon),
                    format_vec(&p.delta).join(", ")
                ));
            }
            if json {
                print!(
                    "{}",
                    doc::to_canonical_json(&doc::oracle_document(&report, &bytes))
                );
                eprintln!("{summary}");
            } else {
                println!("{summary}");
            }
            Ok(if report.verdict == OracleVerdict::Unique {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::PlotData { file } => {
            let (_bytes, phi) = load_valid(&file)?;
            if phi.k() > 2 {
                return Err(Failure::new(
                    66,
                    format!(
                        "plot-data supports k <= 2, this function has k = {}",
                        phi.k()
                    ),
                ));
            }
            print!("{}", doc::to_canonical_json(&doc::plot_document(&phi)));
            Ok(ExitCode::SUCCESS)
        }

        Command::Gen {
            name,
            f,
            k,
            q,
            seed,
            out,
        } => {
            let phi = build_fixture(&name, &f, k, q, seed)?;
            let payload = doc::to_canonical_json(&FunctionDocument::from_function(&phi));
            match &out {
                Some(path) => write_bytes(path, payload.as_bytes())?,
                None => print!("{payload}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(64, format!("cannot read {}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes)
        .map_err(|e| Failure::new(74, format!("cannot write {}: {e}", path.display())))
}

fn load_valid(path: &Path) -> Result<(Vec<u8>, PeriodicPLF), Failure> {
    let bytes = read_bytes(path)?;
    let raw = doc::parse_function(&bytes)
        .map_err(|e| Failure::new(64, format!("{}: {e}", path.display())))?;
    let phi = PeriodicPLF::validate(raw)
        .map_err(|e| Failure::new(2, format!("invalid function: {e}")))?;
    Ok((bytes, phi))
}

fn build_fixture(
    name: &str,
    f: &[String],
    k: Option<usize>,
    q: Option<u64>,
    seed: Option<u64>,
) -> Result<PeriodicPLF, Failure> {
    let bad = |message: String| Failure::new(64, message);
    let catalog_err = |e: catalog::CatalogError| Failure::new(64, e.to_string());
    let parse_f = |expect: usize| -> Result<Vec<Rat>, Failure> {
        if f.len() != expect {
            return Err(bad(format!(
                "fixture {name:?} takes exactly {expect} --f value(s), got {}",
                f.len()
            )));
        }
        f.iter()
            .map(|s| parse_rat(s).map_err(|e| bad(e.to_string())))
            .collect()
    };
    let grid_params_idle = || -> Result<(), Failure> {
        if k.is_some() || q.is_some() || seed.is_some() {
            Err(bad(format!(
                "--k, --q, and --seed do not apply to fixture {name:?}"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "gmi" => {
            grid_params_idle()?;
            let f = parse_f(1)?;
            catalog::gmi(&f[0]).map_err(catalog_err)
        }
        "wrong-peak" => {
            grid_params_idle()?;
            let f = parse_f(1)?;
            catalog::wrong_peak(&f[0]).map_err(catalog_err)
        }
        "spike" => {
            grid_params_idle()?;
            parse_f(0)?;
            catalog::spike().map_err(catalog_err)
        }
        "three-slope" => {
            grid_params_idle()?;
            parse_f(0)?;
            catalog::three_slope_nonextreme().map_err(catalog_err)
        }
        "triangle" => {
            grid_params_idle()?;
            parse_f(0)?;
            catalog::triangle_lifting().map_err(catalog_err)
        }
        "diagonal-lift" => {
            grid_params_idle()?;
            let f = parse_f(2)?;
            let base = vec_mod1(&[&f[0] + &f[1]]);
            let phi1 = catalog::gmi(&base[0]).map_err(catalog_err)?;
            catalog::diagonal_lift(&phi1, f).map_err(catalog_err)
        }
        "random" => {
            if !f.is_empty() {
                return Err(bad("--f does not apply to the random fixture".to_string()));
            }
            catalog::random_plf(k.unwrap_or(1), q.unwrap_or(8), seed.unwrap_or(0))
                .map_err(catalog_err)
        }
        _ => Err(bad(format!(
            "unknown fixture {name:?}; known fixtures: gmi, wrong-peak, spike, three-slope, \
             triangle, diagonal-lift, random"
        ))),
    }
}
