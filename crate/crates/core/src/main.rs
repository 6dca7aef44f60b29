use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use virtensor::analysis::{rank_invariant, specs_isomorphic, IsoVerdict};
use virtensor::certify::{certify_irreducible, replay};
use virtensor::element::{format_element, parse_element};
use virtensor::linalg::determinant;
use virtensor::rational::{format_rational, parse_rational};
use virtensor::report::{Report, Status};
use virtensor::specfile::load_spec;
use virtensor::suites::{run_suite, Bounds, Suite};
use virtensor::tensor::{act, omega_op, TensorSpec};
use virtensor::vandermonde::{confluent_det_formula, confluent_matrix, ConfluentSpec};
use virtensor::{Error, Result};

#[derive(Parser)]
#[command(
    name = "virtensor",
    version,
    about = "Exact computations in tensor products of Virasoro modules",
    long_about = "Exact symbolic computation in tensor products of the non-weight Virasoro \
                  modules Ω(λ,α,h) and Ω(μ,β) with an optional highest-weight factor. \
                  Module data comes from a JSON spec file; elements are written in a small \
                  expression grammar (see the README)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct BoundArgs {
    /// Bracket and submodule sweeps cover indices in [-max-index, max-index]
    #[arg(long, default_value_t = 3)]
    max_index: i64,
    /// Per-slot exponent cap for enumerated and sampled monomials
    #[arg(long, default_value_t = 2)]
    max_exp: u32,
    /// V-level cap for enumerated and sampled monomials
    #[arg(long, default_value_t = 2)]
    max_level: u32,
    /// Number of random samples per sampled check
    #[arg(long, default_value_t = 20)]
    samples: u32,
    /// Degree bound handed to the irreducibility certifier
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// V-level bound handed to the irreducibility certifier
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// Total matrix size cap for the determinant suite
    #[arg(long, default_value_t = 4)]
    det_size: u32,
}

impl BoundArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_index: self.max_index,
            max_exp: self.max_exp,
            max_level: self.max_level,
            samples: self.samples,
            degree: self.degree,
            level: self.level,
            det_size: self.det_size,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite against a spec file
    Check {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Suite: bracket, determinant, submodule, quotient, extraction,
        /// rank, irreducible, omega, classify-self, or all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the sampled checks (recorded in the report header)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply d_k to an element
    Act {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Element expression, e.g. "D1*T1 + 2*D2 : V[1]"
        element: String,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply the alternating quadratic operator ω^(s)_{l,m} to an element
    Omega {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Element expression
        element: String,
        #[arg(long)]
        s: u32,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Stabilized rank of {d_k f : k > K}, an isomorphism invariant
    Rank {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Element expression
        element: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Produce and replay an irreducibility certificate for an element
    Certify {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Element expression
        element: String,
        /// Degree bound for the generation stage
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// V-level bound for the generation stage
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide whether two spec files present isomorphic modules
    Classify {
        /// Spec file (JSON)
        spec: PathBuf,
        /// Second spec file to compare against
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Closed-form confluent Vandermonde determinant, checked against cofactor expansion
    Det {
        /// Comma-separated base parameters, e.g. "2,3,1/2"
        #[arg(long, value_delimiter = ',')]
        bases: Vec<String>,
        /// Comma-separated multiplicities, one per base
        #[arg(long, value_delimiter = ',')]
        mults: Vec<u32>,
        /// Row offset: rows sample k = r+1, …, r+size
        #[arg(long, default_value_t = 0)]
        r: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_report(path: Option<&Path>, report: &Report) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, report.to_json()).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn load(spec: &Path) -> Result<TensorSpec> {
    load_spec(spec)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check { spec, suite, seed, bounds, report } => {
            let spec = load(&spec)?;
            let suite = Suite::parse(&suite)?;
            let rep = run_suite(&spec, suite, seed, &bounds.bounds());
            print!("{}", rep.render_text());
            write_report(report.as_deref(), &rep)?;
            Ok(rep.exit_code())
        }
        Command::Act { spec, element, k, report } => {
            let spec = load(&spec)?;
            let f = parse_element(&element, &spec)?;
            let g = act(&spec, k, &f)?;
            let text = format_element(&g, &spec);
            println!("{text}");
            let mut rep = Report::new("act", 0, format!("k={k}"));
            rep.push("act", format!("f = {}", format_element(&f, &spec)), Status::Pass, Some(text));
            write_report(report.as_deref(), &rep)?;
            Ok(0)
        }
        Command::Omega { spec, element, s, l, m, report } => {
            let spec = load(&spec)?;
            let f = parse_element(&element, &spec)?;
            let g = omega_op(&spec, s, l, m, &f)?;
            let text = format_element(&g, &spec);
            println!("{text}");
            let mut rep = Report::new("omega", 0, format!("s={s} l={l} m={m}"));
            rep.push("omega", format!("f = {}", format_element(&f, &spec)), Status::Pass, Some(text));
            write_report(report.as_deref(), &rep)?;
            Ok(0)
        }
        Command::Rank { spec, element, report } => {
            let spec = load(&spec)?;
            let f = parse_element(&element, &spec)?;
            let rr = rank_invariant(&spec, &f)?;
            println!(
                "rank = {} (window start {}, {} samples, stabilized: {})",
                rr.value, rr.window.0, rr.window.1, rr.stabilized
            );
            let mut rep = Report::new("rank", 0, format!("window=({},{})", rr.window.0, rr.window.1));
            let status = if rr.stabilized { Status::Pass } else { Status::Unknown };
            rep.push(
                "rank",
                format!("f = {}", format_element(&f, &spec)),
                status,
                Some(rr.value.to_string()),
            );
            write_report(report.as_deref(), &rep)?;
            Ok(0)
        }
        Command::Certify { spec, element, degree, level, report } => {
            let spec = load(&spec)?;
            let f = parse_element(&element, &spec)?;
            let mut rep = Report::new("certify", 0, format!("degree={degree} level={level}"));
            let instance = format!("f = {}", format_element(&f, &spec));
            let code = match certify_irreducible(&spec, &f, degree, level) {
                Ok(cert) => match replay(&spec, &cert, &f) {
                    Ok(()) => {
                        println!(
                            "certified: {} reduction steps, {} generation steps, {} spanning monomials; replay exact",
                            cert.trace.steps.len(),
                            cert.generation.steps.len(),
                            cert.spanning.len()
                        );
                        rep.push(
                            "certify-replay",
                            instance,
                            Status::Pass,
                            Some(format!(
                                "steps={} generation={} spanning={}",
                                cert.trace.steps.len(),
                                cert.generation.steps.len(),
                                cert.spanning.len()
                            )),
                        );
                        0
                    }
                    Err(e) => {
                        println!("certificate produced but replay failed: {e}");
                        rep.fail("certify-replay", instance, format!("replay: {e}"));
                        1
                    }
                },
                Err(Error::Hypothesis(msg)) => {
                    println!("not certifiable here: {msg}");
                    rep.unknown("certify-replay", instance, msg);
                    0
                }
                Err(e) => {
                    println!("certification failed: {e}");
                    rep.fail("certify-replay", instance, e.to_string());
                    1
                }
            };
            write_report(report.as_deref(), &rep)?;
            Ok(code)
        }
        Command::Classify { spec, other, report } => {
            let a = load(&spec)?;
            let b = load(&other)?;
            let verdict = specs_isomorphic(&a, &b)?;
            let (label, status) = match &verdict {
                IsoVerdict::Isomorphic { dt_perm, d_perm } => (
                    format!("isomorphic (dt permutation {dt_perm:?}, d permutation {d_perm:?})"),
                    Status::Pass,
                ),
                IsoVerdict::Distinct { reason } => (format!("distinct: {reason}"), Status::Pass),
                IsoVerdict::Unknown { reason } => (format!("unknown: {reason}"), Status::Unknown),
            };
            println!("{label}");
            let mut rep = Report::new("classify", 0, "");
            rep.push(
                "classify",
                format!("{} vs {}", spec.display(), other.display()),
                status,
                Some(label),
            );
            write_report(report.as_deref(), &rep)?;
            Ok(0)
        }
        Command::Det { bases, mults, r, report } => {
            let bases = bases
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()?;
            let cs = ConfluentSpec::new(bases, mults, r)?;
            let formula = confluent_det_formula(&cs);
            let brute = determinant(&confluent_matrix(&cs))?;
            let mut rep = Report::new("det", 0, format!("size={} offset={r}", cs.size()));
            let code = if formula == brute {
                println!("det = {}", format_rational(&formula));
                rep.push(
                    "determinant-oracle",
                    format!("size={}", cs.size()),
                    Status::Pass,
                    Some(format_rational(&formula)),
                );
                0
            } else {
                println!(
                    "MISMATCH: formula {} vs cofactor {}",
                    format_rational(&formula),
                    format_rational(&brute)
                );
                rep.fail(
                    "determinant-oracle",
                    format!("size={}", cs.size()),
                    format!("formula {} vs cofactor {}", format_rational(&formula), format_rational(&brute)),
                );
                1
            };
            write_report(report.as_deref(), &rep)?;
            Ok(code)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
