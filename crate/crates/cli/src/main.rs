use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anticomm_core::classify::{component_of, component_of_pair, enumerate_components, ComponentTriple};
use anticomm_core::commutant::sigma_commutant;
use anticomm_core::invariants::{eta, trace_invariants};
use anticomm_core::layered::Sigma;
use anticomm_core::sampler::{orbit_dim, sample_component, sample_component_flippable, SampleConfig};
use anticomm_core::verify::{run_suite, Suite};
use anticomm_core::{Error, RatMatrix};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Exact computations on anti-commuting matrix pairs (AB + BA = 0).
#[derive(Parser)]
#[command(name = "anticomm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of {B : AB = σBA} for the matrix in FILE.
    Commutant {
        file: String,
        #[arg(long, default_value = "-1", allow_hyphen_values = true, value_parser = parse_sigma)]
        sigma: Sigma,
    },
    /// Component triple of a matrix, or of each pair in a JSON-lines batch.
    Classify {
        #[arg(required_unless_present = "batch")]
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        batch: Option<String>,
    },
    /// Seeded generic sample on the component (p, m, r).
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        coeff_bound: u32,
        #[arg(long, default_value_t = 64)]
        retries: usize,
        /// Use c_i = 1 and b_i = t_i² so B has rational spectrum.
        #[arg(long)]
        flippable: bool,
    },
    /// Tangent, orbit, stabilizer and fiber dimensions of a pair.
    Tangent { file: String },
    /// Traces Tr(AⁱBʲ) for i + j <= degree (default 2n).
    Invariants {
        #[arg(required_unless_present = "batch")]
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        batch: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Points of the plane attached to a generic pair.
    Eta { file: String },
    /// All component triples for size n.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Run a verification suite over all cases up to size max-n.
    Verify {
        #[arg(long, value_parser = Suite::NAMES)]
        suite: String,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

fn parse_sigma(s: &str) -> Result<Sigma, String> {
    match s.trim_start_matches('+') {
        "1" => Ok(Sigma::Plus),
        "-1" => Ok(Sigma::Minus),
        _ => Err(format!("sigma must be +1 or -1, got {s:?}")),
    }
}

#[derive(Deserialize)]
struct Pair {
    #[serde(rename = "A")]
    a: RatMatrix,
    #[serde(rename = "B")]
    b: RatMatrix,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixOrPair {
    Pair(Pair),
    Matrix(RatMatrix),
}

enum Failure {
    Core(Error),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        Error::Shape(_) | Error::LengthMismatch(..) => 3,
        Error::IrrationalSpectrum => 4,
        Error::InvalidTriple { .. } => 5,
        Error::NotAntiCommuting | Error::NotInCommutant => 6,
        Error::NotGeneric => 7,
        Error::RetriesExhausted { .. } => 8,
        Error::ZeroPolynomial => 1,
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Core(Error::Parse(format!("{what}: {e}"))))
}

fn read_pair(path: &str) -> Result<Pair, Failure> {
    parse_json(&read_input(path)?, path)
}

fn batch_lines(path: &str) -> Result<Vec<Pair>, Failure> {
    read_input(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_json(l, &format!("{path}:{}", i + 1)))
        .collect()
}

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

fn ok_flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "mismatch"
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Commutant { file, sigma } => {
            let a: RatMatrix = parse_json(&read_input(&file)?, &file)?;
            emit(&mut out, &sigma_commutant(&a, sigma)?)
        }
        Command::Classify { file, batch } => {
            if let Some(path) = batch {
                for pair in batch_lines(&path)? {
                    emit(&mut out, &component_of_pair(&pair.a, &pair.b)?)?;
                }
                return Ok(());
            }
            let file = file.expect("clap requires file or batch");
            let report = match parse_json::<MatrixOrPair>(&read_input(&file)?, &file)? {
                MatrixOrPair::Matrix(a) => component_of(&a)?,
                MatrixOrPair::Pair(p) => component_of_pair(&p.a, &p.b)?,
            };
            emit(&mut out, &report)
        }
        Command::Sample {
            n,
            p,
            m,
            r,
            seed,
            coeff_bound,
            retries,
            flippable,
        } => {
            let t = ComponentTriple::for_size(p, m, r, n)?;
            let cfg = SampleConfig {
                seed,
                coeff_bound,
                retries,
            };
            let sample = if flippable {
                sample_component_flippable(&t, &cfg)?
            } else {
                sample_component(&t, &cfg)?
            };
            let dims = orbit_dim(&sample.a, &sample.b)?;
            let anti = anticomm_core::exactmat::anticommutator(&sample.a, &sample.b)?.is_zero();
            let generic = anticomm_core::classify::is_generic_pair(&sample.a, &sample.b, &t)?;
            let classified = component_of(&sample.a)?.triple == t;
            let dims_ok =
                dims.tangent_dim == n * n + p && dims.stabilizer_dim == n - p && dims.fiber_dim == n;
            let doc = json!({
                "seed": seed,
                "coeffBound": coeff_bound,
                "sample": sample,
                "dims": dims,
                "checks": {
                    "antiCommutes": ok_flag(anti),
                    "componentOf": ok_flag(classified),
                    "generic": ok_flag(generic),
                    "dimensions": ok_flag(dims_ok),
                },
            });
            emit(&mut out, &doc)
        }
        Command::Tangent { file } => {
            let pair = read_pair(&file)?;
            emit(&mut out, &orbit_dim(&pair.a, &pair.b)?)
        }
        Command::Invariants {
            file,
            batch,
            degree,
        } => {
            let pairs = match (batch, file) {
                (Some(path), _) => batch_lines(&path)?,
                (None, Some(file)) => vec![read_pair(&file)?],
                (None, None) => unreachable!("clap requires file or batch"),
            };
            for pair in pairs {
                let d = degree.unwrap_or(2 * pair.a.rows());
                emit(&mut out, &trace_invariants(&pair.a, &pair.b, d)?)?;
            }
            Ok(())
        }
        Command::Eta { file } => {
            let pair = read_pair(&file)?;
            emit(&mut out, &eta(&pair.a, &pair.b)?)
        }
        Command::Enumerate { n } => {
            let ts = enumerate_components(n);
            emit(&mut out, &json!({ "n": n, "count": ts.len(), "components": ts }))
        }
        Command::Verify { suite, max_n } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite, max_n);
            emit(&mut out, &report)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
    }
}
