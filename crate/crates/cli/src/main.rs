use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rankcrypt::campaign::run_campaign;
use rankcrypt::formats::{
    additivity_json, converse_json, decode_packets, encode_packets, parse_campaign_config,
    parse_matrix, parse_scheme_descriptor, parse_topology, secrecy_json, tradeoff_json,
    zero_error_json, CheckOutcome, CheckVerdict, SchemeDescriptor, VerificationReport,
};
use rankcrypt::gf::FieldTower;
use rankcrypt::secrecy::{LayeredScheme, Scheme, StochasticEncoder};
use rankcrypt::verify::{
    check_rank_additivity, check_tradeoff, check_universal_secrecy, check_zero_error,
    converse_search_packet_length, EnumCaps,
};
use rankcrypt::{Error, FMatrix, GabidulinCode, Layer};

const EXIT_USAGE: u8 = 2;
const EXIT_DECODE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Universal secure network coding with Gabidulin codes.
#[derive(Parser)]
#[command(name = "rankcrypt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a layered scheme descriptor.
    Build {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        mu: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        rho: usize,
        /// Ascending modulus coefficients, comma separated.
        #[arg(long)]
        modulus: Option<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Encode a message file into a packet file.
    Encode {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Block `i` uses seed `seed + i`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decode a packet file into a message file.
    Decode {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Transfer matrix over GF(q) in matrix text form; identity if absent.
        #[arg(long)]
        transfer: Option<PathBuf>,
    },
    /// Run a network simulation campaign and write per-trial CSV records.
    Simulate {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run exhaustive checks and write a JSON report.
    Verify {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        checks: Vec<Check>,
        /// Wiretap budget; the scheme's own if absent.
        #[arg(long)]
        mu: Option<usize>,
        /// JSON destination; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Secrecy,
    Additivity,
    ZeroError,
    Tradeoff,
    Converse,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Secrecy => "secrecy",
            Check::Additivity => "additivity",
            Check::ZeroError => "zero-error",
            Check::Tradeoff => "tradeoff",
            Check::Converse => "converse",
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoCandidate
            | Error::Ambiguous
            | Error::DecodingFailure(_)
            | Error::RankDeficient { .. } => EXIT_DECODE,
            Error::CapExceeded { .. } => EXIT_VERIFY,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, data: &[u8]) -> CmdResult {
    fs::write(path, data).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, data: &[u8]) -> CmdResult {
    match path {
        Some(p) => write_file(p, data),
        None => io::stdout()
            .write_all(data)
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn load_scheme(path: &Path) -> Result<Scheme, Failure> {
    parse_scheme_descriptor(&read_text(path)?).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    q: u32,
    m: usize,
    n: usize,
    k: usize,
    mu: usize,
    t: usize,
    rho: usize,
    modulus: Option<&str>,
    out: &Path,
) -> CmdResult {
    let used = k + mu + 2 * t + rho;
    if used > n {
        return Err(Failure::usage(format!(
            "k + μ + 2t + ρ = {used} exceeds n = {n}"
        )));
    }
    let tower = match modulus {
        None => FieldTower::with_default_modulus(q, m)?,
        Some(list) => {
            let coeffs = list
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(format!("bad modulus {list:?}: {e}")))?;
            FieldTower::new(q, m, &coeffs)?
        }
    };
    let points = GabidulinCode::default_points(&tower, n);
    let scheme = LayeredScheme::with_points(&tower, n, k, mu, t, rho, &points)?;
    let d = scheme.designed_distance();
    let desc = SchemeDescriptor::from_scheme(&Scheme::Layered(scheme));
    write_file(out, desc.to_json().as_bytes())?;
    println!("rate k = {k} packets");
    println!("minimum rank distance d = {d}");
    Ok(())
}

fn cmd_encode(scheme: &Path, input: &Path, out: &Path, seed: u64) -> CmdResult {
    let scheme = load_scheme(scheme)?;
    let tower = scheme.tower().clone();
    let messages = decode_packets(&tower, scheme.message_len(), &read_bytes(input)?)?;
    let blocks = messages
        .iter()
        .enumerate()
        .map(|(i, s)| scheme.encode(s, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    write_file(out, &encode_packets(&tower, &blocks))
}

fn cmd_decode(scheme: &Path, input: &Path, out: &Path, transfer: Option<&Path>) -> CmdResult {
    let scheme = load_scheme(scheme)?;
    let tower = scheme.tower().clone();
    let n = scheme.block_len();
    let a = match transfer {
        None => FMatrix::identity(tower.clone(), Layer::Base, n),
        Some(p) => parse_matrix(&tower, Layer::Base, &read_text(p)?)?,
    };
    let blocks = decode_packets(&tower, a.rows(), &read_bytes(input)?)?;
    let messages = blocks
        .iter()
        .enumerate()
        .map(|(i, y)| {
            scheme.decode(&a, y).map_err(|e| {
                let mut f = Failure::from(e);
                f.message = format!("block {i}: {}", f.message);
                f
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_file(out, &encode_packets(&tower, &messages))
}

fn cmd_simulate(scheme: &Path, topology: &Path, config: &Path, out: Option<&Path>) -> CmdResult {
    let scheme = load_scheme(scheme)?;
    let topology = parse_topology(&read_text(topology)?)?;
    let config = parse_campaign_config(&read_text(config)?)?;
    let caps = EnumCaps::from_env()?;
    let result = run_campaign(&scheme, &topology, &config, &caps)?;
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    write_output(out, &csv)?;
    let (dp, df, ds) = result.decode_counts();
    let (lp, lf, _) = result.leakage_counts();
    eprintln!("decode: {dp} pass, {df} fail, {ds} skipped");
    eprintln!("leakage: {lp} pass, {lf} fail");
    if df > 0 {
        return Err(Failure {
            code: EXIT_DECODE,
            message: format!("{df} trials failed to decode"),
        });
    }
    if lf > 0 {
        return Err(Failure {
            code: EXIT_VERIFY,
            message: format!("{lf} trials leaked"),
        });
    }
    Ok(())
}

fn outcome(check: Check, r: Result<(bool, serde_json::Value), Error>) -> Result<CheckOutcome, Failure> {
    let (verdict, detail) = match r {
        Ok((true, d)) => (CheckVerdict::Pass, d),
        Ok((false, d)) => (CheckVerdict::Fail, d),
        Err(e @ Error::CapExceeded { .. }) => {
            (CheckVerdict::CapExceeded, json!({ "error": e.to_string() }))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(CheckOutcome {
        check: check.name().to_string(),
        verdict,
        detail,
    })
}

/// Universal secrecy at packet lengths `n − 1` and `n` for the maximal
/// message size `n − μ`.
fn converse_check(
    scheme: &Scheme,
    mu: usize,
    caps: &EnumCaps,
) -> Result<(bool, serde_json::Value), Error> {
    let q = scheme.tower().q();
    let n = scheme.block_len();
    if mu == 0 || mu >= n {
        return Ok((true, json!({ "vacuous": true, "mu": mu, "n": n })));
    }
    let k = n - mu;
    let short = converse_search_packet_length(q, n, n - 1, mu, k, caps)?;
    let long = converse_search_packet_length(q, n, n, mu, k, caps)?;
    let pass = short.every_choice_leaks && long.secure_choice().is_some();
    Ok((
        pass,
        json!({ "short_packets": converse_json(&short), "long_packets": converse_json(&long) }),
    ))
}

fn cmd_verify(scheme_path: &Path, checks: &[Check], mu: Option<usize>, out: Option<&Path>) -> CmdResult {
    let scheme = load_scheme(scheme_path)?;
    let caps = EnumCaps::from_env()?;
    let mu = mu.unwrap_or_else(|| scheme.secrecy_budget());
    let (t, rho) = scheme.budgets();
    let mut report = VerificationReport::new(&scheme, caps);
    for &check in checks {
        let r = match check {
            Check::Secrecy => {
                check_universal_secrecy(&scheme, mu, &caps).map(|r| (r.pass, secrecy_json(&r)))
            }
            Check::Additivity => match scheme.coset_parity_check() {
                Some(h) => check_rank_additivity(&h, mu, &caps).map(|r| (r.pass, additivity_json(&r))),
                None => Ok((false, json!({ "error": "scheme has no coset parity check" }))),
            },
            Check::ZeroError => {
                check_zero_error(&scheme, t, rho, &caps).map(|r| (r.pass, zero_error_json(&r)))
            }
            Check::Tradeoff => {
                check_tradeoff(&scheme, t, rho, &caps).map(|r| (r.pass, tradeoff_json(&r)))
            }
            Check::Converse => converse_check(&scheme, mu, &caps),
        };
        report.checks.push(outcome(check, r)?);
    }
    write_output(out, report.to_json().as_bytes())?;
    for c in &report.checks {
        eprintln!("{}: {:?}", c.check, c.verdict);
    }
    if !report.pass() {
        return Err(Failure {
            code: EXIT_VERIFY,
            message: "verification failed".into(),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Build {
            q,
            m,
            n,
            k,
            mu,
            t,
            rho,
            modulus,
            out,
        } => cmd_build(q, m, n, k, mu, t, rho, modulus.as_deref(), &out),
        Command::Encode {
            scheme,
            input,
            out,
            seed,
        } => cmd_encode(&scheme, &input, &out, seed),
        Command::Decode {
            scheme,
            input,
            out,
            transfer,
        } => cmd_decode(&scheme, &input, &out, transfer.as_deref()),
        Command::Simulate {
            scheme,
            topology,
            config,
            out,
        } => cmd_simulate(&scheme, &topology, &config, out.as_deref()),
        Command::Verify {
            scheme,
            checks,
            mu,
            out,
        } => cmd_verify(&scheme, &checks, mu, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
