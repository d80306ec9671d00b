use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stgen::harness::{self, CodeSize, ExperimentPlan, VerifyOptions};
use stgen::{
    distortion_profile, efficiency_bound, list_dynamics_report, BaseCode, DecoderConfig, Error,
    StGenCode, StGenParams, StegoContext,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Staircase-generator codes for matrix embedding.
#[derive(Parser, Debug)]
#[command(name = "stgen", version)]
struct Cli {
    /// Seed for code generation (build) or for covers and messages
    /// (experiment, verify).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a code and write its descriptor.
    Build {
        #[command(flatten)]
        code: CodeArgs,
        /// Descriptor output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Hide a message file in a cover file.
    Embed {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Recover the message from a stego file.
    Extract {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long)]
        stego: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print expected list sizes, R_alg and the list-dynamics report as JSON.
    Estimate {
        /// Use the parameters of a stored code.
        #[arg(long, conflicts_with_all = ["table2_row", "k1", "n1", "base", "v"])]
        descriptor: Option<PathBuf>,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Monte-Carlo embedding experiments, written as CSV.
    Experiment {
        /// Table rows, 1-based.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        rows: Vec<usize>,
        /// Target code lengths; defaults to both quoted lengths of each row.
        #[arg(long, value_delimiter = ',')]
        target_n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        wb: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "256")]
        l_cap: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        w1: usize,
        #[arg(long, default_value_t = 3)]
        retry_limit: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Seed for the random blocks of every code.
        #[arg(long, default_value_t = 1)]
        code_seed: u64,
        /// CSV output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run self-checks and print one JSON line per check.
    Verify {
        /// Also check a stored code.
        #[arg(long)]
        descriptor: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        oracle_codes: usize,
        #[arg(long, default_value_t = 10)]
        words_per_code: usize,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Practical parameter row, 1-based.
    #[arg(long, requires = "target_n", conflicts_with_all = ["k1", "n1", "base", "v"])]
    table2_row: Option<usize>,
    /// Desired code length; the nearest achievable one is used.
    #[arg(long)]
    target_n: Option<usize>,
    #[arg(long, requires_all = ["n1", "base", "v"])]
    k1: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    /// Base code id such as "(3,2)1".
    #[arg(long)]
    base: Option<String>,
    /// Number of blocks.
    #[arg(long)]
    v: Option<usize>,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    #[arg(long, default_value_t = 2)]
    w1: usize,
    #[arg(long, default_value_t = 2)]
    wb: usize,
    #[arg(long, default_value_t = 256)]
    l_cap: usize,
    #[arg(long, default_value_t = 3)]
    retry_limit: usize,
}

impl DecoderArgs {
    fn config(&self) -> DecoderConfig {
        DecoderConfig {
            w1: self.w1,
            wb: self.wb,
            list_cap: self.l_cap,
            retry_limit: self.retry_limit,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Capacity { .. } => EXIT_CAPACITY,
        _ => EXIT_DATA,
    }
}

fn params_from(args: &CodeArgs, seed: u64) -> Result<StGenParams, Failure> {
    if let Some(row) = args.table2_row {
        let n = args.target_n.expect("enforced by clap");
        return Ok(StGenParams::from_table2(row, n, seed)?);
    }
    match (args.k1, args.n1, &args.base, args.v) {
        (Some(k1), Some(n1), Some(base), Some(v)) => {
            Ok(StGenParams::new(k1, n1, BaseCode::from_id(base)?, v, seed)?)
        }
        _ => Err(Failure::Usage(
            "give either --table2-row with --target-n, or --k1 --n1 --base --v".into(),
        )),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(Error::from)
}

fn load_code(path: &Path) -> Result<StGenCode, Error> {
    let text = fs::read_to_string(path)?;
    StGenCode::from_json(&text)
}

fn summary(code: &StGenCode) -> serde_json::Value {
    let (n, k) = (code.n(), code.k());
    serde_json::json!({ "n": n, "k": k, "alpha": (n - k) as f64 / n as f64 })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Build { code, out } => {
            let code = StGenCode::build(params_from(&code, cli.seed)?)?;
            fs::write(&out, code.to_json()?).map_err(Error::from)?;
            println!("{}", summary(&code));
        }
        Command::Embed {
            descriptor,
            cover,
            message,
            out,
            decoder,
        } => {
            let ctx = StegoContext::new(load_code(&descriptor)?, decoder.config())?;
            let cover = read(&cover)?;
            let message = read(&message)?;
            let (stego, stats) = harness::embed_payload(&ctx, &cover, &message)?;
            fs::write(&out, stego).map_err(Error::from)?;
            eprintln!("{}", serde_json::to_string(&stats).map_err(Error::from)?);
        }
        Command::Extract {
            descriptor,
            stego,
            out,
        } => {
            let ctx = StegoContext::new(load_code(&descriptor)?, DecoderConfig::default())?;
            let message = harness::extract_payload(&ctx, &read(&stego)?)?;
            fs::write(&out, message).map_err(Error::from)?;
        }
        Command::Estimate {
            descriptor,
            code,
            decoder,
        } => {
            let params = match descriptor {
                Some(path) => load_code(&path)?.params().clone(),
                None => params_from(&code, cli.seed)?,
            };
            let cfg = decoder.config();
            let profile = distortion_profile(&params, &cfg)?;
            let (n, k) = (params.n(), params.k());
            let alpha = (n - k) as f64 / n as f64;
            let dynamics = if cfg.wb == 2 {
                Some(list_dynamics_report(&params, &cfg)?)
            } else {
                None
            };
            let report = serde_json::json!({
                "n": n,
                "k": k,
                "alpha": alpha,
                "r_alg": profile.r_alg,
                "theory_e_a": profile.r_alg.filter(|&r| r > 0).map(|r| (n - k) as f64 / r as f64),
                "bound_e": efficiency_bound(alpha)?,
                "profile": profile,
                "dynamics": dynamics,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(Error::from)?
            );
        }
        Command::Experiment {
            rows,
            target_n,
            wb,
            l_cap,
            w1,
            retry_limit,
            trials,
            code_seed,
            out,
        } => {
            let sizes = if target_n.is_empty() {
                vec![CodeSize::Quoted1000, CodeSize::Quoted1500]
            } else {
                target_n.into_iter().map(CodeSize::Target).collect()
            };
            let plan = ExperimentPlan {
                rows,
                sizes,
                wbs: wb,
                list_caps: l_cap,
                w1,
                retry_limit,
                trials,
                seed: cli.seed,
                code_seed,
            };
            let records = harness::run_experiment(&plan)?;
            match out {
                Some(path) => {
                    harness::write_csv(&records, fs::File::create(path).map_err(Error::from)?)?
                }
                None => harness::write_csv(&records, io::stdout().lock())?,
            }
        }
        Command::Verify {
            descriptor,
            oracle_codes,
            words_per_code,
        } => {
            let opts = VerifyOptions {
                descriptor: descriptor.map(|p| load_code(&p)).transpose()?,
                oracle_codes,
                words_per_code,
                seed: cli.seed,
            };
            let checks = harness::run_verify(&opts)?;
            let mut stdout = io::stdout().lock();
            for c in &checks {
                let line = serde_json::to_string(c).map_err(Error::from)?;
                writeln!(stdout, "{line}").map_err(Error::from)?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(Failure::Verify(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(n)) => {
            eprintln!("error: {n} check(s) failed");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
