use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fockmarket_cli::scenario::Method;
use fockmarket_cli::{
    max_dim_from_env, run, verify, write_artifacts, CliError, RunOptions, Scenario, EXIT_CONSERVATION,
};
use fockmarket_core::dynamics::effective_price;
use fockmarket_core::kms::{equilibrium_residual, solve_equilibrium, KmsCase, KmsMode, KmsProblem};

#[derive(Parser)]
#[command(name = "fockmarket", version, about = "Operator-algebra stock-market scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Onebody,
    Series,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Onebody => Method::Onebody,
            MethodArg::Series => Method::Series,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV, optional SVG and a conservation report.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Series order (series method only).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Evolve exactly and report the drift of every conserved quantity.
    Verify { scenario: PathBuf },
    /// Solve the KMS equilibrium condition for one trader.
    #[command(allow_negative_numbers = true)]
    Kms {
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        ql: f64,
        /// Inverse temperature; solves for the occupations.
        #[arg(long, conflicts_with = "nc")]
        beta: Option<f64>,
        /// Cash occupation; solves for the inverse temperature.
        #[arg(long)]
        nc: Option<f64>,
    },
    /// Effective integer price reached by the price/supply exchange.
    Price {
        #[arg(long = "of")]
        supply: f64,
        #[arg(long = "pr")]
        price: f64,
    },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x}"))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { scenario, out, svg, method, order } => {
            let scn = Scenario::load(&scenario)?;
            let opts = RunOptions { method: method.map(Method::from), order, max_dim: max_dim_from_env()? };
            let output = run(&scn, &opts)?;
            let stem = scn.stem(&scenario);
            let files = write_artifacts(&out, &stem, &output, svg)?;
            println!("wrote {}", files.csv.display());
            if let Some(p) = &files.svg {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", files.report.display());
            for note in &output.report.notes {
                println!("note: {note}");
            }
            if output.report.passed() {
                Ok(0)
            } else {
                eprintln!("conservation check failed; see {}", files.report.display());
                Ok(EXIT_CONSERVATION)
            }
        }
        Command::Verify { scenario } => {
            let scn = Scenario::load(&scenario)?;
            let report = verify(&scn, max_dim_from_env()?)?;
            print!("{}", report.render(&scn.stem(&scenario)));
            Ok(if report.passed() { 0 } else { EXIT_CONSERVATION })
        }
        Command::Kms { phi, ql, beta, nc } => {
            let mode = match (beta, nc) {
                (Some(beta), _) => Some(KmsMode::SolvePair { beta }),
                (None, Some(n_c)) => Some(KmsMode::SolveBetaGivenNc { n_c }),
                (None, None) => None,
            };
            match mode {
                Some(mode) => {
                    let problem = KmsProblem { phi, q_l: ql, mode };
                    let sol = solve_equilibrium(&problem)?;
                    println!("case: {}", sol.case);
                    println!("outcome: {:?}", sol.case.outcome());
                    println!("beta0: {}", fmt_opt(sol.beta0));
                    println!("nc0: {}", fmt_opt(sol.nc0));
                    println!("na0: {}", fmt_opt(sol.na0));
                    println!("residual: {}", fmt_opt(equilibrium_residual(phi, &sol)));
                }
                None => {
                    // the three holdings orderings for this sign of phi
                    let half = ql / 2.0;
                    for (label, na, nc) in [("n_a > n_c", ql, 0.0), ("n_a = n_c", half, half), ("n_a < n_c", 0.0, ql)] {
                        let case = KmsCase::classify(phi, na, nc);
                        println!("{label}: case {case}, {:?}", case.outcome());
                    }
                }
            }
            Ok(0)
        }
        Command::Price { supply, price } => {
            println!("{}", effective_price(supply, price)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
