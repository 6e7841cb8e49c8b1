use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use callmatch::check::{CheckConfig, Mutant};
use callmatch::cli::{self, Algorithm, RunConfig, EXIT_INPUT, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use callmatch::io::Format;

#[derive(Parser)]
#[command(
    name = "callmatch",
    version,
    about = "Double-sided call auction matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Mm,
    FairMm,
    Um,
    Fairize,
    IrMiddle,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Mm => Algorithm::Mm,
            AlgoArg::FairMm => Algorithm::FairMm,
            AlgoArg::Um => Algorithm::Um,
            AlgoArg::Fairize => Algorithm::Fairize,
            AlgoArg::IrMiddle => Algorithm::IrMiddle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutantArg {
    MmStrict,
    UmSkip,
}

#[derive(Subcommand)]
enum Command {
    /// Match an order file and write the fills.
    Match {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        input: PathBuf,
        /// Fills file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        no_sort_check: bool,
        /// Starting matching for fairize / ir-middle (default: first-fit).
        #[arg(long)]
        fills: Option<PathBuf>,
    },
    /// Run the randomized invariant campaign.
    Check {
        #[arg(long)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long, default_value_t = 10)]
        max_orders: usize,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        max_price: u64,
        /// Allow repeated limit prices.
        #[arg(long)]
        ties: bool,
        /// Run against a deliberately broken mechanism.
        #[arg(long, value_enum)]
        mutant: Option<MutantArg>,
    },
    /// Check that a fills file is a valid matching over an order file.
    Verify {
        #[arg(long)]
        orders: PathBuf,
        #[arg(long)]
        fills: PathBuf,
    },
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match cli.command {
        Command::Match {
            algo,
            input,
            output,
            format,
            no_sort_check,
            fills,
        } => {
            let cfg = RunConfig {
                algorithm: algo.into(),
                input,
                output,
                format: match format {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Json => Format::Json,
                },
                strict_sort_check: !no_sort_check,
                fills,
            };
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match cli::run_match(&cfg, &mut lock) {
                Ok(summary) => {
                    let _ = lock.flush();
                    eprintln!("{summary}");
                    exit(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit(e.exit_code())
                }
            }
        }
        Command::Check {
            seeds,
            seed_base,
            max_orders,
            max_price,
            ties,
            mutant,
        } => {
            let cfg = CheckConfig {
                seeds,
                seed_base,
                max_orders_per_side: max_orders,
                max_price,
                allow_price_ties: ties,
            };
            let mutant = mutant.map(|m| match m {
                MutantArg::MmStrict => Mutant::MmStrict,
                MutantArg::UmSkip => Mutant::UmSkip,
            });
            let report = cli::run_check_command(&cfg, mutant);
            print!("{}", cli::format_report(&report));
            exit(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        Command::Verify { orders, fills } => match cli::run_verify(&orders, &fills) {
            Ok(outcome) => {
                println!("{outcome}");
                exit(if outcome.valid {
                    EXIT_OK
                } else {
                    EXIT_VIOLATION
                })
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(EXIT_INPUT)
            }
        },
    }
}
