use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flowspace::cli::{cmd_enumerate, cmd_moore, cmd_pushout, cmd_verify, effective_seed, Method, MooreDemo, Outcome, EXIT_INPUT};
use flowspace::verify::Suite;

#[derive(Parser)]
#[command(name = "flowspace", version, about = "Path spaces of flow pushouts, computed two ways")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the objects of a truncated Reedy poset.
    Enumerate {
        /// State labels, comma separated or repeated.
        #[arg(long, value_delimiter = ',', required = true)]
        states: Vec<String>,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        max_degree: usize,
        /// Print the Hasse diagram as DOT instead of the listing.
        #[arg(long)]
        dot: bool,
    },
    /// Compute the path space of a pushout along a globe attachment.
    Pushout {
        flow: PathBuf,
        attachment: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Word length cap for instances with loops.
        #[arg(long)]
        cap: Option<usize>,
        /// Write the support poset of the diagram as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the property suites on the seeded corpus.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Add the wall time to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Moore path computations on literals like `dur=1; pts=(0,0),(1,1)`.
    Moore {
        #[command(subcommand)]
        demo: MooreCommand,
    },
}

#[derive(Subcommand)]
enum MooreCommand {
    /// Moore composite of two paths.
    Compose { a: String, b: String },
    /// Normalized composite of two unit-duration paths.
    Normalized { a: String, b: String },
    /// Both bracketings of three unit paths and the fixed associator.
    Associator { a: String, b: String, c: String },
    /// Barycentric blend of two reparametrizations.
    Blend { phi: String, psi: String, weight: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Oracle,
    Reedy,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Poset,
    Diagrams,
    Pushout,
    Moore,
    All,
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Enumerate { states, u, v, max_degree, dot } => cmd_enumerate(&states, &u, &v, max_degree, dot),
        Command::Pushout { flow, attachment, method, cap, dot } => {
            let method = match method {
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Reedy => Method::Reedy,
                MethodArg::Both => Method::Both,
            };
            cmd_pushout(&flow, &attachment, method, cap, dot.as_deref())
        }
        Command::Verify { suite, seed, count, timing } => {
            let env = std::env::var("FLOWSPACE_SEED").ok();
            let seed = match effective_seed(seed, env.as_deref()) {
                Ok(s) => s,
                Err(e) => return Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: EXIT_INPUT },
            };
            let suite = match suite {
                SuiteArg::Poset => Suite::Poset,
                SuiteArg::Diagrams => Suite::Diagrams,
                SuiteArg::Pushout => Suite::Pushout,
                SuiteArg::Moore => Suite::Moore,
                SuiteArg::All => Suite::All,
            };
            cmd_verify(suite, seed, count, timing)
        }
        Command::Moore { demo } => cmd_moore(&match demo {
            MooreCommand::Compose { a, b } => MooreDemo::Compose { a, b },
            MooreCommand::Normalized { a, b } => MooreDemo::Normalized { a, b },
            MooreCommand::Associator { a, b, c } => MooreDemo::Associator { a, b, c },
            MooreCommand::Blend { phi, psi, weight } => MooreDemo::Blend { phi, psi, weight },
        }),
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code)
}
