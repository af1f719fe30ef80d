//! `dcm`: run, simulate, and audit double-coset membership proof
//! sessions from the command line.

mod commands;
mod error;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dcm", version, about = "Interactive proof sessions for double coset membership")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and print a factorization when it is a member.
    Solve {
        /// Instance file.
        instance: String,
        /// Enumeration cap for the brute-force oracle.
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run both parties of a membership session in process.
    Run {
        instance: String,
        #[arg(long, default_value = "atomic")]
        mode: String,
        /// Repetition count for sequential/parallel modes.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Hex seed; both parties derive their streams from it. Random
        /// when omitted.
        #[arg(long)]
        seed: Option<String>,
        /// Channel realization: in-process queues or an OS byte stream.
        #[arg(long, default_value = "inproc")]
        transport: String,
        /// Transcript output path.
        #[arg(short, long, default_value = "transcript.txt")]
        out: String,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run the honest prover end of a session over TCP.
    Prove {
        instance: String,
        #[arg(long, default_value = "atomic")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        seed: Option<String>,
        /// Listen for the verifier on this address.
        #[arg(long, conflicts_with = "connect")]
        listen: Option<String>,
        /// Connect to a listening verifier.
        #[arg(long)]
        connect: Option<String>,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run the verifier end of a session over TCP; prints the verdict
    /// and writes the transcript.
    Verify {
        instance: String,
        #[arg(long, default_value = "atomic")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, conflicts_with = "connect")]
        listen: Option<String>,
        #[arg(long)]
        connect: Option<String>,
        /// Prover seed to record in the transcript header, if known.
        #[arg(long)]
        peer_seed: Option<String>,
        #[arg(short, long, default_value = "transcript.txt")]
        out: String,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run the sequential black-box simulator and print the view.
    Simulate {
        instance: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Verifier strategy: honest, constant-0, constant-1,
        /// commit-parity, or random-echo.
        #[arg(long, default_value = "honest")]
        adversary: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value_t = dcm_core::DEFAULT_RESTART_CAP)]
        restart_cap: u32,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Compare interaction and simulator view distributions.
    ZkCheck {
        instance: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "honest")]
        adversary: String,
        /// Enumerate every coin exactly.
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Compare empirically with this many samples per side.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run both parties of a non-membership session in process.
    DcnmRun {
        instance: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        seed: Option<String>,
        #[arg(short, long, default_value = "transcript.txt")]
        out: String,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Run the non-membership simulator and print the view.
    DcnmSimulate {
        instance: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
    /// Reduce a graph pair to a membership instance file.
    ReduceGi {
        graph_a: String,
        graph_b: String,
        #[arg(short, long)]
        out: String,
    },
    /// Measure cheating-prover acceptance over many seeded sessions.
    Soundness {
        instance: String,
        /// Cheater strategy; only `optimal` is provided.
        #[arg(long, default_value = "optimal")]
        cheater: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value = "atomic")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value_t = dcm_core::DEFAULT_CAP)]
        cap: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { instance, cap } => commands::solve(&instance, cap),
        Command::Run {
            instance,
            mode,
            k,
            seed,
            transport,
            out,
            cap,
        } => commands::run(&instance, &mode, k, seed.as_deref(), &transport, &out, cap),
        Command::Prove {
            instance,
            mode,
            k,
            seed,
            listen,
            connect,
            cap,
        } => commands::prove(
            &instance,
            &mode,
            k,
            seed.as_deref(),
            listen.as_deref(),
            connect.as_deref(),
            cap,
        ),
        Command::Verify {
            instance,
            mode,
            k,
            seed,
            listen,
            connect,
            peer_seed,
            out,
            cap,
        } => commands::verify(
            &instance,
            &mode,
            k,
            seed.as_deref(),
            listen.as_deref(),
            connect.as_deref(),
            peer_seed.as_deref(),
            &out,
            cap,
        ),
        Command::Simulate {
            instance,
            k,
            adversary,
            seed,
            restart_cap,
            cap,
        } => commands::simulate(&instance, k, &adversary, seed.as_deref(), restart_cap, cap),
        Command::ZkCheck {
            instance,
            k,
            adversary,
            exact,
            samples,
            seed,
            cap,
        } => commands::zk_check(&instance, k, &adversary, exact, samples, seed.as_deref(), cap),
        Command::DcnmRun {
            instance,
            k,
            seed,
            out,
            cap,
        } => commands::dcnm_run(&instance, k, seed.as_deref(), &out, cap),
        Command::DcnmSimulate { instance, seed, cap } => {
            commands::dcnm_simulate(&instance, seed.as_deref(), cap)
        }
        Command::ReduceGi { graph_a, graph_b, out } => {
            commands::reduce_gi_files(&graph_a, &graph_b, &out)
        }
        Command::Soundness {
            instance,
            cheater,
            trials,
            mode,
            k,
            seed,
            cap,
        } => commands::soundness(&instance, &cheater, trials, &mode, k, seed.as_deref(), cap),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
