//! Implementations of the CLI verbs.

use std::fs;
use std::net::{TcpListener, TcpStream};

use dcm_core::dcm::{CosetOracle, DcmInstance, PreparedInstance};
use dcm_core::dcnm::{DcnmProverEngine, DcnmVerifierEngine, HonestDcnmProver};
use dcm_core::protocol::{
    drive_over_channel, run_lockstep, strategy_by_name, HonestProver, Mode,
    OptimalCheatingProver, ProverEngine, ProverWitness, SessionMeta, SessionOutcome,
    VerifierEngine, VerifierStrategy, View,
};
use dcm_core::reduction::{reduce_gi, Graph};
use dcm_core::rng::{PartyTag, RandomSource};
use dcm_core::dcnm::simulate_dcnm_honest;
use dcm_core::simulator::{
    exact_view_distribution, simulate_sequential, ViewProcess, DEFAULT_STATE_CAP,
};
use dcm_core::stats::{acceptance_rate, empirical_tv, tv_distance, tv_summary_line, EmpiricalSample};
use dcm_core::transport::{InProcessChannel, StreamChannel};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn load_instance(path: &str) -> Result<DcmInstance> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {path}: {e}")))?;
    Ok(DcmInstance::parse_text(&text)?)
}

fn load_graph(path: &str) -> Result<Graph> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {path}: {e}")))?;
    Ok(Graph::parse_text(&text)?)
}

/// Decode a hex seed, or draw one from OS entropy and announce it so the
/// run stays reproducible.
fn resolve_seed(seed: Option<&str>, label: &str) -> Result<Vec<u8>> {
    match seed {
        Some(hex_str) => {
            hex::decode(hex_str).map_err(|e| CliError::parse(format!("bad {label} seed hex: {e}")))
        }
        None => {
            let bytes = RandomSource::entropy_seed();
            println!("{label}-seed: {} (drawn from OS entropy)", hex::encode(&bytes));
            Ok(bytes)
        }
    }
}

fn parse_mode(mode: &str, k: u32) -> Result<Mode> {
    if k == 0 {
        return Err(CliError::parse("k must be at least 1"));
    }
    match mode {
        "atomic" => {
            if k != 1 {
                return Err(CliError::parse("atomic mode requires k = 1"));
            }
            Ok(Mode::Atomic)
        }
        "sequential" => Ok(Mode::Sequential(k)),
        "parallel" => Ok(Mode::Parallel(k)),
        other => Err(CliError::parse(format!("unknown mode: {other}"))),
    }
}

fn lookup_strategy(name: &str) -> Result<Box<dyn VerifierStrategy>> {
    strategy_by_name(name)
        .ok_or_else(|| CliError::parse(format!("unknown adversary: {name} (try honest, constant-0, constant-1, commit-parity, random-echo)")))
}

fn print_view(view: &View) {
    println!(
        "view consumed-randomness: {} ({} bits)",
        if view.consumed_randomness.is_empty() {
            "-".to_string()
        } else {
            view.consumed_randomness.to_string()
        },
        view.consumed_randomness.len()
    );
    for message in &view.messages {
        println!("view message: {message}");
    }
}

fn report_outcome(outcome: &SessionOutcome, out: &str) -> Result<()> {
    println!("verdict: {}", if outcome.accepted { "ACCEPT" } else { "REJECT" });
    fs::write(out, outcome.transcript.to_text())?;
    println!("transcript: {out}");
    print_view(&outcome.view);
    Ok(())
}

pub fn solve(instance: &str, cap: u64) -> Result<()> {
    let prep = PreparedInstance::new(load_instance(instance)?);
    let oracle = CosetOracle::new(&prep, cap)?;
    if oracle.decide(prep.s())? {
        let fact = oracle.factorize(prep.s())?;
        println!("YES");
        println!("g0: {}", fact.g0.to_text());
        println!("h0: {}", fact.h0.to_text());
    } else {
        println!("NO");
    }
    Ok(())
}

pub fn run(
    instance: &str,
    mode: &str,
    k: u32,
    seed: Option<&str>,
    transport: &str,
    out: &str,
    cap: u64,
) -> Result<()> {
    let mode = parse_mode(mode, k)?;
    let seed = resolve_seed(seed, "session")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let witness = ProverWitness::obtain(&prep, cap)?;
    let meta = SessionMeta::new(&prep, mode).with_seeds(Some(&seed), Some(&seed));

    let outcome = match transport {
        "inproc" => {
            let (mut chan_p, mut chan_v) = InProcessChannel::pair();
            run_threaded(&prep, &witness, &meta, &seed, &mut chan_p, &mut chan_v)?
        }
        "stream" => {
            let (sock_p, sock_v) = std::os::unix::net::UnixStream::pair()
                .map_err(|e| CliError::Transport(e.to_string()))?;
            let mut chan_p = StreamChannel::new(sock_p);
            let mut chan_v = StreamChannel::new(sock_v);
            run_threaded(&prep, &witness, &meta, &seed, &mut chan_p, &mut chan_v)?
        }
        other => return Err(CliError::parse(format!("unknown transport: {other}"))),
    };
    report_outcome(&outcome, out)
}

fn run_threaded<CP, CV>(
    prep: &PreparedInstance,
    witness: &ProverWitness,
    meta: &SessionMeta,
    seed: &[u8],
    chan_p: &mut CP,
    chan_v: &mut CV,
) -> Result<SessionOutcome>
where
    CP: dcm_core::transport::Channel + Send,
    CV: dcm_core::transport::Channel,
{
    std::thread::scope(|scope| -> Result<SessionOutcome> {
        let meta_p = meta.clone();
        let witness_p = witness.clone();
        let prover_side = scope.spawn(move || -> std::result::Result<(), CliError> {
            let honest = HonestProver::new(prep, witness_p);
            let mut prover = ProverEngine::new(&honest, meta_p, seed);
            drive_over_channel(&mut prover, chan_p, true)?;
            Ok(())
        });
        let mut verifier = VerifierEngine::new(prep, meta.clone(), seed);
        drive_over_channel(&mut verifier, chan_v, false)?;
        prover_side
            .join()
            .map_err(|_| CliError::Other("prover thread panicked".into()))??;
        Ok(verifier.outcome())
    })
}

fn tcp_channel(
    listen: Option<&str>,
    connect: Option<&str>,
) -> Result<StreamChannel<TcpStream>> {
    let stream = match (listen, connect) {
        (Some(addr), None) => {
            let listener =
                TcpListener::bind(addr).map_err(|e| CliError::Transport(e.to_string()))?;
            let (stream, peer) =
                listener.accept().map_err(|e| CliError::Transport(e.to_string()))?;
            println!("peer connected from {peer}");
            stream
        }
        (None, Some(addr)) => {
            TcpStream::connect(addr).map_err(|e| CliError::Transport(e.to_string()))?
        }
        _ => return Err(CliError::parse("exactly one of --listen/--connect is required")),
    };
    stream
        .set_read_timeout(Some(dcm_core::transport::DEFAULT_TIMEOUT))
        .map_err(|e| CliError::Transport(e.to_string()))?;
    Ok(StreamChannel::new(stream))
}

pub fn prove(
    instance: &str,
    mode: &str,
    k: u32,
    seed: Option<&str>,
    listen: Option<&str>,
    connect: Option<&str>,
    cap: u64,
) -> Result<()> {
    let mode = parse_mode(mode, k)?;
    let seed = resolve_seed(seed, "prover")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let witness = ProverWitness::obtain(&prep, cap)?;
    let mut channel = tcp_channel(listen, connect)?;
    let meta = SessionMeta::new(&prep, mode).with_seeds(Some(&seed), None);
    let honest = HonestProver::new(&prep, witness);
    let mut prover = ProverEngine::new(&honest, meta, &seed);
    drive_over_channel(&mut prover, &mut channel, true)?;
    let transcript = prover.transcript();
    println!("verdict: {}", if transcript.verdict { "ACCEPT" } else { "REJECT" });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    instance: &str,
    mode: &str,
    k: u32,
    seed: Option<&str>,
    listen: Option<&str>,
    connect: Option<&str>,
    peer_seed: Option<&str>,
    out: &str,
    cap: u64,
) -> Result<()> {
    let mode = parse_mode(mode, k)?;
    let seed = resolve_seed(seed, "verifier")?;
    let peer = peer_seed
        .map(|s| hex::decode(s).map_err(|e| CliError::parse(format!("bad peer seed hex: {e}"))))
        .transpose()?;
    let _ = cap;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let mut channel = tcp_channel(listen, connect)?;
    let meta = SessionMeta::new(&prep, mode).with_seeds(peer.as_deref(), Some(&seed));
    let mut verifier = VerifierEngine::new(&prep, meta, &seed);
    drive_over_channel(&mut verifier, &mut channel, false)?;
    report_outcome(&verifier.outcome(), out)
}

pub fn simulate(
    instance: &str,
    k: u32,
    adversary: &str,
    seed: Option<&str>,
    restart_cap: u32,
    cap: u64,
) -> Result<()> {
    if k == 0 {
        return Err(CliError::parse("k must be at least 1"));
    }
    let strategy = lookup_strategy(adversary)?;
    let seed = resolve_seed(seed, "simulator")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let mut rng = RandomSource::derive(&seed, PartyTag::Simulator, 0);
    let simulated = simulate_sequential(&prep, strategy.as_ref(), k, cap, restart_cap, &mut rng)?;
    print_view(&simulated.view);
    let attempts: Vec<String> = simulated
        .attempts_per_stage
        .iter()
        .map(|a| a.to_string())
        .collect();
    println!("attempts-per-stage: {}", attempts.join(" "));
    let total: u32 = simulated.attempts_per_stage.iter().sum();
    println!("total-attempts: {total}");
    Ok(())
}

pub fn zk_check(
    instance: &str,
    k: u32,
    adversary: &str,
    exact: bool,
    samples: Option<u64>,
    seed: Option<&str>,
    cap: u64,
) -> Result<()> {
    if k == 0 {
        return Err(CliError::parse("k must be at least 1"));
    }
    let strategy = lookup_strategy(adversary)?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    match (exact, samples) {
        (false, Some(n)) => sampled_zk_check(&prep, strategy.as_ref(), k, n, seed, cap),
        _ => exact_zk_check(&prep, strategy.as_ref(), k),
    }
}

fn exact_zk_check(
    prep: &PreparedInstance,
    strategy: &dyn VerifierStrategy,
    k: u32,
) -> Result<()> {
    let interaction = exact_view_distribution(
        prep,
        &ViewProcess::Interaction { strategy },
        k,
        DEFAULT_STATE_CAP,
    )?;
    let simulated = exact_view_distribution(
        prep,
        &ViewProcess::SequentialSimulator { strategy },
        k,
        DEFAULT_STATE_CAP,
    )?;
    println!("outcome interaction simulator");
    let keys: std::collections::BTreeSet<_> = interaction
        .outcomes()
        .keys()
        .chain(simulated.outcomes().keys())
        .cloned()
        .collect();
    for key in keys {
        println!(
            "{} {} {}",
            hex::encode(&key),
            interaction.probability(&key),
            simulated.probability(&key)
        );
    }
    let tv = tv_distance(&interaction, &simulated);
    println!("{}", tv_summary_line(&tv));
    Ok(())
}

fn sampled_zk_check(
    prep: &PreparedInstance,
    strategy: &dyn VerifierStrategy,
    k: u32,
    samples: u64,
    seed: Option<&str>,
    cap: u64,
) -> Result<()> {
    if samples == 0 {
        return Err(CliError::parse("--samples must be positive"));
    }
    let seed = resolve_seed(seed, "zk-check")?;
    let witness = ProverWitness::obtain(prep, cap)?;
    let mut interaction = EmpiricalSample::new();
    let mut simulated = EmpiricalSample::new();
    for trial in 0..samples {
        let mut rng_p = RandomSource::derive(&seed, PartyTag::Prover, trial);
        let mut rng_v = RandomSource::derive(&seed, PartyTag::Verifier, trial);
        let view = dcm_core::protocol::sample_interaction_view(
            prep,
            &witness,
            strategy,
            k,
            &mut rng_p,
            &mut rng_v,
        );
        interaction.record(view.canonical_bytes());
        let mut rng_m = RandomSource::derive(&seed, PartyTag::Simulator, trial);
        let sim = simulate_sequential(
            prep,
            strategy,
            k,
            cap,
            dcm_core::simulator::DEFAULT_RESTART_CAP,
            &mut rng_m,
        )?;
        simulated.record(sim.view.canonical_bytes());
    }
    println!("outcome interaction simulator");
    let keys: std::collections::BTreeSet<_> = interaction
        .counts()
        .keys()
        .chain(simulated.counts().keys())
        .cloned()
        .collect();
    for key in keys {
        println!(
            "{} {} {}",
            hex::encode(&key),
            interaction.frequency(&key),
            simulated.frequency(&key)
        );
    }
    let tv = empirical_tv(&interaction, &simulated);
    println!("{}", tv_summary_line(&tv));
    Ok(())
}

pub fn dcnm_run(instance: &str, k: u32, seed: Option<&str>, out: &str, cap: u64) -> Result<()> {
    if k == 0 {
        return Err(CliError::parse("k must be at least 1"));
    }
    let seed = resolve_seed(seed, "session")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let rule = HonestDcnmProver::new(&prep, cap)?;
    let meta = SessionMeta::new(&prep, Mode::Dcnm(k)).with_seeds(Some(&seed), Some(&seed));
    let mut verifier = DcnmVerifierEngine::new(&prep, meta, &seed);
    let mut prover = DcnmProverEngine::new(&rule, k);
    run_lockstep(&mut verifier, &mut prover)?;
    report_outcome(&verifier.outcome(), out)
}

pub fn dcnm_simulate(instance: &str, seed: Option<&str>, cap: u64) -> Result<()> {
    let seed = resolve_seed(seed, "simulator")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let mut rng = RandomSource::derive(&seed, PartyTag::Simulator, 0);
    let view = simulate_dcnm_honest(&prep, cap, &mut rng)?;
    print_view(&view);
    Ok(())
}

pub fn reduce_gi_files(graph_a: &str, graph_b: &str, out: &str) -> Result<()> {
    let a = load_graph(graph_a)?;
    let b = load_graph(graph_b)?;
    let instance = reduce_gi(&a, &b);
    fs::write(out, instance.to_text())?;
    println!(
        "instance: {out} (degree {}, |G gens| {}, |H gens| {})",
        instance.degree(),
        instance.g_group.generators().len(),
        instance.h_group.generators().len()
    );
    Ok(())
}

pub fn soundness(
    instance: &str,
    cheater: &str,
    trials: u64,
    mode: &str,
    k: u32,
    seed: Option<&str>,
    cap: u64,
) -> Result<()> {
    if cheater != "optimal" {
        return Err(CliError::parse(format!("unknown cheater: {cheater}")));
    }
    if trials == 0 {
        return Err(CliError::parse("--trials must be positive"));
    }
    let mode = parse_mode(mode, k)?;
    let seed = resolve_seed(seed, "soundness")?;
    let prep = PreparedInstance::new(load_instance(instance)?);
    let prover = OptimalCheatingProver::new(&prep, cap)?;
    let mut failure: Option<CliError> = None;
    let rate = acceptance_rate(trials, |trial| {
        let mut tag = seed.clone();
        tag.extend_from_slice(&trial.to_be_bytes());
        match dcm_core::protocol::run_session(&prep, &prover, mode, &tag, &tag) {
            Ok(outcome) => outcome.accepted,
            Err(e) => {
                failure.get_or_insert(e.into());
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    println!(
        "accepted {}/{} rate {:.6} half-width(3sigma) {:.6}",
        rate.accepted, rate.trials, rate.rate, rate.half_width_3_sigma
    );
    Ok(())
}
