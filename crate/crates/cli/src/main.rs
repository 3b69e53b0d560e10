//! Command-line front end for the protocol laboratory: sequence dumps, rate
//! tables, encoder runs, link budgets, sector sweeps, throughput curves, and
//! the deterministic simulator.
//!
//! Exit codes: 0 on success, 1 for invalid input or configuration (bad
//! flags, malformed files, scenarios that fail validation), 2 for a run
//! that started and then failed (simulation runtime faults, output I/O).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dmglab_core::bf::channel::SectorChannel;
use dmglab_core::bf::sls::{run_sls, SlsConfig, SweepMode};
use dmglab_core::golay::{
    build_cef, build_control_stf, build_data_stf, compose_gu512, compose_gv512, CodeDefinition,
    GolayPair,
};
use dmglab_core::link::{capacity_bps, received_power_dbm, snr_db, LinkParams};
use dmglab_core::phy::data::encode_data;
use dmglab_core::phy::ldpc::SurrogateCode;
use dmglab_core::phy::mcs::mcs;
use dmglab_core::phy::timing::{ppdu_duration_ns, PhyTiming};
use dmglab_core::sim::engine::{preflight, run};
use dmglab_core::sim::metrics::{metrics_to_csv, trace_to_csv, MetricsRow};
use dmglab_core::sim::scenario::parse_scenario;
use dmglab_core::sim::SimError;
use dmglab_core::tput::{throughput_ampdu, throughput_normal_ack, ExchangeTiming};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dmglab", version, about = "60 GHz protocol laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complementary-sequence tools.
    #[command(subcommand)]
    Golay(GolayCmd),
    /// Rate table, encoder, and frame timing.
    #[command(subcommand)]
    Phy(PhyCmd),
    /// Link-budget calculations.
    #[command(subcommand)]
    Link(LinkCmd),
    /// Beamforming sweeps.
    #[command(subcommand)]
    Bf(BfCmd),
    /// Analytic throughput curves.
    #[command(subcommand)]
    Tput(TputCmd),
    /// Scenario validation and simulation runs.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Subcommand)]
enum GolayCmd {
    /// Emit a sequence, one signed integer per line.
    Dump(GolayDump),
}

#[derive(Args)]
struct GolayDump {
    /// Code-definition file (`delays=`/`weights=` lines); built-in when absent.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Which sequence to emit.
    #[arg(long, value_enum, default_value_t = Seq::A)]
    seq: Seq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Seq {
    A,
    B,
    Gu512,
    Gv512,
    ControlStf,
    DataStf,
    Cef,
}

#[derive(Subcommand)]
enum PhyCmd {
    /// Print the full rate table as CSV.
    Rates,
    /// Encode a payload into the on-air coded bitstream, packed octets.
    Encode(PhyEncode),
    /// Print a frame's on-air duration in nanoseconds.
    Duration(PhyDuration),
}

#[derive(Args)]
struct PhyEncode {
    #[arg(long)]
    mcs: u8,
    /// Payload length in octets (taken from the front of the input file).
    #[arg(long)]
    len: usize,
    #[arg(long, value_name = "FILE")]
    r#in: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Scrambler seed, 7 bits, non-zero.
    #[arg(long, default_value_t = 0x7F)]
    seed: u8,
}

#[derive(Args)]
struct PhyDuration {
    #[arg(long)]
    mcs: u8,
    #[arg(long)]
    len: usize,
}

#[derive(Args, Clone, Copy)]
struct LinkFlags {
    /// Transmit power, dBm.
    #[arg(long, default_value_t = 10.0)]
    pt: f64,
    /// Carrier frequency, Hz.
    #[arg(long, default_value_t = 60.48e9)]
    freq: f64,
    /// Distance, meters.
    #[arg(long, default_value_t = 10.0)]
    dist: f64,
    /// Bandwidth, Hz.
    #[arg(long, default_value_t = 2.16e9)]
    bw: f64,
    /// Receiver noise figure, dB.
    #[arg(long, default_value_t = 10.0)]
    nf: f64,
    /// Shadowing / implementation margin, dB.
    #[arg(long, default_value_t = 6.0)]
    shadow: f64,
    /// Transmit antenna gain, dBi.
    #[arg(long, default_value_t = 15.0)]
    gt: f64,
    /// Receive antenna gain, dBi.
    #[arg(long, default_value_t = 15.0)]
    gr: f64,
}

impl LinkFlags {
    fn params(&self) -> LinkParams {
        LinkParams {
            tx_power_dbm: self.pt,
            tx_gain_dbi: self.gt,
            rx_gain_dbi: self.gr,
            frequency_hz: self.freq,
            distance_m: self.dist,
            bandwidth_hz: self.bw,
            noise_figure_db: self.nf,
            loss_margin_db: self.shadow,
        }
    }
}

#[derive(Subcommand)]
enum LinkCmd {
    /// One budget line: received power, SNR, Shannon capacity.
    Capacity(LinkFlags),
    /// Capacity versus transmit power, CSV rows.
    Sweep(LinkSweep),
}

#[derive(Args)]
struct LinkSweep {
    /// Transmit-power range `start:end:step`, dBm.
    #[arg(long, value_name = "A:B:STEP")]
    pt_range: String,
    #[command(flatten)]
    link: LinkFlags,
}

#[derive(Subcommand)]
enum BfCmd {
    /// Run a sector-level sweep over a channel file.
    Sls(BfSls),
}

#[derive(Args)]
struct BfSls {
    /// Channel gain table (CSV: tx_ant, tx_sector, rx_ant, rx_sector, gain_db).
    #[arg(long, value_name = "FILE")]
    channel: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Txss)]
    mode: Mode,
    /// Sweep quality below this floor reports link failure, dB.
    #[arg(long)]
    floor: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Txss,
    Rxss,
}

#[derive(Subcommand)]
enum TputCmd {
    /// Throughput versus payload size, CSV rows.
    Curve(TputCurve),
}

#[derive(Args)]
struct TputCurve {
    #[arg(long)]
    mcs: u8,
    #[arg(long, value_enum, default_value_t = Policy::Ack)]
    policy: Policy,
    /// Payload sizes `start:end:step` in octets; default doubles 256 → 256 KiB.
    #[arg(long, value_name = "A:B:STEP")]
    sizes: Option<String>,
    /// Subframes per aggregate (ampdu policy only).
    #[arg(long, default_value_t = 8)]
    subframes: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Ack,
    Ampdu,
}

#[derive(Subcommand)]
enum SimCmd {
    /// Run a scenario and report metrics.
    Run(SimRun),
    /// Check a scenario and print every problem found.
    Validate(SimValidate),
}

#[derive(Args)]
struct SimRun {
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the event trace CSV here.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Write the metrics CSV here.
    #[arg(long, value_name = "FILE")]
    metrics: Option<PathBuf>,
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct SimValidate {
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
}

/// Invalid input maps to exit 1, a failed run to exit 2.
enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    // The dump and table commands exist to be piped; dying quietly when the
    // reader closes early beats a panic backtrace.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Golay(GolayCmd::Dump(a)) => golay_dump(&a),
        Command::Phy(PhyCmd::Rates) => phy_rates(),
        Command::Phy(PhyCmd::Encode(a)) => phy_encode(&a),
        Command::Phy(PhyCmd::Duration(a)) => phy_duration(&a),
        Command::Link(LinkCmd::Capacity(a)) => link_capacity(&a),
        Command::Link(LinkCmd::Sweep(a)) => link_sweep(&a),
        Command::Bf(BfCmd::Sls(a)) => bf_sls(&a),
        Command::Tput(TputCmd::Curve(a)) => tput_curve(&a),
        Command::Sim(SimCmd::Run(a)) => sim_run(&a),
        Command::Sim(SimCmd::Validate(a)) => sim_validate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn golay_dump(a: &GolayDump) -> Result<(), CliError> {
    let pair = match &a.file {
        Some(path) => CodeDefinition::parse(&read_input(path)?)
            .and_then(|d| d.build())
            .map_err(CliError::invalid)?,
        None => GolayPair::default_128(),
    };
    let samples: Vec<i8> = match a.seq {
        Seq::A => pair.seq_a().to_vec(),
        Seq::B => pair.seq_b().to_vec(),
        Seq::Gu512 => compose_gu512(&pair),
        Seq::Gv512 => compose_gv512(&pair),
        Seq::ControlStf => build_control_stf(&pair).samples,
        Seq::DataStf => build_data_stf(&pair).samples,
        Seq::Cef => build_cef(&pair).samples,
    };
    let mut out = String::with_capacity(samples.len() * 3);
    for s in samples {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn phy_rates() -> Result<(), CliError> {
    println!("index,modulation,rate_mbps,derived_rate_mbps");
    for index in 0..=31u8 {
        let p = mcs(index).map_err(CliError::invalid)?;
        let derived = p
            .derived_rate_bps()
            .map(|r| (r / 1e6).to_string())
            .unwrap_or_default();
        println!("{},{},{},{}", p.index, p.modulation, p.data_rate_bps / 1e6, derived);
    }
    Ok(())
}

fn phy_encode(a: &PhyEncode) -> Result<(), CliError> {
    if a.seed == 0 || a.seed > 0x7F {
        return Err(CliError::Invalid(format!(
            "seed {} out of range (1..=127)",
            a.seed
        )));
    }
    let payload = std::fs::read(&a.r#in)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", a.r#in.display())))?;
    if payload.len() < a.len {
        return Err(CliError::Invalid(format!(
            "input holds {} octets, need {}",
            payload.len(),
            a.len
        )));
    }
    let profile = mcs(a.mcs).map_err(CliError::invalid)?;
    let rate = profile
        .code_rate
        .ok_or_else(|| CliError::Invalid(format!("mcs {} has no block code", a.mcs)))?;
    let code = SurrogateCode::new(rate);
    let (plan, bits) =
        encode_data(&payload[..a.len], profile, &code, a.seed).map_err(CliError::invalid)?;
    let mut packed = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        packed[i / 8] |= b << (i % 8);
    }
    std::fs::write(&a.out, &packed)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", a.out.display())))?;
    eprintln!(
        "{} codewords, {} blocks, {} coded bits",
        plan.n_cw,
        plan.n_blk,
        bits.len()
    );
    Ok(())
}

fn phy_duration(a: &PhyDuration) -> Result<(), CliError> {
    let profile = mcs(a.mcs).map_err(CliError::invalid)?;
    let ns = ppdu_duration_ns(profile, a.len, 0, &PhyTiming::default()).map_err(CliError::invalid)?;
    println!("{ns}");
    Ok(())
}

fn budget_row(p: &LinkParams) -> Result<String, CliError> {
    let rx = received_power_dbm(p).map_err(CliError::invalid)?;
    let snr = snr_db(p).map_err(CliError::invalid)?;
    let cap = capacity_bps(p).map_err(CliError::invalid)?;
    Ok(format!("{rx:.4},{snr:.4},{:.4}", cap / 1e6))
}

fn link_capacity(a: &LinkFlags) -> Result<(), CliError> {
    println!("received_dbm,snr_db,capacity_mbps");
    println!("{}", budget_row(&a.params())?);
    Ok(())
}

/// Parses `start:end:step` with a strictly positive step.
fn parse_range(text: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(CliError::Invalid(format!(
            "range {text:?} is not start:end:step"
        )));
    };
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Invalid(format!("range {text:?}: {e}")))
    };
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if !(step > 0.0) || b < a {
        return Err(CliError::Invalid(format!(
            "range {text:?} must run forward with a positive step"
        )));
    }
    Ok((a, b, step))
}

fn link_sweep(a: &LinkSweep) -> Result<(), CliError> {
    let (start, end, step) = parse_range(&a.pt_range)?;
    println!("pt_dbm,received_dbm,snr_db,capacity_mbps");
    let mut pt = start;
    while pt <= end + 1e-9 {
        let mut p = a.link.params();
        p.tx_power_dbm = pt;
        println!("{pt:.4},{}", budget_row(&p)?);
        pt += step;
    }
    Ok(())
}

fn bf_sls(a: &BfSls) -> Result<(), CliError> {
    let channel = SectorChannel::parse_csv(&read_input(&a.channel)?).map_err(CliError::invalid)?;
    let config = SlsConfig {
        mode: match a.mode {
            Mode::Txss => SweepMode::Txss,
            Mode::Rxss => SweepMode::Rxss,
        },
        sensitivity_floor_db: a.floor,
    };
    let run = run_sls(&channel, config).map_err(CliError::runtime)?;
    let o = &run.outcome;
    println!(
        "initiator: antenna {} sector {} ({:.2} dB)",
        o.initiator_best.antenna, o.initiator_best.sector, o.initiator_quality_db
    );
    println!(
        "responder: antenna {} sector {} ({:.2} dB)",
        o.responder_best.antenna, o.responder_best.sector, o.responder_quality_db
    );
    println!(
        "frames: iss={} rss={} total={}",
        o.iss_frames, o.rss_frames, o.total_frames
    );
    Ok(())
}

fn tput_curve(a: &TputCurve) -> Result<(), CliError> {
    let profile = mcs(a.mcs).map_err(CliError::invalid)?;
    let timing = ExchangeTiming::default();
    let sizes: Vec<u32> = match &a.sizes {
        Some(spec) => {
            let (start, end, step) = parse_range(spec)?;
            if start < 1.0 || step.fract() != 0.0 {
                return Err(CliError::Invalid(format!(
                    "sizes {spec:?} must use whole positive octet counts"
                )));
            }
            let mut v = Vec::new();
            let mut s = start;
            while s <= end + 1e-9 {
                v.push(s as u32);
                s += step;
            }
            v
        }
        None => (0..11).map(|k| 256u32 << k).collect(),
    };
    println!("size_octets,throughput_mbps");
    let mut emitted = 0;
    for size in sizes {
        let tput = match a.policy {
            Policy::Ack => throughput_normal_ack(profile, size, &timing),
            Policy::Ampdu => throughput_ampdu(profile, size, a.subframes, &timing),
        };
        match tput {
            Ok(bps) => {
                println!("{size},{:.4}", bps / 1e6);
                emitted += 1;
            }
            Err(e) => eprintln!("size {size} skipped: {e}"),
        }
    }
    if emitted == 0 {
        return Err(CliError::Invalid("no feasible sizes in the sweep".into()));
    }
    Ok(())
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<dmglab_core::sim::scenario::Scenario, CliError> {
    let mut sc = parse_scenario(&read_input(path)?).map_err(CliError::invalid)?;
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    Ok(sc)
}

fn sim_run(a: &SimRun) -> Result<(), CliError> {
    let sc = load_scenario(&a.scenario, a.seed)?;
    let out = match run(&sc) {
        Ok(out) => out,
        Err(e @ SimError::Invalid(_)) => return Err(CliError::invalid(e)),
        Err(e) => return Err(CliError::runtime(e)),
    };
    if let Some(path) = &a.trace {
        std::fs::write(path, trace_to_csv(&out.trace))
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    let rows = out.metrics.rows(out.duration_ns);
    if let Some(path) = &a.metrics {
        std::fs::write(path, metrics_to_csv(&rows))
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    match a.format {
        Format::Csv => print!("{}", metrics_to_csv(&rows)),
        Format::Text => print_text_report(&rows, &out),
    }
    Ok(())
}

fn print_text_report(rows: &[MetricsRow], out: &dmglab_core::sim::engine::RunResult) {
    println!(
        "{:>7} {:>4} {:>9} {:>9} {:>8} {:>9} {:>12} {:>12} {:>12}",
        "station", "ac", "offered", "delivered", "dropped", "in-flight", "mbps", "p50-us", "p95-us"
    );
    for r in rows {
        if r.ac != "all" && r.offered == 0 {
            continue;
        }
        println!(
            "{:>7} {:>4} {:>9} {:>9} {:>8} {:>9} {:>12.3} {:>12.1} {:>12.1}",
            r.station,
            r.ac,
            r.offered,
            r.delivered,
            r.dropped,
            r.in_flight,
            r.throughput_bps as f64 / 1e6,
            r.delay_p50_ns as f64 / 1e3,
            r.delay_p95_ns as f64 / 1e3,
        );
        if r.ac == "all" && (r.bf_frames > 0 || r.awake_ppm > 0 || r.fst_transitions > 0) {
            println!(
                "{:>7} {:>4} beamforming frames {}, awake {} ppm, band transfers {}",
                "", "", r.bf_frames, r.awake_ppm, r.fst_transitions
            );
        }
    }
    println!(
        "{} events over {} ms; {} trace rows",
        out.events_processed,
        out.duration_ns / 1_000_000,
        out.trace.len()
    );
}

fn sim_validate(a: &SimValidate) -> Result<(), CliError> {
    let sc = load_scenario(&a.scenario, None)?;
    let errors = preflight(&sc);
    if errors.is_empty() {
        println!("ok");
        Ok(())
    } else {
        for e in &errors {
            println!("{e}");
        }
        Err(CliError::Invalid(format!(
            "{} problem(s) in {}",
            errors.len(),
            a.scenario.display()
        )))
    }
}
