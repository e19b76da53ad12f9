//! `icx` — command-line front end for the index-coded exchange library.
//!
//! Every subcommand reads one JSON run configuration (see the fixtures/
//! directory for examples), writes its result to `--out` or stdout, and is a
//! deterministic function of that configuration: identical invocations
//! produce byte-identical output.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use icx::bounds;
use icx::cluster::SideInformation;
use icx::config::RunConfig;
use icx::ecic::{self, ClassicalCode, EcicConfig, ErrorSpec};
use icx::exchange;
use icx::field::{Field, BINARY};
use icx::overlap_code;
use icx::sim;
use icx::tables;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "icx",
    about = "Index-coded packet exchange: coding, bounds, and dissemination simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the window-code encoder matrix and every vehicle's coded
    /// transmissions for seeded random payloads
    Encode(CommonArgs),
    /// Encode all windows, decode cluster-wide, and verify the round trip
    Decode(CommonArgs),
    /// Per-vehicle oracle certificates and transmission-count bounds (JSON)
    Bounds(CommonArgs),
    /// Run the cooperative exchange; print the transmission log as JSON lines
    Exchange(CommonArgs),
    /// Error-corrected round trip with the configured corruption pattern
    Ecic(CommonArgs),
    /// Multi-round dissemination simulation; rounds per trial as CSV
    Simulate(SimulateArgs),
    /// The benchmark scenario table (bounds and transmission counts)
    Tables(TablesArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured trial count
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also write the mean per-round completion trajectory as CSV
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the exchange algorithm's fallback draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_parser = ["text", "csv"], default_value = "text")]
    format: String,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Encode(args) => {
            let (cfg, out) = load(&args)?;
            write_output(out.as_deref(), &run_encode(&cfg)?)
        }
        Command::Decode(args) => {
            let (cfg, out) = load(&args)?;
            write_output(out.as_deref(), &run_decode(&cfg)?)
        }
        Command::Bounds(args) => {
            let (cfg, out) = load(&args)?;
            write_output(out.as_deref(), &run_bounds(&cfg)?)
        }
        Command::Exchange(args) => {
            let (cfg, out) = load(&args)?;
            write_output(out.as_deref(), &run_exchange(&cfg)?)
        }
        Command::Ecic(args) => {
            let (cfg, out) = load(&args)?;
            write_output(out.as_deref(), &run_ecic(&cfg)?)
        }
        Command::Simulate(args) => {
            let (cfg, out) = load(&args.common)?;
            let (runs, trajectory) = run_simulate(&cfg)?;
            write_output(out.as_deref(), &runs)?;
            if let Some(path) = &args.trajectory {
                write_output(Some(path), &trajectory)?;
            }
            Ok(())
        }
        Command::Tables(args) => {
            let report = tables::build_report(args.seed)?;
            let rendered = match args.format.as_str() {
                "csv" => tables::render_csv(&report),
                _ => tables::render_text(&report),
            };
            write_output(args.out.as_deref(), &rendered)
        }
    }
}

fn load(args: &CommonArgs) -> Result<(RunConfig, Option<PathBuf>)> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut cfg = RunConfig::from_json(&text)
        .with_context(|| format!("cannot parse config {}", args.config.display()))?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.trials.is_some() {
        cfg.trials = args.trials;
    }
    Ok((cfg, args.out.clone()))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn random_packets(n: usize, payload_len: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..payload_len).map(|_| rng.gen()).collect())
        .collect()
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").expect("writing to a string");
    }
    s
}

#[derive(Serialize)]
struct TransmissionReport {
    sender: usize,
    coefficients: Vec<u8>,
    payload_hex: String,
}

fn run_encode(cfg: &RunConfig) -> Result<String> {
    let cluster = cfg.cluster()?;
    let packets = random_packets(cluster.total_packets(), cfg.payload_len(), cfg.seed());
    let windows = overlap_code::split_windows(&cluster, &packets);
    let encoder = overlap_code::encoder_matrix(cluster.capability(), cluster.overlap())?;
    let mut transmissions = Vec::new();
    for (m, window) in windows.iter().enumerate() {
        for t in overlap_code::encode_window(&cluster, m, window)? {
            transmissions.push(TransmissionReport {
                sender: t.sender,
                coefficients: t.coefficients,
                payload_hex: hex(&t.payload),
            });
        }
    }
    #[derive(Serialize)]
    struct EncodeReport {
        vehicles: usize,
        capability: usize,
        overlap: usize,
        packets: usize,
        payload_len: usize,
        encoder_matrix: Vec<String>,
        transmissions: Vec<TransmissionReport>,
    }
    let rows = (0..encoder.rows())
        .map(|r| {
            encoder
                .row(r)
                .iter()
                .map(|&v| char::from(b'0' + v))
                .collect()
        })
        .collect();
    render_json(&EncodeReport {
        vehicles: cluster.vehicles(),
        capability: cluster.capability(),
        overlap: cluster.overlap(),
        packets: cluster.total_packets(),
        payload_len: cfg.payload_len(),
        encoder_matrix: rows,
        transmissions,
    })
}

fn run_decode(cfg: &RunConfig) -> Result<String> {
    let cluster = cfg.cluster()?;
    let packets = random_packets(cluster.total_packets(), cfg.payload_len(), cfg.seed());
    let windows = overlap_code::split_windows(&cluster, &packets);
    let transmissions: Vec<_> = (0..cluster.vehicles())
        .map(|m| overlap_code::encode_window(&cluster, m, &windows[m]))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let recovered = overlap_code::decode_cluster(&cluster, &windows, &transmissions)?;
    let exact = recovered.iter().all(|r| *r == packets);
    if !exact {
        bail!("cluster decode disagreed with the original packets");
    }
    #[derive(Serialize)]
    struct DecodeReport {
        vehicles: usize,
        packets: usize,
        payload_len: usize,
        transmissions: usize,
        recovered: bool,
    }
    render_json(&DecodeReport {
        vehicles: cluster.vehicles(),
        packets: cluster.total_packets(),
        payload_len: cfg.payload_len(),
        transmissions: transmissions.len(),
        recovered: exact,
    })
}

fn run_bounds(cfg: &RunConfig) -> Result<String> {
    let side = cfg.side_information()?;
    #[derive(Serialize)]
    struct VehicleBounds {
        vehicle: usize,
        innovative_packets: Vec<usize>,
        messages: usize,
        alpha: usize,
        min_rank: usize,
    }
    #[derive(Serialize)]
    struct BoundsReport {
        packets: usize,
        vehicles: usize,
        transmission_lower_bound: Option<usize>,
        overlap_lower_bound: Option<usize>,
        exchange_bounds: (usize, usize),
        per_vehicle: Vec<VehicleBounds>,
    }
    let innovative = bounds::innovative_sets(&side);
    let mut per_vehicle = Vec::new();
    for (m, innovative_packets) in innovative.into_iter().enumerate() {
        let sub = bounds::transmitter_subproblem(&side, m)?;
        per_vehicle.push(VehicleBounds {
            vehicle: m,
            innovative_packets,
            messages: sub.problem.messages(),
            alpha: bounds::generalized_independence_number(&sub.problem)?,
            min_rank: bounds::min_rank(&sub.problem)?,
        });
    }
    render_json(&BoundsReport {
        packets: side.packet_count(),
        vehicles: side.vehicle_count(),
        transmission_lower_bound: bounds::transmission_lower_bound(&side).ok(),
        overlap_lower_bound: cfg
            .cluster()
            .ok()
            .filter(|_| cfg.known_sets.is_none())
            .map(|c| bounds::overlap_lower_bound(&c)),
        exchange_bounds: bounds::exchange_bounds(&side),
        per_vehicle,
    })
}

fn run_exchange(cfg: &RunConfig) -> Result<String> {
    let side = cfg.side_information()?;
    let field = Field::new(cfg.field_order() as u64)?;
    let log = exchange::run_information_exchange(&side, field, cfg.seed())?;
    if !exchange::verify_universal_recovery(&log, &side) {
        bail!("exchange log does not reach universal recovery");
    }
    let mut out = String::new();
    for t in &log {
        out.push_str(&serde_json::to_string(t).expect("log entry serializes"));
        out.push('\n');
    }
    Ok(out)
}

fn run_ecic(cfg: &RunConfig) -> Result<String> {
    let cluster = cfg.cluster()?;
    let delta = cfg.delta()?;
    let outer = match &cfg.generator_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read generator {}", path.display()))?;
            ClassicalCode::new(ClassicalCode::parse_generator(&text, BINARY)?)?
        }
        None => ClassicalCode::for_parameters(cluster.stride(), delta, BINARY)?,
    };
    let scheme = EcicConfig::new(cluster, delta, outer)?;
    let packets = random_packets(cluster.total_packets(), cfg.payload_len(), cfg.seed());
    let windows = overlap_code::split_windows(&cluster, &packets);
    let mut blocks: Vec<Vec<icx::CodedTransmission>> = (0..cluster.vehicles())
        .map(|m| ecic::ecic_encode(&scheme, m, &windows[m]))
        .collect::<Result<_, _>>()?;
    let mut injected = 0usize;
    if let Some(errors) = &cfg.errors {
        // Group the pattern by victim vehicle; each block gets its own
        // delta-bounded injection.
        for (vehicle, block) in blocks.iter_mut().enumerate() {
            let pattern: Vec<ErrorSpec> = errors
                .iter()
                .filter(|e| e.vehicle == vehicle)
                .map(|e| ErrorSpec {
                    transmission: e.transmission,
                    symbol: e.symbol,
                    value: e.value,
                })
                .collect();
            if pattern.is_empty() {
                continue;
            }
            injected += pattern.len();
            *block = ecic::inject_errors(&scheme, block, &pattern)?;
        }
    }
    let recovered = ecic::decode_cluster_corrected(&scheme, &windows, &blocks)?;
    let exact = recovered.iter().all(|r| *r == packets);
    if !exact {
        bail!("error-corrected cluster decode disagreed with the original packets");
    }
    let sub = bounds::transmitter_subproblem(&SideInformation::equal_overlap(&cluster), 0)?;
    let length_bounds = bounds::ecic_length_bounds(&sub.problem, delta, BINARY)?;
    #[derive(Serialize)]
    struct EcicReport {
        vehicles: usize,
        packets: usize,
        delta: usize,
        outer_length: usize,
        outer_dimension: usize,
        outer_distance: usize,
        per_vehicle_transmissions: usize,
        total_transmissions: usize,
        length_bounds: (usize, usize),
        certified_optimal: bool,
        errors_injected: usize,
        recovered: bool,
    }
    render_json(&EcicReport {
        vehicles: cluster.vehicles(),
        packets: cluster.total_packets(),
        delta,
        outer_length: scheme.outer().length(),
        outer_dimension: scheme.outer().dimension(),
        outer_distance: scheme.outer().distance(),
        per_vehicle_transmissions: scheme.block_length(),
        total_transmissions: scheme.block_length() * cluster.vehicles(),
        length_bounds,
        certified_optimal: length_bounds.0 == length_bounds.1
            && length_bounds.0 == scheme.block_length(),
        errors_injected: injected,
        recovered: exact,
    })
}

fn run_simulate(cfg: &RunConfig) -> Result<(String, String)> {
    let scenario = cfg.scenario()?;
    let result = sim::simulate(&scenario)?;
    let scheme = scenario.v2v_scheme.name();
    let mut runs = String::from("scheme,trial,rounds\n");
    for (trial, rounds) in result.rounds.iter().enumerate() {
        writeln!(runs, "{scheme},{trial},{rounds}").expect("writing to a string");
    }
    let mut trajectory = String::from("round,vehicle,fraction_complete\n");
    for (round, row) in result.trajectory.iter().enumerate() {
        for (vehicle, fraction) in row.iter().enumerate() {
            writeln!(trajectory, "{},{},{:.6}", round + 1, vehicle, fraction)
                .expect("writing to a string");
        }
    }
    Ok((runs, trajectory))
}

fn render_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("serializing report")?;
    s.push('\n');
    Ok(s)
}
