//! Multi-round dissemination simulator: broadcast rounds followed by
//! vehicle-to-vehicle exchange, repeated until every vehicle holds the whole
//! file.
//!
//! Each round the roadside unit emits up to `n` transmissions (random
//! packets, feedback-driven packets, or random linear combinations of the
//! whole file); every vehicle captures a consecutive window of them, then the
//! cluster runs one exchange phase under the configured scheme, truncated to
//! the transmission budget. Knowledge is tracked as a plain packet set for
//! uncoded broadcasts and as a coefficient-vector rank for network-coded
//! ones, where every coded exchange transmission keeps its value even when
//! the phase is cut short.
//!
//! Trials are deterministic: trial `t` is driven by a ChaCha stream seeded
//! from `(master_seed, t)`, so runs are reproducible and trials can execute
//! in any order or in parallel without changing the result.

use crate::cluster::{ClusterConfig, SideInformation};
use crate::exchange::{self, ExchangeError};
use crate::field::{Field, FieldError, GF256};
use crate::linalg::{EchelonBasis, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("file_packets must be at least 1")]
    EmptyFile,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("disjoint capture needs K*l = {needed} packets per round, but n = {packets}")]
    DisjointCaptureDoesNotFit { needed: usize, packets: usize },
    #[error("capture offsets must list one offset per vehicle ({vehicles}), got {got}")]
    WrongOffsetCount { vehicles: usize, got: usize },
    #[error("capture windows must cover all {packets} round packets for the {scheme} scheme")]
    CaptureDoesNotCover {
        packets: usize,
        scheme: &'static str,
    },
    #[error("the window-code scheme requires the stride capture layout")]
    WindowCodeNeedsStride,
    #[error("stride capture implies {expected} packets per round, but round_packets = {got}")]
    StridePacketMismatch { expected: usize, got: usize },
    #[error("fixed transmission {index} has {got} coefficients, expected {expected}")]
    FixedCoefficientLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("fixed transmission {index} names sender {sender}, outside the cluster of {vehicles}")]
    FixedSenderOutOfRange {
        index: usize,
        sender: usize,
        vehicles: usize,
    },
    #[error("trial {trial} did not complete the file within {cap} rounds")]
    NonTermination { trial: usize, cap: usize },
    #[error("exchange failed in a V2V phase: {0}")]
    Exchange(#[from] ExchangeError),
}

/// How the roadside unit fills its `n` transmissions each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsuScheme {
    /// Uniformly chosen distinct file packets, oblivious to history.
    Random,
    /// The lowest-indexed packets no vehicle has received yet.
    Feedback,
    /// Random linear combinations of the whole file over the configured field.
    NetworkCoding,
}

/// One pre-arranged coded transmission over the round's packet index space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedTransmission {
    pub sender: usize,
    pub coefficients: Vec<u8>,
}

/// The vehicle-to-vehicle policy for one exchange phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum V2vScheme {
    /// No exchange at all.
    None,
    /// Round-robin forwarding of held round packets until all hold all.
    Uncoded,
    /// The greedy cooperative exchange of [`crate::exchange`].
    Algorithm1,
    /// The pairwise XOR window code (requires the stride capture layout).
    MatrixL,
    /// A fixed list of coded transmissions replayed every full round.
    Fixed {
        transmissions: Vec<FixedTransmission>,
    },
}

impl V2vScheme {
    pub fn name(&self) -> &'static str {
        match self {
            V2vScheme::None => "none",
            V2vScheme::Uncoded => "uncoded",
            V2vScheme::Algorithm1 => "algorithm1",
            V2vScheme::MatrixL => "matrix_l",
            V2vScheme::Fixed { .. } => "fixed",
        }
    }
}

/// Which round transmissions each vehicle captures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptureMode {
    /// Staggered windows at offsets `m * (l - i)`: the equal-overlap layout.
    Stride,
    /// Disjoint windows at offsets `m * l` (requires `n >= K * l`).
    Disjoint,
    /// A fresh uniformly random offset per vehicle per round.
    Random,
    /// Explicit per-vehicle offsets.
    Offsets(Vec<usize>),
}

/// Everything a simulation run depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    /// File size in packets.
    pub file_packets: usize,
    pub cluster: ClusterConfig,
    /// Transmissions per broadcast round; defaults to the cluster layout's
    /// packet count and must match it under stride capture.
    pub round_packets: Option<usize>,
    pub rsu_scheme: RsuScheme,
    pub v2v_scheme: V2vScheme,
    pub capture: CaptureMode,
    /// Maximum transmissions per exchange phase; `None` means unlimited
    /// (perfect exchange).
    pub v2v_budget: Option<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Field order for network-coded broadcasts and the exchange algorithm.
    pub field_order: u16,
    /// Rounds before a trial is declared non-terminating; defaults to
    /// `10 * file_packets / n`, at least 10.
    pub round_cap: Option<usize>,
}

impl ScenarioConfig {
    pub fn packets_per_round(&self) -> usize {
        self.round_packets
            .unwrap_or_else(|| self.cluster.total_packets())
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.file_packets == 0 {
            return Err(SimError::EmptyFile);
        }
        Field::new(self.field_order as u64)?;
        let n = self.packets_per_round();
        let k = self.cluster.vehicles();
        let l = self.cluster.capability();
        if matches!(self.capture, CaptureMode::Stride) && n != self.cluster.total_packets() {
            return Err(SimError::StridePacketMismatch {
                expected: self.cluster.total_packets(),
                got: n,
            });
        }
        if matches!(self.capture, CaptureMode::Disjoint) && k * l > n {
            return Err(SimError::DisjointCaptureDoesNotFit {
                needed: k * l,
                packets: n,
            });
        }
        if let CaptureMode::Offsets(offsets) = &self.capture {
            if offsets.len() != k {
                return Err(SimError::WrongOffsetCount {
                    vehicles: k,
                    got: offsets.len(),
                });
            }
        }
        if matches!(self.v2v_scheme, V2vScheme::MatrixL)
            && !matches!(self.capture, CaptureMode::Stride)
        {
            return Err(SimError::WindowCodeNeedsStride);
        }
        // Coded schemes need every round packet captured by someone.
        if matches!(
            self.v2v_scheme,
            V2vScheme::Algorithm1 | V2vScheme::Fixed { .. }
        ) {
            let covered = match &self.capture {
                CaptureMode::Stride => true,
                CaptureMode::Disjoint => k * l == n,
                CaptureMode::Random => false,
                CaptureMode::Offsets(offsets) => {
                    let mut seen = vec![false; n];
                    for &off in offsets {
                        for slot in seen.iter_mut().take((off + l).min(n)).skip(off) {
                            *slot = true;
                        }
                    }
                    seen.iter().all(|&s| s)
                }
            };
            if !covered {
                return Err(SimError::CaptureDoesNotCover {
                    packets: n,
                    scheme: self.v2v_scheme.name(),
                });
            }
        }
        if let V2vScheme::Fixed { transmissions } = &self.v2v_scheme {
            for (index, t) in transmissions.iter().enumerate() {
                if t.coefficients.len() != n {
                    return Err(SimError::FixedCoefficientLength {
                        index,
                        expected: n,
                        got: t.coefficients.len(),
                    });
                }
                if t.sender >= k {
                    return Err(SimError::FixedSenderOutOfRange {
                        index,
                        sender: t.sender,
                        vehicles: k,
                    });
                }
            }
        }
        Ok(())
    }

    fn round_cap(&self) -> usize {
        self.round_cap.unwrap_or_else(|| {
            (10 * self.file_packets)
                .div_ceil(self.packets_per_round())
                .max(10)
        })
    }

    /// Coefficient fields stay inside {0,1} until the exchange algorithm
    /// falls back to GF(2^8), so binary scenarios track rank over GF(2^8)
    /// from the start; the arithmetic agrees on 0/1 data.
    fn lift_field(&self) -> Field {
        if self.field_order == 2 {
            GF256
        } else {
            Field::new(self.field_order as u64).expect("validated")
        }
    }
}

/// Aggregated results over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    /// Rounds to complete the file, per trial.
    pub rounds: Vec<usize>,
    pub mean_rounds: f64,
    /// Total V2V transmissions used, per trial.
    pub v2v_transmissions: Vec<usize>,
    /// Mean fraction of the file held after each round, per vehicle;
    /// completed trials contribute 1.0 to later rounds.
    pub trajectory: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
struct TrialOutcome {
    rounds: usize,
    v2v_transmissions: usize,
    trajectory: Vec<Vec<f64>>,
}

/// What one vehicle knows about the file.
enum Knowledge {
    Packets { held: Vec<bool>, count: usize },
    Rank(EchelonBasis),
}

impl Knowledge {
    fn add_packet(&mut self, id: usize) {
        match self {
            Knowledge::Packets { held, count } => {
                if !held[id] {
                    held[id] = true;
                    *count += 1;
                }
            }
            Knowledge::Rank(basis) => {
                let mut unit = vec![0u8; basis.width()];
                unit[id] = 1;
                basis.insert(&unit);
            }
        }
    }

    fn insert_vector(&mut self, v: &[u8]) {
        match self {
            Knowledge::Packets { .. } => {
                unreachable!("coded file vectors only under rank accounting")
            }
            Knowledge::Rank(basis) => {
                basis.insert(v);
            }
        }
    }

    fn fraction(&self, file: usize) -> f64 {
        match self {
            Knowledge::Packets { count, .. } => *count as f64 / file as f64,
            Knowledge::Rank(basis) => basis.dim() as f64 / file as f64,
        }
    }

    fn is_done(&self, file: usize) -> bool {
        match self {
            Knowledge::Packets { count, .. } => *count == file,
            Knowledge::Rank(basis) => basis.dim() == file,
        }
    }

    fn holds_packet(&self, id: usize) -> bool {
        match self {
            Knowledge::Packets { held, .. } => held[id],
            Knowledge::Rank(_) => false,
        }
    }
}

/// One transmission of this round's exchange phase, over the round's packet
/// index space.
struct RoundTransmission {
    coefficients: Vec<u8>,
}

/// One broadcast emitted by the roadside unit this round.
struct RoundObject {
    /// Coefficient vector over the file index space.
    file_coeffs: Vec<u8>,
    /// The plain packet this object carries, for uncoded broadcasts.
    packet: Option<usize>,
}

fn derive_trial_seed(master: u64, trial: u64) -> u64 {
    // splitmix64 finalizer over the pair; trials are order-independent.
    let mut z = master ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs all trials, in parallel when the `parallel` feature is enabled.
pub fn simulate(cfg: &ScenarioConfig) -> Result<SimulationResult, SimError> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<TrialOutcome, SimError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<TrialOutcome, SimError>> =
        (0..cfg.trials).map(|t| run_trial(cfg, t)).collect();
    aggregate(outcomes)
}

/// Sequential reference path with identical results; kept public so the
/// benchmarks can compare it against the parallel one.
pub fn simulate_serial(cfg: &ScenarioConfig) -> Result<SimulationResult, SimError> {
    cfg.validate()?;
    let outcomes: Vec<Result<TrialOutcome, SimError>> =
        (0..cfg.trials).map(|t| run_trial(cfg, t)).collect();
    aggregate(outcomes)
}

fn aggregate(outcomes: Vec<Result<TrialOutcome, SimError>>) -> Result<SimulationResult, SimError> {
    let mut trials = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        trials.push(outcome?);
    }
    let rounds: Vec<usize> = trials.iter().map(|t| t.rounds).collect();
    let v2v_transmissions: Vec<usize> = trials.iter().map(|t| t.v2v_transmissions).collect();
    let mean_rounds = rounds.iter().sum::<usize>() as f64 / rounds.len() as f64;
    let max_rounds = rounds.iter().copied().max().unwrap_or(0);
    let vehicles = trials
        .first()
        .and_then(|t| t.trajectory.first())
        .map_or(0, Vec::len);
    let mut trajectory = vec![vec![0.0f64; vehicles]; max_rounds];
    for trial in &trials {
        for (round, row) in trajectory.iter_mut().enumerate() {
            for (v, slot) in row.iter_mut().enumerate() {
                *slot += trial
                    .trajectory
                    .get(round)
                    .map_or(1.0, |fractions| fractions[v]);
            }
        }
    }
    let count = trials.len() as f64;
    for row in &mut trajectory {
        for slot in row.iter_mut() {
            *slot /= count;
        }
    }
    Ok(SimulationResult {
        rounds,
        mean_rounds,
        v2v_transmissions,
        trajectory,
    })
}

fn run_trial(cfg: &ScenarioConfig, trial: usize) -> Result<TrialOutcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(cfg.master_seed, trial as u64));
    let file = cfg.file_packets;
    let k = cfg.cluster.vehicles();
    let lift = cfg.lift_field();
    let mut knowledge: Vec<Knowledge> = (0..k)
        .map(|_| match cfg.rsu_scheme {
            RsuScheme::NetworkCoding => Knowledge::Rank(EchelonBasis::new(lift, file)),
            _ => Knowledge::Packets {
                held: vec![false; file],
                count: 0,
            },
        })
        .collect();
    let cap = cfg.round_cap();
    let budget = cfg.v2v_budget.unwrap_or(usize::MAX);
    let mut trajectory = Vec::new();
    let mut v2v_total = 0usize;

    for _round in 0..cap {
        let objects = rsu_broadcast(cfg, &knowledge, &mut rng);
        let r = objects.len();

        // Capture phase: holder bit m set when vehicle m can forward object.
        let mut holders = vec![0u64; r];
        for (m, vehicle) in knowledge.iter_mut().enumerate() {
            let offset = capture_offset(cfg, m, r, &mut rng);
            for pos in offset..(offset + cfg.cluster.capability()).min(r) {
                holders[pos] |= 1 << m;
                match &objects[pos].packet {
                    Some(id) => vehicle.add_packet(*id),
                    None => vehicle.insert_vector(&objects[pos].file_coeffs),
                }
            }
        }

        v2v_total += v2v_phase(
            cfg,
            &objects,
            &mut holders,
            &mut knowledge,
            budget,
            &mut rng,
        )?;

        trajectory.push(knowledge.iter().map(|kn| kn.fraction(file)).collect());
        if knowledge.iter().all(|kn| kn.is_done(file)) {
            return Ok(TrialOutcome {
                rounds: trajectory.len(),
                v2v_transmissions: v2v_total,
                trajectory,
            });
        }
    }
    Err(SimError::NonTermination { trial, cap })
}

fn rsu_broadcast(
    cfg: &ScenarioConfig,
    knowledge: &[Knowledge],
    rng: &mut ChaCha8Rng,
) -> Vec<RoundObject> {
    let n = cfg.packets_per_round();
    let file = cfg.file_packets;
    let unit = |id: usize| {
        let mut v = vec![0u8; file];
        v[id] = 1;
        RoundObject {
            file_coeffs: v,
            packet: Some(id),
        }
    };
    match cfg.rsu_scheme {
        RsuScheme::Random => rand::seq::index::sample(rng, file, n.min(file))
            .into_iter()
            .map(unit)
            .collect(),
        RsuScheme::Feedback => (0..file)
            .filter(|&p| !knowledge.iter().any(|kn| kn.holds_packet(p)))
            .take(n)
            .map(unit)
            .collect(),
        RsuScheme::NetworkCoding => {
            let order = cfg.field_order;
            (0..n)
                .map(|_| loop {
                    let coeffs: Vec<u8> =
                        (0..file).map(|_| rng.gen_range(0..order) as u8).collect();
                    if coeffs.iter().any(|&c| c != 0) {
                        break RoundObject {
                            file_coeffs: coeffs,
                            packet: None,
                        };
                    }
                })
                .collect()
        }
    }
}

fn capture_offset(
    cfg: &ScenarioConfig,
    vehicle: usize,
    round_len: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    match &cfg.capture {
        CaptureMode::Stride => vehicle * cfg.cluster.stride(),
        CaptureMode::Disjoint => vehicle * cfg.cluster.capability(),
        CaptureMode::Random => {
            let max = round_len.saturating_sub(cfg.cluster.capability());
            rng.gen_range(0..=max)
        }
        CaptureMode::Offsets(offsets) => offsets[vehicle],
    }
}

/// Runs one exchange phase and returns the number of transmissions used.
fn v2v_phase(
    cfg: &ScenarioConfig,
    objects: &[RoundObject],
    holders: &mut [u64],
    knowledge: &mut [Knowledge],
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<usize, SimError> {
    let r = objects.len();
    let n = cfg.packets_per_round();
    let k = cfg.cluster.vehicles();
    let lift = cfg.lift_field();
    // Coded equations received this round, per vehicle (packet-set accounting
    // resolves them at the end of the phase).
    let mut equations: Vec<Vec<Vec<u8>>> = vec![Vec::new(); k];

    let absorb =
        |tx: &RoundTransmission, knowledge: &mut [Knowledge], equations: &mut Vec<Vec<Vec<u8>>>| {
            for m in 0..k {
                match &mut knowledge[m] {
                    Knowledge::Rank(basis) => {
                        let mut lifted = vec![0u8; cfg.file_packets];
                        for (pos, &c) in tx.coefficients.iter().enumerate() {
                            crate::linalg::payload_addmul(
                                lift,
                                &mut lifted,
                                &objects[pos].file_coeffs,
                                c,
                            );
                        }
                        basis.insert(&lifted);
                    }
                    Knowledge::Packets { .. } => equations[m].push(tx.coefficients.clone()),
                }
            }
        };

    let mut used = 0usize;

    // The window code and fixed lists are defined over full rounds; short
    // rounds (a feedback broadcast draining the file) fall back to plain
    // forwarding, as does a zero-stride layout where nothing can be paired.
    let effective = match &cfg.v2v_scheme {
        V2vScheme::MatrixL if r < n || cfg.cluster.overlap() == 0 => V2vScheme::Uncoded,
        V2vScheme::Fixed { .. } if r < n => V2vScheme::Uncoded,
        other => other.clone(),
    };

    match effective {
        V2vScheme::None => {}
        V2vScheme::Uncoded => {
            let all = (1u64 << k) - 1;
            let mut progressed = true;
            'phase: while progressed {
                progressed = false;
                for v in 0..k {
                    if used >= budget {
                        break 'phase;
                    }
                    let Some(pos) =
                        (0..r).find(|&o| holders[o] & (1 << v) != 0 && holders[o] != all)
                    else {
                        continue;
                    };
                    holders[pos] = all;
                    let mut coefficients = vec![0u8; r];
                    coefficients[pos] = 1;
                    absorb(
                        &RoundTransmission { coefficients },
                        knowledge,
                        &mut equations,
                    );
                    used += 1;
                    progressed = true;
                }
            }
        }
        V2vScheme::MatrixL => {
            let stride = cfg.cluster.stride();
            let overlap = cfg.cluster.overlap();
            if overlap < cfg.cluster.capability() {
                'emit: for m in 0..k {
                    let base = m * stride;
                    for row in 0..stride {
                        if used >= budget {
                            break 'emit;
                        }
                        let mut coefficients = vec![0u8; r];
                        coefficients[base + row] = 1;
                        coefficients[base + row + overlap] = 1;
                        absorb(
                            &RoundTransmission { coefficients },
                            knowledge,
                            &mut equations,
                        );
                        used += 1;
                    }
                }
            }
            // overlap == capability: every window is identical, nothing to send.
        }
        V2vScheme::Fixed { transmissions } => {
            for t in transmissions.iter().take(budget) {
                absorb(
                    &RoundTransmission {
                        coefficients: t.coefficients.clone(),
                    },
                    knowledge,
                    &mut equations,
                );
                used += 1;
            }
        }
        V2vScheme::Algorithm1 => {
            let sets: Vec<Vec<usize>> = (0..k)
                .map(|m| (0..r).filter(|&o| holders[o] & (1 << m) != 0).collect())
                .collect();
            let side =
                SideInformation::from_known_sets(r, sets).expect("stride capture covers the round");
            let field = Field::new(cfg.field_order as u64)?;
            let log = exchange::run_information_exchange(&side, field, rng.gen())?;
            for t in log.iter().take(budget) {
                absorb(
                    &RoundTransmission {
                        coefficients: t.coefficients.clone(),
                    },
                    knowledge,
                    &mut equations,
                );
                used += 1;
            }
        }
    }

    // Packet-set accounting: solve this round's system and bank every packet
    // it pins down.
    for m in 0..k {
        if !matches!(knowledge[m], Knowledge::Packets { .. }) {
            continue;
        }
        if equations[m].is_empty() {
            continue;
        }
        let mut rows: Vec<Vec<u8>> = (0..r)
            .filter(|&o| holders[o] & (1 << m) != 0)
            .map(|o| {
                let mut row = vec![0u8; r];
                row[o] = 1;
                row
            })
            .collect();
        rows.append(&mut equations[m]);
        let matrix = Matrix::from_rows(lift, &rows).expect("coefficients fit the field");
        let (reduced, rank) = matrix.rref_with_rank();
        for row in 0..rank {
            let mut nonzero = (0..r).filter(|&c| reduced.get(row, c) != 0);
            if let (Some(pos), None) = (nonzero.next(), nonzero.next()) {
                if let Some(id) = objects[pos].packet {
                    knowledge[m].add_packet(id);
                }
            }
        }
    }
    Ok(used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            file_packets: 60,
            cluster: ClusterConfig::new(5, 2, 1).unwrap(),
            round_packets: None,
            rsu_scheme: RsuScheme::NetworkCoding,
            v2v_scheme: V2vScheme::MatrixL,
            capture: CaptureMode::Stride,
            v2v_budget: None,
            trials: 4,
            master_seed: 99,
            field_order: 2,
            round_cap: None,
        }
    }

    #[test]
    fn feedback_first_round_broadcasts_the_lowest_packets() {
        let cfg = ScenarioConfig {
            rsu_scheme: RsuScheme::Feedback,
            ..base_config()
        };
        let knowledge: Vec<Knowledge> = (0..5)
            .map(|_| Knowledge::Packets {
                held: vec![false; 60],
                count: 0,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let objects = rsu_broadcast(&cfg, &knowledge, &mut rng);
        let ids: Vec<usize> = objects.iter().map(|o| o.packet.unwrap()).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn explicit_offsets_reproduce_the_uneven_capture_layout() {
        // K=4, l=4, n=8 with offsets 0/2/3/4: windows {0..3}, {2..5},
        // {3..6}, {4..7}.
        let cfg = ScenarioConfig {
            file_packets: 100,
            cluster: ClusterConfig::new(4, 4, 0).unwrap(),
            round_packets: Some(8),
            rsu_scheme: RsuScheme::NetworkCoding,
            v2v_scheme: V2vScheme::None,
            capture: CaptureMode::Offsets(vec![0, 2, 3, 4]),
            v2v_budget: None,
            trials: 1,
            master_seed: 0,
            field_order: 2,
            round_cap: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let windows: Vec<Vec<usize>> = (0..4)
            .map(|m| {
                let off = capture_offset(&cfg, m, 8, &mut rng);
                (off..(off + 4).min(8)).collect()
            })
            .collect();
        assert_eq!(windows[0], vec![0, 1, 2, 3]);
        assert_eq!(windows[1], vec![2, 3, 4, 5]);
        assert_eq!(windows[2], vec![3, 4, 5, 6]);
        assert_eq!(windows[3], vec![4, 5, 6, 7]);
    }

    #[test]
    fn network_coded_rank_census_on_a_tiny_file() {
        // With q=2 and a 4-packet file, 4 random combos are full rank with
        // probability ~0.3; measured statistics must match enumeration.
        let file = 4usize;
        let mut full = 0usize;
        let trials = 2000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..trials {
            let mut basis = EchelonBasis::new(GF256, file);
            for _ in 0..4 {
                let v: Vec<u8> = loop {
                    let v: Vec<u8> = (0..file).map(|_| rng.gen_range(0..2u8)).collect();
                    if v.iter().any(|&b| b != 0) {
                        break v;
                    }
                };
                basis.insert(&v);
            }
            if basis.is_full() {
                full += 1;
            }
        }
        // Exact probability: prod_{i<4} (1 - 2^(i-4)) over nonzero draws =
        // (14/15)(12/15)(8/15) = 0.398; allow generous slack.
        let observed = full as f64 / trials as f64;
        assert!((observed - 0.398).abs() < 0.05, "observed {observed}");
    }

    #[test]
    fn perfect_budget_completes_each_round_for_every_vehicle() {
        let cfg = ScenarioConfig {
            trials: 2,
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        // n=6 fresh combos per round over a 60-packet file: at least
        // ceil(60/6) rounds, and every trial terminates.
        assert!(result.rounds.iter().all(|&r| r >= 10));
    }

    #[test]
    fn zero_budget_disables_exchange() {
        let a = simulate(&ScenarioConfig {
            v2v_budget: Some(0),
            v2v_scheme: V2vScheme::MatrixL,
            trials: 2,
            ..base_config()
        })
        .unwrap();
        let b = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::None,
            trials: 2,
            ..base_config()
        })
        .unwrap();
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.v2v_transmissions, vec![0, 0]);
    }

    #[test]
    fn budget_sweep_never_slows_completion() {
        let mut previous: Option<Vec<usize>> = None;
        for budget in 0..=5usize {
            let result = simulate(&ScenarioConfig {
                v2v_budget: Some(budget),
                trials: 6,
                ..base_config()
            })
            .unwrap();
            if let Some(prev) = &previous {
                for (slow, fast) in prev.iter().zip(&result.rounds) {
                    assert!(fast <= slow, "budget {budget}: {fast} > {slow}");
                }
            }
            previous = Some(result.rounds);
        }
    }

    #[test]
    fn feedback_with_perfect_exchange_takes_exactly_file_over_n_rounds() {
        let cfg = ScenarioConfig {
            rsu_scheme: RsuScheme::Feedback,
            trials: 3,
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        assert!(result.rounds.iter().all(|&r| r == 10)); // ceil(60 / 6)
        let cfg = ScenarioConfig {
            file_packets: 100,
            rsu_scheme: RsuScheme::Feedback,
            trials: 2,
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        assert!(result.rounds.iter().all(|&r| r == 17)); // ceil(100 / 6)
    }

    #[test]
    fn simulation_is_deterministic_and_parallel_agnostic() {
        let cfg = ScenarioConfig {
            trials: 5,
            v2v_budget: Some(3),
            ..base_config()
        };
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_serial(&cfg).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn knowledge_fraction_never_decreases() {
        let cfg = ScenarioConfig {
            trials: 2,
            v2v_budget: Some(2),
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        for v in 0..5 {
            let series: Vec<f64> = result.trajectory.iter().map(|row| row[v]).collect();
            for pair in series.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12);
            }
        }
    }

    #[test]
    fn one_broadcast_round_covering_the_file_completes_immediately() {
        // n = 8 = file: a single round with a perfect exchange finishes.
        let cfg = ScenarioConfig {
            file_packets: 8,
            cluster: ClusterConfig::new(2, 5, 2).unwrap(),
            round_packets: None,
            rsu_scheme: RsuScheme::Feedback,
            v2v_scheme: V2vScheme::MatrixL,
            capture: CaptureMode::Stride,
            v2v_budget: None,
            trials: 3,
            master_seed: 4,
            field_order: 2,
            round_cap: None,
        };
        let result = simulate(&cfg).unwrap();
        assert_eq!(result.rounds, vec![1, 1, 1]);
    }

    #[test]
    fn unlimited_budget_levels_all_vehicles_every_round() {
        // A perfect exchange phase hands every vehicle the full round span,
        // so all completion fractions agree at every round boundary.
        let result = simulate(&ScenarioConfig {
            trials: 3,
            ..base_config()
        })
        .unwrap();
        for row in &result.trajectory {
            for pair in row.windows(2) {
                assert!(
                    (pair[0] - pair[1]).abs() < 1e-12,
                    "unequal fractions {row:?}"
                );
            }
        }
    }

    #[test]
    fn uncoded_forwarding_shares_held_packets() {
        let cfg = ScenarioConfig {
            rsu_scheme: RsuScheme::Feedback,
            v2v_scheme: V2vScheme::Uncoded,
            trials: 2,
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        assert!(result.rounds.iter().all(|&r| r == 10));
    }

    #[test]
    fn paired_seeds_rank_the_schemes() {
        // Same seeds and broadcasts: the window code is never slower than
        // plain forwarding, which is never slower than no exchange.
        let budget = Some(5);
        let coded = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::MatrixL,
            v2v_budget: budget,
            trials: 10,
            ..base_config()
        })
        .unwrap();
        let uncoded = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::Uncoded,
            v2v_budget: budget,
            trials: 10,
            ..base_config()
        })
        .unwrap();
        let none = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::None,
            trials: 10,
            ..base_config()
        })
        .unwrap();
        for t in 0..10 {
            assert!(coded.rounds[t] <= uncoded.rounds[t]);
            assert!(uncoded.rounds[t] <= none.rounds[t]);
        }
    }

    #[test]
    fn network_coding_over_gf256_rarely_wastes_a_round() {
        // Over GF(2^8) fresh combinations are almost surely innovative, so a
        // perfect exchange finishes in ceil(file / n) rounds, give or take a
        // rare dependent draw.
        let cfg = ScenarioConfig {
            file_packets: 20,
            cluster: ClusterConfig::new(3, 2, 1).unwrap(),
            field_order: 256,
            trials: 5,
            ..base_config()
        };
        let result = simulate(&cfg).unwrap();
        assert!(result.rounds.iter().all(|&r| (5..=6).contains(&r)), "{:?}", result.rounds);
    }

    #[test]
    fn greedy_exchange_scheme_completes_and_beats_no_exchange() {
        let greedy = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::Algorithm1,
            trials: 5,
            ..base_config()
        })
        .unwrap();
        let none = simulate(&ScenarioConfig {
            v2v_scheme: V2vScheme::None,
            trials: 5,
            ..base_config()
        })
        .unwrap();
        for t in 0..5 {
            assert!(greedy.rounds[t] <= none.rounds[t]);
        }
    }

    #[test]
    fn feedback_without_exchange_strands_packets_and_errors_out() {
        // Feedback never rebroadcasts a packet once any vehicle holds it, so
        // with no exchange at all most vehicles can never finish.
        let cfg = ScenarioConfig {
            rsu_scheme: RsuScheme::Feedback,
            v2v_scheme: V2vScheme::None,
            trials: 1,
            ..base_config()
        };
        assert!(matches!(
            simulate(&cfg),
            Err(SimError::NonTermination { trial: 0, .. })
        ));
    }

    #[test]
    fn validation_catches_misconfigured_scenarios() {
        let mut cfg = base_config();
        cfg.trials = 0;
        assert_eq!(cfg.validate(), Err(SimError::NoTrials));
        let mut cfg = base_config();
        cfg.capture = CaptureMode::Disjoint;
        assert!(matches!(
            cfg.validate(),
            Err(SimError::DisjointCaptureDoesNotFit { .. })
        ));
        let mut cfg = base_config();
        cfg.capture = CaptureMode::Random;
        assert_eq!(cfg.validate(), Err(SimError::WindowCodeNeedsStride));
        let mut cfg = base_config();
        cfg.v2v_scheme = V2vScheme::Fixed {
            transmissions: vec![FixedTransmission {
                sender: 0,
                coefficients: vec![1, 1],
            }],
        };
        assert!(matches!(
            cfg.validate(),
            Err(SimError::FixedCoefficientLength { .. })
        ));
    }
}
