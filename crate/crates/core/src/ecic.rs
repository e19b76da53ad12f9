//! Error correction for the window code by concatenation with a classical
//! block code.
//!
//! A vehicle's `k = l - i` coded packets are re-encoded with an `[N, k, d]`
//! code, `d >= 2*delta + 1`, giving `N` transmissions per vehicle from which
//! receivers recover the inner coded packets exactly despite up to `delta`
//! corrupted transmissions. Decoding is nearest-codeword by exhaustive search
//! over the `2^k` codewords, applied independently per payload bit lane; at
//! the dimensions in scope that is both simple and obviously correct.
//!
//! The embedded code table covers the cases the constructions need: the
//! identity code (no correction), repetition codes for a single coded packet,
//! and the `[6, 3, 3]` single-error-correcting code. Anything else must be
//! supplied as a generator matrix, which is verified (rank and exact minimum
//! distance) rather than trusted.

use crate::cluster::ClusterConfig;
use crate::field::{Field, BINARY};
use crate::linalg::Matrix;
use crate::overlap_code::{self, CodeError, CodedTransmission, Direction};
use thiserror::Error;

/// Largest code dimension for which codeword enumeration is allowed.
pub const MAX_CODE_DIMENSION: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EcicError {
    #[error("no embedded optimal code for dimension {dimension}, delta {delta} over GF({order}); supply a generator matrix")]
    UnknownParameters {
        dimension: usize,
        delta: usize,
        order: u16,
    },
    #[error("code dimension {0} exceeds the enumeration guard {MAX_CODE_DIMENSION}")]
    DimensionTooLarge(usize),
    #[error("generator matrix has rank {rank}, expected full rank {dimension}")]
    NotFullRank { rank: usize, dimension: usize },
    #[error("outer code dimension {got} does not match the {expected} coded packets per vehicle")]
    WrongDimension { expected: usize, got: usize },
    #[error("outer code distance {distance} cannot correct {delta} errors (needs {needed})")]
    DistanceTooSmall {
        distance: usize,
        delta: usize,
        needed: usize,
    },
    #[error("received block has {got} transmissions, expected {expected}")]
    WrongBlockLength { expected: usize, got: usize },
    #[error("error pattern touches {got} transmissions, more than delta = {delta}")]
    PatternExceedsDelta { delta: usize, got: usize },
    #[error("error value must be nonzero")]
    ZeroErrorValue,
    #[error("error pattern names transmission {transmission}, outside the block of {block}")]
    TransmissionOutOfRange { transmission: usize, block: usize },
    #[error("error pattern names symbol {symbol}, outside payloads of {payload_len} bytes")]
    SymbolOutOfRange { symbol: usize, payload_len: usize },
    #[error("block length {0} exceeds the 64-transmission decoding limit")]
    BlockTooLong(usize),
    #[error(
        "two codewords are equidistant from the received word; more than delta errors occurred"
    )]
    DecodingAmbiguity,
    #[error("generator file line {line}: {problem}")]
    MalformedGenerator { line: usize, problem: String },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A verified `[length, dimension, distance]` linear block code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalCode {
    generator: Matrix,
    length: usize,
    dimension: usize,
    distance: usize,
}

impl ClassicalCode {
    /// Wraps a generator matrix, verifying full rank and computing the exact
    /// minimum distance by codeword enumeration.
    pub fn new(generator: Matrix) -> Result<Self, EcicError> {
        let dimension = generator.rows();
        let length = generator.cols();
        if dimension > MAX_CODE_DIMENSION {
            return Err(EcicError::DimensionTooLarge(dimension));
        }
        let rank = generator.rank();
        if rank != dimension || dimension == 0 {
            return Err(EcicError::NotFullRank { rank, dimension });
        }
        let field = generator.field();
        let order = field.order() as usize;
        let mut distance = length;
        let mut message = vec![0u8; dimension];
        // Odometer over all nonzero messages.
        loop {
            let mut carry = 0;
            loop {
                message[carry] += 1;
                if (message[carry] as usize) < order {
                    break;
                }
                message[carry] = 0;
                carry += 1;
                if carry == dimension {
                    return Ok(ClassicalCode {
                        generator,
                        length,
                        dimension,
                        distance,
                    });
                }
            }
            let codeword = combine_rows(&generator, &message);
            let weight = codeword.iter().filter(|&&v| v != 0).count();
            distance = distance.min(weight);
        }
    }

    /// An optimal code from the embedded table: the identity code for
    /// `delta = 0`, the `[2*delta + 1, 1]` repetition code for one message,
    /// and the `[6, 3, 3]` binary code for single-error correction of three.
    pub fn for_parameters(dimension: usize, delta: usize, field: Field) -> Result<Self, EcicError> {
        if dimension == 0 || dimension > MAX_CODE_DIMENSION {
            return Err(EcicError::UnknownParameters {
                dimension,
                delta,
                order: field.order(),
            });
        }
        if delta == 0 {
            return ClassicalCode::new(Matrix::identity(field, dimension));
        }
        if dimension == 1 {
            let row = vec![vec![1u8; 2 * delta + 1]];
            return ClassicalCode::new(Matrix::from_rows(field, &row).expect("valid"));
        }
        if dimension == 3 && delta == 1 && field == BINARY {
            let rows = vec![
                vec![1, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 1, 0, 1],
                vec![0, 0, 1, 0, 1, 1],
            ];
            return ClassicalCode::new(Matrix::from_rows(BINARY, &rows).expect("valid"));
        }
        Err(EcicError::UnknownParameters {
            dimension,
            delta,
            order: field.order(),
        })
    }

    /// Parses a generator matrix from text: one row per line, whitespace-
    /// separated digits; blank lines and `#` comments are skipped.
    pub fn parse_generator(text: &str, field: Field) -> Result<Matrix, EcicError> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for token in line.split_whitespace() {
                let value: u8 = token.parse().map_err(|_| EcicError::MalformedGenerator {
                    line: idx + 1,
                    problem: format!("`{token}` is not a digit"),
                })?;
                if !field.contains(value) {
                    return Err(EcicError::MalformedGenerator {
                        line: idx + 1,
                        problem: format!("{value} is not an element of GF({})", field.order()),
                    });
                }
                row.push(value);
            }
            rows.push(row);
        }
        Matrix::from_rows(field, &rows).map_err(|e| EcicError::MalformedGenerator {
            line: 0,
            problem: e.to_string(),
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
}

fn combine_rows(generator: &Matrix, message: &[u8]) -> Vec<u8> {
    let f = generator.field();
    let mut out = vec![0u8; generator.cols()];
    for (r, &m) in message.iter().enumerate() {
        if m == 0 {
            continue;
        }
        for (c, o) in out.iter_mut().enumerate() {
            *o = f.add(*o, f.mul(m, generator.get(r, c)));
        }
    }
    out
}

/// The concatenated scheme: the window code of a cluster followed by a binary
/// outer code of dimension `l - i` and distance at least `2*delta + 1`.
#[derive(Debug, Clone)]
pub struct EcicConfig {
    cluster: ClusterConfig,
    delta: usize,
    outer: ClassicalCode,
}

impl EcicConfig {
    pub fn new(
        cluster: ClusterConfig,
        delta: usize,
        outer: ClassicalCode,
    ) -> Result<Self, EcicError> {
        if outer.dimension() != cluster.stride() {
            return Err(EcicError::WrongDimension {
                expected: cluster.stride(),
                got: outer.dimension(),
            });
        }
        if outer.distance() < 2 * delta + 1 {
            return Err(EcicError::DistanceTooSmall {
                distance: outer.distance(),
                delta,
                needed: 2 * delta + 1,
            });
        }
        if outer.generator().field() != BINARY {
            return Err(EcicError::UnknownParameters {
                dimension: outer.dimension(),
                delta,
                order: outer.generator().field().order(),
            });
        }
        Ok(EcicConfig {
            cluster,
            delta,
            outer,
        })
    }

    /// Builds the scheme with an embedded optimal outer code.
    pub fn with_embedded_code(cluster: ClusterConfig, delta: usize) -> Result<Self, EcicError> {
        let outer = ClassicalCode::for_parameters(cluster.stride(), delta, BINARY)?;
        EcicConfig::new(cluster, delta, outer)
    }

    pub fn cluster(&self) -> &ClusterConfig {
        &self.cluster
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn outer(&self) -> &ClassicalCode {
        &self.outer
    }

    /// Transmissions per vehicle.
    pub fn block_length(&self) -> usize {
        self.outer.length()
    }
}

/// An additive corruption of one transmission in a block. Without a symbol
/// offset the value is added to every payload byte of that transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorSpec {
    pub transmission: usize,
    pub symbol: Option<usize>,
    pub value: u8,
}

/// Encodes a vehicle's window into its `N` error-protected transmissions:
/// the window code's `k` packets, re-encoded column-wise by the outer
/// generator. Coefficient vectors combine the same way, so each transmission
/// is still a valid coded packet over the global index space.
pub fn ecic_encode(
    cfg: &EcicConfig,
    vehicle: usize,
    window: &[Vec<u8>],
) -> Result<Vec<CodedTransmission>, EcicError> {
    let inner = overlap_code::encode_window(&cfg.cluster, vehicle, window)?;
    let g = cfg.outer.generator();
    let n = cfg.cluster.total_packets();
    let payload_len = inner.first().map_or(0, |t| t.payload.len());
    Ok((0..cfg.outer.length())
        .map(|j| {
            let mut coefficients = vec![0u8; n];
            let mut payload = vec![0u8; payload_len];
            for (r, t) in inner.iter().enumerate() {
                if g.get(r, j) == 0 {
                    continue;
                }
                for (c, &v) in coefficients.iter_mut().zip(&t.coefficients) {
                    *c ^= v;
                }
                for (p, &v) in payload.iter_mut().zip(&t.payload) {
                    *p ^= v;
                }
            }
            CodedTransmission {
                sender: vehicle,
                coefficients,
                payload,
            }
        })
        .collect())
}

/// Applies an error pattern to a block, enforcing the `delta` budget on the
/// number of distinct corrupted transmissions.
pub fn inject_errors(
    cfg: &EcicConfig,
    block: &[CodedTransmission],
    pattern: &[ErrorSpec],
) -> Result<Vec<CodedTransmission>, EcicError> {
    let mut touched: Vec<usize> = pattern.iter().map(|e| e.transmission).collect();
    touched.sort_unstable();
    touched.dedup();
    if touched.len() > cfg.delta {
        return Err(EcicError::PatternExceedsDelta {
            delta: cfg.delta,
            got: touched.len(),
        });
    }
    let mut out = block.to_vec();
    for e in pattern {
        if e.value == 0 {
            return Err(EcicError::ZeroErrorValue);
        }
        let t = out
            .get_mut(e.transmission)
            .ok_or(EcicError::TransmissionOutOfRange {
                transmission: e.transmission,
                block: block.len(),
            })?;
        match e.symbol {
            Some(s) => {
                if s >= t.payload.len() {
                    return Err(EcicError::SymbolOutOfRange {
                        symbol: s,
                        payload_len: t.payload.len(),
                    });
                }
                t.payload[s] ^= e.value;
            }
            None => {
                for b in t.payload.iter_mut() {
                    *b ^= e.value;
                }
            }
        }
    }
    Ok(out)
}

/// Recovers the `k` inner coded payloads from a (possibly corrupted) block of
/// `N` transmission payloads: nearest-codeword decoding per payload bit lane.
pub fn correct_block(cfg: &EcicConfig, block: &[Vec<u8>]) -> Result<Vec<Vec<u8>>, EcicError> {
    let n_tx = cfg.outer.length();
    let k = cfg.outer.dimension();
    if block.len() != n_tx {
        return Err(EcicError::WrongBlockLength {
            expected: n_tx,
            got: block.len(),
        });
    }
    if n_tx > 64 {
        return Err(EcicError::BlockTooLong(n_tx));
    }
    let payload_len = block.first().map_or(0, Vec::len);
    if block.iter().any(|p| p.len() != payload_len) {
        return Err(CodeError::RaggedPayloads.into());
    }
    // All codewords as transmission bitmasks, indexed by message bits.
    let g = cfg.outer.generator();
    let row_masks: Vec<u64> = (0..k)
        .map(|r| (0..n_tx).fold(0u64, |m, j| m | ((g.get(r, j) as u64) << j)))
        .collect();
    let codewords: Vec<u64> = (0..1u32 << k)
        .map(|msg| {
            row_masks
                .iter()
                .enumerate()
                .filter(|(r, _)| msg >> r & 1 != 0)
                .fold(0u64, |cw, (_, &row)| cw ^ row)
        })
        .collect();

    let mut inner = vec![vec![0u8; payload_len]; k];
    for s in 0..payload_len {
        for bit in 0..8 {
            let word = block
                .iter()
                .enumerate()
                .fold(0u64, |w, (t, p)| w | ((p[s] as u64 >> bit & 1) << t));
            let mut best_msg = 0u32;
            let mut best_dist = u32::MAX;
            let mut ties = 0;
            for (msg, &cw) in codewords.iter().enumerate() {
                let dist = (word ^ cw).count_ones();
                if dist < best_dist {
                    best_dist = dist;
                    best_msg = msg as u32;
                    ties = 1;
                } else if dist == best_dist {
                    ties += 1;
                }
            }
            if ties > 1 {
                return Err(EcicError::DecodingAmbiguity);
            }
            for (r, payload) in inner.iter_mut().enumerate() {
                payload[s] |= ((best_msg >> r & 1) as u8) << bit;
            }
        }
    }
    Ok(inner)
}

/// Rebuilds the inner coded transmissions of a vehicle from corrected
/// payloads, with the coefficient vectors the window code defines.
fn inner_transmissions(
    cfg: &EcicConfig,
    vehicle: usize,
    payloads: Vec<Vec<u8>>,
) -> Vec<CodedTransmission> {
    let cluster = &cfg.cluster;
    let base = cluster.window(vehicle).start;
    let n = cluster.total_packets();
    payloads
        .into_iter()
        .enumerate()
        .map(|(r, payload)| {
            let mut coefficients = vec![0u8; n];
            coefficients[base + r] = 1;
            coefficients[base + r + cluster.overlap()] = 1;
            CodedTransmission {
                sender: vehicle,
                coefficients,
                payload,
            }
        })
        .collect()
}

/// Decodes a transmitter's window from its corrupted block plus the shared
/// packets the decoder holds; see
/// [`overlap_code::decode_from_neighbor`] for the direction convention.
pub fn ecic_decode(
    cfg: &EcicConfig,
    direction: Direction,
    side: &[Vec<u8>],
    block: &[Vec<u8>],
) -> Result<Vec<Vec<u8>>, EcicError> {
    let inner = correct_block(cfg, block)?;
    Ok(overlap_code::decode_from_neighbor(
        direction,
        cfg.cluster.capability(),
        cfg.cluster.overlap(),
        side,
        &inner,
    )?)
}

/// Cluster-wide decoding under errors: corrects every vehicle's block, then
/// chains neighbor decodes exactly as in the error-free case.
pub fn decode_cluster_corrected(
    cfg: &EcicConfig,
    windows: &[Vec<Vec<u8>>],
    blocks: &[Vec<CodedTransmission>],
) -> Result<Vec<Vec<Vec<u8>>>, EcicError> {
    let mut corrected = Vec::new();
    for (vehicle, block) in blocks.iter().enumerate() {
        let payloads: Vec<Vec<u8>> = block.iter().map(|t| t.payload.clone()).collect();
        corrected.extend(inner_transmissions(
            cfg,
            vehicle,
            correct_block(cfg, &payloads)?,
        ));
    }
    Ok(overlap_code::decode_cluster(
        &cfg.cluster,
        windows,
        &corrected,
    )?)
}
