//! The pairwise XOR window code for equal-overlap clusters, with neighbor and
//! cluster-wide decoding.
//!
//! Each vehicle holding `l` consecutive packets broadcasts `l - i` coded
//! packets, pairing packet `r` with packet `r + i` of its window. A neighbor
//! that already holds the `i` shared packets can solve for the transmitter's
//! whole window; chaining those decodes outward gives every vehicle all `n`
//! packets using `K(l - i) = n - i` transmissions in total, which meets the
//! lower bound for this layout.
//!
//! All coding here is over GF(2): coefficients are 0/1 over the global packet
//! index space, and payload bytes combine by XOR.

use crate::cluster::ClusterConfig;
use crate::field::BINARY;
use crate::linalg::{self, LinalgError, Matrix};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("overlap {overlap} is out of the coded range 1..{capability} (zero overlap has nothing to pair, full overlap leaves nothing to send)")]
    DegenerateOverlap { overlap: usize, capability: usize },
    #[error("vehicle {vehicle} is outside the cluster of {vehicles}")]
    NoSuchVehicle { vehicle: usize, vehicles: usize },
    #[error("expected {expected} packets, got {got}")]
    WrongPacketCount { expected: usize, got: usize },
    #[error("payloads have unequal lengths")]
    RaggedPayloads,
    #[error("expected {expected} coded transmissions, got {got}")]
    WrongTransmissionCount { expected: usize, got: usize },
    #[error("decoded packet {packet} contradicts a previously known value")]
    InconsistentSystem { packet: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A coded broadcast: a 0/1 coefficient vector over the global packet index
/// space plus the combined payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedTransmission {
    pub sender: usize,
    pub coefficients: Vec<u8>,
    pub payload: Vec<u8>,
}

/// Which side of the decoder the transmitter sits on.
///
/// `Right`: the transmitter is the higher-indexed neighbor, so the decoder
/// already holds the first `i` packets of the transmitter's window. `Left` is
/// the mirror image (the decoder holds the last `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

fn check_coded_range(capability: usize, overlap: usize) -> Result<(), CodeError> {
    if overlap == 0 || overlap >= capability {
        return Err(CodeError::DegenerateOverlap {
            overlap,
            capability,
        });
    }
    Ok(())
}

/// The `(l - i) x l` encoding matrix: row `r` has ones at columns `r` and
/// `r + i`, i.e. the sum of the first and last `l - i` rows of the identity.
pub fn encoder_matrix(capability: usize, overlap: usize) -> Result<Matrix, CodeError> {
    check_coded_range(capability, overlap)?;
    let rows = capability - overlap;
    let mut m = Matrix::zeros(BINARY, rows, capability);
    for r in 0..rows {
        m.set(r, r, 1);
        m.set(r, r + overlap, 1);
    }
    Ok(m)
}

/// Decoding matrix for the left-hand neighbor: the first `i` identity rows
/// stacked above the encoder. Always full rank.
pub fn right_decoder_matrix(capability: usize, overlap: usize) -> Result<Matrix, CodeError> {
    let id = Matrix::identity(BINARY, capability);
    Ok(id
        .first_rows(overlap)
        .vstack(&encoder_matrix(capability, overlap)?)?)
}

/// Decoding matrix for the right-hand neighbor: the encoder stacked above the
/// last `i` identity rows. Always full rank.
pub fn left_decoder_matrix(capability: usize, overlap: usize) -> Result<Matrix, CodeError> {
    let id = Matrix::identity(BINARY, capability);
    Ok(encoder_matrix(capability, overlap)?.vstack(&id.last_rows(overlap))?)
}

fn check_uniform(payloads: &[Vec<u8>]) -> Result<usize, CodeError> {
    let len = payloads.first().map_or(0, Vec::len);
    if payloads.iter().any(|p| p.len() != len) {
        return Err(CodeError::RaggedPayloads);
    }
    Ok(len)
}

/// Encodes vehicle `m`'s window: `l - i` transmissions, where transmission
/// `r` carries `window[r] ^ window[r + i]` and a global coefficient vector
/// with ones at the two packet indices.
pub fn encode_window(
    cfg: &ClusterConfig,
    vehicle: usize,
    window: &[Vec<u8>],
) -> Result<Vec<CodedTransmission>, CodeError> {
    check_coded_range(cfg.capability(), cfg.overlap())?;
    if vehicle >= cfg.vehicles() {
        return Err(CodeError::NoSuchVehicle {
            vehicle,
            vehicles: cfg.vehicles(),
        });
    }
    if window.len() != cfg.capability() {
        return Err(CodeError::WrongPacketCount {
            expected: cfg.capability(),
            got: window.len(),
        });
    }
    check_uniform(window)?;
    let n = cfg.total_packets();
    let base = cfg.window(vehicle).start;
    let overlap = cfg.overlap();
    Ok((0..cfg.stride())
        .map(|r| {
            let mut coefficients = vec![0u8; n];
            coefficients[base + r] = 1;
            coefficients[base + r + overlap] = 1;
            let payload = window[r]
                .iter()
                .zip(&window[r + overlap])
                .map(|(a, b)| a ^ b)
                .collect();
            CodedTransmission {
                sender: vehicle,
                coefficients,
                payload,
            }
        })
        .collect())
}

/// Recovers a transmitter's full window from its `l - i` coded payloads plus
/// the `i` shared packets the decoder already holds.
///
/// For [`Direction::Right`] the side packets are the first `i` of the
/// transmitter's window (in index order); for [`Direction::Left`] the last
/// `i`. Coded payloads must be in emission order.
pub fn decode_from_neighbor(
    direction: Direction,
    capability: usize,
    overlap: usize,
    side: &[Vec<u8>],
    coded: &[Vec<u8>],
) -> Result<Vec<Vec<u8>>, CodeError> {
    check_coded_range(capability, overlap)?;
    if side.len() != overlap {
        return Err(CodeError::WrongPacketCount {
            expected: overlap,
            got: side.len(),
        });
    }
    if coded.len() != capability - overlap {
        return Err(CodeError::WrongTransmissionCount {
            expected: capability - overlap,
            got: coded.len(),
        });
    }
    let (matrix, rhs): (Matrix, Vec<Vec<u8>>) = match direction {
        Direction::Right => (
            right_decoder_matrix(capability, overlap)?,
            side.iter().chain(coded).cloned().collect(),
        ),
        Direction::Left => (
            left_decoder_matrix(capability, overlap)?,
            coded.iter().chain(side).cloned().collect(),
        ),
    };
    check_uniform(&rhs)?;
    Ok(linalg::solve_with_payloads(&matrix, &rhs)?)
}

/// One vehicle's view: recovers all `n` packets from its own window plus the
/// whole cluster's coded transmissions, decoding neighbor windows outward in
/// both directions.
pub fn recover_all(
    cfg: &ClusterConfig,
    vehicle: usize,
    window: &[Vec<u8>],
    transmissions: &[CodedTransmission],
) -> Result<Vec<Vec<u8>>, CodeError> {
    check_coded_range(cfg.capability(), cfg.overlap())?;
    if vehicle >= cfg.vehicles() {
        return Err(CodeError::NoSuchVehicle {
            vehicle,
            vehicles: cfg.vehicles(),
        });
    }
    if window.len() != cfg.capability() {
        return Err(CodeError::WrongPacketCount {
            expected: cfg.capability(),
            got: window.len(),
        });
    }
    let payload_len = check_uniform(window)?;
    let n = cfg.total_packets();
    let mut packets: Vec<Option<Vec<u8>>> = vec![None; n];
    for (slot, payload) in cfg.window(vehicle).zip(window) {
        packets[slot] = Some(payload.clone());
    }

    let store = |range: std::ops::Range<usize>,
                 decoded: Vec<Vec<u8>>,
                 packets: &mut Vec<Option<Vec<u8>>>|
     -> Result<(), CodeError> {
        for (slot, payload) in range.zip(decoded) {
            match &packets[slot] {
                Some(existing) if *existing != payload => {
                    return Err(CodeError::InconsistentSystem { packet: slot });
                }
                _ => packets[slot] = Some(payload),
            }
        }
        Ok(())
    };

    let coded_of = |sender: usize| -> Result<Vec<Vec<u8>>, CodeError> {
        let payloads: Vec<Vec<u8>> = transmissions
            .iter()
            .filter(|t| t.sender == sender)
            .map(|t| t.payload.clone())
            .collect();
        if payloads.len() != cfg.stride() {
            return Err(CodeError::WrongTransmissionCount {
                expected: cfg.stride(),
                got: payloads.len(),
            });
        }
        Ok(payloads)
    };

    // Rightward: the first `i` packets of window t are already known, being
    // the tail of window t-1.
    for t in vehicle + 1..cfg.vehicles() {
        let range = cfg.window(t);
        let side: Vec<Vec<u8>> = range
            .clone()
            .take(cfg.overlap())
            .map(|slot| {
                packets[slot]
                    .clone()
                    .expect("overlap decoded in previous step")
            })
            .collect();
        let decoded = decode_from_neighbor(
            Direction::Right,
            cfg.capability(),
            cfg.overlap(),
            &side,
            &coded_of(t)?,
        )?;
        check_payload_len(&decoded, payload_len)?;
        store(range, decoded, &mut packets)?;
    }
    // Leftward mirror.
    for t in (0..vehicle).rev() {
        let range = cfg.window(t);
        let side: Vec<Vec<u8>> = range
            .clone()
            .skip(cfg.stride())
            .map(|slot| {
                packets[slot]
                    .clone()
                    .expect("overlap decoded in previous step")
            })
            .collect();
        let decoded = decode_from_neighbor(
            Direction::Left,
            cfg.capability(),
            cfg.overlap(),
            &side,
            &coded_of(t)?,
        )?;
        check_payload_len(&decoded, payload_len)?;
        store(range, decoded, &mut packets)?;
    }
    Ok(packets
        .into_iter()
        .map(|p| p.expect("windows cover the packet space"))
        .collect())
}

fn check_payload_len(decoded: &[Vec<u8>], expected: usize) -> Result<(), CodeError> {
    if decoded.iter().any(|p| p.len() != expected) {
        return Err(CodeError::RaggedPayloads);
    }
    Ok(())
}

/// Runs [`recover_all`] for every vehicle. `windows[m]` is vehicle `m`'s own
/// captured window; the return value holds each vehicle's full packet array.
pub fn decode_cluster(
    cfg: &ClusterConfig,
    windows: &[Vec<Vec<u8>>],
    transmissions: &[CodedTransmission],
) -> Result<Vec<Vec<Vec<u8>>>, CodeError> {
    if windows.len() != cfg.vehicles() {
        return Err(CodeError::WrongPacketCount {
            expected: cfg.vehicles(),
            got: windows.len(),
        });
    }
    (0..cfg.vehicles())
        .map(|m| recover_all(cfg, m, &windows[m], transmissions))
        .collect()
}

/// Splits a flat packet array into the per-vehicle windows of the layout.
pub fn split_windows(cfg: &ClusterConfig, packets: &[Vec<u8>]) -> Vec<Vec<Vec<u8>>> {
    (0..cfg.vehicles())
        .map(|m| cfg.window(m).map(|slot| packets[slot].clone()).collect())
        .collect()
}
