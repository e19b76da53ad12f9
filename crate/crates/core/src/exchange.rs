//! Cooperative data exchange by greedy innovative broadcasts.
//!
//! Every user tracks the subspace of coefficient vectors it can construct,
//! seeded with unit vectors for its side-information packets. Repeatedly, the
//! user with the largest subspace broadcasts a vector it holds that no other
//! active user does, growing everyone else's subspace by one, until every
//! user reaches full rank. Duplicate subspaces are pruned from the active set
//! first (the lower-indexed one goes), and ties pick the lowest user index,
//! so a run is fully determined by its inputs.
//!
//! Vector selection enumerates the sender's subspace in increasing Hamming
//! weight, then lexicographic support/coefficient order, and takes the first
//! vector outside every other active subspace. Over GF(2) such a vector can
//! fail to exist (the union of several proper subspaces can cover the
//! sender's); the selection then falls back to seeded random sampling over
//! GF(2^8), where a handful of draws succeeds with overwhelming probability.
//! The transmission log records the field each vector was drawn from.

use crate::cluster::SideInformation;
use crate::field::{Field, BINARY, GF256};
use crate::linalg::EchelonBasis;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Weight ceiling for the deterministic candidate enumeration.
const MAX_CANDIDATE_WEIGHT: usize = 4;
/// Candidate ceiling per selection before giving up on enumeration.
const MAX_CANDIDATES: usize = 20_000;
/// Random draws attempted in the GF(2^8) fallback.
const MAX_FALLBACK_DRAWS: usize = 512;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExchangeError {
    #[error("user {sender} holds no vector outside every other active subspace over GF({order})")]
    NoEligibleVector { sender: usize, order: u16 },
    #[error("exchange did not converge within {0} transmissions")]
    Diverged(usize),
}

/// One logged broadcast: the chosen coefficient vector and the field it was
/// selected over (GF(2^8) marks a fallback draw).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExchangeTransmission {
    pub sender: usize,
    pub coefficients: Vec<u8>,
    pub field_order: u16,
}

struct ExchangeState {
    field: Field,
    packets: usize,
    subspaces: Vec<EchelonBasis>,
    active: Vec<usize>,
}

impl ExchangeState {
    /// Seeds every user's subspace with unit vectors for its known packets.
    /// `SideInformation` guarantees the union covers the packet space, so
    /// the exchange can always complete.
    fn new(side: &SideInformation, field: Field) -> Self {
        let n = side.packet_count();
        let subspaces = (0..side.vehicle_count())
            .map(|u| {
                let mut basis = EchelonBasis::new(field, n);
                for &p in side.known(u) {
                    let mut unit = vec![0u8; n];
                    unit[p] = 1;
                    basis.insert(&unit);
                }
                basis
            })
            .collect();
        ExchangeState {
            field,
            packets: n,
            subspaces,
            active: (0..side.vehicle_count()).collect(),
        }
    }

    fn prune_duplicates(&mut self) {
        loop {
            let found = self
                .active
                .iter()
                .tuple_combinations()
                .find(|(&a, &b)| self.subspaces[a] == self.subspaces[b])
                .map(|(&a, &b)| (a, b));
            let Some((lower, _)) = found else {
                break;
            };
            self.active.retain(|&u| u != lower);
        }
    }

    fn sender(&self) -> usize {
        *self
            .active
            .iter()
            .max_by_key(|&&u| (self.subspaces[u].dim(), std::cmp::Reverse(u)))
            .expect("active set never empties")
    }

    /// All {0,1} rows: membership semantics are unchanged by moving to the
    /// extension field, so the swap is free.
    fn lift_to_gf256(&mut self) {
        for basis in &mut self.subspaces {
            basis.reinterpret(GF256);
        }
        self.field = GF256;
    }
}

/// Runs the exchange to completion, returning the transmission log. `seed`
/// only drives the GF(2^8) fallback draws; runs that never fall back are
/// seed-independent.
pub fn run_information_exchange(
    side: &SideInformation,
    field: Field,
    seed: u64,
) -> Result<Vec<ExchangeTransmission>, ExchangeError> {
    let mut state = ExchangeState::new(side, field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = side.vehicle_count() * state.packets + 1;
    let mut log = Vec::new();
    while state.subspaces.iter().any(|s| !s.is_full()) {
        if log.len() >= cap {
            return Err(ExchangeError::Diverged(cap));
        }
        state.prune_duplicates();
        let sender = state.sender();
        let (coefficients, field_order) = select_vector(&mut state, sender, &mut rng)?;
        for basis in &mut state.subspaces {
            basis.insert(&coefficients);
        }
        log.push(ExchangeTransmission {
            sender,
            coefficients,
            field_order,
        });
    }
    Ok(log)
}

/// First vector in the sender's subspace (by weight, then lexicographic
/// order) lying outside every other active subspace, falling back to random
/// GF(2^8) combinations of the sender's basis when enumeration fails.
fn select_vector(
    state: &mut ExchangeState,
    sender: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<u8>, u16), ExchangeError> {
    let n = state.packets;
    let order = state.field.order();
    // Any vector of the subspace is supported on the columns its basis
    // touches, so the support enumeration can skip the rest.
    let support = state.subspaces[sender].column_support();
    let others: Vec<usize> = state
        .active
        .iter()
        .copied()
        .filter(|&u| u != sender)
        .collect();
    let eligible = |v: &[u8]| {
        state.subspaces[sender].contains(v)
            && others.iter().all(|&u| !state.subspaces[u].contains(v))
    };

    let mut tested = 0usize;
    'enumeration: for weight in 1..=MAX_CANDIDATE_WEIGHT.min(support.len()) {
        for combo in support.iter().copied().combinations(weight) {
            // Scalar multiples share membership everywhere, so the leading
            // coefficient stays 1; the tail runs over {1..q-1}^(w-1) in
            // lexicographic order (a single all-ones pattern over GF(2)).
            let tails = weight - 1;
            let mut pattern = vec![1u8; tails];
            let mut exhausted = false;
            while !exhausted {
                let mut candidate = vec![0u8; n];
                candidate[combo[0]] = 1;
                for (&slot, &value) in combo[1..].iter().zip(&pattern) {
                    candidate[slot] = value;
                }
                tested += 1;
                if eligible(&candidate) {
                    return Ok((candidate, order));
                }
                if tested >= MAX_CANDIDATES {
                    break 'enumeration;
                }
                let mut idx = tails;
                exhausted = loop {
                    if idx == 0 {
                        break true;
                    }
                    idx -= 1;
                    if (pattern[idx] as u16) + 1 < order {
                        pattern[idx] += 1;
                        break false;
                    }
                    pattern[idx] = 1;
                };
            }
        }
    }

    // Enumeration found nothing within its budget: sample over GF(2^8).
    if state.field == BINARY {
        state.lift_to_gf256();
    }
    if state.field == GF256 {
        let dim = state.subspaces[sender].dim();
        for _ in 0..MAX_FALLBACK_DRAWS {
            let coeffs: Vec<u8> = (0..dim).map(|_| rng.gen()).collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let mut candidate = vec![0u8; n];
            for (c, row) in coeffs.iter().zip(state.subspaces[sender].rows()) {
                crate::linalg::payload_addmul(GF256, &mut candidate, row, *c);
            }
            if candidate.iter().all(|&c| c == 0) {
                continue;
            }
            if others
                .iter()
                .all(|&u| !state.subspaces[u].contains(&candidate))
            {
                return Ok((candidate, 256));
            }
        }
    }
    Err(ExchangeError::NoEligibleVector {
        sender,
        order: state.field.order(),
    })
}

/// True when every user's side information plus all logged coefficient
/// vectors spans the full packet space.
pub fn verify_universal_recovery(
    transmissions: &[ExchangeTransmission],
    side: &SideInformation,
) -> bool {
    let n = side.packet_count();
    let field = transmissions
        .iter()
        .map(|t| t.field_order)
        .max()
        .map_or(BINARY, |order| {
            Field::new(order as u64).expect("logged fields are valid")
        });
    (0..side.vehicle_count()).all(|u| {
        let mut basis = EchelonBasis::new(field, n);
        for &p in side.known(u) {
            let mut unit = vec![0u8; n];
            unit[p] = 1;
            basis.insert(&unit);
        }
        for t in transmissions {
            basis.insert(&t.coefficients);
        }
        basis.is_full()
    })
}
