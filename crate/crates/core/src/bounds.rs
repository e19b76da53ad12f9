//! Transmission-count bounds and the brute-force oracles that certify the
//! window code optimal.
//!
//! Two kinds of results live here. Closed-form bounds: the capability bound
//! `n - l + max_m |N_m|` (innovative packets must come from their sole
//! holder), its equal-overlap specialization `n - i`, and the cooperative
//! data-exchange envelope. And exhaustive oracles over per-transmitter index
//! coding subproblems: the generalized independence number (a lower bound on
//! any code length) and the binary min-rank (the optimal scalar linear
//! length). The oracles enumerate; they are deliberately small-instance-only
//! and fail loudly past their size guards rather than approximate.

use crate::cluster::SideInformation;
use crate::ecic::{ClassicalCode, EcicError};
use crate::field::Field;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest message count accepted by the independence-number search.
pub const MAX_INDEPENDENCE_MESSAGES: usize = 20;
/// Largest total side-information size accepted by the min-rank search.
pub const MAX_MIN_RANK_SIDE_BITS: usize = 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("receiver {receiver} demands message {demand}, outside 0..{messages}")]
    DemandOutOfRange {
        receiver: usize,
        demand: usize,
        messages: usize,
    },
    #[error("receiver {receiver} side information contains {packet}, outside 0..{messages}")]
    SideInfoOutOfRange {
        receiver: usize,
        packet: usize,
        messages: usize,
    },
    #[error("receiver {receiver} already holds its demanded message {demand}")]
    DemandHeld { receiver: usize, demand: usize },
    #[error("size guard exceeded: {what} = {got}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("capability bound requires equal known-set sizes, found {0} and {1}")]
    UnequalCapabilities(usize, usize),
    #[error("vehicle {vehicle} is outside the cluster of {vehicles}")]
    NoSuchVehicle { vehicle: usize, vehicles: usize },
    #[error(transparent)]
    Ecic(#[from] EcicError),
}

/// A single-sender index coding problem: `messages` messages, each receiver
/// demanding one of them while holding a side-information subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCodingProblem {
    messages: usize,
    receivers: Vec<Receiver>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub demand: usize,
    pub side_info: Vec<usize>,
}

impl IndexCodingProblem {
    pub fn new(messages: usize, receivers: Vec<Receiver>) -> Result<Self, BoundsError> {
        for (idx, r) in receivers.iter().enumerate() {
            if r.demand >= messages {
                return Err(BoundsError::DemandOutOfRange {
                    receiver: idx,
                    demand: r.demand,
                    messages,
                });
            }
            for &p in &r.side_info {
                if p >= messages {
                    return Err(BoundsError::SideInfoOutOfRange {
                        receiver: idx,
                        packet: p,
                        messages,
                    });
                }
            }
            if r.side_info.contains(&r.demand) {
                return Err(BoundsError::DemandHeld {
                    receiver: idx,
                    demand: r.demand,
                });
            }
        }
        Ok(IndexCodingProblem {
            messages,
            receivers,
        })
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }
}

/// Per-vehicle innovative packets: those held by that vehicle and nobody
/// else.
pub fn innovative_sets(side: &SideInformation) -> Vec<Vec<usize>> {
    let k = side.vehicle_count();
    let n = side.packet_count();
    let mut holders = vec![0usize; n];
    for m in 0..k {
        for &p in side.known(m) {
            holders[p] += 1;
        }
    }
    (0..k)
        .map(|m| {
            side.known(m)
                .iter()
                .copied()
                .filter(|&p| holders[p] == 1)
                .collect()
        })
        .collect()
}

/// Lower bound on the total exchange transmissions when every vehicle holds
/// the same number of packets: `n - l + max_m |N_m|`. Every vehicle must
/// receive `n - l` packets it lacks, and innovative packets can only be sent
/// by their sole holder.
pub fn transmission_lower_bound(side: &SideInformation) -> Result<usize, BoundsError> {
    let Some(capability) = side.uniform_capability() else {
        let sizes: Vec<usize> = side.known_sets().iter().map(Vec::len).collect();
        let first = sizes[0];
        let other = *sizes.iter().find(|&&s| s != first).unwrap();
        return Err(BoundsError::UnequalCapabilities(first, other));
    };
    let max_innovative = innovative_sets(side)
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    Ok(side.packet_count() - capability + max_innovative)
}

/// The equal-overlap specialization of the bound: `n - i`.
pub fn overlap_lower_bound(cfg: &crate::cluster::ClusterConfig) -> usize {
    cfg.total_packets() - cfg.overlap()
}

/// The index coding problem seen when one vehicle transmits: messages are its
/// known set (re-indexed locally), receivers are its immediate neighbors,
/// split into one receiver per demanded message.
#[derive(Debug, Clone)]
pub struct TransmitterSubproblem {
    pub transmitter: usize,
    /// Local message index -> global packet index.
    pub global_ids: Vec<usize>,
    pub problem: IndexCodingProblem,
}

pub fn transmitter_subproblem(
    side: &SideInformation,
    transmitter: usize,
) -> Result<TransmitterSubproblem, BoundsError> {
    let k = side.vehicle_count();
    if transmitter >= k {
        return Err(BoundsError::NoSuchVehicle {
            vehicle: transmitter,
            vehicles: k,
        });
    }
    let global_ids: Vec<usize> = side.known(transmitter).to_vec();
    let local = |global: usize| global_ids.iter().position(|&g| g == global);
    let mut receivers = Vec::new();
    for neighbor in [transmitter.checked_sub(1), transmitter.checked_add(1)] {
        let Some(v) = neighbor.filter(|&v| v < k) else {
            continue;
        };
        let held: Vec<usize> = side.known(v).iter().filter_map(|&g| local(g)).collect();
        // One single-demand receiver per message of the transmitter the
        // neighbor is missing.
        for demand in 0..global_ids.len() {
            if !held.contains(&demand) {
                receivers.push(Receiver {
                    demand,
                    side_info: held.clone(),
                });
            }
        }
    }
    Ok(TransmitterSubproblem {
        transmitter,
        problem: IndexCodingProblem::new(global_ids.len(), receivers)?,
        global_ids,
    })
}

/// The generalized independence number: the size of the largest message set
/// all of whose non-empty subsets consist of some receiver's demand plus
/// messages that receiver neither holds nor wants.
///
/// Exhaustive over subsets; guarded to at most
/// [`MAX_INDEPENDENCE_MESSAGES`] messages.
pub fn generalized_independence_number(p: &IndexCodingProblem) -> Result<usize, BoundsError> {
    let n = p.messages();
    if n > MAX_INDEPENDENCE_MESSAGES {
        return Err(BoundsError::SizeGuard {
            what: "messages for independence search",
            got: n,
            limit: MAX_INDEPENDENCE_MESSAGES,
        });
    }
    let receivers: Vec<(u32, u32)> = p
        .receivers()
        .iter()
        .map(|r| {
            let side = r.side_info.iter().fold(0u32, |m, &p| m | 1 << p);
            (1u32 << r.demand, side)
        })
        .collect();
    let size = 1usize << n;
    // good[s]: set s is one receiver's demand plus non-interfering messages,
    // i.e. contains the demand and avoids that receiver's side information.
    let mut good = vec![false; size];
    for (s, slot) in good.iter_mut().enumerate().skip(1) {
        let mask = s as u32;
        *slot = receivers
            .iter()
            .any(|&(demand, side)| mask & demand != 0 && mask & side == 0);
    }
    // independent[s]: every non-empty subset of s is good. It suffices that s
    // itself is good and every one-element-removed subset is independent.
    let mut independent = vec![false; size];
    independent[0] = true;
    let mut best = 0usize;
    for s in 1..size {
        if !good[s] {
            continue;
        }
        let mut ok = true;
        let mut rest = s;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            if !independent[s ^ bit] {
                ok = false;
                break;
            }
            rest ^= bit;
        }
        if ok {
            independent[s] = true;
            best = best.max(s.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Incremental GF(2) row space over bitmask rows, used by the min-rank search.
#[derive(Clone, Default)]
struct BitBasis {
    rows: Vec<u64>,
}

impl BitBasis {
    fn insert(&mut self, mut v: u64) -> bool {
        for &row in &self.rows {
            let pivot = row & row.wrapping_neg();
            if v & pivot != 0 {
                v ^= row;
            }
        }
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        // Keep rows sorted by pivot so reduction stays a single pass.
        self.rows.sort_unstable_by_key(|r| r.trailing_zeros());
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Minimum rank over GF(2) of any completion `{e_demand + v : supp(v) within
/// side info}`: the optimal scalar linear code length for the problem.
///
/// Depth-first over receivers with rank pruning; guarded to at most
/// [`MAX_MIN_RANK_SIDE_BITS`] total side-information bits. With the
/// `parallel` feature the top-level branches run on the rayon pool; the
/// result is the exact minimum either way.
pub fn min_rank(p: &IndexCodingProblem) -> Result<usize, BoundsError> {
    let side_bits: usize = p.receivers().iter().map(|r| r.side_info.len()).sum();
    if side_bits > MAX_MIN_RANK_SIDE_BITS {
        return Err(BoundsError::SizeGuard {
            what: "total side-information bits for min-rank search",
            got: side_bits,
            limit: MAX_MIN_RANK_SIDE_BITS,
        });
    }
    if p.messages() > 63 {
        return Err(BoundsError::SizeGuard {
            what: "messages for min-rank search",
            got: p.messages(),
            limit: 63,
        });
    }
    if p.receivers().is_empty() {
        return Ok(0);
    }
    let receivers: Vec<(u64, Vec<u64>)> = p
        .receivers()
        .iter()
        .map(|r| {
            (
                1u64 << r.demand,
                r.side_info.iter().map(|&p| 1u64 << p).collect(),
            )
        })
        .collect();

    #[cfg(feature = "parallel")]
    {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let best = AtomicUsize::new(usize::MAX);
        let (first, rest) = receivers.split_first().expect("nonempty");
        completions(first).into_par_iter().for_each(|row| {
            let mut basis = BitBasis::default();
            basis.insert(row);
            let mut local = best.load(Ordering::Relaxed);
            min_rank_dfs(rest, basis, &mut local, Some(&best));
        });
        Ok(best.load(Ordering::SeqCst))
    }

    #[cfg(not(feature = "parallel"))]
    {
        let mut best = usize::MAX;
        min_rank_dfs(&receivers, BitBasis::default(), &mut best, None);
        Ok(best)
    }
}

/// Sequential reference implementation of [`min_rank`], sharing the same
/// search; kept public so benchmarks can compare the two paths.
pub fn min_rank_serial(p: &IndexCodingProblem) -> Result<usize, BoundsError> {
    let side_bits: usize = p.receivers().iter().map(|r| r.side_info.len()).sum();
    if side_bits > MAX_MIN_RANK_SIDE_BITS {
        return Err(BoundsError::SizeGuard {
            what: "total side-information bits for min-rank search",
            got: side_bits,
            limit: MAX_MIN_RANK_SIDE_BITS,
        });
    }
    if p.messages() > 63 {
        return Err(BoundsError::SizeGuard {
            what: "messages for min-rank search",
            got: p.messages(),
            limit: 63,
        });
    }
    if p.receivers().is_empty() {
        return Ok(0);
    }
    let receivers: Vec<(u64, Vec<u64>)> = p
        .receivers()
        .iter()
        .map(|r| {
            (
                1u64 << r.demand,
                r.side_info.iter().map(|&p| 1u64 << p).collect(),
            )
        })
        .collect();
    let mut best = usize::MAX;
    min_rank_dfs(&receivers, BitBasis::default(), &mut best, None);
    Ok(best)
}

/// All completions `e_demand + v` of one receiver, in lexicographic order of
/// the side-information subset.
fn completions(receiver: &(u64, Vec<u64>)) -> Vec<u64> {
    let (demand, side) = receiver;
    (0u32..1 << side.len())
        .map(|mask| {
            side.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 != 0)
                .fold(*demand, |row, (_, &bit)| row | bit)
        })
        .collect()
}

#[cfg(feature = "parallel")]
type SharedBest<'a> = Option<&'a std::sync::atomic::AtomicUsize>;
#[cfg(not(feature = "parallel"))]
type SharedBest<'a> = Option<std::convert::Infallible>;

#[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
fn min_rank_dfs(
    receivers: &[(u64, Vec<u64>)],
    basis: BitBasis,
    best: &mut usize,
    shared: SharedBest<'_>,
) {
    #[cfg(feature = "parallel")]
    if let Some(shared) = shared {
        // Pick up improvements found by sibling tasks.
        *best = (*best).min(shared.load(std::sync::atomic::Ordering::Relaxed));
    }
    if basis.dim() >= *best {
        return; // rank only grows from here
    }
    let Some((receiver, rest)) = receivers.split_first() else {
        *best = basis.dim();
        #[cfg(feature = "parallel")]
        if let Some(shared) = shared {
            shared.fetch_min(*best, std::sync::atomic::Ordering::SeqCst);
        }
        return;
    };
    for row in completions(receiver) {
        let mut next = basis.clone();
        next.insert(row);
        min_rank_dfs(rest, next, best, shared);
    }
}

/// Length bounds for an error-correcting index code built by concatenation:
/// the optimal classical code lengths at dimensions `alpha` (lower) and
/// `min-rank` (upper). Equal values certify the concatenation optimal.
pub fn ecic_length_bounds(
    p: &IndexCodingProblem,
    delta: usize,
    field: Field,
) -> Result<(usize, usize), BoundsError> {
    let alpha = generalized_independence_number(p)?;
    let kappa = min_rank(p)?;
    let lower = ClassicalCode::for_parameters(alpha, delta, field)?.length();
    let upper = ClassicalCode::for_parameters(kappa, delta, field)?.length();
    Ok((lower, upper))
}

/// The cooperative data-exchange envelope on minimum transmissions:
/// `n - n_min` below (plus one when every vehicle holds exactly `n_min`), and
/// `min_m (n - |K_m| + max_j |K_m \ K_j|)` above.
pub fn exchange_bounds(side: &SideInformation) -> (usize, usize) {
    let n = side.packet_count();
    let k = side.vehicle_count();
    let sizes: Vec<usize> = side.known_sets().iter().map(Vec::len).collect();
    let n_min = sizes.iter().copied().min().unwrap_or(0);
    let all_equal = sizes.iter().all(|&s| s == n_min);
    let mut lower = n - n_min;
    if all_equal && k >= 2 {
        lower += 1;
    }
    let upper = (0..k)
        .map(|m| {
            let held: std::collections::BTreeSet<usize> = side.known(m).iter().copied().collect();
            let max_exclusive = (0..k)
                .map(|j| {
                    let other: std::collections::BTreeSet<usize> =
                        side.known(j).iter().copied().collect();
                    held.difference(&other).count()
                })
                .max()
                .unwrap_or(0);
            n - held.len() + max_exclusive
        })
        .min()
        .unwrap_or(n);
    (lower, upper)
}
