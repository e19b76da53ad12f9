//! Cluster geometry: who holds which packets after a broadcast round.
//!
//! A cluster is a line of `K` vehicles that each capture a window of `l`
//! consecutive packets from a broadcast of `n` packets, with adjacent windows
//! sharing exactly `overlap` packets. Packet indices are 0-based throughout.

use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("cluster needs at least two vehicles, got {0}")]
    TooFewVehicles(usize),
    #[error("overlap {overlap} exceeds the download capability {capability}")]
    OverlapTooLarge { overlap: usize, capability: usize },
    #[error("capability must be at least 1")]
    ZeroCapability,
    #[error("packet count {given} does not match the layout ({expected} for K={vehicles}, l={capability}, i={overlap})")]
    PacketCountMismatch {
        given: usize,
        expected: usize,
        vehicles: usize,
        capability: usize,
        overlap: usize,
    },
    #[error("known set {vehicle} contains packet {packet}, outside 0..{packets}")]
    PacketOutOfRange {
        vehicle: usize,
        packet: usize,
        packets: usize,
    },
    #[error("packet {0} is held by no vehicle")]
    UncoveredPacket(usize),
    #[error("no vehicles given")]
    Empty,
}

/// Scenario parameters: `vehicles` receivers, each capturing `capability`
/// consecutive packets, adjacent captures sharing `overlap` packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterConfig {
    vehicles: usize,
    capability: usize,
    overlap: usize,
}

impl ClusterConfig {
    pub fn new(vehicles: usize, capability: usize, overlap: usize) -> Result<Self, ClusterError> {
        if vehicles < 2 {
            return Err(ClusterError::TooFewVehicles(vehicles));
        }
        if capability == 0 {
            return Err(ClusterError::ZeroCapability);
        }
        if overlap > capability {
            return Err(ClusterError::OverlapTooLarge {
                overlap,
                capability,
            });
        }
        Ok(ClusterConfig {
            vehicles,
            capability,
            overlap,
        })
    }

    /// Like [`ClusterConfig::new`] but also checks an externally supplied
    /// packet count against the layout identity `n = K(l - i) + i`.
    pub fn with_packet_count(
        vehicles: usize,
        capability: usize,
        overlap: usize,
        packets: usize,
    ) -> Result<Self, ClusterError> {
        let cfg = ClusterConfig::new(vehicles, capability, overlap)?;
        if cfg.total_packets() != packets {
            return Err(ClusterError::PacketCountMismatch {
                given: packets,
                expected: cfg.total_packets(),
                vehicles,
                capability,
                overlap,
            });
        }
        Ok(cfg)
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    pub fn capability(&self) -> usize {
        self.capability
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Window offset step between adjacent vehicles.
    pub fn stride(&self) -> usize {
        self.capability - self.overlap
    }

    /// Total packets covered by the staggered windows: `K(l - i) + i`.
    pub fn total_packets(&self) -> usize {
        self.vehicles * self.stride() + self.overlap
    }

    /// Global indices of the packets vehicle `m` captures.
    pub fn window(&self, vehicle: usize) -> std::ops::Range<usize> {
        let start = vehicle * self.stride();
        start..start + self.capability
    }
}

/// Per-vehicle known sets over a packet index space `0..packets`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInformation {
    packets: usize,
    known: Vec<Vec<usize>>,
}

impl SideInformation {
    /// The staggered consecutive-window layout for an overlap cluster.
    pub fn equal_overlap(cfg: &ClusterConfig) -> SideInformation {
        let known = (0..cfg.vehicles())
            .map(|m| cfg.window(m).collect())
            .collect();
        SideInformation {
            packets: cfg.total_packets(),
            known,
        }
    }

    /// Builds side information from explicit known sets, checking that every
    /// packet in `0..packets` is held by at least one vehicle.
    pub fn from_known_sets(
        packets: usize,
        sets: Vec<Vec<usize>>,
    ) -> Result<SideInformation, ClusterError> {
        if sets.is_empty() {
            return Err(ClusterError::Empty);
        }
        let mut covered = vec![false; packets];
        let mut known = Vec::with_capacity(sets.len());
        for (vehicle, set) in sets.into_iter().enumerate() {
            let dedup: BTreeSet<usize> = set.into_iter().collect();
            for &p in &dedup {
                if p >= packets {
                    return Err(ClusterError::PacketOutOfRange {
                        vehicle,
                        packet: p,
                        packets,
                    });
                }
                covered[p] = true;
            }
            known.push(dedup.into_iter().collect());
        }
        if let Some(p) = covered.iter().position(|&c| !c) {
            return Err(ClusterError::UncoveredPacket(p));
        }
        Ok(SideInformation { packets, known })
    }

    pub fn packet_count(&self) -> usize {
        self.packets
    }

    pub fn vehicle_count(&self) -> usize {
        self.known.len()
    }

    pub fn known(&self, vehicle: usize) -> &[usize] {
        &self.known[vehicle]
    }

    pub fn known_sets(&self) -> &[Vec<usize>] {
        &self.known
    }

    pub fn want(&self, vehicle: usize) -> Vec<usize> {
        let held: BTreeSet<usize> = self.known[vehicle].iter().copied().collect();
        (0..self.packets).filter(|p| !held.contains(p)).collect()
    }

    /// Download capability when all vehicles hold the same number of packets.
    pub fn uniform_capability(&self) -> Option<usize> {
        let first = self.known.first()?.len();
        self.known.iter().all(|k| k.len() == first).then_some(first)
    }

    /// Packets shared by vehicles `j` and `j + 1`.
    pub fn adjacent_overlap(&self, j: usize) -> Vec<usize> {
        let right: BTreeSet<usize> = self.known[j + 1].iter().copied().collect();
        self.known[j]
            .iter()
            .copied()
            .filter(|p| right.contains(p))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_overlap_layout_matches_worked_example() {
        // K=4, l=5, i=2: windows {0..4}, {3..7}, {6..10}, {9..13}, n=14.
        let cfg = ClusterConfig::new(4, 5, 2).unwrap();
        assert_eq!(cfg.total_packets(), 14);
        let side = SideInformation::equal_overlap(&cfg);
        assert_eq!(side.known(1), &[3, 4, 5, 6, 7]);
        assert_eq!(side.known(2), &[6, 7, 8, 9, 10]);
        assert_eq!(side.want(0), (5..14).collect::<Vec<_>>());
        assert_eq!(side.adjacent_overlap(1), vec![6, 7]);
    }

    #[test]
    fn zero_overlap_layout_partitions_the_packets() {
        let cfg = ClusterConfig::new(4, 4, 0).unwrap();
        assert_eq!(cfg.total_packets(), 16);
        let side = SideInformation::equal_overlap(&cfg);
        assert_eq!(side.known(0), &[0, 1, 2, 3]);
        assert_eq!(side.known(3), &[12, 13, 14, 15]);
        for j in 0..3 {
            assert!(side.adjacent_overlap(j).is_empty());
        }
    }

    #[test]
    fn layout_covers_everything_with_the_required_overlaps() {
        for k in 2..=8usize {
            for l in 1..=10usize {
                for i in 0..=l.saturating_sub(1) {
                    let cfg = ClusterConfig::new(k, l, i).unwrap();
                    let side = SideInformation::equal_overlap(&cfg);
                    let n = cfg.total_packets();
                    let mut covered = vec![false; n];
                    for m in 0..k {
                        assert_eq!(side.known(m).len(), l);
                        for &p in side.known(m) {
                            covered[p] = true;
                        }
                    }
                    assert!(covered.iter().all(|&c| c), "gap for K={k} l={l} i={i}");
                    for j in 0..k - 1 {
                        assert_eq!(side.adjacent_overlap(j).len(), i);
                    }
                    assert_eq!(*side.known(k - 1).last().unwrap(), n - 1);
                }
            }
        }
    }

    #[test]
    fn packet_count_mismatch_is_rejected() {
        let err = ClusterConfig::with_packet_count(4, 5, 2, 13).unwrap_err();
        assert!(matches!(
            err,
            ClusterError::PacketCountMismatch { expected: 14, .. }
        ));
        assert!(ClusterConfig::with_packet_count(4, 5, 2, 14).is_ok());
    }

    #[test]
    fn explicit_known_sets_must_cover_the_packet_space() {
        let err = SideInformation::from_known_sets(3, vec![vec![0], vec![2]]).unwrap_err();
        assert_eq!(err, ClusterError::UncoveredPacket(1));
        let err = SideInformation::from_known_sets(3, vec![vec![0, 3], vec![1, 2]]).unwrap_err();
        assert!(matches!(
            err,
            ClusterError::PacketOutOfRange { packet: 3, .. }
        ));
    }
}
