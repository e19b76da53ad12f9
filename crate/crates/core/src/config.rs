//! The JSON run configuration shared by the command-line front end and the
//! test fixtures.
//!
//! One schema serves every command; each accessor checks the fields it needs
//! and reports the missing one by name. Scenario fixtures double as test
//! vectors, so parsing must be strict: unknown keys are rejected.

use crate::cluster::{ClusterConfig, ClusterError, SideInformation};
use crate::sim::{CaptureMode, RsuScheme, ScenarioConfig, V2vScheme};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// A corruption request for the error-correction demo: which vehicle's block,
/// which transmission, optionally which payload byte, and the value to add.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSpecConfig {
    pub vehicle: usize,
    pub transmission: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<usize>,
    pub value: u8,
}

/// The full configuration surface. Every field is optional; commands demand
/// what they need through the typed accessors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub vehicles: Option<usize>,
    pub capability: Option<usize>,
    pub overlap: Option<usize>,
    /// Packet-space size; required alongside `known_sets`, derived otherwise.
    pub packets: Option<usize>,
    pub payload_len: Option<usize>,
    pub seed: Option<u64>,
    pub field_order: Option<u16>,
    /// Explicit per-vehicle known sets (0-based packet indices).
    pub known_sets: Option<Vec<Vec<usize>>>,
    pub file_packets: Option<usize>,
    pub round_packets: Option<usize>,
    pub rsu_scheme: Option<RsuScheme>,
    pub v2v_scheme: Option<V2vScheme>,
    pub capture: Option<CaptureMode>,
    pub v2v_budget: Option<usize>,
    pub trials: Option<usize>,
    pub round_cap: Option<usize>,
    pub delta: Option<usize>,
    pub generator_file: Option<PathBuf>,
    pub errors: Option<Vec<ErrorSpecConfig>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len.unwrap_or(8)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn field_order(&self) -> u16 {
        self.field_order.unwrap_or(2)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(100)
    }

    pub fn cluster(&self) -> Result<ClusterConfig, ConfigError> {
        let vehicles = self.vehicles.ok_or(ConfigError::MissingField("vehicles"))?;
        let capability = self
            .capability
            .ok_or(ConfigError::MissingField("capability"))?;
        let overlap = self.overlap.ok_or(ConfigError::MissingField("overlap"))?;
        let cfg = match self.packets {
            Some(n) if self.known_sets.is_none() => {
                ClusterConfig::with_packet_count(vehicles, capability, overlap, n)?
            }
            _ => ClusterConfig::new(vehicles, capability, overlap)?,
        };
        Ok(cfg)
    }

    /// Side information from explicit known sets when given, else the
    /// equal-overlap layout of the cluster parameters.
    pub fn side_information(&self) -> Result<SideInformation, ConfigError> {
        if let Some(sets) = &self.known_sets {
            let packets = self.packets.ok_or(ConfigError::MissingField("packets"))?;
            return Ok(SideInformation::from_known_sets(packets, sets.clone())?);
        }
        Ok(SideInformation::equal_overlap(&self.cluster()?))
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, ConfigError> {
        Ok(ScenarioConfig {
            file_packets: self
                .file_packets
                .ok_or(ConfigError::MissingField("file_packets"))?,
            cluster: self.cluster()?,
            round_packets: self.round_packets,
            rsu_scheme: self
                .rsu_scheme
                .ok_or(ConfigError::MissingField("rsu_scheme"))?,
            v2v_scheme: self
                .v2v_scheme
                .clone()
                .ok_or(ConfigError::MissingField("v2v_scheme"))?,
            capture: self.capture.clone().unwrap_or(CaptureMode::Stride),
            v2v_budget: self.v2v_budget,
            trials: self.trials(),
            master_seed: self.seed(),
            field_order: self.field_order(),
            round_cap: self.round_cap,
        })
    }

    pub fn delta(&self) -> Result<usize, ConfigError> {
        self.delta.ok_or(ConfigError::MissingField("delta"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_scenario_fixture() {
        let text = r#"{
            "vehicles": 5, "capability": 2, "overlap": 1,
            "file_packets": 60, "rsu_scheme": "network_coding",
            "v2v_scheme": "matrix_l", "v2v_budget": 3,
            "trials": 10, "seed": 42
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let scenario = cfg.scenario().unwrap();
        assert_eq!(scenario.cluster.total_packets(), 6);
        assert_eq!(scenario.v2v_budget, Some(3));
        assert_eq!(scenario.master_seed, 42);
        assert_eq!(scenario.trials, 10);
        assert!(matches!(scenario.capture, CaptureMode::Stride));
    }

    #[test]
    fn parses_fixed_scheme_and_capture_offsets() {
        let text = r#"{
            "vehicles": 4, "capability": 4, "overlap": 0,
            "round_packets": 8,
            "file_packets": 100, "rsu_scheme": "network_coding",
            "capture": {"offsets": [0, 2, 3, 4]},
            "v2v_scheme": {"fixed": {"transmissions": [
                {"sender": 0, "coefficients": [1,0,1,0,0,0,0,0]}
            ]}}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let scenario = cfg.scenario().unwrap();
        assert_eq!(scenario.packets_per_round(), 8);
        assert!(matches!(scenario.v2v_scheme, V2vScheme::Fixed { .. }));
    }

    #[test]
    fn missing_fields_are_named() {
        let cfg = RunConfig::from_json(r#"{"vehicles": 4, "capability": 5}"#).unwrap();
        let err = cfg.cluster().unwrap_err();
        assert_eq!(err.to_string(), "missing field `overlap`");
        let err = cfg.scenario().unwrap_err();
        assert_eq!(err.to_string(), "missing field `file_packets`");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = RunConfig::from_json(r#"{"vehicle_count": 4}"#).unwrap_err();
        assert!(err.to_string().contains("vehicle_count"));
    }

    #[test]
    fn known_sets_require_an_explicit_packet_count() {
        let cfg = RunConfig::from_json(r#"{"known_sets": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(
            cfg.side_information().unwrap_err().to_string(),
            "missing field `packets`"
        );
        let cfg =
            RunConfig::from_json(r#"{"known_sets": [[0, 1], [1, 2]], "packets": 3}"#).unwrap();
        assert_eq!(cfg.side_information().unwrap().packet_count(), 3);
    }

    #[test]
    fn explicit_packet_counts_are_checked_against_the_layout() {
        let cfg = RunConfig::from_json(
            r#"{"vehicles": 4, "capability": 5, "overlap": 2, "packets": 13}"#,
        )
        .unwrap();
        assert!(cfg.cluster().is_err());
        let cfg = RunConfig::from_json(
            r#"{"vehicles": 4, "capability": 5, "overlap": 2, "packets": 14}"#,
        )
        .unwrap();
        assert_eq!(cfg.cluster().unwrap().total_packets(), 14);
    }
}
