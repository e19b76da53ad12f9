//! Index-coded packet exchange for sliding-window broadcast clusters.
//!
//! A line of vehicles downloads a file from roadside broadcast units; each
//! vehicle captures a window of consecutive packets, adjacent windows
//! overlapping. This crate provides:
//!
//! - exact linear algebra over small finite fields ([`linalg`], [`field`]);
//! - the pairwise XOR window code that completes the exchange in the minimum
//!   `n - i` transmissions, with neighbor and cluster decoding
//!   ([`overlap_code`]);
//! - transmission-count lower bounds and the brute-force certificates
//!   (generalized independence number, min-rank) that prove the code optimal
//!   ([`bounds`]);
//! - a cooperative data-exchange baseline that picks innovative coded
//!   vectors greedily ([`exchange`]);
//! - error correction by concatenating the window code with a classical
//!   block code ([`ecic`]);
//! - a multi-round dissemination simulator measuring rounds-to-complete-file
//!   under several broadcast and exchange schemes ([`sim`]), plus the
//!   benchmark table report ([`tables`]).
//!
//! Everything is deterministic given the configured seeds. The `parallel`
//! feature (on by default) runs simulation trials and the min-rank search on
//! a rayon pool; results are identical either way.

pub mod bounds;
pub mod cluster;
pub mod config;
pub mod ecic;
pub mod exchange;
pub mod field;
pub mod linalg;
pub mod overlap_code;
pub mod sim;
pub mod tables;

pub use cluster::{ClusterConfig, SideInformation};
pub use field::Field;
pub use linalg::Matrix;
pub use overlap_code::{CodedTransmission, Direction};
