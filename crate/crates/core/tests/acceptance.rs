//! Acceptance suite: one test per acceptance criterion, each printing a
//! pass/fail line and enforcing its runtime budget. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use icx::bounds;
use icx::cluster::{ClusterConfig, SideInformation};
use icx::ecic::{self, EcicConfig, ErrorSpec};
use icx::exchange::{self, ExchangeTransmission};
use icx::field::BINARY;
use icx::linalg::Matrix;
use icx::overlap_code::{self, encoder_matrix, left_decoder_matrix, right_decoder_matrix};
use icx::sim::{CaptureMode, FixedTransmission, RsuScheme, ScenarioConfig, V2vScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn random_packets(n: usize, payload_len: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..payload_len).map(|_| rng.gen()).collect())
        .collect()
}

fn report(criterion: &str, label: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("acceptance criterion {criterion} ({label}): PASS in {elapsed:.2?}");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_1_construction_exactness() {
    let started = Instant::now();
    // Encoder for l=5, i=2.
    let encoder = encoder_matrix(5, 2).unwrap();
    assert_eq!(
        encoder.row_vecs(),
        vec![
            vec![1, 0, 1, 0, 0],
            vec![0, 1, 0, 1, 0],
            vec![0, 0, 1, 0, 1],
        ]
    );
    // Vehicle 1 of the K=4 layout holds global packets 3..=7; its payloads
    // pair each packet with the one two slots later.
    let cfg = ClusterConfig::new(4, 5, 2).unwrap();
    let packets = random_packets(14, 8, 1);
    let window: Vec<Vec<u8>> = (3..8).map(|j| packets[j].clone()).collect();
    let coded = overlap_code::encode_window(&cfg, 1, &window).unwrap();
    assert_eq!(coded.len(), 3);
    for (r, t) in coded.iter().enumerate() {
        let expected: Vec<u8> = packets[3 + r]
            .iter()
            .zip(&packets[5 + r])
            .map(|(a, b)| a ^ b)
            .collect();
        assert_eq!(t.payload, expected);
    }
    // Both decoder matrices reduce to the identity.
    let identity = Matrix::identity(BINARY, 5);
    assert_eq!(
        right_decoder_matrix(5, 2).unwrap().rref_with_rank(),
        (identity.clone(), 5)
    );
    assert_eq!(
        left_decoder_matrix(5, 2).unwrap().rref_with_rank(),
        (identity, 5)
    );
    report(
        "1",
        "construction exactness",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_window_code_meets_the_lower_bound_on_every_column() {
    let started = Instant::now();
    let report_groups = icx::tables::build_report(0).unwrap();
    let counts: Vec<Vec<usize>> = report_groups
        .iter()
        .map(|g| {
            g.columns
                .iter()
                .map(|c| c.window_code_transmissions)
                .collect()
        })
        .collect();
    assert_eq!(counts[0], vec![5, 15, 25, 35, 45]);
    assert_eq!(counts[1], vec![5, 15, 25, 35, 45]);
    assert_eq!(counts[2], vec![7, 21, 35, 49, 63]);
    for group in &report_groups {
        for col in &group.columns {
            assert_eq!(col.window_code_transmissions, col.overlap_lower);
        }
    }
    report(
        "2",
        "window code meets n-i exactly",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_3_universal_decodability_sweep() {
    let started = Instant::now();
    let mut seed = 10_000u64;
    for k in 2..=6usize {
        for l in 2..=8usize {
            for i in 1..l {
                let cfg = ClusterConfig::new(k, l, i).unwrap();
                for _draw in 0..10 {
                    seed += 1;
                    let packets = random_packets(cfg.total_packets(), 3, seed);
                    let windows = overlap_code::split_windows(&cfg, &packets);
                    let transmissions: Vec<_> = (0..k)
                        .flat_map(|m| overlap_code::encode_window(&cfg, m, &windows[m]).unwrap())
                        .collect();
                    let recovered =
                        overlap_code::decode_cluster(&cfg, &windows, &transmissions).unwrap();
                    for r in recovered {
                        assert_eq!(r, packets, "K={k} l={l} i={i}");
                    }
                }
            }
        }
    }
    report(
        "3",
        "universal decodability sweep",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_4_oracles_certify_the_code_optimal() {
    let started = Instant::now();
    for l in 2..=6usize {
        for i in 1..l {
            let cfg = ClusterConfig::new(4, l, i).unwrap();
            let side = SideInformation::equal_overlap(&cfg);
            for m in 0..4 {
                let sub = bounds::transmitter_subproblem(&side, m).unwrap();
                let alpha = bounds::generalized_independence_number(&sub.problem).unwrap();
                let kappa = bounds::min_rank(&sub.problem).unwrap();
                assert_eq!(alpha, l - i, "alpha l={l} i={i} m={m}");
                assert_eq!(kappa, l - i, "kappa l={l} i={i} m={m}");
                assert_eq!(bounds::min_rank_serial(&sub.problem).unwrap(), kappa);
            }
        }
    }
    report(
        "4",
        "oracle certification",
        started,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_5_capability_bound_on_the_uneven_fixture() {
    let started = Instant::now();
    let side = SideInformation::from_known_sets(
        8,
        vec![
            vec![0, 1, 2, 3],
            vec![2, 3, 4, 5],
            vec![3, 4, 5, 6],
            vec![4, 5, 6, 7],
        ],
    )
    .unwrap();
    let innovative = bounds::innovative_sets(&side);
    let sizes: Vec<usize> = innovative.iter().map(Vec::len).collect();
    assert_eq!(sizes, vec![2, 0, 0, 1]);
    assert_eq!(bounds::transmission_lower_bound(&side).unwrap(), 6);
    // The fixture's hand-built six-transmission code: senders 0,0,1,2,3,3
    // pairing (0,2),(1,3),(2,4),(3,5),(4,6),(5,7).
    let pairs = [
        (0usize, (0usize, 2usize)),
        (0, (1, 3)),
        (1, (2, 4)),
        (2, (3, 5)),
        (3, (4, 6)),
        (3, (5, 7)),
    ];
    let log: Vec<ExchangeTransmission> = pairs
        .iter()
        .map(|&(sender, (a, b))| {
            let mut coefficients = vec![0u8; 8];
            coefficients[a] = 1;
            coefficients[b] = 1;
            ExchangeTransmission {
                sender,
                coefficients,
                field_order: 2,
            }
        })
        .collect();
    assert!(exchange::verify_universal_recovery(&log, &side));
    assert!(!exchange::verify_universal_recovery(&log[..5], &side));
    report(
        "5",
        "capability bound matched by six transmissions",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_6_single_error_correction_is_exhaustive() {
    let started = Instant::now();
    let cluster = ClusterConfig::new(4, 5, 2).unwrap();
    let scheme = EcicConfig::with_embedded_code(cluster, 1).unwrap();
    let packets = random_packets(14, 6, 77);
    let windows = overlap_code::split_windows(&cluster, &packets);
    let clean: Vec<Vec<icx::CodedTransmission>> = (0..4)
        .map(|m| ecic::ecic_encode(&scheme, m, &windows[m]).unwrap())
        .collect();
    let total: usize = clean.iter().map(Vec::len).sum();
    assert_eq!(total, 24);
    for victim in 0..4 {
        for position in 0..6 {
            let mut blocks = clean.clone();
            blocks[victim] = ecic::inject_errors(
                &scheme,
                &clean[victim],
                &[ErrorSpec {
                    transmission: position,
                    symbol: None,
                    value: 0xa5,
                }],
            )
            .unwrap();
            let recovered = ecic::decode_cluster_corrected(&scheme, &windows, &blocks).unwrap();
            for r in recovered {
                assert_eq!(r, packets, "victim {victim} position {position}");
            }
        }
    }
    report(
        "6",
        "exhaustive single-error correction",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_7_exchange_algorithm_envelope() {
    let started = Instant::now();
    let report_groups = icx::tables::build_report(0).unwrap();
    for group in &report_groups {
        for col in &group.columns {
            assert!(
                col.algorithm_transmissions >= col.exchange_lower
                    && col.algorithm_transmissions <= col.exchange_upper,
                "family {} n={}: {} outside [{}, {}]",
                group.label,
                col.packets,
                col.algorithm_transmissions,
                col.exchange_lower,
                col.exchange_upper
            );
        }
    }
    let first: Vec<usize> = report_groups[0]
        .columns
        .iter()
        .take(3)
        .map(|c| c.algorithm_transmissions)
        .collect();
    assert_eq!(first, vec![5, 15, 25]);
    report(
        "7",
        "exchange algorithm envelope",
        started,
        Duration::from_secs(60),
    );
}

fn dissemination_scenario(v2v_scheme: V2vScheme, budget: Option<usize>) -> ScenarioConfig {
    ScenarioConfig {
        file_packets: 60,
        cluster: ClusterConfig::new(5, 2, 1).unwrap(),
        round_packets: None,
        rsu_scheme: RsuScheme::NetworkCoding,
        v2v_scheme,
        capture: CaptureMode::Stride,
        v2v_budget: budget,
        trials: 100,
        master_seed: 20_250_810,
        field_order: 2,
        round_cap: None,
    }
}

#[test]
fn criterion_8a_paired_seed_scheme_dominance() {
    let started = Instant::now();
    let budget = Some(5); // n - i for this layout
    let coded = icx::sim::simulate(&dissemination_scenario(V2vScheme::MatrixL, budget)).unwrap();
    let uncoded = icx::sim::simulate(&dissemination_scenario(V2vScheme::Uncoded, budget)).unwrap();
    let none = icx::sim::simulate(&dissemination_scenario(V2vScheme::None, None)).unwrap();
    for t in 0..100 {
        assert!(
            coded.rounds[t] <= uncoded.rounds[t],
            "trial {t}: coded {} > uncoded {}",
            coded.rounds[t],
            uncoded.rounds[t]
        );
        assert!(
            uncoded.rounds[t] <= none.rounds[t],
            "trial {t}: uncoded {} > none {}",
            uncoded.rounds[t],
            none.rounds[t]
        );
    }
    report(
        "8a",
        "paired-seed scheme dominance",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8b_budget_monotonicity() {
    let started = Instant::now();
    let mut previous = f64::INFINITY;
    for budget in 0..=5usize {
        let result =
            icx::sim::simulate(&dissemination_scenario(V2vScheme::MatrixL, Some(budget))).unwrap();
        assert!(
            result.mean_rounds <= previous + 1e-9,
            "budget {budget}: mean rose from {previous} to {}",
            result.mean_rounds
        );
        previous = result.mean_rounds;
    }
    report(
        "8b",
        "budget monotonicity",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8c_feedback_with_perfect_exchange_is_exact() {
    let started = Instant::now();
    for (file, expected) in [(60usize, 10usize), (100, 17)] {
        let cfg = ScenarioConfig {
            file_packets: file,
            rsu_scheme: RsuScheme::Feedback,
            ..dissemination_scenario(V2vScheme::MatrixL, None)
        };
        let result = icx::sim::simulate(&cfg).unwrap();
        assert!(
            result.rounds.iter().all(|&r| r == expected),
            "file {file}: rounds {:?}",
            result.rounds
        );
    }
    report(
        "8c",
        "feedback with perfect exchange",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8d_uneven_capture_example_uses_six_coded_transmissions() {
    let started = Instant::now();
    let fixed = V2vScheme::Fixed {
        transmissions: [
            (0usize, (0usize, 2usize)),
            (0, (1, 3)),
            (1, (2, 4)),
            (2, (3, 5)),
            (3, (4, 6)),
            (3, (5, 7)),
        ]
        .iter()
        .map(|&(sender, (a, b))| {
            let mut coefficients = vec![0u8; 8];
            coefficients[a] = 1;
            coefficients[b] = 1;
            FixedTransmission {
                sender,
                coefficients,
            }
        })
        .collect(),
    };
    let base = ScenarioConfig {
        file_packets: 100,
        cluster: ClusterConfig::new(4, 4, 0).unwrap(),
        round_packets: Some(8),
        rsu_scheme: RsuScheme::NetworkCoding,
        v2v_scheme: fixed,
        capture: CaptureMode::Offsets(vec![0, 2, 3, 4]),
        v2v_budget: None,
        trials: 25,
        master_seed: 77,
        field_order: 2,
        round_cap: None,
    };
    let coded = icx::sim::simulate(&base).unwrap();
    for (t, (&rounds, &v2v)) in coded
        .rounds
        .iter()
        .zip(&coded.v2v_transmissions)
        .enumerate()
    {
        assert_eq!(v2v, 6 * rounds, "trial {t}: coded phase is 6 per round");
    }
    let uncoded = icx::sim::simulate(&ScenarioConfig {
        v2v_scheme: V2vScheme::Uncoded,
        ..base.clone()
    })
    .unwrap();
    for (t, (&rounds, &v2v)) in uncoded
        .rounds
        .iter()
        .zip(&uncoded.v2v_transmissions)
        .enumerate()
    {
        assert_eq!(v2v, 8 * rounds, "trial {t}: uncoded phase is 8 per round");
    }
    report(
        "8d",
        "six coded vs eight uncoded per round",
        started,
        Duration::from_secs(120),
    );
}
