//! The benchmark table: exchange bounds, the greedy exchange count, and the
//! window-code count over three families of equal-overlap scenarios.

use crate::bounds;
use crate::cluster::{ClusterConfig, SideInformation};
use crate::exchange::{self, ExchangeError};
use crate::field::BINARY;
use crate::overlap_code;
use serde::Serialize;

/// One scenario column of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableColumn {
    pub vehicles: usize,
    pub capability: usize,
    pub overlap: usize,
    pub packets: usize,
    pub exchange_lower: usize,
    pub exchange_upper: usize,
    pub algorithm_transmissions: usize,
    pub overlap_lower: usize,
    pub window_code_transmissions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableGroup {
    pub label: String,
    pub columns: Vec<TableColumn>,
}

/// The three scenario families of the report: five vehicles sharing five,
/// five sharing seven, and seven sharing seven packets between neighbors.
pub fn benchmark_scenarios() -> Vec<(String, Vec<ClusterConfig>)> {
    let families = [
        (5usize, 5usize, [6usize, 8, 10, 12, 14]),
        (5, 7, [8, 10, 12, 14, 16]),
        (7, 7, [8, 10, 12, 14, 16]),
    ];
    families
        .into_iter()
        .map(|(k, i, ls)| {
            let configs = ls
                .into_iter()
                .map(|l| ClusterConfig::new(k, l, i).expect("valid family parameters"))
                .collect();
            (format!("K={k}, i={i}"), configs)
        })
        .collect()
}

/// Builds the full report. `seed` drives only the exchange algorithm's
/// GF(2^8) fallback draws.
pub fn build_report(seed: u64) -> Result<Vec<TableGroup>, ExchangeError> {
    benchmark_scenarios()
        .into_iter()
        .map(|(label, configs)| {
            let columns = configs
                .iter()
                .map(|cfg| column_for(cfg, seed))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TableGroup { label, columns })
        })
        .collect()
}

fn column_for(cfg: &ClusterConfig, seed: u64) -> Result<TableColumn, ExchangeError> {
    let side = SideInformation::equal_overlap(cfg);
    let (exchange_lower, exchange_upper) = bounds::exchange_bounds(&side);
    let log = exchange::run_information_exchange(&side, BINARY, seed)?;
    // Count the window code's transmissions by running the encoder, not by
    // evaluating the K(l - i) formula.
    let placeholder = vec![vec![0u8]; cfg.capability()];
    let window_code_transmissions = (0..cfg.vehicles())
        .map(|m| {
            overlap_code::encode_window(cfg, m, &placeholder)
                .expect("legal overlap")
                .len()
        })
        .sum();
    Ok(TableColumn {
        vehicles: cfg.vehicles(),
        capability: cfg.capability(),
        overlap: cfg.overlap(),
        packets: cfg.total_packets(),
        exchange_lower,
        exchange_upper,
        algorithm_transmissions: log.len(),
        overlap_lower: bounds::overlap_lower_bound(cfg),
        window_code_transmissions,
    })
}

type ColumnGetter = fn(&TableColumn) -> usize;

/// Renders the report as aligned text.
pub fn render_text(groups: &[TableGroup]) -> String {
    let mut out = String::new();
    for group in groups {
        out.push_str(&format!("scenario family {}\n", group.label));
        let rows: [(&str, ColumnGetter); 7] = [
            ("packets n", |c| c.packets),
            ("capability l", |c| c.capability),
            ("exchange lower bound", |c| c.exchange_lower),
            ("exchange upper bound", |c| c.exchange_upper),
            ("greedy exchange count", |c| c.algorithm_transmissions),
            ("overlap lower bound (n-i)", |c| c.overlap_lower),
            ("window code count", |c| c.window_code_transmissions),
        ];
        for (label, getter) in rows {
            out.push_str(&format!("  {label:<26}"));
            for col in &group.columns {
                out.push_str(&format!(" {:>5}", getter(col)));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Renders the report as CSV, one row per scenario column.
pub fn render_csv(groups: &[TableGroup]) -> String {
    let mut out = String::from(
        "family,vehicles,capability,overlap,packets,exchange_lower,exchange_upper,\
         greedy_exchange,overlap_lower,window_code\n",
    );
    for group in groups {
        for c in &group.columns {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                group.label,
                c.vehicles,
                c.capability,
                c.overlap,
                c.packets,
                c.exchange_lower,
                c.exchange_upper,
                c.algorithm_transmissions,
                c.overlap_lower,
                c.window_code_transmissions
            ));
        }
    }
    out
}
