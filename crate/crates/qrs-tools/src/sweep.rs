//! Parallel parameter sweeps, frontier CSV export and baseline comparison.

use std::collections::BTreeSet;

use qrs_core::failure::{CollisionFractions, FailureBreakdown, ProtocolParams};
use qrs_core::frontier::{evaluate, FrontierPoint, Grid, Skipped};
use qrs_core::noise::{InstructionRates, PostSelection};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::error::{Result, ToolError};

/// Evaluate every feasible grid point on the current rayon pool. Output
/// order is the grid order regardless of scheduling.
pub fn sweep_parallel(
    grid: &Grid,
    q: u64,
    rates: &InstructionRates,
    ps: &PostSelection,
    fractions: &CollisionFractions,
) -> (Vec<FrontierPoint>, Vec<Skipped>) {
    let results: Vec<_> = grid
        .points()
        .into_par_iter()
        .map(|p| evaluate(&p, q, rates, ps, fractions).map_err(|e| Skipped { params: p, reason: e.to_string() }))
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(s) => skipped.push(s),
        }
    }
    (points, skipped)
}

pub const FRONTIER_HEADER: [&str; 19] = [
    "n", "m", "d", "M", "R", "p_half", "p_whole", "p_inter", "p_idle", "physical", "logical",
    "overhead", "ler_per_lqr", "tlf1", "tlf2", "tlf3", "slf", "cat_burst", "pareto",
];

/// One row per evaluated point; `pareto` is 1 for points on `front`.
pub fn frontier_csv(points: &[FrontierPoint], front: &[FrontierPoint], rates: &InstructionRates) -> String {
    let on_front: BTreeSet<ProtocolParams> = front.iter().map(|p| p.params).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FRONTIER_HEADER).expect("in-memory CSV write");
    for p in points {
        let ProtocolParams { n, m, d, big_m, r } = p.params;
        let b = &p.breakdown;
        let ints = [n, m, d, big_m, r].map(|x| x.to_string());
        let rates = [rates.p_half, rates.p_whole, rates.p_inter, rates.p_idle].map(|x| x.to_string());
        let counts = [p.counts.physical.to_string(), p.counts.logical.to_string(), p.counts.overhead.to_string()];
        let terms = [b.ler_per_lqr, b.tlf1, b.tlf2, b.tlf3, b.slf, b.cat_burst].map(|x| x.to_string());
        let flag = u8::from(on_front.contains(&p.params)).to_string();
        let record: Vec<&str> = ints
            .iter()
            .chain(&rates)
            .chain(&counts)
            .chain(&terms)
            .chain(std::iter::once(&flag))
            .map(String::as_str)
            .collect();
        w.write_record(record).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

#[derive(Debug, Deserialize)]
struct BaselineRow {
    ler: f64,
    overhead: f64,
}

/// Baseline curve from a CSV with columns `ler,overhead`.
pub fn parse_baseline(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize::<BaselineRow>() {
        let row = row.map_err(ToolError::config)?;
        if !(row.ler > 0.0 && row.overhead > 0.0) {
            return Err(ToolError::config(format!("baseline values must be positive: {row:?}")));
        }
        out.push((row.ler, row.overhead));
    }
    if out.len() < 2 {
        return Err(ToolError::config("baseline needs at least two points"));
    }
    Ok(out)
}

/// Every named term of a breakdown, for audit.
pub fn breakdown_json(params: &ProtocolParams, q: u64, b: &FailureBreakdown) -> serde_json::Value {
    let counts = qrs_core::frontier::qubit_counts(params.n, params.m, params.d);
    json!({
        "params": { "n": params.n, "m": params.m, "d": params.d, "M": params.big_m, "R": params.r, "q": q },
        "physical": counts.physical,
        "logical": counts.logical,
        "overhead": counts.overhead,
        "tlf1": b.tlf1,
        "tlf2": b.tlf2,
        "tlf3": b.tlf3,
        "slf": b.slf,
        "cat_burst": b.cat_burst,
        "total": b.total,
        "ler_per_lqr": b.ler_per_lqr,
        "n_outer_round": b.n_outer_round,
        "p_cat": b.p_cat,
        "tau_cat": b.tau_cat,
        "sources": {
            "p_static": b.sources.p_static,
            "p_z_round": b.sources.p_z_round,
            "p_x_round": b.sources.p_x_round,
        },
        "space_like": {
            "slf": b.space_like.slf,
            "weight": b.space_like.weight,
            "fraction": b.space_like.fraction,
            "fraction2": b.space_like.fraction2,
            "tail": b.space_like.tail,
            "tail_last_term": b.space_like.tail_last_term,
        },
    })
}

/// Points under both the physical-qubit and the LER caps.
pub fn qualifying(points: &[FrontierPoint], max_physical: u64, max_ler: f64) -> Vec<&FrontierPoint> {
    points
        .iter()
        .filter(|p| p.counts.physical <= max_physical && p.ler() > 0.0 && p.ler() <= max_ler)
        .collect()
}
