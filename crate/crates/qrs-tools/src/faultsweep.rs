//! Parallel exhaustive fault injection into the cat-state preparation and
//! JSON-lines transcripts of its runs.

use qrs_core::decode::sample_rng;
use qrs_core::tableau::{
    cat_preparation_run, fault_sets, CatPrepOutcome, FaultAlphabet, FaultEvent, SweepReport,
};
use qrs_core::{FieldCtx, FieldElement};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Result, ToolError};

/// Fault sets per parallel work item.
const CHUNK: usize = 512;

/// Cat coefficients for a sweep: stream 1 of the root seed (stream 0
/// drives the measurement outcomes of every run).
pub fn random_gammas(ctx: &FieldCtx, n: usize, seed: u64) -> Vec<FieldElement> {
    let mut rng = sample_rng(seed, 1);
    (0..n).map(|_| ctx.random_nonzero(&mut rng)).collect()
}

/// Run the faultless preparation, then every fault set of up to
/// `max_faults` faults, on the current rayon pool. Violations are reported
/// in enumeration order.
pub fn sweep_parallel(
    ctx: &FieldCtx,
    gammas: &[FieldElement],
    rounds: usize,
    max_faults: usize,
    alphabet: FaultAlphabet,
    seed: u64,
) -> Result<(CatPrepOutcome, SweepReport)> {
    let clean = cat_preparation_run(ctx, gammas, rounds, &[], seed).map_err(ToolError::config)?;
    let sets = fault_sets(ctx, &clean.transcript, max_faults, alphabet);
    let parts = sets
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut rep = SweepReport::default();
            for set in chunk {
                let out = cat_preparation_run(ctx, gammas, rounds, set, seed).map_err(ToolError::config)?;
                rep.record(set.clone(), out);
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SweepReport::default();
    for p in parts {
        report.merge(p);
    }
    Ok((clean, report))
}

fn fault_json(ctx: &FieldCtx, f: &FaultEvent) -> serde_json::Value {
    let pauli: Vec<_> = f
        .pauli
        .iter()
        .map(|&(q, x, z)| json!({ "qudit": q, "x": ctx.render_element(x), "z": ctx.render_element(z) }))
        .collect();
    json!({ "step": f.step, "pauli": pauli, "flip": ctx.render_element(f.flip) })
}

/// One JSON object per measurement step (step id, operation, qudits,
/// reported outcome, injected fault, and the run's accept/reject verdict),
/// then a summary line with the residual error.
pub fn transcript_jsonl(ctx: &FieldCtx, faults: &[FaultEvent], outcome: &CatPrepOutcome) -> String {
    let mut out = String::new();
    for s in &outcome.transcript {
        let line = json!({
            "step": s.step,
            "op": s.label,
            "qudits": s.qudits,
            "outcome": ctx.render_element(s.outcome),
            "fault": s.fault.as_ref().map(|f| fault_json(ctx, f)),
            "accepted": outcome.accepted,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    let residual = outcome.residual.as_ref().map(|r| {
        json!({
            "x_error": r.x_error.iter().map(|&x| ctx.render_element(x)).collect::<Vec<_>>(),
            "x_weight": r.x_weight,
            "z_weight": r.z_weight,
        })
    });
    let summary = json!({
        "summary": true,
        "faults": faults.iter().map(|f| fault_json(ctx, f)).collect::<Vec<_>>(),
        "accepted": outcome.accepted,
        "residual": residual,
    });
    out.push_str(&summary.to_string());
    out.push('\n');
    out
}
