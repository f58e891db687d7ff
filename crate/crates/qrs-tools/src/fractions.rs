//! Parallel collision-fraction estimates, their CSV form and the on-disk
//! cache keyed by evaluation points and `(n, d, e)`.
//!
//! Sample `i` of a run with root seed `s` draws from ChaCha8 seeded with
//! `s` on stream `i`, so results do not depend on how samples are split
//! across workers.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qrs_core::decode::{estimate_fraction_range, FractionTable};
use qrs_core::failure::CollisionFractions;
use qrs_core::grs::{power_matrix, reference_points, render_points_file};
use qrs_core::matrix::Matrix;
use qrs_core::{FieldCtx, FieldElement};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{read_text, Result, ToolError};
use crate::manifest::{sha256_hex, write_atomic};

/// Samples per parallel work item.
pub const CHUNK: u64 = 64;

/// The `(d, e)` fraction a distance-`d` space-like bound reads from a
/// table; the other distances are closed-form.
pub fn sampled_weight(d: usize) -> Option<usize> {
    match d {
        4 => Some(2),
        5 | 6 => Some(3),
        7 => Some(4),
        _ => None,
    }
}

/// Evaluation points of a length-`n` production code over GF(2048).
pub fn production_points(ctx: &FieldCtx, n: usize) -> Result<Vec<FieldElement>> {
    reference_points(ctx, n)
        .ok_or_else(|| ToolError::config(format!("no reference evaluation points for n = {n}")))
}

/// Check matrix `(v_i α_i^j)`, `j < d − 1`, with all multipliers one.
pub fn check_matrix(ctx: &FieldCtx, alpha: &[FieldElement], d: usize) -> Matrix {
    power_matrix(ctx, d - 1, alpha, &vec![FieldElement::ONE; alpha.len()])
}

/// Cache key of an evaluation-point set: SHA-256 of its points-file text.
pub fn points_key(ctx: &FieldCtx, alpha: &[FieldElement]) -> String {
    sha256_hex(render_points_file(ctx, alpha).as_bytes())
}

/// Estimate `F_{e→k×e}` over `samples` samples on the current rayon pool.
pub fn estimate_parallel(
    ctx: &FieldCtx,
    h: &Matrix,
    d: usize,
    e: usize,
    samples: u64,
    seed: u64,
) -> Result<FractionTable> {
    let starts: Vec<u64> = (0..samples).step_by(CHUNK as usize).collect();
    let parts = starts
        .par_iter()
        .map(|&a| estimate_fraction_range(ctx, h, d, e, seed, a..(a + CHUNK).min(samples)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut table = estimate_fraction_range(ctx, h, d, e, seed, 0..0)?;
    for p in &parts {
        table.merge(p);
    }
    Ok(table)
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    n: usize,
    d: usize,
    e: usize,
    k: usize,
    fraction: f64,
    stderr: f64,
    samples: u64,
    seed: u64,
}

/// CSV with one row per collision count `k`.
pub fn to_csv(table: &FractionTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in table.rows() {
        w.serialize(CsvRow {
            n: table.n,
            d: table.d,
            e: table.e,
            k: r.k,
            fraction: r.fraction,
            stderr: r.stderr,
            samples: table.samples,
            seed: table.seed,
        })
        .expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

/// Inverse of [`to_csv`]; counts are recovered from fractions and the
/// sample count.
pub fn from_csv(text: &str) -> Result<FractionTable> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut table: Option<FractionTable> = None;
    for row in rdr.deserialize::<CsvRow>() {
        let row = row.map_err(ToolError::config)?;
        let t = table.get_or_insert_with(|| FractionTable {
            n: row.n,
            d: row.d,
            e: row.e,
            samples: row.samples,
            seed: row.seed,
            counts: BTreeMap::new(),
        });
        if (t.n, t.d, t.e, t.samples, t.seed) != (row.n, row.d, row.e, row.samples, row.seed) {
            return Err(ToolError::config("fraction CSV mixes several tables"));
        }
        let count = (row.fraction * row.samples as f64).round() as u64;
        if count > 0 {
            t.counts.insert(row.k, count);
        }
    }
    let table = table.ok_or_else(|| ToolError::config("empty fraction CSV"))?;
    if table.counts.values().sum::<u64>() != table.samples {
        return Err(ToolError::config("fraction CSV rows do not sum to the sample count"));
    }
    Ok(table)
}

/// Directory of fraction tables: `<dir>/<points-key>/n<n>_d<d>_e<e>.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionCache {
    pub dir: PathBuf,
}

impl FractionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FractionCache { dir: dir.into() }
    }

    pub fn path(&self, key: &str, n: usize, d: usize, e: usize) -> PathBuf {
        self.dir.join(key).join(format!("n{n}_d{d}_e{e}.csv"))
    }

    pub fn load(&self, key: &str, n: usize, d: usize, e: usize) -> Result<Option<FractionTable>> {
        let p = self.path(key, n, d, e);
        if !p.exists() {
            return Ok(None);
        }
        let t = from_csv(&read_text(&p)?)
            .map_err(|err| ToolError::config(format!("{}: {err}", p.display())))?;
        if (t.n, t.d, t.e) != (n, d, e) {
            return Err(ToolError::config(format!("{}: table is for a different (n, d, e)", p.display())));
        }
        Ok(Some(t))
    }

    pub fn store(&self, key: &str, table: &FractionTable) -> Result<PathBuf> {
        let p = self.path(key, table.n, table.d, table.e);
        write_atomic(&p, to_csv(table).as_bytes())?;
        Ok(p)
    }
}

/// Sampling settings for tables missing from the cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

/// Collect the fractions a sweep over `ns × ds` needs. Cached tables are
/// used as they are; missing ones are sampled when `sampling` is given and
/// stored, otherwise the analytic fallback covers them. Returns the
/// fractions and the cache files read or written.
pub fn gather(
    ctx: &FieldCtx,
    cache: &FractionCache,
    ns: &[usize],
    ds: &[usize],
    sampling: Option<Sampling>,
) -> Result<(CollisionFractions, Vec<PathBuf>)> {
    let mut fractions = CollisionFractions::analytic();
    let mut files = Vec::new();
    for &n in ns {
        let Some(alpha) = reference_points(ctx, n) else { continue };
        let key = points_key(ctx, &alpha);
        for &d in ds {
            let Some(e) = sampled_weight(d) else { continue };
            if 2 * (d - 1) >= n {
                continue;
            }
            let table = match (cache.load(&key, n, d, e)?, sampling) {
                (Some(t), _) => Some(t),
                (None, Some(s)) => {
                    let t = estimate_parallel(ctx, &check_matrix(ctx, &alpha, d), d, e, s.samples, s.seed)?;
                    cache.store(&key, &t)?;
                    Some(t)
                }
                (None, None) => None,
            };
            if let Some(t) = table {
                fractions.insert(n, d, e, t.weighted_failure());
                files.push(cache.path(&key, n, d, e));
            }
        }
    }
    Ok((fractions, files))
}
