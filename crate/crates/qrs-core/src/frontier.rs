//! Qubit accounting, parameter sweeps, Pareto frontiers and crossovers of
//! the concatenated memory.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::failure::{total_failure, CollisionFractions, FailureBreakdown, ProtocolParams};
use crate::noise::{InstructionRates, PostSelection};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrontierError {
    /// A crossover needs a nonempty baseline.
    NoBaseline,
}

impl fmt::Display for FrontierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontierError::NoBaseline => write!(f, "no baseline frontier points"),
        }
    }
}

impl core::error::Error for FrontierError {}

/// Physical and logical qubit counts of an `n × m` grid with outer distance `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCounts {
    pub physical: u64,
    pub logical: u64,
    pub overhead: f64,
}

/// `physical = 378nm + 44(n−1)(m−1) + 22(n−1) + 22(m−1)`,
/// `logical = 11(m−2)(n−2(d−1))`.
pub fn qubit_counts(n: usize, m: usize, d: usize) -> QubitCounts {
    let (n, m, d) = (n as u64, m as u64, d as u64);
    let physical = 378 * n * m + 44 * (n - 1) * (m - 1) + 22 * (n - 1) + 22 * (m - 1);
    let logical = 11 * m.saturating_sub(2) * n.saturating_sub(2 * (d - 1));
    let overhead = if logical == 0 { f64::INFINITY } else { physical as f64 / logical as f64 };
    QubitCounts { physical, logical, overhead }
}

/// The parameter ranges explored by a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub d: Vec<usize>,
    pub big_m: Vec<usize>,
    pub r: Vec<usize>,
    pub max_physical: u64,
}

impl Default for Grid {
    /// `n ∈ 20..=80`, `m ∈ 3..=50`, `d ∈ 3..=9`, `M, R ∈ {1, 2}`, at most
    /// 500 000 physical qubits.
    fn default() -> Self {
        Grid {
            n: (20..=80).collect(),
            m: (3..=50).collect(),
            d: (3..=9).collect(),
            big_m: alloc::vec![1, 2],
            r: alloc::vec![1, 2],
            max_physical: 500_000,
        }
    }
}

impl Grid {
    /// Feasible points in lexicographic `(n, m, d, M, R)` order: `M ≤ d−2`,
    /// `2(d−1) < n`, `m ≥ 3` and under the physical-qubit cap.
    pub fn points(&self) -> Vec<ProtocolParams> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &m in &self.m {
                for &d in &self.d {
                    for &big_m in &self.big_m {
                        for &r in &self.r {
                            let p = ProtocolParams { n, m, d, big_m, r };
                            if p.validate().is_ok()
                                && qubit_counts(n, m, d).physical <= self.max_physical
                            {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub params: ProtocolParams,
    pub counts: QubitCounts,
    pub breakdown: FailureBreakdown,
}

impl FrontierPoint {
    pub fn ler(&self) -> f64 {
        self.breakdown.ler_per_lqr
    }

    pub fn overhead(&self) -> f64 {
        self.counts.overhead
    }
}

/// A grid point that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub params: ProtocolParams,
    pub reason: String,
}

/// Evaluate one point.
pub fn evaluate(
    params: &ProtocolParams,
    q: u64,
    rates: &InstructionRates,
    ps: &PostSelection,
    fractions: &CollisionFractions,
) -> Result<FrontierPoint, crate::failure::FailureError> {
    let breakdown = total_failure(params, q, rates, ps, fractions)?;
    Ok(FrontierPoint {
        params: *params,
        counts: qubit_counts(params.n, params.m, params.d),
        breakdown,
    })
}

/// Evaluate every feasible grid point; infeasible ones (e.g. divergent
/// retries) are returned separately.
pub fn sweep(
    grid: &Grid,
    q: u64,
    rates: &InstructionRates,
    ps: &PostSelection,
    fractions: &CollisionFractions,
) -> (Vec<FrontierPoint>, Vec<Skipped>) {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for p in grid.points() {
        match evaluate(&p, q, rates, ps, fractions) {
            Ok(fp) => points.push(fp),
            Err(e) => skipped.push(Skipped { params: p, reason: alloc::format!("{e}") }),
        }
    }
    (points, skipped)
}

/// The nondominated `(ler, overhead)` points, sorted by increasing LER:
/// along the result the LER increases and the overhead strictly decreases.
/// Points with a non-finite or non-positive LER are ignored.
pub fn pareto(points: &[FrontierPoint]) -> Vec<FrontierPoint> {
    let mut sorted: Vec<&FrontierPoint> =
        points.iter().filter(|p| p.ler().is_finite() && p.ler() > 0.0).collect();
    sorted.sort_by(|a, b| {
        a.ler().total_cmp(&b.ler()).then(a.overhead().total_cmp(&b.overhead()))
    });
    let mut out: Vec<FrontierPoint> = Vec::new();
    for p in sorted {
        if out.last().map_or(true, |last| p.overhead() < last.overhead()) {
            out.push(p.clone());
        }
    }
    out
}

/// Smallest overhead among frontier points with LER at most `target`.
pub fn best_overhead_at(frontier: &[FrontierPoint], target: f64) -> Option<f64> {
    frontier
        .iter()
        .filter(|p| p.ler() <= target)
        .map(|p| p.overhead())
        .min_by(|a, b| a.total_cmp(b))
}

/// A frontier curve as `(ler, overhead)` pairs sorted by increasing LER.
pub fn curve(frontier: &[FrontierPoint]) -> Vec<(f64, f64)> {
    frontier.iter().map(|p| (p.ler(), p.overhead())).collect()
}

fn log_interp(curve: &[(f64, f64)], x: f64) -> Option<f64> {
    let lx = libm::log10(x);
    let first = curve.first()?;
    let last = curve.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x >= a.0 && x <= b.0 {
            if a.0 == b.0 {
                return Some(a.1.min(b.1));
            }
            let t = (lx - libm::log10(a.0)) / (libm::log10(b.0) - libm::log10(a.0));
            let ly = libm::log10(a.1) + t * (libm::log10(b.1) - libm::log10(a.1));
            return Some(libm::pow(10.0, ly));
        }
    }
    (curve.len() == 1).then_some(first.1)
}

/// The LER at which curve `a` first overtakes curve `b` in overhead,
/// scanning from low LER upwards over their shared LER range. Both curves
/// are `(ler, overhead)` pairs sorted by LER and interpolated linearly in
/// log–log space. Returns `Ok(None)` when the ranges do not overlap or no
/// sign change occurs; if the curves coincide, the shared upper endpoint.
pub fn crossover(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<Option<f64>, FrontierError> {
    if a.is_empty() || b.is_empty() {
        return Err(FrontierError::NoBaseline);
    }
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    if lo > hi {
        return Ok(None);
    }
    // Breakpoints of both curves inside the shared range.
    let mut xs: Vec<f64> =
        a.iter().chain(b.iter()).map(|p| p.0).filter(|&x| x >= lo && x <= hi).collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(|p, q| p.total_cmp(q));
    xs.dedup();
    let diff = |x: f64| -> Option<f64> {
        Some(libm::log10(log_interp(a, x)?) - libm::log10(log_interp(b, x)?))
    };
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        let Some(g) = diff(x) else { continue };
        if g == 0.0 && prev.map_or(true, |(_, pg)| pg != 0.0) {
            if prev.is_some() || xs.len() == 1 {
                return Ok(Some(x));
            }
        }
        if let Some((px, pg)) = prev {
            if pg > 0.0 && g < 0.0 || pg < 0.0 && g > 0.0 {
                // `g` is linear in log x between breakpoints.
                let lx0 = libm::log10(px);
                let lx1 = libm::log10(x);
                let t = pg / (pg - g);
                return Ok(Some(libm::pow(10.0, lx0 + t * (lx1 - lx0))));
            }
        }
        prev = Some((x, g));
    }
    if let Some((x, g)) = prev {
        if g == 0.0 {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
