//! Minimum-weight list decoding by support enumeration, syndrome-collision
//! statistics, and the closed-form uncorrectable fractions.
//!
//! The decoder visits supports in order of increasing size. For each support
//! `S` it solves `H|_S · x = y` and keeps the solutions with full support on
//! `S`. The first size with any solution gives the complete list of
//! minimum-weight corrections. At the sizes of interest (weights ≤ 5,
//! lengths ≤ 80) this is cheap and, unlike bounded-radius algebraic list
//! decoders, exact.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::{FieldCtx, FieldElement};
use crate::grs::{binomial, mds_weight_count};
use crate::matrix::Matrix;

/// Largest number of supports a single decode may visit.
pub const SUPPORT_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub enum DecodeError {
    /// No correction of weight at most `w_max` reproduces the syndrome.
    NoSolutionWithinBound { w_max: usize },
    /// The enumeration would exceed its work budget.
    TooLarge { supports: f64, limit: f64 },
    /// `(d, e)` is not one of the closed-form cases.
    Uncovered { d: usize, e: usize },
    /// Operand shapes disagree.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::NoSolutionWithinBound { w_max } => {
                write!(f, "no correction of weight ≤ {w_max} matches the syndrome")
            }
            DecodeError::TooLarge { supports, limit } => {
                write!(f, "{supports:.3e} supports exceed the enumeration limit {limit:.0e}")
            }
            DecodeError::Uncovered { d, e } => {
                write!(f, "no closed-form uncorrectable fraction for d = {d}, e = {e}")
            }
            DecodeError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for DecodeError {}

/// Every minimum-weight correction for a syndrome, plus the tie-break pick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub corrections: Vec<Vec<FieldElement>>,
    /// Index into `corrections` of the uniformly chosen correction.
    pub chosen: usize,
    pub weight: usize,
    /// Seed of the tie-break generator.
    pub seed: u64,
}

impl DecodeResult {
    pub fn chosen_correction(&self) -> &[FieldElement] {
        &self.corrections[self.chosen]
    }
}

/// Lexicographic `w`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    first: bool,
}

impl Combinations {
    pub fn new(n: usize, w: usize) -> Self {
        Combinations { n, idx: (0..w).collect(), first: w <= n }
    }

    /// Advance to the next subset; returns `None` when exhausted.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.first {
            self.first = false;
            return Some(&self.idx);
        }
        let w = self.idx.len();
        let mut i = w;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - w + i {
                self.idx[i] += 1;
                for j in i + 1..w {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        None
    }
}

/// Scratch-space solver for `H|_S · x = y`.
struct SupportSolver {
    aug: Vec<FieldElement>,
}

impl SupportSolver {
    fn new() -> Self {
        SupportSolver { aug: Vec::new() }
    }

    /// Appends to `out` every full-support solution on `support`.
    fn solve(
        &mut self,
        ctx: &FieldCtx,
        h: &Matrix,
        support: &[usize],
        y: &[FieldElement],
        out: &mut Vec<Vec<FieldElement>>,
    ) {
        let (r, w) = (h.rows(), support.len());
        let cols = w + 1;
        self.aug.clear();
        for i in 0..r {
            self.aug.extend(support.iter().map(|&c| h.get(i, c)));
            self.aug.push(y[i]);
        }
        let a = &mut self.aug;
        let mut pivots: Vec<usize> = Vec::with_capacity(w);
        let mut row = 0;
        for c in 0..cols {
            if row == r {
                break;
            }
            let Some(p) = (row..r).find(|&i| !a[i * cols + c].is_zero()) else { continue };
            if p != row {
                for k in 0..cols {
                    a.swap(p * cols + k, row * cols + k);
                }
            }
            let inv = ctx.inv(a[row * cols + c]).expect("nonzero pivot");
            for k in 0..cols {
                a[row * cols + k] = ctx.mul(a[row * cols + k], inv);
            }
            for i in 0..r {
                let factor = a[i * cols + c];
                if i != row && !factor.is_zero() {
                    for k in 0..cols {
                        let v = ctx.mul(factor, a[row * cols + k]);
                        a[i * cols + k] = ctx.add(a[i * cols + k], v);
                    }
                }
            }
            pivots.push(c);
            row += 1;
        }
        if pivots.last() == Some(&w) {
            return; // inconsistent
        }
        let free: Vec<usize> = (0..w).filter(|c| !pivots.contains(c)).collect();
        // Enumerate every assignment of the free variables (all nonzero,
        // since the solution must have full support).
        let q = ctx.q();
        let mut assign = vec![1u32; free.len()];
        loop {
            let mut x = vec![FieldElement::ZERO; w];
            for (fi, &fc) in free.iter().enumerate() {
                x[fc] = ctx.el(assign[fi]);
            }
            for (pi, &pc) in pivots.iter().enumerate() {
                let mut v = a[pi * cols + w];
                for &fc in &free {
                    v = ctx.add(v, ctx.mul(a[pi * cols + fc], x[fc]));
                }
                x[pc] = v;
            }
            if x.iter().all(|v| !v.is_zero()) {
                let mut full = vec![FieldElement::ZERO; h.cols()];
                for (j, &c) in support.iter().enumerate() {
                    full[c] = x[j];
                }
                out.push(full);
            }
            let mut i = 0;
            loop {
                if i == free.len() {
                    return;
                }
                assign[i] += 1;
                if assign[i] < q {
                    break;
                }
                assign[i] = 1;
                i += 1;
            }
        }
    }
}

fn support_count(n: usize, w_max: usize) -> f64 {
    (0..=w_max).map(|w| binomial(n as u64, w as u64).to_f64().unwrap_or(f64::INFINITY)).sum()
}

/// All weight-`w` vectors `x` with `H · x = y`.
pub fn solutions_of_weight(
    ctx: &FieldCtx,
    h: &Matrix,
    y: &[FieldElement],
    w: usize,
) -> Result<Vec<Vec<FieldElement>>, DecodeError> {
    if y.len() != h.rows() {
        return Err(DecodeError::DimensionMismatch { expected: h.rows(), got: y.len() });
    }
    let mut supports = binomial(h.cols() as u64, w as u64).to_f64().unwrap_or(f64::INFINITY);
    if w > h.rows() {
        // Underdetermined supports enumerate their free variables too.
        supports *= powf(ctx.q() as f64 - 1.0, w - h.rows());
    }
    if supports > SUPPORT_LIMIT {
        return Err(DecodeError::TooLarge { supports, limit: SUPPORT_LIMIT });
    }
    let mut out = Vec::new();
    if w == 0 {
        if y.iter().all(|v| v.is_zero()) {
            out.push(vec![FieldElement::ZERO; h.cols()]);
        }
        return Ok(out);
    }
    let mut solver = SupportSolver::new();
    let mut combos = Combinations::new(h.cols(), w);
    while let Some(s) = combos.next_subset() {
        solver.solve(ctx, h, s, y, &mut out);
    }
    Ok(out)
}

/// List every minimum-weight correction of `y` up to weight `w_max`, and
/// pick one uniformly with a generator seeded by `seed`.
pub fn decode_min_weight(
    ctx: &FieldCtx,
    h: &Matrix,
    y: &[FieldElement],
    w_max: usize,
    seed: u64,
) -> Result<DecodeResult, DecodeError> {
    let w_max = w_max.min(h.cols());
    let supports = support_count(h.cols(), w_max);
    if supports > SUPPORT_LIMIT {
        return Err(DecodeError::TooLarge { supports, limit: SUPPORT_LIMIT });
    }
    for w in 0..=w_max {
        let corrections = solutions_of_weight(ctx, h, y, w)?;
        if !corrections.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chosen = rng.gen_range(0..corrections.len());
            return Ok(DecodeResult { corrections, chosen, weight: w, seed });
        }
    }
    Err(DecodeError::NoSolutionWithinBound { w_max })
}

/// Number of weight-`|err|` vectors other than `err` sharing its syndrome.
pub fn collision_count(
    ctx: &FieldCtx,
    h: &Matrix,
    err: &[FieldElement],
) -> Result<usize, DecodeError> {
    let y = h.mul_vec(ctx, err);
    let w = err.iter().filter(|v| !v.is_zero()).count();
    let sols = solutions_of_weight(ctx, h, &y, w)?;
    debug_assert!(sols.iter().any(|s| s == err));
    Ok(sols.len() - 1)
}

/// A uniformly random weight-`w` vector: uniform support, uniform nonzero values.
pub fn random_weight_error<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    n: usize,
    w: usize,
    rng: &mut R,
) -> Vec<FieldElement> {
    let mut v = vec![FieldElement::ZERO; n];
    for i in rand::seq::index::sample(rng, n, w) {
        v[i] = ctx.random_nonzero(rng);
    }
    v
}

/// The generator for sample `index` of a run seeded with `seed`.
///
/// Each sample owns a ChaCha stream, so any partition of the samples across
/// workers reproduces the same table.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Empirical syndrome-collision statistics `F_{e→k×e}` for one code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionTable {
    pub n: usize,
    pub d: usize,
    pub e: usize,
    pub samples: u64,
    pub seed: u64,
    /// `counts[k]` = number of samples with exactly `k` other colliding errors.
    pub counts: BTreeMap<usize, u64>,
}

/// One CSV-ready row of a [`FractionTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionRow {
    pub k: usize,
    pub fraction: f64,
    pub stderr: f64,
}

impl FractionTable {
    /// Merge counts from another run over a disjoint range of samples.
    pub fn merge(&mut self, other: &FractionTable) {
        assert_eq!((self.n, self.d, self.e, self.seed), (other.n, other.d, other.e, other.seed));
        self.samples += other.samples;
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_default() += c;
        }
    }

    pub fn fraction(&self, k: usize) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    /// Binomial standard error of a fraction estimated from this table.
    pub fn stderr_of(&self, p: f64) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        libm::sqrt(p * (1.0 - p) / self.samples as f64)
    }

    /// `Σ_{k≥1} F_{e→k×e}`: the fraction of errors with any collision.
    pub fn total_collision_fraction(&self) -> f64 {
        self.counts.keys().filter(|&&k| k >= 1).map(|&k| self.fraction(k)).fold(0.0, |a, b| a + b)
    }

    /// `Σ_k k/(k+1) · F_{e→k×e}`: failure mass under uniform tie-breaking.
    pub fn weighted_failure(&self) -> f64 {
        self.counts
            .keys()
            .filter(|&&k| k >= 1)
            .map(|&k| k as f64 / (k + 1) as f64 * self.fraction(k))
            .fold(0.0, |a, b| a + b)
    }

    /// Rows for `k = 0..=max(1, largest observed k)`.
    pub fn rows(&self) -> Vec<FractionRow> {
        let kmax = self.counts.keys().copied().max().unwrap_or(0).max(1);
        (0..=kmax)
            .map(|k| {
                let fraction = self.fraction(k);
                FractionRow { k, fraction, stderr: self.stderr_of(fraction) }
            })
            .collect()
    }
}

/// Sample indices `range` of a fraction estimate for weight `e` against the
/// check matrix `h` of a distance-`d` code.
pub fn estimate_fraction_range(
    ctx: &FieldCtx,
    h: &Matrix,
    d: usize,
    e: usize,
    seed: u64,
    range: core::ops::Range<u64>,
) -> Result<FractionTable, DecodeError> {
    let n = h.cols();
    let supports = binomial(n as u64, e as u64).to_f64().unwrap_or(f64::INFINITY);
    if supports > SUPPORT_LIMIT {
        return Err(DecodeError::TooLarge { supports, limit: SUPPORT_LIMIT });
    }
    let mut table =
        FractionTable { n, d, e, samples: 0, seed, counts: BTreeMap::new() };
    for i in range {
        let mut rng = sample_rng(seed, i);
        let err = random_weight_error(ctx, n, e, &mut rng);
        let k = collision_count(ctx, h, &err)?;
        *table.counts.entry(k).or_default() += 1;
        table.samples += 1;
    }
    Ok(table)
}

/// Estimate `F_{e→k×e}` from `samples` uniform weight-`e` errors.
pub fn estimate_fraction_table(
    ctx: &FieldCtx,
    h: &Matrix,
    d: usize,
    e: usize,
    samples: u64,
    seed: u64,
) -> Result<FractionTable, DecodeError> {
    estimate_fraction_range(ctx, h, d, e, seed, 0..samples)
}

fn big_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n as f64 - i as f64).product()
}

fn powf(x: f64, e: usize) -> f64 {
    libm::pow(x, e as f64)
}

/// Closed-form bound on the uncorrectable fraction of weight-`e` errors
/// for the cases with a known formula:
///
/// | d | e | bound |
/// |---|---|-------|
/// | 4 | 2 | `(n−2)(n−3) / (2(q−1))` |
/// | 5 | 3 | collision with a weight-2 error: `(n−3)(n−4) / (2(q−1)²)` |
/// | 6 | 3 | `(n−3)(n−4)(n−5) / (6(q−1)²)` |
/// | 7 | 4 | collision with a weight-3 error: `(n−4)(n−5)(n−6) / (6(q−1)³)` |
/// | 8 | 4 | `(n−4)(n−5)(n−6)(n−7) / (24(q−1)³)` |
/// | 8 | 5 | `(56 W_8 + 126 W_9 + 252 W_10) / ((q−1)⁵ C(n,5))` |
/// | 9 | 5 | `(126 W_9 + 252 W_10) / ((q−1)⁵ C(n,5))` |
///
/// with `W_w` the MDS weight enumerator of the distance-`d` code.
pub fn analytic_uncorrectable_fraction(
    n: usize,
    d: usize,
    e: usize,
    q: u64,
) -> Result<f64, DecodeError> {
    let qm = q as f64 - 1.0;
    let v = match (d, e) {
        (4, 2) => falling(n - 2, 2) / (2.0 * qm),
        (5, 3) => falling(n - 3, 2) / (2.0 * qm * qm),
        (6, 3) => falling(n - 3, 3) / (6.0 * qm * qm),
        (7, 4) => falling(n - 4, 3) / (6.0 * powf(qm, 3)),
        (8, 4) => falling(n - 4, 4) / (24.0 * powf(qm, 3)),
        (8, 5) | (9, 5) => {
            let w = |k: usize| mds_weight_count(n, d, k, q).map(|x| big_f64(&x)).unwrap_or(0.0);
            let num = 56.0 * if d == 8 { w(8) } else { 0.0 } + 126.0 * w(9) + 252.0 * w(10);
            num / (powf(qm, 5) * big_f64(&binomial(n as u64, 5)))
        }
        _ => return Err(DecodeError::Uncovered { d, e }),
    };
    Ok(v.max(0.0))
}

/// Exact expected number of weight-`e2` vectors `e' ≠ e` sharing the
/// syndrome of a uniformly random weight-`e` error, for an `[n, ·, d]_q`
/// MDS code (`e, e2 < d` not required).
///
/// Counts pairs `(x, c)` with `|x| = e`, `c` a nonzero codeword and
/// `|x + c| = e2`: if `c` has weight `w`, `x` covers `a` of its support
/// and agrees with `−c` on `j` of those, then `|x + c| = w + e − a − j`.
pub fn expected_collisions(n: usize, d: usize, e: usize, e2: usize, q: u64) -> f64 {
    let qb = BigUint::from(q);
    let pow = |b: &BigUint, k: usize| num_traits::pow(b.clone(), k);
    let qm1 = &qb - 1u32;
    let qm2 = if q >= 2 { &qb - 2u32 } else { BigUint::zero() };
    let mut num = BigUint::zero();
    for w in d..=(e + e2).min(n) {
        let ww = mds_weight_count(n, d, w, q).expect("w ≤ n");
        let mut pairs = BigUint::zero();
        for a in 0..=e.min(w) {
            // j = w + e − e2 − a must lie in [0, a]
            let Some(j) = (w + e).checked_sub(e2 + a) else { continue };
            if j > a || e - a > n - w {
                continue;
            }
            pairs += binomial(w as u64, a as u64)
                * binomial(a as u64, j as u64)
                * pow(&qm2, a - j)
                * binomial((n - w) as u64, (e - a) as u64)
                * pow(&qm1, e - a);
        }
        num += ww * pairs;
    }
    let den = pow(&qm1, e) * binomial(n as u64, e as u64);
    big_f64(&num) / big_f64(&den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        for n in 0..8 {
            for w in 0..=n {
                let mut c = Combinations::new(n, w);
                let mut k = 0;
                while c.next_subset().is_some() {
                    k += 1;
                }
                assert_eq!(k, binomial(n as u64, w as u64).to_u64().unwrap());
            }
        }
    }

    #[test]
    fn covered_table() {
        let q = 2048;
        assert!((analytic_uncorrectable_fraction(20, 4, 2, q).unwrap() - 0.074743).abs() < 1e-6);
        assert!(
            (analytic_uncorrectable_fraction(20, 6, 3, q).unwrap() - 1.625e-4).abs() < 1e-6
        );
        assert_eq!(
            analytic_uncorrectable_fraction(20, 5, 4, q),
            Err(DecodeError::Uncovered { d: 5, e: 4 })
        );
        // Smallest lengths give nonnegative values.
        for (d, e) in [(4, 2), (5, 3), (6, 3), (7, 4), (8, 4), (8, 5), (9, 5)] {
            let n = d + e - 1;
            assert!(analytic_uncorrectable_fraction(n.max(2 * d - 1), d, e, q).unwrap() >= 0.0);
        }
    }

    #[test]
    fn collision_expectation_matches_closed_forms() {
        let q = 2048;
        for n in [20, 40, 80] {
            let rel = |a: f64, b: f64| ((a - b) / b).abs() < 1e-12;
            assert!(rel(
                expected_collisions(n, 4, 2, 2, q),
                analytic_uncorrectable_fraction(n, 4, 2, q).unwrap()
            ));
            assert!(rel(
                expected_collisions(n, 5, 3, 2, q),
                analytic_uncorrectable_fraction(n, 5, 3, q).unwrap()
            ));
            assert!(rel(
                expected_collisions(n, 6, 3, 3, q),
                analytic_uncorrectable_fraction(n, 6, 3, q).unwrap()
            ));
            assert!(rel(
                expected_collisions(n, 7, 4, 3, q),
                analytic_uncorrectable_fraction(n, 7, 4, q).unwrap()
            ));
            assert!(rel(
                expected_collisions(n, 8, 4, 4, q),
                analytic_uncorrectable_fraction(n, 8, 4, q).unwrap()
            ));
        }
    }
}
