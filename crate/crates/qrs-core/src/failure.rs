//! Closed-form failure bounds for one outer-code block: the three time-like
//! failure cases, the `D_k` kernel counts behind them, the space-like bound
//! built from weight-`e` error probabilities and list-decoding fractions,
//! and the union-bound total per outer round.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::decode::{analytic_uncorrectable_fraction, expected_collisions, DecodeError};
use crate::gf::{FieldCtx, FieldElement};
use crate::grs::{binomial, power_matrix};
use crate::matrix::Matrix;
use crate::noise::{
    cat_error_distribution, outer_round_length, CatModel, InstructionRates, NoiseError,
    PostSelection,
};

#[derive(Debug, Clone, PartialEq)]
pub enum FailureError {
    /// Parameters outside the model's domain.
    InvalidParams(String),
    /// No fraction table for `(d, e)` and the analytic fallback is disabled.
    MissingFractions { d: usize, e: usize },
    /// The right `M × M` block of the time-like check matrix is singular.
    ReductionFailure,
    Noise(NoiseError),
}

impl fmt::Display for FailureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureError::InvalidParams(m) => write!(f, "invalid failure-model parameters: {m}"),
            FailureError::MissingFractions { d, e } => {
                write!(f, "no collision fractions for d = {d}, e = {e}")
            }
            FailureError::ReductionFailure => {
                write!(f, "time-like check matrix cannot be reduced to [β | I]")
            }
            FailureError::Noise(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FailureError {}

impl From<NoiseError> for FailureError {
    fn from(e: NoiseError) -> Self {
        FailureError::Noise(e)
    }
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn binom_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// `D_k = Σ_{t=0}^{k−M−1} (−1)^t C(k,t) (q^{k−M−t} − 1)`, and `0` for
/// `k ≤ M`: the number of kernel vectors of an `M × k` matrix with every
/// `M` columns independent whose support is all `k` coordinates.
///
/// When no such matrix exists (`k` large against `q`) the alternating sum
/// is still defined and may be negative, so the value is signed.
pub fn d_k(k: usize, big_m: usize, q: u64) -> BigInt {
    if k <= big_m {
        return BigInt::zero();
    }
    let qb = BigInt::from(q);
    let mut acc = BigInt::zero();
    for t in 0..(k - big_m) {
        let term = BigInt::from(binomial(k as u64, t as u64))
            * (num_traits::pow(qb.clone(), k - big_m - t) - 1);
        if t % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn binomial_signed(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        BigInt::from(binomial(n as u64, k as u64))
    }
}

/// Exact check of `D_{k−1}/(q−1)^{k−1} = D_k/(q−1)^k + (−1)^{k−M} C(k−2, M−1)/(q−1)^{k−1}`
/// in rational arithmetic (`k ≥ 1`, `M ≥ 1`; binomials with a negative
/// argument are zero).
pub fn d_k_recurrence_check(k: usize, big_m: usize, q: u64) -> bool {
    if k == 0 || big_m == 0 {
        return false;
    }
    let qm1: BigInt = BigInt::from(q) - 1;
    let pow = |e: usize| num_traits::pow(qm1.clone(), e);
    let lhs = BigRational::new(d_k(k - 1, big_m, q), pow(k - 1));
    let mut rhs = BigRational::new(d_k(k, big_m, q), pow(k));
    let b = BigRational::new(binomial_signed(k as i64 - 2, big_m as i64 - 1), pow(k - 1));
    if (k as i64 - big_m as i64).rem_euclid(2) == 0 {
        rhs += b;
    } else {
        rhs -= b;
    }
    lhs == rhs
}

fn check_m(d: usize, big_m: usize) -> Result<(), FailureError> {
    if big_m < 1 || big_m + 2 > d {
        return Err(FailureError::InvalidParams(alloc::format!(
            "need 1 ≤ M ≤ d − 2, got d = {d}, M = {big_m}"
        )));
    }
    Ok(())
}

/// `D_k / (q−1)^k` as a float.
fn d_ratio(k: usize, big_m: usize, q: u64) -> f64 {
    let den = num_traits::pow(BigInt::from(q) - 1, k);
    let r = BigRational::new(d_k(k, big_m, q), den);
    big_f64(r.numer()) / big_f64(r.denom())
}

/// Case-1 time-like bound: `p_xx · n · Σ_{k=M+1}^{d−2} D_k/(q−1)^k`.
pub fn tlf_case1(n: usize, d: usize, big_m: usize, q: u64, p_xx: f64) -> Result<f64, FailureError> {
    check_m(d, big_m)?;
    let sum = (big_m + 1..=d - 2).fold(0.0, |acc, k| acc + d_ratio(k, big_m, q));
    Ok(p_xx * n as f64 * sum)
}

/// Case-2 time-like bound:
/// `p_xx · n · Σ_{k=M+1}^{d−1} (D_k/(q−1)^k + C(k−2, M−1)/(q−1)^{k−1})`.
pub fn tlf_case2(n: usize, d: usize, big_m: usize, q: u64, p_xx: f64) -> Result<f64, FailureError> {
    check_m(d, big_m)?;
    let qm1 = q as f64 - 1.0;
    let sum = (big_m + 1..=d - 1)
        .fold(0.0, |acc, k| {
            acc + d_ratio(k, big_m, q)
                + binom_f64(k as u64 - 2, big_m as u64 - 1) / libm::pow(qm1, (k - 1) as f64)
        });
    Ok(p_xx * n as f64 * sum)
}

/// Case-3 time-like bound: `(d−1)/(q−1) · P[Cat]^{M+1}` for `M ≥ 2`, and
/// `C(d,2)/(q−1) · P[Cat]²` for `M = 1`.
pub fn tlf_case3(d: usize, big_m: usize, q: u64, p_cat: f64) -> Result<f64, FailureError> {
    if big_m < 1 {
        return Err(FailureError::InvalidParams(alloc::format!("need M ≥ 1, got {big_m}")));
    }
    let qm1 = q as f64 - 1.0;
    Ok(if big_m == 1 {
        binom_f64(d as u64, 2) / qm1 * p_cat * p_cat
    } else {
        (d as f64 - 1.0) / qm1 * libm::pow(p_cat, (big_m + 1) as f64)
    })
}

/// Build the `M × (d−1)` block `β` of a time-like check matrix `[β | I]`
/// whose code has distance `M + 1`, with the first `d − 1` columns scaled
/// by `nu` (random nonzero scalars when `None`).
///
/// Starts from a GRS parity-check matrix of length `d − 1 + M` on random
/// distinct points (zero allowed) and row-reduces the right block to the
/// identity. The distance is verified when `d − 1 + M ≤ 12`.
pub fn build_time_like_matrix<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    d: usize,
    big_m: usize,
    nu: Option<&[FieldElement]>,
    rng: &mut R,
) -> Result<Matrix, FailureError> {
    check_m(d, big_m)?;
    let len = d - 1 + big_m;
    if len as u64 > ctx.q() as u64 {
        return Err(FailureError::InvalidParams(alloc::format!(
            "length d − 1 + M = {len} exceeds q = {}",
            ctx.q()
        )));
    }
    if let Some(nu) = nu {
        if nu.len() != d - 1 || nu.iter().any(|x| x.is_zero()) {
            return Err(FailureError::InvalidParams(
                "ν must have d − 1 nonzero entries".into(),
            ));
        }
    }
    let idx = rand::seq::index::sample(rng, ctx.q() as usize, len);
    let alpha: Vec<FieldElement> = idx.iter().map(|i| ctx.el(i as u32)).collect();
    let mult: Vec<FieldElement> = (0..len).map(|_| ctx.random_nonzero(rng)).collect();
    let h = power_matrix(ctx, big_m, &alpha, &mult);
    let right: Vec<usize> = (d - 1..len).collect();
    let left: Vec<usize> = (0..d - 1).collect();
    let inv = h.select_columns(&right).inverse(ctx).ok_or(FailureError::ReductionFailure)?;
    let mut beta = inv.mul(ctx, &h.select_columns(&left));
    let nu: Vec<FieldElement> = match nu {
        Some(v) => v.to_vec(),
        None => (0..d - 1).map(|_| ctx.random_nonzero(rng)).collect(),
    };
    for r in 0..beta.rows() {
        for c in 0..beta.cols() {
            beta.set(r, c, ctx.mul(beta.get(r, c), nu[c]));
        }
    }
    if len <= 12 {
        assert!(
            has_full_distance(ctx, &with_identity(&beta)),
            "time-like code must have distance M + 1"
        );
    }
    Ok(beta)
}

/// `[β | I]`.
pub fn with_identity(beta: &Matrix) -> Matrix {
    let (m, k) = (beta.rows(), beta.cols());
    let mut h = Matrix::zeros(m, k + m);
    for r in 0..m {
        h.row_mut(r)[..k].copy_from_slice(beta.row(r));
        h.set(r, k + r, FieldElement::ONE);
    }
    h
}

/// Whether the code with parity-check `h` (`M` rows of full rank) has
/// distance `M + 1`, i.e. every `M` columns are independent.
pub fn has_full_distance(ctx: &FieldCtx, h: &Matrix) -> bool {
    let m = h.rows();
    let mut subsets = crate::decode::Combinations::new(h.cols(), m);
    while let Some(cols) = subsets.next_subset() {
        if h.select_columns(cols).rank(ctx) < m {
            return false;
        }
    }
    true
}

/// Ordered Bell (Fubini) number `B_b`: the number of ordered set partitions
/// of a `b`-element set, via `B_b = Σ_{i=1}^{b} C(b,i) B_{b−i}`.
pub fn ordered_bell(b: usize) -> BigUint {
    let mut table: Vec<BigUint> = alloc::vec![BigUint::one()];
    for m in 1..=b {
        let v = (1..=m).map(|i| binomial(m as u64, i as u64) * &table[m - i]).sum();
        table.push(v);
    }
    table.swap_remove(b)
}

/// Per-qudit error probabilities feeding the weight-`e` bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeightSources {
    /// Static sources: last consumption, idling and teleportation.
    pub p_static: f64,
    /// Adaptive: one attempted round of Z checks.
    pub p_z_round: f64,
    /// Adaptive: one inconsistent round of X checks.
    pub p_x_round: f64,
}

impl WeightSources {
    /// `p_static = P[ZZ] + N_OR·P[idle] + 6·P[ZZ]`,
    /// `p_zr = (d−1+M)(P[ZZ,C2] + P[ZZ])`, `p_xr = (d−1+M)·P[ZZ]`.
    pub fn from_model(cat: &CatModel, rates: &InstructionRates, n_outer: f64, checks: usize) -> Self {
        let c = checks as f64;
        WeightSources {
            p_static: cat.p_zz + n_outer * rates.p_idle + 6.0 * cat.p_zz,
            p_z_round: c * (cat.p_zz_c2 + cat.p_zz),
            p_x_round: c * cat.p_zz,
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Bound on the probability of a weight-`e` error:
/// `C(n,e) Σ_{a+b+c=e} e!/(a!b!c!) p_s^a B_b p_zr^b B_c p_xr^c`.
pub fn slf_weight_prob(e: usize, n: usize, src: &WeightSources) -> f64 {
    if e > n {
        return 0.0;
    }
    let bell: Vec<f64> =
        (0..=e).map(|b| ordered_bell(b).to_f64().unwrap_or(f64::INFINITY)).collect();
    let ef = factorial(e);
    let mut sum = 0.0;
    for a in 0..=e {
        for b in 0..=e - a {
            let c = e - a - b;
            let coef = ef / (factorial(a) * factorial(b) * factorial(c));
            sum += coef
                * libm::pow(src.p_static, a as f64)
                * bell[b]
                * libm::pow(src.p_z_round, b as f64)
                * bell[c]
                * libm::pow(src.p_x_round, c as f64);
        }
    }
    binom_f64(n as u64, e as u64) * sum
}

/// Relative term size at which the `P[≥w]` tail is truncated.
pub const TAIL_CUTOFF: f64 = 1e-3;

/// `P[≥w]`: weight probabilities summed from `w` until a term falls below
/// [`TAIL_CUTOFF`] of the running total. Returns the sum and the last
/// (neglected-scale) term.
pub fn weight_tail(w: usize, n: usize, src: &WeightSources) -> (f64, f64) {
    let mut total = 0.0;
    let mut last = 0.0;
    for e in w..=n {
        let term = slf_weight_prob(e, n, src);
        total += term;
        last = term;
        if term <= TAIL_CUTOFF * total {
            break;
        }
    }
    (total, last)
}

/// Uniform-tie failure masses `Σ_k k/(k+1) F_{e→k×e}` per `(n, d, e)`.
///
/// Missing entries fall back to `E/(1+E)` with `E` the exact expected number
/// of same-weight colliding errors (an upper bound since `k/(k+1)` is
/// concave), unless the fallback is disabled.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollisionFractions {
    pub weighted: BTreeMap<(usize, usize, usize), f64>,
    pub allow_analytic: bool,
}

impl CollisionFractions {
    /// Empty set using the analytic fallback everywhere.
    pub fn analytic() -> Self {
        CollisionFractions { weighted: BTreeMap::new(), allow_analytic: true }
    }

    pub fn insert(&mut self, n: usize, d: usize, e: usize, weighted_failure: f64) {
        self.weighted.insert((n, d, e), weighted_failure);
    }

    pub fn get(&self, n: usize, d: usize, e: usize, q: u64) -> Result<f64, FailureError> {
        if let Some(&v) = self.weighted.get(&(n, d, e)) {
            return Ok(v);
        }
        if !self.allow_analytic {
            return Err(FailureError::MissingFractions { d, e });
        }
        let expected = expected_collisions(n, d, e, e, q);
        Ok(expected / (1.0 + expected))
    }
}

fn analytic(n: usize, d: usize, e: usize, q: u64) -> Result<f64, FailureError> {
    analytic_uncorrectable_fraction(n, d, e, q).map_err(|err| match err {
        DecodeError::Uncovered { d, e } => FailureError::MissingFractions { d, e },
        other => FailureError::InvalidParams(alloc::format!("{other}")),
    })
}

/// Space-like bound and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceLike {
    /// Total bound.
    pub slf: f64,
    /// The leading listed weight and its failing fraction.
    pub weight: usize,
    pub fraction: f64,
    /// For `d = 8`: the weight-5 fraction; zero otherwise.
    pub fraction2: f64,
    /// `P[≥w]` of the always-failing tail and its last term.
    pub tail: f64,
    pub tail_last_term: f64,
}

/// Space-like failure bound on one block per self-consistent round, for
/// outer distance `d ∈ 3..=9`.
pub fn slf_total(
    n: usize,
    d: usize,
    q: u64,
    src: &WeightSources,
    fractions: &CollisionFractions,
) -> Result<SpaceLike, FailureError> {
    let qm1 = q as f64 - 1.0;
    let p = |e: usize| slf_weight_prob(e, n, src);
    let nf = n as f64;
    let (weight, fraction, fraction2, tail_from) = match d {
        3 => (2, 1.0, 0.0, 3),
        4 => (2, fractions.get(n, 4, 2, q)?, 0.0, 3),
        5 => (
            3,
            (nf - 3.0) * (nf - 4.0) / (2.0 * qm1 * qm1) + fractions.get(n, 5, 3, q)?,
            0.0,
            4,
        ),
        6 => (3, fractions.get(n, 6, 3, q)?, 0.0, 4),
        7 => (
            4,
            (nf - 4.0) * (nf - 5.0) * (nf - 6.0) / (6.0 * libm::pow(qm1, 3.0))
                + fractions.get(n, 7, 4, q)?,
            0.0,
            5,
        ),
        8 => (4, analytic(n, 8, 4, q)?, analytic(n, 8, 5, q)?, 6),
        9 => (5, analytic(n, 9, 5, q)?, 0.0, 6),
        _ => {
            return Err(FailureError::InvalidParams(alloc::format!(
                "outer distance must be in 3..=9, got {d}"
            )))
        }
    };
    let (tail, tail_last_term) = weight_tail(tail_from, n, src);
    let mut slf = fraction.min(1.0) * p(weight) + tail;
    if d == 8 {
        slf += fraction2.min(1.0) * p(5);
    }
    Ok(SpaceLike { slf, weight, fraction, fraction2, tail, tail_last_term })
}

/// One point of the protocol parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProtocolParams {
    /// Outer-code length (gross-code grid columns).
    pub n: usize,
    /// Gross-code grid rows; `m − 2` carry data.
    pub m: usize,
    /// Outer-code distance.
    pub d: usize,
    /// Extra linear-combination checks per round.
    pub big_m: usize,
    /// Cat-state verification rounds.
    pub r: usize,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<(), FailureError> {
        if self.m < 3 || 2 * (self.d - 1) >= self.n || !(3..=9).contains(&self.d) {
            return Err(FailureError::InvalidParams(alloc::format!(
                "need m ≥ 3, 3 ≤ d ≤ 9 and 2(d−1) < n: {self:?}"
            )));
        }
        check_m(self.d, self.big_m)
    }

    /// Checks per round, `d − 1 + M`.
    pub fn checks(&self) -> usize {
        self.d - 1 + self.big_m
    }

    /// Logical qubits per block, `11 (n − 2(d−1))`.
    pub fn logical_per_block(&self) -> usize {
        11 * (self.n - 2 * (self.d - 1))
    }
}

/// Itemized failure probability of one block per outer round.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FailureBreakdown {
    pub tlf1: f64,
    pub tlf2: f64,
    pub tlf3: f64,
    pub slf: f64,
    pub cat_burst: f64,
    /// `2 (tlf1 + tlf2 + tlf3 + slf + cat_burst)`: both Pauli sectors.
    pub total: f64,
    /// `total / (11 (n − 2(d−1)) · N_OR)`.
    pub ler_per_lqr: f64,
    /// Idle rounds per outer round.
    pub n_outer_round: f64,
    pub p_cat: f64,
    pub tau_cat: f64,
    pub sources: WeightSources,
    pub space_like: SpaceLike,
}

/// Evaluate every failure term for one parameter point over GF(q).
pub fn total_failure(
    params: &ProtocolParams,
    q: u64,
    rates: &InstructionRates,
    ps: &PostSelection,
    fractions: &CollisionFractions,
) -> Result<FailureBreakdown, FailureError> {
    params.validate()?;
    rates.validate()?;
    ps.validate()?;
    let ProtocolParams { n, m, d, big_m, r } = *params;
    let cat = cat_error_distribution(n, r, ps, rates)?;
    let n_outer = outer_round_length(m, d, big_m, cat.timing.cat, cat.p_cat, rates)?;
    let tlf1 = tlf_case1(n, d, big_m, q, cat.p_zz)?;
    let tlf2 = tlf_case2(n, d, big_m, q, cat.p_zz)?;
    let tlf3 = tlf_case3(d, big_m, q, cat.p_cat)?;
    let sources = WeightSources::from_model(&cat, rates, n_outer, params.checks());
    let space_like = slf_total(n, d, q, &sources, fractions)?;
    let cat_burst = 2.0 * params.checks() as f64 * cat.p_cat_state_failure;
    let total = 2.0 * (tlf1 + tlf2 + tlf3 + space_like.slf + cat_burst);
    let ler_per_lqr = total / (params.logical_per_block() as f64 * n_outer);
    Ok(FailureBreakdown {
        tlf1,
        tlf2,
        tlf3,
        slf: space_like.slf,
        cat_burst,
        total,
        ler_per_lqr,
        n_outer_round: n_outer,
        p_cat: cat.p_cat,
        tau_cat: cat.timing.cat,
        sources,
        space_like,
    })
}
