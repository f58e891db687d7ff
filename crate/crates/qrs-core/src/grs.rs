//! Generalized Reed-Solomon codes: generators, duals, syndromes and the MDS
//! weight enumerator.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::gf::{FieldCtx, FieldElement, GfError};
use crate::matrix::{weight, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub enum GrsError {
    /// Two evaluation points coincide.
    RepeatedPoint(FieldElement),
    /// An evaluation point is zero.
    ZeroPoint,
    /// A column multiplier is zero.
    ZeroMultiplier,
    /// `0 < k ≤ n ≤ q − 1` is violated, or lengths disagree.
    BadDimension { n: usize, k: usize },
    /// Operand shapes disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// An exhaustive computation exceeds its work budget.
    TooLarge { work: f64, limit: f64 },
    /// Weight enumerator queried outside `0..=n`.
    OutOfRange { w: usize, n: usize },
    /// Malformed evaluation-point file.
    Format(String),
    Field(GfError),
}

impl fmt::Display for GrsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrsError::RepeatedPoint(a) => write!(f, "evaluation point {a} repeated"),
            GrsError::ZeroPoint => write!(f, "evaluation points must be nonzero"),
            GrsError::ZeroMultiplier => write!(f, "column multipliers must be nonzero"),
            GrsError::BadDimension { n, k } => write!(f, "invalid GRS dimensions n = {n}, k = {k}"),
            GrsError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            GrsError::TooLarge { work, limit } => {
                write!(f, "enumeration of {work:.3e} items exceeds the limit {limit:.0e}")
            }
            GrsError::OutOfRange { w, n } => write!(f, "weight {w} outside 0..={n}"),
            GrsError::Format(m) => write!(f, "malformed evaluation-point file: {m}"),
            GrsError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GrsError {}

impl From<GfError> for GrsError {
    fn from(e: GfError) -> Self {
        GrsError::Field(e)
    }
}

/// Work limit for exhaustive codeword enumeration (`q^k · n`).
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

/// `GRS_k(α, v)`: the codewords `(v_j f(α_j))_j` for `deg f < k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrsCode {
    k: usize,
    alpha: Vec<FieldElement>,
    mult: Vec<FieldElement>,
}

/// Check that `alpha` holds distinct nonzero field elements.
pub fn validate_points(ctx: &FieldCtx, alpha: &[FieldElement]) -> Result<(), GrsError> {
    let mut seen = alloc::vec![false; ctx.q() as usize];
    for &a in alpha {
        ctx.elem(a.bits() as u64)?;
        if a.is_zero() {
            return Err(GrsError::ZeroPoint);
        }
        if core::mem::replace(&mut seen[a.bits() as usize], true) {
            return Err(GrsError::RepeatedPoint(a));
        }
    }
    Ok(())
}

impl GrsCode {
    pub fn new(
        ctx: &FieldCtx,
        k: usize,
        alpha: Vec<FieldElement>,
        mult: Vec<FieldElement>,
    ) -> Result<Self, GrsError> {
        let n = alpha.len();
        if mult.len() != n {
            return Err(GrsError::DimensionMismatch { expected: n, got: mult.len() });
        }
        if k == 0 || k > n || n as u32 >= ctx.q() {
            return Err(GrsError::BadDimension { n, k });
        }
        validate_points(ctx, &alpha)?;
        for &m in &mult {
            ctx.elem(m.bits() as u64)?;
            if m.is_zero() {
                return Err(GrsError::ZeroMultiplier);
            }
        }
        Ok(GrsCode { k, alpha, mult })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &[FieldElement] {
        &self.alpha
    }

    pub fn mult(&self) -> &[FieldElement] {
        &self.mult
    }

    /// Row `i` (0-based) is `(mult_j · α_j^i)_j`.
    pub fn generator_matrix(&self, ctx: &FieldCtx) -> Matrix {
        power_matrix(ctx, self.k, &self.alpha, &self.mult)
    }

    /// The dual code `GRS_{n−k}(α, u)`.
    pub fn dual(&self, ctx: &FieldCtx) -> GrsCode {
        let u = dual_multipliers(ctx, &self.alpha, &self.mult);
        GrsCode { k: self.n() - self.k, alpha: self.alpha.clone(), mult: u }
    }

    /// Exact minimum distance by enumerating every nonzero message.
    pub fn min_distance_bruteforce(&self, ctx: &FieldCtx) -> Result<usize, GrsError> {
        let work = libm::pow(ctx.q() as f64, self.k as f64) * self.n() as f64;
        if work > BRUTE_FORCE_LIMIT {
            return Err(GrsError::TooLarge { work, limit: BRUTE_FORCE_LIMIT });
        }
        let g = self.generator_matrix(ctx);
        let mut best = self.n();
        for_each_codeword(ctx, &g, |c| {
            let w = weight(c);
            if w > 0 && w < best {
                best = w;
            }
        });
        Ok(best)
    }
}

/// `k × n` matrix with entries `mult_j · α_j^i`.
pub fn power_matrix(
    ctx: &FieldCtx,
    k: usize,
    alpha: &[FieldElement],
    mult: &[FieldElement],
) -> Matrix {
    let n = alpha.len();
    let mut m = Matrix::zeros(k, n);
    for j in 0..n {
        let mut p = mult[j];
        for i in 0..k {
            m.set(i, j, p);
            p = ctx.mul(p, alpha[j]);
        }
    }
    m
}

/// Multipliers `u` of the dual: `u_i^{-1} = v_i · Π_{j≠i} (α_i − α_j)`.
pub fn dual_multipliers(
    ctx: &FieldCtx,
    alpha: &[FieldElement],
    v: &[FieldElement],
) -> Vec<FieldElement> {
    (0..alpha.len())
        .map(|i| {
            let prod = (0..alpha.len())
                .filter(|&j| j != i)
                .fold(v[i], |acc, j| ctx.mul(acc, ctx.sub(alpha[i], alpha[j])));
            ctx.inv(prod).expect("distinct points and nonzero multipliers")
        })
        .collect()
}

/// Calls `visit` on every codeword `m·G`, including zero.
pub fn for_each_codeword(ctx: &FieldCtx, g: &Matrix, mut visit: impl FnMut(&[FieldElement])) {
    let (k, n) = (g.rows(), g.cols());
    let q = ctx.q();
    let mut msg = alloc::vec![0u32; k];
    let mut word = alloc::vec![FieldElement::ZERO; n];
    loop {
        visit(&word);
        // Odometer increment; keep `word` in sync incrementally.
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            let old = ctx.el(msg[i]);
            msg[i] = (msg[i] + 1) % q;
            let new = ctx.el(msg[i]);
            let delta = ctx.add(old, new);
            for (c, w) in word.iter_mut().enumerate() {
                *w = ctx.add(*w, ctx.mul(delta, g.get(i, c)));
            }
            if msg[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// `H · e`.
pub fn syndrome(
    ctx: &FieldCtx,
    h: &Matrix,
    e: &[FieldElement],
) -> Result<Vec<FieldElement>, GrsError> {
    if h.cols() != e.len() {
        return Err(GrsError::DimensionMismatch { expected: h.cols(), got: e.len() });
    }
    Ok(h.mul_vec(ctx, e))
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of weight-`w` codewords of an `[n, ·, d]_q` MDS code:
/// `C(n,w) Σ_{j=0}^{w−d} (−1)^j C(w,j) (q^{w−d+1−j} − 1)`.
///
/// `W_0 = 1` and `W_w = 0` for `0 < w < d`.
pub fn mds_weight_count(n: usize, d: usize, w: usize, q: u64) -> Result<BigUint, GrsError> {
    if w > n {
        return Err(GrsError::OutOfRange { w, n });
    }
    if w == 0 {
        return Ok(BigUint::one());
    }
    if w < d {
        return Ok(BigUint::zero());
    }
    let qb = BigInt::from(q);
    let mut sum = BigInt::zero();
    for j in 0..=(w - d) {
        let term = BigInt::from(binomial(w as u64, j as u64))
            * (num_traits::pow(qb.clone(), w - d + 1 - j) - 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    debug_assert!(!sum.is_negative());
    Ok(binomial(n as u64, w as u64) * sum.to_biguint().expect("MDS weight count is nonnegative"))
}

/// `n` distinct nonzero evaluation points, uniformly at random.
pub fn random_points<R: Rng + ?Sized>(ctx: &FieldCtx, n: usize, rng: &mut R) -> Vec<FieldElement> {
    assert!((n as u32) < ctx.q(), "at most q − 1 distinct nonzero points exist");
    let mut all: Vec<FieldElement> = ctx.nonzero_elements().collect();
    let (chosen, _) = all.partial_shuffle(rng, n);
    chosen.to_vec()
}

const REFERENCE_POINTS: &str = include_str!("../data/alpha_table.txt");

/// The shipped evaluation points for GF(2048), lengths 20 through 80.
pub fn reference_points(ctx: &FieldCtx, n: usize) -> Option<Vec<FieldElement>> {
    if ctx.s() != 11 || ctx.poly() != 0x805 {
        return None;
    }
    let mut lines = REFERENCE_POINTS.lines();
    while let Some(header) = lines.next() {
        let body = lines.next()?;
        if header.trim() == alloc::format!("n={n}") {
            return parse_points_file(ctx, &alloc::format!("{header}\n{body}")).ok();
        }
    }
    None
}

/// Parse `n=<int>` followed by `n` whitespace-separated decimal elements.
pub fn parse_points_file(ctx: &FieldCtx, text: &str) -> Result<Vec<FieldElement>, GrsError> {
    let mut toks = text.split_whitespace();
    let header = toks.next().ok_or_else(|| GrsError::Format("empty file".into()))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| GrsError::Format(alloc::format!("bad header {header:?}")))?;
    let pts = toks.map(|t| ctx.parse_element(t)).collect::<Result<Vec<_>, _>>()?;
    if pts.len() != n {
        return Err(GrsError::DimensionMismatch { expected: n, got: pts.len() });
    }
    validate_points(ctx, &pts)?;
    Ok(pts)
}

/// Render in the format read by [`parse_points_file`].
pub fn render_points_file(ctx: &FieldCtx, pts: &[FieldElement]) -> String {
    let body: Vec<String> = pts.iter().map(|&p| ctx.render_element(p)).collect();
    alloc::format!("n={}\n{}\n", pts.len(), body.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_errors() {
        let f = FieldCtx::with_degree(3).unwrap();
        let one = FieldElement::ONE;
        assert_eq!(
            GrsCode::new(&f, 1, alloc::vec![f.el(1), f.el(0)], alloc::vec![one; 2]),
            Err(GrsError::ZeroPoint)
        );
        assert_eq!(
            GrsCode::new(&f, 1, alloc::vec![f.el(2), f.el(2)], alloc::vec![one; 2]),
            Err(GrsError::RepeatedPoint(f.el(2)))
        );
        assert_eq!(
            GrsCode::new(&f, 1, alloc::vec![f.el(2), f.el(3)], alloc::vec![one, f.el(0)]),
            Err(GrsError::ZeroMultiplier)
        );
        assert!(matches!(
            GrsCode::new(&f, 3, alloc::vec![f.el(2), f.el(3)], alloc::vec![one; 2]),
            Err(GrsError::BadDimension { .. })
        ));
    }

    #[test]
    fn reference_points_present() {
        let f = FieldCtx::default();
        for n in 20..=80 {
            assert_eq!(reference_points(&f, n).unwrap().len(), n);
        }
        assert!(reference_points(&f, 19).is_none());
        let a20 = reference_points(&f, 20).unwrap();
        assert_eq!(a20[0].bits(), 108);
        assert_eq!(a20[19].bits(), 277);
    }

    #[test]
    fn points_file_roundtrip() {
        let f = FieldCtx::default();
        let a = reference_points(&f, 33).unwrap();
        assert_eq!(parse_points_file(&f, &render_points_file(&f, &a)).unwrap(), a);
        assert!(parse_points_file(&f, "n=3\n1 2\n").is_err());
        assert!(parse_points_file(&f, "n=2\n1 1\n").is_err());
    }
}
