//! Quantum Reed-Solomon CSS codes over Galois qudits and their binarization.
//!
//! For evaluation points `α` and multipliers `v`, the X checks are the rows
//! `(v_b α_b^a)_b` and the Z checks the rows `(u_b α_b^a)_b` for
//! `a = 0..d−2`, where `u` are the dual multipliers of `v`. Because
//! `Σ_b v_b u_b α_b^j = 0` for `j ≤ n − 2`, the two check matrices are
//! orthogonal whenever `2(d−1) < n`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::basis::{MappingSet, QuditBasis};
use crate::gf::{FieldCtx, FieldElement};
use crate::grs::{dual_multipliers, power_matrix, validate_points, GrsError};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QrsError {
    /// Parameters outside `2 ≤ d`, `2(d−1) < n < q`, or bad points/multipliers.
    BadParameters(String),
    /// Mapping length or field differs from the code.
    BasisMismatch,
    /// Vectors of different length were paired.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for QrsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QrsError::BadParameters(m) => write!(f, "invalid quantum RS parameters: {m}"),
            QrsError::BasisMismatch => write!(f, "mapping does not match the code length or field"),
            QrsError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for QrsError {}

impl From<GrsError> for QrsError {
    fn from(e: GrsError) -> Self {
        QrsError::BadParameters(alloc::format!("{e}"))
    }
}

/// `[[n, n − 2(d−1), d]]_q` CSS code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrsCode {
    n: usize,
    d: usize,
    alpha: Vec<FieldElement>,
    v: Vec<FieldElement>,
    u: Vec<FieldElement>,
    hx: Matrix,
    hz: Matrix,
}

/// Build the code and assert `hx · hz^T = 0`.
pub fn build_qrs(
    ctx: &FieldCtx,
    n: usize,
    d: usize,
    alpha: &[FieldElement],
    v: &[FieldElement],
) -> Result<QrsCode, QrsError> {
    if d < 2 || 2 * (d - 1) >= n || n as u32 >= ctx.q() {
        return Err(QrsError::BadParameters(alloc::format!(
            "need d ≥ 2 and 2(d−1) < n < q, got n = {n}, d = {d}, q = {}",
            ctx.q()
        )));
    }
    if alpha.len() != n || v.len() != n {
        return Err(QrsError::DimensionMismatch { expected: n, got: alpha.len().min(v.len()) });
    }
    validate_points(ctx, alpha)?;
    if v.iter().any(|x| x.is_zero()) {
        return Err(GrsError::ZeroMultiplier.into());
    }
    let u = dual_multipliers(ctx, alpha, v);
    let hx = power_matrix(ctx, d - 1, alpha, v);
    let hz = power_matrix(ctx, d - 1, alpha, &u);
    assert!(hx.mul(ctx, &hz.transpose()).is_zero(), "hx · hz^T must vanish");
    Ok(QrsCode { n, d, alpha: alpha.to_vec(), v: v.to_vec(), u, hx, hz })
}

impl QrsCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of logical qudits, `n − 2(d−1)`.
    pub fn logical_qudits(&self) -> usize {
        self.n - 2 * (self.d - 1)
    }

    pub fn alpha(&self) -> &[FieldElement] {
        &self.alpha
    }

    pub fn v(&self) -> &[FieldElement] {
        &self.v
    }

    pub fn u(&self) -> &[FieldElement] {
        &self.u
    }

    /// X-check matrix, `(d−1) × n`.
    pub fn hx(&self) -> &Matrix {
        &self.hx
    }

    /// Z-check matrix, `(d−1) × n`.
    pub fn hz(&self) -> &Matrix {
        &self.hz
    }
}

/// Binary stabilizer matrices of a binarized qudit CSS code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarizedCss {
    s: usize,
    x_rows: Vec<Vec<u8>>,
    z_rows: Vec<Vec<u8>>,
}

impl BinarizedCss {
    pub fn x_rows(&self) -> &[Vec<u8>] {
        &self.x_rows
    }

    pub fn z_rows(&self) -> &[Vec<u8>] {
        &self.z_rows
    }

    /// Every X row has even overlap with every Z row.
    pub fn is_orthogonal(&self) -> bool {
        self.x_rows.iter().all(|x| self.z_rows.iter().all(|z| gf2_dot(x, z) == 0))
    }

    /// Listing text: one `idx: [g g … g]` line per row, 1-based, with each
    /// qudit's `s` bits as one group.
    pub fn render_rows(&self, rows: &[Vec<u8>]) -> String {
        let mut out = String::new();
        for (i, row) in rows.iter().enumerate() {
            out.push_str(&alloc::format!("{}: [", i + 1));
            for (g, chunk) in row.chunks(self.s).enumerate() {
                if g > 0 {
                    out.push(' ');
                }
                chunk.iter().for_each(|&b| out.push(if b == 1 { '1' } else { '0' }));
            }
            out.push_str("]\n");
        }
        out
    }

    pub fn render_x(&self) -> String {
        self.render_rows(&self.x_rows)
    }

    pub fn render_z(&self) -> String {
        self.render_rows(&self.z_rows)
    }
}

/// GF(2) inner product of two bit vectors.
pub fn gf2_dot(a: &[u8], b: &[u8]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (x, y)| acc ^ (x & y))
}

/// GF(2) rank of a set of bit vectors.
pub fn gf2_rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        if let Some(p) = (rank..m.len()).find(|&i| m[i][c] == 1) {
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank && m[i][c] == 1 {
                    let pivot = m[rank].clone();
                    m[i].iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            rank += 1;
        }
    }
    rank
}

fn check_mapping(ctx: &FieldCtx, n: usize, mapping: &MappingSet) -> Result<(), QrsError> {
    if mapping.len() != n || mapping.iter().any(|b| !b.belongs_to(ctx)) {
        return Err(QrsError::BasisMismatch);
    }
    Ok(())
}

/// Binarize one qudit check matrix. Row `s·a + i`, column `s·b + k` holds
/// `Tr(R_i · H_ab · C_{b,k})`, where `R` is the basis of the first coordinate
/// (scaling each check across its GF(2)-line) and `C_b` is `B_b*` for X
/// checks and `B_b` for Z checks.
fn binarize_matrix(
    ctx: &FieldCtx,
    h: &Matrix,
    row_basis: &QuditBasis,
    col_bases: &[QuditBasis],
) -> Vec<Vec<u8>> {
    let s = ctx.s() as usize;
    let mut rows = Vec::with_capacity(h.rows() * s);
    for a in 0..h.rows() {
        for &r in row_basis.elements() {
            let mut bits = Vec::with_capacity(h.cols() * s);
            for (b, cb) in col_bases.iter().enumerate() {
                let scaled = ctx.mul(r, h.get(a, b));
                bits.extend(cb.elements().iter().map(|&c| ctx.trace(ctx.mul(scaled, c))));
            }
            rows.push(bits);
        }
    }
    rows
}

/// Expand the code's qudit checks to qubit stabilizers under `mapping`.
pub fn binarize(
    ctx: &FieldCtx,
    code: &QrsCode,
    mapping: &MappingSet,
) -> Result<BinarizedCss, QrsError> {
    check_mapping(ctx, code.n, mapping)?;
    let duals = mapping
        .iter()
        .map(|b| b.dual_basis(ctx))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| QrsError::BasisMismatch)?;
    let direct: Vec<QuditBasis> = mapping.iter().cloned().collect();
    let row_basis = mapping.get(0);
    Ok(BinarizedCss {
        s: ctx.s() as usize,
        x_rows: binarize_matrix(ctx, &code.hx, row_basis, &duals),
        z_rows: binarize_matrix(ctx, &code.hz, row_basis, &direct),
    })
}

/// Expand an X-type qudit vector to qubit bits (`Tr(γ_b · B*_{b,k})`).
pub fn expand_x(
    ctx: &FieldCtx,
    mapping: &MappingSet,
    v: &[FieldElement],
) -> Result<Vec<u8>, QrsError> {
    check_mapping(ctx, v.len(), mapping)?;
    Ok(v.iter().zip(mapping.iter()).flat_map(|(&x, b)| b.expand(ctx, x)).collect())
}

/// Expand a Z-type qudit vector to qubit bits (`Tr(δ_b · B_{b,k})`).
pub fn expand_z(
    ctx: &FieldCtx,
    mapping: &MappingSet,
    v: &[FieldElement],
) -> Result<Vec<u8>, QrsError> {
    check_mapping(ctx, v.len(), mapping)?;
    Ok(v.iter()
        .zip(mapping.iter())
        .flat_map(|(&x, b)| b.elements().iter().map(move |&c| ctx.trace(ctx.mul(x, c))))
        .collect())
}

/// `Σ γ_i e_i`: the syndrome entry an X check `γ` reports against a Z error `e`.
pub fn qudit_pairing(
    ctx: &FieldCtx,
    stab: &[FieldElement],
    err: &[FieldElement],
) -> Result<FieldElement, QrsError> {
    if stab.len() != err.len() {
        return Err(QrsError::DimensionMismatch { expected: stab.len(), got: err.len() });
    }
    Ok(ctx.dot(stab, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_errors() {
        let f = FieldCtx::with_degree(4).unwrap();
        let a: Vec<_> = (1..=5).map(|x| f.el(x)).collect();
        let v = alloc::vec![FieldElement::ONE; 5];
        assert!(build_qrs(&f, 5, 4, &a, &v).is_err());
        assert!(build_qrs(&f, 5, 1, &a, &v).is_err());
        assert!(build_qrs(&f, 5, 3, &a[..4], &v).is_err());
        let code = build_qrs(&f, 5, 3, &a, &v).unwrap();
        assert_eq!(code.logical_qudits(), 1);
        let m = MappingSet::uniform(QuditBasis::polynomial(&f), 4);
        assert_eq!(binarize(&f, &code, &m), Err(QrsError::BasisMismatch));
    }
}
