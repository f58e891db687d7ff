//! Bases of GF(2^s) over GF(2) and the qudit-to-qubit expansion maps.
//!
//! A qudit X-type coefficient `γ` expands to its coordinates in the basis `B`
//! (`c_k = Tr(γ·B*_k)`), while a Z-type coefficient `δ` expands against the
//! basis itself (`c_k = Tr(δ·B_k)`). With this pairing the binary symplectic
//! product of the two expansions is `Tr(γ·δ)`, so qudit and qubit commutation
//! agree. For a self-dual basis both maps coincide.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::gf::{FieldCtx, FieldElement, GfError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisError {
    /// Wrong number of elements for the extension degree.
    WrongLength { expected: usize, got: usize },
    /// The elements are GF(2)-linearly dependent.
    Dependent,
    /// The trace Gram matrix is singular. Cannot happen for a genuine basis.
    SingularGram,
    /// A basis file did not follow the `s=<int> poly=<int>` + elements layout.
    Format(String),
    /// A field element failed to parse.
    Field(GfError),
    /// Bases built over different fields were combined.
    FieldMismatch,
}

impl fmt::Display for BasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisError::WrongLength { expected, got } => {
                write!(f, "a basis needs {expected} elements, got {got}")
            }
            BasisError::Dependent => write!(f, "basis elements are linearly dependent over GF(2)"),
            BasisError::SingularGram => write!(f, "trace Gram matrix is singular"),
            BasisError::Format(m) => write!(f, "malformed basis file: {m}"),
            BasisError::Field(e) => write!(f, "{e}"),
            BasisError::FieldMismatch => write!(f, "bases belong to different fields"),
        }
    }
}

impl core::error::Error for BasisError {}

impl From<GfError> for BasisError {
    fn from(e: GfError) -> Self {
        BasisError::Field(e)
    }
}

/// GF(2)-rank of a set of bit vectors.
fn gf2_rank(vectors: &[u32]) -> usize {
    let mut rows: Vec<u32> = vectors.to_vec();
    let mut rank = 0;
    for bit in 0..32 {
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(rank, p);
            for i in 0..rows.len() {
                if i != rank && rows[i] >> bit & 1 == 1 {
                    rows[i] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Invert an `s×s` GF(2) matrix whose row `i` is the bitmask `rows[i]`.
fn gf2_inverse(rows: &[u32]) -> Option<Vec<u32>> {
    let n = rows.len();
    let mut a = rows.to_vec();
    let mut inv: Vec<u32> = (0..n).map(|i| 1 << i).collect();
    for col in 0..n {
        let p = (col..n).find(|&i| a[i] >> col & 1 == 1)?;
        a.swap(col, p);
        inv.swap(col, p);
        for i in 0..n {
            if i != col && a[i] >> col & 1 == 1 {
                a[i] ^= a[col];
                inv[i] ^= inv[col];
            }
        }
    }
    Some(inv)
}

/// An ordered basis `(B_0, …, B_{s−1})` of GF(2^s) over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuditBasis {
    elements: Vec<FieldElement>,
    s: u32,
    poly: u32,
}

impl QuditBasis {
    /// Validate `elements` as a basis of the field of `ctx`.
    pub fn new(ctx: &FieldCtx, elements: Vec<FieldElement>) -> Result<Self, BasisError> {
        let s = ctx.s() as usize;
        if elements.len() != s {
            return Err(BasisError::WrongLength { expected: s, got: elements.len() });
        }
        for &e in &elements {
            ctx.elem(e.bits() as u64)?;
        }
        let bits: Vec<u32> = elements.iter().map(|e| e.bits()).collect();
        if gf2_rank(&bits) != s {
            return Err(BasisError::Dependent);
        }
        Ok(QuditBasis { elements, s: ctx.s(), poly: ctx.poly() })
    }

    /// The monomial basis `(1, t, …, t^{s−1})`.
    pub fn polynomial(ctx: &FieldCtx) -> Self {
        let els = (0..ctx.s()).map(|i| ctx.el(1 << i)).collect();
        QuditBasis::new(ctx, els).expect("monomials form a basis")
    }

    /// The self-dual (normal) basis shipped for GF(2048) with `t^11 + t^2 + 1`.
    ///
    /// Returns `None` for any other field.
    pub fn default_self_dual(ctx: &FieldCtx) -> Option<Self> {
        if ctx.s() != 11 || ctx.poly() != 0x805 {
            return None;
        }
        const ELEMENTS: [u32; 11] = [97, 1035, 576, 650, 748, 1778, 1443, 1672, 237, 1139, 1802];
        let els = ELEMENTS.iter().map(|&v| ctx.el(v)).collect();
        Some(QuditBasis::new(ctx, els).expect("shipped basis is independent"))
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when this basis was built over the field of `ctx`.
    pub fn belongs_to(&self, ctx: &FieldCtx) -> bool {
        self.s == ctx.s() && self.poly == ctx.poly()
    }

    fn assert_ctx(&self, ctx: &FieldCtx) {
        assert!(self.belongs_to(ctx), "basis used with a foreign field context");
    }

    /// Trace Gram matrix `G_ij = Tr(B_i·B_j)`.
    pub fn gram(&self, ctx: &FieldCtx) -> Vec<Vec<u8>> {
        self.assert_ctx(ctx);
        self.elements
            .iter()
            .map(|&a| self.elements.iter().map(|&b| ctx.trace(ctx.mul(a, b))).collect())
            .collect()
    }

    /// True iff `Tr(B_i·B_j) = δ_ij`.
    pub fn is_self_dual(&self, ctx: &FieldCtx) -> bool {
        self.gram(ctx)
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &g)| g == (i == j) as u8))
    }

    /// The trace-dual basis `B*` with `Tr(B_i·B*_j) = δ_ij`.
    pub fn dual_basis(&self, ctx: &FieldCtx) -> Result<QuditBasis, BasisError> {
        let gram = self.gram(ctx);
        let rows: Vec<u32> = gram
            .iter()
            .map(|r| r.iter().enumerate().fold(0u32, |m, (j, &g)| m | (g as u32) << j))
            .collect();
        let inv = gf2_inverse(&rows).ok_or(BasisError::SingularGram)?;
        // B*_j = Σ_k (G^{-1})_{kj} B_k; the Gram matrix is symmetric, so is its inverse.
        let dual = (0..self.len())
            .map(|j| {
                (0..self.len())
                    .filter(|&k| inv[j] >> k & 1 == 1)
                    .fold(FieldElement::ZERO, |acc, k| ctx.add(acc, self.elements[k]))
            })
            .collect();
        QuditBasis::new(ctx, dual)
    }

    /// Coordinates `c` with `a = Σ c_i B_i`, i.e. `c_i = Tr(a·B*_i)`.
    pub fn expand(&self, ctx: &FieldCtx, a: FieldElement) -> Vec<u8> {
        let dual = self.dual_basis(ctx).expect("basis has an invertible Gram matrix");
        dual.elements.iter().map(|&d| ctx.trace(ctx.mul(a, d))).collect()
    }

    /// Inverse of [`QuditBasis::expand`]: `Σ c_i B_i`.
    pub fn contract(&self, ctx: &FieldCtx, bits: &[u8]) -> FieldElement {
        self.assert_ctx(ctx);
        assert_eq!(bits.len(), self.len(), "coordinate vector has wrong length");
        bits.iter()
            .zip(&self.elements)
            .filter(|(&b, _)| b & 1 == 1)
            .fold(FieldElement::ZERO, |acc, (_, &e)| ctx.add(acc, e))
    }

    /// Uniformly random ordered basis, by rejection sampling.
    pub fn random<R: Rng + ?Sized>(ctx: &FieldCtx, rng: &mut R) -> Self {
        loop {
            let els: Vec<FieldElement> = (0..ctx.s()).map(|_| ctx.random(rng)).collect();
            if let Ok(b) = QuditBasis::new(ctx, els) {
                return b;
            }
        }
    }

    /// Every self-dual basis, as an unordered set listed in increasing
    /// order, found by brute force. Feasible only for small `s`.
    pub fn search_self_dual(ctx: &FieldCtx) -> Vec<QuditBasis> {
        assert!(ctx.s() <= 4, "self-dual basis search is brute force; s ≤ 4 only");
        // Candidates are the elements with Tr(x^2) = Tr(x) = 1.
        let cands: Vec<FieldElement> =
            ctx.nonzero_elements().filter(|&x| ctx.trace(ctx.mul(x, x)) == 1).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        search(ctx, &cands, 0, &mut chosen, &mut out);
        out
    }

    /// Parse the text format `s=<int> poly=<int>` followed by `s` decimal elements.
    pub fn parse_file(text: &str) -> Result<(FieldCtx, QuditBasis), BasisError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| BasisError::Format("empty file".into()))?;
        let (s, poly) = parse_header(header)?;
        let ctx = FieldCtx::new(s, poly)?;
        let els = lines.map(|l| ctx.parse_element(l)).collect::<Result<Vec<_>, _>>()?;
        let b = QuditBasis::new(&ctx, els)?;
        Ok((ctx, b))
    }

    /// Render in the format read by [`QuditBasis::parse_file`].
    pub fn render_file(&self, ctx: &FieldCtx) -> String {
        self.assert_ctx(ctx);
        let mut out = alloc::format!("s={} poly={}\n", ctx.s(), ctx.poly());
        for e in &self.elements {
            out.push_str(&ctx.render_element(*e));
            out.push('\n');
        }
        out
    }
}

fn parse_header(line: &str) -> Result<(u32, u32), BasisError> {
    let mut s = None;
    let mut poly = None;
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| BasisError::Format(alloc::format!("bad header token {tok:?}")))?;
        let v: u32 = v
            .parse()
            .map_err(|_| BasisError::Format(alloc::format!("bad integer in {tok:?}")))?;
        match k {
            "s" => s = Some(v),
            "poly" => poly = Some(v),
            _ => return Err(BasisError::Format(alloc::format!("unknown header key {k:?}"))),
        }
    }
    match (s, poly) {
        (Some(s), Some(p)) => Ok((s, p)),
        _ => Err(BasisError::Format("header needs s=<int> poly=<int>".into())),
    }
}

fn search(
    ctx: &FieldCtx,
    cands: &[FieldElement],
    start: usize,
    chosen: &mut Vec<FieldElement>,
    out: &mut Vec<QuditBasis>,
) {
    if chosen.len() == ctx.s() as usize {
        if let Ok(b) = QuditBasis::new(ctx, chosen.clone()) {
            out.push(b);
        }
        return;
    }
    for i in start..cands.len() {
        let c = cands[i];
        if chosen.iter().all(|&x| ctx.trace(ctx.mul(x, c)) == 0) {
            chosen.push(c);
            search(ctx, cands, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// One basis per code coordinate: the qudit-to-qubit mapping `𝓑 = (B_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSet {
    per_coordinate: Vec<QuditBasis>,
}

impl MappingSet {
    pub fn new(per_coordinate: Vec<QuditBasis>) -> Result<Self, BasisError> {
        if let Some(first) = per_coordinate.first() {
            if per_coordinate.iter().any(|b| b.s != first.s || b.poly != first.poly) {
                return Err(BasisError::FieldMismatch);
            }
        }
        Ok(MappingSet { per_coordinate })
    }

    /// The same basis on all `n` coordinates.
    pub fn uniform(basis: QuditBasis, n: usize) -> Self {
        MappingSet { per_coordinate: alloc::vec![basis; n] }
    }

    /// An independent uniformly random basis on each coordinate.
    pub fn random<R: Rng + ?Sized>(ctx: &FieldCtx, n: usize, rng: &mut R) -> Self {
        MappingSet { per_coordinate: (0..n).map(|_| QuditBasis::random(ctx, rng)).collect() }
    }

    pub fn len(&self) -> usize {
        self.per_coordinate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_coordinate.is_empty()
    }

    pub fn get(&self, i: usize) -> &QuditBasis {
        &self.per_coordinate[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &QuditBasis> {
        self.per_coordinate.iter()
    }
}
