//! Galois-qudit stabilizer simulation of the cat-state, stabilizer
//! measurement and teleportation protocols, with fault injection.
//!
//! States are stabilizer states of `n` qudits over GF(q), tracked linearly:
//! a Pauli `X^x Z^z` is a pair of vectors, the operators `P^λ` (λ ∈ GF(q))
//! share one eigenvalue label in GF(q), and the label of `Σ c_i S_i` is
//! `Σ c_i v_i`. Two Paulis commute as families iff the symplectic form
//! `⟨P, Q⟩ = Σ_i x^P_i z^Q_i + x^Q_i z^P_i` vanishes, and applying a Pauli
//! error `E` shifts the label of every stabilizer `S` by `⟨S, E⟩`. Phases
//! are not tracked.
//!
//! The tableau keeps `n` stabilizers and `n` destabilizers with
//! `⟨S_i, D_j⟩ = δ_ij`, so determined outcomes cost `O(n²)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::gf::{FieldCtx, FieldElement};
use crate::matrix::{weight, Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableauError {
    /// A cat-state coefficient is zero.
    ZeroCoefficient { index: usize },
    /// A fault names a step that was not executed or a qudit the step does
    /// not touch.
    InvalidFaultLocation { step: usize },
    /// Operand sizes disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// Protocol parameters are unusable.
    BadParameters(String),
}

impl fmt::Display for TableauError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauError::ZeroCoefficient { index } => {
                write!(f, "cat coefficient {index} is zero")
            }
            TableauError::InvalidFaultLocation { step } => {
                write!(f, "fault at step {step} does not match the executed script")
            }
            TableauError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            TableauError::BadParameters(m) => write!(f, "invalid protocol parameters: {m}"),
        }
    }
}

impl core::error::Error for TableauError {}

/// Type of a single-kind Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliKind {
    X,
    Z,
}

impl PauliKind {
    pub fn dual(self) -> PauliKind {
        match self {
            PauliKind::X => PauliKind::Z,
            PauliKind::Z => PauliKind::X,
        }
    }
}

/// `X^x Z^z` on `n` qudits, phase ignored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuditPauli {
    x: Vec<FieldElement>,
    z: Vec<FieldElement>,
}

impl QuditPauli {
    pub fn identity(n: usize) -> Self {
        QuditPauli { x: vec![FieldElement::ZERO; n], z: vec![FieldElement::ZERO; n] }
    }

    pub fn from_parts(x: Vec<FieldElement>, z: Vec<FieldElement>) -> Self {
        assert_eq!(x.len(), z.len(), "X and Z parts must have equal length");
        QuditPauli { x, z }
    }

    /// `X^x` for a full-length vector `x`.
    pub fn x_vec(x: &[FieldElement]) -> Self {
        QuditPauli { x: x.to_vec(), z: vec![FieldElement::ZERO; x.len()] }
    }

    /// `Z^z` for a full-length vector `z`.
    pub fn z_vec(z: &[FieldElement]) -> Self {
        QuditPauli { x: vec![FieldElement::ZERO; z.len()], z: z.to_vec() }
    }

    /// Single-kind Pauli with the given `(qudit, exponent)` terms.
    pub fn single(n: usize, kind: PauliKind, terms: &[(usize, FieldElement)]) -> Self {
        let mut p = QuditPauli::identity(n);
        for &(i, a) in terms {
            match kind {
                PauliKind::X => p.x[i] = a,
                PauliKind::Z => p.z[i] = a,
            }
        }
        p
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_part(&self) -> &[FieldElement] {
        &self.x
    }

    pub fn z_part(&self) -> &[FieldElement] {
        &self.z
    }

    pub fn part(&self, kind: PauliKind) -> &[FieldElement] {
        match kind {
            PauliKind::X => &self.x,
            PauliKind::Z => &self.z,
        }
    }

    pub fn set(&mut self, i: usize, x: FieldElement, z: FieldElement) {
        self.x[i] = x;
        self.z[i] = z;
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|a| a.is_zero())
    }

    /// Number of qudits with a nonzero X or Z component.
    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&i| !self.x[i].is_zero() || !self.z[i].is_zero()).count()
    }

    pub fn x_weight(&self) -> usize {
        weight(&self.x)
    }

    pub fn z_weight(&self) -> usize {
        weight(&self.z)
    }

    /// Qudits where the Pauli acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.x[i].is_zero() || !self.z[i].is_zero()).collect()
    }

    /// `⟨self, other⟩ = Σ x_i z'_i + x'_i z_i`.
    pub fn symplectic(&self, ctx: &FieldCtx, other: &QuditPauli) -> FieldElement {
        assert_eq!(self.n(), other.n(), "Paulis act on different numbers of qudits");
        let mut acc = FieldElement::ZERO;
        for i in 0..self.n() {
            acc = ctx.add(acc, ctx.mul(self.x[i], other.z[i]));
            acc = ctx.add(acc, ctx.mul(other.x[i], self.z[i]));
        }
        acc
    }

    pub fn commutes(&self, ctx: &FieldCtx, other: &QuditPauli) -> bool {
        self.symplectic(ctx, other).is_zero()
    }

    /// `self ← self + f · other` (product of Paulis, exponents added).
    pub fn add_scaled(&mut self, ctx: &FieldCtx, other: &QuditPauli, f: FieldElement) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.n() {
            self.x[i] = ctx.add(self.x[i], ctx.mul(f, other.x[i]));
            self.z[i] = ctx.add(self.z[i], ctx.mul(f, other.z[i]));
        }
    }

    pub fn scaled(&self, ctx: &FieldCtx, f: FieldElement) -> QuditPauli {
        QuditPauli {
            x: self.x.iter().map(|&a| ctx.mul(a, f)).collect(),
            z: self.z.iter().map(|&a| ctx.mul(a, f)).collect(),
        }
    }

    /// The Pauli restricted to `qudits`, in that order.
    pub fn restrict(&self, qudits: &[usize]) -> QuditPauli {
        QuditPauli {
            x: qudits.iter().map(|&i| self.x[i]).collect(),
            z: qudits.iter().map(|&i| self.z[i]).collect(),
        }
    }

    /// Embed a Pauli on `qudits.len()` qudits into `n` qudits.
    pub fn embed(&self, n: usize, qudits: &[usize]) -> QuditPauli {
        let mut p = QuditPauli::identity(n);
        for (k, &i) in qudits.iter().enumerate() {
            p.x[i] = self.x[k];
            p.z[i] = self.z[k];
        }
        p
    }
}

/// Stabilizer state with destabilizers and the label of each stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    stabs: Vec<QuditPauli>,
    destabs: Vec<QuditPauli>,
    values: Vec<FieldElement>,
}

impl Tableau {
    /// Every qudit in the `+0` eigenstate of `kind` (`|0⟩` for Z, `|+⟩` for X).
    pub fn product(n: usize, kind: PauliKind) -> Self {
        let unit = |i: usize, k: PauliKind| QuditPauli::single(n, k, &[(i, FieldElement::ONE)]);
        Tableau {
            n,
            stabs: (0..n).map(|i| unit(i, kind)).collect(),
            destabs: (0..n).map(|i| unit(i, kind.dual())).collect(),
            values: vec![FieldElement::ZERO; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[QuditPauli] {
        &self.stabs
    }

    pub fn destabilizers(&self) -> &[QuditPauli] {
        &self.destabs
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    /// Apply a Pauli: every label shifts by `⟨S, E⟩`.
    pub fn apply_pauli(&mut self, ctx: &FieldCtx, e: &QuditPauli) {
        for (s, v) in self.stabs.iter().zip(self.values.iter_mut()) {
            *v = ctx.add(*v, s.symplectic(ctx, e));
        }
    }

    /// Label of `op` if the state determines it, `None` otherwise.
    pub fn peek(&self, ctx: &FieldCtx, op: &QuditPauli) -> Option<FieldElement> {
        if self.stabs.iter().any(|s| !s.commutes(ctx, op)) {
            return None;
        }
        // op = Σ c_i S_i with c_i = ⟨op, D_i⟩.
        let mut acc = FieldElement::ZERO;
        for (d, &v) in self.destabs.iter().zip(&self.values) {
            acc = ctx.add(acc, ctx.mul(op.symplectic(ctx, d), v));
        }
        Some(acc)
    }

    /// Measure `op`. A determined outcome is returned as is; otherwise the
    /// outcome is `forced` or uniformly random, and `op` replaces one
    /// anticommuting stabilizer after the others are made to commute.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        ctx: &FieldCtx,
        op: &QuditPauli,
        forced: Option<FieldElement>,
        rng: &mut R,
    ) -> FieldElement {
        assert_eq!(op.n(), self.n, "operator acts on the wrong number of qudits");
        let a: Vec<FieldElement> = self.stabs.iter().map(|s| s.symplectic(ctx, op)).collect();
        let Some(p) = a.iter().position(|x| !x.is_zero()) else {
            return self.peek(ctx, op).expect("commuting operator is determined");
        };
        let inv = ctx.inv(a[p]).expect("nonzero");
        let sp = self.stabs[p].clone();
        let vp = self.values[p];
        for j in 0..self.n {
            if j != p && !a[j].is_zero() {
                let f = ctx.mul(a[j], inv);
                self.stabs[j].add_scaled(ctx, &sp, f);
                self.values[j] = ctx.add(self.values[j], ctx.mul(f, vp));
            }
        }
        for i in 0..self.n {
            if i != p {
                let b = self.destabs[i].symplectic(ctx, op);
                if !b.is_zero() {
                    self.destabs[i].add_scaled(ctx, &sp, ctx.mul(b, inv));
                }
            }
        }
        self.destabs[p] = sp.scaled(ctx, inv);
        self.stabs[p] = op.clone();
        let outcome = forced.unwrap_or_else(|| ctx.random(rng));
        self.values[p] = outcome;
        outcome
    }

    /// Put qudit `i` into the `+0` eigenstate of `kind` by measuring and
    /// correcting.
    pub fn reset<R: Rng + ?Sized>(&mut self, ctx: &FieldCtx, i: usize, kind: PauliKind, rng: &mut R) {
        let op = QuditPauli::single(self.n, kind, &[(i, FieldElement::ONE)]);
        let m = self.measure(ctx, &op, None, rng);
        if !m.is_zero() {
            // ⟨K_i, K'^m_i⟩ = m for the dual kind K'.
            self.apply_pauli(ctx, &QuditPauli::single(self.n, kind.dual(), &[(i, m)]));
        }
    }

    /// Whether stabilizers commute, destabilizers commute, and
    /// `⟨S_i, D_j⟩ = δ_ij`.
    pub fn is_consistent(&self, ctx: &FieldCtx) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.stabs[i].commutes(ctx, &self.stabs[j])
                    || !self.destabs[i].commutes(ctx, &self.destabs[j])
                {
                    return false;
                }
                let want = if i == j { FieldElement::ONE } else { FieldElement::ZERO };
                if self.stabs[i].symplectic(ctx, &self.destabs[j]) != want {
                    return false;
                }
            }
        }
        true
    }
}

/// `Z_{i−1}^{γ_i} Z_i^{γ_{i−1}}` (or its X dual) on qudits `a, b` with
/// coefficients `(γ_b, γ_a)`.
fn relation(n: usize, kind: PauliKind, a: usize, b: usize, ga: FieldElement, gb: FieldElement) -> QuditPauli {
    QuditPauli::single(n, kind, &[(a, gb), (b, ga)])
}

fn check_gammas(gammas: &[FieldElement]) -> Result<(), TableauError> {
    match gammas.iter().position(|g| g.is_zero()) {
        Some(index) => Err(TableauError::ZeroCoefficient { index }),
        None => Ok(()),
    }
}

/// Stabilizer generators of `Cat(γ)` on `qudits` of an `n`-qudit register:
/// `X^γ` followed by the relations `Z_{i−1}^{γ_i} Z_i^{γ_{i−1}}`. With
/// `kind = Z` the roles of X and Z are exchanged.
pub fn cat_generators(
    n: usize,
    qudits: &[usize],
    gammas: &[FieldElement],
    kind: PauliKind,
) -> Vec<QuditPauli> {
    let terms: Vec<(usize, FieldElement)> = qudits.iter().copied().zip(gammas.iter().copied()).collect();
    let mut out = vec![QuditPauli::single(n, kind, &terms)];
    for i in 1..qudits.len() {
        out.push(relation(n, kind.dual(), qudits[i - 1], qudits[i], gammas[i - 1], gammas[i]));
    }
    out
}

/// Project `qudits` of `t` onto `Cat(γ)` (all labels zero): reset them to
/// the `+0` eigenstate of `kind` and impose the relations.
pub fn prepare_cat_on<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    t: &mut Tableau,
    qudits: &[usize],
    gammas: &[FieldElement],
    kind: PauliKind,
    rng: &mut R,
) -> Result<(), TableauError> {
    check_gammas(gammas)?;
    if qudits.len() != gammas.len() {
        return Err(TableauError::DimensionMismatch { expected: qudits.len(), got: gammas.len() });
    }
    for &q in qudits {
        t.reset(ctx, q, kind, rng);
    }
    for g in cat_generators(t.n(), qudits, gammas, kind).iter().skip(1) {
        t.measure(ctx, g, Some(FieldElement::ZERO), rng);
    }
    Ok(())
}

/// Standalone tableau of `Cat(γ_1, …, γ_C)` with zero syndrome.
pub fn prepare_cat(ctx: &FieldCtx, gammas: &[FieldElement]) -> Result<Tableau, TableauError> {
    check_gammas(gammas)?;
    let n = gammas.len();
    let mut t = Tableau::product(n, PauliKind::X);
    // All outcomes are forced, so the generator is never consulted.
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let qudits: Vec<usize> = (0..n).collect();
    prepare_cat_on(ctx, &mut t, &qudits, gammas, PauliKind::X, &mut rng)?;
    Ok(t)
}

/// An equivalent error whose Z part has weight at most one on a cat state
/// over `gammas`: multiply by `Z_{i−1}^{Aγ_i} Z_i^{Aγ_{i−1}}` with
/// `A = z_{i−1} / γ_i`, sweeping the Z support to the last qudit.
pub fn clean_z_error(
    ctx: &FieldCtx,
    gammas: &[FieldElement],
    err: &QuditPauli,
) -> Result<QuditPauli, TableauError> {
    check_gammas(gammas)?;
    if err.n() != gammas.len() {
        return Err(TableauError::DimensionMismatch { expected: gammas.len(), got: err.n() });
    }
    let mut out = err.clone();
    for i in 1..gammas.len() {
        let zi = out.z[i - 1];
        if zi.is_zero() {
            continue;
        }
        let a = ctx.div(zi, gammas[i]).expect("nonzero γ");
        out.z[i - 1] = FieldElement::ZERO;
        out.z[i] = ctx.add(out.z[i], ctx.mul(a, gammas[i - 1]));
    }
    Ok(out)
}

/// One injected fault: a Pauli on qudits touched by `step`, applied right
/// after it, and a shift of its reported outcome by `flip`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaultEvent {
    pub step: usize,
    /// `(qudit, x exponent, z exponent)` terms.
    pub pauli: Vec<(usize, FieldElement, FieldElement)>,
    pub flip: FieldElement,
}

impl FaultEvent {
    pub fn flip(step: usize, flip: FieldElement) -> Self {
        FaultEvent { step, pauli: Vec::new(), flip }
    }

    pub fn is_trivial(&self) -> bool {
        self.flip.is_zero() && self.pauli.iter().all(|&(_, x, z)| x.is_zero() && z.is_zero())
    }
}

/// One executed measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub label: &'static str,
    pub qudits: Vec<usize>,
    /// Reported outcome (after any flip).
    pub outcome: FieldElement,
    pub fault: Option<FaultEvent>,
}

/// Executes measurement steps on a tableau, injecting scheduled faults.
pub struct Runner<'a, R: Rng> {
    pub ctx: &'a FieldCtx,
    pub tab: Tableau,
    pub rng: R,
    faults: &'a [FaultEvent],
    used: Vec<bool>,
    pub transcript: Vec<StepRecord>,
    error: Option<TableauError>,
}

impl<'a, R: Rng> Runner<'a, R> {
    pub fn new(ctx: &'a FieldCtx, tab: Tableau, faults: &'a [FaultEvent], rng: R) -> Self {
        Runner { ctx, tab, rng, faults, used: vec![false; faults.len()], transcript: Vec::new(), error: None }
    }

    pub fn n(&self) -> usize {
        self.tab.n()
    }

    /// Measure `op` as the next step, applying any faults scheduled for it.
    pub fn measure(&mut self, label: &'static str, op: QuditPauli) -> FieldElement {
        let step = self.transcript.len();
        let qudits = op.support();
        let mut outcome = self.tab.measure(self.ctx, &op, None, &mut self.rng);
        let mut applied = None;
        for (k, f) in self.faults.iter().enumerate() {
            if f.step != step {
                continue;
            }
            self.used[k] = true;
            if f.pauli.iter().any(|t| !qudits.contains(&t.0)) {
                self.error.get_or_insert(TableauError::InvalidFaultLocation { step });
                continue;
            }
            let mut e = QuditPauli::identity(self.n());
            for &(q, x, z) in &f.pauli {
                e.set(q, x, z);
            }
            self.tab.apply_pauli(self.ctx, &e);
            outcome = self.ctx.add(outcome, f.flip);
            applied = Some(f.clone());
        }
        self.transcript.push(StepRecord { step, label, qudits, outcome, fault: applied });
        outcome
    }

    /// Frame update (never faulty).
    pub fn apply(&mut self, e: &QuditPauli) {
        self.tab.apply_pauli(self.ctx, e);
    }

    pub fn reset(&mut self, q: usize, kind: PauliKind) {
        self.tab.reset(self.ctx, q, kind, &mut self.rng);
    }

    /// Error if any fault was misplaced or never reached.
    pub fn finish(&self) -> Result<(), TableauError> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        if let Some(k) = self.used.iter().position(|u| !u) {
            return Err(TableauError::InvalidFaultLocation { step: self.faults[k].step });
        }
        Ok(())
    }
}

/// Qudit roles for cat preparation: the cat row and the ancilla row
/// (`ancillas[i]` sits next to `cat[i]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatLayout {
    pub cat: Vec<usize>,
    pub ancillas: Vec<usize>,
}

impl CatLayout {
    /// Cat on qudits `0..c`, ancillas on `c..2c`.
    pub fn standard(c: usize) -> Self {
        CatLayout { cat: (0..c).collect(), ancillas: (c..2 * c).collect() }
    }
}

/// Fault-tolerant measurement of `Z_{c1}^α Z_{c2}^β` (or the X dual for
/// `kind = X`) with two ancillas. Returns `α η_1 + β η_2`.
///
/// `gc1, gc2` are the cat coefficients on `c1, c2`; the final ancilla
/// measurements are used to restore the cat's `X^γ` label.
#[allow(clippy::too_many_arguments)]
pub fn ft_zazb<R: Rng>(
    run: &mut Runner<'_, R>,
    kind: PauliKind,
    c: (usize, usize),
    a: (usize, usize),
    alpha: FieldElement,
    beta: FieldElement,
    gc: (FieldElement, FieldElement),
) -> FieldElement {
    let ctx = run.ctx;
    let n = run.n();
    let dual = kind.dual();
    run.reset(a.0, dual);
    run.reset(a.1, dual);
    let m = run.measure("ancilla_zazb", QuditPauli::single(n, kind, &[(a.0, alpha), (a.1, beta)]));
    if !m.is_zero() {
        let c0 = ctx.div(m, alpha).expect("nonzero α");
        run.apply(&QuditPauli::single(n, dual, &[(a.0, c0)]));
    }
    let one = FieldElement::ONE;
    let eta1 = run.measure("cat_ancilla_zz", QuditPauli::single(n, kind, &[(c.0, one), (a.0, one)]));
    let eta2 = run.measure("cat_ancilla_zz", QuditPauli::single(n, kind, &[(c.1, one), (a.1, one)]));
    let outcome = ctx.add(ctx.mul(alpha, eta1), ctx.mul(beta, eta2));
    let xi1 = run.measure("ancilla_x", QuditPauli::single(n, dual, &[(a.0, one)]));
    let xi2 = run.measure("ancilla_x", QuditPauli::single(n, dual, &[(a.1, one)]));
    // X^γ ⊗ X_{a1}^{γ_{c1}} X_{a2}^{γ_{c2}} had label 0, so X^γ now reads
    // γ_{c1} ξ_1 + γ_{c2} ξ_2; a Z on c1 restores it.
    let shift = ctx.add(ctx.mul(gc.0, xi1), ctx.mul(gc.1, xi2));
    if !shift.is_zero() {
        let z = ctx.div(shift, gc.0).expect("nonzero γ");
        run.apply(&QuditPauli::single(n, kind, &[(c.0, z)]));
    }
    outcome
}

/// Fault-tolerant preparation and verification of `Cat(γ)` with `rounds`
/// verification rounds. Returns whether every check read zero.
///
/// Non-FT layers measure the relations for even `i` and then odd `i ≥ 3`
/// (1-based), followed by the frame update `c_i = (m_i + γ_i c_{i−1}) / γ_{i−1}`.
/// Each verification round repeats the two layers with [`ft_zazb`].
pub fn run_cat_preparation<R: Rng>(
    run: &mut Runner<'_, R>,
    layout: &CatLayout,
    gammas: &[FieldElement],
    rounds: usize,
    kind: PauliKind,
) -> Result<bool, TableauError> {
    check_gammas(gammas)?;
    let c = gammas.len();
    if layout.cat.len() != c || layout.ancillas.len() != c {
        return Err(TableauError::DimensionMismatch { expected: c, got: layout.cat.len() });
    }
    let ctx = run.ctx;
    let n = run.n();
    let dual = kind.dual();
    for &q in &layout.cat {
        run.reset(q, dual);
    }
    let layers: [Vec<usize>; 2] =
        [(2..=c).step_by(2).collect(), (3..=c).step_by(2).collect()];
    let mut m = vec![FieldElement::ZERO; c + 1];
    for layer in &layers {
        for &i in layer {
            let (a, b) = (layout.cat[i - 2], layout.cat[i - 1]);
            m[i] = run.measure("nonft_zazb", relation(n, kind, a, b, gammas[i - 2], gammas[i - 1]));
        }
    }
    // Frame update: ⟨Z_{i−1}^{γ_i} Z_i^{γ_{i−1}}, X^c⟩ = γ_i c_{i−1} + γ_{i−1} c_i.
    let mut corr = vec![FieldElement::ZERO; c];
    for i in 2..=c {
        let num = ctx.add(m[i], ctx.mul(gammas[i - 1], corr[i - 2]));
        corr[i - 1] = ctx.div(num, gammas[i - 2]).expect("nonzero γ");
    }
    let terms: Vec<(usize, FieldElement)> =
        layout.cat.iter().copied().zip(corr.iter().copied()).collect();
    run.apply(&QuditPauli::single(n, dual, &terms));
    let mut accepted = true;
    for _ in 0..rounds {
        for layer in &layers {
            for &i in layer {
                let out = ft_zazb(
                    run,
                    kind,
                    (layout.cat[i - 2], layout.cat[i - 1]),
                    (layout.ancillas[i - 2], layout.ancillas[i - 1]),
                    gammas[i - 1],
                    gammas[i - 2],
                    (gammas[i - 2], gammas[i - 1]),
                );
                if !out.is_zero() {
                    accepted = false;
                }
            }
        }
    }
    Ok(accepted)
}

/// Residual error of a cat state relative to the ideal `Cat(γ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatResidual {
    /// Minimum-weight X-type (for `kind = X`) error consistent with the
    /// relation labels.
    pub x_error: Vec<FieldElement>,
    pub x_weight: usize,
    /// Z weight after cleaning: 0 or 1.
    pub z_weight: usize,
}

/// Read the residual error of `Cat(γ)` on `qudits` from the labels of its
/// generators. `None` if the state is not a (possibly errored) cat state.
pub fn cat_residual(
    ctx: &FieldCtx,
    t: &Tableau,
    qudits: &[usize],
    gammas: &[FieldElement],
    kind: PauliKind,
) -> Option<CatResidual> {
    let c = gammas.len();
    let gens = cat_generators(t.n(), qudits, gammas, kind);
    let labels: Vec<FieldElement> = gens.iter().map(|g| t.peek(ctx, g)).collect::<Option<_>>()?;
    // Solve γ_i c_{i−1} + γ_{i−1} c_i = s_i with c_1 = 0.
    let mut chain = vec![FieldElement::ZERO; c];
    for i in 1..c {
        let num = ctx.add(labels[i], ctx.mul(gammas[i], chain[i - 1]));
        chain[i] = ctx.div(num, gammas[i - 1]).expect("nonzero γ");
    }
    // Solutions are chain + λγ; only λ = 0 or λ = chain_j/γ_j can lower the weight.
    let mut best = chain.clone();
    let mut best_w = weight(&best);
    for j in 0..c {
        let lambda = ctx.div(chain[j], gammas[j]).expect("nonzero γ");
        let cand: Vec<FieldElement> =
            chain.iter().zip(gammas).map(|(&x, &g)| ctx.add(x, ctx.mul(lambda, g))).collect();
        let w = weight(&cand);
        if w < best_w {
            best_w = w;
            best = cand;
        }
    }
    Some(CatResidual { x_error: best, x_weight: best_w, z_weight: usize::from(!labels[0].is_zero()) })
}

/// Outcome of a fault-injected cat preparation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatPrepOutcome {
    pub accepted: bool,
    /// `None` when the cat row is no longer a cat state.
    pub residual: Option<CatResidual>,
    pub transcript: Vec<StepRecord>,
}

/// Run the cat preparation on a fresh `2C`-qudit register with the given
/// faults.
pub fn simulate_cat_preparation<R: Rng>(
    ctx: &FieldCtx,
    gammas: &[FieldElement],
    rounds: usize,
    faults: &[FaultEvent],
    rng: R,
) -> Result<CatPrepOutcome, TableauError> {
    let c = gammas.len();
    let layout = CatLayout::standard(c);
    let mut run = Runner::new(ctx, Tableau::product(2 * c, PauliKind::X), faults, rng);
    let accepted = run_cat_preparation(&mut run, &layout, gammas, rounds, PauliKind::Z)?;
    run.finish()?;
    let residual = cat_residual(ctx, &run.tab, &layout.cat, gammas, PauliKind::X);
    Ok(CatPrepOutcome { accepted, residual, transcript: run.transcript })
}

/// Measure the stabilizer `X^γ` (or `Z^γ` for `kind = Z`) of the data
/// qudits `data[i]` by consuming a cat state on `cat[i]`: measure
/// `X_{D_i} X_{C_i}` → `η_i`, report `Σ γ_i η_i`, measure the cat qudits in
/// the dual basis and update the data frame.
pub fn consume_cat<R: Rng>(
    run: &mut Runner<'_, R>,
    data: &[usize],
    cat: &[usize],
    gammas: &[FieldElement],
    kind: PauliKind,
) -> FieldElement {
    let ctx = run.ctx;
    let n = run.n();
    let one = FieldElement::ONE;
    let mut outcome = FieldElement::ZERO;
    for i in 0..data.len() {
        let eta = run.measure("data_cat_xx", QuditPauli::single(n, kind, &[(data[i], one), (cat[i], one)]));
        outcome = ctx.add(outcome, ctx.mul(gammas[i], eta));
    }
    let dual = kind.dual();
    let mut frame = Vec::with_capacity(cat.len());
    for i in 0..cat.len() {
        let mu = run.measure("cat_z", QuditPauli::single(n, dual, &[(cat[i], one)]));
        frame.push((data[i], mu));
    }
    // Z^v_D ⊗ Z^v_C kept its label and Z^v_C now reads Σ v_i μ_i.
    run.apply(&QuditPauli::single(n, kind, &frame));
    outcome
}

/// Stabilizer generators of a CSS qudit code: X checks, Z checks, and the
/// logical Z operators completing a maximal commuting set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    pub hx: Matrix,
    pub hz: Matrix,
    pub logical_z: Vec<Vec<FieldElement>>,
}

impl BlockCode {
    /// Logical Z rows: nullspace vectors of `hx` outside the span of `hz`.
    pub fn new(ctx: &FieldCtx, hx: &Matrix, hz: &Matrix) -> Self {
        let mut span = hz.to_rows();
        let mut logical_z = Vec::new();
        let mut rank = hz.rank(ctx);
        for v in hx.nullspace(ctx) {
            span.push(v.clone());
            let r = Matrix::from_rows(&span).rank(ctx);
            if r > rank {
                rank = r;
                logical_z.push(v);
            } else {
                span.pop();
            }
        }
        BlockCode { hx: hx.clone(), hz: hz.clone(), logical_z }
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    /// All generators placed on `qudits` of an `n`-qudit register:
    /// X checks, Z checks, logical Z.
    pub fn generators(&self, n: usize, qudits: &[usize]) -> Vec<QuditPauli> {
        let place = |kind, row: &[FieldElement]| {
            let terms: Vec<(usize, FieldElement)> =
                qudits.iter().copied().zip(row.iter().copied()).collect();
            QuditPauli::single(n, kind, &terms)
        };
        let mut out: Vec<QuditPauli> =
            (0..self.hx.rows()).map(|r| place(PauliKind::X, self.hx.row(r))).collect();
        out.extend((0..self.hz.rows()).map(|r| place(PauliKind::Z, self.hz.row(r))));
        out.extend(self.logical_z.iter().map(|v| place(PauliKind::Z, v)));
        out
    }

    /// Encode the all-zero logical state on `qudits` (reset to `|0⟩`, then
    /// project the X checks onto label 0).
    pub fn encode<R: Rng + ?Sized>(
        &self,
        ctx: &FieldCtx,
        t: &mut Tableau,
        qudits: &[usize],
        rng: &mut R,
    ) {
        for &q in qudits {
            t.reset(ctx, q, PauliKind::Z, rng);
        }
        let n = t.n();
        for g in self.generators(n, qudits).iter().take(self.hx.rows()) {
            t.measure(ctx, g, Some(FieldElement::ZERO), rng);
        }
    }

    /// Labels of all generators on `qudits`, or `None` if some are undetermined.
    pub fn labels(&self, ctx: &FieldCtx, t: &Tableau, qudits: &[usize]) -> Option<Vec<FieldElement>> {
        self.generators(t.n(), qudits).iter().map(|g| t.peek(ctx, g)).collect()
    }
}

/// Teleport the block on `data` to `dest` through the Bell pairs
/// `(via_i, dest_i)`: prepare `|+⟩`s, measure `Z_A Z_B` (corrected with
/// `X_B`), then `Z_D Z_A` → `ζ` and `X_D X_A` → `ξ`, and update the frame
/// with `X_B^ζ Z_B^ξ`.
pub fn teleport<R: Rng>(run: &mut Runner<'_, R>, data: &[usize], via: &[usize], dest: &[usize]) {
    let n = run.n();
    let one = FieldElement::ONE;
    for (&a, &b) in via.iter().zip(dest) {
        run.reset(a, PauliKind::X);
        run.reset(b, PauliKind::X);
    }
    for (&a, &b) in via.iter().zip(dest) {
        let m = run.measure("bell_zz", QuditPauli::single(n, PauliKind::Z, &[(a, one), (b, one)]));
        if !m.is_zero() {
            run.apply(&QuditPauli::single(n, PauliKind::X, &[(b, m)]));
        }
    }
    let mut zeta = Vec::with_capacity(data.len());
    for (&d, &a) in data.iter().zip(via) {
        zeta.push(run.measure("data_zz", QuditPauli::single(n, PauliKind::Z, &[(d, one), (a, one)])));
    }
    let mut xi = Vec::with_capacity(data.len());
    for (&d, &a) in data.iter().zip(via) {
        xi.push(run.measure("data_xx", QuditPauli::single(n, PauliKind::X, &[(d, one), (a, one)])));
    }
    let mut frame = QuditPauli::identity(n);
    for (k, &b) in dest.iter().enumerate() {
        frame.set(b, zeta[k], xi[k]);
    }
    run.apply(&frame);
}

/// Result of one fault-tolerant syndrome extraction on a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockExtraction {
    /// Self-consistent X-check syndrome (`H_X` rows).
    pub y_x: Vec<FieldElement>,
    /// Self-consistent Z-check syndrome (`H_Z` rows).
    pub y_z: Vec<FieldElement>,
    /// Attempted rounds of X and Z checks.
    pub attempts: (usize, usize),
    /// Rejected cat preparations.
    pub cat_rejections: usize,
    pub transcript: Vec<StepRecord>,
}

/// Settings for [`extract_block`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionParams {
    /// `M × (d−1)` combination matrices for the extra checks.
    pub beta_x: Matrix,
    pub beta_z: Matrix,
    /// Cat verification rounds.
    pub cat_rounds: usize,
    /// Give up after this many attempts of any retried step.
    pub max_attempts: usize,
}

fn support_of(row: &[FieldElement]) -> (Vec<usize>, Vec<FieldElement>) {
    row.iter().enumerate().filter(|(_, g)| !g.is_zero()).map(|(i, &g)| (i, g)).unzip()
}

/// Measure one check `w` on the block with a verified cat; retries the cat
/// until accepted.
fn measure_check<R: Rng>(
    run: &mut Runner<'_, R>,
    data: &[usize],
    layout: &CatLayout,
    w: &[FieldElement],
    kind: PauliKind,
    params: &ExtractionParams,
    rejections: &mut usize,
) -> Result<FieldElement, TableauError> {
    let (idx, gammas) = support_of(w);
    if idx.is_empty() {
        return Ok(FieldElement::ZERO);
    }
    let sub = CatLayout {
        cat: idx.iter().map(|&i| layout.cat[i]).collect(),
        ancillas: idx.iter().map(|&i| layout.ancillas[i]).collect(),
    };
    let block: Vec<usize> = idx.iter().map(|&i| data[i]).collect();
    for _ in 0..params.max_attempts {
        // A cat for an X check has X^γ as stabilizer and Z relations.
        if run_cat_preparation(run, &sub, &gammas, params.cat_rounds, kind.dual())? {
            return Ok(consume_cat(run, &block, &sub.cat, &gammas, kind));
        }
        *rejections += 1;
    }
    Err(TableauError::BadParameters("cat preparation never accepted".into()))
}

/// Fault-tolerant extraction of the X and then Z syndrome of one block:
/// measure the `d − 1` rows of `H`, then the `M` rows of `β·H`, and retry the
/// round until `z = β·y`.
pub fn extract_block<R: Rng>(
    run: &mut Runner<'_, R>,
    code: &BlockCode,
    data: &[usize],
    layout: &CatLayout,
    params: &ExtractionParams,
) -> Result<BlockExtraction, TableauError> {
    let ctx = run.ctx;
    let mut rejections = 0;
    let mut sectors = Vec::with_capacity(2);
    for (kind, h, beta) in [
        (PauliKind::X, &code.hx, &params.beta_x),
        (PauliKind::Z, &code.hz, &params.beta_z),
    ] {
        if beta.cols() != h.rows() {
            return Err(TableauError::DimensionMismatch { expected: h.rows(), got: beta.cols() });
        }
        let combos = beta.mul(ctx, h);
        let mut attempts = 0;
        let y = loop {
            if attempts == params.max_attempts {
                return Err(TableauError::BadParameters("no self-consistent round".into()));
            }
            attempts += 1;
            let mut y = Vec::with_capacity(h.rows());
            for r in 0..h.rows() {
                y.push(measure_check(run, data, layout, h.row(r), kind, params, &mut rejections)?);
            }
            let expect = beta.mul_vec(ctx, &y);
            let mut consistent = true;
            for (r, &e) in expect.iter().enumerate() {
                let z = measure_check(run, data, layout, combos.row(r), kind, params, &mut rejections)?;
                if z != e {
                    consistent = false;
                    break;
                }
            }
            if consistent {
                break y;
            }
        };
        sectors.push((y, attempts));
    }
    let (y_z, az) = sectors.pop().expect("two sectors");
    let (y_x, ax) = sectors.pop().expect("two sectors");
    Ok(BlockExtraction {
        y_x,
        y_z,
        attempts: (ax, az),
        cat_rejections: rejections,
        transcript: run.transcript.clone(),
    })
}

/// Which fault events to enumerate at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultAlphabet {
    /// Every Pauli on the touched qudits combined with every flip.
    Full,
    /// Pure flips, and single-qudit `X^a` or `Z^a` on one touched qudit.
    Elementary,
}

/// All nontrivial fault events at one executed step.
pub fn faults_at(ctx: &FieldCtx, step: &StepRecord, alphabet: FaultAlphabet) -> Vec<FaultEvent> {
    let q = ctx.q();
    let mut out = Vec::new();
    match alphabet {
        FaultAlphabet::Full => {
            let k = step.qudits.len();
            // Mixed-radix counter over (x_1, z_1, …, x_k, z_k, flip).
            let digits = 2 * k + 1;
            let total = (q as u64).pow(digits as u32);
            for code in 1..total {
                let mut c = code;
                let mut d = Vec::with_capacity(digits);
                for _ in 0..digits {
                    d.push(ctx.el((c % q as u64) as u32));
                    c /= q as u64;
                }
                let pauli = (0..k).map(|j| (step.qudits[j], d[2 * j], d[2 * j + 1])).collect();
                out.push(FaultEvent { step: step.step, pauli, flip: d[2 * k] });
            }
        }
        FaultAlphabet::Elementary => {
            for a in ctx.nonzero_elements() {
                out.push(FaultEvent::flip(step.step, a));
            }
            for &qd in &step.qudits {
                for a in ctx.nonzero_elements() {
                    let zero = FieldElement::ZERO;
                    out.push(FaultEvent { step: step.step, pauli: vec![(qd, a, zero)], flip: zero });
                    out.push(FaultEvent { step: step.step, pauli: vec![(qd, zero, a)], flip: zero });
                }
            }
        }
    }
    out
}

/// Fault sets with one fault (`max_faults = 1`) or two faults at distinct
/// steps (`max_faults = 2`, elementary alphabet for pairs) for a script
/// whose faultless transcript is `steps`.
pub fn fault_sets(
    ctx: &FieldCtx,
    steps: &[StepRecord],
    max_faults: usize,
    alphabet: FaultAlphabet,
) -> Vec<Vec<FaultEvent>> {
    let mut out: Vec<Vec<FaultEvent>> = Vec::new();
    if max_faults >= 1 {
        for s in steps {
            out.extend(faults_at(ctx, s, alphabet).into_iter().map(|f| vec![f]));
        }
    }
    if max_faults >= 2 {
        let per: Vec<Vec<FaultEvent>> =
            steps.iter().map(|s| faults_at(ctx, s, FaultAlphabet::Elementary)).collect();
        for i in 0..steps.len() {
            for j in i + 1..steps.len() {
                for a in &per[i] {
                    for b in &per[j] {
                        out.push(vec![a.clone(), b.clone()]);
                    }
                }
            }
        }
    }
    out
}

/// Whether an outcome breaks the fault-tolerance contract for `s` faults:
/// accepted, yet the residual X weight exceeds `s` or the row is no longer
/// a cat state.
pub fn is_violation(outcome: &CatPrepOutcome, s: usize) -> bool {
    outcome.accepted && outcome.residual.as_ref().map_or(true, |r| r.x_weight > s)
}

/// Totals of a fault sweep.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepReport {
    pub runs: usize,
    pub accepted: usize,
    /// Fault sets whose run violated the contract, with the run.
    pub violations: Vec<(Vec<FaultEvent>, CatPrepOutcome)>,
}

impl SweepReport {
    pub fn record(&mut self, faults: Vec<FaultEvent>, outcome: CatPrepOutcome) {
        self.runs += 1;
        if outcome.accepted {
            self.accepted += 1;
        }
        if is_violation(&outcome, faults.len()) {
            self.violations.push((faults, outcome));
        }
    }

    pub fn merge(&mut self, other: SweepReport) {
        self.runs += other.runs;
        self.accepted += other.accepted;
        self.violations.extend(other.violations);
    }
}

/// The cat-preparation run used by fault sweeps: outcomes are drawn from a
/// generator seeded with `seed`, so a fault set always replays identically.
pub fn cat_preparation_run(
    ctx: &FieldCtx,
    gammas: &[FieldElement],
    rounds: usize,
    faults: &[FaultEvent],
    seed: u64,
) -> Result<CatPrepOutcome, TableauError> {
    let rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    simulate_cat_preparation(ctx, gammas, rounds, faults, rng)
}

/// Exhaustive sweep of the cat preparation over [`fault_sets`].
pub fn sweep_cat_preparation(
    ctx: &FieldCtx,
    gammas: &[FieldElement],
    rounds: usize,
    max_faults: usize,
    alphabet: FaultAlphabet,
    seed: u64,
) -> Result<SweepReport, TableauError> {
    let clean = cat_preparation_run(ctx, gammas, rounds, &[], seed)?;
    let mut report = SweepReport::default();
    for set in fault_sets(ctx, &clean.transcript, max_faults, alphabet) {
        let out = cat_preparation_run(ctx, gammas, rounds, &set, seed)?;
        report.record(set, out);
    }
    Ok(report)
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn measurement_keeps_tableau_consistent() {
        let f = FieldCtx::with_degree(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = Tableau::product(4, PauliKind::Z);
        for _ in 0..50 {
            let x: Vec<_> = (0..4).map(|_| f.random(&mut rng)).collect();
            let z: Vec<_> = (0..4).map(|_| f.random(&mut rng)).collect();
            let op = QuditPauli::from_parts(x, z);
            let m = t.measure(&f, &op, None, &mut rng);
            assert!(t.is_consistent(&f));
            assert_eq!(t.peek(&f, &op), Some(m));
            assert_eq!(t.measure(&f, &op, None, &mut rng), m);
        }
    }

    #[test]
    fn cat_generators_and_errors() {
        let f = FieldCtx::with_degree(4).unwrap();
        let g: Vec<_> = (1..=5).map(|i| f.el(i)).collect();
        let t = prepare_cat(&f, &g).unwrap();
        for s in cat_generators(5, &[0, 1, 2, 3, 4], &g, PauliKind::X) {
            assert_eq!(t.peek(&f, &s), Some(FieldElement::ZERO));
        }
        assert_eq!(
            prepare_cat(&f, &[f.el(1), FieldElement::ZERO]),
            Err(TableauError::ZeroCoefficient { index: 1 })
        );
        let one = prepare_cat(&f, &[f.el(3)]).unwrap();
        let x = QuditPauli::single(1, PauliKind::X, &[(0, f.el(3))]);
        assert_eq!(one.peek(&f, &x), Some(FieldElement::ZERO));
    }

    #[test]
    fn faultless_cat_preparation_is_clean() {
        let f = FieldCtx::with_degree(3).unwrap();
        let g: Vec<_> = [3, 5, 1, 7, 2].iter().map(|&i| f.el(i)).collect();
        for rounds in 0..3 {
            let out =
                simulate_cat_preparation(&f, &g, rounds, &[], ChaCha8Rng::seed_from_u64(4)).unwrap();
            assert!(out.accepted);
            let r = out.residual.unwrap();
            assert_eq!((r.x_weight, r.z_weight), (0, 0));
        }
    }

    #[test]
    fn misplaced_fault_is_rejected() {
        let f = FieldCtx::with_degree(3).unwrap();
        let g: Vec<_> = [3, 5, 1, 7].iter().map(|&i| f.el(i)).collect();
        let far = [FaultEvent::flip(10_000, f.el(1))];
        assert_eq!(
            simulate_cat_preparation(&f, &g, 1, &far, ChaCha8Rng::seed_from_u64(0)),
            Err(TableauError::InvalidFaultLocation { step: 10_000 })
        );
        let wrong = [FaultEvent { step: 0, pauli: alloc::vec![(7, f.el(1), f.el(0))], flip: f.el(0) }];
        assert_eq!(
            simulate_cat_preparation(&f, &g, 1, &wrong, ChaCha8Rng::seed_from_u64(0)),
            Err(TableauError::InvalidFaultLocation { step: 0 })
        );
    }
}
