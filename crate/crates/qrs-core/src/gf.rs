//! Arithmetic in GF(2^s), 1 ≤ s ≤ 16.
//!
//! An element is stored as the integer whose binary expansion lists the
//! coefficients of its polynomial representative: bit `i` is the coefficient
//! of `t^i`. So `1096 = 2^10 + 2^6 + 2^3` is `t^10 + t^6 + t^3`.
//!
//! Elements are plain values. All arithmetic goes through a [`FieldCtx`],
//! which owns the reduction polynomial together with log/antilog tables. The
//! tables are built from, and tested against, the shift-and-reduce product
//! [`FieldCtx::mul_reference`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

/// Errors raised by field construction and element parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GfError {
    /// Inversion or division by the zero element.
    DivisionByZero,
    /// An integer outside `[0, q)`.
    OutOfRange { value: u64, q: u32 },
    /// Text that is not a non-negative decimal integer.
    MalformedInteger(String),
    /// Extension degree outside `1..=16`, or polynomial of the wrong degree.
    BadDegree { s: u32, poly: u32 },
    /// The reduction polynomial has a nontrivial factor.
    Reducible { poly: u32 },
}

impl fmt::Display for GfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GfError::DivisionByZero => write!(f, "division by zero in GF(2^s)"),
            GfError::OutOfRange { value, q } => {
                write!(f, "field element {value} out of range [0, {q})")
            }
            GfError::MalformedInteger(s) => write!(f, "malformed field element {s:?}"),
            GfError::BadDegree { s, poly } => {
                write!(f, "polynomial {poly:#x} does not have degree s = {s} (1 ≤ s ≤ 16)")
            }
            GfError::Reducible { poly } => write!(f, "polynomial {poly:#x} is reducible"),
        }
    }
}

impl core::error::Error for GfError {}

/// An element of GF(2^s) in the integer representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    /// The additive identity (in every field).
    pub const ZERO: FieldElement = FieldElement(0);
    /// The multiplicative identity (in every field).
    pub const ONE: FieldElement = FieldElement(1);

    /// Raw coefficient bits. Bit `i` is the coefficient of `t^i`.
    #[inline]
    pub fn bits(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Degree of a nonzero GF(2)[t] polynomial given as a bitmask.
fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

/// Remainder of `a` modulo `m` in GF(2)[t].
fn poly_rem(mut a: u64, m: u64) -> u64 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

/// True when `poly` (degree `s`) has no factor of degree `1..=s/2`.
fn is_irreducible(poly: u32, s: u32) -> bool {
    let p = poly as u64;
    for deg in 1..=s / 2 {
        for low in 0..(1u64 << deg) {
            if poly_rem(p, (1u64 << deg) | low) == 0 {
                return false;
            }
        }
    }
    true
}

/// Distinct prime factors of `n`.
fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Context for GF(2^s): the reduction polynomial plus lookup tables.
///
/// Immutable once built; share it by reference across workers.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldCtx {
    s: u32,
    poly: u32,
    q: u32,
    /// `exp[i] = g^i` for `i < 2(q-1)`, so a sum of two logs never wraps.
    exp: Vec<u16>,
    /// `log[a]` for `a ≠ 0`; `log[0]` is unused.
    log: Vec<u16>,
    /// Bit `i` set iff `Tr(t^i) = 1`.
    trace_mask: u32,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("s", &self.s)
            .field("poly", &self.poly)
            .field("q", &self.q)
            .finish()
    }
}

impl Default for FieldCtx {
    /// GF(2048) reduced by `t^11 + t^2 + 1`.
    fn default() -> Self {
        FieldCtx::new(11, 0x805).expect("t^11 + t^2 + 1 is irreducible")
    }
}

impl FieldCtx {
    /// Build GF(2^s) with reduction polynomial `poly` (bit `i` = coefficient of `t^i`).
    pub fn new(s: u32, poly: u32) -> Result<Self, GfError> {
        if !(1..=16).contains(&s) || poly == 0 || degree(poly as u64) != s {
            return Err(GfError::BadDegree { s, poly });
        }
        if !is_irreducible(poly, s) {
            return Err(GfError::Reducible { poly });
        }
        let q = 1u32 << s;
        let mut ctx = FieldCtx {
            s,
            poly,
            q,
            exp: Vec::new(),
            log: Vec::new(),
            trace_mask: 0,
        };
        ctx.build_tables();
        Ok(ctx)
    }

    /// Smallest irreducible polynomial of degree `s` (by integer value).
    pub fn with_degree(s: u32) -> Result<Self, GfError> {
        if !(1..=16).contains(&s) {
            return Err(GfError::BadDegree { s, poly: 0 });
        }
        let poly = ((1u32 << s)..(1u32 << (s + 1)))
            .find(|&p| is_irreducible(p, s))
            .expect("irreducible polynomials exist in every degree");
        FieldCtx::new(s, poly)
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        let factors = prime_factors(order);
        // A generator of the multiplicative group: no proper power g^(order/p) is 1.
        let g = (1..self.q)
            .find(|&g| {
                let g = FieldElement(g as u16);
                factors
                    .iter()
                    .all(|&p| self.pow_reference(g, (order / p) as u64) != FieldElement::ONE)
            })
            .expect("GF(q)* is cyclic");
        let g = FieldElement(g as u16);
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = alloc::vec![0u16; self.q as usize];
        let mut x = FieldElement::ONE;
        for i in 0..order {
            exp.push(x.0);
            log[x.0 as usize] = i as u16;
            x = self.mul_reference(x, g);
        }
        for i in 0..order as usize {
            exp.push(exp[i]);
        }
        self.exp = exp;
        self.log = log;
        let mut mask = 0;
        for i in 0..self.s {
            if self.trace_reference(FieldElement(1 << i)) == 1 {
                mask |= 1 << i;
            }
        }
        self.trace_mask = mask;
    }

    /// Extension degree `s`.
    #[inline]
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Reduction polynomial bitmask.
    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Field order `q = 2^s`.
    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        assert!(
            (a.0 as u32) < self.q,
            "element {} does not belong to GF({})",
            a.0,
            self.q
        );
    }

    /// Element from its integer representation.
    pub fn elem(&self, value: u64) -> Result<FieldElement, GfError> {
        if value < self.q as u64 {
            Ok(FieldElement(value as u16))
        } else {
            Err(GfError::OutOfRange { value, q: self.q })
        }
    }

    /// Element from its integer representation; panics when out of range.
    /// Intended for literals whose range is known.
    pub fn el(&self, value: u32) -> FieldElement {
        self.elem(value as u64).expect("literal field element in range")
    }

    /// The element `t`, a root of the reduction polynomial.
    pub fn t(&self) -> FieldElement {
        if self.s == 1 {
            // GF(2) as GF(2)[t]/(t+1) or (t): t reduces to a constant.
            FieldElement((self.poly & 1) as u16)
        } else {
            FieldElement(2)
        }
    }

    /// Every element in increasing integer order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|v| FieldElement(v as u16))
    }

    /// Every nonzero element in increasing integer order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(|v| FieldElement(v as u16))
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.q) as u16)
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.q) as u16)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!((a.0 as u32) < self.q && (b.0 as u32) < self.q);
        FieldElement(a.0 ^ b.0)
    }

    /// Subtraction, which equals addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, b)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!((a.0 as u32) < self.q && (b.0 as u32) < self.q);
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let i = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.exp[i])
    }

    /// Carry-less multiply followed by reduction modulo the polynomial.
    pub fn mul_reference(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let (mut a, mut b) = (a.0 as u32, b.0 as u32);
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & self.q != 0 {
                a ^= self.poly;
            }
        }
        FieldElement(acc as u16)
    }

    fn pow_reference(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_reference(acc, base);
            }
            base = self.mul_reference(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a);
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        let order = (self.q - 1) as usize;
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.exp[(order - l) % order]))
    }

    /// `a / b`.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.check(a);
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (e % order)) % order) as usize])
    }

    /// Absolute trace to GF(2), via a precomputed linear mask.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u8 {
        debug_assert!((a.0 as u32) < self.q);
        ((a.0 as u32 & self.trace_mask).count_ones() & 1) as u8
    }

    /// Absolute trace computed from the definition `Σ_{j<s} a^(2^j)`.
    pub fn trace_reference(&self, a: FieldElement) -> u8 {
        let mut acc = FieldElement::ZERO;
        let mut x = a;
        for _ in 0..self.s {
            acc = FieldElement(acc.0 ^ x.0);
            x = self.mul_reference(x, x);
        }
        debug_assert!(acc.0 <= 1, "trace lies in GF(2)");
        acc.0 as u8
    }

    /// Parse a decimal integer representation.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement, GfError> {
        let t = text.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(GfError::MalformedInteger(t.into()));
        }
        let v: u64 = t
            .parse()
            .map_err(|_| GfError::OutOfRange { value: u64::MAX, q: self.q })?;
        self.elem(v)
    }

    /// Decimal integer representation.
    pub fn render_element(&self, a: FieldElement) -> String {
        self.check(a);
        alloc::format!("{}", a.0)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u32, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let n = self.q - 1;
        let mut ord = n;
        for p in prime_factors(n) {
            while ord % p == 0 && self.pow(a, (ord / p) as u64) == FieldElement::ONE {
                ord /= p;
            }
        }
        Ok(ord)
    }

    /// Dot product `Σ a_i b_i`.
    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        assert_eq!(a.len(), b.len(), "dot product of unequal lengths");
        a.iter()
            .zip(b)
            .fold(FieldElement::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}
