//! Instruction-level error and cost model: per-class instruction rates,
//! post-selection scaling, composite operation rates, cat-state timing,
//! the accepted-cat error model and the length of one outer round.
//!
//! Times are in physical timesteps unless stated otherwise.

use alloc::vec::Vec;
use core::fmt;

use crate::grs::binomial;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseError {
    /// A success probability `p ≤ 0` makes the expected retry time infinite.
    DegenerateP(f64),
    /// `(d−1+M)·P[Cat] ≥ 1`: rounds of checks are never expected to succeed.
    DivergentRetry { attempts_failure: f64 },
    /// A rate or multiplier outside its allowed range.
    InvalidRate { name: &'static str, value: f64 },
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseError::DegenerateP(p) => write!(f, "success probability {p} is not positive"),
            NoiseError::DivergentRetry { attempts_failure } => write!(
                f,
                "round failure probability {attempts_failure} ≥ 1: expected attempts diverge"
            ),
            NoiseError::InvalidRate { name, value } => {
                write!(f, "rate {name} = {value} is outside its allowed range")
            }
        }
    }
}

impl core::error::Error for NoiseError {}

/// Error probability of each representative logical instruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstructionRates {
    /// Half-LPU in-module measurement instruction.
    pub p_half: f64,
    /// Whole-LPU in-module measurement instruction.
    pub p_whole: f64,
    /// Inter-module measurement instruction.
    pub p_inter: f64,
    /// One idling round of a gross-code block.
    pub p_idle: f64,
    /// Physical timesteps per measurement instruction.
    pub tau_meas: f64,
    /// Physical timesteps per idling round.
    pub tau_idle: f64,
}

/// Idle rate of the morphing idling circuit.
pub const MORPHING_P_IDLE: f64 = 4.4e-11;

/// Inter-module rate at physical error rate 10⁻⁴.
pub const LOW_NOISE_P_INTER: f64 = 1.5e-8;

impl Default for InstructionRates {
    /// Rates at physical error rate 10⁻³.
    fn default() -> Self {
        InstructionRates {
            p_half: 1.7e-7,
            p_whole: 1.6e-6,
            p_inter: 2.8e-6,
            p_idle: libm::pow(10.0, -8.8),
            tau_meas: 120.0,
            tau_idle: 8.0,
        }
    }
}

impl InstructionRates {
    /// Default rates with the morphing idle circuit.
    pub fn morphing() -> Self {
        InstructionRates { p_idle: MORPHING_P_IDLE, ..Self::default() }
    }

    /// Physical error rate 10⁻⁴: only the inter-module rate is fixed, the
    /// in-module and idle rates must be supplied.
    pub fn low_noise(p_half: f64, p_whole: f64, p_idle: f64) -> Self {
        InstructionRates { p_half, p_whole, p_inter: LOW_NOISE_P_INTER, p_idle, ..Self::default() }
    }

    /// All error rates zero, default timings.
    pub fn noiseless() -> Self {
        InstructionRates { p_half: 0.0, p_whole: 0.0, p_inter: 0.0, p_idle: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("p_half", self.p_half),
            ("p_whole", self.p_whole),
            ("p_inter", self.p_inter),
            ("p_idle", self.p_idle),
        ] {
            if !(0.0..1.0).contains(&value) {
                return Err(NoiseError::InvalidRate { name, value });
            }
        }
        for (name, value) in [("tau_meas", self.tau_meas), ("tau_idle", self.tau_idle)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(NoiseError::InvalidRate { name, value });
            }
        }
        Ok(())
    }

    pub fn rate(&self, class: InstructionClass) -> f64 {
        match class {
            InstructionClass::Half => self.p_half,
            InstructionClass::Whole => self.p_whole,
            InstructionClass::Inter => self.p_inter,
        }
    }
}

/// The three instruction classes that carry separate rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstructionClass {
    Half,
    Whole,
    Inter,
}

impl InstructionClass {
    pub const ALL: [InstructionClass; 3] =
        [InstructionClass::Half, InstructionClass::Whole, InstructionClass::Inter];

    fn index(self) -> usize {
        match self {
            InstructionClass::Half => 0,
            InstructionClass::Whole => 1,
            InstructionClass::Inter => 2,
        }
    }
}

/// Post-selection rates `(r_half, r_whole, r_inter)` of one condition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Condition {
    pub r_half: f64,
    pub r_whole: f64,
    pub r_inter: f64,
}

impl Condition {
    pub const TRIVIAL: Condition = Condition { r_half: 0.0, r_whole: 0.0, r_inter: 0.0 };

    pub fn rate(&self, class: InstructionClass) -> f64 {
        match class {
            InstructionClass::Half => self.r_half,
            InstructionClass::Whole => self.r_whole,
            InstructionClass::Inter => self.r_inter,
        }
    }
}

/// Piecewise-linear map from post-selection rate to error-rate multiplier.
/// An empty table is the identity (multiplier 1 at every rate).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionTable {
    points: Vec<(f64, f64)>,
}

impl ReductionTable {
    /// Points `(rate, multiplier)`; sorted by rate on construction.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, NoiseError> {
        for &(r, m) in &points {
            if !(0.0..1.0).contains(&r) {
                return Err(NoiseError::InvalidRate { name: "reduction rate", value: r });
            }
            if !(m > 0.0 && m <= 1.0) {
                return Err(NoiseError::InvalidRate { name: "reduction multiplier", value: m });
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(ReductionTable { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Multiplier at `rate`, interpolated linearly and clamped at the ends.
    /// Rate 0 always maps to 1.
    pub fn multiplier(&self, rate: f64) -> f64 {
        if rate <= 0.0 || self.points.is_empty() {
            return 1.0;
        }
        // The implicit point (0, 1) anchors the curve.
        let mut prev = (0.0, 1.0);
        for &(r, m) in &self.points {
            if rate <= r {
                if r == prev.0 {
                    return m;
                }
                let t = (rate - prev.0) / (r - prev.0);
                return prev.1 + t * (m - prev.1);
            }
            prev = (r, m);
        }
        prev.1
    }
}

/// Which post-selection condition an operation is subject to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond {
    /// Non-FT `Z^αZ^β` on the ancilla row, retried in place.
    C1,
    /// Qudit `ZZ` between ancilla and cat rows.
    C2,
    /// Second non-FT layer on the cat row itself.
    C3,
}

/// Rates and reduction curves of the three post-selection conditions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PostSelection {
    pub conditions: [Condition; 3],
    /// One reduction table per instruction class (half, whole, inter).
    pub reduction: [ReductionTable; 3],
}

impl PostSelection {
    /// No post-selection anywhere.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn condition(&self, c: Cond) -> &Condition {
        &self.conditions[match c {
            Cond::C1 => 0,
            Cond::C2 => 1,
            Cond::C3 => 2,
        }]
    }

    /// `P[class, C]`: base rate times the multiplier at that condition's rate.
    pub fn scaled_rate(&self, rates: &InstructionRates, class: InstructionClass, c: Cond) -> f64 {
        rates.rate(class) * self.reduction[class.index()].multiplier(self.condition(c).rate(class))
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for c in &self.conditions {
            for class in InstructionClass::ALL {
                let r = c.rate(class);
                if !(0.0..1.0).contains(&r) {
                    return Err(NoiseError::InvalidRate { name: "post-selection rate", value: r });
                }
            }
        }
        Ok(())
    }
}

/// Mean instruction counts and duration of one compiled qudit operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpStats {
    pub half: f64,
    pub whole: f64,
    pub inter: f64,
    /// Duration in units of `τ_meas`.
    pub duration: f64,
}

impl OpStats {
    pub fn count(&self, class: InstructionClass) -> f64 {
        match class {
            InstructionClass::Half => self.half,
            InstructionClass::Whole => self.whole,
            InstructionClass::Inter => self.inter,
        }
    }
}

/// Qudit `ZZ` (or `XX`) measurement.
pub const ZZ_STATS: OpStats = OpStats { half: 34.0, whole: 12.0, inter: 11.0, duration: 34.0 };

/// Non-fault-tolerant qudit `Z^αZ^β` measurement, averaged over mappings.
pub const ZAZB_STATS: OpStats =
    OpStats { half: 73.05, whole: 56.53, inter: 11.0, duration: 117.58 };

/// Duration of a parallel layer of non-FT `Z^αZ^β` measurements, in `τ_meas`.
pub const ZAZB_LAYER_DURATION: f64 = 125.0;

/// Probability of any fault in `stats` that survives post-selection under
/// `cond` (or with no post-selection when `ps` is `None`).
pub fn composite_rate(
    stats: &OpStats,
    rates: &InstructionRates,
    ps: Option<(&PostSelection, Cond)>,
) -> f64 {
    InstructionClass::ALL
        .iter()
        .map(|&class| {
            let p = match ps {
                Some((ps, c)) => ps.scaled_rate(rates, class, c),
                None => rates.rate(class),
            };
            stats.count(class) * p
        })
        .sum()
}

/// Probability that one instance of `stats` passes post-selection `cond`:
/// `Π_class (1 − r_class)^{count_class}` with real exponents.
pub fn survival_probability(stats: &OpStats, cond: &Condition) -> f64 {
    InstructionClass::ALL
        .iter()
        .map(|&class| libm::pow(1.0 - cond.rate(class), stats.count(class)))
        .product()
}

/// Probability that a full layer of `n` qudit `ZZ` measurements passes `cond`.
pub fn zz_layer_survival(n: usize, cond: &Condition) -> f64 {
    let layer = OpStats {
        half: ZZ_STATS.half * n as f64,
        whole: ZZ_STATS.whole * n as f64,
        inter: ZZ_STATS.inter * n as f64,
        duration: ZZ_STATS.duration,
    };
    survival_probability(&layer, cond)
}

/// Expected completion time of `n` independent tasks run in parallel, each
/// retried until it succeeds, where a success costs one unit and a failure
/// half a unit.
///
/// With `G_i` the number of failures of task `i`, the time is
/// `1 + max_i G_i / 2`, so the expectation is
/// `1 + ½ Σ_{t≥1} (1 − (1 − (1−p)^t)^n)`. This series has positive terms and
/// is summed until the terms vanish; it equals the alternating closed form
/// [`expected_parallel_time_alternating`].
pub fn expected_parallel_time(n: usize, p: f64) -> Result<f64, NoiseError> {
    if !(p > 0.0) {
        return Err(NoiseError::DegenerateP(p));
    }
    if n == 0 || p >= 1.0 {
        return Ok(1.0);
    }
    let fail = 1.0 - p;
    let mut sum = 0.0;
    let mut ft = 1.0;
    loop {
        ft *= fail;
        // 1 − (1 − ft)^n, computed without cancellation.
        let term = -libm::expm1(n as f64 * libm::log1p(-ft));
        sum += term;
        if term < 1e-17 * sum.max(1.0) {
            break;
        }
    }
    Ok(1.0 + 0.5 * sum)
}

/// `1 + ½ Σ_{j=1}^{n} (−1)^{j+1} C(n,j) (1−p)^j / (1 − (1−p)^j)`.
///
/// Numerically unstable for large `n`; kept as the reference form.
pub fn expected_parallel_time_alternating(n: usize, p: f64) -> Result<f64, NoiseError> {
    if !(p > 0.0) {
        return Err(NoiseError::DegenerateP(p));
    }
    if p >= 1.0 {
        return Ok(1.0);
    }
    let fail = 1.0 - p;
    let mut sum = 0.0;
    for j in 1..=n {
        let c = binomial(n as u64, j as u64).to_f64().unwrap_or(f64::INFINITY);
        let fj = libm::pow(fail, j as f64);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * c * fj / (1.0 - fj);
    }
    Ok(1.0 + 0.5 * sum)
}

/// Expected cat-state preparation times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatTiming {
    /// One parallel layer of `⌊n/2⌋` non-FT `Z^αZ^β` under `C1`, with retries.
    pub one_layer: f64,
    /// Non-fault-tolerant two-layer preparation.
    pub non_ft: f64,
    /// Full preparation plus `R` verification rounds.
    pub cat: f64,
    /// Success probability of one non-FT `Z^αZ^β` under `C1`.
    pub p_c1: f64,
    /// Success probability of the whole second layer under `C3`.
    pub q2: f64,
    /// Success probability of one layer of `n` `ZZ` under `C2`.
    pub p2: f64,
}

/// Expected time to prepare and verify one cat state on `n` qudits with
/// `r` rounds of checking, without logical-level post-selection.
///
/// Failed attempts cost half a success. The verification phase uses the
/// finite geometric sum `Σ_{j<2R} p2^j` in place of `(1 − p2^{2R})/(1 − p2)`,
/// which also covers `p2 = 1`.
pub fn cat_time(
    n: usize,
    r: usize,
    ps: &PostSelection,
    rates: &InstructionRates,
) -> Result<CatTiming, NoiseError> {
    let layer = ZAZB_LAYER_DURATION * rates.tau_meas;
    let tau_zz = ZZ_STATS.duration * rates.tau_meas;
    let p_c1 = survival_probability(&ZAZB_STATS, ps.condition(Cond::C1));
    let one_layer = layer * expected_parallel_time(n / 2, p_c1)?;
    let q2 = libm::pow(survival_probability(&ZAZB_STATS, ps.condition(Cond::C3)), n as f64 / 2.0);
    if !(q2 > 0.0) {
        return Err(NoiseError::DegenerateP(q2));
    }
    let non_ft = one_layer / q2 + (1.0 + q2) / (2.0 * q2) * layer;
    let p2 = zz_layer_survival(n, ps.condition(Cond::C2));
    if !(p2 > 0.0) {
        return Err(NoiseError::DegenerateP(p2));
    }
    let rounds = 2 * r;
    let geometric = (0..rounds).fold(0.0, |acc, j| acc + libm::pow(p2, j as f64));
    let per_round = one_layer + (1.0 + p2) / 2.0 * tau_zz;
    let cat = (non_ft + per_round * geometric) / libm::pow(p2, rounds as f64);
    Ok(CatTiming { one_layer, non_ft, cat, p_c1, q2, p2 })
}

/// Error model of one accepted cat state and its consumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatModel {
    /// `P[ZZ]` without post-selection (also `P[XX]`).
    pub p_zz: f64,
    /// `P[ZZ, C2]`.
    pub p_zz_c2: f64,
    /// `P[Z^αZ^β, C1]` and `P[Z^αZ^β, C3]`.
    pub p_zazb_c1: f64,
    pub p_zazb_c3: f64,
    /// `P[(Z^αZ^β)_FT, C1, C2] = P[Z^αZ^β, C1] + 2 P[ZZ, C2]`.
    pub p_ft: f64,
    /// Probability of any surviving fault while creating the cat state.
    pub p_creation: f64,
    /// `n · P[XX]`: faults while consuming it.
    pub p_consumption: f64,
    /// `P[Cat] = P[CatCreation] + P[CatConsumption]`.
    pub p_cat: f64,
    /// Probability of more than `R` X errors on an accepted cat state.
    pub p_cat_state_failure: f64,
    /// Bounds `C(n,w) · P[ZZ, C2]^w` on `w` X errors, for `w = 1, 2, 3`.
    pub x_weight_bounds: [f64; 3],
    pub timing: CatTiming,
}

/// Accepted-cat error distribution and timing for an `n`-qudit cat with
/// `r` verification rounds.
pub fn cat_error_distribution(
    n: usize,
    r: usize,
    ps: &PostSelection,
    rates: &InstructionRates,
) -> Result<CatModel, NoiseError> {
    let timing = cat_time(n, r, ps, rates)?;
    let p_zz = composite_rate(&ZZ_STATS, rates, None);
    let p_zz_c2 = composite_rate(&ZZ_STATS, rates, Some((ps, Cond::C2)));
    let p_zazb_c1 = composite_rate(&ZAZB_STATS, rates, Some((ps, Cond::C1)));
    let p_zazb_c3 = composite_rate(&ZAZB_STATS, rates, Some((ps, Cond::C3)));
    let p_ft = p_zazb_c1 + 2.0 * p_zz_c2;
    let half_n = n as f64 / 2.0;
    let ft_r = libm::pow(p_ft, r as f64);
    let p_cat_state_failure = half_n * p_zazb_c1 * ft_r + half_n * p_zazb_c3 * ft_r;
    let p_creation =
        half_n * p_zazb_c1 + half_n * p_zazb_c3 + (r * n.saturating_sub(1)) as f64 * p_ft;
    let p_consumption = n as f64 * p_zz;
    let mut x_weight_bounds = [0.0; 3];
    for (i, b) in x_weight_bounds.iter_mut().enumerate() {
        let w = i as u64 + 1;
        let c = binomial(n as u64, w).to_f64().unwrap_or(f64::INFINITY);
        *b = c * libm::pow(p_zz_c2, w as f64);
    }
    Ok(CatModel {
        p_zz,
        p_zz_c2,
        p_zazb_c1,
        p_zazb_c3,
        p_ft,
        p_creation,
        p_consumption,
        p_cat: p_creation + p_consumption,
        p_cat_state_failure,
        x_weight_bounds,
        timing,
    })
}

/// Expected idle rounds one block accrues between two of its syndrome
/// extractions, for `m − 2` data rows and rounds of `d − 1 + M` checks:
///
/// `(m−2)/τ_idle · (6τ_ZZ + 2(d−1+M)(τ_ZZ + τ_Cat) / (1 − (d−1+M)P[Cat]))`.
pub fn outer_round_length(
    m: usize,
    d: usize,
    big_m: usize,
    tau_cat: f64,
    p_cat: f64,
    rates: &InstructionRates,
) -> Result<f64, NoiseError> {
    let checks = (d - 1 + big_m) as f64;
    let denom = 1.0 - checks * p_cat;
    if !(denom > 0.0) {
        return Err(NoiseError::DivergentRetry { attempts_failure: checks * p_cat });
    }
    let tau_zz = ZZ_STATS.duration * rates.tau_meas;
    let rows = m.saturating_sub(2) as f64;
    Ok(rows / rates.tau_idle * (6.0 * tau_zz + 2.0 * checks * (tau_zz + tau_cat) / denom))
}
