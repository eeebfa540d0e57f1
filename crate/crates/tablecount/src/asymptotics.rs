//! Closed-form asymptotic estimators for matrix-class sizes, computed in
//! natural-log space, together with the residual-exponent extraction and
//! the M·P1·P2·E decomposition of the near-regular form.
//!
//! All estimators share one exponent core parameterized by the alphabet
//! indicators, so the unrestricted, 0-1, and restricted forms agree bit for
//! bit wherever the algebra says they coincide. Binomial prefactors are
//! evaluated through exact log-factorials rather than series expansions.

use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exact::EntryAlphabet;
use crate::margins::{
    central_moments, power_sums, rational_to_f64, MarginError, MarginPair, MomentSummary,
};

/// Errors raised by the estimators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Margin(#[from] MarginError),
    /// Equal-row-sum/equal-column-sum parameters must satisfy m·s = n·t.
    #[error("inconsistent semiregular parameters: m*s = {m}*{s} != n*t = {n}*{t}")]
    InconsistentSemiregular { m: u64, s: u64, n: u64, t: u64 },
    /// The restricted estimator needs an alphabet containing both 0 and 1.
    #[error("the restricted estimator requires 0 and 1 in the entry alphabet")]
    AlphabetMissingZeroOne,
}

/// Which closed form produced a [`LogEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    Main,
    ZeroOne,
    Semiregular,
    MomentForm,
    NearRegular,
    Restricted,
    CanfieldMckay,
}

impl FormulaId {
    pub fn name(&self) -> &'static str {
        match self {
            FormulaId::Main => "main",
            FormulaId::ZeroOne => "zero_one",
            FormulaId::Semiregular => "semiregular",
            FormulaId::MomentForm => "moment_form",
            FormulaId::NearRegular => "near_regular",
            FormulaId::Restricted => "restricted",
            FormulaId::CanfieldMckay => "canfield_mckay",
        }
    }
}

/// Diagnostic flags describing how comfortably the input sits inside the
/// regimes the closed forms are tuned for. Estimators never refuse inputs
/// on these grounds; they report and proceed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Applicability {
    /// Sparseness heuristic: s_max·t_max ≤ S^(2/3).
    pub sparse: bool,
    /// Near-regular heuristic: (1+μ̂2)(1+ν̂2) ≤ S^(1/3).
    pub near_regular: bool,
    /// All row sums equal and all column sums equal.
    pub semiregular: bool,
}

/// An estimate carried in natural-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEstimate {
    pub formula: FormulaId,
    /// Natural log of the estimated count.
    pub log_value: f64,
    /// Uniform relative-error order s_max³·t_max³/S².
    pub error_order: f64,
    pub applicability: Applicability,
}

impl LogEstimate {
    /// Base-10 logarithm of the estimate.
    pub fn log10_value(&self) -> f64 {
        self.log_value / std::f64::consts::LN_10
    }

    /// Renders the estimate as `mantissa × 10^exponent` with
    /// mantissa in [1, 10).
    pub fn decimal_parts(&self) -> (f64, i64) {
        let l10 = self.log10_value();
        let exponent = l10.floor();
        let mantissa = 10f64.powf(l10 - exponent);
        (mantissa, exponent as i64)
    }
}

const LF_TABLE_MAX: u64 = 1_000_000;

struct LfCache {
    /// table[k] = ln(k!), built by compensated summation of ln k.
    table: Vec<f64>,
    /// Running compensation term so extensions continue the same sum.
    compensation: f64,
}

fn lf_cache() -> &'static RwLock<LfCache> {
    static CACHE: OnceLock<RwLock<LfCache>> = OnceLock::new();
    CACHE.get_or_init(|| {
        RwLock::new(LfCache {
            table: vec![0.0, 0.0],
            compensation: 0.0,
        })
    })
}

/// Stirling series through the x⁻⁵ term; for x > 10⁶ the truncation error
/// is far below double-precision resolution.
fn log_factorial_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Natural log of x!, accurate to well over 12 significant digits.
///
/// Values up to 10⁶ come from a shared append-only table of compensated
/// prefix sums of ln k (safe under concurrent reads; extensions are
/// idempotent); larger arguments use the asymptotic series.
pub fn log_factorial(x: u64) -> f64 {
    if x > LF_TABLE_MAX {
        return log_factorial_series(x as f64);
    }
    let idx = x as usize;
    {
        let cache = lf_cache().read().expect("log-factorial cache poisoned");
        if let Some(&v) = cache.table.get(idx) {
            return v;
        }
    }
    let mut cache = lf_cache().write().expect("log-factorial cache poisoned");
    while cache.table.len() <= idx {
        let k = cache.table.len() as f64;
        let sum = *cache.table.last().expect("seeded with 0! and 1!");
        let y = k.ln() - cache.compensation;
        let t = sum + y;
        cache.compensation = (t - sum) - y;
        cache.table.push(t);
    }
    cache.table[idx]
}

/// Natural log of the binomial coefficient C(a, b); negative infinity when
/// b > a (the coefficient is 0).
pub fn ln_binomial(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    log_factorial(a) - log_factorial(b) - log_factorial(a - b)
}

/// Power sums of both margin sides as floats, plus the total.
struct PowerSumsF64 {
    s: f64,
    s2: f64,
    s3: f64,
    t2: f64,
    t3: f64,
}

fn power_sums_f64(margins: &MarginPair) -> PowerSumsF64 {
    let (s2, t2) = power_sums(margins, 2).expect("order 2 is supported");
    let (s3, t3) = power_sums(margins, 3).expect("order 3 is supported");
    let big_to_f64 = |v: num_bigint::BigUint| v.to_f64().unwrap_or(f64::INFINITY);
    PowerSumsF64 {
        s: margins.total() as f64,
        s2: big_to_f64(s2),
        s3: big_to_f64(s3),
        t2: big_to_f64(t2),
        t3: big_to_f64(t3),
    }
}

/// The shared correction exponent, parameterized by the indicator values
/// chi2 (is 2 allowed?) and chi3 (is 3 allowed?). The unrestricted form is
/// (1,1), the 0-1 form is (0,0); using one code path makes those identities
/// hold to the last bit.
fn restricted_exponent(chi2: f64, chi3: f64, p: &PowerSumsF64) -> f64 {
    let s2 = p.s * p.s;
    let s3 = s2 * p.s;
    let s4 = s3 * p.s;
    let s5 = s4 * p.s;
    let a = p.s2 * p.t2;
    (chi2 - 0.5) * a / s2
        + (chi2 - 0.5) * a / s3
        + (chi3 - chi2 + 1.0 / 3.0) * p.s3 * p.t3 / s3
        - a * (p.s2 + p.t2) / (4.0 * s4)
        - (p.s2 * p.s2 * p.t3 + p.s3 * p.t2 * p.t2) / (2.0 * s4)
        + (p.s2 * p.s2) * (p.t2 * p.t2) / (2.0 * s5)
}

/// ln S! − Σ ln s_i! − Σ ln t_j!, the common prefactor of the sparse forms.
fn log_base_factor(margins: &MarginPair) -> f64 {
    let mut acc = log_factorial(margins.total());
    for &si in margins.rows() {
        acc -= log_factorial(si);
    }
    for &tj in margins.cols() {
        acc -= log_factorial(tj);
    }
    acc
}

fn applicability_of(margins: &MarginPair, moments: &MomentSummary) -> Applicability {
    let s = margins.total() as f64;
    let mu2 = rational_to_f64(&moments.mu2);
    let nu2 = rational_to_f64(&moments.nu2);
    Applicability {
        sparse: (moments.s_max as f64) * (moments.t_max as f64) <= s.powf(2.0 / 3.0),
        near_regular: (1.0 + mu2) * (1.0 + nu2) <= s.powf(1.0 / 3.0),
        semiregular: margins.is_semiregular(),
    }
}

fn error_order_of(margins: &MarginPair) -> f64 {
    let s = margins.s_max() as f64;
    let t = margins.t_max() as f64;
    let total = margins.total() as f64;
    (s * t).powi(3) / (total * total)
}

fn require_positive_total(margins: &MarginPair) -> Result<(), EstimateError> {
    if margins.total() == 0 {
        Err(MarginError::ZeroTotal.into())
    } else {
        Ok(())
    }
}

fn factorial_form_estimate(
    margins: &MarginPair,
    formula: FormulaId,
    chi2: f64,
    chi3: f64,
) -> Result<LogEstimate, EstimateError> {
    require_positive_total(margins)?;
    let moments = central_moments(margins)?;
    let powers = power_sums_f64(margins);
    Ok(LogEstimate {
        formula,
        log_value: log_base_factor(margins) + restricted_exponent(chi2, chi3, &powers),
        error_order: error_order_of(margins),
        applicability: applicability_of(margins, &moments),
    })
}

/// Estimate of the number of matrices with unrestricted nonnegative entries.
pub fn estimate_main(margins: &MarginPair) -> Result<LogEstimate, EstimateError> {
    factorial_form_estimate(margins, FormulaId::Main, 1.0, 1.0)
}

/// Estimate of the number of 0-1 matrices.
pub fn estimate_01(margins: &MarginPair) -> Result<LogEstimate, EstimateError> {
    factorial_form_estimate(margins, FormulaId::ZeroOne, 0.0, 0.0)
}

/// Estimate of the number of matrices whose entries are restricted to the
/// given alphabet (which must contain 0 and 1); only membership of 2 and 3
/// enters the correction terms.
pub fn estimate_restricted(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
) -> Result<LogEstimate, EstimateError> {
    if !alphabet.has_zero_and_one() {
        return Err(EstimateError::AlphabetMissingZeroOne);
    }
    let chi2 = if alphabet.contains(2) { 1.0 } else { 0.0 };
    let chi3 = if alphabet.contains(3) { 1.0 } else { 0.0 };
    factorial_form_estimate(margins, FormulaId::Restricted, chi2, chi3)
}

/// The exact asserted gap between the unrestricted and 0-1 estimates:
/// S2T2/S² + S2T2/S³.
pub fn main_01_log_shift(margins: &MarginPair) -> Result<f64, EstimateError> {
    require_positive_total(margins)?;
    let p = power_sums_f64(margins);
    let a = p.s2 * p.t2;
    Ok(a / (p.s * p.s) + a / (p.s * p.s * p.s))
}

/// Equal row sums s on m rows and equal column sums t on n columns, with
/// m·s = n·t. Carries λ = s/n = t/m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiregularSpec {
    m: u64,
    n: u64,
    s: u64,
    t: u64,
}

/// The density hypothesis report: lhs ≤ a·ln n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityHypothesis {
    pub lhs: f64,
    pub rhs: f64,
    pub coefficient: f64,
    pub satisfied: bool,
}

impl SemiregularSpec {
    pub fn new(m: u64, n: u64, s: u64, t: u64) -> Result<Self, EstimateError> {
        if m == 0 || n == 0 {
            return Err(MarginError::EmptyMargin.into());
        }
        if s == 0 || t == 0 {
            return Err(MarginError::ZeroTotal.into());
        }
        if m * s != n * t {
            return Err(EstimateError::InconsistentSemiregular { m, s, n, t });
        }
        Ok(SemiregularSpec { m, n, s, t })
    }

    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn s(&self) -> u64 {
        self.s
    }
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Common total S = m·s = n·t.
    pub fn total(&self) -> u64 {
        self.m * self.s
    }

    /// Density λ = s/n = t/m.
    pub fn lambda(&self) -> f64 {
        self.s as f64 / self.n as f64
    }

    /// Expands to an explicit margin pair ([s; m], [t; n]).
    pub fn margins(&self) -> MarginPair {
        MarginPair::new(vec![self.s; self.m as usize], vec![self.t; self.n as usize])
            .expect("semiregular parameters always form valid margins")
    }

    /// Evaluates the density-range hypothesis
    /// (1+2λ)²/(4λ(1+λ)) · (1 + 5m/6n + 5n/6m) ≤ a·ln n.
    pub fn density_hypothesis(&self, coefficient: f64) -> DensityHypothesis {
        let lambda = self.lambda();
        let m = self.m as f64;
        let n = self.n as f64;
        let lhs = (1.0 + 2.0 * lambda).powi(2) / (4.0 * lambda * (1.0 + lambda))
            * (1.0 + 5.0 * m / (6.0 * n) + 5.0 * n / (6.0 * m));
        let rhs = coefficient * n.ln();
        DensityHypothesis {
            lhs,
            rhs,
            coefficient,
            satisfied: lhs <= rhs,
        }
    }

    fn applicability(&self) -> Applicability {
        let s_total = self.total() as f64;
        Applicability {
            sparse: (self.s as f64) * (self.t as f64) <= s_total.powf(2.0 / 3.0),
            // Equal margins have zero scaled central moments.
            near_regular: 1.0 <= s_total.powf(1.0 / 3.0),
            semiregular: true,
        }
    }

    fn error_order(&self) -> f64 {
        let total = self.total() as f64;
        ((self.s as f64) * (self.t as f64)).powi(3) / (total * total)
    }
}

/// Closed form for equal margins:
/// ln S! − m ln s! − n ln t! + (s−1)(t−1)/2 − (s−1)(t−1)(2st−s−t−10)/(12S).
pub fn estimate_semiregular(spec: &SemiregularSpec) -> LogEstimate {
    let (m, n, s, t) = (spec.m as f64, spec.n as f64, spec.s as f64, spec.t as f64);
    let total = spec.total();
    let a = (s - 1.0) * (t - 1.0);
    let log_value = log_factorial(total) - m * log_factorial(spec.s) - n * log_factorial(spec.t)
        + a / 2.0
        - a * (2.0 * s * t - s - t - 10.0) / (12.0 * total as f64);
    LogEstimate {
        formula: FormulaId::Semiregular,
        log_value,
        error_order: spec.error_order(),
        applicability: spec.applicability(),
    }
}

/// Sum of the per-row and per-column composition-count logs:
/// Σ_i ln C(n+s_i−1, s_i) + Σ_j ln C(m+t_j−1, t_j).
fn log_binomial_products(margins: &MarginPair) -> f64 {
    let m = margins.m() as u64;
    let n = margins.n() as u64;
    let mut acc = 0.0;
    for &si in margins.rows() {
        acc += ln_binomial(n + si - 1, si);
    }
    for &tj in margins.cols() {
        acc += ln_binomial(m + tj - 1, tj);
    }
    acc
}

fn ln_total_compositions(margins: &MarginPair) -> f64 {
    let mn = (margins.m() as u64) * (margins.n() as u64);
    ln_binomial(mn + margins.total() - 1, margins.total())
}

/// Moment-parameterized estimate: binomial prefactor times a four-term
/// exponent in the scaled central moments.
pub fn estimate_moment_form(margins: &MarginPair) -> Result<LogEstimate, EstimateError> {
    require_positive_total(margins)?;
    let moments = central_moments(margins)?;
    let s = margins.total() as f64;
    let m = margins.m() as f64;
    let n = margins.n() as f64;
    let mu2 = rational_to_f64(&moments.mu2);
    let mu3 = rational_to_f64(&moments.mu3);
    let nu2 = rational_to_f64(&moments.nu2);
    let nu3 = rational_to_f64(&moments.nu3);
    let prefactor = log_binomial_products(margins) - ln_total_compositions(margins);
    let exponent = (1.0 - mu2) * (1.0 - nu2) * (0.5 + (3.0 - mu2 * nu2) / (4.0 * s))
        - (1.0 - mu2) * (3.0 + mu2 - 2.0 * mu2 * nu2) / (4.0 * n)
        - (1.0 - nu2) * (3.0 + nu2 - 2.0 * mu2 * nu2) / (4.0 * m)
        + (1.0 - 3.0 * mu2 * mu2 + 2.0 * mu3) * (1.0 - 3.0 * nu2 * nu2 + 2.0 * nu3) / (12.0 * s);
    Ok(LogEstimate {
        formula: FormulaId::MomentForm,
        log_value: prefactor + exponent,
        error_order: error_order_of(margins),
        applicability: applicability_of(margins, &moments),
    })
}

/// Multiplicative decomposition of the near-regular estimate:
/// total = M · P1 · P2 · E, carried as logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// ln of the number of ways to compose S into m·n ordered cells.
    pub log_m: f64,
    /// ln of the probability that a uniform composition has row sums s.
    pub log_p1: f64,
    /// ln of the probability that a uniform composition has column sums t.
    pub log_p2: f64,
    /// ln of the correlation correction e^{(1−μ̂2)(1−ν̂2)/2}.
    pub log_e: f64,
}

impl Decomposition {
    /// The parts, summed in a fixed order; the near-regular estimate is
    /// defined as exactly this sum.
    pub fn log_total(&self) -> f64 {
        ((self.log_m + self.log_p1) + self.log_p2) + self.log_e
    }
}

/// Splits the near-regular estimate into composition count, two margin
/// probabilities, and the correlation factor.
pub fn decompose_mp1p2e(margins: &MarginPair) -> Result<Decomposition, EstimateError> {
    require_positive_total(margins)?;
    let moments = central_moments(margins)?;
    let m = margins.m() as u64;
    let n = margins.n() as u64;
    let log_m = ln_total_compositions(margins);
    let mut log_p1 = -log_m;
    for &si in margins.rows() {
        log_p1 += ln_binomial(n + si - 1, si);
    }
    let mut log_p2 = -log_m;
    for &tj in margins.cols() {
        log_p2 += ln_binomial(m + tj - 1, tj);
    }
    let mu2 = rational_to_f64(&moments.mu2);
    let nu2 = rational_to_f64(&moments.nu2);
    Ok(Decomposition {
        log_m,
        log_p1,
        log_p2,
        log_e: 0.5 * (1.0 - mu2) * (1.0 - nu2),
    })
}

/// Short near-regular estimate: binomial prefactor times
/// e^{(1−μ̂2)(1−ν̂2)/2}; defined as the sum of the decomposition parts.
pub fn estimate_near_regular(margins: &MarginPair) -> Result<LogEstimate, EstimateError> {
    let decomposition = decompose_mp1p2e(margins)?;
    let moments = central_moments(margins)?;
    Ok(LogEstimate {
        formula: FormulaId::NearRegular,
        log_value: decomposition.log_total(),
        error_order: error_order_of(margins),
        applicability: applicability_of(margins, &moments),
    })
}

/// Binomial-product closed form for equal margins with an explicit residual
/// exponent delta:
/// m ln C(n+s−1,s) + n ln C(m+t−1,t) − ln C(mn+S−1,S)
/// + ((m−1)/2)ln((m+1)/m) + ((n−1)/2)ln((n+1)/n) − 1/2 + delta/(m+n).
pub fn cm_estimate(spec: &SemiregularSpec, delta: f64) -> LogEstimate {
    let (m, n) = (spec.m, spec.n);
    let (mf, nf) = (m as f64, n as f64);
    let total = spec.total();
    let log_value = mf * ln_binomial(n + spec.s - 1, spec.s)
        + nf * ln_binomial(m + spec.t - 1, spec.t)
        - ln_binomial(m * n + total - 1, total)
        + (mf - 1.0) / 2.0 * ((mf + 1.0) / mf).ln()
        + (nf - 1.0) / 2.0 * ((nf + 1.0) / nf).ln()
        - 0.5
        + delta / (mf + nf);
    LogEstimate {
        formula: FormulaId::CanfieldMckay,
        log_value,
        error_order: spec.error_order(),
        applicability: spec.applicability(),
    }
}

/// The residual exponent recovered from a known exact count, plus the
/// conjectured sparse-range limit 5(s+t)/(6st).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReport {
    pub delta: f64,
    pub predicted_limit: f64,
}

/// Inverts [`cm_estimate`]: Δ = (m+n)(ln M_true − estimate-at-Δ=0).
pub fn delta_from_count(spec: &SemiregularSpec, log_m_true: f64) -> DeltaReport {
    let base = cm_estimate(spec, 0.0).log_value;
    let delta = (spec.m as f64 + spec.n as f64) * (log_m_true - base);
    let s = spec.s as f64;
    let t = spec.t as f64;
    DeltaReport {
        delta,
        predicted_limit: 5.0 * (s + t) / (6.0 * s * t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{count_exact, EntryAlphabet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn margins(rows: &[u64], cols: &[u64]) -> MarginPair {
        MarginPair::new(rows.to_vec(), cols.to_vec()).unwrap()
    }

    fn regular(value: u64, count: usize) -> MarginPair {
        margins(&vec![value; count], &vec![value; count])
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn log_factorial_small_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!(rel_close(log_factorial(2), 2f64.ln(), 1e-15));
        assert!(rel_close(log_factorial(10), 3_628_800f64.ln(), 1e-14));
        assert!(rel_close(log_factorial(20), 2_432_902_008_176_640_000f64.ln(), 1e-13));
    }

    #[test]
    fn log_factorial_matches_series_at_boundary() {
        let tabled = log_factorial(1_000_000);
        let series = log_factorial_series(1_000_000f64);
        assert!(rel_close(tabled, series, 1e-13), "{tabled} vs {series}");
        // Just beyond the table, the series is used directly.
        let beyond = log_factorial(1_000_001);
        assert!(beyond > tabled);
        assert!(rel_close(beyond - tabled, (1_000_001f64).ln(), 1e-7));
    }

    #[test]
    fn log_factorial_is_monotone_and_cached() {
        let a = log_factorial(5000);
        let b = log_factorial(4999);
        assert!(a > b);
        assert_eq!(a, log_factorial(5000));
    }

    #[test]
    fn ln_binomial_values() {
        assert_eq!(ln_binomial(5, 0), 0.0);
        assert_eq!(ln_binomial(5, 5), 0.0);
        assert!(rel_close(ln_binomial(5, 2), 10f64.ln(), 1e-14));
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn unrestricted_estimate_on_unit_margins_is_exact() {
        // All margins 1: every matrix is a permutation matrix, so the count
        // is k! and every correction term vanishes.
        for k in [2usize, 5, 9] {
            let mp = regular(1, k);
            let est = estimate_main(&mp).unwrap();
            assert!(rel_close(est.log_value, log_factorial(k as u64), 1e-13));
            let est01 = estimate_01(&mp).unwrap();
            assert_eq!(est.log_value, est01.log_value);
        }
    }

    #[test]
    fn zero_one_estimate_single_row() {
        // rows=[3], cols=[1,1,1]: all column power sums vanish, leaving
        // 3!/3! = 1, which matches the exact count.
        let mp = margins(&[3], &[1, 1, 1]);
        let est = estimate_01(&mp).unwrap();
        assert!(est.log_value.abs() < 1e-12);
        assert_eq!(
            count_exact(&mp, &EntryAlphabet::zero_one()).unwrap().value(),
            &num_bigint::BigUint::from(1u32)
        );
    }

    #[test]
    fn zero_total_is_rejected() {
        let mp = margins(&[0], &[0]);
        assert!(matches!(
            estimate_main(&mp),
            Err(EstimateError::Margin(MarginError::ZeroTotal))
        ));
        assert!(matches!(
            estimate_near_regular(&mp),
            Err(EstimateError::Margin(MarginError::ZeroTotal))
        ));
    }

    fn random_margins(rng: &mut ChaCha8Rng) -> MarginPair {
        let m = rng.gen_range(1..=6usize);
        let n = rng.gen_range(1..=6usize);
        let rows: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=5u64)).collect();
        let total: u64 = rows.iter().sum();
        let mut cols = vec![0u64; n];
        for _ in 0..total {
            cols[rng.gen_range(0..n)] += 1;
        }
        MarginPair::new(rows, cols).unwrap()
    }

    #[test]
    fn main_minus_zero_one_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 200 {
            let mp = random_margins(&mut rng);
            if mp.total() == 0 {
                continue;
            }
            checked += 1;
            let gap = estimate_main(&mp).unwrap().log_value - estimate_01(&mp).unwrap().log_value;
            let expected = main_01_log_shift(&mp).unwrap();
            assert!(
                rel_close(gap, expected, 1e-12),
                "identity failed on {:?}: {gap} vs {expected}",
                mp
            );
        }
    }

    #[test]
    fn restricted_reproduces_main_and_zero_one_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let mp = random_margins(&mut rng);
            if mp.total() == 0 {
                continue;
            }
            let full = EntryAlphabet::zero_to_three();
            let binary = EntryAlphabet::zero_one();
            let main = estimate_main(&mp).unwrap().log_value;
            let zero_one = estimate_01(&mp).unwrap().log_value;
            assert_eq!(estimate_restricted(&mp, &full).unwrap().log_value, main);
            assert_eq!(
                estimate_restricted(&mp, &binary).unwrap().log_value,
                zero_one
            );
        }
    }

    #[test]
    fn restricted_requires_zero_and_one() {
        let mp = regular(2, 4);
        let j02 = EntryAlphabet::finite([0, 2]).unwrap();
        assert!(matches!(
            estimate_restricted(&mp, &j02),
            Err(EstimateError::AlphabetMissingZeroOne)
        ));
    }

    #[test]
    fn estimators_invariant_under_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let mp = random_margins(&mut rng);
            if mp.total() == 0 {
                continue;
            }
            let base = estimate_main(&mp).unwrap().log_value;
            let transposed = estimate_main(&mp.transpose()).unwrap().log_value;
            assert!(rel_close(base, transposed, 1e-12));
            let mut rows = mp.rows().to_vec();
            rows.reverse();
            let permuted = margins(&rows, mp.cols());
            assert!(rel_close(
                base,
                estimate_main(&permuted).unwrap().log_value,
                1e-12
            ));
            let near = estimate_near_regular(&mp).unwrap().log_value;
            let near_t = estimate_near_regular(&mp.transpose()).unwrap().log_value;
            assert!(rel_close(near, near_t, 1e-12));
        }
    }

    #[test]
    fn semiregular_spec_validation() {
        assert!(SemiregularSpec::new(4, 4, 2, 2).is_ok());
        assert!(SemiregularSpec::new(2, 4, 2, 1).is_ok());
        assert!(matches!(
            SemiregularSpec::new(3, 4, 2, 2),
            Err(EstimateError::InconsistentSemiregular { .. })
        ));
        assert!(SemiregularSpec::new(0, 4, 2, 2).is_err());
        assert!(SemiregularSpec::new(4, 4, 0, 0).is_err());
        let spec = SemiregularSpec::new(2, 4, 2, 1).unwrap();
        assert_eq!(spec.total(), 4);
        assert!((spec.lambda() - 0.5).abs() < 1e-15);
        assert_eq!(spec.margins().rows(), &[2, 2]);
        assert_eq!(spec.margins().cols(), &[1, 1, 1, 1]);
    }

    #[test]
    fn semiregular_unit_sums_give_factorial() {
        // s = t = 1 zeroes the exponent, leaving m!.
        for m in [2u64, 4, 7] {
            let spec = SemiregularSpec::new(m, m, 1, 1).unwrap();
            let est = estimate_semiregular(&spec);
            assert!(rel_close(est.log_value, log_factorial(m), 1e-13));
        }
    }

    #[test]
    fn semiregular_matches_factorial_form_on_equal_margins() {
        for (m, s) in [(8u64, 2u64), (6, 3), (10, 2), (5, 4)] {
            let spec = SemiregularSpec::new(m, m, s, s).unwrap();
            let direct = estimate_semiregular(&spec).log_value;
            let expanded = estimate_main(&spec.margins()).unwrap().log_value;
            assert!(
                rel_close(direct, expanded, 1e-9),
                "m={m} s={s}: {direct} vs {expanded}"
            );
        }
    }

    #[test]
    fn moment_form_on_regular_margins() {
        // Equal margins zero the moments; the exponent collapses to
        // 1/2 + 3/(4S) − 3/(4n) − 3/(4m) + 1/(12S).
        let mp = regular(2, 8);
        let s = 16.0;
        let expected_exponent = 0.5 + 3.0 / (4.0 * s) - 3.0 / 32.0 - 3.0 / 32.0 + 1.0 / (12.0 * s);
        let prefactor = log_binomial_products(&mp) - ln_total_compositions(&mp);
        let est = estimate_moment_form(&mp).unwrap();
        assert!(rel_close(est.log_value, prefactor + expected_exponent, 1e-13));
    }

    #[test]
    fn near_regular_equals_decomposition_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..40 {
            let mp = random_margins(&mut rng);
            if mp.total() == 0 {
                continue;
            }
            let d = decompose_mp1p2e(&mp).unwrap();
            let est = estimate_near_regular(&mp).unwrap();
            assert_eq!(d.log_total(), est.log_value);
            // P1 and P2 are probabilities.
            assert!(d.log_p1 <= 1e-12, "log_p1 = {}", d.log_p1);
            assert!(d.log_p2 <= 1e-12, "log_p2 = {}", d.log_p2);
        }
    }

    #[test]
    fn decomposition_single_cell() {
        let mp = margins(&[5], &[5]);
        let d = decompose_mp1p2e(&mp).unwrap();
        assert!(d.log_m.abs() < 1e-12);
        assert!(d.log_p1.abs() < 1e-12);
        assert!(d.log_p2.abs() < 1e-12);
        assert!((d.log_e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decomposition_row_probability_matches_exhaustive() {
        // Compositions of 2 into a 2x2 grid: 10 total, 4 with row sums
        // (1,1), so P1 = 4/10.
        let mp = margins(&[1, 1], &[1, 1]);
        let d = decompose_mp1p2e(&mp).unwrap();
        assert!(rel_close(d.log_p1.exp(), 0.4, 1e-12));
        assert!(rel_close(d.log_p2.exp(), 0.4, 1e-12));
        assert!(rel_close(d.log_m.exp(), 10.0, 1e-12));
    }

    #[test]
    fn near_regular_error_shrinks_on_regular_family() {
        // Frozen reference: |ln(exact) − log| is 0.110071 at m=n=8 and
        // 0.060977 at m=n=16 for all-2 margins.
        let exact8 = count_exact(&regular(2, 8), &EntryAlphabet::all())
            .unwrap()
            .ln();
        let err8 = (exact8 - estimate_near_regular(&regular(2, 8)).unwrap().log_value).abs();
        assert!((err8 - 0.110071).abs() < 1e-4, "err8 = {err8}");
        let exact16 = count_exact(&regular(2, 16), &EntryAlphabet::all())
            .unwrap()
            .ln();
        let err16 = (exact16 - estimate_near_regular(&regular(2, 16)).unwrap().log_value).abs();
        assert!((err16 - 0.060977).abs() < 1e-4, "err16 = {err16}");
        assert!(err16 < err8 && err8 < 0.25);
    }

    #[test]
    fn moment_form_tracks_factorial_form() {
        // Frozen reference: the moment form misses the exact count by
        // 0.025346 at m=n=8 and 0.006731 at m=n=16 on all-2 margins.
        let exact8 = count_exact(&regular(2, 8), &EntryAlphabet::all())
            .unwrap()
            .ln();
        let err8 = (exact8 - estimate_moment_form(&regular(2, 8)).unwrap().log_value).abs();
        assert!((err8 - 0.025346).abs() < 1e-4, "err8 = {err8}");
        let exact16 = count_exact(&regular(2, 16), &EntryAlphabet::all())
            .unwrap()
            .ln();
        let err16 = (exact16 - estimate_moment_form(&regular(2, 16)).unwrap().log_value).abs();
        assert!((err16 - 0.006731).abs() < 1e-4, "err16 = {err16}");
        let diff = (estimate_moment_form(&regular(2, 8)).unwrap().log_value
            - estimate_main(&regular(2, 8)).unwrap().log_value)
            .abs();
        let order = estimate_main(&regular(2, 8)).unwrap().error_order;
        assert!(diff <= 2.0 * order, "diff {diff} vs order {order}");
    }

    #[test]
    fn cm_estimate_delta_linearity() {
        let spec = SemiregularSpec::new(6, 4, 2, 3).unwrap();
        let base = cm_estimate(&spec, 0.0).log_value;
        for delta in [-1.0f64, 0.5, 2.25] {
            let shifted = cm_estimate(&spec, delta).log_value;
            assert!(rel_close(shifted - base, delta / 10.0, 1e-12));
        }
    }

    #[test]
    fn delta_report_for_tiny_case() {
        // m=n=2, s=t=1: exact count is 2.
        let spec = SemiregularSpec::new(2, 2, 1, 1).unwrap();
        let report = delta_from_count(&spec, 2f64.ln());
        assert!(report.delta.is_finite());
        assert!(rel_close(report.predicted_limit, 5.0 / 3.0, 1e-13));
        let spec22 = SemiregularSpec::new(8, 8, 2, 2).unwrap();
        let limit = delta_from_count(&spec22, 0.0).predicted_limit;
        assert!(rel_close(limit, 5.0 / 6.0, 1e-13));
    }

    #[test]
    fn density_hypothesis_example() {
        // Frozen reference: m=n=20, s=t=2 gives lhs 8.727273 against
        // rhs 1.467909 at coefficient 0.49, so the hypothesis fails.
        let spec = SemiregularSpec::new(20, 20, 2, 2).unwrap();
        let report = spec.density_hypothesis(0.49);
        assert!((report.lhs - 8.727273).abs() < 1e-5, "lhs = {}", report.lhs);
        assert!((report.rhs - 1.467909).abs() < 1e-5, "rhs = {}", report.rhs);
        assert!(!report.satisfied);
    }

    #[test]
    fn applicability_flags() {
        let est = estimate_main(&regular(1, 50)).unwrap();
        assert!(est.applicability.sparse);
        assert!(est.applicability.near_regular);
        assert!(est.applicability.semiregular);
        // A wildly skewed pair: s_max·t_max far above S^(2/3).
        let mp = margins(&[9, 1], &[9, 1]);
        let est = estimate_main(&mp).unwrap();
        assert!(!est.applicability.sparse);
        assert!(!est.applicability.semiregular);
        assert!(est.error_order > 0.0);
    }

    #[test]
    fn decimal_rendering() {
        let mp = regular(3, 4);
        // Exact count is 2008; the estimate is near it, so the decimal
        // rendering should sit in the thousands.
        let est = estimate_main(&mp).unwrap();
        let (mantissa, exponent) = est.decimal_parts();
        assert!((1.0..10.0).contains(&mantissa));
        assert_eq!(exponent, 3);
        assert!(rel_close(est.log10_value(), est.log_value / 10f64.ln(), 1e-15));
    }

    #[test]
    fn error_order_definition() {
        let mp = margins(&[3, 1], &[2, 2]);
        let est = estimate_main(&mp).unwrap();
        // s_max = 3, t_max = 2, S = 4.
        assert!(rel_close(est.error_order, 6f64.powi(3) / 16.0, 1e-13));
    }
}
