//! Margin vectors (prescribed row and column sums) and their summary statistics.
//!
//! A [`MarginPair`] fixes the row-sum vector `s` and the column-sum vector `t`
//! shared by every operation in this crate. The module validates raw margin
//! input, computes falling-factorial power sums `S_k`, `T_k`, the scaled
//! central moments of the margin vectors, and the regime thresholds that the
//! asymptotic machinery keys off.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Which side of a margin pair an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginSide {
    Rows,
    Cols,
}

impl fmt::Display for MarginSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarginSide::Rows => write!(f, "rows"),
            MarginSide::Cols => write!(f, "cols"),
        }
    }
}

/// Errors raised while validating margins or computing their statistics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarginError {
    /// Both margin vectors must contain at least one entry.
    #[error("margin vectors must be nonempty")]
    EmptyMargin,
    /// Margin entries are counts and may not be negative.
    #[error("negative entry {value} at {side} index {index}")]
    NegativeEntry {
        side: MarginSide,
        index: usize,
        value: i64,
    },
    /// Row and column sums must describe the same matrix total.
    #[error("row total {row_total} does not match column total {col_total}")]
    SumMismatch { row_total: u64, col_total: u64 },
    /// The operation needs a positive total to be well defined.
    #[error("operation requires a positive margin total")]
    ZeroTotal,
    /// Power sums are exposed for orders 1 through 4 only.
    #[error("power sums support orders 1 through 4, not {order}")]
    UnsupportedOrder { order: u32 },
}

/// A validated pair of margin vectors with matching totals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarginPair {
    rows: Vec<u64>,
    cols: Vec<u64>,
    total: u64,
}

impl MarginPair {
    /// Builds a margin pair from unsigned vectors, checking shape and totals.
    pub fn new(rows: Vec<u64>, cols: Vec<u64>) -> Result<Self, MarginError> {
        if rows.is_empty() || cols.is_empty() {
            return Err(MarginError::EmptyMargin);
        }
        let row_total: u64 = rows.iter().sum();
        let col_total: u64 = cols.iter().sum();
        if row_total != col_total {
            return Err(MarginError::SumMismatch {
                row_total,
                col_total,
            });
        }
        Ok(MarginPair {
            rows,
            cols,
            total: row_total,
        })
    }

    /// Row-sum vector `s`.
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Column-sum vector `t`.
    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    /// Number of rows `m`.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns `n`.
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// The common total `S`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Largest row sum.
    pub fn s_max(&self) -> u64 {
        self.rows.iter().copied().max().unwrap_or(0)
    }

    /// Largest column sum.
    pub fn t_max(&self) -> u64 {
        self.cols.iter().copied().max().unwrap_or(0)
    }

    /// The margin pair of the transposed matrix class.
    pub fn transpose(&self) -> MarginPair {
        MarginPair {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            total: self.total,
        }
    }

    /// True when every row sum equals every other and likewise for columns.
    pub fn is_semiregular(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1]) && self.cols.windows(2).all(|w| w[0] == w[1])
    }

    /// `s_max * t_max / S^(2/3)`, a diagnostic for how sparse the class is.
    pub fn sparsity_ratio(&self) -> f64 {
        let s = self.total as f64;
        if s == 0.0 {
            return f64::INFINITY;
        }
        (self.s_max() as f64) * (self.t_max() as f64) / s.powf(2.0 / 3.0)
    }
}

/// Validates raw signed margin input and returns the margin pair.
///
/// Rejects empty vectors, negative entries (reported with their position),
/// and mismatched totals. A total of zero is allowed here; operations that
/// need `S > 0` reject it themselves.
pub fn validate_margins(rows: &[i64], cols: &[i64]) -> Result<MarginPair, MarginError> {
    if rows.is_empty() || cols.is_empty() {
        return Err(MarginError::EmptyMargin);
    }
    let mut urows = Vec::with_capacity(rows.len());
    for (index, &value) in rows.iter().enumerate() {
        if value < 0 {
            return Err(MarginError::NegativeEntry {
                side: MarginSide::Rows,
                index,
                value,
            });
        }
        urows.push(value as u64);
    }
    let mut ucols = Vec::with_capacity(cols.len());
    for (index, &value) in cols.iter().enumerate() {
        if value < 0 {
            return Err(MarginError::NegativeEntry {
                side: MarginSide::Cols,
                index,
                value,
            });
        }
        ucols.push(value as u64);
    }
    MarginPair::new(urows, ucols)
}

/// Exact falling factorial `x (x-1) ... (x-k+1)`; the empty product for `k = 0`.
pub fn falling_factorial(x: i64, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(x - i);
    }
    acc
}

/// Sum of the `k`-th falling factorials over a vector of nonnegative values.
pub fn falling_power_sum(values: &[u64], k: u32) -> BigUint {
    let mut acc = BigUint::zero();
    for &v in values {
        if v >= k as u64 {
            let term = falling_factorial(v as i64, k);
            acc += term.to_biguint().expect("nonnegative by construction");
        }
    }
    acc
}

/// The pair `(S_k, T_k) = (sum_i [s_i]_k, sum_j [t_j]_k)` for `1 <= k <= 4`.
pub fn power_sums(margins: &MarginPair, k: u32) -> Result<(BigUint, BigUint), MarginError> {
    if !(1..=4).contains(&k) {
        return Err(MarginError::UnsupportedOrder { order: k });
    }
    Ok((
        falling_power_sum(margins.rows(), k),
        falling_power_sum(margins.cols(), k),
    ))
}

/// Power sums and scaled central moments of a margin pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub s_max: u64,
    pub t_max: u64,
    pub s2: BigUint,
    pub s3: BigUint,
    pub t2: BigUint,
    pub t3: BigUint,
    /// Scaled second central moment of the row sums (exact rational).
    pub mu2: BigRational,
    /// Scaled third central moment of the row sums.
    pub mu3: BigRational,
    /// Scaled second central moment of the column sums.
    pub nu2: BigRational,
    /// Scaled third central moment of the column sums.
    pub nu3: BigRational,
    /// `s_max * t_max / S^(2/3)`, diagnostic only.
    pub sparsity_ratio: f64,
}

/// Scaled central moment `m n / (S (m n + S)) * sum_i (v_i - S/len)^k`,
/// computed over one side of the margins with exact rational arithmetic.
fn scaled_central_moment(values: &[u64], m: usize, n: usize, total: u64, k: u32) -> BigRational {
    let len = BigInt::from(values.len());
    let total_big = BigInt::from(total);
    // sum_i (v_i - S/len)^k = sum_i (len*v_i - S)^k / len^k
    let mut dev_sum = BigInt::zero();
    for &v in values {
        let dev = &len * BigInt::from(v) - &total_big;
        let mut pow = BigInt::one();
        for _ in 0..k {
            pow *= &dev;
        }
        dev_sum += pow;
    }
    let mn = BigInt::from(m as u64) * BigInt::from(n as u64);
    let numer = &mn * dev_sum;
    let mut len_pow = BigInt::one();
    for _ in 0..k {
        len_pow *= &len;
    }
    let denom = &total_big * (&mn + &total_big) * len_pow;
    BigRational::new(numer, denom)
}

/// Computes power sums through order 3 and the scaled central moments.
///
/// Requires `S > 0`; the moments divide by `S (mn + S)`.
pub fn central_moments(margins: &MarginPair) -> Result<MomentSummary, MarginError> {
    if margins.total() == 0 {
        return Err(MarginError::ZeroTotal);
    }
    let (m, n, total) = (margins.m(), margins.n(), margins.total());
    Ok(MomentSummary {
        s_max: margins.s_max(),
        t_max: margins.t_max(),
        s2: falling_power_sum(margins.rows(), 2),
        s3: falling_power_sum(margins.rows(), 3),
        t2: falling_power_sum(margins.cols(), 2),
        t3: falling_power_sum(margins.cols(), 3),
        mu2: scaled_central_moment(margins.rows(), m, n, total, 2),
        mu3: scaled_central_moment(margins.rows(), m, n, total, 3),
        nu2: scaled_central_moment(margins.cols(), m, n, total, 2),
        nu3: scaled_central_moment(margins.cols(), m, n, total, 3),
        sparsity_ratio: margins.sparsity_ratio(),
    })
}

/// Switching-depth schedule and regime classification for a margin pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// True when the second-order mass conditions hold (see [`classify_regime`]).
    pub substantial: bool,
    /// Depth bound for second-order switching phases.
    pub n2: u64,
    /// Depth bound for third-order switching phases.
    pub n3: u64,
    /// Largest usable switching depth, `min(s_max, t_max)`.
    pub delta_cap: u64,
    /// `s_max * t_max / S^(2/3)`, diagnostic only.
    pub sparsity_ratio: f64,
}

/// Exact ceiling of `numer / denom` for positive `denom`.
fn ceil_div(numer: &BigUint, denom: &BigUint) -> BigUint {
    (numer + denom - BigUint::one()) / denom
}

fn to_u64_saturating(x: &BigUint) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

/// Classifies a margin pair: phase-depth bounds `N2`, `N3`, the substantial
/// flag, and the depth cap. Logarithms are natural throughout.
///
/// The `N2` schedule is piecewise in `S2 T2`: a fixed depth of 22 while
/// `S2 T2 < S^(7/4)` (compared exactly as `(S2 T2)^4 < S^7`), then
/// `ceil(ln S)` while `5600 S2 T2 < S^2 ln S`, then `ceil(5600 S2 T2 / S^2)`.
/// `N3 = max(ceil(ln S), ceil(230000 S3 T3 / S^3))`. The substantial flag
/// requires `s_max t_max >= 1`, `S2 >= s_max ln^2 S`, `T2 >= t_max ln^2 S`,
/// and `(S2 T2)^2 >= (s_max t_max)^3 S^2` (the last compared exactly).
pub fn classify_regime(margins: &MarginPair) -> Result<RegimeReport, MarginError> {
    let total = margins.total();
    if total == 0 {
        return Err(MarginError::ZeroTotal);
    }
    let s_big = BigUint::from(total);
    let ln_s = (total as f64).ln();
    let (s2, t2) = power_sums(margins, 2)?;
    let (s3, t3) = power_sums(margins, 3)?;
    let s2t2 = &s2 * &t2;
    let s3t3 = &s3 * &t3;
    let s_sq = &s_big * &s_big;
    let s_cube = &s_sq * &s_big;

    // S2 T2 < S^(7/4)  <=>  (S2 T2)^4 < S^7, exactly in integers.
    let lhs4 = s2t2.pow(4);
    let s7 = s_big.pow(7);
    let n2 = if lhs4 < s7 {
        22
    } else {
        let fenced = 5600.0 * s2t2.to_f64().unwrap_or(f64::INFINITY);
        let budget = (total as f64) * (total as f64) * ln_s;
        if fenced < budget {
            ln_s.ceil() as u64
        } else {
            to_u64_saturating(&ceil_div(&(&s2t2 * BigUint::from(5600u32)), &s_sq))
        }
    };

    let n3_mass = to_u64_saturating(&ceil_div(&(&s3t3 * BigUint::from(230000u32)), &s_cube));
    let n3 = (ln_s.ceil() as u64).max(n3_mass);

    let s_max = margins.s_max();
    let t_max = margins.t_max();
    let ln_sq = ln_s * ln_s;
    let st = (s_max as u128) * (t_max as u128);
    // (S2 T2) >= (s_max t_max)^(3/2) S  <=>  (S2 T2)^2 >= (s_max t_max)^3 S^2.
    let mass_ok = {
        let lhs = &s2t2 * &s2t2;
        let rhs = BigUint::from(st).pow(3) * &s_sq;
        lhs >= rhs
    };
    let substantial = st >= 1
        && s2.to_f64().unwrap_or(f64::INFINITY) >= (s_max as f64) * ln_sq
        && t2.to_f64().unwrap_or(f64::INFINITY) >= (t_max as f64) * ln_sq
        && mass_ok;

    Ok(RegimeReport {
        substantial,
        n2,
        n3,
        delta_cap: s_max.min(t_max),
        sparsity_ratio: margins.sparsity_ratio(),
    })
}

/// Converts an exact rational to `f64` (moments are small enough for this
/// to be accurate to a unit in the last place).
pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn validate_accepts_matching_totals() {
        let mp = validate_margins(&[2, 2], &[2, 2]).unwrap();
        assert_eq!(mp.total(), 4);
        assert_eq!(mp.m(), 2);
        assert_eq!(mp.n(), 2);
    }

    #[test]
    fn validate_rejects_mismatched_totals() {
        let err = validate_margins(&[1, 2], &[2, 2]).unwrap_err();
        assert_eq!(
            err,
            MarginError::SumMismatch {
                row_total: 3,
                col_total: 4
            }
        );
    }

    #[test]
    fn validate_allows_zero_total() {
        let mp = validate_margins(&[0], &[0]).unwrap();
        assert_eq!(mp.total(), 0);
    }

    #[test]
    fn validate_rejects_empty_side() {
        assert_eq!(
            validate_margins(&[], &[1]).unwrap_err(),
            MarginError::EmptyMargin
        );
        assert_eq!(
            validate_margins(&[1], &[]).unwrap_err(),
            MarginError::EmptyMargin
        );
    }

    #[test]
    fn validate_reports_negative_positions() {
        let err = validate_margins(&[1, -2, 1], &[0]).unwrap_err();
        assert_eq!(
            err,
            MarginError::NegativeEntry {
                side: MarginSide::Rows,
                index: 1,
                value: -2
            }
        );
        let err = validate_margins(&[1], &[2, -1]).unwrap_err();
        assert_eq!(
            err,
            MarginError::NegativeEntry {
                side: MarginSide::Cols,
                index: 1,
                value: -1
            }
        );
    }

    #[test]
    fn falling_factorial_basics() {
        assert_eq!(falling_factorial(5, 0), BigInt::from(1));
        assert_eq!(falling_factorial(2, 2), BigInt::from(2));
        assert_eq!(falling_factorial(3, 4), BigInt::from(0));
        assert_eq!(falling_factorial(6, 3), BigInt::from(120));
        // For negative arguments the product picks up signs.
        assert_eq!(falling_factorial(-1, 2), BigInt::from(2));
    }

    #[test]
    fn power_sums_match_hand_values() {
        let mp = MarginPair::new(vec![3, 2], vec![2, 2, 1]).unwrap();
        let (s2, t2) = power_sums(&mp, 2).unwrap();
        assert_eq!(s2, BigUint::from(8u32)); // [3]_2 + [2]_2 = 6 + 2
        assert_eq!(t2, BigUint::from(4u32)); // 2 + 2 + 0
        let (s1, t1) = power_sums(&mp, 1).unwrap();
        assert_eq!(s1, BigUint::from(5u32));
        assert_eq!(t1, BigUint::from(5u32));
        let (s3, t3) = power_sums(&mp, 3).unwrap();
        assert_eq!(s3, BigUint::from(6u32));
        assert_eq!(t3, BigUint::from(0u32));
    }

    #[test]
    fn power_sums_reject_unsupported_orders() {
        let mp = MarginPair::new(vec![2], vec![2]).unwrap();
        assert_eq!(
            power_sums(&mp, 0).unwrap_err(),
            MarginError::UnsupportedOrder { order: 0 }
        );
        assert_eq!(
            power_sums(&mp, 5).unwrap_err(),
            MarginError::UnsupportedOrder { order: 5 }
        );
    }

    #[test]
    fn moments_vanish_on_regular_margins() {
        let mp = MarginPair::new(vec![2, 2], vec![2, 2]).unwrap();
        let ms = central_moments(&mp).unwrap();
        assert!(ms.mu2.is_zero());
        assert!(ms.mu3.is_zero());
        assert!(ms.nu2.is_zero());
        assert!(ms.nu3.is_zero());
    }

    #[test]
    fn moments_match_hand_computed_rationals() {
        // rows=[2,0], cols=[1,1]: m=n=2, S=2, scale = 4/(2*6) = 1/3,
        // deviations (1,-1) so mu2 = 2/3 and mu3 = 0; cols are regular.
        let mp = MarginPair::new(vec![2, 0], vec![1, 1]).unwrap();
        let ms = central_moments(&mp).unwrap();
        assert_eq!(ms.mu2, ratio(2, 3));
        assert!(ms.mu3.is_zero());
        assert!(ms.nu2.is_zero());
        // rows=[3,1], cols=[2,2]: deviations (1,-1), same scale as above with
        // S=4: scale = 4/(4*8) = 1/8, so mu2 = 2/8 = 1/4.
        let mp = MarginPair::new(vec![3, 1], vec![2, 2]).unwrap();
        let ms = central_moments(&mp).unwrap();
        assert_eq!(ms.mu2, ratio(1, 4));
        assert!(ms.mu3.is_zero());
    }

    #[test]
    fn moments_reject_zero_total() {
        let mp = MarginPair::new(vec![0], vec![0]).unwrap();
        assert_eq!(central_moments(&mp).unwrap_err(), MarginError::ZeroTotal);
        assert_eq!(classify_regime(&mp).unwrap_err(), MarginError::ZeroTotal);
    }

    #[test]
    fn classify_all_ones_margins() {
        // rows = cols = [1]*100: S2 = T2 = 0, so the first depth branch and
        // an insubstantial classification.
        let mp = MarginPair::new(vec![1; 100], vec![1; 100]).unwrap();
        let report = classify_regime(&mp).unwrap();
        assert_eq!(report.n2, 22);
        assert!(!report.substantial);
        assert_eq!(report.delta_cap, 1);
    }

    #[test]
    fn classify_regular_two_margins() {
        // rows = cols = [2]*50: S = 100, S2 = T2 = 100.
        // S2*T2 = 10^4 >= S^(7/4) and 5600*10^4 >= S^2 ln S, so the mass
        // branch: N2 = ceil(5600 * 10^4 / 10^4) = 5600.
        // S3 = 0 so N3 = ceil(ln 100) = 5. All substantial conditions hold.
        let mp = MarginPair::new(vec![2; 50], vec![2; 50]).unwrap();
        let report = classify_regime(&mp).unwrap();
        assert_eq!(report.n2, 5600);
        assert_eq!(report.n3, 5);
        assert!(report.substantial);
        assert_eq!(report.delta_cap, 2);
        // sparsity: 2*2 / 100^(2/3)
        let expected = 4.0 / 100f64.powf(2.0 / 3.0);
        assert!((report.sparsity_ratio - expected).abs() < 1e-15);
    }

    #[test]
    fn classify_middle_branch_uses_log_depth() {
        // Construct margins where S^(7/4) <= S2 T2 < S^2 ln S / 5600.
        // rows = cols = [2]*8 ++ [1]*984: S = 1000, S2 = T2 = 16.
        // S2 T2 = 256 < S^(7/4) = 5623.4... so actually the first branch.
        // Use [4]*50 ++ [1]*800: S = 1000, S2 = 50*12 = 600, S2T2 = 360000
        // >= 5623; 5600*360000 = 2.016e9 vs S^2 ln S = 6.9e6 -> mass branch.
        // Shrink the heavy part: [2]*40 ++ [1]*920: S = 1000, S2 = 80,
        // S2T2 = 6400 >= 5623.4 and 5600*6400 = 3.58e7 >= 6.9e6 -> mass.
        // The middle branch needs S2T2 in [5623, 1234]: empty at S = 1000.
        // At S = 10^6: S^(7/4) = 10^10.5 = 3.16e10, S^2 lnS/5600 = 2.47e9.
        // The middle band is empty there too; it opens once
        // S^2 ln S / 5600 > S^(7/4), i.e. ln S > 5600 S^(-1/4)... at
        // S = 2^40 the band is wide. Keeping runtime sane we verify the
        // branch arithmetic directly on a constructed pair instead.
        let mp = MarginPair::new(vec![2; 50], vec![2; 50]).unwrap();
        // Exercises the exact comparisons; branch coverage for the middle
        // band needs astronomically large S, so only check consistency here.
        let report = classify_regime(&mp).unwrap();
        assert!(report.n2 >= 5);
    }

    #[test]
    fn classify_handles_total_one() {
        let mp = MarginPair::new(vec![1], vec![1]).unwrap();
        let report = classify_regime(&mp).unwrap();
        assert_eq!(report.n2, 22);
        // ln 1 = 0 so the log-depth floor is 0.
        assert_eq!(report.n3, 0);
    }

    fn random_margins(rng: &mut ChaCha8Rng, max_len: usize, max_entry: u64) -> MarginPair {
        loop {
            let m = rng.gen_range(1..=max_len);
            let n = rng.gen_range(1..=max_len);
            let rows: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=max_entry)).collect();
            let total: u64 = rows.iter().sum();
            if total == 0 {
                continue;
            }
            // Random composition of `total` into n parts via sorted cuts.
            let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(0..=total)).collect();
            cuts.sort_unstable();
            let mut cols = Vec::with_capacity(n);
            let mut prev = 0;
            for &c in &cuts {
                cols.push(c - prev);
                prev = c;
            }
            cols.push(total - prev);
            return MarginPair::new(rows, cols).unwrap();
        }
    }

    #[test]
    fn first_power_sums_equal_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mp = random_margins(&mut rng, 6, 5);
            let (s1, t1) = power_sums(&mp, 1).unwrap();
            assert_eq!(s1, BigUint::from(mp.total()));
            assert_eq!(t1, BigUint::from(mp.total()));
        }
    }

    #[test]
    fn moment_bounds_hold_on_random_margins() {
        // mu2 <= s_max and |mu3| <= s_max * mu2, and the column analogues.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let mp = random_margins(&mut rng, 7, 6);
            let ms = central_moments(&mp).unwrap();
            let s_max = BigRational::from(BigInt::from(ms.s_max));
            let t_max = BigRational::from(BigInt::from(ms.t_max));
            assert!(ms.mu2 <= s_max, "mu2 > s_max on {:?}", mp);
            assert!(ms.nu2 <= t_max, "nu2 > t_max on {:?}", mp);
            assert!(
                ms.mu3.abs() <= &s_max * &ms.mu2,
                "mu3 bound failed on {:?}",
                mp
            );
            assert!(
                ms.nu3.abs() <= &t_max * &ms.nu2,
                "nu3 bound failed on {:?}",
                mp
            );
        }
    }

    #[test]
    fn moments_invariant_under_permutation_and_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let mp = random_margins(&mut rng, 6, 5);
            let mut rows = mp.rows().to_vec();
            rows.reverse();
            let permuted = MarginPair::new(rows, mp.cols().to_vec()).unwrap();
            let a = central_moments(&mp).unwrap();
            let b = central_moments(&permuted).unwrap();
            assert_eq!(a.mu2, b.mu2);
            assert_eq!(a.mu3, b.mu3);
            let t = central_moments(&mp.transpose()).unwrap();
            assert_eq!(a.mu2, t.nu2);
            assert_eq!(a.s2, t.t2);
            assert_eq!(a.mu3, t.nu3);
        }
    }
}
