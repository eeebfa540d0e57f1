//! Exact enumeration, counting, and uniform sampling of matrices with
//! prescribed margins and a restricted entry alphabet.
//!
//! Two independent counting routes are provided on purpose: a row-by-row
//! brute force enumerator ([`count_bruteforce`]) and a memoized column
//! dynamic program ([`count_exact`]). The brute force route is the oracle
//! the dynamic program is checked against; do not fold one into the other.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::margins::{MarginError, MarginPair};

/// Errors raised by the exact counting and sampling operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error(transparent)]
    Margin(#[from] MarginError),
    /// The brute-force guard tripped; raise the guard to proceed.
    #[error(
        "brute force guard exceeded: {cells} cells / total {total} \
         (limits {max_cells} cells, total {max_total})"
    )]
    SizeGuardExceeded {
        cells: u64,
        total: u64,
        max_cells: u64,
        max_total: u64,
    },
    /// The dynamic program grew past the configured memo budget.
    #[error("dynamic program memo exceeded {max_states} states")]
    MemoryGuardExceeded { max_states: usize },
    /// Sampling from a class that contains no matrix.
    #[error("the matrix class for these margins and alphabet is empty")]
    EmptyClass,
    /// Entry alphabets must contain 0 to admit any margins with zero sums.
    #[error("entry alphabets must contain 0")]
    AlphabetMissingZero,
    /// A scalar argument was outside its documented domain.
    #[error("argument out of range: {what}")]
    OutOfRange { what: String },
}

/// The set of values a single matrix entry may take.
///
/// All alphabets contain 0. The named variants cover the common cases; the
/// `Finite` variant holds an arbitrary sorted set for oracle work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryAlphabet {
    /// Any nonnegative integer.
    AllNonnegative,
    /// Entries restricted to {0, 1}.
    ZeroOne,
    /// Entries restricted to {0, 1, 2, 3}.
    ZeroToThree,
    /// Entries restricted to an explicit finite set containing 0.
    Finite(BTreeSet<u64>),
}

impl EntryAlphabet {
    /// The unrestricted alphabet.
    pub fn all() -> Self {
        EntryAlphabet::AllNonnegative
    }

    /// The 0-1 alphabet.
    pub fn zero_one() -> Self {
        EntryAlphabet::ZeroOne
    }

    /// The {0,1,2,3} alphabet.
    pub fn zero_to_three() -> Self {
        EntryAlphabet::ZeroToThree
    }

    /// An explicit finite alphabet; 0 must be a member.
    pub fn finite(members: impl IntoIterator<Item = u64>) -> Result<Self, CountError> {
        let set: BTreeSet<u64> = members.into_iter().collect();
        if !set.contains(&0) {
            return Err(CountError::AlphabetMissingZero);
        }
        Ok(EntryAlphabet::Finite(set))
    }

    /// Membership test for a single entry value.
    pub fn contains(&self, v: u64) -> bool {
        match self {
            EntryAlphabet::AllNonnegative => true,
            EntryAlphabet::ZeroOne => v <= 1,
            EntryAlphabet::ZeroToThree => v <= 3,
            EntryAlphabet::Finite(set) => set.contains(&v),
        }
    }

    /// Largest member that is `<= cap` (0 always qualifies).
    pub fn max_value_at_most(&self, cap: u64) -> u64 {
        match self {
            EntryAlphabet::AllNonnegative => cap,
            EntryAlphabet::ZeroOne => cap.min(1),
            EntryAlphabet::ZeroToThree => cap.min(3),
            EntryAlphabet::Finite(set) => set.range(..=cap).next_back().copied().unwrap_or(0),
        }
    }

    /// True when both 0 and 1 are members.
    pub fn has_zero_and_one(&self) -> bool {
        self.contains(0) && self.contains(1)
    }
}

impl fmt::Display for EntryAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryAlphabet::AllNonnegative => write!(f, "all"),
            EntryAlphabet::ZeroOne => write!(f, "{{0,1}}"),
            EntryAlphabet::ZeroToThree => write!(f, "{{0,1,2,3}}"),
            EntryAlphabet::Finite(set) => {
                write!(f, "{{")?;
                for (i, v) in set.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// An exact nonnegative matrix count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Natural logarithm, accurate to a few units in the last place even for
    /// counts far beyond `f64` range. Returns `-inf` for a zero count.
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }
}

/// Natural logarithm of an arbitrary-precision nonnegative integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_f64().expect("53 bits fit");
        top.ln() + (shift as f64) * std::f64::consts::LN_2
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

/// Resource limits for the counting routines. These are configuration, not
/// hard-coded policy; `unlimited()` lifts them entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Brute force refuses margins with more than this many cells.
    pub bruteforce_max_cells: u64,
    /// Brute force refuses margins with a larger total.
    pub bruteforce_max_total: u64,
    /// The dynamic program aborts after this many memoized states.
    pub dp_max_states: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            bruteforce_max_cells: 16,
            bruteforce_max_total: 12,
            dp_max_states: 10_000_000,
        }
    }
}

impl Guards {
    pub fn unlimited() -> Self {
        Guards {
            bruteforce_max_cells: u64::MAX,
            bruteforce_max_total: u64::MAX,
            dp_max_states: usize::MAX,
        }
    }
}

/// A matrix together with its (consistent by construction) margin pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableMatrix {
    entries: Vec<Vec<u64>>,
    margins: MarginPair,
}

impl TableMatrix {
    /// Builds a matrix from rows of entries, deriving and validating margins.
    pub fn from_entries(entries: Vec<Vec<u64>>) -> Result<Self, CountError> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(CountError::Margin(MarginError::EmptyMargin));
        }
        let n = entries[0].len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(CountError::OutOfRange {
                what: "matrix rows must all have the same length".to_string(),
            });
        }
        let rows: Vec<u64> = entries.iter().map(|r| r.iter().sum()).collect();
        let mut cols = vec![0u64; n];
        for row in &entries {
            for (j, &v) in row.iter().enumerate() {
                cols[j] += v;
            }
        }
        let margins = MarginPair::new(rows, cols)?;
        Ok(TableMatrix { entries, margins })
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn margins(&self) -> &MarginPair {
        &self.margins
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn n(&self) -> usize {
        self.entries[0].len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    /// Replaces one entry, keeping margins in sync is the caller's burden;
    /// only crate-internal switching code uses this.
    pub(crate) fn set_unchecked(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i][j] = v;
    }

    /// Histogram of entry values.
    pub fn entry_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for row in &self.entries {
            for &v in row {
                *h.entry(v).or_insert(0) += 1;
            }
        }
        h
    }

    pub fn transpose(&self) -> TableMatrix {
        let m = self.m();
        let n = self.n();
        let mut entries = vec![vec![0u64; m]; n];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                entries[j][i] = v;
            }
        }
        TableMatrix {
            entries,
            margins: self.margins.transpose(),
        }
    }
}

/// Enumerates the vectors `x` with `x[i]` in the alphabet, `x[i] <= caps[i]`,
/// and `sum x = total`, in lexicographic order. The visitor returns `false`
/// to stop early. Returns whether enumeration ran to completion.
fn for_each_distribution(
    total: u64,
    caps: &[u64],
    alphabet: &EntryAlphabet,
    visit: &mut dyn FnMut(&[u64]) -> bool,
) -> bool {
    // suffix_max[i] = largest achievable sum over slots i.. (alphabet-aware)
    let k = caps.len();
    let mut suffix_max = vec![0u64; k + 1];
    for i in (0..k).rev() {
        suffix_max[i] = suffix_max[i + 1] + alphabet.max_value_at_most(caps[i]);
    }
    let mut buf = vec![0u64; k];
    fn rec(
        idx: usize,
        remaining: u64,
        caps: &[u64],
        suffix_max: &[u64],
        alphabet: &EntryAlphabet,
        buf: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if remaining > suffix_max[idx] {
            return true;
        }
        if idx == caps.len() {
            debug_assert_eq!(remaining, 0);
            return visit(buf);
        }
        let cap = caps[idx].min(remaining);
        for v in 0..=cap {
            if !alphabet.contains(v) {
                continue;
            }
            buf[idx] = v;
            if !rec(idx + 1, remaining - v, caps, suffix_max, alphabet, buf, visit) {
                return false;
            }
        }
        buf[idx] = 0;
        true
    }
    rec(0, total, caps, &suffix_max, alphabet, &mut buf, visit)
}

/// Report returned by the brute-force counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteReport {
    pub count: BigCount,
    /// Number of partial row assignments explored.
    pub nodes_visited: u64,
}

/// Visits every matrix in the class row by row. The visitor sees the rows
/// slice of each complete matrix. Guarded by `guards` (cells and total).
pub fn for_each_matrix(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
    guards: &Guards,
    mut visit: impl FnMut(&[Vec<u64>]),
) -> Result<u64, CountError> {
    let cells = (margins.m() as u64) * (margins.n() as u64);
    if cells > guards.bruteforce_max_cells || margins.total() > guards.bruteforce_max_total {
        return Err(CountError::SizeGuardExceeded {
            cells,
            total: margins.total(),
            max_cells: guards.bruteforce_max_cells,
            max_total: guards.bruteforce_max_total,
        });
    }
    let m = margins.m();
    let mut residual: Vec<u64> = margins.cols().to_vec();
    let mut rows_buf: Vec<Vec<u64>> = Vec::with_capacity(m);
    let mut nodes = 0u64;
    fn rec(
        i: usize,
        margins: &MarginPair,
        alphabet: &EntryAlphabet,
        residual: &mut Vec<u64>,
        rows_buf: &mut Vec<Vec<u64>>,
        nodes: &mut u64,
        visit: &mut dyn FnMut(&[Vec<u64>]),
    ) {
        *nodes += 1;
        if i == margins.m() {
            if residual.iter().all(|&c| c == 0) {
                visit(rows_buf);
            }
            return;
        }
        let caps = residual.clone();
        for_each_distribution(margins.rows()[i], &caps, alphabet, &mut |x| {
            for (j, &v) in x.iter().enumerate() {
                residual[j] -= v;
            }
            rows_buf.push(x.to_vec());
            rec(i + 1, margins, alphabet, residual, rows_buf, nodes, visit);
            rows_buf.pop();
            for (j, &v) in x.iter().enumerate() {
                residual[j] += v;
            }
            true
        });
    }
    rec(
        0,
        margins,
        alphabet,
        &mut residual,
        &mut rows_buf,
        &mut nodes,
        &mut visit,
    );
    Ok(nodes)
}

/// Brute-force count with node statistics.
pub fn count_bruteforce_report(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
    guards: &Guards,
) -> Result<BruteReport, CountError> {
    let mut count = BigUint::zero();
    let nodes = for_each_matrix(margins, alphabet, guards, |_| {
        count += 1u32;
    })?;
    Ok(BruteReport {
        count: BigCount(count),
        nodes_visited: nodes,
    })
}

/// Counts the class by exhaustive row-by-row enumeration (default guards).
pub fn count_bruteforce(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
) -> Result<BigCount, CountError> {
    count_bruteforce_report(margins, alphabet, &Guards::default()).map(|r| r.count)
}

/// Materializes every matrix in the class (small classes only).
pub fn enumerate_matrices(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
    guards: &Guards,
) -> Result<Vec<TableMatrix>, CountError> {
    let mut out = Vec::new();
    for_each_matrix(margins, alphabet, guards, |rows| {
        out.push(TableMatrix::from_entries(rows.to_vec()).expect("enumerated matrices are valid"));
    })?;
    Ok(out)
}

/// Report returned by the column dynamic program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpReport {
    pub count: BigCount,
    /// Number of distinct memoized states.
    pub states_visited: usize,
}

/// Column-by-column dynamic program over canonicalized states.
///
/// States are (residual row sums sorted descending, index into the column
/// list sorted descending); row order does not affect counts, so sorting is
/// a sound canonicalization. The memo behaves as a single logical map.
struct DpEngine<'a> {
    alphabet: &'a EntryAlphabet,
    /// Column sums sorted descending.
    cols: Vec<u64>,
    /// suffix[i] = sum of cols[i..].
    suffix: Vec<u64>,
    memo: HashMap<(Vec<u64>, usize), BigUint>,
    max_states: usize,
}

impl<'a> DpEngine<'a> {
    fn new(cols_sorted: Vec<u64>, alphabet: &'a EntryAlphabet, max_states: usize) -> Self {
        let n = cols_sorted.len();
        let mut suffix = vec![0u64; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + cols_sorted[i];
        }
        DpEngine {
            alphabet,
            cols: cols_sorted,
            suffix,
            memo: HashMap::new(),
            max_states,
        }
    }

    /// Number of completions of the state; `residual` must be sorted
    /// descending and satisfy `sum(residual) == suffix[idx]`.
    fn count(&mut self, residual: Vec<u64>, idx: usize) -> Result<BigUint, CountError> {
        debug_assert_eq!(residual.iter().sum::<u64>(), self.suffix[idx]);
        if idx == self.cols.len() {
            return Ok(BigUint::one());
        }
        if residual[0] > self.suffix[idx] {
            return Ok(BigUint::zero());
        }
        let key = (residual, idx);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        if self.memo.len() >= self.max_states {
            return Err(CountError::MemoryGuardExceeded {
                max_states: self.max_states,
            });
        }
        let residual = &key.0;
        let mut total = BigUint::zero();
        let mut pending_error: Option<CountError> = None;
        let mut children: Vec<Vec<u64>> = Vec::new();
        for_each_distribution(self.cols[idx], residual, self.alphabet, &mut |x| {
            let mut child: Vec<u64> = residual
                .iter()
                .zip(x.iter())
                .map(|(&r, &v)| r - v)
                .collect();
            child.sort_unstable_by(|a, b| b.cmp(a));
            children.push(child);
            true
        });
        for child in children {
            match self.count(child, idx + 1) {
                Ok(c) => total += c,
                Err(e) => {
                    pending_error = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = pending_error {
            return Err(e);
        }
        self.memo.insert(key, total.clone());
        Ok(total)
    }
}

fn sorted_desc(values: &[u64]) -> Vec<u64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Exact count via the memoized column dynamic program, with statistics.
pub fn count_exact_report(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
    guards: &Guards,
) -> Result<DpReport, CountError> {
    let mut engine = DpEngine::new(sorted_desc(margins.cols()), alphabet, guards.dp_max_states);
    let count = engine.count(sorted_desc(margins.rows()), 0)?;
    Ok(DpReport {
        count: BigCount(count),
        states_visited: engine.memo.len(),
    })
}

/// Exact count via the memoized column dynamic program (default guards).
pub fn count_exact(margins: &MarginPair, alphabet: &EntryAlphabet) -> Result<BigCount, CountError> {
    count_exact_report(margins, alphabet, &Guards::default()).map(|r| r.count)
}

/// Draws one matrix uniformly at random from the class.
///
/// The sampler walks the same dynamic program used by [`count_exact`],
/// choosing each column distribution with probability proportional to the
/// number of completions, so the draw is exactly uniform. Deterministic for
/// a fixed seed.
pub fn sample_uniform(
    margins: &MarginPair,
    alphabet: &EntryAlphabet,
    seed: u64,
    guards: &Guards,
) -> Result<TableMatrix, CountError> {
    let m = margins.m();
    let n = margins.n();
    // Sort columns descending but remember where each came from.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| margins.cols()[b].cmp(&margins.cols()[a]));
    let cols_sorted: Vec<u64> = order.iter().map(|&j| margins.cols()[j]).collect();
    let mut engine = DpEngine::new(cols_sorted.clone(), alphabet, guards.dp_max_states);
    let total = engine.count(sorted_desc(margins.rows()), 0)?;
    if total.is_zero() {
        return Err(CountError::EmptyClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual: Vec<u64> = margins.rows().to_vec();
    let mut entries = vec![vec![0u64; n]; m];
    for idx in 0..n {
        let state_total = engine.count(sorted_desc(&residual), idx)?;
        debug_assert!(!state_total.is_zero());
        let mut target = rng.gen_biguint_below(&state_total);
        let mut chosen: Option<Vec<u64>> = None;
        let mut defer: Option<CountError> = None;
        // Enumerate distributions over the *actual* residual vector so row
        // identities are preserved; counts only depend on the multiset.
        let mut candidates: Vec<Vec<u64>> = Vec::new();
        for_each_distribution(cols_sorted[idx], &residual, alphabet, &mut |x| {
            candidates.push(x.to_vec());
            true
        });
        for x in candidates {
            let mut child: Vec<u64> = residual.iter().zip(x.iter()).map(|(&r, &v)| r - v).collect();
            child.sort_unstable_by(|a, b| b.cmp(a));
            match engine.count(child, idx + 1) {
                Ok(c) => {
                    if target < c {
                        chosen = Some(x);
                        break;
                    }
                    target -= c;
                }
                Err(e) => {
                    defer = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = defer {
            return Err(e);
        }
        let x = chosen.expect("counts sum to the state total");
        for (i, &v) in x.iter().enumerate() {
            residual[i] -= v;
            entries[i][order[idx]] = v;
        }
    }
    debug_assert!(residual.iter().all(|&r| r == 0));
    Ok(TableMatrix {
        entries,
        margins: margins.clone(),
    })
}

/// Binomial coefficient with the counting conventions: `binom(a, 0) = 1`
/// for any `a` (including negative), zero when `a < b` with `b > 0`.
fn binom_count(a: i64, b: u64) -> BigUint {
    if b == 0 {
        return BigUint::one();
    }
    if a < b as i64 {
        return BigUint::zero();
    }
    let mut numer = BigUint::one();
    for i in 0..b {
        numer *= BigUint::from((a as u64) - i);
    }
    let mut denom = BigUint::one();
    for i in 1..=b {
        denom *= BigUint::from(i);
    }
    numer / denom
}

/// Probability that a fixed row sum equals `k` when a matrix with `m` rows,
/// `n` columns, and total `S` is drawn uniformly from all compositions:
/// `binom(k+n-1, k) binom(S-k+(m-1)n-1, S-k) / binom(S+mn-1, S)`.
pub fn row_sum_distribution(m: u64, n: u64, total: u64, k: u64) -> Result<BigRational, CountError> {
    if m == 0 || n == 0 {
        return Err(CountError::OutOfRange {
            what: format!("m and n must be positive (got m={m}, n={n})"),
        });
    }
    if k > total {
        return Err(CountError::OutOfRange {
            what: format!("k={k} exceeds the total {total}"),
        });
    }
    let numer = binom_count((k + n - 1) as i64, k)
        * binom_count(
            (total - k) as i64 + ((m - 1) * n) as i64 - 1,
            total - k,
        );
    let denom = binom_count((total + m * n - 1) as i64, total);
    Ok(BigRational::new(
        BigInt::from(numer),
        BigInt::from(denom),
    ))
}

/// Expected scaled central moments of the margin vectors of a uniformly
/// random composition of `total` into an `m x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedMoments {
    pub e_mu2: BigRational,
    pub e_nu2: BigRational,
    pub e_mu3: BigRational,
    pub e_nu3: BigRational,
}

fn ratio64(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact expectations: `E mu2 = n(m-1)/(mn+1)` and
/// `E mu3 = n(m-1)(m-2)(mn+2S) / (m(mn+1)(mn+2))`, with the column forms
/// obtained by swapping roles.
pub fn expected_moments(m: u64, n: u64, total: u64) -> Result<ExpectedMoments, CountError> {
    if m == 0 || n == 0 {
        return Err(CountError::OutOfRange {
            what: format!("m and n must be positive (got m={m}, n={n})"),
        });
    }
    if total == 0 {
        return Err(CountError::Margin(MarginError::ZeroTotal));
    }
    let mn = m * n;
    let e_mu2 = ratio64(n * (m - 1), mn + 1);
    let e_nu2 = ratio64(m * (n - 1), mn + 1);
    let e_mu3 = if m >= 2 {
        ratio64(n * (m - 1) * (m - 2) * (mn + 2 * total), m * (mn + 1) * (mn + 2))
    } else {
        BigRational::zero()
    };
    let e_nu3 = if n >= 2 {
        ratio64(m * (n - 1) * (n - 2) * (mn + 2 * total), n * (mn + 1) * (mn + 2))
    } else {
        BigRational::zero()
    };
    Ok(ExpectedMoments {
        e_mu2,
        e_nu2,
        e_mu3,
        e_nu3,
    })
}
