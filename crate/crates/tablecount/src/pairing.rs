//! The pairing (configuration) model: S row points and S column points
//! grouped into cells of sizes s_i and t_j, matched by a permutation. Each
//! pairing induces a matrix through its parallel-class multiplicities, and
//! weighted pairing sums convert exactly into matrix counts.
//!
//! Exhaustive enumerators here are deliberately independent of the closed
//! forms they validate; do not merge the two routes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::{for_each_matrix, BigCount, EntryAlphabet, Guards, TableMatrix};
use crate::margins::{falling_factorial, power_sums, MarginError, MarginPair};

/// Exhaustive pairing enumeration is limited to totals this size (the
/// pairing space has S! elements).
pub const ENUMERATION_MAX_TOTAL: u64 = 8;

/// Errors raised by pairing-model operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error(transparent)]
    Margin(#[from] MarginError),
    /// Exhaustive enumeration over S! pairings refused for large S.
    #[error("pairing enumeration guard exceeded: total {total} > {max_total}")]
    SizeGuardExceeded { total: u64, max_total: u64 },
    /// A moment or probability whose falling-factorial denominator is zero.
    #[error("moment of order {order} is undefined: falling-factorial denominator is zero")]
    UndefinedMoment { order: u32 },
}

/// Point-to-cell layout shared by all pairings over one margin pair.
///
/// Row points 0..S are grouped consecutively by row cell in input order;
/// column points likewise. A pairing is the permutation sending each row
/// point to its matched column point.
#[derive(Debug)]
pub struct PairingSpace {
    margins: MarginPair,
    row_of: Vec<usize>,
    col_of: Vec<usize>,
}

impl PairingSpace {
    pub fn new(margins: MarginPair) -> Self {
        let total = margins.total() as usize;
        let mut row_of = Vec::with_capacity(total);
        for (i, &si) in margins.rows().iter().enumerate() {
            row_of.extend(std::iter::repeat_n(i, si as usize));
        }
        let mut col_of = Vec::with_capacity(total);
        for (j, &tj) in margins.cols().iter().enumerate() {
            col_of.extend(std::iter::repeat_n(j, tj as usize));
        }
        PairingSpace {
            margins,
            row_of,
            col_of,
        }
    }

    pub fn margins(&self) -> &MarginPair {
        &self.margins
    }

    pub fn total(&self) -> u64 {
        self.margins.total()
    }

    /// Flat m·n table of parallel-class multiplicities induced by `perm`.
    fn class_counts(&self, perm: &[usize]) -> Vec<u64> {
        let n = self.margins.n();
        let mut counts = vec![0u64; self.margins.m() * n];
        for (x, &y) in perm.iter().enumerate() {
            counts[self.row_of[x] * n + self.col_of[y]] += 1;
        }
        counts
    }
}

/// One perfect matching of row points to column points.
#[derive(Debug, Clone)]
pub struct Pairing {
    space: Arc<PairingSpace>,
    perm: Vec<usize>,
}

impl Pairing {
    /// Builds a pairing from an explicit permutation image; `perm[x]` is the
    /// column point matched with row point `x`.
    pub fn new(space: Arc<PairingSpace>, perm: Vec<usize>) -> Result<Self, PairingError> {
        if perm.len() as u64 != space.total() {
            return Err(MarginError::SumMismatch {
                row_total: space.total(),
                col_total: perm.len() as u64,
            }
            .into());
        }
        Ok(Pairing { space, perm })
    }

    pub fn space(&self) -> &PairingSpace {
        &self.space
    }

    /// The permutation image: pair (x, perm[x]) for each row point x.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// The pairs as (row point, column point) tuples.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.perm.iter().copied().enumerate()
    }

    /// The induced matrix: entry (i, j) is the multiplicity of the parallel
    /// class joining row cell i and column cell j.
    pub fn matrix(&self) -> TableMatrix {
        let m = self.space.margins.m();
        let n = self.space.margins.n();
        let counts = self.space.class_counts(&self.perm);
        let entries: Vec<Vec<u64>> = (0..m)
            .map(|i| counts[i * n..(i + 1) * n].to_vec())
            .collect();
        TableMatrix::from_entries(entries).expect("induced matrices always satisfy the margins")
    }

    /// The multiplicity vector a_2, a_3, ... of the induced parallel classes.
    pub fn multiplicities(&self) -> MultiplicityVector {
        MultiplicityVector::from_class_counts(self.space.class_counts(&self.perm))
    }

    /// Number of doublets: each class of multiplicity r contributes C(r, 2).
    pub fn doublet_count(&self) -> u64 {
        self.space
            .class_counts(&self.perm)
            .iter()
            .map(|&c| c * c.saturating_sub(1) / 2)
            .sum()
    }

    /// The pairing's weight Π_r (r!)^(a_r).
    pub fn weight(&self) -> PairingWeight {
        self.multiplicities().weight()
    }
}

/// Counts of parallel classes by multiplicity r ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiplicityVector {
    a: BTreeMap<u64, u64>,
}

impl MultiplicityVector {
    fn from_class_counts(counts: Vec<u64>) -> Self {
        let mut a = BTreeMap::new();
        for c in counts {
            if c >= 2 {
                *a.entry(c).or_insert(0) += 1;
            }
        }
        MultiplicityVector { a }
    }

    /// The multiplicity vector of a matrix (its entries are the class
    /// multiplicities of every pairing that induces it).
    pub fn of_matrix(matrix: &TableMatrix) -> Self {
        let mut a = BTreeMap::new();
        for (value, count) in matrix.entry_histogram() {
            if value >= 2 {
                a.insert(value, count);
            }
        }
        MultiplicityVector { a }
    }

    /// Number of classes with the given multiplicity.
    pub fn count(&self, multiplicity: u64) -> u64 {
        self.a.get(&multiplicity).copied().unwrap_or(0)
    }

    /// Iterates (multiplicity, count) with count > 0, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.a.iter().map(|(&r, &c)| (r, c)).filter(|&(_, c)| c > 0)
    }

    /// True when every parallel class is simple (no multiplicity ≥ 2).
    pub fn is_all_simple(&self) -> bool {
        self.a.values().all(|&c| c == 0)
    }

    /// Total doublets: Σ_r a_r·C(r, 2).
    pub fn doublets(&self) -> u64 {
        self.iter().map(|(r, c)| c * (r * (r - 1) / 2)).sum()
    }

    /// The weight Π_r (r!)^(a_r).
    pub fn weight(&self) -> PairingWeight {
        let mut value = BigUint::one();
        for (r, count) in self.iter() {
            let fact = factorial_biguint(r);
            for _ in 0..count {
                value *= &fact;
            }
        }
        PairingWeight { value }
    }
}

impl fmt::Display for MultiplicityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (r, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "a{r}={c}")?;
        }
        write!(f, ")")
    }
}

/// Exact positive integer weight of a pairing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairingWeight {
    value: BigUint,
}

impl PairingWeight {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
}

impl fmt::Display for PairingWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn factorial_biguint(k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=k {
        acc *= BigUint::from(i);
    }
    acc
}

fn guard_total(margins: &MarginPair) -> Result<(), PairingError> {
    if margins.total() > ENUMERATION_MAX_TOTAL {
        return Err(PairingError::SizeGuardExceeded {
            total: margins.total(),
            max_total: ENUMERATION_MAX_TOTAL,
        });
    }
    Ok(())
}

/// Streams all S! pairings exactly once. Guarded to small totals.
pub fn enumerate_pairings(
    margins: &MarginPair,
) -> Result<impl Iterator<Item = Pairing>, PairingError> {
    guard_total(margins)?;
    let space = Arc::new(PairingSpace::new(margins.clone()));
    let total = margins.total() as usize;
    Ok((0..total).permutations(total).map(move |perm| Pairing {
        space: Arc::clone(&space),
        perm,
    }))
}

/// Draws one pairing uniformly from the S! possibilities; deterministic
/// for a fixed seed.
pub fn random_pairing(margins: &MarginPair, seed: u64) -> Result<Pairing, PairingError> {
    if margins.total() == 0 {
        return Err(MarginError::ZeroTotal.into());
    }
    let space = Arc::new(PairingSpace::new(margins.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..margins.total() as usize).collect();
    perm.shuffle(&mut rng);
    Ok(Pairing { space, perm })
}

/// Builds the induced matrix of a pairing (standalone spelling of
/// [`Pairing::matrix`]).
pub fn pairing_to_matrix(pairing: &Pairing) -> TableMatrix {
    pairing.matrix()
}

/// The multiplicity vector and weight of a pairing.
pub fn multiplicity_and_weight(pairing: &Pairing) -> (MultiplicityVector, PairingWeight) {
    let mv = pairing.multiplicities();
    let w = mv.weight();
    (mv, w)
}

/// Both sides of the weighted counting identity restricted to a class of
/// multiplicity vectors: matrices counted directly, and the weighted
/// pairing sum divided by Πs_i!·Πt_j!.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightIdentityReport {
    /// Number of matrices whose multiplicity vector satisfies the predicate.
    pub matrix_count: BigCount,
    /// Σ w(P) over pairings satisfying the predicate, over Πs_i!·Πt_j!.
    pub pairing_ratio: BigRational,
}

impl WeightIdentityReport {
    /// True when the two routes agree and the ratio is an integer.
    pub fn holds(&self) -> bool {
        self.pairing_ratio.is_integer()
            && self.pairing_ratio.numer()
                == &BigInt::from(self.matrix_count.value().clone())
    }
}

/// Evaluates both sides of the counting identity for the class of
/// multiplicity vectors accepted by `predicate`. Exhaustive; guarded.
pub fn verify_weight_identity(
    margins: &MarginPair,
    predicate: impl Fn(&MultiplicityVector) -> bool,
) -> Result<WeightIdentityReport, PairingError> {
    guard_total(margins)?;
    // Matrix side: direct enumeration.
    let mut matrix_count = BigUint::zero();
    for_each_matrix(
        margins,
        &EntryAlphabet::all(),
        &Guards::unlimited(),
        |rows| {
            let matrix = TableMatrix::from_entries(rows.to_vec())
                .expect("enumerated matrices are valid");
            if predicate(&MultiplicityVector::of_matrix(&matrix)) {
                matrix_count += 1u32;
            }
        },
    )
    .map_err(|_| PairingError::SizeGuardExceeded {
        total: margins.total(),
        max_total: ENUMERATION_MAX_TOTAL,
    })?;
    // Pairing side: weighted sum over all S! pairings.
    let mut weighted = BigUint::zero();
    for pairing in enumerate_pairings(margins)? {
        let mv = pairing.multiplicities();
        if predicate(&mv) {
            weighted += mv.weight().value;
        }
    }
    let mut denominator = BigUint::one();
    for &si in margins.rows() {
        denominator *= factorial_biguint(si);
    }
    for &tj in margins.cols() {
        denominator *= factorial_biguint(tj);
    }
    Ok(WeightIdentityReport {
        matrix_count: BigCount::from(matrix_count),
        pairing_ratio: BigRational::new(BigInt::from(weighted), BigInt::from(denominator)),
    })
}

/// A closed-form moment value: exact, truncated (error terms dropped), or
/// undefined because its falling-factorial denominator vanishes.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Truncated(BigRational),
    Undefined,
}

impl MomentValue {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(v) | MomentValue::Truncated(v) => Some(v),
            MomentValue::Undefined => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, MomentValue::Truncated(_))
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, MomentValue::Undefined)
    }
}

/// The first five binomial moments b_0..b_4 of the doublet count.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubletMoments {
    pub b: [MomentValue; 5],
}

struct MomentIngredients {
    s2: BigInt,
    s3: BigInt,
    t2: BigInt,
    t3: BigInt,
    /// [S]_2, [S]_3, [S]_4.
    falling: [BigInt; 3],
}

fn moment_ingredients(margins: &MarginPair) -> MomentIngredients {
    let (s2, t2) = power_sums(margins, 2).expect("order 2 supported");
    let (s3, t3) = power_sums(margins, 3).expect("order 3 supported");
    let s = margins.total() as i64;
    MomentIngredients {
        s2: BigInt::from(s2),
        s3: BigInt::from(s3),
        t2: BigInt::from(t2),
        t3: BigInt::from(t3),
        falling: [
            falling_factorial(s, 2),
            falling_factorial(s, 3),
            falling_factorial(s, 4),
        ],
    }
}

fn ratio(numer: BigInt, denom: BigInt) -> Option<BigRational> {
    if denom.is_zero() {
        None
    } else {
        Some(BigRational::new(numer, denom))
    }
}

impl MomentIngredients {
    /// S2·T2 / (2[S]_2).
    fn b1(&self) -> Option<BigRational> {
        ratio(&self.s2 * &self.t2, 2 * &self.falling[0])
    }

    /// S3T3/(2[S]_3) + (S2²−4S3−2S2)(T2²−4T3−2T2)/(8[S]_4).
    fn b2(&self) -> Option<BigRational> {
        let first = ratio(&self.s3 * &self.t3, 2 * &self.falling[1])?;
        let second = ratio(self.row_excess() * self.col_excess(), 8 * &self.falling[2])?;
        Some(first + second)
    }

    /// Leading rational part of b_3: S3T3/(6[S]_3).
    fn b3(&self) -> Option<BigRational> {
        ratio(&self.s3 * &self.t3, 6 * &self.falling[1])
    }

    /// S2² − 4S3 − 2S2.
    fn row_excess(&self) -> BigInt {
        &self.s2 * &self.s2 - 4 * &self.s3 - 2 * &self.s2
    }

    /// T2² − 4T3 − 2T2.
    fn col_excess(&self) -> BigInt {
        &self.t2 * &self.t2 - 4 * &self.t3 - 2 * &self.t2
    }
}

/// Closed-form binomial moments of the doublet count. b_0, b_1, b_2 are
/// exact; b_3 keeps only its rational main term; b_4's main term is 0.
/// A moment whose falling-factorial denominator vanishes is `Undefined`.
pub fn doublet_moments(margins: &MarginPair) -> DoubletMoments {
    let ing = moment_ingredients(margins);
    let to_value = |v: Option<BigRational>, truncated: bool| match v {
        Some(v) if truncated => MomentValue::Truncated(v),
        Some(v) => MomentValue::Exact(v),
        None => MomentValue::Undefined,
    };
    DoubletMoments {
        b: [
            MomentValue::Exact(BigRational::one()),
            to_value(ing.b1(), false),
            to_value(ing.b2(), false),
            to_value(ing.b3(), true),
            MomentValue::Truncated(BigRational::zero()),
        ],
    }
}

/// The truncated closed forms for the probabilities of exactly k doublets,
/// k = 0..3. All four drop the same-order error terms and are `Truncated`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities {
    pub p: [MomentValue; 4],
}

/// Truncated doublet-count probabilities p_0..p_3. Requires S ≥ 4 so every
/// displayed denominator is positive.
pub fn class_probabilities(margins: &MarginPair) -> Result<ClassProbabilities, PairingError> {
    let ing = moment_ingredients(margins);
    if ing.falling[2].is_zero() {
        return Err(PairingError::UndefinedMoment { order: 4 });
    }
    let excess = ing.row_excess() * ing.col_excess();
    let s2t2 = &ing.s2 * &ing.t2;
    let s3t3 = &ing.s3 * &ing.t3;
    let half_collision = BigRational::new(s2t2, 2 * &ing.falling[0]);
    let p0 = BigRational::one() - &half_collision
        + BigRational::new(&s3t3 * 2, 6 * &ing.falling[1])
        + BigRational::new(excess.clone(), 8 * &ing.falling[2]);
    let p1 = &half_collision - BigRational::new(s3t3.clone(), 2 * &ing.falling[1])
        - BigRational::new(excess.clone(), 4 * &ing.falling[2]);
    let p2 = BigRational::new(excess, 8 * &ing.falling[2]);
    let p3 = BigRational::new(s3t3, 6 * &ing.falling[1]);
    Ok(ClassProbabilities {
        p: [
            MomentValue::Truncated(p0),
            MomentValue::Truncated(p1),
            MomentValue::Truncated(p2),
            MomentValue::Truncated(p3),
        ],
    })
}

/// Exhaustive binomial moments of the doublet count: element r is
/// E[C(doublets, r)] as an exact rational, averaged over all S! pairings.
pub fn exhaustive_binomial_moments(
    margins: &MarginPair,
    max_order: usize,
) -> Result<Vec<BigRational>, PairingError> {
    guard_total(margins)?;
    let mut sums = vec![0u128; max_order + 1];
    let mut pairings = 0u128;
    for pairing in enumerate_pairings(margins)? {
        pairings += 1;
        let x = pairing.doublet_count();
        for (r, slot) in sums.iter_mut().enumerate() {
            *slot += binom_u128(x, r as u64);
        }
    }
    Ok(sums
        .into_iter()
        .map(|s| BigRational::new(BigInt::from(s), BigInt::from(pairings)))
        .collect())
}

/// Exhaustive distribution of the doublet count: element k is
/// Pr(doublets = k) as an exact rational over all S! pairings.
pub fn exhaustive_doublet_distribution(
    margins: &MarginPair,
    max_count: usize,
) -> Result<Vec<BigRational>, PairingError> {
    guard_total(margins)?;
    let mut hits = vec![0u128; max_count + 1];
    let mut pairings = 0u128;
    for pairing in enumerate_pairings(margins)? {
        pairings += 1;
        let x = pairing.doublet_count() as usize;
        if x < hits.len() {
            hits[x] += 1;
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| BigRational::new(BigInt::from(h), BigInt::from(pairings)))
        .collect())
}

fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Result of a Monte Carlo frequency run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub hits: u64,
}

impl MonteCarloReport {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    /// sqrt(p̂(1−p̂)/N).
    pub fn standard_error(&self) -> f64 {
        let p = self.frequency();
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// Estimates the probability that a uniform pairing has no parallel class
/// of multiplicity ≥ 2 (equivalently, induces a 0-1 matrix) by sampling.
/// Deterministic for a fixed seed.
pub fn no_doublet_frequency(
    margins: &MarginPair,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport, PairingError> {
    if margins.total() == 0 {
        return Err(MarginError::ZeroTotal.into());
    }
    let space = PairingSpace::new(margins.clone());
    let n = margins.n();
    let total = margins.total() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..total).collect();
    let mut counts = vec![0u64; margins.m() * n];
    let mut hits = 0u64;
    for _ in 0..samples {
        perm.shuffle(&mut rng);
        counts.iter_mut().for_each(|c| *c = 0);
        let mut simple = true;
        for (x, &y) in perm.iter().enumerate() {
            let cell = space.row_of[x] * n + space.col_of[y];
            counts[cell] += 1;
            if counts[cell] >= 2 {
                simple = false;
                break;
            }
        }
        if simple {
            hits += 1;
        }
    }
    Ok(MonteCarloReport { samples, hits })
}
