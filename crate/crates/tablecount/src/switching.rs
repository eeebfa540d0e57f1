//! Local switching moves on matrices and the analytic bounds that go with
//! them: the degree-D switching and its inverse, exhaustive site
//! enumeration, ordered-count bounds, a product inequality checker, and
//! generic evaluators for two bracketing lemmas over recursively defined
//! sums.

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::TableMatrix;
use crate::margins::falling_power_sum;

/// Errors raised by switching operations and bound evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwitchingError {
    /// A switching precondition fails on the given matrix.
    #[error("switching not applicable: {reason}")]
    NotApplicable { reason: String },
    /// A site's own shape invariants fail (degree, arity, distinctness).
    #[error("invalid switching site: {reason}")]
    InvalidSite { reason: String },
    /// A bound specification's arrays do not fit its variant.
    #[error("bound specification shape mismatch: {reason}")]
    SpecShapeMismatch { reason: String },
}

fn not_applicable(reason: impl Into<String>) -> SwitchingError {
    SwitchingError::NotApplicable {
        reason: reason.into(),
    }
}

fn invalid_site(reason: impl Into<String>) -> SwitchingError {
    SwitchingError::InvalidSite {
        reason: reason.into(),
    }
}

/// Where a degree-D switching acts: an anchor cell (i_0, j_0) followed by D
/// q-cells (i_1, j_1) … (i_D, j_D), with all rows distinct and all columns
/// distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwitchingSite {
    d: u64,
    positions: Vec<(usize, usize)>,
}

impl SwitchingSite {
    /// Validates the site shape: degree ≥ 2, exactly D+1 positions, rows
    /// pairwise distinct, columns pairwise distinct.
    pub fn new(d: u64, positions: Vec<(usize, usize)>) -> Result<Self, SwitchingError> {
        if d < 2 {
            return Err(invalid_site(format!("degree must be at least 2, got {d}")));
        }
        if positions.len() as u64 != d + 1 {
            return Err(invalid_site(format!(
                "expected {} positions for degree {d}, got {}",
                d + 1,
                positions.len()
            )));
        }
        for (a, &(ia, ja)) in positions.iter().enumerate() {
            for &(ib, jb) in positions.iter().skip(a + 1) {
                if ia == ib {
                    return Err(invalid_site(format!("row {ia} appears twice")));
                }
                if ja == jb {
                    return Err(invalid_site(format!("column {ja} appears twice")));
                }
            }
        }
        Ok(SwitchingSite { d, positions })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    /// The anchor cell (i_0, j_0).
    pub fn anchor(&self) -> (usize, usize) {
        self.positions[0]
    }

    /// The q-cells (i_1, j_1) … (i_D, j_D).
    pub fn q_cells(&self) -> &[(usize, usize)] {
        &self.positions[1..]
    }

    fn check_in_bounds(&self, matrix: &TableMatrix) -> Result<(), SwitchingError> {
        for &(i, j) in &self.positions {
            if i >= matrix.m() || j >= matrix.n() {
                return Err(not_applicable(format!(
                    "position ({i},{j}) is outside a {}x{} matrix",
                    matrix.m(),
                    matrix.n()
                )));
            }
        }
        Ok(())
    }

    /// Checks forward applicability on `q`: anchor holds D, q-cells avoid
    /// {0, D+1}, and both borders of every q-cell hold 0.
    pub fn check_forward(&self, q: &TableMatrix) -> Result<(), SwitchingError> {
        self.check_in_bounds(q)?;
        let (i0, j0) = self.anchor();
        if q.get(i0, j0) != self.d {
            return Err(not_applicable(format!(
                "anchor ({i0},{j0}) holds {}, expected {}",
                q.get(i0, j0),
                self.d
            )));
        }
        for &(il, jl) in self.q_cells() {
            let v = q.get(il, jl);
            if v == 0 || v == self.d + 1 {
                return Err(not_applicable(format!(
                    "q-cell ({il},{jl}) holds {v}, which is forbidden"
                )));
            }
            if q.get(i0, jl) != 0 {
                return Err(not_applicable(format!(
                    "row border ({i0},{jl}) holds {}, expected 0",
                    q.get(i0, jl)
                )));
            }
            if q.get(il, j0) != 0 {
                return Err(not_applicable(format!(
                    "column border ({il},{j0}) holds {}, expected 0",
                    q.get(il, j0)
                )));
            }
        }
        Ok(())
    }

    /// Checks reverse applicability on `r`: anchor holds 0, q-cells avoid D,
    /// and both borders of every q-cell hold 1.
    pub fn check_reverse(&self, r: &TableMatrix) -> Result<(), SwitchingError> {
        self.check_in_bounds(r)?;
        let (i0, j0) = self.anchor();
        if r.get(i0, j0) != 0 {
            return Err(not_applicable(format!(
                "anchor ({i0},{j0}) holds {}, expected 0",
                r.get(i0, j0)
            )));
        }
        for &(il, jl) in self.q_cells() {
            if r.get(il, jl) == self.d {
                return Err(not_applicable(format!(
                    "q-cell ({il},{jl}) holds {}, which is forbidden",
                    self.d
                )));
            }
            if r.get(i0, jl) != 1 {
                return Err(not_applicable(format!(
                    "row border ({i0},{jl}) holds {}, expected 1",
                    r.get(i0, jl)
                )));
            }
            if r.get(il, j0) != 1 {
                return Err(not_applicable(format!(
                    "column border ({il},{j0}) holds {}, expected 1",
                    r.get(il, j0)
                )));
            }
        }
        Ok(())
    }
}

/// Applies a forward degree-D switching: the anchor D becomes 0, the 2D
/// border zeros become 1, and each q-cell decreases by 1. Margins are
/// preserved by construction; cells outside the site are untouched.
pub fn apply_switching(q: &TableMatrix, site: &SwitchingSite) -> Result<TableMatrix, SwitchingError> {
    site.check_forward(q)?;
    let mut out = q.clone();
    let (i0, j0) = site.anchor();
    out.set_unchecked(i0, j0, 0);
    for &(il, jl) in site.q_cells() {
        out.set_unchecked(i0, jl, 1);
        out.set_unchecked(il, j0, 1);
        out.set_unchecked(il, jl, q.get(il, jl) - 1);
    }
    Ok(out)
}

/// Applies a reverse degree-D switching, the exact inverse of
/// [`apply_switching`]: the anchor 0 becomes D, the 2D border ones become
/// 0, and each q-cell increases by 1.
pub fn apply_reverse_switching(
    r: &TableMatrix,
    site: &SwitchingSite,
) -> Result<TableMatrix, SwitchingError> {
    site.check_reverse(r)?;
    let mut out = r.clone();
    let (i0, j0) = site.anchor();
    out.set_unchecked(i0, j0, site.d());
    for &(il, jl) in site.q_cells() {
        out.set_unchecked(i0, jl, 0);
        out.set_unchecked(il, j0, 0);
        out.set_unchecked(il, jl, r.get(il, jl) + 1);
    }
    Ok(out)
}

/// Enumerates every site (as an ordered tuple) at which a forward degree-D
/// switching applies to `q`. With `restricted` set, every q-cell must hold
/// exactly 1, so the move never creates or consumes entries above 1 outside
/// the anchor.
pub fn enumerate_switchings(
    q: &TableMatrix,
    d: u64,
    restricted: bool,
) -> Result<Vec<SwitchingSite>, SwitchingError> {
    enumerate_sites(q, d, Direction::Forward { restricted })
}

/// Enumerates every site (as an ordered tuple) at which a reverse degree-D
/// switching applies to `r`.
pub fn enumerate_reverse_switchings(
    r: &TableMatrix,
    d: u64,
) -> Result<Vec<SwitchingSite>, SwitchingError> {
    enumerate_sites(r, d, Direction::Reverse)
}

#[derive(Clone, Copy)]
enum Direction {
    Forward { restricted: bool },
    Reverse,
}

fn enumerate_sites(
    matrix: &TableMatrix,
    d: u64,
    direction: Direction,
) -> Result<Vec<SwitchingSite>, SwitchingError> {
    if d < 2 {
        return Err(invalid_site(format!("degree must be at least 2, got {d}")));
    }
    let m = matrix.m();
    let n = matrix.n();
    let arity = d as usize;
    let mut sites = Vec::new();
    if m < arity + 1 || n < arity + 1 {
        return Ok(sites);
    }
    let (anchor_value, border_value) = match direction {
        Direction::Forward { .. } => (d, 0),
        Direction::Reverse => (0, 1),
    };
    let q_cell_ok = |v: u64| match direction {
        Direction::Forward { restricted: true } => v == 1,
        Direction::Forward { restricted: false } => v != 0 && v != d + 1,
        Direction::Reverse => v != d,
    };
    for i0 in 0..m {
        for j0 in 0..n {
            if matrix.get(i0, j0) != anchor_value {
                continue;
            }
            let rows: Vec<usize> = (0..m)
                .filter(|&i| i != i0 && matrix.get(i, j0) == border_value)
                .collect();
            let cols: Vec<usize> = (0..n)
                .filter(|&j| j != j0 && matrix.get(i0, j) == border_value)
                .collect();
            if rows.len() < arity || cols.len() < arity {
                continue;
            }
            // Ordered selection of q-cells, one (row, column) pair at a time.
            let mut positions = vec![(i0, j0)];
            extend_site(
                matrix,
                &rows,
                &cols,
                &q_cell_ok,
                arity,
                &mut vec![false; rows.len()],
                &mut vec![false; cols.len()],
                &mut positions,
                &mut sites,
                d,
            );
        }
    }
    Ok(sites)
}

#[allow(clippy::too_many_arguments)]
fn extend_site(
    matrix: &TableMatrix,
    rows: &[usize],
    cols: &[usize],
    q_cell_ok: &impl Fn(u64) -> bool,
    arity: usize,
    row_used: &mut Vec<bool>,
    col_used: &mut Vec<bool>,
    positions: &mut Vec<(usize, usize)>,
    sites: &mut Vec<SwitchingSite>,
    d: u64,
) {
    if positions.len() == arity + 1 {
        sites.push(SwitchingSite {
            d,
            positions: positions.clone(),
        });
        return;
    }
    for (ri, &i) in rows.iter().enumerate() {
        if row_used[ri] {
            continue;
        }
        for (ci, &j) in cols.iter().enumerate() {
            if col_used[ci] || !q_cell_ok(matrix.get(i, j)) {
                continue;
            }
            row_used[ri] = true;
            col_used[ci] = true;
            positions.push((i, j));
            extend_site(
                matrix, rows, cols, q_cell_ok, arity, row_used, col_used, positions, sites, d,
            );
            positions.pop();
            row_used[ri] = false;
            col_used[ci] = false;
        }
    }
}

/// The ordered-count bounds for degree-D switchings on a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingBounds {
    /// Lower bound on forward sites: anchors · max(eligible − 2·s_max·t_max, 0)^D.
    pub lower: BigUint,
    /// Upper bound on reverse sites: S_D · T_D (falling-factorial sums).
    pub upper_reverse: BigUint,
    /// Number of cells holding exactly D (candidate anchors).
    pub anchor_count: u64,
    /// Number of nonzero cells holding at most D (candidate q-cells).
    pub eligible_count: u64,
}

/// Computes the two ordered-count bounds for degree-D switchings. The lower
/// bound is clamped at zero when the eligible-cell count does not exceed
/// 2·s_max·t_max (outside that hypothesis the bound claims nothing).
pub fn switching_bounds(q: &TableMatrix, d: u64) -> Result<SwitchingBounds, SwitchingError> {
    if d < 2 {
        return Err(invalid_site(format!("degree must be at least 2, got {d}")));
    }
    let mut anchor_count = 0u64;
    let mut eligible_count = 0u64;
    for row in q.entries() {
        for &v in row {
            if v == d {
                anchor_count += 1;
            }
            if v >= 1 && v <= d {
                eligible_count += 1;
            }
        }
    }
    let margins = q.margins();
    let crowding = 2 * margins.s_max() * margins.t_max();
    let base = eligible_count.saturating_sub(crowding);
    let lower = BigUint::from(anchor_count) * BigUint::from(base).pow(d as u32);
    let order = u32::try_from(d).map_err(|_| invalid_site("degree too large".to_string()))?;
    let upper_reverse =
        falling_power_sum(margins.rows(), order) * falling_power_sum(margins.cols(), order);
    Ok(SwitchingBounds {
        lower,
        upper_reverse,
        anchor_count,
        eligible_count,
    })
}

/// Both sides of the descending-product inequality
/// n·(n−q)···(n−(k−1)q) ≥ (n/e)^k, valid under n ≥ kq with n, q > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsefulInequality {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs ≥ rhs.
    pub holds: bool,
    /// n, q > 0, k ≥ 1, and n ≥ kq; `holds` is only promised under these.
    pub hypothesis_ok: bool,
}

/// Evaluates the descending-product inequality. Both sides are always
/// computed; a violated hypothesis is reported, not raised.
pub fn useful_inequality_check(n: f64, q: f64, k: u32) -> UsefulInequality {
    let mut lhs = 1.0;
    for l in 0..k {
        lhs *= n - l as f64 * q;
    }
    let rhs = (n / std::f64::consts::E).powi(k as i32);
    UsefulInequality {
        lhs,
        rhs,
        holds: lhs >= rhs,
        hypothesis_ok: n > 0.0 && q > 0.0 && k >= 1 && n >= k as f64 * q,
    }
}

/// Which bracketing lemma a [`BoundSpec`] instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// Ratios (A(i)/i)(1−(i−1)B(i))(1+δ_i) with polynomial δ-budgets γ.
    Lemma6,
    /// Ratios (A(i)/i)(1−(i−1)B(i)) with a single cap ĉ.
    Lemma7,
}

/// Inputs for one bracketing-lemma evaluation. `a` and `b` hold A(1..N) and
/// B(1..N); `delta` and `gamma` hold δ(1..N) and γ(0..K) and are used only
/// by the Lemma6 variant, as is `c`; `c_hat` is used only by Lemma7.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSpec {
    pub variant: BoundVariant,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub c: f64,
    pub c_hat: f64,
}

impl BoundSpec {
    /// A Lemma6 instance: N = a.len() terms, K = gamma.len()−1 budget orders.
    pub fn lemma6(a: Vec<f64>, b: Vec<f64>, delta: Vec<f64>, gamma: Vec<f64>, c: f64) -> Self {
        BoundSpec {
            variant: BoundVariant::Lemma6,
            a,
            b,
            delta,
            gamma,
            c,
            c_hat: 0.0,
        }
    }

    /// A Lemma7 instance: N = a.len() terms capped by ĉ.
    pub fn lemma7(a: Vec<f64>, b: Vec<f64>, c_hat: f64) -> Self {
        BoundSpec {
            variant: BoundVariant::Lemma7,
            a,
            b,
            delta: Vec::new(),
            gamma: Vec::new(),
            c: 0.0,
            c_hat,
        }
    }
}

/// Extremes of the spec's coefficient sequences: a over A(i), b over B(i),
/// c over the products A(i)·B(i).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelopes {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// The evaluated sum, its bracketing bounds, and the hypothesis verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SummationReport {
    /// Σ n_i for the recursively defined terms.
    pub sigma: f64,
    /// Closed-form lower bracket; Σ1 ≤ Σ is promised only under the
    /// variant's hypotheses.
    pub sigma1: f64,
    /// Closed-form upper bracket.
    pub sigma2: f64,
    /// Whether every stated hypothesis of the variant holds numerically.
    pub hypotheses_ok: bool,
    /// The terms n_0..n_N.
    pub terms: Vec<f64>,
    pub envelopes: Envelopes,
}

/// Falling factorial i·(i−1)···(i−j+1) in floating point; zero when j > i.
fn falling_f64(i: usize, j: usize) -> f64 {
    let mut acc = 1.0;
    for l in 0..j {
        acc *= i as f64 - l as f64;
    }
    acc
}

/// Σ_j γ_j · x^j with the empty-power convention x^0 = 1.
fn gamma_polynomial(gamma: &[f64], x: f64) -> f64 {
    gamma
        .iter()
        .enumerate()
        .map(|(j, &g)| g * x.powi(j as i32))
        .sum()
}

/// Evaluates the term recurrence, the sum, and the variant's closed-form
/// brackets. Hypotheses are evaluated and reported, never enforced: the
/// brackets are only promised when `hypotheses_ok` is true.
pub fn summation_bounds(spec: &BoundSpec) -> Result<SummationReport, SwitchingError> {
    let n_len = spec.a.len();
    if n_len == 0 {
        return Err(SwitchingError::SpecShapeMismatch {
            reason: "A must have at least one term".to_string(),
        });
    }
    if spec.b.len() != n_len {
        return Err(SwitchingError::SpecShapeMismatch {
            reason: format!("B has {} terms, A has {}", spec.b.len(), n_len),
        });
    }
    match spec.variant {
        BoundVariant::Lemma6 => {
            if spec.delta.len() != n_len {
                return Err(SwitchingError::SpecShapeMismatch {
                    reason: format!("delta has {} terms, A has {}", spec.delta.len(), n_len),
                });
            }
            if spec.gamma.is_empty() {
                return Err(SwitchingError::SpecShapeMismatch {
                    reason: "gamma must have at least one term (order 0)".to_string(),
                });
            }
            if spec.gamma.len() - 1 > n_len {
                return Err(SwitchingError::SpecShapeMismatch {
                    reason: format!(
                        "gamma order {} exceeds N = {}",
                        spec.gamma.len() - 1,
                        n_len
                    ),
                });
            }
        }
        BoundVariant::Lemma7 => {
            if !spec.delta.is_empty() || !spec.gamma.is_empty() {
                return Err(SwitchingError::SpecShapeMismatch {
                    reason: "delta and gamma must be empty for this variant".to_string(),
                });
            }
        }
    }

    let envelopes = Envelopes {
        a1: spec.a.iter().copied().fold(f64::INFINITY, f64::min),
        a2: spec.a.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        b1: spec.b.iter().copied().fold(f64::INFINITY, f64::min),
        b2: spec.b.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        c1: spec
            .a
            .iter()
            .zip(&spec.b)
            .map(|(&a, &b)| a * b)
            .fold(f64::INFINITY, f64::min),
        c2: spec
            .a
            .iter()
            .zip(&spec.b)
            .map(|(&a, &b)| a * b)
            .fold(f64::NEG_INFINITY, f64::max),
    };

    // Terms n_0..n_N with the zero-propagation interpretation.
    let mut terms = Vec::with_capacity(n_len + 1);
    terms.push(1.0f64);
    let mut dead = false;
    for i in 1..=n_len {
        let a_i = spec.a[i - 1];
        let damping = 1.0 - (i as f64 - 1.0) * spec.b[i - 1];
        let propagate_zero = match spec.variant {
            BoundVariant::Lemma6 => a_i == 0.0,
            BoundVariant::Lemma7 => a_i == 0.0 || damping == 0.0,
        };
        if dead || propagate_zero {
            dead = true;
            terms.push(0.0);
            continue;
        }
        let mut ratio = a_i / i as f64 * damping;
        if spec.variant == BoundVariant::Lemma6 {
            ratio *= 1.0 + spec.delta[i - 1];
        }
        let next = terms[i - 1] * ratio;
        terms.push(next);
    }
    let sigma: f64 = terms.iter().sum();

    let n_f = n_len as f64;
    let (sigma1, sigma2, hypotheses_ok) = match spec.variant {
        BoundVariant::Lemma6 => {
            let k_order = spec.gamma.len() - 1;
            let tail = 0.25 * (2.0 * std::f64::consts::E / spec.c).powi(n_len as i32);
            let sigma1 = (envelopes.a1
                - 0.5 * envelopes.a1.powi(2) * envelopes.b2
                - 4.0 * gamma_polynomial(&spec.gamma, 3.0 * envelopes.a1))
            .exp()
                - tail;
            let sigma2 = (envelopes.a2 - 0.5 * envelopes.a2.powi(2) * envelopes.b1
                + 0.5 * envelopes.a2.powi(3) * envelopes.b1.powi(2)
                + 4.0 * gamma_polynomial(&spec.gamma, 3.0 * envelopes.a2))
            .exp()
                + tail;
            let mut ok = n_len >= 2
                && spec.c > 2.0 * std::f64::consts::E
                && envelopes.a1 >= 0.0
                && envelopes.a2 * spec.c < (n_len - k_order) as f64 + 1.0
                && envelopes.b1.abs().max(envelopes.b2.abs()) * n_f < 1.0
                && spec.gamma.iter().all(|&g| g >= 0.0);
            let mut abs_delta_partial = 0.0;
            for i in 1..=n_len {
                abs_delta_partial += spec.delta[i - 1].abs();
                let budget: f64 = spec
                    .gamma
                    .iter()
                    .enumerate()
                    .map(|(j, &g)| g * falling_f64(i, j))
                    .sum();
                if !(abs_delta_partial <= budget && budget < 0.2) {
                    ok = false;
                }
            }
            (sigma1, sigma2, ok)
        }
        BoundVariant::Lemma7 => {
            let tail = (2.0 * std::f64::consts::E * spec.c_hat).powi(n_len as i32);
            let sigma1 = (envelopes.a1 - 0.5 * envelopes.a1 * envelopes.c2).exp() - tail;
            let sigma2 = (envelopes.a2 - 0.5 * envelopes.a2 * envelopes.c1
                + 0.5 * envelopes.a2 * envelopes.c1.powi(2))
            .exp()
                + tail;
            let damping_ok = (1..=n_len)
                .all(|i| 1.0 - (i as f64 - 1.0) * spec.b[i - 1] >= 0.0);
            let ok = n_len >= 2
                && spec.a.iter().all(|&a| a >= 0.0)
                && damping_ok
                && spec.c_hat > 0.0
                && spec.c_hat < 1.0 / 3.0
                && envelopes.a2 / n_f <= spec.c_hat
                && envelopes.c1.abs().max(envelopes.c2.abs()) <= spec.c_hat;
            (sigma1, sigma2, ok)
        }
    };

    Ok(SummationReport {
        sigma,
        sigma1,
        sigma2,
        hypotheses_ok,
        terms,
        envelopes,
    })
}

/// Random hypothesis-satisfying [`BoundSpec`]s for property tests. The
/// generator keeps the bracket slack terms well above floating-point noise
/// so the bracketing assertions are stable.
pub fn random_bound_spec(variant: BoundVariant, seed: u64) -> BoundSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_len = rng.gen_range(2..=20usize);
    match variant {
        BoundVariant::Lemma7 => {
            let c_hat = rng.gen_range(0.1..0.33);
            let a: Vec<f64> = (0..n_len)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        0.0
                    } else {
                        rng.gen_range(0.0..c_hat * n_len as f64)
                    }
                })
                .collect();
            let b: Vec<f64> = (1..=n_len)
                .map(|i| {
                    let damping_cap = if i == 1 { 1.0 } else { 1.0 / (i as f64 - 1.0) };
                    let product_cap = 0.95 * c_hat / a[i - 1].max(1e-9);
                    let cap = damping_cap.min(product_cap);
                    rng.gen_range(-cap..=cap)
                })
                .collect();
            BoundSpec::lemma7(a, b, c_hat)
        }
        BoundVariant::Lemma6 => {
            let e2 = 2.0 * std::f64::consts::E;
            let c = rng.gen_range(1.05 * e2..2.0 * e2);
            let k_order = rng.gen_range(0..=3.min(n_len));
            let a_cap = 0.9 * ((n_len - k_order) as f64 + 1.0) / c;
            let a: Vec<f64> = (0..n_len)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        0.0
                    } else {
                        rng.gen_range(0.0..a_cap)
                    }
                })
                .collect();
            let b_cap = 0.9 / n_len as f64;
            let b: Vec<f64> = (0..n_len).map(|_| rng.gen_range(-b_cap..b_cap)).collect();
            // Gamma budgets scaled so the largest falling-factorial sum
            // stays below 1/5; deltas then spend part of each increment.
            let budget_total = rng.gen_range(0.0..0.19);
            let gamma: Vec<f64> = (0..=k_order)
                .map(|j| budget_total / (k_order + 1) as f64 / falling_f64(n_len, j))
                .collect();
            let mut prev_budget = 0.0;
            let mut delta = Vec::with_capacity(n_len);
            for i in 1..=n_len {
                let budget: f64 = gamma
                    .iter()
                    .enumerate()
                    .map(|(j, &g)| g * falling_f64(i, j))
                    .sum();
                // The 0.99 keeps the partial-sum hypothesis safe from
                // floating-point rounding at the boundary.
                let step = (budget - prev_budget).max(0.0) * 0.99;
                let magnitude = rng.gen_range(0.0..=1.0) * step;
                delta.push(if rng.gen_bool(0.5) { magnitude } else { -magnitude });
                prev_budget += magnitude;
            }
            BoundSpec::lemma6(a, b, delta, gamma, c)
        }
    }
}
