//! Large-`m` machinery: reduction of a phone pair to one with
//! `P_A B ≠ 0`, explicit positivity thresholds `m₀`, the resolvent trace
//! series and its Laurent leading term, normalized asymptotic ratios,
//! band checks, monotonicity sweeps, and the sparse-word gap bound.

use crate::cmatrix::{matrix_power, CMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hurwitz::{dp_step, hurwitz_row, hurwitz_trace, phone_or_zero, real_part_checked, TraceCell};
use crate::linalg::{
    eig_hermitian, operator_norm, power_projector, split_phone_pair, HermitianMatrix, PhoneMatrix,
    SplitOutcome,
};
use crate::words::binomial;

const CHOOSE_L_CAP: u64 = 1_000_000;
/// Below this, `‖A − P_A‖` is treated as exactly zero (A is a projector).
const PROJECTOR_GAP_TOL: f64 = 1e-12;

/// One splitting step: in `basis`, `A = I ⊕ α·A'` and `B = 0 ⊕ β·B'`.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub basis: CMatrix,
    /// `(n − l, l)`.
    pub sizes: (usize, usize),
    pub alpha: f64,
    pub beta: f64,
}

/// Where the reduction stopped.
#[derive(Debug, Clone)]
pub enum ReductionTerminal {
    /// `tr(P_A B) > split_tol`: the pair the asymptotic formulas apply to.
    EffectivePair {
        a: PhoneMatrix,
        b: PhoneMatrix,
        trace_pab: f64,
    },
    /// `tr(AB) ≤ ab_zero_tol`, so `AB = 0` and every mixed trace vanishes.
    ProductZero,
}

/// Iterated splitting record. For `k ≥ 1` the original trace factors as
/// `tr S_{m,k}(A,B) = Π αᵢ^{m−k}·βᵢ^k · tr S_{m,k}(A_t, B_t)`.
#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub steps: Vec<ReductionStep>,
    pub terminal: ReductionTerminal,
    /// Borderline `‖P_A B‖` observations (within (1e-10, 1e-6)), where
    /// splitting and direct computation may disagree noticeably.
    pub warnings: Vec<String>,
}

impl ReductionChain {
    /// `ln` of the accumulated scale factor relating the original trace to
    /// the terminal one at `(m, k)`; `−∞` when some `α = 0` and `m > k`.
    pub fn log_scale(&self, m: u32, k: u32) -> f64 {
        let mut sum = 0.0;
        for s in &self.steps {
            if m > k {
                sum += (m - k) as f64 * s.alpha.ln();
            }
            sum += k as f64 * s.beta.ln();
        }
        sum
    }

    pub fn terminal_pair(&self) -> Option<(&PhoneMatrix, &PhoneMatrix)> {
        match &self.terminal {
            ReductionTerminal::EffectivePair { a, b, .. } => Some((a, b)),
            ReductionTerminal::ProductZero => None,
        }
    }

    /// Recompose `(sign, log10 |tr S_{m,k}|)` of the original pair from the
    /// terminal pair and the accumulated scales. Requires `1 ≤ k`; a
    /// product-zero terminal yields the exact zero cell for `k < m` and is
    /// a domain error at `k = m` (the terminal `B` is not retained).
    pub fn recomposed_sign_log10(&self, m: u32, k: u32, tol: &Tolerances) -> Result<(i8, f64)> {
        if k < 1 || k > m {
            return Err(Error::Domain(format!(
                "recomposition needs 1 <= k <= m, got m={m}, k={k}"
            )));
        }
        match &self.terminal {
            ReductionTerminal::ProductZero => {
                if k == m {
                    Err(Error::Domain(
                        "cannot recompose k = m across a product-zero terminal".into(),
                    ))
                } else {
                    Ok((0, f64::NEG_INFINITY))
                }
            }
            ReductionTerminal::EffectivePair { a, b, .. } => {
                let cell = hurwitz_trace(a.matrix(), b.matrix(), m, k, tol)?;
                if cell.sign == 0 {
                    return Ok((0, f64::NEG_INFINITY));
                }
                let log10 = cell.log10_abs + self.log_scale(m, k) / std::f64::consts::LN_10;
                Ok((cell.sign, log10))
            }
        }
    }
}

/// Repeatedly split a phone pair until `tr(P_A B) > split_tol` or the
/// product is zero. The `tr(AB) = 0` predicate is checked before each
/// split, so a vanishing product is always reported as `ProductZero`
/// rather than through degenerate `α = 0` steps.
pub fn reduce_pair(a: &PhoneMatrix, b: &PhoneMatrix, tol: &Tolerances) -> Result<ReductionChain> {
    a.mat().require_same_dim(b.mat())?;
    let max_depth = a.n();
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut warnings = Vec::new();
    loop {
        let tr_ab = cur_a.mat().matmul(cur_b.mat()).trace().re;
        if tr_ab <= tol.ab_zero_tol {
            return Ok(ReductionChain {
                steps,
                terminal: ReductionTerminal::ProductZero,
                warnings,
            });
        }
        let proj = power_projector(&cur_a, tol)?;
        let norm_pab = operator_norm(&proj.matrix.mat().matmul(cur_b.mat()))?;
        if norm_pab > 1e-10 && norm_pab < 1e-6 {
            warnings.push(format!(
                "borderline split at depth {}: |P_A B| = {norm_pab:.3e}",
                steps.len()
            ));
        }
        match split_phone_pair(&cur_a, &cur_b, tol)? {
            SplitOutcome::NoSplit { trace_pab } => {
                return Ok(ReductionChain {
                    steps,
                    terminal: ReductionTerminal::EffectivePair {
                        a: cur_a,
                        b: cur_b,
                        trace_pab,
                    },
                    warnings,
                });
            }
            SplitOutcome::Split(bs) => {
                steps.push(ReductionStep {
                    basis: bs.basis,
                    sizes: bs.sizes,
                    alpha: bs.alpha,
                    beta: bs.beta,
                });
                cur_a = bs.a_prime;
                cur_b = bs.b_prime;
                if steps.len() > max_depth {
                    return Err(Error::MaxDepthExceeded(max_depth));
                }
            }
        }
    }
}

/// `‖A − P_A‖`: the largest eigenvalue magnitude of `A` outside the
/// eigenvalue-1 cluster (0 for a projector).
fn gap_norm(a: &PhoneMatrix, tol: &Tolerances) -> Result<f64> {
    let dec = eig_hermitian(a.matrix())?;
    Ok(dec
        .eigenvalues
        .iter()
        .filter(|&&lam| (lam - 1.0).abs() > tol.one_tol)
        .map(|lam| lam.abs())
        .fold(0.0, f64::max))
}

/// Smallest `L ≥ 1` with `k·‖A−P_A‖^L·‖A^L B‖^{k−1} < ε`. Projector input
/// returns 1 by convention. Requires `0 < ε < 1`; a hard cap of 10⁶
/// guards against tolerance breakdown.
pub fn choose_l(a: &PhoneMatrix, b: &PhoneMatrix, k: u32, epsilon: f64, tol: &Tolerances) -> Result<u64> {
    if k < 1 {
        return Err(Error::Domain(format!("choose_l requires k >= 1, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "choose_l requires 0 < epsilon < 1, got {epsilon}"
        )));
    }
    let gap = gap_norm(a, tol)?;
    if gap < PROJECTOR_GAP_TOL {
        return Ok(1);
    }
    let mut a_pow = a.mat().clone();
    let mut gap_pow = gap;
    for l in 1..=CHOOSE_L_CAP {
        let factor = if k == 1 {
            1.0
        } else {
            operator_norm(&a_pow.matmul(b.mat()))?.powi(k as i32 - 1)
        };
        if (k as f64) * gap_pow * factor < epsilon {
            return Ok(l);
        }
        a_pow = a_pow.matmul(a.mat());
        gap_pow *= gap;
    }
    Err(Error::Domain(format!(
        "choose_l found no L below the cap {CHOOSE_L_CAP} (gap {gap}, epsilon {epsilon})"
    )))
}

/// Which closed form an [`M0Estimate`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M0Branch {
    /// `‖A − P_A‖ < 1e-12` after reduction.
    Projector,
    /// Nonzero gap after reduction.
    General,
    /// `AB = 0`: every mixed trace is identically zero.
    ProductZero,
}

/// Explicit positivity threshold: `tr S_{m,k} > 0` for all `m ≥ m₀`, with
/// both the branch-appropriate closed form and the generic `(ε, L)` proof
/// bound. All spectral quantities refer to the reduced (terminal) pair.
#[derive(Debug, Clone)]
pub struct M0Estimate {
    pub k: u32,
    pub branch: M0Branch,
    /// Number of splitting steps applied before the terminal pair.
    pub reduction_steps: usize,
    pub terminal_dim: usize,
    /// The `L` of the generic bound (1 in the projector branch).
    pub l: u64,
    /// `ε = leading/(3n)·(1 − 1e-6)`, just under its supremum.
    pub epsilon: f64,
    /// `‖A − P_A‖` of the terminal pair.
    pub norm_gap: f64,
    /// `tr((P_A B)^k)` of the terminal pair.
    pub leading: f64,
    pub m0_closed_form: f64,
    pub m0_generic: f64,
}

impl M0Estimate {
    /// The threshold to use (closed form; apply `ceil` for integer sweeps).
    pub fn m0(&self) -> f64 {
        self.m0_closed_form
    }

    pub fn branch_label(&self) -> &'static str {
        match (self.branch, self.reduction_steps > 0) {
            (M0Branch::ProductZero, _) => "product-zero",
            (M0Branch::Projector, false) => "projector",
            (M0Branch::Projector, true) => "reduced-then-projector",
            (M0Branch::General, false) => "general",
            (M0Branch::General, true) => "reduced-then-general",
        }
    }
}

/// Compute the explicit `m₀` of a phone pair for `k ≥ 1`: reduce first,
/// then on the terminal pair report
///
/// * projector branch: `(1 + 2k)·(1 + 3kn/leading)`,
/// * general branch:
///   `(1 + k)·(1 + 3kn/leading)·(2 + (ln leading − ln 3kn)/ln ‖A−P_A‖)`,
/// * generic proof bound: `(1 + k/ε)·(k + kL + L)`,
///
/// with `n` the terminal dimension and `leading = tr((P_A B)^k)`. A
/// product-zero pair yields `m₀ = 0` (trace identically zero).
pub fn m0_estimate(a: &PhoneMatrix, b: &PhoneMatrix, k: u32, tol: &Tolerances) -> Result<M0Estimate> {
    if k < 1 {
        return Err(Error::Domain(format!("m0_estimate requires k >= 1, got {k}")));
    }
    let chain = reduce_pair(a, b, tol)?;
    let (ta, tb) = match chain.terminal_pair() {
        None => {
            return Ok(M0Estimate {
                k,
                branch: M0Branch::ProductZero,
                reduction_steps: chain.steps.len(),
                terminal_dim: 0,
                l: 0,
                epsilon: 0.0,
                norm_gap: 0.0,
                leading: 0.0,
                m0_closed_form: 0.0,
                m0_generic: 0.0,
            })
        }
        Some(pair) => pair,
    };
    let n = ta.n();
    let leading = laurent_leading(ta, tb.matrix(), k, tol)?;
    if leading <= 0.0 {
        return Err(Error::Numerical(format!(
            "terminal pair has nonpositive leading coefficient {leading}"
        )));
    }
    let norm_gap = gap_norm(ta, tol)?;
    let three_kn = 3.0 * k as f64 * n as f64;
    let epsilon = leading / three_kn * (1.0 - 1e-6);
    let (branch, l, m0_closed_form) = if norm_gap < PROJECTOR_GAP_TOL {
        let m0 = (1.0 + 2.0 * k as f64) * (1.0 + three_kn / leading);
        (M0Branch::Projector, 1, m0)
    } else {
        let l = choose_l(ta, tb, k, epsilon, tol)?;
        let m0 = (1.0 + k as f64)
            * (1.0 + three_kn / leading)
            * (2.0 + (leading.ln() - three_kn.ln()) / norm_gap.ln());
        (M0Branch::General, l, m0)
    };
    let m0_generic = (1.0 + k as f64 / epsilon) * (k as f64 + k as f64 * l as f64 + l as f64);
    Ok(M0Estimate {
        k,
        branch,
        reduction_steps: chain.steps.len(),
        terminal_dim: n,
        l,
        epsilon,
        norm_gap,
        leading,
        m0_closed_form,
        m0_generic,
    })
}

/// One evaluation of the resolvent trace `tr [B(I − τA)^{-1}]^k`.
#[derive(Debug, Clone, Copy)]
pub struct ResolventSample {
    pub tau: f64,
    pub k: u32,
    pub value: f64,
}

/// Evaluate `tr [B(I − τA)^{-1}]^k` through the eigendecomposition of the
/// phone matrix `A` (diagonal resolvent entries `1/(1 − τλᵢ)`). `B` may be
/// any Hermitian matrix; the trace is real for real `τ`.
pub fn resolvent_trace(
    a: &PhoneMatrix,
    b: &HermitianMatrix,
    k: u32,
    tau: f64,
    tol: &Tolerances,
) -> Result<ResolventSample> {
    a.mat().require_same_dim(b.mat())?;
    if k < 1 {
        return Err(Error::Domain(format!("resolvent requires k >= 1, got {k}")));
    }
    if tau.is_nan() || tau.abs() >= 1.0 {
        return Err(Error::Domain(format!("resolvent requires |tau| < 1, got {tau}")));
    }
    let m = resolvent_factor(a, tau, tol)?;
    let bm = b.mat().matmul(&m);
    let value = real_part_checked(matrix_power(&bm, k as u64).trace())?;
    Ok(ResolventSample { tau, k, value })
}

/// `(I − τA)^{-1}` via the spectral decomposition of `A`.
fn resolvent_factor(a: &PhoneMatrix, tau: f64, tol: &Tolerances) -> Result<CMatrix> {
    let dec = eig_hermitian(a.matrix())?;
    let mut min_dist = f64::INFINITY;
    for &lam in &dec.eigenvalues {
        min_dist = min_dist.min((1.0 - tau * lam).abs());
    }
    if min_dist < tol.pole_tol {
        return Err(Error::PoleProximity(min_dist));
    }
    let n = a.n();
    let u = &dec.eigenvectors;
    let inv: Vec<f64> = dec.eigenvalues.iter().map(|&lam| 1.0 / (1.0 - tau * lam)).collect();
    Ok(CMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|s| u.get(i, s) * inv[s] * u.get(j, s).conj())
            .sum()
    }))
}

/// Matrix-valued resolvent `(I − τA)^{-1}·[B(I − τA)^{-1}]^k`, the
/// entrywise limit of `Σ_m τ^m S_{m+k,k}(A, B)`.
pub fn resolvent_matrix(
    a: &PhoneMatrix,
    b: &HermitianMatrix,
    k: u32,
    tau: f64,
    tol: &Tolerances,
) -> Result<CMatrix> {
    a.mat().require_same_dim(b.mat())?;
    let r = resolvent_factor(a, tau, tol)?;
    let br = b.mat().matmul(&r);
    Ok(r.matmul(&matrix_power(&br, k as u64)))
}

/// Truncated trace series `Σ_{m ≤ M} τ^m·(k/(m+k))·tr S_{m+k,k}(A, B)`
/// in one normalized DP sweep, using
/// `(k/(m+k))·tr S_{m+k,k} = C(m+k−1, m)·‖B‖^k·tr T_{m+k,k}`.
pub fn series_partial_sum(
    a: &PhoneMatrix,
    b: &HermitianMatrix,
    k: u32,
    tau: f64,
    m_trunc: u32,
    tol: &Tolerances,
) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    if k < 1 {
        return Err(Error::Domain(format!("series requires k >= 1, got {k}")));
    }
    let (pb, b_scale) = phone_or_zero(b, tol)?;
    if b_scale == 0.0 {
        return Ok(0.0);
    }
    let bk = b_scale.powi(k as i32);
    let rows = m_trunc + k;
    let mut row = vec![CMatrix::identity(a.n())];
    let mut sum = 0.0;
    let mut tau_pow = 1.0;
    for j in 0..=rows {
        if j > 0 {
            row = dp_step(&row, a.mat(), &pb, j, k);
        }
        if j >= k {
            let m = j - k;
            let t = real_part_checked(row[k as usize].trace())?;
            sum += tau_pow * binomial((j - 1) as u64, m as u64).to_f64() * bk * t;
            tau_pow *= tau;
        }
    }
    Ok(sum)
}

/// Tail bound for the truncated trace series of a phone `A` and Hermitian
/// `B` with `‖B‖ ≤ b_norm`: with `g = (M+k+1)/(M+2)` and `gτ < 1`,
///
/// ```text
/// Σ_{m > M} τ^m·C(m+k−1, m)·n·b_norm^k ≤ n·b_norm^k·C(M+k, M+1)·τ^{M+1}/(1 − gτ),
/// ```
///
/// since consecutive term ratios are `(m+k)/(m+1)·τ ≤ gτ` for `m > M`.
pub fn series_tail_bound(n: usize, b_norm: f64, k: u32, tau: f64, m_trunc: u32) -> Result<f64> {
    let g = (m_trunc as f64 + k as f64 + 1.0) / (m_trunc as f64 + 2.0);
    let gt = g * tau.abs();
    if gt >= 1.0 {
        return Err(Error::Domain(format!(
            "tail bound needs g*|tau| < 1, got {gt} (increase the truncation order)"
        )));
    }
    let lead = binomial((m_trunc + k) as u64, (m_trunc + 1) as u64).to_f64()
        * tau.abs().powi(m_trunc as i32 + 1);
    Ok(n as f64 * b_norm.powi(k as i32) * lead / (1.0 - gt))
}

/// Laurent leading coefficient `tr((P_A B)^k)`, the value
/// `(1−τ)^k·tr[B(I−τA)^{-1}]^k` converges to as `τ ↑ 1`. Nonnegative up to
/// rounding for Hermitian PSD `B`.
pub fn laurent_leading(a: &PhoneMatrix, b: &HermitianMatrix, k: u32, tol: &Tolerances) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    if k < 1 {
        return Err(Error::Domain(format!("laurent_leading requires k >= 1, got {k}")));
    }
    let proj = power_projector(a, tol)?;
    let pb = proj.matrix.mat().matmul(b.mat());
    real_part_checked(matrix_power(&pb, k as u64).trace())
}

/// Normalized coefficient ratio `f_m / C(m+k−1, m)` with
/// `f_m = (k/(m+k))·tr S_{m+k,k}(A, B)`; binomial cancellation reduces it
/// to `‖B‖^k·tr T_{m+k,k}`. Converges to `tr((P_A B)^k)` as `m → ∞`.
pub fn asymptotic_ratio(
    a: &PhoneMatrix,
    b: &HermitianMatrix,
    k: u32,
    m: u32,
    tol: &Tolerances,
) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    if k < 1 || m < 1 {
        return Err(Error::Domain(format!(
            "asymptotic_ratio requires k >= 1 and m >= 1, got k={k}, m={m}"
        )));
    }
    let (pb, b_scale) = phone_or_zero(b, tol)?;
    if b_scale == 0.0 {
        return Ok(0.0);
    }
    let mut row = vec![CMatrix::identity(a.n())];
    for j in 1..=(m + k) {
        row = dp_step(&row, a.mat(), &pb, j, k);
    }
    let t = real_part_checked(row[k as usize].trace())?;
    Ok(b_scale.powi(k as i32) * t)
}

/// Outcome of one band check: the normalized trace `q_{m,k}` against the
/// `dim esp₁(A) ∩ esp₁(B) / n` target band of half-width `epsilon`.
#[derive(Debug, Clone, Copy)]
pub struct BandCheck {
    pub q: f64,
    pub d_over_n: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

pub fn band_check(
    a: &PhoneMatrix,
    b: &PhoneMatrix,
    m: u32,
    k: u32,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<BandCheck> {
    if k > m {
        return Err(Error::Domain(format!("band check needs k <= m, got m={m}, k={k}")));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("band width must be positive, got {epsilon}")));
    }
    let d = crate::linalg::dim_shared_top_eigenspace(a, b, tol)?;
    let row = hurwitz_row(a, b, m, k)?;
    let q = row.q(k)?;
    let d_over_n = d as f64 / a.n() as f64;
    Ok(BandCheck {
        q,
        d_over_n,
        lower_ok: q > d_over_n - epsilon,
        upper_ok: q < d_over_n + epsilon,
    })
}

/// Monotonicity sweep of `q_{m+k,k}` for `m = 0…m_max`.
#[derive(Debug, Clone)]
pub struct ConjectureSweep {
    pub k: u32,
    /// `q[m] = q_{m+k,k}` for `m = 0…m_max`.
    pub q: Vec<f64>,
    /// First `m ≥ 1` with `q[m] − q[m−1] > mono_tol`, and that increment.
    pub first_increase: Option<(u32, f64)>,
}

/// Sweep the conjectured-monotone sequence in one DP pass. Errors with
/// `ProductZero` when `tr(AB) ≤ ab_zero_tol` (the sequence is identically
/// zero there and monotonicity is vacuous).
pub fn conjecture_sweep(
    a: &PhoneMatrix,
    b: &PhoneMatrix,
    k: u32,
    m_max: u32,
    tol: &Tolerances,
) -> Result<ConjectureSweep> {
    a.mat().require_same_dim(b.mat())?;
    if k < 1 {
        return Err(Error::Domain(format!("conjecture sweep requires k >= 1, got {k}")));
    }
    if a.mat().matmul(b.mat()).trace().re <= tol.ab_zero_tol {
        return Err(Error::ProductZero);
    }
    let n = a.n() as f64;
    let rows = m_max + k;
    let mut row = vec![CMatrix::identity(a.n())];
    let mut q = Vec::with_capacity(m_max as usize + 1);
    for j in 0..=rows {
        if j > 0 {
            row = dp_step(&row, a.mat(), b.mat(), j, k);
        }
        if j >= k {
            q.push(real_part_checked(row[k as usize].trace())? / n);
        }
    }
    let mut first_increase = None;
    for i in 1..q.len() {
        let delta = q[i] - q[i - 1];
        if delta > tol.mono_tol {
            first_increase = Some((i as u32, delta));
            break;
        }
    }
    Ok(ConjectureSweep { k, q, first_increase })
}

/// Gap `‖A^{l₁}B·A^{l₂}B⋯A^{l_k}B − (P_A B)^k‖` for run lengths
/// `lᵢ ≥ L ≥ 1`, checked against the bound
/// `k·‖A−P_A‖^L·‖A^L B‖^{k−1}` (error if exceeded beyond 1e-10 slack).
pub fn sparse_word_gap(
    a: &PhoneMatrix,
    b: &PhoneMatrix,
    l_list: &[u64],
    l_min: u64,
    tol: &Tolerances,
) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    if l_list.is_empty() {
        return Err(Error::Domain("sparse_word_gap needs at least one run".into()));
    }
    if l_min < 1 {
        return Err(Error::Domain("sparse_word_gap requires L >= 1".into()));
    }
    if let Some(&bad) = l_list.iter().find(|&&l| l < l_min) {
        return Err(Error::Domain(format!(
            "run length {bad} is below the declared minimum L={l_min}"
        )));
    }
    let k = l_list.len() as u32;
    let n = a.n();
    let mut prod = CMatrix::identity(n);
    for &l in l_list {
        prod = prod.matmul(&matrix_power(a.mat(), l)).matmul(b.mat());
    }
    let proj = power_projector(a, tol)?;
    let pb = proj.matrix.mat().matmul(b.mat());
    let target = matrix_power(&pb, k as u64);
    let gap = operator_norm(&prod.sub(&target))?;

    let gap_a = gap_norm(a, tol)?;
    let factor = if k == 1 {
        1.0
    } else {
        operator_norm(&matrix_power(a.mat(), l_min).matmul(b.mat()))?.powi(k as i32 - 1)
    };
    let bound = k as f64 * gap_a.powi(l_min as i32) * factor;
    if gap > bound + 1e-10 {
        return Err(Error::Numerical(format!(
            "sparse word gap {gap} exceeds its bound {bound}"
        )));
    }
    Ok(gap)
}

/// Convenience: the exact zero trace cell (used when a reduction reports
/// a vanishing product).
pub fn zero_cell() -> TraceCell {
    TraceCell::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_phone, SampleKind};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn phone_diag(values: &[f64]) -> PhoneMatrix {
        PhoneMatrix::new(HermitianMatrix::diag(values), 1.0, &tol()).unwrap()
    }

    #[test]
    fn reduce_identity_pair_is_empty_chain() {
        let t = tol();
        let i2 = phone_diag(&[1.0, 1.0]);
        let chain = reduce_pair(&i2, &i2, &t).unwrap();
        assert!(chain.steps.is_empty());
        match chain.terminal {
            ReductionTerminal::EffectivePair { trace_pab, .. } => {
                assert!((trace_pab - 2.0).abs() < 1e-12)
            }
            _ => panic!("expected effective pair"),
        }
    }

    #[test]
    fn reduce_one_step_example() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.5]);
        let b = phone_diag(&[0.0, 1.0]);
        let chain = reduce_pair(&a, &b, &t).unwrap();
        assert_eq!(chain.steps.len(), 1);
        assert_eq!(chain.steps[0].sizes, (1, 1));
        assert!((chain.steps[0].alpha - 0.5).abs() < 1e-12);
        let (ta, tb) = chain.terminal_pair().unwrap();
        assert_eq!(ta.n(), 1);
        assert!((ta.mat().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!((tb.mat().get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_detects_product_zero() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.0]);
        let b = phone_diag(&[0.0, 1.0]);
        let chain = reduce_pair(&a, &b, &t).unwrap();
        assert!(matches!(chain.terminal, ReductionTerminal::ProductZero));
    }

    #[test]
    fn recomposition_matches_direct_trace() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.5]);
        let b = phone_diag(&[0.0, 1.0]);
        let chain = reduce_pair(&a, &b, &t).unwrap();
        // closed form: tr S_{6,2} = C(6,2)·0.5⁴ = 0.9375 (second diagonal entry)
        let (sign, log10) = chain.recomposed_sign_log10(6, 2, &t).unwrap();
        assert_eq!(sign, 1);
        assert!((10f64.powf(log10) - 0.9375).abs() < 1e-10);
        let direct = hurwitz_trace(a.matrix(), b.matrix(), 6, 2, &t).unwrap();
        assert_eq!(direct.sign, 1);
        assert!((direct.log10_abs - log10).abs() < 1e-8);
    }

    #[test]
    fn choose_l_closed_form_example() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.5]);
        let b = phone_diag(&[1.0, 1.0]);
        // k=1: smallest L with 0.5^L < 0.1 → L=4
        assert_eq!(choose_l(&a, &b, 1, 0.1, &t).unwrap(), 4);
        // k=2: returned L satisfies the inequality, L−1 does not
        let l = choose_l(&a, &b, 2, 0.1, &t).unwrap();
        let gap = 0.5f64;
        let check = |ll: u64| {
            let factor = operator_norm(&matrix_power(a.mat(), ll).matmul(b.mat()))
                .unwrap()
                .powi(1);
            2.0 * gap.powi(ll as i32) * factor
        };
        assert!(check(l) < 0.1);
        assert!(check(l - 1) >= 0.1);
        // projector convention
        let p = phone_diag(&[1.0, 0.0]);
        assert_eq!(choose_l(&p, &b, 3, 0.05, &t).unwrap(), 1);
    }

    #[test]
    fn m0_identity_projector_branch() {
        let t = tol();
        for n in 1..=3usize {
            let i = phone_diag(&vec![1.0; n]);
            let est = m0_estimate(&i, &i, 1, &t).unwrap();
            assert_eq!(est.branch_label(), "projector");
            assert!((est.m0_closed_form - 12.0).abs() < 1e-9, "n={n}");
            assert_eq!(est.l, 1);
            // construction constraints
            assert!(est.epsilon > 0.0 && est.epsilon < est.leading / (3.0 * n as f64));
            assert!(est.m0_generic >= 1.0);
        }
    }

    #[test]
    fn m0_product_zero_flag() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.0]);
        let b = phone_diag(&[0.0, 1.0]);
        let est = m0_estimate(&a, &b, 2, &t).unwrap();
        assert_eq!(est.branch_label(), "product-zero");
        assert_eq!(est.m0(), 0.0);
    }

    #[test]
    fn m0_general_branch_and_positivity() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.5]);
        let b = phone_diag(&[1.0, 1.0]);
        let est = m0_estimate(&a, &b, 1, &t).unwrap();
        assert_eq!(est.branch_label(), "general");
        assert!((est.leading - 1.0).abs() < 1e-10);
        assert!((est.norm_gap - 0.5).abs() < 1e-12);
        // hypothesis of the generic bound holds at the chosen (ε, L)
        let lhs = 1.0 * est.norm_gap.powi(est.l as i32);
        assert!(lhs < est.epsilon);
        // engine sweep: positivity from the ceiling onward
        let m0 = est.m0().ceil() as u32;
        for m in m0..=(m0 + 5) {
            let cell = hurwitz_trace(a.matrix(), b.matrix(), m, 1, &t).unwrap();
            assert_eq!(cell.sign, 1, "m={m}");
        }
    }

    #[test]
    fn m0_reduced_branch_label() {
        let t = tol();
        let a = phone_diag(&[1.0, 0.5]);
        let b = phone_diag(&[0.0, 1.0]);
        let est = m0_estimate(&a, &b, 1, &t).unwrap();
        assert_eq!(est.branch_label(), "reduced-then-projector");
        assert_eq!(est.terminal_dim, 1);
        // terminal pair is ((1),(1)): same closed form as the identity case
        assert!((est.m0_closed_form - 12.0).abs() < 1e-9);
    }

    #[test]
    fn resolvent_scalar_cases() {
        let t = tol();
        let one = phone_diag(&[1.0]);
        let s = resolvent_trace(&one, &HermitianMatrix::identity(1), 2, 0.5, &t).unwrap();
        assert!((s.value - 4.0).abs() < 1e-12);
        // τ = 0 → tr B^k
        let b = HermitianMatrix::diag(&[0.7]);
        let s = resolvent_trace(&one, &b, 3, 0.0, &t).unwrap();
        assert!((s.value - 0.343).abs() < 1e-12);
    }

    #[test]
    fn resolvent_pole_detection() {
        let t = tol();
        let one = phone_diag(&[1.0]);
        let tau = 1.0 - 1e-13;
        match resolvent_trace(&one, &HermitianMatrix::identity(1), 1, tau, &t) {
            Err(Error::PoleProximity(d)) => assert!(d < 1e-12),
            other => panic!("expected pole error, got {other:?}"),
        }
        assert!(matches!(
            resolvent_trace(&one, &HermitianMatrix::identity(1), 1, 1.0, &t),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn series_matches_resolvent_within_tail() {
        let t = tol();
        let a = sample_phone(3, 51, SampleKind::Wishart, &t).unwrap();
        let b = sample_phone(3, 52, SampleKind::Wishart, &t).unwrap();
        for k in 1..=3u32 {
            let tau = 0.3;
            let m_trunc = 60;
            let exact = resolvent_trace(&a, b.matrix(), k, tau, &t).unwrap().value;
            let partial = series_partial_sum(&a, b.matrix(), k, tau, m_trunc, &t).unwrap();
            let tail = series_tail_bound(3, 1.0, k, tau, m_trunc).unwrap();
            let slack = tail + 1e-12 * (1.0 + exact.abs());
            assert!(
                (exact - partial).abs() <= slack,
                "k={k}: |{exact} - {partial}| > {slack}"
            );
        }
    }

    #[test]
    fn laurent_leading_cases() {
        let t = tol();
        let i2 = phone_diag(&[1.0, 1.0]);
        let b = HermitianMatrix::diag(&[0.5, 0.25]);
        // A = I → tr B^k
        let v = laurent_leading(&i2, &b, 2, &t).unwrap();
        assert!((v - (0.25 + 0.0625)).abs() < 1e-12);
        // P_A B = 0 → 0
        let a = phone_diag(&[1.0, 0.5]);
        let b0 = HermitianMatrix::diag(&[0.0, 1.0]);
        assert!(laurent_leading(&a, &b0, 3, &t).unwrap().abs() < 1e-14);
    }

    #[test]
    fn laurent_is_resolvent_limit() {
        let t = tol();
        let a = sample_phone(2, 61, SampleKind::DiagGap, &t).unwrap();
        let b = sample_phone(2, 62, SampleKind::Wishart, &t).unwrap();
        let k = 2u32;
        let lead = laurent_leading(&a, b.matrix(), k, &t).unwrap();
        let mut errs = Vec::new();
        for tau in [0.9, 0.99, 0.999] {
            let r = resolvent_trace(&a, b.matrix(), k, tau, &t).unwrap().value;
            errs.push(((1.0 - tau).powi(k as i32) * r - lead).abs());
        }
        assert!(errs[2] < errs[0], "no decrease toward the Laurent limit: {errs:?}");
    }

    #[test]
    fn asymptotic_ratio_cases() {
        let t = tol();
        // identity pair: exactly n at every m
        let i3 = phone_diag(&[1.0, 1.0, 1.0]);
        for m in [1u32, 5, 40] {
            let r = asymptotic_ratio(&i3, &HermitianMatrix::identity(3), 2, m, &t).unwrap();
            assert!((r - 3.0).abs() < 1e-10, "m={m}");
        }
        // scalar: B = (0.5) → 0.5^k exactly
        let one = phone_diag(&[1.0]);
        let b = HermitianMatrix::diag(&[0.5]);
        let r = asymptotic_ratio(&one, &b, 3, 7, &t).unwrap();
        assert!((r - 0.125).abs() < 1e-12);
    }

    #[test]
    fn band_check_identity() {
        let t = tol();
        let i2 = phone_diag(&[1.0, 1.0]);
        let c = band_check(&i2, &i2, 10, 4, 0.01, &t).unwrap();
        assert!((c.q - 1.0).abs() < 1e-12);
        assert!((c.d_over_n - 1.0).abs() < 1e-15);
        assert!(c.lower_ok && c.upper_ok);
    }

    #[test]
    fn conjecture_sweep_cases() {
        let t = tol();
        let i2 = phone_diag(&[1.0, 1.0]);
        let sweep = conjecture_sweep(&i2, &i2, 2, 30, &t).unwrap();
        assert_eq!(sweep.q.len(), 31);
        assert!(sweep.q.iter().all(|&q| (q - 1.0).abs() < 1e-12));
        assert!(sweep.first_increase.is_none());

        let a = phone_diag(&[1.0, 0.0]);
        let b = phone_diag(&[0.0, 1.0]);
        assert!(matches!(
            conjecture_sweep(&a, &b, 1, 10, &t),
            Err(Error::ProductZero)
        ));
    }

    #[test]
    fn conjecture_sweep_decreases_on_random_pair() {
        let t = tol();
        let a = sample_phone(2, 71, SampleKind::Wishart, &t).unwrap();
        let b = sample_phone(2, 72, SampleKind::Wishart, &t).unwrap();
        let sweep = conjecture_sweep(&a, &b, 2, 80, &t).unwrap();
        assert!(sweep.first_increase.is_none(), "{:?}", sweep.first_increase);
    }

    #[test]
    fn sparse_word_gap_cases() {
        let t = tol();
        // projector: gap exactly 0
        let p = phone_diag(&[1.0, 0.0]);
        let b = phone_diag(&[1.0, 1.0]);
        let g = sparse_word_gap(&p, &b, &[4, 2], 2, &t).unwrap();
        assert!(g < 1e-14);
        // diagonal closed form: k=1, l=(3) → gap = 0.5³ = bound
        let a = phone_diag(&[1.0, 0.5]);
        let g = sparse_word_gap(&a, &b, &[3], 3, &t).unwrap();
        assert!((g - 0.125).abs() < 1e-12);
        // run below the declared minimum
        assert!(matches!(
            sparse_word_gap(&a, &b, &[3, 2], 3, &t),
            Err(Error::Domain(_))
        ));
        // random pair: gap within bound (checked internally)
        let a = sample_phone(3, 81, SampleKind::DiagGap, &t).unwrap();
        let b = sample_phone(3, 82, SampleKind::Wishart, &t).unwrap();
        sparse_word_gap(&a, &b, &[5, 7, 6], 5, &t).unwrap();
    }

    #[test]
    fn zero_cell_is_exact() {
        let c = zero_cell();
        assert_eq!(c.sign, 0);
        assert_eq!(c.q, 0.0);
        assert_eq!(c.log10_abs, f64::NEG_INFINITY);
    }
}
