//! The Hurwitz product engine.
//!
//! `S_{m,k}(A,B)` is the sum of all words of length `m` in `A`, `B` with
//! exactly `k` factors `B`. The engine never materializes raw `S` tensors
//! for large `m`; it runs the normalized recurrence
//!
//! ```text
//! T_{m,k} = ((m−k)/m)·A·T_{m−1,k} + (k/m)·B·T_{m−1,k−1},   T_{0,0} = I,
//! ```
//!
//! where `T_{m,k} = S_{m,k}/C(m,k)`. For phone inputs the normalized
//! tensors stay O(1) up to very large `m`, and the normalized quotient is
//! simply `q_{m,k} = tr T_{m,k} / n`. Raw traces are reported in
//! sign/log10-magnitude form with the original scale factors reapplied in
//! log space.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cmatrix::{matrix_power, CMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{normalize_phone, HermitianMatrix, PhoneMatrix};
use crate::words::{binomial, Letter, WordPattern};

/// Reality tolerance for traces that are real by theory:
/// `|Im| < REALITY_TOL · (1 + |Re|)`.
pub(crate) const REALITY_TOL: f64 = 1e-10;

/// Cumulative ln-factorial table for log10 binomials at any size.
pub(crate) struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub(crate) fn new(max_n: usize) -> Self {
        let mut table = Vec::with_capacity(max_n + 1);
        table.push(0.0);
        for i in 1..=max_n {
            table.push(table[i - 1] + (i as f64).ln());
        }
        LnFactorial { table }
    }

    pub(crate) fn log10_choose(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n && n < self.table.len());
        (self.table[n] - self.table[k] - self.table[n - k]) / std::f64::consts::LN_10
    }
}

/// Normalized DP row for fixed `m`: `tensors[k] = T_{m,k}` for
/// `k = 0..=max_k.min(m)`.
#[derive(Debug, Clone)]
pub struct NormalizedHurwitzState {
    pub m: u32,
    pub max_k: u32,
    pub tensors: Vec<CMatrix>,
}

impl NormalizedHurwitzState {
    /// `q_{m,k} = tr T_{m,k} / n`, with the reality of the trace checked.
    pub fn q(&self, k: u32) -> Result<f64> {
        let t = self
            .tensors
            .get(k as usize)
            .ok_or_else(|| Error::Domain(format!("k={k} outside row (max {})", self.max_k)))?
            .trace();
        real_part_checked(t).map(|re| re / self.tensors[0].n() as f64)
    }
}

/// Check the reality contract `|Im| < 1e-10·(1 + |Re|)` and return `Re`.
pub(crate) fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() >= REALITY_TOL * (1.0 + z.re.abs()) {
        return Err(Error::NonRealTrace { re: z.re, im: z.im });
    }
    Ok(z.re)
}

/// One normalized recurrence step from row `j−1` to row `j`.
pub(crate) fn dp_step(prev: &[CMatrix], a: &CMatrix, b: &CMatrix, j: u32, max_k: u32) -> Vec<CMatrix> {
    let n = a.n();
    let kmax = max_k.min(j);
    let jf = j as f64;
    let mut next = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut t = CMatrix::zeros(n);
        if k < j {
            // A-route: coefficient (j−k)/j; prev[k] exists since k ≤ j−1.
            t = a.matmul(&prev[k as usize]).scale((j - k) as f64 / jf);
        }
        if k >= 1 {
            t = t.add(&b.matmul(&prev[k as usize - 1]).scale(k as f64 / jf));
        }
        next.push(t);
    }
    next
}

fn dp_rows(
    a: &CMatrix,
    b: &CMatrix,
    m: u32,
    max_k: u32,
    keep_prev: bool,
) -> (Option<Vec<CMatrix>>, Vec<CMatrix>) {
    let mut row = vec![CMatrix::identity(a.n())];
    let mut prev = None;
    for j in 1..=m {
        let next = dp_step(&row, a, b, j, max_k);
        prev = if keep_prev && j == m { Some(row) } else { None };
        row = next;
    }
    (prev, row)
}

/// Compute the normalized row `T_{m,k}` for `k = 0..=max_k` of a phone
/// pair by the normalized recurrence; intermediate rows are discarded.
/// Cost `O(m·max_k·n³)`.
pub fn hurwitz_row(
    a: &PhoneMatrix,
    b: &PhoneMatrix,
    m: u32,
    max_k: u32,
) -> Result<NormalizedHurwitzState> {
    a.mat().require_same_dim(b.mat())?;
    if max_k > m {
        return Err(Error::Domain(format!(
            "hurwitz_row requires max_k <= m, got max_k={max_k}, m={m}"
        )));
    }
    let (_, tensors) = dp_rows(a.mat(), b.mat(), m, max_k, false);
    Ok(NormalizedHurwitzState { m, max_k, tensors })
}

/// Like [`hurwitz_row`] but retains the previous row as well, for
/// residual computations needing `S_{m−1,·}` alongside `S_{m,·}`.
pub fn hurwitz_two_rows(
    a: &PhoneMatrix,
    b: &PhoneMatrix,
    m: u32,
    max_k: u32,
) -> Result<(NormalizedHurwitzState, NormalizedHurwitzState)> {
    a.mat().require_same_dim(b.mat())?;
    if m == 0 {
        return Err(Error::Domain("two-row retention requires m >= 1".into()));
    }
    if max_k > m {
        return Err(Error::Domain(format!(
            "hurwitz_two_rows requires max_k <= m, got max_k={max_k}, m={m}"
        )));
    }
    let (prev, tensors) = dp_rows(a.mat(), b.mat(), m, max_k, true);
    let prev = prev.expect("previous row retained");
    Ok((
        NormalizedHurwitzState {
            m: m - 1,
            max_k: max_k.min(m - 1),
            tensors: prev,
        },
        NormalizedHurwitzState { m, max_k, tensors },
    ))
}

/// One cell of a trace table: the raw trace `tr S_{m,k}` in
/// sign/log10-magnitude form plus the normalized quotient `q_{m,k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCell {
    /// −1, 0, +1.
    pub sign: i8,
    /// `log10 |tr S_{m,k}(A, B)|` with original scales; `−inf` when zero.
    pub log10_abs: f64,
    /// `q_{m,k} = tr S_{m,k} / (n·C(m,k)·‖A‖^{m−k}‖B‖^k)`.
    pub q: f64,
}

impl TraceCell {
    pub fn zero() -> Self {
        TraceCell {
            sign: 0,
            log10_abs: f64::NEG_INFINITY,
            q: 0.0,
        }
    }

    /// Linear-space value `sign·10^{log10_abs}` (may overflow to ±inf for
    /// huge magnitudes; exact 0 when sign = 0).
    pub fn value(&self) -> f64 {
        self.sign as f64 * 10f64.powf(self.log10_abs)
    }
}

fn cell_from_trace(
    t_re: f64,
    n: usize,
    m: u32,
    k: u32,
    log10_a: f64,
    log10_b: f64,
    lf: &LnFactorial,
) -> TraceCell {
    if t_re == 0.0 {
        return TraceCell::zero();
    }
    let mut log10 = lf.log10_choose(m as usize, k as usize) + t_re.abs().log10();
    if m > k {
        log10 += (m - k) as f64 * log10_a;
    }
    if k > 0 {
        log10 += k as f64 * log10_b;
    }
    TraceCell {
        sign: if t_re > 0.0 { 1 } else { -1 },
        log10_abs: log10,
        q: t_re / n as f64,
    }
}

/// Phone-normalize a positive Hermitian matrix, mapping an (effectively)
/// zero matrix to the zero matrix with scale 0 instead of an error.
pub(crate) fn phone_or_zero(h: &HermitianMatrix, tol: &Tolerances) -> Result<(CMatrix, f64)> {
    match normalize_phone(h, tol) {
        Ok(p) => {
            let scale = p.scale();
            Ok((p.matrix().mat().clone(), scale))
        }
        Err(Error::ZeroMatrix) => Ok((CMatrix::zeros(h.n()), 0.0)),
        Err(e) => Err(e),
    }
}

/// Trace of a single Hurwitz cell for a raw positive Hermitian pair.
///
/// Inputs are phone-normalized internally; the scale factors
/// `‖A‖^{m−k}·‖B‖^k` are reapplied in log space. `k > m` yields the exact
/// zero cell (the Hurwitz product vanishes when `m − k < 0`), as does
/// `B = 0` with `k > 0`.
pub fn hurwitz_trace(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    k: u32,
    tol: &Tolerances,
) -> Result<TraceCell> {
    a.mat().require_same_dim(b.mat())?;
    if k > m {
        return Ok(TraceCell::zero());
    }
    let n = a.n();
    let (pa, a_scale) = phone_or_zero(a, tol)?;
    let (pb, b_scale) = phone_or_zero(b, tol)?;
    if (m > k && a_scale == 0.0) || (k > 0 && b_scale == 0.0) {
        return Ok(TraceCell::zero());
    }
    let (_, row) = dp_rows(&pa, &pb, m, k, false);
    let t_re = real_part_checked(row[k as usize].trace())?;
    let lf = LnFactorial::new(m as usize);
    Ok(cell_from_trace(
        t_re,
        n,
        m,
        k,
        a_scale.log10(),
        b_scale.log10(),
        &lf,
    ))
}

/// Linear-space `tr S_{m,k}(A,B)` for small `m` (binomial and scale factors
/// applied directly). Intended for objective evaluation and residuals where
/// magnitudes stay representable.
pub fn hurwitz_trace_value(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    k: u32,
    tol: &Tolerances,
) -> Result<f64> {
    let cell = hurwitz_trace(a, b, m, k, tol)?;
    Ok(cell.value())
}

/// The raw matrices `S_{m,k}`, `S_{m−1,k}`, `S_{m−1,k−1}` of a positive
/// Hermitian pair, rescaled exactly from the normalized tensors. Requires
/// `0 < k < m` and nonzero inputs.
pub struct HurwitzSTriple {
    pub s_m_k: CMatrix,
    pub s_m1_k: CMatrix,
    pub s_m1_k1: CMatrix,
}

pub fn hurwitz_s_matrices(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    k: u32,
    tol: &Tolerances,
) -> Result<HurwitzSTriple> {
    if k == 0 || k >= m {
        return Err(Error::Domain(format!(
            "hurwitz_s_matrices requires 0 < k < m, got m={m}, k={k}"
        )));
    }
    let pa = normalize_phone(a, tol)?;
    let pb = normalize_phone(b, tol)?;
    let (prev, row) = hurwitz_two_rows(&pa, &pb, m, k)?;
    let (sa, sb) = (pa.scale(), pb.scale());
    let rescale = |t: &CMatrix, mm: u32, kk: u32| -> CMatrix {
        let factor = binomial(mm as u64, kk as u64).to_f64()
            * sa.powi((mm - kk) as i32)
            * sb.powi(kk as i32);
        t.scale(factor)
    };
    Ok(HurwitzSTriple {
        s_m_k: rescale(&row.tensors[k as usize], m, k),
        s_m1_k: rescale(&prev.tensors[k as usize], m - 1, k),
        s_m1_k1: rescale(&prev.tensors[k as usize - 1], m - 1, k - 1),
    })
}

/// Which `k` cells a trace table fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// All `0 ≤ k ≤ m`.
    All,
    /// Only `k_min ≤ k ≤ k_max` (intersected with `0 ≤ k ≤ m`).
    Band { k_min: u32, k_max: u32 },
}

/// Sweep container: cells indexed by `(m, k)`, sorted iteration order.
#[derive(Debug, Clone)]
pub struct TraceTable {
    pub max_m: u32,
    pub max_k: u32,
    pub cells: BTreeMap<(u32, u32), TraceCell>,
}

/// Fill all `(m, k)` cells with `0 ≤ m ≤ max_m` under the given k-policy
/// in one DP pass. Deterministic.
pub fn trace_table(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    max_m: u32,
    policy: KPolicy,
    tol: &Tolerances,
) -> Result<TraceTable> {
    a.mat().require_same_dim(b.mat())?;
    if max_m < 1 {
        return Err(Error::Domain("trace_table requires max_m >= 1".into()));
    }
    let (k_lo, k_hi) = match policy {
        KPolicy::All => (0, max_m),
        KPolicy::Band { k_min, k_max } => {
            if k_min > k_max {
                return Err(Error::Domain(format!(
                    "empty k band: k_min={k_min} > k_max={k_max}"
                )));
            }
            (k_min, k_max.min(max_m))
        }
    };
    let n = a.n();
    let (pa, a_scale) = phone_or_zero(a, tol)?;
    let (pb, b_scale) = phone_or_zero(b, tol)?;
    let (log10_a, log10_b) = (a_scale.log10(), b_scale.log10());
    let lf = LnFactorial::new(max_m as usize);
    let dp_max_k = k_hi;

    let mut cells = BTreeMap::new();
    let mut row = vec![CMatrix::identity(n)];
    for m in 0..=max_m {
        if m > 0 {
            row = dp_step(&row, &pa, &pb, m, dp_max_k);
        }
        for k in k_lo..=k_hi.min(m) {
            let t_re = real_part_checked(row[k as usize].trace())?;
            // Zero-scale inputs produce exact-zero tensors for the affected
            // cells, so the log factors below are only touched when t ≠ 0.
            cells.insert(
                (m, k),
                cell_from_trace(t_re, n, m, k, log10_a, log10_b, &lf),
            );
        }
    }
    Ok(TraceTable {
        max_m,
        max_k: k_hi,
        cells,
    })
}

/// Brute-force oracle: iterate every word with `k` letters `B` among `m`
/// letters (lexicographic combination order), multiply left to right, sum
/// the traces. The sum is real because `S_{m,k}` is Hermitian; individual
/// word traces need not be.
pub fn hurwitz_trace_enumerate(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    k: u32,
    tol: &Tolerances,
) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    if k > m {
        return Ok(0.0);
    }
    let count = binomial(m as u64, k as u64);
    if count > crate::words::BigCount::from_u64(tol.enumeration_cap) {
        return Err(Error::CapExceeded {
            words: count.to_decimal(),
            cap: tol.enumeration_cap,
        });
    }
    let n = a.n();
    let k = k as usize;
    let m = m as usize;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    loop {
        // product over positions, letters B at the subset indices
        let mut acc = CMatrix::identity(n);
        let mut next_b = 0usize;
        for pos in 0..m {
            let is_b = next_b < k && subset[next_b] == pos;
            if is_b {
                next_b += 1;
                acc = acc.matmul(b.mat());
            } else {
                acc = acc.matmul(a.mat());
            }
        }
        sum += acc.trace();

        // lexicographic successor of the k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return real_part_checked_sum(sum);
            }
            i -= 1;
            if subset[i] < m - k + i {
                break;
            }
        }
        subset[i] += 1;
        for j in (i + 1)..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// The enumeration sum is real up to rounding; no hard error here since the
/// oracle is compared against the engine at test tolerances anyway.
fn real_part_checked_sum(z: Complex64) -> Result<f64> {
    Ok(z.re)
}

/// Trace of a single word product `w(A, B)`.
///
/// Returns the real part and errors when the imaginary part exceeds
/// `1e-10·(1 + |Re|)`. Caveat: single-word traces of a Hermitian pair are
/// guaranteed real only when the reversed word is a cyclic rotation of `w`
/// (then `tr W* = tr W`); for other words the check may reject honestly
/// complex traces.
pub fn word_trace(w: &WordPattern, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.mat().require_same_dim(b.mat())?;
    let mut acc = CMatrix::identity(a.n());
    for &(letter, len) in w.runs() {
        let base = match letter {
            Letter::A => a.mat(),
            Letter::B => b.mat(),
        };
        acc = acc.matmul(&matrix_power(base, len as u64));
    }
    real_part_checked(acc.trace())
}
