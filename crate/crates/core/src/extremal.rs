//! Extremality diagnostics for `tr S_{m,k}` on the unit Schatten-p sphere:
//! the stationarity residuals that must vanish at interior extrema, a
//! derivative-free hill-climbing search to locate candidate extremal
//! pairs, the telescoping product decomposition, and Euler series
//! coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cmatrix::CMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_s_matrices, hurwitz_trace_value, real_part_checked};
use crate::linalg::{eig_hermitian, schatten_norm, HermitianMatrix};
use crate::sampling::sample_gaussian;
use crate::words::{binomial, BigCount};

/// How far a pair is from satisfying the first-order extremality
/// conditions of `tr S_{m,k}` on the unit p-norm sphere. All entries are
/// Frobenius norms, hence nonnegative; at an interior extremum all vanish.
#[derive(Debug, Clone, Copy)]
pub struct ELResidual {
    /// `‖[S_{m−1,k}(A,B), A]‖_F`.
    pub commutator: f64,
    /// `‖S_{m−1,k}·A·tr(A^p) − A^p·tr(S_{m−1,k}·A)‖_F`.
    pub pnorm_a: f64,
    /// `‖S_{m−1,k−1}·B·tr(B^p) − B^p·tr(S_{m−1,k−1}·B)‖_F`.
    pub pnorm_b: f64,
    /// `‖S_{m,k} − ((m−k)·A^p + k·B^p)/m · tr S_{m,k}‖_F`.
    pub combined: f64,
}

/// `H^p` for positive Hermitian `H` through its eigendecomposition,
/// clamping rounding-level negative eigenvalues to zero. Callers validate
/// PSD beforehand (the p-norm check does).
fn hermitian_power_p(h: &HermitianMatrix, p: f64) -> Result<CMatrix> {
    let dec = eig_hermitian(h)?;
    let n = h.n();
    let u = &dec.eigenvectors;
    let powered: Vec<f64> = dec.eigenvalues.iter().map(|&lam| lam.max(0.0).powf(p)).collect();
    Ok(CMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|s| u.get(i, s) * powered[s] * u.get(j, s).conj())
            .sum()
    }))
}

/// Evaluate the four stationarity residuals at a positive Hermitian pair
/// with unit p-norms. Requires `0 < k < m` and `1 ≤ p < ∞`; `p = ∞` is
/// refused (the extremality condition is unresolved for degenerate top
/// singular values), as are inputs off the unit sphere by more than 1e-9.
pub fn el_residuals(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    k: u32,
    p: f64,
    tol: &Tolerances,
) -> Result<ELResidual> {
    a.mat().require_same_dim(b.mat())?;
    if k == 0 || k >= m {
        return Err(Error::Domain(format!(
            "el_residuals requires 0 < k < m, got m={m}, k={k}"
        )));
    }
    if p.is_infinite() {
        return Err(Error::Domain(
            "p = inf extremality is not characterized; use a finite p".into(),
        ));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("p must satisfy 1 <= p < inf, got {p}")));
    }
    for (name, h) in [("A", a), ("B", b)] {
        let norm = schatten_norm(h, p, tol)?;
        if (norm - 1.0).abs() >= 1e-9 {
            return Err(Error::Domain(format!(
                "{name} must have unit {p}-norm, got {norm}"
            )));
        }
    }

    let s = hurwitz_s_matrices(a, b, m, k, tol)?;
    let ap = hermitian_power_p(a, p)?;
    let bp = hermitian_power_p(b, p)?;

    let commutator = s
        .s_m1_k
        .matmul(a.mat())
        .sub(&a.mat().matmul(&s.s_m1_k))
        .frobenius();

    let sa = s.s_m1_k.matmul(a.mat());
    let tr_ap = real_part_checked(ap.trace())?;
    let tr_sa = real_part_checked(sa.trace())?;
    let pnorm_a = sa.scale(tr_ap).sub(&ap.scale(tr_sa)).frobenius();

    let sb = s.s_m1_k1.matmul(b.mat());
    let tr_bp = real_part_checked(bp.trace())?;
    let tr_sb = real_part_checked(sb.trace())?;
    let pnorm_b = sb.scale(tr_bp).sub(&bp.scale(tr_sb)).frobenius();

    let tr_s = real_part_checked(s.s_m_k.trace())?;
    let mix = ap
        .scale((m - k) as f64 / m as f64)
        .add(&bp.scale(k as f64 / m as f64));
    let combined = s.s_m_k.sub(&mix.scale(tr_s)).frobenius();

    Ok(ELResidual {
        commutator,
        pnorm_a,
        pnorm_b,
        combined,
    })
}

/// Search direction for [`extremal_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Minimize,
    Maximize,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "minimize" => Ok(Mode::Minimize),
            "maximize" => Ok(Mode::Maximize),
            other => Err(Error::Parse(format!(
                "unknown mode {other:?} (expected minimize or maximize)"
            ))),
        }
    }
}

/// Hill-climbing parameters. `shrink` multiplies the step size after 20
/// consecutive rejections.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub p: f64,
    pub steps: u32,
    pub step_size: f64,
    pub shrink: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::Domain("search needs steps >= 1".into()));
        }
        if self.p.is_nan() || self.p < 1.0 || self.p.is_infinite() {
            return Err(Error::Domain(format!(
                "search requires 1 <= p < inf, got {}",
                self.p
            )));
        }
        if self.step_size.is_nan() || self.step_size <= 0.0 {
            return Err(Error::Domain("step_size must be positive".into()));
        }
        if self.shrink.is_nan() || self.shrink <= 0.0 || self.shrink >= 1.0 {
            return Err(Error::Domain("shrink must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// One accepted point along a search.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub step: u32,
    pub objective: f64,
    pub combined: f64,
}

/// Final state of a search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub objective: f64,
    pub residuals: ELResidual,
    /// Start point plus every accepted step.
    pub trajectory: Vec<TrajectoryPoint>,
    pub steps_accepted: u32,
    pub final_step_size: f64,
}

const REJECTIONS_BEFORE_SHRINK: u32 = 20;

fn unit_p_pair(c: &CMatrix, p: f64, tol: &Tolerances) -> Result<HermitianMatrix> {
    let h = HermitianMatrix::new(c.adjoint().matmul(c), tol)?;
    let norm = schatten_norm(&h, p, tol)?;
    if norm < tol.zero_tol {
        return Err(Error::ZeroMatrix);
    }
    HermitianMatrix::new(h.mat().scale(1.0 / norm), tol)
}

/// Derivative-free hill climb over unit-p-norm positive pairs
/// `A = N_p(C_A†C_A)`, `B = N_p(C_B†C_B)`: Gaussian perturbations of both
/// pre-matrices, strict-improvement acceptance, step shrink after 20
/// consecutive rejections. Deterministic per seed.
pub fn extremal_search(
    n: usize,
    m: u32,
    k: u32,
    config: &SearchConfig,
    tol: &Tolerances,
) -> Result<SearchResult> {
    config.validate()?;
    if n == 0 {
        return Err(Error::Domain("search dimension must be >= 1".into()));
    }
    if k == 0 || k >= m {
        return Err(Error::Domain(format!(
            "extremal_search requires 0 < k < m, got m={m}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut c_a = sample_gaussian(n, &mut rng);
    let mut c_b = sample_gaussian(n, &mut rng);
    let mut a = unit_p_pair(&c_a, config.p, tol)?;
    let mut b = unit_p_pair(&c_b, config.p, tol)?;
    let mut objective = hurwitz_trace_value(&a, &b, m, k, tol)?;

    let combined0 = el_residuals(&a, &b, m, k, config.p, tol)?.combined;
    let mut trajectory = vec![TrajectoryPoint {
        step: 0,
        objective,
        combined: combined0,
    }];
    let mut step_size = config.step_size;
    let mut rejections = 0u32;
    let mut steps_accepted = 0u32;

    for step in 1..=config.steps {
        let g_a = sample_gaussian(n, &mut rng);
        let g_b = sample_gaussian(n, &mut rng);
        let cand_a = c_a.add(&g_a.scale(step_size));
        let cand_b = c_b.add(&g_b.scale(step_size));
        let ta = unit_p_pair(&cand_a, config.p, tol)?;
        let tb = unit_p_pair(&cand_b, config.p, tol)?;
        let value = hurwitz_trace_value(&ta, &tb, m, k, tol)?;
        let improved = match config.mode {
            Mode::Maximize => value > objective,
            Mode::Minimize => value < objective,
        };
        if improved {
            c_a = cand_a;
            c_b = cand_b;
            a = ta;
            b = tb;
            objective = value;
            steps_accepted += 1;
            rejections = 0;
            let combined = el_residuals(&a, &b, m, k, config.p, tol)?.combined;
            trajectory.push(TrajectoryPoint {
                step,
                objective,
                combined,
            });
        } else {
            rejections += 1;
            if rejections == REJECTIONS_BEFORE_SHRINK {
                step_size *= config.shrink;
                rejections = 0;
            }
        }
    }

    let residuals = el_residuals(&a, &b, m, k, config.p, tol)?;
    Ok(SearchResult {
        a,
        b,
        objective,
        residuals,
        trajectory,
        steps_accepted,
        final_step_size: step_size,
    })
}

/// Frobenius residual of the telescoping decomposition
/// `ΠXᵢ − X^k = Σᵢ X^{i−1}·(Xᵢ − X)·X_{i+1}⋯X_k`. Zero in exact
/// arithmetic for any square matrices of one size.
pub fn telescope_check(x_list: &[CMatrix], x: &CMatrix) -> Result<f64> {
    for xi in x_list {
        xi.require_same_dim(x)?;
    }
    let n = x.n();
    let k = x_list.len();

    let mut prod = CMatrix::identity(n);
    for xi in x_list {
        prod = prod.matmul(xi);
    }
    // successive powers share the association order of the product above,
    // so identical inputs cancel exactly
    let mut x_pows = Vec::with_capacity(k + 1);
    x_pows.push(CMatrix::identity(n));
    for i in 1..=k {
        x_pows.push(x_pows[i - 1].matmul(x));
    }
    // suffix[i] = X_{i+1}⋯X_k (0-based: suffix of everything after index i)
    let mut suffix = vec![CMatrix::identity(n); k + 1];
    for i in (0..k).rev() {
        suffix[i] = x_list[i].matmul(&suffix[i + 1]);
    }

    let mut sum = CMatrix::zeros(n);
    for i in 0..k {
        let diff = x_list[i].sub(x);
        sum = sum.add(&x_pows[i].matmul(&diff).matmul(&suffix[i + 1]));
    }
    Ok(prod.sub(&x_pows[k]).sub(&sum).frobenius())
}

/// Taylor coefficient of `1/(1−τ)^{k+1}`: `C(k+m, m)`.
pub fn euler_series_coeff(k: u64, m: u64) -> BigCount {
    binomial(k + m, m)
}
