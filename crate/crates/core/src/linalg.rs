//! Dense complex Hermitian spectral tools: cyclic Jacobi eigendecomposition,
//! operator and Schatten norms, phone normalization (largest eigenvalue
//! scaled to 1), the power-limit projector `P_A = lim A^i`, and the block
//! splitting behind the pair-reduction arguments.

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
pub use crate::cmatrix::matrix_power;
use crate::config::Tolerances;
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_THRESHOLD: f64 = 1e-13;

/// Dense Hermitian matrix. Construction validates symmetry within
/// `herm_tol` and stores the exactly symmetrized `(M + M*)/2` with a
/// real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

impl HermitianMatrix {
    /// Validate and symmetrize. Errors when entries are non-finite or the
    /// asymmetry exceeds `tol.herm_tol`.
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        let asym = m.max_asym();
        if asym > tol.herm_tol {
            return Err(Error::NotHermitian(asym));
        }
        Ok(HermitianMatrix { mat: m.symmetrize() })
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            mat: CMatrix::identity(n),
        }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        HermitianMatrix {
            mat: CMatrix::diag(values),
        }
    }

    pub fn n(&self) -> usize {
        self.mat.n()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }
}

/// Positive Hermitian matrix with largest eigenvalue 1, together with the
/// scale factor divided out during normalization.
#[derive(Debug, Clone)]
pub struct PhoneMatrix {
    matrix: HermitianMatrix,
    scale: f64,
}

impl PhoneMatrix {
    /// Validate the phone invariants (PSD within `psd_tol`, largest
    /// eigenvalue 1 within `eig_tol`) and wrap.
    pub fn new(matrix: HermitianMatrix, scale: f64, tol: &Tolerances) -> Result<Self> {
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::Domain(format!("phone scale must be > 0, got {scale}")));
        }
        let dec = eig_hermitian(&matrix)?;
        let lam_max = dec.eigenvalues[0];
        let lam_min = *dec.eigenvalues.last().expect("nonempty spectrum");
        if lam_min < -tol.psd_tol {
            return Err(Error::NotPsd(lam_min));
        }
        if (lam_max - 1.0).abs() > tol.eig_tol {
            return Err(Error::Domain(format!(
                "largest eigenvalue {lam_max} is not 1 within eig_tol"
            )));
        }
        Ok(PhoneMatrix { matrix, scale })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn mat(&self) -> &CMatrix {
        self.matrix.mat()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues sorted descending,
/// eigenvector columns forming a unitary matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.n();
        let u = &self.eigenvectors;
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|s| u.get(i, s) * self.eigenvalues[s] * u.get(j, s).conj())
                .sum()
        })
    }

    /// Max entry of `U*U − I`.
    pub fn unitary_defect(&self) -> f64 {
        let u = &self.eigenvectors;
        u.adjoint()
            .matmul(u)
            .sub(&CMatrix::identity(u.n()))
            .max_abs()
    }
}

/// Orthogonal projector together with its rank.
#[derive(Debug, Clone)]
pub struct Projector {
    pub matrix: HermitianMatrix,
    pub rank: usize,
}

/// Result of splitting a phone pair on `‖P_A B‖ ≈ 0`: in the returned basis
/// `A = I_{n−l} ⊕ α·A'` and `B = 0_{n−l} ⊕ β·B'` with `A'`, `B'` phone,
/// `0 ≤ α < 1`, and `β ≈ 1` carried for numerically exact recomposition.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    /// Unitary change of basis (eigenvectors of `A`, eigenvalue-1 columns
    /// first), so callers can transform auxiliary matrices consistently.
    pub basis: CMatrix,
    /// `(n − l, l)`: size of the identity/zero block, size of the tail.
    pub sizes: (usize, usize),
    /// Norm of the `A` tail block (second-largest eigenvalue cluster), `< 1`.
    pub alpha: f64,
    /// Norm of the `B` tail block (exactly 1 in exact arithmetic).
    pub beta: f64,
    /// Renormalized tail of `A` (`l`-phone; identity when `alpha = 0`).
    pub a_prime: PhoneMatrix,
    /// Renormalized tail of `B` (`l`-phone).
    pub b_prime: PhoneMatrix,
}

/// Outcome of [`split_phone_pair`].
#[derive(Debug, Clone)]
pub enum SplitOutcome {
    Split(BlockSplit),
    /// `‖P_A B‖` exceeds `split_tol`; carries `tr(P_A B) > 0`.
    NoSplit { trace_pab: f64 },
}

/// Cyclic Jacobi eigendecomposition for Hermitian matrices.
///
/// Deterministic: fixed row-major pivot order, off-diagonal Frobenius
/// threshold `1e-13·‖H‖_F`, at most 100 sweeps. Each pivot absorbs the
/// phase of the off-diagonal entry into the rotation, reducing the 2×2
/// subproblem to the real symmetric case.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.n();
    let mut a = h.mat().clone();
    let mut v = CMatrix::identity(n);
    let threshold = JACOBI_REL_THRESHOLD * h.mat().frobenius();

    let mut converged = false;
    let mut last_off = 0.0;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let phase = apq / b;
                let w = phase.conj();
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // The plane rotation J (identity elsewhere):
                //   J[p][p] = c        J[p][q] = s
                //   J[q][p] = -s·w     J[q][q] = c·w      (w = conj(phase))
                // Apply A ← J* A J: columns first, then rows.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * (w * s));
                    a.set(i, q, aip * s + aiq * (w * c));
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * (phase * s));
                    a.set(q, j, apj * s + aqj * (phase * c));
                }
                // The pivot entry is zero by construction; pin it and keep
                // the diagonal exactly real to stop drift.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * (w * s));
                    v.set(i, q, vip * s + viq * (w * c));
                }
            }
        }
        let mut off2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off2 += a.get(i, j).norm_sqr();
                }
            }
        }
        last_off = off2.sqrt();
        if last_off <= threshold {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off: last_off,
            threshold,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Operator norm (largest singular value), computed as
/// `sqrt(λ_top(M* M))`. For positive Hermitian input this coincides with
/// the largest eigenvalue.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    // M*M is exactly Hermitian by termwise-conjugate accumulation.
    let g = m.adjoint().matmul(m);
    let g = HermitianMatrix::new(g, &Tolerances::default())?;
    let dec = eig_hermitian(&g)?;
    Ok(dec.eigenvalues[0].max(0.0).sqrt())
}

/// Schatten p-norm `(tr H^p)^{1/p}` of a positive Hermitian matrix.
/// Eigenvalues in `[−psd_tol, 0)` are clamped to zero; more negative values
/// are an error. `p = ∞` dispatches to [`operator_norm`]; `p < 1` is a
/// domain error.
pub fn schatten_norm(h: &HermitianMatrix, p: f64, tol: &Tolerances) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("schatten norm requires p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return operator_norm(h.mat());
    }
    let dec = eig_hermitian(h)?;
    let lam_max = dec.eigenvalues[0].max(0.0);
    let floor = -tol.psd_tol * lam_max.max(1.0);
    let mut sum = 0.0;
    for &lam in &dec.eigenvalues {
        if lam < floor {
            return Err(Error::NotPsd(lam));
        }
        let lam = lam.max(0.0);
        sum += lam.powf(p);
    }
    Ok(sum.powf(1.0 / p))
}

/// Scale a nonzero positive Hermitian matrix so its largest eigenvalue is 1.
/// Returns the phone matrix together with the factor divided out.
pub fn normalize_phone(h: &HermitianMatrix, tol: &Tolerances) -> Result<PhoneMatrix> {
    let dec = eig_hermitian(h)?;
    let lam_max = dec.eigenvalues[0];
    let lam_min = *dec.eigenvalues.last().expect("nonempty spectrum");
    if lam_min < -tol.psd_tol * lam_max.max(1.0) {
        return Err(Error::NotPsd(lam_min));
    }
    if lam_max < tol.zero_tol {
        return Err(Error::ZeroMatrix);
    }
    let scaled = HermitianMatrix::new(h.mat().scale(1.0 / lam_max), tol)?;
    PhoneMatrix::new(scaled, lam_max, tol)
}

/// Power-limit projector `P_A = lim A^i`: the orthogonal projector onto the
/// eigenvalue-1 eigenspace of a phone matrix. Sums all eigenprojectors with
/// `|λ − 1| ≤ one_tol`, so degenerate top eigenvalues are captured whole.
pub fn power_projector(a: &PhoneMatrix, tol: &Tolerances) -> Result<Projector> {
    let dec = eig_hermitian(a.matrix())?;
    let n = a.n();
    let selected: Vec<usize> = (0..n)
        .filter(|&i| (dec.eigenvalues[i] - 1.0).abs() <= tol.one_tol)
        .collect();
    debug_assert!(!selected.is_empty(), "phone matrix must have eigenvalue 1");
    let u = &dec.eigenvectors;
    let p = CMatrix::from_fn(n, |i, j| {
        selected
            .iter()
            .map(|&s| u.get(i, s) * u.get(j, s).conj())
            .sum()
    });
    Ok(Projector {
        rank: selected.len(),
        matrix: HermitianMatrix::new(p, tol)?,
    })
}

/// Split a phone pair on the condition `‖P_A B‖ ≤ split_tol` into
/// `A = I_{n−l} ⊕ α·A'`, `B = 0_{n−l} ⊕ β·B'` in the eigenbasis of `A`
/// (eigenvalue-1 columns first). Returns `NoSplit` with `tr(P_A B)` when
/// the condition fails.
pub fn split_phone_pair(a: &PhoneMatrix, b: &PhoneMatrix, tol: &Tolerances) -> Result<SplitOutcome> {
    a.mat().require_same_dim(b.mat())?;
    let n = a.n();
    let proj = power_projector(a, tol)?;
    let pb = proj.matrix.mat().matmul(b.mat());
    let norm_pb = operator_norm(&pb)?;
    if norm_pb > tol.split_tol {
        let trace_pab = pb.trace().re;
        return Ok(SplitOutcome::NoSplit { trace_pab });
    }

    let dec = eig_hermitian(a.matrix())?;
    let r = proj.rank; // identity block size n − l
    let l = n - r;
    let u = dec.eigenvectors.clone();
    let at = a.mat().conjugate_by(&u);
    let bt = b.mat().conjugate_by(&u);

    // Residuals against the declared block structure.
    let mut res_a: f64 = 0.0;
    let mut res_b: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let in_top = i < r && j < r;
            let in_tail = i >= r && j >= r;
            if in_top {
                let target = if i == j { 1.0 } else { 0.0 };
                res_a = res_a.max((at.get(i, j) - target).norm());
                res_b = res_b.max(bt.get(i, j).norm());
            } else if !in_tail {
                res_a = res_a.max(at.get(i, j).norm());
                res_b = res_b.max(bt.get(i, j).norm());
            }
        }
    }
    let allowed = 10.0 * tol.split_tol;
    if res_a > allowed || res_b > allowed {
        return Err(Error::SplitInconsistent {
            res_a,
            res_b,
            allowed,
        });
    }

    let a_tail = HermitianMatrix::new(at.block(r, n).symmetrize(), tol)?;
    let b_tail = HermitianMatrix::new(bt.block(r, n).symmetrize(), tol)?;

    let (alpha, a_prime) = {
        let top = eig_hermitian(&a_tail)?.eigenvalues[0];
        if top < tol.zero_tol {
            // A is a projector: the tail vanishes and any l-phone works.
            (0.0, PhoneMatrix::new(HermitianMatrix::identity(l), 1.0, tol)?)
        } else {
            let phone = normalize_phone(&a_tail, tol)?;
            let alpha = phone.scale();
            if alpha >= 1.0 {
                return Err(Error::Numerical(format!(
                    "split tail norm alpha = {alpha} is not < 1"
                )));
            }
            (alpha, phone)
        }
    };
    let b_phone = normalize_phone(&b_tail, tol)?;
    let beta = b_phone.scale();

    Ok(SplitOutcome::Split(BlockSplit {
        basis: u,
        sizes: (r, l),
        alpha,
        beta,
        a_prime,
        b_prime: b_phone,
    }))
}

/// Dimension of the intersection of the eigenvalue-1 eigenspaces of a list
/// of phone matrices: the count of eigenvalues of
/// `P_1 ⋯ P_{N−1} P_N P_{N−1} ⋯ P_1` within `one_tol` of 1.
pub fn dim_shared_top_multi(mats: &[&PhoneMatrix], tol: &Tolerances) -> Result<usize> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Domain("need at least one matrix".into()))?;
    let n = first.n();
    for m in mats {
        if m.n() != n {
            return Err(Error::PatternMismatch(format!(
                "dimension mismatch: {} vs {}",
                m.n(),
                n
            )));
        }
    }
    // C = P_N ⋯ P_1; the palindrome product is C*C (P_N idempotent), so it
    // is Hermitian PSD and its unit eigenspace is the intersection.
    let mut c = CMatrix::identity(n);
    for m in mats {
        let p = power_projector(m, tol)?;
        c = p.matrix.mat().matmul(&c);
    }
    let g = HermitianMatrix::new(c.adjoint().matmul(&c), tol)?;
    let dec = eig_hermitian(&g)?;
    Ok(dec
        .eigenvalues
        .iter()
        .filter(|&&lam| (lam - 1.0).abs() <= tol.one_tol)
        .count())
}

/// Two-factor case of [`dim_shared_top_multi`]: `dim(esp_1(A) ∩ esp_1(B))`
/// via the spectrum of `P_A P_B P_A`.
pub fn dim_shared_top_eigenspace(a: &PhoneMatrix, b: &PhoneMatrix, tol: &Tolerances) -> Result<usize> {
    dim_shared_top_multi(&[a, b], tol)
}
