//! Deterministic random fixtures: phone matrices of several spectral
//! shapes, Haar-ish unitaries, and exactly-orthogonal pairs.
//!
//! Every public sampler is seeded and bit-reproducible: the same
//! `(n, seed, kind)` always yields the same matrix on every platform
//! (ChaCha8 stream, fixed consumption order).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cmatrix::CMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{normalize_phone, HermitianMatrix, PhoneMatrix};

/// Spectral shape of a sampled phone matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// `C†C` for complex Gaussian `C`, normalized to unit norm. Generic
    /// full-rank spectrum, possibly small gaps.
    Wishart,
    /// Random unitary conjugation of `diag(1, u₂, …, uₙ)` with
    /// `uᵢ ~ U(0.05, 0.9)`: guaranteed spectral gap ≥ 0.1.
    DiagGap,
    /// Block matrix `(γ·W) ⊕ (1)` with `W` an `(n−1)`-dimensional Wishart
    /// phone and `γ ~ U(0.3, 0.9)`: top eigenvalue 1 with eigenvector
    /// exactly `eₙ`, so two samples of this kind share a top eigenvector.
    SharedTop,
}

impl SampleKind {
    pub fn parse(s: &str) -> Result<SampleKind> {
        match s {
            "wishart" => Ok(SampleKind::Wishart),
            "diag-gap" => Ok(SampleKind::DiagGap),
            "shared-top" => Ok(SampleKind::SharedTop),
            other => Err(Error::Parse(format!(
                "unknown sample kind {other:?} (expected wishart, diag-gap or shared-top)"
            ))),
        }
    }
}

impl std::fmt::Display for SampleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SampleKind::Wishart => "wishart",
            SampleKind::DiagGap => "diag-gap",
            SampleKind::SharedTop => "shared-top",
        };
        f.write_str(s)
    }
}

/// `n×n` matrix with independent standard complex Gaussian entries
/// (real and imaginary parts `N(0, 1/2)` each, so `E|z|² = 1`).
pub fn sample_gaussian<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    let scale = 0.5f64.sqrt();
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m.set(i, j, Complex64::new(re * scale, im * scale));
        }
    }
    m
}

/// Random unitary via twice-iterated modified Gram–Schmidt on a complex
/// Gaussian matrix (re-orthogonalization keeps the defect near machine
/// precision even for clustered columns).
pub fn sample_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = sample_gaussian(n, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            let (done, rest) = cols.split_at_mut(j);
            let col_j = &mut rest[0];
            for col_i in done.iter() {
                let r: Complex64 = col_i
                    .iter()
                    .zip(col_j.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                for (x, y) in col_i.iter().zip(col_j.iter_mut()) {
                    *y -= r * x;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Gaussian columns are independent a.s.; a degenerate draw would be
        // a stream bug, so fail loudly rather than resample silently.
        assert!(norm > 1e-8, "degenerate Gaussian draw in sample_unitary");
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    CMatrix::from_fn(n, |i, j| cols[j][i])
}

fn wishart_raw<R: Rng>(n: usize, rng: &mut R, tol: &Tolerances) -> Result<HermitianMatrix> {
    let c = sample_gaussian(n, rng);
    HermitianMatrix::new(c.adjoint().matmul(&c), tol)
}

/// Draw one phone matrix of the given spectral shape.
pub fn sample_phone(n: usize, seed: u64, kind: SampleKind, tol: &Tolerances) -> Result<PhoneMatrix> {
    if n == 0 {
        return Err(Error::Domain("sample dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = match kind {
        SampleKind::Wishart => wishart_raw(n, &mut rng, tol)?,
        SampleKind::DiagGap => {
            let mut eigs = vec![1.0];
            for _ in 1..n {
                eigs.push(rng.gen_range(0.05..0.9));
            }
            let d = CMatrix::diag(&eigs);
            let u = sample_unitary(n, &mut rng);
            // U·D·U† = conjugation of D by U†
            HermitianMatrix::new(d.conjugate_by(&u.adjoint()), tol)?
        }
        SampleKind::SharedTop => {
            if n == 1 {
                HermitianMatrix::identity(1)
            } else {
                let gamma = rng.gen_range(0.3..0.9);
                let w = wishart_raw(n - 1, &mut rng, tol)?;
                let w_phone = normalize_phone(&w, tol)?;
                let head = w_phone.matrix().mat().scale(gamma);
                let tail = CMatrix::diag(&[1.0]);
                HermitianMatrix::new(head.direct_sum(&tail), tol)?
            }
        }
    };
    normalize_phone(&h, tol)
}

/// Pair of positive Hermitian matrices with `A·B = 0` exactly in floating
/// point: `A` supported on the first `r` coordinates, `B` on the rest.
/// Requires `1 ≤ r < n`.
pub fn sample_ab_zero_pair(
    n: usize,
    r: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if r == 0 || r >= n {
        return Err(Error::Domain(format!(
            "orthogonal pair needs 1 <= r < n, got r={r}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wa = wishart_raw(r, &mut rng, tol)?;
    let wb = wishart_raw(n - r, &mut rng, tol)?;
    let a = HermitianMatrix::new(wa.mat().direct_sum(&CMatrix::zeros(n - r)), tol)?;
    let b = HermitianMatrix::new(CMatrix::zeros(r).direct_sum(wb.mat()), tol)?;
    Ok((a, b))
}
