//! Dense square complex matrix with the handful of operations the
//! laboratory needs. Row-major `Vec<Complex64>` storage; all matrices in
//! this domain are square.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense n×n complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a function of (row, col).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Raw slice access (row-major), for I/O.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Matrix product `self · other` (naive i-k-j loop).
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry, `max |M[i][j] − conj(M[j][i])|`.
    pub fn max_asym(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = self.data[i * n + j] - self.data[j * n + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Hermitian part `(M + M*)/2` with exactly real diagonal.
    pub fn symmetrize(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(self.data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let v = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                out.data[i * n + j] = v;
                out.data[j * n + i] = v.conj();
            }
        }
        out
    }

    /// Congruence `U* · self · U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> CMatrix {
        u.adjoint().matmul(&self.matmul(u))
    }

    /// Contiguous principal block `self[lo..hi, lo..hi]`.
    pub fn block(&self, lo: usize, hi: usize) -> CMatrix {
        debug_assert!(lo <= hi && hi <= self.n);
        CMatrix::from_fn(hi - lo, |i, j| self.get(lo + i, lo + j))
    }

    /// Block-diagonal direct sum `self ⊕ other` (off blocks exactly zero).
    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let n = self.n + other.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.set(self.n + i, self.n + j, other.get(i, j));
            }
        }
        out
    }

    /// Require matching dimension, else a pattern mismatch error.
    pub fn require_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::PatternMismatch(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Binary exponentiation; `M^0 = I`.
pub fn matrix_power(m: &CMatrix, i: u64) -> CMatrix {
    let mut result = CMatrix::identity(m.n());
    if i == 0 {
        return result;
    }
    let mut base = m.clone();
    let mut e = i;
    loop {
        if e & 1 == 1 {
            result = result.matmul(&base);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.matmul(&base);
    }
    result
}
