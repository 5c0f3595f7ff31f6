//! Owned dense complex matrices in row-major order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Errors from the linear-algebra layer.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand shapes are incompatible.
    DimMismatch { expected: (usize, usize), got: (usize, usize) },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Hermiticity precondition violated; carries the relative defect.
    NotHermitian { defect: f64 },
    /// A matrix entry is NaN or infinite.
    NonFinite,
    /// Linear solve hit a (numerically) singular pivot.
    Singular,
    /// Anything else; the message names the offending input.
    Invalid(String),
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {}x{}, got {}x{}", expected.0, expected.1, got.0, got.1)
            }
            LinalgError::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, square required"),
            LinalgError::NotHermitian { defect } => {
                write!(f, "matrix is not Hermitian (relative defect {defect:.3e})")
            }
            LinalgError::NonFinite => write!(f, "matrix contains non-finite entries"),
            LinalgError::Singular => write!(f, "singular linear system"),
            LinalgError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(8) {
                let z = self[(r, c)];
                write!(f, "{:+.3}{:+.3}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "…" } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  …")?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from row-major data. Rejects non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Invalid(format!(
                "row-major data has {} entries, expected {}",
                data.len(),
                rows * cols
            )));
        }
        let m = CMatrix { rows, cols, data };
        if !m.all_finite() {
            return Err(LinalgError::NonFinite);
        }
        Ok(m)
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(LinalgError::DimMismatch {
                expected: (self.rows, self.cols),
                got: (other.rows, other.cols),
            })
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Hilbert–Schmidt inner product `tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// 1-norm (max column sum), used for the exponential scaling estimate.
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0_f64;
        for c in 0..self.cols {
            let s: f64 = (0..self.rows).map(|r| self[(r, c)].norm()).sum();
            best = best.max(s);
        }
        best
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        // k-outer loop keeps the inner accumulation contiguous in `other`.
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow.iter()) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LinalgError> {
        self.require_square()?;
        other.require_square()?;
        self.same_shape(other)?;
        Ok(&self.matmul(other) - &other.matmul(self))
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, LinalgError> {
        self.require_square()?;
        self.same_shape(other)?;
        Ok(&self.matmul(other) + &other.matmul(self))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        (&(self + &self.dagger())).scale_re(0.5)
    }

    /// `‖A − A†‖ / max(‖A‖, 1)`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = (self - &self.dagger()).hs_norm();
        d / self.hs_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() < tol
    }

    /// Solve `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self, LinalgError> {
        let n = self.require_square()?;
        if rhs.rows != n {
            return Err(LinalgError::DimMismatch { expected: (n, rhs.cols), got: (rhs.rows, rhs.cols) });
        }
        let mut lu = self.clone();
        let mut x = rhs.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut pivot_row, mut pivot_mag) = (k, lu[(k, k)].norm());
            for r in k + 1..n {
                let m = lu[(r, k)].norm();
                if m > pivot_mag {
                    pivot_row = r;
                    pivot_mag = m;
                }
            }
            if pivot_mag < 1e-300 {
                return Err(LinalgError::Singular);
            }
            if pivot_row != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, pivot_row * n + c);
                }
                for c in 0..x.cols {
                    x.data.swap(k * x.cols + c, pivot_row * x.cols + c);
                }
                perm.swap(k, pivot_row);
            }
            let piv = lu[(k, k)];
            for r in k + 1..n {
                let f = lu[(r, k)] / piv;
                lu[(r, k)] = f;
                for c in k + 1..n {
                    let v = lu[(k, c)];
                    lu[(r, c)] -= f * v;
                }
                for c in 0..x.cols {
                    let v = x[(k, c)];
                    x[(r, c)] -= f * v;
                }
            }
        }
        // back substitution
        for c in 0..x.cols {
            for r in (0..n).rev() {
                let mut s = x[(r, c)];
                for k in r + 1..n {
                    s -= lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s / lu[(r, r)];
            }
        }
        Ok(x)
    }

    /// Determinant via the same LU factorization. Test oracles use this.
    pub fn det(&self) -> Result<C64, LinalgError> {
        let n = self.require_square()?;
        let mut lu = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let (mut pr, mut pm) = (k, lu[(k, k)].norm());
            for r in k + 1..n {
                let m = lu[(r, k)].norm();
                if m > pm {
                    pr = r;
                    pm = m;
                }
            }
            if pm == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            if pr != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, pr * n + c);
                }
                det = -det;
            }
            let piv = lu[(k, k)];
            det *= piv;
            for r in k + 1..n {
                let f = lu[(r, k)] / piv;
                for c in k + 1..n {
                    let v = lu[(k, c)];
                    lu[(r, c)] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Compress to the subspace selected by a 0/1 diagonal projector:
    /// keeps the rows/columns `i` with `w[(i,i)] ≈ 1`.
    pub fn compress(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), keep.len(), |r, c| self[(keep[r], keep[c])])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, other: &CMatrix) -> CMatrix {
        self.matmul(other)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}
