//! Hilbert–Schmidt orthonormal bases of matrix subspaces.
//!
//! Membership of an operator in the span of an algebra is decided by
//! projecting onto such a basis and measuring the relative residual.

use alloc::vec::Vec;

use super::cmatrix::{CMatrix, LinalgError, C64};
use super::eig::eig_hermitian;

/// Guard against dividing by the norm of the zero matrix.
const ZERO_GUARD: f64 = 1e-300;

/// An orthonormal family of `dim × dim` matrices under `⟨X,Y⟩ = tr(X†Y)`.
#[derive(Clone, Debug)]
pub struct HsBasis {
    dim: usize,
    elems: Vec<CMatrix>,
    tol: f64,
}

impl HsBasis {
    /// Orthonormalize a family of matrices by modified Gram–Schmidt with
    /// reorthogonalization. Vectors whose residual after projection falls
    /// below `tol` relative to the largest input norm are discarded, so the
    /// basis size equals the numerical rank of the span.
    pub fn orthonormalize<I>(dim: usize, mats: I, tol: f64) -> Result<HsBasis, LinalgError>
    where
        I: IntoIterator<Item = CMatrix>,
    {
        let mut b = SpanBuilder::new(dim, tol);
        for m in mats {
            b.absorb(m)?;
        }
        Ok(b.finish())
    }

    pub fn empty(dim: usize, tol: f64) -> HsBasis {
        HsBasis { dim, elems: Vec::new(), tol }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[CMatrix] {
        &self.elems
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn coefficients(&self, x: &CMatrix) -> Vec<C64> {
        self.elems.iter().map(|b| b.hs_inner(x)).collect()
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut p = CMatrix::zeros(self.dim, self.dim);
        for b in &self.elems {
            let c = b.hs_inner(x);
            p = &p + &b.scale(c);
        }
        p
    }

    /// `‖X − P(X)‖ / max(‖X‖, ε)`: 0 for members, 1 for operators
    /// orthogonal to the span.
    pub fn residual(&self, x: &CMatrix) -> Result<f64, LinalgError> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(LinalgError::DimMismatch { expected: (self.dim, self.dim), got: (x.rows(), x.cols()) });
        }
        Ok((x - &self.project(x)).hs_norm() / x.hs_norm().max(ZERO_GUARD))
    }

    /// `‖X − P(X)‖` without normalization.
    pub fn absolute_residual(&self, x: &CMatrix) -> Result<f64, LinalgError> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(LinalgError::DimMismatch { expected: (self.dim, self.dim), got: (x.rows(), x.cols()) });
        }
        Ok((x - &self.project(x)).hs_norm())
    }

    /// Mutual-projection comparison of two subspaces: the worst relative
    /// residual of either basis against the other.
    pub fn mutual_residual(&self, other: &HsBasis) -> Result<f64, LinalgError> {
        let mut worst = 0.0_f64;
        for e in &self.elems {
            worst = worst.max(other.residual(e)?);
        }
        for e in &other.elems {
            worst = worst.max(self.residual(e)?);
        }
        Ok(worst)
    }
}

/// Incremental span construction; candidates stream through `absorb`.
pub struct SpanBuilder {
    dim: usize,
    tol: f64,
    max_input_norm: f64,
    elems: Vec<CMatrix>,
}

impl SpanBuilder {
    pub fn new(dim: usize, tol: f64) -> SpanBuilder {
        SpanBuilder { dim, tol, max_input_norm: 0.0, elems: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// True once the span has saturated the full matrix space.
    pub fn saturated(&self) -> bool {
        self.elems.len() == self.dim * self.dim
    }

    /// Project out the current span and keep the remainder if it is above
    /// the discard threshold. Returns whether the candidate enlarged the
    /// span. Two projection passes keep orthogonality near round-off.
    pub fn absorb(&mut self, m: CMatrix) -> Result<bool, LinalgError> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(LinalgError::DimMismatch { expected: (self.dim, self.dim), got: (m.rows(), m.cols()) });
        }
        let norm0 = m.hs_norm();
        self.max_input_norm = self.max_input_norm.max(norm0);
        let threshold = self.tol * self.max_input_norm.max(ZERO_GUARD);
        if norm0 <= threshold || self.saturated() {
            return Ok(false);
        }
        let mut r = m;
        for _pass in 0..2 {
            for b in &self.elems {
                let c = b.hs_inner(&r);
                if c.norm_sqr() > 0.0 {
                    r = &r - &b.scale(c);
                }
            }
        }
        let norm = r.hs_norm();
        if norm <= threshold {
            return Ok(false);
        }
        self.elems.push(r.scale_re(1.0 / norm));
        Ok(true)
    }

    pub fn finish(self) -> HsBasis {
        HsBasis { dim: self.dim, elems: self.elems, tol: self.tol }
    }
}

/// Numerical rank of a matrix family from the spectrum of its Gram matrix:
/// the count of Gram eigenvalues above `(tol·σ_max)²` where `σ_max` is the
/// largest singular value. Independent of the Gram–Schmidt path, which makes
/// it the rank oracle in tests.
pub fn gram_rank(mats: &[CMatrix], tol: f64) -> Result<usize, LinalgError> {
    if mats.is_empty() {
        return Ok(0);
    }
    let k = mats.len();
    let gram = CMatrix::from_fn(k, k, |r, c| mats[r].hs_inner(&mats[c]));
    let (eigs, _) = eig_hermitian(&gram)?;
    let top = eigs.last().copied().unwrap_or(0.0).max(0.0);
    if top <= 0.0 {
        return Ok(0);
    }
    // Gram eigenvalues carry round-off noise at ~eps·λ_max, so the
    // singular-value cut (tol·σ_max)² is floored there.
    let cut = top * (tol * tol).max(1e-13);
    Ok(eigs.iter().filter(|&&e| e > cut).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn paulis() -> Vec<CMatrix> {
        vec![
            CMatrix::identity(2),
            CMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap(),
            CMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap(),
            CMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap(),
        ]
    }

    #[test]
    fn dependent_inputs_are_discarded() {
        let basis = HsBasis::orthonormalize(
            2,
            vec![CMatrix::identity(2), CMatrix::identity(2).scale_re(2.0)],
            1e-10,
        )
        .unwrap();
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn pauli_family_has_rank_four() {
        let basis = HsBasis::orthonormalize(2, paulis(), 1e-10).unwrap();
        assert_eq!(basis.len(), 4);
        assert_eq!(gram_rank(&paulis(), 1e-10).unwrap(), 4);
        // pairwise orthonormality
        for (i, a) in basis.elems().iter().enumerate() {
            for (j, b) in basis.elems().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.hs_inner(b).norm() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_family_saturates_full_space() {
        let mut rng = SplitMix64::new(99);
        let mats: Vec<CMatrix> =
            (0..16).map(|_| CMatrix::from_fn(3, 3, |_, _| c(rng.next_sym(), rng.next_sym()))).collect();
        let basis = HsBasis::orthonormalize(3, mats.clone(), 1e-10).unwrap();
        assert_eq!(basis.len(), 9);
        assert_eq!(gram_rank(&mats, 1e-10).unwrap(), 9);
    }

    #[test]
    fn empty_input_gives_empty_basis() {
        let basis = HsBasis::orthonormalize(4, Vec::new(), 1e-10).unwrap();
        assert!(basis.is_empty());
    }

    #[test]
    fn residual_zero_inside_one_outside() {
        let p = paulis();
        let basis = HsBasis::orthonormalize(2, vec![p[0].clone(), p[1].clone()], 1e-10).unwrap();
        // member: I + 2σx
        let member = &p[0] + &p[1].scale_re(2.0);
        assert!(basis.residual(&member).unwrap() < 1e-12);
        // σz is HS-orthogonal to span{I, σx}
        let res = basis.residual(&p[3]).unwrap();
        assert!((res - 1.0).abs() < 1e-12);
        // hand oracle: both inner products vanish
        assert!(p[0].hs_inner(&p[3]).norm() < 1e-15);
        assert!(p[1].hs_inner(&p[3]).norm() < 1e-15);
    }

    #[test]
    fn residual_dimension_mismatch() {
        let basis = HsBasis::orthonormalize(2, paulis(), 1e-10).unwrap();
        assert!(basis.residual(&CMatrix::identity(3)).is_err());
    }
}
