//! Spectral distance between states:
//! `d(χ,φ) = sup { |χ(a) − φ(a)| : a = a† ∈ A, ‖[D,a]‖ ≤ 1 }`.
//!
//! The supremum is a linear objective over the convex, symmetric body cut
//! out by the spectral-norm constraint, solved by supergradient ascent on
//! the real coordinates of the Hermitian part of the algebra span: each
//! step moves along the objective gradient projected onto the tangent of
//! the active constraint, then rescales exactly back to the boundary
//! (valid because both the objective and the constraint are homogeneous
//! of degree one). The reported distance is the best feasible value, a
//! certified lower bound; the upper field adds a first-order optimality
//! estimate from the remaining tangent gradient.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::DynError;
use crate::linalg::{eig_hermitian, CMatrix, HsBasis, LinalgError, C64};
use crate::models::{ModelBundle, ModelError};

#[derive(Debug, Clone, PartialEq)]
pub enum DistError {
    Linalg(LinalgError),
    Model(ModelError),
    Dyn(DynError),
    /// State fails unit-norm / positivity / trace normalization.
    BadState(String),
    DimMismatch { expected: usize, got: usize },
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::Linalg(e) => write!(f, "{e}"),
            DistError::Model(e) => write!(f, "{e}"),
            DistError::Dyn(e) => write!(f, "{e}"),
            DistError::BadState(m) => write!(f, "invalid state: {m}"),
            DistError::DimMismatch { expected, got } => {
                write!(f, "state dimension {got}, expected {expected}")
            }
        }
    }
}

impl core::error::Error for DistError {}

impl From<LinalgError> for DistError {
    fn from(e: LinalgError) -> Self {
        DistError::Linalg(e)
    }
}

impl From<ModelError> for DistError {
    fn from(e: ModelError) -> Self {
        DistError::Model(e)
    }
}

impl From<DynError> for DistError {
    fn from(e: DynError) -> Self {
        DistError::Dyn(e)
    }
}

/// A state on the represented algebra: vector or density matrix.
#[derive(Debug, Clone)]
pub enum StateSpec {
    Pure(Vec<C64>),
    Density(CMatrix),
}

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::Pure(v) => v.len(),
            StateSpec::Density(rho) => rho.rows(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), DistError> {
        if self.dim() != dim {
            return Err(DistError::DimMismatch { expected: dim, got: self.dim() });
        }
        match self {
            StateSpec::Pure(v) => {
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(DistError::BadState(alloc::format!("vector norm² = {norm}")));
                }
            }
            StateSpec::Density(rho) => {
                if !rho.is_hermitian(1e-12) {
                    return Err(DistError::BadState("density matrix not Hermitian".into()));
                }
                let tr = rho.trace();
                if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
                    return Err(DistError::BadState(alloc::format!("trace = {tr}")));
                }
                let (eigs, _) = eig_hermitian(rho)?;
                if eigs.first().copied().unwrap_or(0.0) < -1e-12 {
                    return Err(DistError::BadState(alloc::format!("negative eigenvalue {}", eigs[0])));
                }
            }
        }
        Ok(())
    }

    /// Expectation value `χ(a)`.
    pub fn expectation(&self, a: &CMatrix) -> C64 {
        match self {
            StateSpec::Pure(v) => {
                let av = a.mul_vec(v);
                v.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum()
            }
            StateSpec::Density(rho) => rho.matmul(a).trace(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DistanceOpts {
    /// Relative convergence target for the bound gap.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for DistanceOpts {
    fn default() -> Self {
        DistanceOpts { tol: 1e-4, max_iters: 10_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    /// Best feasible objective value: a certified lower bound.
    pub distance: f64,
    /// Lower bound plus the first-order optimality estimate.
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The constraint cannot see any direction with nonzero objective:
    /// the distance is infinite.
    pub degenerate: bool,
    pub witness: CMatrix,
}

/// Real-orthonormal basis of the Hermitian part of a span under the real
/// Hilbert–Schmidt pairing.
pub fn hermitian_span_basis(span: &HsBasis) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::new();
    let mut absorb = |cand: CMatrix| {
        let mut r = cand;
        for _ in 0..2 {
            for e in &out {
                let c = e.hs_inner(&r).re;
                if c != 0.0 {
                    r = &r - &e.scale_re(c);
                }
            }
        }
        let norm = r.hs_norm();
        if norm > 1e-10 {
            out.push(r.scale_re(1.0 / norm));
        }
    };
    for b in span.elems() {
        absorb(b.hermitize());
        absorb((&(b - &b.dagger())).scale(C64::new(0.0, 0.5)));
    }
    out
}

/// Distance between two states over an explicit Hermitian coordinate
/// basis. `d` may act on `k` copies of the state space; observables are
/// lifted as `a ⊗ 1_k`.
pub fn connes_distance_over(
    basis: &[CMatrix],
    d: &CMatrix,
    chi: &StateSpec,
    phi: &StateSpec,
    opts: &DistanceOpts,
) -> Result<DistanceResult, DistError> {
    let sdim = basis.first().map(|b| b.rows()).unwrap_or(0);
    if sdim == 0 {
        return Err(DistError::BadState("empty coordinate basis".into()));
    }
    chi.validate(sdim)?;
    phi.validate(sdim)?;
    if d.rows() % sdim != 0 {
        return Err(DistError::DimMismatch { expected: sdim, got: d.rows() });
    }
    let copies = d.rows() / sdim;
    let lift = |a: &CMatrix| -> CMatrix {
        if copies == 1 {
            a.clone()
        } else {
            a.kron(&CMatrix::identity(copies))
        }
    };

    // objective gradient and commutator directions, fixed across iterations
    let grad: Vec<f64> =
        basis.iter().map(|h| (chi.expectation(h) - phi.expectation(h)).re).collect();
    let gnorm = libm::sqrt(grad.iter().map(|g| g * g).sum());
    let kdirs: Vec<CMatrix> = basis
        .iter()
        .map(|h| d.commutator(&lift(h)).expect("square").scale(C64::new(0.0, -1.0)).hermitize())
        .collect();
    let kscale = kdirs.iter().fold(0.0_f64, |acc, k| acc.max(k.hs_norm()));

    let zero_witness = CMatrix::zeros(sdim, sdim);
    if gnorm < 1e-14 {
        return Ok(DistanceResult {
            distance: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
            degenerate: false,
            witness: zero_witness,
        });
    }
    if kscale < 1e-13 {
        // no direction is constrained but the objective is nonzero
        return Ok(DistanceResult {
            distance: f64::INFINITY,
            upper: f64::INFINITY,
            iterations: 0,
            converged: true,
            degenerate: true,
            witness: zero_witness,
        });
    }

    let assemble = |x: &[f64]| -> CMatrix {
        let mut c = CMatrix::zeros(d.rows(), d.rows());
        for (xj, k) in x.iter().zip(kdirs.iter()) {
            if *xj != 0.0 {
                c = &c + &k.scale_re(*xj);
            }
        }
        c
    };
    // spectral norm of −i[D, a(x)] plus the dominant eigenvector data
    let constraint = |x: &[f64]| -> Result<(f64, Vec<f64>), DistError> {
        let cm = assemble(x);
        let (eigs, v) = eig_hermitian(&cm)?;
        let lo = eigs.first().copied().unwrap_or(0.0);
        let hi = eigs.last().copied().unwrap_or(0.0);
        let (s, col, sign) = if hi >= -lo { (hi, eigs.len() - 1, 1.0) } else { (-lo, 0, -1.0) };
        let vecn: Vec<C64> = (0..v.rows()).map(|r| v[(r, col)]).collect();
        let normal: Vec<f64> = kdirs
            .iter()
            .map(|k| {
                let kv = k.mul_vec(&vecn);
                sign * vecn.iter().zip(kv.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
            })
            .collect();
        Ok((s, normal))
    };

    // start on the boundary along the objective gradient
    let mut x: Vec<f64> = grad.iter().map(|g| g / gnorm).collect();
    let (s0, _) = constraint(&x)?;
    if s0 > 1e-13 {
        for xj in x.iter_mut() {
            *xj /= s0;
        }
    }
    let mut best = grad.iter().zip(x.iter()).map(|(g, xj)| g * xj).sum::<f64>().max(0.0);
    let mut best_x = x.clone();
    let mut best_tangent = gnorm;
    let mut last_gain_window = f64::INFINITY;
    let mut window_start_best = best;
    let mut iterations = 0;
    let window = (opts.max_iters / 10).max(50);

    for k in 1..=opts.max_iters {
        iterations = k;
        let (s, normal) = constraint(&x)?;
        if s > 1e-13 {
            for xj in x.iter_mut() {
                *xj /= s;
            }
        }
        let val: f64 = grad.iter().zip(x.iter()).map(|(g, xj)| g * xj).sum();
        // tangent component of the gradient at the boundary point
        let nn: f64 = normal.iter().map(|n| n * n).sum();
        let gn: f64 = grad.iter().zip(normal.iter()).map(|(g, n)| g * n).sum();
        let tangent: Vec<f64> = if nn > 1e-300 && gn > 0.0 {
            grad.iter().zip(normal.iter()).map(|(g, n)| g - gn / nn * n).collect()
        } else {
            grad.clone()
        };
        let tnorm = libm::sqrt(tangent.iter().map(|t| t * t).sum());
        if val > best {
            best = val;
            best_x = x.clone();
            best_tangent = tnorm;
        }
        if tnorm < 1e-14 * gnorm {
            break;
        }
        let step = 0.5 / (gnorm * libm::sqrt(k as f64));
        for (xj, t) in x.iter_mut().zip(tangent.iter()) {
            *xj += step * t;
        }
        if k % window == 0 {
            last_gain_window = best - window_start_best;
            window_start_best = best;
            if last_gain_window <= opts.tol * best.max(1e-12) * 0.1 {
                break;
            }
        }
    }

    let mut witness = CMatrix::zeros(sdim, sdim);
    for (xj, h) in best_x.iter().zip(basis.iter()) {
        if *xj != 0.0 {
            witness = &witness + &h.scale_re(*xj);
        }
    }
    // first-order optimality estimate: the remaining tangent gradient
    // times the coordinate scale of the feasible point
    let xscale = libm::sqrt(best_x.iter().map(|x| x * x).sum::<f64>());
    let gap = (best_tangent * xscale / gnorm.max(1e-300)).max(last_gain_window.min(best));
    let upper = best + gap.min(best.max(1.0) * 10.0);
    let converged = gap <= opts.tol * best.max(1e-12) * 10.0 || best == 0.0;
    Ok(DistanceResult { distance: best, upper, iterations, converged, degenerate: false, witness })
}

/// Distance between two states of a model, optimizing over the Hermitian
/// part of the algebra span.
pub fn connes_distance(
    bundle: &ModelBundle,
    d: &CMatrix,
    chi: &StateSpec,
    phi: &StateSpec,
    opts: &DistanceOpts,
) -> Result<DistanceResult, DistError> {
    let spans = bundle.spans(0)?;
    let basis = hermitian_span_basis(&spans.algebra);
    connes_distance_over(&basis, d, chi, phi, opts)
}

/// Distances across a list of Dirac operators differing in their gauge
/// term, for the same pair of states.
pub fn gauge_sensitivity(
    bundle: &ModelBundle,
    diracs: &[(String, CMatrix)],
    chi: &StateSpec,
    phi: &StateSpec,
    opts: &DistanceOpts,
) -> Result<Vec<(String, DistanceResult)>, DistError> {
    let spans = bundle.spans(0)?;
    let basis = hermitian_span_basis(&spans.algebra);
    let mut out = Vec::with_capacity(diracs.len());
    for (label, d) in diracs {
        out.push((label.clone(), connes_distance_over(&basis, d, chi, phi, opts)?));
    }
    Ok(out)
}
