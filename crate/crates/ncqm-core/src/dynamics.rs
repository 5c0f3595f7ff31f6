//! Hamiltonian assembly per model family, Heisenberg-picture velocities
//! and evolution, metric extraction, and the Dirac operator of the
//! noncommutative torus.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::AlgebraError;
use crate::linalg::{eig_hermitian, spectral_map, CMatrix, LinalgError, C64};
use crate::models::{ModelBundle, ModelError, ModelSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum DynError {
    Linalg(LinalgError),
    Algebra(AlgebraError),
    Model(ModelError),
    /// A word referenced an operator label the bundle does not provide.
    UnknownLabel(String),
    /// Assembled term failed the Hermiticity requirement.
    NotHermitian { term: String, defect: f64 },
    /// A coefficient that must be central is not.
    NotCentral { label: String, defect: f64 },
    /// Supplied sigma matrices violate the Clifford relation for c.
    CliffordViolated { defect: f64 },
    /// Hamiltonian spec family does not match the bundle family.
    FamilyMismatch { bundle: String, hamiltonian: String },
    BadSpec(String),
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::Linalg(e) => write!(f, "{e}"),
            DynError::Algebra(e) => write!(f, "{e}"),
            DynError::Model(e) => write!(f, "{e}"),
            DynError::UnknownLabel(l) => write!(f, "unknown operator label '{l}'"),
            DynError::NotHermitian { term, defect } => {
                write!(f, "term '{term}' is not Hermitian (defect {defect:.3e})")
            }
            DynError::NotCentral { label, defect } => {
                write!(f, "coefficient '{label}' is not central (defect {defect:.3e})")
            }
            DynError::CliffordViolated { defect } => {
                write!(f, "sigma matrices violate the Clifford relation (defect {defect:.3e})")
            }
            DynError::FamilyMismatch { bundle, hamiltonian } => {
                write!(f, "hamiltonian spec for '{hamiltonian}' applied to model '{bundle}'")
            }
            DynError::BadSpec(m) => write!(f, "{m}"),
        }
    }
}

impl core::error::Error for DynError {}

impl From<LinalgError> for DynError {
    fn from(e: LinalgError) -> Self {
        DynError::Linalg(e)
    }
}

impl From<AlgebraError> for DynError {
    fn from(e: AlgebraError) -> Self {
        DynError::Algebra(e)
    }
}

impl From<ModelError> for DynError {
    fn from(e: ModelError) -> Self {
        DynError::Model(e)
    }
}

/// Polynomial in generator words with complex coefficients. A word is a
/// list of operator labels resolved against the bundle (generators,
/// opposite generators, named operators, `"I"`); a trailing `*` takes the
/// adjoint of the resolved base operator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WordPoly {
    pub terms: Vec<(Vec<String>, C64)>,
}

impl WordPoly {
    pub fn zero() -> WordPoly {
        WordPoly { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> WordPoly {
        WordPoly { terms: alloc::vec![(Vec::new(), c)] }
    }

    pub fn term(word: &[&str], c: C64) -> WordPoly {
        WordPoly { terms: alloc::vec![(word.iter().map(|s| String::from(*s)).collect(), c)] }
    }

    pub fn plus(mut self, word: &[&str], c: C64) -> WordPoly {
        self.terms.push((word.iter().map(|s| String::from(*s)).collect(), c));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest word length.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, bundle: &ModelBundle) -> Result<CMatrix, DynError> {
        let dim = bundle.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for (word, coeff) in &self.terms {
            let mut m = CMatrix::identity(dim);
            for label in word {
                m = m.matmul(&resolve_label(bundle, label)?);
            }
            sum = &sum + &m.scale(*coeff);
        }
        Ok(sum)
    }
}

fn resolve_label(bundle: &ModelBundle, label: &str) -> Result<CMatrix, DynError> {
    let (base, adjoint) = match label.strip_suffix('*') {
        Some(b) => (b, true),
        None => (label, false),
    };
    let m = if base == "I" {
        Some(CMatrix::identity(bundle.dim()))
    } else {
        bundle
            .rep
            .generator(base)
            .cloned()
            .or_else(|| {
                bundle.rep.opposite_generators().iter().find(|(l, _)| l == base).map(|(_, g)| g.clone())
            })
            .or_else(|| bundle.named_op(base).cloned())
    };
    let m = m.ok_or_else(|| DynError::UnknownLabel(String::from(label)))?;
    Ok(if adjoint { m.dagger() } else { m })
}

/// Symbolic Hamiltonian recipe, one variant per model family.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    /// `H = A₀ (+ mixing)`: a Hermitian word polynomial over `A` and `A°`
    /// labels, plus an optional explicit Hermitian matrix (the toy
    /// sector-mixing term).
    FiniteSum { a0: WordPoly, mixing: Option<CMatrix> },
    /// `H = ½ g(δ−A)² + A₀` with `g` central and `A`, `A₀` Hermitian;
    /// the kinetic term is symmetrized as `(T + T†)/2`.
    AlmostCommutative { g: WordPoly, a: WordPoly, a0: WordPoly },
    /// `H = ½ Σ ζₖₗ(δₖ−Aₖ)(δₗ−Aₗ) + A₀` with constant real symmetric ζ.
    Moyal { zeta: [[f64; 2]; 2], a: [WordPoly; 2], a0: WordPoly },
    /// `H = z₁(δ₁²+δ₂²) + z₂δ₁δ₂ + z₃(δ₁+δ₂) + z₄σ` with central zᵢ.
    DoubleTorus { z: [WordPoly; 4] },
    /// `H = ½ Σ cₖₗ(δₖ−Aₖ)(δₗ−Aₗ) + A₀` with constant real symmetric c
    /// and `Aₖ = aₖ + aₖ°` built from Hermitian `aₖ ∈ A`.
    NcTorus { c: [[f64; 2]; 2], a: [WordPoly; 2], a0: WordPoly },
}

impl HamiltonianSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            HamiltonianSpec::FiniteSum { .. } => "finite_sum",
            HamiltonianSpec::AlmostCommutative { .. } => "almost_commutative",
            HamiltonianSpec::Moyal { .. } => "moyal",
            HamiltonianSpec::DoubleTorus { .. } => "double_torus",
            HamiltonianSpec::NcTorus { .. } => "nc_torus",
        }
    }

    /// Free Hamiltonian of the family: unit kinetic coefficients, no
    /// potentials.
    pub fn free_for(spec: &ModelSpec) -> HamiltonianSpec {
        let one = [[1.0, 0.0], [0.0, 1.0]];
        match spec {
            ModelSpec::FiniteSum { .. } => HamiltonianSpec::FiniteSum { a0: WordPoly::zero(), mixing: None },
            ModelSpec::AlmostCommutative { .. } => HamiltonianSpec::AlmostCommutative {
                g: WordPoly::constant(C64::new(1.0, 0.0)),
                a: WordPoly::zero(),
                a0: WordPoly::zero(),
            },
            ModelSpec::Moyal { .. } => HamiltonianSpec::Moyal {
                zeta: one,
                a: [WordPoly::zero(), WordPoly::zero()],
                a0: WordPoly::zero(),
            },
            ModelSpec::DoubleTorus { .. } => HamiltonianSpec::DoubleTorus {
                z: [
                    WordPoly::constant(C64::new(1.0, 0.0)),
                    WordPoly::zero(),
                    WordPoly::zero(),
                    WordPoly::zero(),
                ],
            },
            ModelSpec::NcTorus { .. } => HamiltonianSpec::NcTorus {
                c: one,
                a: [WordPoly::zero(), WordPoly::zero()],
                a0: WordPoly::zero(),
            },
        }
    }

    /// Maximal word degree among the coefficient polynomials, used for
    /// window-margin bookkeeping.
    pub fn coefficient_degree(&self) -> usize {
        match self {
            HamiltonianSpec::FiniteSum { a0, .. } => a0.degree(),
            HamiltonianSpec::AlmostCommutative { g, a, a0 } => g.degree().max(a.degree()).max(a0.degree()),
            HamiltonianSpec::Moyal { a, a0, .. } | HamiltonianSpec::NcTorus { a, a0, .. } => {
                a[0].degree().max(a[1].degree()).max(a0.degree())
            }
            HamiltonianSpec::DoubleTorus { z } => z.iter().map(|p| p.degree()).max().unwrap_or(0),
        }
    }
}

const HERM_TOL: f64 = 1e-10;

fn require_hermitian(term: &str, m: &CMatrix) -> Result<(), DynError> {
    let defect = m.hermiticity_defect();
    if defect > HERM_TOL {
        return Err(DynError::NotHermitian { term: String::from(term), defect });
    }
    Ok(())
}

/// Centrality inside the window: worst `‖W[z, g]W‖` over generators,
/// relative to the operator scales.
fn central_defect(bundle: &ModelBundle, z: &CMatrix, margin: usize) -> f64 {
    let mut worst = 0.0_f64;
    for (_, g) in bundle.rep.generators() {
        let comm = g.commutator(z).expect("square");
        let w = bundle.windowed(&comm, margin);
        worst = worst.max(w.hs_norm() / (g.hs_norm() * z.hs_norm()).max(1e-300));
    }
    worst
}

fn sym(t: &CMatrix) -> CMatrix {
    t.hermitize()
}

/// Assemble the Hermitian Hamiltonian matrix of a recipe on a bundle.
///
/// Coefficients sit to the left of the derivative factors as written in
/// the family forms; each kinetic term is then symmetrized as
/// `(T + T†)/2`, which coincides with the written ordering whenever the
/// coefficients are central.
pub fn assemble_hamiltonian(bundle: &ModelBundle, hspec: &HamiltonianSpec) -> Result<CMatrix, DynError> {
    if hspec.family_name() != bundle.spec.family_name() {
        return Err(DynError::FamilyMismatch {
            bundle: String::from(bundle.spec.family_name()),
            hamiltonian: String::from(hspec.family_name()),
        });
    }
    let dim = bundle.dim();
    let h = match hspec {
        HamiltonianSpec::FiniteSum { a0, mixing } => {
            let mut h = a0.evaluate(bundle)?;
            if let Some(m) = mixing {
                if m.rows() != dim || m.cols() != dim {
                    return Err(DynError::BadSpec(format!(
                        "mixing term is {}x{}, expected {dim}x{dim}",
                        m.rows(),
                        m.cols()
                    )));
                }
                h = &h + m;
            }
            require_hermitian("A0 + mixing", &h)?;
            h
        }
        HamiltonianSpec::AlmostCommutative { g, a, a0 } => {
            let gm = g.evaluate(bundle)?;
            require_hermitian("g", &gm)?;
            let cdef = central_defect(bundle, &gm, g.degree().max(1));
            if cdef > HERM_TOL {
                return Err(DynError::NotCentral { label: String::from("g"), defect: cdef });
            }
            let am = a.evaluate(bundle)?;
            require_hermitian("A", &am)?;
            let a0m = a0.evaluate(bundle)?;
            require_hermitian("A0", &a0m)?;
            let delta = bundle.named_op("delta").expect("circle bundle exposes delta");
            let mom = delta - &am;
            let kin = gm.matmul(&mom).matmul(&mom).scale_re(0.5);
            &sym(&kin) + &a0m
        }
        HamiltonianSpec::Moyal { zeta, a, a0 } => {
            if (zeta[0][1] - zeta[1][0]).abs() > 1e-12 {
                return Err(DynError::BadSpec("zeta must be symmetric".into()));
            }
            let a1 = a[0].evaluate(bundle)?;
            let a2 = a[1].evaluate(bundle)?;
            require_hermitian("A1", &a1)?;
            require_hermitian("A2", &a2)?;
            let a0m = a0.evaluate(bundle)?;
            require_hermitian("A0", &a0m)?;
            let d = [
                bundle.named_op("delta1").expect("moyal exposes delta1") - &a1,
                bundle.named_op("delta2").expect("moyal exposes delta2") - &a2,
            ];
            let mut kin = CMatrix::zeros(dim, dim);
            for k in 0..2 {
                for l in 0..2 {
                    if zeta[k][l] != 0.0 {
                        kin = &kin + &d[k].matmul(&d[l]).scale_re(0.5 * zeta[k][l]);
                    }
                }
            }
            &sym(&kin) + &a0m
        }
        HamiltonianSpec::DoubleTorus { z } => {
            let d1 = bundle.named_op("delta1").expect("double torus exposes delta1").clone();
            let d2 = bundle.named_op("delta2").expect("double torus exposes delta2").clone();
            let sigma = bundle.named_op("sigma").expect("double torus exposes sigma").clone();
            let kin = [&d1.matmul(&d1) + &d2.matmul(&d2), d1.matmul(&d2), &d1 + &d2, sigma];
            let mut h = CMatrix::zeros(dim, dim);
            for (i, zi) in z.iter().enumerate() {
                if zi.is_zero() {
                    continue;
                }
                let zm = zi.evaluate(bundle)?;
                require_hermitian(&format!("z{}", i + 1), &zm)?;
                let cdef = central_defect(bundle, &zm, zi.degree().max(1));
                if cdef > HERM_TOL {
                    return Err(DynError::NotCentral { label: format!("z{}", i + 1), defect: cdef });
                }
                h = &h + &sym(&zm.matmul(&kin[i]));
            }
            h
        }
        HamiltonianSpec::NcTorus { c, a, a0 } => {
            if (c[0][1] - c[1][0]).abs() > 1e-12 {
                return Err(DynError::BadSpec("c must be symmetric".into()));
            }
            let j = bundle.rep.j().expect("torus bundle carries J");
            let mut d = Vec::with_capacity(2);
            for (k, ak) in a.iter().enumerate() {
                let akm = ak.evaluate(bundle)?;
                require_hermitian(&format!("a{}", k + 1), &akm)?;
                let ako = j.opposite(&akm);
                let delta = bundle
                    .named_op(if k == 0 { "delta1" } else { "delta2" })
                    .expect("torus exposes deltas");
                d.push(&(delta - &akm) - &ako);
            }
            let a0m = a0.evaluate(bundle)?;
            require_hermitian("A0", &a0m)?;
            let mut kin = CMatrix::zeros(dim, dim);
            for k in 0..2 {
                for l in 0..2 {
                    if c[k][l] != 0.0 {
                        kin = &kin + &d[k].matmul(&d[l]).scale_re(0.5 * c[k][l]);
                    }
                }
            }
            &sym(&kin) + &a0m
        }
    };
    require_hermitian("H", &h)?;
    Ok(h)
}

/// Heisenberg velocity `ȧ = i[H, a]`; the sign makes `−i[a, ȧ] ≥ 0` for
/// kinetic Hamiltonians with PSD coefficient matrices.
pub fn velocity(h: &CMatrix, a: &CMatrix) -> Result<CMatrix, DynError> {
    Ok(h.commutator(a)?.scale(C64::new(0.0, 1.0)))
}

/// Inverse-metric pairing `G(a,b) = −i[a, ḃ]`.
pub fn extract_metric(h: &CMatrix, a: &CMatrix, b: &CMatrix) -> Result<CMatrix, DynError> {
    let vel = velocity(h, b)?;
    Ok(a.commutator(&vel)?.scale(C64::new(0.0, -1.0)))
}

/// Positivity data of the pairing `G(a,a)` compressed to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

pub fn metric_report(
    bundle: &ModelBundle,
    h: &CMatrix,
    a: &CMatrix,
    margin: usize,
) -> Result<MetricReport, DynError> {
    let g = extract_metric(h, a, a)?;
    let gw = bundle.windowed(&g, margin);
    let keep: Vec<usize> = match bundle.window(margin) {
        Some(w) => (0..bundle.dim()).filter(|&i| w[(i, i)].re > 0.5).collect(),
        None => (0..bundle.dim()).collect(),
    };
    let compressed = gw.compress(&keep).hermitize();
    let (eigs, _) = eig_hermitian(&compressed)?;
    Ok(MetricReport {
        hermiticity_defect: gw.hermiticity_defect(),
        min_eigenvalue: eigs.first().copied().unwrap_or(0.0),
    })
}

/// A Heisenberg-evolved observable `aₜ = e^{iHt} a e^{−iHt}`.
#[derive(Debug, Clone)]
pub struct EvolvedObservable {
    pub label: String,
    pub time: f64,
    pub matrix: CMatrix,
}

/// Eigendecomposition of a Hamiltonian, reused across evolution times.
pub struct Propagator {
    eigs: Vec<f64>,
    basis: CMatrix,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Propagator, DynError> {
        let (eigs, basis) = eig_hermitian(h)?;
        Ok(Propagator { eigs, basis })
    }

    /// `e^{iHt}`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        spectral_map(&self.eigs, &self.basis, |x| C64::from_polar(1.0, x * t))
    }

    pub fn evolve(&self, a: &CMatrix, t: f64) -> CMatrix {
        let u = self.unitary(t);
        u.matmul(a).matmul(&u.dagger())
    }
}

pub fn evolve(h: &CMatrix, a: &CMatrix, label: &str, t: f64) -> Result<EvolvedObservable, DynError> {
    let prop = Propagator::new(h)?;
    Ok(EvolvedObservable { label: String::from(label), time: t, matrix: prop.evolve(a, t) })
}

/// Central-difference check of the Heisenberg equation at time `t`:
/// `‖(a_{t+h} − a_{t−h})/2h − i[H, aₜ]‖`.
pub fn heisenberg_fd_residual(prop: &Propagator, h: &CMatrix, a: &CMatrix, t: f64, step: f64) -> f64 {
    let plus = prop.evolve(a, t + step);
    let minus = prop.evolve(a, t - step);
    let fd = (&plus - &minus).scale_re(0.5 / step);
    let at = prop.evolve(a, t);
    let rhs = h.commutator(&at).expect("square").scale(C64::new(0.0, 1.0));
    (&fd - &rhs).hs_norm()
}

/// Specification of a torus Dirac operator `D = Σᵢ Δᵢ ⊗ σⁱ`,
/// `Δᵢ = δᵢ − aᵢ − aᵢ°`, with Hermitian 2×2 σⁱ satisfying
/// `σⁱσʲ + σʲσⁱ = 2cᵢⱼ`.
#[derive(Debug, Clone)]
pub struct DiracSpec {
    pub c: [[f64; 2]; 2],
    pub a: [WordPoly; 2],
    pub sigma: [CMatrix; 2],
}

impl DiracSpec {
    /// Flat Dirac operator: c = identity, Pauli x/y, no gauge term.
    pub fn flat() -> DiracSpec {
        let sx =
            CMatrix::from_fn(2, 2, |r, c| if r != c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let sy = CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        });
        DiracSpec { c: [[1.0, 0.0], [0.0, 1.0]], a: [WordPoly::zero(), WordPoly::zero()], sigma: [sx, sy] }
    }
}

/// Dirac operator on the doubled space `H ⊗ C²`, together with the
/// covariant factors `Δᵢ` it is built from.
pub fn dirac_operator(bundle: &ModelBundle, dspec: &DiracSpec) -> Result<(CMatrix, [CMatrix; 2]), DynError> {
    if bundle.spec.family_name() != "nc_torus" {
        return Err(DynError::FamilyMismatch {
            bundle: String::from(bundle.spec.family_name()),
            hamiltonian: String::from("nc_torus dirac"),
        });
    }
    for (i, s) in dspec.sigma.iter().enumerate() {
        if s.rows() != 2 || s.cols() != 2 {
            return Err(DynError::BadSpec(format!("sigma{} must be 2x2", i + 1)));
        }
        require_hermitian(&format!("sigma{}", i + 1), s)?;
    }
    let mut clifford_defect = 0.0_f64;
    for i in 0..2 {
        for jx in 0..2 {
            let anti = dspec.sigma[i].anticommutator(&dspec.sigma[jx])?;
            let want = CMatrix::identity(2).scale_re(2.0 * dspec.c[i][jx]);
            clifford_defect = clifford_defect.max((&anti - &want).hs_norm());
        }
    }
    if clifford_defect > 1e-10 {
        return Err(DynError::CliffordViolated { defect: clifford_defect });
    }
    let j = bundle.rep.j().expect("torus bundle carries J");
    let mut deltas = Vec::with_capacity(2);
    for (k, ak) in dspec.a.iter().enumerate() {
        let akm = ak.evaluate(bundle)?;
        require_hermitian(&format!("a{}", k + 1), &akm)?;
        let ako = j.opposite(&akm);
        let base =
            bundle.named_op(if k == 0 { "delta1" } else { "delta2" }).expect("torus exposes deltas");
        deltas.push(&(base - &akm) - &ako);
    }
    let d = &deltas[0].kron(&dspec.sigma[0]) + &deltas[1].kron(&dspec.sigma[1]);
    require_hermitian("D", &d)?;
    Ok((d, [deltas[0].clone(), deltas[1].clone()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ThetaSpec, TorusMode};
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nc5() -> ModelBundle {
        ModelBundle::build(&ModelSpec::NcTorus {
            theta: ThetaSpec::Rational { p: 1, q: 5 },
            size: 5,
            mode: TorusMode::Cyclic,
            window_margin: 1,
        })
        .unwrap()
    }

    #[test]
    fn free_nc_torus_hamiltonian_is_half_the_lattice_laplacian() {
        let b = nc5();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let d1 = b.named_op("delta1").unwrap();
        let d2 = b.named_op("delta2").unwrap();
        let want = (&d1.matmul(d1) + &d2.matmul(d2)).scale_re(0.5);
        assert!((&h - &want).hs_norm() < 1e-13);
    }

    #[test]
    fn double_torus_free_hamiltonian_is_diagonal() {
        let b = ModelBundle::build(&ModelSpec::DoubleTorus {
            size: 4,
            mode: TorusMode::Cyclic,
            window_margin: 1,
        })
        .unwrap();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        // z₁ = 1: H = δ₁² + δ₂², diagonal n² + m²
        let mut diag_sq = 0.0;
        for idx in 0..b.dim() {
            let q = b.layout.quantum(idx);
            let want = (q[0] * q[0] + q[1] * q[1]) as f64;
            assert!((h[(idx, idx)].re - want).abs() < 1e-13);
            diag_sq += h[(idx, idx)].re * h[(idx, idx)].re;
        }
        assert!((h.hs_norm() * h.hs_norm() - diag_sq).abs() < 1e-10);
    }

    #[test]
    fn double_torus_rejects_noncentral_coefficient() {
        let b = ModelBundle::build(&ModelSpec::DoubleTorus {
            size: 4,
            mode: TorusMode::Cyclic,
            window_margin: 1,
        })
        .unwrap();
        // U + U† is Hermitian but not flip-invariant, hence not central
        let bad = HamiltonianSpec::DoubleTorus {
            z: [
                WordPoly::term(&["U"], c(1.0, 0.0)).plus(&["U*"], c(1.0, 0.0)),
                WordPoly::zero(),
                WordPoly::zero(),
                WordPoly::zero(),
            ],
        };
        assert!(matches!(assemble_hamiltonian(&b, &bad), Err(DynError::NotCentral { .. })));
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let b = nc5();
        let err =
            assemble_hamiltonian(&b, &HamiltonianSpec::FiniteSum { a0: WordPoly::zero(), mixing: None });
        assert!(matches!(err, Err(DynError::FamilyMismatch { .. })));
    }

    #[test]
    fn velocity_vanishes_on_commuting_central_elements() {
        let gns = ModelBundle::build(&ModelSpec::FiniteSum { blocks: alloc::vec![2, 3] }).unwrap();
        // H inside A·A° commutes with the central projections
        let h = assemble_hamiltonian(
            &gns,
            &HamiltonianSpec::FiniteSum {
                a0: WordPoly::term(&["e1_12", "e1_21o"], c(1.0, 0.0)).plus(&["e1_21", "e1_12o"], c(1.0, 0.0)),
                mixing: None,
            },
        )
        .unwrap();
        let p1 = gns.named_op("P1").unwrap();
        assert!(velocity(&h, p1).unwrap().hs_norm() < 1e-13);
    }

    #[test]
    fn pauli_fiber_potential_appears_in_the_circle_hamiltonian() {
        // A₀ = b⃗·T⃗: a constant Hermitian fiber potential
        let b = ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 5, fiber: 2, window_margin: 1 })
            .unwrap();
        let a0 = WordPoly::term(&["T1"], c(0.3, 0.0))
            .plus(&["T2"], c(-0.1, 0.0))
            .plus(&["T3"], c(0.7, 0.0));
        let h = assemble_hamiltonian(
            &b,
            &HamiltonianSpec::AlmostCommutative {
                g: WordPoly::constant(c(1.0, 0.0)),
                a: WordPoly::zero(),
                a0: a0.clone(),
            },
        )
        .unwrap();
        let free = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let fiber_term = a0.evaluate(&b).unwrap();
        assert!((&(&h - &free) - &fiber_term).hs_norm() < 1e-12);
    }

    #[test]
    fn evolution_matches_closed_form_qubit_rotation() {
        let sz = CMatrix::diag(&[1.0, -1.0]);
        let sx = CMatrix::from_fn(2, 2, |r, cc| if r != cc { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let t = core::f64::consts::FRAC_PI_4;
        let got = evolve(&sz, &sx, "sx", t).unwrap();
        // e^{iσz t} σx e^{−iσz t} = cos(2t)σx − sin(2t)σy = [[0, i], [−i, 0]] at t = π/4
        let want = CMatrix::from_fn(2, 2, |r, cc| match (r, cc) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(0.0, 0.0),
        });
        assert!((&got.matrix - &want).hs_norm() < 1e-12);
    }

    #[test]
    fn evolution_is_trivial_at_time_zero_and_for_conserved_observables() {
        let b = nc5();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let u1 = b.rep.generator("U1").unwrap();
        let at0 = evolve(&h, u1, "U1", 0.0).unwrap();
        assert!((&at0.matrix - u1).hs_norm() < 1e-12);
        let ht = evolve(&h, &h, "H", 0.8).unwrap();
        assert!((&ht.matrix - &h).hs_norm() < 1e-10);
    }

    #[test]
    fn evolution_preserves_hs_norm_and_fd_matches_heisenberg() {
        let mut rng = SplitMix64::new(31);
        let b = nc5();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let a = rng.hermitian(b.dim());
        let t = 0.7;
        let at = prop.evolve(&a, t);
        assert!((at.hs_norm() - a.hs_norm()).abs() < 1e-9 * a.hs_norm());
        let comm_scale = h.commutator(&a).unwrap().hs_norm();
        let fd = heisenberg_fd_residual(&prop, &h, &a, t, 1e-4);
        assert!(fd < 1e-6 * comm_scale, "fd residual {fd} vs scale {comm_scale}");
    }

    #[test]
    fn moyal_metric_recovers_the_constant_coefficients() {
        let b = ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 0.9, window_margin: 2 }).unwrap();
        let zeta = [[1.0, 0.25], [0.25, 2.0]];
        let h = assemble_hamiltonian(
            &b,
            &HamiltonianSpec::Moyal { zeta, a: [WordPoly::zero(), WordPoly::zero()], a0: WordPoly::zero() },
        )
        .unwrap();
        let x = [b.rep.generator("x1").unwrap().clone(), b.rep.generator("x2").unwrap().clone()];
        for k in 0..2 {
            for l in 0..2 {
                // G(xₖ, xₗ) = ζₗₖ inside the window
                let g = extract_metric(&h, &x[k], &x[l]).unwrap();
                let want = CMatrix::identity(b.dim()).scale_re(zeta[l][k]);
                let delta = b.windowed(&(&g - &want), 3);
                assert!(delta.hs_norm() < 1e-10, "k={k} l={l}: {}", delta.hs_norm());
            }
        }
        // the identity has zero velocity
        assert!(extract_metric(&h, &x[0], &CMatrix::identity(b.dim())).unwrap().hs_norm() < 1e-12);
    }

    #[test]
    fn circle_metric_normalization() {
        // H = ½δ²: pairing U† against U gives g = 1 on the window
        let b = ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 6, fiber: 2, window_margin: 2 })
            .unwrap();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let u = b.rep.generator("U").unwrap();
        let g = extract_metric(&h, &u.dagger(), u).unwrap();
        let delta = &g - &CMatrix::identity(b.dim());
        assert!(b.windowed(&delta, 2).hs_norm() < 1e-12);
        // and G(U, U) = −U² on the window
        let guu = extract_metric(&h, u, u).unwrap();
        let want = u.matmul(u).scale_re(-1.0);
        assert!(b.windowed(&(&guu - &want), 2).hs_norm() < 1e-12);
    }

    #[test]
    fn metric_report_positive_for_free_motion() {
        let b = nc5();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let u1 = b.rep.generator("U1").unwrap();
        let a = (u1 + &u1.dagger()).scale_re(0.5);
        let report = metric_report(&b, &h, &a, 2).unwrap();
        assert!(report.hermiticity_defect < 1e-12);
        assert!(report.min_eigenvalue > -1e-12, "min eig {}", report.min_eigenvalue);
    }

    #[test]
    fn dirac_operator_squares_to_the_covariant_laplacian() {
        let b = nc5();
        let (d, deltas) = dirac_operator(&b, &DiracSpec::flat()).unwrap();
        let dsq = d.matmul(&d);
        let lap = &deltas[0].matmul(&deltas[0]) + &deltas[1].matmul(&deltas[1]);
        let want = lap.kron(&CMatrix::identity(2));
        assert!((&dsq - &want).hs_norm() < 1e-12);
    }

    #[test]
    fn dirac_commutators_are_off_diagonal_in_the_spinor_factor() {
        let b = nc5();
        let (d, _) = dirac_operator(&b, &DiracSpec::flat()).unwrap();
        let u1 = b.rep.generator("U1").unwrap();
        let lifted = u1.kron(&CMatrix::identity(2));
        let comm = d.commutator(&lifted).unwrap();
        // σˣ, σʸ are off-diagonal, so the C²-diagonal blocks vanish
        for r in 0..b.dim() {
            for cx in 0..b.dim() {
                assert!(comm[(2 * r, 2 * cx)].norm() < 1e-13);
                assert!(comm[(2 * r + 1, 2 * cx + 1)].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dirac_with_gauge_term_has_clifford_curvature_correction() {
        let golden = (libm::sqrt(5.0) - 1.0) / 2.0;
        let b = ModelBundle::build(&ModelSpec::NcTorus {
            theta: ThetaSpec::Real(golden),
            size: 4,
            mode: TorusMode::Truncated,
            window_margin: 1,
        })
        .unwrap();
        let mut dspec = DiracSpec::flat();
        dspec.a = [
            WordPoly::term(&["U1"], c(0.3, 0.0)).plus(&["U1*"], c(0.3, 0.0)),
            WordPoly::term(&["U2"], c(0.0, -0.2)).plus(&["U2*"], c(0.0, 0.2)),
        ];
        let (d, deltas) = dirac_operator(&b, &dspec).unwrap();
        let dsq = d.matmul(&d);
        let mut want = CMatrix::zeros(2 * b.dim(), 2 * b.dim());
        for i in 0..2 {
            for jx in 0..2 {
                want = &want
                    + &deltas[i].matmul(&deltas[jx]).kron(&CMatrix::identity(2)).scale_re(dspec.c[i][jx]);
            }
        }
        let curv = deltas[0]
            .commutator(&deltas[1])
            .unwrap()
            .kron(&dspec.sigma[0].commutator(&dspec.sigma[1]).unwrap())
            .scale_re(0.5);
        want = &want + &curv;
        assert!((&dsq - &want).hs_norm() < 1e-11 * dsq.hs_norm());
        // the curvature term really is present for this gauge choice
        assert!(curv.hs_norm() > 1e-3);
    }

    #[test]
    fn dirac_rejects_wrong_clifford_pair() {
        let b = nc5();
        let mut dspec = DiracSpec::flat();
        dspec.c = [[2.0, 0.0], [0.0, 1.0]]; // σˣσˣ = 1 ≠ 2
        assert!(matches!(dirac_operator(&b, &dspec), Err(DynError::CliffordViolated { .. })));
    }
}
