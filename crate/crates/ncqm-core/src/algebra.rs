//! Represented-algebra machinery: monomial spans, commutants and centers,
//! self-representations of finite-dimensional C*-algebras, antiunitary
//! conjugations and opposite algebras.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::eig_hermitian;
use crate::linalg::{CMatrix, HsBasis, LinalgError, SpanBuilder, C64};

/// Default tolerance for declaring two subspaces equal.
pub const SUBSPACE_TOL: f64 = 1e-8;
/// Default rank tolerance for span construction.
pub const RANK_TOL: f64 = 1e-10;

const WORD_LIMIT: usize = 200_000;
/// Largest Hilbert dimension for which the dense commutant path (an
/// n²×n² eigenproblem) is allowed.
const DENSE_COMMUTANT_MAX_DIM: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraError {
    Linalg(LinalgError),
    /// Operation requires an antiunitary J that the representation lacks.
    MissingJ,
    /// Operation requires opposite generators or a J to derive them from.
    MissingOpposite,
    EmptyGenerators,
    ZeroBlockSize,
    /// Word enumeration exceeded the safety limit; lower the degree cap or
    /// provide an explicit spanning set.
    WordLimit { cap: usize, atoms: usize },
    /// Hilbert dimension too large for the dense commutant algorithm and
    /// the generators are not monomial matrices.
    DimTooLarge { dim: usize },
    /// Declared opposite generators fail to commute with the algebra or to
    /// match the J-conjugated generators.
    OppositeInconsistent { residual: f64 },
    NotUnitary { defect: f64 },
    Invalid(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::Linalg(e) => write!(f, "{e}"),
            AlgebraError::MissingJ => write!(f, "representation has no antiunitary J"),
            AlgebraError::MissingOpposite => write!(f, "representation has no opposite generators and no J"),
            AlgebraError::EmptyGenerators => write!(f, "at least one generator required"),
            AlgebraError::ZeroBlockSize => write!(f, "block sizes must be positive"),
            AlgebraError::WordLimit { cap, atoms } => {
                write!(f, "word enumeration over {atoms} atoms at degree cap {cap} exceeds the safety limit")
            }
            AlgebraError::DimTooLarge { dim } => {
                write!(f, "dense commutant computation refused at Hilbert dimension {dim}")
            }
            AlgebraError::OppositeInconsistent { residual } => {
                write!(f, "opposite generators inconsistent (residual {residual:.3e})")
            }
            AlgebraError::NotUnitary { defect } => write!(f, "matrix not unitary (defect {defect:.3e})"),
            AlgebraError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for AlgebraError {}

impl From<LinalgError> for AlgebraError {
    fn from(e: LinalgError) -> Self {
        AlgebraError::Linalg(e)
    }
}

/// Antiunitary operator stored as a unitary followed by entrywise complex
/// conjugation: `J v = K conj(v)`.
#[derive(Clone, Debug)]
pub struct AntiUnitary {
    k: CMatrix,
}

impl AntiUnitary {
    pub fn new(k: CMatrix) -> Result<AntiUnitary, AlgebraError> {
        let n = k.require_square().map_err(AlgebraError::from)?;
        let defect = (&k.dagger().matmul(&k) - &CMatrix::identity(n)).hs_norm();
        if defect > 1e-10 * (n as f64).max(1.0) {
            return Err(AlgebraError::NotUnitary { defect });
        }
        Ok(AntiUnitary { k })
    }

    /// Plain complex conjugation (K = identity).
    pub fn conjugation(dim: usize) -> AntiUnitary {
        AntiUnitary { k: CMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    pub fn unitary_part(&self) -> &CMatrix {
        &self.k
    }

    /// `J X J⁻¹ = K conj(X) K†`.
    pub fn conjugate_operator(&self, x: &CMatrix) -> CMatrix {
        self.k.matmul(&x.conj()).matmul(&self.k.dagger())
    }

    /// The opposite representative `x° = J x* J⁻¹ = K xᵀ K†`.
    pub fn opposite(&self, x: &CMatrix) -> CMatrix {
        self.k.matmul(&x.transpose()).matmul(&self.k.dagger())
    }
}

/// A concretely represented algebra: labeled generator matrices plus the
/// optional structure (J, opposite generators, window projector) the model
/// families attach.
#[derive(Clone)]
pub struct AlgebraRep {
    dim: usize,
    generators: Vec<(String, CMatrix)>,
    degree_cap: usize,
    j: Option<AntiUnitary>,
    opposite: Vec<(String, CMatrix)>,
    window: Option<CMatrix>,
    span_hint: Vec<CMatrix>,
    opposite_hint: Vec<CMatrix>,
}

impl AlgebraRep {
    pub fn new(
        dim: usize,
        generators: Vec<(String, CMatrix)>,
        degree_cap: usize,
    ) -> Result<AlgebraRep, AlgebraError> {
        if generators.is_empty() {
            return Err(AlgebraError::EmptyGenerators);
        }
        for (label, g) in &generators {
            if g.rows() != dim || g.cols() != dim {
                return Err(AlgebraError::Invalid(format!("generator {label} is not {dim}x{dim}")));
            }
        }
        Ok(AlgebraRep {
            dim,
            generators,
            degree_cap: degree_cap.max(1),
            j: None,
            opposite: Vec::new(),
            window: None,
            span_hint: Vec::new(),
            opposite_hint: Vec::new(),
        })
    }

    pub fn with_j(mut self, j: AntiUnitary) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_opposite(mut self, opposite: Vec<(String, CMatrix)>) -> Self {
        self.opposite = opposite;
        self
    }

    pub fn with_window(mut self, window: CMatrix) -> Self {
        self.window = Some(window);
        self
    }

    /// Explicit spanning set; replaces word enumeration in `span`.
    pub fn with_span_hint(mut self, hint: Vec<CMatrix>) -> Self {
        self.span_hint = hint;
        self
    }

    pub fn with_opposite_hint(mut self, hint: Vec<CMatrix>) -> Self {
        self.opposite_hint = hint;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn generators(&self) -> &[(String, CMatrix)] {
        &self.generators
    }

    pub fn generator(&self, label: &str) -> Option<&CMatrix> {
        self.generators.iter().find(|(l, _)| l == label).map(|(_, g)| g)
    }

    pub fn opposite_generators(&self) -> &[(String, CMatrix)] {
        &self.opposite
    }

    pub fn j(&self) -> Option<&AntiUnitary> {
        self.j.as_ref()
    }

    pub fn window(&self) -> Option<&CMatrix> {
        self.window.as_ref()
    }

    /// `W X W` when a window is present, otherwise a plain copy. Windows
    /// are diagonal 0/1 projectors, so this masks entries.
    pub fn windowed(&self, x: &CMatrix) -> CMatrix {
        match &self.window {
            Some(w) => crate::models::apply_window(w, x),
            None => x.clone(),
        }
    }

    /// Generator atoms for word enumeration: the generators plus adjoints
    /// of the non-Hermitian ones, in label order.
    fn atoms(&self) -> Vec<(String, CMatrix)> {
        let mut atoms: Vec<(String, CMatrix)> = self.generators.clone();
        for (label, g) in &self.generators {
            if !g.is_hermitian(1e-12) {
                let adj = g.dagger();
                let listed = self
                    .generators
                    .iter()
                    .any(|(_, h)| (&adj - h).hs_norm() < 1e-12 * (1.0 + adj.hs_norm()));
                if !listed {
                    atoms.push((format!("{label}*"), adj));
                }
            }
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        atoms
    }

    /// Monomials spanning the algebra: either the explicit hint or every
    /// word of length ≤ `degree_cap` in the generator atoms (identity
    /// included), in length-lexicographic order.
    pub fn monomials(&self) -> Result<Vec<CMatrix>, AlgebraError> {
        if !self.span_hint.is_empty() {
            let mut out = vec![CMatrix::identity(self.dim)];
            out.extend(self.span_hint.iter().cloned());
            return Ok(out);
        }
        let atoms = self.atoms();
        let mut count: usize = 1;
        let mut power: usize = 1;
        for _ in 0..self.degree_cap {
            power = power.saturating_mul(atoms.len());
            count = count.saturating_add(power);
            if count > WORD_LIMIT {
                return Err(AlgebraError::WordLimit { cap: self.degree_cap, atoms: atoms.len() });
            }
        }
        let mut words = vec![CMatrix::identity(self.dim)];
        let mut prev: Vec<CMatrix> = vec![CMatrix::identity(self.dim)];
        for _len in 1..=self.degree_cap {
            let mut next = Vec::with_capacity(prev.len() * atoms.len());
            for w in &prev {
                for (_, a) in &atoms {
                    next.push(w.matmul(a));
                }
            }
            words.extend(next.iter().cloned());
            prev = next;
        }
        Ok(words)
    }

    /// Orthonormal basis of the algebra span. Deterministic for a fixed
    /// representation; saturation stops the enumeration early.
    pub fn span(&self) -> Result<HsBasis, AlgebraError> {
        let mut builder = SpanBuilder::new(self.dim, RANK_TOL);
        for m in self.monomials()? {
            builder.absorb(m)?;
            if builder.saturated() {
                break;
            }
        }
        Ok(builder.finish())
    }

    /// Span of the window-compressed monomials `W m W`; equals `span()`
    /// when no window is present.
    pub fn span_windowed(&self) -> Result<HsBasis, AlgebraError> {
        match &self.window {
            None => self.span(),
            Some(w) => {
                let mut builder = SpanBuilder::new(self.dim, RANK_TOL);
                for m in self.monomials()? {
                    builder.absorb(w.matmul(&m).matmul(w))?;
                }
                Ok(builder.finish())
            }
        }
    }

    /// Monomials of the opposite algebra: explicit hint, words in the
    /// declared opposite generators, or J-conjugates of the algebra
    /// monomials.
    pub fn opposite_monomials(&self) -> Result<Vec<CMatrix>, AlgebraError> {
        if !self.opposite_hint.is_empty() {
            let mut out = vec![CMatrix::identity(self.dim)];
            out.extend(self.opposite_hint.iter().cloned());
            return Ok(out);
        }
        if !self.opposite.is_empty() {
            let rep = AlgebraRep::new(self.dim, self.opposite.clone(), self.degree_cap)?;
            return rep.monomials();
        }
        if let Some(j) = &self.j {
            return Ok(self.monomials()?.iter().map(|m| j.opposite(m)).collect());
        }
        Err(AlgebraError::MissingOpposite)
    }

    /// Orthonormal basis of the opposite-algebra span, after validating the
    /// opposite structure: J-conjugated generators must reproduce declared
    /// opposite generators (when both exist), and opposite generators must
    /// commute with the algebra inside the window.
    pub fn opposite_span(&self) -> Result<HsBasis, AlgebraError> {
        let residual = self.opposite_defect()?;
        if residual > 1e-10 {
            return Err(AlgebraError::OppositeInconsistent { residual });
        }
        let mons = self.opposite_monomials()?;
        Ok(HsBasis::orthonormalize(self.dim, mons, RANK_TOL)?)
    }

    /// Worst inconsistency of the opposite structure (see `opposite_span`).
    pub fn opposite_defect(&self) -> Result<f64, AlgebraError> {
        if self.opposite.is_empty() && self.j.is_none() && self.opposite_hint.is_empty() {
            return Err(AlgebraError::MissingOpposite);
        }
        let mut worst = 0.0_f64;
        if let Some(j) = &self.j {
            for ((_, g), (_, go)) in self.generators.iter().zip(self.opposite.iter()) {
                let derived = j.opposite(g);
                let num = self.windowed(&(&derived - go)).hs_norm();
                worst = worst.max(num / go.hs_norm().max(1e-300));
            }
        }
        for (_, g) in &self.generators {
            for (_, go) in &self.opposite {
                let comm = g.commutator(go)?;
                worst = worst.max(self.windowed(&comm).hs_norm() / (g.hs_norm() * go.hs_norm()).max(1e-300));
            }
        }
        Ok(worst)
    }

    /// Commutant of this representation.
    pub fn commutant(&self) -> Result<HsBasis, AlgebraError> {
        let gens: Vec<CMatrix> = self.generators.iter().map(|(_, g)| g.clone()).collect();
        commutant(self.dim, &gens, SUBSPACE_TOL)
    }

    /// Center: elements of the span commuting with every generator, from
    /// the nullspace of the coefficient Gram of the constraint maps.
    pub fn center(&self) -> Result<HsBasis, AlgebraError> {
        let span = self.span()?;
        self.center_of_span_basis(&span)
    }

    pub fn center_of_span_basis(&self, span: &HsBasis) -> Result<HsBasis, AlgebraError> {
        let mut constraints: Vec<CMatrix> = self.generators.iter().map(|(_, g)| g.clone()).collect();
        for (_, g) in &self.generators {
            if !g.is_hermitian(1e-12) {
                constraints.push(g.dagger());
            }
        }
        center_of_span(self.dim, span, &constraints)
    }

    /// Compares the closure of `J A J⁻¹` with the commutant `A′` as
    /// subspaces. Equality is the scalarity property.
    pub fn check_scalarity(&self) -> Result<SubspaceReport, AlgebraError> {
        let j = self.j.as_ref().ok_or(AlgebraError::MissingJ)?;
        let conj: Vec<CMatrix> = self.monomials()?.iter().map(|m| j.conjugate_operator(m)).collect();
        let conj_span = HsBasis::orthonormalize(self.dim, conj, RANK_TOL)?;
        let comm = self.commutant()?;
        subspace_report(&conj_span, &comm, SUBSPACE_TOL)
    }
}

/// Result of comparing two subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceReport {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Worst relative projection residual in either direction.
    pub residual: f64,
    pub equal: bool,
}

/// Elements of a spanned subspace commuting with every constraint matrix:
/// the nullspace of the coefficient Gram `M[i,k] = Σ_g ⟨[Bᵢ,g],[Bₖ,g]⟩`.
pub fn center_of_span(dim: usize, span: &HsBasis, constraints: &[CMatrix]) -> Result<HsBasis, AlgebraError> {
    let r = span.len();
    if r == 0 {
        return Ok(HsBasis::empty(dim, RANK_TOL));
    }
    let mut comms: Vec<Vec<CMatrix>> = Vec::with_capacity(r);
    for b in span.elems() {
        comms.push(constraints.iter().map(|g| b.commutator(g).expect("square")).collect());
    }
    let gram = CMatrix::from_fn(r, r, |i, k| {
        (0..constraints.len()).map(|j| comms[i][j].hs_inner(&comms[k][j])).sum()
    });
    let (eigs, v) = eig_hermitian(&gram)?;
    let gscale = constraints.iter().fold(0.0_f64, |m, g| m.max(g.hs_norm() * g.hs_norm()));
    let top = eigs.last().copied().unwrap_or(0.0).max(gscale);
    let cut = top * 1e-12;
    let mut elems = Vec::new();
    for (idx, &lam) in eigs.iter().enumerate() {
        if lam <= cut {
            let mut m = CMatrix::zeros(dim, dim);
            for (i, b) in span.elems().iter().enumerate() {
                m = &m + &b.scale(v[(i, idx)]);
            }
            elems.push(m);
        }
    }
    Ok(HsBasis::orthonormalize(dim, elems, RANK_TOL)?)
}

/// Mutual-projection subspace comparison at tolerance `tol`.
pub fn subspace_report(a: &HsBasis, b: &HsBasis, tol: f64) -> Result<SubspaceReport, AlgebraError> {
    let residual = a.mutual_residual(b)?;
    Ok(SubspaceReport {
        dim_a: a.len(),
        dim_b: b.len(),
        residual,
        equal: a.len() == b.len() && residual < tol,
    })
}

fn monomial_structure(g: &CMatrix) -> Option<(Vec<usize>, Vec<C64>)> {
    let n = g.rows();
    let floor = g.max_abs() * 1e-13;
    if floor == 0.0 {
        return None;
    }
    let mut perm = vec![usize::MAX; n];
    let mut phase = vec![C64::new(0.0, 0.0); n];
    let mut row_used = vec![false; n];
    for c in 0..n {
        let mut hit: Option<usize> = None;
        for r in 0..n {
            if g[(r, c)].norm() > floor {
                if hit.is_some() {
                    return None;
                }
                hit = Some(r);
            }
        }
        let r = hit?;
        if row_used[r] {
            return None;
        }
        row_used[r] = true;
        perm[c] = r;
        phase[c] = g[(r, c)];
    }
    Some((perm, phase))
}

/// Weighted union-find over matrix positions with complex transport weights.
struct PhaseUnion {
    parent: Vec<usize>,
    weight: Vec<C64>,
    dead: Vec<bool>,
}

impl PhaseUnion {
    fn new(n: usize) -> Self {
        PhaseUnion { parent: (0..n).collect(), weight: vec![C64::new(1.0, 0.0); n], dead: vec![false; n] }
    }

    /// Returns (root, w) with `value[x] = w · value[root]`.
    fn find(&mut self, x: usize) -> (usize, C64) {
        if self.parent[x] == x {
            return (x, self.weight[x]);
        }
        let (root, wp) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.weight[x] = self.weight[x] * wp;
        (root, self.weight[x])
    }

    /// Impose `value[b] = m · value[a]`.
    fn relate(&mut self, a: usize, b: usize, m: C64) {
        let (ra, wa) = self.find(a);
        let (rb, wb) = self.find(b);
        if ra == rb {
            // phase transport around a closed orbit must be trivial,
            // otherwise the orbit carries only the zero matrix
            if (m * wa - wb).norm() > 1e-9 {
                self.dead[ra] = true;
            }
            return;
        }
        self.parent[rb] = ra;
        self.weight[rb] = m * wa / wb;
        let dead = self.dead[ra] || self.dead[rb];
        self.dead[ra] = dead;
    }
}

/// Commutant of a family of invertible monomial (generalized permutation)
/// matrices, computed combinatorially: matrix positions are grouped into
/// orbits of the conjugation action with exact phase transport, and each
/// phase-consistent orbit contributes one basis element.
fn commutant_monomial(dim: usize, gens: &[(Vec<usize>, Vec<C64>)]) -> HsBasis {
    let npos = dim * dim;
    let mut uf = PhaseUnion::new(npos);
    for (perm, phase) in gens {
        for r in 0..dim {
            for c in 0..dim {
                let src = r * dim + c;
                let dst = perm[r] * dim + perm[c];
                // g X g⁻¹: X'[π r, π c] = φ_r φ_c⁻¹ X[r,c]
                let m = phase[r] / phase[c];
                uf.relate(src, dst, m);
            }
        }
    }
    let mut groups: Vec<Vec<(usize, C64)>> = Vec::new();
    let mut root_slot = vec![usize::MAX; npos];
    for x in 0..npos {
        let (root, w) = uf.find(x);
        if uf.dead[root] {
            continue;
        }
        if root_slot[root] == usize::MAX {
            root_slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[root]].push((x, w));
    }
    let mut elems = Vec::with_capacity(groups.len());
    for grp in groups {
        let mut m = CMatrix::zeros(dim, dim);
        let mut norm_sq = 0.0;
        for &(pos, w) in &grp {
            m[(pos / dim, pos % dim)] = w;
            norm_sq += w.norm_sqr();
        }
        elems.push(m.scale_re(1.0 / libm::sqrt(norm_sq)));
    }
    HsBasis::orthonormalize(dim, elems, RANK_TOL).expect("orbit supports are disjoint")
}

/// Commutant basis of a generator family: all `X` with `[X, g] = 0` for
/// every generator.
///
/// Monomial generator families (every cyclic model here) go through an
/// exact combinatorial orbit construction; anything else solves the common
/// nullspace of the Sylvester maps `X ↦ gX − Xg` as a dense Hermitian
/// eigenproblem on vec(X), which is refused above a size guard.
pub fn commutant(dim: usize, gens: &[CMatrix], tol: f64) -> Result<HsBasis, AlgebraError> {
    if gens.is_empty() {
        return Err(AlgebraError::EmptyGenerators);
    }
    let structures: Option<Vec<_>> = gens.iter().map(monomial_structure).collect();
    if let Some(st) = structures {
        return Ok(commutant_monomial(dim, &st));
    }
    if dim > DENSE_COMMUTANT_MAX_DIM {
        return Err(AlgebraError::DimTooLarge { dim });
    }
    let n2 = dim * dim;
    let mut gram = CMatrix::zeros(n2, n2);
    let ident = CMatrix::identity(dim);
    let mut constraint_scale = 0.0_f64;
    let mut all: Vec<CMatrix> = gens.to_vec();
    for g in gens {
        if !g.is_hermitian(1e-12) {
            all.push(g.dagger());
        }
    }
    for g in &all {
        let l = &g.kron(&ident) - &ident.kron(&g.transpose());
        gram = &gram + &l.dagger().matmul(&l);
        constraint_scale = constraint_scale.max(g.hs_norm() * g.hs_norm());
    }
    let (eigs, v) = eig_hermitian(&gram)?;
    let top = eigs.last().copied().unwrap_or(0.0).max(constraint_scale);
    let cut = top * (tol * tol).max(1e-13);
    let mut elems = Vec::new();
    for (idx, &lam) in eigs.iter().enumerate() {
        if lam <= cut {
            let m = CMatrix::from_fn(dim, dim, |r, c| v[(r * dim + c, idx)]);
            elems.push(m);
        }
    }
    Ok(HsBasis::orthonormalize(dim, elems, RANK_TOL)?)
}

/// A finite-dimensional C*-algebra `⊕ₖ M_{nₖ}` acting on itself by left
/// multiplication, with the matrix units as generators, `J ψ = ψ†`, right
/// multiplications as opposite generators, and the block identities as
/// distinguished central projections.
pub struct GnsRep {
    pub rep: AlgebraRep,
    pub projections: Vec<CMatrix>,
    pub blocks: Vec<usize>,
}

/// Basis layout of the self-representation: index of `E^k_{ij}`.
pub fn gns_index(blocks: &[usize], block: usize, i: usize, j: usize) -> usize {
    let offset: usize = blocks[..block].iter().map(|n| n * n).sum();
    offset + i * blocks[block] + j
}

pub fn gns_self_rep(blocks: &[usize]) -> Result<GnsRep, AlgebraError> {
    if blocks.is_empty() || blocks.iter().any(|&n| n == 0) {
        return Err(AlgebraError::ZeroBlockSize);
    }
    let dim: usize = blocks.iter().map(|n| n * n).sum();
    let mut gens = Vec::new();
    let mut opposite = Vec::new();
    let mut span_hint = Vec::new();
    let mut opp_hint = Vec::new();
    for (k, &nk) in blocks.iter().enumerate() {
        for i in 0..nk {
            for j in 0..nk {
                // left multiplication: E_ij E_ab = δ_ja E_ib
                let mut left = CMatrix::zeros(dim, dim);
                // right multiplication: E_ab E_ij = δ_bi E_aj
                let mut right = CMatrix::zeros(dim, dim);
                for b in 0..nk {
                    left[(gns_index(blocks, k, i, b), gns_index(blocks, k, j, b))] = C64::new(1.0, 0.0);
                    right[(gns_index(blocks, k, b, j), gns_index(blocks, k, b, i))] = C64::new(1.0, 0.0);
                }
                let label = format!("e{}_{}{}", k + 1, i + 1, j + 1);
                span_hint.push(left.clone());
                opp_hint.push(right.clone());
                gens.push((label.clone(), left));
                opposite.push((format!("{label}o"), right));
            }
        }
    }
    // J ψ = ψ†: transposition permutation followed by conjugation.
    let mut k_mat = CMatrix::zeros(dim, dim);
    for (k, &nk) in blocks.iter().enumerate() {
        for i in 0..nk {
            for j in 0..nk {
                k_mat[(gns_index(blocks, k, i, j), gns_index(blocks, k, j, i))] = C64::new(1.0, 0.0);
            }
        }
    }
    let projections: Vec<CMatrix> = (0..blocks.len())
        .map(|k| {
            let mut p = CMatrix::zeros(dim, dim);
            for i in 0..blocks[k] {
                for b in 0..blocks[k] {
                    p[(gns_index(blocks, k, i, b), gns_index(blocks, k, i, b))] = C64::new(1.0, 0.0);
                }
            }
            p
        })
        .collect();
    let rep = AlgebraRep::new(dim, gens, 2)?
        .with_j(AntiUnitary::new(k_mat)?)
        .with_opposite(opposite)
        .with_span_hint(span_hint)
        .with_opposite_hint(opp_hint);
    Ok(GnsRep { rep, projections, blocks: blocks.to_vec() })
}
