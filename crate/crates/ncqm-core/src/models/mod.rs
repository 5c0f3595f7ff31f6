//! Builders for the model families of noncommutative configuration
//! spaces. Each family produces a [`ModelBundle`]: a represented algebra
//! with its distinguished operators, basis layout, monomial spanning sets,
//! and window machinery for truncation-safe checks.

mod almost_commutative;
mod double_torus;
mod finite_sum;
pub(crate) mod monomial;
mod moyal;
mod nc_torus;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{center_of_span, AlgebraError, AlgebraRep, RANK_TOL};
use crate::linalg::{CMatrix, HsBasis, LinalgError, SpanBuilder, C64};
use monomial::MonomialOp;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    Algebra(AlgebraError),
    Linalg(LinalgError),
    BadSpec(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Algebra(e) => write!(f, "{e}"),
            ModelError::Linalg(e) => write!(f, "{e}"),
            ModelError::BadSpec(msg) => write!(f, "invalid model spec: {msg}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<AlgebraError> for ModelError {
    fn from(e: AlgebraError) -> Self {
        ModelError::Algebra(e)
    }
}

impl From<LinalgError> for ModelError {
    fn from(e: LinalgError) -> Self {
        ModelError::Linalg(e)
    }
}

/// Lattice truncation style for the torus families.
///
/// Cyclic mode wraps indices modulo N and keeps the defining relations
/// exact (rational deformation parameter only); truncated mode keeps a
/// finite index box with boundary-annihilating shifts and window-projected
/// assertions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusMode {
    Cyclic,
    Truncated,
}

/// Deformation angle θ in `λ = e^{2πiθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Rational { p: i64, q: i64 },
    Real(f64),
}

impl ThetaSpec {
    pub fn value(&self) -> f64 {
        match self {
            ThetaSpec::Rational { p, q } => *p as f64 / *q as f64,
            ThetaSpec::Real(t) => *t,
        }
    }

    pub fn lambda(&self) -> C64 {
        match self {
            ThetaSpec::Rational { p, q } => root_phase(*p, *q),
            ThetaSpec::Real(t) => real_phase(*t, 1),
        }
    }
}

/// Declarative description of a model instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// `⊕ₖ M_{nₖ}` in its self-representation.
    FiniteSum { blocks: Vec<usize> },
    /// Smooth functions on the circle (Fourier modes `|k| ≤ modes`) tensor
    /// a full matrix fiber.
    AlmostCommutative { modes: usize, fiber: usize, window_margin: usize },
    /// The Moyal plane `[x₁,x₂] = iθ` acting on itself, truncated to
    /// `levels` Fock levels (Hilbert dimension `levels²`).
    Moyal { levels: usize, theta: f64, window_margin: usize },
    /// Crossed product of the two-torus with the circle-swapping flip.
    DoubleTorus { size: usize, mode: TorusMode, window_margin: usize },
    /// The noncommutative torus `U₁U₂ = λU₂U₁`.
    NcTorus { theta: ThetaSpec, size: usize, mode: TorusMode, window_margin: usize },
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::FiniteSum { .. } => "finite_sum",
            ModelSpec::AlmostCommutative { .. } => "almost_commutative",
            ModelSpec::Moyal { .. } => "moyal",
            ModelSpec::DoubleTorus { .. } => "double_torus",
            ModelSpec::NcTorus { .. } => "nc_torus",
        }
    }

    pub fn window_margin(&self) -> usize {
        match self {
            ModelSpec::FiniteSum { .. } => 0,
            ModelSpec::AlmostCommutative { window_margin, .. }
            | ModelSpec::Moyal { window_margin, .. }
            | ModelSpec::DoubleTorus { window_margin, .. }
            | ModelSpec::NcTorus { window_margin, .. } => *window_margin,
        }
    }
}

/// A labeled spanning monomial with its lattice displacement degree, used
/// for window bookkeeping when probes are selected.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub label: String,
    pub degree: usize,
    pub mat: CMatrix,
}

/// Basis-index layout: round-trips linear indices and quantum numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Index of `E^k_{ij}`; quantum numbers (block, i, j).
    Blocks { blocks: Vec<usize> },
    /// Fourier mode and fiber component; quantum numbers (k, f) with
    /// `|k| ≤ modes`.
    CircleBundle { modes: i64, fiber: usize },
    /// Matrix unit `|j⟩⟨k|` of the doubled Fock space; quantum (j, k).
    FockPair { levels: usize },
    /// Torus lattice points, one or two sectors; quantum (n₁, n₂[, s]).
    TorusLattice { size: usize, mode: TorusMode, sectors: usize },
}

impl Layout {
    pub fn dim(&self) -> usize {
        match self {
            Layout::Blocks { blocks } => blocks.iter().map(|n| n * n).sum(),
            Layout::CircleBundle { modes, fiber } => (2 * *modes as usize + 1) * fiber,
            Layout::FockPair { levels } => levels * levels,
            Layout::TorusLattice { size, mode, sectors } => {
                let side = match mode {
                    TorusMode::Cyclic => *size,
                    TorusMode::Truncated => 2 * size + 1,
                };
                side * side * sectors
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Layout::Blocks { blocks } => format!("matrix units E^k_ij of blocks {blocks:?}"),
            Layout::CircleBundle { modes, fiber } => {
                format!("|k⟩⊗C^{fiber} with Fourier modes |k| ≤ {modes}")
            }
            Layout::FockPair { levels } => format!("|j⟩⟨k| with Fock levels j,k < {levels}"),
            Layout::TorusLattice { size, mode, sectors } => match mode {
                TorusMode::Cyclic => format!("lattice Z_{size} × Z_{size}, {sectors} sector(s)"),
                TorusMode::Truncated => format!("lattice box |nᵢ| ≤ {size}, {sectors} sector(s)"),
            },
        }
    }

    /// Quantum numbers of a basis index.
    pub fn quantum(&self, idx: usize) -> Vec<i64> {
        match self {
            Layout::Blocks { blocks } => {
                let mut rest = idx;
                for (k, &n) in blocks.iter().enumerate() {
                    if rest < n * n {
                        return alloc::vec![k as i64, (rest / n) as i64, (rest % n) as i64];
                    }
                    rest -= n * n;
                }
                panic!("index out of range");
            }
            Layout::CircleBundle { modes, fiber } => {
                let k = (idx / fiber) as i64 - modes;
                alloc::vec![k, (idx % fiber) as i64]
            }
            Layout::FockPair { levels } => alloc::vec![(idx / levels) as i64, (idx % levels) as i64],
            Layout::TorusLattice { size, mode, sectors } => {
                let side = match mode {
                    TorusMode::Cyclic => *size,
                    TorusMode::Truncated => 2 * size + 1,
                };
                let (sector, rem) = (idx / (side * side), idx % (side * side));
                let (a, b) = (rem / side, rem % side);
                let (n1, n2) = match mode {
                    TorusMode::Cyclic => (rep_mod(a as i64, *size), rep_mod(b as i64, *size)),
                    TorusMode::Truncated => (a as i64 - *size as i64, b as i64 - *size as i64),
                };
                if *sectors == 2 {
                    alloc::vec![n1, n2, sector as i64]
                } else {
                    alloc::vec![n1, n2]
                }
            }
        }
    }

    /// Basis index of quantum numbers; `None` outside the lattice.
    pub fn index(&self, q: &[i64]) -> Option<usize> {
        match self {
            Layout::Blocks { blocks } => {
                let (k, i, j) = (q[0] as usize, q[1] as usize, q[2] as usize);
                if k >= blocks.len() || i >= blocks[k] || j >= blocks[k] {
                    return None;
                }
                let offset: usize = blocks[..k].iter().map(|n| n * n).sum();
                Some(offset + i * blocks[k] + j)
            }
            Layout::CircleBundle { modes, fiber } => {
                let (k, f) = (q[0], q[1] as usize);
                if k.abs() > *modes || f >= *fiber {
                    return None;
                }
                Some(((k + modes) as usize) * fiber + f)
            }
            Layout::FockPair { levels } => {
                let (j, k) = (q[0] as usize, q[1] as usize);
                if j >= *levels || k >= *levels {
                    return None;
                }
                Some(j * levels + k)
            }
            Layout::TorusLattice { size, mode, sectors } => {
                let sector = if *sectors == 2 { q[2] as usize } else { 0 };
                if sector >= *sectors {
                    return None;
                }
                match mode {
                    TorusMode::Cyclic => {
                        let n = *size as i64;
                        let a = q[0].rem_euclid(n) as usize;
                        let b = q[1].rem_euclid(n) as usize;
                        Some(sector * size * size + a * *size + b)
                    }
                    TorusMode::Truncated => {
                        let l = *size as i64;
                        if q[0].abs() > l || q[1].abs() > l {
                            return None;
                        }
                        let side = (2 * l + 1) as usize;
                        Some(sector * side * side + (q[0] + l) as usize * side + (q[1] + l) as usize)
                    }
                }
            }
        }
    }
}

/// How the weak-uncertainty check selects its probe pair.
///
/// Models with a nontrivial center probe `[z, ḃ]` over the center basis;
/// the Moyal plane (trivial center) probes the canonical relation
/// `[xₖ, ẋₗ]` over its generators instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakProbeMode {
    CenterBasis,
    Generators,
}

/// Family-specific window geometry.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum WindowKind {
    None,
    /// Keep Fourier modes `|k| ≤ modes − margin`.
    CircleModes { modes: i64, fiber: usize },
    /// Keep left Fock index `j ≤ levels − 1 − margin`.
    FockLeft { levels: usize },
    /// Keep lattice points with `|rep(nᵢ)| ≤ radius − margin`.
    Torus { size: usize, mode: TorusMode, sectors: usize },
}

/// One built model: represented algebra plus distinguished operators and
/// everything the checks need.
pub struct ModelBundle {
    pub spec: ModelSpec,
    pub name: String,
    pub rep: AlgebraRep,
    pub named: BTreeMap<String, CMatrix>,
    pub layout: Layout,
    /// Raw (unwindowed) spanning monomials of the algebra.
    pub span_mons: Vec<Monomial>,
    /// Raw spanning monomials of the opposite algebra, when one exists.
    pub opp_mons: Option<Vec<Monomial>>,
    /// Structural center representatives, for families where the generic
    /// center computation is unavailable or polluted by truncation.
    pub center_mons: Option<Vec<Monomial>>,
    pub weak_probe_mode: WeakProbeMode,
    pub(crate) window_kind: WindowKind,
    /// Deduplicated monomials of the product algebra `A·A°`, tagged with
    /// the word degrees of their algebra and opposite factors.
    pub(crate) product_ops: Option<Vec<(usize, usize, MonomialOp)>>,
}

impl ModelBundle {
    pub fn build(spec: &ModelSpec) -> Result<ModelBundle, ModelError> {
        match spec {
            ModelSpec::FiniteSum { blocks } => finite_sum::build(spec, blocks),
            ModelSpec::AlmostCommutative { modes, fiber, window_margin } => {
                almost_commutative::build(spec, *modes, *fiber, *window_margin)
            }
            ModelSpec::Moyal { levels, theta, window_margin } => {
                moyal::build(spec, *levels, *theta, *window_margin)
            }
            ModelSpec::DoubleTorus { size, mode, window_margin } => {
                double_torus::build(spec, *size, *mode, *window_margin)
            }
            ModelSpec::NcTorus { theta, size, mode, window_margin } => {
                nc_torus::build(spec, *theta, *size, *mode, *window_margin)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn named_op(&self, label: &str) -> Option<&CMatrix> {
        self.named.get(label)
    }

    /// Window projector at the given margin; `None` means no windowing.
    pub fn window(&self, margin: usize) -> Option<CMatrix> {
        window_for(&self.window_kind, self.rep.dim(), margin)
    }

    /// `W X W` at the given margin.
    pub fn windowed(&self, x: &CMatrix, margin: usize) -> CMatrix {
        match self.window(margin) {
            Some(w) => apply_window(&w, x),
            None => x.clone(),
        }
    }

    /// Largest window-relevant radial growth produced by an operator: the
    /// maximal change of the sup-norm of the lattice coordinates between
    /// the column and row of any non-negligible entry. Window margins grow
    /// by this amount per operator factor. Shifts grow the radius by their
    /// size; coordinate swaps and sector flips (which stay exact under
    /// truncation) grow it by nothing.
    pub fn displacement(&self, x: &CMatrix) -> usize {
        let floor = x.max_abs() * 1e-12;
        if floor <= 0.0 {
            return 0;
        }
        let radius = |idx: usize| -> i64 {
            match &self.window_kind {
                WindowKind::None => 0,
                WindowKind::CircleModes { fiber, modes } => ((idx / fiber) as i64 - modes).abs(),
                WindowKind::FockLeft { levels } => (idx / levels) as i64,
                WindowKind::Torus { .. } => {
                    let q = self.layout.quantum(idx);
                    q[0].abs().max(q[1].abs())
                }
            }
        };
        let mut worst: i64 = 0;
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                if x[(r, c)].norm() > floor {
                    worst = worst.max((radius(r) - radius(c)).abs());
                }
            }
        }
        worst as usize
    }

    /// Largest admissible window margin (the window keeps at least the
    /// central lattice site).
    pub fn max_margin(&self) -> usize {
        match &self.window_kind {
            WindowKind::None => 0,
            WindowKind::CircleModes { modes, .. } => *modes as usize,
            WindowKind::FockLeft { levels } => levels - 1,
            WindowKind::Torus { size, mode, .. } => match mode {
                TorusMode::Cyclic => size / 2,
                TorusMode::Truncated => *size,
            },
        }
    }

    /// Clamp a wanted margin to the admissible range.
    pub fn clamp_margin(&self, wanted: usize) -> usize {
        wanted.min(self.max_margin())
    }

    /// Orthonormal span structures at the given window margin with an
    /// unrestricted product span.
    pub fn spans(&self, margin: usize) -> Result<Spans, ModelError> {
        self.spans_select(margin, true, Some(usize::MAX))
    }

    /// Algebra span and center only — the membership targets of the
    /// center-based checks. Skips the (potentially large) opposite and
    /// product spans.
    pub fn spans_basic(&self, margin: usize) -> Result<Spans, ModelError> {
        self.spans_select(margin, false, None)
    }

    /// Algebra, center, and the degree-capped product span.
    pub fn spans_capped(&self, margin: usize, product_cap: usize) -> Result<Spans, ModelError> {
        self.spans_select(margin, false, Some(product_cap))
    }

    /// Orthonormal span structures at the given window margin. The span
    /// bases are built from window-compressed monomials (the projection
    /// targets); the center basis holds raw representatives (the probes).
    /// `product_cap` bounds the factor word degrees admitted into the
    /// product-algebra span — the finite proxy for the decaying-coefficient
    /// expansions of `A·A°` (cyclic lattices saturate without it).
    fn spans_select(
        &self,
        margin: usize,
        want_opposite: bool,
        product_cap: Option<usize>,
    ) -> Result<Spans, ModelError> {
        let dim = self.rep.dim();
        let window = self.window(margin);
        let compress = |m: &CMatrix| -> CMatrix {
            match &window {
                Some(w) => apply_window(w, m),
                None => m.clone(),
            }
        };
        let mut ab = SpanBuilder::new(dim, RANK_TOL);
        ab.absorb(compress(&CMatrix::identity(dim)))?;
        for m in &self.span_mons {
            ab.absorb(compress(&m.mat))?;
        }
        let algebra = ab.finish();

        let opposite = match (&self.opp_mons, want_opposite) {
            (Some(mons), true) => {
                let mut b = SpanBuilder::new(dim, RANK_TOL);
                b.absorb(compress(&CMatrix::identity(dim)))?;
                for m in mons {
                    b.absorb(compress(&m.mat))?;
                }
                Some(b.finish())
            }
            _ => None,
        };

        let product = match (&self.product_ops, product_cap) {
            (Some(ops), Some(cap)) => {
                let mut b = SpanBuilder::new(dim, RANK_TOL);
                b.absorb(compress(&CMatrix::identity(dim)))?;
                for (da, db, op) in ops {
                    if *da <= cap && *db <= cap {
                        b.absorb(compress(&op.to_matrix()))?;
                    }
                }
                Some(b.finish())
            }
            _ => None,
        };

        let center = match &self.center_mons {
            Some(mons) => {
                let mut b = SpanBuilder::new(dim, RANK_TOL);
                for m in mons {
                    b.absorb(m.mat.clone())?;
                }
                b.finish()
            }
            None => {
                // exact representations: generic center of the raw span
                let mut raw = SpanBuilder::new(dim, RANK_TOL);
                raw.absorb(CMatrix::identity(dim))?;
                for m in &self.span_mons {
                    raw.absorb(m.mat.clone())?;
                }
                let raw_span = raw.finish();
                let constraints: Vec<CMatrix> =
                    self.rep.generators().iter().map(|(_, g)| g.clone()).collect();
                center_of_span(dim, &raw_span, &constraints)?
            }
        };

        Ok(Spans {
            algebra,
            opposite,
            product,
            center,
            window,
            margin,
            product_cap: product_cap.unwrap_or(0),
        })
    }
}

/// Span structures of one model at one window margin.
pub struct Spans {
    /// Windowed span of the algebra.
    pub algebra: HsBasis,
    /// Windowed span of the opposite algebra.
    pub opposite: Option<HsBasis>,
    /// Windowed span of the product algebra `A·A°`.
    pub product: Option<HsBasis>,
    /// Raw central representatives.
    pub center: HsBasis,
    pub window: Option<CMatrix>,
    pub margin: usize,
    /// Factor word-degree cap applied to the product span.
    pub product_cap: usize,
}

impl Spans {
    pub fn windowed(&self, x: &CMatrix) -> CMatrix {
        match &self.window {
            Some(w) => apply_window(w, x),
            None => x.clone(),
        }
    }
}

/// Symmetric representative of `x mod n` in `[−⌊n/2⌋, ⌈n/2⌉−1]`.
pub fn rep_mod(x: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = x.rem_euclid(n);
    if r >= (n + 1) / 2 {
        r - n
    } else {
        r
    }
}

/// `e^{2πi·num/den}` with the exponent reduced exactly.
pub(crate) fn root_phase(num: i64, den: i64) -> C64 {
    let r = num.rem_euclid(den);
    C64::from_polar(1.0, 2.0 * core::f64::consts::PI * r as f64 / den as f64)
}

/// `e^{2πi·θ·k}` with the angle reduced to [0,1).
pub(crate) fn real_phase(theta: f64, k: i64) -> C64 {
    let x = theta * k as f64;
    C64::from_polar(1.0, 2.0 * core::f64::consts::PI * (x - libm::floor(x)))
}

pub(crate) fn window_for(kind: &WindowKind, dim: usize, margin: usize) -> Option<CMatrix> {
    match kind {
        WindowKind::None => None,
        WindowKind::CircleModes { modes, fiber } => {
            let cut = modes - margin as i64;
            Some(diag_projector(dim, |idx| ((idx / fiber) as i64 - modes).abs() <= cut))
        }
        WindowKind::FockLeft { levels } => {
            if margin == 0 {
                return None;
            }
            let cut = levels.saturating_sub(margin);
            Some(diag_projector(dim, |idx| idx / levels < cut))
        }
        WindowKind::Torus { size, mode, sectors } => {
            if margin == 0 && *mode == TorusMode::Cyclic {
                return None;
            }
            let layout = Layout::TorusLattice { size: *size, mode: *mode, sectors: *sectors };
            let radius = match mode {
                TorusMode::Cyclic => (*size / 2) as i64,
                TorusMode::Truncated => *size as i64,
            };
            let cut = radius - margin as i64;
            Some(diag_projector(dim, |idx| {
                let q = layout.quantum(idx);
                q[0].abs() <= cut && q[1].abs() <= cut
            }))
        }
    }
}

pub(crate) fn diag_projector(dim: usize, keep: impl Fn(usize) -> bool) -> CMatrix {
    let mut w = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        if keep(i) {
            w[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    w
}

/// `W X W` for a diagonal 0/1 projector, applied by masking entries.
pub fn apply_window(w: &CMatrix, x: &CMatrix) -> CMatrix {
    let dim = x.rows();
    let keep: Vec<bool> = (0..dim).map(|i| w[(i, i)].re > 0.5).collect();
    CMatrix::from_fn(dim, x.cols(), |r, c| {
        if keep[r] && keep[c] {
            x[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep_mod_symmetric_ranges() {
        assert_eq!((0..5).map(|x| rep_mod(x, 5)).collect::<Vec<_>>(), alloc::vec![0, 1, 2, -2, -1]);
        assert_eq!((0..6).map(|x| rep_mod(x, 6)).collect::<Vec<_>>(), alloc::vec![0, 1, 2, -3, -2, -1]);
    }

    #[test]
    fn layouts_round_trip() {
        let layouts = [
            Layout::Blocks { blocks: alloc::vec![2, 3] },
            Layout::CircleBundle { modes: 4, fiber: 2 },
            Layout::FockPair { levels: 5 },
            Layout::TorusLattice { size: 5, mode: TorusMode::Cyclic, sectors: 1 },
            Layout::TorusLattice { size: 3, mode: TorusMode::Truncated, sectors: 2 },
        ];
        for layout in layouts {
            for idx in 0..layout.dim() {
                let q = layout.quantum(idx);
                assert_eq!(layout.index(&q), Some(idx), "{layout:?} at {idx} -> {q:?}");
            }
        }
    }

    #[test]
    fn builders_are_bit_deterministic() {
        let specs = [
            ModelSpec::NcTorus {
                theta: ThetaSpec::Rational { p: 1, q: 5 },
                size: 5,
                mode: TorusMode::Cyclic,
                window_margin: 1,
            },
            ModelSpec::Moyal { levels: 6, theta: 0.7, window_margin: 1 },
            ModelSpec::DoubleTorus { size: 4, mode: TorusMode::Cyclic, window_margin: 1 },
        ];
        for spec in &specs {
            let a = ModelBundle::build(spec).unwrap();
            let b = ModelBundle::build(spec).unwrap();
            for ((la, ga), (lb, gb)) in a.rep.generators().iter().zip(b.rep.generators().iter()) {
                assert_eq!(la, lb);
                assert!(ga.data().iter().zip(gb.data().iter()).all(|(x, y)| x == y));
            }
            for (label, m) in &a.named {
                let n = b.named.get(label).expect("same named operators");
                assert!(m.data().iter().zip(n.data().iter()).all(|(x, y)| x == y));
            }
        }
    }

    #[test]
    fn root_phase_is_exact_on_multiples() {
        let z = root_phase(5, 5);
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((root_phase(3, 2) - C64::new(-1.0, 0.0)).norm() < 1e-12);
    }
}
