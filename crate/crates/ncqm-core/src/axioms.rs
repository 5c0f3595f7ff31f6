//! Residual-based certification of the structural axioms for a
//! (model, Hamiltonian) pair: weak and strong uncertainty, their
//! finite-dimensional equivalence, positivity and nontriviality, the
//! reality condition, plus the Moyal consistency relation and the
//! fiber-velocity lemma of the circle bundle.
//!
//! Membership of an operator in an algebra is operationalized as the
//! relative Hilbert–Schmidt projection residual against the windowed,
//! degree-capped span; the window margin of every check grows with the
//! probe word degrees plus the Hamiltonian displacement, so truncation
//! artifacts never enter the compared entries.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{commutant, subspace_report, AlgebraError};
use crate::dynamics::{velocity, DynError, HamiltonianSpec, WordPoly};
use crate::linalg::{eig_hermitian, CMatrix, HsBasis, LinalgError, SpanBuilder, C64};
use crate::models::{ModelBundle, ModelError, Monomial, Spans, WeakProbeMode};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub enum CheckError {
    Linalg(LinalgError),
    Algebra(AlgebraError),
    Model(ModelError),
    Dyn(DynError),
    /// The check does not apply to this model family.
    Unsupported { check: String, model: String },
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::Linalg(e) => write!(f, "{e}"),
            CheckError::Algebra(e) => write!(f, "{e}"),
            CheckError::Model(e) => write!(f, "{e}"),
            CheckError::Dyn(e) => write!(f, "{e}"),
            CheckError::Unsupported { check, model } => {
                write!(f, "check '{check}' does not apply to model '{model}'")
            }
        }
    }
}

impl core::error::Error for CheckError {}

impl From<LinalgError> for CheckError {
    fn from(e: LinalgError) -> Self {
        CheckError::Linalg(e)
    }
}

impl From<AlgebraError> for CheckError {
    fn from(e: AlgebraError) -> Self {
        CheckError::Algebra(e)
    }
}

impl From<ModelError> for CheckError {
    fn from(e: ModelError) -> Self {
        CheckError::Model(e)
    }
}

impl From<DynError> for CheckError {
    fn from(e: DynError) -> Self {
        CheckError::Dyn(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Window parameters recorded with every check.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowInfo {
    pub margin: usize,
    pub kept_dim: usize,
    pub total_dim: usize,
}

/// Outcome of one named check: labeled residuals against one tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub residuals: Vec<(String, f64)>,
    pub tolerance: f64,
    pub window: WindowInfo,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(
        check: &str,
        bundle: &ModelBundle,
        residuals: Vec<(String, f64)>,
        tolerance: f64,
        window: WindowInfo,
        notes: Vec<String>,
    ) -> CheckReport {
        let verdict = if residuals.iter().all(|(_, r)| *r < tolerance) { Verdict::Pass } else { Verdict::Fail };
        CheckReport {
            check: String::from(check),
            model: bundle.name.clone(),
            residuals,
            tolerance,
            window,
            verdict,
            notes,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |m, (_, r)| m.max(*r))
    }
}

/// Tunables shared by the checks.
#[derive(Debug, Clone, Copy)]
pub struct CheckOpts {
    pub seed: u64,
    /// Number of sampled Hermitian probe combinations.
    pub samples: usize,
    pub tolerance: f64,
    /// Probe word degree; window margins grow as probe degree plus the
    /// Hamiltonian displacement.
    pub probe_degree: usize,
}

impl Default for CheckOpts {
    fn default() -> Self {
        CheckOpts { seed: 0x5eed, samples: 32, tolerance: 1e-8, probe_degree: 2 }
    }
}

fn window_info(bundle: &ModelBundle, margin: usize) -> WindowInfo {
    let total = bundle.dim();
    let kept = match bundle.window(margin) {
        None => total,
        Some(w) => (0..total).filter(|&i| w[(i, i)].re > 0.5).count(),
    };
    WindowInfo { margin, kept_dim: kept, total_dim: total }
}

/// Membership residual of `W X W` against a windowed span basis,
/// normalized by the scale of the probes that produced `X` rather than by
/// `‖X‖` itself — commutators that vanish identically must count as
/// members, not as noise directions.
fn membership_residual(spans: &Spans, x: &CMatrix, basis: &HsBasis, scale: f64) -> Result<f64, CheckError> {
    let xw = spans.windowed(x);
    Ok(basis.absolute_residual(&xw)? / scale.max(xw.hs_norm()).max(1e-300))
}

/// Scale of a commutator `[a, b]`: the product of the windowed operator
/// norms.
fn pair_scale(spans: &Spans, a: &CMatrix, b: &CMatrix) -> f64 {
    spans.windowed(a).hs_norm() * spans.windowed(b).hs_norm()
}

/// Monomials of degree at most `cap`.
fn filter_by_degree(mons: &[Monomial], cap: usize) -> Vec<&Monomial> {
    mons.iter().filter(|m| m.degree <= cap).collect()
}

/// Seeded Hermitian combinations of the listed monomials.
fn sampled_hermitian(mons: &[&Monomial], count: usize, dim: usize, rng: &mut SplitMix64) -> Vec<CMatrix> {
    (0..count)
        .map(|_| {
            let mut m = CMatrix::zeros(dim, dim);
            for mon in mons {
                m = &m + &mon.mat.scale_re(rng.next_sym());
            }
            m.hermitize()
        })
        .collect()
}

/// Weak uncertainty: `[z, ḃ]` stays in the algebra for central `z`,
/// together with the derived inclusions `[A, Ż] ⊆ A` and `[Z, Ż] ⊆ Z`.
///
/// Models with trivial center (the Moyal plane) probe the canonical
/// relation `[xₖ, ẋₗ] ∈ A` over the generators instead.
pub fn check_weak_uncertainty(
    bundle: &ModelBundle,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    let h_disp = bundle.displacement(h);
    let mut notes = Vec::new();
    let mut residuals = Vec::new();

    match bundle.weak_probe_mode {
        WeakProbeMode::Generators => {
            // canonical pairs over the generators
            let margin = bundle.clamp_margin(2 + h_disp);
            let spans = bundle.spans_basic(margin)?;
            notes.push("probes: canonical generator pairs (trivial center)".into());
            notes.push("commutant-valued velocity components suppressed".into());
            let gens = bundle.rep.generators();
            for (zl, z) in gens {
                for (bl, b) in gens {
                    let vel = velocity(h, b)?;
                    let x = z.commutator(&vel)?;
                    let r = membership_residual(&spans, &x, &spans.algebra, pair_scale(&spans, z, &vel))?;
                    residuals.push((format!("[{zl},d({bl})/dt]"), r));
                }
            }
            Ok(CheckReport::new(
                "weak_uncertainty",
                bundle,
                residuals,
                opts.tolerance,
                window_info(bundle, margin),
                notes,
            ))
        }
        WeakProbeMode::CenterBasis => {
            let budget = opts.probe_degree;
            let margin = bundle.clamp_margin(budget + h_disp);
            let spans = bundle.spans_basic(margin)?;
            notes.push("probes: center basis against sampled algebra elements".into());
            let span_max = bundle.span_mons.iter().map(|m| m.degree).max().unwrap_or(0);
            let z_probes: Vec<(String, CMatrix)> = match &bundle.center_mons {
                Some(mons) => {
                    let dz_allowed = span_max.saturating_sub(budget + h_disp);
                    filter_by_degree(mons, dz_allowed)
                        .into_iter()
                        .map(|m| (m.label.clone(), m.mat.clone()))
                        .collect()
                }
                None => spans
                    .center
                    .elems()
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (format!("z{}", i + 1), z.clone()))
                    .collect(),
            };
            let mut rng = SplitMix64::new(opts.seed);
            let b_mons = filter_by_degree(&bundle.span_mons, budget);
            let b_probes = sampled_hermitian(&b_mons, opts.samples, bundle.dim(), &mut rng);

            for (zl, z) in &z_probes {
                for (bi, b) in b_probes.iter().enumerate() {
                    let vel = velocity(h, b)?;
                    let x = z.commutator(&vel)?;
                    let r = membership_residual(&spans, &x, &spans.algebra, pair_scale(&spans, z, &vel))?;
                    residuals.push((format!("[{zl},d(b{bi})/dt]"), r));
                }
            }
            // [A, Ż] ⊆ A and [Z, Ż] ⊆ Z; the probe degrees of the doubly
            // central pairs must fit inside the center span coverage
            let center_max = bundle
                .center_mons
                .as_ref()
                .map(|mons| mons.iter().map(|m| m.degree).max().unwrap_or(0));
            let zz_probes: Vec<&(String, CMatrix)> = match (&bundle.center_mons, center_max) {
                (Some(mons), Some(cmax)) => {
                    let dz = cmax.saturating_sub(h_disp) / 2;
                    z_probes
                        .iter()
                        .zip(filter_by_degree(mons, span_max.saturating_sub(budget + h_disp)))
                        .filter(|(_, m)| m.degree <= dz)
                        .map(|(p, _)| p)
                        .collect()
                }
                _ => z_probes.iter().collect(),
            };
            let z_limit = zz_probes.len().min(6);
            let a_limit = b_probes.len().min(6);
            let center_windowed = {
                let mut b = SpanBuilder::new(bundle.dim(), crate::algebra::RANK_TOL);
                for z in spans.center.elems() {
                    b.absorb(spans.windowed(z))?;
                }
                b.finish()
            };
            for (zl, z) in zz_probes.iter().take(z_limit) {
                let zdot = velocity(h, z)?;
                for (ai, a) in b_probes.iter().take(a_limit).enumerate() {
                    let x = a.commutator(&zdot)?;
                    let r = membership_residual(&spans, &x, &spans.algebra, pair_scale(&spans, a, &zdot))?;
                    residuals.push((format!("[a{ai},d({zl})/dt]"), r));
                }
                for (wl, w) in zz_probes.iter().take(z_limit) {
                    let x = w.commutator(&zdot)?;
                    let r =
                        membership_residual(&spans, &x, &center_windowed, pair_scale(&spans, w, &zdot))?;
                    residuals.push((format!("[{wl},d({zl})/dt] in Z"), r));
                }
            }
            Ok(CheckReport::new(
                "weak_uncertainty",
                bundle,
                residuals,
                opts.tolerance,
                window_info(bundle, margin),
                notes,
            ))
        }
    }
}

/// Strong uncertainty: `[ȧ, b°] ∈ A·A°` for algebra probes `a` and
/// opposite probes `b°`.
pub fn check_strong_uncertainty(
    bundle: &ModelBundle,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    let h_disp = bundle.displacement(h);
    let is_finite = bundle.spec.family_name() == "finite_sum";
    // generator probes displace by one site; intermediates stay within
    // 1 + h_disp of the window
    let margin = bundle.clamp_margin(1 + h_disp);
    // factor degrees of a legitimate [ȧ, b°]: probe degree 1 plus the
    // word degree of the Hamiltonian coefficients
    let product_cap = if is_finite { usize::MAX } else { 1 + h_disp };
    let spans = bundle.spans_capped(margin, product_cap)?;
    let product = spans.product.as_ref().ok_or_else(|| CheckError::Unsupported {
        check: "strong_uncertainty".into(),
        model: bundle.name.clone(),
    })?;
    let opp_mons = bundle.opp_mons.as_ref().ok_or_else(|| CheckError::Unsupported {
        check: "strong_uncertainty".into(),
        model: bundle.name.clone(),
    })?;

    // probe lists: matrix units for the finite sums (exhaustive), the
    // generators and their adjoints for the lattice models
    let mut a_probes: Vec<(String, CMatrix)> = Vec::new();
    let mut b_probes: Vec<(String, CMatrix)> = Vec::new();
    if is_finite {
        for m in &bundle.span_mons {
            a_probes.push((m.label.clone(), m.mat.clone()));
        }
        for m in opp_mons {
            b_probes.push((m.label.clone(), m.mat.clone()));
        }
    } else {
        for (l, g) in bundle.rep.generators() {
            a_probes.push((l.clone(), g.clone()));
            if !g.is_hermitian(1e-12) {
                a_probes.push((format!("{l}*"), g.dagger()));
            }
        }
        for (l, g) in bundle.rep.opposite_generators() {
            b_probes.push((l.clone(), g.clone()));
            if !g.is_hermitian(1e-12) {
                b_probes.push((format!("{l}*"), g.dagger()));
            }
        }
    }

    let mut residuals = Vec::new();
    for (al, a) in &a_probes {
        let adot = velocity(h, a)?;
        for (bl, bo) in &b_probes {
            let x = adot.commutator(bo)?;
            let r = membership_residual(&spans, &x, product, pair_scale(&spans, &adot, bo))?;
            residuals.push((format!("[d({al})/dt,{bl}]"), r));
        }
    }
    let cap_desc = if product_cap == usize::MAX {
        String::from("unbounded")
    } else {
        format!("{product_cap}")
    };
    let mut notes = alloc::vec![format!("product span degree cap {cap_desc}, dim {}", product.len())];
    // models with a flip generator only satisfy the membership conditions
    // when the flip is conserved; the finite span cannot see that
    // obstruction (it lives beyond any finite product span), so the
    // derived conservation law is certified directly
    if let Some(sigma) = bundle.named_op("sigma") {
        let comm = h.commutator(sigma)?;
        let r = spans.windowed(&comm).hs_norm() / (h.hs_norm() * sigma.hs_norm()).max(1e-300);
        residuals.push(("flip conservation [H,sigma]".into(), r));
        notes.push("flip conservation tested directly".into());
    }
    if product.len() == bundle.dim() * bundle.dim() {
        notes.push("product span saturates the full matrix space; membership is unrestrictive".into());
    }
    Ok(CheckReport::new(
        "strong_uncertainty",
        bundle,
        residuals,
        opts.tolerance,
        window_info(bundle, margin),
        notes,
    ))
}

/// Finite-dimensional equivalence of weak and strong uncertainty.
///
/// First certifies the hypothesis `span(A·A°) = Z(A)′` as subspaces, then
/// runs seeded random Hermitian Hamiltonians (alternating generic matrices
/// with elements of `A·A°`) and demands that the weak and strong verdicts
/// agree on every trial.
pub fn check_weak_strong_equivalence(
    bundle: &ModelBundle,
    trials: usize,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    if bundle.spec.family_name() != "finite_sum" {
        return Err(CheckError::Unsupported {
            check: "weak_strong_equivalence".into(),
            model: bundle.name.clone(),
        });
    }
    let spans = bundle.spans(0)?;
    let product = spans.product.as_ref().expect("finite sums carry a product algebra");
    let center_commutant = commutant(bundle.dim(), spans.center.elems(), crate::algebra::SUBSPACE_TOL)?;
    let hypothesis = subspace_report(product, &center_commutant, crate::algebra::SUBSPACE_TOL)?;

    let mut residuals = alloc::vec![(
        format!("hypothesis dims {}={} residual", hypothesis.dim_a, hypothesis.dim_b),
        hypothesis.residual
    )];
    let mut notes = Vec::new();
    if !hypothesis.equal {
        notes.push("hypothesis span(A·A°) = Z(A)' failed; trials skipped".into());
        return Ok(CheckReport::new(
            "weak_strong_equivalence",
            bundle,
            alloc::vec![("hypothesis".into(), 1.0)],
            opts.tolerance,
            window_info(bundle, 0),
            notes,
        ));
    }

    let mut rng = SplitMix64::new(opts.seed);
    let mut disagreements = 0usize;
    for trial in 0..trials {
        let h = if trial % 2 == 0 {
            rng.hermitian(bundle.dim())
        } else {
            rng.hermitian_combo(product)
        };
        let weak = check_weak_uncertainty(bundle, &h, opts)?;
        let strong = check_strong_uncertainty(bundle, &h, opts)?;
        let agree = weak.passed() == strong.passed();
        if !agree {
            disagreements += 1;
        }
        residuals.push((
            format!(
                "trial{} weak {} strong {}",
                trial,
                if weak.passed() { "pass" } else { "fail" },
                if strong.passed() { "pass" } else { "fail" }
            ),
            if agree { 0.0 } else { 1.0 },
        ));
    }
    notes.push(format!("{disagreements} verdict disagreements in {trials} trials"));
    Ok(CheckReport::new(
        "weak_strong_equivalence",
        bundle,
        residuals,
        opts.tolerance.max(0.5),
        window_info(bundle, 0),
        notes,
    ))
}

/// Positivity `−i[a, ȧ] ≥ 0` and the nontriviality clause
/// (`[a, ȧ] ≈ 0` forces `ȧ ≈ 0`) over sampled Hermitian observables.
pub fn check_positivity_nontriviality(
    bundle: &ModelBundle,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    let h_disp = bundle.displacement(h);
    let margin = bundle.clamp_margin(opts.probe_degree + h_disp);
    let mut rng = SplitMix64::new(opts.seed);
    let mons = filter_by_degree(&bundle.span_mons, opts.probe_degree);
    let probes = sampled_hermitian(&mons, opts.samples, bundle.dim(), &mut rng);
    let keep: Vec<usize> = match bundle.window(margin) {
        Some(w) => (0..bundle.dim()).filter(|&i| w[(i, i)].re > 0.5).collect(),
        None => (0..bundle.dim()).collect(),
    };
    let h_scale = h.hs_norm().max(1e-300);
    let mut residuals = Vec::new();
    let mut notes = Vec::new();
    notes.push("nontriviality quantified at tolerance, not exact equality".into());
    for (i, a) in probes.iter().enumerate() {
        let adot = velocity(h, a)?;
        let comm = a.commutator(&adot)?;
        // −i[a, ȧ], windowed and compressed
        let pos = bundle.windowed(&comm.scale(C64::new(0.0, -1.0)), margin).compress(&keep).hermitize();
        let (eigs, _) = eig_hermitian(&pos)?;
        let min_eig = eigs.first().copied().unwrap_or(0.0);
        let scale = h_scale * a.hs_norm() * a.hs_norm();
        // negative part, normalized; 0 when the spectrum is nonnegative
        residuals.push((format!("a{i} min eig"), (-min_eig).max(0.0) / scale.max(1e-300)));
        let comm_w = bundle.windowed(&comm, margin).hs_norm();
        if comm_w < opts.tolerance * scale {
            let adot_w = bundle.windowed(&adot, margin).hs_norm();
            let bound = 10.0 * opts.tolerance * h_scale * a.hs_norm();
            residuals.push((
                format!("a{i} nontriviality"),
                if adot_w < bound { 0.0 } else { adot_w / bound },
            ));
        }
    }
    Ok(CheckReport::new(
        "positivity_nontriviality",
        bundle,
        residuals,
        opts.tolerance.max(1e-9),
        window_info(bundle, margin),
        notes,
    ))
}

/// Reality condition: `d/dt (J a J⁻¹) = J ȧ J⁻¹`, i.e.
/// `J(i[H,a])J⁻¹ + i[H, JaJ⁻¹] = 0` since J is antilinear.
pub fn check_reality(bundle: &ModelBundle, h: &CMatrix, opts: &CheckOpts) -> Result<CheckReport, CheckError> {
    let j = bundle.rep.j().ok_or_else(|| CheckError::Unsupported {
        check: "reality".into(),
        model: bundle.name.clone(),
    })?;
    let h_disp = bundle.displacement(h);
    let margin = bundle.clamp_margin(opts.probe_degree + h_disp);
    let mut rng = SplitMix64::new(opts.seed);
    let mons = filter_by_degree(&bundle.span_mons, opts.probe_degree);
    let probes = sampled_hermitian(&mons, opts.samples, bundle.dim(), &mut rng);
    let h_scale = h.hs_norm().max(1e-300);
    let mut residuals = Vec::new();
    for (i, a) in probes.iter().enumerate() {
        let adot = velocity(h, a)?;
        let lhs = j.conjugate_operator(&adot);
        let rhs = velocity(h, &j.conjugate_operator(a))?;
        let e = &lhs + &rhs;
        let r = bundle.windowed(&e, margin).hs_norm() / (2.0 * h_scale * a.hs_norm().max(1e-300));
        residuals.push((format!("a{i}"), r));
    }
    let j_comm = (&j.conjugate_operator(h) - h).hs_norm() / h_scale;
    let notes = alloc::vec![format!("‖JHJ⁻¹ − H‖/‖H‖ = {j_comm:.3e}")];
    Ok(CheckReport::new("reality", bundle, residuals, opts.tolerance, window_info(bundle, margin), notes))
}

/// Consistency relation of the Moyal velocities: differentiating
/// `[x₁, x₂] = iθ` forces `[x₁, ẋ₂] = [x₂, ẋ₁]` (equivalently
/// `iζₖₗ + [xₗ, Aₖ]` symmetric in k↔l for the decomposed velocity).
/// Also reports the decomposability of `ẋₖ` into `Σζδ + A`-form and the
/// constancy of the extracted ζ pairing.
pub fn check_moyal_consistency(
    bundle: &ModelBundle,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    if bundle.spec.family_name() != "moyal" {
        return Err(CheckError::Unsupported {
            check: "moyal_consistency".into(),
            model: bundle.name.clone(),
        });
    }
    let h_disp = bundle.displacement(h);
    let margin = bundle.clamp_margin(1 + h_disp);
    let spans = bundle.spans_basic(margin)?;
    let x1 = bundle.rep.generator("x1").expect("moyal generator").clone();
    let x2 = bundle.rep.generator("x2").expect("moyal generator").clone();
    let xdot = [velocity(h, &x1)?, velocity(h, &x2)?];

    // can the velocities be written as Σ ζ δ + algebra element?
    let mut extended = SpanBuilder::new(bundle.dim(), crate::algebra::RANK_TOL);
    for b in spans.algebra.elems() {
        extended.absorb(b.clone())?;
    }
    for dl in ["delta1", "delta2"] {
        extended.absorb(spans.windowed(bundle.named_op(dl).expect("moyal delta")))?;
    }
    let extended = extended.finish();

    let mut residuals = Vec::new();
    let mut notes = Vec::new();
    let wnorm = match &spans.window {
        Some(w) => w.hs_norm(),
        None => libm::sqrt(bundle.dim() as f64),
    };
    for (k, xd) in xdot.iter().enumerate() {
        let r = extended.residual(&spans.windowed(xd))?;
        residuals.push((format!("dx{}/dt decomposable", k + 1), r));
        // identity coefficient of [xₗ, ẋₖ]: the constant pairing ζ-part
        for (l, xl) in [&x1, &x2].iter().enumerate() {
            let pair = xl.commutator(xd)?;
            let wpair = spans.windowed(&pair);
            let coeff = match &spans.window {
                Some(w) => wpair.hs_inner(w) / (wnorm * wnorm),
                None => wpair.trace() / C64::new(bundle.dim() as f64, 0.0),
            };
            notes.push(format!("pairing[x{},dx{}/dt] identity coefficient = {:.6}{:+.6}i", l + 1, k + 1, coeff.re, coeff.im));
        }
    }
    // the relation itself: [x₁, ẋ₂] = [x₂, ẋ₁] inside the window
    let lhs = x1.commutator(&xdot[1])?;
    let rhs = x2.commutator(&xdot[0])?;
    let scale = lhs.hs_norm().max(rhs.hs_norm()).max(1e-300);
    let defect = spans.windowed(&(&lhs - &rhs)).hs_norm() / scale;
    residuals.push(("consistency [x1,dx2/dt] = [x2,dx1/dt]".into(), defect));
    Ok(CheckReport::new(
        "moyal_consistency",
        bundle,
        residuals,
        opts.tolerance,
        window_info(bundle, margin),
        notes,
    ))
}

/// Declared-pair form of the consistency relation: the windowed defect of
/// `iζₖₗ + [xₗ, Aₖ]` under k↔l for given coefficients, normalized per
/// window state.
pub fn moyal_consistency_sides(
    bundle: &ModelBundle,
    zeta: &[[f64; 2]; 2],
    a_pots: &[WordPoly; 2],
    margin: usize,
) -> Result<f64, CheckError> {
    let x = [
        bundle.rep.generator("x1").expect("moyal generator").clone(),
        bundle.rep.generator("x2").expect("moyal generator").clone(),
    ];
    let a = [a_pots[0].evaluate(bundle)?, a_pots[1].evaluate(bundle)?];
    let ident = CMatrix::identity(bundle.dim());
    let side = |k: usize, l: usize| -> Result<CMatrix, CheckError> {
        Ok(&ident.scale(C64::new(0.0, zeta[k][l])) + &x[l].commutator(&a[k])?)
    };
    let diff = &side(0, 1)? - &side(1, 0)?;
    let w = bundle.windowed(&diff, margin);
    let wnorm = match bundle.window(margin) {
        Some(wm) => wm.hs_norm(),
        None => libm::sqrt(bundle.dim() as f64),
    };
    Ok(w.hs_norm() / wnorm.max(1e-300))
}

/// Fiber-velocity lemma of the circle bundle: for the assembled
/// `H = ½(T + T†) + A₀` with `T = g(δ−A)²`, the combination
/// `R = Ṫᵃ + (i/4)(gMC + gCM + MCg + CMg)` with `M = δ−A`, `C = [A,Tᵃ]`
/// must commute with the function part of the algebra.
pub fn check_lemma_tdot(
    bundle: &ModelBundle,
    hspec: &HamiltonianSpec,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport, CheckError> {
    let (g, a) = match hspec {
        HamiltonianSpec::AlmostCommutative { g, a, .. } => (g, a),
        _ => {
            return Err(CheckError::Unsupported {
                check: "lemma_tdot".into(),
                model: bundle.name.clone(),
            })
        }
    };
    let h_disp = bundle.displacement(h);
    let margin = bundle.clamp_margin(2 + h_disp);
    let gm = g.evaluate(bundle)?;
    let am = a.evaluate(bundle)?;
    let delta = bundle.named_op("delta").expect("circle bundle exposes delta");
    let mom = delta - &am;
    let u = bundle.rep.generator("U").expect("circle generator");
    let mut residuals = Vec::new();
    let fiber_labels: Vec<String> = bundle
        .rep
        .generators()
        .iter()
        .filter(|(l, _)| l.starts_with('T'))
        .map(|(l, _)| l.clone())
        .collect();
    for tl in &fiber_labels {
        let t = bundle.rep.generator(tl).expect("fiber generator");
        let tdot = velocity(h, t)?;
        let c = am.commutator(t)?;
        let corr = &(&gm.matmul(&mom).matmul(&c) + &gm.matmul(&c).matmul(&mom))
            + &(&mom.matmul(&c).matmul(&gm) + &c.matmul(&mom).matmul(&gm));
        let rem = &tdot + &corr.scale(C64::new(0.0, 0.25));
        let scale = rem.hs_norm().max(1e-12 * h.hs_norm()).max(1e-300);
        for (pl, probe) in [("U", u.clone()), ("U*", u.dagger())] {
            let x = rem.commutator(&probe)?;
            let r = bundle.windowed(&x, margin).hs_norm() / (scale * probe.hs_norm());
            residuals.push((format!("[R({tl}),{pl}]"), r));
        }
    }
    Ok(CheckReport::new(
        "lemma_tdot",
        bundle,
        residuals,
        opts.tolerance,
        window_info(bundle, margin),
        alloc::vec!["remainder tested against the function algebra".into()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::assemble_hamiltonian;
    use crate::models::{ModelSpec, ThetaSpec, TorusMode};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_point() -> ModelBundle {
        ModelBundle::build(&ModelSpec::FiniteSum { blocks: alloc::vec![1, 1] }).unwrap()
    }

    #[test]
    fn two_point_mixing_hamiltonian_fails_weak_uncertainty() {
        let b = two_point();
        let phi = c(0.8, 0.45);
        let mut mixing = CMatrix::zeros(2, 2);
        mixing[(0, 1)] = phi;
        mixing[(1, 0)] = phi.conj();
        let h = assemble_hamiltonian(
            &b,
            &crate::dynamics::HamiltonianSpec::FiniteSum { a0: WordPoly::zero(), mixing: Some(mixing) },
        )
        .unwrap();
        let report = check_weak_uncertainty(&b, &h, &CheckOpts::default()).unwrap();
        assert!(!report.passed());
        // analytic residual: [z, ḃ] is purely off-diagonal while the
        // algebra span is the diagonals, so relative residuals reach 1
        assert!(report.max_residual() > 0.9);
    }

    #[test]
    fn two_point_diagonal_hamiltonian_passes() {
        let b = two_point();
        let h = assemble_hamiltonian(
            &b,
            &crate::dynamics::HamiltonianSpec::FiniteSum {
                a0: WordPoly::term(&["P1"], c(0.7, 0.0)).plus(&["P2"], c(-0.2, 0.0)),
                mixing: None,
            },
        )
        .unwrap();
        let report = check_weak_uncertainty(&b, &h, &CheckOpts::default()).unwrap();
        assert!(report.passed(), "max residual {}", report.max_residual());
    }

    #[test]
    fn strong_uncertainty_passes_for_free_torus_motion() {
        let b = ModelBundle::build(&ModelSpec::NcTorus {
            theta: ThetaSpec::Rational { p: 1, q: 5 },
            size: 5,
            mode: TorusMode::Cyclic,
            window_margin: 1,
        })
        .unwrap();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let report = check_strong_uncertainty(&b, &h, &CheckOpts::default()).unwrap();
        assert!(report.passed(), "max residual {}", report.max_residual());
    }

    #[test]
    fn strong_uncertainty_fails_for_noncentral_metric_attempt() {
        // H = δ₁·(U₁+U₁†)·δ₁ tries to give the metric an algebra-valued
        // coefficient. The truncated lattice separates the resulting
        // coordinate-weighted operators from the monomial product span
        // (small cyclic lattices saturate and cannot).
        let golden = (libm::sqrt(5.0) - 1.0) / 2.0;
        let b = ModelBundle::build(&ModelSpec::NcTorus {
            theta: ThetaSpec::Real(golden),
            size: 5,
            mode: TorusMode::Truncated,
            window_margin: 1,
        })
        .unwrap();
        let h_free = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let good = check_strong_uncertainty(&b, &h_free, &CheckOpts::default()).unwrap();
        assert!(good.passed(), "free motion max residual {}", good.max_residual());

        let d1 = b.named_op("delta1").unwrap();
        let u1 = b.rep.generator("U1").unwrap();
        let coeff = &*u1 + &u1.dagger();
        let h = d1.matmul(&coeff).matmul(d1).hermitize();
        let report = check_strong_uncertainty(&b, &h, &CheckOpts::default()).unwrap();
        assert!(!report.passed());
        assert!(report.max_residual() > 1e-3, "max {}", report.max_residual());
    }

    #[test]
    fn strong_uncertainty_needs_opposite_structure() {
        let b = ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 4, fiber: 2, window_margin: 1 })
            .unwrap();
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        assert!(matches!(
            check_strong_uncertainty(&b, &h, &CheckOpts::default()),
            Err(CheckError::Unsupported { .. })
        ));
    }

    #[test]
    fn equivalence_hypothesis_and_trials_on_two_blocks() {
        let b = ModelBundle::build(&ModelSpec::FiniteSum { blocks: alloc::vec![2] }).unwrap();
        let report = check_weak_strong_equivalence(&b, 6, &CheckOpts::default()).unwrap();
        // one block: A·A° is everything, both checks are vacuous
        assert!(report.passed(), "{:?}", report.residuals);
    }

    #[test]
    fn positivity_passes_for_free_circle_motion_and_fails_for_negated_kinetics() {
        let b = ModelBundle::build(&ModelSpec::NcTorus {
            theta: ThetaSpec::Rational { p: 1, q: 5 },
            size: 5,
            mode: TorusMode::Cyclic,
            window_margin: 1,
        })
        .unwrap();
        let opts = CheckOpts { samples: 8, probe_degree: 1, ..CheckOpts::default() };
        let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let good = check_positivity_nontriviality(&b, &h, &opts).unwrap();
        assert!(good.passed(), "max {}", good.max_residual());
        let neg = h.scale_re(-1.0);
        let bad = check_positivity_nontriviality(&b, &neg, &opts).unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn reality_passes_when_j_commutes_and_fails_otherwise() {
        let b = ModelBundle::build(&ModelSpec::FiniteSum { blocks: alloc::vec![2] }).unwrap();
        let j = b.rep.j().unwrap();
        // symmetrize a random Hermitian under J to make it J-commuting
        let mut rng = SplitMix64::new(3);
        let h0 = rng.hermitian(b.dim());
        let h_good = (&h0 + &j.conjugate_operator(&h0)).scale_re(0.5);
        let good = check_reality(&b, &h_good, &CheckOpts::default()).unwrap();
        assert!(good.passed(), "max {}", good.max_residual());

        // anti-Hermitian K with JKJ⁻¹ = K makes H = H₀ + iK Hermitian
        // but J-violating: residual family 2‖[K, ·]‖
        let m = CMatrix::from_fn(b.dim(), b.dim(), |_, _| rng.next_complex());
        let anti = (&m - &m.dagger()).scale_re(0.5);
        let k = (&anti + &j.conjugate_operator(&anti)).scale_re(0.5);
        assert!((&j.conjugate_operator(&k) - &k).hs_norm() < 1e-12);
        let h_bad = &h_good + &k.scale(c(0.0, 1.0));
        assert!(h_bad.is_hermitian(1e-12));
        let bad = check_reality(&b, &h_bad, &CheckOpts::default()).unwrap();
        assert!(!bad.passed());
        // witness: residual dominated by the K-commutator scale
        let a0 = CMatrix::identity(b.dim());
        assert!(k.commutator(&a0).unwrap().hs_norm() < 1e-12);
    }

    #[test]
    fn moyal_consistency_for_assembled_hamiltonian() {
        // gauge potentials linear in x keep [Aₖ, xₗ] central, which is
        // exactly when the canonical velocity decomposition survives
        let b = ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 0.7, window_margin: 2 }).unwrap();
        let hspec = HamiltonianSpec::Moyal {
            zeta: [[1.0, 0.3], [0.3, 1.5]],
            a: [WordPoly::term(&["x2"], c(0.4, 0.0)), WordPoly::term(&["x1"], c(0.2, 0.0))],
            a0: WordPoly::term(&["x1", "x1"], c(0.1, 0.0)).plus(&["x2", "x2"], c(0.1, 0.0)),
        };
        let h = assemble_hamiltonian(&b, &hspec).unwrap();
        let report = check_moyal_consistency(&b, &h, &CheckOpts::default()).unwrap();
        assert!(report.passed(), "residuals {:?}", report.residuals);
    }

    #[test]
    fn moyal_declared_sides_reproduce_the_commutator_defect() {
        // ζ = 1, A₂ = x₂: the sides differ by [x₁,x₂] = iθ
        let theta = 0.7;
        let b = ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta, window_margin: 2 }).unwrap();
        let zeta = [[1.0, 0.0], [0.0, 1.0]];
        let pots = [WordPoly::zero(), WordPoly::term(&["x2"], c(1.0, 0.0))];
        let defect = moyal_consistency_sides(&b, &zeta, &pots, 2).unwrap();
        assert!((defect - theta).abs() < 1e-10, "defect {defect} vs theta {theta}");
        // symmetric ζ with A = 0 is consistent
        let zero = [WordPoly::zero(), WordPoly::zero()];
        assert!(moyal_consistency_sides(&b, &zeta, &zero, 2).unwrap() < 1e-14);
    }

    #[test]
    fn weak_uncertainty_detects_nonconstant_moyal_metric() {
        let b = ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 0.7, window_margin: 2 }).unwrap();
        let good = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        let opts = CheckOpts::default();
        let pass = check_weak_uncertainty(&b, &good, &opts).unwrap();
        assert!(pass.passed(), "max {}", pass.max_residual());
        // ζ(x)-weighted kinetic term: H = ½ sym((1 + x₁) δ₁²) + ½δ₂²
        let d1 = b.named_op("delta1").unwrap();
        let d2 = b.named_op("delta2").unwrap();
        let gg = &CMatrix::identity(b.dim()) + b.rep.generator("x1").unwrap();
        let bad = (&gg.matmul(d1).matmul(d1).scale_re(0.5).hermitize()
            + &d2.matmul(d2).scale_re(0.5))
            .hermitize();
        let fail = check_weak_uncertainty(&b, &bad, &opts).unwrap();
        assert!(!fail.passed());
        assert!(fail.max_residual() > 1e-3, "max {}", fail.max_residual());
    }

    #[test]
    fn lemma_tdot_holds_for_assembled_circle_hamiltonians() {
        let b = ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 8, fiber: 2, window_margin: 4 })
            .unwrap();
        // A = 0, A₀ = 0: the fiber velocities vanish identically
        let free_spec = HamiltonianSpec::free_for(&b.spec);
        let free = assemble_hamiltonian(&b, &free_spec).unwrap();
        for t in ["T1", "T2", "T3"] {
            assert!(velocity(&free, b.rep.generator(t).unwrap()).unwrap().hs_norm() < 1e-13);
        }
        let report = check_lemma_tdot(&b, &free_spec, &free, &CheckOpts::default()).unwrap();
        assert!(report.passed());

        // constant fiber potential: Ṫᵃ = i[A₀, Tᵃ] commutes with functions
        let a0 = WordPoly::term(&["T3"], c(0.9, 0.0)).plus(&["T1"], c(0.4, 0.0));
        let spec_pot = HamiltonianSpec::AlmostCommutative {
            g: WordPoly::constant(c(1.0, 0.0)),
            a: WordPoly::zero(),
            a0: a0.clone(),
        };
        let h = assemble_hamiltonian(&b, &spec_pot).unwrap();
        let t1 = b.rep.generator("T1").unwrap();
        let tdot = velocity(&h, t1).unwrap();
        let want = a0.evaluate(&b).unwrap().commutator(t1).unwrap().scale(c(0.0, 1.0));
        assert!((&tdot - &want).hs_norm() < 1e-12);
        let report = check_lemma_tdot(&b, &spec_pot, &h, &CheckOpts::default()).unwrap();
        assert!(report.passed(), "residuals {:?}", report.residuals);

        // full spec: gauge potential and nonconstant central metric
        let full = HamiltonianSpec::AlmostCommutative {
            g: WordPoly::constant(c(1.5, 0.0))
                .plus(&["U"], c(0.25, 0.0))
                .plus(&["U*"], c(0.25, 0.0)),
            a: WordPoly::term(&["U", "T1"], c(0.3, 0.0)).plus(&["T1", "U*"], c(0.3, 0.0)),
            a0: a0,
        };
        let h_full = assemble_hamiltonian(&b, &full).unwrap();
        let report = check_lemma_tdot(&b, &full, &h_full, &CheckOpts::default()).unwrap();
        assert!(report.passed(), "residuals {:?}", report.residuals);
    }

    #[test]
    fn weak_uncertainty_passes_on_the_circle_bundle() {
        let b = ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 8, fiber: 2, window_margin: 4 })
            .unwrap();
        let hspec = HamiltonianSpec::AlmostCommutative {
            g: WordPoly::constant(c(1.5, 0.0)).plus(&["U"], c(0.25, 0.0)).plus(&["U*"], c(0.25, 0.0)),
            a: WordPoly::term(&["T2"], c(0.4, 0.0)),
            a0: WordPoly::term(&["T3"], c(0.8, 0.0)),
        };
        let h = assemble_hamiltonian(&b, &hspec).unwrap();
        let opts = CheckOpts { samples: 8, probe_degree: 1, ..CheckOpts::default() };
        let report = check_weak_uncertainty(&b, &h, &opts).unwrap();
        assert!(report.passed(), "max residual {}", report.max_residual());
    }
}
