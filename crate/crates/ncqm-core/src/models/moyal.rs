//! The Moyal plane `[x₁,x₂] = iθ` acting on itself.
//!
//! The algebra generated by the truncated position operators is
//! irreducible on a single Fock space, which leaves no room for a
//! commutant. The model therefore represents the algebra on the
//! Hilbert–Schmidt space of the truncated Fock space (basis `|j⟩⟨k|`,
//! dimension `levels²`) by left multiplication. Right multiplications
//! then realize the commutant, the standard derivations become the inner
//! operators `δ₁ = −(L(x₂) − R(x₂))/θ`, `δ₂ = (L(x₁) − R(x₁))/θ` with
//! `[δₖ, L(xₗ)] = i δₖₗ`, and the momenta `pₖ = δₖ − εₖₗ θ⁻¹ L(xₗ)`
//! collapse to pure right multiplications, which commute with the whole
//! represented algebra.
//!
//! Truncation defects live on the top Fock levels of the left index, so
//! windows trim the left index only.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Layout, ModelBundle, ModelError, ModelSpec, Monomial, WeakProbeMode, WindowKind};
use crate::algebra::AlgebraRep;
use crate::linalg::{CMatrix, C64};

/// Annihilation operator on `levels` Fock states.
fn ladder(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, levels, |r, c| {
        if c == r + 1 {
            C64::new(libm::sqrt(c as f64), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub(super) fn build(
    spec: &ModelSpec,
    levels: usize,
    theta: f64,
    window_margin: usize,
) -> Result<ModelBundle, ModelError> {
    if levels < 4 {
        return Err(ModelError::BadSpec("at least 4 Fock levels required".into()));
    }
    if theta <= 0.0 {
        return Err(ModelError::BadSpec("theta must be positive".into()));
    }
    if window_margin >= levels {
        return Err(ModelError::BadSpec(format!(
            "window margin {window_margin} must stay below the Fock cutoff {levels}"
        )));
    }
    let a = ladder(levels);
    let ad = a.dagger();
    let scale = libm::sqrt(theta / 2.0);
    let x1 = (&a + &ad).scale_re(scale);
    let x2 = (&(&ad - &a)).scale(C64::new(0.0, scale));

    let dim = levels * levels;
    let id_f = CMatrix::identity(levels);
    let lmul = |x: &CMatrix| x.kron(&id_f);
    let rmul = |x: &CMatrix| id_f.kron(&x.transpose());

    let lx1 = lmul(&x1);
    let lx2 = lmul(&x2);
    let rx1 = rmul(&x1);
    let rx2 = rmul(&x2);

    let delta1 = (&lx2 - &rx2).scale_re(-1.0 / theta);
    let delta2 = (&lx1 - &rx1).scale_re(1.0 / theta);
    // pₖ = δₖ − εₖₗ θ⁻¹ L(xₗ) with ε₁₂ = −1: p₁ = θ⁻¹R(x₂), p₂ = −θ⁻¹R(x₁)
    let p1 = &delta1 + &lx2.scale_re(1.0 / theta);
    let p2 = &delta2 - &lx1.scale_re(1.0 / theta);

    // left-multiplication words in x₁, x₂ up to degree 4
    let cap = 4usize;
    let mut span_mons: Vec<Monomial> = Vec::new();
    let mut prev: Vec<(String, CMatrix)> = alloc::vec![(String::new(), CMatrix::identity(dim))];
    for len in 1..=cap {
        let mut next = Vec::new();
        for (word, m) in &prev {
            for (tag, g) in [("x1", &lx1), ("x2", &lx2)] {
                let label = format!("{word}{tag}");
                let mat = m.matmul(g);
                span_mons.push(Monomial { label: label.clone(), degree: len, mat: mat.clone() });
                next.push((label, mat));
            }
        }
        prev = next;
    }

    let gens: Vec<(String, CMatrix)> = alloc::vec![("x1".into(), lx1), ("x2".into(), lx2)];
    let span_hint: Vec<CMatrix> = span_mons.iter().map(|m| m.mat.clone()).collect();
    let window_kind = WindowKind::FockLeft { levels };
    let mut rep = AlgebraRep::new(dim, gens, cap)?.with_span_hint(span_hint);
    if let Some(w) = super::window_for(&window_kind, dim, window_margin) {
        rep = rep.with_window(w);
    }

    let mut named = BTreeMap::new();
    named.insert("delta1".into(), delta1);
    named.insert("delta2".into(), delta2);
    named.insert("p1".into(), p1);
    named.insert("p2".into(), p2);

    Ok(ModelBundle {
        spec: spec.clone(),
        name: format!("moyal(levels={levels},theta={theta})"),
        rep,
        named,
        layout: Layout::FockPair { levels },
        span_mons,
        opp_mons: None,
        // the center of the Moyal algebra is trivial
        center_mons: Some(alloc::vec![Monomial {
            label: "I".into(),
            degree: 0,
            mat: CMatrix::identity(dim),
        }]),
        weak_probe_mode: WeakProbeMode::Generators,
        window_kind,
        product_ops: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> ModelBundle {
        ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 0.7, window_margin: 2 }).unwrap()
    }

    #[test]
    fn canonical_commutator_on_window() {
        let b = bundle();
        let x1 = b.rep.generator("x1").unwrap();
        let x2 = b.rep.generator("x2").unwrap();
        let comm = x1.commutator(x2).unwrap();
        let want = CMatrix::identity(b.dim()).scale(C64::new(0.0, 0.7));
        let delta = &comm - &want;
        // defect sits at the top Fock level of the left index
        assert!(b.windowed(&delta, 1).hs_norm() < 1e-12);
        assert!(delta.hs_norm() > 1.0);
    }

    #[test]
    fn derivations_have_canonical_pairing() {
        let b = bundle();
        let x = [b.rep.generator("x1").unwrap().clone(), b.rep.generator("x2").unwrap().clone()];
        let d = [b.named_op("delta1").unwrap().clone(), b.named_op("delta2").unwrap().clone()];
        for (k, dk) in d.iter().enumerate() {
            for (l, xl) in x.iter().enumerate() {
                let want = if k == l { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) };
                let comm = dk.commutator(xl).unwrap();
                let delta = &comm - &CMatrix::identity(b.dim()).scale(want);
                assert!(b.windowed(&delta, 1).hs_norm() < 1e-12, "delta{} x{}", k + 1, l + 1);
            }
        }
    }

    #[test]
    fn momenta_commute_with_the_algebra_exactly() {
        // right multiplications commute with left multiplications even on
        // the truncated space, so no window is needed here
        let b = bundle();
        for p in ["p1", "p2"] {
            let pk = b.named_op(p).unwrap();
            assert!(pk.hs_norm() > 1.0, "momentum must not vanish");
            for (_, g) in b.rep.generators() {
                assert!(pk.commutator(g).unwrap().hs_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn span_is_proper_and_center_trivial() {
        let b = bundle();
        let spans = b.spans(2).unwrap();
        // left multiplications never fill the doubled space
        assert!(spans.algebra.len() < b.dim() * b.dim() / 2);
        assert_eq!(spans.center.len(), 1);
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(ModelBundle::build(&ModelSpec::Moyal { levels: 2, theta: 1.0, window_margin: 0 }).is_err());
        assert!(ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: -1.0, window_margin: 0 }).is_err());
        assert!(ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 1.0, window_margin: 8 }).is_err());
    }
}
