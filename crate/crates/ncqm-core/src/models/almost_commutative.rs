//! Smooth functions on the circle tensor a full matrix fiber:
//! `C(S¹) ⊗ Mₙ` on Fourier modes `|k⟩ ⊗ Cⁿ`, `|k| ≤ modes`.
//!
//! `U` represents `e^{iφ}` as the truncated mode shift, the fiber carries
//! a Hermitian su(n) basis `Tᵃ`, and the mode-number operator `δ`
//! represents `−i∂_φ` with `[δ, U] = U` away from the truncation boundary.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Layout, ModelBundle, ModelError, ModelSpec, Monomial, WeakProbeMode, WindowKind};
use crate::algebra::AlgebraRep;
use crate::linalg::{CMatrix, C64};

/// Hermitian traceless basis of su(n) (generalized Gell-Mann matrices):
/// symmetric and antisymmetric pairs plus diagonal members.
pub(crate) fn su_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(i, j)] = C64::new(1.0, 0.0);
            sym[(j, i)] = C64::new(1.0, 0.0);
            out.push(sym);
            let mut asym = CMatrix::zeros(n, n);
            asym[(i, j)] = C64::new(0.0, -1.0);
            asym[(j, i)] = C64::new(0.0, 1.0);
            out.push(asym);
        }
    }
    for d in 1..n {
        let norm = libm::sqrt(2.0 / (d as f64 * (d as f64 + 1.0)));
        let mut diag = CMatrix::zeros(n, n);
        for i in 0..d {
            diag[(i, i)] = C64::new(norm, 0.0);
        }
        diag[(d, d)] = C64::new(-(d as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

pub(super) fn build(
    spec: &ModelSpec,
    modes: usize,
    fiber: usize,
    window_margin: usize,
) -> Result<ModelBundle, ModelError> {
    if modes < 4 {
        return Err(ModelError::BadSpec("at least 4 Fourier modes required".into()));
    }
    if fiber < 2 {
        return Err(ModelError::BadSpec("fiber size must be at least 2".into()));
    }
    if window_margin >= modes {
        return Err(ModelError::BadSpec(format!(
            "window margin {window_margin} must stay below the mode cutoff {modes}"
        )));
    }
    let side = 2 * modes + 1;
    let dim = side * fiber;
    let id_fiber = CMatrix::identity(fiber);

    // truncated mode shift k → k+1
    let shift = CMatrix::from_fn(side, side, |r, c| {
        if r == c + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = shift.kron(&id_fiber);
    // mode-number operator (−i∂_φ)
    let kdiag = CMatrix::from_fn(side, side, |r, c| {
        if r == c {
            C64::new(r as f64 - modes as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let delta = kdiag.kron(&id_fiber);
    let id_side = CMatrix::identity(side);
    let fiber_basis = su_basis(fiber);

    let mut gens: Vec<(String, CMatrix)> = alloc::vec![("U".into(), u.clone())];
    for (a, t) in fiber_basis.iter().enumerate() {
        gens.push((format!("T{}", a + 1), id_side.kron(t)));
    }

    // U^s ⊗ fiber basis element, |s| ≤ modes − margin
    let cap = (modes - window_margin) as i64;
    let upow = |s: i64| -> CMatrix {
        let base = if s >= 0 { u.clone() } else { u.dagger() };
        let mut acc = CMatrix::identity(dim);
        for _ in 0..s.abs() {
            acc = base.matmul(&acc);
        }
        acc
    };
    let mut fiber_mats: Vec<(String, CMatrix)> = alloc::vec![("".into(), CMatrix::identity(dim))];
    for (a, t) in fiber_basis.iter().enumerate() {
        fiber_mats.push((format!("T{}", a + 1), id_side.kron(t)));
    }
    let mut span_mons = Vec::new();
    let mut center_mons = Vec::new();
    for s in -cap..=cap {
        let us = upow(s);
        center_mons.push(Monomial {
            label: format!("U^{s}"),
            degree: s.unsigned_abs() as usize,
            mat: us.clone(),
        });
        for (tag, f) in &fiber_mats {
            span_mons.push(Monomial {
                label: format!("U^{s}{tag}"),
                degree: s.unsigned_abs() as usize,
                mat: us.matmul(f),
            });
        }
    }

    let window_kind = WindowKind::CircleModes { modes: modes as i64, fiber };
    let span_hint: Vec<CMatrix> = span_mons.iter().map(|m| m.mat.clone()).collect();
    let mut rep = AlgebraRep::new(dim, gens, cap.max(2) as usize)?.with_span_hint(span_hint);
    if let Some(w) = super::window_for(&window_kind, dim, window_margin) {
        rep = rep.with_window(w);
    }

    let mut named = BTreeMap::new();
    named.insert("delta".into(), delta);
    for (a, t) in fiber_basis.iter().enumerate() {
        named.insert(format!("T{}", a + 1), id_side.kron(t));
    }

    Ok(ModelBundle {
        spec: spec.clone(),
        name: format!("almost_commutative(M={modes},n={fiber})"),
        rep,
        named,
        layout: Layout::CircleBundle { modes: modes as i64, fiber },
        span_mons,
        opp_mons: None,
        center_mons: Some(center_mons),
        weak_probe_mode: WeakProbeMode::CenterBasis,
        window_kind,
        product_ops: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> ModelBundle {
        ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 6, fiber: 2, window_margin: 2 }).unwrap()
    }

    #[test]
    fn su2_basis_is_pauli_and_closes() {
        let ts = su_basis(2);
        assert_eq!(ts.len(), 3);
        // [Tᵃ,Tᵇ] = 2i ε_abc T^c for the Pauli basis
        let comm = ts[0].commutator(&ts[1]).unwrap();
        assert!((&comm - &ts[2].scale(C64::new(0.0, 2.0))).hs_norm() < 1e-14);
        for t in &ts {
            assert!(t.is_hermitian(1e-14));
            assert!(t.trace().norm() < 1e-14);
        }
        // su(3) has 8 members, orthogonal under HS
        let t3 = su_basis(3);
        assert_eq!(t3.len(), 8);
        for (i, a) in t3.iter().enumerate() {
            for b in t3.iter().skip(i + 1) {
                assert!(a.hs_inner(b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn function_part_commutes_with_fiber() {
        let b = bundle();
        let u = b.rep.generator("U").unwrap();
        for t in ["T1", "T2", "T3"] {
            let tm = b.rep.generator(t).unwrap();
            assert!(u.commutator(tm).unwrap().hs_norm() < 1e-14);
        }
    }

    #[test]
    fn mode_number_derives_the_shift_on_window() {
        // [δ, U] = U inside the window
        let b = bundle();
        let u = b.rep.generator("U").unwrap();
        let delta = b.named_op("delta").unwrap();
        let d = &delta.commutator(u).unwrap() - u;
        assert!(b.windowed(&d, 1).hs_norm() < 1e-13);
    }

    #[test]
    fn windowed_center_counts_function_modes() {
        let b = bundle();
        let spans = b.spans(2).unwrap();
        // 2(M − margin) + 1 windowed function monomials
        assert_eq!(spans.center.len(), 2 * (6 - 2) + 1);
        // span: one copy per fiber basis element plus identity
        assert_eq!(spans.algebra.len(), (2 * (6 - 2) + 1) * 4);
    }

    #[test]
    fn rejects_margin_at_cutoff() {
        assert!(
            ModelBundle::build(&ModelSpec::AlmostCommutative { modes: 6, fiber: 2, window_margin: 6 })
                .is_err()
        );
    }
}
