//! `⊕ₖ M_{nₖ}` acting on itself by left multiplication.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::monomial::{dedupe_tagged, MonomialOp};
use super::{Layout, ModelBundle, ModelError, ModelSpec, Monomial, WeakProbeMode, WindowKind};
use crate::algebra::{gns_index, gns_self_rep};
use crate::linalg::C64;

pub(super) fn build(spec: &ModelSpec, blocks: &[usize]) -> Result<ModelBundle, ModelError> {
    let gns = gns_self_rep(blocks)?;
    let dim = gns.rep.dim();

    let mut named = BTreeMap::new();
    for (k, p) in gns.projections.iter().enumerate() {
        named.insert(format!("P{}", k + 1), p.clone());
    }

    // Matrix units as monomial operators, for spans and the product algebra.
    let mut left_ops = Vec::new();
    let mut right_ops = Vec::new();
    for (k, &nk) in blocks.iter().enumerate() {
        for i in 0..nk {
            for j in 0..nk {
                let left = MonomialOp::from_map(dim, |col| {
                    // L(E_ij) maps E_ab ↦ δ_ja E_ib within block k
                    let q = Layout::Blocks { blocks: blocks.to_vec() }.quantum(col);
                    if q[0] as usize == k && q[1] as usize == j {
                        Some((gns_index(blocks, k, i, q[2] as usize), C64::new(1.0, 0.0)))
                    } else {
                        None
                    }
                });
                let right = MonomialOp::from_map(dim, |col| {
                    // R(E_ij) maps E_ab ↦ δ_bi E_aj within block k
                    let q = Layout::Blocks { blocks: blocks.to_vec() }.quantum(col);
                    if q[0] as usize == k && q[2] as usize == i {
                        Some((gns_index(blocks, k, q[1] as usize, j), C64::new(1.0, 0.0)))
                    } else {
                        None
                    }
                });
                left_ops.push((format!("e{}_{}{}", k + 1, i + 1, j + 1), left));
                right_ops.push((format!("e{}_{}{}o", k + 1, i + 1, j + 1), right));
            }
        }
    }

    let span_mons: Vec<Monomial> = left_ops
        .iter()
        .map(|(label, op)| Monomial { label: label.clone(), degree: 1, mat: op.to_matrix() })
        .collect();
    let opp_mons: Vec<Monomial> = right_ops
        .iter()
        .map(|(label, op)| Monomial { label: label.clone(), degree: 1, mat: op.to_matrix() })
        .collect();

    let mut products = Vec::new();
    for (_, l) in &left_ops {
        for (_, r) in &right_ops {
            products.push((1, 1, l.compose(r)));
        }
    }
    let product_ops = dedupe_tagged(products);

    let name = format!("finite_sum{blocks:?}");
    Ok(ModelBundle {
        spec: spec.clone(),
        name,
        rep: gns.rep,
        named,
        layout: Layout::Blocks { blocks: blocks.to_vec() },
        span_mons,
        opp_mons: Some(opp_mons),
        center_mons: None,
        weak_probe_mode: WeakProbeMode::CenterBasis,
        window_kind: WindowKind::None,
        product_ops: Some(product_ops),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{subspace_report, AlgebraRep, SUBSPACE_TOL};
    use crate::linalg::CMatrix;

    fn build_spec(blocks: &[usize]) -> ModelBundle {
        ModelBundle::build(&ModelSpec::FiniteSum { blocks: blocks.to_vec() }).unwrap()
    }

    #[test]
    fn two_point_projections_sum_to_identity() {
        let b = build_spec(&[1, 1]);
        let p1 = b.named_op("P1").unwrap();
        let p2 = b.named_op("P2").unwrap();
        assert!((&(p1 + p2) - &CMatrix::identity(2)).hs_norm() < 1e-15);
        assert!(p1.matmul(p2).hs_norm() < 1e-15);
        let spans = b.spans(0).unwrap();
        assert_eq!(spans.center.len(), 2);
    }

    #[test]
    fn product_algebra_dimension_is_sum_of_fourth_powers() {
        let b = build_spec(&[2, 3]);
        let spans = b.spans(0).unwrap();
        assert_eq!(spans.algebra.len(), 13);
        assert_eq!(spans.opposite.as_ref().unwrap().len(), 13);
        // Σ nₖ⁴ = 16 + 81
        assert_eq!(spans.product.as_ref().unwrap().len(), 97);
        assert_eq!(spans.center.len(), 2);
    }

    #[test]
    fn su2_generators_give_the_same_block_span() {
        // the single M₂ block is equally generated by the Pauli su(2)
        // basis plus the identity under left multiplication
        let b = build_spec(&[2]);
        let spans = b.spans(0).unwrap();
        let dim = b.dim();
        let unit = |i: usize, j: usize| {
            let mut m = CMatrix::zeros(2, 2);
            m[(i, j)] = C64::new(1.0, 0.0);
            m
        };
        let lmul = |x: &CMatrix| {
            // left multiplication on M₂ in the E_ij basis
            CMatrix::from_fn(dim, dim, |rc, cc| {
                let (ri, rj) = (rc / 2, rc % 2);
                let (ci, cj) = (cc / 2, cc % 2);
                if rj == cj {
                    x[(ri, ci)]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        let sx = &unit(0, 1) + &unit(1, 0);
        let sy = &unit(1, 0).scale(C64::new(0.0, 1.0)) + &unit(0, 1).scale(C64::new(0.0, -1.0));
        let sz = &unit(0, 0) - &unit(1, 1);
        let rep = AlgebraRep::new(
            dim,
            alloc::vec![
                ("T1".into(), lmul(&sx)),
                ("T2".into(), lmul(&sy)),
                ("T3".into(), lmul(&sz)),
            ],
            2,
        )
        .unwrap();
        let pauli_span = rep.span().unwrap();
        let cmp = subspace_report(&pauli_span, &spans.algebra, SUBSPACE_TOL).unwrap();
        assert!(cmp.equal, "residual {}", cmp.residual);
    }

    #[test]
    fn layout_round_trip_matches_gns_index() {
        let b = build_spec(&[2, 3]);
        for idx in 0..b.dim() {
            let q = b.layout.quantum(idx);
            assert_eq!(b.layout.index(&q), Some(idx));
        }
    }
}
