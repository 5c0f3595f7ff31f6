//! Crossed product of the two-torus with the circle-swapping flip: two
//! commuting unitaries `U, V` plus a self-adjoint involution `σ` with
//! `σU = Vσ`, on two lattice sectors `|n,m,±⟩`:
//!
//! `U|n,m,±⟩ = |n+1,m,±⟩`, `V|n,m,±⟩ = |n,m+1,±⟩`, `σ|n,m,±⟩ = |m,n,∓⟩`,
//! with Tomita conjugation `J|n,m,+⟩ = |−n,−m,+⟩`, `J|n,m,−⟩ = |−m,−n,−⟩`
//! and the opposite generators acting sector-dependently.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::monomial::{dedupe_tagged, MonomialOp};
use super::nc_torus::Lattice;
use super::{rep_mod, ModelBundle, ModelError, ModelSpec, Monomial, TorusMode, WeakProbeMode, WindowKind};
use crate::algebra::{AlgebraRep, AntiUnitary};
use crate::linalg::{CMatrix, C64};

pub(super) fn build(
    spec: &ModelSpec,
    size: usize,
    mode: TorusMode,
    window_margin: usize,
) -> Result<ModelBundle, ModelError> {
    if size < 2 {
        return Err(ModelError::BadSpec("lattice size must be at least 2".into()));
    }
    let radius = match mode {
        TorusMode::Cyclic => size / 2,
        TorusMode::Truncated => size,
    };
    if window_margin >= radius.max(1) {
        return Err(ModelError::BadSpec(format!(
            "window margin {window_margin} must stay below the lattice radius {radius}"
        )));
    }
    let lat = Lattice { size, mode, sectors: 2 };
    let dim = lat.dim();
    let one = C64::new(1.0, 0.0);

    let u = MonomialOp::from_map(dim, |c| lat.shifted(c, 1, 0, None).map(|r| (r, one)));
    let v = MonomialOp::from_map(dim, |c| lat.shifted(c, 0, 1, None).map(|r| (r, one)));
    // σ swaps the lattice coordinates and flips the sector
    let sigma = MonomialOp::from_map(dim, |c| {
        let q = lat.coords(c);
        lat.layout().index(&[q[1], q[0], 1 - q[2]]).map(|r| (r, one))
    });
    // opposite generators act on the two sectors differently
    let uo = MonomialOp::from_map(dim, |c| {
        let q = lat.coords(c);
        let (d1, d2) = if q[2] == 0 { (1, 0) } else { (0, 1) };
        lat.shifted(c, d1, d2, None).map(|r| (r, one))
    });
    let vo = MonomialOp::from_map(dim, |c| {
        let q = lat.coords(c);
        let (d1, d2) = if q[2] == 0 { (0, 1) } else { (1, 0) };
        lat.shifted(c, d1, d2, None).map(|r| (r, one))
    });
    let sigma_o = MonomialOp::from_map(dim, |c| {
        let q = lat.coords(c);
        lat.layout().index(&[q[0], q[1], 1 - q[2]]).map(|r| (r, one))
    });

    // J: sector + negates both coordinates, sector − also swaps them
    let mut k_mat = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        let q = lat.coords(c);
        let target = if q[2] == 0 { [-q[0], -q[1], 0] } else { [-q[1], -q[0], 1] };
        if let Some(r) = lat.layout().index(&target) {
            k_mat[(r, c)] = one;
        }
    }

    // δ₁, δ₂: diagonal coordinate operators, identical on both sectors
    let d1 = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::new(lat.coords(r)[0] as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let d2 = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::new(lat.coords(r)[1] as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });

    // spanning monomials: U^a V^b σ^e (every element is f₋ + f₊σ)
    let cap: i64 = match mode {
        TorusMode::Cyclic => size as i64 - 1,
        TorusMode::Truncated => (size as i64).min(5),
    };
    let pow = |op: &MonomialOp, e: i64| -> MonomialOp {
        let mut acc = MonomialOp::identity(dim);
        let (base, times) = if e >= 0 { (op.clone(), e) } else { (op.adjoint(), -e) };
        for _ in 0..times {
            acc = base.compose(&acc);
        }
        acc
    };
    let exponents: Vec<i64> = match mode {
        TorusMode::Cyclic => (0..=cap).collect(),
        TorusMode::Truncated => (-cap..=cap).collect(),
    };
    let mut span_mons = Vec::new();
    let mut opp_mons = Vec::new();
    let mut a_ops = Vec::new();
    let mut o_ops = Vec::new();
    for &a in &exponents {
        for &b in &exponents {
            for flip in [0i64, 1] {
                let dega = match mode {
                    TorusMode::Cyclic => (rep_mod(a, size).abs() + rep_mod(b, size).abs()) as usize,
                    TorusMode::Truncated => (a.abs() + b.abs()) as usize,
                };
                let base = pow(&u, a).compose(&pow(&v, b));
                let op = if flip == 1 { base.compose(&sigma) } else { base };
                span_mons.push(Monomial {
                    label: format!("U^{a}V^{b}s^{flip}"),
                    degree: dega,
                    mat: op.to_matrix(),
                });
                a_ops.push((dega, op));
                let baseo = pow(&uo, a).compose(&pow(&vo, b));
                let opo = if flip == 1 { baseo.compose(&sigma_o) } else { baseo };
                opp_mons.push(Monomial {
                    label: format!("Uo^{a}Vo^{b}so^{flip}"),
                    degree: dega,
                    mat: opo.to_matrix(),
                });
                o_ops.push((dega, opo));
            }
        }
    }
    // Sector projectors are weak limits of averaged products
    // (1/J)Σ(U†U°)^j, so the finite proxy of the closed product algebra
    // carries the sector-projected monomials alongside the plain ones.
    let projector = |sector: i64| {
        MonomialOp::from_map(dim, |cx| {
            if lat.coords(cx)[2] == sector {
                Some((cx, one))
            } else {
                None
            }
        })
    };
    let p_plus = projector(0);
    let p_minus = projector(1);
    let mut products = Vec::new();
    for (da, x) in &a_ops {
        for (db, y) in &o_ops {
            let m = x.compose(y);
            products.push((*da, *db, m.compose(&p_plus)));
            products.push((*da, *db, m.compose(&p_minus)));
            products.push((*da, *db, m));
        }
    }
    let product_ops = dedupe_tagged(products);

    let gens: Vec<(String, CMatrix)> = alloc::vec![
        ("U".into(), u.to_matrix()),
        ("V".into(), v.to_matrix()),
        ("sigma".into(), sigma.to_matrix()),
    ];
    let opp_gens: Vec<(String, CMatrix)> = alloc::vec![
        ("Uo".into(), uo.to_matrix()),
        ("Vo".into(), vo.to_matrix()),
        ("sigmao".into(), sigma_o.to_matrix()),
    ];
    let span_hint: Vec<CMatrix> = span_mons.iter().map(|m| m.mat.clone()).collect();
    let opp_hint: Vec<CMatrix> = opp_mons.iter().map(|m| m.mat.clone()).collect();

    let window_kind = WindowKind::Torus { size, mode, sectors: 2 };
    let mut rep = AlgebraRep::new(dim, gens, (2 * radius).max(2))?
        .with_j(AntiUnitary::new(k_mat)?)
        .with_opposite(opp_gens)
        .with_span_hint(span_hint)
        .with_opposite_hint(opp_hint);
    if mode == TorusMode::Truncated {
        if let Some(w) = super::window_for(&window_kind, dim, window_margin) {
            rep = rep.with_window(w);
        }
    }

    let mut named = BTreeMap::new();
    named.insert("sigma".into(), rep.generator("sigma").expect("declared").clone());
    named.insert("delta1".into(), d1);
    named.insert("delta2".into(), d2);

    let name = format!(
        "double_torus(N={size},{})",
        if mode == TorusMode::Cyclic { "cyclic" } else { "truncated" }
    );
    Ok(ModelBundle {
        spec: spec.clone(),
        name,
        rep,
        named,
        layout: lat.layout(),
        span_mons,
        opp_mons: Some(opp_mons),
        center_mons: None,
        weak_probe_mode: WeakProbeMode::CenterBasis,
        window_kind,
        product_ops: Some(product_ops),
    })
}
