//! Structural invariants of the Heisenberg dynamics across the model zoo.

use ncqm_core::axioms::{check_reality, CheckOpts};
use ncqm_core::dynamics::{assemble_hamiltonian, velocity, HamiltonianSpec, Propagator, WordPoly};
use ncqm_core::linalg::{CMatrix, C64};
use ncqm_core::models::{ModelBundle, ModelSpec, ThetaSpec, TorusMode};
use ncqm_core::rng::SplitMix64;

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
fn evolution_is_an_automorphism() {
    // (ab)ₜ = aₜbₜ for several times and random observables
    let b = nc5();
    let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
    let prop = Propagator::new(&h).unwrap();
    let mut rng = SplitMix64::new(17);
    for t in [0.3, 1.1, 2.7] {
        let x = rng.hermitian(b.dim());
        let y = rng.hermitian(b.dim());
        let lhs = prop.evolve(&x.matmul(&y), t);
        let rhs = prop.evolve(&x, t).matmul(&prop.evolve(&y, t));
        let scale = x.hs_norm() * y.hs_norm();
        assert!((&lhs - &rhs).hs_norm() < 1e-9 * scale, "t = {t}");
    }
}

#[test]
fn velocity_satisfies_the_leibniz_rule() {
    let b = nc5();
    let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
    let mut rng = SplitMix64::new(23);
    for _ in 0..5 {
        let x = rng.hermitian(b.dim());
        let y = rng.hermitian(b.dim());
        let lhs = velocity(&h, &x.matmul(&y)).unwrap();
        let rhs = &velocity(&h, &x).unwrap().matmul(&y) + &x.matmul(&velocity(&h, &y).unwrap());
        let scale = h.hs_norm() * x.hs_norm() * y.hs_norm();
        assert!((&lhs - &rhs).hs_norm() < 1e-12 * scale.max(1.0));
    }
}

#[test]
fn double_torus_flip_is_conserved() {
    // H of the admissible form commutes with σ, so σ̇ = 0
    let b = ModelBundle::build(&ModelSpec::DoubleTorus {
        size: 6,
        mode: TorusMode::Cyclic,
        window_margin: 1,
    })
    .unwrap();
    // σ-invariant central coefficients: w(UV† + VU†) + 1 is Hermitian and
    // invariant under the circle swap
    let z_sym = |w: f64| {
        WordPoly::term(&["U", "V*"], c(w, 0.0))
            .plus(&["V", "U*"], c(w, 0.0))
            .plus(&[], c(1.0, 0.0))
    };
    let hspec = HamiltonianSpec::DoubleTorus {
        z: [z_sym(0.2), z_sym(-0.1), z_sym(0.05), z_sym(0.15)],
    };
    let h = assemble_hamiltonian(&b, &hspec).unwrap();
    let sigma = b.named_op("sigma").unwrap();
    assert!(h.commutator(sigma).unwrap().hs_norm() < 1e-10, "σ must be conserved");
    assert!(velocity(&h, sigma).unwrap().hs_norm() < 1e-10);
}

#[test]
fn reality_holds_for_j_commuting_hamiltonians_across_models() {
    let opts = CheckOpts { samples: 6, probe_degree: 1, ..CheckOpts::default() };
    // torus and double torus with their natural free Hamiltonians
    let bundles = [
        nc5(),
        ModelBundle::build(&ModelSpec::DoubleTorus { size: 4, mode: TorusMode::Cyclic, window_margin: 1 })
            .unwrap(),
        ModelBundle::build(&ModelSpec::FiniteSum { blocks: vec![2, 3] }).unwrap(),
    ];
    for b in &bundles {
        let h0 = assemble_hamiltonian(b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
        // symmetrize under J so [H, J] = 0 exactly
        let j = b.rep.j().unwrap();
        let h = (&h0 + &j.conjugate_operator(&h0)).scale_re(0.5);
        let report = check_reality(b, &h, &opts).unwrap();
        assert!(report.passed(), "{}: max residual {}", b.name, report.max_residual());
    }
}

#[test]
fn moyal_norm_preservation_under_evolution() {
    let b = ModelBundle::build(&ModelSpec::Moyal { levels: 8, theta: 0.8, window_margin: 2 }).unwrap();
    let h = assemble_hamiltonian(&b, &HamiltonianSpec::free_for(&b.spec)).unwrap();
    let prop = Propagator::new(&h).unwrap();
    let x1 = b.rep.generator("x1").unwrap();
    for t in [0.5, 2.0] {
        let xt = prop.evolve(x1, t);
        assert!((xt.hs_norm() - x1.hs_norm()).abs() < 1e-9 * x1.hs_norm());
    }
}
