//! The spectral-distance solver against a brute-force oracle.

use ncqm_core::distance::{
    connes_distance_over, hermitian_span_basis, DistanceOpts, DistanceResult, StateSpec,
};
use ncqm_core::linalg::{eig_hermitian, CMatrix, C64};
use ncqm_core::models::{ModelBundle, ModelSpec, ThetaSpec, TorusMode};
use ncqm_core::rng::SplitMix64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn spectral_norm(m: &CMatrix) -> f64 {
    let (eigs, _) = eig_hermitian(&m.hermitize()).unwrap();
    eigs.iter().fold(0.0_f64, |a, e| a.max(e.abs()))
}

/// Random search plus coordinate refinement over the Hermitian
/// coordinates; independent of the ascent path in the solver.
fn brute_force(
    basis: &[CMatrix],
    d: &CMatrix,
    chi: &StateSpec,
    phi: &StateSpec,
    seed: u64,
) -> f64 {
    let m = basis.len();
    let grad: Vec<f64> = basis.iter().map(|h| (chi.expectation(h) - phi.expectation(h)).re).collect();
    let value = |x: &[f64]| -> f64 {
        let mut a = CMatrix::zeros(d.rows(), d.rows());
        for (xj, h) in x.iter().zip(basis.iter()) {
            a = &a + &h.scale_re(*xj);
        }
        let comm = d.commutator(&a).unwrap().scale(c(0.0, -1.0));
        let s = spectral_norm(&comm);
        if s < 1e-12 {
            return 0.0;
        }
        let obj: f64 = grad.iter().zip(x.iter()).map(|(g, xj)| g * xj).sum();
        obj.abs() / s
    };
    let mut rng = SplitMix64::new(seed);
    let mut best = 0.0_f64;
    let mut best_x = vec![0.0; m];
    for _ in 0..4000 {
        let x: Vec<f64> = (0..m).map(|_| rng.next_sym()).collect();
        let v = value(&x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let mut step = 0.5;
    for _round in 0..40 {
        let mut improved = false;
        for j in 0..m {
            for dir in [1.0, -1.0] {
                let mut x = best_x.clone();
                x[j] += dir * step;
                let v = value(&x);
                if v > best {
                    best = v;
                    best_x = x;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        if step < 1e-6 {
            break;
        }
    }
    best
}

fn nc3_setup() -> (Vec<CMatrix>, StateSpec, StateSpec) {
    let bundle = ModelBundle::build(&ModelSpec::NcTorus {
        theta: ThetaSpec::Rational { p: 1, q: 3 },
        size: 3,
        mode: TorusMode::Cyclic,
        window_margin: 0,
    })
    .unwrap();
    let spans = bundle.spans(0).unwrap();
    let basis = hermitian_span_basis(&spans.algebra);
    assert_eq!(basis.len(), 9);
    let mut v1 = vec![c(0.0, 0.0); 9];
    v1[0] = c(1.0, 0.0);
    let mut v2 = vec![c(0.0, 0.0); 9];
    v2[4] = c(0.6, 0.0);
    v2[7] = c(0.0, 0.8);
    (basis, StateSpec::Pure(v1), StateSpec::Pure(v2))
}

#[test]
fn solver_matches_brute_force_on_random_dirac_operators() {
    let (basis, chi, phi) = nc3_setup();
    let opts = DistanceOpts::default();
    for seed in [1u64, 2, 3, 4, 5] {
        let mut rng = SplitMix64::new(seed);
        let d = rng.hermitian(9).scale_re(2.0);
        let solver = connes_distance_over(&basis, &d, &chi, &phi, &opts).unwrap();
        let oracle = brute_force(&basis, &d, &chi, &phi, seed ^ 0xabcd);
        let scale = oracle.max(1e-6);
        assert!(
            (solver.distance - oracle).abs() < 1e-3 * scale.max(1.0),
            "seed {seed}: solver {} vs oracle {oracle}",
            solver.distance
        );
    }
}

#[test]
fn distance_is_symmetric_and_satisfies_the_triangle_inequality() {
    let (basis, chi, phi) = nc3_setup();
    let mut v3 = vec![c(0.0, 0.0); 9];
    v3[2] = c(1.0, 0.0);
    let psi = StateSpec::Pure(v3);
    let mut rng = SplitMix64::new(99);
    let d = rng.hermitian(9).scale_re(1.5);
    let opts = DistanceOpts::default();
    let run = |a: &StateSpec, b: &StateSpec| -> DistanceResult {
        connes_distance_over(&basis, &d, a, b, &opts).unwrap()
    };
    let dcp = run(&chi, &phi).distance;
    let dpc = run(&phi, &chi).distance;
    assert!((dcp - dpc).abs() < 2e-3 * dcp.max(1.0), "symmetry: {dcp} vs {dpc}");
    let dcs = run(&chi, &psi).distance;
    let dsp = run(&psi, &phi).distance;
    // lower-bound character of the solver admits a small tolerance slack
    assert!(dcp <= dcs + dsp + 2e-3 * (dcs + dsp).max(1.0), "triangle: {dcp} vs {dcs} + {dsp}");
}
