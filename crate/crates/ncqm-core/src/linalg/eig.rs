//! Hermitian eigendecomposition (cyclic complex Jacobi) and the matrix
//! exponential (eigendecomposition for (anti-)Hermitian input, scaling and
//! squaring with a degree-13 Padé approximant otherwise).

use alloc::vec::Vec;

use num_complex::Complex;

use super::cmatrix::{CMatrix, LinalgError, C64};

const HERM_PRE_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns ascending real eigenvalues and the unitary matrix whose columns
/// are the matching eigenvectors, so `A = V diag(λ) V†`. Rejects input whose
/// Hermiticity defect exceeds `1e-10` relative to its norm.
pub fn eig_hermitian(a: &CMatrix) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    let n = a.require_square()?;
    if !a.all_finite() {
        return Err(LinalgError::NonFinite);
    }
    let scale = a.hs_norm();
    if scale > 0.0 {
        let defect = a.hermiticity_defect();
        if defect > HERM_PRE_TOL {
            return Err(LinalgError::NotHermitian { defect });
        }
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }

    let mut m = a.hermitize();
    let mut v = CMatrix::identity(n);
    let target = (1e-14 * scale.max(1e-300)).max(1e-300);

    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * m[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / mag; // e^{iφ}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                // small root of t² − 2τt − 1 = 0
                let t = if tau >= 0.0 {
                    -1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let s_ph = phase.scale(s); // s·e^{iφ}
                let s_ph_conj = s_ph.conj();

                // rows p,q:  J† M
                for k in 0..n {
                    let mp = m[(p, k)];
                    let mq = m[(q, k)];
                    m[(p, k)] = mp.scale(c) + s_ph * mq;
                    m[(q, k)] = -s_ph_conj * mp + mq.scale(c);
                }
                // columns p,q:  M J  (and accumulate V J)
                for k in 0..n {
                    let mp = m[(k, p)];
                    let mq = m[(k, q)];
                    m[(k, p)] = mp.scale(c) + s_ph_conj * mq;
                    m[(k, q)] = -s_ph * mp + mq.scale(c);

                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = vp.scale(c) + s_ph_conj * vq;
                    v[(k, q)] = -s_ph * vp + vq.scale(c);
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).expect("finite eigenvalues"));
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let vs = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((sorted, vs))
}

/// `V f(λ) V†` for a decomposed Hermitian matrix.
pub fn spectral_map(eigs: &[f64], v: &CMatrix, mut f: impl FnMut(f64) -> C64) -> CMatrix {
    let n = eigs.len();
    let mut scaled = v.clone();
    for c in 0..n {
        let fv = f(eigs[c]);
        for r in 0..n {
            let z = scaled[(r, c)];
            scaled[(r, c)] = z * fv;
        }
    }
    scaled.matmul(&v.dagger())
}

// Padé-13 coefficients (Higham's scaling-and-squaring method).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential `e^A`.
///
/// Hermitian and anti-Hermitian inputs go through the eigendecomposition,
/// everything else through scaling-and-squaring Padé-13.
pub fn expm(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.require_square()?;
    if !a.all_finite() {
        return Err(LinalgError::NonFinite);
    }
    let norm = a.hs_norm();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let herm = (a - &a.dagger()).hs_norm() / norm;
    if herm < 1e-12 {
        let (eigs, v) = eig_hermitian(a)?;
        return Ok(spectral_map(&eigs, &v, |x| C64::new(libm::exp(x), 0.0)));
    }
    let anti = (&a.dagger() + a).hs_norm() / norm;
    if anti < 1e-12 {
        // A = iH with H Hermitian
        let h = a.scale(C64::new(0.0, -1.0)).hermitize();
        let (eigs, v) = eig_hermitian(&h)?;
        return Ok(spectral_map(&eigs, &v, |x| Complex::from_polar(1.0, x)));
    }
    expm_pade(a)
}

fn expm_pade(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.rows();
    let n1 = a.norm_one();
    let mut squarings = 0u32;
    let mut work = a.clone();
    if n1 > PADE13_THETA {
        squarings = libm::ceil(libm::log2(n1 / PADE13_THETA)) as u32;
        work = work.scale_re(libm::pow(0.5, squarings as f64));
    }
    let ident = CMatrix::identity(n);
    let a2 = &work * &work;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &PADE13;
    let u_inner = &(&(&a6.scale_re(b[13]) + &a4.scale_re(b[11])) + &a2.scale_re(b[9])) * &a6;
    let u_poly = &(&(&u_inner + &a6.scale_re(b[7])) + &a4.scale_re(b[5]))
        + &(&a2.scale_re(b[3]) + &ident.scale_re(b[1]));
    let u = &work * &u_poly;
    let v_inner = &(&(&a6.scale_re(b[12]) + &a4.scale_re(b[10])) + &a2.scale_re(b[8])) * &a6;
    let v = &(&(&v_inner + &a6.scale_re(b[6])) + &a4.scale_re(b[4]))
        + &(&a2.scale_re(b[2]) + &ident.scale_re(b[0]));
    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
