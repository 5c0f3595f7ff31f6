//! Small deterministic PRNG for seeded test-observable sampling.
//!
//! SplitMix64: identical streams for identical seeds on every platform,
//! which keeps check reports reproducible.

use alloc::vec::Vec;

use crate::linalg::{CMatrix, HsBasis, C64};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_sym(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn next_complex(&mut self) -> C64 {
        C64::new(self.next_sym(), self.next_sym())
    }

    pub fn next_range(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Random Hermitian matrix with entries of order one.
    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.next_complex()).hermitize()
    }

    /// Hermitian combination `(Σ rᵢ Bᵢ + h.c.)/2` of basis elements with
    /// uniform real weights.
    pub fn hermitian_combo(&mut self, basis: &HsBasis) -> CMatrix {
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        for b in basis.elems() {
            m = &m + &b.scale_re(self.next_sym());
        }
        m.hermitize()
    }

    /// `count` Hermitian combinations, for sampled checks.
    pub fn hermitian_combos(&mut self, basis: &HsBasis, count: usize) -> Vec<CMatrix> {
        (0..count).map(|_| self.hermitian_combo(basis)).collect()
    }
}
