//! Partial permutation-with-phase operators.
//!
//! Every generator of the lattice model families maps each basis vector to
//! at most one basis vector times a phase. Composing such maps costs O(dim)
//! instead of a dense matrix product, which keeps the enumeration of
//! product-algebra monomials cheap, and their structural keys give exact
//! deduplication before orthonormalization.

use alloc::vec::Vec;

use crate::linalg::{CMatrix, C64};

#[derive(Clone, Debug)]
pub(crate) struct MonomialOp {
    dim: usize,
    /// column index → (row index, phase); `None` for annihilated columns.
    map: Vec<Option<(usize, C64)>>,
}

impl MonomialOp {
    pub fn identity(dim: usize) -> Self {
        MonomialOp { dim, map: (0..dim).map(|i| Some((i, C64::new(1.0, 0.0)))).collect() }
    }

    pub fn from_map(dim: usize, f: impl Fn(usize) -> Option<(usize, C64)>) -> Self {
        MonomialOp { dim, map: (0..dim).map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.map.iter().all(|e| e.is_none())
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &MonomialOp) -> MonomialOp {
        debug_assert_eq!(self.dim, rhs.dim);
        MonomialOp {
            dim: self.dim,
            map: (0..self.dim)
                .map(|c| {
                    let (mid, p1) = rhs.map[c]?;
                    let (row, p2) = self.map[mid]?;
                    Some((row, p1 * p2))
                })
                .collect(),
        }
    }

    pub fn adjoint(&self) -> MonomialOp {
        let mut map = alloc::vec![None; self.dim];
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((r, p)) = entry {
                map[*r] = Some((c, p.conj()));
            }
        }
        MonomialOp { dim: self.dim, map }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((r, p)) = entry {
                m[(*r, c)] = *p;
            }
        }
        m
    }

    /// Structural key for exact deduplication. Phases are quantized at
    /// 1e-9; distinct root-of-unity phase patterns at the lattice sizes
    /// used here differ by far more than that.
    pub fn key(&self) -> Vec<(usize, i64, i64)> {
        self.map
            .iter()
            .map(|e| match e {
                None => (usize::MAX, 0, 0),
                Some((r, p)) => (*r, libm::round(p.re * 1e9) as i64, libm::round(p.im * 1e9) as i64),
            })
            .collect()
    }
}

/// Deduplicate degree-tagged operators, keeping the lowest factor degrees
/// seen for each distinct matrix.
pub(crate) fn dedupe_tagged(mut ops: Vec<(usize, usize, MonomialOp)>) -> Vec<(usize, usize, MonomialOp)> {
    use alloc::collections::BTreeSet;
    ops.sort_by_key(|(da, db, _)| (*da.max(db), da + db));
    let mut seen: BTreeSet<Vec<(usize, i64, i64)>> = BTreeSet::new();
    let mut out = Vec::new();
    for (da, db, op) in ops {
        if op.is_zero() {
            continue;
        }
        if seen.insert(op.key()) {
            out.push((da, db, op));
        }
    }
    out
}
