//! Dense complex linear algebra: matrices, spectral decompositions, matrix
//! exponentials, and Hilbert–Schmidt subspace machinery.

mod basis;
mod cmatrix;
mod eig;

pub use basis::{gram_rank, HsBasis, SpanBuilder};
pub use cmatrix::{CMatrix, LinalgError, C64};
pub use eig::{eig_hermitian, expm, spectral_map};
