//! Fourier-side representation of zero-mean real scalar fields on the torus.
//!
//! Fields live on `T^d = [0, 2pi)^d`, `d = 2, 3`, expanded in the orthonormal
//! basis `e_k(x) = (2pi)^{-d/2} exp(i k.x)`. A [`SpectralField`] stores the
//! coefficients on the truncated lattice `|k_i| <= N` (max-norm cutoff) with
//! the Hermitian symmetry `f_k = conj(f_{-k})` kept explicit, and `f_0 = 0`
//! (zero mean). The homogeneous Sobolev norm is
//! `||f||_{H^s} = (sum_k |k|^{2s} |f_k|^2)^{1/2}`.

mod fft;
mod field;
mod grid;
mod ops;

pub use fft::next_fast_size;
pub use field::{positive_representative, SpectralField, Wavevector};
pub use grid::GridField;
pub use ops::{advect_sparse, dealiased_product, product_sparse, SparseMode};
