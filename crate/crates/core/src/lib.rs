//! Matrix-free 2D photoacoustic tomography.
//!
//! * [`acoustic`]: exact spectral wave propagation, boundary sampling `K` and `K*`.
//! * [`wavelet`]: periodized orthonormal Daubechies transforms in 2D.
//! * [`smoothing`]: the adjoint Sobolev embedding `E_s*` (Fourier, wavelet and dense
//!   kernel backends), Matérn kernels and the Bessel-potential filter.
//! * [`solver`]: GMRES and the regularized normal equation `(E_s* K* K + αI) x = E_s* K* p`.
//! * [`experiments`]: phantoms, sensor layouts, noisy data, error metrics and the
//!   conditioning study.

pub mod acoustic;
pub mod error;
pub mod experiments;
pub mod filters_check;
pub mod grid;
pub mod io;
pub mod smoothing;
pub mod solver;
pub mod spectral;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
