//! 2D discrete Fourier transforms on square arrays and real spectral multipliers.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Field;

/// Imaginary residue tolerated after an inverse transform of a real-symmetric product.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Tolerance on `M[k] = M[-k]` for a multiplier to be accepted.
pub const SYMMETRY_TOL: f64 = 1e-12;

const ROWS_PER_TASK: usize = 16;

/// Forward and inverse 2D FFT plans for an `n x n` row-major buffer.
///
/// Plans are immutable and shareable; scratch lives in each call.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.forward);
    }

    /// Inverse transform including the `1/n²` normalization, in place.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inverse);
        let scale = 1.0 / (self.n * self.n) as f64;
        buf.par_iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(buf.len(), n * n, "buffer is not {n}x{n}");
        rows(buf, n, plan);
        transpose_in_place(buf, n);
        rows(buf, n, plan);
        transpose_in_place(buf, n);
    }

    /// Spectrum of a real row-major array.
    pub fn forward_real(&self, values: &Array2<f64>) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }
}

fn rows(buf: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    buf.par_chunks_mut(n * ROWS_PER_TASK)
        .for_each(|block| plan.process(block));
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let j0 = if bi == bj { i + 1 } else { bj };
                for j in j0..(bj + B).min(n) {
                    buf.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Real part of an inverse-transformed buffer, after checking the imaginary residue.
pub(crate) fn real_part_checked(buf: &[Complex64], n: usize) -> Result<Array2<f64>> {
    let (max_re, max_im) = buf.iter().fold((0.0f64, 0.0f64), |(r, i), c| {
        (r.max(c.re.abs()), i.max(c.im.abs()))
    });
    if max_im > IMAG_RESIDUE_TOL * max_re.max(f64::MIN_POSITIVE) && max_im > 1e-300 {
        return Err(Error::ImaginaryResidue {
            relative: max_im / max_re.max(f64::MIN_POSITIVE),
        });
    }
    Ok(Array2::from_shape_vec((n, n), buf.iter().map(|c| c.re).collect()).expect("square"))
}

/// Real multiplier indexed by DFT frequency pair `(k1, k2)`, even under `k -> -k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    values: Array2<f64>,
}

impl SpectralMultiplier {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::mismatch("square multiplier", format!("{r}x{c}")));
        }
        let dev = symmetry_deviation(&values);
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if !(dev <= SYMMETRY_TOL * scale) {
            return Err(Error::AsymmetricMultiplier { deviation: dev });
        }
        Ok(Self { values })
    }

    /// Samples `f(xi1, xi2)` on signed integer frequencies of an `n x n` grid.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn((n, n), |(k1, k2)| {
            f(
                crate::grid::signed_freq(k1, n),
                crate::grid::signed_freq(k2, n),
            )
        });
        Self::new(values)
    }

    pub fn ones(n: usize) -> Self {
        Self {
            values: Array2::ones((n, n)),
        }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

fn symmetry_deviation(values: &Array2<f64>) -> f64 {
    let n = values.nrows();
    let mut dev = 0.0f64;
    for ((k1, k2), &v) in values.indexed_iter() {
        let m = values[[(n - k1) % n, (n - k2) % n]];
        dev = dev.max((v - m).abs());
        if v.is_nan() {
            return f64::NAN;
        }
    }
    dev
}

/// Multiplies the 2D DFT of a real square array by a real even multiplier.
pub fn apply_multiplier(
    values: &Array2<f64>,
    mult: &Array2<f64>,
    fft: &Fft2,
) -> Result<Array2<f64>> {
    let n = fft.n();
    if values.dim() != (n, n) || mult.dim() != (n, n) {
        return Err(Error::mismatch(
            format!("{n}x{n}"),
            format!("values {:?}, multiplier {:?}", values.dim(), mult.dim()),
        ));
    }
    let mut buf = fft.forward_real(values);
    for (b, m) in buf.iter_mut().zip(mult.iter()) {
        *b *= *m;
    }
    fft.inverse(&mut buf);
    real_part_checked(&buf, n)
}

/// The real field whose DFT is `mult` times the DFT of `field`.
pub fn spectral_multiply(field: &Field, mult: &SpectralMultiplier) -> Result<Field> {
    let n = field.grid().n();
    if mult.n() != n {
        return Err(Error::mismatch(
            format!("{n}x{n} multiplier"),
            format!("{0}x{0}", mult.n()),
        ));
    }
    let fft = Fft2::new(n);
    let out = apply_multiplier(field.values(), mult.values(), &fft)?;
    Ok(Field::from_trusted(*field.grid(), out))
}
