//! Square pixel grids and real-valued fields living on them.
//!
//! Pixel `(row, col)` has its center at `x = (col + 0.5) * h`, `y = (row + 0.5) * h`
//! with `h = physical_size / n`. Row 0 is the bottom edge, column 0 the left edge.
//! Fields are stored row-major.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Default periodic padding multiplier used by the wave propagator.
pub const DEFAULT_PAD_FACTOR: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    physical_size: f64,
    sound_speed: f64,
    pad_factor: usize,
}

impl GridSpec {
    pub fn new(n: usize, physical_size: f64, sound_speed: f64, pad_factor: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Self::any_size(n, physical_size, sound_speed, pad_factor)
    }

    /// Like [`GridSpec::new`] but accepts any `n >= 2`.
    ///
    /// Only the wave operators are defined on such grids; the wavelet transform rejects
    /// sizes that are not divisible by `2^depth`.
    pub fn any_size(
        n: usize,
        physical_size: f64,
        sound_speed: f64,
        pad_factor: usize,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", format!("{n} must be >= 2")));
        }
        if !(physical_size.is_finite() && physical_size > 0.0) {
            return Err(Error::invalid(
                "physical_size",
                format!("{physical_size} must be > 0"),
            ));
        }
        if !(sound_speed.is_finite() && sound_speed > 0.0) {
            return Err(Error::invalid(
                "sound_speed",
                format!("{sound_speed} must be > 0"),
            ));
        }
        if pad_factor < 1 {
            return Err(Error::invalid("pad_factor", "must be >= 1"));
        }
        Ok(Self {
            n,
            physical_size,
            sound_speed,
            pad_factor,
        })
    }

    /// Same physical domain and medium, different resolution.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.physical_size, self.sound_speed, self.pad_factor)
    }

    pub fn with_pad_factor(&self, pad_factor: usize) -> Result<Self> {
        Self::any_size(self.n, self.physical_size, self.sound_speed, pad_factor)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pixels, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn physical_size(&self) -> f64 {
        self.physical_size
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    pub fn pixel_size(&self) -> f64 {
        self.physical_size / self.n as f64
    }

    pub fn padded_n(&self) -> usize {
        self.pad_factor * self.n
    }

    /// Offset of the physical grid inside the padded periodic domain (centered).
    pub fn pad_offset(&self) -> usize {
        (self.pad_factor - 1) * self.n / 2
    }

    /// Physical coordinate of the center of pixel index `i` along either axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.pixel_size()
    }
}

/// Signed frequency of DFT index `k` on a length-`n` axis: `k` for `k <= n/2`, else `k - n`.
pub fn signed_freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Array2<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Array2<f64>) -> Result<Self> {
        let n = grid.n();
        if values.dim() != (n, n) {
            return Err(Error::mismatch(
                format!("{n}x{n} field"),
                format!("{:?}", values.dim()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.n();
        Self {
            grid,
            values: Array2::zeros((n, n)),
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = grid.n();
        Self::new(grid, Array2::from_shape_fn((n, n), |(r, c)| f(r, c)))
    }

    /// Builds a field from a row-major slice of length `n²`.
    pub fn from_vec(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        let n = grid.n();
        if data.len() != n * n {
            return Err(Error::mismatch(
                format!("{} values", n * n),
                format!("{}", data.len()),
            ));
        }
        let values = Array2::from_shape_vec((n, n), data).expect("length checked");
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Row-major copy of the pixel values.
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field {
            grid: self.grid,
            values: &self.values * factor,
        }
    }

    pub(crate) fn from_trusted(grid: GridSpec, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), (grid.n(), grid.n()));
        Self { grid, values }
    }

    pub(crate) fn check_same_grid(&self, other: &GridSpec) -> Result<()> {
        if self.grid.n() != other.n() {
            return Err(Error::mismatch(
                format!("{0}x{0} field", other.n()),
                format!("{0}x{0}", self.grid.n()),
            ));
        }
        Ok(())
    }
}

/// Largest absolute difference between two equally sized fields.
pub fn max_abs_diff(a: &Field, b: &Field) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
