//! Homogeneous 2D wave propagation, boundary sampling `K` and its adjoint `K*`.
//!
//! The initial-value problem `Δp − p_tt / v² = 0`, `p(0) = p0`, `p_t(0) = 0` is solved
//! exactly per Fourier mode on a zero-padded periodic domain:
//! `p̂(k, t) = cos(v|k|t) p̂0(k)`.

mod operator;
mod propagator;
mod sensors;

pub use operator::{AcousticOperator, MemoryBudget};
pub use propagator::{Propagator, WaveState};
pub use sensors::{Geometry, SensorArray};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Uniform sampling times `t_j = j * dt`, `j = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAxis {
    len: usize,
    dt: f64,
}

impl TimeAxis {
    pub fn new(len: usize, dt: f64) -> Result<Self> {
        if len < 1 {
            return Err(Error::invalid(
                "n_t",
                "at least one time sample is required",
            ));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("{dt} must be > 0")));
        }
        Ok(Self { len, dt })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// Last sampling time.
    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }
}

/// Pressure traces, one row per sensor and one column per time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorData {
    times: TimeAxis,
    values: Array2<f64>,
}

impl SensorData {
    pub fn new(times: TimeAxis, values: Array2<f64>) -> Result<Self> {
        if values.ncols() != times.len() {
            return Err(Error::mismatch(
                format!("{} time samples", times.len()),
                format!("{}", values.ncols()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sensor data"));
        }
        Ok(Self { times, values })
    }

    pub fn zeros(n_sensors: usize, times: TimeAxis) -> Self {
        Self {
            times,
            values: Array2::zeros((n_sensors, times.len())),
        }
    }

    pub fn times(&self) -> &TimeAxis {
        &self.times
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n_sensors(&self) -> usize {
        self.values.nrows()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SensorData) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sensor-major flattening, matching the row order of the dense forward matrix.
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    pub(crate) fn from_trusted(times: TimeAxis, values: Array2<f64>) -> Self {
        Self { times, values }
    }
}
