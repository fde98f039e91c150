use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::layout::map_sensors;
use crate::acoustic::{AcousticOperator, SensorArray, SensorData, TimeAxis};
use crate::error::{Error, Result};
use crate::grid::Field;

/// Additive white Gaussian noise with `σ = std_fraction · max |clean signal|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub std_fraction: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(std_fraction: f64, seed: u64) -> Result<Self> {
        if !(std_fraction >= 0.0) || !std_fraction.is_finite() {
            return Err(Error::invalid(
                "noise",
                format!("{std_fraction} must be >= 0"),
            ));
        }
        Ok(Self { std_fraction, seed })
    }

    pub fn none() -> Self {
        Self {
            std_fraction: 0.0,
            seed: 0,
        }
    }

    /// Adds noise in sensor-major order; deterministic for a fixed seed.
    pub fn apply(&self, data: &SensorData) -> Result<SensorData> {
        if self.std_fraction == 0.0 {
            return Ok(data.clone());
        }
        let sigma = self.std_fraction * data.max_abs();
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid("noise", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut values = data.values().clone();
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
        SensorData::new(*data.times(), values)
    }
}

/// Forward-simulated data for `sensors` (which live on the phantom's grid) plus noise.
pub fn simulate_data(
    phantom: &Field,
    sensors: &SensorArray,
    times: TimeAxis,
    noise: &NoiseModel,
) -> Result<SensorData> {
    if sensors.grid() != phantom.grid() {
        return Err(Error::mismatch(
            format!("sensors on the {0}x{0} phantom grid", phantom.grid().n()),
            format!("sensors on a {0}x{0} grid", sensors.grid().n()),
        ));
    }
    let op = AcousticOperator::new(sensors.clone(), times);
    noise.apply(&op.forward(phantom)?)
}

/// Per-sensor linear interpolation onto `target`.
pub fn resample_time(data: &SensorData, target: &TimeAxis) -> Result<SensorData> {
    let src = data.times();
    let end = src.end();
    if target.end() > end * (1.0 + 1e-12) {
        return Err(Error::Extrapolation {
            requested: target.end(),
            end,
        });
    }
    if src == target {
        return Ok(data.clone());
    }
    let last = src.len() - 1;
    let weights: Vec<(usize, f64)> = (0..target.len())
        .map(|j| {
            let u = (target.time(j) / src.dt()).min(last as f64);
            let i = (u.floor() as usize).min(last.saturating_sub(1));
            (i, if last == 0 { 0.0 } else { u - i as f64 })
        })
        .collect();
    let values = Array2::from_shape_fn((data.n_sensors(), target.len()), |(s, j)| {
        let (i, w) = weights[j];
        let row = data.values().row(s);
        if w == 0.0 {
            row[i]
        } else {
            (1.0 - w) * row[i] + w * row[i + 1]
        }
    });
    SensorData::new(*target, values)
}

/// Simulates on the phantom's (finer) grid with step `sim_dt`, then resamples onto the
/// reconstruction time axis and adds noise there.
///
/// `sensors` are given on the reconstruction grid and snapped to the simulation ring.
pub fn simulate_for_reconstruction(
    phantom: &Field,
    sensors: &SensorArray,
    times: &TimeAxis,
    sim_dt: f64,
    noise: &NoiseModel,
) -> Result<SensorData> {
    let sim_sensors = map_sensors(sensors, phantom.grid())?;
    let steps = (times.end() / sim_dt * (1.0 - 1e-12)).ceil() as usize + 1;
    let sim_times = TimeAxis::new(steps, sim_dt)?;
    let clean = simulate_data(phantom, &sim_sensors, sim_times, &NoiseModel::none())?;
    noise.apply(&resample_time(&clean, times)?)
}
