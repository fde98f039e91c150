use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{Propagator, SensorArray, SensorData, TimeAxis};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Upper bound on the bytes a dense operator may occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget(pub u128);

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget(2 << 30);

    pub fn check(&self, what: &'static str, bytes: u128) -> Result<()> {
        if bytes > self.0 {
            return Err(Error::BudgetExceeded {
                what,
                requested: bytes,
                budget: self.0,
            });
        }
        Ok(())
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// The sampled forward map `K: p0 -> [p(r_i, t_j)]` and its exact discrete adjoint.
///
/// Every `forward` or `adjoint` call counts as one wave evaluation.
#[derive(Debug)]
pub struct AcousticOperator {
    prop: Propagator,
    sensors: SensorArray,
    times: TimeAxis,
    sensor_index: Vec<usize>,
    evaluations: AtomicUsize,
}

impl AcousticOperator {
    pub fn new(sensors: SensorArray, times: TimeAxis) -> Self {
        let prop = Propagator::new(sensors.grid());
        let sensor_index = sensors
            .pixels()
            .iter()
            .map(|&(r, c)| prop.padded_index(r, c))
            .collect();
        Self {
            prop,
            sensors,
            times,
            sensor_index,
            evaluations: AtomicUsize::new(0),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.prop.grid()
    }

    pub fn sensors(&self) -> &SensorArray {
        &self.sensors
    }

    pub fn times(&self) -> &TimeAxis {
        &self.times
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    /// Number of forward and adjoint wave solves performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Number of rows of `K`.
    pub fn data_len(&self) -> usize {
        self.sensors.len() * self.times.len()
    }

    /// Steps a single wave state through the time axis, sampling sensors after each rotation.
    pub fn forward(&self, p0: &Field) -> Result<SensorData> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let mut state = self.prop.initial_state(p0)?;
        let (p, q) = (&mut state.p_hat, &mut state.q_hat);
        let rot = self.prop.rotation(self.times.dt());
        let fft = self.prop.fft();
        let nt = self.times.len();
        let mut values = Array2::zeros((self.sensors.len(), nt));
        let mut buf = vec![Complex64::new(0.0, 0.0); p.len()];
        for j in 0..nt {
            if j > 0 {
                rot.apply(p, q);
            }
            if self.sensors.is_empty() {
                continue;
            }
            buf.copy_from_slice(p);
            fft.inverse(&mut buf);
            for (s, &idx) in self.sensor_index.iter().enumerate() {
                values[[s, j]] = buf[idx].re;
            }
        }
        Ok(SensorData::from_trusted(self.times, values))
    }

    /// `K* y = Σ_j P(t_j) Sᵀ y_j`, accumulated backwards in time with the same rotations.
    pub fn adjoint(&self, data: &SensorData) -> Result<Field> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let (ns, nt) = data.values().dim();
        if ns != self.sensors.len() || nt != self.times.len() {
            return Err(Error::mismatch(
                format!("{}x{} sensor data", self.sensors.len(), self.times.len()),
                format!("{ns}x{nt}"),
            ));
        }
        if (data.times().dt() - self.times.dt()).abs() > 1e-12 * self.times.dt() {
            return Err(Error::mismatch(
                format!("dt = {}", self.times.dt()),
                format!("dt = {}", data.times().dt()),
            ));
        }
        let len = self.prop.grid().padded_n().pow(2);
        let zero = Complex64::new(0.0, 0.0);
        let mut p = vec![zero; len];
        let mut q = vec![zero; len];
        let mut buf = vec![zero; len];
        let rot = self.prop.rotation(self.times.dt());
        let fft = self.prop.fft();
        for j in (0..nt).rev() {
            if j + 1 < nt {
                rot.apply(&mut p, &mut q);
            }
            buf.fill(zero);
            for (s, &idx) in self.sensor_index.iter().enumerate() {
                buf[idx].re += data.values()[[s, j]];
            }
            fft.forward(&mut buf);
            for (a, b) in p.iter_mut().zip(&buf) {
                *a += b;
            }
        }
        fft.inverse(&mut p);
        Ok(self.prop.crop_real(&p))
    }

    /// Dense `(N_s N_t) x n²` matrix whose column `k` is `forward(e_k)`, rows sensor-major.
    pub fn assemble_dense(&self, budget: MemoryBudget) -> Result<DMatrix<f64>> {
        let grid = *self.grid();
        let cols = grid.len();
        let rows = self.data_len();
        budget.check("dense forward matrix", rows as u128 * cols as u128 * 8)?;
        let columns: Vec<Vec<f64>> = (0..cols)
            .into_par_iter()
            .map(|k| {
                let n = grid.n();
                let mut values = Array2::zeros((n, n));
                values[[k / n, k % n]] = 1.0;
                self.forward(&Field::from_trusted(grid, values))
                    .map(|d| d.to_vec())
            })
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(rows, cols, |i, k| columns[k][i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::Geometry;
    use crate::grid::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = (0..n).map(|c| (0, c)).collect();
        v.extend((1..n).map(|r| (r, n - 1)));
        v.extend((0..n - 1).rev().map(|c| (n - 1, c)));
        v.extend((1..n - 1).rev().map(|r| (r, 0)));
        v
    }

    fn operator(n: usize, every: usize, nt: usize) -> AcousticOperator {
        let g = GridSpec::new(n, 0.01, 1500.0, 2).unwrap();
        let pixels = ring(n).into_iter().step_by(every).collect();
        let sensors = SensorArray::new(&g, pixels, Geometry::FullView).unwrap();
        let dt = 0.3 * g.pixel_size() / g.sound_speed();
        AcousticOperator::new(sensors, TimeAxis::new(nt, dt).unwrap())
    }

    fn random_field(g: GridSpec, rng: &mut ChaCha8Rng) -> Field {
        Field::from_fn(g, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let op = operator(16, 3, 20);
        let d = op.forward(&Field::zeros(*op.grid())).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
        let x = op
            .adjoint(&SensorData::zeros(op.sensors().len(), *op.times()))
            .unwrap();
        assert!(x.values().iter().all(|&v| v == 0.0));
        assert_eq!(op.evaluations(), 2);
    }

    #[test]
    fn first_column_samples_initial_pressure() {
        let op = operator(16, 2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p0 = random_field(*op.grid(), &mut rng);
        let d = op.forward(&p0).unwrap();
        for (s, &(r, c)) in op.sensors().pixels().iter().enumerate() {
            assert!((d.values()[[s, 0]] - p0.values()[[r, c]]).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_propagate() {
        let op = operator(16, 5, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p0 = random_field(*op.grid(), &mut rng);
        let d = op.forward(&p0).unwrap();
        for j in [0, 5, 11] {
            let pt = op.propagator().propagate(&p0, op.times().time(j)).unwrap();
            for (s, &(r, c)) in op.sensors().pixels().iter().enumerate() {
                assert!((d.values()[[s, j]] - pt.values()[[r, c]]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn adjoint_dot_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, every) in [(16, 1), (32, 3)] {
            let op = operator(n, every, 30);
            let x = random_field(*op.grid(), &mut rng);
            let y = SensorData::new(
                *op.times(),
                Array2::from_shape_fn((op.sensors().len(), 30), |_| rng.random_range(-1.0..1.0)),
            )
            .unwrap();
            let kx = op.forward(&x).unwrap();
            let kty = op.adjoint(&y).unwrap();
            let gap = (kx.dot(&y) - x.dot(&kty)).abs() / (kx.norm() * y.norm());
            assert!(gap < 1e-10, "n={n} gap={gap}");
        }
    }

    #[test]
    fn dense_matrix_agrees_with_operator() {
        let op = operator(16, 8, 50);
        assert_eq!(op.sensors().len(), 8);
        let k = op.assemble_dense(MemoryBudget::DEFAULT).unwrap();
        assert_eq!(k.shape(), (400, 256));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_field(*op.grid(), &mut rng);
        let kx = op.forward(&x).unwrap().to_vec();
        let dense = &k * nalgebra::DVector::from_vec(x.to_vec());
        let scale = dense.norm();
        for (a, b) in kx.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-10 * scale.max(1.0));
        }
        let y: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
        let yd = SensorData::new(
            *op.times(),
            Array2::from_shape_vec((8, 50), y.clone()).unwrap(),
        )
        .unwrap();
        let kty = op.adjoint(&yd).unwrap();
        let dense_t = k.transpose() * nalgebra::DVector::from_vec(y);
        let got = Field::from_vec(*op.grid(), dense_t.as_slice().to_vec()).unwrap();
        assert!(max_abs_diff(&got, &kty) < 1e-10 * dense_t.norm().max(1.0));
    }

    #[test]
    fn zero_sensors_give_empty_matrix() {
        let g = GridSpec::new(8, 0.01, 1500.0, 2).unwrap();
        let sensors = SensorArray::new(&g, vec![], Geometry::FullView).unwrap();
        let op = AcousticOperator::new(sensors, TimeAxis::new(5, 1e-7).unwrap());
        let k = op.assemble_dense(MemoryBudget::DEFAULT).unwrap();
        assert_eq!(k.shape(), (0, 64));
    }

    #[test]
    fn dense_assembly_respects_budget() {
        let op = operator(16, 8, 50);
        let err = op.assemble_dense(MemoryBudget(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000, .. }));
        assert!(err.to_string().contains("1000"));
    }
}
