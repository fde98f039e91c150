use std::f64::consts::PI;

use ndarray::Array2;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{signed_freq, Field, GridSpec};
use crate::spectral::{real_part_checked, Fft2};

/// Spectral state `(p̂, q̂)` on the padded grid; `q̂ = p̂_t / (v|k|)` mode by mode.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub(crate) p_hat: Vec<Complex64>,
    pub(crate) q_hat: Vec<Complex64>,
}

impl WaveState {
    pub fn p_hat(&self) -> &[Complex64] {
        &self.p_hat
    }

    pub fn q_hat(&self) -> &[Complex64] {
        &self.q_hat
    }

    /// `|p̂_k|² + |q̂_k|²` for every mode; invariant under propagation.
    pub fn mode_energy(&self) -> Vec<f64> {
        self.p_hat
            .iter()
            .zip(&self.q_hat)
            .map(|(p, q)| p.norm_sqr() + q.norm_sqr())
            .collect()
    }
}

/// Per-mode rotation for one fixed step.
pub(crate) struct Rotation {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Rotation {
    pub(crate) fn apply(&self, p: &mut [Complex64], q: &mut [Complex64]) {
        for (((p, q), &c), &s) in p.iter_mut().zip(q.iter_mut()).zip(&self.cos).zip(&self.sin) {
            let (p0, q0) = (*p, *q);
            *p = p0 * c + q0 * s;
            *q = q0 * c - p0 * s;
        }
    }
}

/// Exact mode-by-mode propagator on the periodic domain of side `pad_factor * n` pixels.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: GridSpec,
    fft: Fft2,
    /// Angular frequency `v|k|` of each padded mode, row-major.
    omega: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &GridSpec) -> Self {
        let big = grid.padded_n();
        // Wavenumber in rad/m: 2π ξ with ξ = m / (N h) cycles per meter.
        let dk = 2.0 * PI / (big as f64 * grid.pixel_size());
        let v = grid.sound_speed();
        let omega = (0..big * big)
            .map(|idx| {
                let k1 = signed_freq(idx / big, big) * dk;
                let k2 = signed_freq(idx % big, big) * dk;
                v * k1.hypot(k2)
            })
            .collect();
        Self {
            grid: *grid,
            fft: Fft2::new(big),
            omega,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub(crate) fn rotation(&self, dt: f64) -> Rotation {
        let (sin, cos) = self.omega.iter().map(|w| (w * dt).sin_cos()).unzip();
        Rotation { cos, sin }
    }

    /// Row-major index of physical pixel `(r, c)` inside the padded domain.
    pub(crate) fn padded_index(&self, r: usize, c: usize) -> usize {
        let off = self.grid.pad_offset();
        (r + off) * self.grid.padded_n() + (c + off)
    }

    pub(crate) fn embed(&self, field: &Field) -> Vec<Complex64> {
        let big = self.grid.padded_n();
        let mut buf = vec![Complex64::new(0.0, 0.0); big * big];
        for ((r, c), &v) in field.values().indexed_iter() {
            buf[self.padded_index(r, c)] = Complex64::new(v, 0.0);
        }
        buf
    }

    pub(crate) fn crop_real(&self, buf: &[Complex64]) -> Field {
        let n = self.grid.n();
        Field::from_trusted(
            self.grid,
            Array2::from_shape_fn((n, n), |(r, c)| buf[self.padded_index(r, c)].re),
        )
    }

    fn check_input(&self, p0: &Field) -> Result<()> {
        p0.check_same_grid(&self.grid)?;
        if p0.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial pressure"));
        }
        Ok(())
    }

    /// Zero-velocity state for initial pressure `p0`.
    pub fn initial_state(&self, p0: &Field) -> Result<WaveState> {
        self.check_input(p0)?;
        let mut p_hat = self.embed(p0);
        self.fft.forward(&mut p_hat);
        let q_hat = vec![Complex64::new(0.0, 0.0); p_hat.len()];
        Ok(WaveState { p_hat, q_hat })
    }

    fn check_state(&self, state: &WaveState) -> Result<()> {
        let len = self.omega.len();
        if state.p_hat.len() != len || state.q_hat.len() != len {
            return Err(Error::mismatch(
                format!("{len} spectral modes"),
                format!("{}", state.p_hat.len()),
            ));
        }
        Ok(())
    }

    /// Advances every mode by the rotation angle `v|k| dt`.
    pub fn propagate_state(&self, state: &WaveState, dt: f64) -> Result<WaveState> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::invalid(
                "dt",
                format!("{dt} must be finite and >= 0"),
            ));
        }
        self.check_state(state)?;
        let mut next = state.clone();
        self.rotation(dt).apply(&mut next.p_hat, &mut next.q_hat);
        Ok(next)
    }

    /// Pressure on the physical grid for a spectral state.
    pub fn pressure(&self, state: &WaveState) -> Result<Field> {
        self.check_state(state)?;
        let mut buf = state.p_hat.clone();
        self.fft.inverse(&mut buf);
        real_part_checked(&buf, self.grid.padded_n())?;
        Ok(self.crop_real(&buf))
    }

    /// `p(·, t)` for initial pressure `p0` and zero initial velocity.
    pub fn propagate(&self, p0: &Field, t: f64) -> Result<Field> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(
                "t",
                format!("{t}: negative times are not supported (the solution is even in t)"),
            ));
        }
        let state = self.initial_state(p0)?;
        self.pressure(&self.propagate_state(&state, t)?)
    }

    /// The multiplier `cos(v|k|t)` on the padded grid.
    pub fn cosine_multiplier(&self, t: f64) -> Array2<f64> {
        let big = self.grid.padded_n();
        Array2::from_shape_vec(
            (big, big),
            self.omega.iter().map(|w| (w * t).cos()).collect(),
        )
        .expect("square")
    }
}
