//! Regularized reconstruction: GMRES on `(E_s* K* K + αI) x = E_s* K* p`.

mod gmres;

use std::path::Path;

use ndarray::Array2;

pub use gmres::{gmres, GmresOptions, GmresOutcome};

use crate::acoustic::{AcousticOperator, MemoryBudget, SensorData};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::io::{fmt_f64, write_csv};
use crate::smoothing::{sobolev_norm, Backend, MaternParams, Smoother, SmoothingConfig};
use crate::wavelet::WaveletSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconConfig {
    pub smoothing: SmoothingConfig,
    pub alpha: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Constant noise mean `η_e`, subtracted from the data.
    pub noise_mean: f64,
    /// Constant prior mean `η_x`; the solve runs on the deviation from it.
    pub prior_mean: f64,
    pub budget: MemoryBudget,
}

impl ReconConfig {
    pub const DEFAULT_ALPHA: f64 = 1e-5;

    pub fn new(smoothing: SmoothingConfig, alpha: f64) -> Result<Self> {
        let cfg = Self {
            smoothing,
            alpha,
            max_iters: GmresOptions::default().max_iters,
            tol: GmresOptions::default().tol,
            noise_mean: 0.0,
            prior_mean: 0.0,
            budget: MemoryBudget::DEFAULT,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_iterations(mut self, max_iters: usize) -> Result<Self> {
        self.max_iters = max_iters;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("{} must be > 0", self.alpha),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters", "must be >= 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol", format!("{} must be >= 0", self.tol)));
        }
        if !self.noise_mean.is_finite() || !self.prior_mean.is_finite() {
            return Err(Error::NonFinite("mean offsets"));
        }
        Ok(())
    }

    fn gmres_options(&self) -> GmresOptions {
        GmresOptions {
            max_iters: self.max_iters,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconResult {
    pub estimate: Field,
    /// Linear-system residual norms, from the zero initial guess onward.
    pub residual_history: Vec<f64>,
    /// `J(x_i)` for the same iterates as `residual_history`.
    pub objective_history: Vec<f64>,
    /// Wave solves (forward plus adjoint) used by this reconstruction.
    pub evaluations: usize,
    pub iterations: usize,
    pub breakdown: bool,
    pub converged: bool,
}

impl ReconResult {
    /// Writes `iteration,residual,J` rows.
    pub fn write_history(&self, path: impl AsRef<Path>) -> Result<()> {
        let rows = self
            .residual_history
            .iter()
            .zip(&self.objective_history)
            .enumerate()
            .map(|(i, (r, j))| vec![i.to_string(), fmt_f64(*r), fmt_f64(*j)]);
        write_csv(path, &["iteration", "residual", "J"], rows)
    }
}

/// The matrix-free map `x ↦ E_s* K* K x + αx`.
pub struct TikhonovOperator<'a> {
    op: &'a AcousticOperator,
    smoother: Smoother,
    alpha: f64,
}

impl<'a> TikhonovOperator<'a> {
    pub fn new(op: &'a AcousticOperator, cfg: &ReconConfig) -> Result<Self> {
        cfg.validate()?;
        let smoother = Smoother::new(&cfg.smoothing, op.grid().n(), cfg.budget)?;
        Ok(Self {
            op,
            smoother,
            alpha: cfg.alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn smoother(&self) -> &Smoother {
        &self.smoother
    }

    /// `(E_s* K* K x + αx, Kx)`.
    pub fn apply_with_data(&self, x: &Field) -> Result<(Field, SensorData)> {
        let kx = self.op.forward(x)?;
        let smoothed = self.smoother.apply(&self.op.adjoint(&kx)?)?;
        let mut out = smoothed.into_values();
        out.scaled_add(self.alpha, x.values());
        Ok((Field::new(*x.grid(), out)?, kx))
    }

    pub fn apply(&self, x: &Field) -> Result<Field> {
        Ok(self.apply_with_data(x)?.0)
    }

    /// `E_s* K* p`.
    pub fn rhs(&self, data: &SensorData) -> Result<Field> {
        self.smoother.apply(&self.op.adjoint(data)?)
    }
}

/// `½‖Kx − p‖² + α‖x‖²_{H^s}` with the Fourier-backend norm (one forward solve).
pub fn objective_j(
    op: &AcousticOperator,
    x: &Field,
    data: &SensorData,
    s: f64,
    alpha: f64,
) -> Result<f64> {
    let kx = op.forward(x)?;
    objective_from_parts(&kx, x, data, s, alpha)
}

fn objective_from_parts(
    kx: &SensorData,
    x: &Field,
    data: &SensorData,
    s: f64,
    alpha: f64,
) -> Result<f64> {
    if kx.values().dim() != data.values().dim() {
        return Err(Error::mismatch(
            format!("{:?} sensor data", kx.values().dim()),
            format!("{:?}", data.values().dim()),
        ));
    }
    let misfit: f64 = kx
        .values()
        .iter()
        .zip(data.values())
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let reg = if alpha == 0.0 {
        0.0
    } else {
        sobolev_norm(x, s)?.powi(2)
    };
    Ok(0.5 * misfit + alpha * reg)
}

fn shifted(data: &SensorData, offset: &Array2<f64>, constant: f64) -> Result<SensorData> {
    let mut values = data.values() - offset;
    values.mapv_inplace(|v| v - constant);
    SensorData::new(*data.times(), values)
}

/// Solves the regularized normal equation by GMRES and records `J` per iterate.
///
/// Uses `2·iterations + 1` wave solves: one adjoint for the right-hand side and one
/// forward plus one adjoint per iteration. `J` reuses the `K v_j` of each operator
/// application. A nonzero prior mean costs one extra forward solve.
pub fn reconstruct(
    op: &AcousticOperator,
    data: &SensorData,
    cfg: &ReconConfig,
) -> Result<ReconResult> {
    cfg.validate()?;
    if data.n_sensors() != op.sensors().len() || data.times() != op.times() {
        return Err(Error::mismatch(
            format!(
                "{} sensors x {} steps of dt {}",
                op.sensors().len(),
                op.times().len(),
                op.times().dt()
            ),
            format!(
                "{} sensors x {} steps of dt {}",
                data.n_sensors(),
                data.times().len(),
                data.times().dt()
            ),
        ));
    }
    let start = op.evaluations();
    let grid = *op.grid();
    let tik = TikhonovOperator::new(op, cfg)?;

    // Work with z = x - η_x and p' = p - η_e - K η_x.
    let mean_field = Field::from_fn(grid, |_, _| cfg.prior_mean)?;
    let k_mean = if cfg.prior_mean != 0.0 {
        op.forward(&mean_field)?.values().clone()
    } else {
        Array2::zeros(data.values().dim())
    };
    let target = shifted(data, &k_mean, cfg.noise_mean)?;

    let b = tik.rhs(&target)?.to_vec();
    let s = cfg.smoothing.s();
    let mut cache: Vec<Array2<f64>> = Vec::new();
    let mut objective = vec![objective_from_parts(
        &SensorData::zeros(data.n_sensors(), *data.times()),
        &Field::zeros(grid),
        &target,
        s,
        cfg.alpha,
    )?];

    let outcome = {
        let cache = std::cell::RefCell::new(&mut cache);
        gmres(
            |v| {
                let (ax, kx) = tik.apply_with_data(&Field::from_vec(grid, v.to_vec())?)?;
                cache.borrow_mut().push(kx.values().clone());
                Ok(ax.to_vec())
            },
            &b,
            &cfg.gmres_options(),
            |_, y, x| {
                let cache = cache.borrow();
                let mut kx = Array2::zeros(target.values().dim());
                for (c, kv) in y.iter().zip(cache.iter()) {
                    kx.scaled_add(*c, kv);
                }
                let kx = SensorData::new(*target.times(), kx)?;
                objective.push(objective_from_parts(
                    &kx,
                    &Field::from_vec(grid, x.to_vec())?,
                    &target,
                    s,
                    cfg.alpha,
                )?);
                Ok(())
            },
        )?
    };

    let mut estimate = Field::from_vec(grid, outcome.x)?.into_values();
    if cfg.prior_mean != 0.0 {
        estimate.mapv_inplace(|v| v + cfg.prior_mean);
    }
    Ok(ReconResult {
        estimate: Field::new(grid, estimate)?,
        residual_history: outcome.residual_history,
        objective_history: objective,
        evaluations: op.evaluations() - start,
        iterations: outcome.iterations,
        breakdown: outcome.breakdown,
        converged: outcome.converged,
    })
}

/// The Tikhonov problem equivalent to the MAP estimate for white noise and a Matérn prior.
///
/// `β` enters the misfit as `β²/2 ‖p − Kx‖²`. The Matérn covariance is `C a^d` times a
/// Bessel-potential smoother of index `s = ν + d/2` (`a = ρ/√(2ν)`), so
/// `α = 1 / (β² C a^d)` in front of the identity of the normal equation.
pub fn map_to_tikhonov(
    beta: f64,
    prior: &MaternParams,
    backend: Backend,
    wavelet: Option<WaveletSpec>,
) -> Result<ReconConfig> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid("beta", format!("{beta} must be > 0")));
    }
    if backend == Backend::Wavelet {
        prior.dyadic_level()?;
    }
    let s = prior.smoothness();
    let alpha = 1.0 / (beta * beta) / (prior.constant() * prior.scale().powi(prior.dim() as i32));
    ReconConfig::new(SmoothingConfig::new(s, backend, wavelet)?, alpha)
}
