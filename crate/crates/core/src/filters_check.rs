//! Self-check of the kernel identities that tie Matérn covariances, the Bessel-potential
//! filter and the smoothing backends together.

use std::f64::consts::{E, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use crate::acoustic::MemoryBudget;
use crate::error::Result;
use crate::grid::{max_abs_diff, Field, GridSpec};
use crate::smoothing::{
    embed_adjoint_fourier, embed_adjoint_wavelet, macdonald_bessel, matern_apply, matern_kernel,
    spatial_filter_g, Backend, MaternParams,
};
use crate::wavelet::WaveletSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltersReport {
    pub rows: Vec<CheckRow>,
}

impl FiltersReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }
}

impl fmt::Display for FiltersReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        writeln!(
            f,
            "{:<width$}  {:>12}  {:>9}  result",
            "identity", "max dev", "tol"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<width$}  {:>12.3e}  {:>9.0e}  {}",
                r.name,
                r.deviation,
                r.tolerance,
                if r.passed() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_over(points: impl Iterator<Item = f64>, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in points {
        worst = worst.max(f(r)?);
    }
    Ok(worst)
}

fn radii() -> impl Iterator<Item = f64> + Clone {
    (1..=1000).map(|i| i as f64 / 100.0)
}

fn relative_field_gap(a: &Field, b: &Field) -> f64 {
    max_abs_diff(a, b) / b.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Runs every identity. `perturbation` multiplies the expected `2π` constant by
/// `1 + perturbation`; anything but zero must make the report fail.
pub fn run_filters_check(perturbation: f64) -> Result<FiltersReport> {
    let two_pi = 2.0 * PI * (1.0 + perturbation);
    let ou = MaternParams::new(0.5, 1.0, 2)?;
    let mut rows = Vec::new();
    let mut push = |name: &str, deviation: f64, tolerance: f64| {
        rows.push(CheckRow {
            name: name.to_string(),
            deviation,
            tolerance,
        })
    };

    push(
        "k_{1/2,1}(r) = exp(-r), r in (0, 10]",
        max_over(radii(), |r| Ok(rel(matern_kernel(&ou, r), (-r).exp())))?,
        1e-10,
    );
    push(
        "k_{1/2,1}(1) = e^-1",
        rel(matern_kernel(&ou, 1.0), 1.0 / E),
        1e-10,
    );
    push(
        "2^{1/2}/Gamma(1/2) r^{1/2} K_{1/2}(r) = exp(-r)",
        max_over(radii(), |r| {
            let k = 2f64.sqrt() / gamma(0.5) * r.sqrt() * macdonald_bessel(0.5, r)?;
            Ok(rel(k, (-r).exp()))
        })?,
        1e-10,
    );
    push(
        "G_3(r) = exp(-r)/(2 pi), d = 2",
        max_over(radii(), |r| {
            Ok(rel(spatial_filter_g(3.0, 2, r)?, (-r).exp() / (2.0 * PI)))
        })?,
        1e-10,
    );
    push(
        "2 pi G_3(r) = k_{1/2,1}(r)",
        max_over(radii(), |r| {
            Ok(rel(
                two_pi * spatial_filter_g(3.0, 2, r)?,
                matern_kernel(&ou, r),
            ))
        })?,
        1e-10,
    );
    push(
        "Matern constant C(1/2, d = 2) = 2 pi",
        rel(ou.constant(), two_pi),
        1e-10,
    );
    let pref = (PI / 2.0).sqrt() / E;
    push(
        "K_{1/2}(1) = sqrt(pi/2) e^-1",
        rel(macdonald_bessel(0.5, 1.0)?, pref),
        1e-10,
    );
    push(
        "K_{3/2}(1) = 2 sqrt(pi/2) e^-1",
        rel(macdonald_bessel(1.5, 1.0)?, 2.0 * pref),
        1e-10,
    );

    let grid = GridSpec::new(64, 1.0, 1.0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = Field::from_fn(grid, |_, _| rng.random_range(-1.0..1.0))?;
    let spec = WaveletSpec::daubechies(6, 4)?;
    push(
        "E_0* Fourier = identity",
        relative_field_gap(&embed_adjoint_fourier(&f, 0.0)?, &f),
        1e-11,
    );
    push(
        "E_0* wavelet = identity",
        relative_field_gap(&embed_adjoint_wavelet(&f, 0.0, &spec)?, &f),
        1e-11,
    );
    let budget = MemoryBudget::DEFAULT;
    let fourier = embed_adjoint_fourier(&f, 1.5)?.scaled(two_pi);
    push(
        "Matern(1/2, 1) Fourier = 2 pi E_{3/2}* Fourier",
        relative_field_gap(
            &matern_apply(&f, &ou, Backend::Fourier, None, budget)?,
            &fourier,
        ),
        1e-10,
    );
    let wavelet = embed_adjoint_wavelet(&f, 1.5, &spec)?.scaled(two_pi);
    push(
        "Matern(1/2, 1) wavelet = 2 pi E_{3/2}* wavelet",
        relative_field_gap(
            &matern_apply(&f, &ou, Backend::Wavelet, Some(&spec), budget)?,
            &wavelet,
        ),
        1e-10,
    );
    Ok(FiltersReport { rows })
}
