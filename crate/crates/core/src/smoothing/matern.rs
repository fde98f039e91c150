//! Matérn covariance kernels and the Bessel-potential spatial filter `G_s`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::bessel::macdonald_bessel;
use crate::error::{Error, Result};

/// Matérn covariance parameters: smoothness `ν`, length scale `ρ`, spatial dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaternParams {
    nu: f64,
    rho: f64,
    dim: usize,
}

impl MaternParams {
    pub fn new(nu: f64, rho: f64, dim: usize) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::invalid("nu", format!("{nu} must be > 0")));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid("rho", format!("{rho} must be > 0")));
        }
        if !(dim == 1 || dim == 2) {
            return Err(Error::invalid("dim", format!("{dim} must be 1 or 2")));
        }
        Ok(Self { nu, rho, dim })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sobolev index `s = ν + d/2` of the matching embedding.
    pub fn smoothness(&self) -> f64 {
        self.nu + self.dim as f64 / 2.0
    }

    /// `a = ρ / √(2ν)`: the kernel is `C · G_{2s}(x / a)`.
    pub fn scale(&self) -> f64 {
        self.rho / (2.0 * self.nu).sqrt()
    }

    /// `C = 2^d π^{d/2} Γ(ν + d/2) / Γ(ν)`, linking the kernel to `G_{2s}`.
    pub fn constant(&self) -> f64 {
        let d = self.dim as f64;
        2f64.powf(d) * PI.powf(d / 2.0) * gamma(self.nu + d / 2.0) / gamma(self.nu)
    }

    /// The integer `m' >= 0` with `√(2ν)/ρ = 2^{-m'}`, checked to 1e-12.
    pub fn dyadic_level(&self) -> Result<usize> {
        let ratio = 1.0 / self.scale();
        let level = -ratio.log2();
        let rounded = level.round();
        if rounded < 0.0 || (ratio - 2f64.powf(-rounded)).abs() > 1e-12 * ratio {
            return Err(Error::NotDyadic { ratio });
        }
        Ok(rounded as usize)
    }
}

/// `k_{ν,ρ}(r) = 2^{1-ν}/Γ(ν) · z^ν K_ν(z)`, `z = √(2ν) r / ρ`, with `k(0) = 1`.
pub fn matern_kernel(params: &MaternParams, r: f64) -> f64 {
    let r = r.abs();
    if r == 0.0 {
        return 1.0;
    }
    let nu = params.nu;
    let z = r / params.scale();
    if z > 700.0 {
        return 0.0;
    }
    if nu == 0.5 {
        return (-z).exp();
    }
    let k = macdonald_bessel(nu, z).expect("z > 0");
    // z^ν K_ν(z) → 2^{ν-1} Γ(ν) as z → 0; the product stays finite.
    (2f64.powf(1.0 - nu) / gamma(nu)) * z.powf(nu) * k
}

/// Bessel-potential filter
/// `G_s(r) = 2^{1-(d+s)/2} / (π^{d/2} Γ(s/2)) · K_{(d-s)/2}(r) · r^{(s-d)/2}`.
///
/// `G_{2s}` is the convolution kernel of the multiplier `(1 + |ω|²)^{-s}`.
pub fn spatial_filter_g(s: f64, dim: usize, r: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("{s} must be > 0")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("r", format!("G_s(r) needs r > 0, got {r}")));
    }
    let d = dim as f64;
    let k = macdonald_bessel((d - s) / 2.0, r)?;
    Ok(
        2f64.powf(1.0 - (d + s) / 2.0) / (PI.powf(d / 2.0) * gamma(s / 2.0))
            * k
            * r.powf((s - d) / 2.0),
    )
}

/// `lim_{r→0} G_s(r) = 2^{-d} π^{-d/2} Γ((s-d)/2) / Γ(s/2)`, finite only for `s > d`.
pub fn spatial_filter_g_origin(s: f64, dim: usize) -> Result<f64> {
    let d = dim as f64;
    if !(s > d) {
        return Err(Error::Unsupported(format!(
            "G_s is singular at the origin for s = {s} <= d = {dim}"
        )));
    }
    Ok(2f64.powf(-d) * PI.powf(-d / 2.0) * gamma((s - d) / 2.0) / gamma(s / 2.0))
}
