//! The adjoint Sobolev embedding `E_s*` and Matérn covariance operators.
//!
//! All smoothing is done in pixel units (`h = 1`), whatever the physical pixel size.
//! Frequencies `ξ` are in cycles per pixel, and the Fourier weight is
//! `(1 + 4π²|ξ|²)^{-s}`.
//!
//! Backends:
//! * [`Backend::Fourier`] multiplies the periodic DFT by that weight.
//! * [`Backend::Wavelet`] weights periodized Daubechies coefficients: `cA_m` and the
//!   coarsest details get 1, detail level `i` gets `2^{-2s(m-i)}`.
//! * [`Backend::DenseKernel`] builds the `n² x n²` matrix of the kernel `G_{2s}`
//!   sampled on the lattice (non-periodic). It only exists for `2s > d`, costs
//!   O(n⁴) memory and is refused above the [`MemoryBudget`].
//!
//! The wavelet and Fourier backends give equivalent smoothers, not identical ones.

mod bessel;
mod matern;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

pub use bessel::macdonald_bessel;
pub use matern::{matern_kernel, spatial_filter_g, spatial_filter_g_origin, MaternParams};

use crate::acoustic::MemoryBudget;
use crate::error::{Error, Result};
use crate::grid::{signed_freq, Field};
use crate::spectral::{apply_multiplier, Fft2, SpectralMultiplier};
use crate::wavelet::{dwt2, idwt2, BlockKind, WaveletSpec};

const DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    DenseKernel,
    Fourier,
    Wavelet,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::DenseKernel => "dense",
            Backend::Fourier => "fourier",
            Backend::Wavelet => "wavelet",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" | "dense_kernel" => Ok(Backend::DenseKernel),
            "fourier" => Ok(Backend::Fourier),
            "wavelet" => Ok(Backend::Wavelet),
            other => Err(Error::invalid(
                "backend",
                format!("`{other}` (expected dense, fourier or wavelet)"),
            )),
        }
    }
}

/// Smoothness index and the backend realizing `E_s*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    s: f64,
    backend: Backend,
    wavelet: Option<WaveletSpec>,
}

impl SmoothingConfig {
    /// For the wavelet backend a missing `wavelet` falls back to
    /// [`WaveletSpec::default_for_smoothness`]; an explicit one must satisfy `s < r`.
    pub fn new(s: f64, backend: Backend, wavelet: Option<WaveletSpec>) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::invalid("s", format!("{s} must be finite and >= 0")));
        }
        let wavelet = match (backend, wavelet) {
            (Backend::Wavelet, Some(w)) => {
                w.require_regularity(s)?;
                Some(w)
            }
            (Backend::Wavelet, None) => Some(WaveletSpec::default_for_smoothness(
                s,
                WaveletSpec::DEFAULT_DEPTH,
            )?),
            (_, w) => w,
        };
        Ok(Self {
            s,
            backend,
            wavelet,
        })
    }

    pub fn fourier(s: f64) -> Result<Self> {
        Self::new(s, Backend::Fourier, None)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn wavelet(&self) -> Option<&WaveletSpec> {
        self.wavelet.as_ref()
    }
}

/// `(1 + 4π²|ξ|²)^{-s}` for `|ξ|²` in cycles per pixel squared.
pub fn sobolev_weight(xi_sq: f64, s: f64) -> f64 {
    (1.0 + 4.0 * PI * PI * xi_sq).powf(-s)
}

/// The Bessel-potential multiplier on an `n x n` grid.
pub fn sobolev_multiplier(n: usize, s: f64) -> Result<SpectralMultiplier> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("{s} must be finite and >= 0")));
    }
    let nf = n as f64;
    SpectralMultiplier::from_fn(n, |k1, k2| {
        sobolev_weight((k1 * k1 + k2 * k2) / (nf * nf), s)
    })
}

/// `E_s* f` by the Fourier multiplier.
pub fn embed_adjoint_fourier(field: &Field, s: f64) -> Result<Field> {
    Smoother::new(
        &SmoothingConfig::fourier(s)?,
        field.grid().n(),
        MemoryBudget::DEFAULT,
    )?
    .apply(field)
}

/// `E_s* f` by wavelet-coefficient weighting.
pub fn embed_adjoint_wavelet(field: &Field, s: f64, spec: &WaveletSpec) -> Result<Field> {
    let cfg = SmoothingConfig::new(s, Backend::Wavelet, Some(*spec))?;
    Smoother::new(&cfg, field.grid().n(), MemoryBudget::DEFAULT)?.apply(field)
}

/// `E_s* f` by the sampled kernel `G_{2s}` as a dense matrix.
pub fn embed_adjoint_dense(field: &Field, s: f64, budget: MemoryBudget) -> Result<Field> {
    let cfg = SmoothingConfig::new(s, Backend::DenseKernel, None)?;
    Smoother::new(&cfg, field.grid().n(), budget)?.apply(field)
}

/// `‖x‖_{H^s}`: the ℓ² norm of the field filtered by `(1 + 4π²|ξ|²)^{s/2}`.
pub fn sobolev_norm(field: &Field, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("{s} must be finite and >= 0")));
    }
    if s == 0.0 {
        return Ok(field.norm());
    }
    let n = field.grid().n();
    let fft = Fft2::new(n);
    let spectrum = fft.forward_real(field.values());
    let nf = n as f64;
    // Parseval: ‖F⁻¹(w·F x)‖² = Σ |w x̂|² / n².
    let sum: f64 = spectrum
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let (k1, k2) = (signed_freq(idx / n, n), signed_freq(idx % n, n));
            c.norm_sqr() / sobolev_weight((k1 * k1 + k2 * k2) / (nf * nf), s)
        })
        .sum();
    Ok(sum.sqrt() / nf)
}

/// Per-level detail weights `2^{-2s(m-i)}` of a depth-`m` wavelet smoother, index `i - 1`.
fn wavelet_level_weights(s: f64, depth: usize) -> Vec<f64> {
    (1..=depth)
        .map(|i| 2f64.powf(-2.0 * s * (depth - i) as f64))
        .collect()
}

fn wavelet_weighting(
    field: &Field,
    spec: &WaveletSpec,
    weights: &[f64],
    scale: f64,
) -> Result<Field> {
    let mut coeffs = dwt2(field, spec)?;
    for block in coeffs.layout() {
        let w = match block.kind {
            BlockKind::Approximation => 1.0,
            _ => weights[block.level - 1],
        } * scale;
        if w != 1.0 {
            for c in &mut coeffs.as_mut_slice()[block.offset..block.offset + block.len] {
                *c *= w;
            }
        }
    }
    idwt2(&coeffs, spec, field.grid())
}

/// Dense `n² x n²` matrix with entries `kernel(|r_i - r_j|)` in pixel units.
fn dense_kernel_matrix(
    n: usize,
    budget: MemoryBudget,
    kernel: impl Fn(f64) -> Result<f64>,
) -> Result<DMatrix<f64>> {
    let len = n * n;
    budget.check("dense smoothing kernel", (len as u128).pow(2) * 8)?;
    // The kernel depends only on the offset, so tabulate it once.
    let mut table = vec![0.0; len];
    for dr in 0..n {
        for dc in 0..n {
            table[dr * n + dc] = kernel(((dr * dr + dc * dc) as f64).sqrt())?;
        }
    }
    Ok(DMatrix::from_fn(len, len, |i, j| {
        let (ri, ci) = (i / n, i % n);
        let (rj, cj) = (j / n, j % n);
        table[ri.abs_diff(rj) * n + ci.abs_diff(cj)]
    }))
}

fn sobolev_dense_matrix(n: usize, s: f64, budget: MemoryBudget) -> Result<DMatrix<f64>> {
    let order = 2.0 * s;
    if !(order > DIM as f64) {
        return Err(Error::Unsupported(format!(
            "the dense kernel G_2s is singular at the origin unless 2s > d = {DIM} (got s = {s})"
        )));
    }
    let origin = spatial_filter_g_origin(order, DIM)?;
    dense_kernel_matrix(n, budget, |r| {
        if r == 0.0 {
            Ok(origin)
        } else {
            spatial_filter_g(order, DIM, r)
        }
    })
}

fn dense_apply(matrix: &DMatrix<f64>, field: &Field) -> Result<Field> {
    let x = DVector::from_vec(field.to_vec());
    let y = matrix * x;
    Field::from_vec(*field.grid(), y.data.into())
}

/// Matérn covariance operator `u ↦ k_{ν,ρ} * u` (pixel units).
///
/// * Dense: direct non-periodic convolution with the sampled kernel, `k(0) = 1`.
/// * Fourier: the periodic multiplier `C a^d (1 + 4π² a² |ξ|²)^{-s}`, `a = ρ/√(2ν)`.
/// * Wavelet: requires `√(2ν)/ρ = 2^{-m'}`. Smooths with index `s = ν + d/2` at
///   depth `m + m'`, anchored at the coarsest level, times `C 2^{m'd}`.
///   `m` is the depth of `spec` (default 4).
pub fn matern_apply(
    field: &Field,
    params: &MaternParams,
    backend: Backend,
    spec: Option<&WaveletSpec>,
    budget: MemoryBudget,
) -> Result<Field> {
    if params.dim() != DIM {
        return Err(Error::invalid("dim", "fields are two-dimensional"));
    }
    let n = field.grid().n();
    let s = params.smoothness();
    let c = params.constant();
    match backend {
        Backend::DenseKernel => {
            let m = dense_kernel_matrix(n, budget, |r| Ok(matern_kernel(params, r)))?;
            dense_apply(&m, field)
        }
        Backend::Fourier => {
            let a = params.scale();
            let nf = n as f64;
            let scale = c * a.powi(DIM as i32);
            let mult = SpectralMultiplier::from_fn(n, |k1, k2| {
                scale * sobolev_weight(a * a * (k1 * k1 + k2 * k2) / (nf * nf), s)
            })?;
            let out = apply_multiplier(field.values(), mult.values(), &Fft2::new(n))?;
            Field::new(*field.grid(), out)
        }
        Backend::Wavelet => {
            let shift = params.dyadic_level()?;
            let base = match spec {
                Some(w) => *w,
                None => WaveletSpec::default_for_smoothness(s, WaveletSpec::DEFAULT_DEPTH)?,
            };
            base.require_regularity(s)?;
            let spec = base.with_depth(base.depth() + shift)?;
            let weights = wavelet_level_weights(s, spec.depth());
            let scale = c * 2f64.powi((shift * DIM) as i32);
            wavelet_weighting(field, &spec, &weights, scale)
        }
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Fourier {
        fft: Fft2,
        mult: SpectralMultiplier,
    },
    Wavelet {
        spec: WaveletSpec,
        weights: Vec<f64>,
    },
    Dense {
        matrix: DMatrix<f64>,
    },
}

/// `E_s*` prepared for one grid size; reusable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Smoother {
    config: SmoothingConfig,
    n: usize,
    plan: Plan,
}

impl Smoother {
    pub fn new(config: &SmoothingConfig, n: usize, budget: MemoryBudget) -> Result<Self> {
        let s = config.s();
        let plan = match config.backend() {
            Backend::Fourier => Plan::Fourier {
                fft: Fft2::new(n),
                mult: sobolev_multiplier(n, s)?,
            },
            Backend::Wavelet => {
                let spec = *config.wavelet().expect("filled in by SmoothingConfig::new");
                spec.validate_for(n)?;
                Plan::Wavelet {
                    weights: wavelet_level_weights(s, spec.depth()),
                    spec,
                }
            }
            Backend::DenseKernel => Plan::Dense {
                matrix: sobolev_dense_matrix(n, s, budget)?,
            },
        };
        Ok(Self {
            config: *config,
            n,
            plan,
        })
    }

    pub fn config(&self) -> &SmoothingConfig {
        &self.config
    }

    pub fn apply(&self, field: &Field) -> Result<Field> {
        let n = field.grid().n();
        if n != self.n {
            return Err(Error::mismatch(
                format!("{0}x{0} field", self.n),
                format!("{n}x{n}"),
            ));
        }
        match &self.plan {
            Plan::Fourier { fft, mult } => {
                let out = apply_multiplier(field.values(), mult.values(), fft)?;
                Ok(Field::from_trusted(*field.grid(), out))
            }
            Plan::Wavelet { spec, weights } => wavelet_weighting(field, spec, weights, 1.0),
            Plan::Dense { matrix } => dense_apply(matrix, field),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{max_abs_diff, GridSpec};
    use crate::wavelet::CoeffVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, 0.05, 1500.0, 2).unwrap()
    }

    fn noise(n: usize, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn(grid(n), |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn smoothers(s: f64, n: usize) -> Vec<Smoother> {
        let budget = MemoryBudget::DEFAULT;
        vec![
            Smoother::new(&SmoothingConfig::fourier(s).unwrap(), n, budget).unwrap(),
            Smoother::new(
                &SmoothingConfig::new(s, Backend::Wavelet, None).unwrap(),
                n,
                budget,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn multiplier_values() {
        let ones = sobolev_multiplier(16, 0.0).unwrap();
        assert!(ones.values().iter().all(|&v| v == 1.0));
        let m = sobolev_multiplier(16, 2.5).unwrap();
        assert_eq!(m.values()[[0, 0]], 1.0);
        let xi = 1.0 / (2.0 * PI);
        assert!((sobolev_weight(xi * xi, 1.0) - 0.5).abs() < 1e-15);
        let want = (1.0 + 4.0 * PI * PI * (9.0 + 4.0) / 256.0).powf(-2.5);
        assert!((m.values()[[3, 14]] - want).abs() < 1e-15);
        assert!(sobolev_multiplier(16, -1.0).is_err());
    }

    #[test]
    fn zero_smoothness_is_identity() {
        let f = noise(32, 1);
        for sm in smoothers(0.0, 32) {
            assert!(max_abs_diff(&sm.apply(&f).unwrap(), &f) < 1e-11);
        }
    }

    #[test]
    fn fourier_scales_single_mode() {
        let n = 32;
        let (k, s) = (5.0, 1.0);
        let f = Field::from_fn(grid(n), |_, c| (2.0 * PI * k * c as f64 / n as f64).cos()).unwrap();
        let out = embed_adjoint_fourier(&f, s).unwrap();
        let w = sobolev_weight((k / n as f64).powi(2), s);
        assert!(max_abs_diff(&out, &f.scaled(w)) < 1e-12);
    }

    #[test]
    fn wavelet_weights_by_level() {
        let n = 32;
        let spec = WaveletSpec::daubechies(4, 3).unwrap();
        let layout = crate::wavelet::coeff_layout(&spec, n);
        let coarse = layout
            .iter()
            .find(|b| b.level == 3 && b.kind == BlockKind::Vertical)
            .unwrap();
        let fine = layout
            .iter()
            .find(|b| b.level == 1 && b.kind == BlockKind::Diagonal)
            .unwrap();
        for (block, want) in [(coarse, 1.0), (fine, 0.0625)] {
            let mut data = vec![0.0; n * n];
            data[block.offset + 2] = 1.0;
            let basis = idwt2(&CoeffVector::new(spec, n, data).unwrap(), &spec, &grid(n)).unwrap();
            let out = embed_adjoint_wavelet(&basis, 1.0, &spec).unwrap();
            assert!(max_abs_diff(&out, &basis.scaled(want)) < 1e-12);
        }
    }

    #[test]
    fn wavelet_rejects_insufficient_regularity() {
        let spec = WaveletSpec::daubechies(6, 4).unwrap();
        let err = embed_adjoint_wavelet(&noise(16, 2), 3.0, &spec).unwrap_err();
        assert!(matches!(err, Error::RegularityTooLow { .. }));
    }

    #[test]
    fn backends_self_adjoint_positive_nonexpansive() {
        for s in [0.5, 1.5, 3.0] {
            for sm in smoothers(s, 32) {
                for seed in 0..4 {
                    let (x, y) = (noise(32, 10 + seed), noise(32, 20 + seed));
                    let (ex, ey) = (sm.apply(&x).unwrap(), sm.apply(&y).unwrap());
                    let gap = (ex.dot(&y) - x.dot(&ey)).abs() / (x.norm() * y.norm());
                    assert!(gap < 1e-10);
                    assert!(ex.dot(&x) > 0.0);
                    assert!(ex.norm() <= x.norm() * (1.0 + 1e-12));
                }
            }
        }
    }

    fn high_band_fraction(f: &Field) -> f64 {
        let n = f.grid().n();
        let spec = Fft2::new(n).forward_real(f.values());
        let (mut hi, mut all) = (0.0, 0.0);
        for (idx, c) in spec.iter().enumerate() {
            let k = signed_freq(idx / n, n)
                .abs()
                .max(signed_freq(idx % n, n).abs());
            all += c.norm_sqr();
            if k > n as f64 / 4.0 {
                hi += c.norm_sqr();
            }
        }
        hi / all
    }

    #[test]
    fn backends_have_comparable_spectral_decay() {
        // Depth 3 on 64x64 puts the coarsest details near |ξ| = 1/16, where the
        // Bessel weight starts to bite; the anchoring makes the match depth-dependent.
        for s in [1.0, 1.5, 3.0] {
            let f = noise(64, 7);
            let fourier = embed_adjoint_fourier(&f, s).unwrap();
            let spec = WaveletSpec::default_for_smoothness(s, 3).unwrap();
            let wavelet = embed_adjoint_wavelet(&f, s, &spec).unwrap();
            let ratio = high_band_fraction(&wavelet) / high_band_fraction(&fourier);
            assert!(ratio > 1.0 / 6.0 && ratio < 6.0, "s = {s}: ratio {ratio}");
        }
    }

    #[test]
    fn dense_sobolev_matches_fourier_on_smooth_input() {
        let n = 32;
        let g = grid(n);
        let c = (n as f64 - 1.0) / 2.0;
        let bump = Field::from_fn(g, |r, col| {
            let d2 = (r as f64 - c).powi(2) + (col as f64 - c).powi(2);
            (-d2 / 8.0).exp()
        })
        .unwrap();
        let dense = embed_adjoint_dense(&bump, 1.5, MemoryBudget::DEFAULT).unwrap();
        let fourier = embed_adjoint_fourier(&bump, 1.5).unwrap();
        let mut diff = fourier.clone().into_values();
        diff -= dense.values();
        let rel = diff.iter().map(|v| v * v).sum::<f64>().sqrt() / fourier.norm();
        assert!(rel < 0.05, "relative difference {rel}");
    }

    #[test]
    fn dense_refusals() {
        let f = noise(16, 3);
        assert!(matches!(
            embed_adjoint_dense(&f, 1.0, MemoryBudget::DEFAULT),
            Err(Error::Unsupported(_))
        ));
        let cfg = SmoothingConfig::new(1.5, Backend::DenseKernel, None).unwrap();
        assert!(matches!(
            Smoother::new(&cfg, 512, MemoryBudget::DEFAULT),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sobolev_norm_values() {
        let f = noise(16, 4);
        assert!((sobolev_norm(&f, 0.0).unwrap() - f.norm()).abs() < 1e-12);
        let c = Field::from_fn(grid(16), |_, _| 0.7).unwrap();
        assert!((sobolev_norm(&c, 2.0).unwrap() - 0.7 * 16.0).abs() < 1e-12);
        let n = 32;
        let k = 3.0;
        let mode =
            Field::from_fn(grid(n), |r, _| (2.0 * PI * k * r as f64 / n as f64).sin()).unwrap();
        let w = sobolev_weight((k / n as f64).powi(2), 1.0).powf(-0.5);
        assert!((sobolev_norm(&mode, 1.0).unwrap() - w * mode.norm()).abs() < 1e-11);
        // ‖x‖²_{H^s} = ⟨E_s*⁻¹ x, x⟩, so ‖E_s* x‖²_{H^s} = ⟨E_s* x, x⟩.
        let ex = embed_adjoint_fourier(&f, 1.5).unwrap();
        assert!((sobolev_norm(&ex, 1.5).unwrap().powi(2) - ex.dot(&f)).abs() < 1e-10);
    }

    #[test]
    fn matern_wavelet_is_scaled_embedding() {
        let f = noise(32, 5);
        let ou = MaternParams::new(0.5, 1.0, 2).unwrap();
        let spec = WaveletSpec::daubechies(6, 3).unwrap();
        let via_matern = matern_apply(
            &f,
            &ou,
            Backend::Wavelet,
            Some(&spec),
            MemoryBudget::DEFAULT,
        )
        .unwrap();
        let via_embed = embed_adjoint_wavelet(&f, 1.5, &spec)
            .unwrap()
            .scaled(2.0 * PI);
        assert!(max_abs_diff(&via_matern, &via_embed) < 1e-10);
    }

    #[test]
    fn matern_wavelet_level_shift() {
        // ρ = 2√(2ν): one extra level, constant C·2^d.
        let f = noise(32, 6);
        let p = MaternParams::new(0.5, 2.0, 2).unwrap();
        let spec = WaveletSpec::daubechies(6, 2).unwrap();
        let got =
            matern_apply(&f, &p, Backend::Wavelet, Some(&spec), MemoryBudget::DEFAULT).unwrap();
        let deeper = WaveletSpec::daubechies(6, 3).unwrap();
        let want = embed_adjoint_wavelet(&f, 1.5, &deeper)
            .unwrap()
            .scaled(2.0 * PI * 4.0);
        assert!(max_abs_diff(&got, &want) < 1e-10);
        let bad = MaternParams::new(0.5, 1.5, 2).unwrap();
        assert!(matches!(
            matern_apply(
                &f,
                &bad,
                Backend::Wavelet,
                Some(&spec),
                MemoryBudget::DEFAULT
            ),
            Err(Error::NotDyadic { .. })
        ));
    }

    #[test]
    fn matern_dense_impulse_response() {
        let n = 16;
        let ou = MaternParams::new(0.5, 1.0, 2).unwrap();
        let mut impulse = Field::zeros(grid(n)).into_values();
        impulse[[8, 8]] = 1.0;
        let f = Field::new(grid(n), impulse).unwrap();
        let out = matern_apply(&f, &ou, Backend::DenseKernel, None, MemoryBudget::DEFAULT).unwrap();
        for ((r, c), &v) in out.values().indexed_iter() {
            let d = ((r as f64 - 8.0).powi(2) + (c as f64 - 8.0).powi(2)).sqrt();
            assert!((v - (-d).exp()).abs() < 1e-12);
        }
        let zero = matern_apply(
            &Field::zeros(grid(n)),
            &ou,
            Backend::Fourier,
            None,
            MemoryBudget::DEFAULT,
        )
        .unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn matern_dense_is_positive_semidefinite() {
        let ou = MaternParams::new(0.5, 1.0, 2).unwrap();
        let m =
            dense_kernel_matrix(32, MemoryBudget::DEFAULT, |r| Ok(matern_kernel(&ou, r))).unwrap();
        assert_eq!(m, m.transpose());
        let eig = m.symmetric_eigenvalues();
        let max = eig.max();
        assert!(eig.min() >= -1e-10 * max);
    }

    #[test]
    fn matern_fourier_decays_like_sobolev() {
        // Output spectrum / input spectrum = C a² (1 + 4π² a² |ξ|²)^{-s} exactly.
        let n = 32;
        let k = 4.0;
        let f = Field::from_fn(grid(n), |r, c| {
            (2.0 * PI * k * (r + c) as f64 / n as f64).cos()
        })
        .unwrap();
        let p = MaternParams::new(1.0, 2.0, 2).unwrap();
        let out = matern_apply(&f, &p, Backend::Fourier, None, MemoryBudget::DEFAULT).unwrap();
        let a = p.scale();
        let xi2 = 2.0 * (k / n as f64).powi(2);
        let want = p.constant() * a * a * sobolev_weight(a * a * xi2, p.smoothness());
        assert!(max_abs_diff(&out, &f.scaled(want)) < 1e-12);
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::DenseKernel, Backend::Fourier, Backend::Wavelet] {
            assert_eq!(b.to_string().parse::<Backend>().unwrap(), b);
        }
        assert!("spline".parse::<Backend>().is_err());
    }
}
