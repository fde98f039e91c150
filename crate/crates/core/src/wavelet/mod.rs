//! Periodized orthonormal 2D fast wavelet transform.
//!
//! The coefficient vector of a depth-`m` transform of an `n x n` field is
//! `[cA_m, cH_m, cV_m, cD_m, cH_{m-1}, cV_{m-1}, cD_{m-1}, …, cH_1, cV_1, cD_1]`,
//! each block stored row-major with `(n / 2^i)²` entries at level `i`.
//! `cH` is high-pass across rows (vertical direction), `cV` high-pass along rows.
//!
//! Boundaries are handled by periodization, so the transform is exactly orthogonal
//! and its adjoint is its inverse.

mod filters;
mod transform;

pub use transform::{coeff_layout, dwt2, idwt2, BlockKind, CoeffBlock, CoeffVector};

use crate::error::{Error, Result};

/// Orthonormal Daubechies wavelet with `order` vanishing moments and decomposition depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletSpec {
    order: usize,
    depth: usize,
}

impl WaveletSpec {
    pub const DEFAULT_DEPTH: usize = 4;
    pub const DEFAULT_ORDER: usize = 6;

    pub fn daubechies(order: usize, depth: usize) -> Result<Self> {
        if filters::daubechies(order).is_none() {
            return Err(Error::invalid(
                "wavelet",
                format!("Daubechies order {order} unsupported (2..=10)"),
            ));
        }
        if depth < 1 {
            return Err(Error::invalid("depth", "must be >= 1"));
        }
        Ok(Self { order, depth })
    }

    /// `db6` for `s <= 2`, `db10` above; errors when even `db10` is not regular enough.
    pub fn default_for_smoothness(s: f64, depth: usize) -> Result<Self> {
        let order = if s <= 2.0 { Self::DEFAULT_ORDER } else { 10 };
        let spec = Self::daubechies(order, depth)?;
        spec.require_regularity(s)?;
        Ok(spec)
    }

    /// Parses `dbN`.
    pub fn parse(name: &str, depth: usize) -> Result<Self> {
        let order = name
            .strip_prefix("db")
            .and_then(|o| o.parse().ok())
            .ok_or_else(|| Error::invalid("wavelet", format!("`{name}` is not of the form dbN")))?;
        Self::daubechies(order, depth)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn name(&self) -> String {
        format!("db{}", self.order)
    }

    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        Self::daubechies(self.order, depth)
    }

    /// Sobolev regularity estimate `r` of the basis functions.
    pub fn regularity(&self) -> f64 {
        filters::sobolev_regularity(self.order).expect("validated order")
    }

    pub(crate) fn filter(&self) -> &'static [f64] {
        filters::daubechies(self.order).expect("validated order")
    }

    /// Smoothing with index `s` through this basis needs `s < r`.
    pub fn require_regularity(&self, s: f64) -> Result<()> {
        if !(s < self.regularity()) {
            return Err(Error::RegularityTooLow {
                s,
                regularity: self.regularity(),
            });
        }
        Ok(())
    }

    /// Checks `2^depth | n` (with `n` a power of two this is `depth <= log2 n`).
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if self.depth > n.trailing_zeros() as usize || n % (1 << self.depth) != 0 {
            return Err(Error::invalid(
                "depth",
                format!("depth {} too large for n = {n}", self.depth),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_family_depends_on_smoothness() {
        assert_eq!(
            WaveletSpec::default_for_smoothness(1.5, 4).unwrap().order(),
            6
        );
        assert_eq!(
            WaveletSpec::default_for_smoothness(2.0, 4).unwrap().order(),
            6
        );
        assert_eq!(
            WaveletSpec::default_for_smoothness(3.0, 4).unwrap().order(),
            10
        );
        assert!(matches!(
            WaveletSpec::default_for_smoothness(3.5, 4),
            Err(Error::RegularityTooLow { .. })
        ));
    }

    #[test]
    fn regularity_check_names_requirement() {
        let db6 = WaveletSpec::parse("db6", 4).unwrap();
        assert!((db6.regularity() - 2.388).abs() < 1e-12);
        let err = db6.require_regularity(3.0).unwrap_err();
        assert!(err.to_string().contains("s < r"));
        assert!(WaveletSpec::parse("haar", 2).is_err());
        assert!(WaveletSpec::parse("db11", 2).is_err());
    }

    #[test]
    fn depth_validation() {
        let w = WaveletSpec::daubechies(2, 3).unwrap();
        assert!(w.validate_for(8).is_ok());
        assert!(w.validate_for(4).is_err());
        assert!(WaveletSpec::daubechies(2, 0).is_err());
    }
}
