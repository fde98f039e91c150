use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    OneSided,
    TwoSided,
    FullView,
    Incremental,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::OneSided => "one_sided",
            Geometry::TwoSided => "two_sided",
            Geometry::FullView => "full_view",
            Geometry::Incremental => "incremental",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    /// Accepts the display names, their hyphenated forms and `one`, `two`, `full`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "one" | "one_sided" => Ok(Geometry::OneSided),
            "two" | "two_sided" => Ok(Geometry::TwoSided),
            "full" | "full_view" => Ok(Geometry::FullView),
            "incremental" => Ok(Geometry::Incremental),
            other => Err(Error::invalid(
                "geometry",
                format!("unknown geometry `{other}` (one, two, full, incremental)"),
            )),
        }
    }
}

/// Point sensors on the outermost pixel ring of the (unpadded) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorArray {
    grid: GridSpec,
    pixels: Vec<(usize, usize)>,
    geometry: Geometry,
}

impl SensorArray {
    pub fn new(grid: &GridSpec, pixels: Vec<(usize, usize)>, geometry: Geometry) -> Result<Self> {
        let n = grid.n();
        let mut seen = HashSet::with_capacity(pixels.len());
        for &(r, c) in &pixels {
            let on_ring = r < n && c < n && (r == 0 || c == 0 || r == n - 1 || c == n - 1);
            if !on_ring {
                return Err(Error::SensorOffRing { index: (r, c), n });
            }
            if !seen.insert((r, c)) {
                return Err(Error::DuplicateSensor((r, c)));
            }
        }
        Ok(Self {
            grid: *grid,
            pixels,
            geometry,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Sensor positions as `(row, col)` in sensor order.
    pub fn pixels(&self) -> &[(usize, usize)] {
        &self.pixels
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// The first `k` sensors, keeping the ordering.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.len() {
            return Err(Error::invalid(
                "count",
                format!("{k} exceeds {} sensors", self.len()),
            ));
        }
        Ok(Self {
            grid: self.grid,
            pixels: self.pixels[..k].to_vec(),
            geometry: Geometry::Incremental,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_names_round_trip() {
        for g in [
            Geometry::OneSided,
            Geometry::TwoSided,
            Geometry::FullView,
            Geometry::Incremental,
        ] {
            assert_eq!(g.to_string().parse::<Geometry>().unwrap(), g);
        }
        assert_eq!("two".parse::<Geometry>().unwrap(), Geometry::TwoSided);
        assert_eq!("Full-View".parse::<Geometry>().unwrap(), Geometry::FullView);
        assert!("three".parse::<Geometry>().is_err());
    }

    #[test]
    fn validates_ring_and_distinctness() {
        let g = GridSpec::new(8, 1.0, 1.0, 2).unwrap();
        assert!(SensorArray::new(&g, vec![(0, 3), (7, 7), (4, 0)], Geometry::FullView).is_ok());
        assert!(matches!(
            SensorArray::new(&g, vec![(3, 3)], Geometry::FullView),
            Err(Error::SensorOffRing { .. })
        ));
        assert!(matches!(
            SensorArray::new(&g, vec![(0, 8)], Geometry::FullView),
            Err(Error::SensorOffRing { .. })
        ));
        assert!(matches!(
            SensorArray::new(&g, vec![(0, 1), (0, 1)], Geometry::OneSided),
            Err(Error::DuplicateSensor((0, 1)))
        ));
    }
}
