use crate::acoustic::{Geometry, SensorArray};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// The outer pixel ring, counterclockwise from the bottom-left corner:
/// bottom edge rightwards, right edge upwards, top edge leftwards, left edge downwards.
pub fn ring_order(n: usize) -> Vec<(usize, usize)> {
    let mut ring = Vec::with_capacity(4 * n - 4);
    ring.extend((0..n).map(|c| (0, c)));
    ring.extend((1..n).map(|r| (r, n - 1)));
    ring.extend((0..n - 1).rev().map(|c| (n - 1, c)));
    ring.extend((1..n - 1).rev().map(|r| (r, 0)));
    ring
}

fn spread(count: usize, len: usize) -> impl Iterator<Item = usize> {
    (0..count).map(move |i| ((i as f64 + 0.5) * len as f64 / count as f64) as usize)
}

/// Number of boundary pixels available to a geometry.
pub fn available_sensors(n: usize, geometry: Geometry) -> usize {
    match geometry {
        Geometry::OneSided => n,
        Geometry::TwoSided => 2 * n - 1,
        Geometry::FullView | Geometry::Incremental => 4 * n - 4,
    }
}

/// Boundary sensor placement.
///
/// * one-sided: equidistant on the bottom edge;
/// * two-sided: `⌈count/2⌉` on the bottom edge and `⌊count/2⌋` on the left edge
///   (the shared corner belongs to the bottom edge);
/// * full view: equidistant along [`ring_order`];
/// * incremental: the first `count` pixels of [`ring_order`].
pub fn sensor_layout(grid: &GridSpec, geometry: Geometry, count: usize) -> Result<SensorArray> {
    let n = grid.n();
    let available = available_sensors(n, geometry);
    if count < 1 || count > available {
        return Err(Error::invalid(
            "sensors",
            format!("{count} sensors requested, {geometry} on n = {n} allows 1..={available}"),
        ));
    }
    let pixels: Vec<_> = match geometry {
        Geometry::OneSided => spread(count, n).map(|c| (0, c)).collect(),
        Geometry::TwoSided => {
            let bottom = count.div_ceil(2);
            let left = count / 2;
            if bottom > n {
                return Err(Error::invalid(
                    "sensors",
                    format!("{bottom} sensors do not fit one edge of {n}"),
                ));
            }
            spread(bottom, n)
                .map(|c| (0, c))
                .chain(spread(left, n - 1).map(|r| (r + 1, 0)))
                .collect()
        }
        Geometry::FullView => {
            let ring = ring_order(n);
            (0..count).map(|i| ring[i * ring.len() / count]).collect()
        }
        Geometry::Incremental => ring_order(n)[..count].to_vec(),
    };
    SensorArray::new(grid, pixels, geometry)
}

/// Sensors per edge, e.g. `bottom:40,left:40`. Bottom corners count for the bottom edge,
/// top corners for the side edges.
pub fn layout_summary(sensors: &SensorArray) -> String {
    let n = sensors.grid().n();
    let mut counts = [0usize; 4];
    for &(r, c) in sensors.pixels() {
        let edge = if r == 0 {
            0
        } else if c == 0 {
            3
        } else if c == n - 1 {
            1
        } else {
            2
        };
        counts[edge] += 1;
    }
    ["bottom", "right", "top", "left"]
        .iter()
        .zip(counts)
        .filter(|(_, k)| *k > 0)
        .map(|(name, k)| format!("{name}:{k}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// The same physical sensor positions on another grid, snapped to its outer ring.
pub fn map_sensors(sensors: &SensorArray, target: &GridSpec) -> Result<SensorArray> {
    let (n, m) = (sensors.grid().n(), target.n());
    let map = |i: usize| {
        if i == 0 {
            0
        } else if i == n - 1 {
            m - 1
        } else {
            (((i as f64 + 0.5) * m as f64 / n as f64) as usize).min(m - 1)
        }
    };
    let pixels = sensors
        .pixels()
        .iter()
        .map(|&(r, c)| (map(r), map(c)))
        .collect();
    SensorArray::new(target, pixels, sensors.geometry())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::any_size(n, 0.05, 1500.0, 2).unwrap()
    }

    #[test]
    fn ring_is_closed_and_distinct() {
        let ring = ring_order(24);
        assert_eq!(ring.len(), 92);
        assert_eq!(ring[0], (0, 0));
        let set: std::collections::HashSet<_> = ring.iter().collect();
        assert_eq!(set.len(), 92);
        assert_eq!(ring[91].0.abs_diff(0) + ring[91].1, 1);
        for w in ring.windows(2) {
            assert_eq!(w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1), 1);
        }
    }

    #[test]
    fn full_view_four_sensors_hit_corners() {
        let s = sensor_layout(&grid(16), Geometry::FullView, 4).unwrap();
        assert_eq!(s.pixels(), &[(0, 0), (0, 15), (15, 15), (15, 0)]);
    }

    #[test]
    fn two_sided_splits_evenly() {
        let s = sensor_layout(&grid(128), Geometry::TwoSided, 80).unwrap();
        assert_eq!(layout_summary(&s), "bottom:40,left:40");
        let odd = sensor_layout(&grid(16), Geometry::TwoSided, 7).unwrap();
        assert_eq!(layout_summary(&odd), "bottom:4,left:3");
        let dense = sensor_layout(&grid(32), Geometry::TwoSided, 60).unwrap();
        assert_eq!(layout_summary(&dense), "bottom:30,left:30");
        let ring = sensor_layout(&grid(8), Geometry::FullView, 28).unwrap();
        assert_eq!(layout_summary(&ring), "bottom:8,right:7,top:6,left:7");
        assert!(sensor_layout(&grid(16), Geometry::TwoSided, 31).is_ok());
        assert!(sensor_layout(&grid(16), Geometry::TwoSided, 32).is_err());
    }

    #[test]
    fn one_sided_is_equidistant() {
        let s = sensor_layout(&grid(128), Geometry::OneSided, 80).unwrap();
        assert_eq!(layout_summary(&s), "bottom:80");
        let cols: Vec<usize> = s.pixels().iter().map(|p| p.1).collect();
        assert!(cols
            .windows(2)
            .all(|w| w[1] - w[0] == 1 || w[1] - w[0] == 2));
        assert!(sensor_layout(&grid(16), Geometry::OneSided, 17).is_err());
        assert!(sensor_layout(&grid(16), Geometry::OneSided, 0).is_err());
    }

    #[test]
    fn incremental_starts_at_corner() {
        let one = sensor_layout(&grid(32), Geometry::Incremental, 1).unwrap();
        assert_eq!(one.pixels(), &[(0, 0)]);
        let all = sensor_layout(&grid(32), Geometry::Incremental, 124).unwrap();
        assert_eq!(all.pixels(), ring_order(32).as_slice());
        assert_eq!(all.prefix(5).unwrap().pixels(), &ring_order(32)[..5]);
        assert!(sensor_layout(&grid(32), Geometry::Incremental, 125).is_err());
        assert_eq!(
            sensor_layout(&grid(24), Geometry::Incremental, 92)
                .unwrap()
                .len(),
            92
        );
    }

    #[test]
    fn sensors_map_to_finer_ring() {
        let s = sensor_layout(&grid(16), Geometry::FullView, 60).unwrap();
        let fine = map_sensors(&s, &grid(32)).unwrap();
        assert_eq!(fine.len(), 60);
        for (&(r, c), &(fr, fc)) in s.pixels().iter().zip(fine.pixels()) {
            let (x, fx) = (grid(16).coordinate(c), grid(32).coordinate(fc));
            let (y, fy) = (grid(16).coordinate(r), grid(32).coordinate(fr));
            assert!(
                (x - fx).abs() <= grid(16).pixel_size() && (y - fy).abs() <= grid(16).pixel_size()
            );
        }
    }
}
