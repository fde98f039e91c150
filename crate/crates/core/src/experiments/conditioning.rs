use std::path::Path;

use nalgebra::DMatrix;

use super::layout::sensor_layout;
use crate::acoustic::{AcousticOperator, Geometry, MemoryBudget, TimeAxis};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::io::{fmt_f64, write_csv};

/// `σ_max / σ_min` over singular values above `σ_max · max_dim · ε`.
pub fn condition_number(singular_values: &[f64], max_dim: usize) -> f64 {
    let max = singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    if max == 0.0 {
        return f64::INFINITY;
    }
    let tol = max * max_dim as f64 * f64::EPSILON;
    let min = singular_values
        .iter()
        .filter(|&&s| s > tol)
        .fold(f64::INFINITY, |m, &s| m.min(s));
    max / min
}

/// Condition number of `K` for `incremental(k)` sensors, `k = 1..=max_count`.
///
/// `K` is assembled once for all `max_count` sensors. Its rows are sensor-major, so
/// each prefix of sensors is a prefix of rows. A running triangular factor with the
/// same singular values replaces the full stack once it has more rows than columns.
pub fn condition_study(
    grid: &GridSpec,
    max_count: usize,
    times: &TimeAxis,
    budget: MemoryBudget,
) -> Result<Vec<(usize, f64)>> {
    let sensors = sensor_layout(grid, Geometry::Incremental, max_count)?;
    let op = AcousticOperator::new(sensors, *times);
    let k = op.assemble_dense(budget)?;
    let (nt, cols) = (times.len(), k.ncols());
    let mut reduced = DMatrix::<f64>::zeros(0, cols);
    let mut curve = Vec::with_capacity(max_count);
    for count in 1..=max_count {
        let block = k.rows((count - 1) * nt, nt);
        let mut stacked = DMatrix::zeros(reduced.nrows() + nt, cols);
        stacked.rows_mut(0, reduced.nrows()).copy_from(&reduced);
        stacked.rows_mut(reduced.nrows(), nt).copy_from(&block);
        reduced = if stacked.nrows() > cols {
            stacked.qr().r()
        } else {
            stacked
        };
        let sv = reduced.singular_values();
        let cond = condition_number(sv.as_slice(), (count * nt).max(cols));
        if !cond.is_finite() {
            return Err(Error::NonFinite("condition number"));
        }
        curve.push((count, cond));
    }
    Ok(curve)
}

pub fn write_condition_csv(path: impl AsRef<Path>, curve: &[(usize, f64)]) -> Result<()> {
    write_csv(
        path,
        &["sensors", "condition_number"],
        curve.iter().map(|(k, c)| vec![k.to_string(), fmt_f64(*c)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_of_known_spectra() {
        assert_eq!(condition_number(&[4.0, 2.0, 0.5], 3), 8.0);
        assert_eq!(condition_number(&[4.0, 2.0, 1e-20], 3), 2.0);
        assert!(condition_number(&[0.0, 0.0], 2).is_infinite());
    }

    #[test]
    fn incremental_factor_matches_direct_svd() {
        let g = GridSpec::any_size(6, 0.01, 1500.0, 2).unwrap();
        let times = TimeAxis::new(12, 0.4 * g.pixel_size() / 1500.0).unwrap();
        let curve = condition_study(&g, 20, &times, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(curve.len(), 20);
        assert!(curve.windows(2).all(|w| w[1].0 == w[0].0 + 1));
        let op =
            AcousticOperator::new(sensor_layout(&g, Geometry::Incremental, 20).unwrap(), times);
        let k = op.assemble_dense(MemoryBudget::DEFAULT).unwrap();
        for count in [1, 2, 3, 4, 12, 20] {
            let rows = k.rows(0, count * 12).into_owned();
            let direct = condition_number(rows.singular_values().as_slice(), (count * 12).max(36));
            let got = curve[count - 1].1;
            assert!(
                (got - direct).abs() <= 1e-6 * direct,
                "{count}: {got} vs {direct}"
            );
        }
        assert!(curve[19].1 <= curve[0].1);
    }

    #[test]
    fn budget_refusal() {
        let g = GridSpec::new(16, 0.01, 1500.0, 2).unwrap();
        let times = TimeAxis::new(10, 1e-7).unwrap();
        assert!(matches!(
            condition_study(&g, 60, &times, MemoryBudget(1024)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cond.csv");
        write_condition_csv(&path, &[(1, 10.0), (2, 3.5)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["sensors,condition_number", "1,1e1", "2,3.5e0"]);
    }
}
