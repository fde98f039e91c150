use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Samples `field` bilinearly at the pixel centers of `target`, clamping at the edges.
/// Both grids cover the same physical square.
pub fn bilinear_resample(field: &Field, target: &GridSpec) -> Result<Field> {
    let src = field.grid();
    let n = src.n();
    if src.n() == target.n() {
        return Field::new(*target, field.values().clone());
    }
    let scale = n as f64 / target.n() as f64;
    let locate = |i: usize| {
        // Continuous source index of the target pixel center.
        let u = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = (u.floor() as usize).min(n.saturating_sub(2));
        (i0, u - i0 as f64)
    };
    let v = field.values();
    Field::from_fn(*target, |r, c| {
        let (r0, wr) = locate(r);
        let (c0, wc) = locate(c);
        let (r1, c1) = ((r0 + 1).min(n - 1), (c0 + 1).min(n - 1));
        (1.0 - wr) * ((1.0 - wc) * v[[r0, c0]] + wc * v[[r0, c1]])
            + wr * ((1.0 - wc) * v[[r1, c0]] + wc * v[[r1, c1]])
    })
}

/// `‖estimate − truth‖₂ / ‖truth‖₂`, after bilinear interpolation to the truth grid.
pub fn relative_error(estimate: &Field, truth: &Field) -> Result<f64> {
    let t = truth.norm();
    if t == 0.0 {
        return Err(Error::invalid(
            "truth",
            "relative error of an all-zero field",
        ));
    }
    let e = bilinear_resample(estimate, truth.grid())?;
    let diff: f64 = e
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(diff.sqrt() / t)
}

/// Values of one row with the physical `x` coordinate of each pixel center.
pub fn cross_section(field: &Field, row: usize) -> Result<Vec<(f64, f64)>> {
    let g = field.grid();
    if row >= g.n() {
        return Err(Error::invalid("row", format!("{row} outside 0..{}", g.n())));
    }
    Ok(field
        .values()
        .row(row)
        .iter()
        .enumerate()
        .map(|(c, &v)| (g.coordinate(c), v))
        .collect())
}
