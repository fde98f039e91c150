use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Inclusion in physical coordinates `(x, y)`: `x` along columns, `y` along rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle {
        center: (f64, f64),
        radius: f64,
        value: f64,
    },
    /// Axis-aligned, `corner` is the lower-left corner.
    Rectangle {
        corner: (f64, f64),
        width: f64,
        height: f64,
        value: f64,
    },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Circle { center, radius, .. } => {
                (x - center.0).powi(2) + (y - center.1).powi(2) <= radius * radius
            }
            Shape::Rectangle {
                corner,
                width,
                height,
                ..
            } => x >= corner.0 && x <= corner.0 + width && y >= corner.1 && y <= corner.1 + height,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Shape::Circle { value, .. } | Shape::Rectangle { value, .. } => value,
        }
    }

    /// Bounding box `(x0, y0, x1, y1)`.
    fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Circle { center, radius, .. } => (
                center.0 - radius,
                center.1 - radius,
                center.0 + radius,
                center.1 + radius,
            ),
            Shape::Rectangle {
                corner,
                width,
                height,
                ..
            } => (corner.0, corner.1, corner.0 + width, corner.1 + height),
        }
    }

    fn validate(&self, size: f64) -> Result<()> {
        let sizes_ok = match *self {
            Shape::Circle { radius, .. } => radius > 0.0,
            Shape::Rectangle { width, height, .. } => width > 0.0 && height > 0.0,
        };
        let (x0, y0, x1, y1) = self.bounds();
        let finite = [x0, y0, x1, y1, self.value()].iter().all(|v| v.is_finite());
        if !sizes_ok || !finite {
            return Err(Error::invalid(
                "shape",
                format!("{self:?} has non-positive size"),
            ));
        }
        let tol = 1e-12 * size;
        if x0 < -tol || y0 < -tol || x1 > size + tol || y1 > size + tol {
            return Err(Error::invalid(
                "shape",
                format!("{self:?} leaves the domain [0, {size}]²"),
            ));
        }
        Ok(())
    }
}

/// Ordered inclusions over a constant background; later shapes win on overlap.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Phantom {
    pub shapes: Vec<Shape>,
    pub background: f64,
}

impl Phantom {
    pub fn new(background: f64) -> Self {
        Self {
            shapes: Vec::new(),
            background,
        }
    }

    pub fn with(mut self, shape: Shape) -> Self {
        self.shapes.push(shape);
        self
    }

    /// Circles and thin bars with values in `[0, 1]`, laid out relative to the domain size.
    pub fn standard(size: f64) -> Self {
        let circle = |x: f64, y: f64, r: f64, value: f64| Shape::Circle {
            center: (x * size, y * size),
            radius: r * size,
            value,
        };
        let rect = |x: f64, y: f64, w: f64, h: f64, value: f64| Shape::Rectangle {
            corner: (x * size, y * size),
            width: w * size,
            height: h * size,
            value,
        };
        Phantom::new(0.0)
            .with(circle(0.30, 0.70, 0.12, 1.0))
            .with(circle(0.72, 0.70, 0.08, 0.6))
            .with(circle(0.62, 0.30, 0.14, 0.8))
            .with(circle(0.24, 0.28, 0.06, 0.5))
            .with(rect(0.15, 0.47, 0.50, 0.03, 0.7))
            .with(rect(0.82, 0.15, 0.04, 0.45, 0.9))
            .with(rect(0.56, 0.26, 0.12, 0.08, 0.3))
    }
}

/// Rasterizes by testing each pixel center.
pub fn make_phantom(grid: &GridSpec, phantom: &Phantom) -> Result<Field> {
    let size = grid.physical_size();
    for shape in &phantom.shapes {
        shape.validate(size)?;
    }
    Field::from_fn(*grid, |r, c| {
        let (x, y) = (grid.coordinate(c), grid.coordinate(r));
        phantom
            .shapes
            .iter()
            .rev()
            .find(|s| s.contains(x, y))
            .map_or(phantom.background, |s| s.value())
    })
}
