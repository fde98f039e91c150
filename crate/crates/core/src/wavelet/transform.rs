use ndarray::{Array2, ArrayViewMut1, Axis};

use super::WaveletSpec;
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Approximation,
    Horizontal,
    Vertical,
    Diagonal,
}

/// One row of the bookkeeping table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffBlock {
    pub kind: BlockKind,
    pub level: usize,
    pub offset: usize,
    /// `l(level) = (n / 2^level)²`.
    pub len: usize,
}

impl CoeffBlock {
    pub fn name(&self) -> String {
        let tag = match self.kind {
            BlockKind::Approximation => "cA",
            BlockKind::Horizontal => "cH",
            BlockKind::Vertical => "cV",
            BlockKind::Diagonal => "cD",
        };
        format!("{tag}{}", self.level)
    }

    /// Side length of the square block.
    pub fn side(&self) -> usize {
        (self.len as f64).sqrt() as usize
    }
}

/// Block names, offsets and lengths of a depth-`m` transform of an `n x n` field.
pub fn coeff_layout(spec: &WaveletSpec, n: usize) -> Vec<CoeffBlock> {
    let m = spec.depth();
    let mut blocks = Vec::with_capacity(3 * m + 1);
    let mut offset = 0;
    let coarse = (n >> m) * (n >> m);
    blocks.push(CoeffBlock {
        kind: BlockKind::Approximation,
        level: m,
        offset,
        len: coarse,
    });
    offset += coarse;
    for level in (1..=m).rev() {
        let len = (n >> level) * (n >> level);
        for kind in [
            BlockKind::Horizontal,
            BlockKind::Vertical,
            BlockKind::Diagonal,
        ] {
            blocks.push(CoeffBlock {
                kind,
                level,
                offset,
                len,
            });
            offset += len;
        }
    }
    blocks
}

/// Wavelet coefficients in the concatenated block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    n: usize,
    spec: WaveletSpec,
    data: Vec<f64>,
}

impl CoeffVector {
    pub fn new(spec: WaveletSpec, n: usize, data: Vec<f64>) -> Result<Self> {
        spec.validate_for(n)?;
        if data.len() != n * n {
            return Err(Error::mismatch(
                format!("{} coefficients", n * n),
                format!("{}", data.len()),
            ));
        }
        Ok(Self { n, spec, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn layout(&self) -> Vec<CoeffBlock> {
        coeff_layout(&self.spec, self.n)
    }

    pub fn block(&self, block: &CoeffBlock) -> &[f64] {
        &self.data[block.offset..block.offset + block.len]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn analyze_line(mut line: ArrayViewMut1<f64>, h: &[f64], scratch: &mut Vec<f64>) {
    let len = line.len();
    let half = len / 2;
    scratch.clear();
    scratch.resize(len, 0.0);
    let taps = h.len();
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (j, &hj) in h.iter().enumerate() {
            let x = line[(2 * k + j) % len];
            a += hj * x;
            // g_j = (-1)^j h_{L-1-j}
            let gj = if j % 2 == 0 {
                h[taps - 1 - j]
            } else {
                -h[taps - 1 - j]
            };
            d += gj * x;
        }
        scratch[k] = a;
        scratch[half + k] = d;
    }
    for (dst, &src) in line.iter_mut().zip(scratch.iter()) {
        *dst = src;
    }
}

fn synthesize_line(mut line: ArrayViewMut1<f64>, h: &[f64], scratch: &mut Vec<f64>) {
    let len = line.len();
    let half = len / 2;
    scratch.clear();
    scratch.resize(len, 0.0);
    let taps = h.len();
    for k in 0..half {
        let (a, d) = (line[k], line[half + k]);
        for (j, &hj) in h.iter().enumerate() {
            let gj = if j % 2 == 0 {
                h[taps - 1 - j]
            } else {
                -h[taps - 1 - j]
            };
            scratch[(2 * k + j) % len] += hj * a + gj * d;
        }
    }
    for (dst, &src) in line.iter_mut().zip(scratch.iter()) {
        *dst = src;
    }
}

/// Quadrant position `(row0, col0)` of a detail block inside the Mallat layout.
fn quadrant(kind: BlockKind, side: usize) -> (usize, usize) {
    match kind {
        BlockKind::Approximation => (0, 0),
        BlockKind::Horizontal => (side, 0),
        BlockKind::Vertical => (0, side),
        BlockKind::Diagonal => (side, side),
    }
}

/// Depth-`m` separable 2D transform with periodic boundaries.
pub fn dwt2(field: &Field, spec: &WaveletSpec) -> Result<CoeffVector> {
    let n = field.grid().n();
    spec.validate_for(n)?;
    let h = spec.filter();
    let mut work = field.values().clone();
    let mut scratch = Vec::with_capacity(n);
    for level in 1..=spec.depth() {
        let size = n >> (level - 1);
        let mut block = work.slice_mut(ndarray::s![..size, ..size]);
        for row in block.axis_iter_mut(Axis(0)) {
            analyze_line(row, h, &mut scratch);
        }
        for col in block.axis_iter_mut(Axis(1)) {
            analyze_line(col, h, &mut scratch);
        }
    }
    let mut data = vec![0.0; n * n];
    for b in coeff_layout(spec, n) {
        let side = b.side();
        let (r0, c0) = quadrant(b.kind, side);
        let src = work.slice(ndarray::s![r0..r0 + side, c0..c0 + side]);
        for (dst, &v) in data[b.offset..b.offset + b.len].iter_mut().zip(src.iter()) {
            *dst = v;
        }
    }
    CoeffVector::new(*spec, n, data)
}

/// Exact inverse of [`dwt2`].
pub fn idwt2(coeffs: &CoeffVector, spec: &WaveletSpec, grid: &GridSpec) -> Result<Field> {
    let n = grid.n();
    if coeffs.n() != n || coeffs.spec() != spec {
        return Err(Error::mismatch(
            format!(
                "{n}x{n} coefficients for {} depth {}",
                spec.name(),
                spec.depth()
            ),
            format!(
                "{0}x{0} coefficients for {1} depth {2}",
                coeffs.n(),
                coeffs.spec().name(),
                coeffs.spec().depth()
            ),
        ));
    }
    let h = spec.filter();
    let mut work = Array2::zeros((n, n));
    for b in coeff_layout(spec, n) {
        let side = b.side();
        let (r0, c0) = quadrant(b.kind, side);
        let mut dst = work.slice_mut(ndarray::s![r0..r0 + side, c0..c0 + side]);
        for (d, &v) in dst.iter_mut().zip(coeffs.block(&b)) {
            *d = v;
        }
    }
    let mut scratch = Vec::with_capacity(n);
    for level in (1..=spec.depth()).rev() {
        let size = n >> (level - 1);
        let mut block = work.slice_mut(ndarray::s![..size, ..size]);
        for col in block.axis_iter_mut(Axis(1)) {
            synthesize_line(col, h, &mut scratch);
        }
        for row in block.axis_iter_mut(Axis(0)) {
            synthesize_line(row, h, &mut scratch);
        }
    }
    Field::new(*grid, work)
}
