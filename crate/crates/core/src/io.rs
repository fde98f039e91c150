//! PATB binary files and CSV output.
//!
//! PATB layout, all integers and floats little-endian:
//!
//! ```text
//! "PATB" | version: u32 = 1 | kind: u8 (0 = field, 1 = sensor data)
//! field:       n: u32 | physical_size: f64 | sound_speed: f64 | n*n f64, row-major
//! sensor data: n_s: u32 | n_t: u32 | dt: f64 | n_s*n_t f64, sensor-major
//! ```

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::acoustic::{SensorData, TimeAxis};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, DEFAULT_PAD_FACTOR};

pub const MAGIC: [u8; 4] = *b"PATB";
pub const VERSION: u32 = 1;
pub const KIND_FIELD: u8 = 0;
pub const KIND_SENSOR_DATA: u8 = 1;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn header(kind: u8, capacity: usize) -> Vec<u8> {
    let mut buf = Vec::with_capacity(9 + capacity);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind);
    buf
}

pub fn encode_field(field: &Field) -> Vec<u8> {
    let g = field.grid();
    let mut buf = header(KIND_FIELD, 20 + 8 * g.len());
    buf.extend_from_slice(&(g.n() as u32).to_le_bytes());
    buf.extend_from_slice(&g.physical_size().to_le_bytes());
    buf.extend_from_slice(&g.sound_speed().to_le_bytes());
    for v in field.values().iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn encode_sensor_data(data: &SensorData) -> Vec<u8> {
    let (ns, nt) = data.values().dim();
    let mut buf = header(KIND_SENSOR_DATA, 16 + 8 * ns * nt);
    buf.extend_from_slice(&(ns as u32).to_le_bytes());
    buf.extend_from_slice(&(nt as u32).to_le_bytes());
    buf.extend_from_slice(&data.times().dt().to_le_bytes());
    for v in data.values().iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Truncated(format!(
                "{what}: need {len} bytes at offset {}, file has {}",
                self.pos,
                self.bytes.len()
            ))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64s(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let raw = self.take(count.checked_mul(8).unwrap_or(usize::MAX), what)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::invalid(
                "payload",
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }
}

fn open(bytes: &[u8], expected_kind: u8) -> Result<Reader<'_>> {
    if bytes.len() >= 4 && bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { bytes, pos: 0 };
    r.take(4, "magic")?;
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let kind = r.take(1, "kind")?[0];
    if kind != expected_kind {
        return Err(Error::WrongKind {
            expected: expected_kind,
            found: kind,
        });
    }
    Ok(r)
}

/// Decodes a field; the padding factor is not stored and defaults to [`DEFAULT_PAD_FACTOR`].
pub fn decode_field(bytes: &[u8]) -> Result<Field> {
    let mut r = open(bytes, KIND_FIELD)?;
    let n = r.u32("n")? as usize;
    let size = r.f64("physical_size")?;
    let speed = r.f64("sound_speed")?;
    let grid = GridSpec::new(n, size, speed, DEFAULT_PAD_FACTOR)?;
    let values = r.f64s(n * n, "field values")?;
    r.finish()?;
    Field::new(grid, Array2::from_shape_vec((n, n), values).expect("sized"))
}

pub fn decode_sensor_data(bytes: &[u8]) -> Result<SensorData> {
    let mut r = open(bytes, KIND_SENSOR_DATA)?;
    let ns = r.u32("n_s")? as usize;
    let nt = r.u32("n_t")? as usize;
    let dt = r.f64("dt")?;
    let times = TimeAxis::new(nt, dt)?;
    let values = r.f64s(ns * nt, "sensor values")?;
    r.finish()?;
    SensorData::new(
        times,
        Array2::from_shape_vec((ns, nt), values).expect("sized"),
    )
}

pub fn write_field(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_field(field)).map_err(io_err(path))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    decode_field(&fs::read(path).map_err(io_err(path))?)
}

pub fn write_sensor_data(data: &SensorData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_sensor_data(data)).map_err(io_err(path))
}

pub fn read_sensor_data(path: impl AsRef<Path>) -> Result<SensorData> {
    let path = path.as_ref();
    decode_sensor_data(&fs::read(path).map_err(io_err(path))?)
}

/// Writes an RFC-4180 CSV file with a header row.
pub fn write_csv<R, I, S>(path: impl AsRef<Path>, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Csv(e.to_string()))?;
    w.write_record(header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::Csv(e.to_string()))?;
    }
    w.flush().map_err(io_err(path))
}

/// Full-precision decimal representation used in CSV output.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}
