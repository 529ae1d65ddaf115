//! LSTN binary tensor container.
//!
//! Layout, all little-endian regardless of host:
//!
//! ```text
//! magic   4 bytes  "LSTN"
//! version u16      currently 1
//! ndim    u16
//! dims    ndim x u32
//! payload product(dims) x f32, row-major
//! ```
//!
//! Scalar maps are stored as `[height, width]`; displacement fields as
//! `[5, height, width]` with channels dx_start, dy_start, dx_end, dy_end
//! and a 0/1 validity plane. Write followed by read is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use lseval_core::map::{DisplacementField, ScalarMap};

use crate::error::{CliError, CliResult};

pub const MAGIC: [u8; 4] = *b"LSTN";
pub const VERSION: u16 = 1;

/// Number of planes in a displacement-field tensor.
pub const DISP_CHANNELS: u32 = 5;

const MAX_ELEMENTS: u64 = 1 << 30;

/// A raw tensor: dimensions plus a flat row-major payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dims: Vec<u32>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<u32>, data: Vec<f32>) -> Result<Self, String> {
        let expect: u64 = dims.iter().map(|d| u64::from(*d)).product();
        if expect != data.len() as u64 {
            return Err(format!(
                "dims {:?} imply {} elements, payload has {}",
                dims,
                expect,
                data.len()
            ));
        }
        Ok(Self { dims, data })
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.dims.len() as u16).to_le_bytes())?;
        for d in &self.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, String> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|e| e.to_string())?;
        if magic != MAGIC {
            return Err(format!("bad magic {magic:?}, expected \"LSTN\""));
        }
        let mut u16_buf = [0u8; 2];
        r.read_exact(&mut u16_buf).map_err(|e| e.to_string())?;
        let version = u16::from_le_bytes(u16_buf);
        if version != VERSION {
            return Err(format!("unsupported version {version}"));
        }
        r.read_exact(&mut u16_buf).map_err(|e| e.to_string())?;
        let ndim = u16::from_le_bytes(u16_buf) as usize;
        let mut dims = Vec::with_capacity(ndim);
        let mut u32_buf = [0u8; 4];
        for _ in 0..ndim {
            r.read_exact(&mut u32_buf).map_err(|e| e.to_string())?;
            dims.push(u32::from_le_bytes(u32_buf));
        }
        let count: u64 = dims.iter().map(|d| u64::from(*d)).product();
        if count > MAX_ELEMENTS {
            return Err(format!("tensor of {count} elements exceeds the size cap"));
        }
        let mut bytes = vec![0u8; count as usize * 4];
        r.read_exact(&mut bytes)
            .map_err(|_| format!("payload truncated: expected {count} f32 values"))?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing).map_err(|e| e.to_string())? != 0 {
            return Err("trailing bytes after payload".into());
        }
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self { dims, data })
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let file = File::create(path).map_err(|source| CliError::OutputIo {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(|source| CliError::OutputIo {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| CliError::parse(path, e.to_string()))?;
        let mut r = BufReader::new(file);
        Self::read_from(&mut r).map_err(|m| CliError::parse(path, m))
    }
}

pub fn scalar_map_to_tensor(map: &ScalarMap) -> Tensor {
    Tensor {
        dims: vec![map.height() as u32, map.width() as u32],
        data: map.values().iter().map(|v| *v as f32).collect(),
    }
}

pub fn tensor_to_scalar_map(t: &Tensor, path: &Path) -> CliResult<ScalarMap> {
    if t.dims.len() != 2 {
        return Err(CliError::parse(
            path,
            format!("expected a 2-d tensor, got dims {:?}", t.dims),
        ));
    }
    let (h, w) = (t.dims[0] as usize, t.dims[1] as usize);
    let values: Vec<f64> = t.data.iter().map(|v| f64::from(*v)).collect();
    ScalarMap::from_values(w, h, values).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn disp_field_to_tensor(field: &DisplacementField) -> Tensor {
    let n = field.width() * field.height();
    let mut data = Vec::with_capacity(n * DISP_CHANNELS as usize);
    for chan in field.channels() {
        data.extend(chan.iter().map(|v| *v as f32));
    }
    data.extend(field.validity().iter().map(|v| if *v { 1.0f32 } else { 0.0 }));
    Tensor {
        dims: vec![
            DISP_CHANNELS,
            field.height() as u32,
            field.width() as u32,
        ],
        data,
    }
}

pub fn tensor_to_disp_field(t: &Tensor, path: &Path) -> CliResult<DisplacementField> {
    if t.dims.len() != 3 || t.dims[0] != DISP_CHANNELS {
        return Err(CliError::parse(
            path,
            format!(
                "expected a [{DISP_CHANNELS}, height, width] tensor, got dims {:?}",
                t.dims
            ),
        ));
    }
    let (h, w) = (t.dims[1] as usize, t.dims[2] as usize);
    let n = w * h;
    let plane = |i: usize| -> Vec<f64> {
        t.data[i * n..(i + 1) * n]
            .iter()
            .map(|v| f64::from(*v))
            .collect()
    };
    let valid: Vec<bool> = t.data[4 * n..5 * n].iter().map(|v| *v > 0.5).collect();
    DisplacementField::from_channels(w, h, plane(0), plane(1), plane(2), plane(3), valid)
        .map_err(|e| CliError::parse(path, e.to_string()))
}
