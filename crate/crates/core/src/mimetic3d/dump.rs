//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `MFD3`, `u32` version, `u32` kind code,
//! `u32` component count, three `f64` spacings, then per component three `u64`
//! extents followed by the values in row-major order.

use std::io::{Read, Write};

use ndarray::Array3;

use super::field::{Field3, FieldKind};
use super::grid::Grid3;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MFD3";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub spacing: [f64; 3],
    pub field: Field3,
}

pub fn write_field(mut w: impl Write, field: &Field3, grid: &Grid3) -> Result<()> {
    field.check_shapes(grid, "write_field")?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&field.kind.code().to_le_bytes())?;
    w.write_all(&(field.comps.len() as u32).to_le_bytes())?;
    for h in grid.h {
        w.write_all(&h.to_le_bytes())?;
    }
    for a in &field.comps {
        for &n in a.shape() {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for v in a.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_bytes<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Config(format!("bad field dump: {}", msg.into()))
}

pub fn read_field(mut r: impl Read) -> Result<FieldDump> {
    if &read_bytes::<4>(&mut r)? != MAGIC {
        return Err(corrupt("wrong magic"));
    }
    let version = u32::from_le_bytes(read_bytes(&mut r)?);
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let code = u32::from_le_bytes(read_bytes(&mut r)?);
    let kind =
        FieldKind::from_code(code).ok_or_else(|| corrupt(format!("unknown kind code {code}")))?;
    let ncomp = u32::from_le_bytes(read_bytes(&mut r)?) as usize;
    if ncomp != kind.components() {
        return Err(corrupt(format!(
            "{kind} has {} components, header says {ncomp}",
            kind.components()
        )));
    }
    let mut spacing = [0.0; 3];
    for h in &mut spacing {
        *h = f64::from_le_bytes(read_bytes(&mut r)?);
    }
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut sh = [0usize; 3];
        for n in &mut sh {
            *n = u64::from_le_bytes(read_bytes(&mut r)?) as usize;
        }
        let len = sh.iter().product::<usize>();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f64::from_le_bytes(read_bytes(&mut r)?));
        }
        comps.push(Array3::from_shape_vec(sh, data).map_err(|e| corrupt(e.to_string()))?);
    }
    Ok(FieldDump {
        spacing,
        field: Field3 { kind, comps },
    })
}
