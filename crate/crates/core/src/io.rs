//! CSV, JSON and binary artifacts. Every artifact carries a config hash.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::LatticeArray;
use crate::quantization::GaborMatrix;
use crate::stft::PhaseSpaceArray;

pub const MAGIC: &[u8; 4] = b"TFQ1";

/// Payload kind in the binary header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum DumpKind {
    PhaseSpace = 1,
    GaborMatrix = 2,
    Envelope = 3,
}

impl DumpKind {
    fn from_u32(v: u32) -> Result<Self> {
        match v {
            1 => Ok(DumpKind::PhaseSpace),
            2 => Ok(DumpKind::GaborMatrix),
            3 => Ok(DumpKind::Envelope),
            _ => Err(Error::Format(format!("unknown payload kind {v}"))),
        }
    }
}

/// Decoded binary dump.
#[derive(Debug, Clone, PartialEq)]
pub struct Dump {
    pub kind: DumpKind,
    pub rows: u64,
    pub cols: u64,
    /// Kind-specific axis parameters (origins and spacings, or lattice constants).
    pub axes: [f64; 4],
    pub config_hash: [u8; 32],
    pub values: Vec<Complex64>,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

fn header(w: &mut impl Write, hash: &str) -> Result<()> {
    writeln!(w, "# config_hash={hash}").map_err(io_err)
}

pub fn write_phase_space_csv(w: &mut impl Write, a: &PhaseSpaceArray, hash: &str) -> Result<()> {
    header(w, hash)?;
    writeln!(w, "x,omega,re,im").map_err(io_err)?;
    for ix in 0..a.n_x() {
        let x = a.x_grid().point(ix);
        for iw in 0..a.n_omega() {
            let v = a.get(ix, iw);
            writeln!(w, "{x},{},{},{}", a.omega_grid().point(iw), v.re, v.im).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn write_matrix_csv(w: &mut impl Write, m: &GaborMatrix, hash: &str) -> Result<()> {
    header(w, hash)?;
    writeln!(w, "lambda_k,lambda_l,mu_k,mu_l,re,im,abs").map_err(io_err)?;
    let lat = m.lattice;
    for (r, (k, l)) in lat.iter().enumerate() {
        for (c, (k2, l2)) in lat.iter().enumerate() {
            let v = m.get(r, c);
            writeln!(w, "{k},{l},{k2},{l2},{},{},{}", v.re, v.im, v.norm()).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn write_envelope_csv(w: &mut impl Write, h: &LatticeArray, hash: &str) -> Result<()> {
    header(w, hash)?;
    writeln!(w, "k1,k2,value").map_err(io_err)?;
    for ((k, l), v) in h.iter_abs() {
        writeln!(w, "{k},{l},{v}").map_err(io_err)?;
    }
    Ok(())
}

/// Rows of `name,value` after the hash line; used for scalar tables.
pub fn write_table_csv(w: &mut impl Write, columns: &[&str], rows: &[Vec<String>], hash: &str) -> Result<()> {
    header(w, hash)?;
    writeln!(w, "{}", columns.join(",")).map_err(io_err)?;
    for r in rows {
        if r.len() != columns.len() {
            return Err(Error::Format(format!("row of {} cells for {} columns", r.len(), columns.len())));
        }
        writeln!(w, "{}", r.join(",")).map_err(io_err)?;
    }
    Ok(())
}

/// `{"schema": ..., "config_hash": ..., "data": value}`, pretty printed with a trailing newline.
pub fn write_json(w: &mut impl Write, schema: &str, hash: &str, value: &impl Serialize) -> Result<()> {
    let doc = serde_json::json!({
        "schema": schema,
        "config_hash": hash,
        "data": value,
    });
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

/// `TFQ1 | kind u32 | rows u64 | cols u64 | 4 x f64 axes | 32-byte hash | (re, im) f64 pairs`, little endian.
pub fn write_dump(w: &mut impl Write, d: &Dump) -> Result<()> {
    if d.values.len() as u64 != d.rows * d.cols {
        return Err(Error::Format(format!(
            "{} values for a {} x {} dump",
            d.values.len(),
            d.rows,
            d.cols
        )));
    }
    let mut buf = Vec::with_capacity(88 + 16 * d.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(d.kind as u32).to_le_bytes());
    buf.extend_from_slice(&d.rows.to_le_bytes());
    buf.extend_from_slice(&d.cols.to_le_bytes());
    for a in d.axes {
        buf.extend_from_slice(&a.to_le_bytes());
    }
    buf.extend_from_slice(&d.config_hash);
    for v in &d.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

pub fn read_dump(r: &mut impl Read) -> Result<Dump> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf).map_err(io_err)?;
    if buf.len() < 88 || &buf[..4] != MAGIC {
        return Err(Error::Format("missing TFQ1 header".into()));
    }
    let u64_at = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().expect("8 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().expect("8 bytes"));
    let kind = DumpKind::from_u32(u32::from_le_bytes(buf[4..8].try_into().expect("4 bytes")))?;
    let rows = u64_at(8);
    let cols = u64_at(16);
    let axes = [f64_at(24), f64_at(32), f64_at(40), f64_at(48)];
    let config_hash: [u8; 32] = buf[56..88].try_into().expect("32 bytes");
    let count = rows
        .checked_mul(cols)
        .filter(|c| (buf.len() - 88) as u64 == c * 16)
        .ok_or_else(|| Error::Format(format!("payload size does not match {rows} x {cols}")))?;
    let values = (0..count as usize)
        .map(|i| Complex64::new(f64_at(88 + 16 * i), f64_at(96 + 16 * i)))
        .collect();
    Ok(Dump {
        kind,
        rows,
        cols,
        axes,
        config_hash,
        values,
    })
}

impl Dump {
    /// Axes: x origin, x spacing, omega origin, omega spacing.
    pub fn phase_space(a: &PhaseSpaceArray, config_hash: [u8; 32]) -> Self {
        Dump {
            kind: DumpKind::PhaseSpace,
            rows: a.n_x() as u64,
            cols: a.n_omega() as u64,
            axes: [
                a.x_grid().origin(),
                a.x_grid().spacing(),
                a.omega_grid().origin(),
                a.omega_grid().spacing(),
            ],
            config_hash,
            values: a.values().to_vec(),
        }
    }

    /// Axes: alpha, beta, radius, 0.
    pub fn gabor_matrix(m: &GaborMatrix, config_hash: [u8; 32]) -> Self {
        let p = m.size() as u64;
        Dump {
            kind: DumpKind::GaborMatrix,
            rows: p,
            cols: p,
            axes: [m.lattice.alpha(), m.lattice.beta(), m.lattice.radius() as f64, 0.0],
            config_hash,
            values: m.entries().to_vec(),
        }
    }

    /// Axes: alpha, beta, radius, 0; a single row.
    pub fn envelope(h: &LatticeArray, config_hash: [u8; 32]) -> Self {
        let lat = h.lattice();
        Dump {
            kind: DumpKind::Envelope,
            rows: 1,
            cols: h.values().len() as u64,
            axes: [lat.alpha(), lat.beta(), lat.radius() as f64, 0.0],
            config_hash,
            values: h.values().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::Lattice;

    #[test]
    fn dump_round_trip() {
        let lat = Lattice::new(0.5, 0.5, 2).unwrap();
        let h = LatticeArray::from_fn(lat, |k, l| Complex64::new(k as f64, -l as f64 * 0.25)).unwrap();
        let d = Dump::envelope(&h, [7u8; 32]);
        let mut buf = Vec::new();
        write_dump(&mut buf, &d).unwrap();
        assert_eq!(&buf[..4], b"TFQ1");
        assert_eq!(buf.len(), 88 + 16 * 25);
        assert_eq!(read_dump(&mut buf.as_slice()).unwrap(), d);
        buf.pop();
        assert!(read_dump(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn csv_starts_with_hash() {
        let lat = Lattice::new(1.0, 1.0, 1).unwrap();
        let h = LatticeArray::zeros(lat);
        let mut buf = Vec::new();
        write_envelope_csv(&mut buf, &h, "abc").unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("# config_hash=abc"));
        assert_eq!(lines.next(), Some("k1,k2,value"));
        assert_eq!(s.lines().count(), 11);
    }
}
