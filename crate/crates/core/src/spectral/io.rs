//! Snapshot serialization.
//!
//! Binary layout, all little-endian: `k_max: u64`, `n_eta: u64`, `d_eta: f64`,
//! `time: f64`, then `(2 k_max + 1) * n_eta` pairs `(re: f64, im: f64)` in row-major
//! order, rows running over `k = -k_max..=k_max` and columns over `eta` ascending.

use super::{Grid, SpectralError, SpectralField};
use crate::report::fmt_f64;
use num_complex::Complex64;
use std::io::{Read, Write};

pub fn write_snapshot<W: Write>(field: &SpectralField, mut w: W) -> Result<(), SpectralError> {
    let g = field.grid();
    w.write_all(&(g.k_max() as u64).to_le_bytes())?;
    w.write_all(&(g.n_eta() as u64).to_le_bytes())?;
    w.write_all(&g.d_eta().to_le_bytes())?;
    w.write_all(&field.time.to_le_bytes())?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<SpectralField, SpectralError> {
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8], SpectralError> {
        r.read_exact(&mut word)
            .map_err(|e| SpectralError::Format(format!("truncated snapshot: {e}")))?;
        Ok(word)
    };
    let k_max = u64::from_le_bytes(next(&mut r)?) as usize;
    let n_eta = u64::from_le_bytes(next(&mut r)?) as usize;
    let d_eta = f64::from_le_bytes(next(&mut r)?);
    let time = f64::from_le_bytes(next(&mut r)?);
    let grid = Grid::from_lattice(k_max, n_eta, d_eta)?;
    let mut coeffs = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        coeffs.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(SpectralError::Format(
            "trailing bytes after coefficients".into(),
        ));
    }
    SpectralField::from_coeffs(grid, coeffs, time)
}

/// CSV with header `k,eta,re,im`, one row per lattice point.
pub fn snapshot_csv(field: &SpectralField) -> String {
    let g = field.grid();
    let mut s = String::from("k,eta,re,im\n");
    for (i, c) in field.coeffs().iter().enumerate() {
        let (k, j) = g.mode(i);
        s.push_str(&format!(
            "{},{},{},{}\n",
            k,
            fmt_f64(g.eta(j)),
            fmt_f64(c.re),
            fmt_f64(c.im)
        ));
    }
    s
}
