//! Field serialization: a little-endian binary form (header `n_points: u64`,
//! `length: f64`, `repr: u64` with 0 = physical, 1 = frequency, followed by
//! interleaved `re, im` f64 pairs) and a debugging CSV `x,re,im`.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Representation};
use num_complex::Complex64;
use std::io::{Read, Write};

fn tag(repr: Representation) -> u64 {
    match repr {
        Representation::Physical => 0,
        Representation::Frequency => 1,
    }
}

pub fn write_binary(field: &Field, mut out: impl Write) -> Result<()> {
    let grid = field.grid();
    out.write_all(&(grid.n_points() as u64).to_le_bytes())?;
    out.write_all(&grid.length().to_le_bytes())?;
    out.write_all(&tag(field.representation()).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * field.len());
    for z in field.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary(mut input: impl Read) -> Result<Field> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let length = f64::from_le_bytes(word);
    input.read_exact(&mut word)?;
    let repr = match u64::from_le_bytes(word) {
        0 => Representation::Physical,
        1 => Representation::Frequency,
        t => return Err(Error::Format(format!("unknown representation tag {t}"))),
    };
    let grid = Grid::new(n, length)?;
    let mut bytes = vec![0u8; 16 * n];
    input.read_exact(&mut bytes)?;
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Field::new(grid, samples, repr)
}

/// `x,re,im` rows; `x` is the wavenumber for frequency-space fields.
pub fn write_csv(field: &Field, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re", "im"])?;
    let grid = field.grid();
    for (j, z) in field.samples().iter().enumerate() {
        let x = match field.representation() {
            Representation::Physical => grid.x(j),
            Representation::Frequency => grid.frequency_at_slot(j),
        };
        w.write_record([x.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
