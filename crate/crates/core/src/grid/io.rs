//! Field dumps: little-endian binary and long-format CSV.
//!
//! Binary layout: magic `MOYALFLD`, u32 d, u32 n, f64 L, u8 space (0 position,
//! 1 momentum), then n^d interleaved (re, im) f64 pairs.

use super::{GridSpec, SampledField, Space};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"MOYALFLD";

pub fn write_field<W: Write>(field: &SampledField, mut w: W) -> Result<()> {
    let s = field.spec;
    let mut buf = Vec::with_capacity(25 + 16 * field.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(s.d() as u32).to_le_bytes());
    buf.extend_from_slice(&(s.n() as u32).to_le_bytes());
    buf.extend_from_slice(&s.half_extent().to_le_bytes());
    buf.push(match field.space {
        Space::Position => 0,
        Space::Momentum => 1,
    });
    for v in &field.data {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<SampledField> {
    let mut head = [0u8; 25];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(Error::Io("not a field dump".into()));
    }
    let d = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(head[16..24].try_into().unwrap());
    let space = match head[24] {
        0 => Space::Position,
        1 => Space::Momentum,
        t => return Err(Error::Io(format!("bad space tag {t}"))),
    };
    let spec = GridSpec::new(d, n, l)?;
    let mut raw = vec![0u8; 16 * spec.len()];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    SampledField::new(spec, space, data)
}

/// Header `i1,..,id,x1,..,xd,re,im` (`p` instead of `x` for momentum fields).
pub fn field_to_csv(field: &SampledField) -> String {
    let s = field.spec;
    let sym = match field.space {
        Space::Position => "x",
        Space::Momentum => "p",
    };
    let mut out = String::new();
    let cols: Vec<String> = (1..=s.d())
        .map(|a| format!("i{a}"))
        .chain((1..=s.d()).map(|a| format!("{sym}{a}")))
        .chain(["re".to_string(), "im".to_string()])
        .collect();
    out.push_str(&cols.join(","));
    out.push('\n');
    for (i, v) in field.data.iter().enumerate() {
        let m = s.unflatten(i);
        for j in &m {
            let _ = write!(out, "{j},");
        }
        for &j in &m {
            let _ = write!(out, "{},", s.coord(field.space, j));
        }
        let _ = writeln!(out, "{},{}", v.re, v.im);
    }
    out
}

pub fn write_field_csv<W: Write>(field: &SampledField, mut w: W) -> Result<()> {
    w.write_all(field_to_csv(field).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let s = GridSpec::new(2, 8, 1.5).unwrap();
        let data = (0..64).map(|i| Complex64::new(i as f64 * 0.1, -(i as f64))).collect();
        let f = SampledField::new(s, Space::Momentum, data).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 25 + 64 * 16);
        assert_eq!(read_field(&buf[..]).unwrap(), f);
        assert!(read_field(&b"garbage-garbage-garbage-garbage"[..]).is_err());
    }

    #[test]
    fn csv_shape() {
        let s = GridSpec::new(1, 8, 1.0).unwrap();
        let f = SampledField::zeros(s, Space::Position);
        let csv = field_to_csv(&f);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i1,x1,re,im");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "0,-1,0,0");
    }
}
