//! Path export.
//!
//! CSV: header `time,mode_1,...,mode_n`, one row per grid time.
//!
//! Binary (all little-endian): `u64` mode count `n`, `u64` row count, then
//! the rows in order, each `n + 1` `f64` values `t, x_1, ..., x_n`.

use std::io::{self, Read, Write};

use crate::sde::PathRecord;

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(rec: &PathRecord, mut out: W) -> io::Result<()> {
    let n = rec.states.first().map_or(0, |s| s.len());
    let mut header = String::from("time");
    for k in 1..=n {
        header.push_str(&format!(",mode_{k}"));
    }
    writeln!(out, "{header}")?;
    for (t, x) in rec.times.iter().zip(&rec.states) {
        let mut line = format_f64(*t);
        for v in x {
            line.push(',');
            line.push_str(&format_f64(*v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(rec: &PathRecord, mut out: W) -> io::Result<()> {
    let n = rec.states.first().map_or(0, |s| s.len());
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(rec.states.len() as u64).to_le_bytes())?;
    for (t, x) in rec.times.iter().zip(&rec.states) {
        out.write_all(&t.to_le_bytes())?;
        for v in x {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a binary dump back as `(times, states)`.
pub fn read_binary<R: Read>(mut input: R) -> io::Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    let mut times = Vec::with_capacity(rows);
    let mut states = Vec::with_capacity(rows);
    for _ in 0..rows {
        input.read_exact(&mut word)?;
        times.push(f64::from_le_bytes(word));
        let mut x = Vec::with_capacity(n);
        for _ in 0..n {
            input.read_exact(&mut word)?;
            x.push(f64::from_le_bytes(word));
        }
        states.push(x);
    }
    Ok((times, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> PathRecord {
        PathRecord {
            times: vec![0.0, 0.1, 0.2],
            states: vec![vec![1.0, -2.0], vec![0.5, 1e-300], vec![f64::MIN_POSITIVE, 3.25]],
            noise_increments: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&record(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time,mode_1,mode_2"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,1.0000000000000000e0,-2.0000000000000000e0")
        );
        for line in text.lines().skip(1) {
            for field in line.split(',') {
                let v: f64 = field.parse().unwrap();
                assert_eq!(format_f64(v), field);
            }
        }
    }

    #[test]
    fn binary_layout() {
        let rec = record();
        let mut buf = Vec::new();
        write_binary(&rec, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 3 * 3 * 8);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        assert_eq!(&buf[8..16], &3u64.to_le_bytes());
        let (t, x) = read_binary(&buf[..]).unwrap();
        assert_eq!(t, rec.times);
        assert_eq!(x, rec.states);
    }
}
