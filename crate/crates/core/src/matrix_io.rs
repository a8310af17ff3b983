//! Matrix files.
//!
//! Binary dump, one record per matrix, all little-endian:
//!
//! ```text
//! u64 rows | u64 cols | rows·cols × (f64 re, f64 im), row-major
//! ```
//!
//! Records are concatenated with no file header. The JSON form is
//! `{"real": [[...], ...], "imag": [[...], ...]}` with `imag` optional.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub fn write_matrix<W: Write>(w: &mut W, m: &ComplexMatrix) -> Result<()> {
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for z in m.as_slice() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_matrices<W: Write>(w: &mut W, ms: &[ComplexMatrix]) -> Result<()> {
    ms.iter().try_for_each(|m| write_matrix(w, m))
}

fn take<'a>(buf: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let end = pos
        .checked_add(n)
        .filter(|&e| e <= buf.len())
        .ok_or_else(|| {
            Error::input(format!(
                "truncated matrix dump at byte {} (need {n} more bytes)",
                *pos
            ))
        })?;
    let out = &buf[*pos..end];
    *pos = end;
    Ok(out)
}

fn u64_at(buf: &[u8], pos: &mut usize) -> Result<u64> {
    Ok(u64::from_le_bytes(
        take(buf, pos, 8)?.try_into().expect("8 bytes"),
    ))
}

fn f64_at(buf: &[u8], pos: &mut usize) -> Result<f64> {
    Ok(f64::from_le_bytes(
        take(buf, pos, 8)?.try_into().expect("8 bytes"),
    ))
}

/// Reads every record of a binary dump.
pub fn read_matrices<R: Read>(r: &mut R) -> Result<Vec<ComplexMatrix>> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < buf.len() {
        let rows = u64_at(&buf, &mut pos)? as usize;
        let cols = u64_at(&buf, &mut pos)? as usize;
        let len = rows
            .checked_mul(cols)
            .filter(|&l| l.checked_mul(16).is_some_and(|b| b <= buf.len() - pos))
            .ok_or_else(|| {
                Error::input(format!(
                    "matrix header {rows}x{cols} exceeds the remaining data"
                ))
            })?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let re = f64_at(&buf, &mut pos)?;
            let im = f64_at(&buf, &mut pos)?;
            data.push(Complex64::new(re, im));
        }
        out.push(ComplexMatrix::from_vec(rows, cols, data)?);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMatrix {
    real: Vec<Vec<f64>>,
    #[serde(default)]
    imag: Option<Vec<Vec<f64>>>,
}

pub fn read_matrix_json(text: &str) -> Result<ComplexMatrix> {
    let m: JsonMatrix = serde_json::from_str(text)?;
    let rows = m.real.len();
    let cols = m.real.first().map_or(0, Vec::len);
    if m.real.iter().any(|r| r.len() != cols) {
        return Err(Error::input("ragged 'real' rows"));
    }
    if let Some(im) = &m.imag {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::input("'imag' must have the same shape as 'real'"));
        }
    }
    let data = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| Complex64::new(m.real[i][j], m.imag.as_ref().map_or(0.0, |im| im[i][j])))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data)
}

/// Reads one matrix: JSON for `.json` files, otherwise the first record of
/// a binary dump.
pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        return read_matrix_json(&fs::read_to_string(path)?);
    }
    let mut f = fs::File::open(path)?;
    read_matrices(&mut f)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::input(format!("{} contains no matrix", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_vec(
            2,
            3,
            (0..6)
                .map(|k| Complex64::new(k as f64, -0.5 * k as f64))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let ms = vec![sample(), ComplexMatrix::identity(2)];
        let mut buf = Vec::new();
        write_matrices(&mut buf, &ms).unwrap();
        assert_eq!(buf.len(), 16 + 6 * 16 + 16 + 4 * 16);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        assert_eq!(read_matrices(&mut buf.as_slice()).unwrap(), ms);
    }

    #[test]
    fn truncated_dump_is_an_error() {
        let mut buf = Vec::new();
        write_matrix(&mut buf, &sample()).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_matrices(&mut buf.as_slice()).is_err());
        let huge = [u64::MAX.to_le_bytes(), 2u64.to_le_bytes()].concat();
        assert!(read_matrices(&mut huge.as_slice()).is_err());
    }

    #[test]
    fn json_forms() {
        let m = read_matrix_json(r#"{"real": [[1, 0], [0, -1]]}"#).unwrap();
        assert_eq!(m[(1, 1)], Complex64::new(-1.0, 0.0));
        let m =
            read_matrix_json(r#"{"real": [[0, 0], [0, 0]], "imag": [[0, -1], [1, 0]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert!(read_matrix_json(r#"{"real": [[1, 2], [3]]}"#).is_err());
        assert!(read_matrix_json(r#"{"real": [[1]], "imag": [[1, 2]]}"#).is_err());
    }
}
