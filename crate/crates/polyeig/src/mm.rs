//! Matrix Market files for Hermitian matrices.
//!
//! Writing always produces `coordinate complex hermitian` with the lower
//! triangle stored and every component printed with 17 significant digits,
//! so a read after a write is bit-exact. Reading also accepts `array`
//! storage, `real`/`integer` fields and `general`/`symmetric` symmetry.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use polyeig_core::{CMatrix, HermMatrix, C64};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Storage {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

pub fn format_matrix_market(m: &HermMatrix) -> String {
    let n = m.n();
    let stored = |v: C64| v.re.to_bits() != 0 || v.im.to_bits() != 0;
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            if stored(m[(i, j)]) {
                entries.push((i, j));
            }
        }
    }
    let mut s = String::from("%%MatrixMarket matrix coordinate complex hermitian\n");
    let _ = writeln!(s, "{n} {n} {}", entries.len());
    for (i, j) in entries {
        let v = m[(i, j)];
        let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im);
    }
    s
}

pub fn write_matrix_market(m: &HermMatrix, path: &Path) -> Result<()> {
    fs::write(path, format_matrix_market(m)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_market(path: &Path) -> Result<HermMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, path)
}

/// Parses `text`; `origin` only labels errors.
pub fn parse_matrix_market(text: &str, origin: &Path) -> Result<HermMatrix> {
    let err = |line: usize, msg: &str| Error::parse(origin, line, msg);
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(hline, "expected `%%MatrixMarket matrix <storage> <field> <symmetry>`"));
    }
    let storage = match words[2].as_str() {
        "coordinate" => Storage::Coordinate,
        "array" => Storage::Array,
        _ => return Err(err(hline, "unsupported storage")),
    };
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        _ => return Err(err(hline, "unsupported field")),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" if field == Field::Real => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        _ => return Err(err(hline, "unsupported symmetry")),
    };

    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = data.next().ok_or_else(|| err(hline, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| err(sline, "bad size line")))
        .collect::<Result<_>>()?;
    let (n, nnz) = match (storage, dims.as_slice()) {
        (Storage::Coordinate, &[r, c, nnz]) if r == c => (r, nnz),
        (Storage::Array, &[r, c]) if r == c => (r, 0),
        (_, &[_, _, ..]) => return Err(err(sline, "matrix is not square")),
        _ => return Err(err(sline, "bad size line")),
    };

    let parse_value = |line: usize, parts: &[&str]| -> Result<C64> {
        let num = |w: &str| w.parse::<f64>().map_err(|_| err(line, "bad number"));
        match (field, parts) {
            (Field::Real, [re]) => Ok(C64::new(num(re)?, 0.0)),
            (Field::Complex, [re, im]) => Ok(C64::new(num(re)?, num(im)?)),
            _ => Err(err(line, "wrong number of values")),
        }
    };

    let mut m = CMatrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    let mut last = sline;
    let mut put = |line: usize, i: usize, j: usize, v: C64| -> Result<()> {
        if symmetry != Symmetry::General && i < j {
            return Err(err(line, "entry above the diagonal in a symmetric or Hermitian file"));
        }
        if symmetry == Symmetry::Hermitian && i == j && v.im != 0.0 {
            return Err(err(line, "Hermitian diagonal entry has a nonzero imaginary part"));
        }
        if std::mem::replace(&mut seen[i * n + j], true) {
            return Err(err(line, "duplicate entry"));
        }
        m[(i, j)] = v;
        if symmetry != Symmetry::General && i != j {
            m[(j, i)] = v.conj();
            seen[j * n + i] = true;
        }
        Ok(())
    };

    match storage {
        Storage::Coordinate => {
            let mut count = 0;
            for (line, l) in data.by_ref() {
                last = line;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() < 2 {
                    return Err(err(line, "bad entry"));
                }
                let idx = |w: &str| match w.parse::<usize>() {
                    Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                    _ => Err(err(line, "index out of range")),
                };
                let (i, j) = (idx(parts[0])?, idx(parts[1])?);
                count += 1;
                if count > nnz {
                    return Err(err(line, "more entries than declared"));
                }
                put(line, i, j, parse_value(line, &parts[2..])?)?;
            }
            if count != nnz {
                return Err(err(last, "fewer entries than declared"));
            }
        }
        Storage::Array => {
            let positions: Vec<(usize, usize)> = (0..n)
                .flat_map(|j| {
                    let start = if symmetry == Symmetry::General { 0 } else { j };
                    (start..n).map(move |i| (i, j))
                })
                .collect();
            let mut pos = positions.iter();
            for (line, l) in data.by_ref() {
                last = line;
                let parts: Vec<&str> = l.split_whitespace().collect();
                let &(i, j) = pos.next().ok_or_else(|| err(line, "more entries than the shape allows"))?;
                put(line, i, j, parse_value(line, &parts)?)?;
            }
            if pos.next().is_some() {
                return Err(err(last, "fewer entries than the shape requires"));
            }
        }
    }

    if symmetry == Symmetry::General {
        let scale = m.max_abs();
        for i in 0..n {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(err(last, "general matrix is not Hermitian"));
                }
            }
        }
    }
    Ok(HermMatrix::new(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<HermMatrix> {
        parse_matrix_market(s, Path::new("test.mtx"))
    }

    #[test]
    fn diagonal_round_trip() {
        let m = HermMatrix::from_real_diag(&[1.0, 2.0]);
        let s = format_matrix_market(&m);
        assert!(s.starts_with("%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n"));
        assert_eq!(parse(&s).unwrap(), m);
    }

    #[test]
    fn upper_entry_is_rejected_with_line() {
        let s = "%%MatrixMarket matrix coordinate complex hermitian\n% c\n2 2 2\n1 1 1 0\n1 2 0 1\n";
        match parse(s).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 5),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn array_and_real_inputs() {
        let s = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n3\n2\n";
        let m = parse(s).unwrap();
        assert_eq!(m[(1, 0)], C64::new(3.0, 0.0));
        assert_eq!(m[(0, 1)], C64::new(3.0, 0.0));
        let g = "%%MatrixMarket matrix array complex general\n2 2\n1 0\n0 -2\n0 2\n5 0\n";
        let m = parse(g).unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, 2.0));
        let bad = "%%MatrixMarket matrix array complex general\n2 2\n1 0\n0 2\n0 2\n5 0\n";
        assert!(parse(bad).is_err());
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse("").is_err());
        assert!(parse("%%MatrixMarket matrix coordinate complex hermitian\n2 3 0\n").is_err());
        assert!(parse("%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n").is_err());
        assert!(parse("%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n3 1 1 0\n").is_err());
        assert!(parse("%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n1 1 1 1\n").is_err());
        assert!(parse("%%MatrixMarket matrix coordinate complex symmetric\n1 1 0\n").is_err());
    }
}
