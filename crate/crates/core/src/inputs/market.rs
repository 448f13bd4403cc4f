//! MatrixMarket text files (`real` field, `array` or `coordinate` layout,
//! `general` or `symmetric`), read into dense matrices.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market(&text, path)
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    Array,
    Coordinate,
}

/// Parses MatrixMarket text; `path` only labels errors. Coordinate entries
/// repeated in the file are summed; symmetric files are mirrored.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<Matrix> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(err(
            hline,
            "expected `%%MatrixMarket matrix <layout> real <symmetry>`".into(),
        ));
    }
    let layout = match fields[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(err(hline, format!("unknown layout `{other}`"))),
    };
    if fields[3] != "real" {
        return Err(err(
            hline,
            format!("unsupported field `{}` (only real)", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(hline, format!("unsupported symmetry `{other}`"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (dline, dims) = body
        .next()
        .ok_or_else(|| err(hline, "missing size line".into()))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(dline, format!("bad size `{t}`"))))
        .collect::<Result<_>>()?;
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(dline, format!("size line needs {want} integers")));
    }
    let (m, n) = (dims[0], dims[1]);
    if m == 0 || n == 0 {
        return Err(err(dline, format!("empty {m}x{n} matrix")));
    }
    if symmetric && m != n {
        return Err(err(
            dline,
            format!("symmetric matrix must be square, got {m}x{n}"),
        ));
    }

    let real = |line: usize, t: &str| -> Result<f64> {
        let v: f64 = t
            .parse()
            .map_err(|_| err(line, format!("bad value `{t}`")))?;
        if !v.is_finite() {
            return Err(err(line, format!("non-finite value `{t}`")));
        }
        Ok(v)
    };

    let mut data = vec![0.0; m * n];
    let mut last = dline;
    match layout {
        Layout::Array => {
            // column-major; symmetric files list the lower triangle only
            let slots: Vec<(usize, usize)> = (0..n)
                .flat_map(|j| {
                    let start = if symmetric { j } else { 0 };
                    (start..m).map(move |i| (i, j))
                })
                .collect();
            let mut next = slots.iter();
            for (ln, l) in body.by_ref() {
                last = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 1 {
                    return Err(err(ln, "array entries hold one value per line".into()));
                }
                let &(i, j) = next
                    .next()
                    .ok_or_else(|| err(ln, "more entries than the size line allows".into()))?;
                let v = real(ln, toks[0])?;
                data[i * n + j] = v;
                if symmetric {
                    data[j * n + i] = v;
                }
            }
            if next.next().is_some() {
                return Err(err(last, format!("expected {} entries", slots.len())));
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut count = 0;
            for (ln, l) in body.by_ref() {
                last = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err(ln, "coordinate entries are `i j value`".into()));
                }
                let idx = |t: &str, bound: usize| -> Result<usize> {
                    match t.parse::<usize>() {
                        Ok(v) if (1..=bound).contains(&v) => Ok(v - 1),
                        _ => Err(err(ln, format!("index `{t}` outside 1..={bound}"))),
                    }
                };
                let (i, j) = (idx(toks[0], m)?, idx(toks[1], n)?);
                if symmetric && j > i {
                    return Err(err(
                        ln,
                        format!(
                            "entry ({}, {}) above the diagonal in a symmetric file",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
                let v = real(ln, toks[2])?;
                count += 1;
                if count > nnz {
                    return Err(err(ln, format!("more than {nnz} entries")));
                }
                data[i * n + j] += v;
                if symmetric && i != j {
                    data[j * n + i] += v;
                }
            }
            if count != nnz {
                return Err(err(last, format!("expected {nnz} entries, found {count}")));
            }
        }
    }
    Matrix::new(m, n, data)
}

/// Writes `a` as a general real array, 17 significant digits per entry.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", a.rows(), a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let _ = writeln!(s, "{:.16e}", a.get(i, j));
        }
    }
    std::fs::write(path, s).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
