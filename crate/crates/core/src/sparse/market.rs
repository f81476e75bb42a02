//! Matrix Market coordinate (matrices) and array (vectors) exchange files.
//!
//! Only real/integer fields with general or symmetric storage are accepted.
//! Symmetric files store the lower triangle; the reader mirrors every
//! off-diagonal entry. Values are written in shortest round-trip form so a
//! write followed by a read reproduces every bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses coordinate data from any reader; `origin` is used in error messages.
pub fn parse_matrix_market<R: BufRead>(reader: R, origin: &Path) -> Result<SparseMatrix> {
    let mut lines = Lines::new(reader, origin);

    let (line_no, header) = lines
        .next_raw()?
        .ok_or_else(|| lines.parse_error(0, "empty file"))?;
    let symmetry = parse_coordinate_header(&header).map_err(|msg| match msg {
        HeaderError::Format(m) => Error::Format(m),
        HeaderError::Syntax(m) => lines.parse_error(line_no, &m),
    })?;

    let (size_line, size) = lines
        .next_data()?
        .ok_or_else(|| lines.parse_error(line_no, "missing size line"))?;
    let dims = parse_fields::<usize>(&size, 3).map_err(|m| lines.parse_error(size_line, &m))?;
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;

    let mut triplets = Vec::with_capacity(if symmetry == Symmetry::Symmetric {
        2 * nnz
    } else {
        nnz
    });
    for _ in 0..nnz {
        let (no, line) = lines
            .next_data()?
            .ok_or_else(|| lines.parse_error(size_line, "fewer entries than declared"))?;
        let mut fields = line.split_whitespace();
        let (i, j, v) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(i), Some(j), Some(v), None) => (i, j, v),
            _ => return Err(lines.parse_error(no, "expected `row col value`")),
        };
        let i: usize = i
            .parse()
            .map_err(|_| lines.parse_error(no, "bad row index"))?;
        let j: usize = j
            .parse()
            .map_err(|_| lines.parse_error(no, "bad column index"))?;
        let v: f64 = v.parse().map_err(|_| lines.parse_error(no, "bad value"))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(lines.parse_error(no, "index outside the declared size"));
        }
        let (i, j) = (i - 1, j - 1);
        triplets.push((i, j, v));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j, i, v));
        }
    }
    if lines.next_data()?.is_some() {
        return Err(lines.parse_error(lines.line_no, "more entries than declared"));
    }
    SparseMatrix::from_triplets(n, triplets)
}

/// Writes `a` as a general coordinate file with 1-based indices.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
        for (i, j, v) in a.triplets() {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
        w.flush()
    };
    body().map_err(io_err)
}

/// Reads a dense vector: either a Matrix Market `array real general` file
/// with one column, or a plain list of whitespace-separated numbers.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = Lines::new(BufReader::new(file), path);
    let mut values = Vec::new();
    let mut declared: Option<(usize, usize)> = None;
    let mut first = true;
    while let Some((no, line)) = lines.next_raw()? {
        let trimmed = line.trim();
        if first && trimmed.starts_with("%%MatrixMarket") {
            let lower = trimmed.to_ascii_lowercase();
            let tokens: Vec<&str> = lower.split_whitespace().collect();
            if tokens.len() < 5 || tokens[1] != "matrix" || tokens[2] != "array" {
                return Err(Error::Format(format!(
                    "vector files must use array storage: {trimmed}"
                )));
            }
            if tokens[3] != "real" && tokens[3] != "integer" {
                return Err(Error::Format(format!("unsupported field `{}`", tokens[3])));
            }
            first = false;
            let (size_no, size) = lines
                .next_data()?
                .ok_or_else(|| lines.parse_error(no, "missing size line"))?;
            let dims =
                parse_fields::<usize>(&size, 2).map_err(|m| lines.parse_error(size_no, &m))?;
            if dims[1] != 1 {
                return Err(Error::Format(format!(
                    "vector file must have one column, found {}",
                    dims[1]
                )));
            }
            declared = Some((dims[0], size_no));
            continue;
        }
        first = false;
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        for token in trimmed.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| lines.parse_error(no, "bad value"))?;
            values.push(v);
        }
    }
    if let Some((len, size_no)) = declared {
        if values.len() != len {
            return Err(lines.parse_error(
                size_no,
                &format!("declared {len} entries, found {}", values.len()),
            ));
        }
    }
    if values.is_empty() {
        return Err(lines.parse_error(lines.line_no, "no values found"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("vector file"));
    }
    Ok(values)
}

/// Writes a Matrix Market `array real general` column vector.
pub fn write_vector(path: impl AsRef<Path>, x: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} 1", x.len())?;
        for v in x {
            writeln!(w, "{v:e}")?;
        }
        w.flush()
    };
    body().map_err(io_err)
}

enum HeaderError {
    Format(String),
    Syntax(String),
}

fn parse_coordinate_header(header: &str) -> std::result::Result<Symmetry, HeaderError> {
    let lower = header.trim().to_ascii_lowercase();
    let tokens: Vec<&str> = lower.split_whitespace().collect();
    if tokens.first() != Some(&"%%matrixmarket") {
        return Err(HeaderError::Syntax(
            "missing %%MatrixMarket banner".to_string(),
        ));
    }
    if tokens.len() != 5 {
        return Err(HeaderError::Syntax(format!(
            "banner needs 5 fields, found {}",
            tokens.len()
        )));
    }
    if tokens[1] != "matrix" {
        return Err(HeaderError::Format(format!("object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(HeaderError::Format(format!("format `{}`", tokens[2])));
    }
    match tokens[3] {
        "real" | "integer" => {}
        other => return Err(HeaderError::Format(format!("field `{other}`"))),
    }
    match tokens[4] {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(HeaderError::Format(format!("symmetry `{other}`"))),
    }
}

fn parse_fields<T: std::str::FromStr>(
    line: &str,
    count: usize,
) -> std::result::Result<Vec<T>, String> {
    let out: Vec<T> = line
        .split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| format!("cannot parse `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    if out.len() != count {
        return Err(format!("expected {count} fields, found {}", out.len()));
    }
    Ok(out)
}

/// Line reader that tracks 1-based line numbers and skips comments on demand.
struct Lines<R> {
    reader: R,
    path: PathBuf,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R, path: &Path) -> Self {
        Self {
            reader,
            path: path.to_path_buf(),
            line_no: 0,
            buf: String::new(),
        }
    }

    fn next_raw(&mut self) -> Result<Option<(usize, String)>> {
        self.buf.clear();
        let read = self
            .reader
            .read_line(&mut self.buf)
            .map_err(|source| Error::Io {
                path: self.path.clone(),
                source,
            })?;
        if read == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        Ok(Some((self.line_no, self.buf.trim_end().to_string())))
    }

    /// Next line that is neither blank nor a `%` comment.
    fn next_data(&mut self) -> Result<Option<(usize, String)>> {
        while let Some((no, line)) = self.next_raw()? {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some((no, t.to_string())));
            }
        }
        Ok(None)
    }

    fn parse_error(&self, line: usize, message: &str) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SparseMatrix> {
        parse_matrix_market(text.as_bytes(), Path::new("inline.mtx"))
    }

    #[test]
    fn symmetric_storage_is_expanded() {
        let a = parse(
            "%%MatrixMarket matrix coordinate real symmetric\n\
             % lower triangle only\n\
             2 2 3\n1 1 2.0\n2 1 1.0\n2 2 2.0\n",
        )
        .unwrap();
        assert_eq!(a.to_dense().to_row_major(), vec![2.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn minimal_symmetric_example() {
        // Only (1,1) and (2,1) given: the mirrored (1,2) appears, (2,2) stays empty.
        let a = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2.0\n2 1 1.0\n")
            .unwrap();
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(1, 0), 1.0);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = parse("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.0\n1 1 2.0\n")
            .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.values(), &[3.0]);
    }

    #[test]
    fn upper_shift_matrix() {
        let a = parse("%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1.0\n2 3 1.0\n")
            .unwrap();
        assert_eq!(a.matvec(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(a.matvec(&[0.0, 1.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_unsupported_fields() {
        for field in ["complex", "pattern"] {
            let text = format!("%%MatrixMarket matrix coordinate {field} general\n1 1 1\n1 1 1\n");
            assert!(matches!(parse(&text), Err(Error::Format(_))), "{field}");
        }
        assert!(matches!(
            parse("%%MatrixMarket matrix array real general\n1 1\n1\n"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n"),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err =
            parse("%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 1.0\n2 x 1.0\n")
                .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let err =
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err =
            parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = read_matrix_market("/definitely/not/here.mtx").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/definitely/not/here.mtx"));
    }

    #[test]
    fn vector_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.mtx");
        let x = vec![0.1, -2.5e-300, 1.0 / 3.0, 7.0];
        write_vector(&path, &x).unwrap();
        let back = read_vector(&path).unwrap();
        assert_eq!(
            x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            back.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );

        let plain = dir.path().join("b.txt");
        std::fs::write(&plain, "1 2\n3\n").unwrap();
        assert_eq!(read_vector(&plain).unwrap(), vec![1.0, 2.0, 3.0]);
    }
}
