//! Text matrix files.
//!
//! ```text
//! # complex 2 2
//! 1.5-2i 0
//! 0 1e-3+0.25i
//! ```
//!
//! The header names the kind and the dimensions; every following non-comment
//! line is one row. Complex literals are `re[±imi]` with no inner whitespace.
//! Lines after the header that start with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use ginv::{ComplexMatrix, C64};
use thiserror::Error;

/// Digits after the decimal point in scientific notation; 16 gives the
/// 17 significant digits that round-trip every `f64`.
pub const FULL_PRECISION: usize = 17;

#[derive(Debug, Error)]
pub enum MatFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Complex,
}

fn syntax(line: usize, msg: impl Into<String>) -> MatFileError {
    MatFileError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses `re`, `re+imi` or `re-imi`.
pub fn parse_entry(token: &str) -> Option<C64> {
    let Some(body) = token.strip_suffix('i') else {
        return parse_real(token).map(|re| C64::new(re, 0.0));
    };
    // the sign separating the parts is the last one not opening the literal
    // and not belonging to an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'))?;
    let re = parse_real(&body[..split])?;
    let im = parse_real(&body[split..])?;
    Some(C64::new(re, im))
}

pub fn parse(text: &str) -> Result<ComplexMatrix, MatFileError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| syntax(1, "empty file"))?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .map(|h| h.split_whitespace().collect())
        .unwrap_or_default();
    let [kind, rows, cols] = fields[..] else {
        return Err(syntax(hline, "expected header `# <real|complex> <rows> <cols>`"));
    };
    let kind = match kind {
        "real" => Kind::Real,
        "complex" => Kind::Complex,
        other => return Err(syntax(hline, format!("unknown kind `{other}`"))),
    };
    let dim = |s: &str| -> Result<usize, MatFileError> {
        match s.parse::<usize>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(syntax(hline, format!("invalid dimension `{s}`"))),
        }
    };
    let (rows, cols) = (dim(rows)?, dim(cols)?);

    let mut entries = Vec::with_capacity(rows * cols);
    let mut row_count = 0;
    for (lno, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        row_count += 1;
        if row_count > rows {
            return Err(syntax(lno, format!("more than {rows} rows")));
        }
        let before = entries.len();
        for tok in line.split_whitespace() {
            let z = parse_entry(tok).ok_or_else(|| syntax(lno, format!("bad entry `{tok}`")))?;
            if kind == Kind::Real && z.im != 0.0 {
                return Err(syntax(lno, format!("complex entry `{tok}` in a real matrix")));
            }
            entries.push(z);
        }
        if entries.len() - before != cols {
            return Err(syntax(
                lno,
                format!("expected {cols} entries, found {}", entries.len() - before),
            ));
        }
    }
    if row_count != rows {
        return Err(syntax(
            text.lines().count().max(1),
            format!("expected {rows} rows, found {row_count}"),
        ));
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, &entries))
}

pub fn read(path: &Path) -> Result<ComplexMatrix, MatFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| MatFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text).map_err(|e| match e {
        MatFileError::Syntax { line, msg } => MatFileError::Syntax {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn fmt_real(out: &mut String, v: f64, digits: usize) {
    // `{:.N$e}` prints N digits after the point, i.e. N + 1 significant ones
    let _ = write!(out, "{:.*e}", digits.saturating_sub(1), v);
}

/// Writes `m` with `digits` significant digits (1..=17). Real kind is used
/// when every imaginary part is exactly zero.
pub fn write(m: &ComplexMatrix, digits: usize) -> String {
    let digits = digits.clamp(1, FULL_PRECISION);
    let real = m.iter().all(|z| z.im == 0.0);
    let mut out = format!(
        "# {} {} {}\n",
        if real { "real" } else { "complex" },
        m.nrows(),
        m.ncols()
    );
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let z = m[(i, j)];
            fmt_real(&mut out, z.re, digits);
            if !real {
                out.push(if z.im.is_sign_negative() { '-' } else { '+' });
                fmt_real(&mut out, z.im.abs(), digits);
                out.push('i');
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, m: &ComplexMatrix) -> Result<(), MatFileError> {
    std::fs::write(path, write(m, FULL_PRECISION)).map_err(|source| MatFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
