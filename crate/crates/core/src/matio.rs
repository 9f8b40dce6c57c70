//! Matrix file I/O and run-metadata rendering.
//!
//! Matrix files are JSON objects `{"n": int, "re": [[...]], "im": [[...]]}`
//! with row-major real/imaginary parts. The writer emits every real with
//! 17 significant digits, so write-then-read reproduces `f64` entries
//! bit-exactly.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::cmatrix::CMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

/// 17-significant-digit rendering (`f64` round-trip safe). Non-finite
/// values render as `inf`, `-inf`, `nan` — valid in CSV cells, and the
/// JSON writers quote them.
pub fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Render a real as a JSON value: a number when finite, a quoted string
/// otherwise (JSON has no infinities).
pub fn json_real(x: f64) -> String {
    if x.is_finite() {
        format_sig17(x)
    } else {
        format!("\"{}\"", format_sig17(x))
    }
}

/// Minimal JSON string escaping (quotes, backslashes, control bytes).
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[derive(Deserialize)]
struct MatrixFile {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Parse the matrix JSON schema into a raw complex matrix.
pub fn parse_cmatrix(text: &str) -> Result<CMatrix> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
    let n = file.n;
    if n == 0 {
        return Err(Error::Parse("matrix dimension must be >= 1".into()));
    }
    for (name, part) in [("re", &file.re), ("im", &file.im)] {
        if part.len() != n {
            return Err(Error::Parse(format!(
                "field {name:?} has {} rows, expected {n}",
                part.len()
            )));
        }
        if let Some(row) = part.iter().find(|row| row.len() != n) {
            return Err(Error::Parse(format!(
                "field {name:?} has a row of length {}, expected {n}",
                row.len()
            )));
        }
    }
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, Complex64::new(file.re[i][j], file.im[i][j]));
        }
    }
    Ok(m)
}

/// Render the matrix JSON schema with bit-exact reals.
pub fn matrix_to_json(m: &CMatrix) -> String {
    let n = m.n();
    let part = |pick: &dyn Fn(Complex64) -> f64| {
        let rows: Vec<String> = (0..n)
            .map(|i| {
                let cells: Vec<String> = (0..n).map(|j| format_sig17(pick(m.get(i, j)))).collect();
                format!("    [{}]", cells.join(", "))
            })
            .collect();
        rows.join(",\n")
    };
    format!(
        "{{\n  \"n\": {n},\n  \"re\": [\n{}\n  ],\n  \"im\": [\n{}\n  ]\n}}\n",
        part(&|z| z.re),
        part(&|z| z.im)
    )
}

/// Load a Hermitian matrix: parse, validate shape, then validate and
/// symmetrize through [`HermitianMatrix::new`].
pub fn read_matrix(path: &Path, tol: &Tolerances) -> Result<HermitianMatrix> {
    let text = std::fs::read_to_string(path)?;
    let m = parse_cmatrix(&text)?;
    HermitianMatrix::new(m, tol)
}

/// Write a matrix in the JSON schema (whole buffer in one call, so a
/// validation failure never leaves a partial file behind).
pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))?;
    Ok(())
}

/// Provenance attached to every emitted report: crate version, the full
/// argument vector, and the tolerance set in force.
pub struct RunMeta<'a> {
    pub version: &'a str,
    pub argv: &'a [String],
    pub tolerances: &'a Tolerances,
}

impl RunMeta<'_> {
    /// Single leading CSV comment line.
    pub fn comment_line(&self) -> String {
        format!(
            "# hurwitz {} | args: {} | tolerances: {}\n",
            self.version,
            self.argv.join(" "),
            self.tolerances.summary()
        )
    }

    /// The same provenance as a JSON object (JSON files cannot start with
    /// a comment line, so they embed a "meta" member instead).
    pub fn json_object(&self) -> String {
        let argv: Vec<String> = self
            .argv
            .iter()
            .map(|a| format!("\"{}\"", json_escape(a)))
            .collect();
        format!(
            "{{\"version\": \"{}\", \"argv\": [{}], \"tolerances\": \"{}\"}}",
            json_escape(self.version),
            argv.join(", "),
            json_escape(&self.tolerances.summary())
        )
    }
}

/// Write a fully assembled text report.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_phone, SampleKind};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sig17_round_trips_bits() {
        for x in [
            0.0,
            -0.0,
            1.0 / 3.0,
            0.1,
            1e-300,
            -2.5e300,
            std::f64::consts::PI * 1e10,
            f64::MIN_POSITIVE,
        ] {
            let s = format_sig17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_sig17(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_sig17(f64::INFINITY), "inf");
    }

    #[test]
    fn matrix_json_round_trip_is_bit_exact() {
        let t = tol();
        let p = sample_phone(4, 19, SampleKind::Wishart, &t).unwrap();
        let text = matrix_to_json(p.mat());
        let back = parse_cmatrix(&text).unwrap();
        assert_eq!(back.as_slice(), p.mat().as_slice());
        // and a second cycle is byte-identical
        assert_eq!(matrix_to_json(&back), text);
    }

    #[test]
    fn file_round_trip_through_hermitian_loader() {
        let t = tol();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let p = sample_phone(3, 29, SampleKind::DiagGap, &t).unwrap();
        write_matrix(&path, p.mat()).unwrap();
        let h = read_matrix(&path, &t).unwrap();
        // stored matrix is exactly Hermitian, so symmetrization is identity
        assert_eq!(h.mat().as_slice(), p.mat().as_slice());
    }

    #[test]
    fn parse_rejects_bad_shapes() {
        assert!(matches!(
            parse_cmatrix(r#"{"n": 2, "re": [[1.0]], "im": [[0.0, 0.0],[0.0, 0.0]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_cmatrix(r#"{"n": 0, "re": [], "im": []}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_cmatrix("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn loader_rejects_non_hermitian_file() {
        let t = tol();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"n": 2, "re": [[1.0, 0.5],[0.0, 1.0]], "im": [[0.0,0.0],[0.0,0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(
            read_matrix(&path, &t),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let t = tol();
        assert!(matches!(
            read_matrix(Path::new("/nonexistent/m.json"), &t),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn meta_rendering() {
        let t = tol();
        let argv = vec!["trace".to_string(), "--m".to_string(), "4".to_string()];
        let meta = RunMeta {
            version: "0.1.0",
            argv: &argv,
            tolerances: &t,
        };
        let line = meta.comment_line();
        assert!(line.starts_with("# hurwitz 0.1.0 | args: trace --m 4 | tolerances: "));
        assert!(line.ends_with('\n'));
        let json = meta.json_object();
        assert!(json.contains("\"version\": \"0.1.0\""));
        assert!(json.contains("\"trace\", \"--m\", \"4\""));
        // escaping
        assert_eq!(json_escape("a\"b\\c\nd"), "a\\\"b\\\\c\\nd");
    }

    #[test]
    fn json_real_quotes_non_finite() {
        assert_eq!(json_real(f64::NEG_INFINITY), "\"-inf\"");
        assert!(json_real(1.5).starts_with("1.5"));
    }
}
