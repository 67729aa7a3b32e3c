//! Grid file formats.
//!
//! Text:
//!
//! ```text
//! CUBETOPO 1
//! dims NX NY NZ
//! order x-fastest
//! v0 v1 v2 ...
//! ```
//!
//! followed by `NX*NY*NZ` whitespace-separated decimal reals, x fastest.
//!
//! Raw: the same three header lines in a sidecar file named `<path>.hdr`; the
//! payload file holds the values as 32-bit little-endian floats, x fastest.
//! Raw storage narrows to `f32`, so it round-trips exactly only for grids whose
//! values are `f32`-representable.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

const MAGIC: &str = "CUBETOPO 1";
const ORDER: &str = "order x-fastest";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Text,
    Raw,
}

impl FromStr for GridFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(GridFormat::Text),
            "raw" => Ok(GridFormat::Raw),
            other => Err(Error::InvalidParams(format!("unknown grid format {other:?}"))),
        }
    }
}

impl GridFormat {
    /// Text if the file starts with the magic line, raw if a sidecar header exists.
    pub fn detect(path: &Path) -> Result<GridFormat> {
        let mut head = [0u8; 10];
        let n = {
            use std::io::Read;
            let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            f.read(&mut head).map_err(|e| Error::io(path, e))?
        };
        if n == MAGIC.len() && head[..] == *MAGIC.as_bytes() {
            return Ok(GridFormat::Text);
        }
        if header_path(path).exists() {
            return Ok(GridFormat::Raw);
        }
        Ok(GridFormat::Text)
    }
}

/// Sidecar header location for a raw payload.
pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

fn header_text(dims: [usize; 3]) -> String {
    format!("{MAGIC}\ndims {} {} {}\n{ORDER}\n", dims[0], dims[1], dims[2])
}

pub fn save_grid(grid: &ScalarGrid, path: &Path, format: GridFormat) -> Result<()> {
    match format {
        GridFormat::Text => {
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
                w.write_all(header_text(grid.dims()).as_bytes())?;
                for row in grid.values().chunks(grid.dims()[0]) {
                    let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                    writeln!(w, "{}", line.join(" "))?;
                }
                w.flush()
            };
            write(&mut w).map_err(|e| Error::io(path, e))
        }
        GridFormat::Raw => {
            let hdr = header_path(path);
            fs::write(&hdr, header_text(grid.dims())).map_err(|e| Error::io(&hdr, e))?;
            let mut bytes = Vec::with_capacity(grid.len() * 4);
            for &v in grid.values() {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
            fs::write(path, bytes).map_err(|e| Error::io(path, e))
        }
    }
}

pub fn load_grid(path: &Path, format: GridFormat) -> Result<ScalarGrid> {
    let grid = match format {
        GridFormat::Text => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_text(&text, path)?
        }
        GridFormat::Raw => {
            let hdr = header_path(path);
            let text = fs::read_to_string(&hdr).map_err(|e| Error::io(&hdr, e))?;
            let (dims, rest_line) = parse_header(&text, &hdr)?;
            if text.lines().skip(3).any(|l| !l.trim().is_empty()) {
                return Err(Error::parse(&hdr, rest_line, "unexpected content after header"));
            }
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            let expected = dims[0] * dims[1] * dims[2];
            if bytes.len() != expected * 4 {
                return Err(Error::DimsMismatch {
                    dims,
                    expected,
                    found: bytes.len() / 4,
                });
            }
            let values = bytes
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
                .collect();
            ScalarGrid::new(dims, values)?
        }
    };
    Ok(grid.with_meta(path.display().to_string()))
}

/// Parses the three header lines; returns the dims and the next line number.
fn parse_header(text: &str, path: &Path) -> Result<([usize; 3], usize)> {
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or("").trim();
    if magic != MAGIC {
        return Err(Error::parse(path, 1, format!("expected {MAGIC:?}, found {magic:?}")));
    }
    let dims_line = lines.next().unwrap_or("");
    let mut it = dims_line.split_whitespace();
    if it.next() != Some("dims") {
        return Err(Error::parse(path, 2, "expected `dims NX NY NZ`"));
    }
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        let tok = it
            .next()
            .ok_or_else(|| Error::parse(path, 2, "expected three dimensions"))?;
        *d = tok
            .parse()
            .map_err(|_| Error::parse(path, 2, format!("bad dimension {tok:?}")))?;
    }
    if it.next().is_some() {
        return Err(Error::parse(path, 2, "expected exactly three dimensions"));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDims(dims));
    }
    let order = lines.next().unwrap_or("").trim();
    if order != ORDER {
        return Err(Error::parse(path, 3, format!("expected {ORDER:?}, found {order:?}")));
    }
    Ok((dims, 4))
}

fn parse_text(text: &str, path: &Path) -> Result<ScalarGrid> {
    let (dims, first) = parse_header(text, path)?;
    let expected = dims[0] * dims[1] * dims[2];
    let mut values = Vec::with_capacity(expected);
    for (offset, line) in text.lines().skip(3).enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(path, first + offset, format!("bad value {tok:?}")))?;
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(Error::DimsMismatch {
            dims,
            expected,
            found: values.len(),
        });
    }
    ScalarGrid::new(dims, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScalarGrid {
        let vals = vec![0.5, -1.25, 3.0, 7.75, 0.125, 2.5, -0.0625, 100.0];
        ScalarGrid::new([2, 2, 2], vals).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        let g = sample();
        save_grid(&g, &p, GridFormat::Text).unwrap();
        let back = load_grid(&p, GridFormat::Text).unwrap();
        assert_eq!(back.dims(), g.dims());
        assert_eq!(back.values(), g.values());
    }

    #[test]
    fn text_round_trip_is_value_exact_for_f64() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        let g = ScalarGrid::new([3, 1, 1], vec![0.1, 1.0 / 3.0, -2.5e-300]).unwrap();
        save_grid(&g, &p, GridFormat::Text).unwrap();
        assert_eq!(load_grid(&p, GridFormat::Text).unwrap().values(), g.values());
    }

    #[test]
    fn raw_round_trip_and_cross_format() {
        let dir = tempfile::tempdir().unwrap();
        let raw = dir.path().join("g.raw");
        let txt = dir.path().join("g.txt");
        let g = sample();
        save_grid(&g, &raw, GridFormat::Raw).unwrap();
        save_grid(&g, &txt, GridFormat::Text).unwrap();
        let a = load_grid(&raw, GridFormat::Raw).unwrap();
        let b = load_grid(&txt, GridFormat::Text).unwrap();
        assert_eq!(a.values(), g.values());
        assert_eq!(a.values(), b.values());
        assert_eq!(GridFormat::detect(&raw).unwrap(), GridFormat::Raw);
        assert_eq!(GridFormat::detect(&txt).unwrap(), GridFormat::Text);
    }

    #[test]
    fn short_payload_is_dims_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        fs::write(&p, "CUBETOPO 1\ndims 2 2 2\norder x-fastest\n1 2 3 4 5 6 7\n").unwrap();
        match load_grid(&p, GridFormat::Text) {
            Err(Error::DimsMismatch {
                expected: 8, found: 7, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let raw = dir.path().join("g.raw");
        save_grid(&sample(), &raw, GridFormat::Raw).unwrap();
        fs::write(&raw, vec![0u8; 28]).unwrap();
        assert!(matches!(
            load_grid(&raw, GridFormat::Raw),
            Err(Error::DimsMismatch { found: 7, .. })
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        fs::write(&p, "CUBETOPO 1\ndims 2 1 1\norder x-fastest\n1\nfoo\n").unwrap();
        match load_grid(&p, GridFormat::Text) {
            Err(Error::Parse { line: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        fs::write(&p, "CUBETOPO 2\n").unwrap();
        assert!(matches!(
            load_grid(&p, GridFormat::Text),
            Err(Error::Parse { line: 1, .. })
        ));
        fs::write(&p, "CUBETOPO 1\ndims 2 x 1\n").unwrap();
        assert!(matches!(
            load_grid(&p, GridFormat::Text),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
