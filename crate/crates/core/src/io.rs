//! File formats: frequency lists, sample vectors, coefficient grids, weights
//! and evaluations.
//!
//! Binary files start with a four-byte magic, a `u32` version (1) and a
//! `u32` dimension, all little-endian. Text files are CSV with a header line.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::coefficients::CoefficientGrid;
use crate::error::{Error, Result};
use crate::sampling::SamplingSet;
use crate::wavelet::{Family, ReconstructionEvaluation};

pub const FREQ_MAGIC: &[u8; 4] = b"GSFQ";
pub const SAMPLE_MAGIC: &[u8; 4] = b"GSSM";
pub const COEFF_MAGIC: &[u8; 4] = b"GSCF";
pub const VERSION: u32 = 1;

/// Hard limit on element counts announced by binary headers.
const MAX_ELEMENTS: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Binary,
}

impl Format {
    /// `.csv` and `.txt` are text; everything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") | Some("txt") => Format::Csv,
            _ => Format::Binary,
        }
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| format_err("truncated file"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Exactly `count` little-endian doubles, then end of input.
    fn f64s_to_end(&mut self, count: u64) -> Result<Vec<f64>> {
        let bytes = count.checked_mul(8).ok_or_else(|| format_err("element count overflows"))?;
        let remaining = (self.buf.len() - self.pos) as u64;
        if remaining != bytes {
            return Err(format_err(format!("expected {bytes} payload bytes, found {remaining}")));
        }
        let out = self.take(bytes as usize)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(out)
    }
}

fn header(reader: &mut Reader, magic: &[u8; 4]) -> Result<u32> {
    let m = reader.take(4)?;
    if m != magic {
        return Err(format_err(format!("bad magic, expected {}", String::from_utf8_lossy(magic))));
    }
    let version = reader.u32()?;
    if version != VERSION {
        return Err(format_err(format!("unsupported version {version}")));
    }
    reader.u32()
}

fn write_header(out: &mut Vec<u8>, magic: &[u8; 4], dim: u32) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
}

fn text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|_| format_err("text file is not UTF-8"))
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| format_err(format!("line {line}: cannot parse `{}`", field.trim())))?;
    if !v.is_finite() {
        return Err(format_err(format!("line {line}: non-finite value")));
    }
    Ok(v)
}

/// Data lines of a CSV file after checking its header.
fn csv_rows<'a>(s: &'a str, headers: &[&[&str]]) -> Result<(usize, Vec<(usize, Vec<&'a str>)>)> {
    let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| format_err("empty file"))?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    let which = headers
        .iter()
        .position(|h| *h == cols.as_slice())
        .ok_or_else(|| format_err(format!("unexpected header `{head}`")))?;
    let width = headers[which].len();
    let rows = lines
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != width {
                return Err(format_err(format!("line {}: expected {width} fields, found {}", i + 1, f.len())));
            }
            Ok((i + 1, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((which, rows))
}

// ---- frequencies ----

pub fn parse_frequencies(bytes: &[u8]) -> Result<SamplingSet> {
    if bytes.starts_with(FREQ_MAGIC) {
        let mut r = Reader::new(bytes);
        let dim = header(&mut r, FREQ_MAGIC)?;
        if dim != 1 && dim != 2 {
            return Err(format_err(format!("dimension {dim} is not 1 or 2")));
        }
        let count = r.u64()?;
        if count == 0 || count > MAX_ELEMENTS {
            return Err(format_err(format!("invalid point count {count}")));
        }
        let coords = r.f64s_to_end(count * dim as u64)?;
        return SamplingSet::new(dim as usize, coords).map_err(|e| format_err(e.to_string()));
    }
    let (which, rows) = csv_rows(text(bytes)?, &[&["xi_x"], &["xi_x", "xi_y"]])?;
    let coords = rows
        .iter()
        .flat_map(|(line, f)| f.iter().map(move |x| parse_float(x, *line)))
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(format_err("no frequency points"));
    }
    SamplingSet::new(which + 1, coords).map_err(|e| format_err(e.to_string()))
}

pub fn encode_frequencies(set: &SamplingSet, format: Format) -> Vec<u8> {
    match format {
        Format::Binary => {
            let mut out = Vec::with_capacity(20 + 8 * set.coords().len());
            write_header(&mut out, FREQ_MAGIC, set.dim() as u32);
            out.extend_from_slice(&(set.len() as u64).to_le_bytes());
            for v in set.coords() {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
        Format::Csv => {
            let mut s = String::from(if set.dim() == 1 { "xi_x\n" } else { "xi_x,xi_y\n" });
            for p in set.coords().chunks(set.dim()) {
                let fields: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s.into_bytes()
        }
    }
}

pub fn read_frequencies(path: &Path) -> Result<SamplingSet> {
    parse_frequencies(&fs::read(path)?)
}

pub fn write_frequencies(path: &Path, set: &SamplingSet, format: Format) -> Result<()> {
    Ok(fs::write(path, encode_frequencies(set, format))?)
}

// ---- samples ----

pub fn parse_samples(bytes: &[u8]) -> Result<Vec<Complex64>> {
    if bytes.starts_with(SAMPLE_MAGIC) {
        let mut r = Reader::new(bytes);
        let dim = header(&mut r, SAMPLE_MAGIC)?;
        if dim != 1 {
            return Err(format_err(format!("sample files are one-dimensional, found dimension {dim}")));
        }
        let count = r.u64()?;
        if count > MAX_ELEMENTS {
            return Err(format_err(format!("invalid sample count {count}")));
        }
        let v = r.f64s_to_end(2 * count)?;
        return Ok(v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect());
    }
    let (_, rows) = csv_rows(text(bytes)?, &[&["re", "im"]])?;
    rows.iter()
        .map(|(line, f)| Ok(Complex64::new(parse_float(f[0], *line)?, parse_float(f[1], *line)?)))
        .collect()
}

pub fn encode_samples(samples: &[Complex64], format: Format) -> Vec<u8> {
    match format {
        Format::Binary => {
            let mut out = Vec::with_capacity(20 + 16 * samples.len());
            write_header(&mut out, SAMPLE_MAGIC, 1);
            out.extend_from_slice(&(samples.len() as u64).to_le_bytes());
            for v in samples {
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
            out
        }
        Format::Csv => {
            let mut s = String::from("re,im\n");
            for v in samples {
                s.push_str(&format!("{},{}\n", v.re, v.im));
            }
            s.into_bytes()
        }
    }
}

pub fn read_samples(path: &Path) -> Result<Vec<Complex64>> {
    parse_samples(&fs::read(path)?)
}

pub fn write_samples(path: &Path, samples: &[Complex64], format: Format) -> Result<()> {
    Ok(fs::write(path, encode_samples(samples, format))?)
}

// ---- coefficients ----

/// Layout: magic, version, dim, family tag (`u8`, 0 for Haar and `p` for
/// db`p`), `J` (`u32`), then `2^(J dim)` interleaved complex values.
pub fn parse_coefficients(bytes: &[u8]) -> Result<CoefficientGrid> {
    let mut r = Reader::new(bytes);
    let dim = header(&mut r, COEFF_MAGIC)?;
    if dim != 1 && dim != 2 {
        return Err(format_err(format!("dimension {dim} is not 1 or 2")));
    }
    let family = Family::from_tag(r.u8()?).map_err(|e| format_err(e.to_string()))?;
    let j = r.u32()?;
    if j as u64 * dim as u64 > 31 {
        return Err(format_err(format!("scale J = {j} is too large")));
    }
    let count = 1u64 << (j * dim);
    let v = r.f64s_to_end(2 * count)?;
    let values = v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    CoefficientGrid::new(dim as usize, family, j, values).map_err(|e| format_err(e.to_string()))
}

pub fn encode_coefficients(grid: &CoefficientGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(17 + 16 * grid.values.len());
    write_header(&mut out, COEFF_MAGIC, grid.dim as u32);
    out.push(grid.family.tag());
    out.extend_from_slice(&grid.j.to_le_bytes());
    for v in &grid.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn read_coefficients(path: &Path) -> Result<CoefficientGrid> {
    parse_coefficients(&fs::read(path)?)
}

pub fn write_coefficients(path: &Path, grid: &CoefficientGrid) -> Result<()> {
    Ok(fs::write(path, encode_coefficients(grid))?)
}

// ---- weights ----

pub fn encode_weights(mu: &[f64]) -> Vec<u8> {
    let mut s = String::from("mu\n");
    for v in mu {
        s.push_str(&format!("{v}\n"));
    }
    s.into_bytes()
}

pub fn parse_weights(bytes: &[u8]) -> Result<Vec<f64>> {
    let (_, rows) = csv_rows(text(bytes)?, &[&["mu"]])?;
    rows.iter().map(|(line, f)| parse_float(f[0], *line)).collect()
}

pub fn read_weights(path: &Path) -> Result<Vec<f64>> {
    parse_weights(&fs::read(path)?)
}

pub fn write_weights(path: &Path, mu: &[f64]) -> Result<()> {
    Ok(fs::write(path, encode_weights(mu))?)
}

// ---- evaluations ----

/// `x,value` lines of a 1D evaluation.
pub fn encode_evaluation_csv(ev: &ReconstructionEvaluation) -> Vec<u8> {
    let mut s = String::from("x,value\n");
    for (x, v) in ev.points().iter().zip(&ev.values) {
        s.push_str(&format!("{x},{v}\n"));
    }
    s.into_bytes()
}

pub fn parse_evaluation_csv(bytes: &[u8]) -> Result<Vec<(f64, f64)>> {
    let (_, rows) = csv_rows(text(bytes)?, &[&["x", "value"]])?;
    rows.iter().map(|(line, f)| Ok((parse_float(f[0], *line)?, parse_float(f[1], *line)?))).collect()
}

/// A 16-bit raster with the affine map back to real values.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    pub pixels: Vec<u16>,
}

impl Pgm {
    /// Row-major values (`width` per row) mapped affinely onto `0..=65535`.
    pub fn from_values(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::Shape { expected: width * height, actual: values.len() });
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::Domain("raster values must be finite".into()));
        }
        let span = max - min;
        let pixels = values
            .iter()
            .map(|v| if span > 0.0 { ((v - min) / span * 65535.0).round() as u16 } else { 0 })
            .collect();
        Ok(Self { width, height, min, max, pixels })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        self.pixels.iter().map(|&p| self.min + span * p as f64 / 65535.0).collect()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n# min={} max={}\n{} {}\n65535\n", self.min, self.max, self.width, self.height).into_bytes();
        for p in &self.pixels {
            out.extend_from_slice(&p.to_be_bytes());
        }
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let mut tokens: Vec<&str> = Vec::new();
        let mut range: Option<(f64, f64)> = None;
        while tokens.len() < 4 {
            // skip whitespace
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos >= bytes.len() {
                return Err(format_err("truncated PGM header"));
            }
            if bytes[pos] == b'#' {
                let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
                let comment = text(&bytes[pos + 1..end])?;
                if let Some(r) = parse_range(comment) {
                    range = Some(r);
                }
                pos = end;
                continue;
            }
            let end = bytes[pos..].iter().position(|b| b.is_ascii_whitespace() || *b == b'#').map_or(bytes.len(), |e| pos + e);
            tokens.push(text(&bytes[pos..end])?);
            pos = end;
        }
        if tokens[0] != "P5" {
            return Err(format_err("not a binary PGM (P5)"));
        }
        let dim = |t: &str| t.parse::<usize>().map_err(|_| format_err(format!("bad PGM field `{t}`")));
        let (width, height, maxval) = (dim(tokens[1])?, dim(tokens[2])?, dim(tokens[3])?);
        if maxval != 65535 {
            return Err(format_err(format!("expected a 16-bit PGM, found maxval {maxval}")));
        }
        if width == 0 || height == 0 {
            return Err(format_err("empty PGM raster"));
        }
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(format_err("truncated PGM header"));
        }
        pos += 1;
        let n = width.checked_mul(height).filter(|n| *n <= MAX_ELEMENTS as usize).ok_or_else(|| format_err("PGM too large"))?;
        let data = &bytes[pos..];
        if data.len() != 2 * n {
            return Err(format_err(format!("expected {} raster bytes, found {}", 2 * n, data.len())));
        }
        let (min, max) = range.ok_or_else(|| format_err("PGM comment with min/max is missing"))?;
        if !(min <= max) || !min.is_finite() || !max.is_finite() {
            return Err(format_err("invalid PGM value range"));
        }
        let pixels = data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        Ok(Self { width, height, min, max, pixels })
    }
}

fn parse_range(comment: &str) -> Option<(f64, f64)> {
    let mut min = None;
    let mut max = None;
    for part in comment.split_whitespace() {
        if let Some(v) = part.strip_prefix("min=") {
            min = v.parse().ok();
        } else if let Some(v) = part.strip_prefix("max=") {
            max = v.parse().ok();
        }
    }
    Some((min?, max?))
}

/// Writes a 1D evaluation as CSV and a 2D one as a PGM raster with `y`
/// increasing downwards.
pub fn write_evaluation(path: &Path, ev: &ReconstructionEvaluation) -> Result<()> {
    let bytes = if ev.dim == 1 {
        encode_evaluation_csv(ev)
    } else {
        let g = ev.side_len();
        Pgm::from_values(g, g, &ev.values)?.encode()
    };
    Ok(fs::write(path, bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(v: &[f64]) -> Vec<u64> {
        v.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn frequency_round_trips() {
        let s1 = SamplingSet::one_d(vec![-32.0, 0.1, 1.0 / 3.0, 1e-300, 7.5e12]).unwrap();
        let s2 = SamplingSet::two_d(&[[0.1, -0.2], [std::f64::consts::PI, 2.0]]).unwrap();
        for s in [s1, s2] {
            for f in [Format::Csv, Format::Binary] {
                let back = parse_frequencies(&encode_frequencies(&s, f)).unwrap();
                assert_eq!(back.dim(), s.dim());
                assert_eq!(bits(back.coords()), bits(s.coords()));
            }
        }
    }

    #[test]
    fn sample_and_coefficient_round_trips() {
        let v = vec![Complex64::new(0.1, -1.0 / 7.0), Complex64::new(-0.0, 1e-310)];
        for f in [Format::Csv, Format::Binary] {
            let back = parse_samples(&encode_samples(&v, f)).unwrap();
            assert_eq!(back.len(), 2);
            for (a, b) in back.iter().zip(&v) {
                assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
            }
        }
        let values = (0..16).map(|i| Complex64::new(i as f64 / 3.0, -(i as f64).sqrt())).collect();
        let g = CoefficientGrid::new(2, Family::Daubechies(2), 2, values).unwrap();
        assert_eq!(parse_coefficients(&encode_coefficients(&g)).unwrap(), g);
        let h = CoefficientGrid::zeros(1, Family::Haar, 5).unwrap();
        let enc = encode_coefficients(&h);
        assert_eq!(enc[12], 0);
        assert_eq!(parse_coefficients(&enc).unwrap(), h);
    }

    #[test]
    fn weights_and_evaluations_round_trip() {
        let mu = vec![0.375, 0.25, 1.0 / 3.0];
        assert_eq!(parse_weights(&encode_weights(&mu)).unwrap(), mu);
        let ev = ReconstructionEvaluation { dim: 1, resolution: 2, values: vec![0.1, 0.2, 0.3, 0.4, 1.0 / 3.0] };
        let back = parse_evaluation_csv(&encode_evaluation_csv(&ev)).unwrap();
        assert_eq!(back[1], (-0.25, 0.2));
        assert_eq!(back[4].1, 1.0 / 3.0);
    }

    #[test]
    fn pgm_round_trip() {
        let vals: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let p = Pgm::from_values(4, 3, &vals).unwrap();
        let back = Pgm::parse(&p.encode()).unwrap();
        assert_eq!(back, p);
        for (a, b) in back.values().iter().zip(&vals) {
            assert!((a - b).abs() <= (p.max - p.min) / 65535.0);
        }
        assert_eq!(*p.pixels.iter().max().unwrap(), 65535);
        assert_eq!(*p.pixels.iter().min().unwrap(), 0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_frequencies(b""), Err(Error::Format(_))));
        assert!(matches!(parse_frequencies(b"xi\n1\n"), Err(Error::Format(_))));
        assert!(matches!(parse_frequencies(b"xi_x\nabc\n"), Err(Error::Format(_))));
        assert!(matches!(parse_frequencies(b"xi_x,xi_y\n1\n"), Err(Error::Format(_))));
        assert!(matches!(parse_frequencies(b"xi_x\nnan\n"), Err(Error::Format(_))));
        let mut bin = encode_frequencies(&SamplingSet::one_d(vec![1.0, 2.0]).unwrap(), Format::Binary);
        bin.pop();
        assert!(matches!(parse_frequencies(&bin), Err(Error::Format(_))));
        let mut bad_version = encode_samples(&[Complex64::default()], Format::Binary);
        bad_version[4] = 9;
        assert!(matches!(parse_samples(&bad_version), Err(Error::Format(_))));
        let mut coeff = encode_coefficients(&CoefficientGrid::zeros(1, Family::Haar, 2).unwrap());
        coeff[12] = 11;
        assert!(matches!(parse_coefficients(&coeff), Err(Error::Format(_))));
        assert!(matches!(Pgm::parse(b"P5\n2 2\n65535\n\0\0\0\0\0\0\0\0"), Err(Error::Format(_))));
        assert!(matches!(Pgm::parse(b"P2\n# min=0 max=1\n1 1\n65535\n\0\0"), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn csv_frequencies_are_lossless(v in proptest::collection::vec(-1e6f64..1e6, 1..50)) {
            let s = SamplingSet::one_d(v).unwrap();
            let back = parse_frequencies(&encode_frequencies(&s, Format::Csv)).unwrap();
            prop_assert_eq!(bits(back.coords()), bits(s.coords()));
        }

        #[test]
        fn parsers_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = parse_frequencies(&bytes);
            let _ = parse_samples(&bytes);
            let _ = parse_coefficients(&bytes);
            let _ = Pgm::parse(&bytes);
        }
    }
}
