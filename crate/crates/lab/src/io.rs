//! File formats: point sets (CSV and JSON lines), complexes (one simplex per
//! line with hexadecimal weights), persistence diagrams (CSV) and MSA
//! results (JSON). Text outputs start with a `# acycle <version> {params}`
//! line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use acycle_core::complex::{ComplexError, FilteredComplex, Simplex};
use acycle_core::geometry::{GeometryError, Point, PointSet};
use acycle_core::persistence::PersistencePairing;
use acycle_core::MsaResult;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn parse_err(line: u64, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Header line embedding the artifact version and run parameters.
pub fn header(params: &Value) -> String {
    format!("# acycle {VERSION} {params}")
}

/// Parameters recorded in a header line, if `line` is one.
pub fn parse_header(line: &str) -> Option<(String, Value)> {
    let rest = line.strip_prefix("# acycle ")?;
    let (version, json) = rest.split_once(' ')?;
    Some((version.to_string(), serde_json::from_str(json).ok()?))
}

// ---------------------------------------------------------------- floats

/// Hexadecimal encoding of a finite `f64`, e.g. `0x1.8p-1` for 0.75.
pub fn format_hex(x: f64) -> String {
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mant = bits & ((1 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let frac = format!("{mant:013x}");
    let frac = frac.trim_end_matches('0');
    let dot = if frac.is_empty() { "" } else { "." };
    format!("{sign}0x{lead}{dot}{frac}p{e:+}")
}

/// Inverse of [`format_hex`]; plain decimal literals are accepted as well.
pub fn parse_float(s: &str) -> Option<f64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) else {
        return s.parse().ok();
    };
    let (digits, exp) = hex.split_once(['p', 'P'])?;
    let exp: i32 = exp.parse().ok()?;
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() || int.len() + frac.len() > 14 {
        return None;
    }
    let mut m: u64 = 0;
    for c in int.chars().chain(frac.chars()) {
        m = m * 16 + c.to_digit(16)? as u64;
    }
    if m >= 1 << 53 {
        return None;
    }
    let v = libm::ldexp(m as f64, exp - 4 * frac.len() as i32);
    Some(if neg { -v } else { v })
}

// ---------------------------------------------------------------- points

#[derive(Serialize, Deserialize)]
struct PointLine {
    id: u32,
    coords: Vec<f64>,
}

/// Reads `id,x,y` or `id,x,y,z` rows; the header decides the dimension.
/// Lines starting with `#` are skipped.
pub fn read_points_csv<R: Read>(reader: R) -> Result<PointSet, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(&e))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let dim = match names.as_slice() {
        ["id", "x", "y"] => 2,
        ["id", "x", "y", "z"] => 3,
        _ => return Err(parse_err(1, format!("expected header id,x,y[,z], found {}", names.join(",")))),
    };
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = rec[0]
            .parse::<u32>()
            .map_err(|_| parse_err(line, format!("bad id {:?}", &rec[0])))?;
        let coords = (1..=dim)
            .map(|i| parse_float(&rec[i]).ok_or_else(|| parse_err(line, format!("bad coordinate {:?}", &rec[i]))))
            .collect::<Result<Vec<f64>, _>>()?;
        points.push(Point::from_slice(id, &coords).map_err(|e| parse_err(line, e.to_string()))?);
    }
    Ok(PointSet::new(dim, points)?)
}

fn csv_err(e: &csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(line, e.to_string())
}

/// Reads one `{"id": .., "coords": [..]}` object per line. Without points
/// the dimension comes from a `dim` header parameter, else 2.
pub fn read_points_jsonl<R: BufRead>(reader: R) -> Result<PointSet, IoError> {
    let mut points = Vec::new();
    let mut dim = None;
    let mut header_dim = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i as u64 + 1;
        let t = line.trim();
        if let Some((_, params)) = parse_header(t) {
            header_dim = params.get("dim").and_then(Value::as_u64).map(|d| d as usize);
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let p: PointLine = serde_json::from_str(t).map_err(|e| parse_err(n, e.to_string()))?;
        if *dim.get_or_insert(p.coords.len()) != p.coords.len() {
            return Err(parse_err(n, "points of different dimensions"));
        }
        points.push(Point::from_slice(p.id, &p.coords).map_err(|e| parse_err(n, e.to_string()))?);
    }
    Ok(PointSet::new(dim.or(header_dim).unwrap_or(2), points)?)
}

/// Reads a point file, choosing JSON lines for `.jsonl` and CSV otherwise.
pub fn read_points_path(path: &Path) -> Result<PointSet, IoError> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "jsonl") {
        read_points_jsonl(BufReader::new(file))
    } else {
        read_points_csv(file)
    }
}

fn coords_of(points: &PointSet, p: &Point) -> Vec<f64> {
    p.coords[..points.dim()].to_vec()
}

/// Points as CSV, ordered by id, after a header line.
pub fn write_points_csv<W: Write>(mut w: W, points: &PointSet, params: &Value) -> Result<(), IoError> {
    writeln!(w, "{}", header(params))?;
    writeln!(w, "{}", if points.dim() == 2 { "id,x,y" } else { "id,x,y,z" })?;
    for p in points.points() {
        let c: Vec<String> = coords_of(points, p).iter().map(f64::to_string).collect();
        writeln!(w, "{},{}", p.id, c.join(","))?;
    }
    Ok(())
}

/// Points as JSON lines after a header line recording `dim`.
pub fn write_points_jsonl<W: Write>(mut w: W, points: &PointSet, params: &Value) -> Result<(), IoError> {
    let mut params = params.clone();
    if let Value::Object(m) = &mut params {
        m.insert("dim".into(), points.dim().into());
    }
    writeln!(w, "{}", header(&params))?;
    for p in points.points() {
        let line = PointLine {
            id: p.id,
            coords: coords_of(points, p),
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- complexes

/// One simplex per line, `v0 v1 ... vk <weight>`, in filtration order.
pub fn write_complex<W: Write>(mut w: W, complex: &FilteredComplex, params: &Value) -> Result<(), IoError> {
    writeln!(w, "{}", header(params))?;
    for (s, x) in complex.iter() {
        for v in s.vertices() {
            write!(w, "{v} ")?;
        }
        writeln!(w, "{}", format_hex(x))?;
    }
    Ok(())
}

pub fn read_complex<R: BufRead>(reader: R) -> Result<FilteredComplex, IoError> {
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i as u64 + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(parse_err(n, "expected vertex ids followed by a weight"));
        }
        let (verts, w) = fields.split_at(fields.len() - 1);
        let w = parse_float(w[0]).ok_or_else(|| parse_err(n, format!("bad weight {:?}", w[0])))?;
        let ids = verts
            .iter()
            .map(|v| v.parse::<u32>().map_err(|_| parse_err(n, format!("bad vertex id {v:?}"))))
            .collect::<Result<Vec<u32>, _>>()?;
        let s = Simplex::new(ids).ok_or_else(|| parse_err(n, "repeated vertex in simplex"))?;
        entries.push((s, w));
    }
    Ok(FilteredComplex::new(entries)?)
}

pub fn read_complex_path(path: &Path) -> Result<FilteredComplex, IoError> {
    read_complex(BufReader::new(File::open(path)?))
}

fn simplex_label(s: &Simplex) -> String {
    let v: Vec<String> = s.vertices().iter().map(u32::to_string).collect();
    v.join(" ")
}

// ---------------------------------------------------------------- diagrams

/// Diagram rows `k,birth,death,birth_simplex,death_simplex` for each degree
/// in `degrees`.
pub fn write_diagrams<W: Write>(
    w: W,
    complex: &FilteredComplex,
    pairing: &PersistencePairing,
    degrees: &[usize],
    params: &Value,
) -> Result<(), IoError> {
    let mut w = w;
    writeln!(w, "{}", header(params))?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "birth", "death", "birth_simplex", "death_simplex"])
        .map_err(io::Error::from)?;
    for &k in degrees {
        for iv in pairing.diagram(k).intervals {
            out.write_record([
                k.to_string(),
                iv.birth.to_string(),
                iv.death.to_string(),
                simplex_label(complex.simplex(iv.birth_index as usize)),
                simplex_label(complex.simplex(iv.death_index as usize)),
            ])
            .map_err(io::Error::from)?;
        }
    }
    out.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- MSA

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsaJson {
    pub header: Header,
    pub k: usize,
    pub p: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub msa_size: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub msa_simplices: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub acycle: String,
    pub params: Value,
}

impl Header {
    pub fn new(params: Value) -> Self {
        Header {
            acycle: VERSION.to_string(),
            params,
        }
    }
}

impl MsaJson {
    pub fn new(r: &MsaResult, with_simplices: bool, params: Value) -> Self {
        MsaJson {
            header: Header::new(params),
            k: r.k,
            p: r.p,
            m: r.m,
            b: r.b,
            l: r.l,
            msa_size: r.msa_size(),
            msa_simplices: with_simplices.then(|| r.msa.iter().map(|s| s.vertices().to_vec()).collect()),
        }
    }
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn hex_floats() {
        assert_eq!(format_hex(0.75), "0x1.8p-1");
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(0.0), "0x0p+0");
        assert_eq!(format_hex(-2.5), "-0x1.4p+1");
        for x in [0.1, 1.0 / 3.0, 5e-324, f64::MAX, f64::MIN_POSITIVE, 123456.789, -0.0] {
            assert_eq!(parse_float(&format_hex(x)).unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(parse_float("0.5"), Some(0.5));
        assert_eq!(parse_float("0x1.8"), None);
        assert_eq!(parse_float("0xzp0"), None);
    }

    #[test]
    fn headers_round_trip() {
        let h = header(&json!({"seed": 3}));
        assert_eq!(parse_header(&h), Some((VERSION.to_string(), json!({"seed": 3}))));
        assert_eq!(parse_header("id,x,y"), None);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = read_points_csv("# c\nid,x,y\n0,0,0\n1,zz,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 4, .. }), "{err}");
        let err = read_points_csv("id,x\n0,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
        let err = read_complex("0 0x0p+0\n0 1 oops\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }));
    }
}
