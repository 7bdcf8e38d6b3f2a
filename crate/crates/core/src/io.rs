//! File formats: signal and phase-plane CSV, `TFLO` operator dumps, spectrum
//! CSV, frame manifests with `TFAT` atom sidecars, and certificate JSON.
//!
//! Floats are written in Rust's shortest round-trip form.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Atom, EigenFrame, FrameCertificate};
use crate::linalg::CMatrix;
use crate::locop::Spectrum;
use crate::signal::Signal;
use crate::stft::PhasePlaneArray;

pub const OPERATOR_MAGIC: &[u8; 4] = b"TFLO";
pub const ATOMS_MAGIC: &[u8; 4] = b"TFAT";

/// Largest `L` accepted from binary headers; keeps `L^2` allocations sane.
pub const MAX_BINARY_LEN: usize = 1 << 14;

fn float(v: f64) -> String {
    format!("{v:?}")
}

fn parse_float(field: &str, what: &'static str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(what, format!("line {line}: bad number {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(what, format!("line {line}: non-finite value")));
    }
    Ok(v)
}

/// `t,re,im` header followed by one row per sample.
pub fn signal_to_csv(f: &Signal) -> String {
    let mut out = String::from("t,re,im\n");
    for (t, z) in f.samples().iter().enumerate() {
        let _ = writeln!(out, "{t},{},{}", float(z.re), float(z.im));
    }
    out
}

/// Rows must list `t = 0, 1, ..., L-1` in order.
pub fn signal_from_csv(text: &str) -> Result<Signal> {
    const WHAT: &str = "signal csv";
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "t,re,im" => {}
        _ => return Err(Error::parse(WHAT, "expected header `t,re,im`")),
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                WHAT,
                format!("line {lineno}: expected 3 fields"),
            ));
        }
        let t: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(WHAT, format!("line {lineno}: bad index {:?}", fields[0])))?;
        if t != samples.len() {
            return Err(Error::parse(
                WHAT,
                format!("line {lineno}: expected t = {}, found {t}", samples.len()),
            ));
        }
        let re = parse_float(fields[1], WHAT, lineno)?;
        let im = parse_float(fields[2], WHAT, lineno)?;
        samples.push(Complex64::new(re, im));
    }
    if samples.is_empty() {
        return Err(Error::parse(WHAT, "no samples"));
    }
    Signal::new(samples)
}

/// `x,xi,re,im`, rows in `(x, xi)` row-major order.
pub fn phase_plane_to_csv(v: &PhasePlaneArray) -> String {
    let mut out = String::from("x,xi,re,im\n");
    for p in v.grid().points() {
        let z = v.get(p);
        let _ = writeln!(out, "{},{},{},{}", p.x, p.xi, float(z.re), float(z.im));
    }
    out
}

/// `TFLO`, little-endian `u32 L`, then `L^2` `(re, im)` f64 pairs row-major.
pub fn operator_to_bytes(m: &CMatrix) -> Vec<u8> {
    let len = m.nrows();
    let mut out = Vec::with_capacity(8 + 16 * len * len);
    out.extend_from_slice(OPERATOR_MAGIC);
    out.extend_from_slice(&(len as u32).to_le_bytes());
    for i in 0..len {
        for j in 0..len {
            let z = m[(i, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn read_complex(bytes: &[u8]) -> Complex64 {
    let re = f64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"));
    let im = f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    Complex64::new(re, im)
}

pub fn operator_from_bytes(bytes: &[u8]) -> Result<CMatrix> {
    const WHAT: &str = "operator file";
    if bytes.len() < 8 || &bytes[..4] != OPERATOR_MAGIC {
        return Err(Error::parse(WHAT, "missing TFLO header"));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    if len == 0 || len > MAX_BINARY_LEN {
        return Err(Error::parse(WHAT, format!("L = {len} out of range")));
    }
    let body = &bytes[8..];
    if body.len() != 16 * len * len {
        return Err(Error::parse(
            WHAT,
            format!(
                "expected {} payload bytes, found {}",
                16 * len * len,
                body.len()
            ),
        ));
    }
    let mut m = CMatrix::zeros(len, len);
    for (idx, chunk) in body.chunks_exact(16).enumerate() {
        m[(idx / len, idx % len)] = read_complex(chunk);
    }
    Ok(m)
}

/// `k,lambda` with one-based `k`, eigenvalues descending.
pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::from("k,lambda\n");
    for (k, l) in s.eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "{},{}", k + 1, float(*l));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRecord {
    pub gamma: usize,
    pub k: usize,
    pub lambda: f64,
    pub weight: f64,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameManifest {
    #[serde(rename = "L")]
    pub len: usize,
    pub weighted: bool,
    pub atoms: Vec<AtomRecord>,
}

/// Manifest JSON and the `TFAT` sidecar: the magic followed by consecutive
/// length-`L` complex f64 records; each manifest entry gives its byte offset.
pub fn frame_to_files(frame: &EigenFrame) -> (String, Vec<u8>) {
    let record = 16 * frame.len;
    let mut bin = Vec::with_capacity(4 + record * frame.atoms.len());
    bin.extend_from_slice(ATOMS_MAGIC);
    let mut atoms = Vec::with_capacity(frame.atoms.len());
    for a in &frame.atoms {
        atoms.push(AtomRecord {
            gamma: a.gamma,
            k: a.k,
            lambda: a.lambda,
            weight: a.weight,
            offset: bin.len(),
        });
        for z in a.vector.iter() {
            bin.extend_from_slice(&z.re.to_le_bytes());
            bin.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let manifest = FrameManifest {
        len: frame.len,
        weighted: frame.weighted,
        atoms,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    (json, bin)
}

pub fn frame_from_files(manifest: &str, atoms: &[u8]) -> Result<EigenFrame> {
    const WHAT: &str = "frame files";
    let m: FrameManifest =
        serde_json::from_str(manifest).map_err(|e| Error::parse(WHAT, e.to_string()))?;
    if m.len == 0 || m.len > MAX_BINARY_LEN {
        return Err(Error::parse(WHAT, format!("L = {} out of range", m.len)));
    }
    if atoms.len() < 4 || &atoms[..4] != ATOMS_MAGIC {
        return Err(Error::parse(WHAT, "missing TFAT header"));
    }
    let record = 16 * m.len;
    let mut out = Vec::with_capacity(m.atoms.len());
    let mut counts: Vec<usize> = Vec::new();
    for (i, r) in m.atoms.iter().enumerate() {
        let end = r.offset.checked_add(record).filter(|&e| e <= atoms.len());
        let Some(end) = end.filter(|_| r.offset >= 4) else {
            return Err(Error::parse(
                WHAT,
                format!("atom {i}: offset {} out of range", r.offset),
            ));
        };
        if !(r.lambda.is_finite() && r.weight.is_finite() && r.weight >= 0.0) {
            return Err(Error::parse(
                WHAT,
                format!("atom {i}: bad lambda or weight"),
            ));
        }
        if r.k == 0 {
            return Err(Error::parse(WHAT, format!("atom {i}: k is one-based")));
        }
        let vector: Vec<Complex64> = atoms[r.offset..end]
            .chunks_exact(16)
            .map(read_complex)
            .collect();
        if vector
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::parse(WHAT, format!("atom {i}: non-finite entry")));
        }
        if r.gamma >= counts.len() {
            if r.gamma > MAX_BINARY_LEN * MAX_BINARY_LEN {
                return Err(Error::parse(
                    WHAT,
                    format!("atom {i}: region index too large"),
                ));
            }
            counts.resize(r.gamma + 1, 0);
        }
        counts[r.gamma] += 1;
        out.push(Atom {
            vector: DVector::from_vec(vector),
            weight: r.weight,
            gamma: r.gamma,
            k: r.k,
            lambda: r.lambda,
        });
    }
    Ok(EigenFrame {
        len: m.len,
        atoms: out,
        weighted: m.weighted,
        counts,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// `B/A`; `null` when `A = 0`.
    pub condition: Option<f64>,
    pub is_frame: bool,
    pub atol: f64,
}

impl From<&FrameCertificate> for CertificateReport {
    fn from(c: &FrameCertificate) -> Self {
        CertificateReport {
            a: c.a,
            b: c.b,
            condition: c.condition.is_finite().then_some(c.condition),
            is_frame: c.is_frame,
            atol: c.a_tol,
        }
    }
}

pub fn certificate_to_json(c: &FrameCertificate) -> String {
    serde_json::to_string_pretty(&CertificateReport::from(c)).expect("certificate serialization")
}
