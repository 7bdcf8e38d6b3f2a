//! The four pipeline commands. Each writes its artifacts into `out` and
//! returns an [`Outcome`]; only the report files carry timings, and only when
//! the config asks for them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use tfloc::covers::{sum_symbols, validate_cover};
use tfloc::frames::{
    check_frame_preconditions, cover_operators, frame_from_operators, inner_regularity_bound,
    largest_certified_epsilon, norm_equivalence, reconstruct_with, InnerRegularityBound, SweepRow,
    SWEEP_MONOTONE_SLACK,
};
use tfloc::io::{
    certificate_to_json, frame_from_files, frame_to_files, signal_from_csv, signal_to_csv,
};
use tfloc::lattice::{gabor_eigenframe, gabor_multiplier, validate_lattice_cover};
use tfloc::stft::stft;
use tfloc::{
    frame_certificate, AdmissibilityReport, Cover, EigenFrame, FrameCertificate, GridPoint,
    LatticeGaborSystem, LocOperator, NormVariant, PhasePlaneArray, SelectionPolicy, Signal, Window,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::{read_bytes, read_text};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Drives the exit code: `false` means the command ran but its check failed.
    pub ok: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| tfloc::Error::io(dir, e))?;
        Ok(Writer {
            dir,
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| tfloc::Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("report serialization");
        self.put(name, text + "\n")
    }
}

#[derive(Debug, Default, Serialize)]
struct Timings {
    #[serde(skip_serializing_if = "Option::is_none")]
    operators_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics_s: Option<f64>,
}

struct Clock(Option<Instant>);

impl Clock {
    fn start(enabled: bool) -> Self {
        Clock(enabled.then(Instant::now))
    }

    fn lap(&mut self) -> Option<f64> {
        let t = self.0?;
        self.0 = Some(Instant::now());
        Some(t.elapsed().as_secs_f64())
    }
}

fn read_signal(path: &Path, len: usize) -> Result<Signal> {
    let f = signal_from_csv(&read_text(path)?)?;
    if f.len() != len {
        return Err(tfloc::Error::Dimension {
            expected: len,
            found: f.len(),
        }
        .into());
    }
    Ok(f)
}

/// `x,xi,value` rows of `|V f|^2`, `x` outer.
pub fn spectrogram_csv(v: &PhasePlaneArray) -> String {
    let mut out = String::from("x,xi,value\n");
    let power = v.power();
    for (i, p) in power.iter().enumerate() {
        let (x, xi) = (i / v.len(), i % v.len());
        out.push_str(&format!("{x},{xi},{p:?}\n"));
    }
    out
}

/// Binary 8-bit PGM: rows are `xi` descending, columns `x` ascending, grey
/// levels linear on `[0, max |V f|^2]`.
pub fn spectrogram_pgm(v: &PhasePlaneArray) -> Vec<u8> {
    let len = v.len();
    let power = v.power();
    let max = power.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P5\n{len} {len}\n255\n").into_bytes();
    for xi in (0..len).rev() {
        for x in 0..len {
            let p = power[x * len + xi];
            out.push(if max > 0.0 {
                (255.0 * p / max).round() as u8
            } else {
                0
            });
        }
    }
    out
}

pub fn cmd_spectrogram(config: &RunConfig, signal: &Path, out: &Path) -> Result<Outcome> {
    let phi = config.build_window()?;
    let f = read_signal(signal, config.len)?;
    let v = stft(&f, &phi)?;
    let mut w = Writer::new(out)?;
    w.put("spectrogram.csv", spectrogram_csv(&v))?;
    w.put("spectrogram.pgm", spectrogram_pgm(&v))?;
    Ok(Outcome {
        ok: true,
        files: w.files,
        summary: format!(
            "spectrogram of {} samples, energy {:e}",
            f.len(),
            v.energy()
        ),
    })
}

/// Everything `frame` and `reconstruct` need, built from a config.
pub struct BuiltFrame {
    pub cover: Cover,
    pub window: Window,
    pub admissibility: AdmissibilityReport,
    pub operators: Vec<LocOperator>,
    pub frame: EigenFrame,
    pub certificate: FrameCertificate,
    pub system: Option<LatticeGaborSystem>,
    pub spreadness_on_lattice: Option<usize>,
    operators_s: Option<f64>,
    frame_s: Option<f64>,
}

fn admissibility(config: &RunConfig, cover: &Cover) -> Result<AdmissibilityReport> {
    let (r_out, r_in, w) = (
        config.outer_radius(),
        config.inner_radius,
        config.spreadness_window,
    );
    Ok(match config.lattice()? {
        Some(lat) => validate_lattice_cover(&lat, cover, r_out, r_in, w),
        None => validate_cover(cover, r_out, r_in, w),
    })
}

/// Builds the frame; an inadmissible cover is reported through `on_report`
/// before failing, so callers can still write the admissibility file.
pub fn build_frame(
    config: &RunConfig,
    on_report: impl FnOnce(&AdmissibilityReport) -> Result<()>,
) -> Result<BuiltFrame> {
    let window = config.build_window()?;
    let cover = config.build_cover()?;
    let report = admissibility(config, &cover)?;
    on_report(&report)?;
    if !report.passes() {
        return Err(CliError::NotAdmissible(Box::new(report)));
    }
    let mut clock = Clock::start(config.record_timings);
    match config.lattice()? {
        Some(lat) => {
            let system = LatticeGaborSystem::tight(&window, lat)?;
            let g = gabor_eigenframe(&cover, &system, &config.policy, config.weighted)?;
            Ok(BuiltFrame {
                cover,
                window,
                admissibility: report,
                operators: g.operators,
                frame: g.frame,
                certificate: g.certificate,
                system: Some(system),
                spreadness_on_lattice: Some(g.spreadness),
                operators_s: None,
                frame_s: clock.lap(),
            })
        }
        None => {
            check_frame_preconditions(&cover, config.weighted)?;
            let operators = cover_operators(&cover, &window)?;
            let operators_s = clock.lap();
            let frame = frame_from_operators(&operators, &config.policy, config.weighted)?;
            let certificate = frame_certificate(&frame)?;
            Ok(BuiltFrame {
                cover,
                window,
                admissibility: report,
                operators,
                frame,
                certificate,
                system: None,
                spreadness_on_lattice: None,
                operators_s,
                frame_s: clock.lap(),
            })
        }
    }
}

#[derive(Debug, Serialize)]
struct RegionReport {
    gamma: usize,
    center: GridPoint,
    mass: f64,
    trace: f64,
    #[serde(rename = "N")]
    n: usize,
    lambda_max: f64,
    lambda_min_selected: Option<f64>,
}

#[derive(Debug, Serialize)]
struct LatticeReport {
    a: usize,
    b: usize,
    tight_constant: f64,
    condition: f64,
    spreadness: Option<usize>,
}

#[derive(Debug, Serialize)]
struct FrameReport {
    #[serde(rename = "L")]
    len: usize,
    weighted: bool,
    policy: SelectionPolicy,
    epsilon: Option<f64>,
    implied_alpha: Option<f64>,
    /// Largest `alpha` with `alpha * trace_gamma <= N_gamma` for every region.
    empirical_alpha: Option<f64>,
    measure: &'static str,
    atoms: usize,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    condition: Option<f64>,
    is_frame: bool,
    regions: Vec<RegionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<LatticeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_regularity: Option<InnerRegularityBound>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn frame_report(config: &RunConfig, built: &BuiltFrame) -> Result<FrameReport> {
    let frame = &built.frame;
    let mut regions = Vec::with_capacity(built.operators.len());
    for (gamma, op) in built.operators.iter().enumerate() {
        let s = op.spectrum()?;
        let n = frame.counts[gamma];
        regions.push(RegionReport {
            gamma,
            center: op.symbol().center(),
            mass: op.symbol().mass(),
            trace: op.symbol().mass() * op.scale(),
            n,
            lambda_max: s.top(),
            lambda_min_selected: n.checked_sub(1).map(|k| s.eigenvalues[k]),
        });
    }
    let empirical_alpha = regions
        .iter()
        .filter(|r| r.trace > 0.0)
        .map(|r| r.n as f64 / r.trace)
        .reduce(f64::min);
    let inner_regularity = match (&built.system, frame.weighted) {
        (None, false) => Some(inner_regularity_bound(
            &built.cover,
            &built.window,
            config.inner_radius.unwrap_or(1),
            frame,
        )?),
        _ => None,
    };
    let cert = &built.certificate;
    Ok(FrameReport {
        len: config.len,
        weighted: frame.weighted,
        policy: config.policy,
        epsilon: config.policy.epsilon(),
        implied_alpha: config.policy.implied_alpha(),
        empirical_alpha,
        measure: if built.system.is_some() {
            "trace = A * sum of m over lattice points"
        } else {
            "trace = ||eta||_1 / L"
        },
        atoms: frame.atoms.len(),
        a: cert.a,
        b: cert.b,
        condition: cert.condition.is_finite().then_some(cert.condition),
        is_frame: cert.is_frame,
        regions,
        lattice: built.system.as_ref().map(|sys| {
            let (a, b) = sys.lattice.steps();
            LatticeReport {
                a,
                b,
                tight_constant: sys.tight_constant,
                condition: sys.condition(),
                spreadness: built.spreadness_on_lattice,
            }
        }),
        inner_regularity,
        warnings: frame.warnings.clone(),
        timings: config.record_timings.then_some(Timings {
            operators_s: built.operators_s,
            frame_s: built.frame_s,
            diagnostics_s: None,
        }),
    })
}

pub fn cmd_frame(config: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut w = Writer::new(out)?;
    let built = build_frame(config, |report| w.json("admissibility.json", report))?;
    let (manifest, atoms) = frame_to_files(&built.frame);
    w.put("frame.json", manifest + "\n")?;
    w.put("atoms.bin", atoms)?;
    w.put(
        "certificate.json",
        certificate_to_json(&built.certificate) + "\n",
    )?;
    w.json("report.json", &frame_report(config, &built)?)?;
    let cert = &built.certificate;
    Ok(Outcome {
        ok: cert.is_frame,
        files: w.files,
        summary: format!(
            "{} atoms, A = {:e}, B = {:e}, {}",
            built.frame.atoms.len(),
            cert.a,
            cert.b,
            if cert.is_frame {
                "frame"
            } else {
                "not a frame"
            }
        ),
    })
}

#[derive(Debug, Serialize)]
struct ReconstructionReport {
    rel_error: f64,
    tolerance: f64,
    passed: bool,
    atoms: usize,
}

/// Dual reconstruction of `signal`, from the frame files in `frame_dir` when
/// given, otherwise from a frame built inline.
pub fn cmd_reconstruct(
    config: &RunConfig,
    signal: &Path,
    frame_dir: Option<&Path>,
    out: &Path,
) -> Result<Outcome> {
    let f = read_signal(signal, config.len)?;
    let frame = match frame_dir {
        Some(dir) => {
            let manifest = read_text(&dir.join("frame.json"))?;
            let atoms = read_bytes(&dir.join("atoms.bin"))?;
            let frame = frame_from_files(&manifest, &atoms)?;
            if frame.len != config.len {
                return Err(tfloc::Error::Dimension {
                    expected: config.len,
                    found: frame.len,
                }
                .into());
            }
            frame
        }
        None => build_frame(config, |_| Ok(()))?.frame,
    };
    let cert = frame_certificate(&frame)?;
    let rec = reconstruct_with(&frame, &cert, &f)?;
    let passed = rec.rel_error <= config.tolerance;
    let mut w = Writer::new(out)?;
    w.put("reconstructed.csv", signal_to_csv(&rec.signal))?;
    w.json(
        "reconstruction.json",
        &ReconstructionReport {
            rel_error: rec.rel_error,
            tolerance: config.tolerance,
            passed,
            atoms: frame.atoms.len(),
        },
    )?;
    Ok(Outcome {
        ok: passed,
        files: w.files,
        summary: format!("rel_error = {:e}", rec.rel_error),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Pair {
    c: f64,
    #[serde(rename = "C")]
    upper: f64,
}

#[derive(Debug, Serialize)]
struct Thresholded {
    epsilon: f64,
    c: f64,
    #[serde(rename = "C")]
    upper: f64,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
    #[serde(rename = "L")]
    len: usize,
    regions: usize,
    sum_min: f64,
    sum_max: f64,
    plain: Pair,
    squared: Pair,
    thresholded: Thresholded,
    sweep: Vec<SweepRow>,
    /// Largest swept threshold whose lower constant clears `1e-9 * C`.
    epsilon_0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn operators(config: &RunConfig, cover: &Cover, window: &Window) -> Result<Vec<LocOperator>> {
    match config.lattice()? {
        Some(lat) => {
            let system = LatticeGaborSystem::tight(window, lat)?;
            Ok(cover
                .regions()
                .par_iter()
                .map(|m| {
                    let op = gabor_multiplier(m, &system)?;
                    op.spectrum()?;
                    Ok(op)
                })
                .collect::<tfloc::Result<_>>()?)
        }
        None => Ok(cover_operators(cover, window)?),
    }
}

/// Monotonicity of `c(eps)` is a theorem for these operators, so a violation
/// is reported as an internal error rather than a numeric one.
fn check_sweep(rows: &[SweepRow]) -> Result<()> {
    match rows
        .windows(2)
        .find(|w| w[1].c > w[0].c + SWEEP_MONOTONE_SLACK)
    {
        Some(w) => Err(CliError::Internal(format!(
            "c(eps) increased from {:e} at eps={} to {:e} at eps={}",
            w[0].c, w[0].epsilon, w[1].c, w[1].epsilon
        ))),
        None => Ok(()),
    }
}

pub fn cmd_diagnose(config: &RunConfig, out: &Path) -> Result<Outcome> {
    let window = config.build_window()?;
    let cover = config.build_cover()?;
    let report = admissibility(config, &cover)?;
    let mut clock = Clock::start(config.record_timings);
    let ops = operators(config, &cover, &window)?;
    let pair = |v| -> Result<Pair> {
        let nc = norm_equivalence(&ops, v)?;
        Ok(Pair {
            c: nc.c,
            upper: nc.upper,
        })
    };
    let plain = pair(NormVariant::Plain)?;
    let squared = pair(NormVariant::Squared)?;
    let eps = config.policy.epsilon().unwrap_or(0.0);
    let t = pair(NormVariant::Thresholded(eps))?;
    let sweep: Vec<SweepRow> = config
        .sweep
        .par_iter()
        .map(|&epsilon| {
            let nc = norm_equivalence(&ops, NormVariant::Thresholded(epsilon))?;
            Ok(SweepRow {
                epsilon,
                c: nc.c,
                upper: nc.upper,
            })
        })
        .collect::<tfloc::Result<_>>()?;
    check_sweep(&sweep)?;
    let epsilon_0 = largest_certified_epsilon(&sweep, 1e-9 * sweep[0].upper);
    let diagnostics_s = clock.lap();

    let mut w = Writer::new(out)?;
    let sum = if config.lattice.is_some() {
        (report.sum_min, report.sum_max)
    } else {
        let s = sum_symbols(&cover);
        (s.min, s.max)
    };
    w.json(
        "diagnostics.json",
        &Diagnostics {
            len: config.len,
            regions: cover.regions().len(),
            sum_min: sum.0,
            sum_max: sum.1,
            plain,
            squared,
            thresholded: Thresholded {
                epsilon: eps,
                c: t.c,
                upper: t.upper,
            },
            sweep,
            epsilon_0,
            timings: config.record_timings.then(|| Timings {
                diagnostics_s,
                ..Timings::default()
            }),
        },
    )?;
    Ok(Outcome {
        ok: true,
        files: w.files,
        summary: format!(
            "plain c = {:e}, squared c = {:e}, epsilon_0 = {}",
            plain.c,
            squared.c,
            epsilon_0.map_or("none".into(), |e| e.to_string())
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tfloc::Complex64;

    #[test]
    fn pgm_of_zero_is_black() {
        let v = PhasePlaneArray::zeros(4);
        let pgm = spectrogram_pgm(&v);
        assert!(pgm.starts_with(b"P5\n4 4\n255\n"));
        assert!(pgm[11..].iter().all(|&b| b == 0));
        assert_eq!(pgm.len(), 11 + 16);
    }

    #[test]
    fn pgm_rows_run_from_high_frequency() {
        let mut v = PhasePlaneArray::zeros(4);
        v.set(GridPoint::new(1, 3), Complex64::new(2.0, 0.0));
        v.set(GridPoint::new(2, 0), Complex64::new(1.0, 0.0));
        let body = &spectrogram_pgm(&v)[11..];
        assert_eq!(body[1], 255);
        assert_eq!(body[3 * 4 + 2], 64);
        assert_eq!(body.iter().filter(|&&b| b != 0).count(), 2);
    }

    #[test]
    fn csv_lists_power_row_major() {
        let mut v = PhasePlaneArray::zeros(2);
        v.set(GridPoint::new(1, 0), Complex64::new(0.0, 3.0));
        assert_eq!(
            spectrogram_csv(&v),
            "x,xi,value\n0,0,0.0\n0,1,0.0\n1,0,9.0\n1,1,0.0\n"
        );
    }

    #[test]
    fn sweep_check_flags_increase() {
        let row = |epsilon, c| SweepRow {
            epsilon,
            c,
            upper: 1.0,
        };
        assert!(check_sweep(&[row(0.0, 0.5), row(0.1, 0.5), row(0.2, 0.1)]).is_ok());
        let err = check_sweep(&[row(0.0, 0.1), row(0.1, 0.2)]).unwrap_err();
        assert_eq!(err.code(), "internal-error");
    }
}
