//! Run configuration files.
//!
//! Relative paths inside a config (window file, cover file, output directory)
//! are resolved against the directory holding the config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tfloc::covers::{
    cover_from_json, cover_from_json_on_lattice, gen_random_irregular, gen_regular_boxes,
    gen_wedge_cover, Band,
};
use tfloc::io::signal_from_csv;
use tfloc::lattice::LatticeSpec;
use tfloc::{gauss_window, Cover, Error, Lattice, SelectionPolicy, Window};

use crate::read_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub len: usize,
    pub window: WindowSource,
    pub cover: CoverSource,
    pub policy: SelectionPolicy,
    #[serde(default = "default_true")]
    pub weighted: bool,
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Admissibility radius `R`; defaults to the grid diameter.
    #[serde(default)]
    pub outer_radius: Option<usize>,
    #[serde(default)]
    pub inner_radius: Option<usize>,
    #[serde(default = "default_spreadness_window")]
    pub spreadness_window: usize,
    /// Reconstruction tolerance for `reconstruct`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Thresholds for the diagnose sweep.
    #[serde(default = "default_sweep")]
    pub sweep: Vec<f64>,
    #[serde(default)]
    pub record_timings: bool,
}

fn default_true() -> bool {
    true
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_spreadness_window() -> usize {
    1
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_sweep() -> Vec<f64> {
    (0..10).map(|k| k as f64 / 10.0).collect()
}

/// `"gauss"` or `{"file": "window.csv"}` (signal CSV, normalized on load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSource {
    Named(WindowName),
    File(FileRef),
}

/// `{"file": path}` and nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRef {
    pub file: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowName {
    Gauss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoverSource {
    Generator(Generator),
    File(FileRef),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    RegularBoxes {
        bx: usize,
        by: usize,
    },
    Wedge {
        bands: Vec<Band>,
    },
    /// Seeded by the config's `seed`.
    RandomIrregular {
        target_size: usize,
        #[serde(default)]
        overlap: f64,
    },
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "run config",
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let mut config = Self::from_json(&read_text(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.rebase(base);
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.len < 2 {
            return Err(Error::InvalidArgument(format!(
                "L must be at least 2, got {}",
                self.len
            )));
        }
        self.policy.validate()?;
        if self.spreadness_window == 0 {
            return Err(Error::InvalidArgument(
                "spreadness_window must be at least 1".into(),
            ));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        if self.sweep.is_empty() || self.sweep.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidArgument(
                "sweep needs finite nonnegative thresholds".into(),
            ));
        }
        if self.sweep.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "sweep thresholds must be strictly increasing".into(),
            ));
        }
        if let CoverSource::Generator(Generator::RandomIrregular { .. }) = self.cover {
            if self.seed.is_none() {
                return Err(Error::InvalidArgument(
                    "random_irregular covers need a seed".into(),
                ));
            }
        }
        Ok(())
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        if let WindowSource::File(FileRef { file }) = &mut self.window {
            join(file);
        }
        if let CoverSource::File(FileRef { file }) = &mut self.cover {
            join(file);
        }
    }

    pub fn lattice(&self) -> Result<Option<Lattice>, Error> {
        self.lattice
            .map(|spec| Lattice::new(self.len, spec.a, spec.b))
            .transpose()
    }

    pub fn build_window(&self) -> Result<Window, Error> {
        match &self.window {
            WindowSource::Named(WindowName::Gauss) => gauss_window(self.len),
            WindowSource::File(FileRef { file }) => {
                let s = signal_from_csv(&read_text(file)?)?;
                if s.len() != self.len {
                    return Err(Error::Dimension {
                        expected: self.len,
                        found: s.len(),
                    });
                }
                Window::new(s.samples().iter().copied().collect())
            }
        }
    }

    /// The cover on the full grid, or restricted to the lattice when one is
    /// configured.
    pub fn build_cover(&self) -> Result<Cover, Error> {
        let lattice = self.lattice()?;
        let cover = match &self.cover {
            CoverSource::File(FileRef { file }) => {
                let text = read_text(file)?;
                return match &lattice {
                    Some(lat) => cover_from_json_on_lattice(&text, lat),
                    None => cover_from_json(&text),
                }
                .and_then(|c| self.check_len(c));
            }
            CoverSource::Generator(Generator::RegularBoxes { bx, by }) => {
                gen_regular_boxes(self.len, *bx, *by)?
            }
            CoverSource::Generator(Generator::Wedge { bands }) => gen_wedge_cover(self.len, bands)?,
            CoverSource::Generator(Generator::RandomIrregular {
                target_size,
                overlap,
            }) => gen_random_irregular(
                self.len,
                self.seed.unwrap_or_default(),
                *target_size,
                *overlap,
            )?,
        };
        match lattice {
            Some(lat) => {
                let (restricted, dropped) = lat.restrict_cover(&cover)?;
                if !dropped.is_empty() {
                    return Err(Error::PreconditionViolation(format!(
                        "regions {dropped:?} contain no lattice points"
                    )));
                }
                Ok(restricted)
            }
            None => Ok(cover),
        }
    }

    fn check_len(&self, cover: Cover) -> Result<Cover, Error> {
        if cover.len() != self.len {
            return Err(Error::Dimension {
                expected: self.len,
                found: cover.len(),
            });
        }
        Ok(cover)
    }

    pub fn outer_radius(&self) -> usize {
        self.outer_radius.unwrap_or(self.len / 2)
    }
}
