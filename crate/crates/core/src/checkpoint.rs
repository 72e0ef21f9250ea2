//! Binary checkpoints.
//!
//! Layout: the magic `LPFLOWCK`, a little-endian `u64` header length, a
//! JSON [`Header`], then little-endian `f64` payload: each field's `n²`
//! samples in header order, followed by the sample history row by row
//! (`t`, the scalar columns, `dq_tau`, `dq_v`). Field samples are stored
//! bit for bit, so a loaded state steps exactly like the saved one.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{SimulationConfig, System, SystemParams};
use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;
use crate::mhd::MhdState;
use crate::monitor::CriterionSample;
use crate::oldroyd::OldroydState;
use crate::runner::State;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"LPFLOWCK";
const SCALARS: usize = 14;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    version: u32,
    system: System,
    n: usize,
    length: f64,
    t: f64,
    step: u64,
    fields: Vec<String>,
    blocks: usize,
    samples: usize,
    config: SimulationConfig,
}

/// A resumable run: its configuration, current state and samples so far.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub config: SimulationConfig,
    pub state: State,
    pub samples: Vec<CriterionSample>,
}

fn field_names(system: System) -> &'static [&'static str] {
    match system {
        System::Oldroyd | System::NsForced => &["vx", "vy", "tau_xx", "tau_xy", "tau_yy"],
        System::Mhd => &["vx", "vy", "hx", "hy"],
    }
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let system = self.config.system;
        let blocks = self.samples.first().map_or(0, |s| s.dq_tau.len());
        if self
            .samples
            .iter()
            .any(|s| s.dq_tau.len() != blocks || s.dq_v.len() != blocks)
        {
            return Err(Error::HistoryMismatch("block vectors differ in length".into()));
        }
        let fields = self.state.components();
        let grid = self.state.grid();
        let header = Header {
            version: CHECKPOINT_VERSION,
            system,
            n: grid.n(),
            length: grid.length(),
            t: self.state.t(),
            step: self.state.step(),
            fields: field_names(system).iter().map(|s| s.to_string()).collect(),
            blocks,
            samples: self.samples.len(),
            config: self.config.clone(),
        };
        if fields.len() != header.fields.len() {
            return Err(corrupt("state does not match the configured system"));
        }
        let json = serde_json::to_vec(&header).map_err(|e| corrupt(e.to_string()))?;
        let width = 1 + SCALARS + 2 * blocks;
        let mut out = Vec::with_capacity(
            16 + json.len() + 8 * (fields.len() * grid.len() + self.samples.len() * width),
        );
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for f in &fields {
            for x in f.values().iter() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        for s in &self.samples {
            let row = std::iter::once(s.t)
                .chain(s.scalars())
                .chain(s.dq_tau.iter().copied())
                .chain(s.dq_v.iter().copied());
            for x in row {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        Ok(out)
    }

    /// Decodes a checkpoint; any inconsistency fails without returning a state.
    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(corrupt("corrupt header: missing magic"));
        }
        let len = u64::from_le_bytes(bytes[8..16].try_into().expect("eight bytes"));
        let end = usize::try_from(len)
            .ok()
            .and_then(|l| l.checked_add(16))
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| corrupt("corrupt header: truncated"))?;
        let header: Header = serde_json::from_slice(&bytes[16..end])
            .map_err(|e| corrupt(format!("corrupt header: {e}")))?;
        if header.version != CHECKPOINT_VERSION {
            return Err(corrupt(format!(
                "version {} (expected {CHECKPOINT_VERSION})",
                header.version
            )));
        }
        let config = header.config;
        config.validate()?;
        if config.system != header.system || config.n != header.n {
            return Err(corrupt("corrupt header: config disagrees with header"));
        }
        let names = field_names(header.system);
        if header.fields.len() != names.len() || header.fields.iter().zip(names).any(|(a, b)| a != b) {
            return Err(corrupt(format!(
                "field-count mismatch: {} stored, {} expected for {}",
                header.fields.len(),
                names.len(),
                header.system.name()
            )));
        }
        let grid = Grid::new(header.n, header.length)?;
        let width = 1 + SCALARS + 2 * header.blocks;
        let expected = header
            .fields
            .len()
            .checked_mul(grid.len())
            .and_then(|f| header.samples.checked_mul(width).and_then(|s| f.checked_add(s)))
            .and_then(|w| w.checked_mul(8))
            .ok_or_else(|| corrupt("corrupt header: sizes overflow"))?;
        let payload = &bytes[end..];
        if payload.len() != expected {
            return Err(corrupt(format!(
                "payload holds {} bytes, header promises {expected}",
                payload.len()
            )));
        }
        let mut words = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")));
        let mut take = |k: usize| -> Vec<f64> { words.by_ref().take(k).collect() };
        let fields: Vec<ScalarField> = (0..names.len())
            .map(|_| ScalarField::from_values(&grid, take(grid.len())).expect("grid length"))
            .collect();
        let samples = (0..header.samples)
            .map(|_| {
                let row = take(width);
                let mut scalars = [0.0; SCALARS];
                scalars.copy_from_slice(&row[1..1 + SCALARS]);
                let (tau, v) = row[1 + SCALARS..].split_at(header.blocks);
                CriterionSample::from_scalars(row[0], scalars, tau.to_vec(), v.to_vec())
            })
            .collect();
        let state = State::from_components(&config, fields, header.t, header.step)?;
        Ok(Checkpoint {
            config,
            state,
            samples,
        })
    }
}

/// Writes through a temporary file and a rename, so a crash never leaves a
/// half-written checkpoint under `path`.
pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let bytes = checkpoint.to_bytes()?;
    write_atomic(path, &bytes)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_bytes(&bytes)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

impl State {
    pub(crate) fn from_components(
        config: &SimulationConfig,
        fields: Vec<ScalarField>,
        t: f64,
        step: u64,
    ) -> Result<State> {
        let mut it = fields.into_iter();
        let mut next = || it.next().ok_or_else(|| corrupt("field-count mismatch"));
        let v = VectorField {
            x: next()?,
            y: next()?,
        };
        Ok(match config.params {
            SystemParams::Oldroyd(params) => State::Oldroyd(OldroydState {
                v,
                tau: SymTensorField {
                    xx: next()?,
                    xy: next()?,
                    yy: next()?,
                },
                t,
                step,
                params,
            }),
            SystemParams::Mhd(p) => State::Mhd(MhdState {
                v,
                h: VectorField {
                    x: next()?,
                    y: next()?,
                },
                nu: p.nu,
                t,
                step,
            }),
        })
    }

    fn components(&self) -> Vec<&ScalarField> {
        match self {
            State::Oldroyd(s) => vec![&s.v.x, &s.v.y, &s.tau.xx, &s.tau.xy, &s.tau.yy],
            State::Mhd(s) => vec![&s.v.x, &s.v.y, &s.h.x, &s.h.y],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimulationConfig;
    use crate::recipes::random_solenoidal;

    fn sample_checkpoint() -> Checkpoint {
        let config = SimulationConfig::new(System::Oldroyd, 16).unwrap();
        let grid = config.grid().unwrap();
        let v = random_solenoidal(&grid, 5, 3, -1.0, 0.7).unwrap();
        let mut s = OldroydState::zeros(&grid, Default::default());
        s.v = v;
        s.t = 0.125;
        s.step = 7;
        let samples = (0..3)
            .map(|i| {
                CriterionSample::from_scalars(i as f64, [1.0 / 3.0; 14], vec![0.1; 4], vec![0.2; 4])
            })
            .collect();
        Checkpoint {
            config,
            state: State::Oldroyd(s),
            samples,
        }
    }

    #[test]
    fn round_trip_is_bitwise() {
        let c = sample_checkpoint();
        let back = Checkpoint::from_bytes(&c.to_bytes().unwrap()).unwrap();
        assert_eq!(back.config, c.config);
        assert_eq!(back.samples, c.samples);
        assert_eq!((back.state.t(), back.state.step()), (0.125, 7));
        for (a, b) in back.state.components().iter().zip(c.state.components()) {
            let (a, b) = (a.values(), b.values());
            assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn truncation_detected() {
        let bytes = sample_checkpoint().to_bytes().unwrap();
        for cut in [0, 12, 40, bytes.len() - 1] {
            let e = Checkpoint::from_bytes(&bytes[..cut]).unwrap_err();
            assert!(matches!(e, Error::Checkpoint(_)), "cut {cut}: {e}");
        }
    }

    #[test]
    fn version_and_field_count_checked() {
        let bytes = sample_checkpoint().to_bytes().unwrap();
        let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let header = std::str::from_utf8(&bytes[16..16 + len]).unwrap();
        let rewrite = |h: String| {
            let mut out = MAGIC.to_vec();
            out.extend_from_slice(&(h.len() as u64).to_le_bytes());
            out.extend_from_slice(h.as_bytes());
            out.extend_from_slice(&bytes[16 + len..]);
            out
        };
        let v2 = rewrite(header.replacen("\"version\":1", "\"version\":2", 1));
        let e = Checkpoint::from_bytes(&v2).unwrap_err().to_string();
        assert!(e.contains("version 2"), "{e}");
        let four = rewrite(header.replacen(",\"tau_yy\"", "", 1));
        let e = Checkpoint::from_bytes(&four).unwrap_err().to_string();
        assert!(e.contains("field-count mismatch"), "{e}");
    }
}
