//! Saving and loading trained classifiers.
//!
//! JSON blobs are `{"format": "textal-classifier", "version": 1, "state": ...}`.
//! The binary layout is, all integers and floats little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `TXCLSF\0\0` |
//! | 4 | version (u32, currently 1) |
//! | 3 x 4 | input_dim, hidden_dim, classes (u32) |
//! | 4 + n | config as UTF-8 JSON, length-prefixed (u32) |
//! | 8 x k | w1, b1, w2, b2 as f64, row-major, in that order |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::{ClassifierState, Parameters};
use super::train::ClassifierConfig;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TXCLSF\0\0";
const VERSION: u32 = 1;
const FORMAT: &str = "textal-classifier";

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    state: ClassifierState,
}

pub fn save_json(state: &ClassifierState, path: &Path) -> Result<()> {
    let env = Envelope {
        format: FORMAT.into(),
        version: VERSION,
        state: state.clone(),
    };
    let body = serde_json::to_string(&env).expect("classifier serializes");
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn load_json(path: &Path) -> Result<ClassifierState> {
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let env: Envelope = serde_json::from_str(&body).map_err(|e| Error::Format(e.to_string()))?;
    if env.format != FORMAT || env.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported classifier blob {} v{}",
            env.format, env.version
        )));
    }
    let s = env.state;
    ClassifierState::from_parameters(
        s.input_dim(),
        s.hidden_dim(),
        s.classes(),
        s.parameters().clone(),
        s.config().clone(),
    )
}

pub fn save_binary(state: &ClassifierState, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(64 + 8 * state.parameters().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for dim in [state.input_dim(), state.hidden_dim(), state.classes()] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    let config = serde_json::to_vec(state.config()).expect("config serializes");
    out.extend_from_slice(&(config.len() as u32).to_le_bytes());
    out.extend_from_slice(&config);
    for v in state.parameters().iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_binary(path: &Path) -> Result<ClassifierState> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };
    if cur.take(8)? != MAGIC {
        return Err(Error::Format("not a classifier file".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported classifier version {version}")));
    }
    let (d, h, c) = (cur.u32()? as usize, cur.u32()? as usize, cur.u32()? as usize);
    let config_len = cur.u32()? as usize;
    let config: ClassifierConfig =
        serde_json::from_slice(cur.take(config_len)?).map_err(|e| Error::Format(e.to_string()))?;
    let mut params = Parameters::zeros(d, h, c);
    for v in params.iter_mut() {
        *v = f64::from_le_bytes(cur.take(8)?.try_into().expect("8 bytes"));
    }
    if cur.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after parameters".into()));
    }
    ClassifierState::from_parameters(d, h, c, params, config)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated classifier file".into()))?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}
