//! Model files: a JSON envelope holding a format tag, a version, the SHA-256
//! of the compact JSON encoding of the model, and the model itself.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{HybridError, TrainedHybridModel};

pub const MODEL_FORMAT: &str = "fohybrid-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a> {
    format: &'static str,
    version: u32,
    checksum: String,
    model: &'a TrainedHybridModel,
}

fn checksum(model: &TrainedHybridModel) -> Result<String, HybridError> {
    let body = serde_json::to_string(model).map_err(|e| HybridError::Checksum(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(body.as_bytes())))
}

pub fn save_model(model: &TrainedHybridModel, path: &Path) -> Result<(), HybridError> {
    let env = Envelope {
        format: MODEL_FORMAT,
        version: model.version,
        checksum: checksum(model)?,
        model,
    };
    let text =
        serde_json::to_string_pretty(&env).map_err(|e| HybridError::Checksum(e.to_string()))?;
    fs::write(path, text).map_err(|e| HybridError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_model(path: &Path) -> Result<TrainedHybridModel, HybridError> {
    let text = fs::read_to_string(path).map_err(|e| HybridError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| HybridError::Checksum(format!("unparsable model file: {e}")))?;
    if doc.get("format").and_then(Value::as_str) != Some(MODEL_FORMAT) {
        return Err(HybridError::Checksum(format!(
            "missing or wrong format tag (expected '{MODEL_FORMAT}')"
        )));
    }
    let version = doc.get("version").cloned().unwrap_or(Value::Null);
    if version.as_u64() != Some(MODEL_VERSION as u64) {
        return Err(HybridError::Incompatible {
            found: version.to_string(),
            expected: MODEL_VERSION.to_string(),
        });
    }
    let stored = doc
        .get("checksum")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| HybridError::Checksum("missing checksum".into()))?;
    let model: TrainedHybridModel = serde_json::from_value(doc["model"].take())
        .map_err(|e| HybridError::Checksum(format!("malformed model body: {e}")))?;
    let actual = checksum(&model)?;
    if actual != stored {
        return Err(HybridError::Checksum(format!(
            "stored {stored}, computed {actual}"
        )));
    }
    if model.version != MODEL_VERSION {
        return Err(HybridError::Incompatible {
            found: model.version.to_string(),
            expected: MODEL_VERSION.to_string(),
        });
    }
    Ok(model)
}
