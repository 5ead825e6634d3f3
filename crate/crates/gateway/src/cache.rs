use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GatewayError;

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    key: String,
    text: String,
}

/// Append-only JSONL store of raw responses, keyed by request content.
#[derive(Debug)]
pub struct ResponseCache {
    path: PathBuf,
    inner: Mutex<(HashMap<String, String>, File)>,
}

impl ResponseCache {
    /// Opens or creates the cache file. A torn trailing line is ignored.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, GatewayError> {
        let path = path.as_ref().to_path_buf();
        let io = |e: std::io::Error| GatewayError::Cache(format!("{}: {e}", path.display()));
        let mut map = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path).map_err(io)?).lines() {
                let line = line.map_err(io)?;
                if let Ok(e) = serde_json::from_str::<Entry>(&line) {
                    map.insert(e.key, e.text);
                }
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        // terminate a torn last line so the next entry starts cleanly
        let raw = std::fs::read(&path).map_err(io)?;
        if raw.last().is_some_and(|&b| b != b'\n') {
            file.write_all(b"\n").map_err(io)?;
        }
        Ok(Self {
            path,
            inner: Mutex::new((map, file)),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.inner.lock().expect("cache lock").0.get(key).cloned()
    }

    pub fn insert(&self, key: String, text: String) -> Result<(), GatewayError> {
        let mut guard = self.inner.lock().expect("cache lock");
        let (map, file) = &mut *guard;
        if map.contains_key(&key) {
            return Ok(());
        }
        let mut line = serde_json::to_string(&Entry { key: key.clone(), text: text.clone() })
            .map_err(|e| GatewayError::Cache(e.to_string()))?;
        line.push('\n');
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| GatewayError::Cache(e.to_string()))?;
        map.insert(key, text);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Hex SHA-256 over the model id, the prompt and the decoding parameters.
pub fn cache_key(model: &str, prompt: &str, decoding: &str) -> String {
    let mut h = Sha256::new();
    for part in [model, prompt, decoding] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
