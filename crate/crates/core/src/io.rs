//! JSON loaders. A file reference is either a path, resolved against the
//! directory of the file that mentions it, or the referenced object inline.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use crate::cellcx::{CellError, Complex, ComplexFile, ConstructibleFunction, DefinableSet};
use crate::formulas::{LocalLedger, SingularLedger};
use crate::pushfwd::{PushError, SimplicialMap};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {msg}")]
    Parse { path: PathBuf, line: usize, column: usize, msg: String },
    #[error("{path}: {source}")]
    Cell { path: PathBuf, source: CellError },
    #[error("{path}: {source}")]
    Map { path: PathBuf, source: PushError },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FileRef<T> {
    Path(String),
    Inline(T),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    parse_json(path, &text)
}

/// Parse `text` as if read from `path`, reporting line and column on failure.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn resolve_complex(r: FileRef<ComplexFile>, base: &Path, owner: &Path) -> Result<Arc<Complex>, LoadError> {
    match r {
        FileRef::Path(p) => load_complex(&base.join(p)),
        FileRef::Inline(file) => Complex::from_file(file)
            .map(Arc::new)
            .map_err(|source| LoadError::Cell { path: owner.to_path_buf(), source }),
    }
}

pub fn load_complex(path: &Path) -> Result<Arc<Complex>, LoadError> {
    let file: ComplexFile = read_json(path)?;
    Complex::from_file(file).map(Arc::new).map_err(|source| LoadError::Cell { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct SetFile {
    complex: FileRef<ComplexFile>,
    members: Vec<String>,
}

pub fn load_set(path: &Path) -> Result<DefinableSet, LoadError> {
    let file: SetFile = read_json(path)?;
    let complex = resolve_complex(file.complex, &base_dir(path), path)?;
    DefinableSet::from_ids(complex, &file.members).map_err(|source| LoadError::Cell { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct FunctionFile {
    complex: FileRef<ComplexFile>,
    values: BTreeMap<String, i64>,
}

pub fn load_function(path: &Path) -> Result<ConstructibleFunction, LoadError> {
    let file: FunctionFile = read_json(path)?;
    let complex = resolve_complex(file.complex, &base_dir(path), path)?;
    ConstructibleFunction::from_map(complex, file.values)
        .map_err(|source| LoadError::Cell { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct MapFile {
    source: FileRef<ComplexFile>,
    target: FileRef<ComplexFile>,
    vertex_map: HashMap<String, String>,
}

pub fn load_map(path: &Path) -> Result<SimplicialMap, LoadError> {
    let file: MapFile = read_json(path)?;
    let base = base_dir(path);
    let source = resolve_complex(file.source, &base, path)?;
    let target = resolve_complex(file.target, &base, path)?;
    SimplicialMap::new(source, target, &file.vertex_map).map_err(|source| LoadError::Map { path: path.to_path_buf(), source })
}

pub fn load_ledger(path: &Path) -> Result<SingularLedger, LoadError> {
    read_json(path)
}

pub fn load_local_ledger(path: &Path) -> Result<LocalLedger, LoadError> {
    read_json(path)
}

/// Generic loader for any JSON document.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    read_json(path)
}
