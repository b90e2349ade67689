//! One directory per session holding `session.json`, the uploaded mesh and
//! render blobs. Writes go through a temporary file and a rename.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};

use crate::error::ServiceError;
use crate::session::Session;

const SESSION_FILE: &str = "session.json";
pub const MESH_BLOB: &str = "mesh.bin";

#[derive(Debug)]
pub struct SessionStore {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<RwLock<()>>>>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

fn valid_blob(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.')) && !name.starts_with('.')
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> Result<PathBuf, ServiceError> {
        if !valid_id(id) {
            return Err(ServiceError::not_found("session"));
        }
        Ok(self.root.join(id))
    }

    /// Lock guarding one session; writers are exclusive, readers shared.
    pub fn lock(&self, id: &str) -> Arc<RwLock<()>> {
        self.locks.lock().entry(id.to_string()).or_default().clone()
    }

    pub fn exists(&self, id: &str) -> bool {
        self.dir(id).is_ok_and(|d| d.join(SESSION_FILE).is_file())
    }

    pub fn create(&self, session: &Session, mesh: &[u8]) -> Result<(), ServiceError> {
        let dir = self.dir(&session.id)?;
        if dir.exists() {
            return Err(ServiceError::internal(format!("session {} already exists", session.id)));
        }
        std::fs::create_dir_all(&dir)?;
        self.write_blob(&session.id, MESH_BLOB, mesh)?;
        self.save(session)
    }

    pub fn load(&self, id: &str) -> Result<Session, ServiceError> {
        let path = self.dir(id)?.join(SESSION_FILE);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(ServiceError::not_found("session")),
            Err(e) => return Err(e.into()),
        };
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, session: &Session) -> Result<(), ServiceError> {
        let json = serde_json::to_vec_pretty(session)?;
        self.write_atomic(&self.dir(&session.id)?.join(SESSION_FILE), &json)
    }

    pub fn write_blob(&self, id: &str, name: &str, bytes: &[u8]) -> Result<(), ServiceError> {
        if !valid_blob(name) {
            return Err(ServiceError::internal(format!("bad blob name {name:?}")));
        }
        self.write_atomic(&self.dir(id)?.join(name), bytes)
    }

    pub fn read_blob(&self, id: &str, name: &str) -> Result<Vec<u8>, ServiceError> {
        if !valid_blob(name) {
            return Err(ServiceError::not_found("blob"));
        }
        match std::fs::read(self.dir(id)?.join(name)) {
            Ok(b) => Ok(b),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(ServiceError::not_found("blob")),
            Err(e) => Err(e.into()),
        }
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), ServiceError> {
        let dir = path.parent().ok_or_else(|| ServiceError::internal("blob path has no parent"))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| ServiceError::from(e.error))?;
        Ok(())
    }

    /// Ids of all stored sessions, sorted.
    pub fn list(&self) -> Result<Vec<String>, ServiceError> {
        let mut ids: Vec<String> = std::fs::read_dir(&self.root)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|id| self.exists(id))
            .collect();
        ids.sort();
        Ok(ids)
    }
}
