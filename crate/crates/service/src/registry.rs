//! Content-addressed model store with one active model per live variant.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use lexiscreen_core::{AgeVariant, ForestModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ServiceError};
use crate::store::write_atomic;

const ACTIVE_FILE: &str = "active.json";

/// A model together with the id it is stored under.
#[derive(Debug)]
pub struct ActiveModel {
    pub version: String,
    pub model: ForestModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub version: String,
    pub variant: AgeVariant,
    pub threshold: f64,
    pub n_trees: usize,
}

impl ModelInfo {
    fn of(active: &ActiveModel) -> ModelInfo {
        ModelInfo {
            version: active.version.clone(),
            variant: active.model.variant,
            threshold: active.model.threshold,
            n_trees: active.model.trees.len(),
        }
    }
}

/// Model id: the first 16 hex digits of the SHA-256 of the artifact bytes.
pub fn model_version(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))[..16].to_string()
}

#[derive(Debug)]
pub struct Registry {
    dir: PathBuf,
    active: RwLock<BTreeMap<AgeVariant, Arc<ActiveModel>>>,
}

impl Registry {
    pub fn open(dir: &Path) -> Result<Registry> {
        fs::create_dir_all(dir)?;
        let registry = Registry {
            dir: dir.to_path_buf(),
            active: RwLock::new(BTreeMap::new()),
        };
        let pointer = dir.join(ACTIVE_FILE);
        if pointer.exists() {
            let versions: BTreeMap<AgeVariant, String> =
                serde_json::from_slice(&fs::read(&pointer)?)
                    .map_err(|e| ServiceError::Internal(format!("corrupt {ACTIVE_FILE}: {e}")))?;
            let mut active = registry.active.write().expect("registry lock");
            for (variant, version) in versions {
                let model = registry.load(&version)?;
                active.insert(variant, Arc::new(ActiveModel { version, model }));
            }
        }
        Ok(registry)
    }

    /// Stored model by version, whether or not it is active.
    pub fn load(&self, version: &str) -> Result<ForestModel> {
        if !version.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ServiceError::Validation(format!(
                "bad model version `{version}`"
            )));
        }
        let bytes = fs::read(self.dir.join(format!("{version}.json")))?;
        ForestModel::from_bytes(&bytes).map_err(|e| ServiceError::Internal(e.to_string()))
    }

    /// Validate and store an artifact, then make it the active model for its
    /// variant. Readers see either the old or the new model, never a mix.
    pub fn activate(&self, bytes: &[u8]) -> Result<ModelInfo> {
        let model =
            ForestModel::from_bytes(bytes).map_err(|e| ServiceError::Artifact(e.to_string()))?;
        if !AgeVariant::LIVE.contains(&model.variant) {
            return Err(ServiceError::Artifact(format!(
                "model is for the {} layout; live sessions use young7_8, mid9_11 or teen12_17",
                model.variant
            )));
        }
        let version = model_version(bytes);
        let path = self.dir.join(format!("{version}.json"));
        if !path.exists() {
            write_atomic(&path, bytes)?;
        }
        let entry = Arc::new(ActiveModel { version, model });

        let mut active = self.active.write().expect("registry lock");
        let mut pointers: BTreeMap<AgeVariant, String> = active
            .iter()
            .map(|(v, m)| (*v, m.version.clone()))
            .collect();
        pointers.insert(entry.model.variant, entry.version.clone());
        let json = serde_json::to_vec_pretty(&pointers).expect("pointer map serializes");
        write_atomic(&self.dir.join(ACTIVE_FILE), &json)?;
        active.insert(entry.model.variant, Arc::clone(&entry));
        tracing::info!(version = %entry.version, variant = %entry.model.variant, "model activated");
        Ok(ModelInfo::of(&entry))
    }

    /// Snapshot of the active model for `variant`.
    pub fn active(&self, variant: AgeVariant) -> Option<Arc<ActiveModel>> {
        self.active
            .read()
            .expect("registry lock")
            .get(&variant)
            .cloned()
    }

    pub fn active_infos(&self) -> Vec<ModelInfo> {
        self.active
            .read()
            .expect("registry lock")
            .values()
            .map(|m| ModelInfo::of(m))
            .collect()
    }
}
