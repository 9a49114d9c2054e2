use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use super::{build_index, reload, DbError, DocIndex};

/// Shared access to the current index snapshot. Readers clone the `Arc`
/// and keep a consistent view for as long as they hold it; a reload
/// builds a new snapshot and swaps it in.
#[derive(Debug)]
pub struct IndexHandle {
    current: RwLock<Arc<DocIndex>>,
    reloading: Mutex<()>,
}

impl IndexHandle {
    pub fn new(index: DocIndex) -> Self {
        IndexHandle {
            current: RwLock::new(Arc::new(index)),
            reloading: Mutex::new(()),
        }
    }

    pub fn open(root: &Path) -> Result<Self, DbError> {
        Ok(Self::new(build_index(root)?))
    }

    pub fn snapshot(&self) -> Arc<DocIndex> {
        self.current
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    /// Rescans the tree and publishes the result. Concurrent reloads run
    /// one after another. Returns the new generation.
    pub fn reload(&self) -> Result<u64, DbError> {
        let _guard = self.reloading.lock().unwrap_or_else(|e| e.into_inner());
        let next = reload(&self.snapshot())?;
        let generation = next.generation;
        self.publish(next);
        Ok(generation)
    }

    pub fn publish(&self, index: DocIndex) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(index);
    }
}
