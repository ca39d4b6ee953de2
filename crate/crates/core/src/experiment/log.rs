use std::path::{Path, PathBuf};

use tokio::io::AsyncWriteExt;
use tokio::sync::Mutex;

use super::model::Event;
use super::ExperimentError;

/// Append-only JSON-lines event log with a single serialized writer.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: Mutex<tokio::fs::File>,
}

impl EventLog {
    pub async fn open(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            tokio::fs::create_dir_all(parent).await.map_err(storage)?;
        }
        let file = tokio::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .await
            .map_err(storage)?;
        Ok(Self { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends and flushes one event; returns once the line is written.
    pub async fn append(&self, event: &Event) -> Result<(), ExperimentError> {
        let mut line = serde_json::to_string(event).map_err(|e| ExperimentError::Storage(e.to_string()))?;
        line.push('\n');
        let mut file = self.file.lock().await;
        file.write_all(line.as_bytes()).await.map_err(storage)?;
        file.flush().await.map_err(storage)?;
        file.sync_data().await.map_err(storage)?;
        Ok(())
    }
}

fn storage(e: std::io::Error) -> ExperimentError {
    ExperimentError::Storage(e.to_string())
}

/// Reads every event; a torn final line is skipped.
pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<Event>, ExperimentError> {
    let path = path.as_ref();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(storage(e)),
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str(line) {
            Ok(e) => events.push(e),
            Err(_) if i + 1 == lines.len() && !text.ends_with('\n') => {
                tracing::warn!(path = %path.display(), "skipping torn final log line");
            }
            Err(e) => {
                return Err(ExperimentError::Storage(format!("{}:{}: {e}", path.display(), i + 1)));
            }
        }
    }
    Ok(events)
}
