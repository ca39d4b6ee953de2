//! HTTP front end for the story-writing experiment.

mod config;
mod http;

pub use config::{ConfigError, ServiceConfig};
pub use http::{router, AppState};

use std::net::SocketAddr;
use std::sync::Arc;

use ideation_core::experiment::{Experiment, ExperimentError};
use ideation_core::ideas::{import_pool, PoolError};
use tokio::net::TcpListener;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("idea pool {path}: {source}")]
    Pool { path: String, source: PoolError },
    #[error("idea pool {path}: {source}")]
    PoolIo { path: String, source: std::io::Error },
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

/// Loads the pool and replays the event log.
pub async fn build_state(config: &ServiceConfig) -> Result<AppState, ServiceError> {
    let path = config.pool_path.display().to_string();
    let file = std::fs::File::open(&config.pool_path)
        .map_err(|source| ServiceError::PoolIo { path: path.clone(), source })?;
    let pool = import_pool(file).map_err(|source| ServiceError::Pool { path, source })?;
    let experiment = Experiment::open(Arc::new(pool), config.experiment(), &config.log_path).await?;
    tracing::info!(
        sessions = experiment.session_count(),
        ideas = experiment.pool().len(),
        log = %config.log_path.display(),
        "experiment loaded"
    );
    Ok(AppState::new(Arc::new(experiment), config.admin_token.clone()))
}

/// Binds `addr` and serves in a background task; returns the bound address.
pub async fn spawn(state: AppState, addr: &str) -> Result<SocketAddr, ServiceError> {
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr: addr.to_string(), source })?;
    let local = listener.local_addr().map_err(ServiceError::Serve)?;
    tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, router(state)).await {
            tracing::error!(error = %e, "server stopped");
        }
    });
    Ok(local)
}

/// Binds and serves until the process receives ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = build_state(&config).await?;
    let addr = config.bind_addr();
    let listener = TcpListener::bind(&addr)
        .await
        .map_err(|source| ServiceError::Bind { addr: addr.clone(), source })?;
    tracing::info!(addr = %listener.local_addr().map_err(ServiceError::Serve)?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(ServiceError::Serve)
}
