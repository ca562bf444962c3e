use std::future::Future;

use tokio::task::JoinHandle;
use tokio_util::sync::CancellationToken;

/// A spawned bus participant that runs until cancelled.
#[derive(Debug)]
pub struct NodeHandle {
    name: String,
    cancel: CancellationToken,
    task: JoinHandle<()>,
}

impl NodeHandle {
    /// Spawns `body`, which should return once the token is cancelled.
    pub fn spawn<F, Fut>(name: impl Into<String>, body: F) -> Self
    where
        F: FnOnce(CancellationToken) -> Fut,
        Fut: Future<Output = ()> + Send + 'static,
    {
        let cancel = CancellationToken::new();
        Self::with_token(name, cancel.clone(), body(cancel))
    }

    /// Spawns `task` under an existing token.
    pub fn with_token<Fut>(name: impl Into<String>, cancel: CancellationToken, task: Fut) -> Self
    where
        Fut: Future<Output = ()> + Send + 'static,
    {
        Self { name: name.into(), cancel, task: tokio::spawn(task) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_finished(&self) -> bool {
        self.task.is_finished()
    }

    pub async fn stop(self) {
        self.cancel.cancel();
        if let Err(e) = self.task.await {
            tracing::warn!(node = %self.name, "node task ended abnormally: {e}");
        }
    }

    /// Waits for the node to end on its own.
    pub async fn join(self) {
        let _ = self.task.await;
    }
}
