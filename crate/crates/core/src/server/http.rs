//! HTTP listener around [`DocServer`].

use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Body;
use axum::extract::{ConnectInfo, State};
use axum::http::{header, HeaderValue, Method as HttpMethod, StatusCode, Uri};
use axum::Router;
use tokio::sync::oneshot;

use super::{DocServer, Method, Request};

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("not permitted to listen on port {0}")]
    BindDenied(u16),
    #[error("cannot start server: {0}")]
    Io(#[from] std::io::Error),
}

/// A server running on its own thread. Dropping it stops the server.
#[derive(Debug)]
pub struct RunningServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl RunningServer {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Blocks until the server stops.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        self.stop();
    }
}

async fn dispatch(
    State(server): State<Arc<DocServer>>,
    ConnectInfo(peer): ConnectInfo<SocketAddr>,
    method: HttpMethod,
    uri: Uri,
) -> axum::response::Response {
    let method = match method {
        HttpMethod::GET | HttpMethod::HEAD => Method::Get,
        HttpMethod::POST => Method::Post,
        _ => Method::Other,
    };
    let target = uri
        .path_and_query()
        .map_or("/", |pq| pq.as_str())
        .to_string();
    let req = Request::new(method, &target, peer.ip());
    let res = match tokio::task::spawn_blocking(move || server.handle(&req)).await {
        Ok(r) => r,
        Err(_) => super::Response::new(500, super::TEXT, "Internal error\n"),
    };
    let mut out = axum::response::Response::new(Body::from(res.body));
    *out.status_mut() =
        StatusCode::from_u16(res.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let headers = out.headers_mut();
    headers.insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static(res.content_type),
    );
    for (name, value) in res.headers {
        if let Ok(v) = HeaderValue::from_str(&value) {
            headers.insert(name, v);
        }
    }
    out
}

/// Binds the configured address and serves on a background thread. The
/// call returns once the socket is listening.
pub fn serve(server: DocServer) -> Result<RunningServer, ServerError> {
    let port = server.config.port;
    let listener = TcpListener::bind((server.config.bind, port)).map_err(|e| match e.kind() {
        ErrorKind::AddrInUse => ServerError::PortInUse(port),
        ErrorKind::PermissionDenied => ServerError::BindDenied(port),
        _ => ServerError::Io(e),
    })?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = Router::new()
        .fallback(dispatch)
        .with_state(Arc::new(server));
    let thread = std::thread::Builder::new()
        .name("plscribe-server".into())
        .spawn(move || {
            runtime.block_on(async move {
                let listener = match tokio::net::TcpListener::from_std(listener) {
                    Ok(l) => l,
                    Err(e) => {
                        log::error!("cannot listen: {e}");
                        return;
                    }
                };
                let service = app.into_make_service_with_connect_info::<SocketAddr>();
                let shutdown = async {
                    let _ = rx.await;
                };
                if let Err(e) = axum::serve(listener, service)
                    .with_graceful_shutdown(shutdown)
                    .await
                {
                    log::error!("server stopped: {e}");
                }
            });
        })?;
    log::info!("serving documentation at http://{addr}/doc/");
    Ok(RunningServer {
        addr,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}
