//! Documentation server.
//!
//! [`DocServer::handle`] maps a request to a response without any I/O
//! besides index reloads and editor launches; [`serve`] runs it behind an
//! HTTP listener on a background thread.

mod http;

use std::net::{IpAddr, Ipv4Addr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use percent_encoding::percent_decode_str;
use serde::Serialize;

use crate::db::{search, DocIndex, IndexHandle, PredDoc};
use crate::html::{
    render_dir_index, render_error_page, render_file_page, render_search_page, render_source_page,
    render_text_page, Page, RenderOptions, ASSETS,
};
use crate::wiki::IMAGE_EXTENSIONS;

pub use http::{serve, RunningServer, ServerError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerConfig {
    pub port: u16,
    /// Address to listen on.
    pub bind: IpAddr,
    pub root: PathBuf,
    /// Peers allowed to read pages. Entries are addresses, `localhost`,
    /// or dotted patterns with `*` segments such as `192.168.1.*`.
    pub allow: Vec<String>,
    /// Program and arguments with `{file}` and `{line}` placeholders.
    pub editor_command: String,
    pub public_only_default: bool,
    /// Path prefix the server is mounted under, without trailing slash.
    pub base_url: String,
}

impl ServerConfig {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ServerConfig {
            port: 4000,
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            root: root.into(),
            allow: vec!["localhost".to_string()],
            editor_command: default_editor_command(),
            public_only_default: true,
            base_url: String::new(),
        }
    }
}

/// `$VISUAL` or `$EDITOR` (falling back to `vi`) in `+line file` form.
pub fn default_editor_command() -> String {
    let editor = ["VISUAL", "EDITOR"]
        .iter()
        .filter_map(|v| std::env::var(v).ok())
        .find(|e| !e.trim().is_empty())
        .unwrap_or_else(|| "vi".to_string());
    format!("{editor} +{{line}} {{file}}")
}

/// Argument vector for opening `file` at `line`. A template without a
/// `{file}` placeholder gets `+line file` appended.
pub fn editor_argv(template: &str, file: &Path, line: usize) -> Vec<String> {
    let file = file.to_string_lossy();
    let mut argv: Vec<String> = template
        .split_whitespace()
        .map(|w| {
            w.replace("{file}", &file)
                .replace("{line}", &line.to_string())
        })
        .collect();
    if !template.contains("{file}") {
        argv.push(format!("+{line}"));
        argv.push(file.into_owned());
    }
    argv
}

fn canonical(ip: IpAddr) -> IpAddr {
    match ip {
        IpAddr::V6(v6) => v6.to_ipv4_mapped().map_or(ip, IpAddr::V4),
        v4 => v4,
    }
}

pub fn is_loopback(peer: IpAddr) -> bool {
    canonical(peer).is_loopback()
}

/// Whether `peer` matches one allow-list entry.
pub fn allow_matches(pattern: &str, peer: IpAddr) -> bool {
    let peer = canonical(peer);
    match pattern.trim() {
        "*" => true,
        "localhost" => peer.is_loopback(),
        p => match p.parse::<IpAddr>() {
            Ok(ip) => canonical(ip) == peer,
            Err(_) => {
                let IpAddr::V4(v4) = peer else { return false };
                let want: Vec<&str> = p.split('.').collect();
                want.len() == 4
                    && want
                        .iter()
                        .zip(v4.octets())
                        .all(|(w, o)| *w == "*" || w.parse() == Ok(o))
            }
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub method: Method,
    /// Path as sent, still percent-encoded.
    pub path: String,
    /// Raw query string without `?`.
    pub query: String,
    pub peer: IpAddr,
}

impl Request {
    pub fn get(target: &str, peer: IpAddr) -> Self {
        Self::new(Method::Get, target, peer)
    }

    pub fn post(target: &str, peer: IpAddr) -> Self {
        Self::new(Method::Post, target, peer)
    }

    /// `target` is a path with an optional query string.
    pub fn new(method: Method, target: &str, peer: IpAddr) -> Self {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        Request {
            method,
            path: path.to_string(),
            query: query.to_string(),
            peer,
        }
    }

    /// First value of a query parameter, decoded.
    pub fn param(&self, name: &str) -> Option<String> {
        self.query.split('&').find_map(|kv| {
            let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
            (decode(k) == name).then(|| decode(v))
        })
    }
}

fn decode(s: &str) -> String {
    percent_decode_str(&s.replace('+', " "))
        .decode_utf8_lossy()
        .into_owned()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    /// Extra headers such as `Location`.
    pub headers: Vec<(&'static str, String)>,
    pub body: Vec<u8>,
}

const HTML: &str = "text/html; charset=utf-8";
const JSON: &str = "application/json";
const TEXT: &str = "text/plain; charset=utf-8";

impl Response {
    fn new(status: u16, content_type: &'static str, body: impl Into<Vec<u8>>) -> Self {
        Response {
            status,
            content_type,
            headers: Vec::new(),
            body: body.into(),
        }
    }

    fn page(status: u16, page: Page) -> Self {
        Response::new(status, HTML, page.html)
    }

    fn json<T: Serialize>(status: u16, value: &T) -> Self {
        Response::new(status, JSON, serde_json::to_vec(value).unwrap_or_default())
    }

    fn redirect(to: String) -> Self {
        let mut r = Response::new(302, TEXT, format!("See {to}\n"));
        r.headers.push(("Location", to));
        r
    }

    pub fn body_text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

/// Starts an external program without waiting for it.
pub trait Launcher: Send + Sync {
    fn launch(&self, argv: &[String]) -> std::io::Result<()>;
}

/// Runs commands as child processes. A thread reaps each child when it
/// exits.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProcessLauncher;

impl Launcher for ProcessLauncher {
    fn launch(&self, argv: &[String]) -> std::io::Result<()> {
        let (prog, args) = argv.split_first().ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty editor command")
        })?;
        let mut child = std::process::Command::new(prog).args(args).spawn()?;
        std::thread::spawn(move || {
            let _ = child.wait();
        });
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct Generation {
    generation: u64,
}

#[derive(Debug, Serialize)]
struct ApiError<'a> {
    error: &'a str,
}

pub struct DocServer {
    pub config: ServerConfig,
    pub index: Arc<IndexHandle>,
    launcher: Box<dyn Launcher>,
}

impl DocServer {
    pub fn new(config: ServerConfig, index: Arc<IndexHandle>) -> Self {
        Self::with_launcher(config, index, Box::new(ProcessLauncher))
    }

    pub fn with_launcher(
        config: ServerConfig,
        index: Arc<IndexHandle>,
        launcher: Box<dyn Launcher>,
    ) -> Self {
        DocServer {
            config,
            index,
            launcher,
        }
    }

    pub fn is_allowed(&self, peer: IpAddr) -> bool {
        is_loopback(peer) || self.config.allow.iter().any(|p| allow_matches(p, peer))
    }

    fn options(&self, req: &Request) -> RenderOptions {
        let mut opts = RenderOptions::live(&self.config.base_url);
        opts.public_only = match req.param("public_only").as_deref() {
            Some("true") => true,
            Some("false") => false,
            _ => self.config.public_only_default,
        };
        opts.edit_enabled = is_loopback(req.peer);
        opts
    }

    fn error(&self, status: u16, title: &str, message: &str, req: &Request) -> Response {
        Response::page(
            status,
            render_error_page(title, message, &self.options(req)),
        )
    }

    fn not_found(&self, req: &Request) -> Response {
        self.error(
            404,
            "Not found",
            &format!("Nothing is documented at {}.", req.path),
            req,
        )
    }

    pub fn handle(&self, req: &Request) -> Response {
        if !self.is_allowed(req.peer) {
            return Response::new(403, TEXT, "Access denied\n");
        }
        let Some(path) = req.path.strip_prefix(self.config.base_url.as_str()) else {
            return self.not_found(req);
        };
        let path = if path.is_empty() { "/" } else { path };
        let is_action = matches!(path, "/edit" | "/reload");
        match (req.method, is_action) {
            (Method::Post, true) => {}
            (_, true) | (Method::Post | Method::Other, false) => {
                return Response::new(405, TEXT, "Method not allowed\n");
            }
            (Method::Get, false) => {}
        }
        if is_action && !is_loopback(req.peer) {
            return Response::new(403, TEXT, "Only available to local clients\n");
        }
        match path {
            "/edit" => return self.edit(req),
            "/reload" => return self.reload(),
            "/" => return Response::redirect(format!("{}/doc/", self.config.base_url)),
            "/search" => return self.search_page(req),
            "/api/search" => return self.api_search(req),
            _ => {}
        }
        let index = self.index.snapshot();
        if let Some(rest) = path.strip_prefix("/doc/") {
            self.doc(&index, &decode_path(rest), req)
        } else if let Some(rest) = path.strip_prefix("/source/") {
            match render_source_page(&index, &decode_path(rest), &self.options(req)) {
                Ok(p) => Response::page(200, p),
                Err(_) => self.not_found(req),
            }
        } else if let Some(name) = path.strip_prefix("/assets/") {
            match ASSETS.iter().find(|(n, _)| *n == name) {
                Some((n, content)) => Response::new(200, content_type(n), *content),
                None => self.not_found(req),
            }
        } else {
            self.not_found(req)
        }
    }

    fn doc(&self, index: &DocIndex, rel: &str, req: &Request) -> Response {
        let opts = self.options(req);
        let page = if rel.is_empty() || rel.ends_with('/') {
            render_dir_index(index, rel.trim_end_matches('/'), &opts).ok()
        } else if index.files.contains_key(rel) {
            render_file_page(index, rel, &opts).ok()
        } else if index.texts.contains_key(rel) {
            render_text_page(index, rel, &opts).ok()
        } else if index.dirs.contains(rel) {
            return Response::redirect(format!(
                "{}/doc/{}/",
                self.config.base_url,
                crate::html::encode_path(rel)
            ));
        } else {
            return self.raw_file(index, rel, req);
        };
        match page {
            Some(p) => Response::page(200, p),
            None => self.not_found(req),
        }
    }

    /// Images next to the sources, so that pages can show them.
    fn raw_file(&self, index: &DocIndex, rel: &str, req: &Request) -> Response {
        let safe = rel.split('/').all(|s| !s.is_empty() && !s.starts_with('.'));
        let ext = rel
            .rsplit_once('.')
            .map(|(_, e)| e.to_ascii_lowercase())
            .unwrap_or_default();
        if !safe || !IMAGE_EXTENSIONS.contains(&ext.as_str()) {
            return self.not_found(req);
        }
        match std::fs::read(index.root.join(rel)) {
            Ok(bytes) => Response::new(200, content_type(rel), bytes),
            Err(_) => self.not_found(req),
        }
    }

    fn include_private(&self, req: &Request) -> bool {
        match req.param("in").as_deref() {
            Some("all") => true,
            Some("public") => false,
            _ => !self.options(req).public_only,
        }
    }

    fn search_page(&self, req: &Request) -> Response {
        let query = req.param("for").unwrap_or_default();
        let index = self.index.snapshot();
        Response::page(
            200,
            render_search_page(
                &index,
                &query,
                self.include_private(req),
                &self.options(req),
            ),
        )
    }

    fn api_search(&self, req: &Request) -> Response {
        let query = req.param("for").unwrap_or_default();
        let index = self.index.snapshot();
        Response::json(200, &search(&index, &query, self.include_private(req)))
    }

    fn find_pred<'a>(index: &'a DocIndex, ind: &str, file: Option<&str>) -> Option<&'a PredDoc> {
        match file {
            Some(f) => index.files.get(f)?.pred(ind),
            None => index.files.values().find_map(|f| f.pred(ind)),
        }
    }

    fn edit(&self, req: &Request) -> Response {
        let Some(ind) = req.param("pred") else {
            return Response::json(
                400,
                &ApiError {
                    error: "missing pred parameter",
                },
            );
        };
        let index = self.index.snapshot();
        let Some(pd) = Self::find_pred(&index, &ind, req.param("file").as_deref()) else {
            return Response::json(
                404,
                &ApiError {
                    error: "unknown predicate",
                },
            );
        };
        let argv = editor_argv(
            &self.config.editor_command,
            &index.root.join(&pd.file),
            pd.line,
        );
        log::info!("edit {ind}: {}", argv.join(" "));
        match self.launcher.launch(&argv) {
            Ok(()) => Response::new(202, TEXT, "Editor started\n"),
            Err(e) => {
                log::warn!("cannot start editor: {e}");
                Response::json(
                    500,
                    &ApiError {
                        error: "cannot start editor",
                    },
                )
            }
        }
    }

    fn reload(&self) -> Response {
        match self.index.reload() {
            Ok(generation) => Response::json(200, &Generation { generation }),
            Err(e) => {
                log::warn!("reload failed: {e}");
                Response::json(
                    500,
                    &ApiError {
                        error: "reload failed",
                    },
                )
            }
        }
    }
}

fn decode_path(p: &str) -> String {
    percent_decode_str(p).decode_utf8_lossy().into_owned()
}

fn content_type(name: &str) -> &'static str {
    match name
        .rsplit_once('.')
        .map(|(_, e)| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("css") => "text/css; charset=utf-8",
        Some("js") => "text/javascript; charset=utf-8",
        Some("png") => "image/png",
        Some("gif") => "image/gif",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("svg") => "image/svg+xml",
        _ => "application/octet-stream",
    }
}
