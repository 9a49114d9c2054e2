//! Link targets and their URLs in the live and static layouts.

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

/// Characters kept verbatim in path segments and fragments.
const KEEP: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'_')
    .remove(b'-')
    .remove(b'.')
    .remove(b'~');
const FRAGMENT: &AsciiSet = &KEEP.remove(b'/');

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkMode {
    /// Served pages. `base` is prefixed to every absolute URL and has no
    /// trailing slash (empty for a server at the root).
    Live { base: String },
    /// Exported files with relative links.
    Static,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    /// Directory index; the root is `""`.
    Dir(String),
    File {
        path: String,
        anchor: Option<String>,
    },
    Source(String),
    /// Wiki text file.
    Text(String),
    /// A file served unchanged, such as an image.
    Raw(String),
    Asset(String),
    Search(String),
}

impl Target {
    pub fn file(path: &str) -> Target {
        Target::File {
            path: path.to_string(),
            anchor: None,
        }
    }

    /// Output file of this target in an exported tree.
    pub fn static_path(&self) -> Option<String> {
        Some(match self {
            Target::Dir(d) if d.is_empty() => "index.html".to_string(),
            Target::Dir(d) => format!("{d}/index.html"),
            Target::File { path, .. } => format!("{path}.html"),
            Target::Source(p) => format!("{p}.src.html"),
            Target::Text(p) => format!("{p}.html"),
            Target::Raw(p) => p.clone(),
            Target::Asset(a) => format!("assets/{a}"),
            Target::Search(_) => return None,
        })
    }

    fn anchor(&self) -> Option<&str> {
        match self {
            Target::File { anchor, .. } => anchor.as_deref(),
            _ => None,
        }
    }
}

pub fn encode_path(path: &str) -> String {
    path.split('/')
        .map(|s| utf8_percent_encode(s, KEEP).to_string())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn encode_fragment(frag: &str) -> String {
    utf8_percent_encode(frag, FRAGMENT).to_string()
}

pub fn encode_query(value: &str) -> String {
    utf8_percent_encode(value, KEEP).to_string()
}

/// Builds URLs for links that appear on one page.
#[derive(Debug, Clone)]
pub struct Linker {
    pub mode: LinkMode,
    /// The page being rendered.
    pub page: Target,
}

impl Linker {
    pub fn new(mode: LinkMode, page: Target) -> Self {
        Linker { mode, page }
    }

    pub fn href(&self, target: &Target) -> String {
        let mut url = match &self.mode {
            LinkMode::Live { base } => format!("{base}{}", live_path(target)),
            LinkMode::Static => match target.static_path() {
                Some(p) => relative(&self.page_dir(), &encode_path(&p)),
                None => "#".to_string(),
            },
        };
        if let Some(a) = target.anchor() {
            url.push('#');
            url.push_str(&encode_fragment(a));
        }
        url
    }

    /// Directory of the page's own URL, in encoded form.
    fn page_dir(&self) -> String {
        let p = self
            .page
            .static_path()
            .map(|p| encode_path(&p))
            .unwrap_or_default();
        p.rsplit_once('/')
            .map_or(String::new(), |(d, _)| d.to_string())
    }

    /// Maps a URL produced by [`Linker::href`] to a layout-independent
    /// form. Anything else is returned unchanged.
    pub fn canonical(&self, url: &str) -> String {
        let (path, frag) = match url.split_once('#') {
            Some((p, f)) => (p, Some(f)),
            None => (url, None),
        };
        let canon = match &self.mode {
            LinkMode::Live { base } => path.strip_prefix(base.as_str()).and_then(canonical_live),
            LinkMode::Static => canonical_static(&resolve(&self.page_dir(), path)),
        };
        match (canon, frag) {
            (Some(c), Some(f)) => format!("{c}#{f}"),
            (Some(c), None) => c,
            (None, _) => url.to_string(),
        }
    }
}

fn live_path(target: &Target) -> String {
    match target {
        Target::Dir(d) if d.is_empty() => "/doc/".to_string(),
        Target::Dir(d) => format!("/doc/{}/", encode_path(d)),
        Target::File { path: p, .. } | Target::Text(p) | Target::Raw(p) => {
            format!("/doc/{}", encode_path(p))
        }
        Target::Source(p) => format!("/source/{}", encode_path(p)),
        Target::Asset(a) => format!("/assets/{}", encode_path(a)),
        Target::Search(q) => format!("/search?for={}", encode_query(q)),
    }
}

fn canonical_live(path: &str) -> Option<String> {
    if let Some(rest) = path.strip_prefix("/doc/") {
        return Some(match rest.strip_suffix('/') {
            Some(d) => format!("dir:{d}"),
            None if rest.is_empty() => "dir:".to_string(),
            None => format!("doc:{rest}"),
        });
    }
    if let Some(rest) = path.strip_prefix("/source/") {
        return Some(format!("src:{rest}"));
    }
    path.strip_prefix("/assets/").map(|a| format!("asset:{a}"))
}

fn canonical_static(path: &str) -> Option<String> {
    if path == "index.html" {
        return Some("dir:".to_string());
    }
    if let Some(d) = path.strip_suffix("/index.html") {
        return Some(format!("dir:{d}"));
    }
    if let Some(a) = path.strip_prefix("assets/") {
        return Some(format!("asset:{a}"));
    }
    if let Some(p) = path.strip_suffix(".src.html") {
        return Some(format!("src:{p}"));
    }
    Some(format!(
        "doc:{}",
        path.strip_suffix(".html").unwrap_or(path)
    ))
}

/// Relative URL from directory `from` to `to`, both root-relative.
fn relative(from: &str, to: &str) -> String {
    let from: Vec<&str> = from.split('/').filter(|s| !s.is_empty()).collect();
    let to_parts: Vec<&str> = to.split('/').collect();
    let common = from
        .iter()
        .zip(&to_parts)
        .take_while(|(a, b)| a == b)
        .count();
    let common = common.min(to_parts.len().saturating_sub(1));
    let mut out: Vec<&str> = vec![".."; from.len() - common];
    out.extend(&to_parts[common..]);
    out.join("/")
}

/// Resolves a relative URL against directory `dir`.
fn resolve(dir: &str, rel: &str) -> String {
    let mut parts: Vec<&str> = dir.split('/').filter(|s| !s.is_empty()).collect();
    for seg in rel.split('/') {
        match seg {
            ".." => {
                parts.pop();
            }
            "." => {}
            s => parts.push(s),
        }
    }
    parts.join("/")
}

/// Replaces every `href`, `src` and `action` value with its canonical
/// form so that live and exported pages can be compared.
pub fn normalize_links(html: &str, linker: &Linker) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    loop {
        let next = [" href=\"", " src=\"", " action=\""]
            .iter()
            .filter_map(|a| rest.find(a).map(|i| (i, a.len())))
            .min();
        let Some((i, len)) = next else { break };
        let start = i + len;
        let Some(end) = rest[start..].find('"') else {
            break;
        };
        out.push_str(&rest[..start]);
        out.push_str(&linker.canonical(&rest[start..start + end].replace("&amp;", "&")));
        rest = &rest[start + end..];
    }
    out.push_str(rest);
    out
}

pub const CONTROL_OPEN: &str = "<!--ctl-->";
pub const CONTROL_CLOSE: &str = "<!--/ctl-->";

/// Removes interactive controls, which only exist on served pages.
pub fn strip_controls(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(i) = rest.find(CONTROL_OPEN) {
        out.push_str(&rest[..i]);
        match rest[i..].find(CONTROL_CLOSE) {
            Some(j) => rest = &rest[i + j + CONTROL_CLOSE.len()..],
            None => {
                rest = "";
                break;
            }
        }
    }
    out.push_str(rest);
    out
}
