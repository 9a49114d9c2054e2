//! HTML pages for documentation, source listings and search results.
//!
//! Markup is produced with a small builder that escapes every piece of
//! text and every attribute value, so pages are well-formed XML as well
//! as HTML5.

mod export;
mod links;
mod pages;
mod wiki;

use std::fmt::Write as _;

pub use export::{export_static, ExportError, ExportSummary};
pub use links::{
    encode_fragment, encode_path, encode_query, normalize_links, strip_controls, LinkMode, Linker,
    Target, CONTROL_CLOSE, CONTROL_OPEN,
};
pub use pages::{
    render_dir_index, render_error_page, render_file_page, render_pred, render_pred_group,
    render_search_page, render_source_page, render_text_page, Page,
};
pub use wiki::render_wiki;

pub const STYLESHEET: &str = include_str!("../../assets/pldoc.css");
pub const UI_SCRIPT: &str = include_str!("../../assets/ui.js");

/// Name and content of every shipped asset.
pub const ASSETS: [(&str, &str); 2] = [("pldoc.css", STYLESHEET), ("ui.js", UI_SCRIPT)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    /// Hide private predicates (zoomed out).
    pub public_only: bool,
    /// Offer edit and reload actions. Only set for loopback clients.
    pub edit_enabled: bool,
    /// Include search, zoom and script elements. Off for exported files.
    pub controls: bool,
    pub mode: LinkMode,
}

impl RenderOptions {
    pub fn live(base: &str) -> Self {
        RenderOptions {
            public_only: true,
            edit_enabled: false,
            controls: true,
            mode: LinkMode::Live {
                base: base.trim_end_matches('/').to_string(),
            },
        }
    }

    pub fn exported(public_only: bool) -> Self {
        RenderOptions {
            public_only,
            edit_enabled: false,
            controls: false,
            mode: LinkMode::Static,
        }
    }

    pub fn linker(&self, page: Target) -> Linker {
        Linker::new(self.mode.clone(), page)
    }
}

/// Escapes text for element content and attribute values.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    escape_into(text, &mut out);
    out
}

fn escape_into(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            // Not allowed in XML documents.
            c if (c as u32) < 0x20 && !matches!(c, '\n' | '\t' | '\r') => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
}

/// Markup under construction.
#[derive(Debug, Default)]
pub(crate) struct Html {
    buf: String,
}

impl Html {
    pub(crate) fn new() -> Self {
        Html::default()
    }

    fn start_tag(&mut self, tag: &str, attrs: &[(&str, &str)]) {
        self.buf.push('<');
        self.buf.push_str(tag);
        for (k, v) in attrs {
            let _ = write!(self.buf, " {k}=\"");
            escape_into(v, &mut self.buf);
            self.buf.push('"');
        }
    }

    pub(crate) fn open(&mut self, tag: &str, attrs: &[(&str, &str)]) -> &mut Self {
        self.start_tag(tag, attrs);
        self.buf.push('>');
        self
    }

    pub(crate) fn close(&mut self, tag: &str) -> &mut Self {
        let _ = write!(self.buf, "</{tag}>");
        self
    }

    /// An element without content, such as `img` or `meta`.
    pub(crate) fn void(&mut self, tag: &str, attrs: &[(&str, &str)]) -> &mut Self {
        self.start_tag(tag, attrs);
        self.buf.push_str(" />");
        self
    }

    pub(crate) fn text(&mut self, text: &str) -> &mut Self {
        escape_into(text, &mut self.buf);
        self
    }

    pub(crate) fn elem(&mut self, tag: &str, attrs: &[(&str, &str)], text: &str) -> &mut Self {
        self.open(tag, attrs).text(text).close(tag)
    }

    /// Appends markup produced by another builder.
    pub(crate) fn append(&mut self, other: Html) -> &mut Self {
        self.buf.push_str(&other.buf);
        self
    }

    pub(crate) fn newline(&mut self) -> &mut Self {
        self.buf.push('\n');
        self
    }

    /// Starts a region that exported pages leave out.
    pub(crate) fn control_start(&mut self) -> &mut Self {
        self.buf.push_str(CONTROL_OPEN);
        self
    }

    pub(crate) fn control_end(&mut self) -> &mut Self {
        self.buf.push_str(CONTROL_CLOSE);
        self
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub(crate) fn finish(self) -> String {
        self.buf
    }
}
