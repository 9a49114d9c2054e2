//! Wiki documents to HTML.

use super::{Html, Linker, Target};
use crate::db::{join_path, DocIndex};
use crate::wiki::{Block, FileKind, Inline, ListItem, ListKind, TagEntry, WikiDoc};

/// Where a fragment is rendered: the page linker plus the directory and
/// file that relative references in the text are taken from.
pub(crate) struct Scope<'a> {
    pub index: &'a DocIndex,
    pub linker: &'a Linker,
    pub dir: &'a str,
    pub file: Option<&'a str>,
}

pub fn render_wiki(
    doc: &WikiDoc,
    index: &DocIndex,
    linker: &Linker,
    dir: &str,
    file: Option<&str>,
) -> String {
    let scope = Scope {
        index,
        linker,
        dir,
        file,
    };
    let mut h = Html::new();
    blocks(&doc.blocks, &scope, &mut h);
    h.finish()
}

pub(crate) fn blocks(bs: &[Block], s: &Scope, h: &mut Html) {
    for b in bs {
        block(b, s, h);
    }
}

fn block(b: &Block, s: &Scope, h: &mut Html) {
    match b {
        Block::Paragraph(v) => {
            h.open("p", &[]);
            inlines(v, s, h);
            h.close("p").newline();
        }
        Block::CodeBlock(code) => {
            // The inner element keeps a leading newline from being eaten
            // by HTML parsers.
            h.open("pre", &[("class", "code")])
                .elem("code", &[], code)
                .close("pre")
                .newline();
        }
        Block::List { kind, items } => list(*kind, items, s, h),
        Block::TagSection(entries) => tags(entries, s, h),
    }
}

fn list(kind: ListKind, items: &[ListItem], s: &Scope, h: &mut Html) {
    let tag = match kind {
        ListKind::Bulleted => "ul",
        ListKind::Numbered => "ol",
        ListKind::Description => "dl",
    };
    h.open(tag, &[]).newline();
    for item in items {
        if kind == ListKind::Description {
            h.open("dt", &[]);
            inlines(item.label.as_deref().unwrap_or_default(), s, h);
            h.close("dt").open("dd", &[]);
            inlines(&item.content, s, h);
            blocks(&item.children, s, h);
            h.close("dd").newline();
        } else {
            h.open("li", &[]);
            inlines(&item.content, s, h);
            blocks(&item.children, s, h);
            h.close("li").newline();
        }
    }
    h.close(tag).newline();
}

/// Tags as a definition list, one term per run of equal keywords.
pub(crate) fn tags(entries: &[TagEntry], s: &Scope, h: &mut Html) {
    h.open("dl", &[("class", "tags")]).newline();
    let mut prev = None;
    for e in entries {
        if prev != Some(e.keyword) {
            h.elem("dt", &[("class", e.keyword.as_str())], e.keyword.title())
                .newline();
            prev = Some(e.keyword);
        }
        h.open("dd", &[("class", e.keyword.as_str())]);
        inlines(&e.content, s, h);
        h.close("dd").newline();
    }
    h.close("dl").newline();
}

pub(crate) fn inlines(v: &[Inline], s: &Scope, h: &mut Html) {
    for i in v {
        inline(i, s, h);
    }
}

fn inline(i: &Inline, s: &Scope, h: &mut Html) {
    match i {
        Inline::Text(t) => {
            h.text(t);
        }
        Inline::Bold(v) => {
            h.open("b", &[]);
            inlines(v, s, h);
            h.close("b");
        }
        Inline::Italic(v) => {
            h.open("i", &[]);
            inlines(v, s, h);
            h.close("i");
        }
        Inline::Code(c) => {
            h.elem("code", &[], c);
        }
        Inline::ArgRef(a) => {
            h.elem("var", &[("class", "argref")], a);
        }
        Inline::PredLink(spec) => match resolve_pred(s.index, s.file, spec) {
            Some(t) => {
                h.elem(
                    "a",
                    &[("class", "pred-link"), ("href", &s.linker.href(&t))],
                    spec,
                );
            }
            None => {
                h.elem("span", &[("class", "pred-ref")], spec);
            }
        },
        Inline::FileLink { path, kind } => match resolve_file(s.index, s.dir, path, *kind) {
            Some(t) => {
                h.elem(
                    "a",
                    &[("class", "file-link"), ("href", &s.linker.href(&t))],
                    path,
                );
            }
            None => {
                h.elem("span", &[("class", "file-ref")], path);
            }
        },
        Inline::Image { path, inline } => {
            let class = if *inline { "inline" } else { "image" };
            match normalize_rel(s.dir, path) {
                Some(p) => {
                    h.void(
                        "img",
                        &[
                            ("class", class),
                            ("src", &s.linker.href(&Target::Raw(p))),
                            ("alt", path),
                        ],
                    );
                }
                None => {
                    h.elem("span", &[("class", "file-ref")], path);
                }
            }
        }
    }
}

/// Page and anchor documenting `spec` (`[Module:]Name/Arity` or
/// `Name//Arity`). Documented predicates win over merely defined ones and
/// the current file is tried first.
pub(crate) fn resolve_pred(index: &DocIndex, current: Option<&str>, spec: &str) -> Option<Target> {
    let (module, ind) = match spec.split_once(':') {
        Some((m, rest)) => (Some(m), rest),
        None => (None, spec),
    };
    let candidates = || {
        current
            .and_then(|c| index.files.get(c))
            .into_iter()
            .chain(
                index
                    .files
                    .values()
                    .filter(move |f| Some(f.path.as_str()) != current),
            )
            .filter(move |f| module.is_none() || f.module.module_name.as_deref() == module)
    };
    let found = candidates()
        .find(|f| f.pred(ind).is_some())
        .or_else(|| candidates().find(|f| f.xref.defined.contains(ind)))?;
    Some(Target::File {
        path: found.path.clone(),
        anchor: Some(ind.to_string()),
    })
}

fn resolve_file(index: &DocIndex, dir: &str, path: &str, kind: FileKind) -> Option<Target> {
    let p = normalize_rel(dir, path)?;
    match kind {
        FileKind::Prolog if index.files.contains_key(&p) => Some(Target::file(&p)),
        FileKind::Wiki if index.texts.contains_key(&p) => Some(Target::Text(p)),
        _ => None,
    }
}

/// Root-relative form of `path` taken relative to `dir`, or `None` when
/// it leaves the tree.
pub(crate) fn normalize_rel(dir: &str, path: &str) -> Option<String> {
    let joined = if path.starts_with('/') {
        path.to_string()
    } else {
        join_path(dir, path)
    };
    let mut parts: Vec<&str> = Vec::new();
    for seg in joined.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop()?;
            }
            s => parts.push(s),
        }
    }
    (!parts.is_empty()).then(|| parts.join("/"))
}
