//! Complete pages and the predicate fragments they are made of.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::wiki::{blocks, tags, Scope};
use super::{encode_query, Html, LinkMode, Linker, RenderOptions, Target};
use crate::comment::StructuredComment;
use crate::db::{parent_dir, search, DbError, DocIndex, FileDoc, HitKind, PredDoc, SearchHit};
use crate::header::{type_text, ModeDecl};
use crate::reader::write::quote_atom;
use crate::wiki::{parse_wiki, tag_section, Block};
use crate::xref::{colour_source, Builtins, ColourClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Page {
    pub title: String,
    /// Labels from the root down to this page.
    pub breadcrumb: Vec<String>,
    /// Markup of the page content, without the surrounding chrome.
    pub body: String,
    /// URLs of referenced stylesheets and scripts.
    pub assets: Vec<String>,
    /// The complete document.
    pub html: String,
}

fn builtins() -> &'static Builtins {
    static B: OnceLock<Builtins> = OnceLock::new();
    B.get_or_init(Builtins::default)
}

type Crumbs = Vec<(String, Option<Target>)>;

fn root_label(index: &DocIndex) -> String {
    index
        .root
        .file_name()
        .map_or_else(|| "root".to_string(), |n| n.to_string_lossy().into_owned())
}

/// Links to the root and every directory above `path`. The last entry
/// names the page itself and is not linked.
fn crumbs(index: &DocIndex, path: &str) -> Crumbs {
    let mut out = vec![(root_label(index), Some(Target::Dir(String::new())))];
    let parts: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    for (i, part) in parts.iter().enumerate() {
        let target = (i + 1 < parts.len()).then(|| Target::Dir(parts[..=i].join("/")));
        out.push((part.to_string(), target));
    }
    if parts.is_empty() {
        out[0].1 = None;
    }
    out
}

fn action_url(opts: &RenderOptions, name: &str) -> String {
    match &opts.mode {
        LinkMode::Live { base } => format!("{base}/{name}"),
        LinkMode::Static => "#".to_string(),
    }
}

struct Shell<'a> {
    index_generation: Option<u64>,
    opts: &'a RenderOptions,
    linker: Linker,
    title: String,
    crumbs: Crumbs,
    /// Links shown in the header bar on every rendering.
    nav: Html,
    zoomable: bool,
}

impl Shell<'_> {
    fn finish(self, body: Html) -> Page {
        let Shell {
            index_generation,
            opts,
            linker,
            title,
            crumbs,
            nav,
            zoomable,
        } = self;
        let css = linker.href(&Target::Asset("pldoc.css".into()));
        let js = linker.href(&Target::Asset("ui.js".into()));
        let mut assets = vec![css.clone()];
        let mut h = Html::new();
        h.open("head", &[]).newline();
        h.void("meta", &[("charset", "utf-8")]).newline();
        if let Some(g) = index_generation {
            h.void(
                "meta",
                &[("name", "generation"), ("content", &g.to_string())],
            )
            .newline();
        }
        h.elem("title", &[], &title).newline();
        h.void(
            "link",
            &[("rel", "stylesheet"), ("type", "text/css"), ("href", &css)],
        )
        .newline();
        if opts.controls {
            assets.push(js.clone());
            h.control_start()
                .open("script", &[("src", &js), ("defer", "defer")])
                .close("script")
                .newline();
            h.control_end();
        }
        h.close("head").newline().open("body", &[]).newline();

        h.open("div", &[("class", "navhdr")]).newline();
        h.open("span", &[("class", "crumbs")]);
        for (i, (label, target)) in crumbs.iter().enumerate() {
            if i > 0 {
                h.text(" / ");
            }
            match target {
                Some(t) => h.elem("a", &[("href", &linker.href(t))], label),
                None => h.elem("span", &[("class", "here")], label),
            };
        }
        h.close("span").newline();
        h.open("span", &[("class", "controls")]);
        h.append(nav);
        if opts.controls {
            h.control_start();
            let search = linker.href(&Target::Search(String::new()));
            let search = search.split('?').next().unwrap_or_default();
            h.open(
                "form",
                &[("class", "search"), ("method", "get"), ("action", search)],
            );
            h.void("input", &[("type", "text"), ("name", "for"), ("value", "")]);
            h.elem("button", &[("type", "submit")], "Search")
                .close("form");
            if zoomable {
                let here = linker.href(&linker.page);
                let (flag, label) = if opts.public_only {
                    ("false", "show private")
                } else {
                    ("true", "public only")
                };
                h.elem(
                    "a",
                    &[
                        ("class", "zoom"),
                        ("href", &format!("{here}?public_only={flag}")),
                    ],
                    label,
                );
            }
            if opts.edit_enabled {
                h.open(
                    "form",
                    &[
                        ("class", "reload"),
                        ("method", "post"),
                        ("action", &action_url(opts, "reload")),
                    ],
                );
                h.elem(
                    "button",
                    &[("type", "submit"), ("title", "Reload changed sources")],
                    "reload",
                );
                h.close("form");
            }
            h.control_end();
        }
        h.close("span").newline().close("div").newline();

        let body = body.finish();
        h.open("div", &[("class", "content")]).newline();
        h.buf.push_str(&body);
        h.close("div").newline();
        if let Some(g) = index_generation {
            h.elem(
                "div",
                &[("class", "footer")],
                &format!("Generated by plscribe from index generation {g}"),
            );
            h.newline();
        }
        h.close("body").newline();

        let html = format!(
            "<!DOCTYPE html>\n<html lang=\"en\">\n{}</html>\n",
            h.finish()
        );
        Page {
            title,
            breadcrumb: crumbs.into_iter().map(|c| c.0).collect(),
            body,
            assets,
            html,
        }
    }
}

fn shell<'a>(
    index: &DocIndex,
    opts: &'a RenderOptions,
    page: Target,
    title: String,
    crumbs: Crumbs,
) -> Shell<'a> {
    Shell {
        index_generation: Some(index.generation),
        opts,
        linker: opts.linker(page),
        title,
        crumbs,
        nav: Html::new(),
        zoomable: false,
    }
}

fn visible(p: &PredDoc, opts: &RenderOptions) -> bool {
    !opts.public_only || p.is_public
}

/// Predicate header such as `base64(+Plain, -Encoded) is det`.
fn mode_line(m: &ModeDecl, h: &mut Html) {
    h.elem("span", &[("class", "pred-name")], &quote_atom(&m.name));
    if !m.args.is_empty() {
        h.text("(");
        for (i, a) in m.args.iter().enumerate() {
            if i > 0 {
                h.text(", ");
            }
            h.open("span", &[("class", "arg")]);
            if let Some(mode) = a.mode {
                h.elem(
                    "span",
                    &[("class", "mode-char"), ("title", mode.description())],
                    mode.symbol(),
                );
            }
            h.elem("var", &[], &a.name);
            if let Some(t) = &a.type_ {
                h.text(":")
                    .elem("span", &[("class", "type")], &type_text(t));
            }
            h.close("span");
        }
        h.text(")");
    }
    if m.is_dcg {
        h.elem("span", &[("class", "dcg")], "//");
    }
    if let Some(d) = m.det {
        h.text(" ")
            .elem("span", &[("class", "det")], &format!("is {d}"));
    }
}

fn edit_control(p: &PredDoc, opts: &RenderOptions, h: &mut Html) {
    if !(opts.controls && opts.edit_enabled) {
        return;
    }
    let action = format!(
        "{}?pred={}&file={}",
        action_url(opts, "edit"),
        encode_query(&p.indicator),
        encode_query(&p.file)
    );
    h.control_start();
    h.open(
        "form",
        &[("class", "edit"), ("method", "post"), ("action", &action)],
    );
    h.elem(
        "button",
        &[("type", "submit"), ("title", "Edit this predicate")],
        "edit",
    );
    h.close("form").control_end();
}

fn comment_body(sc: &StructuredComment, arg_names: &[&str], scope: &Scope, h: &mut Html) {
    let doc = parse_wiki(&sc.body_text, arg_names);
    blocks(&doc.blocks, scope, h);
    for issue in &sc.tag_issues {
        h.elem("p", &[("class", "tag-issue")], &issue.text)
            .newline();
    }
    if let Some(Block::TagSection(entries)) = tag_section(&sc.tags, arg_names) {
        tags(&entries, scope, h);
    }
}

/// One comment documenting one or more predicates. All of `preds` must
/// share the same comment.
pub fn render_pred_group(
    preds: &[&PredDoc],
    index: &DocIndex,
    linker: &Linker,
    opts: &RenderOptions,
) -> String {
    let Some(first) = preds.first() else {
        return String::new();
    };
    let private = preds.iter().all(|p| !p.is_public);
    let class = if private { "pred private" } else { "pred" };
    let mut h = Html::new();
    h.open("div", &[("class", class)]).newline();
    for p in preds {
        for (k, m) in p.modes.iter().enumerate() {
            if k == 0 {
                h.open("div", &[("class", "pred-header"), ("id", &p.indicator)]);
            } else {
                h.open("div", &[("class", "pred-header")]);
            }
            h.open("span", &[("class", "modes")]);
            mode_line(m, &mut h);
            h.close("span");
            if k == 0 {
                edit_control(p, opts, &mut h);
            }
            h.close("div").newline();
        }
    }
    let arg_names: Vec<&str> = preds.iter().flat_map(|p| p.arg_names()).collect();
    let dir = parent_dir(&first.file);
    let scope = Scope {
        index,
        linker,
        dir,
        file: Some(&first.file),
    };
    let mut body = Html::new();
    comment_body(&first.comment, &arg_names, &scope, &mut body);
    if !body.is_empty() {
        h.open("div", &[("class", "pred-body")])
            .newline()
            .append(body)
            .close("div")
            .newline();
    }
    h.close("div").newline();
    h.finish()
}

pub fn render_pred(
    pd: &PredDoc,
    index: &DocIndex,
    linker: &Linker,
    opts: &RenderOptions,
) -> String {
    render_pred_group(&[pd], index, linker, opts)
}

/// Visible predicates of a file, grouped by shared comment.
fn pred_groups<'a>(f: &'a FileDoc, opts: &RenderOptions) -> Vec<Vec<&'a PredDoc>> {
    let mut groups: Vec<Vec<&PredDoc>> = Vec::new();
    for p in f.preds.iter().filter(|p| visible(p, opts)) {
        match groups.last_mut() {
            Some(g) if Arc::ptr_eq(&g[0].comment, &p.comment) => g.push(p),
            _ => groups.push(vec![p]),
        }
    }
    groups
}

fn module_title(f: &FileDoc) -> String {
    f.module.title.clone().unwrap_or_else(|| f.path.clone())
}

fn module_section(f: &FileDoc, scope: &Scope, h: &mut Html) {
    h.elem("h1", &[("class", "module")], &module_title(f))
        .newline();
    h.open("p", &[("class", "module-file")]).text(&f.path);
    if let Some(m) = &f.module.module_name {
        h.text(" (module ").elem("code", &[], m).text(")");
    }
    h.close("p").newline();
    if let Some(sc) = &f.module.comment {
        h.open("div", &[("class", "module-doc")]).newline();
        comment_body(sc, &[], scope, h);
        h.close("div").newline();
    }
}

pub fn render_file_page(
    index: &DocIndex,
    path: &str,
    opts: &RenderOptions,
) -> Result<Page, DbError> {
    let f = index.file(path)?;
    let mut sh = shell(
        index,
        opts,
        Target::file(path),
        module_title(f),
        crumbs(index, path),
    );
    sh.zoomable = true;
    sh.nav.elem(
        "a",
        &[
            ("class", "source-link"),
            ("href", &sh.linker.href(&Target::Source(path.into()))),
        ],
        "source",
    );
    let linker = sh.linker.clone();
    let scope = Scope {
        index,
        linker: &linker,
        dir: parent_dir(path),
        file: Some(path),
    };
    let mut h = Html::new();
    module_section(f, &scope, &mut h);

    h.open("div", &[("class", "preds")]).newline();
    for g in pred_groups(f, opts) {
        h.buf.push_str(&render_pred_group(&g, index, &linker, opts));
    }
    h.close("div").newline();

    let missing = f.undocumented_exports();
    if !missing.is_empty() {
        h.open("div", &[("class", "undocumented-exports")])
            .newline();
        h.elem("h2", &[], "Undocumented exports").newline();
        h.elem(
            "p",
            &[],
            "These predicates are exported but have no documentation.",
        )
        .newline();
        h.open("ul", &[]).newline();
        for ind in &missing {
            h.open("li", &[("id", ind)])
                .elem("code", &[], ind)
                .close("li")
                .newline();
        }
        h.close("ul").newline().close("div").newline();
    }

    let others: Vec<&str> = f
        .undocumented_defined()
        .into_iter()
        .filter(|d| !missing.contains(d))
        .filter(|d| !opts.public_only || f.is_public(d))
        .collect();
    if !others.is_empty() {
        h.open("div", &[("class", "undocumented")]).newline();
        h.elem("h2", &[], "Undocumented predicates").newline();
        for ind in others {
            let class = if f.is_public(ind) {
                "pred undocumented"
            } else {
                "pred undocumented private"
            };
            h.open("div", &[("class", class)]);
            h.open("div", &[("class", "pred-header"), ("id", ind)]);
            h.elem("span", &[("class", "pred-name")], ind);
            h.close("div").close("div").newline();
        }
        h.close("div").newline();
    }
    Ok(sh.finish(h))
}

pub fn render_dir_index(
    index: &DocIndex,
    dir: &str,
    opts: &RenderOptions,
) -> Result<Page, DbError> {
    let listing = index.dir_listing(dir)?;
    let title = if dir.is_empty() {
        root_label(index)
    } else {
        dir.to_string()
    };
    let mut sh = shell(
        index,
        opts,
        Target::Dir(dir.into()),
        title,
        crumbs(index, dir),
    );
    sh.zoomable = true;
    let linker = sh.linker.clone();
    let mut h = Html::new();

    if let Some(readme) = index.readme(dir) {
        let scope = Scope {
            index,
            linker: &linker,
            dir,
            file: None,
        };
        h.open("div", &[("class", "readme")]).newline();
        blocks(&parse_wiki(&readme.text, &[]).blocks, &scope, &mut h);
        h.close("div").newline();
    }

    if !listing.dirs.is_empty() {
        h.open("ul", &[("class", "subdirs")]).newline();
        for d in &listing.dirs {
            let name = d.rsplit('/').next().unwrap_or(d);
            h.open("li", &[]).elem(
                "a",
                &[("href", &linker.href(&Target::Dir(d.to_string())))],
                &format!("{name}/"),
            );
            h.close("li").newline();
        }
        h.close("ul").newline();
    }

    for f in &listing.files {
        let name = f.path.rsplit('/').next().unwrap_or(&f.path);
        h.open("div", &[("class", "file-summary")]).newline();
        h.open("h2", &[]);
        h.elem(
            "a",
            &[
                ("class", "file"),
                ("href", &linker.href(&Target::file(&f.path))),
            ],
            name,
        );
        h.text(" ");
        h.elem(
            "a",
            &[
                ("class", "source-link"),
                ("href", &linker.href(&Target::Source(f.path.clone()))),
            ],
            "source",
        );
        h.close("h2").newline();
        if let Some(t) = &f.module.title {
            h.elem("p", &[("class", "module-title")], t).newline();
        }
        let mut rows: Vec<(&str, &str, bool)> = f
            .preds
            .iter()
            .filter(|p| visible(p, opts))
            .map(|p| (p.indicator.as_str(), p.summary.as_str(), p.is_public))
            .collect();
        for d in f.undocumented_defined() {
            if !opts.public_only || f.is_public(d) {
                rows.push((d, "", f.is_public(d)));
            }
        }
        if !rows.is_empty() {
            h.open("table", &[("class", "summary")]).newline();
            for (ind, summary, public) in rows {
                let class = if public { "public" } else { "private" };
                let target = Target::File {
                    path: f.path.clone(),
                    anchor: Some(ind.to_string()),
                };
                h.open("tr", &[("class", class)]).open("td", &[]);
                h.elem("a", &[("href", &linker.href(&target))], ind);
                h.close("td").elem("td", &[], summary).close("tr").newline();
            }
            h.close("table").newline();
        }
        h.close("div").newline();
    }

    if !listing.texts.is_empty() {
        h.open("ul", &[("class", "texts")]).newline();
        for t in &listing.texts {
            let name = t.path.rsplit('/').next().unwrap_or(&t.path);
            h.open("li", &[]).elem(
                "a",
                &[("href", &linker.href(&Target::Text(t.path.clone())))],
                name,
            );
            h.close("li").newline();
        }
        h.close("ul").newline();
    }
    Ok(sh.finish(h))
}

pub fn render_text_page(
    index: &DocIndex,
    path: &str,
    opts: &RenderOptions,
) -> Result<Page, DbError> {
    let text = index
        .texts
        .get(path)
        .ok_or_else(|| DbError::UnknownFile(path.to_string()))?;
    let sh = shell(
        index,
        opts,
        Target::Text(path.into()),
        path.to_string(),
        crumbs(index, path),
    );
    let linker = sh.linker.clone();
    let scope = Scope {
        index,
        linker: &linker,
        dir: parent_dir(path),
        file: None,
    };
    let mut h = Html::new();
    h.open("div", &[("class", "wiki")]).newline();
    blocks(&parse_wiki(&text.text, &[]).blocks, &scope, &mut h);
    h.close("div").newline();
    Ok(sh.finish(h))
}

/// Coloured listing. Structured comments are shown rendered, followed by
/// their raw text, so every source byte appears inside a `pre` element.
pub fn render_source_page(
    index: &DocIndex,
    path: &str,
    opts: &RenderOptions,
) -> Result<Page, DbError> {
    let f = index.file(path)?;
    let mut sh = shell(
        index,
        opts,
        Target::Source(path.into()),
        format!("{path} (source)"),
        crumbs(index, path),
    );
    sh.nav.elem(
        "a",
        &[
            ("class", "doc-link"),
            ("href", &sh.linker.href(&Target::file(path))),
        ],
        "documentation",
    );
    let linker = sh.linker.clone();
    let scope = Scope {
        index,
        linker: &linker,
        dir: parent_dir(path),
        file: Some(path),
    };
    let quiet = RenderOptions {
        edit_enabled: false,
        ..opts.clone()
    };

    let mut docs: HashMap<usize, Vec<&PredDoc>> = HashMap::new();
    for p in &f.preds {
        docs.entry(p.comment.span.byte_start).or_default().push(p);
    }
    let module_at = f.module.comment.as_ref().map(|c| c.span.byte_start);

    let text = f.text.as_str();
    let mut h = Html::new();
    h.open("pre", &[("class", "src")]).open("code", &[]);
    let mut pos = 0;
    for s in colour_source(&f.read, &f.xref, builtins()) {
        let (a, b) = (s.span.byte_start, s.span.byte_end);
        h.text(&text[pos..a]);
        pos = b;
        let raw = &text[a..b];
        let rendered = if s.class != ColourClass::StructuredComment {
            None
        } else if module_at == Some(a) {
            let mut r = Html::new();
            module_section(f, &scope, &mut r);
            Some(r)
        } else {
            docs.get(&a).map(|g| {
                let mut r = Html::new();
                r.buf
                    .push_str(&render_pred_group(g, index, &linker, &quiet));
                r
            })
        };
        match rendered {
            Some(r) => {
                h.close("code").close("pre").newline();
                h.open("div", &[("class", "structured_comment")])
                    .newline()
                    .append(r)
                    .close("div")
                    .newline();
                h.open("pre", &[("class", "raw_comment")])
                    .elem("code", &[], raw)
                    .close("pre")
                    .newline();
                h.open("pre", &[("class", "src")]).open("code", &[]);
            }
            None => {
                h.elem("span", &[("class", s.class.css())], raw);
            }
        }
    }
    h.text(&text[pos..]);
    h.close("code").close("pre").newline();
    Ok(sh.finish(h))
}

fn hit_target(hit: &SearchHit) -> Target {
    if hit.kind == HitKind::Module {
        Target::file(&hit.file)
    } else {
        Target::File {
            path: hit.file.clone(),
            anchor: Some(hit.target.clone()),
        }
    }
}

pub fn render_search_page(
    index: &DocIndex,
    query: &str,
    include_private: bool,
    opts: &RenderOptions,
) -> Page {
    let hits = search(index, query, include_private);
    let title = format!("Search: {query}");
    let crumbs = vec![
        (root_label(index), Some(Target::Dir(String::new()))),
        ("search".to_string(), None),
    ];
    let sh = shell(index, opts, Target::Search(query.into()), title, crumbs);
    let linker = sh.linker.clone();
    let mut h = Html::new();
    h.open("h1", &[])
        .text("Search results for ")
        .elem("q", &[], query)
        .close("h1")
        .newline();
    if hits.is_empty() {
        h.elem("p", &[("class", "no-hits")], "No matches.")
            .newline();
    } else {
        h.open("ul", &[("class", "search-hits")]).newline();
        for hit in &hits {
            let kind = if hit.kind == HitKind::Module {
                "module"
            } else {
                "predicate"
            };
            let class = if hit.is_public {
                format!("hit {kind}")
            } else {
                format!("hit {kind} private")
            };
            h.open("li", &[("class", &class)]);
            h.elem(
                "a",
                &[("href", &linker.href(&hit_target(hit)))],
                &hit.target,
            );
            if hit.target != hit.file {
                h.text(" ").elem("span", &[("class", "file")], &hit.file);
            }
            if !hit.summary.is_empty() {
                h.text(" ")
                    .elem("span", &[("class", "summary")], &hit.summary);
            }
            h.close("li").newline();
        }
        h.close("ul").newline();
    }
    sh.finish(h)
}

pub fn render_error_page(title: &str, message: &str, opts: &RenderOptions) -> Page {
    let sh = Shell {
        index_generation: None,
        opts,
        linker: opts.linker(Target::Dir(String::new())),
        title: title.to_string(),
        crumbs: vec![(title.to_string(), None)],
        nav: Html::new(),
        zoomable: false,
    };
    let mut h = Html::new();
    h.elem("h1", &[], title)
        .newline()
        .elem("p", &[("class", "error")], message)
        .newline();
    sh.finish(h)
}
