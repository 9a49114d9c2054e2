//! The documentation database built from a source tree.

mod handle;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::SystemTime;

use serde::Serialize;

use crate::comment::{
    classify_comment, extract_summary, CommentConfig, DocKind, StructuredComment,
};
use crate::diag::{Diagnostic, Severity};
use crate::header::{parse_formal_header, FormalHeader, ModeDecl};
use crate::reader::{header_operator_table, read_source, SourceRead};
use crate::wiki::parse_wiki;
use crate::xref::{cross_reference, XrefReport};

pub use handle::IndexHandle;
pub use search::{search, search_with, HitKind, SearchCorpus, SearchHit};

#[derive(Debug, thiserror::Error)]
pub enum DbError {
    #[error("cannot read documentation root {path}: {source}")]
    Root {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown file `{0}`")]
    UnknownFile(String),
    #[error("unknown directory `{0}`")]
    UnknownDir(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredDoc {
    /// `name/arity` or `name//arity`.
    pub indicator: String,
    pub modes: Vec<ModeDecl>,
    pub comment: Arc<StructuredComment>,
    pub summary: String,
    pub file: String,
    /// First line of the comment.
    pub line: usize,
    pub is_public: bool,
}

impl PredDoc {
    pub fn name(&self) -> &str {
        &self.modes[0].name
    }

    /// Argument names over all modes, first occurrence order.
    pub fn arg_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for n in self.modes.iter().flat_map(|m| m.arg_names()) {
            if !out.contains(&n) {
                out.push(n);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleDoc {
    pub file: String,
    pub module_name: Option<String>,
    pub title: Option<String>,
    pub summary: String,
    pub comment: Option<Arc<StructuredComment>>,
    pub exports: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileStamp {
    pub modified: Option<SystemTime>,
    pub size: u64,
}

impl FileStamp {
    fn of(path: &Path) -> std::io::Result<Self> {
        let meta = fs::metadata(path)?;
        Ok(FileStamp {
            modified: meta.modified().ok(),
            size: meta.len(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FileDoc {
    /// Path relative to the root, `/`-separated.
    pub path: String,
    pub text: String,
    pub read: SourceRead,
    pub module: ModuleDoc,
    /// Documented predicates in source order.
    pub preds: Vec<PredDoc>,
    pub xref: XrefReport,
    pub diagnostics: Vec<Diagnostic>,
    pub stamp: Option<FileStamp>,
}

impl FileDoc {
    pub fn has_module(&self) -> bool {
        self.module.module_name.is_some()
    }

    pub fn pred(&self, indicator: &str) -> Option<&PredDoc> {
        self.preds.iter().find(|p| p.indicator == indicator)
    }

    /// Without a module directive every predicate is public.
    pub fn is_public(&self, indicator: &str) -> bool {
        !self.has_module() || self.module.exports.iter().any(|e| e == indicator)
    }

    /// Defined predicates that have no documentation, in source order.
    pub fn undocumented_defined(&self) -> Vec<&str> {
        self.xref
            .defined_order
            .iter()
            .filter(|d| self.pred(d).is_none())
            .map(String::as_str)
            .collect()
    }

    pub fn undocumented_exports(&self) -> Vec<&str> {
        self.module
            .exports
            .iter()
            .filter(|e| self.pred(e).is_none())
            .map(String::as_str)
            .collect()
    }

    /// Line of the module directive, or 1 without one.
    pub fn module_line(&self) -> usize {
        self.read
            .units
            .iter()
            .find(|u| {
                u.term
                    .as_ref()
                    .is_some_and(|t| t.is_functor(":-", 1) && t.args()[0].is_functor("module", 2))
            })
            .and_then(|u| u.term_span)
            .map_or(1, |s| s.line_start)
    }

    /// File name without directory and extension.
    pub fn stem(&self) -> &str {
        let name = self.path.rsplit('/').next().unwrap_or(&self.path);
        name.rsplit_once('.').map_or(name, |(s, _)| s)
    }
}

/// A README or `.txt` file shown as a wiki page.
#[derive(Debug, Clone)]
pub struct TextDoc {
    pub path: String,
    pub text: String,
    pub stamp: Option<FileStamp>,
}

#[derive(Debug, Clone)]
pub struct DocIndex {
    pub root: PathBuf,
    pub generation: u64,
    pub files: BTreeMap<String, Arc<FileDoc>>,
    pub texts: BTreeMap<String, Arc<TextDoc>>,
    /// Every directory holding a documented file, and their ancestors.
    /// The root is `""`.
    pub dirs: BTreeSet<String>,
    /// Files parsed while building this snapshot.
    pub parsed: Vec<String>,
    /// I/O problems met while scanning.
    pub errors: Vec<Diagnostic>,
}

impl DocIndex {
    pub fn empty(root: impl Into<PathBuf>) -> Self {
        DocIndex {
            root: root.into(),
            generation: 0,
            files: BTreeMap::new(),
            texts: BTreeMap::new(),
            dirs: BTreeSet::from([String::new()]),
            parsed: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn file(&self, path: &str) -> Result<&FileDoc, DbError> {
        self.files
            .get(path)
            .map(|f| &**f)
            .ok_or_else(|| DbError::UnknownFile(path.to_string()))
    }

    /// All documentation for an indicator, in file order.
    pub fn lookup_pred<'a>(&'a self, indicator: &'a str) -> impl Iterator<Item = &'a PredDoc> + 'a {
        self.files.values().filter_map(move |f| f.pred(indicator))
    }

    /// Direct children of `dir`: subdirectories, source files and texts.
    pub fn dir_listing(&self, dir: &str) -> Result<DirListing<'_>, DbError> {
        if !self.dirs.contains(dir) {
            return Err(DbError::UnknownDir(dir.to_string()));
        }
        let in_dir = |p: &str| parent_dir(p) == dir;
        Ok(DirListing {
            dirs: self
                .dirs
                .iter()
                .filter(|d| !d.is_empty() && in_dir(d))
                .map(String::as_str)
                .collect(),
            files: self
                .files
                .values()
                .filter(|f| in_dir(&f.path))
                .map(|f| &**f)
                .collect(),
            texts: self
                .texts
                .values()
                .filter(|t| in_dir(&t.path))
                .map(|t| &**t)
                .collect(),
        })
    }

    /// README of a directory, if there is one.
    pub fn readme(&self, dir: &str) -> Option<&TextDoc> {
        ["README", "README.md", "README.txt"]
            .iter()
            .find_map(|n| self.texts.get(&join_path(dir, n)))
            .map(|t| &**t)
    }

    /// Every diagnostic, file order then line.
    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        let mut all: Vec<&Diagnostic> = self.errors.iter().collect();
        for f in self.files.values() {
            let mut ds: Vec<&Diagnostic> = f.diagnostics.iter().collect();
            ds.sort_by_key(|d| d.line);
            all.extend(ds);
        }
        all
    }
}

/// Problems that fail a quality check: diagnostics of warning level and
/// above plus exported predicates without documentation. Ordered by file,
/// then line.
pub fn lint(index: &DocIndex) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = index
        .errors
        .iter()
        .filter(|d| d.is_problem())
        .cloned()
        .collect();
    for f in index.files.values() {
        let mut ds: Vec<Diagnostic> = f
            .diagnostics
            .iter()
            .filter(|d| d.is_problem())
            .cloned()
            .collect();
        let line = f.module_line();
        for ind in f.undocumented_exports() {
            ds.push(Diagnostic::new(
                Severity::Warning,
                &f.path,
                line,
                format!("exported predicate {ind} is not documented"),
            ));
        }
        ds.sort_by_key(|d| d.line);
        out.extend(ds);
    }
    out
}

pub struct DirListing<'a> {
    pub dirs: Vec<&'a str>,
    pub files: Vec<&'a FileDoc>,
    pub texts: Vec<&'a TextDoc>,
}

pub fn parent_dir(path: &str) -> &str {
    path.rsplit_once('/').map_or("", |(d, _)| d)
}

pub fn join_path(dir: &str, name: &str) -> String {
    if dir.is_empty() {
        name.to_string()
    } else {
        format!("{dir}/{name}")
    }
}

fn is_text_file(name: &str) -> bool {
    name.ends_with(".txt") || name == "README" || name == "README.md"
}

pub fn undocumented_exports(index: &DocIndex, file: &str) -> Result<Vec<String>, DbError> {
    Ok(index
        .file(file)?
        .undocumented_exports()
        .into_iter()
        .map(str::to_string)
        .collect())
}

pub fn build_index(root: &Path) -> Result<DocIndex, DbError> {
    scan(root, None)
}

/// Rebuilds from the same root, reusing entries whose size and
/// modification time are unchanged.
pub fn reload(prev: &DocIndex) -> Result<DocIndex, DbError> {
    scan(&prev.root, Some(prev))
}

fn scan(root: &Path, prev: Option<&DocIndex>) -> Result<DocIndex, DbError> {
    let root_err = |source| DbError::Root {
        path: root.to_path_buf(),
        source,
    };
    if !fs::metadata(root).map_err(root_err)?.is_dir() {
        return Err(root_err(std::io::Error::new(
            std::io::ErrorKind::NotADirectory,
            "not a directory",
        )));
    }
    let mut index = DocIndex::empty(root);
    index.generation = prev.map_or(1, |p| p.generation + 1);

    let walker = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e.path().map(|p| rel_path(root, p)).unwrap_or_default();
                index
                    .errors
                    .push(Diagnostic::new(Severity::Error, path, 0, e.to_string()));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        let rel = rel_path(root, entry.path());
        let is_pl = name.ends_with(".pl");
        if !is_pl && !is_text_file(&name) {
            continue;
        }
        let stamp = FileStamp::of(entry.path()).ok();
        let reused_file = prev
            .and_then(|p| p.files.get(&rel))
            .filter(|f| is_pl && stamp.is_some() && f.stamp == stamp);
        let reused_text = prev
            .and_then(|p| p.texts.get(&rel))
            .filter(|t| !is_pl && stamp.is_some() && t.stamp == stamp);
        if let Some(f) = reused_file {
            index.files.insert(rel.clone(), f.clone());
        } else if let Some(t) = reused_text {
            index.texts.insert(rel.clone(), t.clone());
        } else {
            let text = match fs::read(entry.path()) {
                Ok(bytes) => String::from_utf8_lossy(&bytes).into_owned(),
                Err(e) => {
                    index
                        .errors
                        .push(Diagnostic::new(Severity::Error, rel, 0, e.to_string()));
                    continue;
                }
            };
            if is_pl {
                let mut doc = analyze_file(&rel, text);
                doc.stamp = stamp;
                index.parsed.push(rel.clone());
                index.files.insert(rel.clone(), Arc::new(doc));
            } else {
                index.texts.insert(
                    rel.clone(),
                    Arc::new(TextDoc {
                        path: rel.clone(),
                        text,
                        stamp,
                    }),
                );
            }
        }
        let mut dir = parent_dir(&rel);
        loop {
            index.dirs.insert(dir.to_string());
            if dir.is_empty() {
                break;
            }
            dir = parent_dir(dir);
        }
    }
    Ok(index)
}

fn rel_path(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Reads and documents one source file. `path` is used for diagnostics
/// and links only.
pub fn analyze_file(path: &str, text: String) -> FileDoc {
    analyze_file_with(path, text, &CommentConfig::default())
}

pub fn analyze_file_with(path: &str, text: String, cfg: &CommentConfig) -> FileDoc {
    let read = read_source(&text);
    let xref = cross_reference(&read);
    let mut diags = Vec::new();
    let diag = |diags: &mut Vec<Diagnostic>, sev, line, msg: String| {
        diags.push(Diagnostic::new(sev, path, line, msg));
    };
    for e in &read.errors {
        diag(
            &mut diags,
            Severity::Error,
            e.span.line_start,
            e.message.clone(),
        );
    }
    for w in &read.warnings {
        diag(
            &mut diags,
            Severity::Info,
            w.span.line_start,
            w.message.clone(),
        );
    }

    let mut module = ModuleDoc {
        file: path.to_string(),
        module_name: xref.module_name.clone(),
        title: None,
        summary: String::new(),
        comment: None,
        exports: xref.export_list.clone(),
    };
    let mut preds: Vec<PredDoc> = Vec::new();
    let header_ops = header_operator_table();

    for rec in read.units.iter().flat_map(|u| &u.leading_comments) {
        let Some(sc) = classify_comment(rec, cfg) else {
            continue;
        };
        let line = sc.span.line_start;
        if sc.header_text.trim().is_empty() {
            diag(
                &mut diags,
                Severity::Warning,
                line,
                "structured comment has no formal header".into(),
            );
            continue;
        }
        let header = match parse_formal_header(&sc.header_text, &header_ops) {
            Ok(h) => h,
            Err(e) => {
                let at = sc.header_source_line(e.line_offset);
                diag(
                    &mut diags,
                    Severity::Warning,
                    at,
                    format!("bad comment header: {}", e.reason),
                );
                continue;
            }
        };
        for issue in &sc.tag_issues {
            diag(
                &mut diags,
                Severity::Warning,
                sc.source_line(issue.line_offset),
                issue.message.clone(),
            );
        }
        let arg_names: Vec<String> = match &header {
            FormalHeader::Modes(ms) => ms
                .iter()
                .flat_map(|m| m.arg_names())
                .map(str::to_string)
                .collect(),
            FormalHeader::Module(_) => Vec::new(),
        };
        let arg_refs: Vec<&str> = arg_names.iter().map(String::as_str).collect();
        for w in parse_wiki(&sc.body_text, &arg_refs).warnings {
            diag(&mut diags, Severity::Warning, line, w);
        }
        let summary = extract_summary(&sc.body_text);
        let sc = Arc::new(sc);
        match header {
            FormalHeader::Module(m) => {
                if sc.kind == DocKind::ModuleDoc && module.comment.is_none() {
                    module.title = Some(m.title);
                    module.summary = summary;
                    module.comment = Some(sc);
                } else {
                    diag(
                        &mut diags,
                        Severity::Warning,
                        line,
                        "duplicate module comment".into(),
                    );
                }
            }
            FormalHeader::Modes(modes) => {
                let mut seen: Vec<String> = Vec::new();
                for m in &modes {
                    let ind = m.indicator();
                    if seen.contains(&ind) {
                        continue;
                    }
                    seen.push(ind.clone());
                    if m.is_dcg && m.arity == 0 {
                        let at = sc.header_source_line(m.line_offset);
                        diag(
                            &mut diags,
                            Severity::Info,
                            at,
                            format!("non-terminal {ind} has no arguments"),
                        );
                    }
                    if preds.iter().any(|p| p.indicator == ind) {
                        diag(
                            &mut diags,
                            Severity::Warning,
                            line,
                            format!("{ind} is documented twice"),
                        );
                        continue;
                    }
                    preds.push(PredDoc {
                        modes: modes
                            .iter()
                            .filter(|x| x.indicator() == ind)
                            .cloned()
                            .collect(),
                        indicator: ind,
                        comment: sc.clone(),
                        summary: summary.clone(),
                        file: path.to_string(),
                        line,
                        is_public: true,
                    });
                }
            }
        }
    }
    if module.module_name.is_some() {
        for p in &mut preds {
            p.is_public = module.exports.contains(&p.indicator);
        }
    }
    FileDoc {
        path: path.to_string(),
        text,
        read,
        module,
        preds,
        xref,
        diagnostics: diags,
        stamp: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE64_SRC: &str = include_str!("../../tests/corpus/base64/base64.pl");

    fn tree(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (p, text) in files {
            let path = dir.path().join(p);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(path, text).unwrap();
        }
        dir
    }

    #[test]
    fn lint_lists_undocumented_exports() {
        let src = "% header\n:- module(m, [a/0, b/0, c/0]).\n\n%% a is det.\n%\n% A.\na.\n\n%% b is det.\n%\n% B.\nb.\nc.\n";
        let dir = tree(&[("m.pl", src), ("base64.pl", BASE64_SRC)]);
        let index = build_index(dir.path()).unwrap();
        let problems = lint(&index);
        assert_eq!(problems.len(), 1);
        assert_eq!(
            problems[0].to_string(),
            "m.pl:2: warning: exported predicate c/0 is not documented"
        );
        let clean = tree(&[("base64.pl", BASE64_SRC)]);
        assert!(lint(&build_index(clean.path()).unwrap()).is_empty());
    }

    #[test]
    fn base64_index() {
        let dir = tree(&[("base64.pl", BASE64_SRC)]);
        let index = build_index(dir.path()).unwrap();
        assert_eq!(index.files.len(), 1);
        let f = index.file("base64.pl").unwrap();
        assert_eq!(
            f.module.title.as_deref(),
            Some("Base64 encoding and decoding")
        );
        assert_eq!(
            f.module.summary,
            "Prolog-based base64 encoding using DCG rules."
        );
        assert_eq!(f.undocumented_defined(), vec!["base64/2", "base64//1"]);
        assert!(f.is_public("base64/2"));
        assert!(f.diagnostics.is_empty(), "{:?}", f.diagnostics);
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let index = build_index(dir.path()).unwrap();
        assert!(index.files.is_empty());
        assert_eq!(index.dirs, BTreeSet::from([String::new()]));
        assert!(build_index(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn exports_decide_visibility() {
        let src = ":- module(m, [a/1, b/2, c/0]).\n\n%% a(+X) is det.\n%\n% Doc a.\na(_).\n\n%% c is det.\nc.\n\n%% helper(X).\nhelper(_).\nb(_, _).\n";
        let f = analyze_file("m.pl", src.into());
        assert!(f.pred("a/1").unwrap().is_public);
        assert!(!f.pred("helper/1").unwrap().is_public);
        assert_eq!(f.undocumented_exports(), vec!["b/2"]);
        let plain = analyze_file("p.pl", "%% q is det.\nq.\nr.".into());
        assert!(plain.pred("q/0").unwrap().is_public);
        assert!(plain.undocumented_exports().is_empty());
        assert_eq!(plain.undocumented_defined(), vec!["r/0"]);
    }

    #[test]
    fn multi_mode_comment() {
        let f = analyze_file(
            "x.pl",
            "%% f(+X) is det.\n%% f(-X) is nondet.\n%% g(X) is det.\n%\n% Shared.\nf(_).\ng(_)."
                .into(),
        );
        assert_eq!(f.preds.len(), 2);
        assert_eq!(f.preds[0].modes.len(), 2);
        assert_eq!(f.preds[1].summary, "Shared.");
        assert!(Arc::ptr_eq(&f.preds[0].comment, &f.preds[1].comment));
    }

    #[test]
    fn header_errors_are_located() {
        let f = analyze_file(
            "x.pl",
            "a.\n\n%% ok(X) is det.\n%% bad(x) is det.\n%\n% Body.\nok(_).".into(),
        );
        assert!(f.preds.is_empty());
        assert_eq!(f.diagnostics.len(), 1);
        assert_eq!(f.diagnostics[0].line, 4);
        assert_eq!(f.diagnostics[0].severity, Severity::Warning);
    }

    #[test]
    fn other_diagnostics() {
        let f = analyze_file(
            "x.pl",
            "%% nt// is det.\n%\n% @return X\nnt --> [].\n/** \n\n*/\nbad(.\n:- op(700, xfx, ===).\n".into(),
        );
        let sevs: Vec<_> = f.diagnostics.iter().map(|d| (d.severity, d.line)).collect();
        assert!(sevs.contains(&(Severity::Info, 1)), "{sevs:?}");
        assert!(sevs.contains(&(Severity::Warning, 3)));
        assert!(sevs.contains(&(Severity::Warning, 5)));
        assert!(sevs.contains(&(Severity::Error, 8)));
        assert!(sevs.contains(&(Severity::Info, 9)));
    }

    #[test]
    fn syntax_errors_keep_comments() {
        let f = analyze_file(
            "x.pl",
            "%% good(X) is det.\n%\n% Fine.\ngood(X) :- (.\n".into(),
        );
        assert!(f.pred("good/1").is_some());
        assert_eq!(f.diagnostics[0].severity, Severity::Error);
    }

    #[test]
    fn texts_and_dirs() {
        let dir = tree(&[
            ("README", "Top readme."),
            ("lib/a.pl", "a."),
            ("lib/deep/b.pl", "b."),
            ("lib/notes.txt", "Notes."),
            ("other.c", "int x;"),
            (".hidden/c.pl", "c."),
        ]);
        let index = build_index(dir.path()).unwrap();
        assert_eq!(
            index.files.keys().collect::<Vec<_>>(),
            ["lib/a.pl", "lib/deep/b.pl"]
        );
        assert_eq!(
            index.dirs.iter().collect::<Vec<_>>(),
            ["", "lib", "lib/deep"]
        );
        assert!(index.readme("").is_some());
        let l = index.dir_listing("lib").unwrap();
        assert_eq!(l.dirs, ["lib/deep"]);
        assert_eq!(l.files.len(), 1);
        assert_eq!(l.texts[0].path, "lib/notes.txt");
        assert!(index.dir_listing("nope").is_err());
        assert!(matches!(
            undocumented_exports(&index, "zz.pl"),
            Err(DbError::UnknownFile(_))
        ));
    }

    #[test]
    fn reload_reparses_changed_files_only() {
        let dir = tree(&[("a.pl", "a."), ("b.pl", "b."), ("c.pl", "c.")]);
        let first = build_index(dir.path()).unwrap();
        assert_eq!(first.parsed.len(), 3);
        let same = reload(&first).unwrap();
        assert_eq!(same.generation, first.generation + 1);
        assert!(same.parsed.is_empty());
        assert!(Arc::ptr_eq(&same.files["a.pl"], &first.files["a.pl"]));

        fs::write(
            dir.path().join("b.pl"),
            "%% b is det.\n%\n% Now documented.\nb.\n",
        )
        .unwrap();
        fs::remove_file(dir.path().join("c.pl")).unwrap();
        let next = reload(&same).unwrap();
        assert_eq!(next.parsed, vec!["b.pl"]);
        assert!(next.files["b.pl"].pred("b/0").is_some());
        assert!(!next.files.contains_key("c.pl"));
        assert!(first.files.contains_key("c.pl"));
    }
}
