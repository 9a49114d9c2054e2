//! Acceptance checks shared by the integration tests and the acceptance
//! runner. Each returns a short detail line on success.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::net::{IpAddr, Ipv4Addr};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Barrier};
use std::time::{Duration, Instant};

use plscribe::comment::TagKeyword;
use plscribe::db::{analyze_file, build_index, lint, search, DocIndex, IndexHandle};
use plscribe::header::{parse_formal_header, FormalHeader};
use plscribe::html::{
    export_static, normalize_links, render_file_page, render_source_page, strip_controls, LinkMode,
    Linker, RenderOptions, Target,
};
use plscribe::reader::write::{write_canonical, write_term};
use plscribe::reader::{
    default_operator_table, header_operator_table, read_source, read_term_from_str,
};
use plscribe::server::{DocServer, Request, ServerConfig};
use plscribe::wiki::{parse_wiki, Block};
use plscribe::xref::{colour_source, cross_reference, Builtins, ColourClass};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::ref_reader::{self, RTerm};
use super::terms::{from_core, random_term, to_core};

pub type Outcome = Result<String, String>;

pub const LOCAL: IpAddr = IpAddr::V4(Ipv4Addr::LOCALHOST);

pub fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/corpus")
        .join(name)
}

pub fn corpora() -> Vec<PathBuf> {
    ["base64", "lists", "lint_gap", "documented"]
        .iter()
        .map(|c| corpus(c))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const BASE64_TITLE: &str = "Base64 encoding and decoding";
const BASE64_SUMMARY: &str = "Prolog-based base64 encoding using DCG rules.";
const BASE64_QUERY_1: &str = "1 ?- base64('Hello World', X).\nX = 'SGVsbG8gV29ybGQ='";
const BASE64_QUERY_2: &str = "2 ?- base64(H, 'SGVsbG8gV29ybGQ=').\nH = 'Hello World'";

pub fn base64_end_to_end() -> Outcome {
    let start = Instant::now();
    let index = build_index(&corpus("base64")).map_err(|e| e.to_string())?;
    let f = index.file("base64.pl").map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(f.module.title.as_deref() == Some(BASE64_TITLE), || {
        format!("title {:?}", f.module.title)
    })?;
    ensure(f.module.summary == BASE64_SUMMARY, || {
        format!("summary {:?}", f.module.summary)
    })?;
    let sc = f.module.comment.as_ref().ok_or("no module comment")?;
    let doc = parse_wiki(&sc.body_text, &[]);
    let code: Vec<&String> = doc
        .blocks
        .iter()
        .filter_map(|b| match b {
            Block::CodeBlock(c) => Some(c),
            _ => None,
        })
        .collect();
    ensure(code.len() == 1, || format!("{} code blocks", code.len()))?;
    ensure(
        code[0].contains(BASE64_QUERY_1) && code[0].contains(BASE64_QUERY_2),
        || format!("code block {:?}", code[0]),
    )?;
    let tags: Vec<TagKeyword> = sc.tags.iter().map(|t| t.keyword).collect();
    ensure(
        tags == [TagKeyword::Tbd, TagKeyword::Tbd, TagKeyword::Author],
        || format!("tags {tags:?}"),
    )?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "title, summary, 1 code block, tags tbd tbd author in {elapsed:?}"
    ))
}

/// Accepted headers with the expected indicator, argument modes and
/// determinism.
pub const HEADER_ACCEPT: &[(&str, &str, &str, Option<&str>)] = &[
    ("foo(+X) is det", "foo/1", "+", Some("det")),
    ("foo(-X) is semidet", "foo/1", "-", Some("semidet")),
    ("foo(?X) is nondet", "foo/1", "?", Some("nondet")),
    ("foo(:Goal) is multi", "foo/1", ":", Some("multi")),
    ("foo(@Term) is det", "foo/1", "@", Some("det")),
    ("foo(!Arr) is det", "foo/1", "!", Some("det")),
    ("foo(+X:integer) is det", "foo/1", "+", Some("det")),
    (
        "foo(-X:list(atom)) is semidet",
        "foo/1",
        "-",
        Some("semidet"),
    ),
    (
        "foo(?X:oneof([a,b])) is nondet",
        "foo/1",
        "?",
        Some("nondet"),
    ),
    ("foo(:Goal:callable) is multi", "foo/1", ":", Some("multi")),
    ("foo(@Term:any) is det", "foo/1", "@", Some("det")),
    ("foo(!Arr:compound) is det", "foo/1", "!", Some("det")),
    ("foo(X)", "foo/1", "_", None),
    ("foo(X:integer)", "foo/1", "_", None),
    ("bar(+In, -Out, ?Both)", "bar/3", "+-?", None),
    (
        "phrase_it(+List)// is det",
        "phrase_it//1",
        "+",
        Some("det"),
    ),
    ("digits(-Ds:list)//", "digits//1", "-", None),
    ("halt is det", "halt/0", "", Some("det")),
    ("nl", "nl/0", "", None),
    ("run// is semidet", "run//0", "", Some("semidet")),
    ("'odd name'(+A) is det", "odd name/1", "+", Some("det")),
    (
        "pairs(+Ps:list(pair(K,V)), -Ks:list(K)) is det",
        "pairs/2",
        "+-",
        Some("det"),
    ),
    ("m(+A, +B, +C, +D) is multi", "m/4", "++++", Some("multi")),
];

pub const HEADER_REJECT: &[&str] = &[
    "foo(+x) is det",
    "foo(x)",
    "foo(+X) is foo",
    "foo(+X) is",
    "foo(*X) is det",
    "foo(+X is det",
    "foo(+X, -Y",
    "foo(+X) is det extra",
    "foo(+1) is det",
    "foo(-'Quoted') is det",
    "123 is det",
    "\"str\"(X)",
];

pub fn header_conformance() -> Outcome {
    let ops = header_operator_table();
    for (text, ind, modes, det) in HEADER_ACCEPT {
        let parsed =
            parse_formal_header(text, &ops).map_err(|e| format!("{text:?} rejected: {e}"))?;
        let FormalHeader::Modes(decls) = parsed else {
            return Err(format!("{text:?} read as module header"));
        };
        ensure(decls.len() == 1, || {
            format!("{text:?} gave {} modes", decls.len())
        })?;
        let d = &decls[0];
        let got_modes: String = d
            .args
            .iter()
            .map(|a| a.mode.map_or("_", |m| m.symbol()))
            .collect();
        let got_det = d.det.map(|x| x.as_str());
        ensure(
            d.indicator() == *ind && got_modes == *modes && got_det == *det,
            || format!("{text:?}: got {} {got_modes:?} {got_det:?}", d.indicator()),
        )?;
    }
    for text in HEADER_REJECT {
        ensure(parse_formal_header(text, &ops).is_err(), || {
            format!("{text:?} accepted")
        })?;
    }
    Ok(format!(
        "{} accepted, {} rejected",
        HEADER_ACCEPT.len(),
        HEADER_REJECT.len()
    ))
}

pub fn undocumented_exports() -> Outcome {
    let gap = build_index(&corpus("lint_gap")).map_err(|e| e.to_string())?;
    let problems: Vec<String> = lint(&gap).iter().map(ToString::to_string).collect();
    ensure(
        problems == ["three.pl:1: warning: exported predicate three/0 is not documented"],
        || format!("lint reported {problems:?}"),
    )?;
    let full = build_index(&corpus("documented")).map_err(|e| e.to_string())?;
    let problems = lint(&full);
    ensure(problems.is_empty(), || {
        format!("documented corpus reported {problems:?}")
    })?;
    Ok("three/0 reported; documented corpus clean".into())
}

pub fn search_behaviour() -> Outcome {
    let a = build_index(&corpus("base64")).map_err(|e| e.to_string())?;
    let b = build_index(&corpus("base64")).map_err(|e| e.to_string())?;
    let hits = search(&a, "base64", false);
    let targets: Vec<&str> = hits.iter().map(|h| h.target.as_str()).collect();
    ensure(
        targets.contains(&"base64.pl") && targets.contains(&"base64/2"),
        || format!("hits {targets:?}"),
    )?;
    for _ in 0..5 {
        ensure(
            search(&a, "base64", false) == hits && search(&b, "base64", false) == hits,
            || "ranking differs between runs".to_string(),
        )?;
    }
    Ok(format!("hits {targets:?}"))
}

const FUZZ_PIECES: &[&str] = &[
    "<",
    ">",
    "&",
    "*",
    "==",
    "\n",
    "\n\n",
    " ",
    "a",
    "Word",
    "<script>",
    "</div>",
    "<b>",
    "&amp;",
    "&lt;",
    "\"",
    "'",
    "=",
    "_",
    "|",
    "[[",
    "]]",
    "<img src=x onerror=y>",
    "- ",
    "1. ",
    "$ ",
    ":",
    "foo/2",
    "X",
    "<!--",
    "-->",
    "<![CDATA[",
    "]]>",
    "@see ",
    "\t",
    "é",
];

pub fn fuzz_body(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..40);
    (0..n)
        .map(|_| FUZZ_PIECES[rng.gen_range(0..FUZZ_PIECES.len())])
        .collect()
}

/// File with `body` as both module and predicate documentation.
pub fn fuzz_source(body: &str) -> String {
    let lines: Vec<String> = body.lines().map(|l| format!("% {l}")).collect();
    let body_block = body.replace("*/", "* /");
    format!(
        "/** <module> Fuzz\n\n{body_block}\n*/\n\n:- module(fuzz, [p/1]).\n\n%!  p(+X) is det.\n%\n{}\n\np(_).\n",
        lines.join("\n")
    )
}

fn parse_options() -> roxmltree::ParsingOptions {
    roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    }
}

const RENDERED_ELEMENTS: &[&str] = &[
    "html", "head", "meta", "title", "link", "script", "body", "div", "h1", "h2", "h3", "p", "a",
    "span", "ul", "ol", "li", "dl", "dt", "dd", "pre", "code", "b", "i", "var", "img", "table",
    "tr", "td", "th", "form", "input", "button", "br",
];

/// Parses `html` strictly and checks that every `<` of the input is text.
pub fn check_markup(html: &str, input: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse_with_options(html, parse_options())
        .map_err(|e| format!("not well formed: {e}"))?;
    let mut text_lt = 0;
    for node in doc.descendants() {
        if node.is_element() {
            let name = node.tag_name().name();
            ensure(RENDERED_ELEMENTS.contains(&name), || {
                format!("unexpected element <{name}>")
            })?;
            if name == "script" {
                ensure(
                    node.attribute("src").is_some_and(|s| s.ends_with("ui.js")),
                    || "inline script".into(),
                )?;
            }
            for attr in node.attributes() {
                ensure(!attr.name().starts_with("on"), || {
                    format!("event attribute {}", attr.name())
                })?;
            }
        } else if node.is_text() || node.is_comment() {
            text_lt += node.text().map_or(0, |t| t.matches('<').count());
        }
    }
    let input_lt = input.matches('<').count();
    ensure(text_lt >= input_lt, || {
        format!("{input_lt} input `<` but only {text_lt} in text")
    })
}

pub fn escaping_fuzz(cases: usize) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let opts = RenderOptions::live("");
    for i in 0..cases {
        let body = fuzz_body(&mut rng);
        let src = fuzz_source(&body);
        let mut index = DocIndex::empty("/fuzz");
        index.files.insert(
            "fuzz.pl".into(),
            Arc::new(analyze_file("fuzz.pl", src.clone())),
        );
        let page = render_file_page(&index, "fuzz.pl", &opts).map_err(|e| e.to_string())?;
        check_markup(&page.html, &body).map_err(|e| format!("case {i} page: {e}\n{body:?}"))?;
        let source = render_source_page(&index, "fuzz.pl", &opts).map_err(|e| e.to_string())?;
        check_markup(&source.html, &src).map_err(|e| format!("case {i} source: {e}\n{body:?}"))?;
    }
    Ok(format!("{cases} bodies, file and source pages well formed"))
}

/// Spans sorted, disjoint and inside the text on character boundaries.
pub fn check_colours(text: &str) -> Result<Vec<ColourClass>, String> {
    let read = read_source(text);
    let report = cross_reference(&read);
    let spans = colour_source(&read, &report, &Builtins::default());
    let mut at = 0;
    for s in &spans {
        let (b, e) = (s.span.byte_start, s.span.byte_end);
        ensure(b >= at && b < e && e <= text.len(), || {
            format!("span {b}..{e} after {at} in {} bytes", text.len())
        })?;
        ensure(text.is_char_boundary(b) && text.is_char_boundary(e), || {
            format!("span {b}..{e} splits a char")
        })?;
        at = e;
    }
    Ok(spans.iter().map(|s| s.class).collect())
}

pub fn colour_coverage() -> Outcome {
    let mut files = 0;
    for dir in corpora() {
        for entry in walkdir(&dir) {
            if entry.extension().is_some_and(|e| e == "pl") {
                let text = fs::read_to_string(&entry).map_err(|e| e.to_string())?;
                check_colours(&text).map_err(|e| format!("{}: {e}", entry.display()))?;
                files += 1;
            }
        }
    }
    let probe = "p :- q, nowhere(1).\nq.\n";
    let read = read_source(probe);
    let report = cross_reference(&read);
    let spans = colour_source(&read, &report, &Builtins::default());
    let at = probe.find("nowhere").expect("probe");
    let class = spans
        .iter()
        .find(|s| s.span.byte_start == at)
        .map(|s| s.class);
    ensure(class == Some(ColourClass::CallUndefined), || {
        format!("nowhere/1 classed {class:?}")
    })?;
    let q = spans
        .iter()
        .find(|s| s.span.byte_start == probe.find("q,").expect("probe"))
        .map(|s| s.class);
    ensure(q == Some(ColourClass::CallDefined), || {
        format!("q/0 classed {q:?}")
    })?;
    Ok(format!(
        "{files} corpus files covered; undefined call classed call_undefined"
    ))
}

fn walkdir(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn versioned(v: usize) -> String {
    // The length changes with every version so the reload sees a new stamp.
    format!(
        ":- module(m, [p/1]).\n\n%!  p(+X) is det.\n%\n%   Version {}.\n\np(_).\n",
        "v".repeat(v)
    )
}

fn meta_generation(html: &str) -> Option<u64> {
    let rest = html.split("<meta name=\"generation\" content=\"").nth(1)?;
    rest[..rest.find('"')?].parse().ok()
}

fn footer_generation(html: &str) -> Option<u64> {
    let rest = html
        .split("Generated by plscribe from index generation ")
        .nth(1)?;
    rest[..rest.find('<')?].parse().ok()
}

fn page_version(html: &str) -> Option<usize> {
    let rest = html.split("Version ").nth(1)?;
    Some(rest.chars().take_while(|c| *c == 'v').count())
}

/// Checks that one rendered page is internally consistent and matches a
/// published snapshot. Returns its generation.
fn check_snapshot_page(html: &str, expected: &[(u64, usize)]) -> Result<u64, String> {
    let meta = meta_generation(html).ok_or("no generation meta")?;
    let footer = footer_generation(html).ok_or("no generation footer")?;
    let version = page_version(html).ok_or("no version text")?;
    ensure(meta == footer, || {
        format!("meta {meta} but footer {footer}")
    })?;
    ensure(expected.contains(&(meta, version)), || {
        format!("generation {meta} showed version {version}")
    })?;
    Ok(meta)
}

pub fn snapshot_isolation(renders: usize) -> Outcome {
    const VERSIONS: usize = 6;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("m.pl");
    fs::write(&file, versioned(1)).map_err(|e| e.to_string())?;
    let handle = Arc::new(IndexHandle::open(dir.path()).map_err(|e| e.to_string())?);
    let server = Arc::new(DocServer::new(
        ServerConfig::new(dir.path()),
        handle.clone(),
    ));
    let done = Arc::new(AtomicBool::new(false));
    let barrier = Arc::new(Barrier::new(renders + 1));
    // Each worker keeps one render in flight until the reloads are over.
    let workers: Vec<_> = (0..renders)
        .map(|_| {
            let (server, barrier, done) = (server.clone(), barrier.clone(), done.clone());
            std::thread::spawn(move || {
                barrier.wait();
                let mut pages = Vec::new();
                loop {
                    let finished = done.load(Ordering::SeqCst);
                    pages.push(server.handle(&Request::get("/doc/m.pl", LOCAL)).body_text());
                    if finished {
                        return pages;
                    }
                }
            })
        })
        .collect();
    barrier.wait();
    // generation -> version shown by that snapshot
    let mut expected = vec![(handle.snapshot().generation, 1)];
    for v in 2..=VERSIONS {
        std::thread::sleep(Duration::from_millis(5));
        fs::write(&file, versioned(v)).map_err(|e| e.to_string())?;
        expected.push((handle.reload().map_err(|e| e.to_string())?, v));
    }
    done.store(true, Ordering::SeqCst);
    let mut seen = BTreeSet::new();
    let mut total = 0;
    for w in workers {
        let pages = w.join().map_err(|_| "render thread panicked")?;
        total += pages.len();
        for html in pages {
            seen.insert(check_snapshot_page(&html, &expected)?);
        }
    }
    let last = *expected.last().expect("versions");
    let page = server.handle(&Request::get("/doc/m.pl", LOCAL)).body_text();
    ensure(check_snapshot_page(&page, &expected)? == last.0, || {
        "final page is stale".into()
    })?;
    ensure(seen.len() > 1, || {
        format!("renders only saw generations {seen:?}")
    })?;
    Ok(format!(
        "{total} renders from {renders} threads over generations {seen:?}, none mixed"
    ))
}

pub fn static_live_parity(root: &Path, base: &str) -> Outcome {
    let index = build_index(root).map_err(|e| e.to_string())?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    export_static(&index, out.path(), true).map_err(|e| e.to_string())?;
    let mut config = ServerConfig::new(root);
    config.base_url = base.to_string();
    let server = DocServer::new(config, Arc::new(IndexHandle::new(index.clone())));
    let mut targets: Vec<Target> = index.dirs.iter().map(|d| Target::Dir(d.clone())).collect();
    for f in index.files.keys() {
        targets.push(Target::file(f));
        targets.push(Target::Source(f.clone()));
    }
    targets.extend(index.texts.keys().map(|t| Target::Text(t.clone())));
    let live_mode = LinkMode::Live {
        base: base.to_string(),
    };
    for target in &targets {
        let live_linker = Linker::new(live_mode.clone(), target.clone());
        let static_linker = Linker::new(LinkMode::Static, target.clone());
        let url = live_linker.href(target);
        let rel = target.static_path().expect("page target");
        let exported =
            fs::read_to_string(out.path().join(&rel)).map_err(|e| format!("{rel}: {e}"))?;
        let response = server.handle(&Request::get(&url, LOCAL));
        ensure(response.status == 200, || {
            format!("{url} gave {}", response.status)
        })?;
        let live = strip_controls(&normalize_links(&response.body_text(), &live_linker));
        let exported = strip_controls(&normalize_links(&exported, &static_linker));
        if live != exported {
            let at = live
                .bytes()
                .zip(exported.bytes())
                .position(|(a, b)| a != b)
                .unwrap_or(live.len().min(exported.len()));
            let lo = at.saturating_sub(60);
            return Err(format!(
                "{rel} differs at byte {at}:\n live {:?}\n file {:?}",
                String::from_utf8_lossy(&live.as_bytes()[lo..(at + 60).min(live.len())]),
                String::from_utf8_lossy(&exported.as_bytes()[lo..(at + 60).min(exported.len())])
            ));
        }
    }
    Ok(format!("{} pages identical", targets.len()))
}

fn read_ours(text: &str) -> Result<RTerm, String> {
    read_term_from_str(text, &default_operator_table())
        .map(|t| from_core(&t))
        .map_err(|e| e.to_string())
}

/// Writes `t` with and without operators; both readers must give `t` back.
pub fn reader_agreement(t: &RTerm) -> Result<(), String> {
    let ops = default_operator_table();
    let core = to_core(t);
    for text in [
        format!("{} .", write_term(&core, &ops)),
        format!("{} .", write_canonical(&core)),
    ] {
        let a = read_ours(&text).map_err(|e| format!("library reader failed on {text:?}: {e}"))?;
        let b =
            ref_reader::read(&text).map_err(|e| format!("reference failed on {text:?}: {e}"))?;
        ensure(a == *t, || {
            format!("round trip changed {t} into {a} via {text:?}")
        })?;
        ensure(a == b, || {
            format!("readers disagree on {text:?}: {a} vs {b}")
        })?;
    }
    Ok(())
}

pub fn reader_oracle(terms: usize) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x7e57);
    for _ in 0..terms {
        reader_agreement(&random_term(&mut rng, 4))?;
    }
    Ok(format!("{terms} terms agree"))
}
