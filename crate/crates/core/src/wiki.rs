//! Wiki markup of comment bodies and `.txt` files.
//!
//! Blocks: paragraphs, bulleted (`-`, `*`), numbered (`1.`) and description
//! (`$ term : text`) lists, and `==` fenced code. Inline: `*bold*`,
//! `_italic_`, `=code=` for single words, `*|any text|*` and friends for
//! longer spans, automatic links for predicate indicators, Prolog and wiki
//! files and images, and `[[image.png]]` for inline images.
//!
//! There is no raw HTML. Every character of the input ends up in a text or
//! code leaf.

use serde::Serialize;

use crate::comment::{Tag, TagKeyword};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WikiDoc {
    pub blocks: Vec<Block>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ListKind {
    Bulleted,
    Numbered,
    Description,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListItem {
    /// Term of a description item.
    pub label: Option<Vec<Inline>>,
    pub content: Vec<Inline>,
    pub children: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagEntry {
    pub keyword: TagKeyword,
    pub content: Vec<Inline>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Block {
    Paragraph(Vec<Inline>),
    List {
        kind: ListKind,
        items: Vec<ListItem>,
    },
    CodeBlock(String),
    TagSection(Vec<TagEntry>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Prolog,
    Wiki,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Inline {
    Text(String),
    Bold(Vec<Inline>),
    Italic(Vec<Inline>),
    Code(String),
    PredLink(String),
    FileLink { path: String, kind: FileKind },
    Image { path: String, inline: bool },
    ArgRef(String),
}

pub const IMAGE_EXTENSIONS: [&str; 5] = ["png", "gif", "jpg", "jpeg", "svg"];

/// Parses wiki text. Capitalised words naming exactly one of `arg_names`
/// become argument references.
pub fn parse_wiki(text: &str, arg_names: &[&str]) -> WikiDoc {
    let lines: Vec<&str> = text.lines().collect();
    let mut warnings = Vec::new();
    let blocks = parse_blocks(&lines, arg_names, &mut warnings);
    WikiDoc { blocks, warnings }
}

/// Builds the keyword section from parsed tags.
pub fn tag_section(tags: &[Tag], arg_names: &[&str]) -> Option<Block> {
    if tags.is_empty() {
        return None;
    }
    let entries = tags
        .iter()
        .map(|t| TagEntry {
            keyword: t.keyword,
            content: inlines(&t.value, arg_names),
        })
        .collect();
    Some(Block::TagSection(entries))
}

fn inlines(text: &str, arg_names: &[&str]) -> Vec<Inline> {
    mark_args(parse_inlines(text), arg_names)
}

fn indent(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn is_blank(s: &str) -> bool {
    s.trim().is_empty()
}

fn is_fence(s: &str) -> bool {
    s.trim() == "=="
}

/// Marker of a list item line: kind, column, and the text after the marker.
fn item_marker(line: &str) -> Option<(ListKind, usize, &str)> {
    let col = indent(line);
    let t = &line[col..];
    if let Some(rest) = t.strip_prefix("- ").or_else(|| t.strip_prefix("* ")) {
        return Some((ListKind::Bulleted, col, rest));
    }
    if let Some(rest) = t.strip_prefix("$ ") {
        return Some((ListKind::Description, col, rest));
    }
    let digits = t.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = t[digits..].strip_prefix(". ") {
            return Some((ListKind::Numbered, col, rest));
        }
    }
    None
}

fn parse_blocks(lines: &[&str], args: &[&str], warnings: &mut Vec<String>) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if is_blank(line) {
            i += 1;
        } else if is_fence(line) {
            let start = i + 1;
            match (start..lines.len()).find(|&j| is_fence(lines[j])) {
                Some(end) => {
                    blocks.push(Block::CodeBlock(lines[start..end].join("\n")));
                    i = end + 1;
                }
                None => {
                    warnings.push(format!("line {}: unclosed `==` code block", i + 1));
                    blocks.push(Block::CodeBlock(lines[start..].join("\n")));
                    i = lines.len();
                }
            }
        } else if let Some((kind, col, _)) = item_marker(line) {
            let (block, next) = parse_list(lines, i, kind, col, args, warnings);
            blocks.push(block);
            i = next;
        } else {
            let start = i;
            i += 1;
            while i < lines.len()
                && !is_blank(lines[i])
                && !is_fence(lines[i])
                && !(item_marker(lines[i]).is_some() && indent(lines[i]) > 0)
            {
                i += 1;
            }
            let text = lines[start..i]
                .iter()
                .map(|l| l.trim())
                .collect::<Vec<_>>()
                .join("\n");
            blocks.push(Block::Paragraph(inlines(&text, args)));
        }
    }
    blocks
}

fn parse_list(
    lines: &[&str],
    start: usize,
    kind: ListKind,
    col: usize,
    args: &[&str],
    warnings: &mut Vec<String>,
) -> (Block, usize) {
    let mut items = Vec::new();
    let mut i = start;
    while let Some((k, c, first)) = lines.get(i).and_then(|l| item_marker(l)) {
        if k != kind || c != col {
            break;
        }
        let content_col = lines[i].len() - first.len();
        i += 1;
        // Continuation lines of the item text.
        let mut text = vec![first.trim()];
        while i < lines.len()
            && !is_blank(lines[i])
            && indent(lines[i]) > col
            && item_marker(lines[i]).is_none()
            && !is_fence(lines[i])
        {
            text.push(lines[i].trim());
            i += 1;
        }
        // Nested blocks: anything indented past the marker, blank lines
        // included when more indented material follows.
        let nested_start = i;
        let mut j = i;
        while j < lines.len() {
            if is_blank(lines[j]) {
                j += 1;
            } else if indent(lines[j]) > col {
                j += 1;
                i = j;
            } else {
                break;
            }
        }
        let nested: Vec<&str> = lines[nested_start..i]
            .iter()
            .map(|l| {
                let cut = indent(l).min(content_col);
                &l[cut..]
            })
            .collect();
        let children = parse_blocks(&nested, args, warnings);

        let joined = text.join("\n");
        let (label, content) = match kind {
            ListKind::Description => match joined.split_once(" : ") {
                Some((term, desc)) => {
                    (Some(inlines(term.trim(), args)), inlines(desc.trim(), args))
                }
                None => (Some(inlines(joined.trim(), args)), Vec::new()),
            },
            _ => (None, inlines(&joined, args)),
        };
        items.push(ListItem {
            label,
            content,
            children,
        });

        // A blank line ends the list unless another item follows.
        let mut k = i;
        while k < lines.len() && is_blank(lines[k]) {
            k += 1;
        }
        match lines.get(k).and_then(|l| item_marker(l)) {
            Some((nk, nc, _)) if nk == kind && nc == col => i = k,
            _ => break,
        }
    }
    (Block::List { kind, items }, i)
}

fn is_word_start(text: &str, pos: usize) -> bool {
    text[..pos]
        .chars()
        .next_back()
        .is_none_or(|c| c.is_whitespace() || "([{\"'".contains(c))
}

fn is_word_end(text: &str, pos: usize) -> bool {
    text[pos..]
        .chars()
        .next()
        .is_none_or(|c| c.is_whitespace() || ".,;:!?)]}\"'".contains(c))
}

const TRAILING_PUNCT: &str = ".,;:!?)]}\"'";

/// Inline markup of a run of text.
pub fn parse_inlines(text: &str) -> Vec<Inline> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut pos = 0;
    while pos < text.len() {
        if is_word_start(text, pos) {
            if let Some((inline, len)) = delimited_at(text, pos) {
                flush(&mut buf, &mut out);
                out.push(inline);
                pos += len;
                continue;
            }
            let rest = &text[pos..];
            let tok_len = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let tok = &rest[..tok_len];
            let core = tok.trim_end_matches(|c| TRAILING_PUNCT.contains(c));
            if !core.is_empty() {
                let inline = match emphasize(core) {
                    Inline::Text(_) => autolink(core),
                    other => other,
                };
                if !matches!(inline, Inline::Text(_)) {
                    flush(&mut buf, &mut out);
                    out.push(inline);
                    pos += core.len();
                    continue;
                }
            }
        }
        let c = text[pos..].chars().next().expect("in bounds");
        buf.push(c);
        pos += c.len_utf8();
    }
    flush(&mut buf, &mut out);
    out
}

fn flush(buf: &mut String, out: &mut Vec<Inline>) {
    if !buf.is_empty() {
        out.push(Inline::Text(std::mem::take(buf)));
    }
}

/// `[[image]]` and the `*|...|*` family, which may contain spaces.
fn delimited_at(text: &str, pos: usize) -> Option<(Inline, usize)> {
    let rest = &text[pos..];
    if let Some(inner) = rest.strip_prefix("[[") {
        let end = inner.find("]]")?;
        let path = &inner[..end];
        if path.is_empty() || path.contains(char::is_whitespace) {
            return None;
        }
        let inline = match file_kind(path) {
            Some(FileTarget::Image) => Inline::Image {
                path: path.to_string(),
                inline: true,
            },
            Some(FileTarget::File(kind)) => Inline::FileLink {
                path: path.to_string(),
                kind,
            },
            None => return None,
        };
        return Some((inline, end + 4));
    }
    let mut chars = rest.chars();
    let f = chars.next()?;
    if !"*_=".contains(f) || chars.next() != Some('|') {
        return None;
    }
    let close = format!("|{f}");
    let end = rest[2..].find(&close)?;
    let inner = &rest[2..2 + end];
    let len = end + 4;
    if inner.is_empty() || !is_word_end(text, pos + len) {
        return None;
    }
    Some((font(f, inner), len))
}

fn font(f: char, inner: &str) -> Inline {
    match f {
        '*' => Inline::Bold(parse_inlines(inner)),
        '_' => Inline::Italic(parse_inlines(inner)),
        _ => Inline::Code(inner.to_string()),
    }
}

/// Font markup of a single token: `*w*`, `_w_`, `=w=` for one word, or the
/// `*|text|*` forms.
pub fn emphasize(span: &str) -> Inline {
    let text = || Inline::Text(span.to_string());
    let mut chars = span.chars();
    let Some(f) = chars.next() else { return text() };
    if !"*_=".contains(f) || span.len() < 3 || !span.ends_with(f) {
        return text();
    }
    let inner = &span[1..span.len() - 1];
    if let Some(multi) = inner.strip_prefix('|').and_then(|s| s.strip_suffix('|')) {
        if !multi.is_empty() {
            return font(f, multi);
        }
        return text();
    }
    let first_ok = inner
        .chars()
        .next()
        .is_some_and(|c| c.is_alphanumeric() || c == '_');
    if !first_ok || inner.contains(f) || inner.contains(char::is_whitespace) {
        return text();
    }
    font(f, inner)
}

enum FileTarget {
    File(FileKind),
    Image,
}

fn file_kind(path: &str) -> Option<FileTarget> {
    let (stem, ext) = path.rsplit_once('.')?;
    let stem_name = stem.rsplit('/').next().unwrap_or(stem);
    let ok = !stem_name.is_empty()
        && path
            .chars()
            .all(|c| c.is_alphanumeric() || "_-./".contains(c));
    if !ok {
        return None;
    }
    match ext {
        "pl" => Some(FileTarget::File(FileKind::Prolog)),
        "txt" => Some(FileTarget::File(FileKind::Wiki)),
        e if IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()) => Some(FileTarget::Image),
        _ => None,
    }
}

fn is_pred_indicator(word: &str) -> bool {
    let word = match word.split_once(':') {
        Some((m, rest)) if is_identifier(m) => rest,
        _ => word,
    };
    let Some((name, arity)) = word.split_once('/') else {
        return false;
    };
    let arity = arity.strip_prefix('/').unwrap_or(arity);
    is_identifier(name) && !arity.is_empty() && arity.bytes().all(|b| b.is_ascii_digit())
}

fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_lowercase)
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Automatic links for a whitespace-delimited word with trailing
/// punctuation already removed.
pub fn autolink(word: &str) -> Inline {
    if let Some(path) = word.strip_prefix("[[").and_then(|w| w.strip_suffix("]]")) {
        if let Some(FileTarget::Image) = file_kind(path) {
            return Inline::Image {
                path: path.to_string(),
                inline: true,
            };
        }
    }
    if is_pred_indicator(word) {
        return Inline::PredLink(word.to_string());
    }
    match file_kind(word) {
        Some(FileTarget::File(kind)) => Inline::FileLink {
            path: word.to_string(),
            kind,
        },
        Some(FileTarget::Image) => Inline::Image {
            path: word.to_string(),
            inline: false,
        },
        None => Inline::Text(word.to_string()),
    }
}

/// Turns capitalised words naming exactly one argument into references.
pub fn mark_args(inlines: Vec<Inline>, arg_names: &[&str]) -> Vec<Inline> {
    if arg_names.is_empty() {
        return inlines;
    }
    let mut out = Vec::new();
    for inline in inlines {
        match inline {
            Inline::Text(t) => split_args(&t, arg_names, &mut out),
            Inline::Bold(v) => out.push(Inline::Bold(mark_args(v, arg_names))),
            Inline::Italic(v) => out.push(Inline::Italic(mark_args(v, arg_names))),
            other => out.push(other),
        }
    }
    out
}

fn split_args(text: &str, arg_names: &[&str], out: &mut Vec<Inline>) {
    let mut buf = String::new();
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        let ident = c.is_alphanumeric() || c == '_';
        let len = if ident {
            rest.find(|c: char| !(c.is_alphanumeric() || c == '_'))
                .unwrap_or(rest.len())
        } else {
            c.len_utf8()
        };
        let word = &rest[..len];
        let capital = word.chars().next().is_some_and(char::is_uppercase);
        if ident && capital && arg_names.iter().filter(|a| **a == word).count() == 1 {
            flush(&mut buf, out);
            out.push(Inline::ArgRef(word.to_string()));
        } else {
            buf.push_str(word);
        }
        rest = &rest[len..];
    }
    flush(&mut buf, out);
}

/// Writes a document back as wiki text.
pub fn to_plain(doc: &WikiDoc) -> String {
    let mut out = String::new();
    write_blocks(&doc.blocks, 0, &mut out);
    out
}

fn write_blocks(blocks: &[Block], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (n, b) in blocks.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        match b {
            Block::Paragraph(v) => {
                for line in plain_inlines(v).lines() {
                    out.push_str(&pad);
                    out.push_str(line);
                    out.push('\n');
                }
            }
            Block::CodeBlock(code) => {
                out.push_str(&format!("{pad}==\n"));
                for line in code.lines() {
                    out.push_str(&format!("{pad}{line}\n"));
                }
                out.push_str(&format!("{pad}==\n"));
            }
            Block::List { kind, items } => {
                for (k, item) in items.iter().enumerate() {
                    let marker = match kind {
                        ListKind::Bulleted => "- ".to_string(),
                        ListKind::Numbered => format!("{}. ", k + 1),
                        ListKind::Description => "$ ".to_string(),
                    };
                    let mut text = String::new();
                    if let Some(label) = &item.label {
                        text.push_str(&plain_inlines(label));
                        if !item.content.is_empty() {
                            text.push_str(" : ");
                        }
                    }
                    text.push_str(&plain_inlines(&item.content));
                    let sub = " ".repeat(indent + marker.len());
                    for (l, line) in text.lines().enumerate() {
                        if l == 0 {
                            out.push_str(&format!("{pad}{marker}{line}\n"));
                        } else {
                            out.push_str(&format!("{sub}{line}\n"));
                        }
                    }
                    if !item.children.is_empty() {
                        out.push('\n');
                        write_blocks(&item.children, indent + marker.len(), out);
                    }
                }
            }
            Block::TagSection(entries) => {
                for e in entries {
                    out.push_str(&format!(
                        "{pad}@{} {}\n",
                        e.keyword,
                        plain_inlines(&e.content)
                    ));
                }
            }
        }
    }
}

fn plain_inlines(v: &[Inline]) -> String {
    v.iter()
        .map(|i| match i {
            Inline::Text(t) => t.clone(),
            Inline::Bold(v) => format!("*|{}|*", plain_inlines(v)),
            Inline::Italic(v) => format!("_|{}|_", plain_inlines(v)),
            Inline::Code(c) => format!("=|{c}|="),
            Inline::PredLink(p) => p.clone(),
            Inline::FileLink { path, .. } => path.clone(),
            Inline::Image { path, inline: true } => format!("[[{path}]]"),
            Inline::Image {
                path,
                inline: false,
            } => path.clone(),
            Inline::ArgRef(a) => a.clone(),
        })
        .collect()
}

/// Concatenated text of inline content, markup removed.
pub fn inline_text(v: &[Inline]) -> String {
    v.iter()
        .map(|i| match i {
            Inline::Text(t) | Inline::Code(t) | Inline::PredLink(t) | Inline::ArgRef(t) => {
                t.clone()
            }
            Inline::Bold(v) | Inline::Italic(v) => inline_text(v),
            Inline::FileLink { path, .. } | Inline::Image { path, .. } => path.clone(),
        })
        .collect()
}
