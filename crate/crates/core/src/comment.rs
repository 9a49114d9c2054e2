//! Structured comments: recognition, sectioning and keyword tags.
//!
//! A structured comment is either a run of `%` lines whose first line starts
//! with `%%` or `%!`, or a block comment opening with `/**`. Its content is
//! divided into a formal header, a wiki body and a trailing `@keyword`
//! section.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::reader::{CommentRecord, CommentStyle, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommentSyntax {
    Percent,
    SlashStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    PredicateDoc,
    ModuleDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommentConfig {
    /// Accept `%!` as well as `%%`.
    pub allow_bang: bool,
}

impl Default for CommentConfig {
    fn default() -> Self {
        CommentConfig { allow_bang: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TagKeyword {
    Param,
    Throws,
    See,
    Author,
    Version,
    Deprecated,
    Compat,
    Copyright,
    License,
    Bug,
    Tbd,
}

impl TagKeyword {
    pub const ALL: [TagKeyword; 11] = [
        TagKeyword::Param,
        TagKeyword::Throws,
        TagKeyword::See,
        TagKeyword::Author,
        TagKeyword::Version,
        TagKeyword::Deprecated,
        TagKeyword::Compat,
        TagKeyword::Copyright,
        TagKeyword::License,
        TagKeyword::Bug,
        TagKeyword::Tbd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TagKeyword::Param => "param",
            TagKeyword::Throws => "throws",
            TagKeyword::See => "see",
            TagKeyword::Author => "author",
            TagKeyword::Version => "version",
            TagKeyword::Deprecated => "deprecated",
            TagKeyword::Compat => "compat",
            TagKeyword::Copyright => "copyright",
            TagKeyword::License => "license",
            TagKeyword::Bug => "bug",
            TagKeyword::Tbd => "tbd",
        }
    }

    /// Heading used when rendering a group of these tags.
    pub fn title(self) -> &'static str {
        match self {
            TagKeyword::Param => "Parameters",
            TagKeyword::Throws => "Throws",
            TagKeyword::See => "See also",
            TagKeyword::Author => "Author",
            TagKeyword::Version => "Version",
            TagKeyword::Deprecated => "Deprecated",
            TagKeyword::Compat => "Compatibility",
            TagKeyword::Copyright => "Copyright",
            TagKeyword::License => "License",
            TagKeyword::Bug => "Bug",
            TagKeyword::Tbd => "To be done",
        }
    }
}

impl fmt::Display for TagKeyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TagKeyword {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        TagKeyword::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tag {
    pub keyword: TagKeyword,
    /// Wiki text, continuation lines joined with `\n`.
    pub value: String,
    /// Offset of the tag's first line within the comment (0-based).
    pub line_offset: usize,
}

/// A tag line that was not accepted. Its text is shown as body text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagIssue {
    pub line_offset: usize,
    pub text: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Header,
    Body,
    Tags,
}

/// One content line of a comment after delimiter and margin removal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContentLine {
    pub text: String,
    /// Offset from the comment's first source line.
    pub offset: usize,
    pub section: Section,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommentError {
    #[error("structured comment has no formal header")]
    EmptyHeader,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredComment {
    pub style: CommentSyntax,
    /// Source text of the comment, unchanged.
    pub raw: String,
    pub span: SourceSpan,
    pub kind: DocKind,
    pub header_text: String,
    pub body_text: String,
    pub tags: Vec<Tag>,
    pub tag_issues: Vec<TagIssue>,
    pub lines: Vec<ContentLine>,
    /// Offset of the first header line.
    pub header_offset: usize,
}

impl StructuredComment {
    /// Source line of a content line offset.
    pub fn source_line(&self, offset: usize) -> usize {
        self.span.line_start + offset
    }

    /// Source line of the `k`-th header line.
    pub fn header_source_line(&self, k: usize) -> usize {
        let offset = self
            .lines
            .iter()
            .filter(|l| l.section == Section::Header)
            .nth(k)
            .map_or(self.header_offset, |l| l.offset);
        self.source_line(offset)
    }

    pub fn tag_lines(&self) -> Vec<&str> {
        self.section_lines(Section::Tags)
    }

    fn section_lines(&self, s: Section) -> Vec<&str> {
        self.lines
            .iter()
            .filter(|l| l.section == s)
            .map(|l| l.text.as_str())
            .collect()
    }
}

/// Sections of a structured comment as returned by [`split_comment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitComment {
    pub header_text: String,
    pub body_text: String,
    pub tag_lines: Vec<String>,
}

fn is_percent_marker(line: &str, cfg: &CommentConfig) -> bool {
    let rest = if let Some(r) = line.strip_prefix("%%") {
        r
    } else if let Some(r) = line.strip_prefix("%!").filter(|_| cfg.allow_bang) {
        r
    } else {
        return false;
    };
    rest.chars().next().is_none_or(char::is_whitespace)
}

fn is_slashstar_marker(text: &str) -> bool {
    text.strip_prefix("/**")
        .and_then(|r| r.chars().next())
        .is_some_and(char::is_whitespace)
}

/// Recognise a structured comment. Plain comments give `None`.
pub fn classify_comment(c: &CommentRecord, cfg: &CommentConfig) -> Option<StructuredComment> {
    let (style, texts) = match c.style {
        CommentStyle::Line if is_percent_marker(&c.text, cfg) => {
            (CommentSyntax::Percent, strip_percent(&c.text, cfg))
        }
        CommentStyle::Block if is_slashstar_marker(&c.text) => {
            (CommentSyntax::SlashStar, strip_slashstar(&c.text))
        }
        _ => return None,
    };
    let mut sc = StructuredComment {
        style,
        raw: c.text.clone(),
        span: c.span,
        kind: DocKind::PredicateDoc,
        header_text: String::new(),
        body_text: String::new(),
        tags: Vec::new(),
        tag_issues: Vec::new(),
        lines: texts
            .into_iter()
            .enumerate()
            .map(|(offset, text)| ContentLine {
                text,
                offset,
                section: Section::Body,
            })
            .collect(),
        header_offset: 0,
    };
    assign_sections(&mut sc, cfg);
    sc.header_text = sc.section_lines(Section::Header).join("\n");
    sc.body_text = trim_blank_lines(&sc.section_lines(Section::Body));
    if sc.header_text.trim_start().starts_with("<module>") {
        sc.kind = DocKind::ModuleDoc;
    }
    let parsed = parse_tags(&sc.lines);
    sc.tags = parsed.0;
    sc.tag_issues = parsed.1;
    Some(sc)
}

/// Header, body and tag lines of a structured comment.
pub fn split_comment(sc: &StructuredComment) -> Result<SplitComment, CommentError> {
    if sc.header_text.trim().is_empty() {
        return Err(CommentError::EmptyHeader);
    }
    Ok(SplitComment {
        header_text: sc.header_text.clone(),
        body_text: sc.body_text.clone(),
        tag_lines: sc.tag_lines().into_iter().map(str::to_string).collect(),
    })
}

fn strip_percent(text: &str, cfg: &CommentConfig) -> Vec<String> {
    text.split('\n')
        .map(|line| {
            let line = line.trim_start();
            let rest = if is_percent_marker(line, cfg) {
                &line[2..]
            } else {
                &line[1..]
            };
            expand_tabs(rest.trim_end())
        })
        .collect()
}

fn strip_slashstar(text: &str) -> Vec<String> {
    let inner = text.strip_prefix("/**").unwrap_or(text);
    let inner = inner.strip_suffix("*/").unwrap_or(inner);
    let mut lines: Vec<String> = inner
        .split('\n')
        .map(|l| expand_tabs(l.trim_end()))
        .collect();
    let candidates: Vec<usize> = (1..lines.len())
        .filter(|&i| !lines[i].trim().is_empty())
        .collect();
    let starred = candidates
        .iter()
        .filter(|&&i| lines[i].trim_start().starts_with('*'))
        .count();
    if !candidates.is_empty() && starred * 5 >= candidates.len() * 4 {
        for line in lines.iter_mut().skip(1) {
            let t = line.trim_start();
            if let Some(rest) = t.strip_prefix('*') {
                *line = rest.to_string();
            }
        }
    }
    lines
}

fn expand_tabs(s: &str) -> String {
    if !s.contains('\t') {
        return s.to_string();
    }
    let mut out = String::new();
    let mut col = 0;
    for c in s.chars() {
        if c == '\t' {
            let n = 8 - col % 8;
            out.extend(std::iter::repeat_n(' ', n));
            col += n;
        } else {
            out.push(c);
            col += 1;
        }
    }
    out
}

fn indent(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn is_blank(s: &str) -> bool {
    s.trim().is_empty()
}

fn assign_sections(sc: &mut StructuredComment, cfg: &CommentConfig) {
    let lines = &mut sc.lines;
    let n = lines.len();
    // Header.
    let body_start = match sc.style {
        CommentSyntax::Percent => {
            let raw_lines: Vec<&str> = sc.raw.split('\n').map(str::trim_start).collect();
            let end = raw_lines
                .iter()
                .position(|l| !is_percent_marker(l, cfg))
                .unwrap_or(n);
            for l in lines.iter_mut().take(end) {
                l.section = Section::Header;
                l.text = l.text.trim().to_string();
            }
            sc.header_offset = 0;
            end
        }
        CommentSyntax::SlashStar => {
            let first = lines.iter().position(|l| !is_blank(&l.text)).unwrap_or(n);
            let end = (first..n).find(|&i| is_blank(&lines[i].text)).unwrap_or(n);
            for l in lines.iter_mut().take(end).skip(first) {
                l.section = Section::Header;
                l.text = l.text.trim().to_string();
            }
            sc.header_offset = first;
            end
        }
    };

    // Dedent what follows the header.
    let min = lines[body_start..]
        .iter()
        .filter(|l| !is_blank(&l.text))
        .map(|l| indent(&l.text))
        .min()
        .unwrap_or(0);
    for l in lines.iter_mut().skip(body_start) {
        l.text = if is_blank(&l.text) {
            String::new()
        } else {
            l.text[min..].to_string()
        };
    }

    // Tag section: a trailing run of `@` lines, blanks and indented
    // continuations, after the last code fence.
    let last_fence = (body_start..n)
        .rev()
        .find(|&i| lines[i].text.trim_end() == "==");
    let from = last_fence.map_or(body_start, |f| f + 1);
    let mut tag_start = None;
    for i in (from..n).rev() {
        let t = &lines[i].text;
        if t.starts_with('@') {
            tag_start = Some(i);
        } else if !(is_blank(t) || t.starts_with(' ')) {
            break;
        }
    }
    if let Some(start) = tag_start {
        for l in lines.iter_mut().skip(start) {
            l.section = Section::Tags;
        }
    }
}

fn trim_blank_lines(lines: &[&str]) -> String {
    let start = lines
        .iter()
        .position(|l| !is_blank(l))
        .unwrap_or(lines.len());
    let end = lines
        .iter()
        .rposition(|l| !is_blank(l))
        .map_or(start, |e| e + 1);
    lines[start..end].join("\n")
}

/// Parse the tag lines of a comment. Rejected lines come back as issues.
pub fn parse_tags(lines: &[ContentLine]) -> (Vec<Tag>, Vec<TagIssue>) {
    let mut tags = Vec::new();
    let mut issues = Vec::new();
    let tag_lines: Vec<&ContentLine> = lines
        .iter()
        .filter(|l| l.section == Section::Tags)
        .collect();
    let mut i = 0;
    while i < tag_lines.len() {
        let line = tag_lines[i];
        i += 1;
        let Some(rest) = line.text.strip_prefix('@') else {
            continue;
        };
        let mut value: Vec<&str> = Vec::new();
        let (kw, first) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if !first.trim().is_empty() {
            value.push(first.trim());
        }
        let mut raw = vec![line.text.as_str()];
        while i < tag_lines.len() && !tag_lines[i].text.starts_with('@') {
            if !is_blank(&tag_lines[i].text) {
                value.push(tag_lines[i].text.trim());
                raw.push(tag_lines[i].text.as_str());
            }
            i += 1;
        }
        let value = value.join("\n");
        let offset = line.offset;
        match kw {
            "error" => tags.push(Tag {
                keyword: TagKeyword::Throws,
                value: format!("error({value}, Context)"),
                line_offset: offset,
            }),
            "return" | "since" | "serial" => issues.push(TagIssue {
                line_offset: offset,
                text: raw.join("\n"),
                message: format!("unsupported keyword @{kw}"),
            }),
            _ => match kw.parse::<TagKeyword>() {
                Ok(keyword) => tags.push(Tag {
                    keyword,
                    value,
                    line_offset: offset,
                }),
                Err(()) => issues.push(TagIssue {
                    line_offset: offset,
                    text: raw.join("\n"),
                    message: format!("unknown keyword @{kw}"),
                }),
            },
        }
    }
    (tags, issues)
}

/// First sentence of the body on a single line.
pub fn extract_summary(body_text: &str) -> String {
    let lines: Vec<&str> = body_text.lines().skip_while(|l| is_blank(l)).collect();
    let Some(first) = lines.first() else {
        return String::new();
    };
    if first.trim() == "==" {
        return String::new();
    }
    let para_len = lines
        .iter()
        .position(|l| is_blank(l))
        .unwrap_or(lines.len());
    let para = lines[..para_len].join("\n");
    let chars: Vec<(usize, char)> = para.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if matches!(c, '.' | '!' | '?') && chars.get(k + 1).is_none_or(|&(_, n)| n.is_whitespace())
        {
            return collapse_ws(&para[..i + c.len_utf8()]);
        }
    }
    collapse_ws(first)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
