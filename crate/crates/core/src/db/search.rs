//! Keyword search over names, argument names, types and summaries.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{DocIndex, FileDoc, PredDoc};
use crate::header::type_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HitKind {
    Predicate,
    Module,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    /// Predicate indicator, or file path for module hits.
    pub target: String,
    pub kind: HitKind,
    pub file: String,
    pub summary: String,
    #[serde(rename = "public")]
    pub is_public: bool,
    pub score: u32,
}

/// A further body of documentation searched alongside the index.
pub trait SearchCorpus: Send + Sync {
    /// `words` are lowercased and distinct.
    fn search(&self, words: &[String], include_private: bool) -> Vec<SearchHit>;
}

const NAME_SCORE: u32 = 3;
const ARG_SCORE: u32 = 2;
const SUMMARY_SCORE: u32 = 1;

/// Lowercased alphanumeric runs.
pub(crate) fn words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn name_words(name: &str) -> BTreeSet<String> {
    let lower = name.to_lowercase();
    let mut set: BTreeSet<String> = lower
        .split('_')
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect();
    set.insert(lower);
    set
}

struct Fields {
    name: BTreeSet<String>,
    args: BTreeSet<String>,
    summary: BTreeSet<String>,
}

impl Fields {
    fn score(&self, query: &[String]) -> u32 {
        query
            .iter()
            .map(|w| {
                let mut s = 0;
                if self.name.contains(w) {
                    s += NAME_SCORE;
                }
                if self.args.contains(w) {
                    s += ARG_SCORE;
                }
                if self.summary.contains(w) {
                    s += SUMMARY_SCORE;
                }
                s
            })
            .sum()
    }
}

fn pred_fields(p: &PredDoc) -> Fields {
    let mut args = BTreeSet::new();
    for m in &p.modes {
        for a in &m.args {
            args.insert(a.name.to_lowercase());
            if let Some(t) = &a.type_ {
                args.extend(words(&type_text(t)));
            }
        }
    }
    Fields {
        name: name_words(p.name()),
        args,
        summary: words(&p.summary),
    }
}

fn module_fields(f: &FileDoc) -> Fields {
    let mut name = name_words(f.stem());
    if let Some(m) = &f.module.module_name {
        name.extend(name_words(m));
    }
    let mut summary = words(&f.module.summary);
    if let Some(t) = &f.module.title {
        summary.extend(words(t));
    }
    Fields {
        name,
        args: BTreeSet::new(),
        summary,
    }
}

fn query_words(query: &str) -> Vec<String> {
    words(query).into_iter().collect()
}

pub fn search(index: &DocIndex, query: &str, include_private: bool) -> Vec<SearchHit> {
    search_with(index, query, include_private, &[])
}

/// Hits ordered by descending score, then target, then file.
pub fn search_with(
    index: &DocIndex,
    query: &str,
    include_private: bool,
    extra: &[&dyn SearchCorpus],
) -> Vec<SearchHit> {
    let q = query_words(query);
    if q.is_empty() {
        return Vec::new();
    }
    let mut hits = Vec::new();
    let mut push = |target: &str, kind, file: &str, summary: &str, is_public, score| {
        if score > 0 && (include_private || is_public) {
            hits.push(SearchHit {
                target: target.to_string(),
                kind,
                file: file.to_string(),
                summary: summary.to_string(),
                is_public,
                score,
            });
        }
    };
    for f in index.files.values() {
        push(
            &f.path,
            HitKind::Module,
            &f.path,
            &f.module.summary,
            true,
            module_fields(f).score(&q),
        );
        for p in &f.preds {
            push(
                &p.indicator,
                HitKind::Predicate,
                &f.path,
                &p.summary,
                p.is_public,
                pred_fields(p).score(&q),
            );
        }
        for ind in f.undocumented_defined() {
            let name = ind
                .rsplit_once('/')
                .map_or(ind, |(n, _)| n.trim_end_matches('/'));
            let fields = Fields {
                name: name_words(name),
                args: BTreeSet::new(),
                summary: BTreeSet::new(),
            };
            push(
                ind,
                HitKind::Predicate,
                &f.path,
                "",
                f.is_public(ind),
                fields.score(&q),
            );
        }
    }
    for corpus in extra {
        hits.extend(corpus.search(&q, include_private));
    }
    hits.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.file.cmp(&b.file))
    });
    hits
}
