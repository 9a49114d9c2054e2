//! Writing the whole tree as static files.

use std::fs;
use std::path::{Path, PathBuf};

use super::{
    render_dir_index, render_file_page, render_source_page, render_text_page, RenderOptions,
    Target, ASSETS,
};
use crate::db::{DbError, DocIndex};
use crate::wiki::IMAGE_EXTENSIONS;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Db(#[from] DbError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportSummary {
    /// Written files relative to the output directory, sorted.
    pub files: Vec<String>,
}

fn write(
    out: &Path,
    rel: &str,
    content: &[u8],
    summary: &mut ExportSummary,
) -> Result<(), ExportError> {
    let path = out.join(rel);
    let io = |source| ExportError::Io {
        path: path.clone(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(&path, content).map_err(io)?;
    summary.files.push(rel.to_string());
    Ok(())
}

fn is_image(name: &str) -> bool {
    name.rsplit_once('.')
        .is_some_and(|(_, ext)| IMAGE_EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()))
}

/// Writes a page per directory, source file, listing and text file, the
/// assets, and copies of images found under the root. Links are relative.
pub fn export_static(
    index: &DocIndex,
    out: &Path,
    public_only: bool,
) -> Result<ExportSummary, ExportError> {
    let opts = RenderOptions::exported(public_only);
    let mut summary = ExportSummary::default();
    let path_of = |t: &Target| t.static_path().unwrap_or_default();
    for dir in &index.dirs {
        let page = render_dir_index(index, dir, &opts)?;
        write(
            out,
            &path_of(&Target::Dir(dir.clone())),
            page.html.as_bytes(),
            &mut summary,
        )?;
    }
    for path in index.files.keys() {
        let page = render_file_page(index, path, &opts)?;
        write(
            out,
            &path_of(&Target::file(path)),
            page.html.as_bytes(),
            &mut summary,
        )?;
        let page = render_source_page(index, path, &opts)?;
        write(
            out,
            &path_of(&Target::Source(path.clone())),
            page.html.as_bytes(),
            &mut summary,
        )?;
    }
    for path in index.texts.keys() {
        let page = render_text_page(index, path, &opts)?;
        write(
            out,
            &path_of(&Target::Text(path.clone())),
            page.html.as_bytes(),
            &mut summary,
        )?;
    }
    for (name, content) in ASSETS {
        write(
            out,
            &path_of(&Target::Asset(name.into())),
            content.as_bytes(),
            &mut summary,
        )?;
    }
    let images = walkdir::WalkDir::new(&index.root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'))
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && is_image(&e.file_name().to_string_lossy()));
    for entry in images {
        let Ok(rel) = entry.path().strip_prefix(&index.root) else {
            continue;
        };
        let rel: Vec<String> = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();
        let rel = rel.join("/");
        let bytes = fs::read(entry.path()).map_err(|source| ExportError::Io {
            path: entry.path().into(),
            source,
        })?;
        write(out, &rel, &bytes, &mut summary)?;
    }
    summary.files.sort();
    Ok(summary)
}
