//! Documentation for Prolog source trees from structured comments.
//!
//! Sources are read with comment positions kept ([`reader`]), structured
//! comments are split into a formal header, a wiki body and tags
//! ([`comment`], [`header`], [`wiki`]), and the results are collected per
//! file in a [`db::DocIndex`]. Pages are rendered by [`html`] and either
//! written as a static tree or served live by [`server`].

pub mod comment;
pub mod db;
pub mod diag;
pub mod header;
pub mod html;
pub mod reader;
pub mod server;
pub mod wiki;
pub mod xref;

pub use comment::{StructuredComment, Tag, TagKeyword};
pub use db::{
    build_index, lint, reload, search, DbError, DocIndex, FileDoc, IndexHandle, PredDoc, SearchHit,
};
pub use diag::{Diagnostic, Severity};
pub use header::{Determinism, Mode, ModeDecl};
pub use html::{export_static, Page, RenderOptions};
pub use server::{serve, DocServer, RunningServer, ServerConfig, ServerError};
