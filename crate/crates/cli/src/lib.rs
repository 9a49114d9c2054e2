//! Command line front end: `serve`, `build`, `lint` and `search`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plscribe::db::{build_index, lint, search, DocIndex, IndexHandle};
use plscribe::html::export_static;
use plscribe::server::{serve, DocServer, ServerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROBLEMS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "plscribe",
    version,
    about = "Documentation for Prolog source trees"
)]
#[command(subcommand_required = true, arg_required_else_help = true)]
pub struct Cli {
    /// Setting as key=value; may be repeated. Overrides the config file.
    #[arg(long = "config", value_name = "KEY=VALUE", global = true)]
    pub settings: Vec<String>,
    /// File of key=value lines.
    #[arg(long, value_name = "FILE", global = true)]
    pub config_file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve documentation over HTTP.
    Serve(ServeArgs),
    /// Write documentation as static HTML.
    Build(BuildArgs),
    /// Report comment problems and undocumented exports.
    Lint(LintArgs),
    /// Search predicate and module documentation.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Source tree; defaults to the working directory.
    pub root: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    /// Additional peer address pattern allowed to browse, e.g. 192.168.1.*
    #[arg(long)]
    pub allow: Vec<String>,
    /// Editor command with {file} and {line} placeholders.
    #[arg(long)]
    pub editor: Option<String>,
    /// Show private predicates by default.
    #[arg(long)]
    pub private: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub root: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "html")]
    pub out: PathBuf,
    /// Include private predicates.
    #[arg(long)]
    pub private: bool,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    pub root: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub query: String,
    pub root: Option<PathBuf>,
    /// Include private predicates.
    #[arg(long)]
    pub private: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Db(#[from] plscribe::DbError),
    #[error(transparent)]
    Export(#[from] plscribe::html::ExportError),
    #[error(transparent)]
    Server(#[from] plscribe::ServerError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const SETTINGS: [&str; 6] = ["port", "allow", "editor", "public_only", "base_url", "bind"];

/// Settings from the config file, then `--config`, later ones winning.
fn settings(cli: &Cli) -> Result<BTreeMap<String, String>, CliError> {
    let mut lines: Vec<String> = Vec::new();
    if let Some(path) = &cli.config_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        lines.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    lines.extend(cli.settings.iter().cloned());
    let mut map = BTreeMap::new();
    for line in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value: {line}")))?;
        let k = k.trim();
        if !SETTINGS.contains(&k) {
            return Err(CliError::Usage(format!(
                "unknown setting {k} (known: {})",
                SETTINGS.join(", ")
            )));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_setting<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("bad value for {key}: {v}")))
        })
        .transpose()
}

fn root_of(root: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    match root {
        Some(r) => Ok(r.clone()),
        None => Ok(std::env::current_dir()?),
    }
}

fn open_index(root: &Path) -> Result<DocIndex, CliError> {
    Ok(build_index(root)?)
}

/// Server settings from flags over settings over defaults.
pub fn server_config(
    args: &ServeArgs,
    map: &BTreeMap<String, String>,
) -> Result<ServerConfig, CliError> {
    let mut config = ServerConfig::new(root_of(&args.root)?);
    if let Some(p) = parse_setting(map, "port")? {
        config.port = p;
    }
    if let Some(b) = parse_setting::<IpAddr>(map, "bind")? {
        config.bind = b;
    }
    if let Some(a) = map.get("allow") {
        config.allow.extend(
            a.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        );
    }
    if let Some(e) = map.get("editor") {
        config.editor_command = e.clone();
    }
    if let Some(p) = parse_setting(map, "public_only")? {
        config.public_only_default = p;
    }
    if let Some(b) = map.get("base_url") {
        config.base_url = b.trim_end_matches('/').to_string();
    }
    if let Some(p) = args.port {
        config.port = p;
    }
    config.allow.extend(args.allow.iter().cloned());
    if let Some(e) = &args.editor {
        config.editor_command = e.clone();
    }
    if args.private {
        config.public_only_default = false;
    }
    // Remote peers can only connect when listening beyond loopback.
    if !map.contains_key("bind") && config.allow.iter().any(|a| a != "localhost") {
        config.bind = IpAddr::from([0, 0, 0, 0]);
    }
    Ok(config)
}

/// Parses `argv` and runs the command, returning the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "plscribe: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let map = settings(cli)?;
    match &cli.command {
        Command::Lint(a) => lint_cmd(a, out),
        Command::Search(a) => search_cmd(a, out),
        Command::Build(a) => build_cmd(a, &map, out),
        Command::Serve(a) => serve_cmd(a, &map, out, err),
    }
}

fn lint_cmd(args: &LintArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let index = open_index(&root_of(&args.root)?)?;
    let problems = lint(&index);
    match args.format {
        Format::Text => {
            for d in &problems {
                writeln!(out, "{d}")?;
            }
        }
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&problems).unwrap_or_default()
        )?,
    }
    Ok(if problems.is_empty() {
        EXIT_OK
    } else {
        EXIT_PROBLEMS
    })
}

fn search_cmd(args: &SearchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let index = open_index(&root_of(&args.root)?)?;
    let hits = search(&index, &args.query, args.private);
    match args.format {
        Format::Text => {
            for h in &hits {
                let private = if h.is_public { "" } else { " (private)" };
                writeln!(
                    out,
                    "{:>3}  {}{}  {}  {}",
                    h.score, h.target, private, h.file, h.summary
                )?;
            }
        }
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&hits).unwrap_or_default()
        )?,
    }
    Ok(EXIT_OK)
}

fn build_cmd(
    args: &BuildArgs,
    map: &BTreeMap<String, String>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let index = open_index(&root_of(&args.root)?)?;
    let public_only = !args.private && parse_setting(map, "public_only")?.unwrap_or(true);
    let summary = export_static(&index, &args.out, public_only)?;
    writeln!(
        out,
        "wrote {} files to {}",
        summary.files.len(),
        args.out.display()
    )?;
    Ok(EXIT_OK)
}

fn serve_cmd(
    args: &ServeArgs,
    map: &BTreeMap<String, String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let config = server_config(args, map)?;
    let handle = Arc::new(IndexHandle::open(&config.root)?);
    let base = config.base_url.clone();
    let running = serve(DocServer::new(config, handle.clone()))?;
    writeln!(
        out,
        "Documentation at http://{}{base}/doc/",
        running.local_addr()
    )?;
    writeln!(
        out,
        "Type `reload` to rescan the sources or `quit` to stop."
    )?;
    out.flush()?;
    // The server runs on its own thread; the terminal stays usable.
    let stdin = std::io::stdin();
    for line in stdin.lock().lines() {
        match line?.trim() {
            "" => {}
            "reload" | "make" => match handle.reload() {
                Ok(g) => writeln!(out, "index generation {g}")?,
                Err(e) => writeln!(err, "reload failed: {e}")?,
            },
            "quit" | "q" | "halt" => {
                running.shutdown();
                return Ok(EXIT_OK);
            }
            other => writeln!(err, "unknown command {other}; use reload or quit")?,
        }
        out.flush()?;
    }
    // Without a terminal, keep serving until killed.
    running.wait();
    Ok(EXIT_OK)
}
