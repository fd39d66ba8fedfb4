//! Artifact envelopes, CSV tables and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use daha_opuc::suite::SCHEMA;
use daha_opuc::{ParameterSet, VERSION};
use serde::Serialize;
use serde_json::Value;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DAHA_OPUC_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Plain rows with a header naming the quantities.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Result of one command: the JSON payload, its tabular form and whether
/// every check it ran passed.
pub struct Artifact {
    pub result: Value,
    pub table: Table,
    pub passed: bool,
}

impl Artifact {
    pub fn new(result: impl Serialize, table: Table, passed: bool) -> Self {
        Artifact {
            result: serde_json::to_value(result).expect("serializable result"),
            table,
            passed,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    version: &'a str,
    command: &'a str,
    seed: u64,
    n: usize,
    params: Option<&'a ParameterSet>,
    passed: bool,
    result: &'a Value,
}

pub struct Context<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub n: usize,
    pub params: Option<&'a ParameterSet>,
}

pub fn render(a: &Artifact, ctx: &Context, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                version: VERSION,
                command: ctx.command,
                seed: ctx.seed,
                n: ctx.n,
                params: ctx.params,
                passed: a.passed,
                result: &a.result,
            };
            let mut v = serde_json::to_vec_pretty(&env).map_err(|e| e.to_string())?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut out = Vec::new();
            // Provenance as a comment line; read back with `comment = '#'`.
            let params = match ctx.params {
                Some(p) => format!(
                    " beta={} q={} mode={}",
                    p.beta.map(num).join(","),
                    num(p.q),
                    serde_json::to_value(p.mode).map_err(|e| e.to_string())?.as_str().unwrap_or("")
                ),
                None => String::new(),
            };
            writeln!(
                out,
                "# daha-opuc {VERSION} schema={SCHEMA} command={} seed={} n={}{params}",
                ctx.command, ctx.seed, ctx.n
            )
            .map_err(|e| e.to_string())?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&a.table.header).map_err(|e| e.to_string())?;
            for r in &a.table.rows {
                w.write_record(r).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
            drop(w);
            Ok(out)
        }
    }
}

/// Destination: `--out`, else `$DAHA_OPUC_OUT/<command>.<ext>`, else stdout.
pub fn destination(out: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| Path::new(&d).join(format!("{}.{}", command.replace(' ', "-"), format.extension())))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    tmp.write_all(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    tmp.as_file().sync_all().map_err(|e| format!("{}: {e}", path.display()))?;
    tmp.persist(path).map_err(|e| format!("{}: {}", path.display(), e.error))?;
    Ok(())
}
