//! Output plumbing: resolved-config headers, wall-clock suppression, and
//! atomic file writes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

/// Header stamped on every produced file: the subcommand, its fully
/// resolved configuration, and (unless suppressed) the wall-clock second
/// of the run. Everything below the header is a pure function of the
/// config.
pub fn header(tool: &str, config: &Value, timestamp: bool) -> String {
    let mut s = format!("# hamsq {tool}\n# config: {config}\n");
    if timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        s.push_str(&format!("# generated_unix: {now}\n"));
    }
    s
}

/// Wall-clock cell for CSV rows; blank in reproducible mode so reruns are
/// byte-identical.
pub fn seconds_cell(seconds: f64, timestamp: bool) -> String {
    if timestamp {
        format!("{seconds}")
    } else {
        String::new()
    }
}

/// Same as [`seconds_cell`] for JSON documents.
pub fn seconds_value(seconds: f64, timestamp: bool) -> Value {
    if timestamp {
        Value::from(seconds)
    } else {
        Value::Null
    }
}

/// Wall-clock stamp for JSON documents, mirroring the header line.
pub fn stamp_value(timestamp: bool) -> Value {
    if timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Value::from(now)
    } else {
        Value::Null
    }
}

/// Writes through a temp file in the same directory and renames into
/// place, so readers never observe a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = PathBuf::from(path);
    let name = tmp
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    tmp.set_file_name(format!("{name}.tmp.{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Joins one CSV row; fields must not contain commas or newlines, which
/// every emitter here guarantees by construction.
pub fn csv_row<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut row = fields.into_iter().collect::<Vec<_>>().join(",");
    row.push('\n');
    row
}
