//! Artifact writing: 17-significant-digit CSV and JSON, replaced atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// 17 significant digits, enough to round-trip an f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of numbers under a header, plus optional `#` comment lines first.
pub fn csv(comments: &[String], header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{header}");
    for row in rows {
        let line: Vec<String> = row.into_iter().map(num).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
