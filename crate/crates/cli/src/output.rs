// Licensed under the Apache-2.0 license

use std::io::Write;
use std::path::Path;

use crate::Failure;

/// Write through a sibling temp file so readers never see a partial file.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(data).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Write to `path`, or stdout when none is given.
pub fn emit(path: Option<&Path>, data: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, data.as_bytes()),
        None => {
            stdout(data);
            Ok(())
        }
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Print to stdout, newline-terminated; a closed pipe is not an error.
pub fn stdout(data: &str) {
    let mut out = std::io::stdout().lock();
    let nl: &[u8] = if data.ends_with('\n') { b"" } else { b"\n" };
    let _ = out.write_all(data.as_bytes()).and_then(|()| out.write_all(nl));
}
