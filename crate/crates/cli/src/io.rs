use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::Format;

/// Read a whole file, or standard input for `-`.
pub fn read_input(spec: &str) -> Result<Vec<u8>, CliError> {
    if spec == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|source| CliError::Input {
                path: PathBuf::from("<stdin>"),
                source,
            })?;
        Ok(buf)
    } else {
        read_file(Path::new(spec))
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `bytes` to `path`, or to standard output when there is no path.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Output {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Print a result in the requested format and optionally save its JSON form.
pub fn emit<T: Serialize>(
    value: &T,
    table: impl FnOnce() -> String,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let json = to_json(value)?;
    if let Some(path) = out {
        write_output(Some(path), &json)?;
    }
    match format {
        Format::Json => write_output(None, &json),
        Format::Table => {
            let mut text = table();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            write_output(None, text.as_bytes())
        }
    }
}
