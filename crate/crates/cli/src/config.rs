//! Config files are flat TOML tables whose keys are flag names without the
//! leading dashes (`input-string` or `input_string`). They are expanded to
//! flags inserted right after the subcommand, ahead of the user's own
//! flags, and every flag may be repeated with the last occurrence winning.

use std::path::{Path, PathBuf};

use crate::output::Failure;

/// Global flags that take a value and may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 4] = ["--config", "--threads", "--output", "-o"];

/// Finds `--config FILE` or `--config=FILE`.
pub fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        if a == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Drops `--config` and its value; they are replaced by the expansion.
fn without_config(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--config" {
            skip = true;
        } else if !a.starts_with("--config=") {
            out.push(a.clone());
        }
    }
    out
}

/// Index just past the subcommand (and the nested `rw` command).
fn insertion_point(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if GLOBAL_WITH_VALUE.contains(&a) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else if a == "rw" {
            return Some((i + 2).min(args.len()));
        } else {
            return Some(i + 1);
        }
    }
    None
}

fn expand(table: &toml::Table, path: &Path) -> Result<Vec<String>, Failure> {
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => flags.extend([flag, s.clone()]),
            toml::Value::Integer(i) => flags.extend([flag, i.to_string()]),
            toml::Value::Float(f) => flags.extend([flag, f.to_string()]),
            _ => {
                return Err(Failure::usage(format!(
                    "{}: key `{key}` must be a string, number or boolean",
                    path.display()
                )))
            }
        }
    }
    Ok(flags)
}

/// Arguments with the config file expanded in place.
pub fn effective_args(args: &[String]) -> Result<(Vec<String>, Option<PathBuf>), Failure> {
    let Some(path) = config_path(args) else {
        return Ok((args.to_vec(), None));
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let flags = expand(&table, &path)?;
    let mut out = without_config(args);
    let at = insertion_point(&out).unwrap_or(out.len());
    out.splice(at..at, flags);
    Ok((out, Some(path)))
}
