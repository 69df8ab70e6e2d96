//! `key = value` configuration files.
//!
//! Keys are long flag names without the leading dashes. Values are spliced
//! into the argument list for every flag the command line leaves unset, so
//! explicit flags win over the file and the file wins over defaults.

use super::error::{CliError, CliResult};
use std::ffi::OsString;
use std::path::Path;

pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", i + 1))
        })?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        let value = v.trim().trim_matches('"').to_owned();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        if out.iter().any(|(seen, _)| *seen == key) {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key `{key}`",
                i + 1
            )));
        }
        out.push((key, value));
    }
    Ok(out)
}

/// The value of `--config` in `argv`, if present.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn has_flag(argv: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_value = format!("--{key}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_value)
    })
}

/// Appends `--key value` for each entry whose flag is absent. `true` and
/// `false` values denote switches.
pub fn merge_into_argv(mut argv: Vec<OsString>, entries: &[(String, String)]) -> Vec<OsString> {
    let original = argv.clone();
    for (k, v) in entries {
        if has_flag(&original, k) {
            continue;
        }
        match v.as_str() {
            "true" => argv.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                argv.push(format!("--{k}").into());
                argv.push(v.into());
            }
        }
    }
    argv
}

pub fn apply_config_file(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| {
        CliError::Usage(format!(
            "cannot read config {}: {e}",
            Path::new(&path).display()
        ))
    })?;
    Ok(merge_into_argv(argv, &parse_config(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_override_file() {
        let cfg = parse_config("# c\nseed = 7\ndim=20\nper_query = true\nsorted-vocab = false\n")
            .unwrap();
        let merged = merge_into_argv(args(&["kgbench", "train", "--dim", "50"]), &cfg);
        assert_eq!(
            merged,
            args(&[
                "kgbench",
                "train",
                "--dim",
                "50",
                "--seed",
                "7",
                "--per-query"
            ])
        );
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_config("seed 7").is_err());
        assert!(parse_config("a=1\na=2").is_err());
        assert_eq!(
            config_path(&args(&["x", "--config=c.cfg"])),
            Some("c.cfg".into())
        );
    }
}
