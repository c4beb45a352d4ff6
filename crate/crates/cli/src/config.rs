//! `--config` files: `key = value` lines merged under the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, Command};

use crate::exit::{CliError, CliResult};

/// Parsed `key = value` pairs, keys normalized to flag spelling
/// (`keep_prob` and `keep-prob` are the same key).
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", lineno + 1)));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(CliError::usage(format!("config line {}: duplicate key `{key}`", lineno + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Value of `--config` anywhere on the command line.
fn config_path(argv: &[OsString]) -> CliResult<Option<OsString>> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it
                .next()
                .cloned()
                .map(Some)
                .ok_or_else(|| CliError::usage("--config needs a path"));
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Ok(Some(v.into()));
        }
    }
    Ok(None)
}

fn mentions_flag(argv: &[OsString], long: &str, short: Option<char>) -> bool {
    argv.iter().skip(1).any(|a| {
        let s = a.to_string_lossy();
        let long_hit = s
            .strip_prefix("--")
            .map(|rest| rest == long || rest.starts_with(&format!("{long}=")))
            .unwrap_or(false);
        let short_hit = short
            .map(|c| !s.starts_with("--") && s.starts_with(&format!("-{c}")))
            .unwrap_or(false);
        long_hit || short_hit
    })
}

/// Appends the config file's settings for flags not already on the command
/// line. The subcommand is the first argument naming one.
pub fn merge_config(argv: Vec<OsString>, root: &Command) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let entries = parse_config(&text)?;
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| root.find_subcommand(a.to_string_lossy().as_ref()))
        .ok_or_else(|| CliError::usage("a config file needs a subcommand"))?;

    let mut merged = argv.clone();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && a.get_id() != "config")
            .ok_or_else(|| CliError::usage(format!("unknown config key `{key}` for `{}`", sub.get_name())))?;
        if mentions_flag(&argv, &key, arg.get_short()) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => merged.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(CliError::usage(format!("config key `{key}` expects true or false"))),
            },
            _ => merged.push(format!("--{key}={value}").into()),
        }
    }
    Ok(merged)
}
