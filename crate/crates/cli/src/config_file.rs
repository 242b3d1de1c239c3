//! Flat `key = value` files standing in for command-line flags.
//!
//! ```text
//! # power grid, composite mode
//! center = -260+1000i
//! radius = 115
//! mode = composite
//! ```
//!
//! Each key names a long flag without its dashes; underscores and dashes
//! are interchangeable. Flags given on the command line take precedence.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn parse_config(text: &str, origin: &Path) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Input(format!("{}:{}: expected `key = value`", origin.display(), i + 1))
        })?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Input(format!("{}:{}: empty key", origin.display(), i + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Replaces `--config FILE` by the flags it lists, inserted right after the
/// subcommand, dropping any key the command line sets itself.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let v = it
                .next()
                .ok_or_else(|| CliError::Input("--config needs a file".into()))?;
            path = Some(v);
        } else if let Some(v) = s.strip_prefix("--config=") {
            path = Some(OsString::from(v));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse_config(&text, path)?;

    let given: HashSet<String> = rest
        .iter()
        .filter_map(|a| a.to_str()?.strip_prefix("--"))
        .map(|f| f.split('=').next().unwrap_or(f).to_string())
        .collect();
    let at = subcommand_end(&rest);
    let mut injected = Vec::new();
    for (k, v) in entries {
        if !given.contains(&k) {
            injected.push(OsString::from(format!("--{k}={v}")));
        }
    }
    rest.splice(at..at, injected);
    Ok(rest)
}

/// Index just past the subcommand path (`gen` takes a second word).
fn subcommand_end(args: &[OsString]) -> usize {
    let words: Vec<_> = args.iter().skip(1).take_while(|a| !a.to_string_lossy().starts_with('-')).collect();
    let depth = match words.first().map(|w| w.to_string_lossy()) {
        Some(w) if w == "gen" => 2.min(words.len()),
        Some(_) => 1,
        None => 0,
    };
    1 + depth
}
