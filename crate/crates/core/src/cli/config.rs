//! `--config` files: flat `key = value` lines spliced into the argument list.

use std::path::Path;

use super::CliError;

/// Global options that take a value, so their values are not mistaken for subcommand names.
const GLOBAL_VALUED: [&str; 6] = ["--config", "--seed", "--output", "--format", "--threads", "--verbosity"];

/// Parses config text into `--key=value` tokens. Blank lines and `#` comments are skipped.
pub fn config_tokens(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if key.is_empty() || key.starts_with('-') || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(CliError::Usage(format!("config line {}: bad key {key:?}", i + 1)));
        }
        if key == "config" {
            return Err(CliError::Usage(format!("config line {}: nested config files are not supported", i + 1)));
        }
        out.push(format!("--{}={}", key.replace('_', "-"), value.trim()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            return None;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
        if a == "--config" {
            return it.next().cloned();
        }
    }
    None
}

/// Index just past the `<group> <command>` words, or the end if fewer are present.
fn command_end(args: &[String]) -> usize {
    let mut words = 0;
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--" {
            return i;
        }
        if a.starts_with('-') {
            if GLOBAL_VALUED.contains(&a.as_str()) {
                i += 1;
            }
        } else {
            words += 1;
            if words == 2 {
                return i + 1;
            }
        }
        i += 1;
    }
    args.len()
}

fn is_global(token: &str) -> bool {
    let key = token.split_once('=').map_or(token, |(k, _)| k);
    GLOBAL_VALUED.contains(&key)
}

/// Inserts config options ahead of the matching command-line flags, so flags given on the command line win.
///
/// Global keys go before the subcommand; command keys go right after it.
pub fn splice_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let (global, local): (Vec<String>, Vec<String>) = config_tokens(&text)?.into_iter().partition(|t| is_global(t));
    let at = command_end(&args);
    let mut out = args[..1].to_vec();
    out.extend(global);
    out.extend_from_slice(&args[1..at]);
    out.extend(local);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
