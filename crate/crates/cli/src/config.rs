// SPDX-License-Identifier: MIT OR Apache-2.0

//! `key=value` config files. Entries become `--key=value` flags inserted ahead
//! of the command-line flags, so explicit flags override them.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key=value` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, found {line:?}", n + 1);
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key {:?}", n + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flags(entries: Vec<(String, String)>) -> Vec<String> {
    entries
        .into_iter()
        .filter_map(|(k, v)| match v.as_str() {
            "true" => Some(format!("--{k}")),
            "false" => None,
            _ => Some(format!("--{k}={v}")),
        })
        .collect()
}

/// Removes `--config PATH` from `args` and splices the file's entries in right
/// after the subcommand name.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let extra = flags(parse(&text)?);
    // rest[0] is the binary, rest[1] the subcommand.
    if rest.len() < 2 || rest[1].starts_with('-') {
        bail!("--config needs a subcommand");
    }
    let mut out = rest[..2].to_vec();
    out.extend(extra);
    out.extend_from_slice(&rest[2..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn entries_precede_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\nalpha = 0.1\nmin_segment=20\nfuller=true\ntranspose=false\n").unwrap();
        let args = expand(v(&["hdcp", "segment", "--config", path.to_str().unwrap(), "--alpha", "0.01"])).unwrap();
        assert_eq!(args, v(&["hdcp", "segment", "--alpha=0.1", "--min-segment=20", "--fuller", "--alpha", "0.01"]));
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(parse("alpha 0.1").is_err());
        assert!(parse("config=x").is_err());
        assert_eq!(parse("\n# x\n").unwrap(), vec![]);
    }
}
