//! `--config FILE` support. The file holds flag values either as a JSON
//! object or as `key = value` lines; they are spliced in right after the
//! subcommand so that flags given on the command line win.

use anyhow::{bail, Context, Result};
use serde_json::Value;

pub const SUBCOMMANDS: &[&str] = &["simulate", "scan", "shell", "stego", "verify"];

/// Parses a config file into (flag, value) pairs. An empty value stands for
/// a bare switch.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let map: serde_json::Map<String, Value> = serde_json::from_str(text).context("config file is not a JSON object")?;
        let mut out = Vec::new();
        for (k, v) in map {
            let s = match v {
                Value::Bool(true) => String::new(),
                Value::Bool(false) | Value::Null => continue,
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                Value::Array(items) => items
                    .iter()
                    .map(|i| match i {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
                Value::Object(_) => bail!("config key `{k}` has a nested object"),
            };
            out.push((k, s));
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", i + 1);
        };
        let v = v.trim();
        match v {
            "true" => out.push((k.trim().to_string(), String::new())),
            "false" => {}
            _ => out.push((k.trim().to_string(), v.to_string())),
        }
    }
    Ok(out)
}

/// Removes `--config PATH` from the arguments and splices the file's
/// settings in after the subcommand.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>> {
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
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
    let pairs = parse_config(&text)?;
    let Some(at) = rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        bail!("--config needs a subcommand");
    };
    let mut injected = Vec::new();
    for (k, v) in pairs {
        let flag = if k.starts_with('-') { k } else { format!("--{k}") };
        injected.push(flag);
        if !v.is_empty() {
            injected.push(v);
        }
    }
    rest.splice(at + 1..at + 1, injected);
    Ok(rest)
}
