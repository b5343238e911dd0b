//! `key=value` configuration files. Keys are long flag names; values given
//! on the command line take precedence.

use std::ffi::OsString;
use std::path::Path;

use anyhow::Context;
use clap::Command;

use crate::parse::bad;

pub fn read(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = vec![];
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("config line {}: expected key=value", n + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` anywhere in `args`.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Inserts config entries as flags directly after the subcommand chain, so
/// later command-line flags override them. Keys that the selected
/// subcommand does not know are rejected.
pub fn merge(cmd: &Command, args: Vec<OsString>, entries: &[(String, String)]) -> anyhow::Result<Vec<OsString>> {
    let mut sub = cmd;
    let mut pos = 1;
    let mut insert_at = 1;
    let mut chain: Vec<&Command> = vec![cmd];
    while pos < args.len() {
        let s = args[pos].to_string_lossy();
        if s.starts_with('-') {
            // global flags may precede the subcommand
            pos += if s.contains('=') || is_switch(sub, &s) { 1 } else { 2 };
            continue;
        }
        match sub.find_subcommand(s.as_ref()) {
            Some(c) => {
                sub = c;
                chain.push(c);
                pos += 1;
                insert_at = pos;
            }
            None => break,
        }
    }
    let mut injected = vec![];
    for (k, v) in entries {
        let arg = chain
            .iter()
            .rev()
            .flat_map(|c| c.get_arguments())
            .find(|a| a.get_long() == Some(k.as_str()))
            .ok_or_else(|| bad(format!("config key `{k}` is not a flag of `{}`", sub.get_name())))?;
        if k == "config" {
            continue;
        }
        if arg.get_num_args().is_some_and(|n| n.takes_values()) {
            injected.push(OsString::from(format!("--{k}={v}")));
        } else if matches!(v.as_str(), "true" | "1" | "yes") {
            injected.push(OsString::from(format!("--{k}")));
        }
    }
    let mut out = args;
    out.splice(insert_at..insert_at, injected);
    Ok(out)
}

fn is_switch(cmd: &Command, flag: &str) -> bool {
    let name = flag.trim_start_matches('-');
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(name))
        .is_some_and(|a| !a.get_num_args().is_some_and(|n| n.takes_values()))
}
