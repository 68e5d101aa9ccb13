//! Config-file defaults, spliced into the argument list before clap sees it.
//!
//! ```text
//! [roundtrip]
//! backend = mock:dict.json
//! seed = 7
//!
//! [detector.train]
//! epochs = 10
//! ```
//!
//! Each `key = value` becomes `--key value` right after the subcommand name,
//! so anything given on the command line later wins. `true` turns into a bare
//! flag and `false` drops the key.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

const NESTED: [&str; 2] = ["detector", "augment"];

type Sections = BTreeMap<String, Vec<(String, String)>>;

pub fn parse(text: &str) -> Result<Sections, String> {
    let mut sections = Sections::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.split_whitespace().collect::<Vec<_>>().join(".");
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line {}: expected `key = value`", i + 1));
        };
        let Some(section) = &current else {
            return Err(format!(
                "config line {}: `{}` is outside any [section]",
                i + 1,
                key.trim()
            ));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        sections
            .get_mut(section)
            .expect("section inserted above")
            .push((key, value.trim().to_string()));
    }
    Ok(sections)
}

fn take_config_flag(args: &mut Vec<OsString>) -> Result<Option<OsString>, String> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        let arg = args[i].to_string_lossy().into_owned();
        if arg == "--" {
            break;
        }
        if arg == "--config" {
            if i + 1 >= args.len() {
                return Err("--config: missing FILE".into());
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
            continue;
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            found = Some(OsString::from(v));
            args.remove(i);
            continue;
        }
        i += 1;
    }
    Ok(found)
}

/// Index just past the subcommand path and its dotted name.
fn subcommand_path(args: &[OsString]) -> Option<(usize, String)> {
    let first = args.get(1)?.to_string_lossy().into_owned();
    if first.starts_with('-') {
        return None;
    }
    if NESTED.contains(&first.as_str()) {
        let second = args.get(2)?.to_string_lossy().into_owned();
        if second.starts_with('-') {
            return None;
        }
        return Some((3, format!("{first}.{second}")));
    }
    Some((2, first))
}

pub fn expand(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = take_config_flag(&mut args)? else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("--config: {}: {e}", path.display()))?;
    let sections = parse(&text)?;
    let Some((at, name)) = subcommand_path(&args) else {
        return Ok(args);
    };
    let Some(entries) = sections.get(&name) else {
        return Ok(args);
    };
    let mut defaults = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "false" => {}
            "true" => defaults.push(OsString::from(format!("--{key}"))),
            _ => {
                defaults.push(OsString::from(format!("--{key}")));
                defaults.push(OsString::from(value));
            }
        }
    }
    args.splice(at..at, defaults);
    Ok(args)
}
