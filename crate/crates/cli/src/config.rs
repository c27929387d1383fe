//! `key = value` experiment files merged underneath explicit flags.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Flag tokens for a config file's contents, e.g. `m-list = 2,4` becomes
/// `["--m-list", "2,4"]`. Booleans become a bare flag when true.
pub fn parse_config(text: &str, origin: &Path) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected `key = value`, got {:?}",
                origin.display(),
                i + 1,
                raw.trim()
            );
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            bail!("{}:{}: invalid key {:?}", origin.display(), i + 1, key);
        }
        match value {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}"));
                tokens.push(value.to_string());
            }
        }
    }
    Ok(tokens)
}

/// Splices the `--config FILE` contents into `args` right after the
/// subcommand so that later explicit flags override them.
pub fn expand(args: Vec<String>) -> Result<(Vec<String>, bool)> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a file path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok((rest, false));
    };
    let p = Path::new(&path);
    let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config file {path}"))?;
    let tokens = parse_config(&text, p)?;
    // program name, then the first non-flag token is the subcommand
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    let mut out = rest[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&rest[at..]);
    Ok((out, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let t = parse_config(
            "# sweep\ndim = 3\nm_list = 2,4\nno-symmetry = true\nplot = false\n",
            Path::new("c"),
        )
        .unwrap();
        assert_eq!(t, vec!["--dim", "3", "--m-list", "2,4", "--no-symmetry"]);
        assert!(parse_config("dim 3", Path::new("c")).is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "dim = 3\nnodes = 100\n").unwrap();
        let args: Vec<String> = [
            "cubedisc",
            "scan",
            "--config",
            p.to_str().unwrap(),
            "--nodes",
            "200",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let (out, used) = expand(args).unwrap();
        assert!(used);
        assert_eq!(
            out,
            vec!["cubedisc", "scan", "--dim", "3", "--nodes", "100", "--nodes", "200"]
        );
    }
}
