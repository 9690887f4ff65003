//! Plain-text `key = value` configuration files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use chns_core::RunConfig;

/// Parses a comma- or whitespace-separated list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow::anyhow!("invalid list entry '{t}': {e}")))
        .collect()
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| anyhow::anyhow!("invalid value '{v}' for '{key}': {e}"))
}

/// Applies one setting. Keys match the long flag names; dashes and
/// underscores are interchangeable and case is ignored.
pub fn apply(cfg: &mut RunConfig, key: &str, v: &str) -> Result<()> {
    let k = key.trim().to_ascii_lowercase().replace('-', "_");
    match k.as_str() {
        "dim" => cfg.dim = parse(&k, v)?,
        "test" => cfg.test = parse(&k, v)?,
        "scheme" => cfg.scheme = parse(&k, v)?,
        "m" => cfg.m = parse_list(v)?,
        "cp" => cfg.cp = parse_list(v)?,
        "cp1" => cfg.cp1 = Some(parse(&k, v)?),
        "t" => cfg.t_end = parse(&k, v)?,
        "cfl" => cfg.cfl = parse(&k, v)?,
        "seed" => cfg.seed = parse(&k, v)?,
        "out" => cfg.out = Some(v.into()),
        "dump_times" => cfg.dump_times = parse_list(v)?,
        "linear_solver" => cfg.linear_solver = parse(&k, v)?,
        "nu" => cfg.nu = parse(&k, v)?,
        "lambda" => cfg.lambda = parse(&k, v)?,
        "eps" => cfg.eps = parse(&k, v)?,
        "g" => cfg.g = parse(&k, v)?,
        "gamma" => cfg.gamma = parse(&k, v)?,
        _ => bail!("unknown configuration key '{key}'"),
    }
    Ok(())
}

/// Reads a configuration file over `cfg`. Blank lines and lines starting
/// with `#` are skipped.
pub fn load(cfg: &mut RunConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), n + 1);
        };
        apply(cfg, k, v.trim()).with_context(|| format!("{}:{}", path.display(), n + 1))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_settings_apply() {
        let mut cfg = RunConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# comment\nM = 16, 32\nT=0.5\ndump-times = 0 0.25\nlinear_solver = cg\n").unwrap();
        load(&mut cfg, &p).unwrap();
        assert_eq!(cfg.m, vec![16, 32]);
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.dump_times, vec![0.0, 0.25]);
        assert_eq!(cfg.linear_solver, chns_core::LinearMethod::Cg);
    }

    #[test]
    fn bad_lines_are_reported() {
        let mut cfg = RunConfig::default();
        assert!(apply(&mut cfg, "colour", "blue").is_err());
        assert!(apply(&mut cfg, "cfl", "fast").is_err());
        assert!(parse_list::<usize>("8,x").is_err());
    }
}
