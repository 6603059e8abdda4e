//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Settings gathered from a config file and command-line overrides.
///
/// Keys are case-sensitive; `-` and `_` are interchangeable. Every value is
/// kept as text until a command asks for it with a typed getter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl RunConfig {
    pub fn parse_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{origin}:{}: expected `key = value`, found `{}`",
                    lineno + 1,
                    raw.trim()
                )));
            };
            let key = normalize(k);
            if key.is_empty() {
                return Err(CliError::Config(format!("{origin}:{}: empty key", lineno + 1)));
            }
            if cfg.values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("{origin}:{}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(normalize(key), value.trim().to_string());
    }

    /// Builds the configuration from command-line tokens.
    ///
    /// `config=FILE` or `--config FILE` loads a file first; `key=value`
    /// tokens override it and `--key value` flags override both.
    pub fn from_args(args: &[String]) -> Result<Self, CliError> {
        let mut file = None;
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            if let Some(flag) = arg.strip_prefix("--") {
                let (key, value) = match flag.split_once('=') {
                    Some((k, v)) => (k.to_string(), v.to_string()),
                    None => {
                        let v = it
                            .next()
                            .ok_or_else(|| CliError::Usage(format!("flag --{flag} needs a value")))?;
                        (flag.to_string(), v.clone())
                    }
                };
                if normalize(&key) == "config" {
                    file = Some(value);
                } else {
                    flags.push((key, value));
                }
            } else if let Some((k, v)) = arg.split_once('=') {
                if normalize(k) == "config" {
                    file = Some(v.to_string());
                } else {
                    positional.push((k.to_string(), v.to_string()));
                }
            } else {
                return Err(CliError::Usage(format!(
                    "unexpected argument `{arg}`; use key=value or --key value"
                )));
            }
        }
        let mut cfg = match file {
            Some(f) => Self::load(Path::new(&f))?,
            None => Self::default(),
        };
        for (k, v) in positional.iter().chain(&flags) {
            cfg.set(k, v);
        }
        Ok(cfg)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "unknown key(s) for `{command}`: {}; accepted: {}",
                unknown.join(", "),
                allowed.join(", ")
            )))
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_f64(key, s))
                    .collect()
            })
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("`{key}` must be a nonnegative integer, got `{v}`"))),
        }
    }

    pub fn string_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::Config(format!("`{key}` must be a finite number, got `{v}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let cfg = RunConfig::parse_str("# header\n a = 1 \n\nt = 0.1, 0.5 # trailing\n", "test").unwrap();
        assert_eq!(cfg.f64("a").unwrap(), Some(1.0));
        assert_eq!(cfg.f64_list("t").unwrap(), Some(vec![0.1, 0.5]));
    }

    #[test]
    fn rejects_malformed_lines_with_location() {
        let err = RunConfig::parse_str("a = 1\nnonsense\n", "cfg.txt").unwrap_err();
        assert!(err.to_string().contains("cfg.txt:2"), "{err}");
        assert!(RunConfig::parse_str("a = 1\na = 2\n", "x").is_err());
        assert!(RunConfig::parse_str(" = 2\n", "x").is_err());
    }

    #[test]
    fn flags_override_positional_settings() {
        let cfg = RunConfig::from_args(&args(&["a=1", "--a", "2", "c=4", "--x-min=-3"])).unwrap();
        assert_eq!(cfg.f64("a").unwrap(), Some(2.0));
        assert_eq!(cfg.f64("x_min").unwrap(), Some(-3.0));
        assert!(RunConfig::from_args(&args(&["--a"])).is_err());
        assert!(RunConfig::from_args(&args(&["stray"])).is_err());
    }

    #[test]
    fn unknown_keys_and_bad_numbers_are_errors() {
        let cfg = RunConfig::from_args(&args(&["a=1", "colour=red"])).unwrap();
        assert!(cfg.check_keys("profile", &["a"]).is_err());
        let cfg = RunConfig::from_args(&args(&["a=one"])).unwrap();
        assert!(cfg.f64("a").is_err());
        let cfg = RunConfig::from_args(&args(&["a=inf"])).unwrap();
        assert!(cfg.f64("a").is_err());
    }
}
