use std::fmt;

use crate::SUBCOMMANDS;

#[derive(Debug)]
pub struct ConfigError(String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn given(argv: &[String], flag: &str) -> bool {
    let eq = format!("{flag}=");
    argv.iter().any(|a| a == flag || a.starts_with(&eq))
}

fn scalar(key: &str, v: &toml::Value) -> Result<String, ConfigError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        _ => Err(ConfigError(format!("config key `{key}` must be a string, number, boolean or array"))),
    }
}

fn push_key(out: &mut Vec<String>, key: &str, v: &toml::Value) -> Result<(), ConfigError> {
    let flag = format!("--{key}");
    match v {
        toml::Value::Boolean(true) => out.push(flag),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            for item in items {
                out.push(flag.clone());
                out.push(scalar(key, item)?);
            }
        }
        other => {
            out.push(flag);
            out.push(scalar(key, other)?);
        }
    }
    Ok(())
}

/// Appends flags from the `--config` TOML file that are absent from `argv`.
/// Top-level keys apply to every subcommand, keys under `[name]` to that
/// subcommand only.
pub fn apply_defaults(mut argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError(format!("cannot read {path}: {e}")))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError(format!("{path}: {}", e.message())))?;
    let sub = argv.iter().skip(1).find(|a| SUBCOMMANDS.contains(&a.as_str())).cloned();
    let mut extra = Vec::new();
    for (key, v) in &table {
        match v {
            toml::Value::Table(section) => {
                if Some(key) != sub.as_ref() {
                    if !SUBCOMMANDS.contains(&key.as_str()) {
                        return Err(ConfigError(format!("{path}: unknown section [{key}]")));
                    }
                    continue;
                }
                for (k, v) in section {
                    if !given(&argv, &format!("--{k}")) {
                        push_key(&mut extra, k, v)?;
                    }
                }
            }
            _ => {
                if key == "config" {
                    return Err(ConfigError(format!("{path}: `config` cannot be set from a config file")));
                }
                if !given(&argv, &format!("--{key}")) {
                    push_key(&mut extra, key, v)?;
                }
            }
        }
    }
    argv.extend(extra);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn command_line_wins() {
        let dir = std::env::temp_dir().join(format!("polylyap-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "timing = true\n[sweep]\ndegrees = [2, 4]\nhomogeneous = true\n[simulate]\nt-end = 3\n")
            .unwrap();
        let argv = args(&format!("p sweep --system s --degrees 6 --config {}", path.display()));
        let out = apply_defaults(argv.clone()).unwrap();
        assert_eq!(&out[argv.len()..], &["--homogeneous", "--timing"]);
    }

    #[test]
    fn no_config_is_identity() {
        let argv = args("p gallery krstic");
        assert_eq!(apply_defaults(argv.clone()).unwrap(), argv);
    }
}
