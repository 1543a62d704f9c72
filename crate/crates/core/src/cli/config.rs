//! Layering of a TOML config file under the command line.
//!
//! The file holds one table per subcommand plus an optional `[output]` table:
//!
//! ```toml
//! [output]
//! dir = "runs"
//!
//! [wave1d]
//! material = "bump:2,2"
//! nx = 129
//! ```
//!
//! Each key becomes `--key value` placed right after the subcommand, unless
//! the same option is already on the command line. Booleans become bare flags
//! and arrays repeat the option. Values therefore go through the same parsers
//! and validation as flags.

use std::ffi::{OsStr, OsString};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("bad config: {e}")))?;
        Ok(Self { table })
    }

    /// `[output] dir`.
    pub fn out_dir(&self) -> Result<Option<PathBuf>> {
        match self.table.get("output") {
            None => Ok(None),
            Some(toml::Value::Table(t)) => match t.get("dir") {
                None => Ok(None),
                Some(toml::Value::String(s)) => Ok(Some(PathBuf::from(s))),
                Some(_) => Err(Error::Config("`output.dir` must be a string".into())),
            },
            Some(_) => Err(Error::Config("`output` must be a table".into())),
        }
    }

    /// Flags for `section` that the user did not give in `given`.
    pub fn flags(&self, section: &str, given: &[OsString]) -> Result<Vec<OsString>> {
        let Some(v) = self.table.get(section) else {
            return Ok(Vec::new());
        };
        let toml::Value::Table(t) = v else {
            return Err(Error::Config(format!("`{section}` must be a table")));
        };
        let mut out = Vec::new();
        for (key, value) in t {
            let flag = format!("--{key}");
            if given.iter().any(|a| is_flag(a, &flag)) {
                continue;
            }
            match value {
                toml::Value::Boolean(true) => out.push(flag.into()),
                toml::Value::Boolean(false) => {}
                toml::Value::Array(items) => {
                    for item in items {
                        out.push(flag.clone().into());
                        out.push(scalar(section, key, item)?.into());
                    }
                }
                other => {
                    out.push(flag.into());
                    out.push(scalar(section, key, other)?.into());
                }
            }
        }
        Ok(out)
    }
}

fn is_flag(arg: &OsStr, flag: &str) -> bool {
    let Some(a) = arg.to_str() else {
        return false;
    };
    a == flag
        || a.strip_prefix(flag)
            .is_some_and(|rest| rest.starts_with('='))
}

fn scalar(section: &str, key: &str, v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(format!("{f:e}")),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(Error::Config(format!(
            "`{section}.{key}` must be a string, number or boolean"
        ))),
    }
}

/// Position of the subcommand token, skipping global options and their values.
pub fn subcommand_index(args: &[OsString], name: &str) -> Option<usize> {
    let takes_value = ["--config", "--out", "--tag"];
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_str().unwrap_or("");
        if a == name {
            return Some(i);
        }
        i += if takes_value.contains(&a) { 2 } else { 1 };
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn sections_become_flags() {
        let c = ConfigFile::parse(
            "[output]\ndir = \"x\"\n[wave1d]\nnx = 33\ncourant = 0.25\nmaterial = \"bump:2,2\"\n[table]\ncase = [\"a\", \"b\"]\nquiet = true\nloud = false\n",
        )
        .unwrap();
        assert_eq!(c.out_dir().unwrap(), Some(PathBuf::from("x")));
        let f = c
            .flags("wave1d", &os(&["mimetic", "wave1d", "--nx=65"]))
            .unwrap();
        assert_eq!(f, os(&["--courant", "2.5e-1", "--material", "bump:2,2"]));
        let f = c.flags("table", &[]).unwrap();
        assert_eq!(f, os(&["--case", "a", "--case", "b", "--quiet"]));
        assert!(c.flags("missing", &[]).unwrap().is_empty());
    }

    #[test]
    fn bad_files_are_config_errors() {
        assert!(ConfigFile::parse("[wave1d\n").is_err());
        let c = ConfigFile::parse("wave1d = 3\n[output]\ndir = 1\n").unwrap();
        assert!(c.flags("wave1d", &[]).is_err());
        assert!(c.out_dir().is_err());
        let c = ConfigFile::parse("[wave1d]\nx = { a = 1 }\n").unwrap();
        assert!(c.flags("wave1d", &[]).is_err());
    }

    #[test]
    fn finds_the_subcommand_after_globals() {
        let a = os(&[
            "mimetic", "--out", "wave1d", "--config", "c.toml", "wave1d", "--nx", "3",
        ]);
        assert_eq!(subcommand_index(&a, "wave1d"), Some(5));
        assert_eq!(
            subcommand_index(&os(&["mimetic", "--quiet", "wave1d"]), "wave1d"),
            Some(2)
        );
    }
}
