//! Flat `key=value` files: config input and run manifests share the format, so a
//! manifest can be fed back with `--config` to repeat a run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Every key a config file may contain: the long flag names of all commands plus the
/// informational keys written into manifests.
const KNOWN_KEYS: &[&str] = &[
    // shared
    "threads",
    "n",
    "size",
    "sound-speed",
    "pad",
    "out",
    "seed",
    // phantom
    "preset",
    "circle",
    "rect",
    "background",
    // simulate
    "phantom",
    "same-grid",
    "geometry",
    "sensors",
    "nt",
    "dt",
    "sim-dt",
    "sim-n",
    "noise",
    // reconstruct
    "data",
    "s",
    "alpha",
    "backend",
    "wavelet",
    "depth",
    "iters",
    "tol",
    "prior-nu",
    "prior-rho",
    "beta",
    "noise-mean",
    "prior-mean",
    "truth",
    "section-row",
    // conditioning
    "max-sensors",
    "budget-mib",
    // manifest only
    "command",
    "version",
    "outputs",
    "elapsed_seconds",
    "layout",
    "evaluations",
    "iterations",
    "converged",
    "breakdown",
    "final_residual",
    "residual_nonincreasing",
    "relative_error",
    "min_condition",
    "max_condition",
    "condition_ratio",
];

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
    source: Option<PathBuf>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    i + 1
                )));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    i + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self {
            values,
            source: Some(path.to_path_buf()),
        })
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                let src = self
                    .source
                    .as_deref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default();
                CliError::Usage(format!("{src}: bad value for `{key}`: {e}"))
            }),
        }
    }

    /// Flag, then config file, then nothing.
    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.parse(key),
        }
    }

    /// Flag, then config file, then `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    /// A boolean switch: set on the command line or `key=true` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.parse::<bool>(key)?.unwrap_or(false))
    }
}

/// Ordered `key=value` record written next to an output file.
#[derive(Debug, Clone)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self {
            entries: Vec::new(),
        };
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest");
        PathBuf::from(name)
    }

    pub fn write(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = Self::path_for(output);
        let mut text = String::new();
        for (k, v) in &self.entries {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        fs::write(&path, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flag_file_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# comment\nalpha = 0.5\nsame-grid=true\n").unwrap();
        let s = Settings::load(Some(&path)).unwrap();
        assert_eq!(s.pick(Some(2.0), "alpha", 1.0).unwrap(), 2.0);
        assert_eq!(s.pick(None, "alpha", 1.0).unwrap(), 0.5);
        assert_eq!(s.pick(None, "tol", 1.0).unwrap(), 1.0);
        assert!(s.switch(false, "same-grid").unwrap());
        assert!(!s.switch(false, "unset").unwrap());
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        fs::write(&path, "alhpa=1\n").unwrap();
        assert!(matches!(
            Settings::load(Some(&path)),
            Err(CliError::Usage(_))
        ));
        fs::write(&path, "alpha 1\n").unwrap();
        assert!(matches!(
            Settings::load(Some(&path)),
            Err(CliError::Usage(_))
        ));
        fs::write(&path, "alpha=abc\n").unwrap();
        let s = Settings::load(Some(&path)).unwrap();
        assert!(matches!(
            s.pick(None, "alpha", 1.0f64),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn manifest_round_trips_as_config() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.patb");
        let mut m = Manifest::new("reconstruct");
        m.set("alpha", 1e-5);
        m.set("alpha", 2e-5);
        m.set("evaluations", 31);
        let path = m.write(&out).unwrap();
        assert_eq!(path, dir.path().join("x.patb.manifest"));
        let s = Settings::load(Some(&path)).unwrap();
        assert_eq!(s.pick(None, "alpha", 0.0).unwrap(), 2e-5);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("command=reconstruct\nversion="));
        assert_eq!(text.matches("alpha=").count(), 1);
        assert!(text.ends_with("evaluations=31\n"));
    }
}
