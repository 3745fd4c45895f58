//! Run settings from a TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use randwalls::rational::parse_q;
use randwalls::Q;

use crate::CliError;

pub const SEED_VAR: &str = "RANDWALLS_SEED";

/// Every key is optional; flags win over the file, the file over defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub n: Option<u16>,
    pub d: Option<Q>,
    pub ell0: Option<usize>,
    pub subdivision: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub max_cells: Option<usize>,
    pub eps: Option<Q>,
    pub out: Option<PathBuf>,
}

fn int<T: TryFrom<i64>>(key: &str, v: &toml::Value) -> Result<T, CliError> {
    v.as_integer()
        .and_then(|i| T::try_from(i).ok())
        .ok_or_else(|| CliError::Usage(format!("config key {key}: expected a non-negative integer")))
}

fn rational(key: &str, v: &toml::Value) -> Result<Q, CliError> {
    let s = match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        _ => return Err(CliError::Usage(format!("config key {key}: expected \"p/q\""))),
    };
    parse_q(&s).map_err(|e| CliError::Usage(format!("config key {key}: {e}")))
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let mut s = Settings::default();
        for (key, v) in &table {
            match key.as_str() {
                "n" => s.n = Some(int(key, v)?),
                "d" => s.d = Some(rational(key, v)?),
                "ell0" => s.ell0 = Some(int(key, v)?),
                "subdivision" => s.subdivision = Some(int(key, v)?),
                "seed" => s.seed = Some(int(key, v)?),
                "budget" => s.budget = Some(int(key, v)?),
                "max_cells" => s.max_cells = Some(int(key, v)?),
                "eps" => s.eps = Some(rational(key, v)?),
                "out" => {
                    let p = v.as_str().ok_or_else(|| CliError::Usage("config key out: expected a path".into()))?;
                    s.out = Some(PathBuf::from(p));
                }
                other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
            }
        }
        Ok(s)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                Settings::parse(&text)
            }
        }
    }

    /// Flag, then config file, then `RANDWALLS_SEED`, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_VAR) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_VAR}={v:?} is not a u64"))),
            Err(_) => Ok(0),
        }
    }

    pub fn eps(&self, flag: Option<Q>) -> Q {
        flag.or(self.eps).unwrap_or(Q::new(1, 100))
    }

    pub fn out(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or(self.out.clone()).unwrap_or_else(|| PathBuf::from("out"))
    }
}
