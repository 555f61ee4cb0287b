//! Values read from `--config`. Every key is optional and overridden by the
//! matching command-line flag.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{ChartArg, CliError};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub gammas: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub dt: Option<f64>,
    pub renormalize: Option<bool>,
    pub mu: Option<f64>,
    pub chart: Option<ChartArg>,
    pub nu: Option<usize>,
    pub nv: Option<usize>,
    pub levels: Option<Vec<f64>>,
    pub n_levels: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// The command-line value if present, else the file value.
pub fn pick<V: Clone>(cli: Option<V>, file: &Option<V>) -> Option<V> {
    cli.or_else(|| file.clone())
}

pub fn required<V>(v: Option<V>, name: &str) -> Result<V, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}

/// A list with exactly `N` finite entries.
pub fn fixed<const N: usize>(v: Vec<f64>, name: &str) -> Result<[f64; N], CliError> {
    let len = v.len();
    let arr: [f64; N] = v
        .try_into()
        .map_err(|_| CliError::Usage(format!("--{name} needs {N} values, got {len}")))?;
    if arr.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("--{name} must be finite")));
    }
    Ok(arr)
}
