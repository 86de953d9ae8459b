//! Plain-text experiment files.
//!
//! One `key = value` per line, `#` starts a comment, lists are
//! comma-separated. Missing keys keep their defaults; unknown keys,
//! malformed values and violated invariants are reported with the line that
//! caused them.
//!
//! ```
//! use bdris::config::parse_config_str;
//!
//! let spec = parse_config_str("num_elements = 100  # D\nscheme = both\n", "inline").unwrap();
//! assert_eq!(spec.scenario.num_elements, 100);
//! assert_eq!(spec.schemes.len(), 2);
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{ExperimentSpec, Scheme, Sweep, SweepAxis};

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "num_antennas",
    "num_elements",
    "group_size",
    "num_users",
    "user_distances",
    "user_azimuths",
    "ris_distance",
    "ris_azimuth",
    "pathloss_exponent",
    "csi_error",
    "csi_error_bs_user",
    "csi_error_bs_ris",
    "csi_error_ris_user",
    "sic_error",
    "noise_power_dbm",
    "transmit_power_dbm",
    "uplink_mode",
    "adversary_weights",
    "scheme",
    "attack",
    "arch",
    "safe_mode",
    "trials",
    "seed",
    "sweep_axis",
    "sweep_values",
    "grid_size",
];

/// Reads and validates `path`.
pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, &path.display().to_string())
}

/// Parses configuration text; `origin` names the source in diagnostics.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ExperimentSpec> {
    let err = |line: usize, message: String| Error::Config {
        path: origin.to_string(),
        line,
        message,
    };
    let mut spec = ExperimentSpec::default();
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    let mut sweep_axis: Option<SweepAxis> = None;
    let mut sweep_values: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let key: &'static str = KEYS
            .iter()
            .find(|k| **k == key)
            .copied()
            .ok_or_else(|| err(line_no, format!("unknown key `{key}`")))?;
        if lines.insert(key, line_no).is_some() {
            return Err(err(line_no, format!("duplicate key `{key}`")));
        }
        let at = |m: String| err(line_no, m);
        let num = || value.parse::<f64>().map_err(|_| at(format!("`{key}` expects a number, found `{value}`")));
        let count = || value.parse::<usize>().map_err(|_| at(format!("`{key}` expects a nonnegative integer, found `{value}`")));
        let list = || -> Result<Vec<f64>> {
            value
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| at(format!("`{key}` expects numbers, found `{}`", v.trim()))))
                .collect()
        };
        let s = &mut spec.scenario;
        match key {
            "num_antennas" => s.num_antennas = count()?,
            "num_elements" => s.num_elements = count()?,
            "group_size" => s.group_size = count()?,
            "num_users" => s.num_users = count()?,
            "user_distances" => s.user_distances = list()?,
            "user_azimuths" => s.user_azimuths_deg = list()?,
            "ris_distance" => s.ris_distance = num()?,
            "ris_azimuth" => s.ris_azimuth_deg = num()?,
            "pathloss_exponent" => s.pathloss_exponent = num()?,
            "csi_error" => {
                let e = num()?;
                s.csi_error_bs_user = e;
                s.csi_error_bs_ris = e;
                s.csi_error_ris_user = e;
            }
            "csi_error_bs_user" => s.csi_error_bs_user = num()?,
            "csi_error_bs_ris" => s.csi_error_bs_ris = num()?,
            "csi_error_ris_user" => s.csi_error_ris_user = num()?,
            "sic_error" => s.sic_error = num()?,
            "noise_power_dbm" => s.noise_power_dbm = num()?,
            "transmit_power_dbm" => s.transmit_power_dbm = num()?,
            "uplink_mode" => s.uplink_mode = value.parse().map_err(at)?,
            "adversary_weights" => s.adversary_weights = list()?,
            "scheme" => spec.schemes = parse_schemes(value).map_err(at)?,
            "attack" => spec.attack = value.parse().map_err(at)?,
            "arch" => spec.architecture = value.parse().map_err(at)?,
            "safe_mode" => spec.safe_mode = value.parse().map_err(at)?,
            "trials" => spec.trials = count()?,
            "seed" => spec.seed = value.parse().map_err(|_| at(format!("`seed` expects a 64-bit integer, found `{value}`")))?,
            "sweep_axis" => sweep_axis = Some(value.parse().map_err(at)?),
            "sweep_values" => sweep_values = Some(list()?),
            "grid_size" => spec.grid_size = count()?,
            _ => unreachable!("key list and match arms agree"),
        }
    }

    if lines.contains_key("csi_error")
        && ["csi_error_bs_user", "csi_error_bs_ris", "csi_error_ris_user"]
            .iter()
            .any(|k| lines.contains_key(k))
    {
        let line = lines["csi_error"];
        return Err(err(line, "`csi_error` conflicts with the per-link error keys".into()));
    }
    if !lines.contains_key("adversary_weights") && spec.scenario.num_users > 0 {
        let u = spec.scenario.num_users;
        spec.scenario.adversary_weights = vec![1.0 / u as f64; u];
    }
    spec.sweep = match (sweep_axis, sweep_values) {
        (None, None) => None,
        (Some(axis), Some(values)) => Some(Sweep { axis, values }),
        (Some(_), None) => return Err(err(lines["sweep_axis"], "`sweep_axis` requires `sweep_values`".into())),
        (None, Some(_)) => return Err(err(lines["sweep_values"], "`sweep_values` requires `sweep_axis`".into())),
    };

    spec.validate().map_err(|e| {
        let message = match &e {
            Error::Scenario(m) => m.clone(),
            other => other.to_string(),
        };
        err(blame_line(&message, &lines), message)
    })?;
    Ok(spec)
}

/// `rsma`, `sdma` or `both`.
pub fn parse_schemes(value: &str) -> std::result::Result<Vec<Scheme>, String> {
    match value {
        "both" => Ok(vec![Scheme::Rsma, Scheme::Sdma]),
        other => Ok(vec![other.parse::<Scheme>()?]),
    }
}

/// Line of the last key plausibly responsible for a validation message.
fn blame_line(message: &str, lines: &HashMap<&'static str, usize>) -> usize {
    let suspects: &[&str] = if message.contains("M ≥ U") {
        &["num_antennas", "num_users"]
    } else if message.contains("D divisible") || message.contains("num_elements") || message.contains("group_size") {
        &["num_elements", "group_size", "sweep_values"]
    } else if message.contains("user_distances") {
        &["user_distances", "num_users"]
    } else if message.contains("user_azimuths") {
        &["user_azimuths", "num_users"]
    } else if message.contains("weights") {
        &["adversary_weights", "num_users"]
    } else if message.contains("csi_error") {
        &["csi_error", "csi_error_bs_user", "csi_error_bs_ris", "csi_error_ris_user", "sweep_values"]
    } else if message.contains("sic_error") {
        &["sic_error", "sweep_values"]
    } else if message.contains("sweep") {
        &["sweep_values", "sweep_axis"]
    } else if message.contains("trials") {
        &["trials"]
    } else {
        KEYS
    };
    suspects.iter().filter_map(|k| lines.get(k)).copied().max().unwrap_or(0)
}
