//! JSON configuration files.
//!
//! A config is a flat JSON object. Every key is optional and falls back to
//! the reference scenario; powers are in dBm, gains in dB, angles in degrees
//! and distances in meters. Lobe gains and angles can be set for all three
//! arrays at once (`main_gain_db`, `theta_deg`, ...) and overridden per array
//! with an `_af` (Alice signal), `_as` (Alice jamming) or `_b` (Bob) infix,
//! e.g. `theta_as_deg`.

use std::fmt;
use std::fs;
use std::path::Path;

use mmcovert_core::channel::{db_to_linear, linear_to_db};
use mmcovert_core::{AntennaPattern, JammerGainMode, SystemConfig};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// A rejected config field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Offending key, or `"<file>"` for problems with the file itself.
    pub field: String,
    /// What is wrong with it.
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

const ARRAYS: [&str; 3] = ["af", "as", "b"];
const PATTERN_KEYS: [&str; 4] = ["main_gain", "side_gain", "theta", "delta"];

const SCALAR_KEYS: [&str; 16] = [
    "pa_dbm",
    "pj_max_dbm",
    "sigma2_b_dbm",
    "sigma2_w_dbm",
    "d_ab_m",
    "d_aw_m",
    "alpha_l",
    "alpha_n",
    "c_l",
    "c_n",
    "nu_l",
    "nu_n",
    "decay_length_m",
    "willie_in_main_lobe",
    "jammer_gain_mode",
    "pj_max_mw",
];

fn pattern_key(name: &str, array: Option<&str>) -> String {
    let unit = if name.ends_with("gain") { "db" } else { "deg" };
    match array {
        Some(a) => format!("{name}_{a}_{unit}"),
        None => format!("{name}_{unit}"),
    }
}

fn is_known(key: &str) -> bool {
    SCALAR_KEYS.contains(&key)
        || PATTERN_KEYS.iter().any(|p| {
            pattern_key(p, None) == key || ARRAYS.iter().any(|a| pattern_key(p, Some(a)) == key)
        })
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<SystemConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses and validates config text; empty text means all defaults.
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(SystemConfig::benchmark());
    }
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("<file>", format!("invalid JSON: {e}")))?;
    let Value::Object(map) = value else {
        return Err(ConfigError::new("<file>", "top level must be a JSON object"));
    };
    from_map(&map)
}

struct Fields<'a>(&'a Map<String, Value>);

impl Fields<'_> {
    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(ConfigError::new(key, format!("expected a finite number, got {v}"))),
            },
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.number(key)? {
            Some(x) if x <= 0.0 => Err(ConfigError::new(key, format!("must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    fn shape(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        let Some(x) = self.number(key)? else { return Ok(None) };
        if x.fract() != 0.0 {
            return Err(ConfigError::new(key, format!("Nakagami shape must be an integer, got {x}")));
        }
        if !(1.0..=30.0).contains(&x) {
            return Err(ConfigError::new(key, format!("Nakagami shape must be in 1..=30, got {x}")));
        }
        Ok(Some(x as u32))
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(v) => Err(ConfigError::new(key, format!("expected true or false, got {v}"))),
        }
    }
}

fn from_map(map: &Map<String, Value>) -> Result<SystemConfig, ConfigError> {
    if let Some(key) = map.keys().find(|k| !is_known(k)) {
        return Err(ConfigError::new(key, "unknown key"));
    }
    let f = Fields(map);
    let mut cfg = SystemConfig::benchmark();

    if let Some(x) = f.number("pa_dbm")? {
        cfg.pa = db_to_linear(x);
    }
    match (f.number("pj_max_dbm")?, f.number("pj_max_mw")?) {
        (Some(_), Some(_)) => return Err(ConfigError::new("pj_max_mw", "give either pj_max_dbm or pj_max_mw, not both")),
        (Some(x), None) => cfg.pj_max = db_to_linear(x),
        (None, Some(x)) if x < 0.0 => return Err(ConfigError::new("pj_max_mw", format!("must be nonnegative, got {x}"))),
        (None, Some(x)) => cfg.pj_max = x,
        (None, None) => {}
    }
    if let Some(x) = f.number("sigma2_b_dbm")? {
        cfg.sigma2_b = db_to_linear(x);
    }
    if let Some(x) = f.number("sigma2_w_dbm")? {
        cfg.sigma2_w = db_to_linear(x);
    }
    if let Some(x) = f.positive("d_ab_m")? {
        cfg.d_ab = x;
    }
    if let Some(x) = f.positive("d_aw_m")? {
        cfg.d_aw = x;
    }
    if let Some(x) = f.positive("alpha_l")? {
        cfg.blockage.alpha_los = x;
    }
    if let Some(x) = f.positive("alpha_n")? {
        cfg.blockage.alpha_nlos = x;
    }
    if let Some(x) = f.positive("c_l")? {
        cfg.blockage.c_los = x;
    }
    if let Some(x) = f.positive("c_n")? {
        cfg.blockage.c_nlos = x;
    }
    if let Some(x) = f.positive("decay_length_m")? {
        cfg.blockage.decay_length = x;
    }
    if let Some(nu) = f.shape("nu_l")? {
        cfg.fading.nu_los = nu;
    }
    if let Some(nu) = f.shape("nu_n")? {
        cfg.fading.nu_nlos = nu;
    }
    if let Some(b) = f.flag("willie_in_main_lobe")? {
        cfg.willie_in_main_lobe = b;
    }
    if let Some(v) = map.get("jammer_gain_mode") {
        cfg.jammer_gain_mode = match v.as_str() {
            Some("averaged") => JammerGainMode::Averaged,
            Some("deterministic_main") => JammerGainMode::DeterministicMain,
            _ => {
                return Err(ConfigError::new(
                    "jammer_gain_mode",
                    format!("expected \"averaged\" or \"deterministic_main\", got {v}"),
                ))
            }
        };
    }

    for array in ARRAYS {
        let pattern = match array {
            "af" => &mut cfg.alice_first,
            "as" => &mut cfg.alice_second,
            _ => &mut cfg.bob,
        };
        apply_pattern(&f, array, pattern)?;
    }

    cfg.validate().map_err(|e| ConfigError::new("<config>", e.to_string()))?;
    Ok(cfg)
}

fn apply_pattern(f: &Fields<'_>, array: &str, p: &mut AntennaPattern) -> Result<(), ConfigError> {
    let pick = |name: &str| -> Result<(Option<f64>, String), ConfigError> {
        let specific = pattern_key(name, Some(array));
        if let Some(x) = f.number(&specific)? {
            return Ok((Some(x), specific));
        }
        let shared = pattern_key(name, None);
        Ok((f.number(&shared)?, shared))
    };
    let (main, main_key) = pick("main_gain")?;
    let (side, side_key) = pick("side_gain")?;
    let (theta, theta_key) = pick("theta")?;
    let (delta, delta_key) = pick("delta")?;
    if let Some(x) = main {
        p.main_gain = db_to_linear(x);
    }
    if let Some(x) = side {
        p.side_gain = db_to_linear(x);
    }
    if let Some(x) = theta {
        if !(x > 0.0 && x < 360.0) {
            return Err(ConfigError::new(&theta_key, format!("beamwidth must be in (0, 360) degrees, got {x}")));
        }
        p.beamwidth = x.to_radians();
    }
    if let Some(x) = delta {
        if x < 0.0 {
            return Err(ConfigError::new(&delta_key, format!("steering error must be nonnegative, got {x}")));
        }
        p.steer_sigma = x.to_radians();
    }
    if p.main_gain <= p.side_gain {
        let key = if main.is_some() { main_key } else { side_key };
        return Err(ConfigError::new(
            &key,
            format!(
                "main-lobe gain ({:.3} dB) must exceed side-lobe gain ({:.3} dB)",
                linear_to_db(p.main_gain),
                linear_to_db(p.side_gain)
            ),
        ));
    }
    Ok(())
}

/// Canonical JSON of the resolved (linear) configuration.
pub fn canonical_json(cfg: &SystemConfig) -> String {
    let pattern = |p: &AntennaPattern| {
        serde_json::json!({
            "main_gain": p.main_gain,
            "side_gain": p.side_gain,
            "beamwidth_rad": p.beamwidth,
            "steer_sigma_rad": p.steer_sigma,
        })
    };
    let v = serde_json::json!({
        "pa_mw": cfg.pa,
        "pj_max_mw": cfg.pj_max,
        "sigma2_b_mw": cfg.sigma2_b,
        "sigma2_w_mw": cfg.sigma2_w,
        "d_ab_m": cfg.d_ab,
        "d_aw_m": cfg.d_aw,
        "alice_first": pattern(&cfg.alice_first),
        "alice_second": pattern(&cfg.alice_second),
        "bob": pattern(&cfg.bob),
        "decay_length_m": cfg.blockage.decay_length,
        "alpha_l": cfg.blockage.alpha_los,
        "alpha_n": cfg.blockage.alpha_nlos,
        "c_l": cfg.blockage.c_los,
        "c_n": cfg.blockage.c_nlos,
        "nu_l": cfg.fading.nu_los,
        "nu_n": cfg.fading.nu_nlos,
        "willie_in_main_lobe": cfg.willie_in_main_lobe,
        "jammer_gain_mode": match cfg.jammer_gain_mode {
            JammerGainMode::Averaged => "averaged",
            JammerGainMode::DeterministicMain => "deterministic_main",
        },
    });
    v.to_string()
}

/// SHA-256 of [`canonical_json`], lowercase hex.
pub fn config_hash(cfg: &SystemConfig) -> String {
    let digest = Sha256::digest(canonical_json(cfg).as_bytes());
    hex::encode(digest)
}
