//! Match configuration: a `key = value` file, overridden by command-line flags.
//!
//! Recognised keys: `function`, `I`, `II`, `horizon`, `shrink_tol`,
//! `value_tol`, `tail_fraction`, `seed`, `window`, `precision`. Blank lines
//! and lines starting with `#` are ignored. Rationals are written `num/den`.

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use baire_game::functions::{catalog_get, RepresentedFunction};
use baire_game::game::{PlayerI, PlayerII, RefereeConfig};
use baire_game::scalar::{parse_rational, set_precision_bits};
use baire_game::strategies::{player_i, player_ii, StrategyOptions};

pub const PRECISION_ENV: &str = "BAIRE_PRECISION";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("config line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("missing setting `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: &'static str, reason: String },
    #[error("{0}")]
    Catalog(#[from] baire_game::error::CatalogError),
    #[error("{0}")]
    Strategy(#[from] baire_game::error::StrategyError),
    #[error("{0}")]
    Referee(#[from] baire_game::error::GameError),
}

/// Partially specified settings; flags and file contents are both read into
/// this shape and merged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub function: Option<String>,
    pub player_i: Option<String>,
    pub player_ii: Option<String>,
    pub horizon: Option<usize>,
    pub shrink_tol: Option<String>,
    pub value_tol: Option<String>,
    pub tail_fraction: Option<String>,
    pub seed: Option<u64>,
    pub window: Option<u64>,
    pub precision: Option<u32>,
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| ConfigError::Line { line, reason: format!("{key}: {e}") })
}

impl Settings {
    pub fn parse(text: &str) -> Result<Settings, ConfigError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Line { line, reason: format!("expected key = value, got `{body}`") })?;
            let (key, value) = (key.trim(), value.trim().to_string());
            match key {
                "function" => s.function = Some(value),
                "I" => s.player_i = Some(value),
                "II" => s.player_ii = Some(value),
                "horizon" => s.horizon = Some(number(line, key, &value)?),
                "shrink_tol" => s.shrink_tol = Some(value),
                "value_tol" => s.value_tol = Some(value),
                "tail_fraction" => s.tail_fraction = Some(value),
                "seed" => s.seed = Some(number(line, key, &value)?),
                "window" => s.window = Some(number(line, key, &value)?),
                "precision" => s.precision = Some(number(line, key, &value)?),
                other => return Err(ConfigError::Line { line, reason: format!("unknown key `{other}`") }),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Settings::parse(&text)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            function: self.function.or(base.function),
            player_i: self.player_i.or(base.player_i),
            player_ii: self.player_ii.or(base.player_ii),
            horizon: self.horizon.or(base.horizon),
            shrink_tol: self.shrink_tol.or(base.shrink_tol),
            value_tol: self.value_tol.or(base.value_tol),
            tail_fraction: self.tail_fraction.or(base.tail_fraction),
            seed: self.seed.or(base.seed),
            window: self.window.or(base.window),
            precision: self.precision.or(base.precision),
        }
    }

    pub fn referee(&self) -> Result<RefereeConfig, ConfigError> {
        let mut cfg = RefereeConfig::default();
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        let fields = [
            ("shrink_tol", &self.shrink_tol, &mut cfg.shrink_tol),
            ("value_tol", &self.value_tol, &mut cfg.value_tol),
            ("tail_fraction", &self.tail_fraction, &mut cfg.tail_fraction),
        ];
        for (key, text, slot) in fields {
            if let Some(t) = text {
                *slot = parse_rational(t).map_err(|e| ConfigError::Value { key, reason: e.to_string() })?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn strategy_options(&self) -> StrategyOptions {
        let mut o = StrategyOptions::default();
        if let Some(s) = self.seed {
            o.seed = s;
        }
        if let Some(w) = self.window {
            o.window = w;
        }
        o
    }

    /// Applies the precision setting, if any, to the process.
    pub fn apply_precision(&self) {
        if let Some(bits) = self.precision {
            set_precision_bits(bits);
        }
    }

    pub fn function(&self) -> Result<Arc<RepresentedFunction>, ConfigError> {
        let name = self.function.as_deref().ok_or(ConfigError::Missing("function"))?;
        Ok(Arc::new(catalog_get(name)?))
    }
}

/// A fully resolved match: function, both strategies and the referee.
pub struct MatchConfig {
    pub f: Arc<RepresentedFunction>,
    pub player_i: String,
    pub player_ii: String,
    pub referee: RefereeConfig,
    pub options: StrategyOptions,
}

impl MatchConfig {
    pub fn resolve(s: &Settings) -> Result<MatchConfig, ConfigError> {
        let f = s.function()?;
        let player_i = s.player_i.clone().ok_or(ConfigError::Missing("I"))?;
        let player_ii = s.player_ii.clone().ok_or(ConfigError::Missing("II"))?;
        let cfg = MatchConfig { f, player_i, player_ii, referee: s.referee()?, options: s.strategy_options() };
        // build once so that unknown names surface as configuration errors
        cfg.build_i(&cfg.player_i)?;
        cfg.build_ii(&cfg.player_ii)?;
        Ok(cfg)
    }

    pub fn build_i(&self, name: &str) -> Result<Box<dyn PlayerI>, ConfigError> {
        Ok(player_i(name, self.f.clone(), &self.options)?)
    }

    pub fn build_ii(&self, name: &str) -> Result<Box<dyn PlayerII>, ConfigError> {
        Ok(player_ii(name, self.f.clone(), &self.options)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use baire_game::scalar::rat;

    #[test]
    fn file_then_flags() {
        let file = Settings::parse("# demo\nfunction = sign\nI = converge-to:0\nII = sigma_star\nhorizon = 30\nvalue_tol = 1/64\n").unwrap();
        let flags = Settings { horizon: Some(60), ..Settings::default() };
        let s = flags.over(file);
        assert_eq!(s.function.as_deref(), Some("sign"));
        let r = s.referee().unwrap();
        assert_eq!(r.horizon, 60);
        assert_eq!(r.value_tol, rat(1, 64));
    }

    #[test]
    fn bad_lines_are_reported() {
        assert!(matches!(Settings::parse("horizon 3"), Err(ConfigError::Line { line: 1, .. })));
        assert!(matches!(Settings::parse("\ncolour = red"), Err(ConfigError::Line { line: 2, .. })));
        assert!(matches!(Settings::parse("seed = x"), Err(ConfigError::Line { line: 1, .. })));
    }

    #[test]
    fn unknown_names_fail_resolution() {
        let s = Settings::parse("function = nope\nI = tau\nII = const:0").unwrap();
        assert!(matches!(MatchConfig::resolve(&s), Err(ConfigError::Catalog(_))));
        let s = Settings::parse("function = sign\nI = nope\nII = const:0").unwrap();
        assert!(matches!(MatchConfig::resolve(&s), Err(ConfigError::Strategy(_))));
        let s = Settings::parse("function = sign\nI = repeat:0\nII = sigma_star\nvalue_tol = 0").unwrap();
        assert!(matches!(MatchConfig::resolve(&s), Err(ConfigError::Referee(_))));
    }
}
