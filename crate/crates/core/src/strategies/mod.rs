//! Concrete strategies for both players and a name-based registry.

pub mod fsigma;
pub mod phi;
pub mod scripted;
pub mod sigma_star;
pub mod tau;

use std::sync::Arc;

use crate::error::StrategyError;
use crate::functions::RepresentedFunction;
use crate::game::{PlayerI, PlayerII};
use crate::metric::Point;

pub use fsigma::{fsigma_certificate, FsigmaCertificate};
pub use phi::{phi_approx, q_select, PhiResult, TauPrime};
pub use scripted::{ConstII, ConvergeTo, Copycat, DenseIndexII, RandomII, RandomLegalI, RepeatBall};
pub use sigma_star::{SigmaStar, SigmaStarState};
pub use tau::{Tau, TauState};

pub const PLAYER_I_NAMES: &[&str] = &["tau", "tau_prime", "converge-to:x", "repeat:x", "random-legal"];
pub const PLAYER_II_NAMES: &[&str] = &["sigma_star", "const:v", "copycat", "random", "dense-index:i"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyOptions {
    pub seed: u64,
    pub window: u64,
    pub search_bound: u128,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions { seed: 0, window: sigma_star::DEFAULT_WINDOW, search_bound: tau::DEFAULT_SEARCH_BOUND }
    }
}

fn split(name: &str) -> (&str, Option<&str>) {
    match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    }
}

fn point_arg(name: &str, arg: Option<&str>) -> Result<Point, StrategyError> {
    let arg = arg.ok_or_else(|| StrategyError::UnknownStrategy(name.to_string()))?;
    arg.parse::<Point>().map_err(|e| StrategyError::Other(format!("{name}: {e}")))
}

/// Builds a Player I strategy by name.
pub fn player_i(name: &str, f: Arc<RepresentedFunction>, opts: &StrategyOptions) -> Result<Box<dyn PlayerI>, StrategyError> {
    let (head, arg) = split(name);
    Ok(match (head, arg) {
        ("tau", None) => Box::new(Tau::new(f, opts.search_bound)?),
        ("tau_prime", None) => {
            let dense = f.dense_range().clone();
            Box::new(TauPrime::new(Tau::new(f, opts.search_bound)?, dense))
        }
        ("converge-to", _) => Box::new(ConvergeTo::new(point_arg(name, arg)?)),
        ("repeat", _) => Box::new(RepeatBall(point_arg(name, arg)?)),
        ("random-legal", None) => Box::new(RandomLegalI::new(f, opts.seed)),
        _ => return Err(StrategyError::UnknownStrategy(name.to_string())),
    })
}

/// Builds a Player II strategy by name.
pub fn player_ii(name: &str, f: Arc<RepresentedFunction>, opts: &StrategyOptions) -> Result<Box<dyn PlayerII>, StrategyError> {
    let (head, arg) = split(name);
    Ok(match (head, arg) {
        ("sigma_star", None) => Box::new(SigmaStar::new(f, opts.window)?),
        ("const", _) => Box::new(ConstII::new(f, &point_arg(name, arg)?)?),
        ("copycat", None) => Box::new(Copycat(f)),
        ("random", None) => Box::new(RandomII::new(f, opts.seed)),
        ("dense-index", Some(i)) => {
            let i = i.parse::<u128>().map_err(|e| StrategyError::Other(format!("{name}: {e}")))?;
            Box::new(DenseIndexII::new(f, i))
        }
        _ => return Err(StrategyError::UnknownStrategy(name.to_string())),
    })
}
