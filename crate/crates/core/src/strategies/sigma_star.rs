//! Player II's strategy for Baire class one functions.
//!
//! Round 0 answers `(q_0, 0)`. Afterwards, for the latest ball `U_k`, the
//! strategy looks for an index `n` in the window `(n_cur, n_cur + M]` whose
//! approximant has `diam f_n[U_k] <= 2^-n`, scanning from the top of the
//! window down and taking the first (largest) such `n`. It then answers the
//! least-index `q_m`, `m < 2^(n+4)`, nearest to the enclosure of `f_n[U_k]`.
//! When nothing fires it repeats its previous answer. Indices stop at
//! [`MAX_N`].

use std::sync::Arc;

use crate::error::{CatalogError, StrategyError};
use crate::functions::{RealMap, RepresentedFunction};
use crate::game::{MoveII, Note, PlayerII, Provenance};
use crate::metric::Ball;
use crate::scalar::pow2_neg;

pub const DEFAULT_WINDOW: u64 = 64;

/// Largest index the strategy fires at, so that the searched prefix
/// `2^(n+4)` is still an exact `u128` length.
pub const MAX_N: u64 = 123;

/// Length of the dense-range prefix searched at index `n`: `2^(n+4)`, saturating.
pub fn prefix_len(n: u64) -> u128 {
    if n > MAX_N {
        u128::MAX
    } else {
        1u128 << (n + 4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaStarState {
    pub current_q_index: u128,
    pub current_n: u64,
    started: bool,
}

impl SigmaStarState {
    pub fn initial() -> Self {
        SigmaStarState { current_q_index: 0, current_n: 0, started: false }
    }

    pub fn started(&self) -> bool {
        self.started
    }
}

/// One move of the strategy. Returns the answer and the next state.
pub fn sigma_star_step(
    f: &RepresentedFunction,
    state: &SigmaStarState,
    ball: &Ball,
    window: u64,
) -> Result<(MoveII, SigmaStarState), StrategyError> {
    if !f.has_approximants() {
        return Err(StrategyError::MissingApproximants(f.name().to_string()));
    }
    let answer = |index: u128, n: u64, fired: bool| MoveII {
        value: f.dense_range().at(index),
        provenance: Provenance::DenseIndex(index),
        note: Some(Note::SigmaStar { n, fired }),
    };
    if !state.started {
        let next = SigmaStarState { current_q_index: 0, current_n: 0, started: true };
        return Ok((answer(0, 0, false), next));
    }
    let top = state.current_n.saturating_add(window.max(1)).min(MAX_N);
    let mut n = top;
    while n > state.current_n {
        let fn_ = f.approximant(n).ok_or_else(|| StrategyError::MissingApproximants(f.name().to_string()))?;
        let enclosure = match fn_.enclose(ball) {
            Ok(e) => e,
            // a ball off the domain carries no information: repeat
            Err(CatalogError::EmptyIntersection(_)) => break,
            Err(e) => return Err(e.into()),
        };
        if enclosure.width() <= pow2_neg(n.min(u32::MAX as u64) as u32) {
            let (m, _) = f.dense_range().nearest_in_prefix(&enclosure.target(), prefix_len(n));
            let next = SigmaStarState { current_q_index: m, current_n: n, started: true };
            return Ok((answer(m, n, true), next));
        }
        n -= 1;
    }
    Ok((answer(state.current_q_index, state.current_n, false), state.clone()))
}

#[derive(Clone)]
pub struct SigmaStar {
    f: Arc<RepresentedFunction>,
    state: SigmaStarState,
    window: u64,
}

impl SigmaStar {
    pub fn new(f: Arc<RepresentedFunction>, window: u64) -> Result<Self, StrategyError> {
        if !f.has_approximants() {
            return Err(StrategyError::MissingApproximants(f.name().to_string()));
        }
        Ok(SigmaStar { f, state: SigmaStarState::initial(), window })
    }

    pub fn state(&self) -> &SigmaStarState {
        &self.state
    }
}

impl PlayerII for SigmaStar {
    fn reply(&mut self, ball: &Ball) -> Result<MoveII, StrategyError> {
        let (m, next) = sigma_star_step(&self.f, &self.state, ball, self.window)?;
        self.state = next;
        Ok(m)
    }

    fn box_clone(&self) -> Box<dyn PlayerII> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::metric::Point;
    use crate::scalar::{rat, Rational};

    fn ball(c: Rational, r: Rational) -> Ball {
        Ball::interval(c, r).unwrap()
    }

    #[test]
    fn first_answer_is_q0() {
        for name in ["sign", "identity", "thomae"] {
            let f = catalog_get(name).unwrap();
            let (m, s) = sigma_star_step(&f, &SigmaStarState::initial(), &ball(rat(1, 3), rat(1, 1)), 64).unwrap();
            assert_eq!(m.value, f.dense_range().at(0));
            assert_eq!((s.current_q_index, s.current_n), (0, 0));
        }
    }

    /// Brute-force oracle: enclosure of clamp(n x) on B(0, 2^-10) is
    /// [-min(1, n 2^-10), min(1, n 2^-10)], so it fires iff 2 min(1, n 2^-10) <= 2^-n.
    fn fires_at_origin(n: u64) -> bool {
        let w = (rat(n as i64, 1) * pow2_neg(10)).min(rat(1, 1));
        rat(2, 1) * w <= pow2_neg(n as u32)
    }

    #[test]
    fn sign_near_origin_regression() {
        let f = catalog_get("sign").unwrap();
        let firing: Vec<u64> = (2..=65).filter(|&n| fires_at_origin(n)).collect();
        assert_eq!(firing, vec![2, 3, 4, 5, 6]);
        let state = SigmaStarState { current_q_index: 0, current_n: 1, started: true };
        let (m, s) = sigma_star_step(&f, &state, &ball(rat(0, 1), pow2_neg(10)), 64).unwrap();
        assert_eq!(s.current_n, 6);
        assert_eq!(m.value, Point::ratio(0, 1));
        assert_eq!(m.note, Some(Note::SigmaStar { n: 6, fired: true }));
    }

    #[test]
    fn constant_fires_immediately() {
        let f = catalog_get("const:0").unwrap();
        let mut s = SigmaStar::new(Arc::new(f), 64).unwrap();
        s.reply(&ball(rat(0, 1), rat(1, 1))).unwrap();
        let m = s.reply(&ball(rat(0, 1), rat(1, 1))).unwrap();
        assert_eq!(m.value, Point::ratio(0, 1));
        assert!(matches!(m.note, Some(Note::SigmaStar { fired: true, .. })));
        assert!(s.state().current_n >= 1);
    }

    #[test]
    fn nothing_fires_on_a_wide_ball_across_the_jump() {
        let f = catalog_get("sign").unwrap();
        let state = SigmaStarState { current_q_index: 2, current_n: 3, started: true };
        let (m, s) = sigma_star_step(&f, &state, &ball(rat(0, 1), rat(1, 1)), 64).unwrap();
        assert_eq!(s, state);
        assert_eq!(m.value, f.dense_range().at(2));
    }

    #[test]
    fn ball_off_the_domain_repeats() {
        let f = catalog_get("sin_poly").unwrap();
        let state = SigmaStarState { current_q_index: 3, current_n: 2, started: true };
        let (m, s) = sigma_star_step(&f, &state, &ball(rat(5, 1), rat(1, 1)), 64).unwrap();
        assert_eq!(s, state);
        assert_eq!(m.value, f.dense_range().at(3));
    }

    #[test]
    fn missing_approximants() {
        let f = catalog_get("dirichlet").unwrap();
        assert!(matches!(SigmaStar::new(Arc::new(f), 64), Err(StrategyError::MissingApproximants(_))));
    }

    #[test]
    fn prefix_lengths() {
        assert_eq!(prefix_len(0), 16);
        assert_eq!(prefix_len(3), 128);
        assert_eq!(prefix_len(MAX_N), 1 << 127);
        assert_eq!(prefix_len(200), u128::MAX);
    }
}
