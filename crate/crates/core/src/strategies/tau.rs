//! Player I's strategy against functions with a discontinuity witness
//! `(K, epsilon, Q)`.
//!
//! The first ball is `B(q_0, 1)`. Given II's value `y_k` and the current ball
//! `B(q_{n_k}, rho_k)`: if `d(y_k, f(q_{n_k})) <= epsilon/8`, move to the
//! least-index `q_n` strictly inside the ball with
//! `d(f(q_n), f(q_{n_k})) >= epsilon/3` and play `B(q_n, rho_bar/2)`, where
//! `rho_bar` is the largest radius about `q_n` that stays in the current
//! ball. Otherwise halve the current ball in place.

use std::sync::Arc;

use crate::error::StrategyError;
use crate::functions::{CompactInterval, DiscontinuityWitness, RealMap, RepresentedFunction, WitnessPoints};
use crate::game::{MoveI, MoveII, Note, PlayerI};
use crate::metric::{max_inscribed_radius, Ball, Point};
use crate::oscillation::{extract_dense_q, find_uniform_osc_region};
use crate::scalar::{rat, Rational, Scalar};

/// Indices are scanned level by level, so the whole `u128` range is usable.
pub const DEFAULT_SEARCH_BOUND: u128 = u128::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauState {
    pub center_index: u128,
    pub center: Point,
    pub radius: Scalar,
    pub epsilon: Rational,
}

impl TauState {
    pub fn ball(&self) -> Ball {
        Ball::new(self.center.clone(), self.radius.clone()).expect("radius stays positive")
    }
}

fn note(condition: u8, center: u128, intersect_k: bool) -> Option<Note> {
    Some(Note::Tau { condition, center, intersect_k })
}

/// `tau(empty) = B(q_0, 1)`.
pub fn tau_start(w: &DiscontinuityWitness) -> Result<(MoveI, TauState), StrategyError> {
    let q0 = w.q(0).ok_or_else(|| StrategyError::ScanExhausted("0".into()))?;
    let state = TauState { center_index: 0, center: q0, radius: Scalar::one(), epsilon: w.epsilon.clone() };
    Ok((MoveI { ball: state.ball(), note: note(0, 0, false) }, state))
}

/// One move in answer to `y`.
pub fn tau_step(
    f: &RepresentedFunction,
    w: &DiscontinuityWitness,
    state: &TauState,
    y: &Point,
    search_bound: u128,
) -> Result<(MoveI, TauState), StrategyError> {
    let fc = f.eval(&state.center)?;
    let eighth = Scalar::from_rational(&state.epsilon / rat(8, 1));
    let third = Scalar::from_rational(&state.epsilon / rat(3, 1));
    let current = state.ball();
    if y.within(&fc, &eighth)? {
        let mut found = None;
        for (n, q) in w.q_in_ball(&current, search_bound) {
            let fq = f.eval(&q)?;
            if !fq.strictly_within(&fc, &third)? {
                found = Some((n, q));
                break;
            }
        }
        let (n, q) = found.ok_or_else(|| StrategyError::ScanExhausted(search_bound.to_string()))?;
        let rho_bar = max_inscribed_radius(&q, &current)?;
        let next = TauState {
            center_index: n,
            center: q,
            radius: rho_bar.scale(&rat(1, 2)),
            epsilon: state.epsilon.clone(),
        };
        Ok((MoveI { ball: next.ball(), note: note(1, n, false) }, next))
    } else {
        let next = TauState { radius: state.radius.scale(&rat(1, 2)), ..state.clone() };
        Ok((MoveI { ball: next.ball(), note: note(2, next.center_index, false) }, next))
    }
}

/// Builds a witness from the oscillation search when the catalog has none:
/// a uniform-oscillation ball inside the middle half of the domain, then the
/// dense set extracted from it.
pub fn discover_witness(f: &RepresentedFunction) -> Result<DiscontinuityWitness, StrategyError> {
    let missing = || StrategyError::MissingWitness(f.name().to_string());
    let (lo, hi) = f.domain().hull();
    let quarter = (&hi - &lo).scale(&rat(1, 4));
    let k = CompactInterval { lo: (&lo + &quarter).upper_rational(), hi: (&hi - &quarter).lower_rational() };
    let region = find_uniform_osc_region(f, &k, 4).map_err(|_| missing())?;
    let eps = region.epsilon();
    let q = extract_dense_q(f, &region.ball, &eps, 6).map_err(|_| missing())?;
    let (a, b) = region.ball.bounds();
    let kk = CompactInterval { lo: a.upper_rational().max(k.lo.clone()), hi: b.lower_rational().min(k.hi.clone()) };
    let q: Vec<Point> = q.into_iter().filter(|p| kk.contains(p)).collect();
    if q.is_empty() {
        return Err(missing());
    }
    Ok(DiscontinuityWitness { k: kk, epsilon: eps, points: WitnessPoints::Finite(q) })
}

#[derive(Clone)]
pub struct Tau {
    f: Arc<RepresentedFunction>,
    witness: Arc<DiscontinuityWitness>,
    state: Option<TauState>,
    search_bound: u128,
}

impl Tau {
    pub fn new(f: Arc<RepresentedFunction>, search_bound: u128) -> Result<Self, StrategyError> {
        let witness = match f.witness() {
            Some(w) => w.clone(),
            None => discover_witness(&f)?,
        };
        Ok(Tau { f, witness: Arc::new(witness), state: None, search_bound })
    }

    pub fn witness(&self) -> &DiscontinuityWitness {
        &self.witness
    }

    pub fn state(&self) -> Option<&TauState> {
        self.state.as_ref()
    }
}

impl PlayerI for Tau {
    fn next_move(&mut self, last: Option<&MoveII>) -> Result<MoveI, StrategyError> {
        let (m, next) = match (&self.state, last) {
            (None, _) => tau_start(&self.witness)?,
            (Some(s), Some(y)) => tau_step(&self.f, &self.witness, s, &y.value, self.search_bound)?,
            (Some(_), None) => return Err(StrategyError::Other("missing Player II value".into())),
        };
        self.state = Some(next);
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;

    fn dirichlet() -> (RepresentedFunction, DiscontinuityWitness) {
        let f = catalog_get("dirichlet").unwrap();
        let w = f.witness().unwrap().clone();
        (f, w)
    }

    #[test]
    fn first_ball() {
        let (_, w) = dirichlet();
        let (m, s) = tau_start(&w).unwrap();
        assert_eq!(m.ball, Ball::interval(rat(1, 2), rat(1, 1)).unwrap());
        assert_eq!(s.center_index, 0);
    }

    #[test]
    fn far_value_halves_in_place() {
        let (f, w) = dirichlet();
        let (_, s) = tau_start(&w).unwrap();
        let (m, s2) = tau_step(&f, &w, &s, &Point::ratio(0, 1), DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(m.ball, Ball::interval(rat(1, 2), rat(1, 2)).unwrap());
        assert_eq!(s2.center_index, 0);
        assert_eq!(m.note, Some(Note::Tau { condition: 2, center: 0, intersect_k: false }));
    }

    #[test]
    fn close_value_jumps_to_the_other_class() {
        let (f, w) = dirichlet();
        let (_, s) = tau_start(&w).unwrap();
        let (m, s2) = tau_step(&f, &w, &s, &Point::ratio(1, 1), DEFAULT_SEARCH_BOUND).unwrap();
        // least index with value 0 inside B(1/2, 1) is q_1 = (1 + sqrt 2)/4
        assert_eq!(s2.center_index, 1);
        assert_eq!(s2.center.x(), &Scalar::new(rat(1, 4), rat(1, 4)));
        // rho_bar = 1 - |q_1 - 1/2| = (5 - sqrt 2)/4, halved
        assert_eq!(s2.radius, Scalar::new(rat(5, 8), rat(-1, 8)));
        assert_eq!(f.eval(&s2.center).unwrap(), Point::ratio(0, 1));
        assert_eq!(m.note, Some(Note::Tau { condition: 1, center: 1, intersect_k: false }));
    }

    #[test]
    fn no_witness_for_continuous_or_baire_one_entries() {
        for name in ["const:0", "sign", "identity", "thomae"] {
            let f = catalog_get(name).unwrap();
            assert!(matches!(Tau::new(Arc::new(f), DEFAULT_SEARCH_BOUND), Err(StrategyError::MissingWitness(_))), "{name}");
        }
    }
}
