//! Simple scripted opponents used to exercise the two main strategies.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::StrategyError;
use crate::functions::{RealMap, RepresentedFunction};
use crate::game::{MoveI, MoveII, PlayerI, PlayerII, Provenance};
use crate::metric::{max_inscribed_radius, Ball, Point};
use crate::scalar::{pow2_neg, rat, Scalar};

/// Plays `B(x, 2^-k)` in round `k`.
#[derive(Clone, Debug)]
pub struct ConvergeTo {
    pub target: Point,
    round: u32,
}

impl ConvergeTo {
    pub fn new(target: Point) -> Self {
        ConvergeTo { target, round: 0 }
    }
}

impl PlayerI for ConvergeTo {
    fn next_move(&mut self, _last: Option<&MoveII>) -> Result<MoveI, StrategyError> {
        let ball = Ball::new(self.target.clone(), Scalar::from_rational(pow2_neg(self.round)))?;
        self.round += 1;
        Ok(MoveI::new(ball))
    }
}

/// Plays `B(x, 1)` forever.
#[derive(Clone, Debug)]
pub struct RepeatBall(pub Point);

impl PlayerI for RepeatBall {
    fn next_move(&mut self, _last: Option<&MoveII>) -> Result<MoveI, StrategyError> {
        Ok(MoveI::new(Ball::new(self.0.clone(), Scalar::one())?))
    }
}

/// Random legal play inside the hull of the domain: each ball is a random
/// sub-ball of the previous one with between a quarter and a half of the
/// largest radius that fits.
#[derive(Clone, Debug)]
pub struct RandomLegalI {
    f: Arc<RepresentedFunction>,
    rng: ChaCha8Rng,
    last: Option<Ball>,
}

impl RandomLegalI {
    pub fn new(f: Arc<RepresentedFunction>, seed: u64) -> Self {
        RandomLegalI { f, rng: ChaCha8Rng::seed_from_u64(seed), last: None }
    }
}

impl PlayerI for RandomLegalI {
    fn next_move(&mut self, _last: Option<&MoveII>) -> Result<MoveI, StrategyError> {
        let ball = match &self.last {
            None => {
                let hull = self.f.domain().hull_ball();
                let (lo, hi) = hull.bounds();
                let k: i64 = self.rng.gen_range(1..256);
                let j: u32 = self.rng.gen_range(0..4);
                let center = Point::scalar(&lo + &(&hi - &lo).scale(&rat(k, 256)));
                let fit = max_inscribed_radius(&center, &hull)?;
                Ball::new(center, fit.scale(&pow2_neg(j)))?
            }
            Some(prev) => {
                let u: i64 = self.rng.gen_range(-192..=192);
                let shift = prev.radius().scale(&rat(u, 256));
                let center = Point::scalar(prev.center().x() + &shift);
                let rho_bar = max_inscribed_radius(&center, prev)?;
                let t: i64 = self.rng.gen_range(64..=128);
                Ball::new(center, rho_bar.scale(&rat(t, 256)))?
            }
        };
        self.last = Some(ball.clone());
        Ok(MoveI::new(ball))
    }
}

/// Always answers the first dense-range term equal to a fixed value.
#[derive(Clone, Debug)]
pub struct ConstII {
    f: Arc<RepresentedFunction>,
    index: u128,
}

impl ConstII {
    pub const SEARCH_BOUND: u128 = 1 << 16;

    pub fn new(f: Arc<RepresentedFunction>, value: &Point) -> Result<Self, StrategyError> {
        let index = f
            .dense_range()
            .index_of(value, Self::SEARCH_BOUND)
            .ok_or_else(|| StrategyError::ValueNotInRange(value.to_string()))?;
        Ok(ConstII { f, index })
    }
}

impl PlayerII for ConstII {
    fn reply(&mut self, _ball: &Ball) -> Result<MoveII, StrategyError> {
        Ok(MoveII::dense(&self.f, self.index))
    }

    fn box_clone(&self) -> Box<dyn PlayerII> {
        Box::new(self.clone())
    }
}

/// Answers `f` at the centre of the ball, or `q_0` when the centre lies
/// outside the domain.
#[derive(Clone, Debug)]
pub struct Copycat(pub Arc<RepresentedFunction>);

impl PlayerII for Copycat {
    fn reply(&mut self, ball: &Ball) -> Result<MoveII, StrategyError> {
        let c = ball.center();
        Ok(match self.0.eval(c) {
            Ok(v) => MoveII { value: v, provenance: Provenance::EvalAt(c.clone()), note: None },
            Err(_) => MoveII::dense(&self.0, 0),
        })
    }

    fn box_clone(&self) -> Box<dyn PlayerII> {
        Box::new(self.clone())
    }
}

/// Answers a uniformly random dense-range term among the first 64.
#[derive(Clone, Debug)]
pub struct RandomII {
    f: Arc<RepresentedFunction>,
    rng: ChaCha8Rng,
}

impl RandomII {
    pub fn new(f: Arc<RepresentedFunction>, seed: u64) -> Self {
        RandomII { f, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl PlayerII for RandomII {
    fn reply(&mut self, _ball: &Ball) -> Result<MoveII, StrategyError> {
        let i = self.rng.gen_range(0..64);
        Ok(MoveII::dense(&self.f, i))
    }

    fn box_clone(&self) -> Box<dyn PlayerII> {
        Box::new(self.clone())
    }
}

/// Always answers dense term `q_i`.
#[derive(Clone, Debug)]
pub struct DenseIndexII {
    f: Arc<RepresentedFunction>,
    index: u128,
}

impl DenseIndexII {
    pub fn new(f: Arc<RepresentedFunction>, index: u128) -> Self {
        DenseIndexII { f, index }
    }
}

impl PlayerII for DenseIndexII {
    fn reply(&mut self, _ball: &Ball) -> Result<MoveII, StrategyError> {
        Ok(MoveII::dense(&self.f, self.index))
    }

    fn box_clone(&self) -> Box<dyn PlayerII> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::metric::ball_subset;

    #[test]
    fn random_legal_play_stays_nested() {
        for name in ["sign", "sin_poly", "dirichlet"] {
            let f = Arc::new(catalog_get(name).unwrap());
            for seed in 0..5 {
                let mut p = RandomLegalI::new(f.clone(), seed);
                let mut prev = p.next_move(None).unwrap().ball;
                for _ in 0..30 {
                    let next = p.next_move(None).unwrap().ball;
                    assert!(ball_subset(&next, &prev).unwrap());
                    prev = next;
                }
            }
        }
    }

    #[test]
    fn converge_to_halves() {
        let mut p = ConvergeTo::new(Point::ratio(1, 3));
        let b0 = p.next_move(None).unwrap().ball;
        let b1 = p.next_move(None).unwrap().ball;
        assert_eq!(b0.radius(), &Scalar::one());
        assert_eq!(b1.radius(), &Scalar::from_ratio(1, 2));
    }

    #[test]
    fn const_ii_needs_a_range_value() {
        let f = Arc::new(catalog_get("sign").unwrap());
        let mut c = ConstII::new(f.clone(), &Point::ratio(-1, 1)).unwrap();
        let b = Ball::interval(rat(0, 1), rat(1, 1)).unwrap();
        assert_eq!(c.reply(&b).unwrap().value, Point::ratio(-1, 1));
        assert!(matches!(ConstII::new(f, &Point::ratio(1, 2)), Err(StrategyError::ValueNotInRange(_))));
    }

    #[test]
    fn copycat_falls_back_outside_the_domain() {
        let f = Arc::new(catalog_get("sin_poly").unwrap());
        let mut c = Copycat(f.clone());
        let m = c.reply(&Ball::interval(rat(3, 1), rat(1, 1)).unwrap()).unwrap();
        assert_eq!(m.provenance, Provenance::DenseIndex(0));
        let m = c.reply(&Ball::interval(rat(0, 1), rat(1, 2)).unwrap()).unwrap();
        assert_eq!(m.provenance, Provenance::EvalAt(Point::ratio(0, 1)));
    }
}
