//! Discontinuity witnesses: a closed interval `K`, a threshold `epsilon` and
//! an enumerated dense subset `Q` of `K` such that the restriction of `f` to
//! `K` has oscillation at least `epsilon` everywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::metric::{Ball, Point};
use crate::scalar::{rational_str, Rational, Scalar};

use super::dense::dyadic_fraction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactInterval {
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
}

impl CompactInterval {
    pub fn contains(&self, p: &Point) -> bool {
        let x = p.x();
        x.cmp_rational(&self.lo).is_ge() && x.cmp_rational(&self.hi).is_le()
    }

    pub fn diameter(&self) -> Rational {
        &self.hi - &self.lo
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessPoints {
    /// Even indices run through the dyadic rationals of `(lo, hi)`, odd
    /// indices through the matching points shifted by `sqrt(2)/2^(j+2)`, so
    /// both rational and irrational points are dense in the interval.
    TwoChannel { lo: Rational, hi: Rational },
    Finite(Vec<Point>),
}

impl WitnessPoints {
    pub fn at(&self, n: u128) -> Option<Point> {
        match self {
            WitnessPoints::TwoChannel { lo, hi } => {
                let len = hi - lo;
                let t = channel_point(n);
                Some(Point::scalar(t.scale(&len).add_rational(lo)))
            }
            WitnessPoints::Finite(points) => points.get(n.to_usize()?).cloned(),
        }
    }

    /// Indices `n < bound` with `q_n` strictly inside `ball`, in increasing order.
    pub fn indices_in<'a>(&'a self, ball: &'a Ball, bound: u128) -> Box<dyn Iterator<Item = (u128, Point)> + 'a> {
        match self {
            WitnessPoints::Finite(points) => Box::new(
                points
                    .iter()
                    .enumerate()
                    .take(bound.min(usize::MAX as u128) as usize)
                    .filter(move |(_, p)| ball.contains(p).unwrap_or(false))
                    .map(|(i, p)| (i as u128, p.clone())),
            ),
            WitnessPoints::TwoChannel { lo, hi } => Box::new(TwoChannelScan::new(lo, hi, ball, bound)),
        }
    }
}

/// Unit-interval position of two-channel index `n`.
fn channel_point(n: u128) -> Scalar {
    let i = n / 2;
    let r = dyadic_fraction(i);
    if n.is_multiple_of(2) {
        Scalar::from_rational(r)
    } else {
        // (4k + 1 + sqrt 2) / 2^(j+2) = r - 1/2^(j+2) + sqrt2/2^(j+2)
        let m = i + 1;
        let j = 127 - m.leading_zeros();
        let unit = Rational::new(BigInt::one(), BigInt::one() << (j + 2));
        Scalar::new(r - &unit, unit)
    }
}

/// Fixed-point scale for the integer enclosure of a scanned ball.
const SCAN_BITS: u32 = 160;

struct TwoChannelScan {
    lo: Rational,
    len: Rational,
    u_lo: Scalar,
    u_hi: Scalar,
    // floor(u_lo 2^SCAN_BITS) and ceil(u_hi 2^SCAN_BITS)
    a: BigInt,
    b: BigInt,
    bound: u128,
    level: u32,
    // current level's candidate index ranges for each channel, as (next k, last k)
    r: Option<(u128, u128)>,
    s: Option<(u128, u128)>,
}

fn div_floor(x: BigInt, d: i64) -> BigInt {
    x.div_floor(&BigInt::from(d))
}

impl TwoChannelScan {
    fn new(lo: &Rational, hi: &Rational, ball: &Ball, bound: u128) -> Self {
        let inv = (hi - lo).recip();
        let (a, b) = ball.bounds();
        let u_lo = a.add_rational(&-lo).scale(&inv);
        let u_hi = b.add_rational(&-lo).scale(&inv);
        let scale = Rational::from_integer(BigInt::one() << SCAN_BITS);
        let a = u_lo.scale(&scale).floor();
        let b = u_hi.scale(&scale).ceil();
        let mut scan =
            TwoChannelScan { lo: lo.clone(), len: hi - lo, u_lo, u_hi, a, b, bound, level: 0, r: None, s: None };
        scan.load_level();
        scan
    }

    /// Integer enclosure `(floor(u_lo 2^e), ceil(u_hi 2^e))`, possibly one wider.
    fn window(&self, e: u32) -> (BigInt, BigInt) {
        let d = BigInt::one() << (SCAN_BITS - e);
        (self.a.div_floor(&d), -(-&self.b).div_floor(&d))
    }

    fn clamp(&self, lo_k: BigInt, hi_k: BigInt) -> Option<(u128, u128)> {
        let top = BigInt::from((1u128 << self.level) - 1);
        let lo_k = lo_k.max(BigInt::zero());
        let hi_k = hi_k.min(top);
        if lo_k > hi_k {
            return None;
        }
        Some((lo_k.to_u128()?, hi_k.to_u128()?))
    }

    // Candidate ranges may include a few points outside the ball; `next`
    // filters them exactly.
    fn load_level(&mut self) {
        let j = self.level;
        // (2k + 1) / 2^(j+1)
        let (x, y) = self.window(j + 1);
        self.r = self.clamp(div_floor(x - 1, 2), -div_floor(1 - y, 2));
        // (4k + 1 + sqrt 2) / 2^(j+2), with 1 < sqrt 2 < 2
        let (x, y) = self.window(j + 2);
        self.s = self.clamp(div_floor(x - 3, 4), -div_floor(2 - y, 4));
    }

    fn index(&self, k: u128, channel: u128) -> u128 {
        2 * ((1u128 << self.level) + k - 1) + channel
    }
}

impl Iterator for TwoChannelScan {
    type Item = (u128, Point);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.level >= 125 || self.index(0, 0) >= self.bound {
                return None;
            }
            let r_next = self.r.map(|(k, _)| self.index(k, 0));
            let s_next = self.s.map(|(k, _)| self.index(k, 1));
            let pick = match (r_next, s_next) {
                (None, None) => {
                    self.level += 1;
                    self.load_level();
                    continue;
                }
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
            };
            if pick >= self.bound {
                return None;
            }
            let advance = |range: &mut Option<(u128, u128)>| {
                if let Some((k, last)) = *range {
                    *range = if k < last { Some((k + 1, last)) } else { None };
                }
            };
            if Some(pick) == r_next {
                advance(&mut self.r);
            } else {
                advance(&mut self.s);
            }
            let t = channel_point(pick);
            if t <= self.u_lo || t >= self.u_hi {
                continue;
            }
            let x = t.scale(&self.len).add_rational(&self.lo);
            return Some((pick, Point::scalar(x)));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscontinuityWitness {
    pub k: CompactInterval,
    pub epsilon: Rational,
    pub points: WitnessPoints,
}

impl DiscontinuityWitness {
    /// Indices `n < bound` with `q_n` strictly inside `ball`, in increasing order.
    pub fn q_in_ball<'a>(&'a self, ball: &'a Ball, bound: u128) -> impl Iterator<Item = (u128, Point)> + 'a {
        self.points.indices_in(ball, bound)
    }

    pub fn q(&self, n: u128) -> Option<Point> {
        self.points.at(n)
    }
}
