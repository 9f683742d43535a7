//! Enumerations of countable dense subsets of a function's range, with
//! closed-form "least index of a nearest point within a prefix" queries.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::metric::Point;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenseSequence {
    /// `prefix[0], prefix[1], ..., then period repeated forever`.
    Eventually { prefix: Vec<Point>, period: Vec<Point> },
    /// Interior dyadic points of `(lo, hi)` in level order: the midpoint, then
    /// the quarter points, then the eighths, and so on.
    Dyadic { lo: Rational, hi: Rational },
    /// `0, 1, 1/2, 1/3, ...`
    Reciprocals,
}

/// A closed box `[lo_i, hi_i]` in exact arithmetic; the target of nearest-point queries.
pub type Target = [(Scalar, Scalar)];

/// Squared distance from `p` to the box `target`.
pub fn dist_sq_to_box(p: &Point, target: &Target) -> Scalar {
    assert_eq!(p.dim(), target.len(), "dimension mismatch");
    let mut total = Scalar::zero();
    for (x, (lo, hi)) in p.coords().iter().zip(target) {
        let gap = if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            continue;
        };
        total = total + &gap * &gap;
    }
    total
}

/// A key ordered like the distance from `p` to `target`, cheaper than the
/// squared distance in dimension one.
fn dist_key(p: &Point, target: &Target) -> Scalar {
    if p.dim() == 1 && target.len() == 1 {
        let (x, (lo, hi)) = (p.x(), &target[0]);
        if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            Scalar::zero()
        }
    } else {
        dist_sq_to_box(p, target)
    }
}

/// Position of dyadic index `i` as a fraction of the interval: with
/// `i + 1 = 2^j + k`, `0 <= k < 2^j`, the point is `(2k + 1) / 2^(j+1)`.
pub fn dyadic_fraction(i: u128) -> Rational {
    let m = i + 1;
    let j = 127 - m.leading_zeros();
    let k = m - (1u128 << j);
    Rational::new(BigInt::from(2 * k + 1), BigInt::one() << (j + 1))
}

impl DenseSequence {
    pub fn dim(&self) -> usize {
        match self {
            DenseSequence::Eventually { prefix, period } => {
                prefix.first().or(period.first()).map_or(1, Point::dim)
            }
            _ => 1,
        }
    }

    pub fn at(&self, n: u128) -> Point {
        match self {
            DenseSequence::Eventually { prefix, period } => {
                let p = prefix.len() as u128;
                if n < p {
                    prefix[n as usize].clone()
                } else {
                    period[((n - p) % period.len() as u128) as usize].clone()
                }
            }
            DenseSequence::Dyadic { lo, hi } => {
                let t = dyadic_fraction(n);
                Point::rational(lo + (hi - lo) * t)
            }
            DenseSequence::Reciprocals => {
                if n == 0 {
                    Point::ratio(0, 1)
                } else {
                    Point::rational(Rational::new(BigInt::one(), BigInt::from(n)))
                }
            }
        }
    }

    /// Number of leading terms after which no new value appears, if finite.
    pub fn distinct_prefix(&self) -> Option<u128> {
        match self {
            DenseSequence::Eventually { prefix, period } => Some((prefix.len() + period.len()) as u128),
            _ => None,
        }
    }

    /// Least index `n < len` minimising the distance from `q_n` to `target`,
    /// by direct scan. `len` must be positive.
    pub fn nearest_in_prefix_scan(&self, target: &Target, len: u128) -> (u128, Point) {
        assert!(len > 0, "empty prefix");
        let mut best = (0, self.at(0));
        let mut best_d = dist_key(&best.1, target);
        for n in 1..len {
            let p = self.at(n);
            let d = dist_key(&p, target);
            if d < best_d {
                best_d = d;
                best = (n, p);
            }
        }
        best
    }

    /// Same answer as [`nearest_in_prefix_scan`](Self::nearest_in_prefix_scan),
    /// computed without visiting every index.
    pub fn nearest_in_prefix(&self, target: &Target, len: u128) -> (u128, Point) {
        assert!(len > 0, "empty prefix");
        match self {
            DenseSequence::Eventually { .. } => {
                let cap = self.distinct_prefix().expect("finite");
                self.nearest_in_prefix_scan(target, len.min(cap))
            }
            DenseSequence::Dyadic { lo, hi } => {
                let candidates = dyadic_candidates(lo, hi, &target[0], len);
                self.pick(candidates, target)
            }
            DenseSequence::Reciprocals => {
                let candidates = reciprocal_candidates(&target[0], len);
                self.pick(candidates, target)
            }
        }
    }

    fn pick(&self, mut candidates: Vec<u128>, target: &Target) -> (u128, Point) {
        candidates.sort_unstable();
        candidates.dedup();
        let mut best: Option<(u128, Point, Scalar)> = None;
        for n in candidates {
            let p = self.at(n);
            let d = dist_key(&p, target);
            if best.as_ref().is_none_or(|(_, _, bd)| d < *bd) {
                best = Some((n, p, d));
            }
        }
        let (n, p, _) = best.expect("at least index 0 is a candidate");
        (n, p)
    }

    /// First index whose value equals `y`, searching at most `bound` terms.
    pub fn index_of(&self, y: &Point, bound: u128) -> Option<u128> {
        let limit = self.distinct_prefix().map_or(bound, |c| c.min(bound));
        (0..limit).find(|&n| &self.at(n) == y)
    }
}

fn ceil_div2(x: &BigInt) -> BigInt {
    let (q, r): (BigInt, BigInt) = (x / 2, x % 2);
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}

/// For each level of the dyadic enumeration present in the prefix, the first
/// point at or right of the target's left end and its left neighbour. Every
/// nearest point of the prefix is among these.
fn dyadic_candidates(lo: &Rational, hi: &Rational, target: &(Scalar, Scalar), len: u128) -> Vec<u128> {
    let length = hi - lo;
    let inv = length.recip();
    let to_unit = |s: &Scalar| s.add_rational(&-lo).scale(&inv);
    let ta = to_unit(&target.0);
    let mut out = vec![0];
    let n = len;
    let mut j = 0u32;
    while (1u128 << j) <= n {
        let level = 1u128 << j;
        let kmax = (level - 1).min(n - level);
        let scale = Rational::from_integer(BigInt::one() << (j + 1));
        // least k with (2k+1)/2^(j+1) >= ta
        let first = ceil_div2(&(ta.scale(&scale).ceil() - 1));
        let first = first.max(BigInt::zero());
        let index = |k: u128| level + k - 1;
        match first.to_u128() {
            Some(k) if k <= kmax => {
                out.push(index(k));
                if k > 0 {
                    out.push(index(k - 1));
                }
            }
            _ => out.push(index(kmax)),
        }
        j += 1;
        if j >= 127 {
            break;
        }
    }
    out
}

fn reciprocal_candidates(target: &(Scalar, Scalar), len: u128) -> Vec<u128> {
    let mut out = vec![0];
    let (a, b) = target;
    if len == 1 || !b.is_positive() || !a.is_positive() {
        return out;
    }
    // 1/q lies in [a, b] iff q >= 1/b and q <= 1/a
    let q_min = b.recip().expect("positive").ceil().max(BigInt::one());
    match q_min.to_u128() {
        Some(q) if q < len => {
            out.push(q);
            if q > 1 {
                out.push(q - 1);
            }
        }
        _ => out.push(len - 1),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use std::cmp::Ordering;

    fn box1(a: Scalar, b: Scalar) -> Vec<(Scalar, Scalar)> {
        vec![(a, b)]
    }

    #[test]
    fn dyadic_order() {
        let d = DenseSequence::Dyadic { lo: rat(0, 1), hi: rat(1, 1) };
        let got: Vec<Point> = (0..7).map(|n| d.at(n)).collect();
        let want: Vec<Point> =
            [(1, 2), (1, 4), (3, 4), (1, 8), (3, 8), (5, 8), (7, 8)].iter().map(|&(n, d)| Point::ratio(n, d)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn eventually_periodic_sign_values() {
        let s = DenseSequence::Eventually {
            prefix: vec![Point::ratio(0, 1)],
            period: vec![Point::ratio(1, 1), Point::ratio(-1, 1)],
        };
        let got: Vec<Point> = (0..5).map(|n| s.at(n)).collect();
        assert_eq!(got, [0, 1, -1, 1, -1].iter().map(|&v| Point::ratio(v, 1)).collect::<Vec<_>>());
        assert_eq!(s.index_of(&Point::ratio(-1, 1), 100), Some(2));
    }

    #[test]
    fn nearest_matches_scan_on_dyadics() {
        let d = DenseSequence::Dyadic { lo: rat(-2, 1), hi: rat(2, 1) };
        for len in [1u128, 2, 3, 7, 8, 20, 64, 100] {
            for (a, b) in [(rat(1, 3), rat(1, 3)), (rat(-3, 2), rat(-1, 7)), (rat(5, 2), rat(3, 1)), (rat(-9, 4), rat(-9, 4))] {
                let t = box1(Scalar::from_rational(a.clone()), Scalar::from_rational(b.clone()));
                assert_eq!(d.nearest_in_prefix(&t, len), d.nearest_in_prefix_scan(&t, len), "len {len} target [{a}, {b}]");
            }
        }
    }

    #[test]
    fn nearest_matches_scan_on_reciprocals() {
        let d = DenseSequence::Reciprocals;
        for len in [1u128, 2, 5, 40] {
            for (a, b) in [(rat(1, 3), rat(1, 3)), (rat(2, 7), rat(3, 7)), (rat(-1, 2), rat(-1, 4)), (rat(3, 1), rat(4, 1)), (rat(1, 100), rat(1, 90))] {
                let t = box1(Scalar::from_rational(a), Scalar::from_rational(b));
                assert_eq!(d.nearest_in_prefix(&t, len), d.nearest_in_prefix_scan(&t, len));
            }
        }
    }

    #[test]
    fn dyadic_nearest_handles_huge_prefixes() {
        let d = DenseSequence::Dyadic { lo: rat(-1, 1), hi: rat(1, 1) };
        let t = box1(Scalar::sqrt2() - Scalar::one(), Scalar::sqrt2() - Scalar::one());
        let (n, p) = d.nearest_in_prefix(&t, u128::MAX);
        assert_eq!(p, d.at(n));
        let err = (p.x() - &(Scalar::sqrt2() - Scalar::one())).abs();
        assert!(err.cmp_rational(&crate::scalar::pow2_neg(120)) == Ordering::Less);
    }
}
