//! Oscillation estimates from finite probing, the extraction of a countable
//! dense set carrying the oscillation, and the bounded search for a ball on
//! which the oscillation is uniformly large.
//!
//! Probing around `x` at resolution `m` uses every point of the absolute grid
//! `2^-(m+4) Z` strictly inside `B(x, 2^-m)`, the point `x` itself and, for
//! entries that ask for it, each grid point shifted by `sqrt(2) 2^-(m+6)`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::OscError;
use crate::functions::{CompactInterval, RealMap, RepresentedFunction};
use crate::metric::{Ball, Point};
use crate::scalar::{pow2_neg, rational_str, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OscEstimate {
    #[serde(with = "rational_str")]
    pub lower: Rational,
    #[serde(with = "rational_str")]
    pub upper: Rational,
    #[serde(rename = "m")]
    pub resolution: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformOscRegion {
    pub ball: Ball,
    pub n: u32,
}

impl UniformOscRegion {
    pub fn epsilon(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.n))
    }
}

/// Grid points `k 2^-pitch` strictly inside `(lo, hi)`, left to right.
pub fn grid_inside(lo: &Scalar, hi: &Scalar, pitch: u32) -> Vec<Scalar> {
    let scale = Rational::from_integer(BigInt::one() << pitch);
    let first: BigInt = lo.scale(&scale).floor() + 1;
    let last: BigInt = hi.scale(&scale).ceil() - 1;
    let step = pow2_neg(pitch);
    let mut out = Vec::new();
    let mut k = first;
    while k <= last {
        out.push(Scalar::from_rational(Rational::from_integer(k.clone()) * &step));
        k += 1;
    }
    out
}

/// Probe points of `B(x, 2^-m)` that lie in the domain of `f`: the centre,
/// then the grid, then any irrational partners.
pub fn probe_points(f: &RepresentedFunction, x: &Point, m: u32) -> Vec<Point> {
    let r = pow2_neg(m);
    let c = x.x();
    let (lo, hi) = (c.add_rational(&-&r), c.add_rational(&r));
    let grid = grid_inside(&lo, &hi, m + 4);
    let mut pts: Vec<Scalar> = Vec::with_capacity(2 * grid.len() + 2);
    pts.push(c.clone());
    pts.extend(grid.iter().filter(|g| *g != c).cloned());
    if f.wants_irrational_probes() {
        let shift = Scalar::sqrt2().scale(&pow2_neg(m + 6));
        for g in &grid {
            let s = g + &shift;
            if s < hi {
                pts.push(s);
            }
        }
        // the centre's own channel partner, so rational centres see irrationals nearby
        pts.push(c + &shift);
    }
    pts.into_iter().map(Point::scalar).filter(|p| f.domain().contains(p)).collect()
}

fn spread(values: &[Scalar]) -> Scalar {
    match (values.iter().min(), values.iter().max()) {
        (Some(a), Some(b)) => b - a,
        _ => Scalar::zero(),
    }
}

/// Exact probed spread of `f` near `x`, counting only probes accepted by `keep`.
pub fn probed_spread(f: &RepresentedFunction, x: &Point, m: u32, keep: &dyn Fn(&Point) -> bool) -> Result<Scalar, OscError> {
    let mut values = Vec::new();
    for p in probe_points(f, x, m) {
        if keep(&p) {
            values.push(f.eval(&p)?.x().clone());
        }
    }
    Ok(spread(&values))
}

fn estimate(f: &RepresentedFunction, x: &Point, m: u32, keep: &dyn Fn(&Point) -> bool) -> Result<OscEstimate, OscError> {
    f.eval(x)?;
    let lower = probed_spread(f, x, m, keep)?;
    let ball = Ball::new(x.clone(), Scalar::from_rational(pow2_neg(m)))?;
    let upper = f.enclose(&ball)?.width();
    Ok(OscEstimate { lower: lower.lower_rational(), upper, resolution: m })
}

pub fn osc_estimate(f: &RepresentedFunction, x: &Point, m: u32) -> Result<OscEstimate, OscError> {
    estimate(f, x, m, &|_| true)
}

/// Oscillation of `f` restricted to `K`, probed only at points of `K`.
pub fn osc_estimate_on(f: &RepresentedFunction, k: &CompactInterval, x: &Point, m: u32) -> Result<OscEstimate, OscError> {
    estimate(f, x, m, &|p| k.contains(p))
}

/// Probed points of a region at resolution `m`: its centre followed by the
/// grid `2^-(m+1) Z` strictly inside it, restricted to the domain.
pub fn region_probes(f: &RepresentedFunction, region: &Ball, m: u32) -> Vec<Point> {
    let (lo, hi) = region.bounds();
    let mut out = vec![region.center().clone()];
    for g in grid_inside(&lo, &hi, m + 1) {
        let p = Point::scalar(g);
        if &p != region.center() {
            out.push(p);
        }
    }
    out.retain(|p| f.domain().contains(p));
    out
}

/// Builds `Q = union of Q_{n,m'}` over `n, m' <= m`: for every probed point
/// `x` of the region, `Q_{n,m'}` receives the probe of `B(x, 2^-m)` nearest
/// to `x` whose value lies within `2^-m'` of the dense value `y_n`.
/// Points are returned in construction order without repeats.
pub fn extract_dense_q(f: &RepresentedFunction, region: &Ball, epsilon: &Rational, m: u32) -> Result<Vec<Point>, OscError> {
    let probed = region_probes(f, region, m);
    for x in &probed {
        let spread = probed_spread(f, x, m, &|_| true)?;
        if spread.cmp_rational(epsilon).is_lt() {
            return Err(OscError::Precondition {
                point: x.to_string(),
                lower: spread.to_string(),
                epsilon: crate::scalar::format_rational(epsilon),
            });
        }
    }
    let ys: Vec<Scalar> = (0..=m as u128).map(|n| f.dense_range().at(n).x().clone()).collect();
    let mut q: Vec<Point> = Vec::new();
    for x in &probed {
        let mut probes: Vec<(Scalar, Point, Scalar)> = Vec::new();
        for p in probe_points(f, x, m) {
            let v = f.eval(&p)?.x().clone();
            probes.push(((p.x() - x.x()).abs(), p, v));
        }
        // nearest to x first, left before right on ties
        probes.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.x().cmp(b.1.x())));
        for y in &ys {
            for m_prime in 0..=m {
                let tol = pow2_neg(m_prime);
                if let Some((_, p, _)) = probes.iter().find(|(_, _, v)| (v - y).abs().cmp_rational(&tol).is_lt()) {
                    if !q.contains(p) {
                        q.push(p.clone());
                    }
                }
            }
        }
    }
    Ok(q)
}

/// Smallest, over the region's probed points `x`, of the largest value gap
/// between two points of `q` inside `B(x, 2^-m)`.
pub fn extraction_gap(f: &RepresentedFunction, region: &Ball, q: &[Point], m: u32) -> Result<Scalar, OscError> {
    let r = Scalar::from_rational(pow2_neg(m));
    let mut worst: Option<Scalar> = None;
    for x in region_probes(f, region, m) {
        let mut values = Vec::new();
        for p in q {
            if p.strictly_within(&x, &r)? {
                values.push(f.eval(p)?.x().clone());
            }
        }
        let gap = spread(&values);
        worst = Some(match worst {
            Some(w) => w.min(gap),
            None => gap,
        });
    }
    Ok(worst.unwrap_or_else(Scalar::zero))
}

/// Probe resolution used by [`find_uniform_osc_region`] for a given budget.
pub fn search_resolution(budget: u32) -> u32 {
    let log = 32 - budget.max(1).saturating_sub(1).leading_zeros();
    2 * log + 4
}

/// Candidate balls in scan order: level `l` splits `K` into `2^l` equal open
/// pieces, coarse levels first, left to right; at most `count` of them.
pub fn candidate_balls(k: &CompactInterval, count: usize) -> Vec<Ball> {
    let mut out = Vec::with_capacity(count);
    let diam = k.diameter();
    let mut level = 0u32;
    while out.len() < count {
        let radius = &diam * pow2_neg(level + 1);
        let pieces = 1u64 << level.min(62);
        for i in 0..pieces {
            if out.len() == count {
                break;
            }
            let c = &k.lo + &radius * Rational::from_integer(BigInt::from(2 * i + 1));
            out.push(Ball::interval(c, radius.clone()).expect("positive diameter"));
        }
        level += 1;
    }
    out
}

/// Searches `n = 1, 2, ..., budget` and, for each, the first `budget^2`
/// candidate balls for one whose probed `K`-points all have `K`-restricted
/// oscillation at least `1/n`. Returns the first hit.
pub fn find_uniform_osc_region(f: &RepresentedFunction, k: &CompactInterval, budget: u32) -> Result<UniformOscRegion, OscError> {
    let m = search_resolution(budget);
    let candidates = candidate_balls(k, (budget as usize).saturating_mul(budget as usize));
    let scans: Vec<Vec<Point>> = candidates
        .iter()
        .map(|u| {
            let (lo, hi) = u.bounds();
            grid_inside(&lo, &hi, m).into_iter().map(Point::scalar).filter(|p| k.contains(p) && f.domain().contains(p)).collect()
        })
        .collect();
    for n in 1..=budget {
        let threshold = Rational::new(BigInt::one(), BigInt::from(n));
        for (u, points) in candidates.iter().zip(&scans) {
            if points.is_empty() {
                continue;
            }
            let mut uniform = true;
            for x in points {
                if probed_spread(f, x, m, &|p| k.contains(p))?.cmp_rational(&threshold).is_lt() {
                    uniform = false;
                    break;
                }
            }
            if uniform {
                return Ok(UniformOscRegion { ball: u.clone(), n });
            }
        }
    }
    Err(OscError::NotFound(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::scalar::rat;

    #[test]
    fn sign_jump_at_origin() {
        let f = catalog_get("sign").unwrap();
        for m in [0, 3, 7, 12] {
            let e = osc_estimate(&f, &Point::ratio(0, 1), m).unwrap();
            assert_eq!((e.lower, e.upper), (rat(2, 1), rat(2, 1)), "m = {m}");
        }
    }

    #[test]
    fn sign_locally_constant() {
        let f = catalog_get("sign").unwrap();
        let e = osc_estimate(&f, &Point::ratio(1, 2), 4).unwrap();
        assert_eq!((e.lower, e.upper), (rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn dirichlet_sees_both_values() {
        let f = catalog_get("dirichlet").unwrap();
        for x in [Point::ratio(0, 1), Point::ratio(1, 3), Point::ratio(1, 1), Point::scalar(Scalar::new(rat(0, 1), rat(1, 2)))] {
            assert_eq!(osc_estimate(&f, &x, 4).unwrap().lower, rat(1, 1));
        }
    }

    #[test]
    fn outside_domain() {
        let f = catalog_get("sin_poly").unwrap();
        assert!(osc_estimate(&f, &Point::ratio(2, 1), 3).is_err());
    }

    #[test]
    fn sign_grid_with_large_oscillation() {
        // on the grid of pitch 2^-8 the points with lower >= 1 are those whose
        // probing ball reaches the origin, a grid interval around 0
        let f = catalog_get("sign").unwrap();
        let hits = |m: u32| -> Vec<i64> {
            (-40..=40).filter(|&k| osc_estimate(&f, &Point::ratio(k, 256), m).unwrap().lower >= rat(1, 1)).collect()
        };
        assert_eq!(hits(8), vec![0]);
        assert_eq!(hits(7), vec![-1, 0, 1]);
        assert_eq!(hits(6), vec![-3, -2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn dirichlet_extraction_fills_every_cell() {
        let f = catalog_get("dirichlet").unwrap();
        let region = Ball::interval(rat(1, 2), rat(1, 2)).unwrap();
        let q = extract_dense_q(&f, &region, &rat(1, 1), 4).unwrap();
        // exhaustive cell oracle
        for cell in 0..16 {
            let (lo, hi) = (rat(cell, 16), rat(cell + 1, 16));
            let inside: Vec<&Point> =
                q.iter().filter(|p| p.x().cmp_rational(&lo).is_gt() && p.x().cmp_rational(&hi).is_lt()).collect();
            assert!(inside.iter().any(|p| p.x().is_rational()), "cell {cell} lacks a value-1 point");
            assert!(inside.iter().any(|p| !p.x().is_rational()), "cell {cell} lacks a value-0 point");
        }
        let gap = extraction_gap(&f, &region, &q, 4).unwrap();
        assert!(gap.cmp_rational(&(rat(1, 1) - rat(5, 16))).is_ge());
    }

    #[test]
    fn const_extraction_fails() {
        let f = catalog_get("const:0").unwrap();
        let region = Ball::interval(rat(1, 2), rat(1, 2)).unwrap();
        assert!(matches!(extract_dense_q(&f, &region, &rat(1, 1), 4), Err(OscError::Precondition { .. })));
    }

    #[test]
    fn sign_extraction_near_the_jump() {
        let f = catalog_get("sign").unwrap();
        // probed points +-2^-6 of the wider region see no jump within 2^-6
        let wide = Ball::interval(rat(0, 1), rat(1, 16)).unwrap();
        assert!(matches!(extract_dense_q(&f, &wide, &rat(2, 1), 6), Err(OscError::Precondition { .. })));

        let narrow = Ball::interval(rat(0, 1), rat(1, 64)).unwrap();
        let q = extract_dense_q(&f, &narrow, &rat(2, 1), 6).unwrap();
        assert!(q.iter().any(|p| p.x().is_negative()));
        assert!(q.iter().any(|p| p.x().is_positive()));
        let gap = extraction_gap(&f, &narrow, &q, 6).unwrap();
        assert_eq!(gap, Scalar::from_int(2));
        assert!(gap.cmp_rational(&(rat(2, 1) - rat(5, 64))).is_ge());
    }

    #[test]
    fn uniform_region_for_dirichlet() {
        let f = catalog_get("dirichlet").unwrap();
        let k = CompactInterval { lo: rat(0, 1), hi: rat(1, 1) };
        let u = find_uniform_osc_region(&f, &k, 4).unwrap();
        assert_eq!(u.ball, Ball::interval(rat(1, 2), rat(1, 2)).unwrap());
        assert_eq!(u.n, 1);
    }

    #[test]
    fn no_uniform_region_for_continuous_or_sign() {
        let k01 = CompactInterval { lo: rat(0, 1), hi: rat(1, 1) };
        let f = catalog_get("const:0").unwrap();
        assert_eq!(find_uniform_osc_region(&f, &k01, 4), Err(OscError::NotFound(4)));
        let g = catalog_get("sign").unwrap();
        let k = CompactInterval { lo: rat(-1, 1), hi: rat(1, 1) };
        assert_eq!(find_uniform_osc_region(&g, &k, 4), Err(OscError::NotFound(4)));
    }

    #[test]
    fn candidate_order() {
        let k = CompactInterval { lo: rat(0, 1), hi: rat(1, 1) };
        let c = candidate_balls(&k, 4);
        let want = [(rat(1, 2), rat(1, 2)), (rat(1, 4), rat(1, 4)), (rat(3, 4), rat(1, 4)), (rat(1, 8), rat(1, 8))];
        for (ball, (c, r)) in c.iter().zip(want) {
            assert_eq!(ball, &Ball::interval(c, r).unwrap());
        }
    }
}
