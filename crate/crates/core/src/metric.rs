//! Points, open balls and finite unions of balls with exact coordinates.
//!
//! Distances are Euclidean. They are never materialized as square roots:
//! every comparison goes through squared distances in Q(sqrt 2), so nesting
//! and convergence checks are decided exactly.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeometryError, ParseError};
use crate::scalar::{self, format_rational, parse_rational, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<Scalar>,
}

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        assert!(!coords.is_empty(), "points have positive dimension");
        Point { coords }
    }

    pub fn scalar(x: Scalar) -> Self {
        Point { coords: vec![x] }
    }

    pub fn rational(x: Rational) -> Self {
        Point::scalar(Scalar::from_rational(x))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Point::scalar(Scalar::from_ratio(n, d))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// The single coordinate of a one-dimensional point.
    pub fn x(&self) -> &Scalar {
        &self.coords[0]
    }

    fn check_dim(&self, other: &Point) -> Result<(), GeometryError> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Squared Euclidean distance, exact.
    pub fn dist_sq(&self, other: &Point) -> Result<Scalar, GeometryError> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .fold(Scalar::zero(), |acc, t| acc + t))
    }

    /// Exact distance when it lies in Q(sqrt 2): always in dimension one,
    /// otherwise only when the squared distance is a rational square.
    pub fn dist_exact(&self, other: &Point) -> Result<Option<Scalar>, GeometryError> {
        self.check_dim(other)?;
        if self.dim() == 1 {
            return Ok(Some((self.x() - other.x()).abs()));
        }
        let sq = self.dist_sq(other)?;
        Ok(sq.as_rational().and_then(scalar::rational_sqrt).map(Scalar::from_rational))
    }

    /// Decides `d(self, other) <= r` exactly.
    pub fn within(&self, other: &Point, r: &Scalar) -> Result<bool, GeometryError> {
        if r.is_negative() {
            return Ok(false);
        }
        if self.dim() == 1 && other.dim() == 1 {
            return Ok((self.x() - other.x()).abs() <= *r);
        }
        Ok(self.dist_sq(other)? <= r * r)
    }

    /// Decides `d(self, other) < r` exactly.
    pub fn strictly_within(&self, other: &Point, r: &Scalar) -> Result<bool, GeometryError> {
        if !r.is_positive() {
            return Ok(false);
        }
        if self.dim() == 1 && other.dim() == 1 {
            return Ok((self.x() - other.x()).abs() < *r);
        }
        Ok(self.dist_sq(other)? < r * r)
    }

    /// Compares `d(self, a)` with `d(self, b)`.
    pub fn cmp_dist(&self, a: &Point, b: &Point) -> Result<Ordering, GeometryError> {
        if self.dim() == 1 && a.dim() == 1 && b.dim() == 1 {
            return Ok((self.x() - a.x()).abs().cmp(&(self.x() - b.x()).abs()));
        }
        Ok(self.dist_sq(a)?.cmp(&self.dist_sq(b)?))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Comma-separated coordinates, each in the scalar text form.
impl FromStr for Point {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split(',')
            .map(|c| c.parse::<Scalar>().map_err(|_| ParseError::Point(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.is_empty() {
            return Err(ParseError::Point(s.to_string()));
        }
        Ok(Point { coords })
    }
}

/// An open ball. Radii live in Q(sqrt 2) so that the largest ball inscribed
/// around an irrational centre is representable exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ball {
    center: Point,
    radius: Scalar,
}

impl Ball {
    pub fn new(center: Point, radius: Scalar) -> Result<Self, GeometryError> {
        if !radius.is_positive() {
            return Err(GeometryError::NonPositiveRadius);
        }
        Ok(Ball { center, radius })
    }

    /// One-dimensional ball with rational centre and radius.
    pub fn interval(center: Rational, radius: Rational) -> Result<Self, GeometryError> {
        Ball::new(Point::rational(center), Scalar::from_rational(radius))
    }

    /// The open interval `(lo, hi)` as a ball.
    pub fn open_interval(lo: Scalar, hi: Scalar) -> Result<Self, GeometryError> {
        let half = scalar::rat(1, 2);
        let center = (&lo + &hi).scale(&half);
        let radius = (&hi - &lo).scale(&half);
        Ball::new(Point::scalar(center), radius)
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> &Scalar {
        &self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: &Point) -> Result<bool, GeometryError> {
        p.strictly_within(&self.center, &self.radius)
    }

    /// Endpoints of a one-dimensional ball.
    pub fn bounds(&self) -> (Scalar, Scalar) {
        let c = self.center.x();
        (c - &self.radius, c + &self.radius)
    }

    pub fn with_radius(&self, radius: Scalar) -> Result<Ball, GeometryError> {
        Ball::new(self.center.clone(), radius)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}; {})", self.center, self.radius)
    }
}

/// `center;radius` in the point and scalar text forms.
impl FromStr for Ball {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Ball(s.to_string());
        let (c, r) = s.split_once(';').ok_or_else(bad)?;
        let center: Point = c.parse().map_err(|_| bad())?;
        let radius: Scalar = r.parse().map_err(|_| bad())?;
        Ball::new(center, radius).map_err(|_| bad())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RadiusRepr {
    Rational(String),
    Algebraic(Scalar),
}

#[derive(Serialize, Deserialize)]
struct BallRepr {
    center: Point,
    radius: RadiusRepr,
}

/// Rational radii are written as `"num/den"`; a radius with a sqrt 2 term is
/// written in the scalar object form.
impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let radius = match self.radius.as_rational() {
            Some(r) => RadiusRepr::Rational(format_rational(r)),
            None => RadiusRepr::Algebraic(self.radius.clone()),
        };
        BallRepr { center: self.center.clone(), radius }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ball {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BallRepr::deserialize(deserializer)?;
        let radius = match repr.radius {
            RadiusRepr::Rational(s) => Scalar::from_rational(parse_rational(&s).map_err(serde::de::Error::custom)?),
            RadiusRepr::Algebraic(s) => s,
        };
        Ball::new(repr.center, radius).map_err(serde::de::Error::custom)
    }
}

/// A finite union of open balls of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region {
    balls: Vec<Ball>,
}

impl Region {
    pub fn new(balls: Vec<Ball>) -> Result<Self, GeometryError> {
        let first = balls.first().ok_or(GeometryError::EmptyRegion)?;
        if let Some(b) = balls.iter().find(|b| b.dim() != first.dim()) {
            return Err(GeometryError::DimensionMismatch { left: first.dim(), right: b.dim() });
        }
        Ok(Region { balls })
    }

    pub fn ball(ball: Ball) -> Self {
        Region { balls: vec![ball] }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn dim(&self) -> usize {
        self.balls[0].dim()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.balls.iter().any(|b| b.contains(p).unwrap_or(false))
    }

    /// Convex hull `[lo, hi]` of a one-dimensional region.
    pub fn hull(&self) -> (Scalar, Scalar) {
        let mut iter = self.balls.iter().map(Ball::bounds);
        let (mut lo, mut hi) = iter.next().expect("regions are nonempty");
        for (a, b) in iter {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Smallest ball containing a one-dimensional region.
    pub fn hull_ball(&self) -> Ball {
        let (lo, hi) = self.hull();
        Ball::open_interval(lo, hi).expect("hull of open balls has positive length")
    }
}

/// Nesting test used for every move of Player I: `d(centres) + r_inner <= r_outer`.
/// Exact containment for intervals; a sufficient condition in higher dimension.
pub fn ball_subset(inner: &Ball, outer: &Ball) -> Result<bool, GeometryError> {
    let slack = outer.radius() - inner.radius();
    inner.center().within(outer.center(), &slack)
}

/// The greatest radius `rho` with `ball_subset(B(new_center, rho), outer)`.
///
/// Exact in dimension one. In higher dimension the distance may leave
/// Q(sqrt 2); the result is then a rational lower bound at the configured
/// precision.
pub fn max_inscribed_radius(new_center: &Point, outer: &Ball) -> Result<Scalar, GeometryError> {
    if !new_center.strictly_within(outer.center(), outer.radius())? {
        return Err(GeometryError::NoPositiveRadius);
    }
    let dist = match new_center.dist_exact(outer.center())? {
        Some(d) => d,
        None => {
            let sq = new_center.dist_sq(outer.center())?;
            Scalar::from_rational(scalar::sqrt_ceil(&sq.upper_rational(), scalar::precision_bits()))
        }
    };
    let rho = outer.radius() - dist;
    if !rho.is_positive() {
        return Err(GeometryError::NoPositiveRadius);
    }
    Ok(rho.min(outer.radius().clone()))
}

/// A ⊆-decreasing list of balls.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NestedSequence {
    balls: Vec<Ball>,
}

impl NestedSequence {
    pub fn new(balls: Vec<Ball>) -> Self {
        NestedSequence { balls }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn push(&mut self, ball: Ball) {
        self.balls.push(ball);
    }

    /// Index of the first ball not nested in its predecessor.
    pub fn first_violation(&self) -> Result<Option<usize>, GeometryError> {
        for (i, pair) in self.balls.windows(2).enumerate() {
            if !ball_subset(&pair[1], &pair[0])? {
                return Ok(Some(i + 1));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Convergence {
    /// Last radius is within tolerance; the last centre stands in for the limit.
    Converged { center: Point, radius: Scalar },
    Stalled,
    NestingViolated(usize),
}

/// Finite-horizon convergence check. `Stalled` is evidence of a non-convergent
/// play, not a proof of it.
pub fn check_convergence(seq: &NestedSequence, shrink_tol: &Rational) -> Result<Convergence, GeometryError> {
    let last = seq.balls().last().ok_or(GeometryError::EmptySequence)?;
    if let Some(i) = seq.first_violation()? {
        return Ok(Convergence::NestingViolated(i));
    }
    if last.radius().cmp_rational(shrink_tol) != Ordering::Greater {
        Ok(Convergence::Converged { center: last.center().clone(), radius: last.radius().clone() })
    } else {
        Ok(Convergence::Stalled)
    }
}
