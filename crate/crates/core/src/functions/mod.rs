//! The function catalog: exact evaluators, certified range enclosures over
//! balls, continuous approximant sequences, dense enumerations of the range
//! and discontinuity witnesses.

mod dense;
mod formula;
mod witness;

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

pub use dense::{dist_sq_to_box, dyadic_fraction, DenseSequence, Target};
pub use formula::{simplest_rational, Formula};
pub use witness::{CompactInterval, DiscontinuityWitness, WitnessPoints};

use crate::error::CatalogError;
use crate::metric::{Ball, Point, Region};
use crate::scalar::{format_rational, parse_rational, precision_bits, rat, rational_sqrt, sqrt_ceil, sqrt_floor, Rational, Scalar};

/// Per-coordinate closed intervals with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeEnclosure {
    bounds: Vec<(Rational, Rational)>,
}

impl RangeEnclosure {
    pub fn new(bounds: Vec<(Rational, Rational)>) -> Self {
        assert!(bounds.iter().all(|(lo, hi)| lo <= hi), "inverted enclosure");
        RangeEnclosure { bounds }
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Largest coordinate width.
    pub fn width(&self) -> Rational {
        self.bounds.iter().map(|(lo, hi)| hi - lo).max().unwrap_or_else(|| rat(0, 1))
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords().iter().zip(&self.bounds).all(|(x, (lo, hi))| x.cmp_rational(lo).is_ge() && x.cmp_rational(hi).is_le())
    }

    /// The enclosure as an exact box, for nearest-point queries.
    pub fn target(&self) -> Vec<(Scalar, Scalar)> {
        self.bounds.iter().map(|(lo, hi)| (Scalar::from_rational(lo.clone()), Scalar::from_rational(hi.clone()))).collect()
    }

    fn hull(&self, other: &RangeEnclosure) -> RangeEnclosure {
        let bounds = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|((a, b), (c, d))| (a.min(c).clone(), b.max(d).clone()))
            .collect();
        RangeEnclosure { bounds }
    }
}

impl Serialize for RangeEnclosure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.bounds.len()))?;
        for (lo, hi) in &self.bounds {
            seq.serialize_element(&[format_rational(lo), format_rational(hi)])?;
        }
        seq.end()
    }
}

impl fmt::Display for RangeEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.bounds.iter().map(|(lo, hi)| format!("[{}, {}]", format_rational(lo), format_rational(hi))).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Certified rational interval containing the distance from `y` to the box `e`.
/// Exact (a degenerate interval) whenever that distance is rational.
pub fn dist_to_enclosure(y: &Point, e: &RangeEnclosure) -> (Rational, Rational) {
    let d2 = dist_sq_to_box(y, &e.target());
    if let Some(r) = d2.as_rational() {
        if let Some(root) = rational_sqrt(r) {
            return (root.clone(), root);
        }
    }
    let bits = precision_bits().max(24);
    let (lo2, hi2) = d2.bounds(bits + 4);
    let lo2 = lo2.max(rat(0, 1));
    (sqrt_floor(&lo2, bits), sqrt_ceil(&hi2, bits))
}

/// Something with an exact evaluator and a certified enclosure on a domain.
pub trait RealMap {
    fn label(&self) -> &str;
    fn domain(&self) -> &Region;
    fn formula(&self) -> &Formula;

    fn eval(&self, x: &Point) -> Result<Point, CatalogError> {
        if x.dim() != 1 || !self.domain().contains(x) {
            return Err(CatalogError::OutsideDomain(self.label().to_string()));
        }
        Ok(Point::scalar(self.formula().eval(x.x())))
    }

    /// Sound enclosure of `f[B intersect domain]`.
    fn enclose(&self, ball: &Ball) -> Result<RangeEnclosure, CatalogError> {
        let (b_lo, b_hi) = ball.bounds();
        let mut out: Option<RangeEnclosure> = None;
        for component in self.domain().balls() {
            let (d_lo, d_hi) = component.bounds();
            let lo = b_lo.clone().max(d_lo);
            let hi = b_hi.clone().min(d_hi);
            if lo >= hi {
                continue;
            }
            let (min, max) = self.formula().range(&lo, &hi);
            let piece = RangeEnclosure { bounds: vec![(min.lower_rational(), max.upper_rational())] };
            out = Some(match out {
                None => piece,
                Some(prev) => prev.hull(&piece),
            });
        }
        out.ok_or_else(|| CatalogError::EmptyIntersection(self.label().to_string()))
    }
}

/// One continuous member `f_n` of an approximant sequence.
#[derive(Clone, Debug)]
pub struct Approximant {
    label: String,
    domain: Region,
    formula: Formula,
}

impl RealMap for Approximant {
    fn label(&self) -> &str {
        &self.label
    }
    fn domain(&self) -> &Region {
        &self.domain
    }
    fn formula(&self) -> &Formula {
        &self.formula
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproximantSequence {
    /// `f_n = f` for a continuous `f`.
    Constant,
    /// `f_n = clamp(n x, -1, 1)`.
    ClampSign,
    /// `f_n = clamp(n (x - a) + 1, 0, 1)`.
    Ramp(Rational),
    /// Hats at the fractions with denominator at most `n`.
    ThomaeHats,
}

#[derive(Clone, Debug)]
pub struct RepresentedFunction {
    name: String,
    domain: Region,
    formula: Formula,
    approximants: Option<ApproximantSequence>,
    dense_range: DenseSequence,
    witness: Option<DiscontinuityWitness>,
    baire1_claim: bool,
    irrational_probes: bool,
}

impl RealMap for RepresentedFunction {
    fn label(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> &Region {
        &self.domain
    }
    fn formula(&self) -> &Formula {
        &self.formula
    }
}

impl RepresentedFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn codomain_dim(&self) -> usize {
        1
    }

    pub fn dense_range(&self) -> &DenseSequence {
        &self.dense_range
    }

    pub fn witness(&self) -> Option<&DiscontinuityWitness> {
        self.witness.as_ref()
    }

    pub fn baire1_claim(&self) -> bool {
        self.baire1_claim
    }

    pub fn has_approximants(&self) -> bool {
        self.approximants.is_some()
    }

    pub fn approximant_kind(&self) -> Option<&ApproximantSequence> {
        self.approximants.as_ref()
    }

    /// Whether probing should include irrational points, for entries whose
    /// behaviour differs on rationals and irrationals.
    pub fn wants_irrational_probes(&self) -> bool {
        self.irrational_probes
    }

    /// `f_n`, or `None` when the entry carries no approximants.
    pub fn approximant(&self, n: u64) -> Option<Approximant> {
        let formula = match self.approximants.as_ref()? {
            ApproximantSequence::Constant => self.formula.clone(),
            ApproximantSequence::ClampSign => Formula::Clamp(n),
            ApproximantSequence::Ramp(a) => Formula::Ramp { at: a.clone(), n },
            ApproximantSequence::ThomaeHats => Formula::ThomaeHats(n),
        };
        Some(Approximant { label: format!("{}[f_{n}]", self.name), domain: self.domain.clone(), formula })
    }
}

pub const CATALOG_NAMES: &[&str] =
    &["const:c", "identity", "sign", "step:a", "clamp_approx_sign", "thomae", "dirichlet", "sin_poly"];

fn interval(lo: i64, hi: i64) -> Region {
    Region::ball(Ball::open_interval(Scalar::from_int(lo), Scalar::from_int(hi)).expect("nonempty"))
}

fn point(v: Rational) -> Point {
    Point::rational(v)
}

/// Looks up a catalog entry by name. Parameterised names take their argument
/// after a colon, e.g. `const:1/2` or `step:0`.
pub fn catalog_get(name: &str) -> Result<RepresentedFunction, CatalogError> {
    let unknown = || CatalogError::UnknownFunction(name.to_string());
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let std_domain = interval(-2, 2);
    let entry = |formula, approximants, dense_range, baire1_claim| RepresentedFunction {
        name: name.to_string(),
        domain: std_domain.clone(),
        formula,
        approximants,
        dense_range,
        witness: None,
        baire1_claim,
        irrational_probes: false,
    };
    let f = match (head, arg) {
        ("const", Some(c)) => {
            let c = parse_rational(c)?;
            entry(
                Formula::Const(c.clone()),
                Some(ApproximantSequence::Constant),
                DenseSequence::Eventually { prefix: vec![], period: vec![point(c)] },
                true,
            )
        }
        ("identity", None) => entry(
            Formula::Identity,
            Some(ApproximantSequence::Constant),
            DenseSequence::Dyadic { lo: rat(-2, 1), hi: rat(2, 1) },
            true,
        ),
        ("sign", None) => entry(
            Formula::Sign,
            Some(ApproximantSequence::ClampSign),
            DenseSequence::Eventually {
                prefix: vec![point(rat(0, 1))],
                period: vec![point(rat(1, 1)), point(rat(-1, 1))],
            },
            true,
        ),
        ("step", Some(a)) => {
            let a = parse_rational(a)?;
            let mut values = Vec::new();
            if a > rat(-2, 1) {
                values.push(point(rat(0, 1)));
            }
            if a < rat(2, 1) {
                values.push(point(rat(1, 1)));
            }
            entry(
                Formula::Step(a.clone()),
                Some(ApproximantSequence::Ramp(a)),
                DenseSequence::Eventually { prefix: vec![], period: values },
                true,
            )
        }
        ("clamp_approx_sign", n) => {
            let n: u64 = match n {
                None => 1,
                Some(t) => t.parse().ok().filter(|&n| n >= 1).ok_or_else(unknown)?,
            };
            entry(
                Formula::Clamp(n),
                Some(ApproximantSequence::Constant),
                DenseSequence::Dyadic { lo: rat(-1, 1), hi: rat(1, 1) },
                true,
            )
        }
        ("thomae", None) => {
            let mut f = entry(Formula::Thomae, Some(ApproximantSequence::ThomaeHats), DenseSequence::Reciprocals, true);
            f.irrational_probes = true;
            f
        }
        ("dirichlet", None) => {
            let mut f = entry(
                Formula::Dirichlet,
                None,
                DenseSequence::Eventually { prefix: vec![], period: vec![point(rat(1, 1)), point(rat(0, 1))] },
                false,
            );
            f.irrational_probes = true;
            f.witness = Some(DiscontinuityWitness {
                k: CompactInterval { lo: rat(0, 1), hi: rat(1, 1) },
                epsilon: rat(1, 1),
                points: WitnessPoints::TwoChannel { lo: rat(0, 1), hi: rat(1, 1) },
            });
            f
        }
        ("sin_poly", None) => RepresentedFunction {
            domain: interval(-1, 1),
            ..entry(
                Formula::SinPoly,
                Some(ApproximantSequence::Constant),
                DenseSequence::Dyadic { lo: rat(-5, 6), hi: rat(5, 6) },
                true,
            )
        },
        _ => return Err(unknown()),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(c: Rational, r: Rational) -> Ball {
        Ball::interval(c, r).unwrap()
    }

    #[test]
    fn const_enclosure_has_zero_width() {
        let f = catalog_get("const:0").unwrap();
        for (c, r) in [(rat(0, 1), rat(1, 1)), (rat(1, 3), rat(1, 1000)), (rat(-3, 2), rat(1, 2))] {
            assert_eq!(f.enclose(&ball(c, r)).unwrap().width(), rat(0, 1));
        }
    }

    #[test]
    fn dirichlet_values() {
        let f = catalog_get("dirichlet").unwrap();
        assert_eq!(f.eval(&Point::ratio(1, 3)).unwrap(), Point::ratio(1, 1));
        let r = Point::scalar(Scalar::new(rat(0, 1), rat(1, 2)));
        assert_eq!(f.eval(&r).unwrap(), Point::ratio(0, 1));
        assert!(!f.baire1_claim());
        let w = f.witness().unwrap();
        assert_eq!(w.epsilon, rat(1, 1));
        assert_eq!(w.k, CompactInterval { lo: rat(0, 1), hi: rat(1, 1) });
    }

    #[test]
    fn sign_approximant_value() {
        let f = catalog_get("sign").unwrap();
        assert!(f.baire1_claim());
        let f2 = f.approximant(2).unwrap();
        assert_eq!(f2.eval(&Point::ratio(1, 4)).unwrap(), Point::ratio(1, 2));
    }

    #[test]
    fn identity_enclosure() {
        let f = catalog_get("identity").unwrap();
        let e = f.enclose(&ball(rat(0, 1), rat(1, 1))).unwrap();
        assert_eq!(e.bounds(), &[(rat(-1, 1), rat(1, 1))]);
        assert_eq!(e.width(), rat(2, 1));
    }

    #[test]
    fn clamp_enclosure_by_endpoints() {
        let f2 = catalog_get("sign").unwrap().approximant(2).unwrap();
        let e = f2.enclose(&ball(rat(0, 1), rat(1, 4))).unwrap();
        // monotone endpoint oracle: clamp(2 * -1/4), clamp(2 * 1/4)
        assert_eq!(e.bounds(), &[(rat(-1, 2), rat(1, 2))]);
    }

    #[test]
    fn enclosure_outside_domain_fails() {
        let f = catalog_get("sin_poly").unwrap();
        let err = f.enclose(&ball(rat(5, 1), rat(1, 1))).unwrap_err();
        assert!(matches!(err, CatalogError::EmptyIntersection(_)));
        assert!(f.eval(&Point::ratio(3, 2)).is_err());
    }

    #[test]
    fn unknown_names() {
        for bad in ["cosine", "const", "const:x", "step", "clamp_approx_sign:0", "sign:3"] {
            assert!(catalog_get(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn dist_examples() {
        let e = RangeEnclosure::new(vec![(rat(1, 1), rat(2, 1))]);
        assert_eq!(dist_to_enclosure(&Point::ratio(0, 1), &e), (rat(1, 1), rat(1, 1)));
        assert_eq!(dist_to_enclosure(&Point::ratio(3, 2), &e), (rat(0, 1), rat(0, 1)));

        let e2 = RangeEnclosure::new(vec![(rat(1, 1), rat(2, 1)), (rat(1, 1), rat(2, 1))]);
        let y = Point::new(vec![Scalar::zero(), Scalar::zero()]);
        let (lo, hi) = dist_to_enclosure(&y, &e2);
        // oracle: sqrt(2) to 60 digits
        let sqrt2 = Rational::new(
            "141421356237309504880168872420969807856967187537694807317667".parse().unwrap(),
            num_bigint::BigInt::from(10).pow(59),
        );
        assert!(lo <= sqrt2 && sqrt2 <= hi);
        assert!(&hi - &lo <= crate::scalar::pow2_neg(20));
    }

    #[test]
    fn enclosure_json() {
        let e = RangeEnclosure::new(vec![(rat(-1, 2), rat(1, 2))]);
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"[["-1/2","1/2"]]"#);
    }

    #[test]
    fn dense_values_lie_in_range() {
        for name in ["const:1/2", "identity", "sign", "step:0", "clamp_approx_sign:3", "thomae", "dirichlet", "sin_poly"] {
            let f = catalog_get(name).unwrap();
            let (lo, hi) = f.domain().hull();
            for n in 0..40 {
                let y = f.dense_range().at(n);
                if f.formula() == &Formula::SinPoly {
                    // increasing on [-1, 1] with f(+-1) = +-5/6, so the open range is (-5/6, 5/6)
                    let v = y.x();
                    assert!(v.cmp_rational(&rat(-5, 6)).is_gt() && v.cmp_rational(&rat(5, 6)).is_lt());
                    continue;
                }
                // every value is attained: check with an explicit preimage
                let pre = preimage(&f, &y);
                assert!(f.domain().contains(&pre), "{name} q_{n} preimage {pre} outside ({lo}, {hi})");
                assert_eq!(f.eval(&pre).unwrap(), y, "{name} q_{n}");
            }
        }
    }

    fn preimage(f: &RepresentedFunction, y: &Point) -> Point {
        let v = y.x().as_rational().unwrap().clone();
        let r = |p: Rational| Point::rational(p);
        match f.formula() {
            Formula::Const(_) | Formula::Identity => r(v),
            Formula::Sign => r(v),
            Formula::Step(a) => {
                if v == rat(1, 1) {
                    r(a.clone().max(rat(-1, 1)))
                } else {
                    r(a - rat(1, 100))
                }
            }
            Formula::Clamp(n) => r(v / Rational::from_integer((*n).into())),
            Formula::Thomae => {
                if v == rat(0, 1) {
                    Point::scalar(Scalar::new(rat(0, 1), rat(1, 2)))
                } else {
                    r(v)
                }
            }
            Formula::Dirichlet => {
                if v == rat(1, 1) {
                    r(rat(1, 2))
                } else {
                    Point::scalar(Scalar::new(rat(0, 1), rat(1, 2)))
                }
            }
            _ => unreachable!(),
        }
    }
}
