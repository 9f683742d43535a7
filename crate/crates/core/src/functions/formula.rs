//! Closed-form real functions on the line with exact evaluation and exact
//! range bounds over open intervals.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;

use crate::scalar::{rat, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(Rational),
    Identity,
    /// `sign(x)` with `sign(0) = 0`.
    Sign,
    /// `1` on `[a, oo)`, `0` below.
    Step(Rational),
    /// `clamp(n x, -1, 1)`.
    Clamp(u64),
    /// `clamp(n (x - a) + 1, 0, 1)`, continuous approximants of `Step(a)`.
    Ramp { at: Rational, n: u64 },
    /// `1/q` at `p/q` in lowest terms, `0` at irrationals.
    Thomae,
    /// Disjoint hats of height `1/q` and half-width `1/(4n^2)` at every
    /// reduced `p/q` with `q <= n`; converges pointwise to `Thomae`.
    ThomaeHats(u64),
    /// Indicator of the rationals.
    Dirichlet,
    /// `x - x^3/6`.
    SinPoly,
}

fn clamp(x: Scalar, lo: &Scalar, hi: &Scalar) -> Scalar {
    if &x < lo {
        lo.clone()
    } else if &x > hi {
        hi.clone()
    } else {
        x
    }
}

fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The rational with least denominator in the open interval `(lo, hi)`
/// (`hi = None` means unbounded above).
pub fn simplest_rational(lo: &Scalar, hi: Option<&Scalar>) -> Rational {
    let n = Rational::from_integer(lo.floor());
    let next = &n + Rational::one();
    if hi.is_none_or(|h| h.cmp_rational(&next) == Ordering::Greater) {
        return next;
    }
    let hi = hi.expect("bounded here");
    let lo_frac = lo.add_rational(&-&n);
    let hi_frac = hi.add_rational(&-&n);
    let new_lo = hi_frac.recip().expect("hi > lo >= n");
    let new_hi = lo_frac.recip();
    let inner = simplest_rational(&new_lo, new_hi.as_ref());
    n + inner.recip()
}

impl Formula {
    pub fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            Formula::Const(c) => Scalar::from_rational(c.clone()),
            Formula::Identity => x.clone(),
            Formula::Sign => Scalar::from_int(match x.signum() {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            }),
            Formula::Step(a) => Scalar::from_int(if x.cmp_rational(a) == Ordering::Less { 0 } else { 1 }),
            Formula::Clamp(n) => clamp(x.scale(&int(*n)), &Scalar::from_int(-1), &Scalar::one()),
            Formula::Ramp { at, n } => clamp(
                x.add_rational(&-at).scale(&int(*n)).add_rational(&Rational::one()),
                &Scalar::zero(),
                &Scalar::one(),
            ),
            Formula::Thomae => match x.as_rational() {
                Some(r) => Scalar::from_rational(Ratio::new(BigInt::one(), r.denom().clone())),
                None => Scalar::zero(),
            },
            Formula::ThomaeHats(n) => self.hat_value(*n, x),
            Formula::Dirichlet => Scalar::from_int(if x.is_rational() { 1 } else { 0 }),
            Formula::SinPoly => x - (x * x * x).scale(&rat(1, 6)),
        }
    }

    fn hat_width(n: u64) -> Rational {
        Ratio::new(BigInt::one(), BigInt::from(4u32) * BigInt::from(n) * BigInt::from(n))
    }

    /// The peak `p/q` (q <= n) whose hat support contains `x`.
    fn hat_peak(n: u64, x: &Scalar) -> Option<Rational> {
        if n == 0 {
            return None;
        }
        let w = Self::hat_width(n);
        let peak = simplest_rational(&x.add_rational(&-&w), Some(&x.add_rational(&w)));
        (peak.denom() <= &BigInt::from(n)).then_some(peak)
    }

    fn hat_value(&self, n: u64, x: &Scalar) -> Scalar {
        match Self::hat_peak(n, x) {
            None => Scalar::zero(),
            Some(peak) => {
                let w = Self::hat_width(n);
                let height = Ratio::new(BigInt::one(), peak.denom().clone());
                let offset = x.add_rational(&-&peak).abs();
                // height * (1 - |x - peak| / w)
                (Scalar::one() - offset.scale(&w.recip())).scale(&height)
            }
        }
    }

    /// Exact bounds `[inf, sup]` of the function over the open interval `(lo, hi)`.
    pub fn range(&self, lo: &Scalar, hi: &Scalar) -> (Scalar, Scalar) {
        debug_assert!(lo < hi);
        match self {
            Formula::Const(c) => {
                let c = Scalar::from_rational(c.clone());
                (c.clone(), c)
            }
            Formula::Identity => (lo.clone(), hi.clone()),
            Formula::Sign => {
                let mut values = Vec::new();
                if lo.is_negative() {
                    values.push(-1);
                }
                if hi.is_positive() {
                    values.push(1);
                }
                if lo.is_negative() && hi.is_positive() {
                    values.push(0);
                }
                if values.is_empty() {
                    // (lo, hi) with lo >= 0 and hi <= 0 cannot be nonempty
                    values.push(0);
                }
                let min = *values.iter().min().expect("nonempty");
                let max = *values.iter().max().expect("nonempty");
                (Scalar::from_int(min), Scalar::from_int(max))
            }
            Formula::Step(a) => {
                let below = lo.cmp_rational(a) == Ordering::Less;
                let above = hi.cmp_rational(a) == Ordering::Greater;
                let min = if below { 0 } else { 1 };
                let max = if above { 1 } else { 0 };
                (Scalar::from_int(min), Scalar::from_int(max))
            }
            Formula::Clamp(_) | Formula::Ramp { .. } => (self.eval(lo), self.eval(hi)),
            Formula::Thomae => {
                let q = simplest_rational(lo, Some(hi));
                (Scalar::zero(), Scalar::from_rational(Ratio::new(BigInt::one(), q.denom().clone())))
            }
            Formula::ThomaeHats(n) => {
                let (f_lo, f_hi) = (self.eval(lo), self.eval(hi));
                let mut max = f_lo.clone().max(f_hi.clone());
                let q = simplest_rational(lo, Some(hi));
                if q.denom() <= &BigInt::from(*n) {
                    max = max.max(Scalar::from_rational(Ratio::new(BigInt::one(), q.denom().clone())));
                }
                let peak_lo = Self::hat_peak(*n, lo);
                let min = if peak_lo.is_some() && peak_lo == Self::hat_peak(*n, hi) {
                    f_lo.min(f_hi)
                } else {
                    Scalar::zero()
                };
                (min, max)
            }
            Formula::Dirichlet => (Scalar::zero(), Scalar::one()),
            Formula::SinPoly => {
                let mut candidates = vec![self.eval(lo), self.eval(hi)];
                for crit in [Scalar::sqrt2(), -Scalar::sqrt2()] {
                    if lo < &crit && &crit < hi {
                        candidates.push(self.eval(&crit));
                    }
                }
                let min = candidates.iter().min().expect("nonempty").clone();
                let max = candidates.iter().max().expect("nonempty").clone();
                (min, max)
            }
        }
    }

    /// True for formulas that are continuous on the whole line.
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            Formula::Const(_) | Formula::Identity | Formula::Clamp(_) | Formula::Ramp { .. } | Formula::ThomaeHats(_) | Formula::SinPoly
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn least_denominator_brute(lo: f64, hi: f64, max_q: i64) -> Option<i64> {
        (1..=max_q).find(|&q| {
            let p = (lo * q as f64).floor() + 1.0;
            p / (q as f64) < hi
        })
    }

    fn sc(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_rational(&sc(1, 4), Some(&sc(2, 5))), rat(1, 3));
        assert_eq!(simplest_rational(&sc(0, 1), Some(&sc(1, 1))), rat(1, 2));
        assert_eq!(simplest_rational(&sc(-3, 2), Some(&sc(-1, 2))), rat(-1, 1));
        assert_eq!(simplest_rational(&sc(3, 1), None), rat(4, 1));
        let s = Scalar::sqrt2();
        let near = simplest_rational(&s.add_rational(&rat(-1, 100)), Some(&s.add_rational(&rat(1, 100))));
        assert_eq!(near, rat(17, 12));
    }

    #[test]
    fn simplest_rational_matches_brute_force() {
        for a in 1..40i64 {
            for w in 1..15i64 {
                let lo = rat(a, 37);
                let hi = &lo + rat(w, 97);
                let got = simplest_rational(&Scalar::from_rational(lo.clone()), Some(&Scalar::from_rational(hi.clone())));
                let lo_f = a as f64 / 37.0;
                let hi_f = lo_f + w as f64 / 97.0;
                let q = least_denominator_brute(lo_f, hi_f, 500).unwrap();
                assert_eq!(got.denom(), &BigInt::from(q), "interval ({lo}, {hi})");
            }
        }
    }

    #[test]
    fn sign_and_clamp_values() {
        assert_eq!(Formula::Clamp(2).eval(&sc(1, 4)), sc(1, 2));
        assert_eq!(Formula::Sign.eval(&sc(0, 1)), sc(0, 1));
        assert_eq!(Formula::Sign.eval(&-Scalar::sqrt2()), sc(-1, 1));
        assert_eq!(Formula::Ramp { at: rat(0, 1), n: 3 }.eval(&sc(-1, 6)), sc(1, 2));
    }

    #[test]
    fn thomae_values() {
        assert_eq!(Formula::Thomae.eval(&sc(3, 6)), sc(1, 2));
        assert_eq!(Formula::Thomae.eval(&Scalar::sqrt2()), Scalar::zero());
        assert_eq!(Formula::Thomae.range(&sc(1, 4), &sc(2, 5)), (Scalar::zero(), sc(1, 3)));
    }

    #[test]
    fn thomae_hats_reach_the_peak_value() {
        let f = Formula::ThomaeHats(5);
        assert_eq!(f.eval(&sc(2, 5)), sc(1, 5));
        assert_eq!(f.eval(&sc(2, 7)), Scalar::zero());
        // half-width 1/100: a quarter of the way down the hat
        assert_eq!(f.eval(&sc(2, 5).add_rational(&rat(1, 400))), sc(3, 20));
        let (lo, hi) = f.range(&sc(39, 100), &sc(41, 100));
        assert_eq!(hi, sc(1, 5));
        assert_eq!(lo, Scalar::zero());
    }

    #[test]
    fn sin_poly_range_uses_critical_points() {
        let (lo, hi) = Formula::SinPoly.range(&sc(0, 1), &sc(2, 1));
        assert_eq!(lo, Scalar::zero());
        assert_eq!(hi, Scalar::sqrt2().scale(&rat(2, 3)));
    }
}
