use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use baire_game::functions::{catalog_get, DenseSequence, RealMap};
use baire_game::game::{run_match, RefereeConfig, Transcript};
use baire_game::metric::{ball_subset, max_inscribed_radius, Ball, Point};
use baire_game::scalar::{pow2_neg, rat, Scalar};
use baire_game::scheme::tree_s_contains;
use baire_game::strategies::phi::q_select_scan;
use baire_game::strategies::{q_select, RandomII, RandomLegalI};

fn small_rat() -> impl Strategy<Value = (i64, i64)> {
    (-200i64..200, 1i64..60)
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (small_rat(), small_rat()).prop_map(|((a, b), (c, d))| Scalar::new(rat(a, b), rat(c, d)))
}

const SAMPLED: &[&str] = &[
    "const:0",
    "const:-3/2",
    "identity",
    "sign",
    "step:0",
    "step:1/3",
    "clamp_approx_sign",
    "clamp_approx_sign:5",
    "thomae",
    "dirichlet",
    "sin_poly",
];

proptest! {
    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if let Some(inv) = a.recip() {
            prop_assert_eq!(&a * &inv, Scalar::one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn order_is_translation_invariant_and_matches_floats(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.cmp(&b), (&a + &c).cmp(&(&b + &c)));
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 {
            prop_assert_eq!(a < b, x < y);
        }
    }

    #[test]
    fn floor_brackets_the_value(a in scalar()) {
        let f = Scalar::from_rational(baire_game::scalar::Rational::from_integer(a.floor()));
        prop_assert!(f <= a);
        prop_assert!(a < f.add_rational(&rat(1, 1)));
    }

    #[test]
    fn subset_is_reflexive_and_transitive(
        c in small_rat(), r in 1i64..40, s1 in -90i64..90, t1 in 1i64..100, s2 in -90i64..90, t2 in 1i64..100,
    ) {
        let outer = Ball::interval(rat(c.0, c.1), rat(r, 7)).unwrap();
        prop_assert!(ball_subset(&outer, &outer).unwrap());
        // two random steps inward, each inside the previous ball
        let step = |b: &Ball, s: i64, t: i64| {
            let center = Point::scalar(b.center().x() + &b.radius().scale(&rat(s, 100)));
            let rho = max_inscribed_radius(&center, b).unwrap();
            Ball::new(center, rho.scale(&rat(t, 100))).unwrap()
        };
        let mid = step(&outer, s1, t1);
        let inner = step(&mid, s2, t2);
        prop_assert!(ball_subset(&mid, &outer).unwrap());
        prop_assert!(ball_subset(&inner, &mid).unwrap());
        prop_assert!(ball_subset(&inner, &outer).unwrap());
    }

    #[test]
    fn selection_tree_is_prefix_closed(s in proptest::collection::vec(0u64..12, 0..12)) {
        if tree_s_contains(&s) {
            for k in 0..=s.len() {
                prop_assert!(tree_s_contains(&s[..k]));
            }
        }
        let fixed: Vec<u64> = s.iter().enumerate().map(|(n, &v)| v.min(n as u64)).collect();
        prop_assert!(tree_s_contains(&fixed));
    }

    #[test]
    fn q_select_is_the_least_nearest_index(
        y in scalar(), k in 0u64..80, which in 0usize..4,
    ) {
        let dense = match which {
            0 => DenseSequence::Dyadic { lo: rat(-2, 1), hi: rat(2, 1) },
            1 => DenseSequence::Reciprocals,
            2 => catalog_get("sign").unwrap().dense_range().clone(),
            _ => DenseSequence::Dyadic { lo: rat(-5, 6), hi: rat(5, 6) },
        };
        let y = Point::scalar(y.scale(&rat(1, 40)));
        prop_assert_eq!(q_select(&y, k, &dense), q_select_scan(&y, k, &dense));
    }

    #[test]
    fn dense_nearest_matches_scan_on_intervals(a in scalar(), w in 0i64..50, len in 1u128..300) {
        let lo = a.scale(&rat(1, 50));
        let hi = lo.add_rational(&rat(w, 200));
        let target = vec![(lo, hi)];
        for dense in [DenseSequence::Dyadic { lo: rat(-1, 1), hi: rat(1, 1) }, DenseSequence::Reciprocals] {
            prop_assert_eq!(dense.nearest_in_prefix(&target, len), dense.nearest_in_prefix_scan(&target, len));
        }
    }
}

/// Every evaluated point of a random ball lies in the certified enclosure.
#[test]
fn enclosures_contain_sampled_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in SAMPLED {
        let f = catalog_get(name).unwrap();
        let (lo, hi) = f.domain().hull();
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        let mut checked = 0;
        while checked < 1000 {
            let c = rat((rng.gen_range(lo..hi) * 4096.0) as i64, 4096);
            let r = pow2_neg(rng.gen_range(1..12));
            let ball = Ball::interval(c.clone(), r.clone()).unwrap();
            let Ok(enc) = f.enclose(&ball) else { continue };
            for _ in 0..10 {
                let t = rat(rng.gen_range(-999..1000), 1000);
                let mut x = Scalar::from_rational(&c + &r * &t);
                if rng.gen_bool(0.3) {
                    // an irrational point of the same ball
                    x = x.add_rational(&-(&r * rat(1, 10000))) + Scalar::sqrt2().scale(&(&r * rat(1, 20000)));
                }
                let p = Point::scalar(x);
                if let Ok(v) = f.eval(&p) {
                    assert!(enc.contains(&v), "{name}: f({p}) = {v} outside {enc}");
                    checked += 1;
                }
            }
        }
    }
}

/// Approximant enclosures are sound as well.
#[test]
fn approximant_enclosures_contain_sampled_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for name in SAMPLED {
        let f = catalog_get(name).unwrap();
        if !f.has_approximants() {
            continue;
        }
        for n in [1u64, 2, 3, 7, 20, 64] {
            let fn_ = f.approximant(n).unwrap();
            for _ in 0..40 {
                let c = rat(rng.gen_range(-900..900), 1000);
                let r = pow2_neg(rng.gen_range(1..10));
                let ball = Ball::interval(c.clone(), r.clone()).unwrap();
                let enc = fn_.enclose(&ball).unwrap();
                for _ in 0..5 {
                    let t = rat(rng.gen_range(-999..1000), 1000);
                    let p = Point::rational(&c + &r * &t);
                    let Ok(v) = fn_.eval(&p) else { continue };
                    assert!(enc.contains(&v), "{name} f_{n}: value at {p} outside {enc}");
                }
            }
        }
    }
}

#[test]
fn sign_approximants_converge_on_a_grid() {
    let f = catalog_get("sign").unwrap();
    let grid: Vec<Point> = (0..50).map(|i| Point::ratio(2 * i - 49, 50)).collect();
    for x in &grid {
        let fx = f.eval(x).unwrap();
        let last = f.approximant(1 << 12).unwrap().eval(x).unwrap();
        assert_eq!(last, fx, "f_4096({x})");
        // once n |x| >= 1 the approximant agrees with sign exactly
        let threshold = (1.0 / x.x().to_f64().abs()).ceil() as u64;
        for n in [threshold, threshold + 1, 2 * threshold, 1 << 12] {
            assert_eq!(f.approximant(n).unwrap().eval(x).unwrap(), fx, "f_{n}({x})");
        }
    }
}

#[test]
fn dirichlet_witness_oscillates_on_every_ball() {
    let f = catalog_get("dirichlet").unwrap();
    let w = f.witness().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 0..300u128 {
        assert!(w.k.contains(&w.q(n).unwrap()));
    }
    for _ in 0..200 {
        let c = rat(rng.gen_range(1..1000), 1000);
        let ball = Ball::interval(c, pow2_neg(rng.gen_range(1..40))).unwrap();
        let mut seen = [false, false];
        for (_, q) in w.q_in_ball(&ball, u128::MAX).take(64) {
            let v = f.eval(&q).unwrap();
            if v == Point::ratio(1, 1) {
                seen[1] = true;
            } else if v == Point::ratio(0, 1) {
                seen[0] = true;
            }
            if seen == [true, true] {
                break;
            }
        }
        assert_eq!(seen, [true, true], "ball {ball}");
    }
}

#[test]
fn random_play_on_a_constant_never_violates_rules() {
    let f = Arc::new(catalog_get("const:0").unwrap());
    let cfg = RefereeConfig::default();
    for seed in 0..100 {
        let mut i = RandomLegalI::new(f.clone(), seed);
        let mut ii = RandomII::new(f.clone(), seed);
        let t = run_match(&f, &mut i, &mut ii, &cfg).unwrap();
        let v = t.verdict.as_ref().unwrap();
        assert!(!v.is_violation(), "seed {seed}: {v:?}");
        let text = serde_json::to_string(&t).unwrap();
        let back: Transcript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}
