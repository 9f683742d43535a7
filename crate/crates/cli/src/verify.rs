//! Invariant suites behind `baire verify`. Every check yields one JSON line.

use std::fmt::Display;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use baire_game::functions::{catalog_get, CompactInterval, DenseSequence, RealMap, RepresentedFunction};
use baire_game::game::{run_match, MoveII, Note, PlayerI, PlayerII, Reason, RefereeConfig, Transcript, Winner};
use baire_game::metric::{ball_subset, max_inscribed_radius, Ball, Point, Region};
use baire_game::oscillation::{extract_dense_q, extraction_gap, find_uniform_osc_region, grid_inside, osc_estimate};
use baire_game::scalar::{pow2_neg, rat, Rational, Scalar};
use baire_game::scheme::{bounded_diameter, build_scheme, tree_s_contains, DEFAULT_CELL_BUDGET};
use baire_game::strategies::phi::q_select_scan;
use baire_game::strategies::sigma_star::{DEFAULT_WINDOW, MAX_N};
use baire_game::strategies::tau::DEFAULT_SEARCH_BOUND;
use baire_game::strategies::{
    fsigma_certificate, phi_approx, q_select, ConstII, ConvergeTo, Copycat, RandomII, SigmaStar, Tau, TauPrime,
};

pub const REPORT_SCHEMA: &str = "baire-verify/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Scheme,
    Osc,
    Sigma,
    Tau,
    Fsigma,
    Phi,
    All,
}

impl Suite {
    const EACH: [Suite; 6] = [Suite::Scheme, Suite::Osc, Suite::Sigma, Suite::Tau, Suite::Fsigma, Suite::Phi];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Scheme => "scheme",
            Suite::Osc => "osc",
            Suite::Sigma => "sigma",
            Suite::Tau => "tau",
            Suite::Fsigma => "fsigma",
            Suite::Phi => "phi",
            Suite::All => "all",
        }
    }
}

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

pub struct CheckResult {
    pub suite: &'static str,
    pub check: &'static str,
    pub outcome: Check,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (pass, detail) = match &self.outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        serde_json::json!({
            "schema": REPORT_SCHEMA,
            "suite": self.suite,
            "check": self.check,
            "pass": pass,
            "detail": detail,
        })
    }
}

/// Runs a suite; `All` runs the others on separate threads and reports them
/// in a fixed order.
pub fn run(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::All => std::thread::scope(|scope| {
            let handles: Vec<_> = Suite::EACH.iter().map(|&s| scope.spawn(move || run(s))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect()
        }),
        one => {
            let checks: Vec<NamedCheck> = match one {
                Suite::Scheme => vec![
                    ("diameter_bound", scheme_diameters),
                    ("children_cover_parent", scheme_cover),
                    ("children_inside_parent", scheme_children_inside),
                    ("selection_tree_pruned", selection_tree),
                    ("ball_subset_order", subset_order),
                    ("inscribed_radius_supremum", inscribed_supremum),
                ],
                Suite::Osc => vec![
                    ("certified_sandwich", osc_sandwich),
                    ("upper_shrinks_on_continuous", osc_upper_monotone),
                    ("sign_large_oscillation_set", osc_sign_set),
                    ("extraction_gap", osc_extraction),
                    ("uniform_region", osc_uniform_region),
                ],
                Suite::Sigma => vec![("converge_to_grid", sigma_grid)],
                Suite::Tau => vec![("adversaries", tau_adversaries)],
                Suite::Fsigma => vec![("certificate_on_samples", fsigma_samples)],
                Suite::Phi => vec![("branches", phi_branches), ("q_select_argmin", q_select_argmin)],
                Suite::All => unreachable!("handled above"),
            };
            checks
                .into_iter()
                .map(|(check, f)| {
                    let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("check panicked".into()));
                    CheckResult { suite: one.name(), check, outcome }
                })
                .collect()
        }
    }
}

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entry(name: &str) -> Result<Arc<RepresentedFunction>, String> {
    catalog_get(name).map(Arc::new).map_err(err)
}

fn dist(a: &Point, b: &Point) -> Scalar {
    (a.x() - b.x()).abs()
}

// ---- scheme ----------------------------------------------------------------

const SCHEME_DEPTH: usize = 8;

fn unit_scheme() -> Result<baire_game::scheme::Scheme, String> {
    let space = Region::ball(Ball::interval(rat(1, 2), rat(1, 2)).map_err(err)?);
    build_scheme(&space, SCHEME_DEPTH, DEFAULT_CELL_BUDGET).map_err(err)
}

fn scheme_diameters() -> Check {
    let s = unit_scheme()?;
    for node in s.nodes() {
        let bound = Scalar::from_rational(pow2_neg(node.depth() as u32));
        ensure(bounded_diameter(node.cell()) <= bound, || format!("cell {:?} is too wide", node.address()))?;
    }
    Ok(format!("{} cells of (0,1) to depth {SCHEME_DEPTH} meet diam <= 2^-depth", s.len()))
}

fn scheme_cover() -> Check {
    let s = unit_scheme()?;
    let mut points = 0usize;
    for node in s.nodes().iter().filter(|n| !n.children().is_empty()) {
        let (lo, hi) = node.cell().hull();
        for g in grid_inside(&lo, &hi, 10) {
            let p = Point::scalar(g);
            if !node.cell().contains(&p) {
                continue;
            }
            let covered = node.children().iter().any(|&c| s.node(c).cell().contains(&p));
            ensure(covered, || format!("{p} in cell {:?} lies in no child", node.address()))?;
            points += 1;
        }
    }
    Ok(format!("{points} grid points of pitch 2^-10 each lie in a child of their cell"))
}

fn scheme_children_inside() -> Check {
    let s = unit_scheme()?;
    let mut pairs = 0usize;
    for node in s.nodes() {
        for &c in node.children() {
            for b in s.node(c).cell().balls() {
                let mut inside = false;
                for outer in node.cell().balls() {
                    inside |= ball_subset(b, outer).map_err(err)?;
                }
                ensure(inside, || format!("child {:?} leaves its parent", s.node(c).address()))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} child balls lie inside their parent cells"))
}

fn selection_tree() -> Check {
    // walk every sequence whose entries go one past the bound, descending
    // only into members
    fn walk(s: &mut Vec<u64>, depth: usize, members: &mut usize) -> Result<(), String> {
        let member = tree_s_contains(s);
        let expected = s.iter().enumerate().all(|(n, &v)| v <= n as u64);
        ensure(member == expected, || format!("membership of {s:?} is {member}"))?;
        if !member {
            return Ok(());
        }
        *members += 1;
        ensure((0..s.len()).all(|k| tree_s_contains(&s[..k])), || format!("a prefix of {s:?} is missing"))?;
        let mut ext = s.clone();
        ext.push(0);
        ensure(tree_s_contains(&ext), || format!("{s:?} has no extension"))?;
        if s.len() < depth {
            for v in 0..=s.len() as u64 + 1 {
                s.push(v);
                walk(s, depth, members)?;
                s.pop();
            }
        }
        Ok(())
    }
    let mut members = 0;
    walk(&mut Vec::new(), SCHEME_DEPTH, &mut members)?;
    Ok(format!("{members} nodes of S to depth {SCHEME_DEPTH}: prefix closed and pruned"))
}

fn random_ball(rng: &mut ChaCha8Rng) -> Result<Ball, String> {
    let c = Scalar::new(rat(rng.gen_range(-64..64), 32), rat(rng.gen_range(-8..8), 32));
    let r = Scalar::new(rat(rng.gen_range(1..64), 16), rat(rng.gen_range(0..4), 64));
    Ball::new(Point::scalar(c), r).map_err(err)
}

fn random_sub_ball(rng: &mut ChaCha8Rng, b: &Ball) -> Result<Ball, String> {
    let c = Point::scalar(b.center().x() + &b.radius().scale(&rat(rng.gen_range(-90..90), 100)));
    let rho = max_inscribed_radius(&c, b).map_err(err)?;
    Ball::new(c, rho.scale(&rat(rng.gen_range(1..=100), 100))).map_err(err)
}

fn subset_order() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let a = random_ball(&mut rng)?;
        let b = random_sub_ball(&mut rng, &a)?;
        let c = random_sub_ball(&mut rng, &b)?;
        ensure(ball_subset(&a, &a).map_err(err)?, || format!("{a} is not inside itself"))?;
        ensure(ball_subset(&b, &a).map_err(err)? && ball_subset(&c, &b).map_err(err)?, || "inscribed ball escapes".into())?;
        ensure(ball_subset(&c, &a).map_err(err)?, || format!("{c} in {b} in {a} but not in {a}"))?;
    }
    Ok("300 random chains: reflexive and transitive".into())
}

fn inscribed_supremum() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let outer = random_ball(&mut rng)?;
        let c = Point::scalar(outer.center().x() + &outer.radius().scale(&rat(rng.gen_range(-99..100), 100)));
        let rho = max_inscribed_radius(&c, &outer).map_err(err)?;
        ensure(ball_subset(&Ball::new(c.clone(), rho.clone()).map_err(err)?, &outer).map_err(err)?, || {
            format!("B({c}, {rho}) is not inside {outer}")
        })?;
        for k in [1, 8, 30, 60] {
            let bigger = Ball::new(c.clone(), rho.add_rational(&pow2_neg(k))).map_err(err)?;
            ensure(!ball_subset(&bigger, &outer).map_err(err)?, || format!("{bigger} still fits in {outer}"))?;
        }
    }
    Ok("200 centres: the inscribed radius fits and every larger radius fails".into())
}

// ---- osc -------------------------------------------------------------------

const OSC_ENTRIES: &[&str] =
    &["const:1/2", "identity", "sign", "step:1/3", "clamp_approx_sign", "thomae", "dirichlet", "sin_poly"];

fn osc_sandwich() -> Check {
    let mut count = 0;
    for name in OSC_ENTRIES {
        let f = entry(name)?;
        for k in -15..=15 {
            let x = Point::ratio(k, 16);
            if f.eval(&x).is_err() {
                continue;
            }
            for m in 1..=8 {
                let e = osc_estimate(&f, &x, m).map_err(err)?;
                ensure(e.lower <= e.upper, || format!("{name} at {x}, m = {m}: {} > {}", e.lower, e.upper))?;
                count += 1;
            }
        }
    }
    Ok(format!("lower <= upper on {count} estimates"))
}

fn osc_upper_monotone() -> Check {
    for name in ["const:1/2", "identity", "sin_poly", "clamp_approx_sign"] {
        let f = entry(name)?;
        for k in -7..=7 {
            let x = Point::ratio(k, 8);
            let mut prev: Option<Rational> = None;
            for m in 1..=12 {
                let up = osc_estimate(&f, &x, m).map_err(err)?.upper;
                if let Some(p) = &prev {
                    ensure(&up <= p, || format!("{name} at {x}: upper grows at m = {m}"))?;
                }
                prev = Some(up);
            }
        }
    }
    Ok("upper estimates shrink with m on four continuous entries".into())
}

fn osc_sign_set() -> Check {
    let f = entry("sign")?;
    let mut hits = Vec::new();
    for k in -256..=256 {
        if osc_estimate(&f, &Point::ratio(k, 256), 8).map_err(err)?.lower >= rat(1, 1) {
            hits.push(k);
        }
    }
    let contiguous = hits.windows(2).all(|w| w[1] == w[0] + 1);
    ensure(contiguous && hits.contains(&0) && hits.iter().all(|k| k.abs() <= 1), || format!("hits {hits:?}"))?;
    Ok(format!("grid points with lower >= 1 at pitch 2^-8: {hits:?}"))
}

fn osc_extraction() -> Check {
    let f = entry("dirichlet")?;
    let mut runs = 0;
    for region in [Ball::interval(rat(1, 2), rat(1, 2)), Ball::interval(rat(1, 4), rat(1, 8))] {
        let region = region.map_err(err)?;
        for m in 3..=6 {
            let q = extract_dense_q(&f, &region, &rat(1, 1), m).map_err(err)?;
            let gap = extraction_gap(&f, &region, &q, m).map_err(err)?;
            let bound = rat(1, 1) - rat(5, 1) * pow2_neg(m);
            ensure(gap.cmp_rational(&bound).is_ge(), || format!("{region}, m = {m}: gap {gap}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} extractions on dirichlet meet the eps - 5 2^-m gap"))
}

fn osc_uniform_region() -> Check {
    let k = CompactInterval { lo: rat(0, 1), hi: rat(1, 1) };
    let u = find_uniform_osc_region(&*entry("dirichlet")?, &k, 4).map_err(err)?;
    for name in ["identity", "sign"] {
        ensure(find_uniform_osc_region(&*entry(name)?, &k, 4).is_err(), || format!("{name} has a uniform region"))?;
    }
    Ok(format!("dirichlet: {} with eps = 1/{}; none for identity or sign", u.ball, u.n))
}

// ---- sigma -----------------------------------------------------------------

fn grid21() -> Vec<Rational> {
    let mut g = vec![rat(0, 1)];
    for (n, d) in [(1, 2), (1, 4), (1, 8), (1, 16), (1, 32), (3, 4), (3, 8), (5, 8), (7, 8), (3, 16)] {
        g.push(rat(n, d));
        g.push(rat(-n, d));
    }
    g
}

fn sigma_notes(t: &Transcript) -> Vec<(u64, bool)> {
    t.moves_ii()
        .filter_map(|m| match m.note {
            Some(Note::SigmaStar { n, fired }) => Some((n, fired)),
            _ => None,
        })
        .collect()
}

fn sigma_grid() -> Check {
    const WINDOW: usize = 30;
    let cfg = RefereeConfig { horizon: 60, value_tol: pow2_neg(6), ..RefereeConfig::default() };
    let (mut matches, mut bounds) = (0, 0);
    for name in ["sign", "step:0"] {
        let f = entry(name)?;
        for x in grid21() {
            let label = format!("{name} at {x}");
            let target = Point::rational(x);
            let mut i = ConvergeTo::new(target.clone());
            let mut ii = SigmaStar::new(f.clone(), DEFAULT_WINDOW).map_err(err)?;
            let t = run_match(&f, &mut i, &mut ii, &cfg).map_err(err)?;
            let v = t.verdict.clone().ok_or_else(|| format!("{label}: no verdict"))?;
            ensure(v.winner == Winner::II && v.reason == Reason::ValueConvergence, || format!("{label}: {v:?}"))?;
            let notes = sigma_notes(&t);
            ensure(notes.windows(2).all(|w| w[0].0 <= w[1].0), || format!("{label}: n decreases"))?;
            // n rises in every window until it reaches the representable cap
            ensure(notes.windows(WINDOW).all(|w| w[0].0 < w[WINDOW - 1].0 || w[0].0 == MAX_N), || {
                format!("{label}: n stalls for {WINDOW} rounds")
            })?;
            // value bound at fired rounds whose ball holds the limit candidate
            let fx = f.eval(&target).map_err(err)?;
            let balls = t.balls();
            for (l, y) in t.moves_ii().enumerate() {
                let Some(Note::SigmaStar { n, fired: true }) = y.note else { continue };
                if !balls[l].contains(&target).map_err(err)? {
                    continue;
                }
                let fnx = f.approximant(n).ok_or("no approximants")?.eval(&target).map_err(err)?;
                let bound = dist(&fx, &fnx) + Scalar::from_rational(pow2_neg(n as u32) * rat(3, 1));
                ensure(dist(&y.value, &fnx) <= bound, || format!("{label} round {l}: value bound fails"))?;
                bounds += 1;
            }
            matches += 1;
        }
    }
    Ok(format!("sigma* wins {matches} matches; n nondecreasing, rising within every {WINDOW} rounds below {MAX_N}; {bounds} value bounds hold"))
}

// ---- tau -------------------------------------------------------------------

fn tau_adversaries() -> Check {
    let f = entry("dirichlet")?;
    let eps = f.witness().ok_or("dirichlet has no witness")?.epsilon.clone();
    let eighth = Scalar::from_rational(&eps / rat(8, 1));
    let twelfth = Scalar::from_rational(&eps / rat(12, 1));
    let cfg = RefereeConfig { horizon: 40, value_tol: rat(1, 8), ..RefereeConfig::default() };
    let mut adversaries: Vec<(String, Box<dyn PlayerII>)> = (0..100)
        .map(|s| (format!("random seed {s}"), Box::new(RandomII::new(f.clone(), s)) as Box<dyn PlayerII>))
        .collect();
    adversaries.push(("const:0".into(), Box::new(ConstII::new(f.clone(), &Point::ratio(0, 1)).map_err(err)?)));
    adversaries.push(("copycat".into(), Box::new(Copycat(f.clone()))));
    let (mut pairs, mut stalemates) = (0, 0);
    for (label, mut ii) in adversaries {
        let mut tau = Tau::new(f.clone(), DEFAULT_SEARCH_BOUND).map_err(err)?;
        let t = run_match(&f, &mut tau, ii.as_mut(), &cfg).map_err(err)?;
        let v = t.verdict.clone().ok_or_else(|| format!("{label}: no verdict"))?;
        ensure(v.winner == Winner::I, || format!("{label}: {v:?}"))?;
        let moves_i: Vec<_> = t.moves_i().cloned().collect();
        let ys: Vec<MoveII> = t.moves_ii().cloned().collect();
        for k in 1..moves_i.len() {
            let half = moves_i[k - 1].ball.radius().scale(&rat(1, 2));
            ensure(moves_i[k].ball.radius() <= &half, || format!("{label}: radius not halved at {k}"))?;
        }
        let mut cond1 = Vec::new();
        for (k, y) in ys.iter().enumerate() {
            let Some(next) = moves_i.get(k + 1) else { break };
            let fc = f.eval(moves_i[k].ball.center()).map_err(err)?;
            match next.note {
                Some(Note::Tau { condition: 1, .. }) => {
                    ensure(dist(&y.value, &fc) <= eighth, || format!("{label}: condition 1 at {k} is not close"))?;
                    cond1.push(y.value.clone());
                }
                _ => {
                    ensure(dist(&y.value, &fc) > eighth, || format!("{label}: halved at {k} although close"))?;
                    stalemates += 1;
                }
            }
        }
        for w in cond1.windows(2) {
            ensure(dist(&w[0], &w[1]) >= twelfth, || format!("{label}: condition-1 values {} and {}", w[0], w[1]))?;
            pairs += 1;
        }
    }
    Ok(format!("tau wins 102 matches; {pairs} condition-1 pairs >= eps/12 apart, {stalemates} halvings all > eps/8 away"))
}

// ---- fsigma ----------------------------------------------------------------

fn fsigma_samples() -> Check {
    const DEPTH: usize = 8;
    let f = entry("sign")?;
    let space = Region::ball(Ball::interval(rat(0, 1), rat(1, 1)).map_err(err)?);
    let scheme = build_scheme(&space, DEPTH, DEFAULT_CELL_BUDGET).map_err(err)?;
    let pieces: Vec<Region> = (0..8u32)
        .map(|n| Ball::interval(rat(1, 1), rat(1, 2) - pow2_neg(n + 2)).map(Region::ball))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let sigma = SigmaStar::new(f.clone(), DEFAULT_WINDOW).map_err(err)?;
    let cert = fsigma_certificate(&sigma, &scheme, &pieces, DEPTH).map_err(err)?;
    let v = Ball::interval(rat(1, 1), rat(1, 2)).map_err(err)?;
    let closure = |y: &Point| y.x().cmp_rational(&rat(1, 2)).is_ge() && y.x().cmp_rational(&rat(3, 2)).is_le();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let scale: i64 = 1 << 20;
    let cutoff = rat(1, 16);
    let (mut agreed, mut inside) = (0, 0);
    for _ in 0..2000 {
        let x = rat(rng.gen_range(-scale + 1..scale), scale);
        let p = Point::rational(x.clone());
        let fx = f.eval(&p).map_err(err)?;
        let member = cert.contains(&scheme, &p);
        if member {
            ensure(closure(&fx), || format!("{p} classified in with f = {fx}"))?;
            inside += 1;
        }
        if x >= cutoff || x <= -&cutoff {
            ensure(member == v.contains(&fx).map_err(err)?, || format!("certificate disagrees at {p}"))?;
            agreed += 1;
        }
    }
    Ok(format!("{} pieces; {inside} members map into the closure of V; {agreed} samples away from 0 agree", cert.pieces.len()))
}

// ---- phi -------------------------------------------------------------------

fn phi_branches() -> Check {
    let f = entry("dirichlet")?;
    let dense: &DenseSequence = f.dense_range();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let branch: Vec<u64> = (0..12u64).map(|n| rng.gen_range(0..=n)).collect();
        let mut tau = Tau::new(f.clone(), DEFAULT_SEARCH_BOUND).map_err(err)?;
        let phi = phi_approx(&mut tau, dense, &branch, 12).map_err(err)?;
        let rho0 = phi.balls[0].radius().clone();
        for (k, w) in phi.balls.windows(2).enumerate() {
            ensure(ball_subset(&w[1], &w[0]).map_err(err)? && w[1].radius() < w[0].radius(), || {
                format!("{branch:?}: step {} is not strictly nested", k + 1)
            })?;
            ensure(w[1].radius() <= &rho0.scale(&pow2_neg(k as u32 + 1)), || format!("{branch:?}: radius at {}", k + 1))?;
        }
        let mut prime = TauPrime::new(Tau::new(f.clone(), DEFAULT_SEARCH_BOUND).map_err(err)?, dense.clone());
        let mut ball = prime.next_move(None).map_err(err)?.ball;
        for &n in &branch {
            ball = prime.next_move(Some(&MoveII::dense(&f, u128::from(n)))).map_err(err)?.ball;
        }
        ensure(ball == phi.final_ball, || format!("{branch:?}: tau' replay differs"))?;
    }
    Ok("20 branches of depth 12: strictly nested, radii <= rho_0 2^-k, tau' replay agrees".into())
}

fn q_select_argmin() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fs: Vec<_> = ["sign", "identity", "thomae", "dirichlet"].iter().map(|n| entry(n)).collect::<Result<_, _>>()?;
    for case in 0..2000 {
        let f = &fs[case % fs.len()];
        let k = rng.gen_range(0..=64);
        let y = Point::scalar(Scalar::new(rat(rng.gen_range(-96..=96), 32), rat(rng.gen_range(-2..=2), 16)));
        let (got, want) = (q_select(&y, k, f.dense_range()), q_select_scan(&y, k, f.dense_range()));
        ensure(got == want, || format!("{} y = {y}, k = {k}: {got:?} vs {want:?}", f.name()))?;
    }
    Ok("2000 cases match the brute-force argmin".into())
}
