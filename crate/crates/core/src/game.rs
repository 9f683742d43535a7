//! The game `G(f)`: Player I plays nested open balls, Player II answers with
//! values from the range of `f`. A finite-horizon referee turns a transcript
//! into a verdict.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, StrategyError};
use crate::functions::{RealMap, RepresentedFunction};
use crate::metric::{ball_subset, check_convergence, Ball, Convergence, NestedSequence, Point};
use crate::scalar::{pow2_neg, rat, rational_str, Rational, Scalar};

pub const TRANSCRIPT_SCHEMA: &str = "baire-transcript/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

/// Bookkeeping a strategy attaches to its move; ignored by the rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum Note {
    /// `n` is the strategy's current index; `fired` says whether the
    /// enclosure test succeeded this round.
    SigmaStar { n: u64, fired: bool },
    /// `condition` is 1 when the reply was close to the centre's value and a
    /// new centre was chosen, 2 when the ball was halved in place.
    Tau {
        condition: u8,
        #[serde(with = "u128_str")]
        center: u128,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        intersect_k: bool,
    },
}

mod u128_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveI {
    pub ball: Ball,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<Note>,
}

impl MoveI {
    pub fn new(ball: Ball) -> Self {
        MoveI { ball, note: None }
    }
}

/// Why a value belongs to the range of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// The value is term `n` of the entry's dense range enumeration.
    DenseIndex(#[serde(with = "u128_str")] u128),
    /// The value is `f` evaluated at this point of the domain.
    EvalAt(Point),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveII {
    pub value: Point,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<Note>,
}

impl MoveII {
    pub fn dense(f: &RepresentedFunction, index: u128) -> Self {
        MoveII { value: f.dense_range().at(index), provenance: Provenance::DenseIndex(index), note: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    I(MoveI),
    II(MoveII),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    I,
    II,
    #[serde(rename = "undecided")]
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NonconvergentEvidence,
    ValueConvergence,
    ValueDivergence,
    RuleViolation { player: Player, round: usize },
    HorizonExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub winner: Winner,
    pub reason: Reason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    fn new(winner: Winner, reason: Reason) -> Self {
        Verdict { winner, reason, detail: None }
    }

    pub fn violation(player: Player, round: usize, detail: impl Into<String>) -> Self {
        let winner = match player {
            Player::I => Winner::II,
            Player::II => Winner::I,
        };
        Verdict { winner, reason: Reason::RuleViolation { player, round }, detail: Some(detail.into()) }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self.reason, Reason::RuleViolation { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefereeConfig {
    pub horizon: usize,
    #[serde(with = "rational_str")]
    pub shrink_tol: Rational,
    #[serde(with = "rational_str")]
    pub value_tol: Rational,
    #[serde(with = "rational_str")]
    pub tail_fraction: Rational,
}

impl Default for RefereeConfig {
    fn default() -> Self {
        RefereeConfig { horizon: 40, shrink_tol: pow2_neg(12), value_tol: rat(1, 8), tail_fraction: rat(1, 4) }
    }
}

impl RefereeConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.horizon < 4 {
            return Err(GameError::Config(format!("horizon {} is below 4", self.horizon)));
        }
        if self.shrink_tol <= rat(0, 1) || self.value_tol <= rat(0, 1) {
            return Err(GameError::Config("tolerances must be positive".into()));
        }
        if self.tail_fraction <= rat(0, 1) || self.tail_fraction >= rat(1, 1) {
            return Err(GameError::Config("tail fraction must lie strictly between 0 and 1".into()));
        }
        Ok(())
    }

    /// Number of trailing Player II values the referee inspects.
    pub fn tail_len(&self) -> usize {
        let t = &self.tail_fraction * Rational::from_integer(BigInt::from(self.horizon));
        let (q, r) = t.numer().div_rem(t.denom());
        let ceil = if r == BigInt::from(0) { q } else { q + 1 };
        ceil.try_into().unwrap_or(self.horizon).clamp(1, self.horizon)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub f_name: String,
    pub moves: Vec<Move>,
    pub verdict: Option<Verdict>,
}

fn meets_domain(f: &RepresentedFunction, ball: &Ball) -> bool {
    if ball.dim() != 1 {
        return false;
    }
    let (a, b) = ball.bounds();
    f.domain().balls().iter().any(|d| {
        let (c, e) = d.bounds();
        a.clone().max(c) < b.clone().min(e)
    })
}

/// Checks the range certificate of a Player II value.
pub fn check_provenance(f: &RepresentedFunction, m: &MoveII) -> Result<(), String> {
    match &m.provenance {
        Provenance::DenseIndex(n) => {
            if f.dense_range().at(*n) == m.value {
                Ok(())
            } else {
                Err(format!("value {} is not dense term {n}", m.value))
            }
        }
        Provenance::EvalAt(p) => match f.eval(p) {
            Ok(v) if v == m.value => Ok(()),
            Ok(v) => Err(format!("f({p}) is {v}, not {}", m.value)),
            Err(e) => Err(e.to_string()),
        },
    }
}

impl Transcript {
    pub fn new(f_name: impl Into<String>) -> Self {
        Transcript { f_name: f_name.into(), moves: Vec::new(), verdict: None }
    }

    pub fn next_player(&self) -> Player {
        if self.moves.len().is_multiple_of(2) {
            Player::I
        } else {
            Player::II
        }
    }

    pub fn round(&self) -> usize {
        self.moves.len() / 2
    }

    pub fn balls(&self) -> Vec<Ball> {
        self.moves_i().map(|m| m.ball.clone()).collect()
    }

    pub fn moves_i(&self) -> impl Iterator<Item = &MoveI> {
        self.moves.iter().filter_map(|m| match m {
            Move::I(x) => Some(x),
            Move::II(_) => None,
        })
    }

    pub fn moves_ii(&self) -> impl Iterator<Item = &MoveII> {
        self.moves.iter().filter_map(|m| match m {
            Move::II(x) => Some(x),
            Move::I(_) => None,
        })
    }

    pub fn last_ball(&self) -> Option<&Ball> {
        self.moves_i().last().map(|m| &m.ball)
    }

    /// Appends a legal move. An illegal move is not appended; instead the
    /// transcript records a rule violation charged to the mover.
    pub fn apply(&mut self, f: &RepresentedFunction, m: Move) -> Result<(), GameError> {
        if self.verdict.is_some() {
            return Err(GameError::AlreadyDecided);
        }
        let round = self.round();
        match (&m, self.next_player()) {
            (Move::I(mi), Player::I) => {
                let legal = match self.last_ball() {
                    None => {
                        if meets_domain(f, &mi.ball) {
                            Ok(())
                        } else {
                            Err("U_0 must meet the domain".to_string())
                        }
                    }
                    Some(prev) => match ball_subset(&mi.ball, prev) {
                        Ok(true) => Ok(()),
                        Ok(false) => Err("U_{n+1} ⊆ U_n fails".to_string()),
                        Err(e) => Err(e.to_string()),
                    },
                };
                if let Err(why) = legal {
                    self.verdict = Some(Verdict::violation(Player::I, round, why));
                    return Ok(());
                }
            }
            (Move::II(mii), Player::II) => {
                if let Err(why) = check_provenance(f, mii) {
                    self.verdict = Some(Verdict::violation(Player::II, round, why));
                    return Ok(());
                }
            }
            (_, Player::I) => return Err(GameError::WrongTurn { expected: "I" }),
            (_, Player::II) => return Err(GameError::WrongTurn { expected: "II" }),
        }
        self.moves.push(m);
        Ok(())
    }

    /// Records a forfeit (a strategy failure) by `player` in the current round.
    pub fn forfeit(&mut self, player: Player, detail: impl Into<String>) {
        if self.verdict.is_none() {
            self.verdict = Some(Verdict::violation(player, self.round(), detail));
        }
    }

    /// JSON lines: a header, one record per move, then the verdict if any.
    pub fn to_json_lines(&self, cfg: Option<&RefereeConfig>) -> String {
        let mut out = String::new();
        let header = serde_json::json!({ "schema": TRANSCRIPT_SCHEMA, "function": self.f_name, "config": cfg });
        out.push_str(&header.to_string());
        out.push('\n');
        for (i, m) in self.moves.iter().enumerate() {
            let (player, body) = match m {
                Move::I(x) => ("I", serde_json::to_value(x)),
                Move::II(x) => ("II", serde_json::to_value(x)),
            };
            let rec = serde_json::json!({ "round": i / 2, "player": player, "move": body.expect("moves serialise") });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        if let Some(v) = &self.verdict {
            out.push_str(&serde_json::json!({ "verdict": v }).to_string());
            out.push('\n');
        }
        out
    }
}

fn within(a: &Point, b: &Point, r: &Rational) -> bool {
    a.within(b, &Scalar::from_rational(r.clone())).unwrap_or(false)
}

/// Finite-horizon verdict on the first `2 * horizon` moves.
pub fn adjudicate(f: &RepresentedFunction, t: &Transcript, cfg: &RefereeConfig) -> Result<Verdict, GameError> {
    cfg.validate()?;
    if let Some(v) = &t.verdict {
        if v.is_violation() {
            return Ok(v.clone());
        }
    }
    let need = 2 * cfg.horizon;
    if t.moves.len() < need {
        return Err(GameError::TooShort { have: t.moves.len(), need });
    }
    let balls: Vec<Ball> = t.moves[..need]
        .iter()
        .filter_map(|m| match m {
            Move::I(x) => Some(x.ball.clone()),
            Move::II(_) => None,
        })
        .collect();
    let values: Vec<Point> = t.moves[..need]
        .iter()
        .filter_map(|m| match m {
            Move::II(x) => Some(x.value.clone()),
            Move::I(_) => None,
        })
        .collect();
    let x = match check_convergence(&NestedSequence::new(balls), &cfg.shrink_tol)? {
        Convergence::NestingViolated(i) => {
            return Ok(Verdict::violation(Player::I, i, "U_{n+1} ⊆ U_n fails"));
        }
        Convergence::Stalled => return Ok(Verdict::new(Winner::II, Reason::NonconvergentEvidence)),
        Convergence::Converged { center, .. } => center,
    };
    let fx = match f.eval(&x) {
        Ok(v) => v,
        Err(_) => {
            let mut v = Verdict::new(Winner::Undecided, Reason::HorizonExhausted);
            v.detail = Some(format!("limit candidate {x} lies outside the domain"));
            return Ok(v);
        }
    };
    let tail = &values[values.len() - cfg.tail_len()..];
    if tail.iter().all(|y| within(y, &fx, &cfg.value_tol)) {
        return Ok(Verdict::new(Winner::II, Reason::ValueConvergence));
    }
    let spread = &cfg.value_tol * rat(2, 1);
    let far_pair = tail.iter().enumerate().any(|(i, a)| tail[i + 1..].iter().any(|b| !a.strictly_within(b, &Scalar::from_rational(spread.clone())).unwrap_or(true)));
    let all_far = tail.iter().all(|y| !y.strictly_within(&fx, &Scalar::from_rational(cfg.value_tol.clone())).unwrap_or(true));
    if far_pair || all_far {
        return Ok(Verdict::new(Winner::I, Reason::ValueDivergence));
    }
    Ok(Verdict::new(Winner::Undecided, Reason::HorizonExhausted))
}

/// A Player I strategy: sees Player II's latest value (none before round 0).
pub trait PlayerI {
    fn next_move(&mut self, last: Option<&MoveII>) -> Result<MoveI, StrategyError>;
}

/// A Player II strategy: answers Player I's latest ball.
pub trait PlayerII {
    fn reply(&mut self, ball: &Ball) -> Result<MoveII, StrategyError>;
    /// A copy carrying the same internal state, for replaying branches.
    fn box_clone(&self) -> Box<dyn PlayerII>;
}

impl Clone for Box<dyn PlayerII> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// Plays `horizon` rounds (or until a violation) and records the verdict.
pub fn run_match(
    f: &RepresentedFunction,
    player_i: &mut dyn PlayerI,
    player_ii: &mut dyn PlayerII,
    cfg: &RefereeConfig,
) -> Result<Transcript, GameError> {
    cfg.validate()?;
    let mut t = Transcript::new(f.name());
    let mut last: Option<MoveII> = None;
    for _ in 0..cfg.horizon {
        let mi = match player_i.next_move(last.as_ref()) {
            Ok(m) => m,
            Err(e) => {
                t.forfeit(Player::I, format!("strategy error: {e}"));
                return Ok(t);
            }
        };
        let ball = mi.ball.clone();
        t.apply(f, Move::I(mi))?;
        if t.verdict.is_some() {
            return Ok(t);
        }
        let mii = match player_ii.reply(&ball) {
            Ok(m) => m,
            Err(e) => {
                t.forfeit(Player::II, format!("strategy error: {e}"));
                return Ok(t);
            }
        };
        last = Some(mii.clone());
        t.apply(f, Move::II(mii))?;
        if t.verdict.is_some() {
            return Ok(t);
        }
    }
    t.verdict = Some(adjudicate(f, &t, cfg)?);
    Ok(t)
}
