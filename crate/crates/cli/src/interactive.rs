//! Line-based play against a strategy.
//!
//! As Player I the human types `center radius` each round; as Player II a
//! dense-range index. `quit` (or end of input) stops the game with an
//! undecided verdict. Malformed or illegal lines are rejected and the round
//! is asked again.

use std::io::{self, BufRead, Write};

use baire_game::functions::RepresentedFunction;
use baire_game::game::{adjudicate, Move, MoveI, MoveII, PlayerI, PlayerII, Reason, Transcript, Verdict, Winner};
use baire_game::metric::{Ball, Point};
use baire_game::scalar::Scalar;

use crate::config::MatchConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Role {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

pub enum Opponent {
    I(Box<dyn PlayerI>),
    II(Box<dyn PlayerII>),
}

fn parse_ball(line: &str) -> Result<Ball, String> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let [c, r] = parts[..] else {
        return Err(format!("expected `center radius`, got {} fields", parts.len()));
    };
    let center: Point = c.parse().map_err(|e| format!("{e}"))?;
    let radius: Scalar = r.parse().map_err(|e| format!("{e}"))?;
    Ball::new(center, radius).map_err(|e| e.to_string())
}

fn parse_index(line: &str) -> Result<u128, String> {
    line.trim().parse::<u128>().map_err(|e| format!("expected a dense-range index: {e}"))
}

enum Input {
    Line(String),
    Quit,
}

fn read<R: BufRead, W: Write>(input: &mut R, out: &mut W, prompt: &str) -> io::Result<Input> {
    write!(out, "{prompt}")?;
    out.flush()?;
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        writeln!(out)?;
        return Ok(Input::Quit);
    }
    let line = line.trim();
    Ok(if line == "quit" || line == "q" { Input::Quit } else { Input::Line(line.to_string()) })
}

/// Whether `m` would be accepted; the rejected rule otherwise.
fn check(f: &RepresentedFunction, t: &Transcript, m: &Move) -> Result<(), String> {
    let mut probe = t.clone();
    probe.apply(f, m.clone()).map_err(|e| e.to_string())?;
    match probe.verdict {
        Some(v) => Err(v.detail.unwrap_or_else(|| format!("{:?}", v.reason))),
        None => Ok(()),
    }
}

fn describe(v: &Verdict) -> String {
    let winner = match v.winner {
        Winner::I => "I",
        Winner::II => "II",
        Winner::Undecided => "undecided",
    };
    let reason = serde_json::to_value(&v.reason).expect("reason serialises");
    let reason = match reason {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    };
    match &v.detail {
        Some(d) => format!("verdict: {winner} ({reason}; {d})"),
        None => format!("verdict: {winner} ({reason})"),
    }
}

fn quit_verdict(round: usize) -> Verdict {
    Verdict { winner: Winner::Undecided, reason: Reason::HorizonExhausted, detail: Some(format!("quit in round {round}")) }
}

/// Plays one game; the human takes `role`, `opponent` the other side.
pub fn run<R: BufRead, W: Write>(
    input: &mut R,
    out: &mut W,
    cfg: &MatchConfig,
    mut opponent: Opponent,
) -> io::Result<Transcript> {
    let f = cfg.f.as_ref();
    let mut t = Transcript::new(f.name());
    let mut last_ii: Option<MoveII> = None;
    writeln!(out, "playing G({}) for {} rounds; type `quit` to stop", f.name(), cfg.referee.horizon)?;
    while t.round() < cfg.referee.horizon {
        let round = t.round();
        // Player I's move
        let mi = match &mut opponent {
            Opponent::II(_) => loop {
                let line = match read(input, out, &format!("[{round}] I> "))? {
                    Input::Quit => {
                        t.verdict = Some(quit_verdict(round));
                        writeln!(out, "{}", describe(t.verdict.as_ref().expect("set")))?;
                        return Ok(t);
                    }
                    Input::Line(l) => l,
                };
                let ball = match parse_ball(&line) {
                    Ok(b) => b,
                    Err(e) => {
                        writeln!(out, "parse error: {e}")?;
                        continue;
                    }
                };
                let m = Move::I(MoveI::new(ball));
                match check(f, &t, &m) {
                    Ok(()) => break m,
                    Err(rule) => writeln!(out, "rule_violation: {rule}; move rejected")?,
                }
            },
            Opponent::I(p) => match p.next_move(last_ii.as_ref()) {
                Ok(m) => {
                    writeln!(out, "[{round}] I plays {}", m.ball)?;
                    Move::I(m)
                }
                Err(e) => {
                    t.forfeit(baire_game::game::Player::I, format!("strategy error: {e}"));
                    break;
                }
            },
        };
        let ball = match &mi {
            Move::I(m) => m.ball.clone(),
            Move::II(_) => unreachable!("Player I moved"),
        };
        t.apply(f, mi).map_err(io::Error::other)?;
        if t.verdict.is_some() {
            break;
        }
        // Player II's move
        let mii = match &mut opponent {
            Opponent::I(_) => loop {
                let line = match read(input, out, &format!("[{round}] II> "))? {
                    Input::Quit => {
                        t.verdict = Some(quit_verdict(round));
                        writeln!(out, "{}", describe(t.verdict.as_ref().expect("set")))?;
                        return Ok(t);
                    }
                    Input::Line(l) => l,
                };
                match parse_index(&line) {
                    Ok(i) => {
                        let m = MoveII::dense(f, i);
                        writeln!(out, "q_{i} = {}", m.value)?;
                        break m;
                    }
                    Err(e) => writeln!(out, "parse error: {e}")?,
                }
            },
            Opponent::II(p) => match p.reply(&ball) {
                Ok(m) => {
                    writeln!(out, "[{round}] II answers {}", m.value)?;
                    m
                }
                Err(e) => {
                    t.forfeit(baire_game::game::Player::II, format!("strategy error: {e}"));
                    break;
                }
            },
        };
        last_ii = Some(mii.clone());
        t.apply(f, Move::II(mii)).map_err(io::Error::other)?;
        if t.verdict.is_some() {
            break;
        }
    }
    if t.verdict.is_none() {
        t.verdict = Some(adjudicate(f, &t, &cfg.referee).map_err(io::Error::other)?);
    }
    writeln!(out, "{}", describe(t.verdict.as_ref().expect("set")))?;
    Ok(t)
}
