//! Reading an F_sigma description of `f^-1(V)` off a Player II strategy.
//!
//! Replaying the strategy along every chain `U_(s|0), ..., U_s` of a scheme
//! gives answers `y_s`. For each piece `V_n` of `V` and each `s` with
//! `y_s in V_n`, the set `U_s` minus every `U_t` with `t` extending `s` and
//! `y_t` outside `V_n` is a piece of the certificate; a point belongs to the
//! preimage when some piece contains it. Everything is truncated at the
//! scheme depth.

use serde::Serialize;

use crate::error::StrategyError;
use crate::game::PlayerII;
use crate::metric::{Point, Region};
use crate::scheme::Scheme;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub address: Vec<u32>,
    /// Index into the list of `V` pieces.
    pub n: usize,
    pub excluded: Vec<Vec<u32>>,
    #[serde(skip)]
    node: usize,
    #[serde(skip)]
    excluded_nodes: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FsigmaCertificate {
    pub depth: usize,
    pub pieces: Vec<Piece>,
    /// `y_s` for every scheme node, by node index.
    #[serde(skip)]
    pub answers: Vec<Point>,
    #[serde(skip)]
    by_node: Vec<Vec<usize>>,
}

/// Replays `prototype` (a fresh strategy) along every chain of the scheme.
pub fn replay_answers(prototype: &dyn PlayerII, scheme: &Scheme, depth: usize) -> Result<Vec<Option<Point>>, StrategyError> {
    let mut answers: Vec<Option<Point>> = vec![None; scheme.len()];
    let mut stack: Vec<(usize, Box<dyn PlayerII>)> = vec![(scheme.root(), prototype.box_clone())];
    while let Some((node, mut player)) = stack.pop() {
        let cell = scheme.node(node).cell();
        let ball = match cell.balls() {
            [only] => only.clone(),
            _ => cell.hull_ball(),
        };
        let reply = player.reply(&ball).map_err(|e| StrategyError::Replay {
            address: scheme.node(node).address().to_vec(),
            reason: e.to_string(),
        })?;
        answers[node] = Some(reply.value);
        if scheme.node(node).depth() < depth {
            let children = scheme.node(node).children();
            for &c in children.iter().rev() {
                stack.push((c, player.box_clone()));
            }
        }
    }
    Ok(answers)
}

/// Builds the certificate for `V = union of v_pieces` down to `depth`.
pub fn fsigma_certificate(
    prototype: &dyn PlayerII,
    scheme: &Scheme,
    v_pieces: &[Region],
    depth: usize,
) -> Result<FsigmaCertificate, StrategyError> {
    let depth = depth.min(scheme.depth());
    let raw = replay_answers(prototype, scheme, depth)?;
    let mut pieces = Vec::new();
    let mut by_node = vec![Vec::new(); scheme.len()];
    let answers: Vec<Point> =
        raw.into_iter().map(|a| a.unwrap_or_else(|| Point::ratio(0, 1))).collect();
    let in_scope = |i: usize| scheme.node(i).depth() <= depth;
    let mut bottom_up: Vec<usize> = (0..scheme.len()).filter(|&i| in_scope(i)).collect();
    bottom_up.sort_by_key(|&i| std::cmp::Reverse(scheme.node(i).depth()));
    for (n, v) in v_pieces.iter().enumerate() {
        let inside: Vec<bool> = answers.iter().enumerate().map(|(i, y)| in_scope(i) && v.contains(y)).collect();
        // minimal descendants answering outside V_n, below each node
        let mut outside_below: Vec<Vec<usize>> = vec![Vec::new(); scheme.len()];
        for &s in &bottom_up {
            let mut acc = Vec::new();
            for &c in scheme.node(s).children() {
                if !in_scope(c) {
                    continue;
                }
                if inside[c] {
                    acc.extend_from_slice(&outside_below[c]);
                } else {
                    acc.push(c);
                }
            }
            outside_below[s] = acc;
        }
        for s in (0..scheme.len()).filter(|&s| inside[s]) {
            let mut excluded_nodes = std::mem::take(&mut outside_below[s]);
            excluded_nodes.sort_unstable();
            by_node[s].push(pieces.len());
            pieces.push(Piece {
                address: scheme.node(s).address().to_vec(),
                n,
                excluded: excluded_nodes.iter().map(|&t| scheme.node(t).address().to_vec()).collect(),
                node: s,
                excluded_nodes,
            });
        }
    }
    Ok(FsigmaCertificate { depth, pieces, answers, by_node })
}

impl FsigmaCertificate {
    /// Whether some piece contains `x`: `x in U_s` and `x` in no excluded `U_t`.
    pub fn contains(&self, scheme: &Scheme, x: &Point) -> bool {
        scheme.tree_of(x).into_iter().filter(|&s| scheme.node(s).depth() <= self.depth).any(|s| {
            self.by_node[s].iter().any(|&p| {
                let piece = &self.pieces[p];
                debug_assert_eq!(piece.node, s);
                !piece.excluded_nodes.iter().any(|&t| scheme.node(t).cell().contains(x))
            })
        })
    }

    pub fn answer(&self, scheme: &Scheme, address: &[u32]) -> Option<&Point> {
        scheme.index_of(address).map(|i| &self.answers[i])
    }
}
