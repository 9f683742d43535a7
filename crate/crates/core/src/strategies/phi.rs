//! The map from branches of the selection tree `S` to points, approximated by
//! feeding dense-range values to a Player I strategy, and the Player I
//! strategy `tau'` that snaps arbitrary values onto the dense range first.

use serde::Serialize;

use crate::error::StrategyError;
use crate::functions::DenseSequence;
use crate::game::{MoveI, MoveII, Note, PlayerI, Provenance};
use crate::metric::{ball_subset, Ball, Point};
use crate::scheme::tree_s_contains;

/// `q(y, k)`: the least index `n <= k` minimising `d(q_n, y)`.
pub fn q_select(y: &Point, k: u64, dense: &DenseSequence) -> (u128, Point) {
    let target: Vec<_> = y.coords().iter().map(|c| (c.clone(), c.clone())).collect();
    dense.nearest_in_prefix(&target, u128::from(k) + 1)
}

/// Brute-force `q(y, k)`, for cross-checking.
pub fn q_select_scan(y: &Point, k: u64, dense: &DenseSequence) -> (u128, Point) {
    let target: Vec<_> = y.coords().iter().map(|c| (c.clone(), c.clone())).collect();
    dense.nearest_in_prefix_scan(&target, u128::from(k) + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiResult {
    pub branch_prefix: Vec<u64>,
    pub final_ball: Ball,
    /// Every ball of the play, starting with the strategy's opening move.
    pub balls: Vec<Ball>,
}

/// Feeds `q_{branch(0)}, ..., q_{branch(depth-1)}` to a fresh Player I
/// strategy and returns the resulting nested balls.
pub fn phi_approx(
    strategy: &mut dyn PlayerI,
    dense: &DenseSequence,
    branch: &[u64],
    depth: usize,
) -> Result<PhiResult, StrategyError> {
    if !tree_s_contains(branch) || branch.len() != depth {
        return Err(StrategyError::NotInTree);
    }
    let mut balls = vec![strategy.next_move(None)?.ball];
    for (i, &n) in branch.iter().enumerate() {
        let n = u128::from(n);
        let y = MoveII { value: dense.at(n), provenance: Provenance::DenseIndex(n), note: None };
        let next = strategy.next_move(Some(&y))?.ball;
        if !ball_subset(&next, balls.last().expect("nonempty"))? {
            return Err(StrategyError::NotNested(i + 1));
        }
        balls.push(next);
    }
    Ok(PhiResult { branch_prefix: branch.to_vec(), final_ball: balls.last().expect("nonempty").clone(), balls })
}

/// `tau'(y_0, ..., y_k) = tau(q(y_0, 0), ..., q(y_k, k))`, with every move
/// marked as standing for its intersection with `K`.
pub struct TauPrime<P: PlayerI> {
    inner: P,
    dense: DenseSequence,
    round: u64,
    /// The translated history `q(y_k, k)` fed to the inner strategy so far.
    pub translated: Vec<(u128, Point)>,
}

impl<P: PlayerI> TauPrime<P> {
    pub fn new(inner: P, dense: DenseSequence) -> Self {
        TauPrime { inner, dense, round: 0, translated: Vec::new() }
    }
}

impl<P: PlayerI> PlayerI for TauPrime<P> {
    fn next_move(&mut self, last: Option<&MoveII>) -> Result<MoveI, StrategyError> {
        let mut m = match last {
            None => self.inner.next_move(None)?,
            Some(y) => {
                let (n, q) = q_select(&y.value, self.round, &self.dense);
                self.round += 1;
                self.translated.push((n, q.clone()));
                let fed = MoveII { value: q, provenance: Provenance::DenseIndex(n), note: None };
                self.inner.next_move(Some(&fed))?
            }
        };
        if let Some(Note::Tau { intersect_k, .. }) = m.note.as_mut() {
            *intersect_k = true;
        }
        Ok(m)
    }
}
