//! Open-set schemes over interval spaces and the selection tree `S`.
//!
//! A scheme assigns an open set `U_s` to every finite sequence `s` (up to a
//! depth bound) with `U_() = X`, children covering their parent and
//! `diam(U_s) <= 2^-len(s)`. Diameters use the bounded metric
//! `min(|x - y|, 1)`, which induces the usual topology, so the root meets the
//! diameter bound for any space.
//!
//! Children of an interval `(a, b)` of length `L` at level `l` are the `N`
//! open pieces of the dyadic partition with `L/N <= 2^-(l+1)`, together with
//! `N - 1` intervals of the same length centred on the interior cut points.
//! The shifted intervals pick up the cut points, so the children cover the
//! parent exactly.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::GeometryError;
use crate::metric::{Ball, Point, Region};
use crate::scalar::{pow2_neg, Rational, Scalar};

pub const DEFAULT_CELL_BUDGET: u128 = 1 << 22;

#[derive(Clone, Debug)]
pub struct SchemeNode {
    address: Vec<u32>,
    cell: Region,
    children: Vec<usize>,
}

impl SchemeNode {
    pub fn address(&self) -> &[u32] {
        &self.address
    }

    pub fn cell(&self) -> &Region {
        &self.cell
    }

    pub fn children(&self) -> &[usize] {
        &self.children
    }

    pub fn depth(&self) -> usize {
        self.address.len()
    }
}

#[derive(Clone, Debug)]
pub struct Scheme {
    nodes: Vec<SchemeNode>,
    depth: usize,
}

impl Scheme {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, index: usize) -> &SchemeNode {
        &self.nodes[index]
    }

    pub fn nodes(&self) -> &[SchemeNode] {
        &self.nodes
    }

    pub fn index_of(&self, address: &[u32]) -> Option<usize> {
        let mut at = 0;
        for &step in address {
            at = *self.nodes[at].children.get(step as usize)?;
        }
        Some(at)
    }

    pub fn cell(&self, address: &[u32]) -> Option<&Region> {
        self.index_of(address).map(|i| &self.nodes[i].cell)
    }

    /// Node indices of the tree `T_x = { s : x in U_s }`, truncated at the
    /// scheme depth, in depth-first order.
    pub fn tree_of(&self, x: &Point) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes[0].cell.contains(x) {
            return out;
        }
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            out.push(i);
            for &c in self.nodes[i].children.iter().rev() {
                if self.nodes[c].cell.contains(x) {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// Whether `ancestor`'s address is an initial segment of `node`'s.
    pub fn extends(&self, node: usize, ancestor: usize) -> bool {
        self.nodes[node].address.starts_with(&self.nodes[ancestor].address)
    }
}

/// Diameter of a one-dimensional region under `min(|x - y|, 1)`.
pub fn bounded_diameter(cell: &Region) -> Scalar {
    let (lo, hi) = cell.hull();
    (hi - lo).min(Scalar::one())
}

fn pieces_for(length: &Scalar, level: usize) -> u64 {
    let target = pow2_neg(level as u32 + 1);
    let mut n: u64 = 2;
    while length.scale(&Rational::new(BigInt::one(), BigInt::from(n))).cmp_rational(&target) == std::cmp::Ordering::Greater {
        n *= 2;
    }
    n
}

/// Children of the interval `(lo, hi)` sitting at `level`, left to right.
fn subdivide(lo: &Scalar, hi: &Scalar, level: usize) -> Vec<Ball> {
    let length = hi - lo;
    let n = pieces_for(&length, level);
    let step = length.scale(&Rational::new(BigInt::one(), BigInt::from(n)));
    let half = step.scale(&Rational::new(BigInt::one(), BigInt::from(2)));
    let mut out = Vec::with_capacity(2 * n as usize - 1);
    for i in 0..n {
        let left = lo + step.scale(&Rational::from_integer(BigInt::from(i)));
        if i > 0 {
            let a = &left - &half;
            out.push(Ball::open_interval(a.clone(), a + &step).expect("positive length"));
        }
        out.push(Ball::open_interval(left.clone(), left + &step).expect("positive length"));
    }
    out
}

fn estimate_cells(space: &Region, depth: usize) -> u128 {
    let mut total: u128 = 1;
    for ball in space.balls() {
        let (lo, hi) = ball.bounds();
        let mut length = hi - lo;
        let mut width: u128 = 1;
        for level in 0..depth {
            let n = pieces_for(&length, level);
            width = width.saturating_mul(2 * n as u128 - 1);
            total = total.saturating_add(width);
            length = length.scale(&Rational::new(BigInt::one(), BigInt::from(n)));
        }
    }
    total
}

/// Builds the scheme of `space` down to `depth`, refusing when the cell count
/// would exceed `budget`.
pub fn build_scheme(space: &Region, depth: usize, budget: u128) -> Result<Scheme, GeometryError> {
    if space.dim() != 1 {
        return Err(GeometryError::SchemeDimension);
    }
    let cells = estimate_cells(space, depth);
    if cells > budget {
        return Err(GeometryError::SchemeBudget { depth, cells, budget });
    }
    let mut nodes = vec![SchemeNode { address: Vec::new(), cell: space.clone(), children: Vec::new() }];
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let mut next = Vec::new();
        for parent in frontier {
            let pieces: Vec<Ball> = if level == 0 {
                space.balls().iter().flat_map(|b| {
                    let (lo, hi) = b.bounds();
                    subdivide(&lo, &hi, 0)
                }).collect()
            } else {
                let (lo, hi) = nodes[parent].cell.hull();
                subdivide(&lo, &hi, level)
            };
            for (k, piece) in pieces.into_iter().enumerate() {
                let mut address = nodes[parent].address.clone();
                address.push(k as u32);
                let idx = nodes.len();
                nodes.push(SchemeNode { address, cell: Region::ball(piece), children: Vec::new() });
                nodes[parent].children.push(idx);
                next.push(idx);
            }
        }
        frontier = next;
    }
    Ok(Scheme { nodes, depth })
}

/// Membership in `S = { s : s(n) <= n for all n < len(s) }`.
pub fn tree_s_contains(s: &[u64]) -> bool {
    s.iter().enumerate().all(|(n, &v)| v <= n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn unit() -> Region {
        Region::ball(Ball::interval(rat(1, 2), rat(1, 2)).unwrap())
    }

    #[test]
    fn root_is_the_space() {
        let s = build_scheme(&unit(), 0, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.cell(&[]).unwrap(), &unit());
    }

    #[test]
    fn level_two_diameters() {
        let s = build_scheme(&unit(), 2, DEFAULT_CELL_BUDGET).unwrap();
        for node in s.nodes().iter().filter(|n| n.depth() == 2) {
            assert!(bounded_diameter(node.cell()) <= Scalar::from_ratio(1, 4));
        }
    }

    #[test]
    fn children_left_to_right() {
        let s = build_scheme(&unit(), 1, DEFAULT_CELL_BUDGET).unwrap();
        let cells: Vec<(Scalar, Scalar)> = s.node(0).children().iter().map(|&c| s.node(c).cell().hull()).collect();
        assert_eq!(
            cells,
            vec![
                (Scalar::zero(), Scalar::from_ratio(1, 2)),
                (Scalar::from_ratio(1, 4), Scalar::from_ratio(3, 4)),
                (Scalar::from_ratio(1, 2), Scalar::one()),
            ]
        );
    }

    #[test]
    fn wide_space_uses_more_pieces() {
        let space = Region::ball(Ball::interval(rat(0, 1), rat(1, 1)).unwrap());
        let s = build_scheme(&space, 1, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(s.node(0).children().len(), 7);
    }

    #[test]
    fn budget_is_enforced() {
        let err = build_scheme(&unit(), 30, 1000).unwrap_err();
        assert!(matches!(err, GeometryError::SchemeBudget { depth: 30, .. }));
    }

    #[test]
    fn tree_s_examples() {
        assert!(tree_s_contains(&[]));
        assert!(tree_s_contains(&[0, 1, 2]));
        assert!(!tree_s_contains(&[1]));
        assert!(tree_s_contains(&[0, 0, 1, 3]));
        assert!(!tree_s_contains(&[0, 2]));
    }
}
