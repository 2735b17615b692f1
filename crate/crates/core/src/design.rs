//! Points, blocks, designs and nestings.
//!
//! Point ids are dense: `0..v` are the old points of the design, and
//! `v..w` are new points introduced by a nesting. Display labels such as
//! `"∞_1"` are metadata only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{NestError, Result};

pub type Point = usize;

/// `(v, k, λ)`. Integrality of `r` and `b` is computed, never assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
}

impl DesignParams {
    pub const fn new(v: usize, k: usize, lambda: usize) -> Self {
        DesignParams { v, k, lambda }
    }

    /// Replication number `λ(v−1)/(k−1)` as an exact fraction `(num, den)`.
    pub fn replication_fraction(&self) -> (usize, usize) {
        (
            self.lambda * self.v.saturating_sub(1),
            self.k.saturating_sub(1),
        )
    }

    /// `r`, when it is an integer.
    pub fn replication(&self) -> Option<usize> {
        let (num, den) = self.replication_fraction();
        (den > 0 && num % den == 0).then(|| num / den)
    }

    /// `b = λv(v−1)/(k(k−1))`, when it is an integer.
    pub fn block_count(&self) -> Option<usize> {
        let num = self.lambda * self.v * self.v.saturating_sub(1);
        let den = self.k * self.k.saturating_sub(1);
        (den > 0 && num.is_multiple_of(den)).then(|| num / den)
    }

    /// Both `r` and `b` integral, `k ≥ 2`, `λ ≥ 1` and `v ≥ k`.
    pub fn is_admissible(&self) -> bool {
        self.k >= 2
            && self.lambda >= 1
            && self.v >= self.k
            && self.replication().is_some()
            && self.block_count().is_some()
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(NestError::InfeasibleParams {
                v: self.v,
                k: self.k,
                lambda: self.lambda,
            })
        }
    }
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.v, self.k, self.lambda)
    }
}

/// The point set `Y ⊇ X`: ids `0..old_count` form `X`, the rest are new.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointUniverse {
    size: usize,
    old_count: usize,
    labels: Option<Vec<String>>,
}

impl PointUniverse {
    pub fn new(size: usize, old_count: usize) -> Self {
        assert!(old_count <= size, "old points exceed universe size");
        PointUniverse {
            size,
            old_count,
            labels: None,
        }
    }

    /// A universe with no new points.
    pub fn plain(v: usize) -> Self {
        PointUniverse::new(v, v)
    }

    pub fn with_labels(size: usize, old_count: usize, labels: Vec<String>) -> Result<Self> {
        if labels.len() != size {
            return Err(NestError::InvalidInput(format!(
                "{} labels for a universe of {} points",
                labels.len(),
                size
            )));
        }
        if old_count > size {
            return Err(NestError::InvalidInput(format!(
                "old point count {old_count} exceeds universe size {size}"
            )));
        }
        Ok(PointUniverse {
            size,
            old_count,
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn old_count(&self) -> usize {
        self.old_count
    }

    pub fn new_count(&self) -> usize {
        self.size - self.old_count
    }

    pub fn is_new(&self, p: Point) -> bool {
        p >= self.old_count
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, p: Point) -> String {
        match &self.labels {
            Some(labels) if p < labels.len() => labels[p].clone(),
            _ => p.to_string(),
        }
    }

    /// The same universe restricted to its old points.
    pub fn old_part(&self) -> PointUniverse {
        PointUniverse {
            size: self.old_count,
            old_count: self.old_count,
            labels: self.labels.as_ref().map(|l| l[..self.old_count].to_vec()),
        }
    }

    /// Extend with `extra` new points, labelled when the universe carries labels.
    pub fn extended(&self, extra_labels: Vec<String>) -> PointUniverse {
        let size = self.size + extra_labels.len();
        let labels = self
            .labels
            .as_ref()
            .map(|l| l.iter().cloned().chain(extra_labels).collect());
        PointUniverse {
            size,
            old_count: self.old_count,
            labels,
        }
    }

    /// Labels for every point, falling back to numeric ids.
    pub fn all_labels(&self) -> Vec<String> {
        (0..self.size).map(|p| self.label(p)).collect()
    }
}

/// A block: a strictly increasing list of point ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Block(Vec<Point>);

impl Block {
    /// Accepts only a strictly increasing id list.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NestError::InvalidInput(format!(
                "block {points:?} is not strictly increasing"
            )));
        }
        Ok(Block(points))
    }

    /// Sorts first; rejects repeated points.
    pub fn from_unsorted(mut points: Vec<Point>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(NestError::InvalidInput(format!(
                "block {points:?} repeats a point"
            )));
        }
        Ok(Block(points))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn max_point(&self) -> Option<Point> {
        self.0.last().copied()
    }

    /// All unordered pairs `(x, y)` with `x < y`.
    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(move |(i, &x)| self.0[i + 1..].iter().map(move |&y| (x, y)))
    }

    /// Apply a point relabelling.
    pub fn mapped(&self, map: impl Fn(Point) -> Point) -> Result<Block> {
        Block::from_unsorted(self.0.iter().map(|&p| map(p)).collect())
    }

    /// The block with one extra point, or `None` if it is already present.
    pub fn with_point(&self, p: Point) -> Option<Block> {
        match self.0.binary_search(&p) {
            Ok(_) => None,
            Err(pos) => {
                let mut pts = self.0.clone();
                pts.insert(pos, p);
                Some(Block(pts))
            }
        }
    }
}

impl TryFrom<Vec<Point>> for Block {
    type Error = NestError;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Block::new(points)
    }
}

impl From<Block> for Vec<Point> {
    fn from(b: Block) -> Self {
        b.0
    }
}

/// One (possibly holey) parallel class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParallelClass {
    /// `None` for a full class, otherwise the index of its hole group.
    pub hole: Option<usize>,
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Resolution {
    pub classes: Vec<ParallelClass>,
}

/// A block design, optionally with groups (a GDD) and a resolution.
///
/// Blocks form a multiset: repeats are kept and never deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Design {
    pub params: DesignParams,
    pub universe: PointUniverse,
    pub blocks: Vec<Block>,
    pub groups: Option<Vec<Vec<Point>>>,
    pub resolution: Option<Resolution>,
}

impl Design {
    pub fn new(params: DesignParams, blocks: Vec<Block>) -> Self {
        Design {
            params,
            universe: PointUniverse::plain(params.v),
            blocks,
            groups: None,
            resolution: None,
        }
    }

    pub fn with_universe(mut self, universe: PointUniverse) -> Self {
        self.universe = universe;
        self
    }

    pub fn with_groups(mut self, groups: Vec<Vec<Point>>) -> Self {
        self.groups = Some(groups);
        self
    }

    pub fn with_resolution(mut self, resolution: Resolution) -> Self {
        self.resolution = Some(resolution);
        self
    }

    pub fn v(&self) -> usize {
        self.params.v
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn lambda(&self) -> usize {
        self.params.lambda
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn label(&self, p: Point) -> String {
        self.universe.label(p)
    }

    /// Group index of every old point, if groups are present.
    pub fn group_of(&self) -> Option<Vec<Option<usize>>> {
        let groups = self.groups.as_ref()?;
        let mut of = vec![None; self.universe.size()];
        for (g, members) in groups.iter().enumerate() {
            for &p in members {
                if p < of.len() {
                    of[p] = Some(g);
                }
            }
        }
        Some(of)
    }

    /// Group sizes in group order.
    pub fn group_type(&self) -> Option<Vec<usize>> {
        self.groups
            .as_ref()
            .map(|g| g.iter().map(|members| members.len()).collect())
    }

    /// Relabel the old points by `perm` (a permutation of `0..v`); labels follow
    /// their points.
    pub fn relabelled(&self, perm: &[Point]) -> Result<Design> {
        let v = self.v();
        if perm.len() != v {
            return Err(NestError::InvalidInput(format!(
                "relabelling of length {} for {} points",
                perm.len(),
                v
            )));
        }
        let mut seen = vec![false; v];
        for &p in perm {
            if p >= v || std::mem::replace(&mut seen[p], true) {
                return Err(NestError::InvalidInput(
                    "relabelling is not a permutation".into(),
                ));
            }
        }
        let map = |p: Point| if p < v { perm[p] } else { p };
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.mapped(map))
            .collect::<Result<Vec<_>>>()?;
        let groups = self.groups.as_ref().map(|gs| {
            gs.iter()
                .map(|g| {
                    let mut m: Vec<Point> = g.iter().map(|&p| map(p)).collect();
                    m.sort_unstable();
                    m
                })
                .collect()
        });
        let universe = match self.universe.labels() {
            Some(labels) => {
                let mut relabelled = labels.to_vec();
                for (old, &new) in perm.iter().enumerate() {
                    relabelled[new] = labels[old].clone();
                }
                PointUniverse::with_labels(
                    self.universe.size(),
                    self.universe.old_count(),
                    relabelled,
                )?
            }
            None => self.universe.clone(),
        };
        Ok(Design {
            params: self.params,
            universe,
            blocks,
            groups,
            resolution: self.resolution.clone(),
        })
    }
}

/// A nesting `φ`: one nested point per block index, over a universe of `w` points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nesting {
    pub universe: PointUniverse,
    pub assignment: Vec<Point>,
}

impl Nesting {
    pub fn new(universe: PointUniverse, assignment: Vec<Point>) -> Self {
        Nesting {
            universe,
            assignment,
        }
    }

    pub fn w(&self) -> usize {
        self.universe.size()
    }

    /// Number of distinct new points actually used.
    pub fn new_points_used(&self) -> usize {
        let mut used: Vec<Point> = self
            .assignment
            .iter()
            .copied()
            .filter(|&p| self.universe.is_new(p))
            .collect();
        used.sort_unstable();
        used.dedup();
        used.len()
    }
}

/// The augmented blocks `A ∪ {φ(A)}`.
///
/// Fails with the indices of every block whose nested point already lies in
/// the block.
pub fn augment(design: &Design, nesting: &Nesting) -> Result<Design> {
    if nesting.assignment.len() != design.blocks.len() {
        return Err(NestError::InvalidInput(format!(
            "nesting assigns {} points to {} blocks",
            nesting.assignment.len(),
            design.blocks.len()
        )));
    }
    let mut inside = Vec::new();
    let mut blocks = Vec::with_capacity(design.blocks.len());
    for (i, (block, &p)) in design.blocks.iter().zip(&nesting.assignment).enumerate() {
        match block.with_point(p) {
            Some(b) => blocks.push(b),
            None => inside.push(i),
        }
    }
    if !inside.is_empty() {
        return Err(NestError::NestedPointInsideBlock(inside));
    }
    Ok(Design {
        params: DesignParams::new(nesting.w(), design.k() + 1, design.lambda() + 1),
        universe: nesting.universe.clone(),
        blocks,
        groups: design.groups.clone(),
        resolution: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blk(p: &[Point]) -> Block {
        Block::new(p.to_vec()).unwrap()
    }

    /// The (4,3,2)-BIBD on ids 0..3, block order 123,124,134,234.
    fn four_three_two() -> Design {
        Design::new(
            DesignParams::new(4, 3, 2),
            vec![
                blk(&[0, 1, 2]),
                blk(&[0, 1, 3]),
                blk(&[0, 2, 3]),
                blk(&[1, 2, 3]),
            ],
        )
    }

    #[test]
    fn params_integrality() {
        let p = DesignParams::new(7, 3, 1);
        assert_eq!(p.replication(), Some(3));
        assert_eq!(p.block_count(), Some(7));
        assert!(p.is_admissible());
        let q = DesignParams::new(8, 3, 1);
        assert_eq!(q.replication(), None);
        assert!(!q.is_admissible());
        assert_eq!(DesignParams::new(3, 3, 2).block_count(), Some(2));
    }

    #[test]
    fn block_rejects_unsorted_and_repeats() {
        assert!(Block::new(vec![2, 1]).is_err());
        assert!(Block::from_unsorted(vec![2, 1, 2]).is_err());
        assert_eq!(
            Block::from_unsorted(vec![3, 0, 2]).unwrap().points(),
            &[0, 2, 3]
        );
        assert_eq!(
            blk(&[0, 2, 5]).pairs().collect::<Vec<_>>(),
            vec![(0, 2), (0, 5), (2, 5)]
        );
    }

    #[test]
    fn augment_single_new_point() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(5, 4), vec![4; 4]);
        let a = augment(&d, &n).unwrap();
        assert_eq!(a.blocks.len(), 4);
        assert_eq!(a.blocks[0].points(), &[0, 1, 2, 4]);
        assert_eq!(a.params, DesignParams::new(5, 4, 3));
    }

    #[test]
    fn augment_strong_example() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(7, 4), vec![3, 4, 5, 6]);
        let a = augment(&d, &n).unwrap();
        let got: Vec<&[Point]> = a.blocks.iter().map(|b| b.points()).collect();
        assert_eq!(
            got,
            vec![
                &[0, 1, 2, 3][..],
                &[0, 1, 3, 4],
                &[0, 2, 3, 5],
                &[1, 2, 3, 6]
            ]
        );
    }

    #[test]
    fn augment_reports_every_offending_block() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(4, 4), vec![0, 2, 1, 1]);
        assert_eq!(
            augment(&d, &n),
            Err(NestError::NestedPointInsideBlock(vec![0, 3]))
        );
    }

    #[test]
    fn relabel_moves_labels_with_points() {
        let d = four_three_two().with_universe(
            PointUniverse::with_labels(4, 4, vec!["a".into(), "b".into(), "c".into(), "d".into()])
                .unwrap(),
        );
        let r = d.relabelled(&[3, 2, 1, 0]).unwrap();
        assert_eq!(r.label(3), "a");
        assert_eq!(r.blocks[0].points(), &[1, 2, 3]);
        assert!(d.relabelled(&[0, 0, 1, 2]).is_err());
    }
}
