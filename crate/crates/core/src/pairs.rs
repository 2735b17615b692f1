//! Pair-multiplicity tables.

use crate::design::{Block, Point};

/// Symmetric pair counts over `0..w`, stored as a strict lower triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCountTable {
    w: usize,
    counts: Vec<u32>,
}

#[inline]
fn tri(x: Point, y: Point) -> usize {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    hi * (hi - 1) / 2 + lo
}

impl PairCountTable {
    pub fn new(w: usize) -> Self {
        PairCountTable {
            w,
            counts: vec![0; w * w.saturating_sub(1) / 2],
        }
    }

    pub fn w(&self) -> usize {
        self.w
    }

    /// Count of the unordered pair `{x, y}`; `x == y` is never a pair.
    #[inline]
    pub fn get(&self, x: Point, y: Point) -> u32 {
        debug_assert!(x != y, "diagonal entries are undefined");
        self.counts[tri(x, y)]
    }

    #[inline]
    pub fn add(&mut self, x: Point, y: Point) -> u32 {
        let c = &mut self.counts[tri(x, y)];
        *c += 1;
        *c
    }

    #[inline]
    pub fn remove(&mut self, x: Point, y: Point) {
        self.counts[tri(x, y)] -= 1;
    }

    pub fn add_points(&mut self, points: &[Point]) {
        for (i, &x) in points.iter().enumerate() {
            for &y in &points[i + 1..] {
                self.add(x, y);
            }
        }
    }

    pub fn add_block(&mut self, block: &Block) {
        self.add_points(block.points());
    }

    /// `Σ counts`, which equals `Σ C(|B|, 2)` over the counted blocks.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Every pair `(x, y, count)` with `x < y`, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Point, Point, u32)> + '_ {
        (0..self.w).flat_map(move |x| (x + 1..self.w).map(move |y| (x, y, self.get(x, y))))
    }

    /// First pair (lexicographic) whose count fails `ok`.
    pub fn first_violation(
        &self,
        ok: impl Fn(Point, Point, u32) -> bool,
    ) -> Option<(Point, Point, u32)> {
        self.iter().find(|&(x, y, c)| !ok(x, y, c))
    }
}

/// `counts[{x,y}]` = number of blocks (with multiplicity) containing both.
pub fn pair_counts<'a>(blocks: impl IntoIterator<Item = &'a Block>, w: usize) -> PairCountTable {
    let mut table = PairCountTable::new(w);
    for b in blocks {
        table.add_block(b);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_blocks_give_zero_table() {
        let t = pair_counts(std::iter::empty(), 6);
        assert!(t.iter().all(|(_, _, c)| c == 0));
        assert_eq!(t.iter().count(), 15);
    }

    #[test]
    fn complete_graph_blocks() {
        let blocks: Vec<Block> = (0..5)
            .flat_map(|x| (x + 1..5).map(move |y| Block::new(vec![x, y]).unwrap()))
            .collect();
        let t = pair_counts(&blocks, 5);
        assert!(t.iter().all(|(_, _, c)| c == 1));
        assert_eq!(t.total(), 10);
    }

    #[test]
    fn cyclic_sts7_exhaustive() {
        // independent count: develop {1,2,4} by hand and tally pairs in a dense matrix
        let blocks: Vec<Block> = (0..7)
            .map(|i| Block::from_unsorted(vec![(1 + i) % 7, (2 + i) % 7, (4 + i) % 7]).unwrap())
            .collect();
        let mut dense = [[0u32; 7]; 7];
        for b in &blocks {
            for &x in b.points() {
                for &y in b.points() {
                    if x != y {
                        dense[x][y] += 1;
                    }
                }
            }
        }
        let t = pair_counts(&blocks, 7);
        for (x, y, c) in t.iter() {
            assert_eq!(c, dense[x][y]);
            assert_eq!(c, 1);
        }
    }

    #[test]
    fn multiset_blocks_counted_twice() {
        let b = Block::new(vec![0, 1, 2]).unwrap();
        let t = pair_counts([&b, &b], 3);
        assert_eq!(t.get(0, 2), 2);
        assert_eq!(t.get(2, 0), 2);
        assert_eq!(t.first_violation(|_, _, c| c <= 1), Some((0, 1, 2)));
    }
}
