//! Small-case isomorph enumeration and the `(6,3,2)` strong-nesting bound.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::design::{Block, Design, DesignParams, Point};
use crate::error::{NestError, Result};
use crate::pairs::{pair_counts, PairCountTable};
use crate::verify::{verify_bibd, Mode};

use super::{find_min_nesting, SearchOptions, SearchOutcome};

/// Every pair of blocks shares at least one point.
pub fn no_disjoint_blocks(design: &Design) -> bool {
    let blocks = &design.blocks;
    blocks.iter().enumerate().all(|(i, a)| {
        blocks[i + 1..]
            .iter()
            .all(|b| a.points().iter().any(|&p| b.contains(p)))
    })
}

/// All `(v,k,λ)`-BIBDs on points `0..v` as sorted block lists.
///
/// Repeated blocks are allowed. Intended for very small parameters only.
pub fn enumerate_bibds(params: DesignParams) -> Vec<Vec<Block>> {
    let DesignParams { v, k, lambda } = params;
    let subsets: Vec<Vec<Point>> = k_subsets(v, k);
    let mut found = BTreeSet::new();
    let mut counts = PairCountTable::new(v);
    let mut chosen = Vec::new();
    bibd_dfs(
        lambda as u32,
        &subsets,
        &mut counts,
        &mut chosen,
        &mut found,
    );
    found
        .into_iter()
        .map(|idx: Vec<usize>| {
            idx.iter()
                .map(|&i| Block::new(subsets[i].clone()).expect("sorted"))
                .collect()
        })
        .collect()
}

fn k_subsets(v: usize, k: usize) -> Vec<Vec<Point>> {
    fn rec(start: usize, v: usize, k: usize, cur: &mut Vec<Point>, out: &mut Vec<Vec<Point>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..v {
            cur.push(p);
            rec(p + 1, v, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, v, k, &mut Vec::new(), &mut out);
    out
}

/// Cover the lexicographically first deficient pair by some subset; the
/// chosen multisets are collected in sorted form so orderings collapse.
fn bibd_dfs(
    lambda: u32,
    subsets: &[Vec<Point>],
    counts: &mut PairCountTable,
    chosen: &mut Vec<usize>,
    found: &mut BTreeSet<Vec<usize>>,
) {
    let Some((x, y, _)) = counts.first_violation(|_, _, c| c >= lambda) else {
        let mut sorted = chosen.clone();
        sorted.sort_unstable();
        found.insert(sorted);
        return;
    };
    for (i, s) in subsets.iter().enumerate() {
        if !(s.contains(&x) && s.contains(&y)) {
            continue;
        }
        if s.iter()
            .enumerate()
            .any(|(a, &p)| s[a + 1..].iter().any(|&q| counts.get(p, q) >= lambda))
        {
            continue;
        }
        counts.add_points(s);
        chosen.push(i);
        bibd_dfs(lambda, subsets, counts, chosen, found);
        chosen.pop();
        for (a, &p) in s.iter().enumerate() {
            for &q in &s[a + 1..] {
                counts.remove(p, q);
            }
        }
    }
}

/// Invariants that any isomorphism preserves, used to bucket designs before
/// the brute-force canonical form.
fn profile(blocks: &[Block], v: usize) -> (Vec<usize>, Vec<u32>, Vec<usize>) {
    let mut degree = vec![0usize; v];
    for b in blocks {
        for &p in b.points() {
            degree[p] += 1;
        }
    }
    degree.sort_unstable();
    let mut pairs: Vec<u32> = pair_counts(blocks, v).iter().map(|(_, _, c)| c).collect();
    pairs.sort_unstable();
    let mut intersections: Vec<usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            blocks[i + 1..]
                .iter()
                .map(move |b| a.points().iter().filter(|&&p| b.contains(p)).count())
        })
        .collect();
    intersections.sort_unstable();
    (degree, pairs, intersections)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    heap(n, &mut perm, &mut out);
    out
}

/// Lexicographically least relabelled sorted block list over all point
/// permutations.
pub fn canonical_form(blocks: &[Block], perms: &[Vec<usize>]) -> Vec<Block> {
    perms
        .iter()
        .map(|perm| {
            let mut mapped: Vec<Block> = blocks
                .iter()
                .map(|b| b.mapped(|p| perm[p]).expect("permutation"))
                .collect();
            mapped.sort();
            mapped
        })
        .min()
        .unwrap_or_default()
}

/// Isomorphism classes among `designs` (each a sorted block list on `0..v`).
pub fn isomorphism_classes(designs: &[Vec<Block>], v: usize) -> Vec<Vec<Block>> {
    let perms = permutations(v);
    let mut buckets: BTreeMap<_, BTreeSet<Vec<Block>>> = BTreeMap::new();
    for d in designs {
        buckets
            .entry(profile(d, v))
            .or_default()
            .insert(canonical_form(d, &perms));
    }
    buckets.into_values().flatten().collect()
}

/// What the `(6,3,2)` strong-bound certificate established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongBound632 {
    pub labelled_designs: usize,
    pub isomorphism_classes: usize,
    pub no_disjoint_blocks: bool,
    /// Largest number of blocks that a strong nesting can give old nested points.
    pub max_old_nested: usize,
    pub exhausted_below: usize,
    pub bound: usize,
}

/// Largest set of blocks that can take old nested points while the other
/// blocks take distinct fresh points, in a strong nesting.
fn max_old_nested(design: &Design) -> usize {
    let v = design.v();
    let cap = design.lambda() as u32 + 1;
    let mut counts = pair_counts(&design.blocks, v);
    let mut nested = PairCountTable::new(v);
    fn go(
        design: &Design,
        i: usize,
        cap: u32,
        counts: &mut PairCountTable,
        nested: &mut PairCountTable,
        best: &mut usize,
        cur: usize,
    ) {
        let left = design.blocks.len() - i;
        if cur + left <= *best {
            return;
        }
        if i == design.blocks.len() {
            *best = cur;
            return;
        }
        let pts = design.blocks[i].points();
        for p in 0..design.v() {
            if pts.contains(&p)
                || pts
                    .iter()
                    .any(|&x| counts.get(x, p) >= cap || nested.get(x, p) > 0)
            {
                continue;
            }
            for &x in pts {
                counts.add(x, p);
                nested.add(x, p);
            }
            go(design, i + 1, cap, counts, nested, best, cur + 1);
            for &x in pts {
                counts.remove(x, p);
                nested.remove(x, p);
            }
        }
        go(design, i + 1, cap, counts, nested, best, cur);
    }
    let mut best = 0;
    go(design, 0, cap, &mut counts, &mut nested, &mut best, 0);
    best
}

/// Re-derive the strong bound `w ≥ 11` for the `(6,3,2)`-BIBD.
///
/// Enumerates every `(6,3,2)`-BIBD on six points, checks there is one
/// isomorphism class whose blocks pairwise intersect, confirms that no
/// strong nesting exists with `w ≤ 10`, and cross-checks with the counting
/// argument: at most five blocks can be nested by old points and every other
/// block needs its own new point.
pub fn certify_632_strong_bound_report() -> Result<StrongBound632> {
    let params = DesignParams::new(6, 3, 2);
    let labelled = enumerate_bibds(params);
    let classes = isomorphism_classes(&labelled, 6);
    let violation = |msg: String| Err(NestError::ContractViolation(msg));
    if classes.len() != 1 {
        return violation(format!(
            "expected one (6,3,2)-BIBD up to isomorphism, found {}",
            classes.len()
        ));
    }
    let design = Design::new(params, classes[0].clone());
    if !verify_bibd(&design).passed() {
        return violation("enumerated design is not a (6,3,2)-BIBD".into());
    }
    let disjoint_free = no_disjoint_blocks(&design);
    if !disjoint_free {
        return violation("the (6,3,2)-BIBD has two disjoint blocks".into());
    }
    let max_old = max_old_nested(&design);
    let counting = 6 + design.blocks.len() - max_old;
    let outcome = find_min_nesting(&design, Mode::Strong, 10, &SearchOptions::sequential())?;
    if outcome != (SearchOutcome::Exhausted { cap: 10 }) {
        return violation(format!("strong nesting with w ≤ 10 found: {outcome:?}"));
    }
    if max_old > 5 || counting != 11 {
        return violation(format!(
            "counting bound gives {counting} with {max_old} old-nested blocks"
        ));
    }
    Ok(StrongBound632 {
        labelled_designs: labelled.len(),
        isomorphism_classes: classes.len(),
        no_disjoint_blocks: disjoint_free,
        max_old_nested: max_old,
        exhausted_below: 11,
        bound: 11,
    })
}

pub fn certify_632_strong_bound() -> Result<usize> {
    certify_632_strong_bound_report().map(|r| r.bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_permutations() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p.iter().collect::<BTreeSet<_>>().len(), 24);
    }

    #[test]
    fn fano_planes() {
        let all = enumerate_bibds(DesignParams::new(7, 3, 1));
        assert_eq!(all.len(), 30);
        assert_eq!(isomorphism_classes(&all, 7).len(), 1);
    }

    #[test]
    fn disjointness() {
        let (e6, _) = crate::direct::fixture("E6").unwrap();
        assert!(no_disjoint_blocks(&e6));
        let ag = Design::new(
            DesignParams::new(9, 3, 1),
            vec![
                Block::new(vec![0, 1, 2]).unwrap(),
                Block::new(vec![3, 4, 5]).unwrap(),
            ],
        );
        assert!(!no_disjoint_blocks(&ag));
        let single = Design::new(
            DesignParams::new(3, 3, 1),
            vec![Block::new(vec![0, 1, 2]).unwrap()],
        );
        assert!(no_disjoint_blocks(&single));
    }

    #[test]
    fn six_three_two_certificate() {
        let report = certify_632_strong_bound_report().unwrap();
        assert_eq!(report.isomorphism_classes, 1);
        assert_eq!(report.labelled_designs, 12);
        assert_eq!(report.max_old_nested, 5);
        assert_eq!(report.bound, 11);
    }
}
