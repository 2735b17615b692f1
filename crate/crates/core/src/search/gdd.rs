//! Search-tier ingredients built around 3-GDDs: inflation, resolutions and
//! minimal nestings.

use std::time::Instant;

use crate::design::{Block, Design, DesignParams, Nesting, ParallelClass, Point, Resolution};
use crate::error::{NestError, Result};
use crate::verify::{verify_gdd, verify_resolution, Mode};

use super::{find_min_nesting, SearchOptions, SearchOutcome};

/// Give every point weight three and replace each block `{x,y,z}` by the
/// nine triples `{(x,a),(y,b),(z,c)}` with `a+b+c ≡ 0 (mod 3)`.
///
/// Point `(p,a)` is `3p+a`. A 3-GDD of type `g^u` becomes one of type
/// `(3g)^u`.
pub fn inflate_by_three(gdd: &Design) -> Result<Design> {
    let groups = gdd
        .groups
        .as_ref()
        .ok_or_else(|| NestError::InvalidInput("inflation needs a GDD".into()))?;
    if gdd.k() != 3 {
        return Err(NestError::InvalidInput(format!(
            "inflation needs block size 3, got {}",
            gdd.k()
        )));
    }
    let mut blocks = Vec::with_capacity(gdd.blocks.len() * 9);
    for b in &gdd.blocks {
        let [x, y, z] = [b.points()[0], b.points()[1], b.points()[2]];
        for a in 0..3 {
            for c in 0..3 {
                let d = (6 - a - c) % 3;
                blocks.push(Block::from_unsorted(vec![3 * x + a, 3 * y + c, 3 * z + d])?);
            }
        }
    }
    let groups = groups
        .iter()
        .map(|g| {
            g.iter()
                .flat_map(|&p| (0..3).map(move |a| 3 * p + a))
                .collect()
        })
        .collect();
    Ok(Design::new(DesignParams::new(3 * gdd.v(), 3, gdd.lambda()), blocks).with_groups(groups))
}

/// Partition the blocks into parallel classes that each cover every point.
///
/// Classes are filled one at a time: the lowest uncovered point picks the
/// block. Every class holds exactly one block through point 0, and classes
/// are ordered by that block. Returns `None` when no resolution exists, or
/// when `deadline` passes first.
pub fn find_resolution(design: &Design, deadline: Option<Instant>) -> Option<Resolution> {
    let v = design.v();
    let k = design.k();
    if k == 0 || !v.is_multiple_of(k) || !design.blocks.len().is_multiple_of(v / k) {
        return None;
    }
    let per_class = v / k;
    let classes = design.blocks.len() / per_class;
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (i, b) in design.blocks.iter().enumerate() {
        for &p in b.points() {
            through[p].push(i);
        }
    }
    let mut s = ResolveState {
        design,
        through,
        used: vec![false; design.blocks.len()],
        covered: vec![false; v],
        current: Vec::new(),
        done: Vec::new(),
        per_class,
        classes,
        deadline,
        nodes: 0,
        last_anchor: None,
    };
    if s.run() {
        Some(Resolution {
            classes: s
                .done
                .into_iter()
                .map(|blocks| ParallelClass { hole: None, blocks })
                .collect(),
        })
    } else {
        None
    }
}

struct ResolveState<'a> {
    design: &'a Design,
    through: Vec<Vec<usize>>,
    used: Vec<bool>,
    covered: Vec<bool>,
    current: Vec<usize>,
    done: Vec<Vec<usize>>,
    per_class: usize,
    classes: usize,
    deadline: Option<Instant>,
    nodes: u64,
    /// Block through point 0 that opened the previous class.
    last_anchor: Option<usize>,
}

impl ResolveState<'_> {
    fn timed_out(&mut self) -> bool {
        self.nodes += 1;
        self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn run(&mut self) -> bool {
        if self.done.len() == self.classes {
            return true;
        }
        if self.timed_out() {
            return false;
        }
        if self.current.len() == self.per_class {
            let class = std::mem::take(&mut self.current);
            self.done.push(class.clone());
            self.covered.iter_mut().for_each(|c| *c = false);
            let anchor = self.last_anchor;
            if self.run() {
                return true;
            }
            self.last_anchor = anchor;
            self.done.pop();
            for &b in &class {
                for &p in self.design.blocks[b].points() {
                    self.covered[p] = true;
                }
            }
            self.current = class;
            return false;
        }
        let Some(p) = self.covered.iter().position(|c| !c) else {
            return false;
        };
        let candidates = self.through[p].clone();
        for b in candidates {
            if self.used[b] {
                continue;
            }
            if p == 0 && self.last_anchor.is_some_and(|a| b < a) {
                continue;
            }
            let pts = self.design.blocks[b].points();
            if pts.iter().any(|&q| self.covered[q]) {
                continue;
            }
            let anchor = self.last_anchor;
            if p == 0 {
                self.last_anchor = Some(b);
            }
            self.used[b] = true;
            for &q in pts {
                self.covered[q] = true;
            }
            self.current.push(b);
            if self.run() {
                return true;
            }
            self.current.pop();
            for &q in self.design.blocks[b].points() {
                self.covered[q] = false;
            }
            self.used[b] = false;
            self.last_anchor = anchor;
        }
        false
    }
}

/// A minimal nesting of a GDD: every block takes an old point from a group it
/// misses, and the augmented blocks form a 4-GDD of index `λ+1`.
pub fn nest_gdd(gdd: &Design, options: &SearchOptions) -> Result<Option<Nesting>> {
    if gdd.groups.is_none() {
        return Err(NestError::InvalidInput("expected a GDD".into()));
    }
    Ok(
        match find_min_nesting(gdd, Mode::Minimal, gdd.v(), options)? {
            SearchOutcome::Found(n) => Some(n),
            _ => None,
        },
    )
}

/// Turn one parallel class of a resolvable design into groups: the remaining
/// classes form a resolvable GDD whose groups are that class's blocks.
pub fn class_as_groups(design: &Design, class: usize) -> Result<Design> {
    let resolution = design
        .resolution
        .as_ref()
        .ok_or_else(|| NestError::InvalidInput("design has no resolution".into()))?;
    let chosen = resolution
        .classes
        .get(class)
        .ok_or_else(|| NestError::InvalidInput(format!("no parallel class {class}")))?;
    let groups: Vec<Vec<Point>> = chosen
        .blocks
        .iter()
        .map(|&b| design.blocks[b].points().to_vec())
        .collect();
    let mut keep = Vec::new();
    let mut classes = Vec::new();
    for (i, c) in resolution.classes.iter().enumerate() {
        if i == class {
            continue;
        }
        let start = keep.len();
        keep.extend(c.blocks.iter().map(|&b| design.blocks[b].clone()));
        classes.push(ParallelClass {
            hole: None,
            blocks: (start..keep.len()).collect(),
        });
    }
    let out = Design::new(design.params, keep)
        .with_universe(design.universe.clone())
        .with_groups(groups)
        .with_resolution(Resolution { classes });
    let gdd = verify_gdd(&out);
    let res = verify_resolution(&out);
    if let Some(bad) = gdd.first_failure().or((!res.passed).then_some(&res)) {
        return Err(NestError::ContractViolation(format!(
            "removing class {class} did not leave a resolvable GDD: {bad:?}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_nesting;

    fn nested_2_4() -> Design {
        let blocks = [
            [0, 2, 4],
            [0, 3, 6],
            [0, 5, 7],
            [1, 2, 7],
            [1, 3, 5],
            [1, 4, 6],
            [2, 5, 6],
            [3, 4, 7],
        ]
        .iter()
        .map(|b| Block::new(b.to_vec()).unwrap())
        .collect();
        Design::new(DesignParams::new(8, 3, 1), blocks).with_groups(vec![
            vec![0, 1],
            vec![2, 3],
            vec![4, 5],
            vec![6, 7],
        ])
    }

    #[test]
    fn inflation_gives_type_six_to_the_four() {
        let big = inflate_by_three(&nested_2_4()).unwrap();
        assert_eq!(big.group_type(), Some(vec![6; 4]));
        assert_eq!(big.blocks.len(), 72);
        assert!(verify_gdd(&big).passed());
    }

    #[test]
    fn inflated_gdd_is_resolvable() {
        let big = inflate_by_three(&nested_2_4()).unwrap();
        let res = find_resolution(&big, None).expect("resolution");
        assert_eq!(res.classes.len(), 9);
        let resolved = big.with_resolution(res);
        assert!(verify_resolution(&resolved).passed);
    }

    #[test]
    fn small_gdd_nests_minimally() {
        let d = nested_2_4();
        let n = nest_gdd(&d, &SearchOptions::sequential()).unwrap().unwrap();
        assert_eq!(n.w(), 8);
        assert!(verify_nesting(&d, &n, Mode::Minimal).passed());
    }

    #[test]
    fn two_four_has_no_resolution() {
        assert_eq!(find_resolution(&nested_2_4(), None), None);
    }
}
