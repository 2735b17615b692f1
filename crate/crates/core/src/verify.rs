//! Independent checkers for designs, GDDs, resolutions and nestings.
//!
//! Everything here is recomputed from the raw blocks; construction metadata
//! is never trusted. A failing check carries the first violation in
//! canonical (lexicographic) order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::design::{augment, Block, Design, DesignParams, Nesting, Point, PointUniverse};
use crate::format::{design_hash, nesting_hash};
use crate::pairs::{pair_counts, PairCountTable};

/// Which kind of nesting is being checked or searched for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    Strong,
    Minimal,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
            Mode::Minimal => "minimal",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            "minimal" => Ok(Mode::Minimal),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NestingClass {
    Weak,
    Strong,
    Minimal,
    Perfect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Pair {
        points: [Point; 2],
        labels: [String; 2],
        count: u32,
        expected: String,
    },
    Block {
        index: usize,
        detail: String,
    },
    Point {
        point: Point,
        label: String,
        detail: String,
    },
    Note {
        detail: String,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Pair {
                labels,
                count,
                expected,
                ..
            } => write!(
                f,
                "pair {{{},{}}} occurs {count} times (expected {expected})",
                labels[0], labels[1]
            ),
            Witness::Block { index, detail } => write!(f, "block {index}: {detail}"),
            Witness::Point { label, detail, .. } => write!(f, "point {label}: {detail}"),
            Witness::Note { detail } => f.write_str(detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
    /// Informational checks are reported but do not decide the verdict.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Check {
    pub fn pass(name: &str) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            witness: None,
            informational: false,
        }
    }

    pub fn fail(name: &str, witness: Witness) -> Self {
        Check {
            name: name.to_string(),
            passed: false,
            witness: Some(witness),
            informational: false,
        }
    }

    pub fn from_witness(name: &str, witness: Option<Witness>) -> Self {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}{}", self.name);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subject {
    pub design: String,
    pub nesting: Option<String>,
}

/// Where an ingredient of a composed construction came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub ingredient: String,
    pub source: String,
    pub hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub subject: Subject,
    pub params: DesignParams,
    pub checks: Vec<Check>,
    pub classification: BTreeSet<NestingClass>,
    pub w: Option<usize>,
    pub bound: Option<BoundReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
}

impl Certificate {
    fn new(design: &Design, nesting: Option<&Nesting>, checks: Vec<Check>) -> Self {
        Certificate {
            subject: Subject {
                design: design_hash(design),
                nesting: nesting.map(|n| nesting_hash(design, n)),
            },
            params: design.params,
            checks,
            classification: BTreeSet::new(),
            w: nesting.map(|n| n.w()),
            bound: None,
            provenance: Vec::new(),
            construction: None,
        }
    }

    /// Every non-informational check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed && !c.informational)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn has(&self, class: NestingClass) -> bool {
        self.classification.contains(&class)
    }

    /// Classification flags respect PERFECT ⇒ MINIMAL ⇒ STRONG ⇒ WEAK.
    pub fn chain_consistent(&self) -> bool {
        use NestingClass::*;
        let has = |c| self.classification.contains(&c);
        (!has(Perfect) || has(Minimal))
            && (!has(Minimal) || has(Strong))
            && (!has(Strong) || has(Weak))
    }
}

fn pair_witness(
    universe: &PointUniverse,
    x: Point,
    y: Point,
    count: u32,
    expected: String,
) -> Witness {
    Witness::Pair {
        points: [x, y],
        labels: [universe.label(x), universe.label(y)],
        count,
        expected,
    }
}

fn block_size_check(design: &Design) -> Check {
    let k = design.k();
    Check::from_witness(
        "block-size",
        design
            .blocks
            .iter()
            .position(|b| b.len() != k)
            .map(|i| Witness::Block {
                index: i,
                detail: format!("has {} points, expected {k}", design.blocks[i].len()),
            }),
    )
}

fn point_range_check(design: &Design) -> Check {
    let v = design.v();
    Check::from_witness(
        "point-range",
        design
            .blocks
            .iter()
            .position(|b| b.max_point().is_some_and(|p| p >= v))
            .map(|i| Witness::Block {
                index: i,
                detail: format!("uses a point outside 0..{v}"),
            }),
    )
}

/// A `(v,k,λ)`-BIBD: every block has `k` points and every pair lies in exactly `λ` blocks.
pub fn verify_bibd(design: &Design) -> Certificate {
    let mut checks = vec![Check::from_witness(
        "no-groups",
        design.groups.as_ref().map(|_| Witness::Note {
            detail: "design carries groups; use GDD verification".into(),
        }),
    )];
    checks.push(block_size_check(design));
    let expected_b = design.params.block_count();
    checks.push(Check::from_witness(
        "block-count",
        (expected_b != Some(design.blocks.len())).then(|| Witness::Note {
            detail: format!("{} blocks, expected {:?}", design.blocks.len(), expected_b),
        }),
    ));
    let range = point_range_check(design);
    let in_range = range.passed;
    checks.push(range);
    if in_range {
        let lambda = design.lambda() as u32;
        let table = pair_counts(&design.blocks, design.v());
        checks.push(Check::from_witness(
            "pair-balance",
            table
                .first_violation(|_, _, c| c == lambda)
                .map(|(x, y, c)| pair_witness(&design.universe, x, y, c, lambda.to_string())),
        ));
    }
    Certificate::new(design, None, checks)
}

/// Partial design check: every pair occurs in at most `cap` blocks.
pub fn verify_partial(blocks: &[Block], w: usize, cap: u32) -> Check {
    verify_partial_labelled(blocks, &PointUniverse::plain(w), cap)
}

fn verify_partial_labelled(blocks: &[Block], universe: &PointUniverse, cap: u32) -> Check {
    if let Some(i) = blocks
        .iter()
        .position(|b| b.max_point().is_some_and(|p| p >= universe.size()))
    {
        return Check::fail(
            "partial-index",
            Witness::Block {
                index: i,
                detail: format!("uses a point outside 0..{}", universe.size()),
            },
        );
    }
    let table = pair_counts(blocks, universe.size());
    Check::from_witness(
        "partial-index",
        table
            .first_violation(|_, _, c| c <= cap)
            .map(|(x, y, c)| pair_witness(universe, x, y, c, format!("≤ {cap}"))),
    )
}

fn gdd_checks(design: &Design) -> Vec<Check> {
    let v = design.v();
    let Some(groups) = &design.groups else {
        return vec![Check::fail(
            "groups-present",
            Witness::Note {
                detail: "design has no groups".into(),
            },
        )];
    };
    let mut checks = vec![Check::pass("groups-present")];
    let mut owner = vec![usize::MAX; v];
    let mut partition_witness = None;
    for (g, members) in groups.iter().enumerate() {
        for &p in members {
            if p >= v || owner[p] != usize::MAX {
                partition_witness.get_or_insert(Witness::Point {
                    point: p,
                    label: design.label(p.min(v.saturating_sub(1))),
                    detail: format!("out of range or in more than one group (group {g})"),
                });
            } else {
                owner[p] = g;
            }
        }
    }
    if partition_witness.is_none() {
        if let Some(p) = owner.iter().position(|&g| g == usize::MAX) {
            partition_witness = Some(Witness::Point {
                point: p,
                label: design.label(p),
                detail: "in no group".into(),
            });
        }
    }
    let partitioned = partition_witness.is_none();
    checks.push(Check::from_witness("groups-partition", partition_witness));
    checks.push(block_size_check(design));
    let range = point_range_check(design);
    let in_range = range.passed;
    checks.push(range);
    if !(partitioned && in_range) {
        return checks;
    }
    let meets = design.blocks.iter().enumerate().find_map(|(i, b)| {
        let pts = b.points();
        pts.iter()
            .enumerate()
            .find_map(|(a, &x)| {
                pts[a + 1..]
                    .iter()
                    .find(|&&y| owner[x] == owner[y])
                    .map(|&y| (x, y))
            })
            .map(|(x, y)| Witness::Block {
                index: i,
                detail: format!(
                    "meets group {} in {} and {}",
                    owner[x],
                    design.label(x),
                    design.label(y)
                ),
            })
    });
    checks.push(Check::from_witness("block-meets-group-once", meets));
    let lambda = design.lambda() as u32;
    let table = pair_counts(&design.blocks, v);
    checks.push(Check::from_witness(
        "cross-group-pairs",
        table
            .first_violation(|x, y, c| owner[x] == owner[y] || c == lambda)
            .map(|(x, y, c)| pair_witness(&design.universe, x, y, c, lambda.to_string())),
    ));
    checks.push(Check::from_witness(
        "within-group-pairs",
        table
            .first_violation(|x, y, c| owner[x] != owner[y] || c == 0)
            .map(|(x, y, c)| pair_witness(&design.universe, x, y, c, "0".into())),
    ));
    checks
}

/// A `(k,λ)`-GDD: groups partition the points, blocks meet each group at most
/// once, cross-group pairs occur `λ` times and within-group pairs never.
pub fn verify_gdd(design: &Design) -> Certificate {
    Certificate::new(design, None, gdd_checks(design))
}

/// Parallel classes partition the point set (full) or the points off their hole
/// group (holey); a frame has exactly `|G|/2` classes per group `G`.
pub fn verify_resolution(design: &Design) -> Check {
    const NAME: &str = "resolution";
    let Some(resolution) = &design.resolution else {
        return Check::fail(
            NAME,
            Witness::Note {
                detail: "design has no resolution".into(),
            },
        );
    };
    let v = design.v();
    let mut class_of = vec![usize::MAX; design.blocks.len()];
    for (ci, class) in resolution.classes.iter().enumerate() {
        for &b in &class.blocks {
            if b >= design.blocks.len() {
                return Check::fail(
                    NAME,
                    Witness::Note {
                        detail: format!("class {ci} refers to missing block {b}"),
                    },
                );
            }
            if class_of[b] != usize::MAX {
                return Check::fail(
                    NAME,
                    Witness::Block {
                        index: b,
                        detail: format!("in classes {} and {ci}", class_of[b]),
                    },
                );
            }
            class_of[b] = ci;
        }
    }
    if let Some(b) = class_of.iter().position(|&c| c == usize::MAX) {
        return Check::fail(
            NAME,
            Witness::Block {
                index: b,
                detail: "in no class".into(),
            },
        );
    }
    let groups = design.groups.as_deref().unwrap_or(&[]);
    for (ci, class) in resolution.classes.iter().enumerate() {
        let mut expected = vec![true; v];
        if let Some(h) = class.hole {
            let Some(hole) = groups.get(h) else {
                return Check::fail(
                    NAME,
                    Witness::Note {
                        detail: format!("class {ci} has hole {h}, which is not a group"),
                    },
                );
            };
            for &p in hole {
                if p < v {
                    expected[p] = false;
                }
            }
        }
        let mut covered = vec![false; v];
        for &b in &class.blocks {
            for &p in design.blocks[b].points() {
                if p >= v || !expected[p] || std::mem::replace(&mut covered[p], true) {
                    return Check::fail(
                        NAME,
                        Witness::Block {
                            index: b,
                            detail: format!(
                                "point {} repeated or inside the hole of class {ci}",
                                design.label(p.min(v - 1))
                            ),
                        },
                    );
                }
            }
        }
        if let Some(p) = (0..v).find(|&p| expected[p] && !covered[p]) {
            return Check::fail(
                NAME,
                Witness::Point {
                    point: p,
                    label: design.label(p),
                    detail: format!("not covered by class {ci}"),
                },
            );
        }
    }
    if resolution.classes.iter().any(|c| c.hole.is_some()) {
        for (g, members) in groups.iter().enumerate() {
            let count = resolution
                .classes
                .iter()
                .filter(|c| c.hole == Some(g))
                .count();
            if members.len() % 2 != 0 || count != members.len() / 2 {
                return Check::fail(
                    NAME,
                    Witness::Note {
                        detail: format!(
                            "group {g} of size {} has {count} holey classes",
                            members.len()
                        ),
                    },
                );
            }
        }
    }
    Check::pass(NAME)
}

fn underlying_checks(design: &Design) -> Vec<Check> {
    let checks = if design.groups.is_some() {
        gdd_checks(design)
    } else {
        verify_bibd(design).checks
    };
    checks.into_iter().map(|c| c.prefixed("design:")).collect()
}

fn nesting_shape_check(design: &Design, nesting: &Nesting) -> Check {
    let witness = if nesting.assignment.len() != design.blocks.len() {
        Some(Witness::Note {
            detail: format!(
                "{} nested points for {} blocks",
                nesting.assignment.len(),
                design.blocks.len()
            ),
        })
    } else if nesting.universe.old_count() != design.v() {
        Some(Witness::Note {
            detail: format!(
                "universe has {} old points, design has {}",
                nesting.universe.old_count(),
                design.v()
            ),
        })
    } else {
        nesting
            .assignment
            .iter()
            .position(|&p| p >= nesting.w())
            .map(|i| Witness::Block {
                index: i,
                detail: format!("nested point outside 0..{}", nesting.w()),
            })
    };
    Check::from_witness("nesting-total", witness)
}

struct WeakOutcome {
    checks: Vec<Check>,
    augmented: Option<Design>,
}

fn weak_checks(design: &Design, nesting: &Nesting) -> WeakOutcome {
    let mut checks = underlying_checks(design);
    let shape = nesting_shape_check(design, nesting);
    let shaped = shape.passed;
    checks.push(shape);
    if !shaped {
        return WeakOutcome {
            checks,
            augmented: None,
        };
    }
    let augmented = match augment(design, nesting) {
        Ok(a) => {
            checks.push(Check::pass("nested-point-outside-block"));
            a
        }
        Err(crate::error::NestError::NestedPointInsideBlock(idx)) => {
            checks.push(Check::fail(
                "nested-point-outside-block",
                Witness::Block {
                    index: idx[0],
                    detail: format!(
                        "nested point {} lies inside the block",
                        nesting.universe.label(nesting.assignment[idx[0]])
                    ),
                },
            ));
            return WeakOutcome {
                checks,
                augmented: None,
            };
        }
        Err(e) => {
            checks.push(Check::fail(
                "nested-point-outside-block",
                Witness::Note {
                    detail: e.to_string(),
                },
            ));
            return WeakOutcome {
                checks,
                augmented: None,
            };
        }
    };
    checks.push(verify_partial_labelled(
        &augmented.blocks,
        &nesting.universe,
        design.lambda() as u32 + 1,
    ));
    if let Some(owner) = design.group_of() {
        let clash = design
            .blocks
            .iter()
            .zip(&nesting.assignment)
            .enumerate()
            .find_map(|(i, (b, &p))| {
                let g = *owner.get(p)?;
                let g = g?;
                b.points()
                    .iter()
                    .any(|&x| owner[x] == Some(g))
                    .then(|| Witness::Block {
                        index: i,
                        detail: format!(
                            "nested point {} shares group {g} with the block",
                            nesting.universe.label(p)
                        ),
                    })
            });
        checks.push(Check::from_witness("augmented-meets-group-once", clash));
    }
    WeakOutcome {
        checks,
        augmented: Some(augmented),
    }
}

/// Multiset `{ {x, φ(A)} : x ∈ A }` has no repeats.
fn nested_pairs_check(design: &Design, nesting: &Nesting) -> Check {
    let mut pairs: Vec<(Point, Point)> = design
        .blocks
        .iter()
        .zip(&nesting.assignment)
        .flat_map(|(b, &p)| {
            b.points()
                .iter()
                .map(move |&x| if x < p { (x, p) } else { (p, x) })
        })
        .collect();
    pairs.sort_unstable();
    let dup = pairs.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
    Check::from_witness(
        "nested-pairs-distinct",
        dup.map(|(x, y)| {
            let count = pairs.iter().filter(|&&q| q == (x, y)).count() as u32;
            pair_witness(&nesting.universe, x, y, count, "1 as a nested pair".into())
        }),
    )
}

/// Weak nesting: the augmented blocks form a partial `(w, k+1, λ+1)` design.
pub fn verify_weak_nesting(design: &Design, nesting: &Nesting) -> Certificate {
    let outcome = weak_checks(design, nesting);
    let mut cert = Certificate::new(design, Some(nesting), outcome.checks);
    if cert.passed() {
        cert.classification.insert(NestingClass::Weak);
    }
    cert
}

/// Strong nesting: weak, and every pair `{x, φ(A)}` with `x ∈ A` is distinct.
pub fn verify_strong_nesting(design: &Design, nesting: &Nesting) -> Certificate {
    let outcome = weak_checks(design, nesting);
    let weak_ok = outcome.checks.iter().all(|c| c.passed);
    let mut checks = outcome.checks;
    if outcome.augmented.is_some() {
        checks.push(nested_pairs_check(design, nesting));
    }
    let mut cert = Certificate::new(design, Some(nesting), checks);
    if weak_ok {
        cert.classification.insert(NestingClass::Weak);
    }
    if cert.passed() {
        cert.classification.insert(NestingClass::Strong);
    }
    cert
}

fn augmented_is_full(design: &Design, augmented: &Design) -> bool {
    let target = design.lambda() as u32 + 1;
    let table: PairCountTable = pair_counts(&augmented.blocks, augmented.universe.size());
    match design.group_of() {
        Some(owner) => table.iter().all(|(x, y, c)| {
            if owner[x] == owner[y] {
                c == 0
            } else {
                c == target
            }
        }),
        None => table.iter().all(|(_, _, c)| c == target),
    }
}

/// Classify a nesting as WEAK / STRONG / MINIMAL / PERFECT.
///
/// The verdict (`passed`) is the weak check; strong distinctness is reported
/// as an informational check. For minimal nestings of BIBDs the equivalence
/// `k = 2λ+1 ⇔ v = 2r+1 ⇔ perfect` is cross-checked and any disagreement is
/// reported as a failing `minimal-equivalences` check.
pub fn classify(design: &Design, nesting: &Nesting) -> Certificate {
    let outcome = weak_checks(design, nesting);
    let weak_ok = outcome.checks.iter().all(|c| c.passed);
    let mut checks = outcome.checks;
    let mut classes = BTreeSet::new();
    if let Some(augmented) = &outcome.augmented {
        let strong = nested_pairs_check(design, nesting);
        let strong_ok = weak_ok && strong.passed;
        checks.push(strong.informational());
        if weak_ok {
            classes.insert(NestingClass::Weak);
        }
        if strong_ok {
            classes.insert(NestingClass::Strong);
        }
        let minimal = weak_ok && nesting.w() == design.v();
        if minimal {
            // a weak nesting with no new points is automatically strong
            checks.push(Check::from_witness(
                "minimal-implies-strong",
                (!strong_ok).then(|| Witness::Note {
                    detail: "minimal nesting with repeated nested pairs".into(),
                }),
            ));
            classes.insert(NestingClass::Minimal);
            let perfect = augmented_is_full(design, augmented);
            if perfect {
                classes.insert(NestingClass::Perfect);
            }
            if design.groups.is_none() {
                let p = design.params;
                let k_eq = p.k == 2 * p.lambda + 1;
                let v_eq = p.replication().is_some_and(|r| p.v == 2 * r + 1);
                checks.push(Check::from_witness(
                    "minimal-equivalences",
                    (k_eq != v_eq || v_eq != perfect).then(|| Witness::Note {
                        detail: format!("k=2λ+1: {k_eq}, v=2r+1: {v_eq}, perfect: {perfect}"),
                    }),
                ));
            }
        }
    }
    let mut cert = Certificate::new(design, Some(nesting), checks);
    cert.classification = classes;
    cert
}

/// Verify in the requested mode.
pub fn verify_nesting(design: &Design, nesting: &Nesting, mode: Mode) -> Certificate {
    match mode {
        Mode::Weak => verify_weak_nesting(design, nesting),
        Mode::Strong => verify_strong_nesting(design, nesting),
        Mode::Minimal => {
            let mut cert = verify_strong_nesting(design, nesting);
            let minimal = nesting.w() == design.v();
            cert.checks.push(Check::from_witness(
                "no-new-points",
                (!minimal).then(|| Witness::Note {
                    detail: format!("w = {} > v = {}", nesting.w(), design.v()),
                }),
            ));
            if cert.passed() {
                cert.classification.insert(NestingClass::Minimal);
            }
            cert
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::DesignParams;

    fn blk(p: &[Point]) -> Block {
        Block::new(p.to_vec()).unwrap()
    }

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

    fn fano() -> Design {
        let blocks = (0..7)
            .map(|i| Block::from_unsorted(vec![i, (i + 1) % 7, (i + 3) % 7]).unwrap())
            .collect();
        Design::new(DesignParams::new(7, 3, 1), blocks)
    }

    #[test]
    fn fano_is_a_bibd() {
        assert!(verify_bibd(&fano()).passed());
    }

    #[test]
    fn repeated_block_breaks_balance() {
        let mut d = fano();
        d.blocks[6] = d.blocks[0].clone();
        let cert = verify_bibd(&d);
        assert!(!cert.passed());
        let check = cert.first_failure().unwrap();
        assert_eq!(check.name, "pair-balance");
        assert!(matches!(
            check.witness,
            Some(Witness::Pair { count: 2, .. }) | Some(Witness::Pair { count: 0, .. })
        ));
    }

    #[test]
    fn partial_caps() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(5, 4), vec![4; 4]);
        let aug = augment(&d, &n).unwrap();
        assert!(verify_partial(&aug.blocks, 5, 3).passed);
        assert!(verify_partial(&d.blocks, 4, 2).passed);
        let two = verify_partial(&aug.blocks, 5, 2);
        assert!(!two.passed);
        // {0,4} (i.e. {1,∞1}) is lexicographically first among the pairs hit 3 times
        assert!(matches!(
            two.witness,
            Some(Witness::Pair {
                points: [0, 4],
                count: 3,
                ..
            })
        ));
    }

    #[test]
    fn weak_but_not_strong() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(5, 4), vec![4; 4]);
        assert!(verify_weak_nesting(&d, &n).passed());
        let strong = verify_strong_nesting(&d, &n);
        assert!(!strong.passed());
        let w = strong.first_failure().unwrap();
        assert_eq!(w.name, "nested-pairs-distinct");
        assert!(matches!(
            w.witness,
            Some(Witness::Pair { points: [0, 4], .. })
        ));
        let c = classify(&d, &n);
        assert_eq!(c.classification, [NestingClass::Weak].into_iter().collect());
    }

    #[test]
    fn nested_point_inside_fails() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(4, 4), vec![0; 4]);
        let cert = verify_weak_nesting(&d, &n);
        assert_eq!(
            cert.first_failure().unwrap().name,
            "nested-point-outside-block"
        );
    }

    #[test]
    fn strong_example() {
        let d = four_three_two();
        let n = Nesting::new(PointUniverse::new(7, 4), vec![3, 4, 5, 6]);
        let c = classify(&d, &n);
        assert!(c.passed());
        assert!(c.has(NestingClass::Strong) && !c.has(NestingClass::Minimal));
        assert!(c.chain_consistent());
    }

    #[test]
    fn perfect_nested_fano() {
        // {1,2,4} nested by 0, developed mod 7
        let blocks = (0..7)
            .map(|i| Block::from_unsorted(vec![(1 + i) % 7, (2 + i) % 7, (4 + i) % 7]).unwrap())
            .collect();
        let d = Design::new(DesignParams::new(7, 3, 1), blocks);
        let n = Nesting::new(PointUniverse::plain(7), (0..7).collect());
        let c = classify(&d, &n);
        assert!(c.passed(), "{:?}", c.first_failure());
        assert_eq!(c.classification.len(), 4);
    }

    #[test]
    fn gdd_and_resolution() {
        // AG(2,3): grid 0..8; rows become groups
        let lines: [[Point; 3]; 12] = [
            [0, 1, 2],
            [3, 4, 5],
            [6, 7, 8],
            [0, 3, 6],
            [1, 4, 7],
            [2, 5, 8],
            [0, 4, 8],
            [1, 5, 6],
            [2, 3, 7],
            [0, 5, 7],
            [1, 3, 8],
            [2, 4, 6],
        ];
        let blocks: Vec<Block> = lines.iter().map(|l| blk(l)).collect();
        let classes = (0..4)
            .map(|c| crate::design::ParallelClass {
                hole: None,
                blocks: vec![3 * c, 3 * c + 1, 3 * c + 2],
            })
            .collect();
        let ag = Design::new(DesignParams::new(9, 3, 1), blocks.clone())
            .with_resolution(crate::design::Resolution { classes });
        assert!(verify_bibd(&ag).passed());
        assert!(verify_resolution(&ag).passed);
        let mut moved = ag.clone();
        let res = moved.resolution.as_mut().unwrap();
        let b = res.classes[0].blocks.pop().unwrap();
        res.classes[1].blocks.push(b);
        assert!(!verify_resolution(&moved).passed);

        let gdd = Design::new(DesignParams::new(9, 3, 1), blocks[3..].to_vec()).with_groups(vec![
            vec![0, 1, 2],
            vec![3, 4, 5],
            vec![6, 7, 8],
        ]);
        assert!(verify_gdd(&gdd).passed());
        let one_group = fano().with_groups(vec![(0..7).collect()]);
        assert!(!verify_gdd(&one_group).passed());
    }
}
