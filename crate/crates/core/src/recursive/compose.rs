//! Building blocks for composed nestings: weighting a master GDD, the
//! fundamental frame construction, attaching new points to parallel classes,
//! and filling groups with small nested designs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::design::{
    Block, Design, DesignParams, Nesting, ParallelClass, Point, PointUniverse, Resolution,
};
use crate::error::{NestError, Result};
use crate::pairs::{pair_counts, PairCountTable};
use crate::verify::{verify_gdd, verify_nesting, verify_resolution, Mode};

fn require_groups(d: &Design, what: &str) -> Result<Vec<Vec<Point>>> {
    d.groups
        .clone()
        .ok_or_else(|| NestError::InvalidInput(format!("{what} must be a GDD")))
}

/// Where filler point `q` lands when the filler's group `j` is laid over
/// master point `b[j]`, each master point blown up into `weight` points.
fn blow_up_map(
    filler_groups: &[Vec<Point>],
    block: &[Point],
    weight: usize,
    fv: usize,
) -> Result<Vec<Point>> {
    let mut map = vec![usize::MAX; fv];
    for (j, g) in filler_groups.iter().enumerate() {
        if g.len() != weight {
            return Err(NestError::InvalidInput(format!(
                "filler group {j} has {} points, weight is {weight}",
                g.len()
            )));
        }
        for (i, &q) in g.iter().enumerate() {
            map[q] = block[j] * weight + i;
        }
    }
    Ok(map)
}

fn blown_groups(groups: &[Vec<Point>], weight: usize) -> Vec<Vec<Point>> {
    groups
        .iter()
        .map(|g| {
            g.iter()
                .flat_map(|&p| (0..weight).map(move |i| p * weight + i))
                .collect()
        })
        .collect()
}

/// Wilson's fundamental construction: give every master point `weight`
/// copies and replace each master block by a nested filler GDD of type
/// `weight^k` on the copies of its points.
///
/// The output is a GDD whose group type is the master's times `weight`,
/// together with a nesting that needs no new points.
pub fn wfc_weight(
    master: &Design,
    weight: usize,
    filler: &Design,
    filler_nesting: &Nesting,
) -> Result<(Design, Nesting)> {
    let groups = require_groups(master, "master")?;
    let fgroups = require_groups(filler, "filler")?;
    if fgroups.len() != master.k() {
        return Err(NestError::InvalidInput(format!(
            "filler has {} groups, master blocks have {} points",
            fgroups.len(),
            master.k()
        )));
    }
    if filler_nesting.w() != filler.v() {
        return Err(NestError::InvalidInput(
            "filler nesting must use no new points".into(),
        ));
    }
    let v = master.v() * weight;
    let mut blocks = Vec::with_capacity(master.blocks.len() * filler.blocks.len());
    let mut assignment = Vec::with_capacity(blocks.capacity());
    for mb in &master.blocks {
        let map = blow_up_map(&fgroups, mb.points(), weight, filler.v())?;
        for (fb, &p) in filler.blocks.iter().zip(&filler_nesting.assignment) {
            blocks.push(fb.mapped(|q| map[q])?);
            assignment.push(map[p]);
        }
    }
    let design = Design::new(DesignParams::new(v, filler.k(), filler.lambda()), blocks)
        .with_groups(blown_groups(&groups, weight));
    let nesting = Nesting::new(PointUniverse::plain(v), assignment);
    let gdd = verify_gdd(&design);
    let nest = verify_nesting(&design, &nesting, Mode::Minimal);
    if let Some(c) = gdd.first_failure().or(nest.first_failure()) {
        return Err(NestError::ContractViolation(format!(
            "weighted construction failed: {c:?}"
        )));
    }
    Ok((design, nesting))
}

/// The fundamental frame construction: give every master point `weight`
/// copies and replace each master block by a frame of type `weight^k`.
///
/// Master point `x` and the `s`-th filler class with its hole at `x`'s
/// position together give one holey class of the output, with the hole at
/// `x`'s group. Classes come out ordered by hole.
pub fn frame_construction(master: &Design, weight: usize, filler: &Design) -> Result<Design> {
    let groups = require_groups(master, "master")?;
    let fgroups = require_groups(filler, "filler frame")?;
    let fres = filler
        .resolution
        .as_ref()
        .ok_or_else(|| NestError::InvalidInput("filler frame has no holey classes".into()))?;
    if fgroups.len() != master.k() {
        return Err(NestError::InvalidInput(format!(
            "filler frame has {} groups, master blocks have {} points",
            fgroups.len(),
            master.k()
        )));
    }
    // filler classes by hole, in order
    let mut by_hole: Vec<Vec<&ParallelClass>> = vec![Vec::new(); fgroups.len()];
    for c in &fres.classes {
        let h = c
            .hole
            .ok_or_else(|| NestError::InvalidInput("filler class without a hole".into()))?;
        by_hole
            .get_mut(h)
            .ok_or_else(|| NestError::InvalidInput(format!("filler hole {h} is not a group")))?
            .push(c);
    }
    let master_group = master.group_of().expect("groups checked");
    let v = master.v() * weight;
    let mut blocks = Vec::new();
    // (hole group, master point, slot) → block indices
    let mut classes: BTreeMap<(usize, Point, usize), Vec<usize>> = BTreeMap::new();
    for mb in &master.blocks {
        let map = blow_up_map(&fgroups, mb.points(), weight, filler.v())?;
        for (j, hole_classes) in by_hole.iter().enumerate() {
            let x = mb.points()[j];
            let g = master_group[x]
                .ok_or_else(|| NestError::InvalidInput(format!("point {x} is in no group")))?;
            for (slot, class) in hole_classes.iter().enumerate() {
                for &b in &class.blocks {
                    classes.entry((g, x, slot)).or_default().push(blocks.len());
                    blocks.push(filler.blocks[b].mapped(|q| map[q])?);
                }
            }
        }
    }
    let resolution = Resolution {
        classes: classes
            .into_iter()
            .map(|((g, _, _), blocks)| ParallelClass {
                hole: Some(g),
                blocks,
            })
            .collect(),
    };
    let design = Design::new(DesignParams::new(v, filler.k(), filler.lambda()), blocks)
        .with_groups(blown_groups(&groups, weight))
        .with_resolution(resolution);
    let gdd = verify_gdd(&design);
    if let Some(c) = gdd.first_failure() {
        return Err(NestError::ContractViolation(format!(
            "frame construction failed: {c:?}"
        )));
    }
    let res = verify_resolution(&design);
    if !res.passed {
        return Err(NestError::ContractViolation(format!(
            "frame construction failed: {:?}",
            res.witness
        )));
    }
    Ok(design)
}

/// How new points are attached to parallel classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRule {
    /// Most classes any one new point may serve.
    pub cap: usize,
    /// Holes whose classes draw on a pool of their own, after the shared one.
    pub separate_holes: Vec<usize>,
}

impl ClassRule {
    pub fn cap(cap: usize) -> Self {
        ClassRule {
            cap,
            separate_holes: Vec::new(),
        }
    }
}

/// New point (numbered from 0) for each class, by class index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAssignment {
    pub points: Vec<usize>,
    pub count: usize,
    pub cap: usize,
}

impl ClassAssignment {
    /// Points whose every class has hole `g`; only these may be reused inside
    /// the filling of group `g`.
    pub fn exclusive_to(&self, resolution: &Resolution, g: usize) -> Vec<usize> {
        let mut holes: BTreeMap<usize, BTreeSet<Option<usize>>> = BTreeMap::new();
        for (c, &p) in self.points.iter().enumerate() {
            holes
                .entry(p)
                .or_default()
                .insert(resolution.classes[c].hole);
        }
        holes
            .into_iter()
            .filter(|(_, h)| h.len() == 1 && h.contains(&Some(g)))
            .map(|(p, _)| p)
            .collect()
    }
}

/// Attach new points to classes in canonical order (by hole, then index),
/// filling each point up to the cap before opening the next.
pub fn assign_classes(resolution: &Resolution, rule: &ClassRule) -> ClassAssignment {
    assert!(rule.cap > 0, "class cap must be positive");
    let mut order: Vec<usize> = (0..resolution.classes.len()).collect();
    order.sort_by_key(|&c| (resolution.classes[c].hole, c));
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); 1 + rule.separate_holes.len()];
    for c in order {
        let pool = resolution.classes[c]
            .hole
            .and_then(|h| rule.separate_holes.iter().position(|&s| s == h))
            .map_or(0, |i| i + 1);
        pools[pool].push(c);
    }
    let mut points = vec![0; resolution.classes.len()];
    let mut next = 0;
    for pool in pools {
        for (j, &c) in pool.iter().enumerate() {
            points[c] = next + j / rule.cap;
        }
        next += pool.len().div_ceil(rule.cap);
    }
    ClassAssignment {
        points,
        count: next,
        cap: rule.cap,
    }
}

/// A nested design placed on one group, with its new points mapped to
/// points of the surrounding construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFill {
    pub group: usize,
    pub design: Design,
    pub nesting: Nesting,
    /// One entry per new point of the filler, in order.
    pub new_points: Vec<NewPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NewPoint {
    /// A point the construction already has.
    Reuse(Point),
    /// A further new point; fills sharing a label share the point.
    Fresh(String),
}

/// Two copies of a triple, both nested (weak: one new point `∞`; strong:
/// `∞` and `∞′`).
pub fn two_copies(mode: Mode) -> (Design, Nesting, Vec<String>) {
    let b = Block::new(vec![0, 1, 2]).expect("sorted");
    let design = Design::new(DesignParams::new(3, 3, 2), vec![b.clone(), b]);
    let labels: Vec<String> = match mode {
        Mode::Strong => vec!["∞".into(), "∞′".into()],
        _ => vec!["∞".into()],
    };
    let assignment = if labels.len() == 2 {
        vec![3, 4]
    } else {
        vec![3, 3]
    };
    let mut all: Vec<String> = (0..3).map(|p: usize| p.to_string()).collect();
    all.extend(labels.iter().cloned());
    let universe = PointUniverse::with_labels(3 + labels.len(), 3, all).expect("label count");
    (design, Nesting::new(universe, assignment), labels)
}

/// Union of the grouped blocks with one filler per group.
///
/// Reused points are checked before anything is merged: in strong mode a
/// reused point may not already meet any point of the group; in weak mode
/// every pair it forms must keep its count at or below `λ+1`. The caller is
/// expected to run full verification on the result.
pub fn fill_groups(
    grouped: &Design,
    nesting: &Nesting,
    fills: &[GroupFill],
    mode: Mode,
) -> Result<(Design, Nesting)> {
    let groups = require_groups(grouped, "grouped design")?;
    let v = grouped.v();
    let mut covered = vec![false; groups.len()];
    let mut labels = nesting.universe.all_labels();
    let mut fresh: BTreeMap<String, Point> = BTreeMap::new();
    let mut blocks = grouped.blocks.clone();
    let mut assignment = nesting.assignment.clone();
    let before = augmented_counts(grouped, nesting);
    let lambda = fills
        .first()
        .map_or(grouped.lambda(), |f| f.design.lambda());
    let cap = lambda as u32 + 1;
    for fill in fills {
        let members = groups
            .get(fill.group)
            .ok_or_else(|| NestError::InvalidInput(format!("no group {}", fill.group)))?;
        if std::mem::replace(&mut covered[fill.group], true) {
            return Err(NestError::InvalidInput(format!(
                "group {} filled twice",
                fill.group
            )));
        }
        let fv = fill.design.v();
        if fv != members.len() || fill.nesting.w() != fv + fill.new_points.len() {
            return Err(NestError::InvalidInput(format!(
                "filler for group {} has v = {fv}, w = {}; group has {} points and {} new points are mapped",
                fill.group,
                fill.nesting.w(),
                members.len(),
                fill.new_points.len()
            )));
        }
        let mut map: Vec<Point> = members.clone();
        for np in &fill.new_points {
            map.push(match np {
                NewPoint::Reuse(p) => *p,
                NewPoint::Fresh(label) => *fresh.entry(label.clone()).or_insert_with(|| {
                    labels.push(label.clone());
                    labels.len() - 1
                }),
            });
        }
        let filler_aug: Vec<Block> = fill
            .design
            .blocks
            .iter()
            .zip(&fill.nesting.assignment)
            .map(|(b, &p)| {
                b.with_point(p)
                    .ok_or_else(|| NestError::NestedPointInsideBlock(vec![]))
            })
            .collect::<Result<_>>()?;
        let added = pair_counts(filler_aug.iter(), fill.nesting.w());
        for (j, np) in fill.new_points.iter().enumerate() {
            let NewPoint::Reuse(p) = np else { continue };
            let q = fv + j;
            for (x, &gx) in members.iter().enumerate() {
                let prior = if *p < before.w() {
                    before.get(gx, *p)
                } else {
                    0
                };
                let extra = added.get(x, q);
                let illegal = match mode {
                    Mode::Strong | Mode::Minimal => prior > 0,
                    Mode::Weak => prior + extra > cap,
                };
                if illegal {
                    return Err(NestError::IllegalReuse {
                        point: labels[*p].clone(),
                        pair: (labels[gx].clone(), labels[*p].clone()),
                    });
                }
            }
        }
        for (b, &p) in fill.design.blocks.iter().zip(&fill.nesting.assignment) {
            blocks.push(b.mapped(|q| map[q])?);
            assignment.push(map[p]);
        }
    }
    if let Some(g) = covered.iter().position(|c| !c) {
        return Err(NestError::InvalidInput(format!("group {g} has no filler")));
    }
    let w = labels.len();
    let universe = PointUniverse::with_labels(w, v, labels)?;
    let design = Design::new(DesignParams::new(v, grouped.k(), lambda), blocks)
        .with_universe(universe.old_part());
    Ok((design, Nesting::new(universe, assignment)))
}

/// Relabel `design` (and its nesting) so its groups become `target`, matched
/// in order among groups of equal size.
pub fn align_groups(
    design: &Design,
    nesting: Option<&Nesting>,
    target: &[Vec<Point>],
) -> Result<(Design, Option<Nesting>)> {
    let groups = require_groups(design, "design")?;
    let v = design.v();
    let mut free: Vec<bool> = vec![true; target.len()];
    let mut perm = vec![usize::MAX; v];
    for g in &groups {
        let t = (0..target.len())
            .find(|&t| free[t] && target[t].len() == g.len())
            .ok_or_else(|| NestError::InvalidInput("group types differ".into()))?;
        free[t] = false;
        for (&from, &to) in g.iter().zip(&target[t]) {
            perm[from] = to;
        }
    }
    let relabelled = design.relabelled(&perm)?;
    let nesting = nesting.map(|n| {
        let assignment = n
            .assignment
            .iter()
            .map(|&p| if p < v { perm[p] } else { p })
            .collect();
        Nesting::new(n.universe.clone(), assignment)
    });
    Ok((relabelled, nesting))
}

/// Blocks of several designs on the same points and groups, with their
/// nestings placed side by side.
pub fn union_nested(
    parts: &[(&Design, &[Point])],
    v: usize,
    lambda: usize,
    universe: PointUniverse,
    groups: Vec<Vec<Point>>,
) -> (Design, Nesting) {
    let mut blocks = Vec::new();
    let mut assignment = Vec::new();
    for (d, nested) in parts {
        blocks.extend(d.blocks.iter().cloned());
        assignment.extend_from_slice(nested);
    }
    let k = parts.first().map_or(3, |(d, _)| d.k());
    let design = Design::new(DesignParams::new(v, k, lambda), blocks)
        .with_universe(universe.old_part())
        .with_groups(groups);
    (design, Nesting::new(universe, assignment))
}

/// Pair counts of the augmented blocks, for reuse checks in tests and callers.
pub fn augmented_counts(design: &Design, nesting: &Nesting) -> PairCountTable {
    let aug: Vec<Block> = design
        .blocks
        .iter()
        .zip(&nesting.assignment)
        .filter_map(|(b, &p)| b.with_point(p))
        .collect();
    pair_counts(aug.iter(), nesting.w())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursive::ingredients::{IngredientKind, IngredientRequest, Provider};

    fn get(kind: IngredientKind, sig: &str) -> crate::recursive::ingredients::Ingredient {
        Provider::default()
            .fetch(&IngredientRequest::new(kind, sig))
            .unwrap()
    }

    #[test]
    fn wfc_on_two_to_the_seven() {
        let master = get(IngredientKind::MasterGdd, "2^7");
        let filler = get(IngredientKind::NestedGdd, "2^4");
        let (d, n) =
            wfc_weight(&master.design, 2, &filler.design, filler.nesting().unwrap()).unwrap();
        assert_eq!(d.group_type(), Some(vec![4; 7]));
        assert_eq!(n.w(), 28);
    }

    #[test]
    fn wfc_of_empty_master_is_empty() {
        let filler = get(IngredientKind::NestedGdd, "2^4");
        let single = Design::new(DesignParams::new(2, 4, 1), vec![]).with_groups(vec![vec![0, 1]]);
        let (d, n) = wfc_weight(&single, 2, &filler.design, filler.nesting().unwrap()).unwrap();
        assert!(d.blocks.is_empty());
        assert!(n.assignment.is_empty());
    }

    #[test]
    fn frame_from_two_to_the_seven_has_fourteen_classes() {
        let master = get(IngredientKind::MasterGdd, "2^7");
        let frame = get(IngredientKind::Frame, "2^4");
        let f = frame_construction(&master.design, 2, &frame.design).unwrap();
        let res = f.resolution.as_ref().unwrap();
        assert_eq!(res.classes.len(), 14);
        assert_eq!(res.classes.len(), f.v() / 2);
        for g in 0..7 {
            assert_eq!(res.classes.iter().filter(|c| c.hole == Some(g)).count(), 2);
        }
    }

    #[test]
    fn class_caps() {
        let full = |n: usize| Resolution {
            classes: (0..n)
                .map(|_| ParallelClass {
                    hole: None,
                    blocks: vec![],
                })
                .collect(),
        };
        let a = assign_classes(&full(6), &ClassRule::cap(3));
        assert_eq!(a.count, 2);
        assert_eq!(a.points, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(assign_classes(&full(9), &ClassRule::cap(1)).count, 9);
        let holey = Resolution {
            classes: (0..14)
                .map(|c| ParallelClass {
                    hole: Some(c / 2),
                    blocks: vec![],
                })
                .collect(),
        };
        let one = assign_classes(&holey, &ClassRule::cap(1));
        assert_eq!(one.count, 14);
        assert_eq!(one.exclusive_to(&holey, 3), vec![6, 7]);
        let three = assign_classes(&holey, &ClassRule::cap(3));
        assert_eq!(three.count, 5);
        assert!(three.exclusive_to(&holey, 0).is_empty());
        let split = Resolution {
            classes: (0..17)
                .map(|c| ParallelClass {
                    hole: Some((c / 2).min(6)),
                    blocks: vec![],
                })
                .collect(),
        };
        let s = assign_classes(
            &split,
            &ClassRule {
                cap: 3,
                separate_holes: vec![6],
            },
        );
        assert_eq!(s.count, 6);
        assert_eq!(s.exclusive_to(&split, 6), vec![4, 5]);
    }

    #[test]
    fn strong_reuse_of_a_met_point_is_illegal() {
        // the block {0,3,4} is nested by ∞_1, so ∞_1 already meets the first group
        let grouped = Design::new(
            DesignParams::new(6, 3, 2),
            vec![Block::new(vec![0, 3, 4]).unwrap()],
        )
        .with_groups(vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let mut labels: Vec<String> = (0..6).map(|p: usize| p.to_string()).collect();
        labels.push("∞_1".into());
        let nesting = Nesting::new(PointUniverse::with_labels(7, 6, labels).unwrap(), vec![6]);
        let (d, n, _) = two_copies(Mode::Strong);
        let fills = vec![
            GroupFill {
                group: 0,
                design: d.clone(),
                nesting: n.clone(),
                new_points: vec![NewPoint::Reuse(6), NewPoint::Fresh("∞".into())],
            },
            GroupFill {
                group: 1,
                design: d,
                nesting: n,
                new_points: vec![NewPoint::Fresh("∞".into()), NewPoint::Fresh("∞′".into())],
            },
        ];
        let err = fill_groups(&grouped, &nesting, &fills, Mode::Strong).unwrap_err();
        assert!(matches!(err, NestError::IllegalReuse { .. }), "{err:?}");
    }

    #[test]
    fn alignment_moves_groups() {
        let d = Design::new(
            DesignParams::new(4, 2, 1),
            vec![Block::new(vec![0, 2]).unwrap()],
        )
        .with_groups(vec![vec![0, 1], vec![2, 3]]);
        let (a, _) = align_groups(&d, None, &[vec![1, 3], vec![0, 2]]).unwrap();
        assert_eq!(a.groups, Some(vec![vec![1, 3], vec![0, 2]]));
        assert_eq!(a.blocks, vec![Block::new(vec![0, 1]).unwrap()]);
    }
}
