//! Nestings of `(v,3,2)`-BIBDs assembled by residue class of `v`.
//!
//! Every route names its ingredients before doing any work, so a missing
//! ingredient is reported up front. The result is always re-verified, and
//! its `w` must equal the closed form the route promises.

use serde::{Deserialize, Serialize};

use crate::bounds::check_optimal;
use crate::design::{Block, Design, DesignParams, Nesting, Point, PointUniverse};
use crate::develop::develop_design;
use crate::direct::sts::cyclic_sts;
use crate::direct::{fixture, nest_cyclic_orbits};
use crate::error::{NestError, Result};
use crate::search::gdd::class_as_groups;
use crate::verify::{verify_bibd, verify_nesting, Certificate, Mode};

use super::compose::{
    align_groups, assign_classes, fill_groups, frame_construction, two_copies, union_nested,
    wfc_weight, ClassRule, GroupFill, NewPoint,
};
use super::ingredients::{
    Ingredient, IngredientKind, IngredientRequest, Provider, SourcePreference,
};

/// Which construction a `(v, mode)` pair goes through.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "route")]
pub enum Route {
    /// A worked example covers this order directly.
    Fixture { name: String },
    /// Nested STS plus a cyclic STS whose orbits each get one new point.
    CyclicSts,
    /// Nested STS plus a Hanani triple system, one new point per partial class.
    Hanani,
    /// KTS with one class as groups of size 3, groups filled with two copies.
    Kts { t: usize },
    /// Nested and resolvable 3-GDDs of type `6^t`, groups filled with `(6,3,2)`.
    SixGroups { t: usize },
    /// Weighted 4-GDD of type `6^t` and a resolvable 3-GDD of type `12^t`.
    TwelveGroups { t: usize },
    /// Frame and nested GDD of type `4^{3t+1}` from a 4-GDD of type `2^{3t+1}`.
    FourFrame { t: usize },
    /// Frame and nested GDD of type `4^{3t} 10^1`.
    TenFrame { t: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub v: usize,
    pub mode: Mode,
    pub route: Route,
    /// The `w` the construction is guaranteed to reach.
    pub w: usize,
    pub requests: Vec<IngredientRequest>,
}

fn unsupported(v: usize, mode: Mode, why: &str) -> NestError {
    NestError::UnsupportedCase(format!("({v},3,2) {mode}: {why}"))
}

fn fixture_plan(v: usize, mode: Mode, name: &str) -> Result<Plan> {
    let (_, n) = fixture(name)?;
    Ok(Plan {
        v,
        mode,
        route: Route::Fixture { name: name.into() },
        w: n.w(),
        requests: vec![],
    })
}

fn req(kind: IngredientKind, sig: impl Into<String>) -> IngredientRequest {
    IngredientRequest::new(kind, sig)
}

fn nested_sts(v: usize) -> IngredientRequest {
    IngredientRequest::nested_bibd(v, 3, 1, Mode::Minimal)
        .prefer(&[SourcePreference::Search, SourcePreference::File])
}

/// Choose the construction for a `(v,3,2)`-BIBD in `mode`.
pub fn plan(v: usize, mode: Mode) -> Result<Plan> {
    if mode == Mode::Minimal {
        return Err(unsupported(
            v,
            mode,
            "a (v,3,2)-BIBD has no minimal nesting",
        ));
    }
    if v % 3 == 2 {
        return Err(NestError::InfeasibleParams { v, k: 3, lambda: 2 });
    }
    if v < 4 {
        return Err(NestError::VTooSmall { v, min: 4 });
    }
    let strong = mode == Mode::Strong;
    let filler = |n: usize| IngredientRequest::nested_bibd(n, 3, 2, mode);
    let p = |route: Route, w: usize, requests: Vec<IngredientRequest>| {
        Ok(Plan {
            v,
            mode,
            route,
            w,
            requests,
        })
    };
    match (v % 12, strong) {
        (1 | 7, false) => p(Route::CyclicSts, (7 * v - 1) / 6, vec![nested_sts(v)]),
        (1 | 7, true) => match v {
            7 => fixture_plan(v, mode, "E7strong"),
            13 => Err(unsupported(v, mode, "the Hanani route needs v ≥ 19")),
            _ => p(
                Route::Hanani,
                (3 * v).div_ceil(2),
                vec![
                    nested_sts(v),
                    req(IngredientKind::HananiTs, v.to_string()).prefer(&[SourcePreference::File]),
                ],
            ),
        },
        (3 | 9, _) => {
            if v == 9 {
                return fixture_plan(v, mode, if strong { "E9strong" } else { "E9" });
            }
            let t = (v - 3) / 6;
            let w = if strong { 9 * t + 5 } else { 7 * t + 4 };
            p(
                Route::Kts { t },
                w,
                vec![
                    req(IngredientKind::Kts, v.to_string()),
                    req(IngredientKind::NestedGdd, format!("3^{}", 2 * t + 1)),
                ],
            )
        }
        (0 | 6, _) => {
            let t = v / 6;
            match (t, strong) {
                (1, _) => fixture_plan(v, mode, if strong { "strongE6" } else { "E6" }),
                (2, _) => fixture_plan(v, mode, if strong { "E12strong" } else { "E12" }),
                (3 | 6, false) => Err(unsupported(v, mode, "t = 3 and t = 6 are excluded")),
                (_, true) if v.is_multiple_of(12) && v / 12 >= 4 => {
                    let s = v / 12;
                    p(
                        Route::TwelveGroups { t: s },
                        18 * s,
                        vec![
                            req(IngredientKind::MasterGdd, format!("6^{s}")),
                            req(IngredientKind::NestedGdd, "2^4"),
                            req(IngredientKind::ResolvableGdd, format!("12^{s}")),
                            filler(12),
                        ],
                    )
                }
                (3 | 6, true) => Err(unsupported(v, mode, "t = 3 and t = 6 are excluded")),
                _ => p(
                    Route::SixGroups { t },
                    if strong { 9 * t + 2 } else { 7 * t },
                    vec![
                        req(IngredientKind::NestedGdd, format!("6^{t}")),
                        req(IngredientKind::ResolvableGdd, format!("6^{t}")),
                        filler(6),
                    ],
                ),
            }
        }
        (4, _) => {
            if v == 4 {
                return fixture_plan(v, mode, if strong { "E4strong" } else { "E4" });
            }
            let t = (v - 4) / 12;
            if t < 2 {
                return Err(unsupported(v, mode, "the frame route needs t ≥ 2"));
            }
            p(
                Route::FourFrame { t },
                if strong { 18 * t + 7 } else { 14 * t + 6 },
                vec![
                    req(IngredientKind::MasterGdd, format!("2^{}", 3 * t + 1)),
                    req(IngredientKind::Frame, "2^4"),
                    req(IngredientKind::NestedGdd, "2^4"),
                    filler(4),
                ],
            )
        }
        (10, _) => {
            if v == 10 {
                return fixture_plan(v, mode, if strong { "E10strong" } else { "E10" });
            }
            let t = (v - 10) / 12;
            if t < 2 {
                return Err(unsupported(v, mode, "the frame route needs t ≥ 2"));
            }
            p(
                Route::TenFrame { t },
                if strong { 18 * t + 16 } else { 14 * t + 13 },
                vec![
                    req(IngredientKind::MasterGdd, format!("2^{} 5^1", 3 * t)),
                    req(IngredientKind::Frame, "2^4"),
                    req(IngredientKind::NestedGdd, "2^4"),
                    filler(4),
                    filler(10),
                ],
            )
        }
        _ => unreachable!("v ≡ 2 (mod 3) is rejected above"),
    }
}

/// A verified composed nesting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOutput {
    pub plan: Plan,
    pub design: Design,
    pub nesting: Nesting,
    pub certificate: Certificate,
}

/// Build and verify a nested `(v,3,2)`-BIBD.
pub fn pipeline(v: usize, mode: Mode, provider: &Provider) -> Result<PipelineOutput> {
    let plan = plan(v, mode)?;
    let ing = provider.resolve_all(&plan.requests)?;
    let (design, nesting) = match &plan.route {
        Route::Fixture { name } => fixture(name)?,
        Route::CyclicSts => cyclic_route(v, &ing[0])?,
        Route::Hanani => hanani_route(v, &ing[0], &ing[1])?,
        Route::Kts { .. } => {
            let resolvable = class_as_groups(&ing[0].design, 0)?;
            let (d, n, labels) = two_copies(mode);
            assemble(
                mode,
                &resolvable,
                &ing[1].design,
                ing[1].nesting()?,
                &[(&d, &n, labels)],
            )?
        }
        Route::SixGroups { .. } => {
            let filler = (
                &ing[2].design,
                ing[2].nesting()?,
                fresh_labels(ing[2].nesting()?.w() - ing[2].design.v()),
            );
            assemble(
                mode,
                &ing[1].design,
                &ing[0].design,
                ing[0].nesting()?,
                &[filler],
            )?
        }
        Route::TwelveGroups { .. } => {
            let (nested, phi) = wfc_weight(&ing[0].design, 2, &ing[1].design, ing[1].nesting()?)?;
            let filler = (
                &ing[3].design,
                ing[3].nesting()?,
                fresh_labels(ing[3].nesting()?.w() - ing[3].design.v()),
            );
            assemble(mode, &ing[2].design, &nested, &phi, &[filler])?
        }
        Route::FourFrame { .. } => frame_route(mode, &ing[0], &ing[1], &ing[2], &[&ing[3]])?,
        Route::TenFrame { .. } => {
            frame_route(mode, &ing[0], &ing[1], &ing[2], &[&ing[3], &ing[4]])?
        }
    };
    let mut cert = verify_nesting(&design, &nesting, mode);
    cert.checks
        .extend(verify_bibd(&design).checks.into_iter().map(|mut c| {
            c.name = format!("bibd:{}", c.name);
            c
        }));
    let mut cert = check_optimal(cert, mode);
    cert.provenance = ing.iter().map(Ingredient::provenance).collect();
    cert.construction = Some(route_name(&plan.route));
    if let Some(c) = cert.first_failure() {
        return Err(NestError::ContractViolation(format!(
            "{} failed verification: {c:?}",
            route_name(&plan.route)
        )));
    }
    if nesting.w() != plan.w {
        return Err(NestError::ContractViolation(format!(
            "{} gave w = {}, expected {}",
            route_name(&plan.route),
            nesting.w(),
            plan.w
        )));
    }
    Ok(PipelineOutput {
        plan,
        design,
        nesting,
        certificate: cert,
    })
}

pub fn route_name(route: &Route) -> String {
    match route {
        Route::Fixture { name } => format!("fixture {name}"),
        Route::CyclicSts => "nested STS + cyclic STS".into(),
        Route::Hanani => "nested STS + Hanani triple system".into(),
        Route::Kts { t } => format!("KTS({}) + nested 3-GDD 3^{}", 6 * t + 3, 2 * t + 1),
        Route::SixGroups { t } => format!("nested + resolvable 3-GDD 6^{t}"),
        Route::TwelveGroups { t } => format!("weighted 4-GDD 6^{t} + resolvable 3-GDD 12^{t}"),
        Route::FourFrame { t } => format!("3-frame 4^{}", 3 * t + 1),
        Route::TenFrame { t } => format!("3-frame 4^{} 10^1", 3 * t),
    }
}

fn labelled_universe(v: usize, extra: impl IntoIterator<Item = String>) -> Result<PointUniverse> {
    let mut labels: Vec<String> = (0..v).map(|p| p.to_string()).collect();
    labels.extend(extra);
    PointUniverse::with_labels(labels.len(), v, labels)
}

fn class_labels(count: usize) -> impl Iterator<Item = String> {
    (1..=count).map(|i| format!("∞_{i}"))
}

fn fresh_labels(count: usize) -> Vec<String> {
    match count {
        1 => vec!["∞".into()],
        _ => (1..=count).map(|i| format!("α_{i}")).collect(),
    }
}

/// Two STS(v) side by side: the first carries its own minimal nesting, the
/// second has its blocks split into `groups` and group `i` nested by the
/// new point `∞_{i+1}`.
fn side_by_side(
    v: usize,
    nested: &Ingredient,
    second: &[Block],
    groups: &[usize],
) -> Result<(Design, Nesting)> {
    let count = groups.iter().max().map_or(0, |&m| m + 1);
    let universe = labelled_universe(v, class_labels(count))?;
    let mut blocks = nested.design.blocks.clone();
    blocks.extend_from_slice(second);
    let mut assignment = nested.nesting()?.assignment.clone();
    assignment.extend(groups.iter().map(|g| v + g));
    let design = Design::new(DesignParams::new(v, 3, 2), blocks).with_universe(universe.old_part());
    Ok((design, Nesting::new(universe, assignment)))
}

fn cyclic_route(v: usize, nested: &Ingredient) -> Result<(Design, Nesting)> {
    let sys = cyclic_sts(v)?;
    let cyclic = develop_design(&sys)?;
    let orbits: Vec<usize> = nest_cyclic_orbits(&sys)?
        .assignment
        .iter()
        .map(|p| p - v)
        .collect();
    side_by_side(v, nested, &cyclic.blocks, &orbits)
}

fn hanani_route(v: usize, nested: &Ingredient, hanani: &Ingredient) -> Result<(Design, Nesting)> {
    let res = hanani.design.resolution.as_ref().ok_or_else(|| {
        NestError::ContractViolation("Hanani triple system without classes".into())
    })?;
    let mut class_of = vec![0; hanani.design.blocks.len()];
    for (c, class) in res.classes.iter().enumerate() {
        for &b in &class.blocks {
            class_of[b] = c;
        }
    }
    side_by_side(v, nested, &hanani.design.blocks, &class_of)
}

/// Nested GDD plus resolvable GDD on the same groups, classes nested by new
/// points (three classes to a point when weak, one when strong), and every
/// group filled with a nested `(g,3,2)`-BIBD on fresh points.
fn assemble(
    mode: Mode,
    resolvable: &Design,
    nested: &Design,
    phi: &Nesting,
    fillers: &[(&Design, &Nesting, Vec<String>)],
) -> Result<(Design, Nesting)> {
    let v = resolvable.v();
    let groups = resolvable.groups.clone().ok_or_else(|| {
        NestError::ContractViolation("resolvable ingredient has no groups".into())
    })?;
    let res = resolvable.resolution.as_ref().ok_or_else(|| {
        NestError::ContractViolation("resolvable ingredient has no resolution".into())
    })?;
    let (nested, phi) = align_groups(nested, Some(phi), &groups)?;
    let phi = phi.expect("nesting given");
    let cap = if mode == Mode::Strong { 1 } else { 3 };
    let assignment = assign_classes(res, &ClassRule::cap(cap));
    let class_nested = nest_classes(resolvable, &assignment.points, v);
    let universe = labelled_universe(v, class_labels(assignment.count))?;
    let (grouped, nesting) = union_nested(
        &[(&nested, &phi.assignment), (resolvable, &class_nested)],
        v,
        2,
        universe,
        groups.clone(),
    );
    let fills = groups
        .iter()
        .enumerate()
        .map(|(g, members)| {
            let (d, n, labels) = fillers
                .iter()
                .find(|(d, _, _)| d.v() == members.len())
                .ok_or_else(|| {
                    NestError::ContractViolation(format!(
                        "no filler for a group of size {}",
                        members.len()
                    ))
                })?;
            Ok(GroupFill {
                group: g,
                design: (*d).clone(),
                nesting: (*n).clone(),
                new_points: labels.iter().cloned().map(NewPoint::Fresh).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fill_groups(&grouped, &nesting, &fills, mode)
}

fn nest_classes(design: &Design, class_points: &[usize], v: usize) -> Vec<Point> {
    let mut nested = vec![0; design.blocks.len()];
    for (c, class) in design
        .resolution
        .as_ref()
        .expect("resolution")
        .classes
        .iter()
        .enumerate()
    {
        for &b in &class.blocks {
            nested[b] = v + class_points[c];
        }
    }
    nested
}

/// Weighted nested GDD and frame from one master 4-GDD, holey classes nested
/// by class points, groups filled with nested `(4,3,2)` or `(10,3,2)`
/// designs.
///
/// Strong: one class per point, and each group's filler reuses the points of
/// its own hole before taking the shared fresh `∞`. Weak: three classes per
/// point; size-4 groups take only `∞`, while a larger group's classes form a
/// pool of their own whose points its filler reuses.
fn frame_route(
    mode: Mode,
    master: &Ingredient,
    frame: &Ingredient,
    small: &Ingredient,
    fillers: &[&Ingredient],
) -> Result<(Design, Nesting)> {
    let (nested, phi) = wfc_weight(&master.design, 2, &small.design, small.nesting()?)?;
    let f = frame_construction(&master.design, 2, &frame.design)?;
    let groups = f.groups.clone().expect("frame groups");
    let v = f.v();
    let res = f.resolution.as_ref().expect("frame classes");
    let rule = match mode {
        Mode::Strong => ClassRule::cap(1),
        _ => ClassRule {
            cap: 3,
            separate_holes: groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.len() != 4)
                .map(|(i, _)| i)
                .collect(),
        },
    };
    let assignment = assign_classes(res, &rule);
    let class_nested = nest_classes(&f, &assignment.points, v);
    let universe = labelled_universe(v, class_labels(assignment.count))?;
    let (grouped, nesting) = union_nested(
        &[(&nested, &phi.assignment), (&f, &class_nested)],
        v,
        2,
        universe,
        groups.clone(),
    );
    let mut fills = Vec::with_capacity(groups.len());
    for (g, members) in groups.iter().enumerate() {
        let filler = fillers
            .iter()
            .find(|f| f.design.v() == members.len())
            .ok_or_else(|| {
                NestError::ContractViolation(format!(
                    "no filler for a group of size {}",
                    members.len()
                ))
            })?;
        let n = filler.nesting()?;
        let extra = n.w() - filler.design.v();
        let reusable: Vec<Point> = if members.len() == 4 && mode != Mode::Strong {
            Vec::new()
        } else {
            assignment
                .exclusive_to(res, g)
                .into_iter()
                .map(|p| v + p)
                .collect()
        };
        let mut new_points: Vec<NewPoint> = reusable
            .iter()
            .take(extra)
            .map(|&p| NewPoint::Reuse(p))
            .collect();
        if new_points.len() + 1 < extra {
            return Err(NestError::ContractViolation(format!(
                "group {g} needs more than one fresh point"
            )));
        }
        if new_points.len() < extra {
            new_points.push(NewPoint::Fresh("∞".into()));
        }
        fills.push(GroupFill {
            group: g,
            design: filler.design.clone(),
            nesting: n.clone(),
            new_points,
        });
    }
    fill_groups(&grouped, &nesting, &fills, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_follow_residues() {
        assert_eq!(plan(15, Mode::Weak).unwrap().w, 18);
        assert_eq!(plan(28, Mode::Weak).unwrap().w, 34);
        assert_eq!(plan(28, Mode::Strong).unwrap().w, 43);
        assert_eq!(plan(24, Mode::Weak).unwrap().w, 28);
        assert_eq!(plan(24, Mode::Strong).unwrap().w, 38);
        assert_eq!(plan(48, Mode::Strong).unwrap().w, 72);
        assert_eq!(plan(19, Mode::Weak).unwrap().w, 22);
        assert_eq!(plan(19, Mode::Strong).unwrap().w, 29);
        assert_eq!(plan(34, Mode::Weak).unwrap().w, 41);
        assert_eq!(plan(34, Mode::Strong).unwrap().w, 52);
        assert_eq!(plan(6, Mode::Strong).unwrap().w, 11);
    }

    #[test]
    fn exception_lists() {
        for (v, mode) in [
            (18, Mode::Weak),
            (36, Mode::Weak),
            (18, Mode::Strong),
            (13, Mode::Strong),
            (16, Mode::Weak),
            (22, Mode::Strong),
        ] {
            assert!(
                matches!(plan(v, mode), Err(NestError::UnsupportedCase(_))),
                "{v} {mode}"
            );
        }
        assert!(matches!(
            plan(8, Mode::Weak),
            Err(NestError::InfeasibleParams { .. })
        ));
        assert!(matches!(
            plan(7, Mode::Minimal),
            Err(NestError::UnsupportedCase(_))
        ));
    }

    #[test]
    fn kts_route_at_fifteen() {
        let out = pipeline(15, Mode::Weak, &Provider::default()).unwrap();
        assert_eq!(out.nesting.w(), 18);
        assert!(out.certificate.passed());
        let strong = pipeline(15, Mode::Strong, &Provider::default()).unwrap();
        assert_eq!(strong.nesting.w(), 23);
    }

    #[test]
    fn frame_routes_at_twenty_eight() {
        let weak = pipeline(28, Mode::Weak, &Provider::default()).unwrap();
        assert_eq!(weak.nesting.w(), 34);
        let strong = pipeline(28, Mode::Strong, &Provider::default()).unwrap();
        assert_eq!(strong.nesting.w(), 43);
        assert_eq!(strong.certificate.provenance.len(), 4);
    }

    #[test]
    fn six_groups_at_twenty_four() {
        let weak = pipeline(24, Mode::Weak, &Provider::default()).unwrap();
        assert_eq!(weak.nesting.w(), 28);
        let strong = pipeline(24, Mode::Strong, &Provider::default()).unwrap();
        assert_eq!(strong.nesting.w(), 38);
    }

    #[test]
    fn cyclic_route_small_orders() {
        for v in [7, 13, 19] {
            let out = pipeline(v, Mode::Weak, &Provider::default()).unwrap();
            assert_eq!(out.nesting.w(), (7 * v - 1) / 6);
        }
    }

    #[test]
    fn hanani_route_from_file() {
        let provider =
            Provider::default().with_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data"));
        let out = pipeline(19, Mode::Strong, &provider).unwrap();
        assert_eq!(out.nesting.w(), 29);
        assert!(out
            .certificate
            .provenance
            .iter()
            .any(|p| p.source.starts_with("FILE:")));
    }

    #[test]
    fn missing_hanani_is_reported() {
        let err = pipeline(19, Mode::Strong, &Provider::default()).unwrap_err();
        assert!(
            matches!(err, NestError::MissingIngredient(ref r) if r.kind == IngredientKind::HananiTs),
            "{err}"
        );
        assert_eq!(err.exit_code(), 2);
    }
}
