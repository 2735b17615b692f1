//! Ingredient requests and the provider chain that satisfies them.
//!
//! A request is tried against the built-in catalog, then bounded search,
//! then design files found on `NESTKIT_INGREDIENT_PATH`, in the order the
//! request prefers. Whatever a tier returns is verified for its kind before
//! it is handed to a pipeline.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::design::{Design, DesignParams, Nesting, Point};
use crate::direct::fixture;
use crate::error::{NestError, Result};
use crate::format::{design_hash, from_file, nesting_hash, parse_design_file};
use crate::search::cyclic::nested_cyclic_sts;
use crate::search::gdd::{class_as_groups, find_resolution, inflate_by_three, nest_gdd};
use crate::search::SearchOptions;
use crate::verify::{verify_bibd, verify_gdd, verify_nesting, verify_resolution, Mode, Provenance};

/// Environment variable holding extra ingredient directories, separated like `PATH`.
pub const INGREDIENT_PATH_VAR: &str = "NESTKIT_INGREDIENT_PATH";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IngredientKind {
    NestedGdd,
    ResolvableGdd,
    Frame,
    Kts,
    NestedBibd,
    HananiTs,
    MasterGdd,
}

impl IngredientKind {
    pub fn tag(self) -> &'static str {
        match self {
            IngredientKind::NestedGdd => "NESTED_GDD",
            IngredientKind::ResolvableGdd => "RESOLVABLE_GDD",
            IngredientKind::Frame => "FRAME",
            IngredientKind::Kts => "KTS",
            IngredientKind::NestedBibd => "NESTED_BIBD",
            IngredientKind::HananiTs => "HANANI_TS",
            IngredientKind::MasterGdd => "MASTER_GDD",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        use IngredientKind::*;
        [
            NestedGdd,
            ResolvableGdd,
            Frame,
            Kts,
            NestedBibd,
            HananiTs,
            MasterGdd,
        ]
        .into_iter()
        .find(|k| k.tag() == tag)
    }
}

impl fmt::Display for IngredientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SourcePreference {
    Fixture,
    Search,
    File,
}

impl fmt::Display for SourcePreference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourcePreference::Fixture => "FIXTURE",
            SourcePreference::Search => "SEARCH",
            SourcePreference::File => "FILE",
        })
    }
}

/// What a pipeline needs before it can start.
///
/// Signatures: a group type such as `3^5` or `2^6 5^1` for GDDs and frames,
/// the order for `KTS` and `HANANI_TS`, and `(v,k,λ):mode` for nested BIBDs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IngredientRequest {
    pub kind: IngredientKind,
    pub signature: String,
    pub prefer: Vec<SourcePreference>,
}

impl IngredientRequest {
    pub fn new(kind: IngredientKind, signature: impl Into<String>) -> Self {
        IngredientRequest {
            kind,
            signature: signature.into(),
            prefer: vec![
                SourcePreference::Fixture,
                SourcePreference::Search,
                SourcePreference::File,
            ],
        }
    }

    pub fn prefer(mut self, order: &[SourcePreference]) -> Self {
        self.prefer = order.to_vec();
        self
    }

    pub fn nested_bibd(v: usize, k: usize, lambda: usize, mode: Mode) -> Self {
        Self::new(
            IngredientKind::NestedBibd,
            format!("({v},{k},{lambda}):{mode}"),
        )
    }
}

impl fmt::Display for IngredientRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} [", self.kind, self.signature)?;
        for (i, p) in self.prefer.iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// Group type as `g^n` terms, smallest group size first.
pub fn type_signature(sizes: &[usize]) -> String {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let mut terms: Vec<String> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&s| s == sorted[i]).count();
        terms.push(format!("{}^{}", sorted[i], j));
        i += j;
    }
    terms.join(" ")
}

/// Inverse of [`type_signature`]: group sizes with multiplicity.
pub fn parse_type_signature(sig: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for term in sig.split_whitespace() {
        let (g, n) = term.split_once('^')?;
        let (g, n): (usize, usize) = (g.parse().ok()?, n.parse().ok()?);
        out.extend(std::iter::repeat_n(g, n));
    }
    (!out.is_empty()).then_some(out)
}

fn parse_bibd_signature(sig: &str) -> Option<(DesignParams, Mode)> {
    let (params, mode) = sig.split_once(':')?;
    let nums: Vec<usize> = params
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.trim().parse().ok())
        .collect::<Option<_>>()?;
    let [v, k, lambda] = nums[..] else {
        return None;
    };
    Some((DesignParams::new(v, k, lambda), mode.parse().ok()?))
}

/// A verified ingredient and where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ingredient {
    pub request: IngredientRequest,
    pub design: Design,
    pub nesting: Option<Nesting>,
    pub source: String,
}

impl Ingredient {
    pub fn provenance(&self) -> Provenance {
        Provenance {
            ingredient: format!("{} {}", self.request.kind, self.request.signature),
            source: self.source.clone(),
            hash: match &self.nesting {
                Some(n) => nesting_hash(&self.design, n),
                None => design_hash(&self.design),
            },
        }
    }

    pub fn nesting(&self) -> Result<&Nesting> {
        self.nesting.as_ref().ok_or_else(|| {
            NestError::ContractViolation(format!("{} carries no nesting", self.request))
        })
    }
}

macro_rules! builtin {
    ($file:literal) => {
        include_str!(concat!("../../ingredients/", $file, ".json"))
    };
}

const BUILTIN: &[&str] = &[
    builtin!("kts-9"),
    builtin!("kts-15"),
    builtin!("nested-gdd-2^4"),
    builtin!("frame-2^4"),
    builtin!("master-gdd-2^7"),
];

/// Which nested-BIBD fixture serves which signature.
const NESTED_FIXTURES: &[(&str, &str)] = &[
    ("(4,3,2):weak", "E4"),
    ("(4,3,2):strong", "E4strong"),
    ("(6,3,2):weak", "E6"),
    ("(6,3,2):strong", "strongE6"),
    ("(7,3,2):weak", "E7"),
    ("(7,3,2):strong", "E7strong"),
    ("(9,3,2):weak", "E9"),
    ("(9,3,2):strong", "E9strong"),
    ("(10,3,2):weak", "E10"),
    ("(10,3,2):strong", "E10strong"),
    ("(12,3,2):weak", "E12"),
    ("(12,3,2):strong", "E12strong"),
];

/// Resolves ingredient requests through the three tiers.
#[derive(Clone, Debug)]
pub struct Provider {
    pub search: SearchOptions,
    /// Budget for each search-tier attempt.
    pub search_timeout: Duration,
    pub dirs: Vec<PathBuf>,
}

impl Default for Provider {
    fn default() -> Self {
        Provider {
            search: SearchOptions::default(),
            search_timeout: Duration::from_secs(30),
            dirs: Vec::new(),
        }
    }
}

impl Provider {
    /// Default provider plus every directory on `NESTKIT_INGREDIENT_PATH`.
    pub fn from_env() -> Self {
        let dirs = std::env::var_os(INGREDIENT_PATH_VAR)
            .map(|v| {
                std::env::split_paths(&v)
                    .filter(|p| !p.as_os_str().is_empty())
                    .collect()
            })
            .unwrap_or_default();
        Provider {
            dirs,
            ..Provider::default()
        }
    }

    pub fn with_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.dirs.push(dir.into());
        self
    }

    pub fn with_search(mut self, search: SearchOptions) -> Self {
        self.search = search;
        self
    }

    /// Satisfy every request, failing on the first one that no tier can meet.
    pub fn resolve_all(&self, requests: &[IngredientRequest]) -> Result<Vec<Ingredient>> {
        requests.iter().map(|r| self.fetch(r)).collect()
    }

    pub fn fetch(&self, request: &IngredientRequest) -> Result<Ingredient> {
        for tier in &request.prefer {
            let found = match tier {
                SourcePreference::Fixture => self.try_catalog(request)?,
                SourcePreference::Search => self.try_search(request)?,
                SourcePreference::File => self.try_files(request)?,
            };
            if let Some((design, nesting, source)) = found {
                check_ingredient(request, &design, nesting.as_ref())?;
                return Ok(Ingredient {
                    request: request.clone(),
                    design,
                    nesting,
                    source,
                });
            }
        }
        Err(NestError::MissingIngredient(request.clone()))
    }

    fn try_catalog(
        &self,
        request: &IngredientRequest,
    ) -> Result<Option<(Design, Option<Nesting>, String)>> {
        if request.kind == IngredientKind::NestedBibd {
            return match NESTED_FIXTURES
                .iter()
                .find(|(sig, _)| *sig == request.signature)
            {
                Some((_, name)) => {
                    let (d, n) = fixture(name)?;
                    Ok(Some((d, Some(n), format!("FIXTURE:{name}"))))
                }
                None => Ok(None),
            };
        }
        for text in BUILTIN {
            let file = parse_design_file(text)?;
            if tag_matches(&file.ingredient, request) {
                let (d, n) = from_file(&file)?;
                return Ok(Some((
                    d,
                    n,
                    format!("FIXTURE:{}-{}", request.kind, request.signature),
                )));
            }
        }
        Ok(None)
    }

    fn try_files(
        &self,
        request: &IngredientRequest,
    ) -> Result<Option<(Design, Option<Nesting>, String)>> {
        for dir in &self.dirs {
            let Ok(entries) = std::fs::read_dir(dir) else {
                continue;
            };
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for path in paths {
                if let Some(found) = load_file(&path, request)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }

    fn try_search(
        &self,
        request: &IngredientRequest,
    ) -> Result<Option<(Design, Option<Nesting>, String)>> {
        let source = |what: &str| format!("SEARCH:{what}");
        let opts = SearchOptions {
            timeout: Some(self.search_timeout),
            ..self.search
        };
        match request.kind {
            IngredientKind::NestedBibd => {
                let Some((params, mode)) = parse_bibd_signature(&request.signature) else {
                    return Ok(None);
                };
                if params.k != 3 || params.lambda != 1 || mode != Mode::Minimal {
                    return Ok(None);
                }
                match nested_cyclic_sts(params.v, 16) {
                    Ok(Some(sys)) => {
                        let (d, n) = crate::develop::develop(&sys)?;
                        Ok(Some((d, Some(n), source("nested cyclic STS"))))
                    }
                    Ok(None) | Err(NestError::NoCyclicSts(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            }
            IngredientKind::ResolvableGdd => {
                let Some(sizes) = parse_type_signature(&request.signature) else {
                    return Ok(None);
                };
                match uniform(&sizes) {
                    Some((3, u)) => {
                        let kts = self.fetch(&IngredientRequest::new(
                            IngredientKind::Kts,
                            (3 * u).to_string(),
                        ));
                        match kts {
                            Ok(k) => Ok(Some((
                                class_as_groups(&k.design, 0)?,
                                None,
                                source("KTS with one class as groups"),
                            ))),
                            Err(NestError::MissingIngredient(_)) => Ok(None),
                            Err(e) => Err(e),
                        }
                    }
                    Some((6, 4)) => {
                        let big = self.inflated_six_four()?;
                        let deadline = Instant::now() + self.search_timeout;
                        Ok(find_resolution(&big, Some(deadline)).map(|r| {
                            (
                                big.with_resolution(r),
                                None,
                                source("weight-3 inflation, resolved"),
                            )
                        }))
                    }
                    _ => Ok(None),
                }
            }
            IngredientKind::NestedGdd => {
                let Some(sizes) = parse_type_signature(&request.signature) else {
                    return Ok(None);
                };
                let base = match uniform(&sizes) {
                    Some((3, u)) => {
                        let resolvable = self.fetch(&IngredientRequest::new(
                            IngredientKind::ResolvableGdd,
                            format!("3^{u}"),
                        ));
                        match resolvable {
                            Ok(r) => rotate_within_groups(&r.design)?,
                            Err(NestError::MissingIngredient(_)) => return Ok(None),
                            Err(e) => return Err(e),
                        }
                    }
                    Some((6, 4)) => rotate_within_groups(&self.inflated_six_four()?)?,
                    _ => return Ok(None),
                };
                let base = Design {
                    resolution: None,
                    ..base
                };
                Ok(nest_gdd(&base, &opts)?
                    .map(|n| (base, Some(n), source("minimal nesting of a GDD"))))
            }
            _ => Ok(None),
        }
    }

    fn inflated_six_four(&self) -> Result<Design> {
        let small = self.fetch(
            &IngredientRequest::new(IngredientKind::NestedGdd, "2^4")
                .prefer(&[SourcePreference::Fixture]),
        )?;
        inflate_by_three(&small.design)
    }
}

fn uniform(sizes: &[usize]) -> Option<(usize, usize)> {
    let g = *sizes.first()?;
    sizes.iter().all(|&s| s == g).then_some((g, sizes.len()))
}

/// Shift every group's points one step around the group. The groups stay the
/// same sets; the blocks change, so a nested copy differs from the resolvable
/// copy it is paired with.
fn rotate_within_groups(gdd: &Design) -> Result<Design> {
    let groups = gdd
        .groups
        .as_ref()
        .ok_or_else(|| NestError::InvalidInput("expected a GDD".into()))?;
    let mut perm: Vec<Point> = (0..gdd.v()).collect();
    for g in groups {
        for (i, &p) in g.iter().enumerate() {
            perm[p] = g[(i + 1) % g.len()];
        }
    }
    gdd.relabelled(&perm)
}

fn tag_matches(tag: &Option<crate::format::IngredientTag>, request: &IngredientRequest) -> bool {
    tag.as_ref()
        .is_some_and(|t| t.kind == request.kind.tag() && t.signature == request.signature)
}

fn load_file(
    path: &Path,
    request: &IngredientRequest,
) -> Result<Option<(Design, Option<Nesting>, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| NestError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let Ok(file) = parse_design_file(&text) else {
        return Ok(None);
    };
    if !tag_matches(&file.ingredient, request) {
        return Ok(None);
    }
    let (d, n) = from_file(&file)?;
    Ok(Some((d, n, format!("FILE:{}", path.display()))))
}

fn fail(request: &IngredientRequest, why: impl fmt::Display) -> NestError {
    NestError::ContractViolation(format!("ingredient {request} failed verification: {why}"))
}

/// Verify an ingredient against what its kind promises.
pub fn check_ingredient(
    request: &IngredientRequest,
    design: &Design,
    nesting: Option<&Nesting>,
) -> Result<()> {
    let gdd_of_type = |want: &str| -> Result<()> {
        let cert = verify_gdd(design);
        if let Some(c) = cert.first_failure() {
            return Err(fail(request, format!("{c:?}")));
        }
        let got = type_signature(&design.group_type().unwrap_or_default());
        if got != want {
            return Err(fail(request, format!("group type {got}")));
        }
        Ok(())
    };
    let resolved = || -> Result<()> {
        let c = verify_resolution(design);
        if c.passed {
            Ok(())
        } else {
            Err(fail(request, format!("{:?}", c.witness)))
        }
    };
    let sig = request.signature.as_str();
    match request.kind {
        IngredientKind::MasterGdd => gdd_of_type(sig),
        IngredientKind::ResolvableGdd | IngredientKind::Frame => {
            gdd_of_type(sig)?;
            resolved()?;
            let holey = design
                .resolution
                .as_ref()
                .is_some_and(|r| r.classes.iter().all(|c| c.hole.is_some()));
            if holey != (request.kind == IngredientKind::Frame) {
                return Err(fail(request, "wrong kind of parallel classes"));
            }
            Ok(())
        }
        IngredientKind::NestedGdd => {
            gdd_of_type(sig)?;
            let n = nesting.ok_or_else(|| fail(request, "no nesting"))?;
            let cert = verify_nesting(design, n, Mode::Minimal);
            match cert.first_failure() {
                Some(c) => Err(fail(request, format!("{c:?}"))),
                None => Ok(()),
            }
        }
        IngredientKind::Kts | IngredientKind::HananiTs => {
            if design.params != DesignParams::new(sig.parse().unwrap_or(0), 3, 1) {
                return Err(fail(request, format!("parameters {:?}", design.params)));
            }
            if let Some(c) = verify_bibd(design).first_failure() {
                return Err(fail(request, format!("{c:?}")));
            }
            if request.kind == IngredientKind::Kts {
                resolved()
            } else {
                hanani_classes(design).map_err(|why| fail(request, why))
            }
        }
        IngredientKind::NestedBibd => {
            let (params, mode) =
                parse_bibd_signature(sig).ok_or_else(|| fail(request, "bad signature"))?;
            if design.params != params {
                return Err(fail(request, format!("parameters {:?}", design.params)));
            }
            if let Some(c) = verify_bibd(design).first_failure() {
                return Err(fail(request, format!("{c:?}")));
            }
            let n = nesting.ok_or_else(|| fail(request, "no nesting"))?;
            match verify_nesting(design, n, mode).first_failure() {
                Some(c) => Err(fail(request, format!("{c:?}"))),
                None => Ok(()),
            }
        }
    }
}

/// `(v−1)/2` near-parallel classes of `(v−1)/3` disjoint blocks and one
/// partial class of `(v−1)/6` disjoint blocks.
fn hanani_classes(design: &Design) -> std::result::Result<(), String> {
    let v = design.v();
    if v % 6 != 1 {
        return Err(format!("order {v} is not 1 mod 6"));
    }
    let classes = &design.resolution.as_ref().ok_or("no classes")?.classes;
    if classes.len() != v.div_ceil(2) {
        return Err(format!(
            "{} classes, expected {}",
            classes.len(),
            v.div_ceil(2)
        ));
    }
    let mut sizes: Vec<usize> = classes.iter().map(|c| c.blocks.len()).collect();
    sizes.sort_unstable();
    let mut want = vec![(v - 1) / 3; (v - 1) / 2];
    want.insert(0, (v - 1) / 6);
    if sizes != want {
        return Err(format!("class sizes {sizes:?}"));
    }
    let mut seen = vec![false; design.blocks.len()];
    for (ci, c) in classes.iter().enumerate() {
        let mut covered = vec![false; v];
        for &b in &c.blocks {
            if b >= seen.len() || std::mem::replace(&mut seen[b], true) {
                return Err(format!("block {b} repeated or missing"));
            }
            for &p in design.blocks[b].points() {
                if std::mem::replace(&mut covered[p], true) {
                    return Err(format!("class {ci} meets point {p} twice"));
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err("some block is in no class".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures_round_trip() {
        assert_eq!(type_signature(&[5, 2, 2, 2, 2, 2, 2]), "2^6 5^1");
        assert_eq!(
            parse_type_signature("2^6 5^1"),
            Some(vec![2, 2, 2, 2, 2, 2, 5])
        );
        assert_eq!(parse_type_signature("junk"), None);
        assert_eq!(
            parse_bibd_signature("(4,3,2):strong"),
            Some((DesignParams::new(4, 3, 2), Mode::Strong))
        );
    }

    #[test]
    fn request_display_names_the_chain() {
        let r = IngredientRequest::new(IngredientKind::NestedGdd, "3^5");
        assert_eq!(r.to_string(), "NESTED_GDD 3^5 [FIXTURE > SEARCH > FILE]");
    }

    #[test]
    fn builtins_load_and_verify() {
        let p = Provider::default();
        for (kind, sig) in [
            (IngredientKind::Kts, "9"),
            (IngredientKind::Kts, "15"),
            (IngredientKind::NestedGdd, "2^4"),
            (IngredientKind::Frame, "2^4"),
            (IngredientKind::MasterGdd, "2^7"),
        ] {
            let ing = p.fetch(&IngredientRequest::new(kind, sig)).unwrap();
            assert!(
                ing.source.starts_with("FIXTURE"),
                "{kind} {sig}: {}",
                ing.source
            );
        }
    }

    #[test]
    fn search_tier_finds_small_gdds() {
        let p = Provider::default();
        let nested = p
            .fetch(&IngredientRequest::new(IngredientKind::NestedGdd, "3^5"))
            .unwrap();
        assert!(nested.source.starts_with("SEARCH"));
        let res = p
            .fetch(&IngredientRequest::new(
                IngredientKind::ResolvableGdd,
                "3^5",
            ))
            .unwrap();
        assert_eq!(res.design.groups, nested.design.groups);
        assert_ne!(res.design.blocks, nested.design.blocks);
    }

    #[test]
    fn missing_ingredient_names_the_request() {
        let p = Provider::default();
        let req = IngredientRequest::new(IngredientKind::HananiTs, "19");
        assert_eq!(p.fetch(&req), Err(NestError::MissingIngredient(req)));
    }

    #[test]
    fn file_tier_reads_tagged_designs() {
        let dir = std::env::temp_dir().join(format!("nestkit-ingredients-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("master.json"), builtin!("master-gdd-2^7")).unwrap();
        let req = IngredientRequest::new(IngredientKind::MasterGdd, "2^7")
            .prefer(&[SourcePreference::File]);
        let ing = Provider::default().with_dir(&dir).fetch(&req).unwrap();
        assert!(ing.source.starts_with("FILE:"));
        let none = Provider::default().fetch(&req);
        assert!(matches!(none, Err(NestError::MissingIngredient(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
