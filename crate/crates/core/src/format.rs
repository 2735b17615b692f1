//! On-disk formats.
//!
//! A design file is UTF-8 JSON with LF line endings:
//!
//! ```text
//! {"v":…, "k":…, "lambda":…, "w":…, "labels":[…], "groups":[[…]]|null,
//!  "blocks":[[…]…], "classes":[{"hole":null|g, "blocks":[…]}…]|null}
//! ```
//!
//! Blocks are sorted ascending. The canonical form sorts the block list
//! lexicographically (repeats adjacent) and is byte-reproducible. A design
//! file may also carry a `"nested"` array, which makes it a design+nesting
//! bundle (used for fixtures and ingredients); then `w` and `labels` describe
//! the full universe.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::design::{
    Block, Design, DesignParams, Nesting, ParallelClass, Point, PointUniverse, Resolution,
};
use crate::error::{NestError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFile {
    pub hole: Option<usize>,
    pub blocks: Vec<usize>,
}

/// Optional tag identifying what a file provides to the ingredient chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngredientTag {
    pub kind: String,
    pub signature: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub w: usize,
    pub labels: Vec<String>,
    pub groups: Option<Vec<Vec<Point>>>,
    pub blocks: Vec<Vec<Point>>,
    pub classes: Option<Vec<ClassFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ingredient: Option<IngredientTag>,
}

/// A nesting stored next to its design file; `nested[i]` belongs to block `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestingFile {
    pub v: usize,
    pub w: usize,
    pub labels: Vec<String>,
    pub nested: Vec<Point>,
}

fn malformed(msg: impl Into<String>) -> NestError {
    NestError::Malformed(msg.into())
}

/// Sort blocks lexicographically (nested point as tie-break), carrying the
/// nesting and resolution along.
pub fn canonicalize(design: &Design, nesting: Option<&Nesting>) -> (Design, Option<Nesting>) {
    let mut order: Vec<usize> = (0..design.blocks.len()).collect();
    order.sort_by(|&a, &b| {
        design.blocks[a]
            .cmp(&design.blocks[b])
            .then_with(|| match nesting {
                Some(n) => n.assignment[a].cmp(&n.assignment[b]),
                None => std::cmp::Ordering::Equal,
            })
    });
    let mut position = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let blocks = order.iter().map(|&i| design.blocks[i].clone()).collect();
    let resolution = design.resolution.as_ref().map(|r| Resolution {
        classes: r
            .classes
            .iter()
            .map(|c| {
                let mut blocks: Vec<usize> = c.blocks.iter().map(|&b| position[b]).collect();
                blocks.sort_unstable();
                ParallelClass {
                    hole: c.hole,
                    blocks,
                }
            })
            .collect(),
    });
    let groups = design.groups.as_ref().map(|gs| {
        gs.iter()
            .map(|g| {
                let mut g = g.clone();
                g.sort_unstable();
                g
            })
            .collect()
    });
    let d = Design {
        params: design.params,
        universe: design.universe.clone(),
        blocks,
        groups,
        resolution,
    };
    let n = nesting.map(|n| {
        Nesting::new(
            n.universe.clone(),
            order.iter().map(|&i| n.assignment[i]).collect(),
        )
    });
    (d, n)
}

/// File record for a design, optionally bundled with a nesting. No reordering.
pub fn to_file(design: &Design, nesting: Option<&Nesting>) -> DesignFile {
    let universe = nesting.map_or(&design.universe, |n| &n.universe);
    DesignFile {
        v: design.v(),
        k: design.k(),
        lambda: design.lambda(),
        w: universe.size(),
        labels: universe.all_labels(),
        groups: design.groups.clone(),
        blocks: design.blocks.iter().map(|b| b.points().to_vec()).collect(),
        classes: design.resolution.as_ref().map(|r| {
            r.classes
                .iter()
                .map(|c| ClassFile {
                    hole: c.hole,
                    blocks: c.blocks.clone(),
                })
                .collect()
        }),
        nested: nesting.map(|n| n.assignment.clone()),
        ingredient: None,
    }
}

/// Validate a design file and build the design (and bundled nesting, if any).
pub fn from_file(file: &DesignFile) -> Result<(Design, Option<Nesting>)> {
    let v = file.v;
    if file.w < v {
        return Err(malformed(format!(
            "w = {} is smaller than v = {}",
            file.w, v
        )));
    }
    if file.labels.len() != file.w {
        return Err(malformed(format!(
            "{} labels for w = {}",
            file.labels.len(),
            file.w
        )));
    }
    if file.nested.is_none() && file.w != v {
        return Err(malformed(
            "w differs from v but the file carries no nesting",
        ));
    }
    let mut blocks = Vec::with_capacity(file.blocks.len());
    for (i, pts) in file.blocks.iter().enumerate() {
        if let Some(&p) = pts.iter().find(|&&p| p >= v) {
            return Err(malformed(format!(
                "block {i} uses point {p} outside 0..{v}"
            )));
        }
        let b = Block::new(pts.clone())
            .map_err(|_| malformed(format!("block {i} is not strictly increasing")))?;
        blocks.push(b);
    }
    if let Some(groups) = &file.groups {
        let mut seen = vec![false; v];
        for g in groups {
            for &p in g {
                if p >= v || std::mem::replace(&mut seen[p], true) {
                    return Err(malformed("groups do not partition the points"));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(malformed("groups do not cover every point"));
        }
    }
    let resolution = match &file.classes {
        Some(classes) => {
            let group_count = file.groups.as_ref().map_or(0, |g| g.len());
            let mut out = Vec::with_capacity(classes.len());
            for c in classes {
                if let Some(h) = c.hole {
                    if h >= group_count {
                        return Err(malformed(format!("class hole {h} is not a group")));
                    }
                }
                if let Some(&b) = c.blocks.iter().find(|&&b| b >= blocks.len()) {
                    return Err(malformed(format!("class refers to missing block {b}")));
                }
                out.push(ParallelClass {
                    hole: c.hole,
                    blocks: c.blocks.clone(),
                });
            }
            Some(Resolution { classes: out })
        }
        None => None,
    };
    let old_universe = PointUniverse::with_labels(v, v, file.labels[..v].to_vec())?;
    let design = Design {
        params: DesignParams::new(v, file.k, file.lambda),
        universe: old_universe,
        blocks,
        groups: file.groups.clone(),
        resolution,
    };
    let nesting = match &file.nested {
        Some(nested) => {
            if nested.len() != design.blocks.len() {
                return Err(malformed(format!(
                    "{} nested points for {} blocks",
                    nested.len(),
                    design.blocks.len()
                )));
            }
            if let Some(&p) = nested.iter().find(|&&p| p >= file.w) {
                return Err(malformed(format!("nested point {p} outside 0..{}", file.w)));
            }
            let universe = PointUniverse::with_labels(file.w, v, file.labels.clone())?;
            Some(Nesting::new(universe, nested.clone()))
        }
        None => None,
    };
    Ok((design, nesting))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data always serializes")
}

/// Render a design file in canonical text layout (one block per line).
pub fn render(file: &DesignFile) -> String {
    let mut fields = vec![
        format!("  \"v\": {}", file.v),
        format!("  \"k\": {}", file.k),
        format!("  \"lambda\": {}", file.lambda),
        format!("  \"w\": {}", file.w),
        format!("  \"labels\": {}", json(&file.labels)),
        format!("  \"groups\": {}", json(&file.groups)),
    ];
    fields.push(lines_array("blocks", file.blocks.iter().map(json)));
    fields.push(match &file.classes {
        Some(classes) => lines_array("classes", classes.iter().map(json)),
        None => "  \"classes\": null".to_string(),
    });
    if let Some(nested) = &file.nested {
        fields.push(format!("  \"nested\": {}", json(nested)));
    }
    if let Some(tag) = &file.ingredient {
        fields.push(format!("  \"ingredient\": {}", json(tag)));
    }
    format!("{{\n{}\n}}\n", fields.join(",\n"))
}

fn lines_array(key: &str, items: impl Iterator<Item = String>) -> String {
    let items: Vec<String> = items.map(|s| format!("    {s}")).collect();
    if items.is_empty() {
        format!("  \"{key}\": []")
    } else {
        format!("  \"{key}\": [\n{}\n  ]", items.join(",\n"))
    }
}

/// Canonical text of a design, optionally bundled with its nesting.
pub fn write_design(design: &Design, nesting: Option<&Nesting>) -> String {
    let (d, n) = canonicalize(design, nesting);
    render(&to_file(&d, n.as_ref()))
}

pub fn parse_design_file(text: &str) -> Result<DesignFile> {
    serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
}

pub fn read_design(text: &str) -> Result<(Design, Option<Nesting>)> {
    from_file(&parse_design_file(text)?)
}

pub fn nesting_file(nesting: &Nesting) -> NestingFile {
    NestingFile {
        v: nesting.universe.old_count(),
        w: nesting.w(),
        labels: nesting.universe.all_labels(),
        nested: nesting.assignment.clone(),
    }
}

pub fn render_nesting(file: &NestingFile) -> String {
    format!(
        "{{\n  \"v\": {},\n  \"w\": {},\n  \"labels\": {},\n  \"nested\": {}\n}}\n",
        file.v,
        file.w,
        json(&file.labels),
        json(&file.nested)
    )
}

/// Canonical texts of a design file and its separate nesting file.
pub fn write_pair(design: &Design, nesting: &Nesting) -> (String, String) {
    let (d, n) = canonicalize(design, Some(nesting));
    let n = n.expect("nesting passed through");
    (
        render(&to_file(&d, None)),
        render_nesting(&nesting_file(&n)),
    )
}

pub fn read_nesting(text: &str, design: &Design) -> Result<Nesting> {
    let file: NestingFile = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    if file.v != design.v() {
        return Err(malformed(format!(
            "nesting is for v = {}, design has v = {}",
            file.v,
            design.v()
        )));
    }
    if file.nested.len() != design.blocks.len() {
        return Err(malformed(format!(
            "{} nested points for {} blocks",
            file.nested.len(),
            design.blocks.len()
        )));
    }
    if file.labels.len() != file.w || file.w < file.v {
        return Err(malformed("nesting labels do not match w"));
    }
    if let Some(&p) = file.nested.iter().find(|&&p| p >= file.w) {
        return Err(malformed(format!("nested point {p} outside 0..{}", file.w)));
    }
    let universe = PointUniverse::with_labels(file.w, file.v, file.labels)?;
    Ok(Nesting::new(universe, file.nested))
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Hash of the canonical design text.
pub fn design_hash(design: &Design) -> String {
    sha256_hex(&write_design(design, None))
}

/// Hash of the canonical design+nesting bundle.
pub fn nesting_hash(design: &Design, nesting: &Nesting) -> String {
    sha256_hex(&write_design(design, Some(nesting)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Design, Nesting) {
        let blocks = vec![
            Block::new(vec![1, 2, 3]).unwrap(),
            Block::new(vec![0, 1, 2]).unwrap(),
            Block::new(vec![0, 2, 3]).unwrap(),
            Block::new(vec![0, 1, 3]).unwrap(),
        ];
        let labels: Vec<String> = ["1", "2", "3", "4", "∞_1", "∞_2", "∞_3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let d = Design::new(DesignParams::new(4, 3, 2), blocks)
            .with_universe(PointUniverse::with_labels(4, 4, labels[..4].to_vec()).unwrap());
        let n = Nesting::new(
            PointUniverse::with_labels(7, 4, labels).unwrap(),
            vec![6, 3, 5, 4],
        );
        (d, n)
    }

    #[test]
    fn canonical_order_carries_nesting() {
        let (d, n) = sample();
        let (cd, cn) = canonicalize(&d, Some(&n));
        assert_eq!(cd.blocks[0].points(), &[0, 1, 2]);
        assert_eq!(cn.unwrap().assignment, vec![3, 4, 5, 6]);
    }

    #[test]
    fn bundle_round_trip_is_byte_stable() {
        let (d, n) = sample();
        let text = write_design(&d, Some(&n));
        let (d2, n2) = read_design(&text).unwrap();
        assert_eq!(write_design(&d2, n2.as_ref()), text);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn pair_round_trip() {
        let (d, n) = sample();
        let (dt, nt) = write_pair(&d, &n);
        let (d2, none) = read_design(&dt).unwrap();
        assert!(none.is_none());
        let n2 = read_nesting(&nt, &d2).unwrap();
        assert_eq!(write_pair(&d2, &n2), (dt, nt));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(read_design("{"), Err(NestError::Malformed(_))));
        let bad = r#"{"v":3,"k":2,"lambda":1,"w":3,"labels":["a","b","c"],"groups":null,"blocks":[[1,0]],"classes":null}"#;
        assert!(matches!(read_design(bad), Err(NestError::Malformed(_))));
        let outside = r#"{"v":3,"k":2,"lambda":1,"w":3,"labels":["a","b","c"],"groups":null,"blocks":[[0,3]],"classes":null}"#;
        assert!(matches!(read_design(outside), Err(NestError::Malformed(_))));
        let groups = r#"{"v":3,"k":2,"lambda":1,"w":3,"labels":["a","b","c"],"groups":[[0,1]],"blocks":[],"classes":null}"#;
        assert!(matches!(read_design(groups), Err(NestError::Malformed(_))));
    }

    #[test]
    fn hashes_ignore_block_order() {
        let (d, _) = sample();
        let mut shuffled = d.clone();
        shuffled.blocks.reverse();
        assert_eq!(design_hash(&d), design_hash(&shuffled));
    }
}
