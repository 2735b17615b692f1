//! Levi graphs of designs and harmonious colourings.
//!
//! A strong nesting on `w` points and a harmonious colouring of the Levi
//! graph with `w` colours are the same object: points keep their own colour
//! and every block is coloured by its nested point.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::design::{Design, Nesting, Point, PointUniverse};
use crate::error::{NestError, Result};
use crate::verify::{verify_strong_nesting, Check, Witness};

/// Point-vertices `0..v`, then one block-vertex per block index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeviGraph {
    pub points: usize,
    pub blocks: usize,
    /// `(point, block index)`, sorted by block then point.
    pub edges: Vec<(Point, usize)>,
}

impl LeviGraph {
    pub fn vertex_count(&self) -> usize {
        self.points + self.blocks
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn block_vertex(&self, block: usize) -> usize {
        self.points + block
    }

    pub fn is_bipartite_by_construction(&self) -> bool {
        self.edges
            .iter()
            .all(|&(p, b)| p < self.points && b < self.blocks)
    }
}

pub fn levi_graph(design: &Design) -> LeviGraph {
    let edges = design
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.points().iter().map(move |&p| (p, i)))
        .collect();
    LeviGraph {
        points: design.v(),
        blocks: design.blocks.len(),
        edges,
    }
}

/// A colour per Levi-graph vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmoniousColouring {
    /// Colours of the point-vertices.
    pub points: Vec<usize>,
    /// Colours of the block-vertices, by block index.
    pub blocks: Vec<usize>,
    /// Colours are drawn from `0..palette`.
    pub palette: usize,
    /// Optional colour names, one per palette entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl HarmoniousColouring {
    pub fn colours_used(&self) -> usize {
        self.points
            .iter()
            .chain(&self.blocks)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// First edge that breaks properness, or first pair of edges sharing a
/// colour pair.
fn harmonious_witness(design: &Design, c: &HarmoniousColouring) -> Option<Witness> {
    if c.points.len() != design.v() || c.blocks.len() != design.blocks.len() {
        return Some(Witness::Note {
            detail: format!(
                "colouring covers {} points and {} blocks, design has {} and {}",
                c.points.len(),
                c.blocks.len(),
                design.v(),
                design.blocks.len()
            ),
        });
    }
    if let Some(&bad) = c.points.iter().chain(&c.blocks).find(|&&x| x >= c.palette) {
        return Some(Witness::Note {
            detail: format!("colour {bad} is outside a palette of {}", c.palette),
        });
    }
    let mut seen: BTreeMap<(usize, usize), (Point, usize)> = BTreeMap::new();
    for (bi, b) in design.blocks.iter().enumerate() {
        let cb = c.blocks[bi];
        for &p in b.points() {
            let cp = c.points[p];
            if cp == cb {
                return Some(Witness::Block {
                    index: bi,
                    detail: format!("shares colour {cb} with its point {p}"),
                });
            }
            let key = (cp.min(cb), cp.max(cb));
            if let Some(&(p0, b0)) = seen.get(&key) {
                return Some(Witness::Note {
                    detail: format!("edges {{{p0}, block {b0}}} and {{{p}, block {bi}}} both carry colours {key:?}"),
                });
            }
            seen.insert(key, (p, bi));
        }
    }
    None
}

pub fn verify_harmonious(design: &Design, colouring: &HarmoniousColouring) -> Check {
    Check::from_witness("harmonious", harmonious_witness(design, colouring))
}

/// Points keep their own colour; blocks take their nested point.
pub fn nesting_to_colouring(design: &Design, nesting: &Nesting) -> Result<HarmoniousColouring> {
    let cert = verify_strong_nesting(design, nesting);
    if let Some(c) = cert.first_failure() {
        return Err(NestError::NotStrong(format!("{}: {:?}", c.name, c.witness)));
    }
    Ok(HarmoniousColouring {
        points: (0..design.v()).collect(),
        blocks: nesting.assignment.clone(),
        palette: nesting.w(),
        labels: nesting.universe.labels().map(<[String]>::to_vec),
    })
}

/// Rename colours so point `x` has colour `x` and the remaining used colours
/// follow in increasing order, then read the nesting off the block colours.
pub fn colouring_to_nesting(design: &Design, colouring: &HarmoniousColouring) -> Result<Nesting> {
    if let Some(w) = harmonious_witness(design, colouring) {
        return Err(NestError::NotHarmonious(format!("{w:?}")));
    }
    let v = design.v();
    let mut rename: BTreeMap<usize, Point> = BTreeMap::new();
    for (x, &c) in colouring.points.iter().enumerate() {
        if let Some(&y) = rename.get(&c) {
            // only possible for points that share no block
            return Err(NestError::NotHarmonious(format!(
                "points {y} and {x} share colour {c}"
            )));
        }
        rename.insert(c, x);
    }
    let extra: BTreeSet<usize> = colouring
        .blocks
        .iter()
        .copied()
        .filter(|c| !rename.contains_key(c))
        .collect();
    for (i, c) in extra.into_iter().enumerate() {
        rename.insert(c, v + i);
    }
    let w = rename.len();
    let universe = match &colouring.labels {
        Some(labels) => {
            let mut renamed = vec![String::new(); w];
            for (&c, &p) in &rename {
                renamed[p] = labels.get(c).cloned().unwrap_or_else(|| c.to_string());
            }
            PointUniverse::with_labels(w, v, renamed)?
        }
        None => PointUniverse::new(w, v),
    };
    let assignment = colouring.blocks.iter().map(|c| rename[c]).collect();
    let nesting = Nesting::new(universe, assignment);
    let cert = verify_strong_nesting(design, &nesting);
    if let Some(c) = cert.first_failure() {
        return Err(NestError::ContractViolation(format!(
            "harmonious colouring gave a non-strong nesting: {c:?}"
        )));
    }
    Ok(nesting)
}

/// `v·r = C(v,2)`: the Levi graph has as many edges as there are pairs of
/// point colours, the only way an exact colouring with `v` colours can exist.
pub fn exact_colouring_possible(design: &Design) -> bool {
    let v = design.v();
    design
        .params
        .replication()
        .is_some_and(|r| v * r == v * v.saturating_sub(1) / 2)
}

/// Harmonious, and every pair of used colours lies on exactly one edge.
pub fn is_exact_colouring(design: &Design, colouring: &HarmoniousColouring) -> bool {
    if harmonious_witness(design, colouring).is_some() {
        return false;
    }
    let used = colouring.colours_used();
    let edges: usize = design.blocks.iter().map(|b| b.len()).sum();
    edges == used * used.saturating_sub(1) / 2
}

/// On-disk colouring report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub v: usize,
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub points: Vec<usize>,
    pub blocks: Vec<usize>,
    pub exact: bool,
    pub checks: Vec<Check>,
}

pub fn colouring_file(design: &Design, colouring: &HarmoniousColouring) -> ColouringFile {
    ColouringFile {
        v: design.v(),
        w: colouring.palette,
        labels: colouring.labels.clone(),
        points: colouring.points.clone(),
        blocks: colouring.blocks.clone(),
        exact: is_exact_colouring(design, colouring),
        checks: vec![verify_harmonious(design, colouring)],
    }
}

impl From<ColouringFile> for HarmoniousColouring {
    fn from(f: ColouringFile) -> Self {
        HarmoniousColouring {
            points: f.points,
            blocks: f.blocks,
            palette: f.w,
            labels: f.labels,
        }
    }
}

pub fn render_colouring(file: &ColouringFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("colouring serializes");
    s.push('\n');
    s
}

pub fn parse_colouring(text: &str) -> Result<ColouringFile> {
    serde_json::from_str(text).map_err(|e| NestError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Block, DesignParams};
    use crate::direct::fixture;

    fn fano() -> Design {
        let blocks = (0..7)
            .map(|i| Block::from_unsorted(vec![i, (i + 1) % 7, (i + 3) % 7]).unwrap())
            .collect();
        Design::new(DesignParams::new(7, 3, 1), blocks)
    }

    /// Block `{i, i+1, i+3}` nested by `i+6`: the nested differences are
    /// `6, 5, 3`, one from each of `±1, ±2, ±3`.
    fn perfect_fano() -> (Design, Nesting) {
        let d = fano();
        let assignment = (0..7).map(|i| (i + 6) % 7).collect();
        (d, Nesting::new(PointUniverse::plain(7), assignment))
    }

    #[test]
    fn levi_graph_sizes() {
        let g = levi_graph(&fano());
        assert_eq!((g.vertex_count(), g.edge_count()), (14, 21));
        assert!(g.is_bipartite_by_construction());
        let (e4, _) = fixture("E4").unwrap();
        let g = levi_graph(&e4);
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 12));
        let empty = Design::new(DesignParams::new(5, 3, 1), vec![]);
        let g = levi_graph(&empty);
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 0));
    }

    #[test]
    fn e4strong_gives_seven_colours() {
        let (d, n) = fixture("E4strong").unwrap();
        let c = nesting_to_colouring(&d, &n).unwrap();
        assert_eq!(c.palette, 7);
        assert!(verify_harmonious(&d, &c).passed);
        assert!(!is_exact_colouring(&d, &c));
        assert_eq!(colouring_to_nesting(&d, &c).unwrap(), n);
    }

    #[test]
    fn perfect_fano_is_exact() {
        let (d, n) = perfect_fano();
        let c = nesting_to_colouring(&d, &n).unwrap();
        assert_eq!(c.palette, 7);
        assert!(exact_colouring_possible(&d));
        assert!(is_exact_colouring(&d, &c));
    }

    #[test]
    fn weak_only_nesting_is_refused() {
        let (d, n) = fixture("E4").unwrap();
        assert!(matches!(
            nesting_to_colouring(&d, &n),
            Err(NestError::NotStrong(_))
        ));
    }

    #[test]
    fn shared_point_colour_is_not_harmonious() {
        let (d, n) = perfect_fano();
        let mut c = nesting_to_colouring(&d, &n).unwrap();
        c.points[1] = 0;
        assert!(!verify_harmonious(&d, &c).passed);
        assert!(matches!(
            colouring_to_nesting(&d, &c),
            Err(NestError::NotHarmonious(_))
        ));
    }

    #[test]
    fn permuted_colours_rename_back() {
        let (d, n) = fixture("E7strong").unwrap();
        let c = nesting_to_colouring(&d, &n).unwrap();
        let w = c.palette;
        let shift = |x: usize| (x + 3) % w;
        let permuted = HarmoniousColouring {
            points: c.points.iter().map(|&x| shift(x)).collect(),
            blocks: c.blocks.iter().map(|&x| shift(x)).collect(),
            palette: w,
            labels: None,
        };
        let back = colouring_to_nesting(&d, &permuted).unwrap();
        assert_eq!(back.w(), 11);
        // old nested points come back exactly; new ones only up to renaming
        for (&a, &b) in back.assignment.iter().zip(&n.assignment) {
            assert_eq!(a < 7, b < 7);
            if b < 7 {
                assert_eq!(a, b);
            }
        }
        let pairs = |x: &Nesting| {
            let mut same: Vec<(usize, usize)> = Vec::new();
            for i in 0..x.assignment.len() {
                for j in i + 1..x.assignment.len() {
                    if x.assignment[i] == x.assignment[j] {
                        same.push((i, j));
                    }
                }
            }
            same
        };
        assert_eq!(pairs(&back), pairs(&n));
    }

    #[test]
    fn fewer_than_v_colours_never_validate() {
        let (d, _) = fixture("E4strong").unwrap();
        let c = HarmoniousColouring {
            points: vec![0, 1, 2, 0],
            blocks: vec![3; 4],
            palette: 4,
            labels: None,
        };
        assert!(!verify_harmonious(&d, &c).passed);
    }

    #[test]
    fn colouring_file_round_trip() {
        let (d, n) = fixture("E10strong").unwrap();
        let c = nesting_to_colouring(&d, &n).unwrap();
        assert_eq!(c.palette, 16);
        let file = colouring_file(&d, &c);
        let back: HarmoniousColouring = parse_colouring(&render_colouring(&file)).unwrap().into();
        assert_eq!(back, c);
    }
}
