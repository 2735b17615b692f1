//! Cyclic development of base blocks over `Z_m`.
//!
//! Residues develop by adding `i` for `i = 0..orbit_length`. Fixed labels
//! stay put. Indexed labels such as `∞_0` either stay fixed or have their
//! subscript developed modulo `m` as well.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::design::{Block, Design, DesignParams, Nesting, Point, PointUniverse};
use crate::error::{NestError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexRule {
    /// `stem_j` is a single point.
    Fixed,
    /// `stem_j` develops to `stem_{(j+i) mod m}`.
    Develop,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseEntry {
    Residue(usize),
    /// A declared fixed point, looked up by label.
    Fixed(String),
    /// An indexed new point.
    Indexed {
        stem: String,
        index: usize,
        rule: IndexRule,
    },
}

impl BaseEntry {
    pub fn fixed(label: &str) -> Self {
        BaseEntry::Fixed(label.to_string())
    }

    pub fn new_point(stem: &str, index: usize) -> Self {
        BaseEntry::Indexed {
            stem: stem.to_string(),
            index,
            rule: IndexRule::Fixed,
        }
    }

    pub fn developed(stem: &str, index: usize) -> Self {
        BaseEntry::Indexed {
            stem: stem.to_string(),
            index,
            rule: IndexRule::Develop,
        }
    }
}

impl From<usize> for BaseEntry {
    fn from(r: usize) -> Self {
        BaseEntry::Residue(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPoint {
    pub label: String,
    /// Old points belong to the design; new ones only appear as nested points.
    pub old: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseBlock {
    pub points: Vec<BaseEntry>,
    pub nested: Option<BaseEntry>,
    /// Declared short-orbit length; `None` means a full orbit of length `m`.
    pub orbit: Option<usize>,
}

impl BaseBlock {
    pub fn plain(points: Vec<BaseEntry>) -> Self {
        BaseBlock {
            points,
            nested: None,
            orbit: None,
        }
    }

    pub fn nested(points: Vec<BaseEntry>, nested: BaseEntry) -> Self {
        BaseBlock {
            points,
            nested: Some(nested),
            orbit: None,
        }
    }

    pub fn residues(points: &[usize]) -> Self {
        BaseBlock::plain(points.iter().map(|&r| BaseEntry::Residue(r)).collect())
    }

    pub fn short(mut self, length: usize) -> Self {
        self.orbit = Some(length);
        self
    }

    pub fn orbit_length(&self, modulus: usize) -> usize {
        self.orbit.unwrap_or(modulus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseBlockSystem {
    pub modulus: usize,
    pub fixed_points: Vec<FixedPoint>,
    pub bases: Vec<BaseBlock>,
}

impl BaseBlockSystem {
    pub fn new(modulus: usize) -> Self {
        BaseBlockSystem {
            modulus,
            fixed_points: Vec::new(),
            bases: Vec::new(),
        }
    }

    pub fn with_fixed(mut self, label: &str, old: bool) -> Self {
        self.fixed_points.push(FixedPoint {
            label: label.to_string(),
            old,
        });
        self
    }

    pub fn with_base(mut self, base: BaseBlock) -> Self {
        self.bases.push(base);
        self
    }

    /// Number of old points: residues plus old fixed points.
    pub fn v(&self) -> usize {
        self.modulus + self.fixed_points.iter().filter(|f| f.old).count()
    }

    /// Index of the first block of every base's orbit, and the orbit lengths.
    pub fn orbit_starts(&self) -> Vec<(usize, usize)> {
        let mut start = 0;
        self.bases
            .iter()
            .map(|b| {
                let len = b.orbit_length(self.modulus);
                let s = start;
                start += len;
                (s, len)
            })
            .collect()
    }
}

/// Resolves entries to point ids; new points get ids in first-appearance order.
struct Resolver<'a> {
    system: &'a BaseBlockSystem,
    old_ids: HashMap<&'a str, Point>,
    new_ids: HashMap<String, Point>,
    new_labels: Vec<String>,
    v: usize,
}

impl<'a> Resolver<'a> {
    fn new(system: &'a BaseBlockSystem) -> Self {
        let mut old_ids = HashMap::new();
        let mut next = system.modulus;
        for f in &system.fixed_points {
            if f.old {
                old_ids.insert(f.label.as_str(), next);
                next += 1;
            }
        }
        Resolver {
            system,
            old_ids,
            new_ids: HashMap::new(),
            new_labels: Vec::new(),
            v: next,
        }
    }

    fn new_point(&mut self, label: String) -> Point {
        if let Some(&id) = self.new_ids.get(&label) {
            return id;
        }
        let id = self.v + self.new_labels.len();
        self.new_ids.insert(label.clone(), id);
        self.new_labels.push(label);
        id
    }

    fn resolve(&mut self, entry: &BaseEntry, shift: usize) -> Result<Point> {
        let m = self.system.modulus;
        match entry {
            BaseEntry::Residue(r) => {
                if *r >= m {
                    return Err(NestError::ResidueOutOfRange {
                        residue: *r,
                        modulus: m,
                    });
                }
                Ok((r + shift) % m)
            }
            BaseEntry::Fixed(label) => {
                if let Some(&id) = self.old_ids.get(label.as_str()) {
                    return Ok(id);
                }
                if self
                    .system
                    .fixed_points
                    .iter()
                    .any(|f| !f.old && &f.label == label)
                {
                    return Ok(self.new_point(label.clone()));
                }
                Err(NestError::UndeclaredFixedLabel(label.clone()))
            }
            BaseEntry::Indexed { stem, index, rule } => {
                let j = match rule {
                    IndexRule::Fixed => *index,
                    IndexRule::Develop => (index + shift) % m,
                };
                Ok(self.new_point(format!("{stem}_{j}")))
            }
        }
    }

    fn old_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = (0..self.system.modulus).map(|r| r.to_string()).collect();
        labels.extend(
            self.system
                .fixed_points
                .iter()
                .filter(|f| f.old)
                .map(|f| f.label.clone()),
        );
        labels
    }
}

struct Expanded {
    blocks: Vec<Block>,
    nested: Vec<Option<Point>>,
    v: usize,
    old_labels: Vec<String>,
    new_labels: Vec<String>,
    k: usize,
}

fn expand(system: &BaseBlockSystem) -> Result<Expanded> {
    let m = system.modulus;
    if m == 0 {
        return Err(NestError::InvalidInput("modulus must be positive".into()));
    }
    let mut res = Resolver::new(system);
    let k = system.bases.first().map_or(0, |b| b.points.len());
    let mut blocks = Vec::new();
    let mut nested = Vec::new();
    for (bi, base) in system.bases.iter().enumerate() {
        if base.points.len() != k {
            return Err(NestError::MalformedBase {
                base: bi,
                reason: format!("has {} points, expected {k}", base.points.len()),
            });
        }
        let len = base.orbit_length(m);
        if len == 0 || len > m || !m.is_multiple_of(len) {
            return Err(NestError::ShortOrbitNotClosed {
                base: bi,
                length: len,
            });
        }
        let mut orbit_blocks = Vec::with_capacity(len);
        for shift in 0..len {
            let mut pts = Vec::with_capacity(k);
            for e in &base.points {
                let p = res.resolve(e, shift)?;
                if p >= res.v {
                    return Err(NestError::MalformedBase {
                        base: bi,
                        reason: "new points may only appear as nested entries".into(),
                    });
                }
                pts.push(p);
            }
            let block = Block::from_unsorted(pts).map_err(|_| NestError::MalformedBase {
                base: bi,
                reason: "repeated point".into(),
            })?;
            let nest = match &base.nested {
                Some(e) => Some(res.resolve(e, shift)?),
                None => None,
            };
            orbit_blocks.push(block);
            nested.push(nest);
        }
        if len < m {
            // the declared orbit must close: translating the base by `len` gives it back
            let mut again = Vec::with_capacity(k);
            for e in &base.points {
                again.push(res.resolve(e, len)?);
            }
            let again = Block::from_unsorted(again).map_err(|_| NestError::MalformedBase {
                base: bi,
                reason: "repeated point".into(),
            })?;
            if again != orbit_blocks[0] {
                return Err(NestError::ShortOrbitNotClosed {
                    base: bi,
                    length: len,
                });
            }
        }
        blocks.extend(orbit_blocks);
    }
    Ok(Expanded {
        blocks,
        nested,
        v: res.v,
        old_labels: res.old_labels(),
        new_labels: res.new_labels,
        k,
    })
}

fn params_for(v: usize, k: usize, b: usize) -> DesignParams {
    let pairs = v * v.saturating_sub(1);
    let lambda = if pairs == 0 || k < 2 {
        0
    } else {
        b * k * (k - 1) / pairs
    };
    DesignParams::new(v, k, lambda)
}

/// Develop the underlying design only; nested entries are ignored.
pub fn develop_design(system: &BaseBlockSystem) -> Result<Design> {
    let e = expand(system)?;
    let params = params_for(e.v, e.k, e.blocks.len());
    let universe = PointUniverse::with_labels(e.v, e.v, e.old_labels)?;
    Ok(Design::new(params, e.blocks).with_universe(universe))
}

/// Develop a fully nested system into its design and nesting.
///
/// `λ` is read off the block count; verification is left to [`crate::verify`].
pub fn develop(system: &BaseBlockSystem) -> Result<(Design, Nesting)> {
    if let Some(bi) = system.bases.iter().position(|b| b.nested.is_none()) {
        return Err(NestError::MalformedBase {
            base: bi,
            reason: "no nested entry".into(),
        });
    }
    let e = expand(system)?;
    let params = params_for(e.v, e.k, e.blocks.len());
    let w = e.v + e.new_labels.len();
    let old_universe = PointUniverse::with_labels(e.v, e.v, e.old_labels.clone())?;
    let mut labels = e.old_labels;
    labels.extend(e.new_labels);
    let universe = PointUniverse::with_labels(w, e.v, labels)?;
    let design = Design::new(params, e.blocks).with_universe(old_universe);
    let assignment = e
        .nested
        .into_iter()
        .map(|p| p.expect("checked above"))
        .collect();
    Ok((design, Nesting::new(universe, assignment)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::pair_counts;

    fn r(x: usize) -> BaseEntry {
        BaseEntry::Residue(x)
    }

    #[test]
    fn develops_two_base_blocks_mod_five() {
        let sys = BaseBlockSystem::new(5)
            .with_fixed("∞", false)
            .with_base(BaseBlock::nested(vec![r(0), r(1)], BaseEntry::fixed("∞")))
            .with_base(BaseBlock::nested(vec![r(0), r(2)], r(3)));
        let (d, n) = develop(&sys).unwrap();
        assert_eq!(d.blocks.len(), 10);
        assert_eq!(d.params, DesignParams::new(5, 2, 1));
        assert_eq!(n.w(), 6);
        assert_eq!(n.universe.label(5), "∞");
        assert!(pair_counts(&d.blocks, 5).iter().all(|(_, _, c)| c == 1));
    }

    #[test]
    fn empty_system() {
        let (d, n) = develop(&BaseBlockSystem::new(7)).unwrap();
        assert!(d.blocks.is_empty());
        assert!(n.assignment.is_empty());
        assert_eq!(d.v(), 7);
    }

    #[test]
    fn developed_subscripts_and_old_fixed_point() {
        let sys = BaseBlockSystem::new(5)
            .with_fixed("∞", true)
            .with_base(BaseBlock::nested(
                vec![r(0), r(1), r(3)],
                BaseEntry::developed("∞", 0),
            ))
            .with_base(BaseBlock::nested(
                vec![BaseEntry::fixed("∞"), r(0), r(1)],
                r(2),
            ));
        let (d, n) = develop(&sys).unwrap();
        assert_eq!(d.blocks.len(), 10);
        assert_eq!(d.v(), 6);
        assert_eq!(n.w(), 11);
        assert_eq!(n.universe.label(6), "∞_0");
        assert_eq!(n.universe.label(10), "∞_4");
        assert_eq!(d.params.lambda, 2);
    }

    #[test]
    fn short_orbit_must_close() {
        let ok = BaseBlockSystem::new(9).with_base(BaseBlock::residues(&[0, 3, 6]).short(3));
        assert_eq!(develop_design(&ok).unwrap().blocks.len(), 3);
        let bad = BaseBlockSystem::new(9).with_base(BaseBlock::residues(&[0, 1, 6]).short(3));
        assert_eq!(
            develop_design(&bad),
            Err(NestError::ShortOrbitNotClosed { base: 0, length: 3 })
        );
        let nondividing =
            BaseBlockSystem::new(9).with_base(BaseBlock::residues(&[0, 3, 6]).short(4));
        assert!(matches!(
            develop_design(&nondividing),
            Err(NestError::ShortOrbitNotClosed { .. })
        ));
    }

    #[test]
    fn input_errors() {
        let out = BaseBlockSystem::new(5).with_base(BaseBlock::residues(&[0, 7]));
        assert_eq!(
            develop_design(&out),
            Err(NestError::ResidueOutOfRange {
                residue: 7,
                modulus: 5
            })
        );
        let undeclared =
            BaseBlockSystem::new(5).with_base(BaseBlock::plain(vec![r(0), BaseEntry::fixed("∞")]));
        assert_eq!(
            develop_design(&undeclared),
            Err(NestError::UndeclaredFixedLabel("∞".into()))
        );
        let unnested = BaseBlockSystem::new(5).with_base(BaseBlock::residues(&[0, 1]));
        assert!(matches!(
            develop(&unnested),
            Err(NestError::MalformedBase { .. })
        ));
    }
}
