//! Nesting a cyclic design orbit by orbit.
//!
//! Each base block gets one nested old point (a residue or an old fixed
//! point); developing it nests the whole orbit. Candidates are checked
//! against the pair counts of the developed orbits placed so far, which
//! handles short orbits and fixed points without special cases. The result
//! is then confirmed by full verification.

use crate::design::Point;
use crate::develop::{develop, develop_design, BaseBlockSystem, BaseEntry};
use crate::direct::sts::cyclic_sts_variants;
use crate::error::{NestError, Result};
use crate::pairs::{pair_counts, PairCountTable};
use crate::verify::{verify_nesting, Mode};

struct OrbitInfo {
    /// Developed blocks of the orbit, as point ids.
    blocks: Vec<Vec<Point>>,
    length: usize,
}

/// Search nested-point offsets for every base block so the developed
/// nesting has no new points. Returns the nested system, or `None` when no
/// choice of offsets works.
pub fn nest_cyclic_base(system: &BaseBlockSystem, mode: Mode) -> Result<Option<BaseBlockSystem>> {
    let design = develop_design(system)?;
    let v = design.v();
    let m = system.modulus;
    let fixed_old: Vec<(usize, String)> = system
        .fixed_points
        .iter()
        .filter(|f| f.old)
        .enumerate()
        .map(|(i, f)| (m + i, f.label.clone()))
        .collect();
    let mut orbits = Vec::with_capacity(system.bases.len());
    let mut start = 0;
    for (_, len) in system.orbit_starts() {
        orbits.push(OrbitInfo {
            blocks: design.blocks[start..start + len]
                .iter()
                .map(|b| b.points().to_vec())
                .collect(),
            length: len,
        });
        start += len;
    }
    let mut counts = pair_counts(&design.blocks, v);
    let mut nested_pairs = (mode == Mode::Strong).then(|| PairCountTable::new(v));
    let cap = design.lambda() as u32 + 1;
    let mut choice = Vec::with_capacity(orbits.len());
    let found = dfs(
        &orbits,
        0,
        m,
        &fixed_old,
        cap,
        &mut counts,
        &mut nested_pairs,
        &mut choice,
    );
    if !found {
        return Ok(None);
    }
    let mut nested = system.clone();
    for (base, &p) in nested.bases.iter_mut().zip(&choice) {
        base.nested = Some(if p < m {
            BaseEntry::Residue(p)
        } else {
            BaseEntry::Fixed(
                fixed_old
                    .iter()
                    .find(|(id, _)| *id == p)
                    .expect("fixed point")
                    .1
                    .clone(),
            )
        });
    }
    let (d, n) = develop(&nested)?;
    let cert = verify_nesting(
        &d,
        &n,
        if mode == Mode::Strong {
            Mode::Strong
        } else {
            Mode::Weak
        },
    );
    if !cert.passed() {
        return Err(NestError::ContractViolation(format!(
            "orbit-wise nesting failed full verification: {:?}",
            cert.first_failure()
        )));
    }
    Ok(Some(nested))
}

/// The point that nested point `p` of the base block becomes in the `i`-th
/// developed block.
fn shifted(p: Point, i: usize, m: usize) -> Point {
    if p < m {
        (p + i) % m
    } else {
        p
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    orbits: &[OrbitInfo],
    at: usize,
    m: usize,
    fixed_old: &[(usize, String)],
    cap: u32,
    counts: &mut PairCountTable,
    nested_pairs: &mut Option<PairCountTable>,
    choice: &mut Vec<Point>,
) -> bool {
    if at == orbits.len() {
        return true;
    }
    let orbit = &orbits[at];
    let candidates = (0..m).chain(fixed_old.iter().map(|(id, _)| *id));
    for p in candidates {
        let mut placed: Vec<(Point, Point)> = Vec::new();
        let mut ok = true;
        'orbit: for i in 0..orbit.length {
            let q = shifted(p, i, m);
            let block = &orbit.blocks[i];
            if block.contains(&q) {
                ok = false;
                break;
            }
            for &x in block {
                let over = counts.get(x, q) >= cap
                    || nested_pairs.as_ref().is_some_and(|np| np.get(x, q) > 0);
                if over {
                    ok = false;
                    break 'orbit;
                }
                counts.add(x, q);
                if let Some(np) = nested_pairs.as_mut() {
                    np.add(x, q);
                }
                placed.push((x, q));
            }
        }
        if ok {
            choice.push(p);
            if dfs(
                orbits,
                at + 1,
                m,
                fixed_old,
                cap,
                counts,
                nested_pairs,
                choice,
            ) {
                return true;
            }
            choice.pop();
        }
        for &(x, q) in &placed {
            counts.remove(x, q);
            if let Some(np) = nested_pairs.as_mut() {
                np.remove(x, q);
            }
        }
    }
    false
}

/// Negate every residue of every base block.
fn mirrored(system: &BaseBlockSystem) -> BaseBlockSystem {
    let m = system.modulus;
    let mut out = system.clone();
    for base in &mut out.bases {
        for e in &mut base.points {
            if let BaseEntry::Residue(r) = e {
                *r = (m - *r) % m;
            }
        }
    }
    out
}

/// A cyclic STS(v) together with an orbit-wise minimal nesting, trying up to
/// `attempts` difference-triple solutions in both orientations.
pub fn nested_cyclic_sts(v: usize, attempts: usize) -> Result<Option<BaseBlockSystem>> {
    for sys in cyclic_sts_variants(v, attempts)? {
        for candidate in [sys.clone(), mirrored(&sys)] {
            if let Some(nested) = nest_cyclic_base(&candidate, Mode::Minimal)? {
                return Ok(Some(nested));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::develop::BaseBlock;
    use crate::verify::{classify, NestingClass};

    #[test]
    fn sts7_is_nested_by_zero() {
        let sys = BaseBlockSystem::new(7).with_base(BaseBlock::residues(&[1, 2, 4]));
        let nested = nest_cyclic_base(&sys, Mode::Minimal).unwrap().unwrap();
        assert_eq!(nested.bases[0].nested, Some(BaseEntry::Residue(0)));
    }

    #[test]
    fn sts13_nesting_is_perfect() {
        let nested = nested_cyclic_sts(13, 8).unwrap().unwrap();
        let (d, n) = develop(&nested).unwrap();
        assert!(classify(&d, &n).has(NestingClass::Perfect));
    }

    #[test]
    fn sts9_has_no_cyclic_system() {
        assert_eq!(nested_cyclic_sts(9, 1), Err(NestError::NoCyclicSts(9)));
    }

    #[test]
    fn sts15_cannot_be_minimally_nested() {
        // v ≡ 3 (mod 6): no nested STS exists at all
        let sys = crate::direct::cyclic_sts(15).unwrap();
        assert_eq!(nest_cyclic_base(&sys, Mode::Minimal).unwrap(), None);
    }
}
