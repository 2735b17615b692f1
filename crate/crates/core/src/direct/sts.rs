//! Cyclic Steiner triple systems from difference triples.
//!
//! A cyclic STS(v) on `Z_v` is generated by base blocks `{0, a, a+b}` whose
//! differences `±a, ±b, ±(a+b)` cover every nonzero residue once. For
//! `v ≡ 3 (mod 6)` the difference `v/3` is covered by the short orbit of
//! `{0, v/3, 2v/3}`.

use crate::design::{Nesting, PointUniverse};
use crate::develop::{develop_design, BaseBlock, BaseBlockSystem};
use crate::error::{NestError, Result};

/// Triples `{a, b, c}` partitioning the differences `1..=(v−1)/2` (minus `v/3`
/// when `v ≡ 3 mod 6`), with `a + b = c` or `a + b + c = v`.
fn difference_triples(v: usize, limit: usize) -> Vec<Vec<[usize; 3]>> {
    let half = (v - 1) / 2;
    let mut used = vec![false; half + 1];
    used[0] = true;
    if v.is_multiple_of(3) {
        used[v / 3] = true;
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    triples_dfs(v, half, &mut used, &mut current, &mut out, limit);
    out
}

fn triples_dfs(
    v: usize,
    half: usize,
    used: &mut [bool],
    current: &mut Vec<[usize; 3]>,
    out: &mut Vec<Vec<[usize; 3]>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let Some(a) = (1..=half).find(|&d| !used[d]) else {
        out.push(current.clone());
        return;
    };
    used[a] = true;
    for b in a + 1..=half {
        if used[b] {
            continue;
        }
        used[b] = true;
        for c in [a + b, v.saturating_sub(a + b)] {
            if c > b && c <= half && !used[c] {
                used[c] = true;
                current.push([a, b, c]);
                triples_dfs(v, half, used, current, out, limit);
                current.pop();
                used[c] = false;
            }
        }
        used[b] = false;
        if out.len() >= limit {
            break;
        }
    }
    used[a] = false;
}

fn check_order(v: usize) -> Result<()> {
    if v == 9 || !(v % 6 == 1 || v % 6 == 3) {
        Err(NestError::NoCyclicSts(v))
    } else {
        Ok(())
    }
}

fn system_from(v: usize, triples: &[[usize; 3]]) -> BaseBlockSystem {
    let mut sys = BaseBlockSystem::new(v);
    for &[a, b, _] in triples {
        sys = sys.with_base(BaseBlock::residues(&[0, a, a + b]));
    }
    if v.is_multiple_of(3) {
        sys = sys.with_base(BaseBlock::residues(&[0, v / 3, 2 * v / 3]).short(v / 3));
    }
    sys
}

/// Base blocks of a cyclic STS(v).
pub fn cyclic_sts(v: usize) -> Result<BaseBlockSystem> {
    cyclic_sts_variants(v, 1)?
        .into_iter()
        .next()
        .ok_or(NestError::NoCyclicSts(v))
}

/// Up to `limit` distinct difference-triple solutions, in search order.
pub fn cyclic_sts_variants(v: usize, limit: usize) -> Result<Vec<BaseBlockSystem>> {
    check_order(v)?;
    if v == 1 {
        return Ok(vec![BaseBlockSystem::new(1)]);
    }
    Ok(difference_triples(v, limit)
        .iter()
        .map(|t| system_from(v, t))
        .collect())
}

/// One fresh new point per orbit: every block of orbit `i` is nested by `∞_{i+1}`.
pub fn nest_cyclic_orbits(system: &BaseBlockSystem) -> Result<Nesting> {
    let design = develop_design(system)?;
    let v = design.v();
    let starts = system.orbit_starts();
    let mut assignment = Vec::with_capacity(design.blocks.len());
    for (i, &(_, len)) in starts.iter().enumerate() {
        assignment.extend(std::iter::repeat_n(v + i, len));
    }
    let mut labels = design.universe.all_labels();
    labels.extend((1..=starts.len()).map(|i| format!("∞_{i}")));
    Ok(Nesting::new(
        PointUniverse::with_labels(v + starts.len(), v, labels)?,
        assignment,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify_bibd, verify_weak_nesting};

    #[test]
    fn seven_is_one_base_block() {
        let sys = cyclic_sts(7).unwrap();
        assert_eq!(sys.bases.len(), 1);
        let d = develop_design(&sys).unwrap();
        assert!(verify_bibd(&d).passed());
    }

    #[test]
    fn nine_and_wrong_residues_fail() {
        assert_eq!(cyclic_sts(9), Err(NestError::NoCyclicSts(9)));
        assert_eq!(cyclic_sts(11), Err(NestError::NoCyclicSts(11)));
    }

    #[test]
    fn balanced_up_to_99() {
        for v in (3..=99).filter(|v| (v % 6 == 1 || v % 6 == 3) && *v != 9) {
            let sys = cyclic_sts(v).unwrap();
            let d = develop_design(&sys).unwrap();
            assert_eq!(d.lambda(), 1);
            assert!(verify_bibd(&d).passed(), "v = {v}");
        }
    }

    #[test]
    fn orbit_points() {
        let n13 = nest_cyclic_orbits(&cyclic_sts(13).unwrap()).unwrap();
        assert_eq!(n13.w() - 13, 2);
        let sys15 = cyclic_sts(15).unwrap();
        let n15 = nest_cyclic_orbits(&sys15).unwrap();
        assert_eq!(n15.w() - 15, 3);
        assert_eq!(sys15.bases.iter().filter(|b| b.orbit.is_some()).count(), 1);
        // a full-orbit point meets every old point three times, above λ+1 = 2
        let d = develop_design(&sys15).unwrap();
        assert!(!verify_weak_nesting(&d, &n15).passed());
    }

    #[test]
    fn variants_are_distinct() {
        let vs = cyclic_sts_variants(19, 4).unwrap();
        assert!(vs.len() >= 2);
        assert_ne!(vs[0], vs[1]);
    }
}
