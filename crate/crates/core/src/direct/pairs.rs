//! Optimal weak nestings of `(v,2,1)`-BIBDs and their strong refinement for
//! `v ≡ 1 (mod 4)`.

use crate::design::{Design, Nesting, Point, PointUniverse};
use crate::develop::{develop, BaseBlock, BaseBlockSystem, BaseEntry};
use crate::error::{NestError, Result};

use super::colouring::{edge_colour, is_proper_edge_colouring};

fn nested_pair(a: BaseEntry, b: BaseEntry, nested: BaseEntry) -> BaseBlock {
    BaseBlock::nested(vec![a, b], nested)
}

fn r(x: usize) -> BaseEntry {
    BaseEntry::Residue(x)
}

fn inf(j: usize) -> BaseEntry {
    BaseEntry::new_point("∞", j)
}

/// Base blocks for the residue class of `v`; even `v` lives on `Z_{v−1} ∪ {∞}`.
pub fn weak_pairs_system(v: usize) -> Result<BaseBlockSystem> {
    if v < 4 {
        return Err(NestError::VTooSmall { v, min: 4 });
    }
    let t = v / 4;
    let sys = match v % 4 {
        1 => {
            let mut sys = BaseBlockSystem::new(v);
            for j in 1..=t {
                sys = sys.with_base(nested_pair(r(0), r(2 * j), inf(j)));
            }
            for j in 0..t {
                sys = sys.with_base(nested_pair(r(0), r(2 * j + 1), r(2 * t - 2 * j)));
            }
            sys
        }
        3 => {
            let mut sys = BaseBlockSystem::new(v);
            for j in 1..=t {
                sys = sys.with_base(nested_pair(r(0), r(2 * j), inf(j)));
            }
            sys = sys.with_base(nested_pair(r(0), r(1), inf(t + 1)));
            for j in 1..=t {
                sys = sys.with_base(nested_pair(r(0), r(2 * j + 1), r(2 * t + 2 - 2 * j)));
            }
            sys
        }
        0 | 2 => {
            // 4t on Z_{4t−1}, 4t+2 on Z_{4t+1}; ∞ is an old point
            let m = v - 1;
            let fresh = if v.is_multiple_of(4) { t } else { t + 1 };
            let mut sys = BaseBlockSystem::new(m).with_fixed("∞", true);
            for j in 1..=fresh {
                sys = sys.with_base(nested_pair(r(0), r(2 * j), inf(j)));
            }
            sys = sys.with_base(nested_pair(BaseEntry::fixed("∞"), r(0), r(2 * t - 1)));
            for j in 1..t {
                sys = sys.with_base(nested_pair(r(0), r(2 * j - 1), r(t + j - 1)));
            }
            sys
        }
        _ => unreachable!(),
    };
    Ok(sys)
}

/// The `(v,2,1)`-BIBD with a weak nesting on `w = ⌈(5v−1)/4⌉` points.
pub fn weak_nest_pairs(v: usize) -> Result<(Design, Nesting)> {
    develop(&weak_pairs_system(v)?)
}

/// A strong nesting of the `(v,2,1)`-BIBD for `v ≡ 1 (mod 4)` with
/// `w = (3v+1)/2`.
///
/// Starting from [`weak_nest_pairs`], the blocks nested by new points form a
/// `(v−1)/2`-regular graph on the old points. Each colour class of a proper
/// edge colouring gets its own fresh point.
pub fn strong_nest_pairs_1mod4(v: usize) -> Result<(Design, Nesting)> {
    if v % 4 != 1 {
        return Err(NestError::InvalidInput(format!(
            "strongification needs v ≡ 1 (mod 4), got {v}"
        )));
    }
    let (design, weak) = weak_nest_pairs(v)?;
    let old = design.v();
    let renested: Vec<usize> = (0..design.blocks.len())
        .filter(|&i| weak.universe.is_new(weak.assignment[i]))
        .collect();
    let edges: Vec<(Point, Point)> = renested
        .iter()
        .map(|&i| {
            let p = design.blocks[i].points();
            (p[0], p[1])
        })
        .collect();
    let colours = edge_colour(old, &edges)?;
    let delta = (v - 1) / 2;
    if !is_proper_edge_colouring(&edges, &colours, delta + 1) {
        return Err(NestError::ContractViolation(
            "edge colouring is not proper".into(),
        ));
    }
    let mut used: Vec<usize> = colours.clone();
    used.sort_unstable();
    used.dedup();
    let mut assignment = weak.assignment.clone();
    for (&i, &c) in renested.iter().zip(&colours) {
        assignment[i] = old + used.binary_search(&c).expect("present");
    }
    let mut labels = design.universe.all_labels();
    labels.extend((1..=used.len()).map(|c| format!("∞_{c}")));
    let universe = PointUniverse::with_labels(old + used.len(), old, labels)?;
    Ok((design, Nesting::new(universe, assignment)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify_strong_nesting, verify_weak_nesting};

    #[test]
    fn small_orders() {
        for (v, w) in [
            (4, 5),
            (5, 6),
            (6, 8),
            (7, 9),
            (8, 10),
            (9, 11),
            (10, 13),
            (11, 14),
        ] {
            let (d, n) = weak_nest_pairs(v).unwrap();
            assert_eq!(d.v(), v);
            assert_eq!(n.w(), w, "v = {v}");
            let cert = verify_weak_nesting(&d, &n);
            assert!(cert.passed(), "v = {v}: {:?}", cert.first_failure());
        }
        assert_eq!(
            weak_nest_pairs(3),
            Err(NestError::VTooSmall { v: 3, min: 4 })
        );
    }

    #[test]
    fn strong_small_orders() {
        for (v, w) in [(5, 8), (9, 14), (13, 20), (17, 26)] {
            let (d, n) = strong_nest_pairs_1mod4(v).unwrap();
            assert_eq!(n.w(), w);
            let cert = verify_strong_nesting(&d, &n);
            assert!(cert.passed(), "v = {v}: {:?}", cert.first_failure());
        }
        assert!(strong_nest_pairs_1mod4(7).is_err());
    }
}
