//! Exact search for nestings, cyclic nestings and small-case certificates.

pub mod cyclic;
pub mod gdd;
pub mod iso;
pub mod nesting;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::design::{Design, Nesting, PointUniverse};
use crate::error::{NestError, Result};
use crate::verify::{verify_nesting, Mode};

pub use cyclic::{nest_cyclic_base, nested_cyclic_sts};
pub use iso::{
    certify_632_strong_bound, certify_632_strong_bound_report, no_disjoint_blocks, StrongBound632,
};
use nesting::{search_fixed_w, Limits, Probe};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads for the first decision level; `Some(1)` is sequential.
    pub threads: Option<usize>,
    pub timeout: Option<Duration>,
    /// Disable only to cross-check the symmetry breaking itself.
    pub symmetry_breaking: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: None,
            timeout: None,
            symmetry_breaking: true,
        }
    }
}

impl SearchOptions {
    pub fn sequential() -> Self {
        SearchOptions {
            threads: Some(1),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A verified nesting at the smallest feasible `w`.
    Found(Nesting),
    /// No nesting with `w ≤ cap`.
    Exhausted { cap: usize },
    /// Every `w` below `reached` was ruled out before time ran out.
    TimedOut { reached: usize },
}

/// Serializable summary of a search run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mode: Mode,
    pub cap: usize,
    pub status: String,
    pub w: Option<usize>,
}

impl SearchOutcome {
    pub fn nesting(&self) -> Option<&Nesting> {
        match self {
            SearchOutcome::Found(n) => Some(n),
            _ => None,
        }
    }

    pub fn report(&self, mode: Mode, cap: usize) -> SearchReport {
        let (status, w) = match self {
            SearchOutcome::Found(n) => ("FOUND", Some(n.w())),
            SearchOutcome::Exhausted { .. } => ("EXHAUSTED", None),
            SearchOutcome::TimedOut { reached } => ("TIMED_OUT", Some(*reached)),
        };
        SearchReport {
            mode,
            cap,
            status: status.to_string(),
            w,
        }
    }
}

fn universe_for(design: &Design, w: usize) -> PointUniverse {
    let v = design.v();
    let mut labels = design.universe.all_labels();
    labels.extend((1..=w - v).map(|i| format!("∞_{i}")));
    PointUniverse::with_labels(w, v, labels).expect("label count matches")
}

/// Smallest `w ≤ cap` admitting a nesting of the requested kind.
///
/// Each `w = v, v+1, …` is searched exhaustively; the returned nesting is
/// re-checked by the independent verifier.
pub fn find_min_nesting(
    design: &Design,
    mode: Mode,
    cap: usize,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    let v = design.v();
    let top = if mode == Mode::Minimal {
        cap.min(v)
    } else {
        cap
    };
    let deadline = options.timeout.map(|t| Instant::now() + t);
    let limits = Limits {
        threads: options.threads,
        deadline,
        symmetry_breaking: options.symmetry_breaking,
    };
    for w in v..=top {
        match search_fixed_w(design, mode, w, limits) {
            Probe::Found(assignment) => {
                let nesting = Nesting::new(universe_for(design, w), assignment);
                let cert = verify_nesting(design, &nesting, mode);
                if !cert.passed() {
                    return Err(NestError::ContractViolation(format!(
                        "search output failed verification: {:?}",
                        cert.first_failure()
                    )));
                }
                return Ok(SearchOutcome::Found(nesting));
            }
            Probe::Infeasible => {}
            Probe::TimedOut => return Ok(SearchOutcome::TimedOut { reached: w }),
        }
    }
    Ok(SearchOutcome::Exhausted { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Block, DesignParams};

    fn four_three_two() -> Design {
        let blocks = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .map(|b| Block::new(b.to_vec()).unwrap())
            .collect();
        Design::new(DesignParams::new(4, 3, 2), blocks)
    }

    #[test]
    fn four_three_two_small_cases() {
        let d = four_three_two();
        let opts = SearchOptions::sequential();
        assert_eq!(
            find_min_nesting(&d, Mode::Minimal, 4, &opts).unwrap(),
            SearchOutcome::Exhausted { cap: 4 }
        );
        let weak = find_min_nesting(&d, Mode::Weak, 5, &opts).unwrap();
        assert_eq!(weak.nesting().unwrap().w(), 5);
        let strong = find_min_nesting(&d, Mode::Strong, 7, &opts).unwrap();
        assert_eq!(strong.nesting().unwrap().w(), 7);
        assert_eq!(
            find_min_nesting(&d, Mode::Strong, 6, &opts).unwrap(),
            SearchOutcome::Exhausted { cap: 6 }
        );
    }

    #[test]
    fn symmetry_breaking_preserves_feasibility() {
        let d = four_three_two();
        for mode in [Mode::Weak, Mode::Strong] {
            for cap in 4..=7 {
                let on = find_min_nesting(&d, mode, cap, &SearchOptions::sequential()).unwrap();
                let off = find_min_nesting(
                    &d,
                    mode,
                    cap,
                    &SearchOptions {
                        symmetry_breaking: false,
                        ..SearchOptions::sequential()
                    },
                )
                .unwrap();
                assert_eq!(on.nesting().map(Nesting::w), off.nesting().map(Nesting::w));
            }
        }
    }

    #[test]
    fn threads_do_not_change_the_answer() {
        let (d, _) = crate::direct::fixture("E6").unwrap();
        let seq = find_min_nesting(&d, Mode::Strong, 11, &SearchOptions::sequential()).unwrap();
        let par = find_min_nesting(
            &d,
            Mode::Strong,
            11,
            &SearchOptions {
                threads: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.nesting().unwrap().w(), 11);
    }

    #[test]
    fn zero_timeout_reports_progress() {
        let (d, _) = crate::direct::fixture("E12").unwrap();
        let out = find_min_nesting(
            &d,
            Mode::Strong,
            30,
            &SearchOptions {
                timeout: Some(Duration::ZERO),
                ..SearchOptions::sequential()
            },
        )
        .unwrap();
        assert!(matches!(out, SearchOutcome::TimedOut { reached: 12 }));
    }
}
