//! Backtracking for a nesting on exactly `w` points.
//!
//! Blocks are assigned most-constrained-first. New points are
//! interchangeable, so a block may only take new point `j` once new point
//! `j−1` is in use. The first decision level can be split over worker
//! threads; the branch that comes first in candidate order wins, which makes
//! the result independent of the thread count.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use crate::design::{Design, Point};
use crate::pairs::{pair_counts, PairCountTable};
use crate::par;
use crate::verify::Mode;

/// Outcome of a fixed-`w` search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Probe {
    Found(Vec<Point>),
    Infeasible,
    TimedOut,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub threads: Option<usize>,
    pub deadline: Option<Instant>,
    pub symmetry_breaking: bool,
}

struct Problem<'a> {
    design: &'a Design,
    mode: Mode,
    w: usize,
    v: usize,
    cap: u32,
    group_of: Option<Vec<Option<usize>>>,
    symmetry_breaking: bool,
    deadline: Option<Instant>,
}

#[derive(Clone)]
struct State {
    counts: PairCountTable,
    /// Pairs already used as `{x, φ(A)}`; strong mode only.
    nested_pairs: Option<PairCountTable>,
    assignment: Vec<Option<Point>>,
    used_new: usize,
    remaining: usize,
}

struct Shared {
    stop: AtomicBool,
    /// Smallest branch index known to hold a solution.
    best_branch: AtomicUsize,
    nodes: AtomicUsize,
}

impl Problem<'_> {
    fn legal(&self, state: &State, block: usize, p: Point) -> bool {
        let pts = self.design.blocks[block].points();
        if pts.contains(&p) {
            return false;
        }
        if p < self.v {
            if let Some(owner) = &self.group_of {
                let g = owner[p];
                if g.is_some() && pts.iter().any(|&x| owner[x] == g) {
                    return false;
                }
            }
        }
        pts.iter().all(|&x| {
            state.counts.get(x, p) < self.cap
                && state
                    .nested_pairs
                    .as_ref()
                    .is_none_or(|np| np.get(x, p) == 0)
        })
    }

    fn candidates(&self, state: &State, block: usize, out: &mut Vec<Point>) {
        out.clear();
        let new_limit = if self.symmetry_breaking {
            (self.v + state.used_new + 1).min(self.w)
        } else {
            self.w
        };
        for p in 0..new_limit {
            if self.legal(state, block, p) {
                out.push(p);
            }
        }
    }

    fn apply(&self, state: &mut State, block: usize, p: Point) {
        for &x in self.design.blocks[block].points() {
            state.counts.add(x, p);
            if let Some(np) = state.nested_pairs.as_mut() {
                np.add(x, p);
            }
        }
        if p >= self.v && p - self.v == state.used_new {
            state.used_new += 1;
        }
        state.assignment[block] = Some(p);
        state.remaining -= 1;
    }

    fn undo(&self, state: &mut State, block: usize, p: Point, used_before: usize) {
        for &x in self.design.blocks[block].points() {
            state.counts.remove(x, p);
            if let Some(np) = state.nested_pairs.as_mut() {
                np.remove(x, p);
            }
        }
        state.used_new = used_before;
        state.assignment[block] = None;
        state.remaining += 1;
    }

    /// The unassigned block with fewest candidates (lowest index on ties).
    fn choose(&self, state: &State, scratch: &mut Vec<Point>) -> Option<(usize, Vec<Point>)> {
        let mut best: Option<(usize, Vec<Point>)> = None;
        for b in 0..state.assignment.len() {
            if state.assignment[b].is_some() {
                continue;
            }
            self.candidates(state, b, scratch);
            if best.as_ref().is_none_or(|(_, c)| scratch.len() < c.len()) {
                best = Some((b, scratch.clone()));
                if scratch.is_empty() {
                    break;
                }
            }
        }
        best
    }

    fn dfs(
        &self,
        state: &mut State,
        shared: &Shared,
        branch: usize,
        scratch: &mut Vec<Point>,
    ) -> Option<bool> {
        if state.remaining == 0 {
            return Some(true);
        }
        if shared.stop.load(Ordering::Relaxed)
            || shared.best_branch.load(Ordering::Relaxed) < branch
        {
            return None;
        }
        if shared
            .nodes
            .fetch_add(1, Ordering::Relaxed)
            .is_multiple_of(1024)
            && self.deadline.is_some_and(|d| Instant::now() >= d)
        {
            shared.stop.store(true, Ordering::Relaxed);
            return None;
        }
        let (block, cands) = self.choose(state, scratch)?;
        for p in cands {
            let used_before = state.used_new;
            self.apply(state, block, p);
            match self.dfs(state, shared, branch, scratch) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => {
                    self.undo(state, block, p, used_before);
                    return None;
                }
            }
            self.undo(state, block, p, used_before);
        }
        Some(false)
    }
}

/// Search for a nesting of `design` on exactly `w` points.
pub fn search_fixed_w(design: &Design, mode: Mode, w: usize, limits: Limits) -> Probe {
    let v = design.v();
    if w < v || (mode == Mode::Minimal && w != v) {
        return Probe::Infeasible;
    }
    let problem = Problem {
        design,
        mode,
        w,
        v,
        cap: design.lambda() as u32 + 1,
        group_of: design.group_of(),
        symmetry_breaking: limits.symmetry_breaking,
        deadline: limits.deadline,
    };
    let root = State {
        counts: pair_counts(&design.blocks, w),
        nested_pairs: (problem.mode == Mode::Strong).then(|| PairCountTable::new(w)),
        assignment: vec![None; design.blocks.len()],
        used_new: 0,
        remaining: design.blocks.len(),
    };
    let shared = Shared {
        stop: AtomicBool::new(false),
        best_branch: AtomicUsize::new(usize::MAX),
        nodes: AtomicUsize::new(0),
    };
    if root.remaining == 0 {
        return Probe::Found(Vec::new());
    }
    let mut scratch = Vec::new();
    let Some((block, cands)) = problem.choose(&root, &mut scratch) else {
        return Probe::Infeasible;
    };
    let branches: Vec<(usize, Point)> = cands.into_iter().enumerate().collect();
    let results = par::map(&branches, limits.threads, |&(i, p)| {
        if shared.best_branch.load(Ordering::Relaxed) < i {
            return None;
        }
        let mut state = root.clone();
        problem.apply(&mut state, block, p);
        let mut scratch = Vec::new();
        match problem.dfs(&mut state, &shared, i, &mut scratch) {
            Some(true) => {
                shared.best_branch.fetch_min(i, Ordering::Relaxed);
                Some(Some(
                    state
                        .assignment
                        .iter()
                        .map(|a| a.expect("complete"))
                        .collect::<Vec<_>>(),
                ))
            }
            Some(false) => Some(None),
            None => None,
        }
    });
    // `None` marks a branch that was abandoned: timed out, or overtaken by an
    // earlier branch. The first branch in order decides.
    for r in results {
        match r {
            Some(Some(assignment)) => return Probe::Found(assignment),
            Some(None) => continue,
            None => {
                if shared.stop.load(Ordering::Relaxed) {
                    return Probe::TimedOut;
                }
            }
        }
    }
    if shared.stop.load(Ordering::Relaxed) {
        Probe::TimedOut
    } else {
        Probe::Infeasible
    }
}
