//! Proper edge colouring of simple graphs with at most `Δ + 1` colours.
//!
//! Misra–Gries: for each uncoloured edge `(u, v)` build a maximal fan at `u`,
//! invert a `cd`-path, then rotate a prefix of the fan.

use crate::error::{NestError, Result};

/// Colours `0..=Δ` for the edges of a simple graph on `n` vertices, one per
/// edge in input order.
pub fn edge_colour(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        if a >= n || b >= n || a == b {
            return Err(NestError::InvalidInput(format!(
                "edge ({a},{b}) on {n} vertices"
            )));
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    let palette = degree.iter().copied().max().unwrap_or(0) + 1;
    let mut g = Colouring {
        at: vec![vec![None; palette]; n],
    };
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if adj[a].contains(&b) {
            return Err(NestError::InvalidInput(format!("repeated edge ({a},{b})")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for &(u, v) in edges {
        g.colour_edge(&adj, u, v);
    }
    edges
        .iter()
        .map(|&(a, b)| {
            g.colour_of(a, b).ok_or_else(|| {
                NestError::ContractViolation(format!("edge ({a},{b}) left uncoloured"))
            })
        })
        .collect()
}

/// Independent check: no two edges of the same colour share a vertex and no
/// colour reaches `limit`.
pub fn is_proper_edge_colouring(edges: &[(usize, usize)], colours: &[usize], limit: usize) -> bool {
    if edges.len() != colours.len() || colours.iter().any(|&c| c >= limit) {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    edges
        .iter()
        .zip(colours)
        .all(|(&(a, b), &c)| seen.insert((a, c)) && seen.insert((b, c)))
}

struct Colouring {
    /// `at[x][c]` is the neighbour joined to `x` by the edge of colour `c`.
    at: Vec<Vec<Option<usize>>>,
}

impl Colouring {
    fn free(&self, x: usize, c: usize) -> bool {
        self.at[x][c].is_none()
    }

    fn first_free(&self, x: usize) -> usize {
        self.at[x]
            .iter()
            .position(Option::is_none)
            .expect("Δ + 1 colours leave one free at every vertex")
    }

    fn colour_of(&self, a: usize, b: usize) -> Option<usize> {
        self.at[a].iter().position(|&y| y == Some(b))
    }

    fn set(&mut self, a: usize, b: usize, c: usize) {
        self.at[a][c] = Some(b);
        self.at[b][c] = Some(a);
    }

    fn clear(&mut self, a: usize, b: usize) {
        if let Some(c) = self.colour_of(a, b) {
            self.at[a][c] = None;
            self.at[b][c] = None;
        }
    }

    fn colour_edge(&mut self, adj: &[Vec<usize>], u: usize, v: usize) {
        // maximal fan: fan[i+1]'s edge colour is free on fan[i]
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("non-empty");
            let next = adj[u].iter().copied().find(|&y| {
                !fan.contains(&y) && self.colour_of(u, y).is_some_and(|c| self.free(last, c))
            });
            match next {
                Some(y) => fan.push(y),
                None => break,
            }
        }
        let c = self.first_free(u);
        let d = self.first_free(*fan.last().expect("non-empty"));
        self.invert_path(u, c, d);
        let is_fan_prefix = |g: &Colouring, end: usize| {
            (1..=end).all(|j| {
                g.colour_of(u, fan[j])
                    .is_some_and(|col| g.free(fan[j - 1], col))
            })
        };
        let end = (0..fan.len())
            .find(|&i| self.free(fan[i], d) && is_fan_prefix(self, i))
            .expect("Misra–Gries guarantees a rotatable prefix");
        let shifted: Vec<usize> = (1..=end)
            .map(|j| self.colour_of(u, fan[j]).expect("fan edges are coloured"))
            .collect();
        for &y in &fan[1..=end] {
            self.clear(u, y);
        }
        for (j, &col) in shifted.iter().enumerate() {
            self.set(u, fan[j], col);
        }
        self.set(u, fan[end], d);
    }

    /// Swap colours `c` and `d` along the path from `u` that starts with a `d` edge.
    fn invert_path(&mut self, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let (mut x, mut want) = (u, d);
        while let Some(y) = self.at[x][want] {
            path.push((x, y, want));
            x = y;
            want = if want == d { c } else { d };
        }
        for &(a, b, _) in &path {
            self.clear(a, b);
        }
        for &(a, b, col) in &path {
            self.set(a, b, if col == d { c } else { d });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(n: usize, edges: &[(usize, usize)]) -> usize {
        let colours = edge_colour(n, edges).unwrap();
        let mut deg = vec![0; n];
        for &(a, b) in edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let delta = deg.into_iter().max().unwrap_or(0);
        assert!(is_proper_edge_colouring(edges, &colours, delta + 1));
        colours.iter().copied().max().map_or(0, |c| c + 1)
    }

    #[test]
    fn odd_cycle_needs_three() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        assert_eq!(check(5, &edges), 3);
    }

    #[test]
    fn complete_graphs() {
        for n in 2..12 {
            let edges: Vec<_> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect();
            assert!(check(n, &edges) <= n);
        }
    }

    #[test]
    fn petersen() {
        let mut edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5).map(|i| (i, i + 5)));
        edges.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        assert_eq!(check(10, &edges), 4);
    }

    #[test]
    fn circulants() {
        for n in [9usize, 13, 17, 21] {
            for step in 1..n / 2 {
                let edges: Vec<_> = (0..n)
                    .flat_map(|i| [(i, (i + 1) % n), (i, (i + step + 1) % n)])
                    .collect();
                let mut simple: Vec<(usize, usize)> =
                    edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                simple.sort_unstable();
                simple.dedup();
                check(n, &simple);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(edge_colour(3, &[(0, 0)]).is_err());
        assert!(edge_colour(3, &[(0, 1), (1, 0)]).is_err());
        assert!(!is_proper_edge_colouring(&[(0, 1), (1, 2)], &[0, 0], 3));
    }
}
