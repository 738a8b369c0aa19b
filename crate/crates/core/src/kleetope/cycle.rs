//! Exact longest simple cycle by depth-first branch and bound.
//!
//! Cycles are enumerated by their smallest vertex `s`, so the search rooted
//! at `s` only uses vertices above `s`. At each node the remaining vertices
//! that could still extend the path are those reachable from the path's end
//! through unvisited vertices, after repeatedly discarding any with fewer
//! than two usable neighbours; the path is abandoned once that count cannot
//! beat the best cycle so far or the root is no longer reachable.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::AbstractTriangulation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleResult {
    /// Number of vertices (= edges) on the best cycle found; 0 if acyclic.
    pub length: usize,
    /// Starts at the smallest vertex; of the two directions, the one with the
    /// smaller second vertex.
    pub cycle: Vec<usize>,
    /// False when the budget ran out before the search space was exhausted,
    /// in which case `length` is only a lower bound.
    pub exact: bool,
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    root: usize,
    visited: Vec<bool>,
    path: Vec<usize>,
    best: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
    // scratch for the bound
    mark: Vec<u32>,
    stamp: u32,
    deg: Vec<usize>,
}

impl Search<'_> {
    fn usable(&self, w: usize) -> bool {
        w > self.root && !self.visited[w]
    }

    /// Upper bound on the number of vertices a completion can still add, or
    /// `None` if the path cannot be closed at all.
    fn bound(&mut self, end: usize) -> Option<usize> {
        self.stamp += 1;
        let stamp = self.stamp;
        let mut reach = Vec::new();
        let mut queue = VecDeque::from([end]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if self.usable(w) && self.mark[w] != stamp {
                    self.mark[w] = stamp;
                    reach.push(w);
                    queue.push_back(w);
                }
            }
        }
        // peel vertices that cannot sit strictly inside the closing path
        let in_pool = |mark: &[u32], x: usize, root: usize| mark[x] == stamp || x == end || x == root;
        let mut alive = reach.len();
        let mut stack = Vec::new();
        for &w in &reach {
            let d = self.adj[w].iter().filter(|&&x| in_pool(&self.mark, x, self.root)).count();
            self.deg[w] = d;
            if d < 2 {
                stack.push(w);
            }
        }
        while let Some(w) = stack.pop() {
            if self.mark[w] != stamp {
                continue;
            }
            self.mark[w] = 0;
            alive -= 1;
            for &x in &self.adj[w] {
                if self.mark[x] == stamp {
                    self.deg[x] -= 1;
                    if self.deg[x] == 1 {
                        stack.push(x);
                    }
                }
            }
        }
        let closable = self.adj[self.root]
            .iter()
            .any(|&x| (x == end && self.path.len() >= 3) || self.mark[x] == stamp);
        closable.then_some(alive)
    }

    fn dfs(&mut self, u: usize) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out || self.best.len() == self.adj.len() {
            return;
        }
        if self.path.len() >= 3 && self.path.len() > self.best.len() && self.adj[u].binary_search(&self.root).is_ok() {
            self.best = self.path.clone();
        }
        match self.bound(u) {
            Some(extra) if self.path.len() + extra > self.best.len() => {}
            _ => return,
        }
        for i in 0..self.adj[u].len() {
            let w = self.adj[u][i];
            if self.usable(w) {
                self.visited[w] = true;
                self.path.push(w);
                self.dfs(w);
                self.path.pop();
                self.visited[w] = false;
                if self.timed_out {
                    return;
                }
            }
        }
    }
}

fn canonical(mut c: Vec<usize>) -> Vec<usize> {
    if c.is_empty() {
        return c;
    }
    let m = (0..c.len()).min_by_key(|&i| c[i]).unwrap();
    c.rotate_left(m);
    if c.len() > 2 && c[c.len() - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

/// Longest simple cycle of a graph given by sorted adjacency lists.
pub fn longest_cycle_in_graph(adj: &[Vec<usize>], budget: Option<Duration>) -> CycleResult {
    let n = adj.len();
    let mut s = Search {
        adj,
        root: 0,
        visited: vec![false; n],
        path: Vec::new(),
        best: Vec::new(),
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        timed_out: false,
        mark: vec![0; n],
        stamp: 0,
        deg: vec![0; n],
    };
    for root in 0..n {
        if n - root <= s.best.len() || s.timed_out {
            break;
        }
        s.root = root;
        s.visited[root] = true;
        s.path = vec![root];
        s.dfs(root);
        s.visited[root] = false;
    }
    let best = canonical(std::mem::take(&mut s.best));
    CycleResult { length: best.len(), cycle: best, exact: !s.timed_out }
}

pub fn longest_simple_cycle(g: &AbstractTriangulation, budget: Option<Duration>) -> CycleResult {
    longest_cycle_in_graph(g.adjacency(), budget)
}

#[cfg(test)]
mod tests {
    use super::super::seeds::{octahedron, tetrahedron};
    use super::super::{combinatorial_kleetope, iterate_kleetope};
    use super::*;

    fn is_cycle(adj: &[Vec<usize>], c: &[usize]) -> bool {
        let mut seen = c.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == c.len()
            && (0..c.len()).all(|i| adj[c[i]].binary_search(&c[(i + 1) % c.len()]).is_ok())
    }

    /// Every simple cycle through brute-force subset enumeration; only for
    /// graphs with a handful of vertices.
    fn brute_force(adj: &[Vec<usize>]) -> usize {
        fn extend(adj: &[Vec<usize>], path: &mut Vec<usize>, used: &mut [bool], best: &mut usize) {
            let u = *path.last().unwrap();
            if path.len() >= 3 && adj[u].contains(&path[0]) {
                *best = (*best).max(path.len());
            }
            for &w in &adj[u] {
                if !used[w] {
                    used[w] = true;
                    path.push(w);
                    extend(adj, path, used, best);
                    path.pop();
                    used[w] = false;
                }
            }
        }
        let mut best = 0;
        for s in 0..adj.len() {
            let mut used = vec![false; adj.len()];
            used[s] = true;
            extend(adj, &mut vec![s], &mut used, &mut best);
        }
        best
    }

    #[test]
    fn octahedron_is_hamiltonian() {
        let g = octahedron();
        let r = longest_simple_cycle(&g, None);
        assert_eq!(r.length, 6);
        assert!(r.exact);
        assert!(is_cycle(g.adjacency(), &r.cycle));
        assert_eq!(r.cycle[0], 0);
    }

    #[test]
    fn kleetope_doubles_the_cycle() {
        let kt = combinatorial_kleetope(&tetrahedron());
        let r = longest_simple_cycle(&kt, None);
        assert_eq!((r.length, r.exact), (8, true));
        assert_eq!(brute_force(kt.adjacency()), 8);
        assert!(is_cycle(kt.adjacency(), &r.cycle));

        let ko = combinatorial_kleetope(&octahedron());
        let r = longest_simple_cycle(&ko, None);
        assert_eq!((r.length, r.exact), (12, true));
        assert!(is_cycle(ko.adjacency(), &r.cycle));
    }

    #[test]
    fn non_hamiltonian_small_graphs() {
        // two triangles sharing a vertex: longest cycle 3
        let adj = vec![vec![1, 2, 3, 4], vec![0, 2], vec![0, 1], vec![0, 4], vec![0, 3]];
        assert_eq!(longest_cycle_in_graph(&adj, None).length, 3);
        // a path has no cycle
        let path = vec![vec![1], vec![0, 2], vec![1]];
        let r = longest_cycle_in_graph(&path, None);
        assert_eq!((r.length, r.cycle.len()), (0, 0));
    }

    #[test]
    fn zero_budget_reports_lower_bound() {
        let k2 = iterate_kleetope(&octahedron(), 2);
        let r = longest_simple_cycle(&k2, Some(Duration::ZERO));
        assert!(!r.exact);
        assert!(r.length <= 2 * 12);
    }

    #[test]
    fn canonical_form() {
        assert_eq!(canonical(vec![3, 1, 4, 2]), vec![1, 3, 2, 4]);
        assert_eq!(canonical(vec![2, 0, 1]), vec![0, 1, 2]);
    }
}
