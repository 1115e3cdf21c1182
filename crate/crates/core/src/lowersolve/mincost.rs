//! Successive shortest augmenting paths with Johnson potentials.
//!
//! Small, dense-ish networks only. Dijkstra pops nodes by `(distance, index)`
//! and only strictly shorter labels replace a predecessor, so among equal-cost
//! augmenting paths the one through the lowest-indexed nodes wins.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    rev: usize,
    cap: i128,
    cost: i128,
}

#[derive(Debug, Clone)]
pub struct MinCostFlow {
    graph: Vec<Vec<Edge>>,
    handles: Vec<(usize, usize)>,
}

/// Handle of an edge added with [`MinCostFlow::add_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeId(usize);

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            handles: Vec::new(),
        }
    }

    /// Costs must be nonnegative.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i128, cost: i128) -> EdgeId {
        debug_assert!(cost >= 0 && cap >= 0);
        let fwd = self.graph[from].len();
        let bwd = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Edge { to, rev: bwd, cap, cost });
        self.graph[to].push(Edge { to: from, rev: fwd, cap: 0, cost: -cost });
        self.handles.push((from, fwd));
        EdgeId(self.handles.len() - 1)
    }

    /// Flow currently on an edge.
    pub fn flow(&self, id: EdgeId) -> i128 {
        let (node, idx) = self.handles[id.0];
        let e = &self.graph[node][idx];
        self.graph[e.to][e.rev].cap
    }

    /// Pushes up to `limit` units from `source` to `sink` at minimum cost.
    /// Returns `(flow, cost)`.
    pub fn run(&mut self, source: usize, sink: usize, limit: i128) -> (i128, i128) {
        let n = self.graph.len();
        let mut potential = vec![0i128; n];
        let mut total_flow = 0i128;
        let mut total_cost = 0i128;
        let mut dist = vec![i128::MAX; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];

        while total_flow < limit {
            dist.iter_mut().for_each(|d| *d = i128::MAX);
            prev.iter_mut().for_each(|p| *p = None);
            dist[source] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i128, source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (i, e) in self.graph[u].iter().enumerate() {
                    if e.cap == 0 {
                        continue;
                    }
                    let nd = d + e.cost + potential[u] - potential[e.to];
                    if nd < dist[e.to] {
                        dist[e.to] = nd;
                        prev[e.to] = Some((u, i));
                        heap.push(Reverse((nd, e.to)));
                    }
                }
            }
            if dist[sink] == i128::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i128::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - total_flow;
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                push = push.min(self.graph[u][i].cap);
                v = u;
            }
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                let rev = self.graph[u][i].rev;
                self.graph[u][i].cap -= push;
                self.graph[v][rev].cap += push;
                total_cost += push * self.graph[u][i].cost;
                v = u;
            }
            total_flow += push;
        }
        (total_flow, total_cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_cheaper_parallel_edges_first() {
        let mut g = MinCostFlow::new(2);
        let cheap = g.add_edge(0, 1, 2, 1);
        let dear = g.add_edge(0, 1, 5, 3);
        assert_eq!(g.run(0, 1, 4), (4, 2 + 6));
        assert_eq!(g.flow(cheap), 2);
        assert_eq!(g.flow(dear), 2);
    }

    #[test]
    fn reroutes_through_residual_edges() {
        // classic diamond where the greedy first path must be undone
        let mut g = MinCostFlow::new(4);
        g.add_edge(0, 1, 1, 1);
        g.add_edge(0, 2, 1, 5);
        g.add_edge(1, 2, 1, 1);
        g.add_edge(1, 3, 1, 5);
        g.add_edge(2, 3, 1, 1);
        assert_eq!(g.run(0, 3, 2), (2, 12));
    }

    #[test]
    fn stops_at_max_flow() {
        let mut g = MinCostFlow::new(3);
        g.add_edge(0, 1, 3, 0);
        g.add_edge(1, 2, 1, 7);
        assert_eq!(g.run(0, 2, 10), (1, 7));
    }
}
