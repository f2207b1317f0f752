//! Dinic max-flow over exact rational capacities.

use std::collections::VecDeque;

use crate::Rational;

struct Arc {
    to: usize,
    cap: Rational,
}

pub(crate) struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); n],
            arcs: Vec::new(),
        }
    }

    fn push_pair(&mut self, u: usize, v: usize, forward: Rational, backward: Rational) {
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap: forward });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: backward });
    }

    pub(crate) fn add_arc(&mut self, u: usize, v: usize, cap: Rational) {
        if !cap.is_zero() {
            self.push_pair(u, v, cap, Rational::zero());
        }
    }

    pub(crate) fn add_undirected(&mut self, u: usize, v: usize, cap: Rational) {
        if !cap.is_zero() && u != v {
            self.push_pair(u, v, cap.clone(), cap);
        }
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap.is_positive() && level[arc.to].is_none() {
                    level[arc.to] = Some(level[u].unwrap() + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        limit: Rational,
        level: &[Option<usize>],
        next: &mut [usize],
    ) -> Rational {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let to = self.arcs[a].to;
            if self.arcs[a].cap.is_positive() && level[to] == level[u].map(|l| l + 1) {
                let bottleneck = limit.clone().min(self.arcs[a].cap.clone());
                let pushed = self.augment(to, t, bottleneck, level, next);
                if pushed.is_positive() {
                    self.arcs[a].cap -= &pushed;
                    self.arcs[a ^ 1].cap += &pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        Rational::zero()
    }

    /// Maximum s-t flow value. The residual network is kept for
    /// [`FlowNetwork::source_side`].
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> Rational {
        let mut total = Rational::zero();
        let unbounded: Rational = self.adj[s].iter().map(|&a| self.arcs[a].cap.clone()).sum();
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, unbounded.clone(), &level, &mut next);
                if !pushed.is_positive() {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Vertices reachable from `s` in the residual network: the source side of
    /// the minimal minimum cut.
    pub(crate) fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l.is_some()).collect()
    }
}
