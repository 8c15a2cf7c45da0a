//! Min-cost assignment of unit-demand clients to open facilities with
//! capacities γ·u_i, by successive shortest paths with potentials.
//!
//! Flow amounts are exact integers after scaling every supply and capacity by
//! the common denominator of the γ·u_i. Path search uses floating-point
//! lengths; the reported cost is summed exactly.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `assign[j]` lists `(facility, amount)` for client `j`, by facility.
    pub assign: Vec<Vec<(usize, Rational)>>,
    pub cost: Rational,
}

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: u64,
    cost: f64,
    rev: usize,
}

struct Network {
    adj: Vec<Vec<Edge>>,
}

#[derive(PartialEq)]
struct Dist(f64, usize);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: f64) {
        let (rf, rt) = (self.adj[to].len(), self.adj[from].len());
        self.adj[from].push(Edge { to, cap, cost, rev: rf });
        self.adj[to].push(Edge { to: from, cap: 0, cost: -cost, rev: rt });
    }

    /// Sends up to `want` units from `s` to `t`; returns the amount sent.
    fn min_cost_flow(&mut self, s: usize, t: usize, want: u64) -> u64 {
        let nodes = self.adj.len();
        let mut potential = vec![0.0f64; nodes];
        let mut sent = 0;
        while sent < want {
            let mut dist = vec![f64::INFINITY; nodes];
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
            let mut heap = BinaryHeap::new();
            dist[s] = 0.0;
            heap.push(Reverse(Dist(0.0, s)));
            while let Some(Reverse(Dist(d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for (e, edge) in self.adj[v].iter().enumerate() {
                    if edge.cap == 0 {
                        continue;
                    }
                    // Reduced costs are nonnegative up to rounding.
                    let reduced = (edge.cost + potential[v] - potential[edge.to]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[edge.to] {
                        dist[edge.to] = nd;
                        prev[edge.to] = Some((v, e));
                        heap.push(Reverse(Dist(nd, edge.to)));
                    }
                }
            }
            if dist[t].is_infinite() {
                break;
            }
            for v in 0..nodes {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
            let mut push = want - sent;
            let mut v = t;
            while let Some((u, e)) = prev[v] {
                push = push.min(self.adj[u][e].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, e)) = prev[v] {
                self.adj[u][e].cap -= push;
                let (to, rev) = (self.adj[u][e].to, self.adj[u][e].rev);
                self.adj[to][rev].cap += push;
                v = u;
            }
            sent += push;
        }
        sent
    }
}

/// Capacity `γ·u_i` for each open facility.
pub fn scaled_capacities(inst: &Instance, open: &[usize], gamma: &Rational) -> Vec<Rational> {
    open.iter().map(|&i| gamma * inst.capacity_q(i)).collect()
}

/// Optimal assignment of every client to `open` with loads at most
/// `γ·u_i`. `Ok(None)` when total capacity is below the number of clients.
pub fn min_cost_assignment(inst: &Instance, open: &[usize], gamma: &Rational) -> Result<Option<Assignment>> {
    if open.is_empty() {
        return Err(Error::Contract("min-cost assignment needs an open facility".into()));
    }
    if *gamma < rational::one() {
        return Err(Error::Contract(format!("capacity scale {} below 1", rational::format(gamma))));
    }
    if let Some(&i) = open.iter().find(|&&i| i >= inst.n_facilities()) {
        return Err(Error::Dimension(format!("facility index {i} out of range")));
    }
    let n = inst.n_clients();
    let caps = scaled_capacities(inst, open, gamma);
    if rational::sum(&caps) < rational::int(n as i64) {
        return Ok(None);
    }
    let scale = caps.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let too_big = || Error::Solver("scaled capacities overflow 64 bits".into());
    let unit = scale.to_u64().ok_or_else(too_big)?;
    let int_caps: Vec<u64> = caps
        .iter()
        .map(|c| (c * Rational::from_integer(scale.clone())).to_integer().to_u64().ok_or_else(too_big))
        .collect::<Result<_>>()?;

    let m = open.len();
    let (s, t) = (0, n + m + 1);
    let mut net = Network::new(n + m + 2);
    for j in 0..n {
        net.add_edge(s, 1 + j, unit, 0.0);
        for (p, &i) in open.iter().enumerate() {
            net.add_edge(1 + j, 1 + n + p, unit, inst.d(i, j));
        }
    }
    for p in 0..m {
        net.add_edge(1 + n + p, t, int_caps[p], 0.0);
    }
    let want = unit.checked_mul(n as u64).ok_or_else(too_big)?;
    let sent = net.min_cost_flow(s, t, want);
    if sent < want {
        return Err(Error::Solver("capacity suffices but the flow stalled".into()));
    }

    let denom = Rational::from_integer(scale);
    let mut assign = vec![Vec::new(); n];
    let mut cost = rational::zero();
    for j in 0..n {
        for edge in &net.adj[1 + j] {
            if edge.to <= n || edge.to > n + m {
                continue;
            }
            let p = edge.to - 1 - n;
            let used = unit - edge.cap;
            if used > 0 {
                let amount = Rational::from_integer(BigInt::from(used)) / &denom;
                cost += &amount * inst.dq(open[p], j);
                assign[j].push((open[p], amount));
            }
        }
        assign[j].sort_by_key(|(i, _)| *i);
    }
    Ok(Some(Assignment { assign, cost }))
}
