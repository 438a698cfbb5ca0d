//! Time-expanded trellis of a finite-state channel.
//!
//! Edges are stored sorted by `(time, from, input, to)`, so the edge index
//! order is stable and is the order used for tie-breaking everywhere.

use std::ops::Range;

use crate::channel::ChannelModel;
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Zero-based time index.
    pub time: usize,
    pub from: usize,
    pub to: usize,
    pub input: u8,
    pub output: f64,
}

#[derive(Debug, Clone)]
pub struct Trellis {
    n: usize,
    num_states: usize,
    edges: Vec<Edge>,
    time_offsets: Vec<usize>,
    // indexed by time * num_states + state
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    // ln P(s) for each state at time 0
    log_prior: Vec<f64>,
    // -ln P(s' | x, s) when a (state, input) pair branches
    branch_log_split: Vec<f64>,
    fsisic: bool,
}

impl Trellis {
    /// Unrolls `channel` over `n` time steps, dropping edges that cannot lie
    /// on a path from a possible start state to time `n`.
    pub fn build(channel: &ChannelModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1".into()));
        }
        let s = channel.num_states();
        let start_alive: Vec<bool> = (0..s).map(|st| channel.initial_prob(st) > 0.0).collect();

        // forward reachability
        let mut alive = vec![vec![false; s]; n + 1];
        alive[0] = start_alive;
        for t in 0..n {
            for tr in channel.transitions() {
                if alive[t][tr.from] {
                    alive[t + 1][tr.to] = true;
                }
            }
        }
        // backward: drop states with no continuation
        let mut live_back = vec![vec![false; s]; n + 1];
        live_back[n] = alive[n].clone();
        for t in (0..n).rev() {
            for tr in channel.transitions() {
                if alive[t][tr.from] && live_back[t + 1][tr.to] {
                    live_back[t][tr.from] = true;
                }
            }
        }

        let mut edges = Vec::new();
        let mut time_offsets = Vec::with_capacity(n + 1);
        for t in 0..n {
            time_offsets.push(edges.len());
            for tr in channel.transitions() {
                if live_back[t][tr.from] && live_back[t + 1][tr.to] {
                    edges.push(Edge {
                        time: t,
                        from: tr.from,
                        to: tr.to,
                        input: tr.input,
                        output: tr.output,
                    });
                }
            }
        }
        time_offsets.push(edges.len());
        if edges.is_empty() {
            return Err(Error::InvalidArgument("channel admits no path of this length".into()));
        }

        let mut outgoing = vec![Vec::new(); n * s];
        let mut incoming = vec![Vec::new(); n * s];
        for (idx, e) in edges.iter().enumerate() {
            outgoing[e.time * s + e.from].push(idx);
            incoming[e.time * s + e.to].push(idx);
        }
        let log_prior = (0..s).map(|st| channel.initial_prob(st).ln()).collect();
        let branch_log_split = edges
            .iter()
            .map(|e| (channel.branching(e.from, e.input) as f64).ln())
            .collect();
        let fsisic = channel.is_fsisic();
        Ok(Trellis {
            n,
            num_states: s,
            edges,
            time_offsets,
            outgoing,
            incoming,
            log_prior,
            branch_log_split,
            fsisic,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_fsisic(&self) -> bool {
        self.fsisic
    }

    pub fn edges_at(&self, t: usize) -> Range<usize> {
        self.time_offsets[t]..self.time_offsets[t + 1]
    }

    /// Edges at time `t` leaving `state`.
    pub fn outgoing(&self, t: usize, state: usize) -> &[usize] {
        &self.outgoing[t * self.num_states + state]
    }

    /// Edges at time `t` entering `state` (at time `t + 1`).
    pub fn incoming(&self, t: usize, state: usize) -> &[usize] {
        &self.incoming[t * self.num_states + state]
    }

    /// States with incoming edges at time `t` (0-based), in increasing order.
    /// These are the states whose flow conservation links time `t` and `t + 1`.
    pub fn interface_states(&self, t: usize) -> Vec<usize> {
        (0..self.num_states).filter(|&j| !self.incoming(t, j).is_empty()).collect()
    }

    /// Edge path of an input sequence, when the path is unique.
    ///
    /// For channels with a known start state this is the one path
    /// consistent with the bits. Returns `None` if the bits cannot be sent.
    pub fn path_of_bits(&self, bits: &[u8]) -> Option<Vec<usize>> {
        if bits.len() != self.n {
            return None;
        }
        let starts: Vec<usize> =
            (0..self.num_states).filter(|&s| self.log_prior[s].is_finite()).collect();
        if starts.len() != 1 {
            return None;
        }
        let mut state = starts[0];
        let mut path = Vec::with_capacity(self.n);
        for (t, &b) in bits.iter().enumerate() {
            let mut it = self.outgoing(t, state).iter().filter(|&&e| self.edges[e].input == b);
            let &e = it.next()?;
            if it.next().is_some() {
                return None;
            }
            path.push(e);
            state = self.edges[e].to;
        }
        Some(path)
    }

    /// Indicator flow of an edge path.
    pub fn path_flow(&self, path: &[usize]) -> Vec<f64> {
        let mut g = vec![0.0; self.edges.len()];
        for &e in path {
            g[e] = 1.0;
        }
        g
    }

    /// Projection onto the input bits: `f_i` is the flow on input-1 edges
    /// at time `i`.
    pub fn project_bits(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.edges.len(), g.len())?;
        Ok((0..self.n)
            .map(|t| {
                self.edges_at(t)
                    .filter(|&e| self.edges[e].input == 1)
                    .map(|e| g[e])
                    .sum()
            })
            .collect())
    }

    /// Signal-space projection: `p_i` is the flow-weighted noiseless output
    /// at time `i`.
    pub fn project_signal(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.edges.len(), g.len())?;
        Ok((0..self.n)
            .map(|t| self.edges_at(t).map(|e| g[e] * self.edges[e].output).sum())
            .collect())
    }

    /// `ln P(s' | x, s)` plus, at the first time step, `ln P(s)`.
    pub fn edge_log_weight(&self, e: usize) -> f64 {
        let edge = &self.edges[e];
        let mut w = -self.branch_log_split[e];
        if edge.time == 0 {
            w += self.log_prior[edge.from];
        }
        w
    }

    /// Per-time flow sums; 1 everywhere for points of the trellis polytope.
    pub fn time_sums(&self, g: &[f64]) -> Vec<f64> {
        (0..self.n).map(|t| self.edges_at(t).map(|e| g[e]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostMode {
    /// `(y - a)^2`
    #[default]
    Squared,
    /// Negative log-likelihood including the initial-state prior.
    LogLikelihood,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchCosts {
    pub mode: CostMode,
    pub costs: Vec<f64>,
}

impl BranchCosts {
    pub fn path_cost(&self, path: &[usize]) -> f64 {
        path.iter().map(|&e| self.costs[e]).sum()
    }

    pub fn flow_cost(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.costs).map(|(g, b)| g * b).sum()
    }
}

/// Branch metric of every trellis edge for received vector `y`.
pub fn branch_costs(trellis: &Trellis, y: &[f64], sigma: f64, mode: CostMode) -> Result<BranchCosts> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    check_len(trellis.len(), y.len())?;
    let norm = 0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).ln();
    let costs = trellis
        .edges
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let d = y[e.time] - e.output;
            match mode {
                CostMode::Squared => d * d,
                CostMode::LogLikelihood => {
                    d * d / (2.0 * sigma * sigma) + norm - trellis.edge_log_weight(idx)
                }
            }
        })
        .collect();
    Ok(BranchCosts { mode, costs })
}

/// Minimum-cost edge path. Among equal-cost predecessors the lowest edge
/// index wins.
pub fn viterbi(trellis: &Trellis, costs: &BranchCosts) -> Result<(Vec<usize>, f64)> {
    check_len(trellis.num_edges(), costs.costs.len())?;
    let s = trellis.num_states;
    let n = trellis.n;
    let mut metric = vec![f64::INFINITY; s];
    let mut back = vec![usize::MAX; n * s];
    for t in 0..n {
        let mut next = vec![f64::INFINITY; s];
        for e in trellis.edges_at(t) {
            let edge = &trellis.edges[e];
            let base = if t == 0 { 0.0 } else { metric[edge.from] };
            if !base.is_finite() && t > 0 {
                continue;
            }
            let cand = base + costs.costs[e];
            let slot = &mut back[t * s + edge.to];
            if cand < next[edge.to] || (cand == next[edge.to] && e < *slot) {
                next[edge.to] = cand;
                *slot = e;
            }
        }
        metric = next;
    }
    let mut best_state = None;
    for j in 0..s {
        let e = back[(n - 1) * s + j];
        if e == usize::MAX {
            continue;
        }
        best_state = match best_state {
            None => Some(j),
            Some(b) => {
                let eb = back[(n - 1) * s + b];
                if metric[j] < metric[b] || (metric[j] == metric[b] && e < eb) {
                    Some(j)
                } else {
                    Some(b)
                }
            }
        };
    }
    let mut state = best_state.ok_or_else(|| Error::InvalidArgument("trellis has no path".into()))?;
    let total = metric[state];
    let mut path = vec![0; n];
    for t in (0..n).rev() {
        let e = back[t * s + state];
        path[t] = e;
        state = trellis.edges[e].from;
    }
    Ok((path, total))
}
