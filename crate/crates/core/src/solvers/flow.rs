//! Bipartite transportation feasibility by augmenting paths.
//!
//! Left nodes carry demands, right nodes carry capacities, and allowed arcs
//! have unbounded capacity. The solver is generic over [`Mass`] so that
//! decimal inputs are decided in exact integer arithmetic.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::mass::{decimal_units, quantize, with_masses, Mass};

/// Result of a max-flow run on a bipartite problem.
#[derive(Debug, Clone)]
pub(crate) struct Transport<M> {
    pub value: M,
    pub flow: Vec<Vec<M>>,
    /// Left nodes reachable from the source in the final residual graph.
    pub reachable: Vec<bool>,
    pub saturated: bool,
}

/// Maximum flow from left demands to right capacities along `arc(i, j)`.
pub(crate) fn transport<M: Mass>(
    demands: &[M],
    capacities: &[M],
    arc: impl Fn(usize, usize) -> bool,
) -> Transport<M> {
    let l = demands.len();
    let r = capacities.len();
    let adj: Vec<Vec<usize>> = (0..l).map(|i| (0..r).filter(|&j| arc(i, j)).collect()).collect();
    let mut flow = vec![vec![M::ZERO; r]; l];
    let mut left_res: Vec<M> = demands.to_vec();
    let mut right_res: Vec<M> = capacities.to_vec();

    // cheap first pass: fill arcs greedily
    for i in 0..l {
        for &j in &adj[i] {
            if !left_res[i].is_positive() {
                break;
            }
            if right_res[j].is_positive() {
                let m = left_res[i].min_of(right_res[j]);
                flow[i][j] += m;
                left_res[i] -= m;
                right_res[j] -= m;
            }
        }
    }

    let mut parent_left = vec![usize::MAX; r];
    let mut parent_right = vec![usize::MAX; l];
    let mut seen_left = vec![false; l];
    let mut seen_right = vec![false; r];
    let mut queue = VecDeque::new();
    loop {
        seen_left.iter_mut().for_each(|s| *s = false);
        seen_right.iter_mut().for_each(|s| *s = false);
        queue.clear();
        for i in 0..l {
            if left_res[i].is_positive() {
                seen_left[i] = true;
                parent_right[i] = usize::MAX;
                queue.push_back(i);
            }
        }
        let mut sink_hit = None;
        'bfs: while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if seen_right[j] {
                    continue;
                }
                seen_right[j] = true;
                parent_left[j] = i;
                if right_res[j].is_positive() {
                    sink_hit = Some(j);
                    break 'bfs;
                }
                for k in 0..l {
                    if !seen_left[k] && flow[k][j].is_positive() {
                        seen_left[k] = true;
                        parent_right[k] = j;
                        queue.push_back(k);
                    }
                }
            }
        }
        let Some(end) = sink_hit else {
            let value = crate::mass::sum(flow.iter().flat_map(|row| row.iter().copied()));
            let saturated = left_res.iter().all(|m| !m.is_positive());
            return Transport { value, flow, reachable: seen_left, saturated };
        };
        // bottleneck
        let mut b = right_res[end];
        let mut j = end;
        loop {
            let i = parent_left[j];
            match parent_right[i] {
                usize::MAX => {
                    b = b.min_of(left_res[i]);
                    break;
                }
                pj => {
                    b = b.min_of(flow[i][pj]);
                    j = pj;
                }
            }
        }
        let mut j = end;
        right_res[end] -= b;
        loop {
            let i = parent_left[j];
            flow[i][j] += b;
            match parent_right[i] {
                usize::MAX => {
                    left_res[i] -= b;
                    break;
                }
                pj => {
                    flow[i][pj] -= b;
                    j = pj;
                }
            }
        }
    }
}

/// Demands, capacities and allowed arcs of a transportation problem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowProblem {
    pub demands: Vec<f64>,
    pub capacities: Vec<f64>,
    /// `arcs[i][j]` allows shipping from left `i` to right `j`.
    pub arcs: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FlowOutcome {
    /// Rows sum to the demands, columns stay within capacities.
    Feasible { flow: Vec<Vec<f64>> },
    /// A left subset whose demand exceeds the capacity of its neighborhood.
    Infeasible { certificate: Vec<usize>, deficit: f64 },
}

impl FlowOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FlowOutcome::Feasible { .. })
    }
}

impl FlowProblem {
    /// Right nodes adjacent to some left node in `set`.
    pub fn neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let r = self.capacities.len();
        (0..r).filter(|&j| set.iter().any(|&i| self.arcs[i][j])).collect()
    }

    /// `demand(set) - capacity(neighborhood(set))`.
    pub fn hall_deficit(&self, set: &[usize]) -> f64 {
        let d: f64 = set.iter().map(|&i| self.demands[i]).sum();
        let c: f64 = self.neighborhood(set).iter().map(|&j| self.capacities[j]).sum();
        d - c
    }
}

/// Decides whether all demands can be shipped, returning a flow or a Hall
/// certificate. Decimal inputs are decided exactly.
pub fn maxflow_feasible(p: &FlowProblem) -> FlowOutcome {
    let cap_units: Option<Vec<i64>> = p.capacities.iter().map(|&c| decimal_units(c)).collect();
    let q = quantize(&p.capacities, cap_units.as_deref(), &p.demands, None);
    with_masses!(q, |caps, demands| {
        let t = transport(&demands, &caps, |i, j| p.arcs[i][j]);
        if t.saturated {
            FlowOutcome::Feasible {
                flow: t.flow.iter().map(|row| row.iter().map(|m| m.to_f64()).collect()).collect(),
            }
        } else {
            let certificate: Vec<usize> = (0..demands.len()).filter(|&i| t.reachable[i]).collect();
            let deficit = p.hall_deficit(&certificate);
            FlowOutcome::Infeasible { certificate, deficit }
        }
    })
}

/// Largest shippable total.
pub fn max_flow_value(p: &FlowProblem) -> f64 {
    let cap_units: Option<Vec<i64>> = p.capacities.iter().map(|&c| decimal_units(c)).collect();
    let q = quantize(&p.capacities, cap_units.as_deref(), &p.demands, None);
    with_masses!(q, |caps, demands| transport(&demands, &caps, |i, j| p.arcs[i][j]).value.to_f64())
}
