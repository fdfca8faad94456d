//! Exact Wasserstein-1 by min-cost flow on the complete bipartite graph.
//!
//! Weights are scaled to integer masses over a fixed denominator (largest
//! remainder rounding), so the flow is exact integer arithmetic on the
//! masses while arc costs stay floating point. Successive shortest paths
//! with node potentials keep all reduced costs nonnegative; the final
//! potentials yield a feasible Kantorovich potential via a c-transform.

use super::{validate_weights, FiniteMMSpace, MMDistError, TransportPlan};

/// Default denominator for scaling weights to integers. Costs are exact
/// whenever every weight is a multiple of 1/denominator; other weights are
/// rounded to the nearest such multiple (largest remainder).
pub const WEIGHT_DENOMINATOR: u64 = 1_000_000;

/// Optimal transport between the space's own weights and `nu` on the same
/// ground set, at the default resolution [`WEIGHT_DENOMINATOR`].
pub fn w1_exact(space: &FiniteMMSpace, nu: &[f64]) -> Result<TransportPlan, MMDistError> {
    w1_with_denominator(space, nu, WEIGHT_DENOMINATOR)
}

/// Optimal transport at a caller-chosen weight resolution.
pub fn w1_with_denominator(
    space: &FiniteMMSpace,
    nu: &[f64],
    denominator: u64,
) -> Result<TransportPlan, MMDistError> {
    let m = space.len();
    if nu.len() != m {
        return Err(MMDistError::Invalid(format!(
            "target has {} weights on a ground set of {m} points",
            nu.len()
        )));
    }
    if denominator == 0 {
        return Err(MMDistError::Invalid("denominator must be positive".into()));
    }
    validate_weights(nu, "target weights")?;

    let supplies = scale_to_integers(space.weights(), denominator);
    let demands = scale_to_integers(nu, denominator);
    let (flows, node_potentials) =
        min_cost_flow(space, &supplies, &demands, denominator as i64)?;

    let scale = denominator as f64;
    let pi: Vec<f64> = flows.iter().map(|&f| f as f64 / scale).collect();
    let source: Vec<f64> = supplies.iter().map(|&s| s as f64 / scale).collect();
    let target: Vec<f64> = demands.iter().map(|&s| s as f64 / scale).collect();
    let potential = kantorovich_potential(space, &node_potentials);
    TransportPlan::new(space, pi, potential, &source, &target)
}

/// Largest-remainder rounding of weights to integers summing to the
/// denominator exactly.
fn scale_to_integers(w: &[f64], denominator: u64) -> Vec<i64> {
    let scale = denominator as f64;
    let mut scaled: Vec<i64> = w.iter().map(|&x| (x * scale).floor() as i64).collect();
    let mut remainders: Vec<(usize, f64)> =
        w.iter().enumerate().map(|(i, &x)| (i, x * scale - (x * scale).floor())).collect();
    let assigned: i64 = scaled.iter().sum();
    let deficit = denominator as i64 - assigned;
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for &(i, _) in remainders.iter().take(deficit.max(0) as usize) {
        scaled[i] += 1;
    }
    scaled
}

struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
    flow: i64,
}

struct FlowNetwork {
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self { edges: Vec::new(), adjacency: vec![Vec::new(); nodes] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: f64) {
        self.adjacency[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost, flow: 0 });
        self.adjacency[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0, cost: -cost, flow: 0 });
    }

    fn residual(&self, index: usize) -> i64 {
        self.edges[index].cap - self.edges[index].flow
    }
}

/// Successive shortest paths with potentials. Returns the m×m flow matrix
/// between suppliers and consumers together with the final node potentials.
/// Node layout: 0 source, 1..=m suppliers, m+1..=2m consumers, 2m+1 sink.
///
/// Every Dijkstra pass finalizes all reachable nodes, so adding the
/// distances to the potentials keeps every residual arc's reduced cost
/// nonnegative; the final potentials are therefore globally feasible
/// linear-programming duals.
fn min_cost_flow(
    space: &FiniteMMSpace,
    supplies: &[i64],
    demands: &[i64],
    total: i64,
) -> Result<(Vec<i64>, Vec<f64>), MMDistError> {
    let m = space.len();
    let nodes = 2 * m + 2;
    let sink = 2 * m + 1;
    let mut network = FlowNetwork::new(nodes);
    for (i, &s) in supplies.iter().enumerate() {
        network.add_edge(0, 1 + i, s, 0.0);
    }
    for i in 0..m {
        for j in 0..m {
            network.add_edge(1 + i, 1 + m + j, total, space.dist(i, j));
        }
    }
    for (j, &d) in demands.iter().enumerate() {
        network.add_edge(1 + m + j, sink, d, 0.0);
    }

    let mut potentials = vec![0.0; nodes];
    let mut shipped = 0i64;
    while shipped < total {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut parent = vec![usize::MAX; nodes];
        let mut visited = vec![false; nodes];
        dist[0] = 0.0;
        for _ in 0..nodes {
            let mut current = usize::MAX;
            for v in 0..nodes {
                if !visited[v]
                    && dist[v].is_finite()
                    && (current == usize::MAX || dist[v] < dist[current])
                {
                    current = v;
                }
            }
            if current == usize::MAX {
                break;
            }
            visited[current] = true;
            for &index in &network.adjacency[current] {
                if network.residual(index) <= 0 {
                    continue;
                }
                let edge = &network.edges[index];
                let reduced =
                    (edge.cost + potentials[current] - potentials[edge.to]).max(0.0);
                if dist[current] + reduced < dist[edge.to] {
                    dist[edge.to] = dist[current] + reduced;
                    parent[edge.to] = index;
                }
            }
        }
        if !dist[sink].is_finite() {
            return Err(MMDistError::Infeasible(format!(
                "only {shipped} of {total} mass units are routable"
            )));
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                potentials[v] += dist[v];
            }
        }
        let mut bottleneck = total - shipped;
        let mut v = sink;
        while v != 0 {
            let index = parent[v];
            bottleneck = bottleneck.min(network.residual(index));
            v = network.edges[index ^ 1].to;
        }
        let mut v = sink;
        while v != 0 {
            let index = parent[v];
            network.edges[index].flow += bottleneck;
            network.edges[index ^ 1].flow -= bottleneck;
            v = network.edges[index ^ 1].to;
        }
        shipped += bottleneck;
    }

    let mut flows = vec![0i64; m * m];
    for i in 0..m {
        for &index in &network.adjacency[1 + i] {
            let edge = &network.edges[index];
            if index % 2 == 0 && edge.to > m && edge.to <= 2 * m {
                flows[i * m + (edge.to - m - 1)] = edge.flow;
            }
        }
    }
    Ok((flows, potentials))
}

/// 1-Lipschitz Kantorovich potential from the solver's node potentials.
///
/// With column prices v_j read off the consumer potentials, dual
/// feasibility of the flow gives D_kj − v_j ≥ −potential(supplier k) for
/// every pair, with equality on the support, so the c-transform
/// f_k = min_j (D_kj − v_j) is 1-Lipschitz and recovers the cost as
/// Σ f·(μ − ν) up to rounding.
fn kantorovich_potential(space: &FiniteMMSpace, node_potentials: &[f64]) -> Vec<f64> {
    let m = space.len();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|j| space.dist(k, j) - node_potentials[1 + m + j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}
