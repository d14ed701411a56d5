//! MAP oracles: argmax of ⟨z, θ⟩ over a constraint set.
//!
//! All tie-breaking is total and deterministic (lowest index, fixed
//! neighbor-expansion order), so identical inputs give identical outputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{check_dim, Error, Result};
use crate::space::{grid_neighbors, State, StateSpace};

/// Cell costs are clamped below at this floor before running Dijkstra, so
/// that learned cost maps that dip negative mid-training still yield valid
/// shortest-path relaxations. Weights are always recomputed from the
/// unclamped costs.
pub const DEFAULT_COST_FLOOR: f64 = 1e-6;

/// A MAP state together with its weight ⟨z*, θ⟩, recomputed from the state.
#[derive(Clone, Debug, PartialEq)]
pub struct MapResult {
    pub state: State,
    pub weight: f64,
}

fn check_finite(theta: &[f64], what: &str) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be non-empty")));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} must be finite")));
    }
    Ok(())
}

/// One-hot at the maximal coordinate; ties broken by lowest index.
pub fn map_categorical(theta: &[f64]) -> Result<MapResult> {
    check_finite(theta, "theta")?;
    let mut best = 0usize;
    for (i, &t) in theta.iter().enumerate().skip(1) {
        if t > theta[best] {
            best = i;
        }
    }
    let state = State::one_hot(theta.len(), best);
    let weight = state.dot(theta);
    Ok(MapResult { state, weight })
}

/// Indicator of the k largest coordinates; ties broken by lowest index.
pub fn map_k_subset(theta: &[f64], k: usize) -> Result<MapResult> {
    check_finite(theta, "theta")?;
    if k == 0 || k > theta.len() {
        return Err(Error::InvalidArgument(format!(
            "k must satisfy 1 <= k <= m, got k={k}, m={}",
            theta.len()
        )));
    }
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&a, &b| {
        theta[b]
            .partial_cmp(&theta[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let state = State::from_indices(theta.len(), &order[..k]);
    let weight = state.dot(theta);
    Ok(MapResult { state, weight })
}

// Min-heap entry with a total order: cost ascending, then node ascending.
#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for BinaryHeap's max-heap; costs are finite here
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost top-left → bottom-right path under 8-neighbor moves, with
/// vertex costs summed over visited cells (both endpoints included).
/// Equivalently `argmax ⟨z, −costs⟩`. Uses [`DEFAULT_COST_FLOOR`].
pub fn map_grid_path(rows: usize, cols: usize, costs: &[f64]) -> Result<MapResult> {
    map_grid_path_with_floor(rows, cols, costs, DEFAULT_COST_FLOOR)
}

pub fn map_grid_path_with_floor(
    rows: usize,
    cols: usize,
    costs: &[f64],
    floor: f64,
) -> Result<MapResult> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid path: rows and cols must be >= 2, got {rows}x{cols}"
        )));
    }
    check_dim(rows * cols, costs.len())?;
    check_finite(costs, "costs")?;
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cost floor must be positive and finite, got {floor}"
        )));
    }

    let n = rows * cols;
    let goal = n - 1;
    let clamped: Vec<f64> = costs.iter().map(|&c| c.max(floor)).collect();

    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    dist[0] = clamped[0];
    heap.push(HeapEntry { cost: dist[0], node: 0 });

    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        if node == goal {
            break;
        }
        for next in grid_neighbors(rows, cols, node) {
            let next_cost = cost + clamped[next];
            // strict improvement only: the first-found predecessor wins ties
            if next_cost < dist[next] {
                dist[next] = next_cost;
                prev[next] = node;
                heap.push(HeapEntry { cost: next_cost, node: next });
            }
        }
    }

    let mut cells = Vec::new();
    let mut cur = goal;
    loop {
        cells.push(cur);
        if cur == 0 {
            break;
        }
        cur = prev[cur];
    }
    let state = State::from_indices(n, &cells);
    let neg_costs: Vec<f64> = costs.iter().map(|&c| -c).collect();
    let weight = state.dot(&neg_costs);
    Ok(MapResult { state, weight })
}

/// Dispatch to the kind-specific solver for `space`.
pub fn map(space: &StateSpace, theta: &[f64]) -> Result<MapResult> {
    check_dim(space.dim(), theta.len())?;
    match *space {
        StateSpace::Categorical { .. } => map_categorical(theta),
        StateSpace::KSubset { k, .. } => map_k_subset(theta, k),
        StateSpace::GridPath { rows, cols } => {
            let costs: Vec<f64> = theta.iter().map(|&t| -t).collect();
            let result = map_grid_path(rows, cols, &costs)?;
            let weight = result.state.dot(theta);
            Ok(MapResult { state: result.state, weight })
        }
    }
}
