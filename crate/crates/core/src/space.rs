//! Binary states and the constraint sets they live in.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of states an exhaustive enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Largest grid side for which path enumeration is allowed. Path counts
/// explode beyond this; larger grids rely on the MAP solver only.
pub const MAX_ENUMERABLE_GRID_SIDE: usize = 4;

/// A binary vector `z ∈ {0,1}^m`, a vertex of the constraint polytope.
///
/// `Ord` is lexicographic over the entries, which fixes the deterministic
/// enumeration order used for inverse-CDF sampling.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: Vec<u8>,
}

impl State {
    /// Build a state from 0/1 entries.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("state entries must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(m: usize) -> Self {
        Self { bits: vec![0; m] }
    }

    /// One-hot state of dimension `m` with a single 1 at `index`.
    pub fn one_hot(m: usize, index: usize) -> Self {
        let mut bits = vec![0; m];
        bits[index] = 1;
        Self { bits }
    }

    /// Indicator of the given index set.
    pub fn from_indices(m: usize, indices: &[usize]) -> Self {
        let mut bits = vec![0u8; m];
        for &i in indices {
            bits[i] = 1;
        }
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn as_bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    /// Inner product `⟨z, θ⟩`.
    pub fn dot(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(self.bits.len(), theta.len());
        self.iter_ones().map(|i| theta[i]).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

/// A constraint set `C ⊆ {0,1}^m` together with enough structure to
/// enumerate it (when small) and to solve MAP over it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    /// One-hot vectors: `⟨z, 1⟩ = 1`.
    Categorical { m: usize },
    /// Binary vectors with exactly `k` ones: `⟨z, 1⟩ = k`.
    KSubset { m: usize, k: usize },
    /// Vertex indicators of simple top-left → bottom-right paths on a
    /// `rows × cols` grid under 8-neighbor connectivity.
    GridPath { rows: usize, cols: usize },
}

impl StateSpace {
    pub fn categorical(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("categorical: m must be >= 1".into()));
        }
        Ok(Self::Categorical { m })
    }

    pub fn k_subset(m: usize, k: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("k-subset: m must be >= 1".into()));
        }
        if k == 0 || k > m {
            return Err(Error::InvalidArgument(format!(
                "k-subset: k must satisfy 1 <= k <= m, got k={k}, m={m}"
            )));
        }
        Ok(Self::KSubset { m, k })
    }

    pub fn grid_path(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid path: rows and cols must be >= 2, got {rows}x{cols}"
            )));
        }
        Ok(Self::GridPath { rows, cols })
    }

    /// Dimension of the state vectors.
    pub fn dim(&self) -> usize {
        match *self {
            Self::Categorical { m } => m,
            Self::KSubset { m, .. } => m,
            Self::GridPath { rows, cols } => rows * cols,
        }
    }

    /// Number of states, when cheaply computable without enumeration.
    pub fn count(&self) -> Option<u128> {
        match *self {
            Self::Categorical { m } => Some(m as u128),
            Self::KSubset { m, k } => binomial(m, k),
            Self::GridPath { .. } => None,
        }
    }

    /// Whether `z` satisfies the constraints of this space.
    pub fn contains(&self, z: &State) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        match *self {
            Self::Categorical { .. } => z.count_ones() == 1,
            Self::KSubset { k, .. } => z.count_ones() == k,
            Self::GridPath { rows, cols } => is_path_indicator(rows, cols, z),
        }
    }

    /// Every state in `C` exactly once, in lexicographic order.
    pub fn enumerate(&self) -> Result<Vec<State>> {
        self.enumerate_capped(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_capped(&self, cap: usize) -> Result<Vec<State>> {
        if let Some(n) = self.count() {
            if n > cap as u128 {
                return Err(Error::IntractableEnumeration(format!(
                    "{self:?} has {n} states, cap is {cap}"
                )));
            }
        }
        let mut states = match *self {
            Self::Categorical { m } => (0..m).map(|i| State::one_hot(m, i)).collect::<Vec<_>>(),
            Self::KSubset { m, k } => enumerate_k_subsets(m, k),
            Self::GridPath { rows, cols } => {
                if rows > MAX_ENUMERABLE_GRID_SIDE || cols > MAX_ENUMERABLE_GRID_SIDE {
                    return Err(Error::IntractableEnumeration(format!(
                        "grid path enumeration is limited to {side}x{side} grids, got {rows}x{cols}",
                        side = MAX_ENUMERABLE_GRID_SIDE
                    )));
                }
                return enumerate_grid_paths(rows, cols, cap);
            }
        };
        states.sort_unstable();
        Ok(states)
    }
}

fn binomial(m: usize, k: usize) -> Option<u128> {
    if k > m {
        return Some(0);
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((m - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

fn enumerate_k_subsets(m: usize, k: usize) -> Vec<State> {
    let mut out = Vec::new();
    let mut indices: Vec<usize> = (0..k).collect();
    loop {
        out.push(State::from_indices(m, &indices));
        // next combination in index-lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if indices[i] != i + m - k {
                break;
            }
        }
        indices[i] += 1;
        for j in i + 1..k {
            indices[j] = indices[j - 1] + 1;
        }
    }
}

/// The eight king moves, in a fixed row-major order. Solvers and
/// enumeration share this order so tie-breaking is consistent.
pub(crate) const GRID_NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

pub(crate) fn grid_neighbors(rows: usize, cols: usize, cell: usize) -> Vec<usize> {
    let (r, c) = (cell / cols, cell % cols);
    let mut out = Vec::with_capacity(8);
    for (dr, dc) in GRID_NEIGHBOR_OFFSETS {
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        if nr >= 0 && nr < rows as isize && nc >= 0 && nc < cols as isize {
            out.push(nr as usize * cols + nc as usize);
        }
    }
    out
}

/// Enumerate the distinct vertex-indicator sets of simple paths from the
/// top-left to the bottom-right cell. Different traversals of the same cell
/// set collapse to one state.
fn enumerate_grid_paths(rows: usize, cols: usize, cap: usize) -> Result<Vec<State>> {
    let n = rows * cols;
    let goal = n - 1;
    let mut seen: BTreeSet<State> = BTreeSet::new();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut stack = vec![0usize];
    dfs_paths(rows, cols, goal, &mut visited, &mut stack, &mut seen, cap)?;
    Ok(seen.into_iter().collect())
}

fn dfs_paths(
    rows: usize,
    cols: usize,
    goal: usize,
    visited: &mut Vec<bool>,
    stack: &mut Vec<usize>,
    seen: &mut BTreeSet<State>,
    cap: usize,
) -> Result<()> {
    let current = *stack.last().unwrap();
    if current == goal {
        seen.insert(State::from_indices(rows * cols, stack));
        if seen.len() > cap {
            return Err(Error::IntractableEnumeration(format!(
                "grid path enumeration exceeded cap {cap}"
            )));
        }
        return Ok(());
    }
    for next in grid_neighbors(rows, cols, current) {
        if !visited[next] {
            visited[next] = true;
            stack.push(next);
            dfs_paths(rows, cols, goal, visited, stack, seen, cap)?;
            stack.pop();
            visited[next] = false;
        }
    }
    Ok(())
}

/// Check that the support of `z` is exactly the cell set of some simple
/// top-left → bottom-right path (a Hamiltonian path of the induced subgraph).
fn is_path_indicator(rows: usize, cols: usize, z: &State) -> bool {
    let n = rows * cols;
    let goal = n - 1;
    if !z.get(0) || !z.get(goal) {
        return false;
    }
    let check = PathCheck { rows, cols, goal, total: z.count_ones(), z };
    let mut visited = vec![false; n];
    visited[0] = true;
    check.dfs(0, 1, &mut visited)
}

struct PathCheck<'a> {
    rows: usize,
    cols: usize,
    goal: usize,
    total: usize,
    z: &'a State,
}

impl PathCheck<'_> {
    fn dfs(&self, current: usize, used: usize, visited: &mut Vec<bool>) -> bool {
        if current == self.goal {
            return used == self.total;
        }
        for next in grid_neighbors(self.rows, self.cols, current) {
            if self.z.get(next) && !visited[next] {
                visited[next] = true;
                if self.dfs(next, used + 1, visited) {
                    return true;
                }
                visited[next] = false;
            }
        }
        false
    }
}
