//! Spatial meshes on an interval and graded time grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Boundary condition imposed at both ends of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Homogeneous Dirichlet: endpoint hat functions are excluded.
    Dirichlet,
    /// Zero total flux: every node carries a degree of freedom.
    ZeroFlux,
}

impl BoundaryCondition {
    pub fn label(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::ZeroFlux => "zeroflux",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "zeroflux" | "zero-flux" | "neumann" => Ok(BoundaryCondition::ZeroFlux),
            other => Err(format!("unknown boundary condition `{other}`")),
        }
    }
}

/// Piecewise-linear finite element mesh of `[a, b]`.
///
/// Nodes are numbered `0..=P+1`; the free nodes depend on the boundary
/// condition. Free-node `p` (0-based) maps to global node
/// `p + first_free_node()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    nodes: Vec<f64>,
    element_sizes: Vec<f64>,
    bc: BoundaryCondition,
}

impl SpatialMesh {
    /// Uniform mesh with `interior` interior nodes, spacing `(b - a) / (interior + 1)`.
    pub fn uniform(a: f64, b: f64, interior: usize, bc: BoundaryCondition) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return invalid(format!("interval [{a}, {b}] must have b > a"));
        }
        if interior == 0 {
            return invalid("at least one interior node is required");
        }
        let cells = (interior + 1) as f64;
        let len = b - a;
        let mut nodes: Vec<f64> = (0..=interior + 1)
            .map(|i| a + (i as f64) * len / cells)
            .collect();
        // pin the right endpoint exactly
        nodes[interior + 1] = b;
        Self::from_nodes(nodes, bc)
    }

    /// Mesh from explicit, strictly increasing node coordinates (at least three).
    pub fn from_nodes(nodes: Vec<f64>, bc: BoundaryCondition) -> Result<Self> {
        if nodes.len() < 3 {
            return invalid("a mesh needs at least one interior node");
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return invalid("node coordinates must be finite");
        }
        let element_sizes: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if element_sizes.iter().any(|&h| h <= 0.0) {
            return invalid("node coordinates must be strictly increasing");
        }
        Ok(SpatialMesh {
            nodes,
            element_sizes,
            bc,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element_sizes(&self) -> &[f64] {
        &self.element_sizes
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn left(&self) -> f64 {
        self.nodes[0]
    }

    pub fn right(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Number of interior nodes `P`.
    pub fn interior_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn element_count(&self) -> usize {
        self.element_sizes.len()
    }

    /// Largest element size.
    pub fn h_max(&self) -> f64 {
        self.element_sizes.iter().cloned().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.element_sizes
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of degrees of freedom `Q_h`.
    pub fn free_count(&self) -> usize {
        match self.bc {
            BoundaryCondition::Dirichlet => self.interior_count(),
            BoundaryCondition::ZeroFlux => self.nodes.len(),
        }
    }

    /// Global index of free node 0.
    pub fn first_free_node(&self) -> usize {
        match self.bc {
            BoundaryCondition::Dirichlet => 1,
            BoundaryCondition::ZeroFlux => 0,
        }
    }

    /// Coordinates of the free nodes.
    pub fn free_nodes(&self) -> &[f64] {
        let first = self.first_free_node();
        &self.nodes[first..first + self.free_count()]
    }

    /// Expand a free-node coefficient vector to all nodes (zeros on Dirichlet boundaries).
    pub fn to_full(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.free_count());
        let mut full = vec![0.0; self.nodes.len()];
        let first = self.first_free_node();
        full[first..first + coeffs.len()].copy_from_slice(coeffs);
        full
    }

    /// `∫ φ_p` for every free basis function.
    pub fn basis_integrals(&self) -> Vec<f64> {
        let mut full = vec![0.0; self.nodes.len()];
        for (e, &h) in self.element_sizes.iter().enumerate() {
            full[e] += 0.5 * h;
            full[e + 1] += 0.5 * h;
        }
        let first = self.first_free_node();
        full[first..first + self.free_count()].to_vec()
    }

    /// Element index containing `x` (the left one at a shared node), or `None` outside the mesh.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if x < self.left() || x > self.right() {
            return None;
        }
        let idx = self.nodes.partition_point(|&xi| xi <= x);
        Some(idx.saturating_sub(1).min(self.element_count() - 1))
    }

    /// Evaluate the piecewise-linear function with nodal values `full` at `x`.
    pub fn evaluate_full(&self, full: &[f64], x: f64) -> Option<f64> {
        let e = self.locate(x)?;
        let (x0, h) = (self.nodes[e], self.element_sizes[e]);
        let s = (x - x0) / h;
        Some(full[e] * (1.0 - s) + full[e + 1] * s)
    }
}

/// Time levels `t_n = (n/N)^γ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    steps_count: usize,
    final_time: f64,
    gamma: f64,
    levels: Vec<f64>,
    steps: Vec<f64>,
}

impl TimeGrid {
    pub fn graded(n_steps: usize, final_time: f64, gamma: f64) -> Result<Self> {
        if !(final_time.is_finite() && final_time > 0.0) {
            return invalid(format!("final time must be positive, got {final_time}"));
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return invalid(format!("grading exponent must be >= 1, got {gamma}"));
        }
        let nf = n_steps as f64;
        let levels: Vec<f64> = (0..=n_steps)
            .map(|n| {
                if n == 0 {
                    0.0
                } else if n == n_steps {
                    final_time
                } else {
                    (n as f64 / nf).powf(gamma) * final_time
                }
            })
            .collect();
        let steps: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.iter().any(|&k| k <= 0.0) {
            return invalid("time levels are not strictly increasing (too many steps?)");
        }
        Ok(TimeGrid {
            steps_count: n_steps,
            final_time,
            gamma,
            levels,
            steps,
        })
    }

    pub fn uniform(n_steps: usize, final_time: f64) -> Result<Self> {
        Self::graded(n_steps, final_time, 1.0)
    }

    /// Number of steps `N`.
    pub fn n_steps(&self) -> usize {
        self.steps_count
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `t_0 … t_N`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn t(&self, n: usize) -> f64 {
        self.levels[n]
    }

    /// Step size `k_n = t_n - t_{n-1}` for `1 ≤ n ≤ N`.
    pub fn k(&self, n: usize) -> f64 {
        self.steps[n - 1]
    }

    /// `k_1 … k_N`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}
