//! Finite element matrices and discrete initial data for piecewise-linear hats.
//!
//! `M_pq = ⟨φ_q, φ_p⟩` and `G_pq = κ⟨φ_q', φ_p'⟩ - ⟨F φ_q, φ_p'⟩`, both tridiagonal.
//! Assembly runs over all nodes, then rows and columns are restricted to the
//! free nodes of the boundary condition.

use std::fmt;
use std::sync::Arc;

use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::meshes::SpatialMesh;
use crate::quadrature::gauss4;
use crate::tridiag::TriDiagMatrix;

/// Name of the generator behind [`random_nodal_data`], recorded in run metadata.
pub const RANDOM_GENERATOR: &str = "chacha8";

type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One-dimensional driving force `F(x, t)`.
#[derive(Clone)]
pub struct DriftField {
    label: String,
    eval: ScalarField,
}

impl DriftField {
    pub fn new(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        DriftField {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", |_, _| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant:{c}"), move |_, _| c)
    }

    /// `F(x, t) = -x + sin t`.
    pub fn linear_sin() -> Self {
        Self::new("linear-sin", |x, t| -x + t.sin())
    }

    /// `F = -∂V/∂x = -x³ + x + cos t` for `V = x⁴/4 - x²/2 - x cos t`.
    pub fn double_well() -> Self {
        Self::new("double-well", |x, t| -x * x * x + x + t.cos())
    }

    /// Builtin drift by label: `zero`, `linear-sin`, `double-well`, `constant:<c>`;
    /// anything else is read as an expression in `x` and `t`, e.g. `-x + math::sin(t)`.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "zero" => Ok(Self::zero()),
            "linear-sin" => Ok(Self::linear_sin()),
            "double-well" => Ok(Self::double_well()),
            other => match other.strip_prefix("constant:") {
                Some(c) => c
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite())
                    .map(Self::constant)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad constant drift `{other}`"))),
                None => Self::from_expression(other),
            },
        }
    }

    fn from_expression(src: &str) -> Result<Self> {
        let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(src)
            .map_err(|e| Error::InvalidArgument(format!("unknown drift `{src}`: {e}")))?;
        if let Some(v) = tree.iter_variable_identifiers().find(|v| *v != "x" && *v != "t") {
            return invalid(format!("drift `{src}` uses unknown variable `{v}` (only x and t)"));
        }
        let field = Self::new(src, move |x, t| {
            let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
            ctx.set_value("x".into(), Value::Float(x)).ok();
            ctx.set_value("t".into(), Value::Float(t)).ok();
            // failures surface as NaN, which validation and the stepper reject
            tree.eval_number_with_context(&ctx).unwrap_or(f64::NAN)
        });
        if !field.eval(0.0, 0.0).is_finite() && !field.eval(1.0, 1.0).is_finite() {
            return invalid(format!("drift `{src}` does not evaluate to a number"));
        }
        Ok(field)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.eval)(x, t)
    }

    pub fn is_zero(&self) -> bool {
        self.label == "zero"
    }

    /// Sample `|F|` on a grid over `[a, b] × [0, t_max]`; errors if any sample is not finite.
    pub fn sampled_bound(&self, a: f64, b: f64, t_max: f64) -> Result<f64> {
        let mut bound = 0.0f64;
        for i in 0..=64 {
            let x = a + (b - a) * i as f64 / 64.0;
            for j in 0..=64 {
                let t = t_max * j as f64 / 64.0;
                let v = self.eval(x, t);
                if !v.is_finite() {
                    return invalid(format!(
                        "drift `{}` is not finite at (x={x}, t={t})",
                        self.label
                    ));
                }
                bound = bound.max(v.abs());
            }
        }
        Ok(bound)
    }
}

impl fmt::Debug for DriftField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftField").field("label", &self.label).finish()
    }
}

/// Continuous initial data `u_0`.
#[derive(Clone)]
pub enum InitialData {
    /// Characteristic function of `[lo, hi]`.
    Indicator { lo: f64, hi: f64 },
    /// Dirac mass at `x0`.
    PointMass { x0: f64 },
    /// Arbitrary integrable function, sampled by quadrature.
    Callable(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Independent uniform `[0, 1]` nodal values.
    RandomNodal { seed: u64 },
}

impl InitialData {
    pub fn callable(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialData::Callable(Arc::new(f))
    }

    fn validate(&self, mesh: &SpatialMesh) -> Result<()> {
        let (a, b) = (mesh.left(), mesh.right());
        match *self {
            InitialData::Indicator { lo, hi } if !(a <= lo && lo < hi && hi <= b) => invalid(
                format!("indicator [{lo}, {hi}] must satisfy {a} <= lo < hi <= {b}"),
            ),
            InitialData::PointMass { x0 } if !(a <= x0 && x0 <= b) => {
                invalid(format!("point mass at {x0} lies outside [{a}, {b}]"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Indicator { lo, hi } => write!(f, "Indicator[{lo}, {hi}]"),
            InitialData::PointMass { x0 } => write!(f, "PointMass({x0})"),
            InitialData::Callable(_) => write!(f, "Callable"),
            InitialData::RandomNodal { seed } => write!(f, "RandomNodal(seed={seed})"),
        }
    }
}

/// How continuous initial data is mapped into the finite element space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMethod {
    L2Projection,
    NodalInterpolant,
    /// `⟨u_{0h}, χ⟩ = ⟨u_0, χ⟩` read as a dual pairing; `χ(x0)` for a point mass.
    DualPairing,
}

/// Full-node mass matrix (no boundary restriction).
fn full_mass(mesh: &SpatialMesh) -> TriDiagMatrix {
    let n = mesh.nodes().len();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for (e, &h) in mesh.element_sizes().iter().enumerate() {
        diag[e] += h / 3.0;
        diag[e + 1] += h / 3.0;
        off[e] += h / 6.0;
    }
    TriDiagMatrix {
        sub: off.clone(),
        diag,
        sup: off,
        symmetric: true,
    }
}

fn restrict(mesh: &SpatialMesh, full: TriDiagMatrix) -> TriDiagMatrix {
    let first = mesh.first_free_node();
    let q = mesh.free_count();
    TriDiagMatrix {
        sub: full.sub[first..first + q - 1].to_vec(),
        diag: full.diag[first..first + q].to_vec(),
        sup: full.sup[first..first + q - 1].to_vec(),
        symmetric: full.symmetric,
    }
}

/// Mass matrix on all nodes, ignoring the boundary condition.
pub fn assemble_full_mass(mesh: &SpatialMesh) -> TriDiagMatrix {
    full_mass(mesh)
}

/// Mass matrix `M` on the free nodes.
pub fn assemble_mass(mesh: &SpatialMesh) -> TriDiagMatrix {
    restrict(mesh, full_mass(mesh))
}

/// Stiffness matrix `⟨φ_q', φ_p'⟩` on the free nodes.
pub fn assemble_stiffness(mesh: &SpatialMesh) -> TriDiagMatrix {
    let n = mesh.nodes().len();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for (e, &h) in mesh.element_sizes().iter().enumerate() {
        diag[e] += 1.0 / h;
        diag[e + 1] += 1.0 / h;
        off[e] -= 1.0 / h;
    }
    restrict(
        mesh,
        TriDiagMatrix {
            sub: off.clone(),
            diag,
            sup: off,
            symmetric: true,
        },
    )
}

/// Drift matrix `D_pq = ⟨F(·, t) φ_q, φ_p'⟩` on the free nodes (4-point Gauss per element).
pub fn assemble_drift(mesh: &SpatialMesh, drift: &DriftField, t: f64) -> TriDiagMatrix {
    let n = mesh.nodes().len();
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n - 1];
    let mut sup = vec![0.0; n - 1];
    let nodes = mesh.nodes();
    for (e, &h) in mesh.element_sizes().iter().enumerate() {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        // ∫ F φ_left and ∫ F φ_right over the element
        let f_left = gauss4(x0, x1, |x| drift.eval(x, t) * (x1 - x) / h);
        let f_right = gauss4(x0, x1, |x| drift.eval(x, t) * (x - x0) / h);
        // φ_left' = -1/h, φ_right' = 1/h
        diag[e] -= f_left / h;
        sup[e] -= f_right / h;
        sub[e] += f_left / h;
        diag[e + 1] += f_right / h;
    }
    let symmetric = sub == sup;
    restrict(
        mesh,
        TriDiagMatrix {
            sub,
            diag,
            sup,
            symmetric,
        },
    )
}

/// `G = κ·stiffness - drift` with the drift frozen at `t_eval`.
pub fn assemble_operator(
    mesh: &SpatialMesh,
    kappa: f64,
    drift: &DriftField,
    t_eval: f64,
) -> Result<TriDiagMatrix> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return invalid(format!("diffusivity must be positive, got {kappa}"));
    }
    if !t_eval.is_finite() || t_eval < 0.0 {
        return invalid(format!("evaluation time must be non-negative, got {t_eval}"));
    }
    let stiff = assemble_stiffness(mesh);
    let scaled = TriDiagMatrix {
        sub: stiff.sub.iter().map(|v| kappa * v).collect(),
        diag: stiff.diag.iter().map(|v| kappa * v).collect(),
        sup: stiff.sup.iter().map(|v| kappa * v).collect(),
        symmetric: true,
    };
    if drift.is_zero() {
        return Ok(scaled);
    }
    Ok(scaled.add_scaled(-1.0, &assemble_drift(mesh, drift, t_eval)))
}

/// Exact `∫_{lo}^{hi} φ` on element `e` for its left and right hats.
fn hat_integrals(mesh: &SpatialMesh, e: usize, lo: f64, hi: f64) -> (f64, f64) {
    let x0 = mesh.nodes()[e];
    let x1 = mesh.nodes()[e + 1];
    let h = mesh.element_sizes()[e];
    let left = ((x1 - lo).powi(2) - (x1 - hi).powi(2)) / (2.0 * h);
    let right = ((hi - x0).powi(2) - (lo - x0).powi(2)) / (2.0 * h);
    (left, right)
}

/// Load vector `b_p = ∫ u_0 φ_p` on the free nodes.
fn load_vector(mesh: &SpatialMesh, data: &InitialData) -> Result<Vec<f64>> {
    let n = mesh.nodes().len();
    let nodes = mesh.nodes();
    let mut full = vec![0.0; n];
    match data {
        InitialData::Indicator { lo, hi } => {
            for e in 0..mesh.element_count() {
                let a = nodes[e].max(*lo);
                let b = nodes[e + 1].min(*hi);
                if b > a {
                    let (l, r) = hat_integrals(mesh, e, a, b);
                    full[e] += l;
                    full[e + 1] += r;
                }
            }
        }
        InitialData::Callable(f) => {
            for (e, &h) in mesh.element_sizes().iter().enumerate() {
                let (x0, x1) = (nodes[e], nodes[e + 1]);
                full[e] += gauss4(x0, x1, |x| f(x) * (x1 - x) / h);
                full[e + 1] += gauss4(x0, x1, |x| f(x) * (x - x0) / h);
            }
        }
        InitialData::PointMass { x0 } => {
            let e = mesh.locate(*x0).expect("validated");
            let s = (x0 - nodes[e]) / mesh.element_sizes()[e];
            full[e] += 1.0 - s;
            full[e + 1] += s;
        }
        InitialData::RandomNodal { .. } => {
            return Err(Error::UnsupportedCombination(
                "random nodal data has no load vector".into(),
            ))
        }
    }
    let first = mesh.first_free_node();
    Ok(full[first..first + mesh.free_count()].to_vec())
}

/// Discrete initial coefficients `u_{0h}` on the free nodes.
pub fn discrete_initial_data(
    mesh: &SpatialMesh,
    data: &InitialData,
    method: InitMethod,
) -> Result<Vec<f64>> {
    data.validate(mesh)?;
    match (method, data) {
        (_, InitialData::RandomNodal { seed }) => match method {
            InitMethod::NodalInterpolant => Ok(random_nodal_data(mesh, *seed)),
            _ => Err(Error::UnsupportedCombination(format!(
                "random nodal data requires the nodal interpolant, not {method:?}"
            ))),
        },
        (InitMethod::NodalInterpolant, InitialData::Indicator { lo, hi }) => {
            let tol = 1e-12 * (mesh.right() - mesh.left());
            Ok(mesh
                .free_nodes()
                .iter()
                .map(|&x| if x >= lo - tol && x <= hi + tol { 1.0 } else { 0.0 })
                .collect())
        }
        (InitMethod::NodalInterpolant, InitialData::Callable(f)) => {
            Ok(mesh.free_nodes().iter().map(|&x| f(x)).collect())
        }
        (InitMethod::NodalInterpolant, InitialData::PointMass { .. }) => Err(
            Error::UnsupportedCombination("a point mass has no nodal values".into()),
        ),
        (InitMethod::L2Projection, InitialData::PointMass { .. }) => {
            Err(Error::UnsupportedCombination(
                "L2 projection of a point mass is undefined; use the dual pairing".into(),
            ))
        }
        (InitMethod::L2Projection | InitMethod::DualPairing, _) => {
            let b = load_vector(mesh, data)?;
            let m = assemble_mass(mesh);
            let lu = m.factor()?;
            let mut c = b;
            lu.solve_in_place(&mut c);
            Ok(c)
        }
    }
}

/// Uniform `[0, 1)` values at the free nodes, reproducible from `seed`.
pub fn random_nodal_data(mesh: &SpatialMesh, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..mesh.free_count()).map(|_| rng.gen::<f64>()).collect()
}
