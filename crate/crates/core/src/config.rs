//! Experiment configuration shared by the library entry points and the CLI.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::{DriftField, InitMethod, InitialData};
use crate::error::{invalid, Result};
use crate::fracweights::FractionalOrder;
use crate::meshes::{BoundaryCondition, SpatialMesh, TimeGrid};

/// Initial-data choice as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitChoice {
    /// Indicator of the middle half of the domain, L2-projected.
    L2,
    /// Indicator of the middle half of the domain, nodal interpolant.
    Nodal,
    /// Point mass at the domain centre, dual pairing.
    Delta,
    /// Uniform random nodal values.
    Random,
}

impl InitChoice {
    pub fn label(self) -> &'static str {
        match self {
            InitChoice::L2 => "l2",
            InitChoice::Nodal => "nodal",
            InitChoice::Delta => "delta",
            InitChoice::Random => "random",
        }
    }
}

impl FromStr for InitChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "l2" => Ok(InitChoice::L2),
            "nodal" => Ok(InitChoice::Nodal),
            "delta" => Ok(InitChoice::Delta),
            "random" => Ok(InitChoice::Random),
            other => Err(format!("unknown initial data `{other}` (l2|nodal|delta|random)")),
        }
    }
}

/// Problem size profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Reduced sizes for routine runs.
    Desk,
    /// Full reference sizes.
    Paper,
}

impl Scale {
    pub fn label(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }

    /// Time steps used by convergence studies.
    pub fn study_steps(self) -> usize {
        match self {
            Scale::Desk => 2_000,
            Scale::Paper => 10_000,
        }
    }

    /// Reference mesh degrees of freedom for convergence studies.
    pub fn reference_dofs(self) -> usize {
        match self {
            Scale::Desk => 255,
            Scale::Paper => 511,
        }
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(format!("unknown scale `{other}` (desk|paper)")),
        }
    }
}

/// Parameters of a single solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
    #[serde(rename = "N")]
    pub n_steps: usize,
    pub gamma: f64,
    /// Degrees of freedom `Q_h`.
    pub qh: usize,
    pub left: f64,
    pub right: f64,
    pub bc: BoundaryCondition,
    pub drift: String,
    pub init: InitChoice,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub scale: Scale,
    /// Write every `stride`-th time level to the solution file.
    pub stride: usize,
    /// Omit solution rows with `0 < t < t_cut`.
    pub t_cut: f64,
}

impl Default for ExperimentConfig {
    /// The Dirichlet example on `(0, π)` with `F = -x + sin t`.
    fn default() -> Self {
        ExperimentConfig {
            alpha: 0.5,
            kappa: 1.0,
            final_time: 1.0,
            n_steps: 1_000,
            gamma: 2.0,
            qh: 63,
            left: 0.0,
            right: PI,
            bc: BoundaryCondition::Dirichlet,
            drift: "linear-sin".into(),
            init: InitChoice::L2,
            seed: None,
            out_dir: PathBuf::from("."),
            scale: Scale::Desk,
            stride: 1,
            t_cut: 0.0,
        }
    }
}

impl ExperimentConfig {
    /// Double-well potential with zero-flux boundaries and a point mass at the origin.
    pub fn resonance() -> Self {
        ExperimentConfig {
            alpha: 0.75,
            final_time: 20.0,
            n_steps: 4_096,
            gamma: 2.0,
            qh: 65,
            left: -4.0,
            right: 4.0,
            bc: BoundaryCondition::ZeroFlux,
            drift: "double-well".into(),
            init: InitChoice::Delta,
            stride: 16,
            t_cut: 0.005,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        FractionalOrder::new(self.alpha)?;
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return invalid(format!("kappa must be positive, got {}", self.kappa));
        }
        if self.stride == 0 {
            return invalid("output stride must be at least 1");
        }
        if !(self.t_cut >= 0.0) {
            return invalid("t_cut must be non-negative");
        }
        self.mesh()?;
        self.grid()?;
        self.drift_field()?.sampled_bound(self.left, self.right, self.final_time)?;
        Ok(())
    }

    pub fn order(&self) -> Result<FractionalOrder> {
        FractionalOrder::new(self.alpha)
    }

    pub fn mesh(&self) -> Result<SpatialMesh> {
        let interior = match self.bc {
            BoundaryCondition::Dirichlet => self.qh,
            BoundaryCondition::ZeroFlux => {
                if self.qh < 3 {
                    return invalid("zero-flux meshes need at least 3 degrees of freedom");
                }
                self.qh - 2
            }
        };
        SpatialMesh::uniform(self.left, self.right, interior, self.bc)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::graded(self.n_steps, self.final_time, self.gamma)
    }

    pub fn drift_field(&self) -> Result<DriftField> {
        DriftField::from_label(&self.drift)
    }

    /// Continuous data and discretisation method for `init`.
    pub fn initial_data(&self) -> (InitialData, InitMethod) {
        let len = self.right - self.left;
        let indicator = InitialData::Indicator {
            lo: self.left + len / 4.0,
            hi: self.left + 3.0 * len / 4.0,
        };
        match self.init {
            InitChoice::L2 => (indicator, InitMethod::L2Projection),
            InitChoice::Nodal => (indicator, InitMethod::NodalInterpolant),
            InitChoice::Delta => (
                InitialData::PointMass {
                    x0: 0.5 * (self.left + self.right),
                },
                InitMethod::DualPairing,
            ),
            InitChoice::Random => (
                InitialData::RandomNodal {
                    seed: self.seed.unwrap_or(0),
                },
                InitMethod::NodalInterpolant,
            ),
        }
    }
}
