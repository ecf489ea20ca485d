//! Scenario configuration: JSON schema and validation.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{by_name, AlgebraElement, Descriptor, GroupElement};
use crate::observer::{Gains, ObserverState};
use crate::symmetry::SymmetryElement;
use crate::system::{InputVelocity, OriginPoint, State};

/// Time-stepping scheme for the group-valued parts of the state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Componentwise forward Euler. Drifts off the manifold at O(dt)
    /// (tracked and bounded by the hard residual limit).
    #[default]
    Euler,
    /// Left-invariant exponential update P ← P·exp(dt·body rate) for group
    /// parts; algebra parts still step with Euler. Stays on the manifold
    /// to round-off.
    Exp,
}

/// Where the plant input (U₁, U₂) comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    /// Planar hovercraft tracking the Lissajous curve (sin t, sin 2t) with
    /// heading θ(t) = t: U₁ = 0 and U₂ is the analytic feedforward
    /// acceleration. Requires a 3-dimensional algebra with coordinates
    /// ordered (rotation, x, y).
    HovercraftLissajous,
    /// U₁ = U₂ = 0 (coasting).
    Zero,
    /// Fixed input, given as algebra coordinates.
    Constant { u1: Vec<f64>, u2: Vec<f64> },
}

/// Initial pose/velocity pair for the origin (keys `P0`, `V0`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OriginConfig {
    #[serde(rename = "P0")]
    pub p0: Vec<f64>,
    #[serde(rename = "V0")]
    pub v0: Vec<f64>,
}

/// Initial true plant state (keys `P`, `V`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrueInitConfig {
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
}

/// Initial observer state on the symmetry group (keys `Ahat`, `ahat`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObserverInitConfig {
    #[serde(rename = "Ahat")]
    pub ahat_matrix: Vec<f64>,
    #[serde(rename = "ahat")]
    pub ahat_coords: Vec<f64>,
}

fn default_log_every() -> usize {
    1
}

/// Default manifold tolerance during simulation. Deliberately looser than
/// the library default: explicit Euler drifts off the manifold by design,
/// and the run should carry on (while recording the residual) until the
/// hard limit `1e3 × tol` is crossed.
fn default_sim_tol() -> f64 {
    1e-3
}

/// A complete simulation scenario, loadable from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Group name (`se2`, `so3`, `se3`) or path to a descriptor JSON.
    pub group: String,
    /// Time step in seconds.
    pub dt: f64,
    /// Horizon in seconds (0 gives a single record at t = 0).
    pub duration: f64,
    #[serde(default)]
    pub integrator: Integrator,
    pub gains: Gains,
    pub origin: OriginConfig,
    pub true_init: TrueInitConfig,
    pub observer_init: ObserverInitConfig,
    pub input_source: InputSource,
    /// Reserved for randomized inputs; not used by the built-in sources.
    #[serde(default)]
    pub seed: u64,
    /// Record every k-th step (the final step is always recorded).
    #[serde(default = "default_log_every")]
    pub log_every: usize,
    /// Manifold tolerance used while integrating; the run aborts at
    /// 1e3 × this value.
    #[serde(default = "default_sim_tol")]
    pub manifold_tol: f64,
}

/// A validated scenario: typed initial values bound to one descriptor.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub desc: Descriptor,
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub gains: Gains,
    pub origin: OriginPoint,
    pub true_init: State,
    pub observer_init: SymmetryElement,
    pub input_source: InputSource,
    pub log_every: usize,
}

impl ScenarioConfig {
    /// Parses a config from a JSON string.
    pub fn from_json_str(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Loads a config file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Validates the config and binds it to its group.
    ///
    /// Initial matrices are checked against the library-default (strict)
    /// tolerance — configs must start exactly on the manifold — while the
    /// returned scenario carries a descriptor relaxed to `manifold_tol`
    /// for use during integration.
    pub fn build(&self) -> Result<Scenario> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "duration must be nonnegative, got {}",
                self.duration
            )));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidConfig("log_every must be at least 1".into()));
        }
        if !(self.manifold_tol.is_finite() && self.manifold_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "manifold_tol must be positive, got {}",
                self.manifold_tol
            )));
        }
        let gains = Gains::new(self.gains.k1, self.gains.k2)?;

        let strict = by_name(&self.group)?;
        let desc = strict.relaxed(self.manifold_tol)?;
        let n = strict.embedding_dim();

        let parse_mat = |flat: &[f64], what: &str| -> Result<DMatrix<f64>> {
            if flat.len() != n * n {
                return Err(Error::InvalidConfig(format!(
                    "{what}: expected {} entries ({n}x{n} row-major), got {}",
                    n * n,
                    flat.len()
                )));
            }
            Ok(DMatrix::from_row_slice(n, n, flat))
        };

        // Validate against the strict descriptor, then rebind to the
        // relaxed one used during integration.
        let rebind = |el: GroupElement| GroupElement::new_unchecked(&desc, el.matrix().clone());

        let p0 = rebind(GroupElement::new(
            &strict,
            parse_mat(&self.origin.p0, "origin.P0")?,
        )?);
        let v0 = AlgebraElement::from_coords(&desc, &self.origin.v0)?;
        let origin = OriginPoint::new(p0, v0)?;

        let p = rebind(GroupElement::new(
            &strict,
            parse_mat(&self.true_init.p, "true_init.P")?,
        )?);
        let v = AlgebraElement::from_coords(&desc, &self.true_init.v)?;
        let true_init = State::new(p, v)?;

        let ahat = rebind(GroupElement::new(
            &strict,
            parse_mat(&self.observer_init.ahat_matrix, "observer_init.Ahat")?,
        )?);
        let ahat_alg = AlgebraElement::from_coords(&desc, &self.observer_init.ahat_coords)?;
        let observer_init = SymmetryElement::new(ahat, ahat_alg)?;

        if matches!(self.input_source, InputSource::HovercraftLissajous) && desc.algebra_dim() != 3
        {
            return Err(Error::InvalidConfig(format!(
                "hovercraft_lissajous input needs a 3-dimensional algebra \
                 (rotation, x, y), but {} has dimension {}",
                desc.name(),
                desc.algebra_dim()
            )));
        }
        if let InputSource::Constant { u1, u2 } = &self.input_source {
            // Fail early instead of at the first step.
            AlgebraElement::from_coords(&desc, u1)?;
            AlgebraElement::from_coords(&desc, u2)?;
        }

        let steps = (self.duration / self.dt).round() as usize;

        Ok(Scenario {
            desc,
            dt: self.dt,
            steps,
            integrator: self.integrator,
            gains,
            origin,
            true_init,
            observer_init,
            input_source: self.input_source.clone(),
            log_every: self.log_every,
        })
    }
}

impl Scenario {
    /// The input at time t, bound to this scenario's descriptor.
    pub fn input_at(&self, t: f64) -> Result<InputVelocity> {
        match &self.input_source {
            InputSource::HovercraftLissajous => {
                Ok(super::lissajous::hovercraft_reference(&self.desc, t)?.1)
            }
            InputSource::Zero => Ok(InputVelocity::zero(&self.desc)),
            InputSource::Constant { u1, u2 } => InputVelocity::new(
                AlgebraElement::from_coords(&self.desc, u1)?,
                AlgebraElement::from_coords(&self.desc, u2)?,
            ),
        }
    }

    /// Initial observer state (X̂(0), ξ°, gains).
    pub fn observer(&self) -> Result<ObserverState> {
        ObserverState::new(self.observer_init.clone(), self.origin.clone(), self.gains)
    }
}
