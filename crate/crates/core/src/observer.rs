//! Observer on the symmetry group with Lyapunov-designed innovation.
//!
//! The observer state X̂ = (Â, â) lives on the semi-direct product and is
//! projected to a plant estimate through the state action anchored at the
//! origin ξ°. Correction uses only the measured pose y and two gains:
//!
//! ```text
//! Δ₁ = −k₁ pr_g((I − Ã) Ãᵀ)
//! Δ₂ = Ad_Â pr_g([V̂, Ad_{Â⁻¹} Δ₁] + k₂ Âᵀ (I − Ã) Ãᵀ Â⁻ᵀ)
//! ```
//!
//! with Ã = Â (P°⁻¹ y)⁻¹ reconstructed from the measurement, and
//! V̂ = Ad_{Â⁻¹}(V° − â) the body-velocity estimate. Along trajectories the
//! cost
//!
//! ```text
//! ℒ = ½ ‖I − Ã‖² + (1 / 2k₂) ‖Ṽ‖²
//! ```
//!
//! is non-increasing with ℒ̇ = −k₁ ‖pr_g((I − Ã) Ãᵀ)‖², which drives both
//! the pose error and the velocity error to zero.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{same_group, AlgebraElement, Descriptor, GroupElement};
use crate::symmetry::{SymmetryElement, SymmetryTangent};
use crate::system::{InputVelocity, OriginPoint, State};

/// Positive observer gains (k₁ weights the pose correction, k₂ the
/// velocity correction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
}

impl Gains {
    /// Validates that both gains are finite and strictly positive.
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1.is_finite() && k1 > 0.0 && k2.is_finite() && k2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gains must be finite and positive, got k1 = {k1}, k2 = {k2}"
            )));
        }
        Ok(Gains { k1, k2 })
    }
}

/// Observer state: a symmetry-group element X̂ plus the anchor origin and
/// the gains it is tuned with.
#[derive(Clone, Debug)]
pub struct ObserverState {
    x_hat: SymmetryElement,
    origin: OriginPoint,
    gains: Gains,
}

/// Group error Ẽ = X̂ · X⁻¹ between the observer and the lifted true state.
/// At a perfect estimate this is the identity (I, 0).
#[derive(Clone, Debug)]
pub struct GroupError {
    e: SymmetryElement,
}

/// Correction pair (Δ₁, Δ₂) applied to the observer vector field.
#[derive(Clone, Debug)]
pub struct Innovation {
    pub d1: AlgebraElement,
    pub d2: AlgebraElement,
}

/// Velocity-error diagnostics: the body-velocity estimate, the true body
/// velocity, and their difference Ṽ = V̂ − V.
#[derive(Clone, Debug)]
pub struct DiagnosticError {
    v_hat: AlgebraElement,
    v_true: AlgebraElement,
    v_tilde: AlgebraElement,
}

/// Serialization form of an observer state (checkpointing / logging).
#[derive(Debug, Serialize, Deserialize)]
pub struct ObserverStateData {
    #[serde(rename = "Ahat")]
    pub ahat: Vec<f64>,
    pub ahat_coords: Vec<f64>,
    pub origin: OriginData,
    pub k1: f64,
    pub k2: f64,
}

/// Serialization form of the origin point.
#[derive(Debug, Serialize, Deserialize)]
pub struct OriginData {
    #[serde(rename = "P0")]
    pub p0: Vec<f64>,
    #[serde(rename = "V0")]
    pub v0: Vec<f64>,
}

impl DiagnosticError {
    /// Records V̂ and V and their difference.
    pub fn new(v_hat: AlgebraElement, v_true: AlgebraElement) -> Result<Self> {
        let v_tilde = v_hat.sub(&v_true)?;
        Ok(DiagnosticError {
            v_hat,
            v_tilde,
            v_true,
        })
    }

    pub fn v_hat(&self) -> &AlgebraElement {
        &self.v_hat
    }

    pub fn v_true(&self) -> &AlgebraElement {
        &self.v_true
    }

    pub fn v_tilde(&self) -> &AlgebraElement {
        &self.v_tilde
    }
}

impl GroupError {
    /// Wraps a symmetry element interpreted as X̂ · X⁻¹.
    pub fn from_element(e: SymmetryElement) -> Self {
        GroupError { e }
    }

    /// The pose-error factor Ã.
    pub fn a_tilde(&self) -> &GroupElement {
        self.e.group_part()
    }

    /// The algebra offset ã = â − Ad_Ã a.
    pub fn offset(&self) -> &AlgebraElement {
        self.e.offset()
    }

    /// The full error element.
    pub fn element(&self) -> &SymmetryElement {
        &self.e
    }

    /// ‖I − Ã‖_F, the pose-error magnitude.
    pub fn pose_error_norm(&self) -> f64 {
        let n = self.a_tilde().descriptor().embedding_dim();
        (DMatrix::identity(n, n) - self.a_tilde().matrix()).norm()
    }

    /// ‖ã‖_F, the offset-error magnitude.
    pub fn offset_norm(&self) -> f64 {
        self.offset().norm()
    }
}

impl ObserverState {
    /// Builds an observer state, checking that all parts share one group.
    pub fn new(x_hat: SymmetryElement, origin: OriginPoint, gains: Gains) -> Result<Self> {
        same_group(x_hat.descriptor(), origin.descriptor())?;
        Ok(ObserverState {
            x_hat,
            origin,
            gains,
        })
    }

    /// Observer initialized at the group identity (Â = I, â = 0), which
    /// estimates the origin state itself.
    pub fn at_identity(origin: OriginPoint, gains: Gains) -> Self {
        let x_hat = SymmetryElement::identity(origin.descriptor());
        ObserverState {
            x_hat,
            origin,
            gains,
        }
    }

    pub fn x_hat(&self) -> &SymmetryElement {
        &self.x_hat
    }

    pub fn origin(&self) -> &OriginPoint {
        &self.origin
    }

    pub fn gains(&self) -> Gains {
        self.gains
    }

    pub fn descriptor(&self) -> &Descriptor {
        self.x_hat.descriptor()
    }

    /// Body-frame velocity estimate V̂ = Ad_{Â⁻¹}(V° − â).
    pub fn v_hat(&self) -> Result<AlgebraElement> {
        let inv = self.x_hat.group_part().inverse()?;
        inv.adjoint(&self.origin.velocity().sub(self.x_hat.offset())?)
    }

    /// Plant estimate ξ̂ = φ(X̂, ξ°) = (P° Â, Ad_{Â⁻¹}(V° − â)).
    pub fn estimate(&self) -> Result<State> {
        let pose = self.origin.pose().compose(self.x_hat.group_part())?;
        State::new(pose, self.v_hat()?)
    }

    /// Group error Ẽ = X̂ · X⁻¹ against a known lifted true state, in the
    /// componentwise form Ã = Â A⁻¹, ã = â − Ad_Ã a.
    pub fn group_error(&self, x_true: &SymmetryElement) -> Result<GroupError> {
        same_group(self.descriptor(), x_true.descriptor())?;
        let a_tilde = self
            .x_hat
            .group_part()
            .compose(&x_true.group_part().inverse()?)?;
        let offset = self
            .x_hat
            .offset()
            .sub(&a_tilde.adjoint(x_true.offset())?)?;
        Ok(GroupError {
            e: SymmetryElement::new(a_tilde, offset)?,
        })
    }

    /// Innovation (Δ₁, Δ₂) from the measured pose y alone.
    ///
    /// The pose error is reconstructed from the measurement as
    /// Ã = Â (P°⁻¹ y)⁻¹, so no true-state knowledge enters the observer.
    pub fn innovation(&self, y: &GroupElement) -> Result<Innovation> {
        same_group(self.descriptor(), y.descriptor())?;
        let desc = self.descriptor();
        let n = desc.embedding_dim();
        let Gains { k1, k2 } = self.gains;

        let a_meas = self.origin.pose().inverse()?.compose(y)?;
        let a_tilde = self.x_hat.group_part().compose(&a_meas.inverse()?)?;

        // m = (I − Ã) Ãᵀ drives both corrections.
        let m = (DMatrix::identity(n, n) - a_tilde.matrix()) * a_tilde.matrix().transpose();
        let d1 = AlgebraElement::project(desc, &m).scale(-k1);

        let a_hat = self.x_hat.group_part();
        let a_hat_inv = a_hat.inverse()?;
        let v_hat = self.v_hat()?;
        let coupling = v_hat.bracket(&a_hat_inv.adjoint(&d1)?)?;
        let weighted = a_hat.matrix().transpose() * &m * a_hat_inv.matrix().transpose();
        let inner = coupling.matrix() + k2 * weighted;
        let d2 = a_hat.adjoint(&AlgebraElement::project(desc, &inner))?;

        Ok(Innovation { d1, d2 })
    }

    /// Observer vector field with a given input and innovation:
    ///
    /// ```text
    /// dÂ = Â (V̂ + U₁) − Δ₁ Â
    /// dâ = Ad_Â ([V̂, U₁] − U₂) − Δ₂
    /// ```
    ///
    /// Without the innovation this is exactly the lifted dynamics, so a
    /// perfectly synchronized observer stays synchronized.
    pub fn dynamics(&self, u: &InputVelocity, delta: &Innovation) -> Result<SymmetryTangent> {
        same_group(self.descriptor(), u.descriptor())?;
        let a_hat = self.x_hat.group_part();
        let v_hat = self.v_hat()?;
        let d_group =
            a_hat.matrix() * v_hat.add(u.u1())?.matrix() - delta.d1.matrix() * a_hat.matrix();
        let d_offset = a_hat
            .adjoint(&v_hat.bracket(u.u1())?.sub(u.u2())?)?
            .sub(&delta.d2)?;
        Ok(SymmetryTangent { d_group, d_offset })
    }

    /// Serialization DTO.
    pub fn to_data(&self) -> ObserverStateData {
        ObserverStateData {
            ahat: self
                .x_hat
                .group_part()
                .matrix()
                .transpose()
                .as_slice()
                .to_vec(),
            ahat_coords: self.x_hat.offset().coords().as_slice().to_vec(),
            origin: OriginData {
                p0: self.origin.pose().matrix().transpose().as_slice().to_vec(),
                v0: self.origin.velocity().coords().as_slice().to_vec(),
            },
            k1: self.gains.k1,
            k2: self.gains.k2,
        }
    }

    /// Rebuilds an observer state from its DTO against a descriptor.
    pub fn from_data(desc: &Descriptor, data: &ObserverStateData) -> Result<Self> {
        let n = desc.embedding_dim();
        let expect = |len: usize, what: &str| -> Result<()> {
            if len != n * n {
                return Err(Error::InvalidConfig(format!(
                    "{what}: expected {} entries, got {len}",
                    n * n
                )));
            }
            Ok(())
        };
        expect(data.ahat.len(), "Ahat")?;
        expect(data.origin.p0.len(), "origin.P0")?;
        let x_hat = SymmetryElement::new(
            GroupElement::new(desc, DMatrix::from_row_slice(n, n, &data.ahat))?,
            AlgebraElement::from_coords(desc, &data.ahat_coords)?,
        )?;
        let origin = OriginPoint::new(
            GroupElement::new(desc, DMatrix::from_row_slice(n, n, &data.origin.p0))?,
            AlgebraElement::from_coords(desc, &data.origin.v0)?,
        )?;
        ObserverState::new(x_hat, origin, Gains::new(data.k1, data.k2)?)
    }
}

/// Error vector field, written directly in error coordinates:
///
/// ```text
/// dÃ = (Ad_Â Ṽ − Δ₁) Ã
/// dã = Ad_Â [Ṽ, U₁] + [Ad_Ã a, Ad_Â Ṽ − Δ₁] − Δ₂
/// ```
///
/// Diagnostic only — the observer never integrates this. It exists so the
/// implemented observer can be checked against the closed error dynamics.
pub fn error_dynamics(
    err: &GroupError,
    obs: &ObserverState,
    x_true: &SymmetryElement,
    u: &InputVelocity,
    delta: &Innovation,
) -> Result<SymmetryTangent> {
    let a_hat = obs.x_hat().group_part();
    let v_true = x_true
        .group_part()
        .inverse()?
        .adjoint(&obs.origin().velocity().sub(x_true.offset())?)?;
    let v_tilde = obs.v_hat()?.sub(&v_true)?;

    // Common factor Ad_Â Ṽ − Δ₁ ∈ g.
    let drive = a_hat.adjoint(&v_tilde)?.sub(&delta.d1)?;

    let d_group = drive.matrix() * err.a_tilde().matrix();
    let ad_a = err.a_tilde().adjoint(x_true.offset())?;
    let d_offset = a_hat
        .adjoint(&v_tilde.bracket(u.u1())?)?
        .add(&ad_a.bracket(&drive)?)?
        .sub(&delta.d2)?;
    Ok(SymmetryTangent { d_group, d_offset })
}

/// Lyapunov cost ℒ = ½ ‖I − Ã‖² + (1 / 2k₂) ‖Ṽ‖².
pub fn lyapunov(err: &GroupError, diag: &DiagnosticError, k2: f64) -> f64 {
    let n = err.a_tilde().descriptor().embedding_dim();
    let pose = (DMatrix::identity(n, n) - err.a_tilde().matrix()).norm_squared();
    0.5 * pose + diag.v_tilde().norm().powi(2) / (2.0 * k2)
}

/// Analytic decay rate ℒ̇ = −k₁ ‖pr_g((I − Ã) Ãᵀ)‖², valid along
/// observer/plant trajectories. Always ≤ 0.
pub fn lyapunov_rate(err: &GroupError, k1: f64) -> f64 {
    let desc = err.a_tilde().descriptor();
    let n = desc.embedding_dim();
    let m = (DMatrix::identity(n, n) - err.a_tilde().matrix()) * err.a_tilde().matrix().transpose();
    -k1 * AlgebraElement::project(desc, &m).norm().powi(2)
}
