//! Semi-direct product symmetry group and its actions.
//!
//! The symmetry group pairs a group element A with an algebra element a.
//! Writing Ad for the adjoint action, the product is
//!
//! ```text
//! (A, a) · (B, b) = (A B, a + Ad_A b)
//! ```
//!
//! This group acts on the right on states (P, V) of a second-order system
//! and on its velocity inputs, and the action on states is both free and
//! transitive — which is what lets an observer live on the symmetry group
//! and be projected down to a state estimate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{same_group, AlgebraElement, Descriptor, GroupElement};
use crate::system::{InputVelocity, State};

/// Element (A, a) of the semi-direct product G ⋉ g.
#[derive(Clone, Debug)]
pub struct SymmetryElement {
    group: GroupElement,
    offset: AlgebraElement,
}

/// Element (w₁, w₂) of the symmetry group's Lie algebra g × g.
#[derive(Clone, Debug)]
pub struct SymmetryVelocity {
    w1: AlgebraElement,
    w2: AlgebraElement,
}

/// Tangent vector at a symmetry-group point: the raw derivative of the A
/// slot (an n×n matrix, generally not in g) plus the derivative of the a
/// slot (which stays in g).
#[derive(Clone, Debug)]
pub struct SymmetryTangent {
    pub d_group: DMatrix<f64>,
    pub d_offset: AlgebraElement,
}

/// Serialization form of a symmetry element: row-major A and coordinates
/// of a. Deserializing needs a descriptor, so this is a plain DTO.
#[derive(Debug, Serialize, Deserialize)]
pub struct SymmetryElementData {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub a_coords: Vec<f64>,
}

impl SymmetryElement {
    /// Pairs a group element with an algebra offset.
    pub fn new(group: GroupElement, offset: AlgebraElement) -> Result<Self> {
        same_group(group.descriptor(), offset.descriptor())?;
        Ok(SymmetryElement { group, offset })
    }

    /// The identity (I, 0).
    pub fn identity(desc: &Descriptor) -> Self {
        SymmetryElement {
            group: GroupElement::identity(desc),
            offset: AlgebraElement::zero(desc),
        }
    }

    /// The A component.
    pub fn group_part(&self) -> &GroupElement {
        &self.group
    }

    /// The a component.
    pub fn offset(&self) -> &AlgebraElement {
        &self.offset
    }

    /// The underlying group descriptor.
    pub fn descriptor(&self) -> &Descriptor {
        self.group.descriptor()
    }

    /// Semi-direct product: (A, a)·(B, b) = (A B, a + Ad_A b).
    pub fn compose(&self, other: &SymmetryElement) -> Result<SymmetryElement> {
        let group = self.group.compose(&other.group)?;
        let offset = self.offset.add(&self.group.adjoint(&other.offset)?)?;
        Ok(SymmetryElement { group, offset })
    }

    /// Inverse: (A, a)⁻¹ = (A⁻¹, −Ad_{A⁻¹} a).
    pub fn inverse(&self) -> Result<SymmetryElement> {
        let inv = self.group.inverse()?;
        let offset = inv.adjoint(&self.offset)?.scale(-1.0);
        Ok(SymmetryElement { group: inv, offset })
    }

    /// Adjoint action of the symmetry group on its algebra:
    ///
    /// ```text
    /// Ad_{(A,a)}(w₁, w₂) = (Ad_A w₁, Ad_A w₂ − [Ad_A w₁, a])
    /// ```
    pub fn adjoint(&self, v: &SymmetryVelocity) -> Result<SymmetryVelocity> {
        let ad1 = self.group.adjoint(&v.w1)?;
        let ad2 = self
            .group
            .adjoint(&v.w2)?
            .sub(&ad1.bracket(&self.offset)?)?;
        SymmetryVelocity::new(ad1, ad2)
    }

    /// Differential of left translation by (A, a) at the identity:
    /// dL(w₁, w₂) = (A·w₁, Ad_A w₂). The first slot is a raw matrix
    /// tangent to G at A; the second stays in g.
    pub fn left_translate(&self, v: &SymmetryVelocity) -> Result<SymmetryTangent> {
        same_group(self.descriptor(), v.descriptor())?;
        Ok(SymmetryTangent {
            d_group: self.group.matrix() * v.w1.matrix(),
            d_offset: self.group.adjoint(&v.w2)?,
        })
    }

    /// Serialization DTO (row-major A, coordinates of a).
    pub fn to_data(&self) -> SymmetryElementData {
        SymmetryElementData {
            a: self.group.matrix().transpose().as_slice().to_vec(),
            a_coords: self.offset.coords().as_slice().to_vec(),
        }
    }

    /// Rebuilds an element from its DTO, validating against a descriptor.
    pub fn from_data(desc: &Descriptor, data: &SymmetryElementData) -> Result<Self> {
        let n = desc.embedding_dim();
        if data.a.len() != n * n {
            return Err(Error::InvalidConfig(format!(
                "expected {} matrix entries for {}, got {}",
                n * n,
                desc.name(),
                data.a.len()
            )));
        }
        let group = GroupElement::new(desc, DMatrix::from_row_slice(n, n, &data.a))?;
        let offset = AlgebraElement::from_coords(desc, &data.a_coords)?;
        SymmetryElement::new(group, offset)
    }
}

impl SymmetryVelocity {
    /// Pairs two algebra elements (w₁, w₂).
    pub fn new(w1: AlgebraElement, w2: AlgebraElement) -> Result<Self> {
        same_group(w1.descriptor(), w2.descriptor())?;
        Ok(SymmetryVelocity { w1, w2 })
    }

    /// The zero velocity.
    pub fn zero(desc: &Descriptor) -> Self {
        SymmetryVelocity {
            w1: AlgebraElement::zero(desc),
            w2: AlgebraElement::zero(desc),
        }
    }

    /// First slot.
    pub fn w1(&self) -> &AlgebraElement {
        &self.w1
    }

    /// Second slot.
    pub fn w2(&self) -> &AlgebraElement {
        &self.w2
    }

    /// The underlying group descriptor.
    pub fn descriptor(&self) -> &Descriptor {
        self.w1.descriptor()
    }

    /// Componentwise linear combination self + s·other.
    pub fn add_scaled(&self, other: &SymmetryVelocity, s: f64) -> Result<SymmetryVelocity> {
        Ok(SymmetryVelocity {
            w1: self.w1.add_scaled(&other.w1, s)?,
            w2: self.w2.add_scaled(&other.w2, s)?,
        })
    }

    /// Componentwise Frobenius norm √(‖w₁‖² + ‖w₂‖²).
    pub fn norm(&self) -> f64 {
        self.w1.norm().hypot(self.w2.norm())
    }
}

/// Right action of the symmetry group on states:
///
/// ```text
/// φ((A, a), (P, V)) = (P A, Ad_{A⁻¹}(V − a))
/// ```
///
/// The action is free and transitive, so any two states are related by
/// exactly one symmetry element (see [`transitive_solve`]).
pub fn state_action(x: &SymmetryElement, xi: &State) -> Result<State> {
    same_group(x.descriptor(), xi.descriptor())?;
    let pose = xi.pose().compose(x.group_part())?;
    let a_inv = x.group_part().inverse()?;
    let velocity = a_inv.adjoint(&xi.velocity().sub(x.offset())?)?;
    State::new(pose, velocity)
}

/// Right action of the symmetry group on input velocities:
///
/// ```text
/// ψ((A, a), (U₁, U₂)) = (Ad_{A⁻¹}(U₁ + a), Ad_{A⁻¹} U₂)
/// ```
pub fn input_action(x: &SymmetryElement, u: &InputVelocity) -> Result<InputVelocity> {
    same_group(x.descriptor(), u.descriptor())?;
    let a_inv = x.group_part().inverse()?;
    let u1 = a_inv.adjoint(&u.u1().add(x.offset())?)?;
    let u2 = a_inv.adjoint(u.u2())?;
    InputVelocity::new(u1, u2)
}

/// Solves φ(X, from) = to for the unique symmetry element X:
///
/// ```text
/// X = (P⁻¹ P′,  V − Ad_{P⁻¹ P′} V′)
/// ```
pub fn transitive_solve(from: &State, to: &State) -> Result<SymmetryElement> {
    same_group(from.descriptor(), to.descriptor())?;
    let a = from.pose().inverse()?.compose(to.pose())?;
    let offset = from.velocity().sub(&a.adjoint(to.velocity())?)?;
    SymmetryElement::new(a, offset)
}
