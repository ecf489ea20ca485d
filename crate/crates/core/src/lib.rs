//! Equivariant observer design for second-order kinematic systems on
//! matrix Lie groups.
//!
//! The crate is organized bottom-up:
//!
//! * [`group`] — data-driven matrix Lie groups: descriptors, group and
//!   algebra elements, exp/log-free core operations (compose, inverse,
//!   adjoint, bracket, projection) and the matrix exponential.
//! * [`symmetry`] — the semi-direct product of a group with its own
//!   algebra, which acts transitively on the state space of a second-order
//!   kinematic system, plus the associated velocity action.
//! * [`system`] — the second-order kinematics themselves, their output
//!   map, and the equivariant lift that turns system inputs into symmetry
//!   velocities.
//! * [`observer`] — the gain-tuned observer on the symmetry group, its
//!   innovation terms, error coordinates, and Lyapunov diagnostics.
//! * [`sim`] — scenario configuration, integrators, the simulation loop,
//!   and CSV/SVG/JSON output.
//! * [`verify`] — a randomized self-test suite that checks the algebraic
//!   identities the design relies on, for any descriptor.

pub mod error;
pub mod group;
pub mod observer;
pub mod sim;
pub mod symmetry;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use group::{
    by_name, se2, se3, so3, AlgebraElement, ConstraintKind, Descriptor, GroupDescriptor,
    GroupElement,
};
pub use observer::{DiagnosticError, Gains, GroupError, Innovation, ObserverState};
pub use symmetry::{SymmetryElement, SymmetryTangent, SymmetryVelocity};
pub use system::{InputVelocity, OriginPoint, State, StateTangent};
