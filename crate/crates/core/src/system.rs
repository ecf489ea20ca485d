//! Second-order kinematics on a matrix Lie group and their equivariant lift.
//!
//! The plant state is a pose P ∈ G with a body-frame velocity V ∈ g:
//!
//! ```text
//! Ṗ = P (V + U₁),   V̇ = U₂,   y = P
//! ```
//!
//! where (U₁, U₂) is the velocity input. The symmetry group acts on states
//! and inputs compatibly ([`crate::symmetry`]), and the lift Λ maps system
//! inputs to symmetry-group velocities so that trajectories of the lifted
//! system project exactly onto trajectories of the plant.

use crate::error::Result;
use crate::group::{same_group, AlgebraElement, Descriptor, GroupElement};
use crate::symmetry::{state_action, SymmetryElement, SymmetryTangent, SymmetryVelocity};

/// Plant state (P, V): pose and body-frame velocity.
#[derive(Clone, Debug)]
pub struct State {
    pose: GroupElement,
    velocity: AlgebraElement,
}

/// Velocity input (U₁, U₂) ∈ g × g. U₁ perturbs the pose rate directly,
/// U₂ drives the acceleration. A measured-velocity plant uses U₁ = 0.
#[derive(Clone, Debug)]
pub struct InputVelocity {
    u1: AlgebraElement,
    u2: AlgebraElement,
}

/// The fixed reference state ξ° = (P°, V°) the lifted system is anchored
/// to. Any state is reachable from it because the symmetry action is
/// transitive.
#[derive(Clone, Debug)]
pub struct OriginPoint {
    pose: GroupElement,
    velocity: AlgebraElement,
}

/// Left-trivialized tangent to the state space: the body-frame pose rate
/// P⁻¹Ṗ and the velocity rate V̇, both in g.
#[derive(Clone, Debug)]
pub struct StateTangent {
    pub dp_body: AlgebraElement,
    pub dv: AlgebraElement,
}

impl State {
    /// Pairs a pose with a body velocity.
    pub fn new(pose: GroupElement, velocity: AlgebraElement) -> Result<Self> {
        same_group(pose.descriptor(), velocity.descriptor())?;
        Ok(State { pose, velocity })
    }

    pub fn pose(&self) -> &GroupElement {
        &self.pose
    }

    pub fn velocity(&self) -> &AlgebraElement {
        &self.velocity
    }

    pub fn descriptor(&self) -> &Descriptor {
        self.pose.descriptor()
    }
}

impl InputVelocity {
    /// Pairs the two input slots.
    pub fn new(u1: AlgebraElement, u2: AlgebraElement) -> Result<Self> {
        same_group(u1.descriptor(), u2.descriptor())?;
        Ok(InputVelocity { u1, u2 })
    }

    /// The zero input.
    pub fn zero(desc: &Descriptor) -> Self {
        InputVelocity {
            u1: AlgebraElement::zero(desc),
            u2: AlgebraElement::zero(desc),
        }
    }

    pub fn u1(&self) -> &AlgebraElement {
        &self.u1
    }

    pub fn u2(&self) -> &AlgebraElement {
        &self.u2
    }

    pub fn descriptor(&self) -> &Descriptor {
        self.u1.descriptor()
    }
}

impl OriginPoint {
    /// Fixes a reference state.
    pub fn new(pose: GroupElement, velocity: AlgebraElement) -> Result<Self> {
        same_group(pose.descriptor(), velocity.descriptor())?;
        Ok(OriginPoint { pose, velocity })
    }

    /// The canonical origin (I, 0).
    pub fn identity(desc: &Descriptor) -> Self {
        OriginPoint {
            pose: GroupElement::identity(desc),
            velocity: AlgebraElement::zero(desc),
        }
    }

    pub fn pose(&self) -> &GroupElement {
        &self.pose
    }

    pub fn velocity(&self) -> &AlgebraElement {
        &self.velocity
    }

    pub fn descriptor(&self) -> &Descriptor {
        self.pose.descriptor()
    }

    /// This origin as a plain state.
    pub fn to_state(&self) -> State {
        State {
            pose: self.pose.clone(),
            velocity: self.velocity.clone(),
        }
    }
}

impl StateTangent {
    /// Distance to another tangent: √(‖Δdp‖² + ‖Δdv‖²).
    pub fn distance(&self, other: &StateTangent) -> f64 {
        let dp = (self.dp_body.matrix() - other.dp_body.matrix()).norm();
        let dv = (self.dv.matrix() - other.dv.matrix()).norm();
        dp.hypot(dv)
    }
}

/// Plant dynamics, left-trivialized: f(ξ, U) = (V + U₁, U₂).
pub fn dynamics(xi: &State, u: &InputVelocity) -> Result<StateTangent> {
    same_group(xi.descriptor(), u.descriptor())?;
    Ok(StateTangent {
        dp_body: xi.velocity().add(u.u1())?,
        dv: u.u2().clone(),
    })
}

/// Output map: the pose is measured directly.
pub fn output(xi: &State) -> GroupElement {
    xi.pose().clone()
}

/// Equivariant lift Λ(ξ, U) = (V + U₁, [V, U₁] − U₂).
///
/// The defining property is dφ_ξ[Λ(ξ, U)] = f(ξ, U): pushing the lifted
/// velocity through the action recovers the plant dynamics. See
/// [`lift_defect`] for the checkable form.
pub fn lift(xi: &State, u: &InputVelocity) -> Result<SymmetryVelocity> {
    same_group(xi.descriptor(), u.descriptor())?;
    let w1 = xi.velocity().add(u.u1())?;
    let w2 = xi.velocity().bracket(u.u1())?.sub(u.u2())?;
    SymmetryVelocity::new(w1, w2)
}

/// Differential of the state action at the group identity, in direction
/// (w₁, w₂): dφ_ξ(w₁, w₂) = (w₁, −[w₁, V] − w₂).
pub fn dphi_at_identity(xi: &State, v: &SymmetryVelocity) -> Result<StateTangent> {
    same_group(xi.descriptor(), v.descriptor())?;
    Ok(StateTangent {
        dp_body: v.w1().clone(),
        dv: v.w1().bracket(xi.velocity())?.scale(-1.0).sub(v.w2())?,
    })
}

/// Pushforward of a left-trivialized state tangent through the action of
/// X = (A, a): both slots conjugate by A⁻¹.
pub fn pushforward(x: &SymmetryElement, t: &StateTangent) -> Result<StateTangent> {
    same_group(x.descriptor(), t.dp_body.descriptor())?;
    let a_inv = x.group_part().inverse()?;
    Ok(StateTangent {
        dp_body: a_inv.adjoint(&t.dp_body)?,
        dv: a_inv.adjoint(&t.dv)?,
    })
}

/// Velocity of the lifted system at symmetry state X, anchored at ξ°:
/// Λ(φ(X, ξ°), U), expressed in the symmetry algebra.
///
/// Left-translating this by X gives the raw derivative of X(t); see
/// [`lifted_dynamics_explicit`] for the expanded form.
pub fn lifted_dynamics(
    x: &SymmetryElement,
    origin: &OriginPoint,
    u: &InputVelocity,
) -> Result<SymmetryVelocity> {
    let xi = state_action(x, &origin.to_state())?;
    lift(&xi, u)
}

/// The lifted dynamics written out componentwise on X = (A, a):
///
/// ```text
/// Ȧ = A (Ad_{A⁻¹}(V° − a) + U₁)
/// ȧ = Ad_A ([Ad_{A⁻¹}(V° − a), U₁] − U₂)
/// ```
///
/// Identical to `dL_X[lifted_dynamics(X, ξ°, U)]`; kept separate so the
/// two derivations can be cross-checked.
pub fn lifted_dynamics_explicit(
    x: &SymmetryElement,
    origin: &OriginPoint,
    u: &InputVelocity,
) -> Result<SymmetryTangent> {
    same_group(x.descriptor(), u.descriptor())?;
    let a_inv = x.group_part().inverse()?;
    let v_body = a_inv.adjoint(&origin.velocity().sub(x.offset())?)?;
    let d_group = x.group_part().matrix() * v_body.add(u.u1())?.matrix();
    let d_offset = x
        .group_part()
        .adjoint(&v_body.bracket(u.u1())?.sub(u.u2())?)?;
    Ok(SymmetryTangent { d_group, d_offset })
}

/// How far the plant dynamics are from being equivariant at this sample:
/// distance between dφ_X[f(ξ, U)] and f(φ(X, ξ), ψ(X, U)). Zero (to
/// round-off) for every X, ξ, U.
pub fn equivariance_residual(x: &SymmetryElement, xi: &State, u: &InputVelocity) -> Result<f64> {
    let pushed = pushforward(x, &dynamics(xi, u)?)?;
    let moved = dynamics(&state_action(x, xi)?, &crate::symmetry::input_action(x, u)?)?;
    Ok(pushed.distance(&moved))
}

/// Defect of the lift condition at one sample: distance between
/// dφ_ξ[Λ(ξ, U)] and f(ξ, U). Zero (to round-off) everywhere.
pub fn lift_defect(xi: &State, u: &InputVelocity) -> Result<f64> {
    let through_action = dphi_at_identity(xi, &lift(xi, u)?)?;
    Ok(through_action.distance(&dynamics(xi, u)?))
}

/// Equivariance defect of the lift itself: distance between
/// Ad_{X⁻¹}[Λ(ξ, U)] and Λ(φ(X, ξ), ψ(X, U)). Zero (to round-off)
/// everywhere, which is what makes the lifted dynamics well-defined on the
/// symmetry group.
pub fn lift_equivariance_residual(
    x: &SymmetryElement,
    xi: &State,
    u: &InputVelocity,
) -> Result<f64> {
    let lifted = lift(xi, u)?;
    let conjugated = x.inverse()?.adjoint(&lifted)?;
    let moved = lift(&state_action(x, xi)?, &crate::symmetry::input_action(x, u)?)?;
    let d = conjugated.add_scaled(&moved, -1.0)?;
    Ok(d.norm())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::group::{random_algebra, random_group, se2, se3, so3};

    fn random_state<R: rand::Rng>(desc: &Descriptor, rng: &mut R) -> State {
        State::new(random_group(desc, rng), random_algebra(desc, rng)).unwrap()
    }

    fn random_input<R: rand::Rng>(desc: &Descriptor, rng: &mut R) -> InputVelocity {
        InputVelocity::new(random_algebra(desc, rng), random_algebra(desc, rng)).unwrap()
    }

    fn random_symmetry<R: rand::Rng>(desc: &Descriptor, rng: &mut R) -> SymmetryElement {
        SymmetryElement::new(random_group(desc, rng), random_algebra(desc, rng)).unwrap()
    }

    #[test]
    fn dynamics_slots_are_sum_and_passthrough() {
        let desc = se2();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let xi = random_state(&desc, &mut rng);
        let u = random_input(&desc, &mut rng);
        let t = dynamics(&xi, &u).unwrap();
        let expected = xi.velocity().add(u.u1()).unwrap();
        assert!((t.dp_body.matrix() - expected.matrix()).norm() <= 1e-14);
        assert!((t.dv.matrix() - u.u2().matrix()).norm() <= 1e-14);
    }

    #[test]
    fn lift_satisfies_the_lift_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for desc in [se2(), so3(), se3()] {
            for _ in 0..20 {
                let xi = random_state(&desc, &mut rng);
                let u = random_input(&desc, &mut rng);
                assert!(lift_defect(&xi, &u).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn dphi_at_identity_matches_finite_difference() {
        // Central difference of s ↦ φ((exp(s w₁), s w₂), ξ).
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let h = 1e-6;
        for desc in [se2(), so3()] {
            let xi = random_state(&desc, &mut rng);
            let v = SymmetryVelocity::new(
                random_algebra(&desc, &mut rng),
                random_algebra(&desc, &mut rng),
            )
            .unwrap();
            let t = dphi_at_identity(&xi, &v).unwrap();

            let curve = |s: f64| -> State {
                let x = SymmetryElement::new(v.w1().scale(s).exp(), v.w2().scale(s)).unwrap();
                state_action(&x, &xi).unwrap()
            };
            let plus = curve(h);
            let minus = curve(-h);
            let fd_pose = (plus.pose().matrix() - minus.pose().matrix()) / (2.0 * h);
            let fd_vel = (plus.velocity().matrix() - minus.velocity().matrix()) / (2.0 * h);
            // Left-trivialize the pose slot: body rate = P⁻¹ Ṗ.
            let body = xi.pose().matrix().clone().try_inverse().unwrap() * fd_pose;

            assert!((t.dp_body.matrix() - body).norm() <= 1e-5);
            assert!((t.dv.matrix() - fd_vel).norm() <= 1e-5);
        }
    }

    #[test]
    fn dynamics_are_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for desc in [se2(), so3(), se3()] {
            for _ in 0..20 {
                let x = random_symmetry(&desc, &mut rng);
                let xi = random_state(&desc, &mut rng);
                let u = random_input(&desc, &mut rng);
                assert!(equivariance_residual(&x, &xi, &u).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn lift_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for desc in [se2(), so3(), se3()] {
            for _ in 0..20 {
                let x = random_symmetry(&desc, &mut rng);
                let xi = random_state(&desc, &mut rng);
                let u = random_input(&desc, &mut rng);
                assert!(lift_equivariance_residual(&x, &xi, &u).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn dropping_the_offset_from_the_input_action_breaks_equivariance() {
        // Same check as `dynamics_are_equivariant`, but with the input
        // action corrupted to ψ̃(X, U) = (Ad_{A⁻¹} U₁, Ad_{A⁻¹} U₂): the
        // defect is exactly ‖Ad_{A⁻¹} a‖, so it is large for generic X.
        let desc = se2();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..20 {
            let x = random_symmetry(&desc, &mut rng);
            let xi = random_state(&desc, &mut rng);
            let u = random_input(&desc, &mut rng);

            let a_inv = x.group_part().inverse().unwrap();
            let mutated = InputVelocity::new(
                a_inv.adjoint(u.u1()).unwrap(),
                a_inv.adjoint(u.u2()).unwrap(),
            )
            .unwrap();
            let pushed = pushforward(&x, &dynamics(&xi, &u).unwrap()).unwrap();
            let moved = dynamics(&state_action(&x, &xi).unwrap(), &mutated).unwrap();
            let residual = pushed.distance(&moved);
            let expected = a_inv.adjoint(x.offset()).unwrap().norm();
            assert!((residual - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn lifted_dynamics_agree_with_explicit_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for desc in [se2(), so3(), se3()] {
            for _ in 0..10 {
                let origin = OriginPoint::new(
                    random_group(&desc, &mut rng),
                    random_algebra(&desc, &mut rng),
                )
                .unwrap();
                let x = random_symmetry(&desc, &mut rng);
                let u = random_input(&desc, &mut rng);

                let via_lift = x
                    .left_translate(&lifted_dynamics(&x, &origin, &u).unwrap())
                    .unwrap();
                let explicit = lifted_dynamics_explicit(&x, &origin, &u).unwrap();
                assert!((&via_lift.d_group - &explicit.d_group).norm() <= 1e-11);
                assert!((via_lift.d_offset.matrix() - explicit.d_offset.matrix()).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn lifted_trajectory_projects_onto_plant_trajectory() {
        // Integrate the plant and the lifted system side by side with a
        // fine Euler step and constant input; the projection φ(X(t), ξ°)
        // must track the plant state to first order in dt. The relaxed
        // tolerance absorbs the expected Euler drift off the manifold.
        let desc = se2().relaxed(1e-3).unwrap();
        let origin = OriginPoint::identity(&desc);
        let u = InputVelocity::new(
            AlgebraElement::from_coords(&desc, &[0.2, 0.0, 0.1]).unwrap(),
            AlgebraElement::from_coords(&desc, &[0.0, 0.3, -0.2]).unwrap(),
        )
        .unwrap();

        let mut xi = State::new(
            GroupElement::identity(&desc),
            AlgebraElement::from_coords(&desc, &[0.5, -0.3, 0.8]).unwrap(),
        )
        .unwrap();
        let mut x = crate::symmetry::transitive_solve(&origin.to_state(), &xi).unwrap();

        let dt = 1e-4;
        for _ in 0..2000 {
            let t = dynamics(&xi, &u).unwrap();
            let new_pose = GroupElement::new(
                &desc,
                xi.pose().matrix() + dt * xi.pose().matrix() * t.dp_body.matrix(),
            )
            .unwrap();
            xi = State::new(new_pose, xi.velocity().add_scaled(&t.dv, dt).unwrap()).unwrap();

            let lt = lifted_dynamics_explicit(&x, &origin, &u).unwrap();
            let new_group =
                GroupElement::new(&desc, x.group_part().matrix() + dt * &lt.d_group).unwrap();
            let new_offset = x.offset().add_scaled(&lt.d_offset, dt).unwrap();
            x = SymmetryElement::new(new_group, new_offset).unwrap();
        }

        let projected = state_action(&x, &origin.to_state()).unwrap();
        let dp = (projected.pose().matrix() - xi.pose().matrix()).norm();
        let dv = (projected.velocity().matrix() - xi.velocity().matrix()).norm();
        assert!(dp <= 1e-3, "pose deviation {dp:.3e}");
        assert!(dv <= 1e-3, "velocity deviation {dv:.3e}");
    }
}
