//! Analytic hovercraft reference: a Lissajous position trajectory with
//! steadily rotating heading, plus the exact feedforward input that keeps
//! a second-order planar rig on it.
//!
//! Position p(t) = (sin t, sin 2t), heading θ(t) = t. The body velocity is
//! V = (θ̇, Rᵀṗ) and the plant is driven with U₁ = 0 and U₂ = V̇, i.e.
//!
//! ```text
//! U₂ = (θ̈, Rᵀp̈ − θ̇ J Rᵀ ṗ),   J = [[0, −1], [1, 0]]
//! ```
//!
//! so the reference state solves Ṗ = P V, V̇ = U₂ exactly.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::error::Result;
use crate::group::{AlgebraElement, Descriptor, GroupElement};
use crate::system::{InputVelocity, State};

/// Reference state and feedforward input at time t.
///
/// The descriptor must have a 3-dimensional algebra ordered
/// (rotation, x, y); the planar rigid group `se2` is the intended one.
pub fn hovercraft_reference(desc: &Descriptor, t: f64) -> Result<(State, InputVelocity)> {
    let theta = t;
    let (s, c) = theta.sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    let p = Vector2::new(t.sin(), (2.0 * t).sin());
    let dp = Vector2::new(t.cos(), 2.0 * (2.0 * t).cos());
    let ddp = Vector2::new(-t.sin(), -4.0 * (2.0 * t).sin());

    let mut pose = DMatrix::identity(3, 3);
    pose.view_mut((0, 0), (2, 2)).copy_from(&rot);
    pose[(0, 2)] = p.x;
    pose[(1, 2)] = p.y;

    // Body-frame linear velocity and its derivative.
    let lin = rot.transpose() * dp;
    let j = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let dlin = rot.transpose() * ddp - j * (rot.transpose() * dp);

    let state = State::new(
        GroupElement::new(desc, pose)?,
        AlgebraElement::from_coords(desc, &[1.0, lin.x, lin.y])?,
    )?;
    let input = InputVelocity::new(
        AlgebraElement::zero(desc),
        AlgebraElement::from_coords(desc, &[0.0, dlin.x, dlin.y])?,
    )?;
    Ok((state, input))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::group::se2;

    #[test]
    fn initial_reference_values() {
        let desc = se2();
        let (state, input) = hovercraft_reference(&desc, 0.0).unwrap();
        assert!((state.pose().matrix() - DMatrix::identity(3, 3)).norm() <= 1e-15);
        // V(0) = (1, 1, 2): unit turn rate, ṗ(0) = (1, 2) in the body frame.
        assert_relative_eq!(state.velocity().coords()[0], 1.0);
        assert_relative_eq!(state.velocity().coords()[1], 1.0);
        assert_relative_eq!(state.velocity().coords()[2], 2.0);
        // U₂(0) = (0, 2, −1), purely from the frame rotation term.
        assert!(input.u1().norm() <= 1e-15);
        assert_relative_eq!(input.u2().coords()[0], 0.0);
        assert_relative_eq!(input.u2().coords()[1], 2.0);
        assert_relative_eq!(input.u2().coords()[2], -1.0);
    }

    #[test]
    fn velocity_is_consistent_with_pose_derivative() {
        // Central finite difference of the pose must equal P·V.
        let desc = se2();
        let h = 1e-6;
        for &t in &[0.3, 1.7, 4.0] {
            let (state, _) = hovercraft_reference(&desc, t).unwrap();
            let (plus, _) = hovercraft_reference(&desc, t + h).unwrap();
            let (minus, _) = hovercraft_reference(&desc, t - h).unwrap();
            let fd = (plus.pose().matrix() - minus.pose().matrix()) / (2.0 * h);
            let analytic = state.pose().matrix() * state.velocity().matrix();
            assert!((fd - analytic).norm() <= 1e-7);
        }
    }

    #[test]
    fn input_is_consistent_with_velocity_derivative() {
        // Central finite difference of V must equal U₂ (U₁ = 0).
        let desc = se2();
        let h = 1e-6;
        for &t in &[0.0, 0.9, 2.5, 7.0] {
            let (_, input) = hovercraft_reference(&desc, t).unwrap();
            let (plus, _) = hovercraft_reference(&desc, t + h).unwrap();
            let (minus, _) = hovercraft_reference(&desc, t - h).unwrap();
            let fd = (plus.velocity().coords() - minus.velocity().coords()) / (2.0 * h);
            assert!((fd - input.u2().coords()).norm() <= 1e-7);
        }
    }

    #[test]
    fn position_traces_the_lissajous_curve() {
        let desc = se2();
        for &t in &[0.5, 1.0, 2.0] {
            let (state, _) = hovercraft_reference(&desc, t).unwrap();
            assert_relative_eq!(state.pose().matrix()[(0, 2)], t.sin(), epsilon = 1e-14);
            assert_relative_eq!(
                state.pose().matrix()[(1, 2)],
                (2.0 * t).sin(),
                epsilon = 1e-14
            );
        }
    }
}
