//! Time-stepping primitives.
//!
//! Both schemes treat algebra-valued state linearly; they differ in how
//! group-valued state is advanced. [`euler_step_matrix`] uses the raw
//! componentwise update (simple, but leaves the manifold at O(dt)), while
//! [`exp_step`] follows the one-parameter subgroup of the current body
//! rate and stays on the manifold to round-off.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::group::{AlgebraElement, GroupElement};

/// Forward Euler on a scalar: x ← x + dt·ẋ.
pub fn euler_step_scalar(x: f64, rate: f64, dt: f64) -> f64 {
    x + dt * rate
}

/// Forward Euler on a raw matrix: M ← M + dt·Ṁ.
pub fn euler_step_matrix(m: &DMatrix<f64>, rate: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    m + dt * rate
}

/// Forward Euler on an algebra element (coordinates and matrix move
/// together, so the result stays exactly inside the algebra).
pub fn euler_step_algebra(
    w: &AlgebraElement,
    rate: &AlgebraElement,
    dt: f64,
) -> Result<AlgebraElement> {
    w.add_scaled(rate, dt)
}

/// Exponential update along the left-trivialized body rate:
/// P ← P·exp(dt·w).
pub fn exp_step(p: &GroupElement, body_rate: &AlgebraElement, dt: f64) -> Result<GroupElement> {
    p.compose(&body_rate.scale(dt).exp())
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::group::{se2, so3, AlgebraElement, GroupElement};

    #[test]
    fn scalar_step_is_exact_for_constant_rate() {
        assert_relative_eq!(euler_step_scalar(1.0, 1.0, 0.001), 1.001);
    }

    #[test]
    fn exp_step_reproduces_one_parameter_subgroup() {
        // Constant body rate: N steps of any size land exactly on exp(T·w).
        let desc = so3();
        let w = AlgebraElement::from_coords(&desc, &[0.3, -0.2, 0.9]).unwrap();
        let mut p = GroupElement::identity(&desc);
        let dt = 0.05;
        for _ in 0..40 {
            p = exp_step(&p, &w, dt).unwrap();
        }
        let exact = w.scale(2.0).exp();
        assert!((p.matrix() - exact.matrix()).norm() <= 1e-12);
        assert!(p.constraint_residual() <= 1e-12);
    }

    #[test]
    fn euler_step_drifts_off_the_manifold_at_first_order() {
        // A unit rotation rate integrated for 0.2 s at dt = 1e-3 shows
        // visible but bounded drift; the exp integrator does not.
        let desc = se2().relaxed(1e-2).unwrap();
        let w = AlgebraElement::from_coords(&desc, &[1.0, 0.0, 0.0]).unwrap();
        let mut euler = desc.identity_matrix();
        let mut exp = GroupElement::identity(&desc);
        for _ in 0..200 {
            euler = euler_step_matrix(&euler, &(&euler * w.matrix()), 1e-3);
            exp = exp_step(&exp, &w, 1e-3).unwrap();
        }
        let drift = desc.constraint_residual(&euler);
        assert!(drift > 1e-5, "expected visible drift, got {drift:.3e}");
        assert!(drift < 1e-2, "drift should stay bounded, got {drift:.3e}");
        assert!(exp.constraint_residual() <= 1e-13);
    }

    #[test]
    fn algebra_step_matches_coordinate_arithmetic() {
        let desc = se2();
        let w = AlgebraElement::from_coords(&desc, &[0.1, 0.2, 0.3]).unwrap();
        let rate = AlgebraElement::from_coords(&desc, &[1.0, -1.0, 2.0]).unwrap();
        let next = euler_step_algebra(&w, &rate, 0.5).unwrap();
        assert_relative_eq!(next.coords()[0], 0.6);
        assert_relative_eq!(next.coords()[1], -0.3);
        assert_relative_eq!(next.coords()[2], 1.3);
    }
}
