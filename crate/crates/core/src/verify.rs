//! Randomized verification of the algebraic laws the observer relies on.
//!
//! [`run_suite`] draws seeded random group elements, symmetry elements,
//! states, and inputs, evaluates every structural identity on them, and
//! reports the worst residual per identity against a fixed threshold.
//! One deliberately broken variant of the input action is included as a
//! sensitivity control: its residual must stay *large*, demonstrating
//! that the checks would catch a wrong implementation.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{random_algebra, random_group, Descriptor};
use crate::symmetry::{
    input_action, state_action, transitive_solve, SymmetryElement, SymmetryVelocity,
};
use crate::system::{
    dynamics, equivariance_residual, lift_defect, lift_equivariance_residual, lifted_dynamics,
    lifted_dynamics_explicit, pushforward, InputVelocity, OriginPoint, State,
};

/// Step for the finite-difference cross-check of the symmetry Adjoint.
const FD_STEP: f64 = 1e-6;

/// How a check's aggregated value relates to its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Worst-case residual; passes when `value <= threshold`.
    Max,
    /// Sensitivity control; passes when `value >= threshold`.
    AtLeast,
}

/// Outcome of one identity, aggregated over all sampled cases.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

/// Outcome of the whole suite on one group.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub group: String,
    pub cases: usize,
    pub seed: u64,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verify {}: {} cases, seed {}",
            self.group, self.cases, self.seed
        )?;
        for c in &self.checks {
            let rel = match c.kind {
                CheckKind::Max => "<=",
                CheckKind::AtLeast => ">=",
            };
            writeln!(
                f,
                "  [{}] {:<34} {:>12.3e} {} {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                rel,
                c.threshold
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Input action with the velocity-offset term deliberately dropped:
/// both slots are conjugated, but U₁ is not shifted by the offset. Used
/// only as a negative control — the equivariance residual under this
/// variant equals the norm of the conjugated offset, so it is far from
/// zero for generic symmetry elements.
fn mutated_input_action(x: &SymmetryElement, u: &InputVelocity) -> Result<InputVelocity> {
    let a_inv = x.group_part().inverse()?;
    InputVelocity::new(a_inv.adjoint(u.u1())?, a_inv.adjoint(u.u2())?)
}

/// Equivariance residual of the plant dynamics when the *mutated* input
/// action is used in place of the real one. Large for generic samples.
pub fn mutated_equivariance_residual(
    x: &SymmetryElement,
    xi: &State,
    u: &InputVelocity,
) -> Result<f64> {
    let pushed = pushforward(x, &dynamics(xi, u)?)?;
    let moved = dynamics(&state_action(x, xi)?, &mutated_input_action(x, u)?)?;
    Ok(pushed.distance(&moved))
}

struct MaxCheck {
    name: &'static str,
    threshold: f64,
    worst: f64,
}

impl MaxCheck {
    fn new(name: &'static str, threshold: f64) -> Self {
        MaxCheck {
            name,
            threshold,
            worst: 0.0,
        }
    }

    fn record(&mut self, value: f64) {
        if !value.is_finite() {
            self.worst = f64::INFINITY;
        } else if value > self.worst {
            self.worst = value;
        }
    }

    fn finish(self) -> VerifyCheck {
        VerifyCheck {
            name: self.name.to_string(),
            value: self.worst,
            threshold: self.threshold,
            kind: CheckKind::Max,
            pass: self.worst <= self.threshold,
        }
    }
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

fn state_diff(a: &State, b: &State) -> f64 {
    frob(a.pose().matrix(), b.pose().matrix()) + frob(a.velocity().matrix(), b.velocity().matrix())
}

fn input_diff(a: &InputVelocity, b: &InputVelocity) -> f64 {
    frob(a.u1().matrix(), b.u1().matrix()) + frob(a.u2().matrix(), b.u2().matrix())
}

fn symmetry_diff(a: &SymmetryElement, b: &SymmetryElement) -> f64 {
    frob(a.group_part().matrix(), b.group_part().matrix())
        + frob(a.offset().matrix(), b.offset().matrix())
}

fn random_symmetry<R: Rng + ?Sized>(desc: &Descriptor, rng: &mut R) -> Result<SymmetryElement> {
    SymmetryElement::new(random_group(desc, rng), random_algebra(desc, rng))
}

fn random_state<R: Rng + ?Sized>(desc: &Descriptor, rng: &mut R) -> Result<State> {
    State::new(random_group(desc, rng), random_algebra(desc, rng))
}

fn random_input<R: Rng + ?Sized>(desc: &Descriptor, rng: &mut R) -> Result<InputVelocity> {
    InputVelocity::new(random_algebra(desc, rng), random_algebra(desc, rng))
}

fn random_dense<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Symmetry Adjoint via a central difference of the conjugation curve
/// t ↦ X · (exp(t w₁), t w₂) · X⁻¹, component by component.
fn adjoint_fd_residual(x: &SymmetryElement, w: &SymmetryVelocity) -> Result<f64> {
    let analytic = x.adjoint(w)?;
    let x_inv = x.inverse()?;
    let curve = |t: f64| -> Result<SymmetryElement> {
        let y = SymmetryElement::new(w.w1().scale(t).exp(), w.w2().scale(t))?;
        x.compose(&y)?.compose(&x_inv)
    };
    let plus = curve(FD_STEP)?;
    let minus = curve(-FD_STEP)?;
    let d_group = (plus.group_part().matrix() - minus.group_part().matrix()) / (2.0 * FD_STEP);
    let d_offset = (plus.offset().matrix() - minus.offset().matrix()) / (2.0 * FD_STEP);
    Ok(frob(&d_group, analytic.w1().matrix()) + frob(&d_offset, analytic.w2().matrix()))
}

/// Runs every structural check on `cases` seeded random samples and
/// aggregates the residuals. Deterministic for a fixed (group, cases,
/// seed) triple.
pub fn run_suite(desc: &Descriptor, cases: usize, seed: u64) -> Result<VerifyReport> {
    if cases == 0 {
        return Err(Error::InvalidConfig(
            "verification needs at least one case".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = desc.embedding_dim();
    let identity = SymmetryElement::identity(desc);

    let mut group_assoc = MaxCheck::new("group_associativity", 1e-10);
    let mut group_ident = MaxCheck::new("group_identity", 1e-10);
    let mut group_inv = MaxCheck::new("group_inverse", 1e-10);
    let mut sym_assoc = MaxCheck::new("symmetry_associativity", 1e-10);
    let mut sym_inv = MaxCheck::new("symmetry_inverse", 1e-10);
    let mut phi_ident = MaxCheck::new("state_action_identity", 1e-10);
    let mut phi_compat = MaxCheck::new("state_action_compatibility", 1e-10);
    let mut psi_ident = MaxCheck::new("input_action_identity", 1e-10);
    let mut psi_compat = MaxCheck::new("input_action_compatibility", 1e-10);
    let mut equivariance = MaxCheck::new("dynamics_equivariance", 1e-10);
    let mut lift_cond = MaxCheck::new("lift_condition", 1e-11);
    let mut lift_equiv = MaxCheck::new("lift_equivariance", 1e-10);
    let mut adjoint_fd = MaxCheck::new("adjoint_vs_finite_difference", 1e-5);
    let mut proj_idem = MaxCheck::new("projection_idempotent", 1e-10);
    let mut proj_selfadj = MaxCheck::new("projection_self_adjoint", 1e-10);
    let mut solve_check = MaxCheck::new("transitive_solve", 1e-10);
    let mut lifted_consistency = MaxCheck::new("lifted_dynamics_consistency", 1e-11);
    let mut mutated_values: Vec<f64> = Vec::with_capacity(cases);

    for _ in 0..cases {
        let p = random_group(desc, &mut rng);
        let q = random_group(desc, &mut rng);
        let r = random_group(desc, &mut rng);
        let x = random_symmetry(desc, &mut rng)?;
        let y = random_symmetry(desc, &mut rng)?;
        let z = random_symmetry(desc, &mut rng)?;
        let xi = random_state(desc, &mut rng)?;
        let xi2 = random_state(desc, &mut rng)?;
        let u = random_input(desc, &mut rng)?;
        let w = SymmetryVelocity::new(
            random_algebra(desc, &mut rng),
            random_algebra(desc, &mut rng),
        )?;

        // Base group axioms.
        group_assoc.record(frob(
            p.compose(&q)?.compose(&r)?.matrix(),
            p.compose(&q.compose(&r)?)?.matrix(),
        ));
        let e = crate::group::GroupElement::identity(desc);
        group_ident.record(
            frob(p.compose(&e)?.matrix(), p.matrix()) + frob(e.compose(&p)?.matrix(), p.matrix()),
        );
        let p_inv = p.inverse()?;
        group_inv.record(
            frob(p.compose(&p_inv)?.matrix(), e.matrix())
                + frob(p_inv.compose(&p)?.matrix(), e.matrix()),
        );

        // Semi-direct product axioms.
        sym_assoc.record(symmetry_diff(
            &x.compose(&y)?.compose(&z)?,
            &x.compose(&y.compose(&z)?)?,
        ));
        let x_inv = x.inverse()?;
        sym_inv.record(
            symmetry_diff(&x.compose(&x_inv)?, &identity)
                + symmetry_diff(&x_inv.compose(&x)?, &identity),
        );

        // Right-action laws for the state and input actions.
        phi_ident.record(state_diff(&state_action(&identity, &xi)?, &xi));
        phi_compat.record(state_diff(
            &state_action(&x, &state_action(&y, &xi)?)?,
            &state_action(&y.compose(&x)?, &xi)?,
        ));
        psi_ident.record(input_diff(&input_action(&identity, &u)?, &u));
        psi_compat.record(input_diff(
            &input_action(&x, &input_action(&y, &u)?)?,
            &input_action(&y.compose(&x)?, &u)?,
        ));

        // Equivariance of the dynamics, the lift condition, and the
        // equivariance of the lift.
        equivariance.record(equivariance_residual(&x, &xi, &u)?);
        lift_cond.record(lift_defect(&xi, &u)?);
        lift_equiv.record(lift_equivariance_residual(&x, &xi, &u)?);

        // Adjoint against a finite difference of conjugation.
        adjoint_fd.record(adjoint_fd_residual(&x, &w)?);

        // Algebra projection: idempotent and self-adjoint in the trace
        // inner product.
        let m = random_dense(n, &mut rng);
        let nn = random_dense(n, &mut rng);
        let pm = desc.matrix_from_coords(&desc.project_coords(&m));
        let pn = desc.matrix_from_coords(&desc.project_coords(&nn));
        proj_idem.record(frob(
            &desc.matrix_from_coords(&desc.project_coords(&pm)),
            &pm,
        ));
        proj_selfadj.record((pm.dot(&nn) - m.dot(&pn)).abs());

        // Transitive solve moves the first state onto the second.
        let x_sol = transitive_solve(&xi, &xi2)?;
        solve_check.record(state_diff(&state_action(&x_sol, &xi)?, &xi2));

        // The two derivations of the lifted dynamics agree.
        let origin = OriginPoint::new(xi2.pose().clone(), xi2.velocity().clone())?;
        let via_lift = x.left_translate(&lifted_dynamics(&x, &origin, &u)?)?;
        let explicit = lifted_dynamics_explicit(&x, &origin, &u)?;
        lifted_consistency.record(
            frob(&via_lift.d_group, &explicit.d_group)
                + frob(via_lift.d_offset.matrix(), explicit.d_offset.matrix()),
        );

        // Negative control: the broken input action must be *detected*.
        mutated_values.push(mutated_equivariance_residual(&x, &xi, &u)?);
    }

    mutated_values.sort_by(|a, b| a.total_cmp(b));
    let median = mutated_values[mutated_values.len() / 2];
    let mutated_check = VerifyCheck {
        name: "mutated_input_action_detected".to_string(),
        value: median,
        threshold: 1e-3,
        kind: CheckKind::AtLeast,
        pass: median >= 1e-3,
    };

    let mut checks: Vec<VerifyCheck> = vec![
        group_assoc.finish(),
        group_ident.finish(),
        group_inv.finish(),
        sym_assoc.finish(),
        sym_inv.finish(),
        phi_ident.finish(),
        phi_compat.finish(),
        psi_ident.finish(),
        psi_compat.finish(),
        equivariance.finish(),
        lift_cond.finish(),
        lift_equiv.finish(),
        adjoint_fd.finish(),
        proj_idem.finish(),
        proj_selfadj.finish(),
        solve_check.finish(),
        lifted_consistency.finish(),
    ];
    checks.push(mutated_check);

    Ok(VerifyReport {
        group: desc.name().to_string(),
        cases,
        seed,
        checks: checks.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{se2, se3, so3};

    #[test]
    fn suite_passes_on_all_builtin_groups() {
        for desc in [se2(), so3(), se3()] {
            let report = run_suite(&desc, 50, 7).unwrap();
            assert!(report.passed(), "{report}");
            assert_eq!(report.cases, 50);
        }
    }

    #[test]
    fn suite_is_deterministic_for_a_fixed_seed() {
        let desc = se2();
        let a = run_suite(&desc, 25, 99).unwrap();
        let b = run_suite(&desc, 25, 99).unwrap();
        for (ca, cb) in a.checks.iter().zip(&b.checks) {
            assert_eq!(ca.name, cb.name);
            assert_eq!(ca.value.to_bits(), cb.value.to_bits(), "{}", ca.name);
        }
    }

    #[test]
    fn different_seeds_sample_different_cases() {
        let desc = so3();
        let a = run_suite(&desc, 10, 1).unwrap();
        let b = run_suite(&desc, 10, 2).unwrap();
        let differs = a
            .checks
            .iter()
            .zip(&b.checks)
            .any(|(ca, cb)| ca.value.to_bits() != cb.value.to_bits());
        assert!(differs);
    }

    #[test]
    fn broken_input_action_is_flagged_as_large() {
        let report = run_suite(&se3(), 40, 3).unwrap();
        let control = report
            .checks
            .iter()
            .find(|c| c.name == "mutated_input_action_detected")
            .unwrap();
        assert_eq!(control.kind, CheckKind::AtLeast);
        assert!(control.value > 1e-3, "median residual {}", control.value);
        assert!(control.pass);
    }

    #[test]
    fn zero_cases_is_rejected() {
        assert!(run_suite(&se2(), 0, 0).is_err());
    }

    #[test]
    fn report_display_lists_every_check() {
        let report = run_suite(&se2(), 5, 11).unwrap();
        let text = report.to_string();
        for check in &report.checks {
            assert!(text.contains(&check.name), "missing {}", check.name);
        }
        assert!(text.contains("overall: PASS"));
        // Check names are unique so downstream matching is unambiguous.
        let mut names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), report.checks.len());
    }
}
