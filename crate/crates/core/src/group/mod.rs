//! Matrix Lie groups described by data.
//!
//! A [`GroupDescriptor`] pins down a matrix Lie group G ⊂ ℝ^{n×n} by a basis
//! of its Lie algebra g together with a membership test for the manifold.
//! Everything downstream (group elements, algebra elements, the symmetry
//! group, the observer) is generic over the descriptor, so the same code
//! runs on SE(2), SO(3), SE(3), or any user-supplied matrix group.

mod builtin;

pub use builtin::{by_name, from_json_file, from_json_str, se2, se3, so3, DescriptorSpec};

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default manifold tolerance: residuals at or below this are clean.
pub const DEFAULT_MANIFOLD_TOL: f64 = 1e-9;

/// Residuals in `(tol, WARN_FACTOR * tol]` log a warning; anything above is
/// rejected as off-manifold.
pub const WARN_FACTOR: f64 = 1e3;

/// Absolute tolerance for "is this matrix inside the algebra" checks.
/// Scaled by `1 + ‖M‖_F` so large velocities are not rejected for round-off.
pub const ALGEBRA_MEMBERSHIP_TOL: f64 = 1e-10;

/// How group membership is tested for a descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// ‖MᵀM − I‖_F + |det M − 1|, for rotation groups.
    SpecialOrthogonal,
    /// Homogeneous-form rigid transforms: orthogonality of the top-left
    /// `rot_dim` block plus the fixed bottom row (0, …, 0, 1).
    HomogeneousRigid { rot_dim: usize },
    /// Generic fallback for custom groups: conjugation by a group element
    /// must preserve the algebra, so we sum the out-of-algebra residuals of
    /// M Bᵢ M⁻¹ over the basis. Zero for exact members, continuous in M.
    AlgebraNormalizer,
}

/// A matrix Lie group, described by its embedding size, an algebra basis,
/// and a membership constraint.
///
/// The descriptor owns the Gram matrix of the basis (under the trace inner
/// product ⟨M, N⟩ = tr(MᵀN)) and its Cholesky factor, so projections onto
/// the algebra are a single triangular solve.
pub struct GroupDescriptor {
    name: String,
    n: usize,
    dim: usize,
    basis: Vec<DMatrix<f64>>,
    gram: DMatrix<f64>,
    gram_chol: Cholesky<f64, Dyn>,
    constraint: ConstraintKind,
    tol: f64,
    /// Counts warn-band membership checks so repeated warnings can be
    /// sampled instead of flooding the log (an Euler run in the warn band
    /// would otherwise warn on every composed product of every step).
    warn_count: AtomicU64,
}

/// Shared handle to a descriptor. Elements hold one of these, so cloning an
/// element never copies the basis.
pub type Descriptor = Arc<GroupDescriptor>;

impl fmt::Debug for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupDescriptor")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("dim", &self.dim)
            .field("constraint", &self.constraint)
            .field("tol", &self.tol)
            .finish()
    }
}

impl GroupDescriptor {
    /// Builds and validates a descriptor, returning a shared handle.
    ///
    /// Validation checks that the basis matrices are square, finite, and
    /// linearly independent, and that the span is closed under the
    /// commutator bracket (so it really is a Lie algebra).
    pub fn new(
        name: impl Into<String>,
        n: usize,
        basis: Vec<DMatrix<f64>>,
        constraint: ConstraintKind,
    ) -> Result<Descriptor> {
        Self::with_tolerance(name, n, basis, constraint, DEFAULT_MANIFOLD_TOL)
    }

    /// Same as [`GroupDescriptor::new`] with an explicit manifold tolerance.
    ///
    /// Residuals up to `tol` pass silently, up to `WARN_FACTOR * tol` pass
    /// with a logged warning, and beyond that are errors. Simulations use a
    /// relaxed tolerance because explicit Euler steps drift off the
    /// manifold by design.
    pub fn with_tolerance(
        name: impl Into<String>,
        n: usize,
        basis: Vec<DMatrix<f64>>,
        constraint: ConstraintKind,
        tol: f64,
    ) -> Result<Descriptor> {
        let name = name.into();
        if n == 0 {
            return Err(Error::InvalidDescriptor(format!(
                "{name}: embedding dimension must be positive"
            )));
        }
        if basis.is_empty() {
            return Err(Error::InvalidDescriptor(format!(
                "{name}: algebra basis must not be empty"
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidDescriptor(format!(
                "{name}: manifold tolerance must be finite and positive"
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::InvalidDescriptor(format!(
                    "{name}: basis matrix {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidDescriptor(format!(
                    "{name}: basis matrix {i} has non-finite entries"
                )));
            }
        }
        if let ConstraintKind::HomogeneousRigid { rot_dim } = constraint {
            if rot_dim == 0 || rot_dim >= n {
                return Err(Error::InvalidDescriptor(format!(
                    "{name}: rot_dim must lie in 1..{n}"
                )));
            }
        }

        let dim = basis.len();
        let mut gram = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                gram[(i, j)] = basis[i].dot(&basis[j]);
            }
        }
        let gram_chol = Cholesky::new(gram.clone()).ok_or_else(|| {
            Error::InvalidDescriptor(format!(
                "{name}: basis matrices are linearly dependent (Gram matrix is not positive definite)"
            ))
        })?;
        // A rank-deficient Gram matrix can still factor when round-off
        // nudges a zero pivot slightly positive, so check the numerical
        // rank via the spread of the Cholesky diagonal.
        let l = gram_chol.l();
        let (mut pivot_min, mut pivot_max) = (f64::INFINITY, 0.0f64);
        for i in 0..dim {
            pivot_min = pivot_min.min(l[(i, i)]);
            pivot_max = pivot_max.max(l[(i, i)]);
        }
        if pivot_min <= 1e-7 * pivot_max {
            return Err(Error::InvalidDescriptor(format!(
                "{name}: basis matrices are linearly dependent (Gram matrix is numerically singular)"
            )));
        }

        let desc = GroupDescriptor {
            name,
            n,
            dim,
            basis,
            gram,
            gram_chol,
            constraint,
            tol,
            warn_count: AtomicU64::new(0),
        };

        // Closure under the bracket: [Bᵢ, Bⱼ] must stay inside the span.
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = desc.commutator(&desc.basis[i], &desc.basis[j]);
                let r = desc.projection_residual(&c);
                if r > ALGEBRA_MEMBERSHIP_TOL * (1.0 + c.norm()) {
                    return Err(Error::InvalidDescriptor(format!(
                        "{}: basis is not closed under the commutator \
                         (residual {r:.3e} for pair ({i}, {j}))",
                        desc.name
                    )));
                }
            }
        }

        Ok(Arc::new(desc))
    }

    /// Group name, used in error messages and mismatch checks.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Size of the matrix embedding (elements are n×n).
    pub fn embedding_dim(&self) -> usize {
        self.n
    }

    /// Dimension of the Lie algebra.
    pub fn algebra_dim(&self) -> usize {
        self.dim
    }

    /// The algebra basis, in coordinate order.
    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Gram matrix of the basis under the trace inner product.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Manifold tolerance (clean threshold of the warn/fail ladder).
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Hard rejection limit for membership checks.
    pub fn hard_limit(&self) -> f64 {
        self.tol * WARN_FACTOR
    }

    /// How membership is tested.
    pub fn constraint(&self) -> &ConstraintKind {
        &self.constraint
    }

    /// The n×n identity matrix.
    pub fn identity_matrix(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
    }

    fn commutator(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b - b * a
    }

    /// Coordinates of the orthogonal projection of `m` onto the algebra:
    /// solve Gram · c = [tr(BᵢᵀM)]ᵢ.
    pub fn project_coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let rhs = DVector::from_fn(self.dim, |i, _| self.basis[i].dot(m));
        self.gram_chol.solve(&rhs)
    }

    /// Rebuilds the matrix Σ cᵢ Bᵢ from coordinates.
    pub fn matrix_from_coords(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            m += *c * b;
        }
        m
    }

    /// Frobenius distance from `m` to its projection onto the algebra.
    pub fn projection_residual(&self, m: &DMatrix<f64>) -> f64 {
        let proj = self.matrix_from_coords(&self.project_coords(m));
        (m - proj).norm()
    }

    /// Scalar membership residual: 0 (up to round-off) exactly on the
    /// group, growing continuously as `m` leaves it.
    pub fn constraint_residual(&self, m: &DMatrix<f64>) -> f64 {
        if m.nrows() != self.n || m.ncols() != self.n {
            return f64::INFINITY;
        }
        match self.constraint {
            ConstraintKind::SpecialOrthogonal => {
                let gramian = m.transpose() * m;
                let ortho = (gramian - self.identity_matrix()).norm();
                ortho + (m.determinant() - 1.0).abs()
            }
            ConstraintKind::HomogeneousRigid { rot_dim } => {
                let r = m.view((0, 0), (rot_dim, rot_dim));
                let ortho = (r.transpose() * r - DMatrix::identity(rot_dim, rot_dim)).norm();
                let det = (r.clone_owned().determinant() - 1.0).abs();
                let mut bottom = 0.0;
                for j in 0..self.n {
                    let want = if j + 1 == self.n { 1.0 } else { 0.0 };
                    bottom += (m[(self.n - 1, j)] - want).powi(2);
                }
                ortho + det + bottom.sqrt()
            }
            ConstraintKind::AlgebraNormalizer => {
                let Some(inv) = m.clone().try_inverse() else {
                    return f64::INFINITY;
                };
                self.basis
                    .iter()
                    .map(|b| self.projection_residual(&(m * b * &inv)))
                    .sum()
            }
        }
    }

    /// Applies the warn/fail tolerance ladder to a candidate group matrix.
    pub fn check_on_manifold(&self, m: &DMatrix<f64>) -> Result<()> {
        let residual = self.constraint_residual(m);
        if !residual.is_finite() {
            return Err(Error::OffManifold {
                group: self.name.clone(),
                residual,
                limit: self.hard_limit(),
            });
        }
        if residual <= self.tol {
            Ok(())
        } else if residual <= self.hard_limit() {
            // Sample the warning: a long integration sitting in the warn
            // band would otherwise emit one line per composed product.
            let seen = self.warn_count.fetch_add(1, Ordering::Relaxed);
            if seen < 5 || seen.is_multiple_of(10_000) {
                log::warn!(
                    "{}: constraint residual {residual:.3e} above tolerance {:.3e} \
                     (still accepted; further warnings sampled)",
                    self.name,
                    self.tol
                );
            }
            Ok(())
        } else {
            Err(Error::OffManifold {
                group: self.name.clone(),
                residual,
                limit: self.hard_limit(),
            })
        }
    }

    /// Returns a fresh handle to this group with a different tolerance.
    pub fn relaxed(&self, tol: f64) -> Result<Descriptor> {
        GroupDescriptor::with_tolerance(
            self.name.clone(),
            self.n,
            self.basis.clone(),
            self.constraint.clone(),
            tol,
        )
    }
}

/// Errors early if two descriptors do not describe the same group.
pub(crate) fn same_group(a: &Descriptor, b: &Descriptor) -> Result<()> {
    if a.name == b.name && a.n == b.n && a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::GroupMismatch {
            left: a.name.clone(),
            right: b.name.clone(),
        })
    }
}

/// An element of the group: an n×n matrix satisfying the membership
/// constraint, tagged with its descriptor.
#[derive(Clone, Debug)]
pub struct GroupElement {
    mat: DMatrix<f64>,
    desc: Descriptor,
}

impl GroupElement {
    /// Wraps a matrix after running the membership check.
    pub fn new(desc: &Descriptor, mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != desc.n || mat.ncols() != desc.n {
            return Err(Error::InvalidDescriptor(format!(
                "{}: expected a {}x{} matrix, got {}x{}",
                desc.name,
                desc.n,
                desc.n,
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(Error::OffManifold {
                group: desc.name.clone(),
                residual: f64::INFINITY,
                limit: desc.hard_limit(),
            });
        }
        desc.check_on_manifold(&mat)?;
        Ok(GroupElement {
            mat,
            desc: desc.clone(),
        })
    }

    /// Wraps a matrix that is known to be on the manifold (e.g. the output
    /// of `exp`). Only used internally to avoid redundant checks.
    pub(crate) fn new_unchecked(desc: &Descriptor, mat: DMatrix<f64>) -> Self {
        GroupElement {
            mat,
            desc: desc.clone(),
        }
    }

    /// The identity element.
    pub fn identity(desc: &Descriptor) -> Self {
        GroupElement {
            mat: desc.identity_matrix(),
            desc: desc.clone(),
        }
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// The group this element belongs to.
    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        same_group(&self.desc, &other.desc)?;
        let mat = &self.mat * &other.mat;
        self.desc.check_on_manifold(&mat)?;
        Ok(GroupElement {
            mat,
            desc: self.desc.clone(),
        })
    }

    /// Group inverse.
    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = self.mat.clone().try_inverse().ok_or(Error::Singular)?;
        self.desc.check_on_manifold(&inv)?;
        Ok(GroupElement {
            mat: inv,
            desc: self.desc.clone(),
        })
    }

    /// Adjoint action on the algebra: Ad_P w = P w P⁻¹.
    ///
    /// Conjugating by an element that sits slightly off the manifold (a
    /// finite-difference probe, or a long explicit-Euler run under a
    /// relaxed tolerance) leaves the algebra by an amount proportional to
    /// that drift, so the membership limit here scales with the group's
    /// hard limit instead of pure round-off. Far-off matrices are still
    /// rejected.
    pub fn adjoint(&self, w: &AlgebraElement) -> Result<AlgebraElement> {
        same_group(&self.desc, &w.desc)?;
        let inv = self.mat.clone().try_inverse().ok_or(Error::Singular)?;
        let conj = &self.mat * w.matrix() * inv;
        let elem = AlgebraElement::project(&self.desc, &conj);
        let residual = (&conj - &elem.mat).norm();
        let limit = (ALGEBRA_MEMBERSHIP_TOL + self.desc.hard_limit()) * (1.0 + conj.norm());
        if residual > limit {
            return Err(Error::NotInAlgebra {
                group: self.desc.name.clone(),
                residual,
                limit,
            });
        }
        Ok(elem)
    }

    /// Membership residual of the stored matrix (diagnostic).
    pub fn constraint_residual(&self) -> f64 {
        self.desc.constraint_residual(&self.mat)
    }
}

/// An element of the Lie algebra: a matrix in the span of the basis, stored
/// together with its coordinates.
///
/// The matrix is always the exact reconstruction Σ cᵢ Bᵢ of the stored
/// coordinates, so linear arithmetic on coordinates and on matrices agree.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    mat: DMatrix<f64>,
    coords: DVector<f64>,
    desc: Descriptor,
}

impl AlgebraElement {
    /// The zero element.
    pub fn zero(desc: &Descriptor) -> Self {
        AlgebraElement {
            mat: DMatrix::zeros(desc.n, desc.n),
            coords: DVector::zeros(desc.dim),
            desc: desc.clone(),
        }
    }

    /// Builds an element from basis coordinates.
    pub fn from_coords(desc: &Descriptor, coords: &[f64]) -> Result<Self> {
        if coords.len() != desc.dim {
            return Err(Error::CoordinateLength {
                group: desc.name.clone(),
                expected: desc.dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "{}: algebra coordinates must be finite",
                desc.name
            )));
        }
        let coords = DVector::from_column_slice(coords);
        let mat = desc.matrix_from_coords(&coords);
        Ok(AlgebraElement {
            mat,
            coords,
            desc: desc.clone(),
        })
    }

    /// Builds an element from a matrix, rejecting it if it lies outside the
    /// algebra by more than round-off.
    pub fn from_matrix(desc: &Descriptor, mat: DMatrix<f64>) -> Result<Self> {
        let limit = ALGEBRA_MEMBERSHIP_TOL * (1.0 + mat.norm());
        let elem = Self::project(desc, &mat);
        let residual = (&mat - &elem.mat).norm();
        if residual > limit {
            return Err(Error::NotInAlgebra {
                group: desc.name.clone(),
                residual,
                limit,
            });
        }
        Ok(elem)
    }

    /// Orthogonal projection of an arbitrary matrix onto the algebra under
    /// the trace inner product. Never fails: the result is the nearest
    /// algebra element.
    pub fn project(desc: &Descriptor, mat: &DMatrix<f64>) -> Self {
        let coords = desc.project_coords(mat);
        let mat = desc.matrix_from_coords(&coords);
        AlgebraElement {
            mat,
            coords,
            desc: desc.clone(),
        }
    }

    /// The matrix representation.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Basis coordinates.
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// The group this element belongs to.
    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    /// Frobenius norm of the matrix representation.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Lie bracket [self, other] = self·other − other·self.
    pub fn bracket(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        same_group(&self.desc, &other.desc)?;
        AlgebraElement::from_matrix(&self.desc, &self.mat * &other.mat - &other.mat * &self.mat)
    }

    /// Linear combination self + s·other.
    pub fn add_scaled(&self, other: &AlgebraElement, s: f64) -> Result<AlgebraElement> {
        same_group(&self.desc, &other.desc)?;
        Ok(AlgebraElement {
            mat: &self.mat + s * &other.mat,
            coords: &self.coords + s * &other.coords,
            desc: self.desc.clone(),
        })
    }

    /// Sum of two algebra elements.
    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add_scaled(other, 1.0)
    }

    /// Difference of two algebra elements.
    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add_scaled(other, -1.0)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> AlgebraElement {
        AlgebraElement {
            mat: s * &self.mat,
            coords: s * &self.coords,
            desc: self.desc.clone(),
        }
    }

    /// Matrix exponential, landing on the group manifold.
    ///
    /// Uses scaling-and-squaring with Padé approximants, so it is exact to
    /// round-off for any algebra element, not just special closed forms.
    pub fn exp(&self) -> GroupElement {
        GroupElement::new_unchecked(&self.desc, self.mat.exp())
    }
}

/// Draws an algebra element with coordinates uniform in [−1, 1].
pub fn random_algebra<R: Rng + ?Sized>(desc: &Descriptor, rng: &mut R) -> AlgebraElement {
    let coords: Vec<f64> = (0..desc.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    AlgebraElement::from_coords(desc, &coords).expect("uniform coordinates are always valid")
}

/// Draws a group element as exp of a random algebra element, so samples are
/// exactly on the manifold.
pub fn random_group<R: Rng + ?Sized>(desc: &Descriptor, rng: &mut R) -> GroupElement {
    random_algebra(desc, rng).exp()
}
