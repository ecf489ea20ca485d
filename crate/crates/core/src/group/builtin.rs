//! Built-in groups and JSON descriptor loading.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ConstraintKind, Descriptor, GroupDescriptor, DEFAULT_MANIFOLD_TOL};

fn mat3(rows: [[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, rows.as_flattened())
}

fn mat4(rows: [[f64; 4]; 4]) -> DMatrix<f64> {
    DMatrix::from_row_slice(4, 4, rows.as_flattened())
}

/// Planar rigid transforms in homogeneous form.
///
/// Algebra coordinates are (ω, x, y): the rotation generator first, then
/// the two translation generators. A coordinate vector maps to
/// [[0, −ω, x], [ω, 0, y], [0, 0, 0]].
pub fn se2() -> Descriptor {
    GroupDescriptor::new(
        "se2",
        3,
        vec![
            mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
            mat3([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
            mat3([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]),
        ],
        ConstraintKind::HomogeneousRigid { rot_dim: 2 },
    )
    .expect("se2 descriptor is valid")
}

/// 3-D rotations.
///
/// Algebra coordinates are (x, y, z) angular rates; the basis is the three
/// elementary skew-symmetric generators, so coordinates match the usual
/// axis–angle vector.
pub fn so3() -> Descriptor {
    GroupDescriptor::new(
        "so3",
        3,
        vec![
            mat3([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
            mat3([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
            mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        ],
        ConstraintKind::SpecialOrthogonal,
    )
    .expect("so3 descriptor is valid")
}

/// Spatial rigid transforms in homogeneous form.
///
/// Algebra coordinates are (ωx, ωy, ωz, x, y, z): three rotation
/// generators followed by three translation generators.
pub fn se3() -> Descriptor {
    let z = [0.0; 4];
    let mut basis = Vec::with_capacity(6);
    // Rotation generators: elementary skews embedded in the top-left block.
    basis.push(mat4([z, [0.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, 0.0], z]));
    basis.push(mat4([[0.0, 0.0, 1.0, 0.0], z, [-1.0, 0.0, 0.0, 0.0], z]));
    basis.push(mat4([[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], z, z]));
    // Translation generators: last column.
    for i in 0..3 {
        let mut m = DMatrix::zeros(4, 4);
        m[(i, 3)] = 1.0;
        basis.push(m);
    }
    GroupDescriptor::new(
        "se3",
        4,
        basis,
        ConstraintKind::HomogeneousRigid { rot_dim: 3 },
    )
    .expect("se3 descriptor is valid")
}

/// On-disk descriptor format for custom groups.
///
/// `basis` holds `dim` matrices, each flattened row-major to `n²` floats.
/// `constraint` defaults to the algebra-normalizer test, which needs no
/// structural knowledge of the group.
#[derive(Debug, Serialize, Deserialize)]
pub struct DescriptorSpec {
    pub name: String,
    pub n: usize,
    pub basis: Vec<Vec<f64>>,
    #[serde(default = "default_constraint")]
    pub constraint: ConstraintKind,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_constraint() -> ConstraintKind {
    ConstraintKind::AlgebraNormalizer
}

fn default_tolerance() -> f64 {
    DEFAULT_MANIFOLD_TOL
}

impl DescriptorSpec {
    /// Validates the spec and builds a descriptor.
    pub fn build(self) -> Result<Descriptor> {
        let mut basis = Vec::with_capacity(self.basis.len());
        for (i, flat) in self.basis.iter().enumerate() {
            if flat.len() != self.n * self.n {
                return Err(Error::InvalidDescriptor(format!(
                    "{}: basis matrix {i} has {} entries, expected {}",
                    self.name,
                    flat.len(),
                    self.n * self.n
                )));
            }
            basis.push(DMatrix::from_row_slice(self.n, self.n, flat));
        }
        GroupDescriptor::with_tolerance(self.name, self.n, basis, self.constraint, self.tolerance)
    }
}

/// Parses a JSON descriptor string.
pub fn from_json_str(json: &str) -> Result<Descriptor> {
    let spec: DescriptorSpec = serde_json::from_str(json)?;
    spec.build()
}

/// Loads a JSON descriptor file.
pub fn from_json_file(path: impl AsRef<Path>) -> Result<Descriptor> {
    from_json_str(&std::fs::read_to_string(path)?)
}

/// Resolves a group by short name (`se2`, `so3`, `se3`) or, failing that,
/// by treating the string as a path to a descriptor JSON file.
pub fn by_name(name: &str) -> Result<Descriptor> {
    match name.to_ascii_lowercase().as_str() {
        "se2" => Ok(se2()),
        "so3" => Ok(so3()),
        "se3" => Ok(se3()),
        _ => {
            let path = Path::new(name);
            if path.is_file() {
                from_json_file(path)
            } else {
                Err(Error::UnknownGroup(name.to_string()))
            }
        }
    }
}
