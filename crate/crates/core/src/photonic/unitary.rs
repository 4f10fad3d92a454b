//! Mapping weight matrices onto MZI meshes.
//!
//! A learned weight is first replaced by its nearest unitary (polar factor),
//! then factored as `U = S diag(p)`: a rectangular mesh `S` preceded by one
//! phase screen `p` on the input ports.
//!
//! The factorization nulls entries of `U` alternately from the right
//! (`U <- U R`) and from the left (`U <- R^H U`) in the rectangular order,
//! leaving a diagonal `D`. That yields `U = (left units) D (right units)^H`.
//! Diagonals slide rightward through `R` for free
//! (`diag(a, b) R(theta, phi) = R(theta, phi + arg a - arg b) b`), and
//! `R(theta, phi)^H = -e^{-i theta} R(theta, 0) T(-phi)`, so every phase ends
//! up in the input screen.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mzi::{MziMesh, MziUnit, PlacedUnit};
use crate::error::{Error, Result};
use crate::linalg::{from_pairs, to_pairs, ComplexMatrix, ComplexVector, Pair};

/// Smallest singular value accepted by [`project_to_unitary`].
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Largest `max |U^H U - I|` accepted by [`decompose_unitary`].
pub const UNITARY_TOLERANCE: f64 = 1e-8;

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Singular values in descending order.
pub fn singular_values(w: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_nalgebra(w).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Unitary closest to `w` in Frobenius norm: `U_svd V_svd^H`.
pub fn project_to_unitary(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            context: "unitary projection (square)",
            expected: w.rows(),
            found: w.cols(),
        });
    }
    let svd = to_nalgebra(w).svd(true, true);
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest.is_nan() || smallest <= RANK_THRESHOLD {
        return Err(Error::RankDeficient { smallest });
    }
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    Ok(from_nalgebra(&(u * v_t)))
}

/// Mesh plus input phase screen with `mesh.matrix() * diag(input_phases) = U`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDecomposition {
    pub mesh: MziMesh,
    pub input_phases: ComplexVector,
}

impl MeshDecomposition {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = self.mesh.matrix();
        let n = m.rows();
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] *= self.input_phases[c];
            }
        }
        m
    }

    /// Largest entry error against `target`.
    pub fn reconstruction_error(&self, target: &ComplexMatrix) -> f64 {
        self.matrix().max_abs_diff(target)
    }

    pub fn to_json(&self) -> String {
        let doc = MeshDoc {
            ports: self.mesh.ports(),
            stages: self
                .mesh
                .stages()
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|u| UnitDoc {
                            top: u.top,
                            theta: u.unit.theta(),
                            phi: u.unit.phi(),
                        })
                        .collect()
                })
                .collect(),
            input_phases: to_pairs(&self.input_phases),
        };
        serde_json::to_string_pretty(&doc).expect("mesh document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeshDoc = serde_json::from_str(text)?;
        let stages = doc
            .stages
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|u| {
                        Ok(PlacedUnit {
                            top: u.top,
                            unit: MziUnit::new(u.theta, u.phi)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mesh = MziMesh::new(doc.ports, stages)?;
        let input_phases = ComplexVector::new(from_pairs("input phases", &doc.input_phases)?);
        if input_phases.len() != doc.ports {
            return Err(Error::DimensionMismatch {
                context: "input phases",
                expected: doc.ports,
                found: input_phases.len(),
            });
        }
        Ok(Self { mesh, input_phases })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct UnitDoc {
    top: usize,
    theta: f64,
    phi: f64,
}

#[derive(Serialize, Deserialize)]
struct MeshDoc {
    ports: usize,
    stages: Vec<Vec<UnitDoc>>,
    input_phases: Vec<Pair>,
}

#[derive(Debug, Clone, Copy)]
struct Op {
    top: usize,
    theta: f64,
    phi: f64,
}

impl Op {
    fn unit(&self) -> MziUnit {
        MziUnit::new(self.theta, self.phi).expect("finite phases")
    }
}

/// `(theta, phi)` making `e^{i phi} sin(theta/2) a + cos(theta/2) b = 0`.
fn null_from_right(a: Complex64, b: Complex64) -> (f64, f64) {
    let theta = 2.0 * b.norm().atan2(a.norm());
    let phi = b.arg() - a.arg() + std::f64::consts::PI;
    (theta, phi)
}

/// `(theta, phi)` making `e^{-i phi} cos(theta/2) a - sin(theta/2) b = 0`.
fn null_from_left(a: Complex64, b: Complex64) -> (f64, f64) {
    let theta = 2.0 * a.norm().atan2(b.norm());
    let phi = a.arg() - b.arg();
    (theta, phi)
}

fn adjoint_block(b: &super::mzi::Block) -> super::mzi::Block {
    [[b[0][0].conj(), b[1][0].conj()], [b[0][1].conj(), b[1][1].conj()]]
}

/// Factors a unitary into a rectangular mesh and an input phase screen.
pub fn decompose_unitary(u: &ComplexMatrix) -> Result<MeshDecomposition> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            context: "mesh decomposition (square)",
            expected: u.rows(),
            found: u.cols(),
        });
    }
    let defect = u.unitarity_defect();
    if defect.is_nan() || defect > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary { defect });
    }
    let n = u.rows();
    let mut work = u.clone();
    let mut right: Vec<Op> = Vec::new();
    let mut left: Vec<Op> = Vec::new();

    for i in 1..n {
        if i % 2 == 1 {
            for j in 0..i {
                let row = n - 1 - j;
                let col = i - 1 - j;
                let (theta, phi) = null_from_right(work[(row, col)], work[(row, col + 1)]);
                let op = Op { top: col, theta, phi };
                work.apply_cols(col, &op.unit().block());
                work[(row, col)] = Complex64::new(0.0, 0.0);
                right.push(op);
            }
        } else {
            for j in 1..=i {
                let row = n + j - i - 1;
                let col = j - 1;
                let (theta, phi) = null_from_left(work[(row - 1, col)], work[(row, col)]);
                let op = Op {
                    top: row - 1,
                    theta,
                    phi,
                };
                work.apply_rows(row - 1, &adjoint_block(&op.unit().block()));
                work[(row, col)] = Complex64::new(0.0, 0.0);
                left.push(op);
            }
        }
    }

    // U = L_1 ... L_k D R_m^H ... R_1^H; push D rightward through the R^H.
    let mut pending: Vec<Complex64> = (0..n).map(|k| work[(k, k)]).collect();
    let mut rewritten = Vec::with_capacity(right.len());
    for op in right.iter().rev() {
        let k = op.top;
        let g = -Complex64::from_polar(1.0, -op.theta);
        let (qa, qb) = (pending[k] * g, pending[k + 1] * g);
        rewritten.push(Op {
            top: k,
            theta: op.theta,
            phi: (qa / qb).arg(),
        });
        pending[k] = qb * Complex64::from_polar(1.0, -op.phi);
        pending[k + 1] = qb;
    }

    // Application order from the input side.
    let sequence = rewritten.iter().rev().chain(left.iter().rev());
    let mut depth = vec![0usize; n];
    let mut stages: Vec<Vec<PlacedUnit>> = Vec::new();
    for op in sequence {
        let s = depth[op.top].max(depth[op.top + 1]);
        if stages.len() <= s {
            stages.resize_with(s + 1, Vec::new);
        }
        stages[s].push(PlacedUnit {
            top: op.top,
            unit: op.unit(),
        });
        depth[op.top] = s + 1;
        depth[op.top + 1] = s + 1;
    }
    if stages.len() < n {
        stages.resize_with(n, Vec::new);
    }
    for stage in &mut stages {
        stage.sort_by_key(|u| u.top);
    }

    Ok(MeshDecomposition {
        mesh: MziMesh::new(n, stages)?,
        input_phases: pending.into(),
    })
}

/// Result of compiling an arbitrary square weight onto a mesh.
#[derive(Debug, Clone)]
pub struct WeightCompilation {
    pub unitary: ComplexMatrix,
    /// `||W - U||_F`.
    pub projection_distance: f64,
    pub decomposition: MeshDecomposition,
    /// `max |mesh * diag(p) - U|`.
    pub reconstruction_error: f64,
}

pub fn compile_weight(w: &ComplexMatrix) -> Result<WeightCompilation> {
    let unitary = project_to_unitary(w)?;
    let decomposition = decompose_unitary(&unitary)?;
    Ok(WeightCompilation {
        projection_distance: w.frobenius_distance(&unitary),
        reconstruction_error: decomposition.reconstruction_error(&unitary),
        unitary,
        decomposition,
    })
}
