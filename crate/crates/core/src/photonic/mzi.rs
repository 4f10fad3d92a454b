//! Mach-Zehnder interferometer units and rectangular meshes.
//!
//! A unit is `R(theta, phi) = T(phi) M T(theta) M` with the 3 dB coupler
//! `M = [[1, i], [i, 1]] / sqrt(2)` and phase shifter `T(a) = diag(e^{ia}, 1)`.
//! Expanded:
//!
//! ```text
//! R = i e^{i theta/2} [[e^{i phi} sin(theta/2), e^{i phi} cos(theta/2)],
//!                      [cos(theta/2),          -sin(theta/2)        ]]
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

pub type Block = [[Complex64; 2]; 2];

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

pub fn coupler_block() -> Block {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let b = Complex64::new(0.0, FRAC_1_SQRT_2);
    [[a, b], [b, a]]
}

pub fn phase_shifter_block(angle: f64) -> Block {
    [[Complex64::from_polar(1.0, angle), ZERO], [ZERO, ONE]]
}

pub(crate) fn mul_block(a: &Block, b: &Block) -> Block {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub(crate) fn block_to_matrix(b: &Block) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[b[0].to_vec(), b[1].to_vec()])
}

/// The 2x2 directional coupler matrix.
pub fn coupler_matrix() -> ComplexMatrix {
    block_to_matrix(&coupler_block())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziUnit {
    theta: f64,
    phi: f64,
}

impl MziUnit {
    /// Phases are stored wrapped into `(-pi, pi]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite("MZI phase"));
        }
        Ok(Self {
            theta: wrap_phase(theta),
            phi: wrap_phase(phi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `T(phi) M T(theta) M`, evaluated as a product.
    pub fn block(&self) -> Block {
        let m = coupler_block();
        let inner = mul_block(&phase_shifter_block(self.theta), &m);
        let inner = mul_block(&m, &inner);
        mul_block(&phase_shifter_block(self.phi), &inner)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        block_to_matrix(&self.block())
    }
}

pub fn mzi_matrix(unit: MziUnit) -> ComplexMatrix {
    unit.matrix()
}

/// A unit acting on ports `top` and `top + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedUnit {
    pub top: usize,
    pub unit: MziUnit,
}

/// Stages apply in order: `stages[0]` touches the input first.
#[derive(Debug, Clone, PartialEq)]
pub struct MziMesh {
    ports: usize,
    stages: Vec<Vec<PlacedUnit>>,
}

impl MziMesh {
    pub fn new(ports: usize, stages: Vec<Vec<PlacedUnit>>) -> Result<Self> {
        if ports == 0 {
            return Err(Error::InvalidParameter("mesh needs at least one port".into()));
        }
        for (s, stage) in stages.iter().enumerate() {
            let mut used = vec![false; ports];
            for u in stage {
                if u.top + 1 >= ports {
                    return Err(Error::InvalidParameter(format!(
                        "stage {s}: unit on ports ({}, {}) exceeds {ports} ports",
                        u.top,
                        u.top + 1
                    )));
                }
                if used[u.top] || used[u.top + 1] {
                    return Err(Error::InvalidParameter(format!(
                        "stage {s}: overlapping units at port {}",
                        u.top
                    )));
                }
                used[u.top] = true;
                used[u.top + 1] = true;
            }
        }
        Ok(Self { ports, stages })
    }

    /// Port pairs of the rectangular layout: stage `k` starts at port `k % 2`
    /// and there are `ports` stages, `ports (ports - 1) / 2` units in total.
    /// For four ports: (0,1)+(2,3), (1,2), (0,1)+(2,3), (1,2).
    pub fn rectangular_layout(ports: usize) -> Vec<Vec<usize>> {
        (0..ports)
            .map(|k| (k % 2..ports.saturating_sub(1)).step_by(2).collect())
            .collect()
    }

    /// Rectangular mesh with phases taken in layout order from `phases`.
    pub fn rectangular(ports: usize, phases: &[(f64, f64)]) -> Result<Self> {
        let layout = Self::rectangular_layout(ports);
        let needed: usize = layout.iter().map(Vec::len).sum();
        if phases.len() != needed {
            return Err(Error::DimensionMismatch {
                context: "rectangular mesh phases",
                expected: needed,
                found: phases.len(),
            });
        }
        let mut it = phases.iter();
        let stages = layout
            .into_iter()
            .map(|tops| {
                tops.into_iter()
                    .map(|top| {
                        let &(theta, phi) = it.next().expect("counted above");
                        Ok(PlacedUnit {
                            top,
                            unit: MziUnit::new(theta, phi)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ports, stages)
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn stages(&self) -> &[Vec<PlacedUnit>] {
        &self.stages
    }

    pub fn unit_count(&self) -> usize {
        self.stages.iter().map(Vec::len).sum()
    }

    /// True when the port pairs match [`rectangular_layout`](Self::rectangular_layout).
    pub fn is_rectangular(&self) -> bool {
        let layout = Self::rectangular_layout(self.ports);
        layout.len() == self.stages.len()
            && layout
                .iter()
                .zip(&self.stages)
                .all(|(tops, stage)| tops.len() == stage.len() && tops.iter().zip(stage).all(|(t, u)| *t == u.top))
    }

    /// `S = S_last ... S_first`, each stage the identity outside its units.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.ports);
        for stage in &self.stages {
            for u in stage {
                m.apply_rows(u.top, &u.unit.block());
            }
        }
        m
    }
}

pub fn mesh_matrix(mesh: &MziMesh) -> ComplexMatrix {
    mesh.matrix()
}
