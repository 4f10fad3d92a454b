//! Discrete diffraction operator and the modulation mechanism.
//!
//! `D_eps[n][m] = N^{-1/2} exp(i pi [(n - m)^2 - n^2 eps^2] / N)` with
//! zero-based indices. Expanding the square gives
//! `D_eps = diag(a) F diag(b)` where `F[n][m] = N^{-1/2} exp(-2 pi i n m / N)`,
//! `a_n = exp(i pi n^2 (1 - eps^2) / N)` and `b_m = exp(i pi m^2 / N)`, so the
//! operator is unitary for every `eps`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::cnet::Network;
use crate::error::{check_len, Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};

/// Smallest diffracted amplitude accepted as a divisor by [`extract_modulation`].
pub const DIVISION_GUARD: f64 = 1e-9;

/// `exp(i pi x / n)`, with `x` reduced modulo `2n` first to keep the phase small.
fn half_turns(x: f64, n: usize) -> Complex64 {
    let period = 2.0 * n as f64;
    Complex64::from_polar(1.0, PI * x.rem_euclid(period) / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionOperator {
    size: usize,
    epsilon: f64,
    matrix: ComplexMatrix,
}

impl DiffractionOperator {
    pub fn new(size: usize, epsilon: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("diffraction size must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "fractional factor {epsilon} outside [0, 1]"
            )));
        }
        let scale = 1.0 / (size as f64).sqrt();
        let eps2 = epsilon * epsilon;
        let modulus = 2 * size as u64;
        let matrix = ComplexMatrix::from_fn(size, size, |n, m| {
            let d = n.abs_diff(m) as u64;
            let walk = ((d * d) % modulus) as f64;
            let chirp = ((n * n) as f64 * eps2).rem_euclid(modulus as f64);
            half_turns(walk - chirp, size) * scale
        });
        Ok(Self { size, epsilon, matrix })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, y: &[Complex64]) -> Result<ComplexVector> {
        self.matrix.matvec(y)
    }

    /// `(a, F, b)` with `D = diag(a) F diag(b)`.
    pub fn chirp_factors(&self) -> (ComplexVector, ComplexMatrix, ComplexVector) {
        let n = self.size;
        let eps2 = self.epsilon * self.epsilon;
        let left = (0..n).map(|k| half_turns((k * k) as f64 * (1.0 - eps2), n)).collect();
        let right = (0..n).map(|k| half_turns(((k * k) % (2 * n)) as f64, n)).collect();
        let scale = 1.0 / (n as f64).sqrt();
        let kernel = ComplexMatrix::from_fn(n, n, |r, c| half_turns(-2.0 * ((r * c) % n) as f64, n) * scale);
        (left, kernel, right)
    }

    /// Writes the matrix as CSV, one row per line, entries like `0.5+0.25j`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for r in 0..self.size {
            w.write_record(self.matrix.row(r).iter().map(|z| format!("{}{:+}j", z.re, z.im)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(File::create(path)?)
    }
}

/// Free-space geometry of one diffractive stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// Aperture width in meters.
    pub aperture: f64,
    /// Wavelength in meters.
    pub wavelength: f64,
    pub samples: usize,
}

impl GeometryParams {
    pub fn new(aperture: f64, wavelength: f64, samples: usize) -> Result<Self> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(aperture) || !positive(wavelength) || samples == 0 {
            return Err(Error::InvalidParameter(format!(
                "geometry must be positive (d = {aperture}, lambda = {wavelength}, N = {samples})"
            )));
        }
        Ok(Self {
            aperture,
            wavelength,
            samples,
        })
    }
}

/// Propagation distance `d^2 / (lambda N)` in meters.
pub fn diffraction_distance(g: &GeometryParams) -> f64 {
    g.aperture * g.aperture / (g.wavelength * g.samples as f64)
}

/// One stage: fixed propagation followed by an elementwise mask.
#[derive(Debug, Clone)]
pub struct DiffractiveLayer {
    pub op: Arc<DiffractionOperator>,
    pub modulation: ComplexVector,
}

impl DiffractiveLayer {
    pub fn new(op: Arc<DiffractionOperator>, modulation: ComplexVector) -> Result<Self> {
        check_len("modulation length", op.size(), modulation.len())?;
        crate::linalg::ensure_finite("modulation", &modulation)?;
        Ok(Self { op, modulation })
    }

    pub fn apply(&self, y: &[Complex64]) -> Result<ComplexVector> {
        self.op.apply(y)?.hadamard(&self.modulation)
    }
}

/// Mask `r` with `(D y_in) * r = layer_output`.
pub fn extract_modulation(
    layer_output: &ComplexVector,
    op: &DiffractionOperator,
    y_in: &ComplexVector,
) -> Result<ComplexVector> {
    check_len("layer output", op.size(), layer_output.len())?;
    let diffracted = op.apply(y_in)?;
    let small: Vec<usize> = diffracted
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm().is_nan() || z.norm() <= DIVISION_GUARD)
        .map(|(k, _)| k)
        .collect();
    if !small.is_empty() {
        return Err(Error::NearZeroDivisor { indices: small });
    }
    Ok(layer_output.iter().zip(diffracted.iter()).map(|(f, d)| f / d).collect())
}

pub fn diffractive_forward(layers: &[DiffractiveLayer], y0: &ComplexVector) -> Result<ComplexVector> {
    layers.iter().try_fold(y0.clone(), |y, layer| layer.apply(&y))
}

/// Diffractive stages reproducing `net` on the input `y0`, one per layer.
///
/// Every layer must be `N x N` with `N = op.size()`.
pub fn modulation_chain(
    net: &Network,
    op: &Arc<DiffractionOperator>,
    y0: &ComplexVector,
) -> Result<Vec<DiffractiveLayer>> {
    for l in net.layers() {
        check_len("diffractive layer inputs", op.size(), l.inputs())?;
        check_len("diffractive layer outputs", op.size(), l.outputs())?;
    }
    let trace = net.forward(y0)?;
    (0..net.layers().len())
        .map(|l| {
            let r = extract_modulation(&trace.post[l], op, trace.layer_input(l))?;
            DiffractiveLayer::new(Arc::clone(op), r)
        })
        .collect()
}
