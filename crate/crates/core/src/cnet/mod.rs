//! Fully connected complex-valued networks.
//!
//! Each layer computes `z = W x + b` followed by an elementwise activation,
//! with the complex output kept as a single entity rather than split into
//! real and imaginary channels.

mod activation;
mod init;
mod io;

pub use activation::{ActivationKind, POLE_GUARD};
pub use init::{InitScheme, Initializer, DEFAULT_HALF_WIDTH};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::linalg::{ensure_finite, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    weight: ComplexMatrix,
    bias: ComplexVector,
    activation: ActivationKind,
}

impl Layer {
    pub fn new(weight: ComplexMatrix, bias: ComplexVector, activation: ActivationKind) -> Result<Self> {
        check_len("layer bias", weight.rows(), bias.len())?;
        ensure_finite("layer weight", weight.data())?;
        ensure_finite("layer bias", &bias)?;
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    /// Layer with zero bias.
    pub fn from_weight(weight: ComplexMatrix, activation: ActivationKind) -> Result<Self> {
        let bias = ComplexVector::zeros(weight.rows());
        Self::new(weight, bias, activation)
    }

    pub fn weight(&self) -> &ComplexMatrix {
        &self.weight
    }

    pub fn bias(&self) -> &ComplexVector {
        &self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    pub(crate) fn params_mut(&mut self) -> (&mut ComplexMatrix, &mut ComplexVector) {
        (&mut self.weight, &mut self.bias)
    }

    /// Pre-activation `W x + b`.
    pub fn pre_activation(&self, x: &[Complex64]) -> Result<ComplexVector> {
        let mut z = self.weight.matvec(x)?;
        for (zi, bi) in z.iter_mut().zip(self.bias.iter()) {
            *zi += bi;
        }
        Ok(z)
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<ComplexVector> {
        let z = self.pre_activation(x)?;
        z.iter()
            .map(|&zi| self.activation.activate(zi))
            .collect::<Result<Vec<_>>>()
            .map(Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            check_len("layer chaining", pair[0].outputs(), pair[1].inputs())?;
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Widths `[in, h1, ..., out]`.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(Layer::outputs))
            .collect()
    }

    pub fn forward(&self, x0: &ComplexVector) -> Result<ForwardTrace> {
        check_len("network input", self.input_dim(), x0.len())?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post: Vec<ComplexVector> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = post.last().unwrap_or(x0);
            let z = layer.pre_activation(x)?;
            let a = z
                .iter()
                .map(|&zi| layer.activation.activate(zi))
                .collect::<Result<ComplexVector>>()?;
            pre.push(z);
            post.push(a);
        }
        Ok(ForwardTrace {
            input: x0.clone(),
            pre,
            post,
        })
    }

    /// Final-layer activation only.
    pub fn predict(&self, x0: &ComplexVector) -> Result<ComplexVector> {
        let mut x = self.layers[0].apply(x0)?;
        for layer in &self.layers[1..] {
            x = layer.apply(&x)?;
        }
        Ok(x)
    }
}

/// Cached per-layer pre-activations and activations of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub input: ComplexVector,
    pub pre: Vec<ComplexVector>,
    pub post: Vec<ComplexVector>,
}

impl ForwardTrace {
    pub fn output(&self) -> &ComplexVector {
        self.post.last().expect("trace of a non-empty network")
    }

    /// Input to layer `l` (`x_{l-1}`), i.e. the network input for layer 0.
    pub fn layer_input(&self, l: usize) -> &ComplexVector {
        if l == 0 {
            &self.input
        } else {
            &self.post[l - 1]
        }
    }
}

/// Real `2r x 2c` matrix acting on interleaved `(re, im)` vectors, with one
/// `[[a, -b], [b, a]]` block per complex entry `a + ib`.
pub fn complex_to_block_real(w: &ComplexMatrix) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * w.rows(), 2 * w.cols());
    for r in 0..w.rows() {
        for c in 0..w.cols() {
            let z = w[(r, c)];
            out[(2 * r, 2 * c)] = z.re;
            out[(2 * r, 2 * c + 1)] = -z.im;
            out[(2 * r + 1, 2 * c)] = z.im;
            out[(2 * r + 1, 2 * c + 1)] = z.re;
        }
    }
    out
}

/// `(z1, ..., zn) -> (re z1, im z1, ..., re zn, im zn)`.
pub fn interleave(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn deinterleave(v: &[f64]) -> ComplexVector {
    assert!(v.len().is_multiple_of(2), "interleaved vector must have even length");
    v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}
