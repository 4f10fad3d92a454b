//! Seeded weight initialization.
//!
//! Every layer draws from its own ChaCha8 stream: the generator is seeded
//! with the experiment seed and `set_stream(layer_index)` selects the layer.
//! Output is therefore identical across platforms and independent of how
//! many other layers were drawn first.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ActivationKind, Layer, Network};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};

pub const DEFAULT_HALF_WIDTH: f64 = 0.5;

/// Distribution of the initial weight entries. All schemes are zero-mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum InitScheme {
    /// `re, im ~ U(-h, h)` independently.
    SeparateUniform {
        half_width: f64,
    },
    /// `exp(i*theta)`, `theta ~ U(-pi, pi)`.
    PhaseOnly,
    /// `re ~ U(-h, h)`, `im = re`.
    RealWithMirrorImag {
        half_width: f64,
    },
    RealOnly {
        half_width: f64,
    },
    ImagOnly {
        half_width: f64,
    },
}

impl InitScheme {
    pub fn separate() -> Self {
        Self::SeparateUniform {
            half_width: DEFAULT_HALF_WIDTH,
        }
    }

    /// Parses the short CLI names (`separate`, `phase`, `mirror`, `real`, `imag`).
    pub fn from_name(name: &str, half_width: f64) -> Result<Self> {
        Ok(match name {
            "separate" => Self::SeparateUniform { half_width },
            "phase" => Self::PhaseOnly,
            "mirror" => Self::RealWithMirrorImag { half_width },
            "real" => Self::RealOnly { half_width },
            "imag" => Self::ImagOnly { half_width },
            other => return Err(Error::InvalidParameter(format!("unknown init scheme '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SeparateUniform { .. } => "separate",
            Self::PhaseOnly => "phase",
            Self::RealWithMirrorImag { .. } => "mirror",
            Self::RealOnly { .. } => "real",
            Self::ImagOnly { .. } => "imag",
        }
    }

    fn half_width(&self) -> Option<f64> {
        match *self {
            Self::PhaseOnly => None,
            Self::SeparateUniform { half_width }
            | Self::RealWithMirrorImag { half_width }
            | Self::RealOnly { half_width }
            | Self::ImagOnly { half_width } => Some(half_width),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.half_width() {
            Some(h) if !(h.is_finite() && h > 0.0) => {
                Err(Error::InvalidParameter(format!("half width must be positive, got {h}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Initializer {
    pub scheme: InitScheme,
    pub seed: u64,
}

impl Initializer {
    pub fn new(scheme: InitScheme, seed: u64) -> Self {
        Self { scheme, seed }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Draws an `outputs x inputs` layer on stream `index`. Bias starts at zero.
    pub fn layer(&self, index: u64, outputs: usize, inputs: usize, activation: ActivationKind) -> Result<Layer> {
        if outputs == 0 || inputs == 0 {
            return Err(Error::InvalidParameter("layer dimensions must be at least 1".into()));
        }
        self.scheme.validate()?;
        let mut rng = self.rng(index);
        let h = self.scheme.half_width().unwrap_or(1.0);
        let comp = Uniform::new(-h, h);
        let phase = Uniform::new_inclusive(-PI, PI);
        let weight = ComplexMatrix::from_fn(outputs, inputs, |_, _| match self.scheme {
            InitScheme::SeparateUniform { .. } => {
                let re = comp.sample(&mut rng);
                let im = comp.sample(&mut rng);
                Complex64::new(re, im)
            }
            InitScheme::PhaseOnly => Complex64::from_polar(1.0, phase.sample(&mut rng)),
            InitScheme::RealWithMirrorImag { .. } => {
                let re = comp.sample(&mut rng);
                Complex64::new(re, re)
            }
            InitScheme::RealOnly { .. } => Complex64::new(comp.sample(&mut rng), 0.0),
            InitScheme::ImagOnly { .. } => Complex64::new(0.0, comp.sample(&mut rng)),
        });
        Layer::new(weight, ComplexVector::zeros(outputs), activation)
    }

    /// Network with the given widths `[in, h1, ..., out]`; `activations` has
    /// one entry per layer.
    pub fn network(&self, widths: &[usize], activations: &[ActivationKind]) -> Result<Network> {
        if widths.len() < 2 {
            return Err(Error::InvalidParameter(
                "need at least an input and an output width".into(),
            ));
        }
        if activations.len() != widths.len() - 1 {
            return Err(Error::DimensionMismatch {
                context: "activations per layer",
                expected: widths.len() - 1,
                found: activations.len(),
            });
        }
        let layers = widths
            .windows(2)
            .zip(activations)
            .enumerate()
            .map(|(i, (w, &act))| self.layer(i as u64, w[1], w[0], act))
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }
}
