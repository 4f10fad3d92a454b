use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SamplePair;
use crate::error::{check_len, Error, Result};
use crate::linalg::ComplexVector;
use crate::photonic::DiffractionOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffractiveKind {
    /// `a e^{i0}`, `a ~ U(0, 1)`.
    AmplitudeOnly,
    /// `e^{i theta}`, `theta ~ U(-pi, pi)`.
    PhaseOnly,
    AmplitudePhase,
}

impl DiffractiveKind {
    pub const ALL: [DiffractiveKind; 3] = [Self::AmplitudeOnly, Self::PhaseOnly, Self::AmplitudePhase];

    pub fn name(self) -> &'static str {
        match self {
            Self::AmplitudeOnly => "amplitude",
            Self::PhaseOnly => "phase",
            Self::AmplitudePhase => "amplitude_phase",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffractiveSampleSpec {
    pub kind: DiffractiveKind,
    pub length: usize,
    pub seed: u64,
}

impl DiffractiveSampleSpec {
    pub fn new(kind: DiffractiveKind, length: usize, seed: u64) -> Result<Self> {
        if length < 2 {
            return Err(Error::InvalidParameter(format!("sample length {length} below 2")));
        }
        Ok(Self { kind, length, seed })
    }
}

/// Random input fields and their diffracted images `op * x`.
pub fn gen_diffractive_samples(
    spec: &DiffractiveSampleSpec,
    count: usize,
    op: &DiffractionOperator,
) -> Result<Vec<SamplePair>> {
    check_len("diffraction operator size", spec.length, op.size())?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let amp = Uniform::new(0.0, 1.0);
    let phase = Uniform::new(-PI, PI);
    (0..count)
        .map(|i| {
            let input: ComplexVector = (0..spec.length)
                .map(|_| match spec.kind {
                    DiffractiveKind::AmplitudeOnly => Complex64::new(amp.sample(&mut rng), 0.0),
                    DiffractiveKind::PhaseOnly => Complex64::from_polar(1.0, phase.sample(&mut rng)),
                    DiffractiveKind::AmplitudePhase => {
                        let a = amp.sample(&mut rng);
                        Complex64::from_polar(a, phase.sample(&mut rng))
                    }
                })
                .collect();
            let target = op.apply(&input)?;
            Ok(SamplePair {
                input,
                target,
                tag: format!("{}{i}", spec.kind.name()),
            })
        })
        .collect()
}
