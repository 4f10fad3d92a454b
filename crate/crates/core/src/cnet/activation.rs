//! Activations obtained by substituting a complex argument into the real
//! sigmoid / tanh formulas.
//!
//! All three kinds satisfy `conj(f(z)) == f(conj(z))`, which is what lets one
//! backprop rule serve real and complex data alike. The analytic extensions
//! have poles on the imaginary axis; evaluating within [`POLE_GUARD`] of one
//! is reported as an error instead of returning a huge value.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum distance to a pole below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Identity,
    Sigmoid,
    Tanh,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 3] = [Self::Identity, Self::Sigmoid, Self::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
        }
    }

    /// Distance from `z` to the nearest pole of the activation.
    pub fn pole_distance(self, z: Complex64) -> f64 {
        match self {
            Self::Identity => f64::INFINITY,
            // i*pi*(2k+1)
            Self::Sigmoid => {
                let k = ((z.im / PI - 1.0) / 2.0).round();
                (z.re).hypot(z.im - PI * (2.0 * k + 1.0))
            }
            // i*pi*(k+1/2)
            Self::Tanh => {
                let k = (z.im / PI - 0.5).round();
                (z.re).hypot(z.im - PI * (k + 0.5))
            }
        }
    }

    fn guard(self, z: Complex64) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::NonFinite("activation argument"));
        }
        let distance = self.pole_distance(z);
        if distance < POLE_GUARD {
            return Err(Error::PoleProximity {
                kind: self,
                z,
                distance,
            });
        }
        Ok(())
    }

    pub fn activate(self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        Ok(self.eval(z))
    }

    /// Derivative of the real formula with the complex argument substituted.
    /// For these analytic kinds it coincides with the complex derivative.
    pub fn activate_deriv(self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        let one = Complex64::new(1.0, 0.0);
        Ok(match self {
            Self::Identity => one,
            Self::Sigmoid => {
                let s = self.eval(z);
                s * (one - s)
            }
            Self::Tanh => {
                let t = self.eval(z);
                one - t * t
            }
        })
    }

    /// Evaluates without the pole guard. Both branches avoid forming
    /// `exp` of a large positive real part.
    fn eval(self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Self::Identity => z,
            Self::Sigmoid => {
                if z.re >= 0.0 {
                    one / (one + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (one + e)
                }
            }
            Self::Tanh => {
                if z.re >= 0.0 {
                    let e = (-2.0 * z).exp();
                    (one - e) / (one + e)
                } else {
                    let e = (2.0 * z).exp();
                    (e - one) / (e + one)
                }
            }
        }
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" => Ok(Self::Identity),
            "sigmoid" => Ok(Self::Sigmoid),
            "tanh" => Ok(Self::Tanh),
            other => Err(Error::InvalidParameter(format!("unknown activation '{other}'"))),
        }
    }
}
