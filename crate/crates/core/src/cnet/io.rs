//! JSON model files.
//!
//! ```json
//! {"layers": [{"rows": 2, "cols": 2, "activation": "tanh",
//!              "weight": [[re, im], ...], "bias": [[re, im], ...]}]}
//! ```
//! Complex numbers are `[re, im]` pairs and weights are row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ActivationKind, Layer, Network};
use crate::error::{check_len, Result};
use crate::linalg::{from_pairs, to_pairs, ComplexMatrix, ComplexVector, Pair};

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    rows: usize,
    cols: usize,
    activation: ActivationKind,
    weight: Vec<Pair>,
    bias: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    layers: Vec<LayerDoc>,
}

impl Network {
    pub fn to_json(&self) -> String {
        let doc = NetworkDoc {
            layers: self
                .layers
                .iter()
                .map(|l| LayerDoc {
                    rows: l.outputs(),
                    cols: l.inputs(),
                    activation: l.activation(),
                    weight: to_pairs(l.weight().data()),
                    bias: to_pairs(l.bias()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("network document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        let layers = doc
            .layers
            .into_iter()
            .map(|l| {
                check_len("bias length", l.rows, l.bias.len())?;
                let weight = ComplexMatrix::new(l.rows, l.cols, from_pairs("weight", &l.weight)?)?;
                let bias = ComplexVector::new(from_pairs("bias", &l.bias)?);
                Layer::new(weight, bias, l.activation)
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
