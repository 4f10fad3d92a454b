use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backprop::Sample;
use crate::error::Result;
use crate::linalg::{ensure_finite, from_pairs, to_pairs, ComplexVector, Pair};

/// Input/target pair with a free-form label.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    pub input: ComplexVector,
    pub target: ComplexVector,
    pub tag: String,
}

impl SamplePair {
    pub fn new(input: ComplexVector, target: ComplexVector, tag: impl Into<String>) -> Result<Self> {
        ensure_finite("sample input", &input)?;
        ensure_finite("sample target", &target)?;
        Ok(Self {
            input,
            target,
            tag: tag.into(),
        })
    }
}

impl Sample for SamplePair {
    fn input(&self) -> &ComplexVector {
        &self.input
    }
    fn target(&self) -> &ComplexVector {
        &self.target
    }
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    tag: String,
    input: Vec<Pair>,
    target: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    samples: Vec<SampleDoc>,
}

/// Writes `{"samples": [{"tag", "input": [[re, im], ...], "target": [...]}]}`.
pub fn save_samples(path: impl AsRef<Path>, samples: &[SamplePair]) -> Result<()> {
    let doc = SampleFile {
        samples: samples
            .iter()
            .map(|s| SampleDoc {
                tag: s.tag.clone(),
                input: to_pairs(&s.input),
                target: to_pairs(&s.target),
            })
            .collect(),
    };
    fs::write(path, serde_json::to_string(&doc)?)?;
    Ok(())
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<SamplePair>> {
    let doc: SampleFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.samples
        .into_iter()
        .map(|s| {
            SamplePair::new(
                from_pairs("sample input", &s.input)?.into(),
                from_pairs("sample target", &s.target)?.into(),
                s.tag,
            )
        })
        .collect()
}

/// Summary describing a dataset written alongside experiment outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub count: usize,
    pub input_dim: usize,
    pub target_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl DatasetManifest {
    pub fn describe(name: impl Into<String>, samples: &[SamplePair], seed: Option<u64>) -> Self {
        Self {
            name: name.into(),
            count: samples.len(),
            input_dim: samples.first().map_or(0, |s| s.input.len()),
            target_dim: samples.first().map_or(0, |s| s.target.len()),
            seed,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
