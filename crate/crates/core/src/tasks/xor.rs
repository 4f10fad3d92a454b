use std::f64::consts::PI;

use super::SamplePair;
use crate::linalg::ComplexVector;

/// Radii of the two phase-XOR rows.
pub const PHASE_XOR_AMPLITUDES: [f64; 2] = [2.0, 1.0];

/// The two phase-rotation samples, one 4-vector per row.
pub fn phase_xor_dataset() -> Vec<SamplePair> {
    let rows: [([f64; 4], [f64; 4]); 2] = [
        (
            [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0],
            [0.0, PI / 2.0, PI, 3.0 * PI / 2.0],
        ),
        (
            [PI / 3.0, 5.0 * PI / 6.0, 8.0 * PI / 6.0, 11.0 * PI / 6.0],
            [PI / 6.0, 4.0 * PI / 6.0, 7.0 * PI / 6.0, 10.0 * PI / 6.0],
        ),
    ];
    rows.iter()
        .zip(PHASE_XOR_AMPLITUDES)
        .enumerate()
        .map(|(k, ((x, y), a))| SamplePair {
            input: ComplexVector::from_polar(a, x),
            target: ComplexVector::from_polar(a, y),
            tag: format!("phase{}", k + 1),
        })
        .collect()
}

/// Truth-table rows 00, 01, 10, 11 as one-hot inputs; row `k` targets
/// `XOR(row k)` at position `k`.
pub fn real_xor_dataset() -> Vec<SamplePair> {
    (0..4)
        .map(|k| {
            let (a, b) = (k >> 1 & 1, k & 1);
            let mut input = [0.0; 4];
            input[k] = 1.0;
            let mut target = [0.0; 4];
            target[k] = (a ^ b) as f64;
            SamplePair {
                input: ComplexVector::from_real(&input),
                target: ComplexVector::from_real(&target),
                tag: format!("xor{a}{b}"),
            }
        })
        .collect()
}
