//! Oracles and generators shared by the integration tests. Each oracle is
//! written without calling the library routine it checks.
#![allow(dead_code)]

use std::f64::consts::PI;

use coherentnn::cnet::{ActivationKind, InitScheme, Initializer, Network};
use coherentnn::{Complex64, ComplexMatrix, ComplexVector};
use nalgebra::DMatrix;
use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, radius: f64) -> ComplexVector {
    let u = Uniform::new_inclusive(-radius, radius);
    (0..len).map(|_| c(u.sample(rng), u.sample(rng))).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, radius: f64) -> ComplexMatrix {
    let v = random_vector(rng, rows * cols, radius);
    ComplexMatrix::new(rows, cols, v.into_inner()).unwrap()
}

/// Standard normal via Box-Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_na(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `diag(R)` folded back into `Q`.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| c(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = d / d.norm();
        for i in 0..n {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    from_na(&u)
}

/// Polar factor by the Newton iteration `X <- (X + X^{-H}) / 2`.
pub fn newton_polar(w: &ComplexMatrix) -> ComplexMatrix {
    let mut x = to_na(w);
    for _ in 0..100 {
        let inv_h = x.clone().try_inverse().expect("invertible").adjoint();
        let next = (&x + inv_h) * c(0.5, 0.0);
        let step = (&next - &x).norm();
        x = next;
        if step < 1e-15 {
            break;
        }
    }
    from_na(&x)
}

/// Unitary DFT `F[j][k] = exp(-2 pi i j k / n) / sqrt(n)`.
pub fn unitary_dft(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(s, -2.0 * PI * (j * k) as f64 / n as f64)
    })
}

/// Closed-form diffraction entry from the base `W = exp(2 pi i / N)`:
/// `N^{-1/2} W^{((n-m)^2 - n^2 eps^2) / 2}`.
pub fn diffraction_entry(n_size: usize, eps: f64, n: usize, m: usize) -> Complex64 {
    let w = Complex64::from_polar(1.0, 2.0 * PI / n_size as f64);
    let d = n as f64 - m as f64;
    let exponent = 0.5 * (d * d - (n * n) as f64 * eps * eps);
    Complex64::from_polar(1.0 / (n_size as f64).sqrt(), 0.0) * w.powf(exponent)
}

/// Random net with the given widths and one activation on every layer.
pub fn random_net(seed: u64, widths: &[usize], kind: ActivationKind) -> Network {
    Initializer::new(InitScheme::separate(), seed)
        .network(widths, &vec![kind; widths.len() - 1])
        .unwrap()
}

/// Smallest distance of any pre-activation to a pole for input `x`.
pub fn pole_margin(net: &Network, x: &ComplexVector) -> f64 {
    let trace = net.forward(x).unwrap();
    net.layers()
        .iter()
        .zip(&trace.pre)
        .flat_map(|(l, z)| z.iter().map(move |&v| l.activation().pole_distance(v)))
        .fold(f64::INFINITY, f64::min)
}

/// Plain real-valued dense net trained by textbook backprop on
/// `E = sum (y - t)^2 / 2` (the complex engine's `dE/d conj(w)` is half the
/// real derivative of its unhalved loss, which is this).
#[derive(Clone, Debug)]
pub struct RealNet {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
    pub kinds: Vec<ActivationKind>,
}

fn real_act(kind: ActivationKind, z: f64) -> (f64, f64) {
    match kind {
        ActivationKind::Identity => (z, 1.0),
        ActivationKind::Sigmoid => {
            let s = 1.0 / (1.0 + (-z).exp());
            (s, s * (1.0 - s))
        }
        ActivationKind::Tanh => {
            let t = z.tanh();
            (t, 1.0 - t * t)
        }
    }
}

impl RealNet {
    /// Copies the real parts of a complex net.
    pub fn from_network(net: &Network) -> Self {
        Self {
            weights: net
                .layers()
                .iter()
                .map(|l| {
                    (0..l.outputs())
                        .map(|r| l.weight().row(r).iter().map(|z| z.re).collect())
                        .collect()
                })
                .collect(),
            biases: net
                .layers()
                .iter()
                .map(|l| l.bias().iter().map(|z| z.re).collect())
                .collect(),
            kinds: net.layers().iter().map(|l| l.activation()).collect(),
        }
    }

    /// Per-layer `(outputs, derivatives)` with the input first.
    fn forward(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut xs = vec![x.to_vec()];
        let mut ds = Vec::new();
        for ((w, b), &k) in self.weights.iter().zip(&self.biases).zip(&self.kinds) {
            let prev = xs.last().unwrap();
            let (y, d): (Vec<f64>, Vec<f64>) = w
                .iter()
                .zip(b)
                .map(|(row, bi)| real_act(k, row.iter().zip(prev).map(|(a, v)| a * v).sum::<f64>() + bi))
                .unzip();
            xs.push(y);
            ds.push(d);
        }
        (xs, ds)
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).0.pop().unwrap()
    }

    /// One full-batch step; returns the mean unhalved loss before the step.
    pub fn step(&mut self, data: &[(Vec<f64>, Vec<f64>)], lr: f64) -> f64 {
        let mut gw: Vec<Vec<Vec<f64>>> = self
            .weights
            .iter()
            .map(|w| w.iter().map(|r| vec![0.0; r.len()]).collect())
            .collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut total = 0.0;
        for (x, t) in data {
            let (xs, ds) = self.forward(x);
            let out = xs.last().unwrap();
            total += out.iter().zip(t).map(|(y, t)| (y - t) * (y - t)).sum::<f64>();
            let mut delta: Vec<f64> = out
                .iter()
                .zip(t)
                .zip(&ds[ds.len() - 1])
                .map(|((y, t), d)| (y - t) * d)
                .collect();
            for l in (0..self.weights.len()).rev() {
                for (r, dr) in delta.iter().enumerate() {
                    for (cidx, xv) in xs[l].iter().enumerate() {
                        gw[l][r][cidx] += dr * xv;
                    }
                    gb[l][r] += dr;
                }
                if l > 0 {
                    delta = (0..self.weights[l][0].len())
                        .map(|j| {
                            self.weights[l]
                                .iter()
                                .zip(&delta)
                                .map(|(row, d)| row[j] * d)
                                .sum::<f64>()
                                * ds[l - 1][j]
                        })
                        .collect();
                }
            }
        }
        let n = data.len() as f64;
        for l in 0..self.weights.len() {
            for (row, grow) in self.weights[l].iter_mut().zip(&gw[l]) {
                for (w, g) in row.iter_mut().zip(grow) {
                    *w -= lr * g / n;
                }
            }
            for (b, g) in self.biases[l].iter_mut().zip(&gb[l]) {
                *b -= lr * g / n;
            }
        }
        total / n
    }
}
