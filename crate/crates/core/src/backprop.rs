//! Single-channel complex backpropagation.
//!
//! The loss is `E = sum_k |x_L,k - t_k|^2` on post-activation outputs. The
//! gradient of a parameter `w` is taken as `dE/d conj(w)`, which for a real
//! `E` points along steepest ascent in the `(re w, im w)` plane, so the
//! update is `w <- w - lr * grad`. With `delta_l = dE/d conj(z_l)`:
//!
//! ```text
//! delta_L = f'(conj z_L) * (x_L - t)
//! delta_l = conj(W_{l+1})^T delta_{l+1} * f'(conj z_l)
//! dW_l    = delta_l conj(x_{l-1})^T        db_l = delta_l
//! ```
//!
//! `f'(conj z)` is the real derivative formula evaluated at the conjugated
//! pre-activation; [`cr_variant_delta`] evaluates `conj(f'(z))` through an
//! independent closed form and must agree.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cnet::{ActivationKind, ForwardTrace, Network};
use crate::error::{check_len, Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};

/// Anything with an input and a target, usable as a training sample.
pub trait Sample {
    fn input(&self) -> &ComplexVector;
    fn target(&self) -> &ComplexVector;
}

impl Sample for (ComplexVector, ComplexVector) {
    fn input(&self) -> &ComplexVector {
        &self.0
    }
    fn target(&self) -> &ComplexVector {
        &self.1
    }
}

/// `dE/d conj(W_l)` and `dE/d conj(b_l)` for every layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<ComplexMatrix>,
    pub biases: Vec<ComplexVector>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            weights: net
                .layers()
                .iter()
                .map(|l| ComplexMatrix::zeros(l.outputs(), l.inputs()))
                .collect(),
            biases: net.layers().iter().map(|l| ComplexVector::zeros(l.outputs())).collect(),
        }
    }

    fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for w in &mut self.weights {
            w.data_mut().iter_mut().for_each(|x| *x *= s);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(|x| *x *= s);
        }
    }

    /// Largest entry modulus across all gradients.
    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .flat_map(|w| w.data().iter())
            .chain(self.biases.iter().flat_map(|b| b.iter()))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Gradients) -> f64 {
        let w = self.weights.iter().zip(&other.weights).map(|(a, b)| a.max_abs_diff(b));
        let b = self.biases.iter().zip(&other.biases).map(|(a, b)| a.max_abs_diff(b));
        w.chain(b).fold(0.0, f64::max)
    }

    fn matches(&self, net: &Network) -> Result<()> {
        check_len("gradient layers", net.layers().len(), self.weights.len())?;
        check_len("gradient layers", net.layers().len(), self.biases.len())?;
        for ((l, w), b) in net.layers().iter().zip(&self.weights).zip(&self.biases) {
            check_len("gradient rows", l.outputs(), w.rows())?;
            check_len("gradient cols", l.inputs(), w.cols())?;
            check_len("gradient bias", l.outputs(), b.len())?;
        }
        Ok(())
    }
}

/// Sum of squared moduli of `output - target`.
pub fn loss(output: &[Complex64], target: &[Complex64]) -> Result<f64> {
    check_len("loss", output.len(), target.len())?;
    Ok(output.iter().zip(target).map(|(y, t)| (y - t).norm_sqr()).sum())
}

/// How the activation derivative entering the delta recursion is formed.
#[derive(Clone, Copy)]
enum DerivativeForm {
    /// `f'(conj z)` from the real formula.
    Compatible,
    /// `conj(f'_CR(z))` with the complex derivative written independently.
    CauchyRiemann,
}

fn delta_factor(kind: ActivationKind, z: Complex64, form: DerivativeForm) -> Result<Complex64> {
    match form {
        DerivativeForm::Compatible => kind.activate_deriv(z.conj()),
        DerivativeForm::CauchyRiemann => cr_derivative(kind, z).map(|d| d.conj()),
    }
}

/// Complex derivative written through hyperbolic functions:
/// `sigma'(z) = 1 / (4 cosh^2(z/2))`, `tanh'(z) = 1 / cosh^2(z)`.
fn cr_derivative(kind: ActivationKind, z: Complex64) -> Result<Complex64> {
    // Same pole guard as the forward pass.
    kind.activate(z)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(match kind {
        ActivationKind::Identity => one,
        ActivationKind::Sigmoid => {
            let c = (z / 2.0).cosh();
            one / (4.0 * c * c)
        }
        ActivationKind::Tanh => {
            let c = z.cosh();
            one / (c * c)
        }
    })
}

fn accumulate(
    net: &Network,
    trace: &ForwardTrace,
    target: &[Complex64],
    form: DerivativeForm,
    grads: &mut Gradients,
) -> Result<()> {
    let layers = net.layers();
    check_len("trace layers", layers.len(), trace.pre.len())?;
    check_len("target", net.output_dim(), target.len())?;
    let last = layers.len() - 1;

    let mut delta: ComplexVector = trace.post[last].iter().zip(target).map(|(y, t)| y - t).collect();
    for l in (0..=last).rev() {
        let kind = layers[l].activation();
        for (d, &z) in delta.iter_mut().zip(trace.pre[l].iter()) {
            *d *= delta_factor(kind, z, form)?;
        }
        let x_prev = trace.layer_input(l);
        let gw = &mut grads.weights[l];
        let cols = gw.cols();
        for (r, &d) in delta.iter().enumerate() {
            let row = &mut gw.data_mut()[r * cols..(r + 1) * cols];
            for (g, x) in row.iter_mut().zip(x_prev.iter()) {
                *g += d * x.conj();
            }
        }
        for (g, d) in grads.biases[l].iter_mut().zip(delta.iter()) {
            *g += d;
        }
        if l > 0 {
            delta = layers[l].weight().adjoint_matvec(&delta)?;
        }
    }
    Ok(())
}

/// Gradients of one sample's loss, from a trace produced by `net.forward`.
pub fn backward(net: &Network, trace: &ForwardTrace, target: &ComplexVector) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(net);
    accumulate(net, trace, target, DerivativeForm::Compatible, &mut grads)?;
    Ok(grads)
}

/// Same recursion as [`backward`] with the derivative factor `conj(f'_CR(z))`.
pub fn cr_variant_delta(net: &Network, trace: &ForwardTrace, target: &ComplexVector) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(net);
    accumulate(net, trace, target, DerivativeForm::CauchyRiemann, &mut grads)?;
    Ok(grads)
}

/// `W <- W - lr * dW`, `b <- b - lr * db`.
pub fn sgd_step(net: &Network, grads: &Gradients, learning_rate: f64) -> Result<Network> {
    grads.matches(net)?;
    let mut next = net.clone();
    for (layer, (gw, gb)) in next
        .layers_mut()
        .iter_mut()
        .zip(grads.weights.iter().zip(&grads.biases))
    {
        let (w, b) = layer.params_mut();
        for (x, g) in w.data_mut().iter_mut().zip(gw.data()) {
            *x -= learning_rate * g;
        }
        for (x, g) in b.iter_mut().zip(gb.iter()) {
            *x -= learning_rate * g;
        }
    }
    Ok(next)
}

fn sample_loss(net: &Network, x0: &ComplexVector, target: &ComplexVector) -> Result<f64> {
    loss(&net.predict(x0)?, target)
}

/// Compares `analytic` against central finite differences of the loss.
///
/// Every real component of every parameter is perturbed by `+-h`; the
/// numerical `dE/d conj(w) = (dE/d re w + i dE/d im w) / 2` is compared to the
/// analytic entry. Returns the largest
/// `|analytic - numerical| / max(|analytic|, |numerical|, 1e-12)`.
pub fn grad_check_against(
    net: &Network,
    x0: &ComplexVector,
    target: &ComplexVector,
    h: f64,
    analytic: &Gradients,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    analytic.matches(net)?;
    let mut probe = net.clone();
    let mut worst = 0.0f64;

    let central = |probe: &mut Network, layer: usize, slot: Slot, delta: Complex64| -> Result<f64> {
        slot.nudge(probe, layer, delta);
        let plus = sample_loss(probe, x0, target);
        slot.nudge(probe, layer, -2.0 * delta);
        let minus = sample_loss(probe, x0, target);
        slot.nudge(probe, layer, delta);
        Ok((plus? - minus?) / (2.0 * h))
    };

    for l in 0..net.layers().len() {
        let n_weights = analytic.weights[l].data().len();
        let n_bias = analytic.biases[l].len();
        let slots = (0..n_weights).map(Slot::Weight).chain((0..n_bias).map(Slot::Bias));
        for slot in slots {
            let d_re = central(&mut probe, l, slot, Complex64::new(h, 0.0))?;
            let d_im = central(&mut probe, l, slot, Complex64::new(0.0, h))?;
            let numerical = Complex64::new(d_re, d_im) / 2.0;
            let a = match slot {
                Slot::Weight(i) => analytic.weights[l].data()[i],
                Slot::Bias(i) => analytic.biases[l][i],
            };
            let denom = a.norm().max(numerical.norm()).max(1e-12);
            worst = worst.max((a - numerical).norm() / denom);
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy)]
enum Slot {
    Weight(usize),
    Bias(usize),
}

impl Slot {
    fn nudge(self, net: &mut Network, layer: usize, delta: Complex64) {
        let (w, b) = net.layers_mut()[layer].params_mut();
        match self {
            Slot::Weight(i) => w.data_mut()[i] += delta,
            Slot::Bias(i) => b[i] += delta,
        }
    }
}

/// Finite-difference check of [`backward`] on one sample.
pub fn grad_check(net: &Network, x0: &ComplexVector, target: &ComplexVector, h: f64) -> Result<f64> {
    let trace = net.forward(x0)?;
    let analytic = backward(net, &trace, target)?;
    grad_check_against(net, x0, target, h, &analytic)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Training stops once the mean loss falls below this value.
    pub loss_floor: f64,
    /// Emit a log line every this many epochs (0 disables).
    pub log_every: usize,
}

impl TrainConfig {
    pub fn new(learning_rate: f64, epochs: usize) -> Self {
        Self {
            learning_rate,
            epochs,
            loss_floor: 0.0,
            log_every: 0,
        }
    }

    pub fn with_loss_floor(mut self, floor: f64) -> Self {
        self.loss_floor = floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if self.loss_floor.is_nan() || self.loss_floor < 0.0 {
            return Err(Error::InvalidParameter("loss floor must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearningCurve {
    pub records: Vec<EpochRecord>,
}

impl LearningCurve {
    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    pub fn first_loss(&self) -> Option<f64> {
        self.records.first().map(|r| r.loss)
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.loss)
    }

    /// CSV with header `epoch,loss,seconds`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "loss", "seconds"])?;
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                format!("{:e}", r.loss),
                format!("{:.6}", r.seconds),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Chunk size of the deterministic reduction; results do not depend on the
/// number of worker threads.
const CHUNK: usize = 32;

/// Mean loss and mean gradient over `samples` at the current parameters.
pub fn batch_gradient<S: Sample + Sync>(net: &Network, samples: &[S]) -> Result<(f64, Gradients)> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no training samples".into()));
    }
    let partials = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grads = Gradients::zeros_like(net);
            let mut total = 0.0;
            for s in chunk {
                let trace = net.forward(s.input())?;
                total += loss(trace.output(), s.target())?;
                accumulate(net, &trace, s.target(), DerivativeForm::Compatible, &mut grads)?;
            }
            Ok((total, grads))
        })
        .collect::<Result<Vec<_>>>()?;
    let (total, mut grads) = pairwise_sum(partials);
    let n = samples.len() as f64;
    grads.scale(1.0 / n);
    Ok((total / n, grads))
}

fn pairwise_sum(mut parts: Vec<(f64, Gradients)>) -> (f64, Gradients) {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some((la, mut ga)) = it.next() {
            match it.next() {
                Some((lb, gb)) => {
                    ga.add_assign(&gb);
                    next.push((la + lb, ga));
                }
                None => next.push((la, ga)),
            }
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

/// Full-batch gradient descent. Each epoch records the mean loss at the
/// current parameters, then applies one step with the mean gradient.
pub fn train<S: Sample + Sync>(net: &Network, samples: &[S], cfg: &TrainConfig) -> Result<(Network, LearningCurve)> {
    cfg.validate()?;
    for s in samples {
        check_len("sample input", net.input_dim(), s.input().len())?;
        check_len("sample target", net.output_dim(), s.target().len())?;
    }
    let start = Instant::now();
    let mut current = net.clone();
    let mut curve = LearningCurve::default();
    for epoch in 1..=cfg.epochs {
        let (mean_loss, grads) = match batch_gradient(&current, samples) {
            Err(Error::NonFinite(_)) => return Err(Error::NonFiniteLoss { epoch }),
            other => other?,
        };
        if !mean_loss.is_finite() || !grads.max_abs().is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        curve.records.push(EpochRecord {
            epoch,
            loss: mean_loss,
            seconds: start.elapsed().as_secs_f64(),
        });
        if cfg.log_every > 0 && epoch % cfg.log_every == 0 {
            log::info!("epoch {epoch}: loss {mean_loss:.6e}");
        }
        if mean_loss < cfg.loss_floor {
            break;
        }
        current = sgd_step(&current, &grads, cfg.learning_rate)?;
    }
    Ok((current, curve))
}

/// Fraction of samples whose largest-modulus output matches the largest
/// target entry.
pub fn classification_accuracy<S: Sample>(net: &Network, samples: &[S]) -> Result<f64> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let argmax = |v: &[Complex64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, z)| {
                if z.norm() > best.1 {
                    (i, z.norm())
                } else {
                    best
                }
            })
            .0
    };
    let mut hits = 0usize;
    for s in samples {
        let out = net.predict(s.input())?;
        if argmax(&out) == argmax(s.target()) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnet::{InitScheme, Initializer, Layer};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_net(w: Complex64, act: ActivationKind) -> Network {
        Network::new(vec![
            Layer::from_weight(ComplexMatrix::from_rows(&[vec![w]]), act).unwrap()
        ])
        .unwrap()
    }

    #[test]
    fn loss_values() {
        assert_eq!(loss(&[c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap(), 0.0);
        assert_eq!(loss(&[c(1.0, 1.0)], &[c(0.0, 0.0)]).unwrap(), 2.0);
        assert!(matches!(
            loss(&[c(1.0, 0.0)], &[]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scalar_identity_gradients() {
        let net = scalar_net(c(1.0, 0.0), ActivationKind::Identity);
        let x = ComplexVector::from_real(&[1.0]);
        let g = backward(&net, &net.forward(&x).unwrap(), &x).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        let g = backward(&net, &net.forward(&x).unwrap(), &ComplexVector::zeros(1)).unwrap();
        assert_eq!(g.weights[0][(0, 0)], c(1.0, 0.0));
        assert_eq!(g.biases[0][0], c(1.0, 0.0));
    }

    #[test]
    fn gradient_uses_conjugated_input() {
        // E = |w x - t|^2, dE/d conj(w) = (w x - t) conj(x).
        let (w, x, t) = (c(0.3, -0.2), c(0.5, 0.9), c(-0.1, 0.4));
        let net = scalar_net(w, ActivationKind::Identity);
        let xv = ComplexVector::new(vec![x]);
        let g = backward(&net, &net.forward(&xv).unwrap(), &ComplexVector::new(vec![t])).unwrap();
        assert!((g.weights[0][(0, 0)] - (w * x - t) * x.conj()).norm() < 1e-15);
    }

    #[test]
    fn sgd_arithmetic() {
        let net = scalar_net(c(2.0, 0.0), ActivationKind::Identity);
        let mut g = Gradients::zeros_like(&net);
        assert_eq!(sgd_step(&net, &g, 0.1).unwrap(), net);
        g.weights[0][(0, 0)] = c(1.0, 0.0);
        assert_eq!(sgd_step(&net, &g, 0.0).unwrap(), net);
        let next = sgd_step(&net, &g, 0.1).unwrap();
        assert!((next.layers()[0].weight()[(0, 0)] - c(1.9, 0.0)).norm() < 1e-15);
        let wide = scalar_net(c(1.0, 0.0), ActivationKind::Tanh);
        let other = Initializer::new(InitScheme::separate(), 0)
            .network(&[2, 1], &[ActivationKind::Tanh])
            .unwrap();
        assert!(sgd_step(&wide, &Gradients::zeros_like(&other), 0.1).is_err());
    }

    #[test]
    fn grad_check_cases() {
        // At an optimum the analytic side is exactly zero and the central
        // difference is pure truncation/rounding noise, far below the 1e-12
        // floor of the relative measure, so both sides are checked absolutely.
        let net = scalar_net(c(0.7, 0.1), ActivationKind::Tanh);
        let x = ComplexVector::new(vec![c(0.2, -0.4)]);
        let at_optimum = net.predict(&x).unwrap();
        assert_eq!(
            backward(&net, &net.forward(&x).unwrap(), &at_optimum)
                .unwrap()
                .max_abs(),
            0.0
        );
        let h = 1e-6;
        for step in [c(h, 0.0), c(0.0, h)] {
            let plus = sample_loss(&scalar_net(c(0.7, 0.1) + step, ActivationKind::Tanh), &x, &at_optimum).unwrap();
            let minus = sample_loss(&scalar_net(c(0.7, 0.1) - step, ActivationKind::Tanh), &x, &at_optimum).unwrap();
            assert!(((plus - minus) / (2.0 * h)).abs() < 1e-8);
        }

        let lin = Initializer::new(InitScheme::separate(), 3)
            .network(&[3, 2], &[ActivationKind::Identity])
            .unwrap();
        let x = ComplexVector::new(vec![c(0.1, 0.2), c(-0.5, 0.3), c(0.9, -0.7)]);
        let t = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, -1.0)]);
        assert!(grad_check(&lin, &x, &t, 1e-6).unwrap() < 1e-7);

        let net = Initializer::new(InitScheme::separate(), 7)
            .network(&[4, 4, 4], &[ActivationKind::Tanh, ActivationKind::Tanh])
            .unwrap();
        let s = &crate::tasks::phase_xor_dataset()[0];
        assert!(grad_check(&net, &s.input, &s.target, 1e-6).unwrap() < 1e-5);
        assert!(grad_check(&net, &s.input, &s.target, 0.0).is_err());
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let net = Initializer::new(InitScheme::separate(), 2)
            .network(&[3, 3], &[ActivationKind::Sigmoid])
            .unwrap();
        let x = ComplexVector::new(vec![c(0.4, 0.1), c(-0.2, 0.3), c(0.0, 1.0)]);
        let t = ComplexVector::from_real(&[1.0, 0.0, 0.5]);
        let mut g = backward(&net, &net.forward(&x).unwrap(), &t).unwrap();
        g.scale(-1.0);
        assert!(grad_check_against(&net, &x, &t, 1e-6, &g).unwrap() > 1.0);
    }

    #[test]
    fn identity_cr_variant_is_bitwise_equal() {
        let net = Initializer::new(InitScheme::separate(), 11)
            .network(&[3, 4, 2], &[ActivationKind::Identity, ActivationKind::Identity])
            .unwrap();
        let x = ComplexVector::new(vec![c(0.3, 0.3), c(1.0, -2.0), c(0.0, 0.5)]);
        let t = ComplexVector::from_real(&[1.0, -1.0]);
        let trace = net.forward(&x).unwrap();
        assert_eq!(
            backward(&net, &trace, &t).unwrap(),
            cr_variant_delta(&net, &trace, &t).unwrap()
        );
    }

    #[test]
    fn optimal_net_stays_at_zero() {
        let net = scalar_net(c(1.0, 0.0), ActivationKind::Identity);
        let x = ComplexVector::new(vec![c(0.3, 0.4)]);
        let (_, curve) = train(&net, &[(x.clone(), x)], &TrainConfig::new(0.5, 10)).unwrap();
        assert_eq!(curve.records.len(), 10);
        assert!(curve.losses().iter().all(|&l| l == 0.0));
    }

    #[test]
    fn convex_problem_descends_every_epoch() {
        let truth = Initializer::new(InitScheme::separate(), 21)
            .network(&[3, 3], &[ActivationKind::Identity])
            .unwrap();
        let start = Initializer::new(InitScheme::separate(), 22)
            .network(&[3, 3], &[ActivationKind::Identity])
            .unwrap();
        let data: Vec<_> = (0..6)
            .map(|k| {
                let x: ComplexVector = (0..3).map(|j| Complex64::from_polar(1.0, (k * 3 + j) as f64)).collect();
                let y = truth.predict(&x).unwrap();
                (x, y)
            })
            .collect();
        let (_, curve) = train(&start, &data, &TrainConfig::new(0.05, 200)).unwrap();
        let l = curve.losses();
        assert!(l.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn loss_floor_stops_early() {
        let net = scalar_net(c(0.0, 0.0), ActivationKind::Identity);
        let data = [(ComplexVector::from_real(&[1.0]), ComplexVector::from_real(&[1.0]))];
        let (_, curve) = train(&net, &data, &TrainConfig::new(0.4, 1000).with_loss_floor(1e-6)).unwrap();
        assert!(curve.records.len() < 1000);
        assert!(curve.final_loss().unwrap() < 1e-6);
    }

    #[test]
    fn divergence_is_reported() {
        let net = Initializer::new(InitScheme::separate(), 1)
            .network(&[4, 4, 4], &[ActivationKind::Tanh, ActivationKind::Identity])
            .unwrap();
        let data = crate::tasks::phase_xor_dataset();
        let err = train(&net, &data, &TrainConfig::new(1e9, 100)).unwrap_err();
        assert!(
            matches!(err, Error::NonFiniteLoss { .. } | Error::PoleProximity { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::new(0.0, 1).validate().is_err());
        assert!(TrainConfig::new(f64::NAN, 1).validate().is_err());
        assert!(TrainConfig::new(0.1, 0).validate().is_err());
        assert!(TrainConfig::new(0.1, 1).with_loss_floor(-1.0).validate().is_err());
        assert!(TrainConfig::new(0.1, 1).validate().is_ok());
    }

    #[test]
    fn batch_gradient_matches_sequential_mean() {
        let net = Initializer::new(InitScheme::separate(), 5)
            .network(&[2, 3, 2], &[ActivationKind::Tanh, ActivationKind::Sigmoid])
            .unwrap();
        let data: Vec<_> = (0..75)
            .map(|k| {
                let x = ComplexVector::from_polar(0.5, &[k as f64 * 0.1, k as f64 * -0.3]);
                let t = ComplexVector::from_real(&[(k % 2) as f64, 0.5]);
                (x, t)
            })
            .collect();
        let (mean, g) = batch_gradient(&net, &data).unwrap();
        let mut seq = Gradients::zeros_like(&net);
        let mut total = 0.0;
        for (x, t) in &data {
            let trace = net.forward(x).unwrap();
            total += loss(trace.output(), t).unwrap();
            seq.add_assign(&backward(&net, &trace, t).unwrap());
        }
        seq.scale(1.0 / data.len() as f64);
        assert!((mean - total / data.len() as f64).abs() < 1e-14);
        assert!(g.max_abs_diff(&seq) < 1e-14);
        assert!(batch_gradient::<(ComplexVector, ComplexVector)>(&net, &[]).is_err());
    }

    #[test]
    fn curve_csv() {
        let curve = LearningCurve {
            records: vec![
                EpochRecord {
                    epoch: 1,
                    loss: 0.5,
                    seconds: 0.25,
                },
                EpochRecord {
                    epoch: 2,
                    loss: 1e-3,
                    seconds: 0.5,
                },
            ],
        };
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "epoch,loss,seconds\n1,5e-1,0.250000\n2,1e-3,0.500000\n"
        );
        assert_eq!(curve.first_loss(), Some(0.5));
        assert_eq!(curve.final_loss(), Some(1e-3));
    }

    #[test]
    fn accuracy_of_constant_net() {
        // Zero weights with a bias favouring class 2: every prediction is 2.
        let w = ComplexMatrix::zeros(3, 2);
        let bias = ComplexVector::from_real(&[0.1, 0.2, 0.9]);
        let net = Network::new(vec![Layer::new(w, bias, ActivationKind::Identity).unwrap()]).unwrap();
        let onehot = |k: usize| {
            let mut v = [0.0; 3];
            v[k] = 1.0;
            ComplexVector::from_real(&v)
        };
        let data: Vec<_> = [2, 2, 0, 2, 1]
            .iter()
            .map(|&k| (ComplexVector::from_real(&[1.0, 0.0]), onehot(k)))
            .collect();
        assert!((classification_accuracy(&net, &data).unwrap() - 0.6).abs() < 1e-15);
        let same: Vec<_> = (0..4)
            .map(|_| (ComplexVector::from_real(&[0.0, 1.0]), onehot(2)))
            .collect();
        assert_eq!(classification_accuracy(&net, &same).unwrap(), 1.0);
    }
}
