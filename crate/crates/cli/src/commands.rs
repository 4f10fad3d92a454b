use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use coherentnn::backprop::{
    backward, classification_accuracy, cr_variant_delta, grad_check_against, train, LearningCurve, TrainConfig,
};
use coherentnn::cnet::{ActivationKind, InitScheme, Initializer, Network, DEFAULT_HALF_WIDTH};
use coherentnn::photonic::{compile_weight, diffractive_forward, modulation_chain, DiffractionOperator};
use coherentnn::tasks::{
    gen_diffractive_samples, load_mnist, mnist_to_pairs, phase_xor_dataset, real_xor_dataset, DiffractiveKind,
    DiffractiveSampleSpec, SamplePair,
};
use coherentnn::{Complex64, ComplexVector, Error};
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Command, Common, Failure, TrainArgs};

type Outcome = std::result::Result<(), Failure>;

/// Largest allowed deviation of the diffractive chain and mesh reconstruction.
const ROUND_TRIP_TOLERANCE: f64 = 1e-8;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::TrainPhaseXor { common, train } => phase_xor(&common, &train),
        Command::TrainRealXor { common, train } => real_xor(&common, &train),
        Command::TrainDiffractive {
            common,
            train,
            n,
            epsilon,
            samples,
            test,
            kind,
        } => diffractive(&common, &train, n, epsilon, samples, test, &kind),
        Command::TrainMnist {
            common,
            train,
            mnist_images,
            mnist_labels,
            limit,
        } => mnist(&common, &train, &mnist_images, &mnist_labels, limit),
        Command::Gradcheck {
            common,
            nets,
            h,
            corrupt_sign,
            activation,
        } => gradcheck(&common, nets, h, corrupt_sign, activation),
        Command::MziCompile {
            common,
            model,
            layer,
            tag,
        } => mzi_compile(&common, &model, layer, tag),
        Command::DumpOperator { common, n, epsilon } => dump_operator(&common, n, epsilon),
    }
}

fn output_dir(common: &Common) -> std::result::Result<PathBuf, Failure> {
    fs::create_dir_all(&common.out).map_err(|e| Failure::Config(format!("{}: {e}", common.out.display())))?;
    Ok(common.out.clone())
}

/// Per-experiment defaults for the training flags.
struct Defaults {
    activation: ActivationKind,
    output: Option<ActivationKind>,
    inits: &'static [&'static str],
    half_width: f64,
    lr: f64,
    epochs: usize,
    loss_floor: f64,
    widths: Vec<usize>,
}

struct Plan {
    activations: Vec<ActivationKind>,
    schemes: Vec<InitScheme>,
    widths: Vec<usize>,
    cfg: TrainConfig,
    loss_floor: f64,
}

impl Plan {
    fn resolve(args: &TrainArgs, d: Defaults) -> std::result::Result<Self, Failure> {
        let hidden = args.activation.unwrap_or(d.activation);
        let output = args.output_activation.or(d.output).unwrap_or(hidden);
        let widths = if args.widths.is_empty() {
            d.widths
        } else {
            args.widths.clone()
        };
        if widths.len() < 2 {
            return Err(Failure::Config(
                "--widths needs at least an input and an output width".into(),
            ));
        }
        let depth = widths.len() - 1;
        let activations = (0..depth)
            .map(|l| if l + 1 == depth { output } else { hidden })
            .collect();
        let half_width = args.half_width.unwrap_or(d.half_width);
        let names: Vec<&str> = if args.init.is_empty() {
            d.inits.to_vec()
        } else {
            args.init.iter().map(String::as_str).collect()
        };
        let schemes = names
            .iter()
            .map(|n| InitScheme::from_name(n, half_width))
            .collect::<coherentnn::Result<Vec<_>>>()?;
        let cfg = TrainConfig::new(args.lr.unwrap_or(d.lr), args.epochs.unwrap_or(d.epochs));
        cfg.validate()?;
        let loss_floor = args.loss_floor.unwrap_or(d.loss_floor);
        if loss_floor.is_nan() || loss_floor < 0.0 {
            return Err(Failure::Config("--loss-floor must be non-negative".into()));
        }
        Ok(Self {
            activations,
            schemes,
            widths,
            cfg,
            loss_floor,
        })
    }

    fn tag(&self, base: &str, scheme: &InitScheme) -> String {
        if self.schemes.len() > 1 {
            format!("{base}_{}", scheme.name())
        } else {
            base.to_string()
        }
    }
}

struct Run {
    tag: String,
    net: Network,
    curve: LearningCurve,
}

/// Trains once per scheme and writes `curve_<tag>.csv` and `model_<tag>.json`.
fn train_all(
    plan: &Plan,
    samples: &[SamplePair],
    base: &str,
    seed: u64,
    out: &Path,
) -> std::result::Result<Vec<Run>, Failure> {
    let mut runs = Vec::new();
    for scheme in &plan.schemes {
        let tag = plan.tag(base, scheme);
        let net = Initializer::new(*scheme, seed).network(&plan.widths, &plan.activations)?;
        let (net, curve) = train(&net, samples, &plan.cfg)?;
        curve.save_csv(out.join(format!("curve_{tag}.csv")))?;
        net.save(out.join(format!("model_{tag}.json")))?;
        println!(
            "{tag}: epochs {} first loss {:.6e} final loss {:.6e}",
            curve.records.len(),
            curve.first_loss().unwrap_or(f64::NAN),
            curve.final_loss().unwrap_or(f64::NAN)
        );
        runs.push(Run { tag, net, curve });
    }
    Ok(runs)
}

fn check_floor(runs: &[Run], floor: f64) -> Outcome {
    let missed: Vec<&str> = runs
        .iter()
        .filter(|r| r.curve.final_loss().is_none_or(|l| l.is_nan() || l >= floor))
        .map(|r| r.tag.as_str())
        .collect();
    if missed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "loss floor {floor:e} not reached by {}",
            missed.join(", ")
        )))
    }
}

fn phase_xor(common: &Common, args: &TrainArgs) -> Outcome {
    let plan = Plan::resolve(
        args,
        Defaults {
            activation: ActivationKind::Tanh,
            output: Some(ActivationKind::Identity),
            inits: &["separate"],
            half_width: DEFAULT_HALF_WIDTH,
            lr: 0.1,
            epochs: 500,
            loss_floor: 1e-2,
            widths: vec![4, 4, 4],
        },
    )?;
    let out = output_dir(common)?;
    let runs = train_all(&plan, &phase_xor_dataset(), "phase_xor", common.seed, &out)?;
    check_floor(&runs, plan.loss_floor)
}

/// `max_k | |y_k|^2 - t_k |` over all samples.
fn intensity_error(net: &Network, samples: &[SamplePair]) -> coherentnn::Result<f64> {
    let mut worst = 0.0f64;
    for s in samples {
        let y = net.predict(&s.input)?;
        for (yk, tk) in y.iter().zip(s.target.iter()) {
            worst = worst.max((yk.norm_sqr() - tk.norm()).abs());
        }
    }
    Ok(worst)
}

fn real_xor(common: &Common, args: &TrainArgs) -> Outcome {
    let plan = Plan::resolve(
        args,
        Defaults {
            activation: ActivationKind::Tanh,
            output: Some(ActivationKind::Identity),
            inits: &["phase", "separate", "mirror", "imag"],
            half_width: DEFAULT_HALF_WIDTH,
            lr: 0.1,
            epochs: 2000,
            loss_floor: 1e-2,
            widths: vec![4, 4, 4],
        },
    )?;
    let out = output_dir(common)?;
    let data = real_xor_dataset();
    let runs = train_all(&plan, &data, "real_xor", common.seed, &out)?;
    for r in &runs {
        println!("{}: max intensity error {:.6e}", r.tag, intensity_error(&r.net, &data)?);
    }
    check_floor(&runs, plan.loss_floor)
}

fn diffractive_samples(
    kind: &str,
    n: usize,
    count: usize,
    seed: u64,
    op: &DiffractionOperator,
) -> std::result::Result<Vec<SamplePair>, Failure> {
    let kinds: Vec<DiffractiveKind> = match kind {
        "mixed" => DiffractiveKind::ALL.to_vec(),
        name => vec![DiffractiveKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Failure::Config(format!("unknown sample kind {name:?}")))?],
    };
    let mut samples = Vec::with_capacity(count);
    for (i, k) in kinds.iter().enumerate() {
        let share = count / kinds.len() + usize::from(i < count % kinds.len());
        let spec = DiffractiveSampleSpec::new(*k, n, seed.wrapping_add(i as u64))?;
        samples.extend(gen_diffractive_samples(&spec, share, op)?);
    }
    Ok(samples)
}

fn diffractive(
    common: &Common,
    args: &TrainArgs,
    n: usize,
    epsilon: f64,
    count: usize,
    test: usize,
    kind: &str,
) -> Outcome {
    let op = Arc::new(DiffractionOperator::new(n, epsilon)?);
    let plan = Plan::resolve(
        args,
        Defaults {
            activation: ActivationKind::Tanh,
            output: None,
            inits: &["separate"],
            half_width: DEFAULT_HALF_WIDTH,
            lr: 0.1,
            epochs: 50,
            loss_floor: f64::INFINITY,
            widths: vec![n, n, n],
        },
    )?;
    if plan.widths.iter().any(|&w| w != n) {
        return Err(Failure::Config(format!("every width must equal --n {n}")));
    }
    let out = output_dir(common)?;
    let base = common.seed.wrapping_mul(16);
    let train_set = diffractive_samples(kind, n, count, base, &op)?;
    let test_set = diffractive_samples(kind, n, test, base.wrapping_add(8), &op)?;
    let runs = train_all(&plan, &train_set, "diffractive", common.seed, &out)?;
    let mut failed = false;
    for r in &runs {
        let (mut worst, mut excluded) = (0.0f64, 0usize);
        for s in &test_set {
            let layers = match modulation_chain(&r.net, &op, &s.input) {
                Err(Error::NearZeroDivisor { .. }) => {
                    excluded += 1;
                    continue;
                }
                other => other?,
            };
            let optical = diffractive_forward(&layers, &s.input)?;
            worst = worst.max(optical.max_abs_diff(&r.net.predict(&s.input)?));
        }
        println!(
            "{}: modulation round trip max deviation {worst:.3e} over {} inputs ({excluded} excluded)",
            r.tag,
            test_set.len() - excluded
        );
        failed |= worst.is_nan() || worst >= ROUND_TRIP_TOLERANCE;
    }
    if failed {
        return Err(Failure::Numerical("diffractive round trip exceeded tolerance".into()));
    }
    check_floor(&runs, plan.loss_floor)
}

fn mnist(common: &Common, args: &TrainArgs, images: &Path, labels: &Path, limit: usize) -> Outcome {
    let plan = Plan::resolve(
        args,
        Defaults {
            activation: ActivationKind::Tanh,
            output: Some(ActivationKind::Sigmoid),
            inits: &["separate", "mirror", "imag"],
            half_width: 0.1,
            lr: 2.0,
            epochs: 30,
            loss_floor: f64::INFINITY,
            widths: vec![784, 32, 10],
        },
    )?;
    let set = load_mnist(images, labels)?;
    let samples = mnist_to_pairs(&set, limit)?;
    let out = output_dir(common)?;
    let runs = train_all(&plan, &samples, "mnist", common.seed, &out)?;
    for r in &runs {
        for rec in &r.curve.records {
            println!("{} epoch {} loss {:.6e}", r.tag, rec.epoch, rec.loss);
        }
        println!(
            "{}: training accuracy {:.4}",
            r.tag,
            classification_accuracy(&r.net, &samples)?
        );
    }
    check_floor(&runs, plan.loss_floor)
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize, radius: f64) -> ComplexVector {
    let u = Uniform::new_inclusive(-radius, radius);
    (0..len).map(|_| Complex64::new(u.sample(rng), u.sample(rng))).collect()
}

fn gradcheck(common: &Common, nets: usize, h: f64, corrupt: bool, only: Option<ActivationKind>) -> Outcome {
    if nets == 0 {
        return Err(Failure::Config("--nets must be at least 1".into()));
    }
    let kinds: Vec<ActivationKind> = only.map_or_else(|| ActivationKind::ALL.to_vec(), |k| vec![k]);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut ok = true;
    for kind in kinds {
        let threshold = if kind == ActivationKind::Identity { 1e-7 } else { 1e-5 };
        let (mut worst_fd, mut worst_cr) = (0.0f64, 0.0f64);
        for _ in 0..nets {
            let depth = rng.gen_range(1..=3);
            let widths: Vec<usize> = (0..=depth).map(|_| rng.gen_range(1..=8)).collect();
            let net = Initializer::new(InitScheme::separate(), rng.gen()).network(&widths, &vec![kind; depth])?;
            let x = random_vector(&mut rng, widths[0], 1.0);
            let t = random_vector(&mut rng, widths[depth], 1.0);
            let trace = net.forward(&x)?;
            let mut g = backward(&net, &trace, &t)?;
            worst_cr = worst_cr.max(g.max_abs_diff(&cr_variant_delta(&net, &trace, &t)?));
            if corrupt {
                g.scale(-1.0);
            }
            worst_fd = worst_fd.max(grad_check_against(&net, &x, &t, h, &g)?);
        }
        let pass = worst_fd < threshold && worst_cr < 1e-12;
        println!(
            "{}: {nets} nets, worst relative error {worst_fd:.3e} (limit {threshold:e}), worst C-R gap {worst_cr:.3e} {}",
            kind.name(),
            if pass { "ok" } else { "FAILED" }
        );
        ok &= pass;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical("gradient check exceeded tolerance".into()))
    }
}

fn mzi_compile(common: &Common, model: &Path, layer: usize, tag: Option<String>) -> Outcome {
    let net = Network::load(model)?;
    let l = net.layers().get(layer).ok_or_else(|| {
        Failure::Config(format!(
            "layer {layer} out of range; model has {} layers",
            net.layers().len()
        ))
    })?;
    let compiled = compile_weight(l.weight())?;
    let out = output_dir(common)?;
    let tag = tag.unwrap_or_else(|| format!("layer{layer}"));
    compiled.decomposition.save(out.join(format!("mesh_{tag}.json")))?;
    println!(
        "{tag}: {} ports, {} MZIs, projection distance {:.6e}, reconstruction error {:.3e}",
        compiled.decomposition.mesh.ports(),
        compiled.decomposition.mesh.unit_count(),
        compiled.projection_distance,
        compiled.reconstruction_error
    );
    if compiled.reconstruction_error < ROUND_TRIP_TOLERANCE {
        Ok(())
    } else {
        Err(Failure::Numerical("mesh reconstruction exceeded tolerance".into()))
    }
}

fn dump_operator(common: &Common, n: usize, epsilon: f64) -> Outcome {
    let op = DiffractionOperator::new(n, epsilon)?;
    let out = output_dir(common)?;
    let path = out.join(format!("op_N{n}_e{epsilon}.csv"));
    op.save_csv(&path)?;
    println!(
        "{}: unitarity defect {:.3e}",
        path.display(),
        op.matrix().unitarity_defect()
    );
    Ok(())
}
