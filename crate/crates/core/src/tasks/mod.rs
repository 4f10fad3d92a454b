//! Datasets used by the experiments.

mod diffractive;
mod mnist;
mod samples;
mod xor;

pub use diffractive::{gen_diffractive_samples, DiffractiveKind, DiffractiveSampleSpec};
pub use mnist::{
    load_mnist, mnist_to_pairs, read_idx_images, read_idx_labels, write_idx_images, write_idx_labels, MnistSet,
    IMAGE_MAGIC, LABEL_MAGIC,
};
pub use samples::{load_samples, save_samples, DatasetManifest, SamplePair};
pub use xor::{phase_xor_dataset, real_xor_dataset, PHASE_XOR_AMPLITUDES};
