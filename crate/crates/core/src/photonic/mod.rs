//! Optical back-ends: MZI meshes and diffractive layers.

mod diffraction;
mod mzi;
mod unitary;

pub use diffraction::{
    diffraction_distance, diffractive_forward, extract_modulation, modulation_chain, DiffractionOperator,
    DiffractiveLayer, GeometryParams, DIVISION_GUARD,
};
pub use mzi::{
    coupler_block, coupler_matrix, mesh_matrix, mzi_matrix, phase_shifter_block, wrap_phase, Block, MziMesh, MziUnit,
    PlacedUnit,
};
pub use unitary::{
    compile_weight, decompose_unitary, project_to_unitary, singular_values, MeshDecomposition, WeightCompilation,
    RANK_THRESHOLD, UNITARY_TOLERANCE,
};
