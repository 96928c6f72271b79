//! Finite element discretisation of the Jacobi and energy index forms and
//! their generalised eigenproblems.

pub mod assembly;
pub mod eigen;
pub mod heat;
pub mod mesh;
pub mod sparse;

pub use mesh::{triangle_rule, BoundaryEdge, FeMesh, LinearBasis, Triangle};
pub use sparse::{BandLdlt, CsrMatrix, TripletBuilder};
pub use assembly::{
    assemble_q, assemble_q_with, assemble_qe, assemble_qe_with, robin_coefficient, AssembledForm,
    DofMap, FormKind, QOptions, QeVariant,
};
pub use eigen::{
    constrained_index, count_below, default_tol_null, eigs, eigs_with, morse_index,
    volume_wetting_constraints, EigOptions, EigRequest, MorseReport, SpectrumReport, DENSE_CEILING,
};
pub use heat::{counting_check, heat_trace, CountingCheck, HeatTrace};
