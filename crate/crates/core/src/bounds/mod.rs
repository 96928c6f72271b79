//! Topological counts, the explicit index bound, the Sobolev inequality and
//! the normal extension of `N`.

pub mod extension;
pub mod index_bound;
pub mod sobolev;
pub mod topology;

pub use extension::{extension_field, normal_extension, CutoffProfile, ExtensionRecord};
pub use index_bound::{
    golden_min, index_bound, profile_minimum, profile_minimum_numeric, trace_profile, BoundInputs,
    BoundRecord,
};
pub use sobolev::{sobolev_check, SobolevRecord};
pub use topology::{maslov_index, topological_r, RCase, TopologicalR, TopologySignature};
