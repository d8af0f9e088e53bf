//! Hardness instances: ONE-IN-THREE 3SAT to quartic forms to cubic gradient
//! fields, the property gadgets built on top of them, and a gallery of named
//! planar systems.

mod cnf;
mod gadget;
mod gallery;
mod quartic;

pub use cnf::{one_in_three_brute_force, parse_cnf, CnfInstance, OneInThree, ENUMERATION_CAP};
pub use gadget::{gadget, obstacle_polytope, Gadget, GadgetBase, GadgetKind, GadgetSet, Halfspace};
pub use gallery::{
    default_lambda, gallery, motzkin, rotation_pair, shifted_motzkin, GalleryEntry, GalleryParams,
    GALLERY_NAMES,
};
pub use quartic::{
    augmented_point, boolean_zero, homogenize_quartic, quartic_to_gradient_field, sat_to_quartic,
    InstanceMetadata, ReductionChain, Stage,
};
