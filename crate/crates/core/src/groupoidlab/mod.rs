//! Explicit groupoids on coordinate charts and numeric checks of the multiplicativity
//! equations: the pair contact groupoid, `Σ ×_r ℝ`, twisted products `G ⋉_c ℝ`, groupoid
//! cochains and the contact groupoid of a vector field.

mod cochain;
mod contact;
mod groupoid;
mod vf;

pub use cochain::{groupoid_cochain_differential, twisted_product, GroupoidCochain};
pub use contact::{
    cocycle_defect, conformal_groupoid, homogeneity_residual, multiplicativity_form, multiplicativity_residual, pair_contact_groupoid,
    symplectization_equivalence, symplectize, times_r_extension, ContactGroupoidData, HomogeneityReport, Multiplicativity,
    Symplectization,
};
pub use groupoid::{pair_groupoid, tuple_chart, ExplicitGroupoid, COMPOSABLE_TOL};
pub use vf::{vf_contact_groupoid, vf_group_inverse, vf_group_product, vf_phi, VfArrow, VfContactGroupoid, VF_COMPOSABLE_TOL};
