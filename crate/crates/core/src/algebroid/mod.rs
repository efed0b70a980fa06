//! Lie algebroids in coordinates: cotangent and Jacobi algebroids, cochains, paths and homotopies.

mod cochain;
mod homotopy;
mod paths;
mod structure;
mod translate;

pub use cochain::{action_extension, algebroid_differential, check_cocycle, reeb_cocycle, AlgebroidCochain};
pub use homotopy::{
    homotopy_transport, leaf_area_via_transport, swept_area_via_transport, FamilyOptions, HomotopyFamily, Transport,
};
pub use paths::{apath_from_fiber, apath_from_fn, cocycle_integral, concatenate, APath, MIN_GRID};
pub use structure::{cotangent_algebroid, jacobi_algebroid, tangent_algebroid, AlgebroidResiduals, AlgebroidStructure};
pub use translate::PathCorrespondence;

#[cfg(test)]
mod tests;
