//! Period groups and integrability deciders for the `M_a` family on ℝ³
//! (`{x², x³} = a x¹` and cyclic, `a = a(|x|)`), plus discreteness and integrality checks
//! of period data.

mod deciders;
mod family;
mod periods;

pub use deciders::{decide_jacobi_integrable, decide_poisson_integrable, limit_at_zero, DeciderOptions, Limit};
pub use family::{
    gap_function, leaf_area_quadrature, leaf_form, ma_monodromy_generators, ma_structure, sphere_chart, symplectic_area, AreaReport,
    MaFamily, MonodromyGenerators,
};
pub use periods::{dim2_periods, discreteness_check, prequantizable_check, LeafDomain, PeriodData};
