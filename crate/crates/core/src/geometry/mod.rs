//! Chart-based exterior calculus on multivector fields and differential forms.
//!
//! Fields are lazy: each node evaluates its inputs at one jet order higher than requested
//! when it differentiates, so arbitrarily nested operations stay exact to rounding.

mod chart;
pub mod combin;
mod field;
mod ops;
mod smooth_map;

pub use chart::{halton_box, Chart, SAMPLING_CLIP};
pub use field::{JetField, JetFn, Kind, TensorField};
pub use ops::{
    bivector_pair, exterior_derivative, interior, lie_derivative, max_abs_over, max_diff_over, schouten, wedge,
};
pub use smooth_map::SmoothMap;

pub(crate) use field::same_chart;

#[cfg(test)]
mod tests;
