//! Sampling and measurement on the Ledrappier system.
//!
//! Configurations are generated on the upper half-plane from row 0: each row
//! 0 bit is an independent fair coin and row `s + 1` is
//! `a(z1, s + 1) = a(z1, s) ⊕ a(z1 + 1, s)`. This is exactly the projection of
//! Haar measure, so every upper-half-plane cell is a fixed F₂-linear
//! functional of row 0 (see [`cell_functional`]) and every cylinder or
//! character set is an affine condition on row 0.

mod certificate;
mod exact;
mod mc;
mod query;
mod window;

pub use certificate::McCrossCheck;
pub use certificate::{theorem1_certificate, Theorem1Report, Theorem1Row};
pub use exact::exact_cylinder_correlation;
pub use mc::{mc_correlation, mc_correlation_with, McEstimate, CHUNK_SAMPLES};
pub use query::{
    parse_shift, CompiledQuery, CylinderConstraint, Equation, SetSpec, Shift, WindowCap,
};
pub use window::{cell_functional, sample_config, sample_window, ConfigWindow, RowSource};
