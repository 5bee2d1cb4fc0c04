//! Exact polyhedral reasoning over clocks and parameters.
//!
//! Zones are conjunctions of linear inequalities with rational coefficients,
//! decided and projected by Fourier–Motzkin elimination with strictness
//! tracking. Parameter regions are finite unions of such zones.

mod linear;
mod region;
mod render;
mod zone;

pub use linear::{Ineq, LinTerm};
pub use region::ParamRegion;
pub use render::Names;
pub use zone::PZone;

/// Exact satisfiability of a raw constraint list (every variable nonnegative is *not* assumed).
pub fn satisfiable(ineqs: &[Ineq]) -> bool {
    linear::feasible(ineqs.to_vec())
}
