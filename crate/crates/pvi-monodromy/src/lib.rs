//! Monodromy data of the 3x3 irregular ODE system attached to Painlevé VI
//! transcendents holomorphic at the critical point x = 0.
//!
//! Pipeline: a Taylor branch y(x) of PVI → the residue matrix Ω(x) of the
//! isomonodromic system dY/dz = (U + Ω/z)Y → its coalescence limit at x = 0 →
//! Stokes matrices, Fuchsian exponents, trace coordinates p_jk and (for the
//! Frobenius-manifold case θ = 0) the central connection matrix. Closed forms
//! are cross-checked by a numerical integration oracle.

pub mod classify;
pub mod frobenius;
pub mod monodromy;
pub mod oracle;
pub mod series;
pub mod specfun;
pub mod util;

pub use util::C64;
