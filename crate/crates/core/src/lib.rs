//! Willmore energy of Möbius-transformed Clifford tori in curved 3-manifolds.
//!
//! The crate samples tori on periodic grids, evaluates fundamental forms and
//! the Willmore functional W = ∫H² dσ in arbitrary ambient metrics, and builds
//! on that the perturbative machinery around small symmetric and degenerating
//! tori: curvature expansions of the energy, the linearized Willmore operator
//! and its kernel, a Lyapunov–Schmidt corrector and the reduced energy landscape.
//!
//! Runnable walkthroughs live in `examples/`.

pub mod error;
pub mod metric;
pub mod mobius;
pub mod numerics;
pub mod placement;
pub mod reduction;
pub mod report;
pub mod surface;
pub mod variational;

pub use error::{Error, Result};
