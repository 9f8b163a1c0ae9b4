//! Periodic surface grids, spectral derivatives and fundamental forms.

pub mod forms;
pub mod grid;
pub mod spectral;

pub use forms::{area, fundamental_forms, hawking_mass, integrate, willmore_energy, FormsField};
pub use grid::{
    build_clifford_torus, build_sphere, clifford_point, clustered_clifford_torus, JetPoint, MapJet,
    ScalarField, SurfaceGrid,
};
pub use spectral::{FourierBasis, Spectral};

/// Trigonometric-interpolation derivatives (∂_φ f, ∂_θ f) of a periodic field.
pub fn spectral_gradient(field: &ScalarField) -> crate::error::Result<(ScalarField, ScalarField)> {
    let s = Spectral::new(field.n_phi, field.n_theta)?;
    let (du, dv) = s.gradient(&field.values)?;
    let wrap = |values| ScalarField {
        n_phi: field.n_phi,
        n_theta: field.n_theta,
        values,
    };
    Ok((wrap(du), wrap(dv)))
}
