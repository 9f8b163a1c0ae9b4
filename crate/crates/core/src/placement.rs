//! Placing the rescaled family torus at a point of the ambient chart.
//!
//! All surfaces live in the blown-up chart y = x/ε of g_ε, where the
//! surface is exp_{P/ε}(F · R T_ω(𝕋)) with F a g_ε-orthonormal frame at P/ε.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::Result;
use crate::metric::{MetricKind, MetricModel};
use crate::mobius::{family_grid, MobiusParam};
use crate::surface::SurfaceGrid;

type V3 = Vector3<f64>;

/// Chart point P/ε corresponding to P.
pub fn blown_up_center(model: &MetricModel, p: V3) -> V3 {
    p / model.epsilon
}

/// Map an already-built grid of R T_ω(𝕋) to the placed surface.
pub fn place_grid(model: &MetricModel, p: V3, grid: &SurfaceGrid) -> Result<SurfaceGrid> {
    let py = blown_up_center(model, p);
    let frame = model.default_frame(py)?;
    let affine = match model.kind {
        MetricKind::Euclidean => true,
        MetricKind::NormalExpansion { .. } => p == V3::zeros(),
        _ => false,
    };
    if affine {
        return Ok(grid.affine(frame, py));
    }
    let positions: Vec<V3> = grid
        .positions
        .par_iter()
        .map(|x| model.exp_map(py, &frame, *x))
        .collect::<Result<_>>()?;
    let mut out = SurfaceGrid::from_positions(grid.n_phi, grid.n_theta, positions)?;
    out.weights = grid.weights.clone();
    Ok(out)
}

/// exp_{P/ε}(F · R T_ω(𝕋)) on an n × n grid adapted to ω.
pub fn placed_surface(model: &MetricModel, p: V3, param: &MobiusParam, n: usize) -> Result<SurfaceGrid> {
    place_grid(model, p, &family_grid(param, n, n)?)
}
