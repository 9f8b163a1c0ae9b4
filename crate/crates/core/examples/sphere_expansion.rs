//! Small round spheres through P: W = 16π − (8π/3)Sc r² + O(r³).

use nalgebra::{Matrix3, Vector3};

use willmore::metric::{CurvatureData, MetricModel};
use willmore::reduction::{sphere_expansion_fit, Ambient};

fn main() -> willmore::Result<()> {
    for sc in [1.0, -2.0, 0.0] {
        let ric = Matrix3::from_diagonal(&Vector3::new(0.2, 0.3, 0.5)) * sc;
        let ambient = Ambient::Global(MetricModel::normal_expansion(CurvatureData::from_ricci(ric), 1.0));
        let f = sphere_expansion_fit(&ambient, Vector3::zeros(), Vector3::new(0.3, -0.5, 0.8), &[0.025, 0.05, 0.075, 0.1])?;
        println!("Sc = {sc:4}: c2 = {:10.6}, target {:10.6}, c0 - 16pi = {:.1e}", f.c_lead, f.target, f.c0 - f.expected_c0);
    }
    Ok(())
}
