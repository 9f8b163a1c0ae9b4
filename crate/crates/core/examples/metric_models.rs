//! Ambient models: curvature at a point, the exponential map, and W of a
//! small torus under each metric.

use nalgebra::{Matrix3, Rotation3, Vector3};

use willmore::metric::{synthetic_curvature, MetricModel};
use willmore::mobius::MobiusParam;
use willmore::placement::placed_surface;
use willmore::surface::{fundamental_forms, willmore_energy};

fn main() -> willmore::Result<()> {
    let p = Vector3::new(0.7, 0.0, 0.0);
    let models = [
        ("synthetic diag(1,2,3)", MetricModel::normal_expansion(synthetic_curvature([1.0, 2.0, 3.0], &Rotation3::identity()), 1.0), Vector3::zeros()),
        ("schwarzschild m=1", MetricModel::schwarzschild(1.0), p),
        ("constant curvature K=1", MetricModel::constant_curvature(1.0), p),
    ];
    for (name, model, at) in &models {
        let c = model.curvature_at(*at)?;
        println!("{name}: Sc = {:.6}, Ricci eigenvalues {:?}", c.sc, c.ricci_eigenvalues().map(|v| (v * 1e6).round() / 1e6));
    }

    // exp map stays close to the straight line for short vectors
    let s = MetricModel::schwarzschild(1.0).with_epsilon(0.05);
    let y = p / 0.05;
    let frame: Matrix3<f64> = s.default_frame(y)?;
    let end = s.exp_map(y, &frame, Vector3::new(0.0, 1.0, 0.0))?;
    println!("\nexp map in the blown-up Schwarzschild chart: {:?}", (end - y).as_slice());

    println!("\nW of the eps = 0.05 torus at the base point:");
    for (name, model, at) in &models {
        let m = model.with_epsilon(0.05);
        let g = placed_surface(&m, *at, &MobiusParam::identity(), 48)?;
        println!("  {name:<24} {:.8}", willmore_energy(&fundamental_forms(&g, &m)?));
    }
    Ok(())
}
