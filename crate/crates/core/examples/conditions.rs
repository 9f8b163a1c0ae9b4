//! The two curvature conditions on sampled curvature fields, and the
//! normal-plane sectional curvature identity.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};

use willmore::metric::{CurvatureData, MetricModel};
use willmore::reduction::{condition_check, Ambient, CurvatureField};

fn main() -> willmore::Result<()> {
    let points: Vec<Vector3<f64>> = (0..32).map(|k| Vector3::new(TAU * k as f64 / 32.0, 0.0, 0.0)).collect();
    let dirs: Vec<Vector3<f64>> = (0..20)
        .map(|k| Vector3::new((0.7 * k as f64).cos(), (0.7 * k as f64).sin(), (0.3 * k as f64).cos()))
        .collect();
    let cases = [
        ("modulated, min only", Ambient::Field { field: CurvatureField::Modulated { sc_mean: 2.0, sc_amp: 1.0, aniso_mean: 0.1, aniso_amp: 0.1 }, rho0: 1.0 }),
        ("modulated, min and max", Ambient::Field { field: CurvatureField::Modulated { sc_mean: 2.0, sc_amp: 1.0, aniso_mean: 0.2, aniso_amp: 0.1 }, rho0: 1.0 }),
        ("constant diag(1,2,3)", Ambient::Field { field: CurvatureField::Constant(CurvatureData::from_ricci(Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)))), rho0: 1.0 }),
        ("isotropic", Ambient::Field { field: CurvatureField::Constant(CurvatureData::from_ricci(Matrix3::identity())), rho0: 1.0 }),
    ];
    for (name, a) in &cases {
        let r = condition_check(a, &points, &dirs)?;
        println!(
            "{name:<24} min-cond {:.3} > {:.3}: {:5}   max-cond {:.3} < {:.3}: {:5}   identity defect {:.1e}",
            r.lhs1, r.rhs1, r.assump1_holds, r.lhs2, r.rhs2, r.assump2_holds, r.sectional_identity_defect
        );
    }
    let radial: Vec<Vector3<f64>> = [0.3, 0.5, 1.0, 2.0].iter().map(|r| Vector3::new(*r, 0.0, 0.0)).collect();
    let s = condition_check(&Ambient::Global(MetricModel::schwarzschild(1.0)), &radial, &dirs)?;
    println!("schwarzschild            min-cond {:.3} > {:.3}: {}, witness {:?}", s.lhs1, s.rhs1, s.assump1_holds, s.witness1);
    Ok(())
}
