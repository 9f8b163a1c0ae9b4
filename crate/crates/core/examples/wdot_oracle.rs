//! First-order change of W under δ + t·⅓R x x on R𝕋: the three steps by
//! quadrature against their closed forms, and the finite-difference route.

use nalgebra::{Matrix3, Rotation3};

use willmore::metric::CurvatureData;
use willmore::variational::{wdot_closed_form, wdot_finite_difference, wdot_quadrature};

fn main() -> willmore::Result<()> {
    let curv = CurvatureData::from_ricci(Matrix3::new(1.0, 0.2, -0.3, 0.2, -0.5, 0.4, -0.3, 0.4, 2.0));
    for rot in [Rotation3::identity(), Rotation3::from_euler_angles(0.3, -1.1, 2.0)] {
        let q = wdot_quadrature(&curv, &rot)?;
        let f = wdot_closed_form(&curv, &rot);
        println!("axis {:?}", (rot * nalgebra::Vector3::z()).as_slice());
        println!("  {:<18} {:>18} {:>18}", "", "quadrature", "closed form");
        for (name, a, b) in [
            ("normal derivative", q.normal_derivative, f.normal_derivative),
            ("mixed", q.mixed, f.mixed),
            ("tangential", q.tangential, f.tangential),
            ("total", q.total, f.total),
        ] {
            println!("  {name:<18} {a:18.12} {b:18.12}");
        }
        println!("  finite difference  {:18.12}", wdot_finite_difference(&curv, &rot, 1e-3, 32)?);
    }
    Ok(())
}
