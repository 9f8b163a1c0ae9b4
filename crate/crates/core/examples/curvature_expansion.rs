//! W of small symmetric tori in a curved patch: the ε² coefficient against
//! −4√2π²(Sc − Ric(a, a)) for several torus axes a.

use nalgebra::{Rotation3, Vector3};

use willmore::metric::{synthetic_curvature, MetricModel};
use willmore::reduction::{symmetric_expansion_fit, Ambient, Resolution};

fn main() -> willmore::Result<()> {
    let curv = synthetic_curvature([1.0, 2.0, 3.0], &Rotation3::from_euler_angles(0.3, 0.2, 0.1));
    let ambient = Ambient::Global(MetricModel::normal_expansion(curv, 1.0));
    let eps = [0.025, 0.05, 0.075, 0.1];
    for axis in [Vector3::z(), Vector3::x(), Vector3::new(1.0, 1.0, 0.3)] {
        let f = symmetric_expansion_fit(&ambient, Vector3::zeros(), axis, &eps, Resolution::Fixed(64))?;
        println!(
            "axis {:?}: c2 = {:.4} (cubic {:.4}, quadratic-only {:.4}), target {:.4}, rel error {:.2e}, c0 - 8pi^2 = {:.1e}",
            axis.normalize().as_slice(),
            f.c_lead,
            f.c_lead_cubic,
            f.c_lead_quadratic,
            f.target,
            f.rel_error,
            f.c0 - f.expected_c0
        );
    }
    Ok(())
}
