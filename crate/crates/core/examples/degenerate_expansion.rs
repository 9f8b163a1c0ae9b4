//! Degenerating tori: (W − 8π²)/ε² approaches −(8√2/3)π²Sc as |ω| → 1.

use nalgebra::{Matrix3, UnitQuaternion, Vector3};

use willmore::metric::{CurvatureData, MetricModel};
use willmore::reduction::{degenerate_expansion_fit, Ambient, Resolution};

fn main() -> willmore::Result<()> {
    let shape = Matrix3::from_diagonal(&Vector3::new(0.1, 0.1, -0.2));
    for (label, ric) in [("Sc = 1", Matrix3::identity() / 3.0 + shape), ("Sc = 0", shape)] {
        let ambient = Ambient::Global(MetricModel::normal_expansion(CurvatureData::from_ricci(ric), 1.0));
        let d = degenerate_expansion_fit(
            &ambient,
            Vector3::zeros(),
            UnitQuaternion::identity(),
            &[0.5, 0.8, 0.9, 0.95, 0.99],
            0.05,
            Resolution::Adaptive { start: 32, tol: 1e-9, cap: 512 },
        )?;
        println!("{label}: target {:.5}", d.target);
        for r in &d.rows {
            println!(
                "  |w| {:4.2}  quotient {:10.5}  deviation {:.2e}  extrapolated deviation {:.2e}  n {}",
                r.modulus, r.value, r.deviation, r.extrapolated_deviation, r.n
            );
        }
    }
    Ok(())
}
