use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use proptest::prelude::*;

use willmore::metric::{synthetic_curvature, CurvatureData, MetricModel};
use willmore::mobius::{modulus_of_offset, offset_of_modulus, MobiusParam};
use willmore::reduction::{
    degenerate_target, reduced_energy, symmetric_expansion_fit, Ambient, Resolution, CLIFFORD_ENERGY,
};

fn cheap() -> ProptestConfig {
    ProptestConfig {
        cases: 6,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn flat_energy_is_constant_on_the_family(r in 0.0..0.9f64, t in 0.0..(2.0 * PI), a in -1.0..1.0f64) {
        let param = MobiusParam::new(
            [r * t.cos(), r * t.sin()],
            UnitQuaternion::from_euler_angles(a, 0.5 * a, -a),
        ).unwrap();
        let w = reduced_energy(&Ambient::Global(MetricModel::euclidean()), 1.0, Vector3::zeros(), &param, false, Resolution::Fixed(64))
            .unwrap()
            .energy;
        prop_assert!((w / CLIFFORD_ENERGY - 1.0).abs() < 1e-7, "W = {w}");
    }

    #[test]
    fn energy_is_rotation_covariant(r in 0.0..0.8f64, t in 0.0..(2.0 * PI), a in -PI..PI, b in -1.5..1.5f64) {
        let curv = synthetic_curvature([0.5, 1.0, 2.0], &Rotation3::from_euler_angles(0.2, -0.1, 0.4));
        let q = Rotation3::from_euler_angles(a, b, 0.3);
        let base = UnitQuaternion::from_euler_angles(0.1, 0.7, -0.2);
        let param = MobiusParam::new([r * t.cos(), r * t.sin()], base).unwrap();
        let moved = MobiusParam::new(param.omega, UnitQuaternion::from_rotation_matrix(&q) * base).unwrap();
        let res = Resolution::Fixed(32);
        let w0 = reduced_energy(&Ambient::Global(MetricModel::normal_expansion(curv.clone(), 1.0)), 0.1, Vector3::zeros(), &param, false, res)
            .unwrap()
            .energy;
        let w1 = reduced_energy(&Ambient::Global(MetricModel::normal_expansion(curv.rotated(&q), 1.0)), 0.1, Vector3::zeros(), &moved, false, res)
            .unwrap()
            .energy;
        prop_assert!((w0 - w1).abs() < 1e-9, "{w0} vs {w1}");
    }
}

proptest! {
    #[test]
    fn chart_offset_round_trips(s in 0.01..0.999f64) {
        let back = modulus_of_offset(offset_of_modulus(s));
        prop_assert!((back - s).abs() < 1e-10 * (1.0 + 1.0 / s));
    }
}

#[test]
fn isotropic_symmetric_coefficient_matches_degenerate_target() {
    // with isotropic curvature every member has the same ε² coefficient
    let curv = CurvatureData::from_ricci(Matrix3::identity() * (2.0 / 3.0));
    let ambient = Ambient::Global(MetricModel::normal_expansion(curv.clone(), 1.0));
    let eps = [0.025, 0.05, 0.075, 0.1];
    for axis in [Vector3::z(), Vector3::new(1.0, -2.0, 0.5)] {
        let f = symmetric_expansion_fit(&ambient, Vector3::zeros(), axis, &eps, Resolution::Fixed(48)).unwrap();
        assert!((f.target - degenerate_target(&curv)).abs() < 1e-9 * f.target.abs());
        assert!(f.rel_error < 1e-3, "rel error {}", f.rel_error);
    }
}
