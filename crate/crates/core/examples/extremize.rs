//! Interior minimizer (and maximizer) of the reduced energy over a periodic
//! curvature field, with the boundary margin at |ω| = r_b.

use std::f64::consts::PI;

use willmore::reduction::{extremize, Ambient, CurvatureField, Domain, ExtremizeOptions, Mode, CLIFFORD_ENERGY};
use willmore::report::default_starts;

fn main() -> willmore::Result<()> {
    let ambient = Ambient::Field {
        field: CurvatureField::Modulated { sc_mean: 2.0, sc_amp: 1.0, aniso_mean: 0.2, aniso_amp: 0.1 },
        rho0: 1.0,
    };
    let eps = 0.05;
    for mode in [Mode::Min, Mode::Max] {
        for r_b in [0.9, 0.95] {
            let domain = Domain::Chart { boundary_points: vec![[PI / 2.0, 0.0, 0.0], [PI, 0.0, 0.0]] };
            let opts = ExtremizeOptions {
                mode,
                starts: default_starts(&domain),
                domain,
                r_boundary: r_b,
                grid: 48,
                max_evals: 600,
                f_tol: 1e-10,
                certify: r_b == 0.9,
            };
            let r = extremize(&ambient, eps, &opts)?;
            println!(
                "{mode:?} r_b {r_b}: P1 {:.4}, axis {:?}, |w| {:.1e}, coefficient {:.4}, margin {:.3e}, interior {}",
                r.point.p[0],
                r.point.axis.map(|a| (a * 1e3).round() / 1e3),
                r.point.omega[0].hypot(r.point.omega[1]),
                (r.point.energy - CLIFFORD_ENERGY) / (eps * eps),
                r.margin,
                r.interior
            );
            if let (Some(b), Some(w)) = (r.multiplier_max, r.corrected_energy) {
                println!("    corrector at the optimum: max |beta_i| {b:.2e}, corrected energy {w:.8}");
            }
        }
    }
    Ok(())
}
