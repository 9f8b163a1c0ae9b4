//! Flat invariants of the Clifford torus: W = 8π², area 4√2π², the three
//! slice integrals of 1/(√2 + cos φ), and spectral convergence of W.

use std::f64::consts::{PI, SQRT_2, TAU};

use willmore::metric::MetricModel;
use willmore::report::slice_integral;
use willmore::surface::{area, build_clifford_torus, fundamental_forms, hawking_mass, willmore_energy};

fn main() -> willmore::Result<()> {
    let flat = MetricModel::euclidean();
    println!("{:>5} {:>22} {:>22}", "n", "W - 8pi^2", "area - 4sqrt2 pi^2");
    for n in [8, 16, 32, 64] {
        let forms = fundamental_forms(&build_clifford_torus(n, n)?, &flat)?;
        println!(
            "{n:>5} {:>22.3e} {:>22.3e}",
            willmore_energy(&forms) - 8.0 * PI * PI,
            area(&forms) - 4.0 * SQRT_2 * PI * PI
        );
    }

    let grid = build_clifford_torus(64, 64)?;
    println!("\nslice integrals over phi:");
    let cases: [(&str, fn(f64) -> f64, f64); 3] = [
        ("1/(sqrt2+cos)", |_| 1.0, TAU),
        ("cos/(sqrt2+cos)", f64::cos, TAU - 2.0 * SQRT_2 * PI),
        ("cos^2/(sqrt2+cos)", |p| p.cos().powi(2), 2.0 * TAU - 2.0 * SQRT_2 * PI),
    ];
    for (name, f, want) in cases {
        let v = slice_integral(&grid, f)?;
        println!("  {name:<20} {v:.15} (exact {want:.15})");
    }

    let forms = fundamental_forms(&grid, &flat)?;
    println!("\nHawking mass of the flat Clifford torus: {:.6}", hawking_mass(&forms));
    Ok(())
}
