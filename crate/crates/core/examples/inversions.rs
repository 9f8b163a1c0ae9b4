//! Conformal invariance: W of sphere inversions of the Clifford torus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::Vector3;
use std::f64::consts::PI;

use willmore::metric::MetricModel;
use willmore::mobius::InversionSpec;
use willmore::surface::{area, build_clifford_torus, fundamental_forms, willmore_energy};

fn main() -> willmore::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let flat = MetricModel::euclidean();
    println!("{:>28} {:>7} {:>5} {:>12} {:>12}", "centre", "radius", "n", "area", "W/8pi^2 - 1");
    for _ in 0..8 {
        let c = Vector3::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(2.0..4.0));
        let spec = InversionSpec::new(c, rng.random_range(0.5..3.0))?;
        // the closer the centre, the finer the grid needed
        for n in [64, 128] {
            let g = build_clifford_torus(n, n)?.map(|x| spec.jet(x))?;
            let forms = fundamental_forms(&g, &flat)?;
            println!(
                "({:7.3},{:7.3},{:7.3}) {:7.3} {n:>5} {:12.5} {:12.3e}",
                c.x,
                c.y,
                c.z,
                spec.radius,
                area(&forms),
                willmore_energy(&forms) / (8.0 * PI * PI) - 1.0
            );
        }
    }
    Ok(())
}
