//! The area-preserving family T_ω: offsets, the η → 0 limit ratio,
//! energy and area along |ω|, and Hausdorff convergence to the limit sphere.

use std::f64::consts::{PI, SQRT_2};

use willmore::metric::MetricModel;
use willmore::mobius::{
    degeneration_sphere, distortion_ratio, eta_of_modulus, family_grid, hausdorff_family, limit_radius,
    offset_of_modulus, small_radius_offset, MobiusParam,
};
use willmore::surface::{area, fundamental_forms, willmore_energy};

fn main() -> willmore::Result<()> {
    println!("small-radius offsets, eta^2/xi~ -> 2 r0 = {:.8}", 2.0 * limit_radius());
    for eta in [0.4, 0.2, 0.1, 0.05, 0.01] {
        let xt = small_radius_offset(eta)?;
        println!("  eta {eta:5.2}  xi~ {xt:.6e}  eta^2/xi~ {:.6}", eta * eta / xt);
    }

    let flat = MetricModel::euclidean();
    println!("\n{:>6} {:>10} {:>8} {:>12} {:>14} {:>14}", "|w|", "xi~", "eta", "distortion", "W - 8pi^2", "A - 4sqrt2pi^2");
    for s in [0.0, 0.3, 0.6, 0.9, 0.95, 0.99] {
        let p = MobiusParam::along_x(s)?;
        let forms = fundamental_forms(&family_grid(&p, 128, 128)?, &flat)?;
        let (xt, eta) = if s > 0.0 { (offset_of_modulus(s), eta_of_modulus(s)?) } else { (f64::INFINITY, 0.0) };
        println!(
            "{s:6.2} {xt:10.3e} {eta:8.4} {:12.3e} {:14.3e} {:14.3e}",
            distortion_ratio(&p)?,
            willmore_energy(&forms) - 8.0 * PI * PI,
            area(&forms) - 4.0 * SQRT_2 * PI * PI
        );
    }

    let (c, r) = degeneration_sphere([1.0, 0.0])?;
    println!("\nHausdorff distance to the sphere of radius {r:.6} at {:?}", c.as_slice());
    for s in [0.9, 0.95, 0.99] {
        let d = hausdorff_family(&MobiusParam::along_x(s)?, 96, c, r, 400)?;
        println!("  |w| = {s}: {d:.3e}");
    }
    Ok(())
}
