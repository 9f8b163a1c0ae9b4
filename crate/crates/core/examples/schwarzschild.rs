//! Schwarzschild m = 1: the ε² coefficient flips sign between radial and
//! tangential axes, and the reduced energy has an interior minimum in the
//! annulus τ ≤ |P| ≤ 1/τ, at the horizon |P| = m/2.

use nalgebra::Vector3;

use willmore::metric::MetricModel;
use willmore::reduction::{extremize, symmetric_coefficient, Ambient, Domain, ExtremizeOptions, Mode};
use willmore::report::default_starts;

fn main() -> willmore::Result<()> {
    let ambient = Ambient::Global(MetricModel::schwarzschild(1.0));
    let eps = 0.05;
    println!("{:>6} {:>12} {:>12}", "|P|", "radial", "tangential");
    for r in [0.3, 0.4, 0.5, 0.75, 1.0, 2.0] {
        let p = Vector3::new(r, 0.0, 0.0);
        println!(
            "{r:6.2} {:12.5} {:12.5}",
            symmetric_coefficient(&ambient, eps, p, Vector3::x(), 48)?,
            symmetric_coefficient(&ambient, eps, p, Vector3::z(), 48)?
        );
    }
    let domain = Domain::Annulus { tau: 0.25 };
    let opts = ExtremizeOptions {
        mode: Mode::Min,
        starts: default_starts(&domain),
        domain,
        r_boundary: 0.9,
        grid: 48,
        max_evals: 600,
        f_tol: 1e-10,
        certify: false,
    };
    let r = extremize(&ambient, eps, &opts)?;
    let p = Vector3::from(r.point.p);
    let a = Vector3::from(r.point.axis);
    println!(
        "\nminimum at |P| = {:.4}, |axis . P/|P|| = {:.4}, margin {:.3e}, interior {}",
        p.norm(),
        a.dot(&p.normalize()).abs(),
        r.margin,
        r.interior
    );
    Ok(())
}
