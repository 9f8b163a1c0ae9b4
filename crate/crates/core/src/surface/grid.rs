use std::f64::consts::{SQRT_2, TAU};
use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, ClusterMap};

type V3 = Vector3<f64>;
type M3 = Matrix3<f64>;

/// Position and first/second parameter derivatives at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetPoint {
    pub x: V3,
    pub xu: V3,
    pub xv: V3,
    pub xuu: V3,
    pub xuv: V3,
    pub xvv: V3,
}

/// Analytic derivative arrays of an immersion, one entry per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub xu: Vec<V3>,
    pub xv: Vec<V3>,
    pub xuu: Vec<V3>,
    pub xuv: Vec<V3>,
    pub xvv: Vec<V3>,
}

/// A point map together with its Jacobian and the Hessians of its three
/// components.
pub struct MapJet {
    pub value: V3,
    pub jac: M3,
    pub hess: [M3; 3],
}

impl MapJet {
    pub fn linear(a: M3, b: V3, x: V3) -> Self {
        Self {
            value: a * x + b,
            jac: a,
            hess: [M3::zeros(); 3],
        }
    }

    fn second(&self, a: &V3, b: &V3) -> V3 {
        V3::new(
            a.dot(&(self.hess[0] * b)),
            a.dot(&(self.hess[1] * b)),
            a.dot(&(self.hess[2] * b)),
        )
    }
}

/// A sampled closed surface in a coordinate chart.
///
/// Tori live on a periodic (u, v) grid. `weights[k]` is the quadrature
/// weight of node k for integrals in du dv. When `jet` is present the
/// derivatives are analytic; otherwise they are taken spectrally (periodic
/// grids only).
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub n_phi: usize,
    pub n_theta: usize,
    pub positions: Vec<V3>,
    pub periodic: bool,
    pub jet: Option<Jet>,
    pub weights: Vec<f64>,
}

/// One scalar per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub n_phi: usize,
    pub n_theta: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &SurfaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            n_phi: grid.n_phi,
            n_theta: grid.n_theta,
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_resolution(n_phi: usize, n_theta: usize) -> Result<()> {
    if n_phi < 8 || n_theta < 8 || n_phi % 2 != 0 || n_theta % 2 != 0 {
        return Err(Error::BadResolution { n_phi, n_theta });
    }
    Ok(())
}

/// X(φ, θ) of the Clifford torus with its analytic derivatives in (φ, θ).
pub fn clifford_point(phi: f64, theta: f64) -> JetPoint {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let rho = SQRT_2 + cp;
    JetPoint {
        x: V3::new(rho * ct, rho * st, sp),
        xu: V3::new(-sp * ct, -sp * st, cp),
        xv: V3::new(-rho * st, rho * ct, 0.0),
        xuu: V3::new(-cp * ct, -cp * st, -sp),
        xuv: V3::new(sp * st, -sp * ct, 0.0),
        xvv: V3::new(-rho * ct, -rho * st, 0.0),
    }
}

impl SurfaceGrid {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// Periodic grid from a parameter-space jet function on uniform (u, v) nodes.
    pub fn from_jet_fn(n_u: usize, n_v: usize, f: impl Fn(f64, f64) -> JetPoint) -> Result<Self> {
        check_resolution(n_u, n_v)?;
        let n = n_u * n_v;
        let mut positions = Vec::with_capacity(n);
        let mut jet = Jet {
            xu: Vec::with_capacity(n),
            xv: Vec::with_capacity(n),
            xuu: Vec::with_capacity(n),
            xuv: Vec::with_capacity(n),
            xvv: Vec::with_capacity(n),
        };
        for i in 0..n_u {
            for j in 0..n_v {
                let p = f(TAU * i as f64 / n_u as f64, TAU * j as f64 / n_v as f64);
                positions.push(p.x);
                jet.xu.push(p.xu);
                jet.xv.push(p.xv);
                jet.xuu.push(p.xuu);
                jet.xuv.push(p.xuv);
                jet.xvv.push(p.xvv);
            }
        }
        Ok(Self {
            n_phi: n_u,
            n_theta: n_v,
            positions,
            periodic: true,
            jet: Some(jet),
            weights: vec![TAU * TAU / n as f64; n],
        })
    }

    /// Periodic grid from bare positions; derivatives will be spectral.
    pub fn from_positions(n_phi: usize, n_theta: usize, positions: Vec<V3>) -> Result<Self> {
        check_resolution(n_phi, n_theta)?;
        let n = n_phi * n_theta;
        if positions.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: positions.len(),
            });
        }
        Ok(Self {
            n_phi,
            n_theta,
            positions,
            periodic: true,
            jet: None,
            weights: vec![TAU * TAU / n as f64; n],
        })
    }

    /// The jet at node k (requires analytic derivatives).
    pub fn jet_point(&self, k: usize) -> Option<JetPoint> {
        self.jet.as_ref().map(|j| JetPoint {
            x: self.positions[k],
            xu: j.xu[k],
            xv: j.xv[k],
            xuu: j.xuu[k],
            xuv: j.xuv[k],
            xvv: j.xvv[k],
        })
    }

    /// Push the surface through a point map, carrying analytic derivatives
    /// by the chain rule. Grids without a jet only get their positions mapped.
    pub fn map(&self, f: impl Fn(V3) -> Result<MapJet>) -> Result<Self> {
        let mut out = self.clone();
        for k in 0..self.len() {
            let m = f(self.positions[k])?;
            out.positions[k] = m.value;
            if let (Some(src), Some(dst)) = (self.jet.as_ref(), out.jet.as_mut()) {
                let (xu, xv) = (src.xu[k], src.xv[k]);
                dst.xu[k] = m.jac * xu;
                dst.xv[k] = m.jac * xv;
                dst.xuu[k] = m.second(&xu, &xu) + m.jac * src.xuu[k];
                dst.xuv[k] = m.second(&xu, &xv) + m.jac * src.xuv[k];
                dst.xvv[k] = m.second(&xv, &xv) + m.jac * src.xvv[k];
            }
        }
        Ok(out)
    }

    pub fn affine(&self, a: M3, b: V3) -> Self {
        self.map(|x| Ok(MapJet::linear(a, b, x))).expect("affine maps cannot fail")
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        self.affine(M3::identity() * lambda, V3::zeros())
    }

    pub fn translated(&self, b: V3) -> Self {
        self.affine(M3::identity(), b)
    }

    /// Write the documented CSV layout: header `i,j,x,y,z`, row-major in i.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "i,j,x,y,z")?;
        for i in 0..self.n_phi {
            for j in 0..self.n_theta {
                let p = self.positions[self.index(i, j)];
                writeln!(w, "{i},{j},{:.17e},{:.17e},{:.17e}", p.x, p.y, p.z)?;
            }
        }
        Ok(())
    }
}

/// The Clifford torus on a uniform grid: node (i, j) = X(2πi/n_phi, 2πj/n_theta).
pub fn build_clifford_torus(n_phi: usize, n_theta: usize) -> Result<SurfaceGrid> {
    SurfaceGrid::from_jet_fn(n_phi, n_theta, clifford_point)
}

/// Reparametrize a jet through separate clustering maps in u and v.
pub fn reparametrize<'a>(
    p: impl Fn(f64, f64) -> JetPoint + 'a,
    mu: &'a ClusterMap,
    mv: &'a ClusterMap,
) -> impl Fn(f64, f64) -> JetPoint + 'a {
    move |u, v| {
        let (a, a1, a2) = mu.eval(u);
        let (b, b1, b2) = mv.eval(v);
        let q = p(a, b);
        JetPoint {
            x: q.x,
            xu: q.xu * a1,
            xv: q.xv * b1,
            xuu: q.xuu * (a1 * a1) + q.xu * a2,
            xuv: q.xuv * (a1 * b1),
            xvv: q.xvv * (b1 * b1) + q.xv * b2,
        }
    }
}

/// The Clifford torus on a grid clustered around (φ, θ) = (mu.center, mv.center).
pub fn clustered_clifford_torus(n_phi: usize, n_theta: usize, mu: &ClusterMap, mv: &ClusterMap) -> Result<SurfaceGrid> {
    SurfaceGrid::from_jet_fn(n_phi, n_theta, reparametrize(clifford_point, mu, mv))
}

/// Round sphere on a latitude–longitude grid: Gauss–Legendre nodes in cos ϑ
/// (no pole samples) and uniform longitudes. Jets are analytic in (ϑ, λ).
pub fn build_sphere(center: V3, radius: f64, n_lat: usize, n_lon: usize) -> Result<SurfaceGrid> {
    if n_lat < 4 || n_lon < 8 || n_lon % 2 != 0 {
        return Err(Error::BadResolution {
            n_phi: n_lat,
            n_theta: n_lon,
        });
    }
    let (xs, ws) = gauss_legendre(n_lat);
    let n = n_lat * n_lon;
    let mut positions = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut jet = Jet {
        xu: Vec::with_capacity(n),
        xv: Vec::with_capacity(n),
        xuu: Vec::with_capacity(n),
        xuv: Vec::with_capacity(n),
        xvv: Vec::with_capacity(n),
    };
    for i in 0..n_lat {
        let (ct, st) = (xs[i], (1.0 - xs[i] * xs[i]).sqrt());
        for j in 0..n_lon {
            let (sl, cl) = (TAU * j as f64 / n_lon as f64).sin_cos();
            let r = radius;
            positions.push(center + r * V3::new(st * cl, st * sl, ct));
            jet.xu.push(r * V3::new(ct * cl, ct * sl, -st));
            jet.xv.push(r * V3::new(-st * sl, st * cl, 0.0));
            jet.xuu.push(r * V3::new(-st * cl, -st * sl, -ct));
            jet.xuv.push(r * V3::new(-ct * sl, ct * cl, 0.0));
            jet.xvv.push(r * V3::new(-st * cl, -st * sl, 0.0));
            // dϑ = dx / sin ϑ
            weights.push(ws[i] / st * TAU / n_lon as f64);
        }
    }
    Ok(SurfaceGrid {
        n_phi: n_lat,
        n_theta: n_lon,
        positions,
        periodic: false,
        jet: Some(jet),
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_nodes_match_the_parametrization() {
        let g = build_clifford_torus(8, 8).unwrap();
        assert!((g.positions[0] - V3::new(SQRT_2 + 1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((g.positions[g.index(4, 0)] - V3::new(SQRT_2 - 1.0, 0.0, 0.0)).norm() < 1e-15);
        let g = build_clifford_torus(16, 16).unwrap();
        assert!((g.positions[g.index(4, 4)] - V3::new(0.0, SQRT_2, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_unusable_resolutions() {
        assert!(build_clifford_torus(7, 8).is_err());
        assert!(build_clifford_torus(8, 6).is_err());
    }

    #[test]
    fn jets_match_finite_differences() {
        let h = 1e-5;
        let (u, v) = (0.7, -1.3);
        let p = clifford_point(u, v);
        let pu = (clifford_point(u + h, v).x - clifford_point(u - h, v).x) / (2.0 * h);
        let puv = (clifford_point(u, v + h).xu - clifford_point(u, v - h).xu) / (2.0 * h);
        assert!((pu - p.xu).norm() < 1e-9);
        assert!((puv - p.xuv).norm() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let g = build_clifford_torus(8, 8).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("i,j,x,y,z"));
        assert!(lines.next().unwrap().starts_with("0,0,"));
        assert_eq!(s.lines().count(), 65);
    }
}
