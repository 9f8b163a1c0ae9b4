use nalgebra::{Matrix2, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::MetricModel;

use super::grid::{Jet, SurfaceGrid};
use super::spectral::Spectral;

type V3 = Vector3<f64>;
type M2 = Matrix2<f64>;

/// Per-node geometry of an immersed surface in an ambient metric.
#[derive(Debug, Clone)]
pub struct FormsField {
    pub gbar: Vec<M2>,
    pub a: Vec<M2>,
    pub h: Vec<f64>,
    pub aring: Vec<M2>,
    pub n: Vec<V3>,
    pub dsigma: Vec<f64>,
    pub weights: Vec<f64>,
    /// Parameter tangents ∂_u X, ∂_v X used to build the forms.
    pub xu: Vec<V3>,
    pub xv: Vec<V3>,
}

/// Derivatives of the grid: the analytic jet when available, spectral otherwise.
pub fn derivatives(grid: &SurfaceGrid) -> Result<Jet> {
    if let Some(j) = &grid.jet {
        return Ok(j.clone());
    }
    if !grid.periodic {
        return Err(Error::Config("non-periodic grids need analytic derivatives".into()));
    }
    let s = Spectral::new(grid.n_phi, grid.n_theta)?;
    let xu = s.d_u_vec(&grid.positions);
    let xv = s.d_v_vec(&grid.positions);
    let xuu = s.d_u_vec(&xu);
    let xuv = s.d_v_vec(&xu);
    let xvv = s.d_v_vec(&xv);
    Ok(Jet { xu, xv, xuu, xuv, xvv })
}

/// Sign making X_u × X_v point out of the enclosed region.
fn orientation(grid: &SurfaceGrid, jet: &Jet) -> f64 {
    let vol: f64 = (0..grid.len())
        .map(|k| grid.positions[k].dot(&jet.xu[k].cross(&jet.xv[k])) * grid.weights[k])
        .sum();
    if vol >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// First and second fundamental forms, unit outer normal, mean curvature and
/// area density. Conventions: A(X, Y) = g(∇_X n, Y), H = ḡ^{ij}A_{ij}.
pub fn fundamental_forms(grid: &SurfaceGrid, metric: &MetricModel) -> Result<FormsField> {
    let jet = derivatives(grid)?;
    let sign = orientation(grid, &jet);
    let nodes: Vec<(M2, M2, V3, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (xu, xv) = (jet.xu[k], jet.xv[k]);
            let (g, _, gam) = metric.metric_at(grid.positions[k])?;
            let gb = M2::new(
                xu.dot(&(g * xu)),
                xu.dot(&(g * xv)),
                xv.dot(&(g * xu)),
                xv.dot(&(g * xv)),
            );
            let det = gb.determinant();
            if !(det > 0.0) {
                return Err(Error::DegenerateMetric { node: k, det });
            }
            let c = xu.cross(&xv);
            let ginv = g.try_inverse().ok_or(Error::DegenerateMetric { node: k, det })?;
            let raw = ginv * c;
            let n = sign * raw / raw.dot(&c).sqrt();
            let conn = |a: &V3, b: &V3| -> V3 {
                V3::from_fn(|i, _| {
                    let mut s = 0.0;
                    for p in 0..3 {
                        for q in 0..3 {
                            s += gam[i][p][q] * a[p] * b[q];
                        }
                    }
                    s
                })
            };
            let gn = g * n;
            let a11 = -gn.dot(&(jet.xuu[k] + conn(&xu, &xu)));
            let a12 = -gn.dot(&(jet.xuv[k] + conn(&xu, &xv)));
            let a22 = -gn.dot(&(jet.xvv[k] + conn(&xv, &xv)));
            Ok((gb, M2::new(a11, a12, a12, a22), n, det.sqrt()))
        })
        .collect::<Result<_>>()?;
    let len = nodes.len();
    let mut out = FormsField {
        gbar: Vec::with_capacity(len),
        a: Vec::with_capacity(len),
        h: Vec::with_capacity(len),
        aring: Vec::with_capacity(len),
        n: Vec::with_capacity(len),
        dsigma: Vec::with_capacity(len),
        weights: grid.weights.clone(),
        xu: jet.xu,
        xv: jet.xv,
    };
    for (gb, a, n, ds) in nodes {
        let gi = gb.try_inverse().expect("positive definite");
        let h = (gi * a).trace();
        out.gbar.push(gb);
        out.a.push(a);
        out.h.push(h);
        out.aring.push(a - 0.5 * h * gb);
        out.n.push(n);
        out.dsigma.push(ds);
    }
    Ok(out)
}

impl FormsField {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// |A|² = ḡ^{ik}ḡ^{jl}A_{ij}A_{kl} per node.
    pub fn a_norm2(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let gi = self.gbar[k].try_inverse().unwrap();
                let m = gi * self.a[k];
                (m * m).trace()
            })
            .collect()
    }

    /// |Å|² per node.
    pub fn aring_norm2(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let gi = self.gbar[k].try_inverse().unwrap();
                let m = gi * self.aring[k];
                (m * m).trace()
            })
            .collect()
    }

    /// max_k max(|ḡ^{ij}A_{ij} − H|, |ḡ^{ij}Å_{ij}|).
    pub fn trace_defect(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                let gi = self.gbar[k].try_inverse().unwrap();
                ((gi * self.a[k]).trace() - self.h[k])
                    .abs()
                    .max((gi * self.aring[k]).trace().abs())
            })
            .fold(0.0, f64::max)
    }
}

/// ∫ density dσ by the grid's quadrature.
pub fn integrate(density: &[f64], forms: &FormsField) -> f64 {
    density
        .iter()
        .zip(&forms.dsigma)
        .zip(&forms.weights)
        .map(|((f, d), w)| f * d * w)
        .sum()
}

pub fn area(forms: &FormsField) -> f64 {
    forms.dsigma.iter().zip(&forms.weights).map(|(d, w)| d * w).sum()
}

/// W = ∫ H² dσ.
pub fn willmore_energy(forms: &FormsField) -> f64 {
    forms
        .h
        .iter()
        .zip(&forms.dsigma)
        .zip(&forms.weights)
        .map(|((h, d), w)| h * h * d * w)
        .sum()
}

/// √|Σ| / (64 π^{3/2}) · (16π − W).
pub fn hawking_mass(forms: &FormsField) -> f64 {
    let pi = std::f64::consts::PI;
    area(forms).sqrt() / (64.0 * pi.powf(1.5)) * (16.0 * pi - willmore_energy(forms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::grid::{build_clifford_torus, build_sphere};
    use std::f64::consts::{PI, SQRT_2, TAU};

    #[test]
    fn clifford_torus_mean_curvature_and_area_element() {
        let g = build_clifford_torus(64, 64).unwrap();
        let f = fundamental_forms(&g, &MetricModel::euclidean()).unwrap();
        for i in 0..64 {
            let c = (TAU * i as f64 / 64.0).cos();
            for j in 0..64 {
                let k = g.index(i, j);
                assert!((f.h[k] - (SQRT_2 + 2.0 * c) / (SQRT_2 + c)).abs() < 1e-10);
                assert!((f.dsigma[k] - (SQRT_2 + c)).abs() < 1e-12);
            }
        }
        assert!(f.trace_defect() < 1e-12);
        assert!((willmore_energy(&f) / (8.0 * PI * PI) - 1.0).abs() < 1e-10);
        let n_norm = f.n.iter().map(|n| (n.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(n_norm < 1e-12);
    }

    #[test]
    fn spectral_route_agrees_with_the_analytic_jet() {
        let g = build_clifford_torus(32, 32).unwrap();
        let bare = crate::surface::SurfaceGrid::from_positions(32, 32, g.positions.clone()).unwrap();
        let a = fundamental_forms(&g, &MetricModel::euclidean()).unwrap();
        let b = fundamental_forms(&bare, &MetricModel::euclidean()).unwrap();
        for k in 0..a.len() {
            assert!((a.h[k] - b.h[k]).abs() < 1e-11);
        }
    }

    #[test]
    fn spheres_are_umbilic() {
        for (c, r) in [(V3::zeros(), 1.0), (V3::new(1.0, -2.0, 0.5), 2.0), (V3::new(0.0, 3.0, 0.0), 0.3)] {
            let g = build_sphere(c, r, 24, 32).unwrap();
            let f = fundamental_forms(&g, &MetricModel::euclidean()).unwrap();
            assert!(f.h.iter().all(|h| (h - 2.0 / r).abs() < 1e-12));
            assert!(f.aring_norm2().iter().all(|a| a.sqrt() < 1e-10));
            assert!((willmore_energy(&f) - 16.0 * PI).abs() < 1e-11);
            assert!((area(&f) - 4.0 * PI * r * r).abs() < 1e-11 * r * r);
            assert!(hawking_mass(&f).abs() < 1e-12);
        }
    }

    #[test]
    fn clifford_hawking_mass() {
        let g = build_clifford_torus(64, 64).unwrap();
        let f = fundamental_forms(&g, &MetricModel::euclidean()).unwrap();
        // √(4√2π²) = 2·2^{1/4}π
        let want = 2.0 * 2f64.powf(0.25) * PI / (64.0 * PI.powf(1.5)) * (16.0 * PI - 8.0 * PI * PI);
        assert!((hawking_mass(&f) - want).abs() < 1e-12, "{} {}", hawking_mass(&f), want);
        assert!((want + 0.601_566_452_869_873).abs() < 1e-12);
    }
}
