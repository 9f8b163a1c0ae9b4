//! Ẇ(0) for the metric perturbation g_t = δ + t h with
//! h_{αβ}(x) = ⅓R_{αμνβ}x^μx^ν, evaluated on R𝕋.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::Serialize;

use crate::error::Result;
use crate::metric::{CurvatureData, MetricModel};
use crate::surface::{build_clifford_torus, fundamental_forms, willmore_energy, Spectral};

type V3 = Vector3<f64>;
type M3 = Matrix3<f64>;

/// Values of the three proof steps and their half-sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WdotSteps {
    /// ∫ 2⟨∂_n h e_i, e_i⟩H dσ
    pub normal_derivative: f64,
    /// ∫ (−4e_i(h_{ni}) + 4h_{nj}⟨∇_{e_i}e_i, e_j⟩)H dσ
    pub mixed: f64,
    /// ∫ (−2h_{nn} + tr h|_{TΣ})H² dσ
    pub tangential: f64,
    pub total: f64,
}

impl WdotSteps {
    fn new(normal_derivative: f64, mixed: f64, tangential: f64) -> Self {
        Self {
            normal_derivative,
            mixed,
            tangential,
            total: 0.5 * (normal_derivative + mixed + tangential),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.normal_derivative, self.mixed, self.tangential]
    }
}

fn h_at(riem: &crate::metric::Riemann, x: &V3) -> M3 {
    M3::from_fn(|a, b| {
        let mut s = 0.0;
        for m in 0..3 {
            for n in 0..3 {
                s += riem[a][m][n][b] * x[m] * x[n];
            }
        }
        s / 3.0
    })
}

/// ∂_w h at x.
fn dh_at(riem: &crate::metric::Riemann, x: &V3, w: &V3) -> M3 {
    M3::from_fn(|a, b| {
        let mut s = 0.0;
        for k in 0..3 {
            for n in 0..3 {
                s += (riem[a][k][n][b] + riem[a][n][k][b]) * w[k] * x[n];
            }
        }
        s / 3.0
    })
}

/// Spectral quadrature of the five first-variation terms on R𝕋.
pub fn wdot_quadrature(curv: &CurvatureData, rotation: &Rotation3<f64>) -> Result<WdotSteps> {
    wdot_quadrature_on(curv, rotation, 64)
}

pub fn wdot_quadrature_on(curv: &CurvatureData, rotation: &Rotation3<f64>, n: usize) -> Result<WdotSteps> {
    let base = build_clifford_torus(n, n)?;
    let grid = base.affine(*rotation.matrix(), V3::zeros());
    let forms = fundamental_forms(&grid, &MetricModel::euclidean())?;
    let spec = Spectral::new(n, n)?;
    let len = grid.len();
    let rho: Vec<f64> = forms.xv.iter().map(|v| v.norm()).collect();
    let e1: Vec<V3> = forms.xu.iter().map(|u| u.normalize()).collect();
    let e2: Vec<V3> = forms.xv.iter().map(|v| v.normalize()).collect();
    let x = &grid.positions;
    let r = &curv.riem;

    // e_i acting on scalars: ∂_φ/|X_φ| and ∂_θ/|X_θ| (|X_φ| = 1)
    let along = |f: &[f64], i: usize| -> Vec<f64> {
        if i == 0 {
            spec.d_u(f)
        } else {
            spec.d_v(f).iter().zip(&rho).map(|(d, r)| d / r).collect()
        }
    };
    let along_vec = |f: &[V3], i: usize| -> Vec<V3> {
        let d = if i == 0 { spec.d_u_vec(f) } else { spec.d_v_vec(f) };
        if i == 0 {
            d
        } else {
            d.iter().zip(&rho).map(|(d, r)| d / *r).collect()
        }
    };
    let frame = [&e1, &e2];
    let hs: Vec<M3> = x.iter().map(|p| h_at(r, p)).collect();
    let mut mixed = vec![0.0; len];
    for i in 0..2 {
        let h_ni: Vec<f64> = (0..len).map(|k| forms.n[k].dot(&(hs[k] * frame[i][k]))).collect();
        let d = along(&h_ni, i);
        let dee = along_vec(frame[i], i);
        for k in 0..len {
            let mut conn = 0.0;
            for j in 0..2 {
                let h_nj = forms.n[k].dot(&(hs[k] * frame[j][k]));
                conn += h_nj * dee[k].dot(&frame[j][k]);
            }
            mixed[k] += -4.0 * d[k] + 4.0 * conn;
        }
    }
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for k in 0..len {
        let h = forms.h[k];
        let n = forms.n[k];
        let dh = dh_at(r, &x[k], &n);
        let tr_dh = e1[k].dot(&(dh * e1[k])) + e2[k].dot(&(dh * e2[k]));
        let tr_h = e1[k].dot(&(hs[k] * e1[k])) + e2[k].dot(&(hs[k] * e2[k]));
        let h_nn = n.dot(&(hs[k] * n));
        let w = forms.dsigma[k] * forms.weights[k];
        s1 += 2.0 * tr_dh * h * w;
        s2 += mixed[k] * h * w;
        s3 += (-2.0 * h_nn + tr_h) * h * h * w;
    }
    Ok(WdotSteps::new(s1, s2, s3))
}

/// Closed forms of the three steps with Sc = tr Ric and R₃₃ = Ric(Re_z, Re_z).
pub fn wdot_closed_form(curv: &CurvatureData, rotation: &Rotation3<f64>) -> WdotSteps {
    let axis = rotation * V3::z();
    let r33 = axis.dot(&(curv.ric * axis));
    let sc = curv.sc;
    let pi2 = PI * PI;
    WdotSteps::new(
        -4.0 * SQRT_2 * pi2 * sc + 4.0 * SQRT_2 / 3.0 * pi2 * r33,
        8.0 / 3.0 * pi2 * r33 * (2.0 - SQRT_2),
        -4.0 * SQRT_2 * pi2 * sc + pi2 / 3.0 * (28.0 * SQRT_2 - 16.0) * r33,
    )
}

/// Richardson extrapolation of (W(g_t) − W(δ))/t over t ∈ {t₀, t₀/2} on R𝕋
/// in the truncated normal-coordinate metric.
pub fn wdot_finite_difference(curv: &CurvatureData, rotation: &Rotation3<f64>, t0: f64, n: usize) -> Result<f64> {
    let grid = build_clifford_torus(n, n)?.affine(*rotation.matrix(), V3::zeros());
    let w0 = willmore_energy(&fundamental_forms(&grid, &MetricModel::euclidean())?);
    let quotient = |t: f64| -> Result<f64> {
        let model = MetricModel::normal_expansion(curv.clone(), 1.0).with_epsilon(t.sqrt());
        Ok((willmore_energy(&fundamental_forms(&grid, &model)?) - w0) / t)
    };
    let (a, b) = (quotient(t0)?, quotient(t0 / 2.0)?);
    Ok(2.0 * b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::synthetic_curvature;

    #[test]
    fn flat_data_gives_zero() {
        let w = wdot_quadrature(&CurvatureData::flat(), &Rotation3::identity()).unwrap();
        assert!(w.total.abs() < 1e-14);
    }

    #[test]
    fn isotropic_and_diagonal_examples() {
        let id = Rotation3::identity();
        let iso = CurvatureData::from_ricci(M3::identity() / 3.0);
        let want = -8.0 * SQRT_2 / 3.0 * PI * PI;
        assert!((wdot_quadrature(&iso, &id).unwrap().total - want).abs() < 1e-9);
        assert!((wdot_closed_form(&iso, &id).total - want).abs() < 1e-12);
        assert!((want + 37.22).abs() < 0.01);
        let d = synthetic_curvature([1.0, 2.0, 3.0], &id);
        let want = -4.0 * SQRT_2 * PI * PI * 3.0;
        assert!((wdot_quadrature(&d, &id).unwrap().total - want).abs() < 1e-9);
    }

    #[test]
    fn steps_match_closed_forms() {
        let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
        let c = CurvatureData::from_ricci(M3::new(1.0, 0.2, -0.3, 0.2, -0.5, 0.4, -0.3, 0.4, 2.0));
        let q = wdot_quadrature(&c, &rot).unwrap();
        let f = wdot_closed_form(&c, &rot);
        for (a, b) in q.as_array().iter().zip(f.as_array()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn finite_difference_route() {
        let rot = Rotation3::from_euler_angles(0.7, 0.4, -0.2);
        let c = CurvatureData::from_ricci(M3::new(0.5, 0.1, 0.0, 0.1, 1.0, -0.2, 0.0, -0.2, 1.5));
        let fd = wdot_finite_difference(&c, &rot, 1e-3, 32).unwrap();
        let cf = wdot_closed_form(&c, &rot).total;
        assert!((fd / cf - 1.0).abs() < 1e-4, "{fd} vs {cf}");
    }
}
