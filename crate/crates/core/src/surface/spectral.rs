//! Trigonometric differentiation on the doubly periodic (u, v) grid.
//!
//! Samples are stored row-major: node (i, j) lives at `i * n_v + j`, with `i`
//! indexing the first angle and `j` the second.

use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

type V3 = Vector3<f64>;

/// FFT plans for one grid shape.
#[derive(Clone)]
pub struct Spectral {
    pub n_u: usize,
    pub n_v: usize,
    fwd_u: Arc<dyn Fft<f64>>,
    inv_u: Arc<dyn Fft<f64>>,
    fwd_v: Arc<dyn Fft<f64>>,
    inv_v: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectral({}x{})", self.n_u, self.n_v)
    }
}

/// Signed wavenumber of FFT bin `idx`; the Nyquist bin maps to zero so that
/// odd derivatives of real data stay real.
fn wavenumber(idx: usize, n: usize) -> f64 {
    if 2 * idx < n {
        idx as f64
    } else if 2 * idx == n {
        0.0
    } else {
        idx as f64 - n as f64
    }
}

impl Spectral {
    pub fn new(n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < 8 || n_v < 8 || n_u % 2 != 0 || n_v % 2 != 0 {
            return Err(Error::BadResolution {
                n_phi: n_u,
                n_theta: n_v,
            });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_u,
            n_v,
            fwd_u: planner.plan_fft_forward(n_u),
            inv_u: planner.plan_fft_inverse(n_u),
            fwd_v: planner.plan_fft_forward(n_v),
            inv_v: planner.plan_fft_inverse(n_v),
        })
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// Multiply the spectrum along v by `mult(k)`.
    fn along_v(&self, f: &[f64], mult: impl Fn(f64) -> Complex64) -> Vec<f64> {
        let (nu, nv) = (self.n_u, self.n_v);
        let factors: Vec<Complex64> = (0..nv).map(|q| mult(wavenumber(q, nv))).collect();
        let scale = 1.0 / nv as f64;
        let mut out = vec![0.0; nu * nv];
        let mut buf = vec![Complex64::new(0.0, 0.0); nv];
        for i in 0..nu {
            for j in 0..nv {
                buf[j] = Complex64::new(f[i * nv + j], 0.0);
            }
            self.fwd_v.process(&mut buf);
            for (b, c) in buf.iter_mut().zip(&factors) {
                *b *= c;
            }
            self.inv_v.process(&mut buf);
            for j in 0..nv {
                out[i * nv + j] = buf[j].re * scale;
            }
        }
        out
    }

    /// Multiply the spectrum along u by `mult(k)`.
    fn along_u(&self, f: &[f64], mult: impl Fn(f64) -> Complex64) -> Vec<f64> {
        let (nu, nv) = (self.n_u, self.n_v);
        let factors: Vec<Complex64> = (0..nu).map(|p| mult(wavenumber(p, nu))).collect();
        let scale = 1.0 / nu as f64;
        let mut out = vec![0.0; nu * nv];
        let mut buf = vec![Complex64::new(0.0, 0.0); nu];
        for j in 0..nv {
            for i in 0..nu {
                buf[i] = Complex64::new(f[i * nv + j], 0.0);
            }
            self.fwd_u.process(&mut buf);
            for (b, c) in buf.iter_mut().zip(&factors) {
                *b *= c;
            }
            self.inv_u.process(&mut buf);
            for i in 0..nu {
                out[i * nv + j] = buf[i].re * scale;
            }
        }
        out
    }

    pub fn d_u(&self, f: &[f64]) -> Vec<f64> {
        self.along_u(f, |k| Complex64::new(0.0, k))
    }

    pub fn d_v(&self, f: &[f64]) -> Vec<f64> {
        self.along_v(f, |k| Complex64::new(0.0, k))
    }

    /// Both first derivatives, shape-checked.
    pub fn gradient(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(f)?;
        Ok((self.d_u(f), self.d_v(f)))
    }

    /// Second derivatives (uu, uv, vv), each obtained by applying the first
    /// derivative operator twice.
    pub fn hessian(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let fu = self.d_u(f);
        let fv = self.d_v(f);
        (self.d_u(&fu), self.d_v(&fu), self.d_v(&fv))
    }

    pub fn d_u_vec(&self, f: &[V3]) -> Vec<V3> {
        self.map_vec(f, |c| self.d_u(c))
    }

    pub fn d_v_vec(&self, f: &[V3]) -> Vec<V3> {
        self.map_vec(f, |c| self.d_v(c))
    }

    fn map_vec(&self, f: &[V3], op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<V3> {
        let comps: Vec<Vec<f64>> = (0..3)
            .map(|c| op(&f.iter().map(|x| x[c]).collect::<Vec<_>>()))
            .collect();
        (0..f.len())
            .map(|k| V3::new(comps[0][k], comps[1][k], comps[2][k]))
            .collect()
    }

    /// Zero every Fourier mode with |k_u| > ku_max or |k_v| > kv_max.
    pub fn lowpass(&self, f: &[f64], ku_max: usize, kv_max: usize) -> Vec<f64> {
        let g = self.along_v(f, |k| {
            Complex64::new(if k.abs() <= kv_max as f64 { 1.0 } else { 0.0 }, 0.0)
        });
        self.along_u(&g, |k| {
            Complex64::new(if k.abs() <= ku_max as f64 { 1.0 } else { 0.0 }, 0.0)
        })
    }
}

/// Real, L²(du dv)-orthonormal Fourier modes of degree ≤ `k_max` in each angle,
/// sampled on an n_u × n_v grid.
///
/// One-dimensional factors are ordered 1, cos u, sin u, cos 2u, sin 2u, ...;
/// the 2-D mode `(a, b)` has flat index `a * m + b` with `m = 2 k_max + 1`.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    pub k_max: usize,
    pub n_u: usize,
    pub n_v: usize,
    bu: DMatrix<f64>,
    bv: DMatrix<f64>,
}

fn factor_table(n: usize, k_max: usize) -> DMatrix<f64> {
    let m = 2 * k_max + 1;
    let tau = std::f64::consts::TAU;
    DMatrix::from_fn(n, m, |i, a| {
        let t = tau * i as f64 / n as f64;
        if a == 0 {
            1.0 / tau.sqrt()
        } else {
            let k = a.div_ceil(2) as f64;
            let s = 1.0 / std::f64::consts::PI.sqrt();
            if a % 2 == 1 {
                s * (k * t).cos()
            } else {
                s * (k * t).sin()
            }
        }
    })
}

impl FourierBasis {
    pub fn new(k_max: usize, n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < 2 * k_max + 2 || n_v < 2 * k_max + 2 {
            return Err(Error::Config(format!(
                "grid {n_u}x{n_v} cannot resolve Fourier degree {k_max}"
            )));
        }
        Ok(Self {
            k_max,
            n_u,
            n_v,
            bu: factor_table(n_u, k_max),
            bv: factor_table(n_v, k_max),
        })
    }

    pub fn dim_1d(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn len(&self) -> usize {
        self.dim_1d() * self.dim_1d()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumbers (|k_u|, |k_v|) of flat mode `idx`.
    pub fn degrees(&self, idx: usize) -> (usize, usize) {
        let m = self.dim_1d();
        ((idx / m).div_ceil(2), (idx % m).div_ceil(2))
    }

    /// Grid samples of mode `idx`.
    pub fn mode(&self, idx: usize) -> Vec<f64> {
        let m = self.dim_1d();
        let (a, b) = (idx / m, idx % m);
        let mut out = Vec::with_capacity(self.n_u * self.n_v);
        for i in 0..self.n_u {
            for j in 0..self.n_v {
                out.push(self.bu[(i, a)] * self.bv[(j, b)]);
            }
        }
        out
    }

    /// Grid values of Σ c_k e_k.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let m = self.dim_1d();
        let c = DMatrix::from_row_slice(m, m, coeffs);
        let f = &self.bu * c * self.bv.transpose();
        let mut out = Vec::with_capacity(self.n_u * self.n_v);
        for i in 0..self.n_u {
            for j in 0..self.n_v {
                out.push(f[(i, j)]);
            }
        }
        out
    }

    /// Trapezoid-rule inner products ∫∫ f e_k du dv for every mode.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        let m = self.dim_1d();
        let fm = DMatrix::from_row_slice(self.n_u, self.n_v, f);
        let w = std::f64::consts::TAU.powi(2) / (self.n_u * self.n_v) as f64;
        let c = self.bu.transpose() * fm * &self.bv * w;
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                out.push(c[(a, b)]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid(n: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(f(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64));
            }
        }
        out
    }

    #[test]
    fn derivative_of_sin_phi() {
        let s = Spectral::new(16, 16).unwrap();
        let f = grid(16, |u, _| u.sin());
        let (du, dv) = s.gradient(&f).unwrap();
        let exact = grid(16, |u, _| u.cos());
        for k in 0..f.len() {
            assert!((du[k] - exact[k]).abs() < 1e-12);
            assert!(dv[k].abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_cos_3theta() {
        let s = Spectral::new(16, 16).unwrap();
        let f = grid(16, |_, v| (3.0 * v).cos());
        let dv = s.d_v(&f);
        let exact = grid(16, |_, v| -3.0 * (3.0 * v).sin());
        for k in 0..f.len() {
            assert!((dv[k] - exact[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_have_zero_gradient() {
        let s = Spectral::new(8, 8).unwrap();
        let (du, dv) = s.gradient(&[2.5; 64]).unwrap();
        assert!(du.iter().chain(&dv).all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Spectral::new(7, 8).is_err());
        assert!(Spectral::new(6, 6).is_err());
        let s = Spectral::new(8, 8).unwrap();
        assert!(s.gradient(&[0.0; 10]).is_err());
    }

    #[test]
    fn basis_is_orthonormal_and_projection_inverts_synthesis() {
        let b = FourierBasis::new(3, 16, 12).unwrap();
        let n = b.len();
        for k in 0..n {
            let c = b.project(&b.mode(k));
            for (l, x) in c.iter().enumerate() {
                let want = if l == k { 1.0 } else { 0.0 };
                assert!((x - want).abs() < 1e-12, "{k} {l} {x}");
            }
        }
        let coeffs: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        let back = b.project(&b.synthesize(&coeffs));
        for (a, c) in back.iter().zip(&coeffs) {
            assert!((a - c).abs() < 1e-12);
        }
    }
}
