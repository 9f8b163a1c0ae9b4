//! First variation of W, the flat linearized operator L̃₀ with its
//! near-kernel, the two routes to Ẇ(0), and the Lyapunov–Schmidt corrector.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricModel;
use crate::mobius::{family_clusters, family_grid, family_torus, jacobi_fields, MobiusParam};
use crate::surface::{clustered_clifford_torus, fundamental_forms, FormsField, FourierBasis, ScalarField, Spectral, SurfaceGrid};

mod corrector;
mod wdot;

pub use corrector::{corrector_solve, normal_graph, CorrectorOptions, CorrectorResult};
pub use wdot::{wdot_closed_form, wdot_finite_difference, wdot_quadrature, wdot_quadrature_on, WdotSteps};

type M2 = Matrix2<f64>;
type V3 = Vector3<f64>;

/// Intrinsic calculus on a periodic surface grid: spectral derivatives plus
/// the Levi-Civita connection of ḡ.
pub struct SurfaceCalculus {
    spec: Spectral,
    ginv: Vec<M2>,
    /// gamma[k][l] = Γ̄^l_{ij} as a symmetric 2×2 matrix in (i, j).
    gamma: Vec<[M2; 2]>,
}

/// ⟨S, T⟩ = ḡ^{ik}ḡ^{jl}S_{ij}T_{kl}.
fn pair(ginv: &M2, s: &M2, t: &M2) -> f64 {
    (ginv * s * ginv * t).trace()
}

impl SurfaceCalculus {
    pub fn new(n_u: usize, n_v: usize, forms: &FormsField) -> Result<Self> {
        let spec = Spectral::new(n_u, n_v)?;
        if forms.len() != spec.len() {
            return Err(Error::ShapeMismatch {
                expected: spec.len(),
                found: forms.len(),
            });
        }
        let comp = |i: usize, j: usize| forms.gbar.iter().map(|g| g[(i, j)]).collect::<Vec<_>>();
        let (g11, g12, g22) = (comp(0, 0), comp(0, 1), comp(1, 1));
        // d[c][e]: derivative in direction e of component c ∈ {11, 12, 22}
        let d = [
            [spec.d_u(&g11), spec.d_v(&g11)],
            [spec.d_u(&g12), spec.d_v(&g12)],
            [spec.d_u(&g22), spec.d_v(&g22)],
        ];
        let ginv: Vec<M2> = forms.gbar.iter().map(|g| g.try_inverse().unwrap_or(M2::zeros())).collect();
        let gamma = (0..forms.len())
            .map(|k| {
                let dg = |i: usize, j: usize, e: usize| d[i + j][e][k];
                // lowered Γ̄_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
                let low = |l: usize| {
                    M2::from_fn(|i, j| 0.5 * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l)))
                };
                let (l0, l1) = (low(0), low(1));
                let gi = ginv[k];
                [gi[(0, 0)] * l0 + gi[(0, 1)] * l1, gi[(1, 0)] * l0 + gi[(1, 1)] * l1]
            })
            .collect();
        Ok(Self { spec, ginv, gamma })
    }

    pub fn len(&self) -> usize {
        self.ginv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ginv.is_empty()
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spec
    }

    pub fn gradient(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.spec.d_u(f), self.spec.d_v(f))
    }

    /// Covariant Hessian ∇²f and the coordinate gradient.
    pub fn hessian(&self, f: &[f64]) -> (Vec<M2>, Vec<f64>, Vec<f64>) {
        let (fu, fv) = self.gradient(f);
        let fuu = self.spec.d_u(&fu);
        let fuv = self.spec.d_v(&fu);
        let fvv = self.spec.d_v(&fv);
        let h = (0..f.len())
            .map(|k| {
                let raw = M2::new(fuu[k], fuv[k], fuv[k], fvv[k]);
                raw - self.gamma[k][0] * fu[k] - self.gamma[k][1] * fv[k]
            })
            .collect();
        (h, fu, fv)
    }

    /// Laplace–Beltrami Δf = ḡ^{ij}∇²_{ij}f.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let (h, _, _) = self.hessian(f);
        h.iter().zip(&self.ginv).map(|(h, gi)| (gi * h).trace()).collect()
    }

    pub fn ginv(&self) -> &[M2] {
        &self.ginv
    }
}

/// Pointwise W′ density −ΔH − |A|²H − H Ric(n,n) + ½H³ of a periodic grid.
pub fn first_variation_density(grid: &SurfaceGrid, forms: &FormsField, metric: &MetricModel) -> Result<ScalarField> {
    let calc = SurfaceCalculus::new(grid.n_phi, grid.n_theta, forms)?;
    let lap = calc.laplacian(&forms.h);
    let a2 = forms.a_norm2();
    let ric_nn: Vec<f64> = if metric.is_euclidean() {
        vec![0.0; forms.len()]
    } else {
        grid.positions
            .par_iter()
            .zip(&forms.n)
            .map(|(x, n)| metric.ricci_coord(*x).map(|r| n.dot(&(r * n))))
            .collect::<Result<_>>()?
    };
    let values = (0..forms.len())
        .map(|k| {
            let h = forms.h[k];
            -lap[k] - a2[k] * h - h * ric_nn[k] + 0.5 * h * h * h
        })
        .collect();
    ScalarField::new(grid, values)
}

/// Coefficient fields of L̃₀ on a Euclidean-ambient surface.
pub struct FlatOperator {
    pub calc: SurfaceCalculus,
    h: Vec<f64>,
    aring: Vec<M2>,
    a2: Vec<f64>,
    hu: Vec<f64>,
    hv: Vec<f64>,
    c0: Vec<f64>,
    /// √(dσ/du dv), the half-density converting Fourier modes to an
    /// L²(dσ)-orthonormal family.
    pub half_density: Vec<f64>,
}

impl FlatOperator {
    pub fn new(grid: &SurfaceGrid, forms: &FormsField) -> Result<Self> {
        let calc = SurfaceCalculus::new(grid.n_phi, grid.n_theta, forms)?;
        let h = forms.h.clone();
        let (hh, hu, hv) = calc.hessian(&h);
        let a2 = forms.a_norm2();
        let c0 = (0..h.len())
            .map(|k| {
                let gi = calc.ginv[k];
                let dh = nalgebra::Vector2::new(hu[k], hv[k]);
                let grad2 = dh.dot(&(gi * dh));
                let lap = (gi * hh[k]).trace();
                let ar = &forms.aring[k];
                grad2 + h[k] * lap + 2.0 * pair(&gi, &hh[k], ar) + 2.0 * h[k] * h[k] * pair(&gi, ar, ar)
            })
            .collect();
        let half_density = forms.dsigma.iter().map(|d| d.sqrt()).collect();
        Ok(Self {
            calc,
            h,
            aring: forms.aring.clone(),
            a2,
            hu,
            hv,
            c0,
            half_density,
        })
    }

    /// L₀φ = −Δφ − |A|²φ.
    pub fn l0(&self, phi: &[f64]) -> Vec<f64> {
        self.calc
            .laplacian(phi)
            .iter()
            .zip(phi)
            .zip(&self.a2)
            .map(|((l, p), a)| -l - a * p)
            .collect()
    }

    /// L̃₀φ = L₀²φ + ½H²L₀φ + 2H⟨Å,∇²φ⟩ + 2Å(∇φ,∇H)
    ///      + φ(|∇H|² + HΔH + 2⟨∇²H,Å⟩ + 2H²|Å|²).
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let l0 = self.l0(phi);
        let l0l0 = self.l0(&l0);
        let (hess, pu, pv) = self.calc.hessian(phi);
        (0..phi.len())
            .map(|k| {
                let gi = self.calc.ginv[k];
                let h = self.h[k];
                let ar = &self.aring[k];
                let dp = gi * nalgebra::Vector2::new(pu[k], pv[k]);
                let dh = gi * nalgebra::Vector2::new(self.hu[k], self.hv[k]);
                l0l0[k] + 0.5 * h * h * l0[k]
                    + 2.0 * h * pair(&gi, ar, &hess[k])
                    + 2.0 * dp.dot(&(ar * dh))
                    + self.c0[k] * phi[k]
            })
            .collect()
    }

    /// ‖L̃₀Z‖/‖Z‖ in L²(dσ) using the grid quadrature.
    pub fn relative_residual(&self, z: &[f64], forms: &FormsField) -> f64 {
        let lz = self.apply(z);
        let norm = |f: &[f64]| {
            f.iter()
                .zip(&forms.dsigma)
                .zip(&forms.weights)
                .map(|((f, d), w)| f * f * d * w)
                .sum::<f64>()
                .sqrt()
        };
        norm(&lz) / norm(z)
    }
}

/// Galerkin matrix of L̃₀ in the basis e_k/√dσ.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub size: usize,
    pub entries: DMatrix<f64>,
    /// (|k_u|, |k_v|) of each basis function.
    pub basis: Vec<(usize, usize)>,
    /// ‖M − Mᵀ‖/‖M‖ before symmetrization.
    pub asymmetry: f64,
}

/// Largest admissible basis size for the dense eigensolve.
pub const MAX_BASIS: usize = 6000;

/// Smallest even grid that resolves Fourier degree `k_max` under a
/// fourth-order operator without aliasing into the retained modes.
pub fn operator_grid_size(k_max: usize) -> usize {
    (4 * k_max + 16).next_multiple_of(8).max(32)
}

/// Assemble L̃₀ on the family torus R T_ω(𝕋) with the flat ambient metric.
pub fn assemble_flat_operator(param: &MobiusParam, truncation: usize) -> Result<OperatorMatrix> {
    assemble_flat_operator_on(param, truncation, operator_grid_size(truncation))
}

pub fn assemble_flat_operator_on(param: &MobiusParam, truncation: usize, n_grid: usize) -> Result<OperatorMatrix> {
    let basis = FourierBasis::new(truncation, n_grid, n_grid)?;
    if basis.len() > MAX_BASIS {
        return Err(Error::TruncationTooLarge {
            size: basis.len(),
            limit: MAX_BASIS,
        });
    }
    let grid = family_grid(param, n_grid, n_grid)?;
    let forms = fundamental_forms(&grid, &MetricModel::euclidean())?;
    let op = FlatOperator::new(&grid, &forms)?;
    let n = basis.len();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|l| {
            let psi: Vec<f64> = basis
                .mode(l)
                .iter()
                .zip(&op.half_density)
                .map(|(e, s)| e / s)
                .collect();
            let lpsi = op.apply(&psi);
            let weighted: Vec<f64> = lpsi.iter().zip(&op.half_density).map(|(f, s)| f * s).collect();
            basis.project(&weighted)
        })
        .collect();
    let m = DMatrix::from_fn(n, n, |k, l| columns[l][k]);
    let asym = (&m - m.transpose()).norm() / m.norm();
    let entries = (&m + m.transpose()) * 0.5;
    Ok(OperatorMatrix {
        size: n,
        entries,
        basis: (0..n).map(|k| basis.degrees(k)).collect(),
        asymmetry: asym,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Eigenvalues sorted by absolute value.
    pub eigenvalues: Vec<f64>,
    pub near_kernel_count: usize,
    pub threshold: f64,
    /// Smallest |λ| above the threshold.
    pub gap: f64,
    /// gap / largest |λ| below the threshold.
    pub gap_ratio: f64,
    pub threshold_valid: bool,
}

/// Eigenvalues of the symmetric matrix sorted by |λ|.
pub fn sorted_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    ev
}

/// δ at the geometric midpoint of the largest relative gap among the 16
/// smallest |λ|.
pub fn adaptive_threshold(sorted: &[f64]) -> f64 {
    let m = sorted.len().min(16);
    let mut best = (0.0, f64::NAN);
    for i in 0..m.saturating_sub(1) {
        let (a, b) = (sorted[i].abs().max(f64::MIN_POSITIVE), sorted[i + 1].abs());
        let ratio = b / a;
        if ratio > best.0 {
            best = (ratio, (a * b).sqrt());
        }
    }
    best.1
}

/// Count |λ| ≤ δ; δ is chosen adaptively when `delta` is None.
pub fn near_kernel(op: &OperatorMatrix, delta: Option<f64>) -> Result<SpectrumReport> {
    let asym = (&op.entries - op.entries.transpose()).norm() / op.entries.norm();
    if asym > 1e-12 {
        return Err(Error::Check(format!("operator matrix not symmetric ({asym:e})")));
    }
    Ok(spectrum_report(sorted_spectrum(&op.entries), delta))
}

pub fn spectrum_report(eigenvalues: Vec<f64>, delta: Option<f64>) -> SpectrumReport {
    let threshold = delta.unwrap_or_else(|| adaptive_threshold(&eigenvalues));
    let count = eigenvalues.iter().filter(|l| l.abs() <= threshold).count();
    let gap = eigenvalues.get(count).map(|l| l.abs()).unwrap_or(f64::INFINITY);
    let top = if count > 0 { eigenvalues[count - 1].abs() } else { 0.0 };
    SpectrumReport {
        near_kernel_count: count,
        threshold,
        gap,
        gap_ratio: if top > 0.0 { gap / top } else { f64::INFINITY },
        threshold_valid: gap > threshold,
        eigenvalues,
    }
}

/// Euclidean normal of grid node k (helper for callers holding only forms).
pub fn normal_component(forms: &FormsField, field: impl Fn(usize) -> V3) -> Vec<f64> {
    (0..forms.len()).map(|k| field(k).dot(&forms.n[k])).collect()
}

/// ‖L̃₀Z‖/‖Z‖ for every analytic Jacobi field on R T_ω(𝕋) sampled on an
/// n × n family grid. Fields that vanish identically (the axial rotation and
/// the inversion at ω = 0, replaced there by the chart fields) are skipped.
pub fn jacobi_residuals(param: &MobiusParam, n: usize) -> Result<Vec<(String, f64)>> {
    let (mu, mv) = family_clusters(param)?;
    let base = clustered_clifford_torus(n, n, &mu, &mv)?;
    let surf = family_torus(param, &base)?;
    let (jac, forms) = jacobi_fields(param, &base)?;
    let op = FlatOperator::new(&surf, &forms)?;
    let mut out = Vec::new();
    let scale = jac.fields[0].max_abs();
    for (label, f) in jac.labels.iter().zip(&jac.fields) {
        if f.max_abs() <= 1e-12 * scale {
            continue;
        }
        out.push((label.to_string(), op.relative_residual(&f.values, &forms)));
    }
    if let Some([a, b]) = &jac.chart_fields {
        out.push(("chart_x".into(), op.relative_residual(&a.values, &forms)));
        out.push(("chart_y".into(), op.relative_residual(&b.values, &forms)));
    }
    Ok(out)
}
