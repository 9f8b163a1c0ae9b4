//! Galerkin Lyapunov–Schmidt corrector.
//!
//! Unknowns are φ = Σ c_k e_k/√dσ₀ (Fourier degree ≤ K on the base
//! surface) and multipliers β₀..β₇. Equations: the Galerkin projection of
//! W′(Σ[φ]) − β₀H[φ] − Σβ_iY_i, the area constraint, and ⟨φ, Y_i⟩ = 0.
//! The Jacobian is taken once at φ = 0 by central differences and reused
//! (chord iterations), with step halving on residual increase.

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricModel;
use crate::mobius::{family_clusters, jacobi_fields, MobiusParam, CLIFFORD_AREA};
use crate::placement::place_grid;
use crate::surface::{
    area, clustered_clifford_torus, fundamental_forms, willmore_energy, FourierBasis, ScalarField, SurfaceGrid,
};

use super::first_variation_density;

type V3 = Vector3<f64>;

#[derive(Debug, Clone, Serialize)]
pub struct CorrectorOptions {
    /// Fourier degree of the correction.
    pub degree: usize,
    /// Grid size (per direction) of the surface discretization.
    pub grid: usize,
    pub max_iterations: usize,
    /// Step of the finite-difference Jacobian.
    pub fd_step: f64,
}

impl Default for CorrectorOptions {
    fn default() -> Self {
        Self {
            degree: 6,
            grid: 48,
            max_iterations: 40,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectorResult {
    #[serde(skip)]
    pub phi: ScalarField,
    pub coefficients: Vec<f64>,
    pub beta: [f64; 8],
    pub residual_history: Vec<f64>,
    pub area_error: f64,
    /// max_i |⟨φ, Y_i⟩|.
    pub orthogonality: f64,
    pub phi_sup: f64,
    pub energy_uncorrected: f64,
    pub energy_corrected: f64,
}

/// Normal graph y + φ n over a placed surface, n the g_ε unit normal.
pub fn normal_graph(base: &SurfaceGrid, normals: &[V3], phi: &[f64]) -> Result<SurfaceGrid> {
    let positions = base
        .positions
        .iter()
        .zip(normals)
        .zip(phi)
        .map(|((p, n), f)| p + n * *f)
        .collect();
    let mut g = SurfaceGrid::from_positions(base.n_phi, base.n_theta, positions)?;
    g.weights = base.weights.clone();
    Ok(g)
}

struct Problem<'a> {
    model: &'a MetricModel,
    base: SurfaceGrid,
    normals: Vec<V3>,
    /// e_k/√dσ₀ sampled on the grid, one column per mode.
    psi: DMatrix<f64>,
    basis: FourierBasis,
    half_density: Vec<f64>,
    dsigma0: Vec<f64>,
    weights: Vec<f64>,
    /// Area-preserving Jacobi fields Y_1..Y_7.
    y: Vec<Vec<f64>>,
}

impl Problem<'_> {
    fn phi(&self, c: &[f64]) -> Vec<f64> {
        (&self.psi * DVector::from_column_slice(c)).as_slice().to_vec()
    }

    /// ∫ψ_k f dσ₀ for every mode.
    fn galerkin(&self, f: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = f.iter().zip(&self.half_density).map(|(f, s)| f * s).collect();
        self.basis.project(&w)
    }

    fn pair0(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.dsigma0.iter().zip(&self.weights))
            .map(|((a, b), (d, w))| a * b * d * w)
            .sum()
    }

    /// Nonlinear parts: W′ and H on Σ[φ], and |Σ[φ]|.
    fn evaluate(&self, c: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
        let phi = self.phi(c);
        let g = normal_graph(&self.base, &self.normals, &phi)?;
        let forms = fundamental_forms(&g, self.model)?;
        let wp = first_variation_density(&g, &forms, self.model)?;
        Ok((wp.values, forms.h.clone(), area(&forms), willmore_energy(&forms)))
    }

    fn residual(&self, c: &[f64], beta: &[f64; 8]) -> Result<DVector<f64>> {
        let (wp, h, a, _) = self.evaluate(c)?;
        let n = self.basis.len();
        let field: Vec<f64> = (0..wp.len())
            .map(|k| wp[k] - beta[0] * h[k] - (1..8).map(|i| beta[i] * self.y[i - 1][k]).sum::<f64>())
            .collect();
        let g = self.galerkin(&field);
        let phi = self.phi(c);
        let mut r = DVector::zeros(n + 8);
        r.rows_mut(0, n).copy_from_slice(&g);
        r[n] = a - CLIFFORD_AREA;
        for i in 0..7 {
            r[n + 1 + i] = self.pair0(&phi, &self.y[i]);
        }
        Ok(r)
    }
}

/// Solve for the corrector on the surface placed at P with parameters ω, R.
pub fn corrector_solve(
    model: &MetricModel,
    p: V3,
    param: &MobiusParam,
    tol: f64,
    opts: &CorrectorOptions,
) -> Result<CorrectorResult> {
    let n = opts.grid;
    let (mu, mv) = family_clusters(param)?;
    let clifford = clustered_clifford_torus(n, n, &mu, &mv)?;
    let (jac, flat_forms) = jacobi_fields(param, &clifford)?;
    let y: Vec<Vec<f64>> = jac.kernel_span()[1..].iter().map(|f| f.values.clone()).collect();
    let flat_surface = crate::mobius::family_torus(param, &clifford)?;
    let base = place_grid(model, p, &flat_surface)?;
    let base_forms = fundamental_forms(&base, model)?;
    drop(flat_forms);
    let basis = FourierBasis::new(opts.degree, n, n)?;
    let half_density: Vec<f64> = base_forms.dsigma.iter().map(|d| d.sqrt()).collect();
    let nb = basis.len();
    let mut psi = DMatrix::zeros(base.len(), nb);
    for l in 0..nb {
        let m = basis.mode(l);
        for k in 0..base.len() {
            psi[(k, l)] = m[k] / half_density[k];
        }
    }
    let prob = Problem {
        model,
        normals: base_forms.n.clone(),
        base,
        psi,
        basis,
        half_density,
        dsigma0: base_forms.dsigma.clone(),
        weights: base_forms.weights.clone(),
        y,
    };

    // Jacobian at φ = 0, β = 0
    let zero = vec![0.0; nb];
    let h = opts.fd_step;
    let cols: Vec<DVector<f64>> = (0..nb)
        .into_par_iter()
        .map(|l| {
            let mut cp = zero.clone();
            cp[l] = h;
            let mut cm = zero.clone();
            cm[l] = -h;
            let rp = prob.residual(&cp, &[0.0; 8])?;
            let rm = prob.residual(&cm, &[0.0; 8])?;
            Ok((rp - rm) / (2.0 * h))
        })
        .collect::<Result<_>>()?;
    let size = nb + 8;
    let mut jm = DMatrix::zeros(size, size);
    for (l, c) in cols.iter().enumerate() {
        jm.set_column(l, c);
    }
    let (_, h0, _, w_uncorrected) = prob.evaluate(&zero)?;
    let gh = prob.galerkin(&h0);
    for k in 0..nb {
        jm[(k, nb)] = -gh[k];
    }
    for i in 0..7 {
        let gy = prob.galerkin(&prob.y[i]);
        for k in 0..nb {
            jm[(k, nb + 1 + i)] = -gy[k];
        }
    }
    let lu = jm.lu();

    let mut c = zero;
    let mut beta = [0.0; 8];
    let mut r = prob.residual(&c, &beta)?;
    let mut history = vec![r.amax()];
    for _ in 0..opts.max_iterations {
        if r.amax() < tol {
            break;
        }
        let step = lu.solve(&(-&r)).ok_or(Error::NewtonDiverged {
            iterations: history.len(),
            residual: r.amax(),
        })?;
        let mut t = 1.0;
        loop {
            let cn: Vec<f64> = (0..nb).map(|k| c[k] + t * step[k]).collect();
            let mut bn = beta;
            for (i, b) in bn.iter_mut().enumerate() {
                *b += t * step[nb + i];
            }
            let rn = prob.residual(&cn, &bn)?;
            if rn.amax() < r.amax() || t < 1.0 / 64.0 {
                c = cn;
                beta = bn;
                r = rn;
                break;
            }
            t *= 0.5;
        }
        history.push(r.amax());
    }
    if !(r.amax() < tol) {
        return Err(Error::NewtonDiverged {
            iterations: history.len() - 1,
            residual: r.amax(),
        });
    }
    let phi = prob.phi(&c);
    let (_, _, a, w_corrected) = prob.evaluate(&c)?;
    let orthogonality = prob.y.iter().map(|y| prob.pair0(&phi, y).abs()).fold(0.0, f64::max);
    let phi_sup = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(CorrectorResult {
        phi: ScalarField::new(&prob.base, phi)?,
        coefficients: c,
        beta,
        residual_history: history,
        area_error: (a - CLIFFORD_AREA).abs() / CLIFFORD_AREA,
        orthogonality,
        phi_sup,
        energy_uncorrected: w_uncorrected,
        energy_corrected: w_corrected,
    })
}
