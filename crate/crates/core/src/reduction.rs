//! Reduced energy landscape Φ̂_ε(P, R, ω), the three curvature expansions,
//! the curvature conditions and the extremization experiments.
//!
//! The compact ambient manifold is replaced by either a global chart model
//! (Schwarzschild, space forms, a single normal-coordinate patch) or a
//! field of curvature data P ↦ (Ric_P) over a periodic chart, with the
//! local normal-coordinate metric used around each P. The expansions are
//! purely local, so this is enough to exercise their mechanisms.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::io::Write;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{CurvatureData, MetricKind, MetricModel};
use crate::mobius::MobiusParam;
use crate::numerics::{nelder_mead, power_fit};
use crate::placement::{place_grid, placed_surface};
use crate::surface::{build_sphere, fundamental_forms, willmore_energy};
use crate::variational::{corrector_solve, CorrectorOptions};

type V3 = Vector3<f64>;
type M3 = Matrix3<f64>;

/// W(𝕋) = 8π².
pub const CLIFFORD_ENERGY: f64 = 8.0 * PI * PI;

/// Curvature data as a function of the base point.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureField {
    Constant(CurvatureData),
    /// Sc(P) = sc_mean + sc_amp cos P₁ and
    /// Ric(P) = Sc/3 I + b(P) diag(−½, −½, 1) with b = aniso_mean + aniso_amp cos P₁.
    Modulated {
        sc_mean: f64,
        sc_amp: f64,
        aniso_mean: f64,
        aniso_amp: f64,
    },
}

impl CurvatureField {
    pub fn curvature(&self, p: V3) -> CurvatureData {
        match *self {
            CurvatureField::Constant(c) => c,
            CurvatureField::Modulated {
                sc_mean,
                sc_amp,
                aniso_mean,
                aniso_amp,
            } => {
                let c = p.x.cos();
                let sc = sc_mean + sc_amp * c;
                let b = aniso_mean + aniso_amp * c;
                CurvatureData::from_ricci(M3::identity() * (sc / 3.0) + M3::from_diagonal(&V3::new(-0.5, -0.5, 1.0)) * b)
            }
        }
    }
}

/// Where the surfaces live.
#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    /// One chart model with unscaled coordinates; P is a chart point.
    Global(MetricModel),
    /// Local normal-coordinate metric of the field at each P.
    Field { field: CurvatureField, rho0: f64 },
}

impl Ambient {
    /// The ε-scaled metric and the chart point where the surface is centred.
    pub fn local(&self, epsilon: f64, p: V3) -> (MetricModel, V3) {
        match self {
            Ambient::Global(m) => (m.with_epsilon(epsilon), p),
            Ambient::Field { field, rho0 } => (
                MetricModel::normal_expansion(field.curvature(p), *rho0).with_epsilon(epsilon),
                V3::zeros(),
            ),
        }
    }

    /// Curvature at P in the frame used to place surfaces.
    pub fn curvature_at(&self, p: V3) -> Result<CurvatureData> {
        match self {
            Ambient::Global(m) => m.with_epsilon(1.0).curvature_at(p),
            Ambient::Field { field, .. } => Ok(field.curvature(p)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Ambient::Global(m) => match &m.kind {
                MetricKind::Euclidean => "euclidean".into(),
                MetricKind::NormalExpansion { .. } => "synthetic".into(),
                MetricKind::Schwarzschild { m } => format!("schwarzschild(m={m})"),
                MetricKind::ConstantCurvature { k } => format!("constant_curvature(k={k})"),
            },
            Ambient::Field { .. } => "curvature_field".into(),
        }
    }
}

/// Rotation taking e_z to `axis` (shortest arc; a half turn about e_x for −e_z).
pub fn rotation_for_axis(axis: V3) -> UnitQuaternion<f64> {
    let a = axis.normalize();
    UnitQuaternion::rotation_between(&V3::z(), &a)
        .unwrap_or_else(|| UnitQuaternion::from_axis_angle(&V3::x_axis(), PI))
}

pub fn axis_from_angles(theta: f64, phi: f64) -> V3 {
    V3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Grid-size policy for energy evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Resolution {
    Fixed(usize),
    /// Double from `start` until successive energies agree to `tol`
    /// (relative); stop at `cap` and flag the result.
    Adaptive { start: usize, tol: f64, cap: usize },
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::Adaptive {
            start: 32,
            tol: 1e-10,
            cap: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEval {
    pub energy: f64,
    pub n: usize,
    /// The resolution cap was reached before convergence.
    pub capped: bool,
}

fn uncorrected(model: &MetricModel, center: V3, param: &MobiusParam, n: usize) -> Result<f64> {
    let surf = placed_surface(model, center, param, n)?;
    Ok(willmore_energy(&fundamental_forms(&surf, model)?))
}

/// W_{g_ε} of exp_P(ε R T_ω(𝕋)), optionally after the corrector.
pub fn reduced_energy(
    ambient: &Ambient,
    epsilon: f64,
    p: V3,
    param: &MobiusParam,
    corrected: bool,
    res: Resolution,
) -> Result<EnergyEval> {
    let (model, center) = ambient.local(epsilon, p);
    if corrected {
        let n = match res {
            Resolution::Fixed(n) => n,
            Resolution::Adaptive { start, .. } => start.max(48),
        };
        let opts = CorrectorOptions {
            grid: n,
            ..CorrectorOptions::default()
        };
        let r = corrector_solve(&model, center, param, 1e-10, &opts)?;
        return Ok(EnergyEval {
            energy: r.energy_corrected,
            n,
            capped: false,
        });
    }
    match res {
        Resolution::Fixed(n) => Ok(EnergyEval {
            energy: uncorrected(&model, center, param, n)?,
            n,
            capped: false,
        }),
        Resolution::Adaptive { start, tol, cap } => {
            let mut n = start;
            let mut prev = uncorrected(&model, center, param, n)?;
            loop {
                if n * 2 > cap {
                    return Ok(EnergyEval {
                        energy: prev,
                        n,
                        capped: true,
                    });
                }
                n *= 2;
                let next = uncorrected(&model, center, param, n)?;
                if (next - prev).abs() <= tol * next.abs() {
                    return Ok(EnergyEval {
                        energy: next,
                        n,
                        capped: false,
                    });
                }
                prev = next;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionFit {
    pub abscissae: Vec<f64>,
    pub energies: Vec<f64>,
    pub c0: f64,
    /// Leading coefficient from c₀ + c·x² + d·x^k, k = `correction_power`.
    pub c_lead: f64,
    /// 4 when the scaled metric is even in x (no odd remainder), else 3.
    pub correction_power: i32,
    pub c_correction: f64,
    /// Leading coefficient from c₀ + c·x² + d·x³.
    pub c_lead_cubic: f64,
    /// Leading coefficient from c₀ + c·x².
    pub c_lead_quadratic: f64,
    pub target: f64,
    pub rel_error: f64,
    pub residual_norm: f64,
    pub expected_c0: f64,
    pub capped: bool,
}

/// Whether W(x) is even in the scale: true for normal-coordinate patches
/// centred at the expansion point, whose ε-dependence is through ε² only.
fn even_in_scale(ambient: &Ambient, p: V3) -> bool {
    let (model, center) = ambient.local(0.1, p);
    match model.kind {
        MetricKind::Euclidean => true,
        MetricKind::NormalExpansion { .. } => center == V3::zeros(),
        _ => false,
    }
}

fn fit_expansion(
    x: Vec<f64>,
    energies: Vec<f64>,
    target: f64,
    expected_c0: f64,
    even: bool,
    capped: bool,
) -> Result<ExpansionFit> {
    if x.len() < 4 {
        return Err(Error::Config(format!("expansion fits need at least 4 abscissae, got {}", x.len())));
    }
    let k = if even { 4 } else { 3 };
    let (c, resid) = power_fit(&x, &energies, &[0, 2, k]);
    let (cub, _) = power_fit(&x, &energies, &[0, 2, 3]);
    let (q, _) = power_fit(&x, &energies, &[0, 2]);
    let rel_error = if target != 0.0 {
        (c[1] - target).abs() / target.abs()
    } else {
        (c[1] - target).abs()
    };
    Ok(ExpansionFit {
        abscissae: x,
        energies,
        c0: c[0],
        c_lead: c[1],
        correction_power: k,
        c_correction: c[2],
        c_lead_cubic: cub[1],
        c_lead_quadratic: q[1],
        target,
        rel_error,
        residual_norm: resid,
        expected_c0,
        capped,
    })
}

/// −4√2π²(Sc − Ric(a, a)) for the torus axis a.
pub fn symmetric_target(curv: &CurvatureData, axis: V3) -> f64 {
    let a = axis.normalize();
    -4.0 * SQRT_2 * PI * PI * (curv.sc - curv.ricci_form(&a, &a))
}

/// −(8√2/3)π²Sc.
pub fn degenerate_target(curv: &CurvatureData) -> f64 {
    -8.0 * SQRT_2 / 3.0 * PI * PI * curv.sc
}

/// −(8π/3)Sc.
pub fn sphere_target(curv: &CurvatureData) -> f64 {
    -8.0 * PI / 3.0 * curv.sc
}

/// Fit W(ε) of ω = 0 tori with axis `axis` at P against ε².
pub fn symmetric_expansion_fit(
    ambient: &Ambient,
    p: V3,
    axis: V3,
    eps_list: &[f64],
    res: Resolution,
) -> Result<ExpansionFit> {
    if eps_list.iter().any(|e| !(*e > 0.0 && *e <= 0.2)) {
        return Err(Error::Config("symmetric fit needs ε in (0, 0.2]".into()));
    }
    let param = MobiusParam::new([0.0, 0.0], rotation_for_axis(axis))?;
    let evals: Vec<EnergyEval> = eps_list
        .par_iter()
        .map(|&e| reduced_energy(ambient, e, p, &param, false, res))
        .collect::<Result<_>>()?;
    let target = symmetric_target(&ambient.curvature_at(p)?, axis);
    fit_expansion(
        eps_list.to_vec(),
        evals.iter().map(|e| e.energy).collect(),
        target,
        CLIFFORD_ENERGY,
        even_in_scale(ambient, p),
        evals.iter().any(|e| e.capped),
    )
}

/// Fit W of round spheres of radius r through P (centre P + r·direction).
pub fn sphere_expansion_fit(ambient: &Ambient, p: V3, direction: V3, radii: &[f64]) -> Result<ExpansionFit> {
    let dir = direction.normalize();
    let unit = build_sphere(dir, 1.0, 32, 48)?;
    let energies: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let (model, center) = ambient.local(r, p);
            let affine = match model.kind {
                MetricKind::Euclidean => true,
                MetricKind::NormalExpansion { .. } => center == V3::zeros(),
                _ => false,
            };
            if !affine {
                return Err(Error::Config(
                    "sphere fits need a normal-coordinate patch centred at P".into(),
                ));
            }
            let g = place_grid(&model, center, &unit)?;
            Ok(willmore_energy(&fundamental_forms(&g, &model)?))
        })
        .collect::<Result<_>>()?;
    let target = sphere_target(&ambient.curvature_at(p)?);
    fit_expansion(radii.to_vec(), energies, target, 16.0 * PI, even_in_scale(ambient, p), false)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateRow {
    pub modulus: f64,
    /// (W_{g_ε} − 8π²)/ε².
    pub value: f64,
    pub deviation: f64,
    /// The same quotient at ε/2.
    pub value_half: f64,
    /// (4q(ε/2) − q(ε))/3: the quotient with its ω-independent O(ε²)
    /// remainder removed.
    pub extrapolated: f64,
    pub extrapolated_deviation: f64,
    pub n: usize,
    pub capped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateFit {
    pub epsilon: f64,
    pub target: f64,
    pub rows: Vec<DegenerateRow>,
    /// Raw deviation strictly decreasing along the sorted moduli, capped rows excluded.
    pub monotone: bool,
    /// The same for the extrapolated deviation.
    pub extrapolated_monotone: bool,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// (W − 8π²)/ε² of degenerating tori R T_ω(𝕋), ω = |ω| e_x, at P.
///
/// At fixed ε the quotient tends to target + O(ε²) as |ω| → 1, so once the
/// degeneration error falls below that remainder the raw deviation stops
/// decreasing; the ε/2 companion run separates the two effects.
pub fn degenerate_expansion_fit(
    ambient: &Ambient,
    p: V3,
    rotation: UnitQuaternion<f64>,
    moduli: &[f64],
    epsilon: f64,
    res: Resolution,
) -> Result<DegenerateFit> {
    let target = degenerate_target(&ambient.curvature_at(p)?);
    let quotient = |param: &MobiusParam, eps: f64| -> Result<(f64, EnergyEval)> {
        let e = reduced_energy(ambient, eps, p, param, false, res)?;
        Ok(((e.energy - CLIFFORD_ENERGY) / (eps * eps), e))
    };
    let mut rows: Vec<DegenerateRow> = moduli
        .par_iter()
        .map(|&s| {
            let param = MobiusParam::new([s, 0.0], rotation)?;
            let (value, e) = quotient(&param, epsilon)?;
            let (value_half, eh) = quotient(&param, epsilon / 2.0)?;
            let extrapolated = (4.0 * value_half - value) / 3.0;
            Ok(DegenerateRow {
                modulus: s,
                value,
                deviation: (value - target).abs(),
                value_half,
                extrapolated,
                extrapolated_deviation: (extrapolated - target).abs(),
                n: e.n.max(eh.n),
                capped: e.capped || eh.capped,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.modulus.total_cmp(&b.modulus));
    let ok: Vec<&DegenerateRow> = rows.iter().filter(|r| !r.capped).collect();
    let monotone = strictly_decreasing(&ok.iter().map(|r| r.deviation).collect::<Vec<_>>());
    let extrapolated_monotone = strictly_decreasing(&ok.iter().map(|r| r.extrapolated_deviation).collect::<Vec<_>>());
    Ok(DegenerateFit {
        epsilon,
        target,
        rows,
        monotone,
        extrapolated_monotone,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// 3 sup_P (Sc − λ_min)
    pub lhs1: f64,
    /// 2 sup_P Sc
    pub rhs1: f64,
    /// 3 inf_P (Sc − λ_max)
    pub lhs2: f64,
    /// 2 inf_P Sc
    pub rhs2: f64,
    pub assump1_holds: bool,
    pub assump2_holds: bool,
    pub witness1: [f64; 3],
    pub witness1_direction: [f64; 3],
    pub witness2: [f64; 3],
    pub witness2_direction: [f64; 3],
    /// Largest |Sc − Ric(ν,ν) − (½Sc + K(ν^⊥))| over the sampled points and directions.
    pub sectional_identity_defect: f64,
}

fn sectional_of_normal_plane(c: &CurvatureData, nu: &V3) -> f64 {
    let n = nu.normalize();
    let t = if n.x.abs() < 0.9 { V3::x() } else { V3::y() };
    let e1 = (t - n * n.dot(&t)).normalize();
    let e2 = n.cross(&e1);
    let mut k = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                for d in 0..3 {
                    k += c.riem[a][b][cc][d] * e1[a] * e2[b] * e1[cc] * e2[d];
                }
            }
        }
    }
    k
}

/// Evaluate the curvature conditions over sample points; the inner
/// extrema over ν are the Ricci eigenvalue extremes.
pub fn condition_check(ambient: &Ambient, points: &[V3], dirs: &[V3]) -> Result<ConditionReport> {
    if points.is_empty() || dirs.is_empty() {
        return Err(Error::Config("condition check needs sample points and directions".into()));
    }
    let mut best1 = (f64::NEG_INFINITY, V3::zeros(), V3::zeros());
    let mut best2 = (f64::INFINITY, V3::zeros(), V3::zeros());
    let (mut sup_sc, mut inf_sc) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut defect: f64 = 0.0;
    for &p in points {
        let c = ambient.curvature_at(p)?;
        let eig = c.ric.symmetric_eigen();
        let (mut imin, mut imax) = (0, 0);
        for i in 0..3 {
            if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                imin = i;
            }
            if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                imax = i;
            }
        }
        let v1 = c.sc - eig.eigenvalues[imin];
        if v1 > best1.0 {
            best1 = (v1, p, eig.eigenvectors.column(imin).into_owned());
        }
        let v2 = c.sc - eig.eigenvalues[imax];
        if v2 < best2.0 {
            best2 = (v2, p, eig.eigenvectors.column(imax).into_owned());
        }
        sup_sc = sup_sc.max(c.sc);
        inf_sc = inf_sc.min(c.sc);
        for nu in dirs {
            let n = nu.normalize();
            let lhs = c.sc - c.ricci_form(&n, &n);
            defect = defect.max((lhs - 0.5 * c.sc - sectional_of_normal_plane(&c, &n)).abs());
        }
    }
    let (lhs1, rhs1, lhs2, rhs2) = (3.0 * best1.0, 2.0 * sup_sc, 3.0 * best2.0, 2.0 * inf_sc);
    Ok(ConditionReport {
        lhs1,
        rhs1,
        lhs2,
        rhs2,
        assump1_holds: lhs1 > rhs1,
        assump2_holds: lhs2 < rhs2,
        witness1: best1.1.into(),
        witness1_direction: best1.2.into(),
        witness2: best2.1.into(),
        witness2_direction: best2.2.into(),
        sectional_identity_defect: defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub p: [f64; 3],
    pub axis: [f64; 3],
    pub omega: [f64; 2],
    pub energy: f64,
    pub corrected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeTable {
    pub epsilon: f64,
    pub model: String,
    pub rows: Vec<LandscapeRow>,
}

pub const LANDSCAPE_HEADER: &str = "P_x,P_y,P_z,axis_x,axis_y,axis_z,omega_x,omega_y,energy";

impl LandscapeTable {
    pub fn write_csv(&self, mut w: impl Write, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{LANDSCAPE_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.15e}",
                r.p[0], r.p[1], r.p[2], r.axis[0], r.axis[1], r.axis[2], r.omega[0], r.omega[1], r.energy
            )?;
        }
        Ok(())
    }
}

/// Evaluate the reduced energy over a list of (P, axis, ω) in parallel,
/// preserving the input order.
pub fn landscape(
    ambient: &Ambient,
    epsilon: f64,
    points: &[(V3, V3, [f64; 2])],
    res: Resolution,
) -> Result<LandscapeTable> {
    let rows = points
        .par_iter()
        .map(|&(p, axis, omega)| {
            let param = MobiusParam::new(omega, rotation_for_axis(axis))?;
            let e = reduced_energy(ambient, epsilon, p, &param, false, res)?;
            let a = axis.normalize();
            Ok(LandscapeRow {
                p: p.into(),
                axis: a.into(),
                omega,
                energy: e.energy,
                corrected: false,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LandscapeTable {
        epsilon,
        model: ambient.name(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Domain {
    /// Free P in a chart; boundary samples are taken at the optimum and at
    /// the listed points.
    Chart { boundary_points: Vec<[f64; 3]> },
    /// τ ≤ |P| ≤ 1/τ.
    Annulus { tau: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremizeOptions {
    pub mode: Mode,
    pub domain: Domain,
    pub r_boundary: f64,
    pub grid: usize,
    pub max_evals: usize,
    pub f_tol: f64,
    /// Starting points in the search coordinates (see `decode`); several
    /// starts are tried and the best result kept.
    pub starts: Vec<Vec<f64>>,
    /// Also solve the corrector at the optimum.
    pub certify: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremumReport {
    pub mode: Mode,
    pub point: LandscapeRow,
    /// Best boundary sample (min for Mode::Min, max for Mode::Max).
    pub boundary_extreme: f64,
    /// Positive when the optimum beats every boundary sample.
    pub margin: f64,
    pub interior: bool,
    pub evaluations: usize,
    pub boundary_samples: usize,
    /// max |β_i|, i ≥ 1, and the corrected energy, when certified.
    pub multiplier_max: Option<f64>,
    pub corrected_energy: Option<f64>,
}

/// Map search coordinates to (P, axis, ω).
///
/// Chart: z = [P₁, P₂, P₃, θ, φ, w₁, w₂]. Annulus: z = [s, ϑ, ϕ, θ, φ, w₁, w₂]
/// with |P| = τ + (1/τ − τ)/(1 + e^{−s}) along the direction (ϑ, ϕ).
/// In both, ω = r_b w/√(1 + |w|²).
pub fn decode(domain: &Domain, r_b: f64, z: &[f64]) -> (V3, V3, [f64; 2]) {
    let p = match domain {
        Domain::Chart { .. } => V3::new(z[0], z[1], z[2]),
        Domain::Annulus { tau } => {
            let r = tau + (1.0 / tau - tau) / (1.0 + (-z[0]).exp());
            r * axis_from_angles(z[1], z[2])
        }
    };
    let axis = axis_from_angles(z[3], z[4]);
    let s = r_b / (1.0 + z[5] * z[5] + z[6] * z[6]).sqrt();
    (p, axis, [s * z[5], s * z[6]])
}

/// Boundary sample set: 16 ω-directions at |ω| = r_b times 6 axes at the
/// given points, plus (for the annulus) ω = 0 tori on both boundary spheres.
fn boundary_samples(domain: &Domain, r_b: f64, p_star: V3) -> Vec<(V3, V3, [f64; 2])> {
    let axes = [V3::x(), -V3::x(), V3::y(), -V3::y(), V3::z(), -V3::z()];
    let mut pts = vec![p_star];
    let mut out = Vec::new();
    match domain {
        Domain::Chart { boundary_points } => pts.extend(boundary_points.iter().map(|p| V3::from(*p))),
        Domain::Annulus { tau } => {
            for r in [*tau, 1.0 / tau] {
                for d in axes {
                    for a in axes {
                        out.push((r * d, a, [0.0, 0.0]));
                    }
                }
            }
            pts.push(p_star.normalize() * (p_star.norm() * 1.2).min(1.0 / tau));
        }
    }
    for p in pts {
        for a in axes {
            for k in 0..16 {
                let t = TAU * k as f64 / 16.0;
                out.push((p, a, [r_b * t.cos(), r_b * t.sin()]));
            }
        }
    }
    out
}

/// Derivative-free search for an interior extremum of the uncorrected
/// reduced energy, with a boundary-margin check.
pub fn extremize(ambient: &Ambient, epsilon: f64, opts: &ExtremizeOptions) -> Result<ExtremumReport> {
    if !(opts.r_boundary > 0.0 && opts.r_boundary < 1.0) {
        return Err(Error::Config("boundary radius must lie in (0, 1)".into()));
    }
    if opts.starts.is_empty() || opts.starts.iter().any(|s| s.len() != 7) {
        return Err(Error::Config("extremize needs 7-dimensional starting points".into()));
    }
    let sign = match opts.mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    let res = Resolution::Fixed(opts.grid);
    let energy = |p: V3, axis: V3, omega: [f64; 2]| -> Result<f64> {
        let param = MobiusParam::new(omega, rotation_for_axis(axis))?;
        Ok(reduced_energy(ambient, epsilon, p, &param, false, res)?.energy)
    };
    let results: Vec<(Vec<f64>, f64, usize)> = opts
        .starts
        .par_iter()
        .map(|z0| {
            let step = [0.3, 0.3, 0.3, 0.4, 0.4, 0.3, 0.3];
            let r = nelder_mead(
                |z| {
                    let (p, a, w) = decode(&opts.domain, opts.r_boundary, z);
                    energy(p, a, w).map(|e| sign * e).unwrap_or(f64::INFINITY)
                },
                z0,
                &step,
                opts.f_tol,
                opts.max_evals,
            );
            (r.x, r.value, r.evaluations)
        })
        .collect();
    let evaluations = results.iter().map(|r| r.2).sum();
    let best = results
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    let (p, axis, omega) = decode(&opts.domain, opts.r_boundary, &best.0);
    let value = sign * best.1;
    if !value.is_finite() {
        return Err(Error::Check("no admissible point found by the optimizer".into()));
    }
    let samples = boundary_samples(&opts.domain, opts.r_boundary, p);
    let bvals: Vec<f64> = samples
        .par_iter()
        .map(|&(q, a, w)| energy(q, a, w))
        .collect::<Result<_>>()?;
    let boundary_extreme = match opts.mode {
        Mode::Min => bvals.iter().copied().fold(f64::INFINITY, f64::min),
        Mode::Max => bvals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let margin = sign * (boundary_extreme - value);
    let omega_inside = omega[0].hypot(omega[1]) < 0.98 * opts.r_boundary;
    let p_inside = match opts.domain {
        Domain::Chart { .. } => true,
        Domain::Annulus { tau } => {
            let r = p.norm();
            r > tau * 1.02 && r < 0.98 / tau
        }
    };
    let (multiplier_max, corrected_energy) = if opts.certify {
        let (model, center) = ambient.local(epsilon, p);
        let param = MobiusParam::new(omega, rotation_for_axis(axis))?;
        let c = corrector_solve(&model, center, &param, 1e-10, &CorrectorOptions::default())?;
        (
            Some(c.beta[1..].iter().fold(0.0f64, |m, b| m.max(b.abs()))),
            Some(c.energy_corrected),
        )
    } else {
        (None, None)
    };
    Ok(ExtremumReport {
        mode: opts.mode,
        point: LandscapeRow {
            p: p.into(),
            axis: axis.into(),
            omega,
            energy: value,
            corrected: false,
        },
        boundary_extreme,
        margin,
        interior: margin > 0.0 && omega_inside && p_inside,
        evaluations,
        boundary_samples: samples.len(),
        multiplier_max,
        corrected_energy,
    })
}

/// (W − 8π²)/ε² of the ω = 0 torus with the given axis at P.
pub fn symmetric_coefficient(ambient: &Ambient, epsilon: f64, p: V3, axis: V3, n: usize) -> Result<f64> {
    let param = MobiusParam::new([0.0, 0.0], rotation_for_axis(axis))?;
    let e = reduced_energy(ambient, epsilon, p, &param, false, Resolution::Fixed(n))?;
    Ok((e.energy - CLIFFORD_ENERGY) / (epsilon * epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_for_axis_maps_z_onto_the_axis() {
        for a in [V3::z(), -V3::z(), V3::new(1.0, -2.0, 0.5), axis_from_angles(1.1, -0.4)] {
            let r = rotation_for_axis(a);
            assert!((r * V3::z() - a.normalize()).norm() < 1e-12);
        }
    }

    #[test]
    fn fit_picks_the_remainder_power_by_parity() {
        let x = vec![0.025, 0.05, 0.075, 0.1];
        let even: Vec<f64> = x.iter().map(|t: &f64| 3.0 - 5.0 * t * t + 40.0 * t.powi(4)).collect();
        let f = fit_expansion(x.clone(), even, -5.0, 3.0, true, false).unwrap();
        assert_eq!(f.correction_power, 4);
        assert!(f.rel_error < 1e-9 && (f.c0 - 3.0).abs() < 1e-12);
        assert!((f.c_lead_cubic + 5.0).abs() > 1e-3);

        let odd: Vec<f64> = x.iter().map(|t: &f64| 3.0 - 5.0 * t * t + 7.0 * t.powi(3)).collect();
        let f = fit_expansion(x, odd, -5.0, 3.0, false, false).unwrap();
        assert_eq!(f.correction_power, 3);
        assert!(f.rel_error < 1e-9 && (f.c_correction - 7.0).abs() < 1e-6);
    }

    #[test]
    fn fits_need_four_abscissae() {
        assert!(fit_expansion(vec![0.1, 0.2, 0.3], vec![0.0; 3], 1.0, 0.0, true, false).is_err());
    }

    #[test]
    fn isotropic_fields_are_borderline() {
        let amb = Ambient::Global(MetricModel::normal_expansion(CurvatureData::from_ricci(Matrix3::identity()), 1.0));
        let rep = condition_check(&amb, &[V3::zeros()], &[V3::x(), V3::y(), V3::z()]).unwrap();
        assert!((rep.lhs1 - rep.rhs1).abs() < 1e-9);
        assert!(rep.sectional_identity_defect < 1e-12);
        assert!(!rep.assump1_holds && !rep.assump2_holds);
    }

    #[test]
    fn landscape_csv_has_comment_then_header() {
        let t = LandscapeTable {
            epsilon: 0.1,
            model: "euclidean".into(),
            rows: vec![LandscapeRow {
                p: [0.0; 3],
                axis: [0.0, 0.0, 1.0],
                omega: [0.5, 0.0],
                energy: CLIFFORD_ENERGY,
                corrected: false,
            }],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf, Some("config sha256=abc")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config sha256=abc");
        assert_eq!(lines[1], LANDSCAPE_HEADER);
        assert_eq!(lines[2].split(',').count(), 9);
    }
}
