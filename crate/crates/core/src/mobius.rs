//! Sphere inversions of the Clifford torus, area-preserving offsets and the
//! disk-parametrized family T_ω with its Jacobi fields.
//!
//! For an offset ξ = √2 + 1 + ξ̃ and the radius η making the area 4√2π²,
//!
//!   T(x) = Refl_x(Φ_{ξe_x,η}(x)) + (ξ − η²/ξ) e_x
//!        = η² / |x − ξe_x|² · (x₁ − |x|²/ξ, x₂, x₃),
//!
//! a Möbius map fixing the origin. The disk chart is s = |ω| with
//!
//!   ξ = (√2 + 1)(1 + s²)/(2s),   ξ̃ = (√2 + 1)(1 − s)²/(2s).
//!
//! Since the area condition makes (η/ξ)⁴ an even function of 1/ξ and 1/ξ is
//! odd in s, T_ω extends analytically across ω = 0, where its derivative is
//! the special conformal field. As s → 1 the handle collapses onto the
//! origin and the image converges to the sphere of radius ⁴√(2π²) centred at
//! ⁴√(2π²) e_x. General directions are obtained by conjugating with the
//! rotation about e_z taking e_x to ω/|ω|.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::{Mutex, OnceLock};

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::numerics::{brent, graded_integral, ClusterMap};
use crate::surface::grid::{clustered_clifford_torus, MapJet, ScalarField, SurfaceGrid};
use crate::surface::{fundamental_forms, FormsField};
use crate::metric::MetricModel;

type V3 = Vector3<f64>;
type M3 = Matrix3<f64>;

/// |𝕋| = 4√2 π².
pub const CLIFFORD_AREA: f64 = 4.0 * SQRT_2 * PI * PI;

/// ⁴√(2π²), radius of the limiting sphere.
pub fn limit_radius() -> f64 {
    (2.0 * PI * PI).powf(0.25)
}

const OUTER: f64 = SQRT_2 + 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSpec {
    pub center: V3,
    pub radius: f64,
}

impl InversionSpec {
    pub fn new(center: V3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Config(format!("invalid inversion sphere ({center:?}, {radius})")));
        }
        Ok(Self { center, radius })
    }

    /// Φ(x) with its Jacobian and component Hessians.
    pub fn jet(&self, x: V3) -> Result<MapJet> {
        let d = x - self.center;
        let r2 = d.norm_squared();
        if !(r2 > 0.0) {
            return Err(Error::InversionSingularity);
        }
        let e2 = self.radius * self.radius;
        let f = e2 / r2;
        let jac = f * (M3::identity() - 2.0 * d * d.transpose() / r2);
        let mut hess = [M3::zeros(); 3];
        for (i, h) in hess.iter_mut().enumerate() {
            // ∂_k∂_l (e² d_i / r²)
            *h = M3::from_fn(|k, l| {
                let di = if i == k { 1.0 } else { 0.0 };
                let dl = if i == l { 1.0 } else { 0.0 };
                let kl = if k == l { 1.0 } else { 0.0 };
                e2 * (-2.0 * (di * d[l] + dl * d[k] + kl * d[i]) / (r2 * r2)
                    + 8.0 * d[i] * d[k] * d[l] / (r2 * r2 * r2))
            });
        }
        Ok(MapJet {
            value: self.center + f * d,
            jac,
            hess,
        })
    }
}

/// Φ_{x₀,η}(x) = x₀ + η²(x − x₀)/|x − x₀|², pointwise.
pub fn invert(spec: &InversionSpec, points: &[V3]) -> Result<Vec<V3>> {
    points
        .iter()
        .map(|&x| {
            let d = x - spec.center;
            let r2 = d.norm_squared();
            if !(r2 > 0.0) {
                return Err(Error::InversionSingularity);
            }
            Ok(spec.center + spec.radius * spec.radius / r2 * d)
        })
        .collect()
}

/// |Φ_{ξe_x,η}(𝕋)| as a function of ξ̃ = ξ − (√2+1) > 0.
///
/// The θ-integral is done in closed form, ∫dθ/(a − b cos θ)² = 2πa/(a² − b²)^{3/2},
/// and the remaining φ-integral on panels graded towards the near-singular
/// point φ = 0.
pub fn area_function(xi_tilde: f64, eta: f64, order: usize) -> f64 {
    let xi = OUTER + xi_tilde;
    let h0 = (xi_tilde / 4.0).min(0.25);
    let integrand = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let half = (0.5 * phi).sin();
        let amb = (2.0 * half * half + xi_tilde).powi(2) + s * s;
        let apb = (xi + SQRT_2 + c).powi(2) + s * s;
        let a = 3.0 + 2.0 * SQRT_2 * c + xi * xi;
        (SQRT_2 + c) * TAU * a / (amb * apb).powf(1.5)
    };
    2.0 * eta.powi(4) * graded_integral(integrand, 0.0, PI, h0, order)
}

/// ∂/∂ξ̃ of [`area_function`], differentiating the integrand in closed form.
pub fn area_function_derivative(xi_tilde: f64, eta: f64, order: usize) -> f64 {
    let xi = OUTER + xi_tilde;
    let h0 = (xi_tilde / 4.0).min(0.25);
    let integrand = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let half = (0.5 * phi).sin();
        let near = 2.0 * half * half + xi_tilde;
        let far = xi + SQRT_2 + c;
        let amb = near * near + s * s;
        let apb = far * far + s * s;
        let a = 3.0 + 2.0 * SQRT_2 * c + xi * xi;
        let p = amb * apb;
        let dp = 2.0 * near * apb + 2.0 * far * amb;
        (SQRT_2 + c) * TAU * (2.0 * xi * p.powf(-1.5) - 1.5 * a * p.powf(-2.5) * dp)
    };
    2.0 * eta.powi(4) * graded_integral(integrand, 0.0, PI, h0, order)
}

fn area_converged(xi_tilde: f64, eta: f64) -> Result<f64> {
    let a = area_function(xi_tilde, eta, 20);
    let b = area_function(xi_tilde, eta, 30);
    if (a - b).abs() > 1e-10 * b.abs() {
        return Err(Error::Quadrature(format!(
            "area function unresolved at xi_tilde={xi_tilde:e}, eta={eta}: {a} vs {b}"
        )));
    }
    Ok(b)
}

fn offset_cache() -> &'static Mutex<HashMap<u64, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// ξ̃_η = ξ_η − (√2 + 1): the offset beyond the outer equator placing the
/// inversion centre so that the image keeps the area 4√2π².
pub fn small_radius_offset(eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Config(format!("inversion radius must be positive, got {eta}")));
    }
    if let Some(v) = offset_cache().lock().unwrap().get(&eta.to_bits()) {
        return Ok(*v);
    }
    let value = if eta <= 4.0 {
        // unknown t = ln ξ̃; the area decreases in ξ̃
        let f = |t: f64| area_converged(t.exp(), eta).map(|a| a / CLIFFORD_AREA - 1.0);
        let guess = if eta < 1.5 {
            eta * eta / (2.0 * limit_radius())
        } else {
            (eta - OUTER).max(0.1) + 0.3
        };
        let (mut lo, mut hi) = (guess.ln() - 1.0, guess.ln() + 1.0);
        for _ in 0..60 {
            if f(lo)? > 0.0 {
                break;
            }
            lo -= 1.0;
        }
        for _ in 0..60 {
            if f(hi)? < 0.0 {
                break;
            }
            hi += 1.0;
        }
        let mut err = None;
        let t = brent(
            |t| match f(t) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-14,
            200,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        t.exp()
    } else {
        // unknown q with ξ = η(1 + q)
        let f = |q: f64| area_converged(eta * (1.0 + q) - OUTER, eta).map(|a| a / CLIFFORD_AREA - 1.0);
        let mut hi = 4.0 / (eta * eta);
        while f(hi)? > 0.0 {
            hi *= 2.0;
        }
        let mut lo = hi / 4.0;
        while f(lo)? < 0.0 {
            lo /= 2.0;
            if lo < 1e-14 {
                return Err(Error::Bracket(format!("no lower bracket at eta={eta}")));
            }
        }
        let q = brent(|q| f(q).unwrap_or(f64::NAN), lo, hi, 1e-15, 200)?;
        eta * (1.0 + q) - OUTER
    };
    offset_cache().lock().unwrap().insert(eta.to_bits(), value);
    Ok(value)
}

/// ξ_η, the unique offset > √2+1 with |Φ_{−ξ_η e_x, η}(𝕋)| = 4√2π².
pub fn area_preserving_offset(eta: f64) -> Result<f64> {
    Ok(OUTER + small_radius_offset(eta)?)
}

/// Disk point plus a rotation applied after the Möbius map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusParam {
    pub omega: [f64; 2],
    pub rotation: UnitQuaternion<f64>,
}

impl MobiusParam {
    pub fn new(omega: [f64; 2], rotation: UnitQuaternion<f64>) -> Result<Self> {
        let m = (omega[0] * omega[0] + omega[1] * omega[1]).sqrt();
        if !(m < 1.0) {
            return Err(Error::OmegaOutsideDisk(m));
        }
        Ok(Self { omega, rotation })
    }

    pub fn identity() -> Self {
        Self {
            omega: [0.0, 0.0],
            rotation: UnitQuaternion::identity(),
        }
    }

    pub fn along_x(modulus: f64) -> Result<Self> {
        Self::new([modulus, 0.0], UnitQuaternion::identity())
    }

    pub fn modulus(&self) -> f64 {
        self.omega[0].hypot(self.omega[1])
    }

    pub fn direction_angle(&self) -> f64 {
        self.omega[1].atan2(self.omega[0])
    }

    /// Axis R e_z of the underlying torus of revolution.
    pub fn axis(&self) -> V3 {
        self.rotation * V3::z()
    }
}

/// ξ̃ as a function of |ω|.
pub fn offset_of_modulus(s: f64) -> f64 {
    OUTER * (1.0 - s).powi(2) / (2.0 * s)
}

/// Inverse of [`offset_of_modulus`].
pub fn modulus_of_offset(xi_tilde: f64) -> f64 {
    let c = xi_tilde / OUTER;
    1.0 + c - (c * c + 2.0 * c).sqrt()
}

/// The area-preserving radius for a given offset: η⁴ A(ξ̃, 1) = 4√2π².
pub fn radius_of_offset(xi_tilde: f64) -> Result<f64> {
    Ok((CLIFFORD_AREA / area_converged(xi_tilde, 1.0)?).powf(0.25))
}

/// η as a function of |ω| under the disk chart.
pub fn eta_of_modulus(s: f64) -> Result<f64> {
    radius_of_offset(offset_of_modulus(s))
}

/// |ω| of the family member with inversion radius η.
pub fn modulus_of_eta(eta: f64) -> Result<f64> {
    Ok(modulus_of_offset(small_radius_offset(eta)?))
}

/// Jet of T_s at x for given (ξ, η).
fn family_map_jet(xi: f64, eta: f64, x: V3) -> Result<MapJet> {
    let d = x - V3::new(xi, 0.0, 0.0);
    let r2 = d.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::InversionSingularity);
    }
    let f = eta * eta / r2;
    let df = -2.0 * f / r2 * d;
    let d2f = f * (8.0 * d * d.transpose() / (r2 * r2) - 2.0 * M3::identity() / r2);
    let v = V3::new(x[0] - x.norm_squared() / xi, x[1], x[2]);
    let mut dv = M3::identity();
    for k in 0..3 {
        dv[(0, k)] -= 2.0 * x[k] / xi;
    }
    let mut hess = [M3::zeros(); 3];
    for (i, h) in hess.iter_mut().enumerate() {
        let gi = dv.row(i).transpose();
        *h = d2f * v[i] + df * gi.transpose() + gi * df.transpose();
        if i == 0 {
            *h -= f * 2.0 / xi * M3::identity();
        }
    }
    Ok(MapJet {
        value: f * v,
        jac: v * df.transpose() + f * dv,
        hess,
    })
}

/// x ↦ Q · inner(A x) with its jet.
fn conjugated(q: &M3, a: &M3, inner: MapJet) -> MapJet {
    let mut hess = [M3::zeros(); 3];
    for (i, h) in hess.iter_mut().enumerate() {
        for j in 0..3 {
            *h += q[(i, j)] * a.transpose() * inner.hess[j] * a;
        }
    }
    MapJet {
        value: q * inner.value,
        jac: q * inner.jac * a,
        hess,
    }
}

/// The full map x ↦ R T_ω(x) as a jet-valued closure.
pub fn family_map(param: &MobiusParam) -> Result<impl Fn(V3) -> Result<MapJet>> {
    let s = param.modulus();
    if !(s < 1.0) {
        return Err(Error::OmegaOutsideDisk(s));
    }
    let rot = *param.rotation.to_rotation_matrix().matrix();
    let alpha = param.direction_angle();
    let rz = *Rotation3::from_axis_angle(&V3::z_axis(), alpha).matrix();
    let q = rot * rz;
    let a = rz.transpose();
    let coeffs = if s > 0.0 {
        let xt = offset_of_modulus(s);
        Some((OUTER + xt, radius_of_offset(xt)?))
    } else {
        None
    };
    Ok(move |x: V3| {
        let inner = match coeffs {
            Some((xi, eta)) => family_map_jet(xi, eta, a * x)?,
            None => MapJet::linear(M3::identity(), V3::zeros(), a * x),
        };
        Ok(conjugated(&q, &a, inner))
    })
}

/// Analytic ω-derivatives (∂/∂ω_x, ∂/∂ω_y) of x ↦ R T_ω(x).
pub fn family_velocity(param: &MobiusParam) -> Result<impl Fn(V3) -> Result<[V3; 2]>> {
    let s = param.modulus();
    if !(s < 1.0) {
        return Err(Error::OmegaOutsideDisk(s));
    }
    let rot = *param.rotation.to_rotation_matrix().matrix();
    let alpha = param.direction_angle();
    let (sa, ca) = alpha.sin_cos();
    let rz = *Rotation3::from_axis_angle(&V3::z_axis(), alpha).matrix();
    let coeffs = if s > 0.0 {
        let xt = offset_of_modulus(s);
        let eta = radius_of_offset(xt)?;
        let i0 = area_converged(xt, 1.0)?;
        let di = area_function_derivative(xt, 1.0, 30);
        let deta_dxt = -eta * di / (4.0 * i0);
        let dxi_ds = OUTER * (s * s - 1.0) / (2.0 * s * s);
        Some((OUTER + xt, eta, dxi_ds, deta_dxt * dxi_ds))
    } else {
        None
    };
    Ok(move |x: V3| {
        let Some((xi, eta, dxi, deta)) = coeffs else {
            let c = 2.0 / OUTER;
            let field = |b: V3| rot * (c * (2.0 * b.dot(&x) * x - x.norm_squared() * b));
            return Ok([field(V3::x()), field(V3::y())]);
        };
        let y = rz.transpose() * x;
        let jet = family_map_jet(xi, eta, y)?;
        let t = jet.value;
        let d = y - V3::new(xi, 0.0, 0.0);
        let r2 = d.norm_squared();
        let f = eta * eta / r2;
        let v = V3::new(y[0] - y.norm_squared() / xi, y[1], y[2]);
        let dt_dxi = 2.0 * f * d[0] / r2 * v + f * V3::new(y.norm_squared() / (xi * xi), 0.0, 0.0);
        let dt_ds = dxi * dt_dxi + deta * 2.0 / eta * t;
        let ez = V3::z();
        let d_s = rot * rz * dt_ds;
        let d_alpha = rot * (ez.cross(&(rz * t)) - rz * (jet.jac * ez.cross(&y)));
        Ok([ca * d_s - sa / s * d_alpha, sa * d_s + ca / s * d_alpha])
    })
}

/// Apply R T_ω to a grid sampling the Clifford torus.
pub fn family_torus(param: &MobiusParam, grid: &SurfaceGrid) -> Result<SurfaceGrid> {
    let f = family_map(param)?;
    grid.map(f)
}

/// Cluster maps that resolve the near-singular region of T_ω on the torus.
pub fn family_clusters(param: &MobiusParam) -> Result<(ClusterMap, ClusterMap)> {
    let s = param.modulus();
    if s == 0.0 {
        return Ok((ClusterMap::identity(0.0), ClusterMap::identity(0.0)));
    }
    let xt = offset_of_modulus(s);
    let alpha = param.direction_angle();
    Ok((
        ClusterMap::with_min_density(0.0, 1.5 * xt)?,
        ClusterMap::with_min_density(alpha, 1.5 * xt / OUTER)?,
    ))
}

/// The Clifford torus sampled on a grid adapted to T_ω, mapped by R T_ω.
pub fn family_grid(param: &MobiusParam, n_phi: usize, n_theta: usize) -> Result<SurfaceGrid> {
    let (mu, mv) = family_clusters(param)?;
    let base = clustered_clifford_torus(n_phi, n_theta, &mu, &mv)?;
    family_torus(param, &base)
}

/// Conformal distortion max|DΦ|/min|DΦ| of T_ω over the torus, sampled at
/// the extreme points of |x − ξe_x|.
pub fn distortion_ratio(param: &MobiusParam) -> Result<f64> {
    let s = param.modulus();
    if s == 0.0 {
        return Ok(1.0);
    }
    let xt = offset_of_modulus(s);
    let xi = OUTER + xt;
    Ok(((xi + OUTER) / xt).powi(2))
}

/// Centre and radius of the sphere the family degenerates to along ω̄.
pub fn degeneration_sphere(direction: [f64; 2]) -> Result<(V3, f64)> {
    let m = direction[0].hypot(direction[1]);
    if (m - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("direction must be a unit vector, |ω̄| = {m}")));
    }
    let r = limit_radius();
    Ok((V3::new(r * direction[0], r * direction[1], 0.0), r))
}

/// Symmetric sampled Hausdorff distance between grid points and a sphere:
/// max over grid points of the distance to the sphere, and max over
/// `n_samples` quasi-uniform sphere points of the distance to the nearest grid point.
pub fn hausdorff_to_sphere(grid: &SurfaceGrid, center: V3, radius: f64, n_samples: usize) -> f64 {
    let to_sphere = grid
        .positions
        .iter()
        .map(|p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut to_grid: f64 = 0.0;
    for k in 0..n_samples {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n_samples as f64;
        let r = (1.0 - z * z).sqrt();
        let t = golden * k as f64;
        let q = center + radius * V3::new(r * t.cos(), r * t.sin(), z);
        let d = grid
            .positions
            .iter()
            .map(|p| (p - q).norm_squared())
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        to_grid = to_grid.max(d);
    }
    to_sphere.max(to_grid)
}

/// Hausdorff distance between R T_ω(𝕋) and a sphere. Grid nodes give the
/// surface-to-sphere part; each sphere sample is projected onto the surface
/// by Gauss–Newton in (φ, θ), started from the nearest node.
pub fn hausdorff_family(param: &MobiusParam, n: usize, center: V3, radius: f64, n_samples: usize) -> Result<f64> {
    let (mu, mv) = family_clusters(param)?;
    let phis: Vec<f64> = (0..n).map(|i| mu.eval(TAU * i as f64 / n as f64).0).collect();
    let thetas: Vec<f64> = (0..n).map(|j| mv.eval(TAU * j as f64 / n as f64).0).collect();
    let base = clustered_clifford_torus(n, n, &mu, &mv)?;
    let surf = family_torus(param, &base)?;
    let f = family_map(param)?;
    let to_sphere = surf
        .positions
        .iter()
        .map(|p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut to_surface: f64 = 0.0;
    for k in 0..n_samples {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n_samples as f64;
        let r = (1.0 - z * z).sqrt();
        let t = golden * k as f64;
        let q = center + radius * V3::new(r * t.cos(), r * t.sin(), z);
        let nearest = (0..surf.len())
            .min_by(|&a, &b| {
                (surf.positions[a] - q)
                    .norm_squared()
                    .total_cmp(&(surf.positions[b] - q).norm_squared())
            })
            .unwrap_or(0);
        let (mut phi, mut theta) = (phis[nearest / n], thetas[nearest % n]);
        let mut best = (surf.positions[nearest] - q).norm();
        for _ in 0..30 {
            let p = crate::surface::clifford_point(phi, theta);
            let m = f(p.x)?;
            let res = m.value - q;
            best = best.min(res.norm());
            let ja = m.jac * p.xu;
            let jb = m.jac * p.xv;
            let a = nalgebra::Matrix2::new(ja.dot(&ja), ja.dot(&jb), ja.dot(&jb), jb.dot(&jb));
            let rhs = nalgebra::Vector2::new(-ja.dot(&res), -jb.dot(&res));
            let Some(step) = a.try_inverse().map(|ai| ai * rhs) else { break };
            // keep steps local so the iteration cannot jump across the handle
            let scale = (0.1 / step.norm()).min(1.0);
            phi += scale * step[0];
            theta += scale * step[1];
            if step.norm() < 1e-14 {
                break;
            }
        }
        to_surface = to_surface.max(best);
    }
    Ok(to_sphere.max(to_surface))
}

pub const JACOBI_LABELS: [&str; 8] = [
    "dilation",
    "translation_x",
    "translation_y",
    "translation_z",
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "inversion",
];

/// Normal Jacobi fields Z_0..Z_7 on R T_ω(𝕋).
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    pub fields: Vec<ScalarField>,
    pub labels: [&'static str; 8],
    /// The rotation about the torus axis acts trivially (ω = 0).
    pub axial_degenerate: bool,
    /// ∂T/∂ω_x and ∂T/∂ω_y, supplied when |ω| is below the chart switch.
    pub chart_fields: Option<[ScalarField; 2]>,
    /// Step-halving discrepancy of the finite-difference ω-derivatives.
    pub richardson: f64,
    /// Largest relative gap between the analytic ω-derivatives and their
    /// Richardson-extrapolated finite differences.
    pub fd_agreement: f64,
}

/// Below this modulus the ω-derivatives are taken in Cartesian components.
pub const CHART_SWITCH: f64 = 0.05;
/// Centered finite-difference step in ω.
pub const OMEGA_STEP: f64 = 1e-4;

impl JacobiBasis {
    /// Eight fields spanning the expected kernel: Z_0..Z_7 away from the
    /// origin of the disk, Z_0..Z_5 with ∂T/∂ω_x, ∂T/∂ω_y near it.
    pub fn kernel_span(&self) -> Vec<&ScalarField> {
        match &self.chart_fields {
            Some([a, b]) => self.fields[..6].iter().chain([a, b]).collect(),
            None => self.fields.iter().collect(),
        }
    }
}

fn omega_derivative(
    base: &SurfaceGrid,
    param: &MobiusParam,
    dir: [f64; 2],
    step: f64,
) -> Result<Vec<V3>> {
    let shifted = |t: f64| -> Result<Vec<V3>> {
        let p = MobiusParam::new(
            [param.omega[0] + t * dir[0], param.omega[1] + t * dir[1]],
            param.rotation,
        )?;
        Ok(family_torus(&p, base)?.positions)
    };
    let (a, b) = (shifted(step)?, shifted(-step)?);
    Ok(a.iter().zip(&b).map(|(p, m)| (p - m) / (2.0 * step)).collect())
}

fn richardson_checked(base: &SurfaceGrid, param: &MobiusParam, dir: [f64; 2]) -> Result<(Vec<V3>, f64)> {
    let d1 = omega_derivative(base, param, dir, OMEGA_STEP)?;
    let d2 = omega_derivative(base, param, dir, OMEGA_STEP / 2.0)?;
    let disc = d1
        .iter()
        .zip(&d2)
        .map(|(a, b)| (a - b).norm() / (1.0 + b.norm()))
        .fold(0.0, f64::max);
    // Richardson-extrapolated derivative
    let d = d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    Ok((d, disc))
}

/// Jacobi fields on `family_torus(param, base)`; `base` samples the Clifford torus.
pub fn jacobi_fields(param: &MobiusParam, base: &SurfaceGrid) -> Result<(JacobiBasis, FormsField)> {
    let surf = family_torus(param, base)?;
    let forms = fundamental_forms(&surf, &MetricModel::euclidean())?;
    let normal_part = |vf: &dyn Fn(usize) -> V3| -> ScalarField {
        ScalarField {
            n_phi: surf.n_phi,
            n_theta: surf.n_theta,
            values: (0..surf.len()).map(|k| vf(k).dot(&forms.n[k])).collect(),
        }
    };
    let x = &surf.positions;
    let mut fields = vec![normal_part(&|k| x[k])];
    for e in [V3::x(), V3::y(), V3::z()] {
        fields.push(normal_part(&|_| e));
    }
    // rotation generators about the frame axes R e_k
    let rot = param.rotation;
    for e in [V3::x(), V3::y(), V3::z()] {
        let axis = rot * e;
        fields.push(normal_part(&|k| axis.cross(&x[k])));
    }
    let s = param.modulus();
    let vel = family_velocity(param)?;
    let v: Vec<[V3; 2]> = base.positions.iter().map(|&p| vel(p)).collect::<Result<_>>()?;
    // finite-difference cross-check of the analytic ω-derivatives
    let (fx, rx) = richardson_checked(base, param, [1.0, 0.0])?;
    let (fy, ry) = richardson_checked(base, param, [0.0, 1.0])?;
    let fd_agreement = (0..v.len())
        .map(|k| ((v[k][0] - fx[k]).norm() + (v[k][1] - fy[k]).norm()) / (1.0 + v[k][0].norm() + v[k][1].norm()))
        .fold(0.0, f64::max);
    let richardson = rx.max(ry);
    let inversion = if s > 0.0 {
        let (c, d) = (param.omega[0] / s, param.omega[1] / s);
        normal_part(&|k| c * v[k][0] + d * v[k][1])
    } else {
        normal_part(&|_| V3::zeros())
    };
    fields.push(inversion);
    let chart_fields = if s < CHART_SWITCH {
        Some([normal_part(&|k| v[k][0]), normal_part(&|k| v[k][1])])
    } else {
        None
    };
    let axial_degenerate = s == 0.0;
    Ok((
        JacobiBasis {
            fields,
            labels: JACOBI_LABELS,
            axial_degenerate,
            chart_fields,
            richardson,
            fd_agreement,
        },
        forms,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{area, build_clifford_torus, willmore_energy};

    #[test]
    fn inversion_examples() {
        let spec = InversionSpec::new(V3::zeros(), 1.0).unwrap();
        let y = invert(&spec, &[V3::new(2.0, 0.0, 0.0)]).unwrap();
        assert!((y[0] - V3::new(0.5, 0.0, 0.0)).norm() < 1e-16);
        let s2 = InversionSpec::new(V3::new(1.0, 2.0, 3.0), 2.0).unwrap();
        let on = V3::new(1.0, 2.0, 3.0) + 2.0 * V3::new(0.6, 0.0, 0.8);
        assert!((invert(&s2, &[on]).unwrap()[0] - on).norm() < 1e-15);
        assert!(matches!(invert(&s2, &[s2.center]), Err(Error::InversionSingularity)));
    }

    #[test]
    fn inversion_jet_matches_finite_differences() {
        let spec = InversionSpec::new(V3::new(0.3, -0.2, 0.1), 1.7).unwrap();
        let x = V3::new(1.0, 0.5, -0.4);
        let j = spec.jet(x).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let mut e = V3::zeros();
            e[k] = h;
            let (p, m) = (spec.jet(x + e).unwrap(), spec.jet(x - e).unwrap());
            let col = (p.value - m.value) / (2.0 * h);
            assert!((col - j.jac.column(k)).norm() < 1e-8);
            for i in 0..3 {
                let hc = (p.jac.row(i) - m.jac.row(i)).transpose() / (2.0 * h);
                assert!((hc - j.hess[i].column(k)).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn family_jet_matches_finite_differences() {
        let (xi, eta) = (2.9, 0.8);
        let x = V3::new(0.4, 1.1, -0.3);
        let j = family_map_jet(xi, eta, x).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let mut e = V3::zeros();
            e[k] = h;
            let (p, m) = (family_map_jet(xi, eta, x + e).unwrap(), family_map_jet(xi, eta, x - e).unwrap());
            assert!(((p.value - m.value) / (2.0 * h) - j.jac.column(k)).norm() < 1e-8);
            for i in 0..3 {
                let hc = (p.jac.row(i) - m.jac.row(i)).transpose() / (2.0 * h);
                assert!((hc - j.hess[i].column(k)).norm() < 1e-7);
            }
        }
        // it is the reflected inversion followed by a translation
        let inv = InversionSpec::new(V3::new(xi, 0.0, 0.0), eta).unwrap();
        let y = invert(&inv, &[x]).unwrap()[0];
        let want = V3::new(-y.x + xi - eta * eta / xi, y.y, y.z);
        assert!((j.value - want).norm() < 1e-14);
    }

    #[test]
    fn offsets_are_monotone_and_area_preserving() {
        let mut prev = 0.0;
        for eta in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let xi = area_preserving_offset(eta).unwrap();
            assert!(xi > prev && xi > OUTER);
            let a = area_function(xi - OUTER, eta, 30);
            assert!((a / CLIFFORD_AREA - 1.0).abs() < 1e-11, "eta {eta}");
            prev = xi;
        }
    }

    #[test]
    fn family_is_identity_at_the_origin_and_preserves_area() {
        let g = build_clifford_torus(16, 16).unwrap();
        let t = family_torus(&MobiusParam::identity(), &g).unwrap();
        assert_eq!(t.positions, g.positions);
        let p = MobiusParam::along_x(0.3).unwrap();
        let f = fundamental_forms(&family_grid(&p, 64, 64).unwrap(), &MetricModel::euclidean()).unwrap();
        assert!((area(&f) / CLIFFORD_AREA - 1.0).abs() < 1e-8);
        assert!((willmore_energy(&f) / (8.0 * PI * PI) - 1.0).abs() < 1e-7);
        assert!(MobiusParam::along_x(1.0).is_err());
    }

    #[test]
    fn degeneration_sphere_geometry() {
        let (c, r) = degeneration_sphere([1.0, 0.0]).unwrap();
        assert!((r - 2.107_814_730_5).abs() < 1e-9 && (c - V3::new(r, 0.0, 0.0)).norm() < 1e-15);
        assert!(degeneration_sphere([0.5, 0.0]).is_err());
    }
}
