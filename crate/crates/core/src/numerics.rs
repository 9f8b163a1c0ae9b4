//! Small numerical building blocks: Gauss–Legendre rules, Brent's root finder,
//! graded composite quadrature, a periodic clustering map, Nelder–Mead and
//! linear least squares.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "f({a:e}) = {fa:e} and f({b:e}) = {fb:e} share a sign"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Bracket(format!("no convergence in {max_iter} iterations")))
}

/// ∫_a^b f on panels graded geometrically away from `a`: the first panel has
/// width `h0`, each next one doubles. Each panel uses an `order`-point rule.
pub fn graded_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, h0: f64, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let mut lo = a;
    let mut h = h0.min(b - a);
    let mut total = 0.0;
    while lo < b {
        let hi = (lo + h).min(b);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half;
        lo = hi;
        h *= 2.0;
    }
    total
}

/// Smooth periodic reparametrization t = c + Ψ(u) of the circle with node
/// density Ψ'(u) = cosh(2κ sin(u/2)) / I₀(2κ), smallest at u = 0.
///
/// The map is entire, so periodic trapezoid sums in u stay spectrally
/// accurate while resolving features of width ~Ψ'(0) near t = c.
#[derive(Debug, Clone)]
pub struct ClusterMap {
    pub center: f64,
    pub kappa: f64,
    coeffs: Vec<f64>,
}

fn cosh_mean(kappa: f64) -> f64 {
    let m = 512;
    (0..m)
        .map(|i| (2.0 * kappa * (PI * i as f64 / m as f64).sin()).cosh())
        .sum::<f64>()
        / m as f64
}

impl ClusterMap {
    pub fn identity(center: f64) -> Self {
        Self {
            center,
            kappa: 0.0,
            coeffs: Vec::new(),
        }
    }

    /// Map whose density at the cluster point is `min_density` (≤ 1).
    pub fn with_min_density(center: f64, min_density: f64) -> Result<Self> {
        if min_density >= 1.0 {
            return Ok(Self::identity(center));
        }
        if min_density <= 1e-40 {
            return Err(Error::Config(format!("cluster density {min_density:e} too small")));
        }
        let kappa = brent(|k| cosh_mean(k).ln() + min_density.ln(), 0.0, 60.0, 1e-13, 200)?;
        Ok(Self::with_kappa(center, kappa))
    }

    pub fn with_kappa(center: f64, kappa: f64) -> Self {
        if kappa == 0.0 {
            return Self::identity(center);
        }
        let m = 2048;
        let samples: Vec<f64> = (0..m)
            .map(|i| (2.0 * kappa * (PI * i as f64 / m as f64).sin()).cosh())
            .collect();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let mut coeffs = Vec::new();
        for k in 1..m / 2 {
            let c = 2.0
                * samples
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s * (TAU * (k * i) as f64 / m as f64).cos())
                    .sum::<f64>()
                / (m as f64 * mean);
            if c.abs() < 1e-18 && k > 4 {
                break;
            }
            coeffs.push(c);
        }
        Self {
            center,
            kappa,
            coeffs,
        }
    }

    /// (t, dt/du, d²t/du²) at parameter u.
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        let (mut t, mut d1, mut d2) = (u, 1.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let kf = (k + 1) as f64;
            let (s, co) = (kf * u).sin_cos();
            t += c * s / kf;
            d1 += c * co;
            d2 -= c * kf * s;
        }
        (self.center + t, d1, d2)
    }

    pub fn min_density(&self) -> f64 {
        self.eval(0.0).1
    }
}

/// Derivative-free simplex minimization.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    f_tol: f64,
    max_evals: usize,
) -> NelderMeadResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step[i];
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if (vals[n] - vals[0]).abs() <= f_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<f64> = (0..n)
                        .map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]))
                        .collect();
                    vals[i] = f(&p);
                    simplex[i] = p;
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    NelderMeadResult {
        x: simplex[best].clone(),
        value: vals[best],
        evaluations: evals,
        converged,
    }
}

/// Least-squares fit y ≈ Σ_k c_k x^{p_k}; returns (coefficients, residual 2-norm).
pub fn power_fit(x: &[f64], y: &[f64], powers: &[i32]) -> (Vec<f64>, f64) {
    let a = DMatrix::from_fn(x.len(), powers.len(), |i, k| x[i].powi(powers[k]));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&b, 1e-14).expect("svd solve");
    let r = (&a * &c - &b).norm();
    (c.iter().copied().collect(), r)
}

/// Slope of log|y| against log x (least squares).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = x.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 41] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn brent_finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn graded_rule_handles_a_near_singular_peak() {
        let d = 1e-6;
        let q = graded_integral(|x| d / (x * x + d * d), 0.0, 1.0, d / 4.0, 20);
        assert!((q - (1.0 / d).atan()).abs() < 1e-12);
    }

    #[test]
    fn cluster_map_is_a_periodic_diffeomorphism() {
        let m = ClusterMap::with_min_density(0.3, 1e-4).unwrap();
        assert!((m.min_density() - 1e-4).abs() < 1e-10);
        let (t0, _, _) = m.eval(0.0);
        let (t1, _, _) = m.eval(TAU);
        assert!((t0 - 0.3).abs() < 1e-14 && (t1 - t0 - TAU).abs() < 1e-12);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let (t, d, _) = m.eval(TAU * i as f64 / 200.0);
            assert!(t > prev && d > 0.0);
            prev = t;
        }
        // derivative consistency
        let h = 1e-5;
        let (_, d, dd) = m.eval(1.0);
        let (a, da, _) = m.eval(1.0 + h);
        let (b, db, _) = m.eval(1.0 - h);
        assert!(((a - b) / (2.0 * h) - d).abs() < 1e-7);
        assert!(((da - db) / (2.0 * h) - dd).abs() < 1e-5);
    }

    #[test]
    fn nelder_mead_minimizes_rosenbrock() {
        let r = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            1e-16,
            5000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn power_fit_recovers_coefficients() {
        let x = [0.1, 0.2, 0.3, 0.4];
        let y: Vec<f64> = x.iter().map(|t| 3.0 - 2.0 * t * t).collect();
        let (c, r) = power_fit(&x, &y, &[0, 2]);
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-12 && r < 1e-12);
        assert!((loglog_slope(&x, &x.map(|t| t.powi(4))) - 4.0).abs() < 1e-12);
    }
}
