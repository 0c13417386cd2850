//! Geodesics, Jacobi fields and the Hessian of `log ρ` in `ℍ² × ℝ`, with
//! `ℍ²` in the Poincaré disk: `ds² = 4|du|²/(1 − r²)² + dz²`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2RPoint {
    pub u1: f64,
    pub u2: f64,
    pub z: f64,
}

impl H2RPoint {
    pub fn new(u1: f64, u2: f64, z: f64) -> Result<Self> {
        if !(u1.is_finite() && u2.is_finite() && z.is_finite()) {
            return Err(invalid("coordinates must be finite"));
        }
        if u1 * u1 + u2 * u2 >= 1.0 {
            return Err(invalid("(u1, u2) must lie in the open unit disk"));
        }
        Ok(Self { u1, u2, z })
    }

    pub fn origin() -> Self {
        Self {
            u1: 0.0,
            u2: 0.0,
            z: 0.0,
        }
    }

    pub fn r_squared(&self) -> f64 {
        self.u1 * self.u1 + self.u2 * self.u2
    }

    /// Conformal factor `λ = 2/(1 − r²)` of the disk.
    pub fn lambda(&self) -> f64 {
        2.0 / (1.0 - self.r_squared())
    }

    /// Squared length of a coordinate tangent vector at this point.
    pub fn norm_squared(&self, v: [f64; 3]) -> f64 {
        let l = self.lambda();
        l * l * (v[0] * v[0] + v[1] * v[1]) + v[2] * v[2]
    }

    fn disk(&self) -> Complex<f64> {
        Complex::new(self.u1, self.u2)
    }
}

/// Christoffel symbols `Γᵏᵢⱼ`, indexed `[k][i][j]` from zero.
pub fn christoffel(u1: f64, u2: f64) -> Result<[[[f64; 3]; 3]; 3]> {
    let r2 = u1 * u1 + u2 * u2;
    if !(r2 < 1.0) {
        return Err(invalid("(u1, u2) must lie in the open unit disk"));
    }
    let a = 2.0 * u1 / (1.0 - r2);
    let b = 2.0 * u2 / (1.0 - r2);
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][0][0] = a;
    g[1][1][0] = a;
    g[1][0][1] = a;
    g[0][1][1] = -a;
    g[1][1][1] = b;
    g[0][0][1] = b;
    g[0][1][0] = b;
    g[1][0][0] = -b;
    Ok(g)
}

/// The isometry carrying a unit-speed geodesic to `(tanh ct, 0, √(1−4c²) t)`.
///
/// Stored as its factors: the disk translation taking the origin to
/// `translation`, the rotation by `rotation`, the vertical shift and an
/// optional reflection `z ↦ −z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicNormalForm {
    pub c: f64,
    pub translation: [f64; 2],
    pub rotation: f64,
    pub shift: f64,
    pub reflect: bool,
}

impl GeodesicNormalForm {
    /// Normal form of the geodesic through `p` with unit velocity `v`,
    /// given in coordinates `(u̇₁, u̇₂, ż)`.
    pub fn new(p: H2RPoint, v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("velocity must be finite"));
        }
        let speed = p.norm_squared(v).sqrt();
        if (speed - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "velocity must have unit length, got {speed}"
            )));
        }
        let horizontal = Complex::new(v[0], v[1]);
        let c = (0.5 * p.lambda() * horizontal.norm()).min(0.5);
        let rotation = if horizontal.norm() > 0.0 {
            horizontal.arg()
        } else {
            0.0
        };
        Ok(Self {
            c,
            translation: [p.u1, p.u2],
            rotation,
            shift: p.z,
            reflect: v[2] < 0.0,
        })
    }

    /// Closed form in normal position.
    pub fn normal(&self, t: f64) -> [f64; 3] {
        let vertical = (1.0 - 4.0 * self.c * self.c).max(0.0).sqrt();
        [(self.c * t).tanh(), 0.0, vertical * t]
    }

    pub fn apply(&self, q: [f64; 3]) -> H2RPoint {
        let a = Complex::new(self.translation[0], self.translation[1]);
        let w = Complex::new(q[0], q[1]) * Complex::from_polar(1.0, self.rotation);
        let u = (w + a) / (Complex::new(1.0, 0.0) + a.conj() * w);
        let z = if self.reflect { -q[2] } else { q[2] };
        H2RPoint {
            u1: u.re,
            u2: u.im,
            z: z + self.shift,
        }
    }

    pub fn invert(&self, p: H2RPoint) -> [f64; 3] {
        let a = Complex::new(self.translation[0], self.translation[1]);
        let u = p.disk();
        let w = (u - a) / (Complex::new(1.0, 0.0) - a.conj() * u)
            * Complex::from_polar(1.0, -self.rotation);
        let z = p.z - self.shift;
        [w.re, w.im, if self.reflect { -z } else { z }]
    }

    pub fn at(&self, t: f64) -> H2RPoint {
        self.apply(self.normal(t))
    }
}

/// Point at time `t` on the unit-speed geodesic through `p` with velocity `v`.
pub fn geodesic(p: H2RPoint, v: [f64; 3], t: f64) -> Result<H2RPoint> {
    Ok(GeodesicNormalForm::new(p, v)?.at(t))
}

/// Largest component of `γ″ + Γ(γ′, γ′)` at time `t`, with derivatives from
/// five-point differences of step `h`.
pub fn geodesic_residual(p: H2RPoint, v: [f64; 3], t: f64, h: f64) -> Result<f64> {
    let form = GeodesicNormalForm::new(p, v)?;
    let coords = |s: f64| {
        let q = form.at(s);
        [q.u1, q.u2, q.z]
    };
    let samples = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| coords(t + k * h));
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for k in 0..3 {
        let f = |i: usize| samples[i][k];
        first[k] = (f(0) - 8.0 * f(1) + 8.0 * f(3) - f(4)) / (12.0 * h);
        second[k] = (-f(0) + 16.0 * f(1) - 30.0 * f(2) + 16.0 * f(3) - f(4)) / (12.0 * h * h);
    }
    let g = christoffel(samples[2][0], samples[2][1])?;
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let mut acc = second[k];
        for i in 0..3 {
            for j in 0..3 {
                acc += g[k][i][j] * first[i] * first[j];
            }
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}

fn sinh_ratio(c: f64, t: f64) -> f64 {
    if c < 1e-6 {
        let x = 2.0 * c * t;
        t + x * x * t / 6.0
    } else {
        (2.0 * c * t).sinh() / (2.0 * c)
    }
}

/// Jacobi field along `(tanh ct, 0, √(1−4c²) t)` with `J(0) = 0` and
/// `J′(0) = ω`, in the parallel frame of unit `u₁`, `u₂` and `z` directions.
pub fn jacobi(c: f64, t: f64, omega0: [f64; 3]) -> [f64; 3] {
    [t * omega0[0], sinh_ratio(c, t) * omega0[1], t * omega0[2]]
}

/// Largest component of `(J₁″, J₂″ − 4c²J₂, J₃″)` by five-point differences.
pub fn jacobi_residual(c: f64, t: f64, omega0: [f64; 3], h: f64) -> f64 {
    let s = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| jacobi(c, t + k * h, omega0));
    let second: Vec<f64> = (0..3)
        .map(|k| {
            (-s[0][k] + 16.0 * s[1][k] - 30.0 * s[2][k] + 16.0 * s[3][k] - s[4][k]) / (12.0 * h * h)
        })
        .collect();
    let r = [second[0], second[1] - 4.0 * c * c * s[2][1], second[2]];
    r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `s coth s`, equal to 1 at 0.
pub fn s_coth_s(s: f64) -> f64 {
    let s = s.abs();
    if s < 1e-4 {
        let s2 = s * s;
        1.0 + s2 / 3.0 - s2 * s2 / 45.0
    } else {
        s / s.tanh()
    }
}

/// Diagonal of the Hessian of `log ρ` in the frame `{V₁, V₂, V₃}`.
pub fn hessian_log_rho(rho: f64, phi: f64) -> Result<[f64; 3]> {
    if !(rho > 0.0) {
        return Err(invalid("ρ must be positive"));
    }
    let inv = 1.0 / (rho * rho);
    Ok([-inv, inv, s_coth_s(rho * phi.sin()) * inv])
}

/// Unit normal in the frame `{V₁, V₂, V₃}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameNormal {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl FrameNormal {
    pub fn new(n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let norm = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(invalid(format!(
                "frame normal must be a unit vector, got length {norm}"
            )));
        }
        Ok(Self { n1, n2, n3 })
    }

    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            n1: v[0] / norm,
            n2: v[1] / norm,
            n3: v[2] / norm,
        })
    }
}

/// `Δ_Σ log ρ` on a minimal surface with unit normal `n`:
/// `[(1 − n₃²) s coth s − (n₂² − n₁²)]/ρ²` with `s = ρ sin φ`.
pub fn laplacian_log_rho(rho: f64, phi: f64, n: FrameNormal) -> f64 {
    let f = s_coth_s(rho * phi.sin());
    ((1.0 - n.n3 * n.n3) * f - (n.n2 * n.n2 - n.n1 * n.n1)) / (rho * rho)
}

/// Whether `(φ, n)` lies in the set where `Δ_Σ log ρ` vanishes: `n₁ = 0`
/// and either `n = ±V₃` or `sin φ = 0`, up to `tol`.
pub fn laplacian_vanishes(phi: f64, n: FrameNormal, tol: f64) -> bool {
    n.n1.abs() < tol && (n.n3.abs() > 1.0 - tol || phi.sin().abs() < tol)
}

/// `(1/r)·length` of the horizontal graph of `f` over the circle
/// `x = tanh(r/2) cos t`, `z = r sin t` in `Π₀ = {u₂ = 0}`.
///
/// `df` returns `(∂ₓf, ∂_z f)`. The graph point sits at `(x, f, z)`, so its
/// disk radius is `x*² = x² + f²`.
pub fn end_curve_ratio<F, D>(f: F, df: D, r: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    D: Fn(f64, f64) -> (f64, f64),
{
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r must be positive and finite"));
    }
    let scale = (0.5 * r).tanh();
    let mut escaped = false;
    let mut integrand = |t: f64| {
        let (sin, cos) = t.sin_cos();
        let x = scale * cos;
        let z = r * sin;
        let height = f(x, z);
        let (fx, fz) = df(x, z);
        let star = x * x + height * height;
        if !(star < 1.0) {
            escaped = true;
            return 0.0;
        }
        let base = 0.5 * (1.0 - x * x);
        let proj = 0.5 * (1.0 - star);
        let a = base * sin / proj;
        let b = (base * fx * (-sin) + fz * cos) / proj;
        (a * a + b * b + cos * cos).sqrt()
    };
    let mut total = 0.0;
    for k in 0..4 {
        let lo = 0.5 * PI * k as f64;
        total += integrate(&mut integrand, lo, lo + 0.5 * PI, 1e-11, 1e-13)?;
    }
    if escaped {
        return Err(invalid("horizontal graph leaves the disk"));
    }
    Ok(total)
}

/// Graph `f = A sech^{1+α}(R)` with `R = √((2 artanh x)² + z²)` the distance
/// from the origin of `Π₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayingGraph {
    pub amplitude: f64,
    pub alpha: f64,
}

impl DecayingGraph {
    pub fn new(amplitude: f64, alpha: f64) -> Result<Self> {
        if !(amplitude.is_finite() && alpha > 0.0) {
            return Err(invalid("amplitude must be finite and α positive"));
        }
        Ok(Self { amplitude, alpha })
    }

    fn radius(x: f64, z: f64) -> (f64, f64) {
        let h = 2.0 * x.atanh();
        (h.hypot(z), h)
    }

    pub fn value(&self, x: f64, z: f64) -> f64 {
        let (big_r, _) = Self::radius(x, z);
        self.amplitude / big_r.cosh().powf(1.0 + self.alpha)
    }

    pub fn partials(&self, x: f64, z: f64) -> (f64, f64) {
        let (big_r, h) = Self::radius(x, z);
        if big_r == 0.0 {
            return (0.0, 0.0);
        }
        let d_r = -self.amplitude * (1.0 + self.alpha) * big_r.tanh()
            / big_r.cosh().powf(1.0 + self.alpha);
        let dx = d_r * h * 2.0 / ((1.0 - x * x) * big_r);
        let dz = d_r * z / big_r;
        (dx, dz)
    }

    pub fn end_curve_ratio(&self, r: f64) -> Result<f64> {
        end_curve_ratio(|x, z| self.value(x, z), |x, z| self.partials(x, z), r)
    }
}

/// Worst values found by [`calculus_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalculusSuite {
    pub geodesic_instances: usize,
    pub max_geodesic_residual: f64,
    pub max_jacobi_residual: f64,
    pub laplacian_samples: usize,
    pub min_laplacian: f64,
    /// Samples below `1e−9` outside the vanishing set.
    pub equality_set_violations: usize,
    pub s_coth_s_min: f64,
    pub s_coth_s_monotone: bool,
}

impl CalculusSuite {
    pub fn passed(&self) -> bool {
        self.max_geodesic_residual < 1e-8
            && self.max_jacobi_residual < 1e-6
            && self.min_laplacian >= -1e-12
            && self.equality_set_violations == 0
            && self.s_coth_s_min >= 1.0
            && self.s_coth_s_monotone
    }
}

/// Random point with `|u| < 0.9`, `|z| < 2` and a random unit velocity there.
pub fn random_geodesic_data<R: rand::Rng + ?Sized>(rng: &mut R) -> (H2RPoint, [f64; 3]) {
    let rad: f64 = rng.random_range(0.0..0.9);
    let ang: f64 = rng.random_range(0.0..2.0 * PI);
    let p = H2RPoint {
        u1: rad * ang.cos(),
        u2: rad * ang.sin(),
        z: rng.random_range(-2.0..2.0),
    };
    let mut v = [0.0; 3];
    loop {
        for x in &mut v {
            *x = rng.random_range(-1.0..1.0);
        }
        let n = p.norm_squared(v).sqrt();
        if n > 1e-3 {
            return (p, v.map(|x| x / n));
        }
    }
}

/// Residual, sign and equality-set checks over random samples.
pub fn calculus_suite(
    instances: usize,
    laplacian_samples: usize,
    seed: u64,
) -> Result<CalculusSuite> {
    use rand::Rng;
    let mut rng = crate::random::seeded(seed);
    let mut max_geodesic_residual: f64 = 0.0;
    for _ in 0..instances {
        let (p, v) = random_geodesic_data(&mut rng);
        let t = rng.random_range(-3.0..3.0);
        max_geodesic_residual = max_geodesic_residual.max(geodesic_residual(p, v, t, 1e-3)?);
    }
    let mut max_jacobi_residual: f64 = 0.0;
    for &c in &[0.0, 1e-9, 1e-7, 5e-7, 1e-6, 2e-6, 1e-3, 0.1, 0.25, 0.4, 0.5] {
        for k in 0..=40 {
            let t = 0.1 * k as f64;
            let omega = [0.0, 1.0, 0.0];
            max_jacobi_residual = max_jacobi_residual.max(jacobi_residual(c, t, omega, 1e-3));
            let tilted = [(1.0 - 4.0 * c * c).sqrt() * 0.6, 0.8, -2.0 * c * 0.6];
            max_jacobi_residual = max_jacobi_residual.max(jacobi_residual(c, t, tilted, 1e-3));
        }
    }
    let mut min_laplacian = f64::INFINITY;
    let mut equality_set_violations = 0;
    for _ in 0..laplacian_samples {
        let rho = 10.0 * (1.0 - rng.random::<f64>());
        let phi = PI * rng.random::<f64>();
        let u = crate::random::unit_vector(&mut rng, 3);
        let n = FrameNormal {
            n1: u[0],
            n2: u[1],
            n3: u[2],
        };
        let value = laplacian_log_rho(rho, phi, n);
        min_laplacian = min_laplacian.min(value);
        if value < 1e-9 && !laplacian_vanishes(phi, n, 1e-5) {
            equality_set_violations += 1;
        }
    }
    let steps = 1_000_000;
    let mut prev = s_coth_s(0.0);
    let mut s_coth_s_min = prev;
    let mut s_coth_s_monotone = true;
    for i in 1..=steps {
        let v = s_coth_s(50.0 * i as f64 / steps as f64);
        s_coth_s_monotone &= v >= prev;
        s_coth_s_min = s_coth_s_min.min(v);
        prev = v;
    }
    Ok(CalculusSuite {
        geodesic_instances: instances,
        max_geodesic_residual,
        max_jacobi_residual,
        laplacian_samples,
        min_laplacian,
        equality_set_violations,
        s_coth_s_min,
        s_coth_s_monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndCurveRow {
    pub r: f64,
    pub flat: f64,
    pub decaying: f64,
    /// `|decaying − 2π|`.
    pub gap: f64,
}

/// `end_curve_ratio` for the flat graph and for `graph` at each radius.
pub fn end_curve_sweep(graph: &DecayingGraph, radii: &[f64]) -> Result<Vec<EndCurveRow>> {
    radii
        .iter()
        .map(|&r| {
            let flat = end_curve_ratio(|_, _| 0.0, |_, _| (0.0, 0.0), r)?;
            let decaying = graph.end_curve_ratio(r)?;
            Ok(EndCurveRow {
                r,
                flat,
                decaying,
                gap: (decaying - 2.0 * PI).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;
    use rand::Rng;

    fn random_unit(rng: &mut impl Rng, p: H2RPoint) -> [f64; 3] {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = p.norm_squared(v).sqrt();
        v.map(|x| x / n)
    }

    #[test]
    fn christoffel_matches_conformal_formula() {
        for &(u1, u2) in &[(0.0, 0.0), (0.3, -0.2), (-0.7, 0.5), (0.05, 0.9)] {
            let g = christoffel(u1, u2).unwrap();
            let r2 = u1 * u1 + u2 * u2;
            let d = [2.0 * u1 / (1.0 - r2), 2.0 * u2 / (1.0 - r2), 0.0];
            let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let (dk, di, dj) = if k < 2 && i < 2 && j < 2 {
                            (d[k], d[i], d[j])
                        } else {
                            (0.0, 0.0, 0.0)
                        };
                        let expected = delta(i, k) * dj + delta(j, k) * di - delta(i, j) * dk;
                        assert!((g[k][i][j] - expected).abs() < 1e-14);
                        assert_eq!(g[k][i][j], g[k][j][i]);
                    }
                }
            }
        }
        assert!(christoffel(0.8, 0.6).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let o = H2RPoint::origin();
        let q = geodesic(o, [0.0, 0.0, 1.0], 2.5).unwrap();
        assert_eq!((q.u1, q.u2, q.z), (0.0, 0.0, 2.5));
        let q = geodesic(o, [0.5, 0.0, 0.0], 1.2).unwrap();
        assert!((q.u1 - 0.6f64.tanh()).abs() < 1e-15 && q.z == 0.0);
        let q = geodesic(o, [0.25, 0.0, 3f64.sqrt() / 2.0], 2.0).unwrap();
        assert!((q.u1 - 0.5f64.tanh()).abs() < 1e-15);
        assert!((q.z - 3f64.sqrt()).abs() < 1e-15);
        assert!(geodesic(o, [1.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn geodesic_ode_residual() {
        let mut rng = seeded(7);
        for _ in 0..300 {
            let rad: f64 = rng.random_range(0.0..0.9);
            let ang: f64 = rng.random_range(0.0..2.0 * PI);
            let p = H2RPoint::new(
                rad * ang.cos(),
                rad * ang.sin(),
                rng.random_range(-2.0..2.0),
            )
            .unwrap();
            let v = random_unit(&mut rng, p);
            let t = rng.random_range(-3.0..3.0);
            assert!(geodesic_residual(p, v, t, 1e-3).unwrap() < 1e-8);
        }
    }

    #[test]
    fn normal_form_roundtrip() {
        let p = H2RPoint::new(0.4, -0.3, 1.0).unwrap();
        let mut rng = seeded(3);
        let v = random_unit(&mut rng, p);
        let form = GeodesicNormalForm::new(p, v).unwrap();
        let q = form.at(0.7);
        let back = form.invert(q);
        let n = form.normal(0.7);
        for k in 0..3 {
            assert!((back[k] - n[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_matches_geodesic_variation() {
        // J(t) = ∂ₛ exp₀(t(cos s·w + sin s·ω)) at s = 0, read in the parallel frame.
        let c: f64 = 0.3;
        let w = [2.0 * c, 0.0, (1.0 - 4.0 * c * c).sqrt()];
        let mut omega = [w[2], 0.6, -w[0]];
        let n = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
        omega = omega.map(|x| x / n);
        let o = H2RPoint::origin();
        let velocity = |s: f64| {
            let e: Vec<f64> = (0..3)
                .map(|k| s.cos() * w[k] + s.sin() * omega[k])
                .collect();
            [e[0] / 2.0, e[1] / 2.0, e[2]]
        };
        for &t in &[0.5, 1.5, 3.0] {
            let h = 1e-5;
            let plus = geodesic(o, velocity(h), t).unwrap();
            let minus = geodesic(o, velocity(-h), t).unwrap();
            let base = geodesic(o, velocity(0.0), t).unwrap();
            let frame = base.lambda();
            let fd = [
                frame * (plus.u1 - minus.u1) / (2.0 * h),
                frame * (plus.u2 - minus.u2) / (2.0 * h),
                (plus.z - minus.z) / (2.0 * h),
            ];
            let j = jacobi(c, t, omega);
            for k in 0..3 {
                assert!(
                    (fd[k] - j[k]).abs() < 1e-6 * (1.0 + j[k].abs()),
                    "t={t} k={k}: {fd:?} vs {j:?}"
                );
            }
        }
    }

    #[test]
    fn jacobi_examples_and_residual() {
        assert_eq!(jacobi(0.3, 0.0, [0.0, 1.0, 0.0]), [0.0, 0.0, 0.0]);
        assert_eq!(jacobi(0.0, 2.0, [0.6, 0.0, 0.8]), [1.2, 0.0, 1.6]);
        assert!((jacobi(0.5, 1.3, [0.0, 1.0, 0.0])[1] - 1.3f64.sinh()).abs() < 1e-15);
        let small = jacobi(1e-7, 2.0, [0.0, 1.0, 0.0])[1];
        assert!((small - 2.0).abs() < 1e-12);
        for &c in &[0.0, 1e-8, 1e-6, 0.1, 0.5] {
            for &t in &[0.0, 0.5, 2.0, 4.0] {
                assert!(jacobi_residual(c, t, [0.0, 1.0, 0.0], 1e-3) < 1e-6);
            }
        }
    }

    #[test]
    fn s_coth_s_properties() {
        assert_eq!(s_coth_s(0.0), 1.0);
        assert!((s_coth_s(1.0) - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert!(s_coth_s(2.0) > s_coth_s(1.0));
        let below = s_coth_s(0.99999e-4);
        let above = s_coth_s(1.00001e-4);
        assert!(below <= above && (above - below) < 1e-12);
    }

    #[test]
    fn hessian_and_laplacian() {
        assert_eq!(hessian_log_rho(2.0, 0.0).unwrap(), [-0.25, 0.25, 0.25]);
        let h = hessian_log_rho(1.0, PI / 2.0).unwrap();
        assert!((h[2] - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert!(hessian_log_rho(0.0, 1.0).is_err());
        let v = FrameNormal::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(laplacian_log_rho(1.7, 0.4, v), 0.0);
        let v = FrameNormal::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(laplacian_log_rho(1.7, 0.0, v), 0.0);
        let v = FrameNormal::new(1.0, 0.0, 0.0).unwrap();
        assert!((laplacian_log_rho(1.0, PI / 2.0, v) - (1.0 / 1f64.tanh() + 1.0)).abs() < 1e-15);
        let n = FrameNormal::normalized([0.3, -0.5, 0.8]).unwrap();
        let (rho, phi) = (2.3, 1.1);
        let h = hessian_log_rho(rho, phi).unwrap();
        let trace: f64 = h.iter().sum();
        let along = h[0] * n.n1 * n.n1 + h[1] * n.n2 * n.n2 + h[2] * n.n3 * n.n3;
        assert!((trace - along - laplacian_log_rho(rho, phi, n)).abs() < 1e-14);
        assert!(FrameNormal::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn end_curve_flat_graph() {
        for r in [1.0, 5.0, 20.0] {
            let v = end_curve_ratio(|_, _| 0.0, |_, _| (0.0, 0.0), r).unwrap();
            assert!((v - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn end_curve_decaying_graph() {
        let g = DecayingGraph::new(0.5, 1.0).unwrap();
        let gaps: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&r| (g.end_curve_ratio(r).unwrap() - 2.0 * PI).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 1e-3);
    }

    #[test]
    fn decaying_graph_partials() {
        let g = DecayingGraph::new(0.5, 1.0).unwrap();
        let (x, z, h) = (0.3, 0.8, 1e-6);
        let (fx, fz) = g.partials(x, z);
        assert!((fx - (g.value(x + h, z) - g.value(x - h, z)) / (2.0 * h)).abs() < 1e-8);
        assert!((fz - (g.value(x, z + h) - g.value(x, z - h)) / (2.0 * h)).abs() < 1e-8);
    }

    #[test]
    fn constant_offset_leaves_disk() {
        let delta = 0.05;
        let near = end_curve_ratio(|_, _| delta, |_, _| (0.0, 0.0), 1.0).unwrap();
        assert!((near - 2.0 * PI).abs() < 10.0 * delta);
        assert!(end_curve_ratio(|_, _| delta, |_, _| (0.0, 0.0), 12.0).is_err());
    }
}
