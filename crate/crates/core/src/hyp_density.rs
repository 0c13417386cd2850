//! Radial Green's profile in hyperbolic space and the density of cones over
//! curves on the sphere at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mobius::{curve_length_on_sphere, round_sphere_volume, SampledCurve};

/// Radial profile `G` with `G′(x) = sinh^{1−m} x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenProfile {
    m: usize,
}

impl GreenProfile {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(invalid("Green profile needs m ≥ 2"));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `G(x) = −∫ₓ^∞ csch^{m−1}`, the antiderivative vanishing at infinity.
    ///
    /// For `x ≤ 1` this uses `F₁ = log tanh(x/2)`, `F₂ = −coth x` and the
    /// reduction `Fₙ = −csch^{n−2}x · coth x / (n−1) − (n−2)/(n−1) · F_{n−2}`,
    /// shifted by the limit of `Fₙ` at infinity. For `x > 1` it sums the
    /// expansion `csch^n t = 2ⁿ Σₖ C(n+k−1, k) e^{−(n+2k)t}` term by term,
    /// avoiding the cancellation the reduction suffers there.
    pub fn g(&self, x: f64) -> f64 {
        let n = self.m - 1;
        if x > 1.0 {
            csch_power_tail(n, x)
        } else {
            csch_power_integral(n, x) - csch_power_limit(n)
        }
    }

    pub fn g_prime(&self, x: f64) -> f64 {
        x.sinh().powi(1 - self.m as i32)
    }
}

fn csch_power_integral(n: usize, x: f64) -> f64 {
    match n {
        0 => x,
        1 => (0.5 * x).tanh().ln(),
        _ => {
            let nf = n as f64;
            let csch = 1.0 / x.sinh();
            -csch.powi(n as i32 - 2) * (1.0 / x.tanh()) / (nf - 1.0)
                - (nf - 2.0) / (nf - 1.0) * csch_power_integral(n - 2, x)
        }
    }
}

/// Limit of the reduction formula's `Fₙ(x)` as `x → ∞` (n ≥ 1).
fn csch_power_limit(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => -1.0,
        _ => {
            let nf = n as f64;
            -(nf - 2.0) / (nf - 1.0) * csch_power_limit(n - 2)
        }
    }
}

fn csch_power_tail(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            binom *= (nf + kf - 1.0) / kf;
        }
        let term = binom * (-(nf + 2.0 * kf) * x).exp() / (nf + 2.0 * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    -(2f64).powi(n as i32) * sum
}

/// `m · cosh ρ / sinh^m ρ · (1 − |∇ρ|²)`, the Laplacian of `G(ρ)` on an
/// m-dimensional minimal submanifold.
pub fn laplacian_g(m: usize, rho: f64, grad_norm: f64) -> Result<f64> {
    if m < 1 {
        return Err(invalid("dimension must be positive"));
    }
    if !(rho > 0.0) {
        return Err(invalid("ρ must be positive"));
    }
    if !(0.0..=1.0).contains(&grad_norm) {
        return Err(invalid("|∇ρ| must lie in [0, 1]"));
    }
    let mf = m as f64;
    Ok(mf * rho.cosh() / rho.sinh().powi(m as i32) * (1.0 - grad_norm * grad_norm))
}

/// Cone from the origin of the Poincaré ball over a curve at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSurface {
    pub boundary: SampledCurve,
}

impl ConeSurface {
    pub fn new(boundary: SampledCurve) -> Self {
        Self { boundary }
    }
}

/// `∫ sinh^{−1}ρ · ∂ρ/∂ν` over the cross-section of a two-dimensional cone
/// with the geodesic sphere of radius `R` about the vertex.
///
/// The cross-section is the boundary curve scaled to Euclidean radius
/// `tanh(R/2)`. Each chord contributes its Euclidean length times the
/// conformal factor `2/(1 − |x|²)` at its samples, times `∂ρ/∂ν`, the
/// component of the radial unit vector orthogonal to the chord. Chord sums at
/// two spacings are combined as in [`curve_length_on_sphere`].
pub fn cone_boundary_integral(c: &ConeSurface, m: usize, r: f64) -> Result<f64> {
    if m != 2 {
        return Err(invalid("cones over curves are two-dimensional (m = 2)"));
    }
    if !(r > 0.0) {
        return Err(invalid("R must be positive"));
    }
    let pts = &c.boundary.points;
    let n = pts.len();
    let count = if c.boundary.closed { n } else { n - 1 };
    let scale = (0.5 * r).tanh();
    let weight = 1.0 / r.sinh();
    let piece = |i: usize, j: usize| -> f64 {
        let x = &pts[i % n] * scale;
        let y = &pts[j % n] * scale;
        let chord = &y - &x;
        let len = chord.norm();
        if len == 0.0 {
            return 0.0;
        }
        let conformal = 0.5 * (2.0 / (1.0 - x.norm_squared()) + 2.0 / (1.0 - y.norm_squared()));
        let radial = (&x + &y).normalize();
        let along = radial.dot(&chord) / len;
        let d_rho_d_nu = (1.0 - along * along).max(0.0).sqrt();
        weight * conformal * len * d_rho_d_nu
    };
    let fine: f64 = (0..count).map(|i| piece(i, i + 1)).sum();
    if count % 2 != 0 {
        return Ok(fine);
    }
    let coarse: f64 = (0..count / 2).map(|i| piece(2 * i, 2 * i + 2)).sum();
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Radius at which the cross-section stands in for the vertex limit.
pub const VERTEX_LIMIT_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBoundCheck {
    /// `mω_m Θ`, from the cross-section integral near the vertex.
    pub measured: f64,
    /// Length of the boundary curve on the sphere.
    pub bound: f64,
    pub slack: f64,
    pub theta: f64,
    /// Set when the boundary length is below `2mω_m`, which forces `Θ < 2`.
    pub length_below_two_spheres: bool,
}

/// Compare `mω_m Θ` at the cone vertex with the length of the curve at
/// infinity.
pub fn density_bound_check(c: &ConeSurface, m: usize) -> Result<DensityBoundCheck> {
    let measured = cone_boundary_integral(c, m, VERTEX_LIMIT_RADIUS)?;
    let bound = curve_length_on_sphere(&c.boundary);
    let sphere = round_sphere_volume(m)?;
    Ok(DensityBoundCheck {
        measured,
        bound,
        slack: bound - measured,
        theta: measured / sphere,
        length_below_two_spheres: bound < 2.0 * sphere,
    })
}
