//! Möbius transformations of the unit sphere and the Möbius volume of curves.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};
use crate::optimize::NelderMead;
use crate::random::{gaussian_vector, seeded};
use crate::spaceform::sphere_angle;

/// Translation part of a Möbius transformation of `𝕊ⁿ⁻¹`, the boundary
/// action of the hyperbolic isometry of the ball moving 0 to `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    #[serde(with = "crate::serde_vec")]
    a: DVector<f64>,
}

impl MobiusMap {
    pub fn new(a: DVector<f64>) -> Result<Self> {
        if !(a.norm() < 1.0 - 1e-12) {
            return Err(invalid("Möbius parameter must satisfy |a| < 1 − 1e−12"));
        }
        Ok(Self { a })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: DVector::zeros(n),
        }
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn inverse(&self) -> Self {
        Self { a: -&self.a }
    }

    /// Image of `x` before renormalization.
    pub fn apply_raw(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let a = &self.a;
        let xa = x.dot(a);
        let x2 = x.norm_squared();
        let a2 = a.norm_squared();
        let den = a2 * x2 + 2.0 * xa + 1.0;
        if den < 1e-14 {
            return Err(GeomError::Numeric(
                "Möbius denominator vanished: point antipodal to the translation axis".into(),
            ));
        }
        Ok((x * (1.0 - a2) + a * (x2 + 2.0 * xa + 1.0)) / den)
    }
}

/// `T_a(x)`, renormalized onto the unit sphere.
pub fn mobius_translate(map: &MobiusMap, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != map.a.len() {
        return Err(invalid("dimension mismatch between map and point"));
    }
    if (x.norm() - 1.0).abs() > 1e-9 {
        return Err(invalid("Möbius maps act on unit vectors"));
    }
    let y = map.apply_raw(x)?;
    let n = y.norm();
    Ok(y / n)
}

/// Closed or open curve on the unit sphere given by samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    #[serde(with = "crate::serde_vec::many")]
    pub points: Vec<DVector<f64>>,
    pub closed: bool,
}

impl SampledCurve {
    pub fn new(points: Vec<DVector<f64>>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a sampled curve needs at least two points"));
        }
        let n = points[0].len();
        for p in &points {
            if p.len() != n || (p.norm() - 1.0).abs() > 1e-9 {
                return Err(invalid(
                    "curve samples must be unit vectors of one dimension",
                ));
            }
        }
        Ok(Self { points, closed })
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn map(&self, g: &MobiusMap) -> Result<SampledCurve> {
        let points = self
            .points
            .iter()
            .map(|x| mobius_translate(g, x))
            .collect::<Result<_>>()?;
        Ok(SampledCurve {
            points,
            closed: self.closed,
        })
    }

    fn chords(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (&self.points[(i + 1) % n] - &self.points[i]).norm())
    }

    /// Largest angle between consecutive samples.
    pub fn max_step(&self) -> f64 {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count)
            .map(|i| sphere_angle(&self.points[i], &self.points[(i + 1) % n]))
            .fold(0.0, f64::max)
    }
}

/// Length of a sampled curve on the sphere.
///
/// With an even number of chords the chord sums at spacing h and 2h are
/// combined as `(4L_h − L_2h)/3`, cancelling the O(h²) error; put corners of a
/// piecewise smooth curve on even sample indices. With an odd number of
/// chords the plain chord sum is returned.
pub fn curve_length_on_sphere(c: &SampledCurve) -> f64 {
    let fine: Vec<f64> = c.chords().collect();
    let total: f64 = fine.iter().sum();
    if fine.len() % 2 != 0 {
        return total;
    }
    let n = c.points.len();
    let coarse: f64 = (0..fine.len() / 2)
        .map(|i| (&c.points[(2 * i + 2) % n] - &c.points[2 * i]).norm())
        .sum();
    (4.0 * total - coarse) / 3.0
}

/// `mω_m`, the volume of the unit `(m−1)`-sphere.
pub fn round_sphere_volume(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("round sphere volume needs m ≥ 1"));
    }
    // ω_0 = 1, ω_1 = 2, ω_m = ω_{m−2} · 2π/m
    let mut omega = if m % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if m % 2 == 0 { 2 } else { 3 };
    while j <= m {
        omega *= 2.0 * PI / j as f64;
        j += 2;
    }
    Ok(m as f64 * omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusBudget {
    pub restarts: usize,
    pub iterations: usize,
    /// Simplex size at which a restart stops.
    pub tol: f64,
    /// Search parameters satisfy `|a| ≤ 1 − cap`.
    pub cap: f64,
    /// Largest angle between mapped consecutive samples that is still trusted.
    pub max_step: f64,
}

impl Default for MobiusBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 500,
            tol: 1e-10,
            cap: 1e-6,
            max_step: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusVolumeResult {
    pub initial_length: f64,
    /// Best length found by the search over `a`.
    pub searched: f64,
    #[serde(with = "crate::serde_vec")]
    pub argmax_a: DVector<f64>,
    /// Length of the great circle approached by blowing the curve up at one of
    /// its points.
    pub lower_bound_great_sphere: f64,
    /// Larger of the searched value and the blow-up bound.
    pub sup_estimate: f64,
    /// Always set: the supremum is approached, and may not be attained.
    pub lower_estimate: bool,
    /// Restarts that ended on the iteration cap instead of the tolerance.
    pub unconverged_restarts: usize,
    pub budget: MobiusBudget,
}

fn search_param(y: &[f64], cap: f64) -> DVector<f64> {
    let y = DVector::from_column_slice(y);
    let r = y.norm();
    if r < 1e-300 {
        return y;
    }
    y * ((1.0 - cap) * r.tanh() / r)
}

/// Length of `T_a ∘ c`, or `None` where the map is undefined or stretches
/// the samples past `max_step`.
pub fn mapped_length(c: &SampledCurve, a: &DVector<f64>, max_step: f64) -> Option<f64> {
    MobiusMap::new(a.clone()).ok()?;
    let n = c.ambient_dim();
    let a2 = a.norm_squared();
    let mut flat = Vec::with_capacity(n * c.points.len());
    for x in &c.points {
        let xa = x.dot(a);
        let x2 = x.norm_squared();
        let den = a2 * x2 + 2.0 * xa + 1.0;
        if den < 1e-14 {
            return None;
        }
        let k = x2 + 2.0 * xa + 1.0;
        let start = flat.len();
        flat.extend(
            x.iter()
                .zip(a.iter())
                .map(|(xi, ai)| (xi * (1.0 - a2) + ai * k) / den),
        );
        let norm = flat[start..].iter().map(|v| v * v).sum::<f64>().sqrt();
        flat[start..].iter_mut().for_each(|v| *v /= norm);
    }
    let m = c.points.len();
    let pt = |i: usize| &flat[(i % m) * n..(i % m) * n + n];
    let chord = |i: usize, j: usize| {
        pt(i)
            .iter()
            .zip(pt(j))
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    };
    let count = if c.closed { m } else { m - 1 };
    // A chord of length d subtends the angle 2·asin(d/2).
    let max_chord = 2.0 * (0.5 * max_step).sin();
    let mut fine = 0.0;
    for i in 0..count {
        let d = chord(i, i + 1);
        if d > max_chord {
            return None;
        }
        fine += d;
    }
    if count % 2 != 0 {
        return Some(fine);
    }
    let coarse: f64 = (0..count / 2).map(|i| chord(2 * i, 2 * i + 2)).sum();
    Some((4.0 * fine - coarse) / 3.0)
}

/// Estimate `sup_a length(T_a ∘ c)` by multi-start Nelder–Mead over
/// `a = (1 − cap)·tanh|y|·y/|y|`, with the blow-up limit `2π` evaluated
/// separately. Parameters whose mapped samples are too sparse for a trusted
/// length are rejected.
pub fn mobius_volume(
    c: &SampledCurve,
    budget: MobiusBudget,
    seed: u64,
) -> Result<MobiusVolumeResult> {
    if budget.restarts == 0 || budget.iterations == 0 {
        return Err(invalid(
            "budget must allow at least one restart and one iteration",
        ));
    }
    let n = c.ambient_dim();
    let initial_length = curve_length_on_sphere(c);
    let objective = |y: &[f64]| -> f64 {
        mapped_length(c, &search_param(y, budget.cap), budget.max_step).unwrap_or(f64::NAN)
    };
    let runs: Vec<(f64, Vec<f64>, bool)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let start: Vec<f64> = if r == 0 {
                vec![0.0; n]
            } else {
                let mut rng = seeded(
                    seed.wrapping_mul(0x2545_F491_4F6C_DD1D)
                        .wrapping_add(r as u64),
                );
                (gaussian_vector(&mut rng, n) * 0.5)
                    .iter()
                    .copied()
                    .collect()
            };
            let nm = NelderMead {
                max_iter: budget.iterations,
                ftol: 1e-14,
                xtol: budget.tol,
                initial_step: 0.25,
            };
            let m = nm.maximize(objective, &start);
            (m.value, m.x, m.iterations >= budget.iterations)
        })
        .collect();
    let unconverged_restarts = runs.iter().filter(|r| r.2).count();
    let (searched, y, _) = runs
        .into_iter()
        .filter(|r| r.0.is_finite())
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((initial_length, vec![0.0; n], false));
    let searched = searched.max(initial_length);
    let lower_bound_great_sphere = round_sphere_volume(2)?;
    Ok(MobiusVolumeResult {
        initial_length,
        searched,
        argmax_a: search_param(&y, budget.cap),
        lower_bound_great_sphere,
        sup_estimate: searched.max(lower_bound_great_sphere),
        lower_estimate: true,
        unconverged_restarts,
        budget,
    })
}

/// Best mapped length over a polar grid of parameters: the origin plus
/// `radii` equally spaced radii in (0, `max_radius`] times `directions`
/// spiral-distributed directions on 𝕊² (or equally spaced angles on 𝕊¹).
pub fn grid_search(
    c: &SampledCurve,
    radii: usize,
    directions: usize,
    max_radius: f64,
    max_step: f64,
) -> Result<(f64, DVector<f64>)> {
    let n = c.ambient_dim();
    if !(2..=3).contains(&n) {
        return Err(invalid("grid search supports curves in 𝕊¹ and 𝕊²"));
    }
    if !(max_radius < 1.0) {
        return Err(invalid("grid radius must be below 1"));
    }
    let dirs: Vec<DVector<f64>> = (0..directions)
        .map(|i| {
            if n == 2 {
                let t = 2.0 * PI * i as f64 / directions as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            } else {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / directions as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = PI * (3.0 - 5f64.sqrt()) * i as f64;
                DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
            }
        })
        .collect();
    let mut params = vec![DVector::zeros(n)];
    for k in 1..=radii {
        let r = max_radius * k as f64 / radii as f64;
        params.extend(dirs.iter().map(|d| d * r));
    }
    params
        .into_par_iter()
        .filter_map(|a| mapped_length(c, &a, max_step).map(|l| (l, a)))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .ok_or_else(|| GeomError::Numeric("no grid point gave a trusted length".into()))
}

/// `count + 1` samples of the great-circle arc that leaves `from` in the unit
/// direction `via` (orthogonal to `from`) and spans `angle`.
fn circle_arc(
    from: &DVector<f64>,
    via: &DVector<f64>,
    angle: f64,
    count: usize,
) -> Vec<DVector<f64>> {
    (0..=count)
        .map(|i| {
            let t = angle * i as f64 / count as f64;
            from * t.cos() + via * t.sin()
        })
        .collect()
}

/// Great circle in the `xy`-plane of `ℝ³`.
pub fn great_circle(samples: usize) -> SampledCurve {
    latitude_circle(PI / 2.0, samples)
}

/// Circle at colatitude `beta` (polar angle from `+z`) in `𝕊²`.
pub fn latitude_circle(beta: f64, samples: usize) -> SampledCurve {
    let points = (0..samples)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            DVector::from_vec(vec![beta.sin() * t.cos(), beta.sin() * t.sin(), beta.cos()])
        })
        .collect();
    SampledCurve {
        points,
        closed: true,
    }
}

/// Jordan curve on `𝕊²` built from the equator `S`: two arcs of `S` are
/// removed around the points `(±1, 0, 0)` where `S` meets the great circle
/// `S⊥` in the `xz`-plane, and the gaps are bridged by two semicircles through
/// the poles that meet `S` orthogonally at `(cos ε, ±sin ε, 0)` and their
/// antipodes.
///
/// Traversal: the arc of `S` through `+y` from `(cos ε, sin ε, 0)` to
/// `(−cos ε, sin ε, 0)`, the semicircle through the south pole, the arc of
/// `S` through `−y`, and the semicircle through the north pole. Its length is
/// `4π − 4ε`. Each piece gets an even number of samples proportional to its
/// length, so corners sit on even indices.
pub fn example_34_curve(eps: f64, samples: usize) -> Result<SampledCurve> {
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(invalid("eps must lie in (0, π/2)"));
    }
    if samples < 16 {
        return Err(invalid("need at least 16 samples"));
    }
    let v = |x: f64, y: f64, z: f64| DVector::from_vec(vec![x, y, z]);
    let (c, s) = (eps.cos(), eps.sin());
    let p11 = v(c, s, 0.0);
    let p12 = v(c, -s, 0.0);
    let total = 4.0 * PI - 4.0 * eps;
    let count = |len: f64| {
        let k = ((samples as f64 * len / total) / 2.0).round().max(2.0) as usize;
        2 * k
    };
    let arc_len = PI - 2.0 * eps;
    let orth = |from: &DVector<f64>, toward: &DVector<f64>| {
        let w = toward - from * from.dot(toward);
        let n = w.norm();
        w / n
    };
    let south = v(0.0, 0.0, -1.0);
    let north = v(0.0, 0.0, 1.0);
    let mut points = Vec::new();
    let mut push = |mut arc: Vec<DVector<f64>>| {
        arc.pop();
        points.extend(arc);
    };
    // A+: p11 → −p12 through +y.
    push(circle_arc(
        &p11,
        &orth(&p11, &v(0.0, 1.0, 0.0)),
        arc_len,
        count(arc_len),
    ));
    // S₂: −p12 → p12 through the south pole.
    let m12 = -&p12;
    push(circle_arc(&m12, &south, PI, count(PI)));
    // A−: p12 → −p11 through −y.
    push(circle_arc(
        &p12,
        &orth(&p12, &v(0.0, -1.0, 0.0)),
        arc_len,
        count(arc_len),
    ));
    // S₁: −p11 → p11 through the north pole.
    let m11 = -&p11;
    push(circle_arc(&m11, &north, PI, count(PI)));
    SampledCurve::new(points, true)
}
