//! Length bounds for spherical polygons and chains, a numerical search for
//! their extremal configurations, and near-extremal Euclidean polygons.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};
use crate::optimize::NelderMead;
use crate::polycurve::{
    spherical_length, total_curvature, validate, PolygonalCurve, SphericalPolygon,
};
use crate::random::{seeded, unit_vector};
use crate::spaceform::{sphere_angle, SpaceForm};

/// Tolerance of the equality detectors.
pub const EQUALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Closed triangle, length ≤ 2π.
    Triangle,
    /// Open chain `p₀p₁p₂`, length ≤ 2π − θ with θ = d(p₀, p₂).
    Chain1,
    /// Open chain `p₀p₁p₂p₃`, length ≤ 2π + θ with θ = d(p₀, p₃).
    Chain2,
    /// Closed polygon with 2m + 1 vertices, length ≤ 2mπ.
    ClosedOdd,
    /// Open chain with 2m + 1 vertices, length ≤ 2mπ − θ with θ = d(p₀, p₂ₘ).
    OpenOdd,
    /// Closed polygon with an even number k of vertices, length ≤ kπ.
    ClosedEven,
}

impl Variant {
    pub fn is_closed(self) -> bool {
        matches!(
            self,
            Variant::Triangle | Variant::ClosedOdd | Variant::ClosedEven
        )
    }

    /// The closed variant matching a vertex count.
    pub fn closed_for(k: usize) -> Result<Self> {
        match k {
            3 => Ok(Variant::Triangle),
            k if k >= 5 && k % 2 == 1 => Ok(Variant::ClosedOdd),
            k if k >= 2 && k % 2 == 0 => Ok(Variant::ClosedEven),
            _ => Err(invalid(format!("no closed bound for {k} vertices"))),
        }
    }

    fn check_arity(self, k: usize) -> Result<()> {
        let ok = match self {
            Variant::Triangle | Variant::Chain1 => k == 3,
            Variant::Chain2 => k == 4,
            Variant::ClosedOdd | Variant::OpenOdd => k >= 3 && k % 2 == 1,
            Variant::ClosedEven => k >= 2 && k % 2 == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("{self:?} does not accept {k} points")))
        }
    }

    /// The bound with θ = 0: the value the search objective approaches.
    fn nominal(self, k: usize) -> f64 {
        match self {
            Variant::Triangle | Variant::Chain1 | Variant::Chain2 => 2.0 * PI,
            Variant::ClosedOdd | Variant::OpenOdd => (k - 1) as f64 * PI,
            Variant::ClosedEven => k as f64 * PI,
        }
    }

    fn bound(self, k: usize, theta: f64) -> f64 {
        match self {
            Variant::Chain1 | Variant::OpenOdd => self.nominal(k) - theta,
            Variant::Chain2 => self.nominal(k) + theta,
            _ => self.nominal(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityFlags {
    pub antipodal_pair: bool,
    pub great_circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub variant: Variant,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    /// Distance between the chain endpoints (0 for closed variants).
    pub theta: f64,
    pub equality_flags: EqualityFlags,
}

/// Measure a spherical polygon or chain against its length bound.
pub fn check_bound(points: &[DVector<f64>], variant: Variant) -> Result<BoundCheck> {
    variant.check_arity(points.len())?;
    let sp = SphericalPolygon::new(points.to_vec(), variant.is_closed())?;
    Ok(check_unchecked(&sp, variant))
}

fn check_unchecked(sp: &SphericalPolygon, variant: Variant) -> BoundCheck {
    let pts = &sp.vertices;
    let k = pts.len();
    let measured = spherical_length(sp);
    let theta = if variant.is_closed() {
        0.0
    } else {
        sphere_angle(&pts[0], &pts[k - 1])
    };
    let bound = variant.bound(k, theta);
    BoundCheck {
        variant,
        measured,
        bound,
        slack: bound - measured,
        theta,
        equality_flags: equality_flags(pts),
    }
}

pub fn equality_flags(points: &[DVector<f64>]) -> EqualityFlags {
    let mut antipodal_pair = false;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if (&points[i] + &points[j]).norm() < EQUALITY_TOL {
                antipodal_pair = true;
            }
        }
    }
    EqualityFlags {
        antipodal_pair,
        great_circle: third_singular_value(points) < EQUALITY_TOL,
    }
}

/// Third largest singular value of the matrix with the points as columns;
/// zero exactly when all points lie on one great circle.
pub fn third_singular_value(points: &[DVector<f64>]) -> f64 {
    if points.len() < 3 || points[0].len() < 3 {
        return 0.0;
    }
    let m = DMatrix::from_columns(points);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.get(2).copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Budget {
    pub fn new(restarts: usize, iterations: usize) -> Result<Self> {
        if restarts == 0 || iterations == 0 {
            return Err(invalid(
                "budget must allow at least one restart and one iteration",
            ));
        }
        Ok(Self {
            restarts,
            iterations,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub variant: Variant,
    /// Best value of `measured − bound + nominal`, where nominal is the bound at θ = 0.
    pub sup_estimate: f64,
    /// The value the estimate is compared against.
    pub bound: f64,
    #[serde(with = "crate::serde_vec::many")]
    pub argmax: Vec<DVector<f64>>,
    /// Set when the estimate is above `bound + 1e−6`; never expected.
    pub exceeded: bool,
}

/// Multi-start Nelder–Mead maximization of the polygon length on a product
/// of unit spheres in `ℝ^ambient`.
///
/// Each point is parametrized by an unconstrained vector that is normalized
/// before evaluation. For open variants the objective is the length shifted by
/// the θ-dependent part of the bound, so the supremum is a constant.
/// Restarts run in parallel with independent seeded streams.
pub fn extremal_search(
    k: usize,
    variant: Variant,
    ambient: usize,
    budget: Budget,
    seed: u64,
) -> Result<ExtremalResult> {
    variant.check_arity(k)?;
    if ambient < 2 {
        return Err(invalid("ambient dimension must be at least 2"));
    }
    let nominal = variant.nominal(k);
    let objective = |x: &[f64]| -> f64 {
        let pts = unpack(x, k, ambient);
        if pts.is_empty() {
            return f64::NEG_INFINITY;
        }
        let sp = SphericalPolygon {
            vertices: pts,
            closed: variant.is_closed(),
        };
        let c = check_unchecked(&sp, variant);
        c.measured - c.bound + nominal
    };

    let runs: Vec<(f64, Vec<f64>)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded(
                seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(r as u64),
            );
            let mut x: Vec<f64> = (0..k)
                .flat_map(|_| {
                    unit_vector(&mut rng, ambient)
                        .iter()
                        .copied()
                        .collect::<Vec<_>>()
                })
                .collect();
            let nm = NelderMead::default()
                .with_max_iter(budget.iterations)
                .with_step(0.3)
                .with_ftol(1e-15);
            let mut best = nm.maximize(objective, &x);
            x.clone_from(&best.x);
            // Per-vertex sweeps escape the stalls full-dimensional simplices hit
            // when several vertices must move together along a great circle.
            for _ in 0..3 {
                for v in 0..k {
                    let block = v * ambient..(v + 1) * ambient;
                    let sub = NelderMead::default()
                        .with_max_iter(budget.iterations.div_ceil(4).max(20))
                        .with_step(0.2)
                        .with_ftol(1e-15);
                    let base = x.clone();
                    let m = sub.maximize(
                        |y| {
                            let mut z = base.clone();
                            z[block.clone()].copy_from_slice(y);
                            objective(&z)
                        },
                        &base[block.clone()],
                    );
                    if m.value > best.value {
                        x[block.clone()].copy_from_slice(&m.x);
                        best.value = m.value;
                    }
                }
            }
            let polish = NelderMead::default()
                .with_max_iter(budget.iterations)
                .with_step(0.01)
                .with_ftol(1e-15)
                .maximize(objective, &x);
            if polish.value > best.value {
                x = polish.x;
                best.value = polish.value;
            }
            (best.value, x)
        })
        .collect();

    let (value, x) = runs
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    Ok(ExtremalResult {
        variant,
        sup_estimate: value,
        bound: nominal,
        argmax: unpack(&x, k, ambient),
        exceeded: value > nominal + 1e-6,
    })
}

fn unpack(x: &[f64], k: usize, ambient: usize) -> Vec<DVector<f64>> {
    let mut pts = Vec::with_capacity(k);
    for v in 0..k {
        let d = DVector::from_column_slice(&x[v * ambient..(v + 1) * ambient]);
        let n = d.norm();
        if !(n > 1e-12) {
            return Vec::new();
        }
        pts.push(d / n);
    }
    pts
}

/// Simple closed polygon in ℝ³ with 2m + 1 vertices and total curvature at
/// least 2mπ − eps.
///
/// Starts from the degenerate curve that runs back and forth along a unit
/// segment, with the last vertex at the midpoint of the closing segment, and
/// moves every coordinate by at most eps / (10k). Perturbations are resampled
/// until the curve is simple and the total curvature target is met.
pub fn sharpness_family(m: usize, eps: f64, seed: u64) -> Result<PolygonalCurve> {
    if m < 2 {
        return Err(invalid("sharpness family needs m ≥ 2"));
    }
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(invalid("eps must lie in (0, 0.1]"));
    }
    let k = 2 * m + 1;
    let mut base: Vec<[f64; 3]> = (0..2 * m)
        .map(|i| {
            if i % 2 == 0 {
                [0.0, 0.0, 0.0]
            } else {
                [1.0, 0.0, 0.0]
            }
        })
        .collect();
    base.push([0.5, 0.0, 0.0]);

    let space = SpaceForm::euclidean(3);
    let delta = eps / (10.0 * k as f64);
    let target = 2.0 * m as f64 * PI - eps;
    let mut rng = seeded(seed);
    const TRIES: usize = 1000;
    for _ in 0..TRIES {
        let coords: Vec<Vec<f64>> = base
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| c + delta * (2.0 * rng.random::<f64>() - 1.0))
                    .collect()
            })
            .collect();
        let Ok(curve) = PolygonalCurve::from_coords(space, &coords, true) else {
            continue;
        };
        if !validate(&curve).simple {
            continue;
        }
        let Ok(tc) = total_curvature(&curve) else {
            continue;
        };
        if tc.cusps.is_empty() && tc.total >= target {
            return Ok(curve);
        }
    }
    Err(GeomError::ConstructionFailed(format!(
        "no simple perturbation with total curvature ≥ {target} after {TRIES} tries"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    #[test]
    fn antipodal_triangle_is_extremal() {
        let p0 = v(&[0.0, 0.0, 1.0]);
        let p2 = v(&[0.6, 0.8, 0.0]);
        let c = check_bound(&[p0.clone(), -p0, p2], Variant::Triangle).unwrap();
        assert_eq!(c.measured, 2.0 * PI);
        assert_eq!(c.slack, 0.0);
        assert!(c.equality_flags.antipodal_pair);
    }

    #[test]
    fn orthogonal_triangle() {
        let pts = [
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
        ];
        let c = check_bound(&pts, Variant::Triangle).unwrap();
        assert!((c.measured - 1.5 * PI).abs() < 1e-15);
        assert!((c.slack - 0.5 * PI).abs() < 1e-15);
        assert!(!c.equality_flags.antipodal_pair && !c.equality_flags.great_circle);
    }

    #[test]
    fn chain1_equality() {
        let p = v(&[0.0, 1.0, 0.0]);
        let c = check_bound(&[p.clone(), -p.clone(), p], Variant::Chain1).unwrap();
        assert_eq!(c.bound, 2.0 * PI);
        assert_eq!(c.measured, 2.0 * PI);
        assert_eq!(c.slack, 0.0);
    }

    #[test]
    fn chain2_theta_pi_equality_case() {
        // p₁ = p₃ antipodal to p₀ = p₂: every segment has length π.
        let p = v(&[1.0, 0.0, 0.0]);
        let c = check_bound(&[p.clone(), -p.clone(), p.clone(), -p], Variant::Chain2).unwrap();
        assert_eq!(c.theta, PI);
        assert_eq!(c.measured, 3.0 * PI);
        assert_eq!(c.slack, 0.0);
    }

    #[test]
    fn arity_is_checked() {
        let p = v(&[1.0, 0.0, 0.0]);
        assert!(check_bound(&[p.clone(), p.clone()], Variant::Triangle).is_err());
        assert!(check_bound(&[p.clone(), p.clone(), p.clone(), p], Variant::ClosedOdd).is_err());
    }

    #[test]
    fn great_circle_flag() {
        let pts: Vec<_> = (0..5)
            .map(|i| {
                let a = 4.0 * PI * i as f64 / 5.0;
                v(&[a.cos(), a.sin(), 0.0])
            })
            .collect();
        let c = check_bound(&pts, Variant::ClosedOdd).unwrap();
        assert!((c.measured - 4.0 * PI).abs() < 1e-12);
        assert!(c.equality_flags.great_circle);
    }

    #[test]
    fn sharpness_rejects_bad_eps() {
        assert!(sharpness_family(2, 0.0, 1).is_err());
        assert!(sharpness_family(2, 0.2, 1).is_err());
        assert!(sharpness_family(1, 0.01, 1).is_err());
    }

    #[test]
    fn sharpness_pentagon() {
        let c = sharpness_family(2, 1e-2, 5).unwrap();
        let tc = total_curvature(&c).unwrap().total;
        assert!((4.0 * PI - 1e-2..4.0 * PI).contains(&tc), "{tc}");
        assert!(validate(&c).simple);
    }
}
