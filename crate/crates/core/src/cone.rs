//! Cones over polygonal curves: cone angles, densities, convex hull sampling
//! and the embeddedness certificate for five-vertex curves.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};
use crate::optimize::NelderMead;
use crate::polycurve::{validate, PolygonalCurve};
use crate::random::seeded;
use crate::spaceform::{
    sphere_angle, CenteredChart, GeodesicArc, Kind, Point, SpaceForm, ANTIPODAL_GAP,
};

/// Points closer than this to the curve are treated as lying on it.
pub const ON_CURVE_TOL: f64 = 1e-8;

/// Where a point sits relative to the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DensityCase {
    OffCurve,
    OnEdge { segment: usize },
    AtVertex { vertex: usize, exterior_angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDensityReport {
    pub p: Point,
    pub angle: f64,
    pub density: f64,
    pub case: DensityCase,
    pub bound_applied: f64,
    pub pass: bool,
}

impl ConeDensityReport {
    pub fn margin(&self) -> f64 {
        self.bound_applied - self.density
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Nearest {
    pub distance: f64,
    pub segment: usize,
}

/// Distance from `p` to the curve and the segment that attains it.
pub fn distance_to_curve(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<f64> {
    Ok(nearest_segment(s, p, c)?.distance)
}

pub(crate) fn nearest_segment(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<Nearest> {
    let x = s.canonical(p)?;
    let pts = c.canonical_vertices()?;
    nearest_canonical(s.kind(), &x, &pts, c)
}

fn nearest_canonical(
    kind: Kind,
    x: &DVector<f64>,
    pts: &[DVector<f64>],
    c: &PolygonalCurve,
) -> Result<Nearest> {
    let mut best = Nearest {
        distance: f64::INFINITY,
        segment: 0,
    };
    let chart = (kind == Kind::Hyperbolic).then(|| CenteredChart::from_canonical(kind, x.clone()));
    for (idx, (i, j)) in c.segments().enumerate() {
        let d = match kind {
            Kind::Euclidean => point_segment_distance(x, &pts[i], &pts[j]),
            Kind::Sphere => point_arc_distance(x, &pts[i], &pts[j]),
            Kind::Hyperbolic => {
                let chart = chart.as_ref().expect("hyperbolic chart");
                let a = klein_from_ball(&chart.map_canonical(&pts[i])?);
                let b = klein_from_ball(&chart.map_canonical(&pts[j])?);
                let origin = DVector::zeros(a.len());
                point_segment_distance(&origin, &a, &b)
                    .min(1.0 - 1e-16)
                    .atanh()
            }
        };
        if d < best.distance {
            best = Nearest {
                distance: d,
                segment: idx,
            };
        }
    }
    Ok(best)
}

fn klein_from_ball(u: &DVector<f64>) -> DVector<f64> {
    u * (2.0 / (1.0 + u.norm_squared()))
}

fn point_segment_distance(x: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((x - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x - (a + d * t)).norm()
}

/// Great-circle distance from `x` to the minimizing arc from `a` to `b`.
fn point_arc_distance(x: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let len = sphere_angle(a, b);
    let e2 = b - a * a.dot(b);
    let n2 = e2.norm();
    let endpoint = sphere_angle(x, a).min(sphere_angle(x, b));
    if n2 < 1e-15 {
        return endpoint;
    }
    let e2 = e2 / n2;
    let (c1, c2) = (x.dot(a), x.dot(&e2));
    let phi = c2.atan2(c1);
    if (0.0..=len).contains(&phi) {
        let y = a * c1 + &e2 * c2;
        let perp = (x - &y).norm();
        perp.atan2(y.norm()).min(endpoint)
    } else {
        endpoint
    }
}

fn check_cone_apex(
    s: &SpaceForm,
    x: &DVector<f64>,
    pts: &[DVector<f64>],
    c: &PolygonalCurve,
) -> Result<()> {
    if s.kind() != Kind::Sphere {
        return Ok(());
    }
    for v in pts {
        if sphere_angle(x, v) >= PI - ANTIPODAL_GAP {
            return Err(invalid("cone apex is antipodal to a vertex"));
        }
    }
    let antipode = -x;
    if nearest_canonical(Kind::Sphere, &antipode, pts, c)?.distance < ON_CURVE_TOL {
        return Err(invalid("antipode of the cone apex lies on the curve"));
    }
    Ok(())
}

/// One-dimensional angle of the cone from `p` over the curve: the sum of the
/// angles each segment subtends at `p`.
pub fn cone_angle(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<f64> {
    let x = s.canonical(p)?;
    let pts = c.canonical_vertices()?;
    let near = nearest_canonical(s.kind(), &x, &pts, c)?;
    if near.distance < ON_CURVE_TOL {
        return Err(GeomError::OnCurve {
            distance: near.distance,
        });
    }
    check_cone_apex(s, &x, &pts, c)?;
    subtended_sum(s, &x, &pts, c, &[])
}

fn subtended_sum(
    s: &SpaceForm,
    x: &DVector<f64>,
    pts: &[DVector<f64>],
    c: &PolygonalCurve,
    skip: &[usize],
) -> Result<f64> {
    let mut total = 0.0;
    for (idx, (i, j)) in c.segments().enumerate() {
        if skip.contains(&idx) {
            continue;
        }
        total += s.canonical_vertex_angle(x, &pts[i], &pts[j])?;
    }
    Ok(total)
}

/// Cone angle measured in a conformal chart centred at `p`: every segment is
/// sampled densely, the samples are projected radially onto the unit sphere
/// around the origin, and the chords between consecutive projections are
/// summed. Sample intervals whose projected chord exceeds `1e−4` are bisected
/// further.
pub fn cone_angle_sampled(
    s: &SpaceForm,
    p: &Point,
    c: &PolygonalCurve,
    samples_per_segment: usize,
) -> Result<f64> {
    if samples_per_segment == 0 {
        return Err(invalid("need at least one sample per segment"));
    }
    let x = s.canonical(p)?;
    let pts = c.canonical_vertices()?;
    let near = nearest_canonical(s.kind(), &x, &pts, c)?;
    if near.distance < ON_CURVE_TOL {
        return Err(GeomError::OnCurve {
            distance: near.distance,
        });
    }
    check_cone_apex(s, &x, &pts, c)?;
    let chart = CenteredChart::from_canonical(s.kind(), x);
    let n = samples_per_segment;
    let mut total = 0.0;
    for (i, j) in c.segments() {
        let arc = GeodesicArc::new(s.kind(), pts[i].clone(), pts[j].clone())?;
        let project =
            |t: f64| -> Result<DVector<f64>> { Ok(chart.map_canonical(&arc.at(t))?.normalize()) };
        let mut prev = (0.0, project(0.0)?);
        for step in 1..=n {
            let t = step as f64 / n as f64;
            let next = (t, project(t)?);
            total += refined_chords(&project, &prev, &next, 0)?;
            prev = next;
        }
    }
    Ok(total)
}

/// Longest chord kept without subdivision in [`cone_angle_sampled`].
const MAX_CHORD: f64 = 1e-4;

/// Chord sum between two projected samples, bisecting in the curve parameter
/// wherever the projection moves fast (apex close to the segment).
fn refined_chords(
    project: &impl Fn(f64) -> Result<DVector<f64>>,
    a: &(f64, DVector<f64>),
    b: &(f64, DVector<f64>),
    depth: usize,
) -> Result<f64> {
    let chord = (&b.1 - &a.1).norm();
    if chord <= MAX_CHORD || depth >= 48 {
        return Ok(chord);
    }
    let t = 0.5 * (a.0 + b.0);
    let mid = (t, project(t)?);
    Ok(refined_chords(project, a, &mid, depth + 1)? + refined_chords(project, &mid, b, depth + 1)?)
}

/// Density bound for a point on a five-vertex curve: 3/2 inside an edge and
/// 3/2 − θ/(2π) at a vertex with exterior angle θ.
pub fn on_curve_bound(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<f64> {
    if c.len() != 5 || !c.closed() {
        return Err(invalid(
            "on-curve bounds are defined for closed five-vertex curves",
        ));
    }
    match classify(s, p, c)? {
        DensityCase::OffCurve => Err(invalid("point is not on the curve")),
        DensityCase::OnEdge { .. } => Ok(1.5),
        DensityCase::AtVertex { exterior_angle, .. } => Ok(1.5 - exterior_angle / (2.0 * PI)),
    }
}

pub fn classify(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<DensityCase> {
    let x = s.canonical(p)?;
    let pts = c.canonical_vertices()?;
    let near = nearest_canonical(s.kind(), &x, &pts, c)?;
    if near.distance >= ON_CURVE_TOL {
        return Ok(DensityCase::OffCurve);
    }
    let k = pts.len();
    for (v, q) in pts.iter().enumerate() {
        if s.canonical_dist(&x, q) < ON_CURVE_TOL {
            let exterior_angle = if c.closed() || (v > 0 && v < k - 1) {
                PI - s.canonical_vertex_angle(q, &pts[(v + k - 1) % k], &pts[(v + 1) % k])?
            } else {
                0.0
            };
            return Ok(DensityCase::AtVertex {
                vertex: v,
                exterior_angle,
            });
        }
    }
    Ok(DensityCase::OnEdge {
        segment: near.segment,
    })
}

/// Cone density at `p` with the bound that applies to its position.
///
/// Off the curve the density is the cone angle over 2π, compared with 2. On
/// the curve the segments through `p` span a degenerate cone, and the density
/// comes from the remaining chain, compared with the on-curve bound.
pub fn density_report(s: &SpaceForm, p: &Point, c: &PolygonalCurve) -> Result<ConeDensityReport> {
    let case = classify(s, p, c)?;
    let x = s.canonical(p)?;
    let pts = c.canonical_vertices()?;
    let k = pts.len();
    let (angle, bound_applied) = match case {
        DensityCase::OffCurve => {
            check_cone_apex(s, &x, &pts, c)?;
            (subtended_sum(s, &x, &pts, c, &[])?, 2.0)
        }
        DensityCase::OnEdge { segment } => {
            let bound = on_curve_bound(s, p, c)?;
            let x = project_onto_segment(s, &x, &pts, c, segment);
            (subtended_sum(s, &x, &pts, c, &[segment])?, bound)
        }
        DensityCase::AtVertex { vertex, .. } => {
            let bound = on_curve_bound(s, p, c)?;
            let skip = [(vertex + k - 1) % k, vertex];
            (subtended_sum(s, &pts[vertex], &pts, c, &skip)?, bound)
        }
    };
    let density = angle / (2.0 * PI);
    Ok(ConeDensityReport {
        p: p.clone(),
        angle,
        density,
        case,
        bound_applied,
        pass: density < bound_applied,
    })
}

/// Nearest point of a segment, so that a point within tolerance of an edge is
/// measured as lying exactly on it.
fn project_onto_segment(
    s: &SpaceForm,
    x: &DVector<f64>,
    pts: &[DVector<f64>],
    c: &PolygonalCurve,
    segment: usize,
) -> DVector<f64> {
    let (i, j) = c.segments().nth(segment).expect("segment index");
    let Ok(arc) = GeodesicArc::new(s.kind(), pts[i].clone(), pts[j].clone()) else {
        return x.clone();
    };
    let f = |t: f64| s.canonical_dist(x, &arc.at(t));
    // Golden-section search; distance to a geodesic is unimodal along it.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    arc.at(0.5 * (lo + hi))
}

/// Point of the geodesic convex hull obtained by folding the vertices in one
/// at a time: with running weight `W`, the next vertex `vᵢ` is reached by moving
/// the fraction `wᵢ / (W + wᵢ)` along the geodesic towards it.
///
/// In Euclidean space this is exactly the convex combination with the given
/// weights.
pub fn hull_point(s: &SpaceForm, vertices: &[Point], weights: &[f64]) -> Result<Point> {
    if vertices.is_empty() || vertices.len() != weights.len() {
        return Err(invalid("need one non-negative weight per vertex"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(invalid("weights must be non-negative and not all zero"));
    }
    let mut acc: Option<(Point, f64)> = None;
    for (v, &w) in vertices.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        acc = Some(match acc {
            None => (v.clone(), w),
            Some((x, total)) => {
                let t = w / (total + w);
                (s.geodesic_point(&x, v, t)?, total + w)
            }
        });
    }
    Ok(acc.expect("positive total weight").0)
}

/// `n` random points of the geodesic convex hull of `vertices`, each the root of
/// a depth-3 binary tree of random geodesic interpolations between vertices.
pub fn hull_sample<R: Rng + ?Sized>(
    s: &SpaceForm,
    vertices: &[Point],
    n: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(invalid("need at least one hull sample"));
    }
    if vertices.is_empty() {
        return Err(invalid("hull of an empty vertex set"));
    }
    (0..n).map(|_| hull_tree(s, vertices, 3, rng)).collect()
}

fn hull_tree<R: Rng + ?Sized>(
    s: &SpaceForm,
    vertices: &[Point],
    depth: usize,
    rng: &mut R,
) -> Result<Point> {
    if depth == 0 {
        return Ok(vertices[rng.random_range(0..vertices.len())].clone());
    }
    let a = hull_tree(s, vertices, depth - 1, rng)?;
    let b = hull_tree(s, vertices, depth - 1, rng)?;
    s.geodesic_point(&a, &b, rng.random::<f64>())
}

/// Minimum-norm point of the convex hull of `points` (Wolfe's algorithm).
pub fn min_norm_point(points: &[DVector<f64>]) -> Result<DVector<f64>> {
    if points.is_empty() {
        return Err(invalid("min-norm point of an empty set"));
    }
    let scale = points
        .iter()
        .map(|p| p.norm_squared())
        .fold(0.0, f64::max)
        .max(1e-300);
    let tol = 1e-12 * scale;
    let start = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .norm_squared()
                .total_cmp(&points[b].norm_squared())
        })
        .expect("non-empty");
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();
    for _ in 0..(100 * points.len() + 100) {
        let j = (0..points.len())
            .min_by(|&a, &b| x.dot(&points[a]).total_cmp(&x.dot(&points[b])))
            .expect("non-empty");
        if x.norm_squared() - x.dot(&points[j]) <= tol || active.contains(&j) {
            return Ok(x);
        }
        active.push(j);
        lambda.push(0.0);
        loop {
            let mu = affine_min_norm(points, &active)?;
            if mu.iter().all(|m| *m > 1e-14) {
                lambda = mu;
                break;
            }
            let mut theta = 1.0_f64;
            for (l, m) in lambda.iter().zip(&mu) {
                if *m <= 1e-14 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut keep_active = Vec::new();
            let mut keep_lambda = Vec::new();
            for (a, l) in active.iter().zip(&lambda) {
                if *l > 1e-14 {
                    keep_active.push(*a);
                    keep_lambda.push(*l);
                }
            }
            active = keep_active;
            lambda = keep_lambda;
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        x = active
            .iter()
            .zip(&lambda)
            .fold(DVector::zeros(x.len()), |acc, (a, l)| {
                acc + &points[*a] * *l
            });
    }
    Ok(x)
}

/// Affine weights (summing to one) of the min-norm point of the affine hull.
fn affine_min_norm(points: &[DVector<f64>], active: &[usize]) -> Result<Vec<f64>> {
    let m = active.len();
    let mut sys = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (r, &a) in active.iter().enumerate() {
        for (c, &b) in active.iter().enumerate() {
            sys[(r, c)] = points[a].dot(&points[b]);
        }
        sys[(r, m)] = 1.0;
        sys[(m, r)] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = sys
        .clone()
        .lu()
        .solve(&rhs)
        .or_else(|| sys.svd(true, true).solve(&rhs, 1e-14).ok())
        .ok_or_else(|| GeomError::Numeric("singular affine system".into()))?;
    Ok(sol.iter().take(m).copied().collect())
}

/// Smallest closed spherical cap containing the points, as (centre, radius).
///
/// The centre direction maximizes the smallest inner product with the
/// points; by duality it is the normalized minimum-norm point of their convex
/// hull. Fails when the points lie in no open hemisphere.
pub fn enclosing_cap(points: &[DVector<f64>]) -> Result<(DVector<f64>, f64)> {
    let y = min_norm_point(points)?;
    let n = y.norm();
    if n < 1e-12 {
        return Err(GeomError::Degenerate(
            "points are not contained in an open hemisphere".into(),
        ));
    }
    let center = y / n;
    let radius = points
        .iter()
        .map(|p| sphere_angle(&center, p))
        .fold(0.0, f64::max);
    Ok((center, radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub curve: PolygonalCurve,
    pub samples: usize,
    /// The report with the smallest margin below its bound.
    pub worst: ConeDensityReport,
    pub worst_margin: f64,
    /// Largest density among the sampled points.
    pub max_density: f64,
    pub verdict: Verdict,
    pub preconditions: Vec<Precondition>,
}

/// Sample the convex hull of a closed five-vertex curve and check every cone
/// density against its bound.
///
/// `Certified` means the curve is simple, every sampled report passed and,
/// on the sphere, the curve lies in a geodesic ball of radius below π/4.
pub fn certify_embedded(
    s: &SpaceForm,
    c: &PolygonalCurve,
    n: usize,
    seed: u64,
) -> Result<Certificate> {
    if c.len() != 5 || !c.closed() {
        return Err(invalid(
            "certification needs a closed curve with five vertices",
        ));
    }
    if n == 0 {
        return Err(invalid("need at least one hull sample"));
    }
    let mut preconditions = Vec::new();
    let report = validate(c);
    preconditions.push(Precondition {
        name: "simple".into(),
        satisfied: report.simple,
        detail: report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    });
    if s.kind() == Kind::Sphere {
        let pts = c.canonical_vertices()?;
        let (satisfied, detail) = match enclosing_cap(&pts) {
            Ok((_, r)) => (
                r < PI / 4.0,
                format!("smallest enclosing ball radius {r:.12}"),
            ),
            Err(e) => (false, e.to_string()),
        };
        preconditions.push(Precondition {
            name: "enclosing ball radius < π/4".into(),
            satisfied,
            detail,
        });
    }

    let mut rng = seeded(seed);
    let samples = hull_sample(s, c.vertices(), n, &mut rng)?;
    let reports: Vec<ConeDensityReport> = samples
        .par_iter()
        .map(|p| density_report(s, p, c))
        .collect::<Result<_>>()?;
    let worst = reports
        .iter()
        .min_by(|a, b| a.margin().total_cmp(&b.margin()))
        .expect("n ≥ 1")
        .clone();
    let max_density = reports
        .iter()
        .map(|r| r.density)
        .fold(f64::NEG_INFINITY, f64::max);
    let all_pass = reports.iter().all(|r| r.pass);
    let verdict = if all_pass && preconditions.iter().all(|p| p.satisfied) {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        curve: c.clone(),
        samples: n,
        worst_margin: worst.margin(),
        worst,
        max_density,
        verdict,
        preconditions,
    })
}

/// Largest off-curve cone density found over the convex hull: random hull
/// points followed by Nelder–Mead refinement of the hull weights from the
/// best few.
pub fn density_search(
    s: &SpaceForm,
    c: &PolygonalCurve,
    samples: usize,
    seed: u64,
) -> Result<(Point, f64)> {
    let verts = c.vertices();
    let k = verts.len();
    let mut rng = seeded(seed);
    let density_at = |w: &[f64]| -> f64 {
        let weights: Vec<f64> = w.iter().map(|x| x.exp()).collect();
        hull_point(s, verts, &weights)
            .and_then(|p| cone_angle(s, &p, c))
            .map(|a| a / (2.0 * PI))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let mut starts: Vec<(f64, Vec<f64>)> = (0..samples.max(1))
        .map(|_| {
            let w: Vec<f64> = (0..k).map(|_| 3.0 * rng.random::<f64>() - 1.5).collect();
            (density_at(&w), w)
        })
        .collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let refined: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .take(8)
        .map(|(_, w)| {
            let m = NelderMead::default()
                .with_max_iter(400)
                .with_step(0.3)
                .maximize(density_at, &w);
            (m.value, m.x)
        })
        .collect();
    let (best, w) = refined
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start");
    let weights: Vec<f64> = w.iter().map(|x| x.exp()).collect();
    Ok((hull_point(s, verts, &weights)?, best))
}
