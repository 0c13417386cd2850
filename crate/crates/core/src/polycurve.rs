//! Piecewise geodesic curves, their tangent indicatrix and total curvature.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spaceform::{sphere_angle, GeodesicArc, Kind, Point, SpaceForm, ANTIPODAL_GAP};

/// A curve made of minimizing geodesic segments between consecutive vertices.
///
/// Closed curves have an implicit last segment from the final vertex back to
/// the first one; the first vertex is not repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalCurve {
    space: SpaceForm,
    vertices: Vec<Point>,
    closed: bool,
}

impl PolygonalCurve {
    pub fn new(space: SpaceForm, vertices: Vec<Point>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(invalid("a polygonal curve needs at least two vertices"));
        }
        for v in &vertices {
            space.check(v)?;
        }
        Ok(Self {
            space,
            vertices,
            closed,
        })
    }

    pub fn from_coords(space: SpaceForm, coords: &[Vec<f64>], closed: bool) -> Result<Self> {
        let vertices = coords
            .iter()
            .map(|c| space.point(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, vertices, closed)
    }

    pub fn space(&self) -> &SpaceForm {
        &self.space
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Vertex index pairs `(i, i + 1)` of every segment, wrapping when closed.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..self.segment_count()).map(move |i| (i, (i + 1) % k))
    }

    /// Indices of the vertices where the curve turns.
    pub fn turning_vertices(&self) -> std::ops::Range<usize> {
        if self.closed {
            0..self.vertices.len()
        } else {
            1..self.vertices.len() - 1
        }
    }

    /// Apply a map to every vertex (used for isometry checks).
    pub fn map_vertices(
        &self,
        space: SpaceForm,
        mut f: impl FnMut(&Point) -> Result<Point>,
    ) -> Result<Self> {
        let vertices = self
            .vertices
            .iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, vertices, self.closed)
    }

    pub(crate) fn canonical_vertices(&self) -> Result<Vec<DVector<f64>>> {
        self.vertices.iter().map(|v| v.canonical()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    CoincidentConsecutiveVertices {
        index: usize,
    },
    NonMinimizingSegment {
        segment: usize,
    },
    AdjacentSegmentsOverlap {
        vertex: usize,
    },
    SegmentsIntersect {
        first: usize,
        second: usize,
        distance: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CoincidentConsecutiveVertices { index } => {
                write!(f, "coincident consecutive vertices at index {index}")
            }
            Violation::NonMinimizingSegment { segment } => {
                write!(f, "segment {segment} is not a minimizing geodesic")
            }
            Violation::AdjacentSegmentsOverlap { vertex } => {
                write!(
                    f,
                    "adjacent segments fold back over each other at vertex {vertex}"
                )
            }
            Violation::SegmentsIntersect {
                first,
                second,
                distance,
            } => write!(
                f,
                "segments {first} and {second} meet (distance {distance:e})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub simple: bool,
    pub violations: Vec<Violation>,
}

/// Decide whether the curve is simple: consecutive vertices distinct, every
/// segment minimizing, adjacent segments meeting only at their shared vertex
/// and non-adjacent segments disjoint.
///
/// Segments are compared in a chart where they are straight: Cartesian
/// coordinates, the Klein model for hyperbolic space and a gnomonic
/// projection for sphere segment pairs contained in an open hemisphere.
/// Other sphere pairs fall back to sampled arc proximity with local
/// refinement.
pub fn validate(c: &PolygonalCurve) -> ValidationReport {
    let space = c.space();
    let tol = space.tol();
    let mut violations = Vec::new();

    let pts = match c.canonical_vertices() {
        Ok(p) => p,
        Err(_) => {
            return ValidationReport {
                simple: false,
                violations: vec![Violation::CoincidentConsecutiveVertices { index: 0 }],
            }
        }
    };
    let segs: Vec<(usize, usize)> = c.segments().collect();
    let mut degenerate = vec![false; segs.len()];

    for (s, &(i, j)) in segs.iter().enumerate() {
        let d = space.canonical_dist(&pts[i], &pts[j]);
        if d <= tol {
            violations.push(Violation::CoincidentConsecutiveVertices { index: i });
            degenerate[s] = true;
        } else if space.kind() == Kind::Sphere && d >= PI - ANTIPODAL_GAP {
            violations.push(Violation::NonMinimizingSegment { segment: s });
            degenerate[s] = true;
        }
    }

    let straight: Option<Vec<DVector<f64>>> = match space.kind() {
        Kind::Euclidean => Some(pts.clone()),
        Kind::Hyperbolic => Some(pts.iter().map(klein).collect()),
        Kind::Sphere => None,
    };

    for a in 0..segs.len() {
        for b in (a + 1)..segs.len() {
            if degenerate[a] || degenerate[b] {
                continue;
            }
            let (a0, a1) = segs[a];
            let (b0, b1) = segs[b];
            let shared: Vec<usize> = [a0, a1]
                .into_iter()
                .filter(|v| *v == b0 || *v == b1)
                .collect();
            if !shared.is_empty() {
                for v in shared {
                    let ua = if a0 == v { a1 } else { a0 };
                    let ub = if b0 == v { b1 } else { b0 };
                    let folded = space
                        .canonical_vertex_angle(&pts[v], &pts[ua], &pts[ub])
                        .map(|ang| ang <= tol)
                        .unwrap_or(true);
                    if folded {
                        violations.push(Violation::AdjacentSegmentsOverlap { vertex: v });
                    }
                }
                continue;
            }
            let distance = match &straight {
                Some(q) => segment_distance(&q[a0], &q[a1], &q[b0], &q[b1]),
                None => sphere_segment_distance(&pts[a0], &pts[a1], &pts[b0], &pts[b1]),
            };
            if distance <= tol {
                violations.push(Violation::SegmentsIntersect {
                    first: a,
                    second: b,
                    distance,
                });
            }
        }
    }
    ValidationReport {
        simple: violations.is_empty(),
        violations,
    }
}

fn klein(x: &DVector<f64>) -> DVector<f64> {
    x.rows(1, x.len() - 1) / x[0]
}

/// Minimum distance between segments `[p1, q1]` and `[p2, q2]` in ℝⁿ.
pub(crate) fn segment_distance(
    p1: &DVector<f64>,
    q1: &DVector<f64>,
    p2: &DVector<f64>,
    q2: &DVector<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let eps = 1e-300;
    let (s, t);
    if a <= eps && e <= eps {
        return r.norm();
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-14 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm()
}

fn sphere_segment_distance(
    a0: &DVector<f64>,
    a1: &DVector<f64>,
    b0: &DVector<f64>,
    b1: &DVector<f64>,
) -> f64 {
    let sum = a0 + a1 + b0 + b1;
    let n = sum.norm();
    if n > 1e-12 {
        let c = sum / n;
        let heights = [a0.dot(&c), a1.dot(&c), b0.dot(&c), b1.dot(&c)];
        if heights.iter().all(|h| *h > 0.05) {
            let g = |x: &DVector<f64>, h: f64| x / h;
            return segment_distance(
                &g(a0, heights[0]),
                &g(a1, heights[1]),
                &g(b0, heights[2]),
                &g(b1, heights[3]),
            );
        }
    }
    sampled_arc_distance(a0, a1, b0, b1)
}

/// Chord distance between two great-circle arcs by grid search plus local
/// pattern refinement.
fn sampled_arc_distance(
    a0: &DVector<f64>,
    a1: &DVector<f64>,
    b0: &DVector<f64>,
    b1: &DVector<f64>,
) -> f64 {
    let (Ok(arc_a), Ok(arc_b)) = (
        GeodesicArc::new(Kind::Sphere, a0.clone(), a1.clone()),
        GeodesicArc::new(Kind::Sphere, b0.clone(), b1.clone()),
    ) else {
        return 0.0;
    };
    let eval = |s: f64, t: f64| (arc_a.at(s) - arc_b.at(t)).norm();
    const GRID: usize = 64;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity((GRID + 1) * (GRID + 1));
    for i in 0..=GRID {
        for j in 0..=GRID {
            let s = i as f64 / GRID as f64;
            let t = j as f64 / GRID as f64;
            cells.push((eval(s, t), s, t));
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(d0, s0, t0) in cells.iter().take(4) {
        let (mut d, mut s, mut t) = (d0, s0, t0);
        let mut step = 1.0 / GRID as f64;
        while step > 1e-13 {
            let mut improved = false;
            for (ds, dt) in [
                (1.0, 0.0),
                (-1.0, 0.0),
                (0.0, 1.0),
                (0.0, -1.0),
                (1.0, 1.0),
                (-1.0, -1.0),
                (1.0, -1.0),
                (-1.0, 1.0),
            ] {
                let sn = (s + ds * step).clamp(0.0, 1.0);
                let tn = (t + dt * step).clamp(0.0, 1.0);
                let dn = eval(sn, tn);
                if dn < d {
                    d = dn;
                    s = sn;
                    t = tn;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(d);
    }
    best
}

/// Polygon on the unit sphere `𝕊ⁿ⁻¹ ⊂ ℝⁿ`, joined by minimizing arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalPolygon {
    #[serde(with = "crate::serde_vec::many")]
    pub vertices: Vec<DVector<f64>>,
    pub closed: bool,
}

impl SphericalPolygon {
    pub fn new(vertices: Vec<DVector<f64>>, closed: bool) -> Result<Self> {
        for v in &vertices {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(invalid("spherical polygon vertices must be unit vectors"));
            }
        }
        Ok(Self { vertices, closed })
    }

    pub fn from_coords(coords: &[Vec<f64>], closed: bool) -> Result<Self> {
        Self::new(
            coords
                .iter()
                .map(|c| DVector::from_vec(c.clone()))
                .collect(),
            closed,
        )
    }
}

/// Unit directions of the edges of a closed Euclidean polygon.
pub fn tangent_indicatrix(c: &PolygonalCurve) -> Result<SphericalPolygon> {
    if c.space().kind() != Kind::Euclidean {
        return Err(invalid(
            "the tangent indicatrix is defined for Euclidean polygons",
        ));
    }
    if !c.closed() {
        return Err(invalid("the tangent indicatrix needs a closed polygon"));
    }
    let pts = c.canonical_vertices()?;
    let mut dirs = Vec::with_capacity(pts.len());
    for (i, j) in c.segments() {
        let d = &pts[j] - &pts[i];
        let n = d.norm();
        if n <= c.space().tol() {
            return Err(invalid(format!("segment {i} has zero length")));
        }
        dirs.push(d / n);
    }
    Ok(SphericalPolygon {
        vertices: dirs,
        closed: true,
    })
}

/// Total length of a spherical polygon: the sum of the great-circle arcs.
pub fn spherical_length(sp: &SphericalPolygon) -> f64 {
    let k = sp.vertices.len();
    if k < 2 {
        return 0.0;
    }
    let segs = if sp.closed { k } else { k - 1 };
    (0..segs)
        .map(|i| sphere_angle(&sp.vertices[i], &sp.vertices[(i + 1) % k]))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalCurvature {
    pub total: f64,
    /// Exterior angle at each turning vertex, in curve order.
    pub exterior_angles: Vec<f64>,
    /// Vertices whose exterior angle is π (the curve doubles back).
    pub cusps: Vec<usize>,
}

/// Sum of exterior angles `π − ∠(v_{i−1} v_i v_{i+1})` over the turning vertices.
///
/// Works in all three space forms. A vertex where the curve doubles back is
/// assigned exterior angle π and listed in `cusps`.
pub fn total_curvature(c: &PolygonalCurve) -> Result<TotalCurvature> {
    let space = c.space();
    let pts = c.canonical_vertices()?;
    let k = pts.len();
    let mut exterior_angles = Vec::new();
    let mut cusps = Vec::new();
    for i in c.turning_vertices() {
        let prev = &pts[(i + k - 1) % k];
        let next = &pts[(i + 1) % k];
        let interior = space.canonical_vertex_angle(&pts[i], prev, next)?;
        let ext = if interior <= space.tol() {
            cusps.push(i);
            PI
        } else {
            PI - interior
        };
        exterior_angles.push(ext);
    }
    Ok(TotalCurvature {
        total: exterior_angles.iter().sum(),
        exterior_angles,
        cusps,
    })
}

/// Exterior angle at a single vertex of the curve.
pub fn exterior_angle(c: &PolygonalCurve, vertex: usize) -> Result<f64> {
    let k = c.len();
    if vertex >= k || (!c.closed() && (vertex == 0 || vertex == k - 1)) {
        return Err(invalid(format!("vertex {vertex} is not a turning vertex")));
    }
    let space = c.space();
    let v = c.vertices();
    let interior =
        space.vertex_angle(&v[vertex], &v[(vertex + k - 1) % k], &v[(vertex + 1) % k])?;
    Ok(PI - interior)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(coords: &[[f64; 2]], closed: bool) -> PolygonalCurve {
        let pts: Vec<Vec<f64>> = coords.iter().map(|c| c.to_vec()).collect();
        PolygonalCurve::from_coords(SpaceForm::euclidean(2), &pts, closed).unwrap()
    }

    fn pentagon() -> PolygonalCurve {
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        planar(&pts, true)
    }

    #[test]
    fn convex_pentagon_is_simple() {
        let r = validate(&pentagon());
        assert!(r.simple, "{:?}", r.violations);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let c = planar(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], true);
        let r = validate(&c);
        assert!(!r.simple);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SegmentsIntersect { .. })));
    }

    #[test]
    fn repeated_vertex_is_reported() {
        let c = planar(
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            true,
        );
        let r = validate(&c);
        assert!(!r.simple);
        assert!(r.violations[0]
            .to_string()
            .contains("coincident consecutive vertices"));
    }

    #[test]
    fn back_and_forth_is_not_simple() {
        let c = planar(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]], true);
        assert!(!validate(&c).simple);
        let c = planar(&[[0.0, 0.0], [1.0, 0.0]], true);
        assert!(!validate(&c).simple);
    }

    #[test]
    fn triangle_and_square_have_total_curvature_two_pi() {
        let t = planar(&[[0.0, 0.0], [3.0, 0.1], [1.0, 2.0]], true);
        assert!((total_curvature(&t).unwrap().total - 2.0 * PI).abs() < 1e-14);
        let s = planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], true);
        assert!((total_curvature(&s).unwrap().total - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn pentagram_total_curvature() {
        // Oracle: the turn between consecutive pentagram edge directions,
        // computed from atan2 headings rather than vertex angles.
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let a = 4.0 * PI * i as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let mut oracle = 0.0;
        for i in 0..5 {
            let p = pts[i];
            let q = pts[(i + 1) % 5];
            let r = pts[(i + 2) % 5];
            let h1 = (q[1] - p[1]).atan2(q[0] - p[0]);
            let h2 = (r[1] - q[1]).atan2(r[0] - q[0]);
            let mut turn = (h2 - h1).abs();
            if turn > PI {
                turn = 2.0 * PI - turn;
            }
            oracle += turn;
        }
        assert!((oracle - 4.0 * PI).abs() < 1e-12);
        let c = planar(&pts, true);
        let tc = total_curvature(&c).unwrap();
        assert!((tc.total - oracle).abs() < 1e-12);
        assert!(!validate(&c).simple);
    }

    #[test]
    fn indicatrix_examples() {
        let tri = planar(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]], true);
        let ind = tangent_indicatrix(&tri).unwrap();
        for i in 0..3 {
            let d = sphere_angle(&ind.vertices[i], &ind.vertices[(i + 1) % 3]);
            assert!((d - 2.0 * PI / 3.0).abs() < 1e-14);
        }
        let sq = planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], true);
        let ind = tangent_indicatrix(&sq).unwrap();
        assert_eq!(ind.vertices.len(), 4);
        for i in 0..4 {
            let d = sphere_angle(&ind.vertices[i], &ind.vertices[(i + 1) % 4]);
            assert!((d - PI / 2.0).abs() < 1e-15);
        }
        assert!(tangent_indicatrix(&planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]], true)).is_err());
    }

    #[test]
    fn spherical_length_examples() {
        let ortho = SphericalPolygon::from_coords(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            true,
        )
        .unwrap();
        assert!((spherical_length(&ortho) - 1.5 * PI).abs() < 1e-15);
        let anti =
            SphericalPolygon::from_coords(&[vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]], false)
                .unwrap();
        assert!((spherical_length(&anti) - PI).abs() < 1e-15);
        for k in 3..12 {
            let pts: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / k as f64;
                    vec![a.cos(), 0.0, a.sin()]
                })
                .collect();
            let sp = SphericalPolygon::from_coords(&pts, true).unwrap();
            assert!((spherical_length(&sp) - 2.0 * PI).abs() < 1e-13);
        }
    }

    #[test]
    fn cusp_is_flagged() {
        let c = planar(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]], true);
        let tc = total_curvature(&c).unwrap();
        assert!(tc.cusps.contains(&1));
        assert_eq!(tc.exterior_angles[1], PI);
    }

    #[test]
    fn open_curves_skip_endpoints() {
        let c = planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false);
        let tc = total_curvature(&c).unwrap();
        assert_eq!(tc.exterior_angles.len(), 1);
        assert!((tc.total - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_and_spherical_crossings_are_detected() {
        let h = SpaceForm::hyperbolic(2);
        let bow = [[-0.5, -0.5], [0.5, 0.5], [0.5, -0.5], [-0.5, 0.5]];
        let pts: Vec<Vec<f64>> = bow.iter().map(|c| c.to_vec()).collect();
        let c = PolygonalCurve::from_coords(h, &pts, true).unwrap();
        assert!(!validate(&c).simple);

        let s = SpaceForm::sphere(2);
        let lift = |x: f64, y: f64| {
            let v = DVector::from_vec(vec![x, y, 1.0]).normalize();
            v.iter().copied().collect::<Vec<_>>()
        };
        let pts: Vec<Vec<f64>> = bow.iter().map(|c| lift(c[0], c[1])).collect();
        let c = PolygonalCurve::from_coords(s, &pts, true).unwrap();
        assert!(!validate(&c).simple);
        let square = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
        let pts: Vec<Vec<f64>> = square.iter().map(|c| lift(c[0], c[1])).collect();
        let c = PolygonalCurve::from_coords(s, &pts, true).unwrap();
        assert!(validate(&c).simple);
    }

    #[test]
    fn sampled_arc_distance_matches_gnomonic() {
        let a0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let a1 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let b0 = DVector::from_vec(vec![0.6, 0.6, 0.5]).normalize();
        let b1 = DVector::from_vec(vec![0.6, 0.6, -0.5]).normalize();
        assert!(sampled_arc_distance(&a0, &a1, &b0, &b1) < 1e-10);
        let b0 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let b1 = DVector::from_vec(vec![0.0, 0.6, 0.8]);
        let d = sampled_arc_distance(&a0, &a1, &b0, &b1);
        // closest pair: (0,1,0) and (0,0.6,0.8)
        assert!((d - (0.4f64 * 0.4 + 0.8 * 0.8).sqrt()).abs() < 1e-9);
    }
}
