//! Knot diagrams of closed polygons in `ℝ³` and their determinants.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};
use crate::polycurve::{validate, PolygonalCurve};
use crate::random::{seeded, unit_vector};
use crate::spaceform::{Kind, SpaceForm};

const RETRIES: usize = 100;
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub over_arc: usize,
    pub under_in_arc: usize,
    pub under_out_arc: usize,
    pub sign: i8,
    pub over_segment: usize,
    pub under_segment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub crossings: Vec<Crossing>,
    pub arcs: usize,
    /// Crossing `i` appears as `i + 1` when passed over and `−(i + 1)` when
    /// passed under.
    pub gauss_code: Vec<i64>,
    /// Projection direction actually used.
    pub direction: [f64; 3],
}

impl Diagram {
    /// Whether the Gauss code alternates over and under.
    pub fn is_alternating(&self) -> bool {
        let n = self.gauss_code.len();
        (0..n).all(|i| (self.gauss_code[i] > 0) != (self.gauss_code[(i + 1) % n] > 0))
    }
}

fn coordinates(c: &PolygonalCurve) -> Result<Vec<Vector3<f64>>> {
    if c.space().kind() != Kind::Euclidean || c.space().dim() != 3 {
        return Err(invalid("knot diagrams need a curve in ℝ³"));
    }
    if !c.closed() || c.len() < 3 {
        return Err(invalid(
            "knot diagrams need a closed polygon with at least 3 vertices",
        ));
    }
    Ok(c.vertices()
        .iter()
        .map(|p| Vector3::new(p.coords()[0], p.coords()[1], p.coords()[2]))
        .collect())
}

fn cross2(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn point_segment_2d(p: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

struct RawCrossing {
    over: (usize, f64),
    under: (usize, f64),
    sign: i8,
    at: Vector2<f64>,
}

/// Crossings seen from `d`, or `None` if the projection is not generic.
fn raw_crossings(v: &[Vector3<f64>], d: Vector3<f64>) -> Option<Vec<RawCrossing>> {
    let k = v.len();
    let helper = if d.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - d * helper.dot(&d)).normalize();
    let e2 = d.cross(&e1);
    let flat: Vec<Vector2<f64>> = v
        .iter()
        .map(|p| Vector2::new(p.dot(&e1), p.dot(&e2)))
        .collect();
    let depth: Vec<f64> = v.iter().map(|p| p.dot(&d)).collect();
    let scale = flat
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = REL_TOL * scale;
    let seg = |i: usize| (flat[i], flat[(i + 1) % k]);
    let adjacent = |i: usize, j: usize| (i + 1) % k == j || (j + 1) % k == i;

    for i in 0..k {
        let (a, b) = seg(i);
        if (b - a).norm() <= eps {
            return None;
        }
        let (_, c) = seg((i + 1) % k);
        let u = a - b;
        let w = c - b;
        if cross2(u, w).abs() <= eps * (u.norm() + w.norm()) && u.dot(&w) > 0.0 {
            return None;
        }
        for j in 0..k {
            if j == i || (j + 1) % k == i {
                continue;
            }
            let (p, q) = seg(j);
            if point_segment_2d(a, p, q) <= eps {
                return None;
            }
        }
    }

    let mut out: Vec<RawCrossing> = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if adjacent(i, j) {
                continue;
            }
            let (a, b) = seg(i);
            let (p, q) = seg(j);
            let r = b - a;
            let s = q - p;
            let denom = cross2(r, s);
            if denom.abs() <= 1e-14 * r.norm() * s.norm() {
                continue;
            }
            let t = cross2(p - a, s) / denom;
            let u = cross2(p - a, r) / denom;
            if !(0.0 < t && t < 1.0 && 0.0 < u && u < 1.0) {
                continue;
            }
            let hi = depth[i] + t * (depth[(i + 1) % k] - depth[i]);
            let hj = depth[j] + u * (depth[(j + 1) % k] - depth[j]);
            if (hi - hj).abs() <= eps {
                return None;
            }
            let at = a + r * t;
            if out.iter().any(|c| (c.at - at).norm() <= eps) {
                return None;
            }
            let (over, under, od, ud) = if hi > hj {
                ((i, t), (j, u), r, s)
            } else {
                ((j, u), (i, t), s, r)
            };
            let sign = if cross2(od, ud) > 0.0 { 1 } else { -1 };
            out.push(RawCrossing {
                over,
                under,
                sign,
                at,
            });
        }
    }
    Some(out)
}

fn assemble(raw: Vec<RawCrossing>, direction: Vector3<f64>) -> Diagram {
    let n = raw.len();
    let pos = |(seg, t): (usize, f64)| seg as f64 + t;
    let mut unders: Vec<(f64, usize)> = raw
        .iter()
        .enumerate()
        .map(|(i, c)| (pos(c.under), i))
        .collect();
    unders.sort_by(|a, b| a.0.total_cmp(&b.0));
    let arc_at = |s: f64| -> usize {
        match unders.iter().rposition(|u| u.0 <= s) {
            Some(j) => j,
            None => n - 1,
        }
    };
    let mut crossings: Vec<Crossing> = raw
        .iter()
        .map(|c| Crossing {
            over_arc: arc_at(pos(c.over)),
            under_in_arc: 0,
            under_out_arc: 0,
            sign: c.sign,
            over_segment: c.over.0,
            under_segment: c.under.0,
        })
        .collect();
    for (j, &(_, i)) in unders.iter().enumerate() {
        crossings[i].under_out_arc = j;
        crossings[i].under_in_arc = (j + n - 1) % n;
    }
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * n);
    for (i, c) in raw.iter().enumerate() {
        events.push((pos(c.over), i as i64 + 1));
        events.push((pos(c.under), -(i as i64 + 1)));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    Diagram {
        crossings,
        arcs: n,
        gauss_code: events.into_iter().map(|e| e.1).collect(),
        direction: [direction.x, direction.y, direction.z],
    }
}

/// Project a simple closed polygon in `ℝ³` along `direction`.
///
/// A non-generic direction is replaced by nearby random directions, up to 100
/// times.
pub fn project(c: &PolygonalCurve, direction: [f64; 3]) -> Result<Diagram> {
    let v = coordinates(c)?;
    let report = validate(c);
    if !report.simple {
        return Err(invalid(format!(
            "curve is not simple: {}",
            report
                .violations
                .first()
                .map(|x| x.to_string())
                .unwrap_or_default()
        )));
    }
    let d = Vector3::from(direction);
    if !(d.norm() > 0.0 && d.iter().all(|x| x.is_finite())) {
        return Err(invalid(
            "projection direction must be a non-zero finite vector",
        ));
    }
    let mut d = d.normalize();
    let mut rng = seeded(0x6b6e_6f74);
    for _ in 0..=RETRIES {
        if let Some(raw) = raw_crossings(&v, d) {
            return Ok(assemble(raw, d));
        }
        let jitter = unit_vector(&mut rng, 3);
        d = (d + Vector3::new(jitter[0], jitter[1], jitter[2]) * 1e-3).normalize();
    }
    Err(GeomError::Degenerate(
        "no generic projection direction found".into(),
    ))
}

/// Rows `2·x_over − x_in − x_out`, one per crossing, columns per arc.
pub fn presentation_matrix(d: &Diagram) -> Vec<Vec<i64>> {
    let n = d.arcs;
    d.crossings
        .iter()
        .map(|c| {
            let mut row = vec![0i64; n];
            row[c.over_arc] += 2;
            row[c.under_in_arc] -= 1;
            row[c.under_out_arc] -= 1;
            row
        })
        .collect()
}

/// Exact determinant by fraction-free elimination.
pub fn bareiss(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `|det|` of the presentation matrix with its last row and column removed.
pub fn determinant(d: &Diagram) -> u64 {
    let n = d.arcs;
    if n == 0 {
        return 1;
    }
    let m = presentation_matrix(d);
    let minor: Vec<Vec<i64>> = m[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
    bareiss(&minor).unsigned_abs() as u64
}

/// Determinants of the diagrams seen from `count` random directions.
pub fn determinant_sweep(c: &PolygonalCurve, count: usize, seed: u64) -> Result<Vec<u64>> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| {
            let u = unit_vector(&mut rng, 3);
            project(c, [u[0], u[1], u[2]]).map(|d| determinant(&d))
        })
        .collect()
}

/// A hexagonal trefoil with integer vertices.
pub fn trefoil_hexagon() -> PolygonalCurve {
    let coords = [
        [5.0, -8.0, -2.0],
        [-1.0, 10.0, 6.0],
        [-8.0, -5.0, 1.0],
        [9.0, 3.0, 10.0],
        [3.0, 1.0, -5.0],
        [-5.0, -1.0, 8.0],
    ];
    let coords: Vec<Vec<f64>> = coords.iter().map(|p| p.to_vec()).collect();
    PolygonalCurve::from_coords(SpaceForm::euclidean(3), &coords, true)
        .expect("fixed coordinates are valid")
}

/// Cut the polygon by the plane `x = level` near its vertex `tip`, which must
/// be the only vertex beyond the plane. Returns the remaining vertices from
/// the cut point after `tip` round to the cut point before it.
fn open_at_tip(v: &[Vector3<f64>], tip: usize, level: f64) -> Vec<Vector3<f64>> {
    let k = v.len();
    let cut = |from: Vector3<f64>, to: Vector3<f64>| {
        let t = (level - from.x) / (to.x - from.x);
        from + (to - from) * t
    };
    let next = v[(tip + 1) % k];
    let prev = v[(tip + k - 1) % k];
    let mut out = vec![cut(v[tip], next)];
    out.extend((1..k).map(|s| v[(tip + s) % k]));
    out.push(cut(prev, v[tip]));
    out
}

/// Connected sum of two closed polygons in `ℝ³`.
///
/// `b` is moved to the right of `a`. The vertex of `a` with the largest `x`
/// and the vertex of `b` with the smallest `x` are cut off by planes that
/// meet no other part of either curve, and the four cut points are joined by
/// two straight edges.
pub fn connected_sum(a: &PolygonalCurve, b: &PolygonalCurve) -> Result<PolygonalCurve> {
    let va = coordinates(a)?;
    let vb = coordinates(b)?;
    let extreme = |v: &[Vector3<f64>], sign: f64| -> Result<(usize, f64)> {
        let mut xs: Vec<(f64, usize)> =
            v.iter().enumerate().map(|(i, p)| (sign * p.x, i)).collect();
        xs.sort_by(|p, q| q.0.total_cmp(&p.0));
        let gap = xs[0].0 - xs[1].0;
        if !(gap > 0.0) {
            return Err(GeomError::Degenerate("extreme vertex is not unique".into()));
        }
        Ok((xs[0].1, sign * (xs[0].0 - 0.5 * gap)))
    };
    let (ta, la) = extreme(&va, 1.0)?;
    let (tb, lb) = extreme(&vb, -1.0)?;
    let width = va.iter().chain(&vb).map(|p| p.norm()).fold(0.0, f64::max);
    let shift = Vector3::new(la - lb + width, 0.0, 0.0);
    let vb: Vec<Vector3<f64>> = vb.iter().map(|p| p + shift).collect();
    let mut out = open_at_tip(&va, ta, la);
    let forward = open_at_tip(&vb, tb, lb + shift.x);
    let backward: Vec<Vector3<f64>> = forward.iter().rev().copied().collect();
    let (last, first) = (out[out.len() - 1], out[0]);
    let cost =
        |path: &[Vector3<f64>]| (path[0] - last).norm() + (path[path.len() - 1] - first).norm();
    out.extend(if cost(&forward) <= cost(&backward) {
        forward
    } else {
        backward
    });
    let coords: Vec<Vec<f64>> = out.iter().map(|p| vec![p.x, p.y, p.z]).collect();
    let sum = PolygonalCurve::from_coords(SpaceForm::euclidean(3), &coords, true)?;
    if !validate(&sum).simple {
        return Err(GeomError::ConstructionFailed(
            "connected sum is not simple".into(),
        ));
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::simple_polygon;

    fn leibniz(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0i128;
        fn heap(k: usize, perm: &mut Vec<usize>, m: &[Vec<i64>], total: &mut i128) {
            if k == 1 {
                let n = perm.len();
                let mut inversions = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if perm[i] > perm[j] {
                            inversions += 1;
                        }
                    }
                }
                let prod: i128 = (0..n).map(|i| m[i][perm[i]] as i128).product();
                *total += if inversions % 2 == 0 { prod } else { -prod };
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, m, total);
                let j = if k % 2 == 0 { i } else { 0 };
                perm.swap(j, k - 1);
            }
        }
        heap(n, &mut perm, m, &mut total);
        total
    }

    /// Number of Fox `p`-colorings of the diagram.
    fn colorings(d: &Diagram, p: i64) -> usize {
        if d.arcs == 0 {
            return p as usize;
        }
        let n = d.arcs as u32;
        (0..(p as usize).pow(n))
            .filter(|&code| {
                let color = |arc: usize| (code / (p as usize).pow(arc as u32)) as i64 % p;
                d.crossings.iter().all(|c| {
                    (2 * color(c.over_arc) - color(c.under_in_arc) - color(c.under_out_arc))
                        .rem_euclid(p)
                        == 0
                })
            })
            .count()
    }

    fn segment_crossings_2d(c: &PolygonalCurve, d: [f64; 3]) -> usize {
        let v = coordinates(c).unwrap();
        let k = v.len();
        let d = Vector3::from(d).normalize();
        let flat: Vec<Vector3<f64>> = v.iter().map(|p| p - d * p.dot(&d)).collect();
        let mut count = 0;
        for i in 0..k {
            for j in i + 2..k {
                if i == 0 && j == k - 1 {
                    continue;
                }
                // Sign tests on the plane orthogonal to d.
                let (a, b, p, q) = (flat[i], flat[(i + 1) % k], flat[j], flat[(j + 1) % k]);
                let side = |x: Vector3<f64>, y: Vector3<f64>, z: Vector3<f64>| {
                    (y - x).cross(&(z - x)).dot(&d)
                };
                if side(a, b, p) * side(a, b, q) < 0.0 && side(p, q, a) * side(p, q, b) < 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    fn pentagon() -> PolygonalCurve {
        let coords: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                vec![a.cos(), a.sin(), 0.0]
            })
            .collect();
        PolygonalCurve::from_coords(SpaceForm::euclidean(3), &coords, true).unwrap()
    }

    #[test]
    fn planar_pentagon_has_no_crossings() {
        let d = project(&pentagon(), [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.crossings.len(), 0);
        assert_eq!(determinant(&d), 1);
    }

    #[test]
    fn bowtie_is_rejected() {
        let coords = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let c = PolygonalCurve::from_coords(SpaceForm::euclidean(3), &coords, true).unwrap();
        assert!(project(&c, [0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn trefoil_hexagon_diagram() {
        let t = trefoil_hexagon();
        assert!(validate(&t).simple);
        let dir = [0.0, 0.0, 1.0];
        let d = project(&t, dir).unwrap();
        assert_eq!(d.crossings.len(), 3);
        assert_eq!(segment_crossings_2d(&t, d.direction), 3);
        assert!(d.is_alternating());
        assert_eq!(determinant(&d), 3);
        assert_eq!(colorings(&d, 3), 9);
        let m = presentation_matrix(&d);
        let minor: Vec<Vec<i64>> = m[..2].iter().map(|r| r[..2].to_vec()).collect();
        assert_eq!(leibniz(&minor).abs(), 3);
    }

    #[test]
    fn determinant_is_direction_independent() {
        let t = trefoil_hexagon();
        let dets = determinant_sweep(&t, 50, 11).unwrap();
        assert!(dets.iter().all(|&x| x == 3), "{dets:?}");
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let t = trefoil_hexagon();
        let s = connected_sum(&t, &t).unwrap();
        let dets = determinant_sweep(&s, 10, 5).unwrap();
        assert!(dets.iter().all(|&x| x == 9), "{dets:?}");
        let d = project(&s, [0.3, 0.2, 0.9]).unwrap();
        let m = presentation_matrix(&d);
        let n = d.arcs - 1;
        let minor: Vec<Vec<i64>> = m[..n].iter().map(|r| r[..n].to_vec()).collect();
        if n <= 8 {
            assert_eq!(leibniz(&minor).unsigned_abs(), 9);
        }
        assert_eq!(bareiss(&minor).unsigned_abs(), 9);
    }

    #[test]
    fn bareiss_matches_leibniz() {
        let mut rng = seeded(2);
        use rand::Rng;
        for n in 1..=6 {
            let m: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect())
                .collect();
            assert_eq!(bareiss(&m), leibniz(&m));
        }
    }

    #[test]
    fn random_pentagons_are_unobstructed() {
        let mut rng = seeded(19);
        let space = SpaceForm::euclidean(3);
        for _ in 0..200 {
            let c = simple_polygon(&mut rng, &space, 5, f64::INFINITY, true, 100).unwrap();
            let u = unit_vector(&mut rng, 3);
            let d = project(&c, [u[0], u[1], u[2]]).unwrap();
            let det = determinant(&d);
            assert_eq!(det, 1);
            assert_eq!(colorings(&d, 3), 3);
        }
    }
}
