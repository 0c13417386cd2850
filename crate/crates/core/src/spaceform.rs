//! Constant-curvature spaces and their coordinate models.
//!
//! Every [`Point`] carries the [`Model`] its coordinates are written in.
//! Arithmetic never mixes models implicitly; use [`Point::convert`] to move
//! between the two models of the same space.
//!
//! | kind        | models                                  | coords   |
//! |-------------|-----------------------------------------|----------|
//! | Euclidean   | `Cartesian`                             | `n`      |
//! | Sphere      | `UnitSphereEmbedded`, `StereoBall`      | `n+1`, `n` |
//! | Hyperbolic  | `Hyperboloid`, `PoincareBall`           | `n+1`, `n` |
//!
//! The stereographic chart of the sphere projects from the north pole
//! `(1, 0, …, 0)`, so the south pole `(-1, 0, …, 0)` sits at the origin and
//! `sin ρ = 2r / (1 + r²)` where `ρ` is the distance from the south pole.
//! The Poincaré ball is the image of the upper sheet of the hyperboloid
//! under `u = x / (1 + x₀)`, with `sinh ρ = 2r / (1 − r²)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};

/// Default absolute tolerance used by geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sphere pairs closer than this to antipodal have no unique minimizing geodesic.
pub const ANTIPODAL_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Euclidean,
    Sphere,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Cartesian,
    UnitSphereEmbedded,
    StereoBall,
    Hyperboloid,
    PoincareBall,
}

impl Model {
    pub fn kind(self) -> Kind {
        match self {
            Model::Cartesian => Kind::Euclidean,
            Model::UnitSphereEmbedded | Model::StereoBall => Kind::Sphere,
            Model::Hyperboloid | Model::PoincareBall => Kind::Hyperbolic,
        }
    }

    /// Number of coordinates a point of an `dim`-dimensional space has in this model.
    pub fn coord_len(self, dim: usize) -> usize {
        match self {
            Model::UnitSphereEmbedded | Model::Hyperboloid => dim + 1,
            _ => dim,
        }
    }

    /// Model used for internal arithmetic: embedded sphere, hyperboloid, or Cartesian.
    pub fn canonical(kind: Kind) -> Model {
        match kind {
            Kind::Euclidean => Model::Cartesian,
            Kind::Sphere => Model::UnitSphereEmbedded,
            Kind::Hyperbolic => Model::Hyperboloid,
        }
    }
}

/// Radial function `J(ρ)`: `sin ρ`, `ρ` or `sinh ρ` according to the curvature sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialProfile {
    kind: Kind,
}

impl RadialProfile {
    pub fn new(kind: Kind) -> Self {
        Self { kind }
    }

    pub fn value(&self, rho: f64) -> f64 {
        match self.kind {
            Kind::Euclidean => rho,
            Kind::Sphere => rho.sin(),
            Kind::Hyperbolic => rho.sinh(),
        }
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        match self.kind {
            Kind::Euclidean => 1.0,
            Kind::Sphere => rho.cos(),
            Kind::Hyperbolic => rho.cosh(),
        }
    }
}

/// A point written in the coordinates of a specific model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    model: Model,
    #[serde(with = "crate::serde_vec")]
    coords: DVector<f64>,
}

impl Point {
    pub(crate) fn from_raw(model: Model, coords: DVector<f64>) -> Self {
        Self { model, coords }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn kind(&self) -> Kind {
        self.model.kind()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Dimension of the space this point lives in.
    pub fn dim(&self) -> usize {
        match self.model {
            Model::UnitSphereEmbedded | Model::Hyperboloid => self.coords.len() - 1,
            _ => self.coords.len(),
        }
    }

    /// Rewrite the point in another model of the same space.
    pub fn convert(&self, target: Model) -> Result<Point> {
        if target.kind() != self.kind() {
            return Err(invalid(format!(
                "cannot convert a {:?} point to {:?}",
                self.model, target
            )));
        }
        if target == self.model {
            return Ok(self.clone());
        }
        let canonical = self.canonical()?;
        from_canonical(target, &canonical)
    }

    /// Coordinates in the canonical model of this point's space.
    pub fn canonical(&self) -> Result<DVector<f64>> {
        match self.model {
            Model::Cartesian | Model::UnitSphereEmbedded | Model::Hyperboloid => {
                Ok(self.coords.clone())
            }
            Model::StereoBall => Ok(stereo_to_sphere(&self.coords)),
            Model::PoincareBall => ball_to_hyperboloid(&self.coords),
        }
    }
}

/// Free-function form of [`Point::convert`].
pub fn convert(p: &Point, target: Model) -> Result<Point> {
    p.convert(target)
}

pub(crate) fn from_canonical(model: Model, v: &DVector<f64>) -> Result<Point> {
    let coords = match model {
        Model::Cartesian | Model::UnitSphereEmbedded | Model::Hyperboloid => v.clone(),
        Model::StereoBall => sphere_to_stereo(v)?,
        Model::PoincareBall => hyperboloid_to_ball(v),
    };
    Ok(Point::from_raw(model, coords))
}

fn sphere_to_stereo(x: &DVector<f64>) -> Result<DVector<f64>> {
    let denom = 1.0 - x[0];
    if denom <= 1e-300 {
        return Err(GeomError::Numeric(
            "the north pole has no image in the stereographic chart".into(),
        ));
    }
    Ok(x.rows(1, x.len() - 1).map(|xi| xi / denom))
}

fn stereo_to_sphere(u: &DVector<f64>) -> DVector<f64> {
    let r2 = u.norm_squared();
    let mut x = DVector::zeros(u.len() + 1);
    x[0] = (r2 - 1.0) / (r2 + 1.0);
    for i in 0..u.len() {
        x[i + 1] = 2.0 * u[i] / (1.0 + r2);
    }
    x
}

fn hyperboloid_to_ball(x: &DVector<f64>) -> DVector<f64> {
    let denom = 1.0 + x[0];
    x.rows(1, x.len() - 1).map(|xi| xi / denom)
}

fn ball_to_hyperboloid(u: &DVector<f64>) -> Result<DVector<f64>> {
    let r2 = u.norm_squared();
    if r2 >= 1.0 {
        return Err(invalid("Poincaré ball point must satisfy |u| < 1"));
    }
    let mut x = DVector::zeros(u.len() + 1);
    x[0] = (1.0 + r2) / (1.0 - r2);
    for i in 0..u.len() {
        x[i + 1] = 2.0 * u[i] / (1.0 - r2);
    }
    Ok(x)
}

/// Minkowski bilinear form `−x₀y₀ + Σ xᵢyᵢ`.
pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

/// Put a vector back on the upper sheet by recomputing `x₀`.
pub(crate) fn reproject_hyperboloid(x: &mut DVector<f64>) {
    let spatial = x.rows(1, x.len() - 1).norm_squared();
    x[0] = (1.0 + spatial).sqrt();
}

/// Angle between two vectors, `2·atan2(|â − b̂|, |â + b̂|)`; stable at 0 and π.
pub(crate) fn robust_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    let ua = a / na;
    let ub = b / nb;
    2.0 * (&ua - &ub).norm().atan2((&ua + &ub).norm())
}

/// Great-circle distance between two unit vectors.
pub(crate) fn sphere_angle(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    2.0 * (p - q).norm().atan2((p + q).norm())
}

pub(crate) fn hyperboloid_dist(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let d = p - q;
    let chord2 = minkowski(&d, &d).max(0.0);
    2.0 * (chord2.sqrt() / 2.0).asinh()
}

/// Hyperbolic distance between two Poincaré-ball points.
pub(crate) fn ball_dist(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let num = (u - v).norm();
    let den = ((1.0 - u.norm_squared()) * (1.0 - v.norm_squared())).sqrt();
    2.0 * (num / den).asinh()
}

/// Möbius transformation of the closed unit ball sending the origin to `a`:
///
/// `T_a(x) = [(1 − |a|²)x + (|x|² + 2⟨x,a⟩ + 1)a] / (|a|²|x|² + 2⟨x,a⟩ + 1)`.
///
/// It is a hyperbolic isometry of the open ball and a conformal map of the
/// boundary sphere; its inverse is `T_{−a}`. Returns `None` when the
/// denominator vanishes.
pub fn ball_mobius(a: &DVector<f64>, x: &DVector<f64>) -> Option<DVector<f64>> {
    let aa = a.norm_squared();
    let xx = x.norm_squared();
    let xa = x.dot(a);
    let den = aa * xx + 2.0 * xa + 1.0;
    if den.abs() < 1e-14 {
        return None;
    }
    let num = x * (1.0 - aa) + a * (xx + 2.0 * xa + 1.0);
    Some(num / den)
}

/// Descriptor of the ambient space: curvature sign, dimension and coordinate model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    kind: Kind,
    dim: usize,
    model: Model,
    tol: f64,
}

impl SpaceForm {
    pub fn new(kind: Kind, dim: usize, model: Model) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if model.kind() != kind {
            return Err(invalid(format!(
                "{kind:?} does not admit the {model:?} model"
            )));
        }
        Ok(Self {
            kind,
            dim,
            model,
            tol: DEFAULT_TOL,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Kind::Euclidean, dim, Model::Cartesian).expect("dimension must be positive")
    }

    /// Unit sphere `𝕊ⁿ ⊂ ℝⁿ⁺¹` in embedded coordinates.
    pub fn sphere(dim: usize) -> Self {
        Self::new(Kind::Sphere, dim, Model::UnitSphereEmbedded).expect("dimension must be positive")
    }

    /// Hyperbolic space in the Poincaré ball model.
    pub fn hyperbolic(dim: usize) -> Self {
        Self::new(Kind::Hyperbolic, dim, Model::PoincareBall).expect("dimension must be positive")
    }

    pub fn with_model(self, model: Model) -> Result<Self> {
        Self::new(self.kind, self.dim, model).map(|s| s.with_tolerance(self.tol))
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn radial_profile(&self) -> RadialProfile {
        RadialProfile::new(self.kind)
    }

    /// Build a point in this space's model, checking the model constraint.
    pub fn point(&self, coords: impl Into<Vec<f64>>) -> Result<Point> {
        let coords = DVector::from_vec(coords.into());
        self.point_from_vector(coords)
    }

    pub fn point_from_vector(&self, coords: DVector<f64>) -> Result<Point> {
        let expected = self.model.coord_len(self.dim);
        if coords.len() != expected {
            return Err(invalid(format!(
                "{:?} point in dimension {} needs {} coordinates, got {}",
                self.model,
                self.dim,
                expected,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coordinates must be finite"));
        }
        match self.model {
            Model::Cartesian | Model::StereoBall => {}
            Model::UnitSphereEmbedded => {
                let n = coords.norm();
                if (n - 1.0).abs() > self.tol {
                    return Err(invalid(format!("sphere point has norm {n}, expected 1")));
                }
            }
            Model::Hyperboloid => {
                let q = minkowski(&coords, &coords);
                let scale = coords[0].abs().max(1.0);
                if coords[0] <= 0.0 || (q + 1.0).abs() > self.tol * scale * scale {
                    return Err(invalid(format!(
                        "hyperboloid point violates -x0^2 + |x|^2 = -1, x0 > 0 (form = {q})"
                    )));
                }
            }
            Model::PoincareBall => {
                if coords.norm_squared() >= 1.0 {
                    return Err(invalid("Poincaré ball point must satisfy |u| < 1"));
                }
            }
        }
        Ok(Point::from_raw(self.model, coords))
    }

    /// Base point: the origin, the south pole `(−1, 0, …)`, or `(1, 0, …)` on the hyperboloid.
    pub fn base_point(&self) -> Point {
        let mut v = DVector::zeros(Model::canonical(self.kind).coord_len(self.dim));
        match self.kind {
            Kind::Euclidean => {}
            Kind::Sphere => v[0] = -1.0,
            Kind::Hyperbolic => v[0] = 1.0,
        }
        self.point_from_canonical(&v)
    }

    pub(crate) fn check(&self, p: &Point) -> Result<()> {
        if p.model != self.model {
            return Err(GeomError::ModelMismatch {
                expected: self.model,
                found: p.model,
            });
        }
        if p.coords.len() != self.model.coord_len(self.dim) {
            return Err(invalid("point dimension does not match the space"));
        }
        Ok(())
    }

    pub(crate) fn canonical(&self, p: &Point) -> Result<DVector<f64>> {
        self.check(p)?;
        p.canonical()
    }

    pub(crate) fn point_from_canonical(&self, v: &DVector<f64>) -> Point {
        from_canonical(self.model, v).expect("canonical coordinates map into the model")
    }

    /// Distance between canonical coordinate vectors.
    pub(crate) fn canonical_dist(&self, p: &DVector<f64>, q: &DVector<f64>) -> f64 {
        match self.kind {
            Kind::Euclidean => (p - q).norm(),
            Kind::Sphere => sphere_angle(p, q),
            Kind::Hyperbolic => hyperboloid_dist(p, q),
        }
    }

    /// Geodesic distance. Sphere distances lie in `[0, π]`.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(match self.model {
            Model::Cartesian => (&p.coords - &q.coords).norm(),
            Model::UnitSphereEmbedded => sphere_angle(&p.coords, &q.coords),
            Model::StereoBall => sphere_angle(&p.canonical()?, &q.canonical()?),
            Model::Hyperboloid => hyperboloid_dist(&p.coords, &q.coords),
            Model::PoincareBall => ball_dist(&p.coords, &q.coords),
        })
    }

    /// Point at fraction `t` along the minimizing geodesic from `p` to `q`.
    pub fn geodesic_point(&self, p: &Point, q: &Point, t: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("geodesic parameter {t} outside [0, 1]")));
        }
        self.check(p)?;
        self.check(q)?;
        if t == 0.0 {
            return Ok(p.clone());
        }
        if t == 1.0 {
            return Ok(q.clone());
        }
        let arc = GeodesicArc::new(self.kind, p.canonical()?, q.canonical()?)?;
        Ok(self.point_from_canonical(&arc.at(t)))
    }

    /// Unsigned angle in `[0, π]` at `p` between the geodesics to `u` and `v`.
    ///
    /// Computed from the initial tangent vectors of the two geodesics; this
    /// agrees with the law of cosines of the space form (see
    /// [`law_of_cosines_angle`]) but stays accurate for thin triangles.
    pub fn vertex_angle(&self, p: &Point, u: &Point, v: &Point) -> Result<f64> {
        let pc = self.canonical(p)?;
        let uc = self.canonical(u)?;
        let vc = self.canonical(v)?;
        self.canonical_vertex_angle(&pc, &uc, &vc)
    }

    pub(crate) fn canonical_vertex_angle(
        &self,
        p: &DVector<f64>,
        u: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<f64> {
        let a = self.canonical_dist(p, u);
        let b = self.canonical_dist(p, v);
        if a <= self.tol || b <= self.tol {
            return Err(invalid("vertex angle needs both sides of positive length"));
        }
        if self.kind == Kind::Sphere && (a >= PI - ANTIPODAL_GAP || b >= PI - ANTIPODAL_GAP) {
            return Err(invalid("vertex angle undefined for antipodal sides"));
        }
        let tu = self.tangent_towards(p, u);
        let tv = self.tangent_towards(p, v);
        Ok(match self.kind {
            Kind::Hyperbolic => minkowski_angle(&tu, &tv),
            _ => robust_angle(&tu, &tv),
        })
    }

    /// Initial direction (unnormalized) of the geodesic from `p` towards `q`,
    /// in canonical coordinates.
    pub(crate) fn tangent_towards(&self, p: &DVector<f64>, q: &DVector<f64>) -> DVector<f64> {
        match self.kind {
            Kind::Euclidean => q - p,
            Kind::Sphere => q - p * p.dot(q),
            Kind::Hyperbolic => q + p * minkowski(p, q),
        }
    }
}

fn minkowski_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let na = minkowski(a, a).max(0.0).sqrt();
    let nb = minkowski(b, b).max(0.0).sqrt();
    let ua = a / na;
    let ub = b / nb;
    let diff = &ua - &ub;
    let sum = &ua + &ub;
    let dn = minkowski(&diff, &diff).max(0.0).sqrt();
    let sn = minkowski(&sum, &sum).max(0.0).sqrt();
    2.0 * dn.atan2(sn)
}

/// Angle opposite side `c` in a triangle with sides `a`, `b`, `c`, from the
/// law of cosines of the given space form.
///
/// The cosine is clamped into `[−1, 1]` when it overshoots by at most `1e−9`;
/// larger overshoots are reported as numeric errors.
pub fn law_of_cosines_angle(kind: Kind, a: f64, b: f64, c: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Err(invalid("law of cosines needs positive adjacent sides"));
    }
    let cos = match kind {
        Kind::Euclidean => (a * a + b * b - c * c) / (2.0 * a * b),
        Kind::Sphere => (c.cos() - a.cos() * b.cos()) / (a.sin() * b.sin()),
        Kind::Hyperbolic => (a.cosh() * b.cosh() - c.cosh()) / (a.sinh() * b.sinh()),
    };
    if !cos.is_finite() || cos.abs() > 1.0 + DEFAULT_TOL {
        return Err(GeomError::Numeric(format!(
            "law-of-cosines argument {cos} outside [-1, 1]"
        )));
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Constant-speed minimizing geodesic between two points in canonical coordinates.
#[derive(Debug, Clone)]
pub(crate) struct GeodesicArc {
    kind: Kind,
    start: DVector<f64>,
    end: DVector<f64>,
    length: f64,
}

impl GeodesicArc {
    pub(crate) fn new(kind: Kind, start: DVector<f64>, end: DVector<f64>) -> Result<Self> {
        let length = match kind {
            Kind::Euclidean => (&start - &end).norm(),
            Kind::Sphere => sphere_angle(&start, &end),
            Kind::Hyperbolic => hyperboloid_dist(&start, &end),
        };
        if kind == Kind::Sphere && PI - length < ANTIPODAL_GAP {
            return Err(GeomError::NonUniqueGeodesic);
        }
        Ok(Self {
            kind,
            start,
            end,
            length,
        })
    }

    pub(crate) fn at(&self, t: f64) -> DVector<f64> {
        let d = self.length;
        match self.kind {
            Kind::Euclidean => &self.start * (1.0 - t) + &self.end * t,
            _ if d < 1e-12 => {
                let mut v = &self.start * (1.0 - t) + &self.end * t;
                self.renormalize(&mut v);
                v
            }
            Kind::Sphere => {
                let s = d.sin();
                let mut v =
                    &self.start * (((1.0 - t) * d).sin() / s) + &self.end * ((t * d).sin() / s);
                self.renormalize(&mut v);
                v
            }
            Kind::Hyperbolic => {
                let s = d.sinh();
                let mut v =
                    &self.start * (((1.0 - t) * d).sinh() / s) + &self.end * ((t * d).sinh() / s);
                self.renormalize(&mut v);
                v
            }
        }
    }

    fn renormalize(&self, v: &mut DVector<f64>) {
        match self.kind {
            Kind::Euclidean => {}
            Kind::Sphere => {
                let n = v.norm();
                *v /= n;
            }
            Kind::Hyperbolic => reproject_hyperboloid(v),
        }
    }
}

/// Conformal chart centred at a point, in which geodesics through the centre
/// are straight rays from the origin.
///
/// Euclidean space is translated; the sphere is reflected so the centre
/// becomes the south pole and then projected stereographically; hyperbolic
/// space is moved by a ball isometry so the centre becomes the origin of the
/// Poincaré ball.
#[derive(Debug, Clone)]
pub struct CenteredChart {
    kind: Kind,
    center: DVector<f64>,
    /// Householder vector for the sphere reflection (`None` when already at the pole).
    reflector: Option<DVector<f64>>,
}

impl CenteredChart {
    pub fn new(space: &SpaceForm, center: &Point) -> Result<Self> {
        let c = space.canonical(center)?;
        Ok(Self::from_canonical(space.kind(), c))
    }

    pub(crate) fn from_canonical(kind: Kind, c: DVector<f64>) -> Self {
        match kind {
            Kind::Euclidean => Self {
                kind,
                center: c,
                reflector: None,
            },
            Kind::Sphere => {
                let mut pole = DVector::zeros(c.len());
                pole[0] = -1.0;
                let w = &c - &pole;
                let reflector = (w.norm() > 1e-15).then(|| {
                    let n = w.norm();
                    w / n
                });
                Self {
                    kind,
                    center: c,
                    reflector,
                }
            }
            Kind::Hyperbolic => {
                let ball = hyperboloid_to_ball(&c);
                Self {
                    kind,
                    center: ball,
                    reflector: None,
                }
            }
        }
    }

    /// Chart image of a point given in canonical coordinates.
    pub(crate) fn map_canonical(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self.kind {
            Kind::Euclidean => Ok(x - &self.center),
            Kind::Sphere => {
                let y = match &self.reflector {
                    Some(w) => x - w * (2.0 * w.dot(x)),
                    None => x.clone(),
                };
                sphere_to_stereo(&y)
            }
            Kind::Hyperbolic => {
                let u = hyperboloid_to_ball(x);
                let neg = -&self.center;
                ball_mobius(&neg, &u)
                    .ok_or_else(|| GeomError::Numeric("ball isometry denominator vanished".into()))
            }
        }
    }

    pub fn map(&self, p: &Point) -> Result<DVector<f64>> {
        self.map_canonical(&p.canonical()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hyperboloid_base_point_maps_to_ball_origin() {
        let h = SpaceForm::hyperbolic(3)
            .with_model(Model::Hyperboloid)
            .unwrap();
        let p = h.point(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let q = p.convert(Model::PoincareBall).unwrap();
        assert!(q.coords().norm() == 0.0);
    }

    #[test]
    fn ball_point_at_tanh_half_is_distance_one() {
        let h = SpaceForm::hyperbolic(2);
        let p = h.point(vec![0.5f64.tanh(), 0.0]).unwrap();
        let x = p.convert(Model::Hyperboloid).unwrap();
        assert!(close(x.coords()[0], 1f64.cosh(), 1e-14));
        assert!(close(x.coords()[1], 1f64.sinh(), 1e-14));
        assert!(close(x.coords()[2], 0.0, 1e-15));
    }

    #[test]
    fn south_pole_maps_to_stereo_origin() {
        let s = SpaceForm::sphere(3);
        let p = s.point(vec![-1.0, 0.0, 0.0, 0.0]).unwrap();
        let u = p.convert(Model::StereoBall).unwrap();
        assert_eq!(u.coords().norm(), 0.0);
    }

    #[test]
    fn cross_kind_conversion_is_rejected() {
        let p = SpaceForm::euclidean(2).point(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            p.convert(Model::PoincareBall),
            Err(GeomError::InvalidArgument(_))
        ));
    }

    #[test]
    fn north_pole_has_no_stereo_image() {
        let s = SpaceForm::sphere(2);
        let p = s.point(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            p.convert(Model::StereoBall),
            Err(GeomError::Numeric(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let h = SpaceForm::hyperbolic(2);
        let o = h.point(vec![0.0, 0.0]).unwrap();
        let q = h.point(vec![0.5, 0.0]).unwrap();
        assert!(close(h.dist(&o, &q).unwrap(), 3f64.ln(), 1e-14));

        let s = SpaceForm::sphere(2);
        let south = s.point(vec![-1.0, 0.0, 0.0]).unwrap();
        let eq = s.point(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(close(s.dist(&south, &eq).unwrap(), PI / 2.0, 1e-15));

        let e = SpaceForm::euclidean(2);
        let a = e.point(vec![0.0, 0.0]).unwrap();
        let b = e.point(vec![3.0, 4.0]).unwrap();
        assert_eq!(e.dist(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn mixed_models_are_rejected() {
        let h = SpaceForm::hyperbolic(2);
        let o = h.point(vec![0.0, 0.0]).unwrap();
        let q = o.convert(Model::Hyperboloid).unwrap();
        assert!(matches!(
            h.dist(&o, &q),
            Err(GeomError::ModelMismatch { .. })
        ));
    }

    #[test]
    fn invalid_points_are_rejected() {
        assert!(SpaceForm::sphere(2).point(vec![1.0, 1.0, 0.0]).is_err());
        assert!(SpaceForm::hyperbolic(2).point(vec![0.8, 0.7]).is_err());
        let hb = SpaceForm::hyperbolic(1)
            .with_model(Model::Hyperboloid)
            .unwrap();
        assert!(hb.point(vec![-1.0, 0.0]).is_err());
        assert!(SpaceForm::euclidean(3).point(vec![1.0, 2.0]).is_err());
        assert!(SpaceForm::new(Kind::Euclidean, 2, Model::StereoBall).is_err());
    }

    #[test]
    fn geodesic_point_endpoints_and_midpoints() {
        let e = SpaceForm::euclidean(2);
        let a = e.point(vec![0.0, 0.0]).unwrap();
        let b = e.point(vec![2.0, 0.0]).unwrap();
        assert_eq!(e.geodesic_point(&a, &b, 0.0).unwrap(), a);
        assert_eq!(e.geodesic_point(&a, &b, 1.0).unwrap(), b);
        let m = e.geodesic_point(&a, &b, 0.5).unwrap();
        assert!(close(m.coords()[0], 1.0, 1e-15) && close(m.coords()[1], 0.0, 1e-15));

        let h = SpaceForm::hyperbolic(2);
        let o = h.point(vec![0.0, 0.0]).unwrap();
        let q = h.point(vec![1f64.tanh(), 0.0]).unwrap();
        let m = h.geodesic_point(&o, &q, 0.5).unwrap();
        // The ball radius of a point at hyperbolic distance ρ is tanh(ρ/2);
        // bisecting dist(o, q) = 2 gives distance 1 and radius tanh(1/2).
        assert!(close(h.dist(&o, &q).unwrap(), 2.0, 1e-13));
        assert!(close(h.dist(&o, &m).unwrap(), 1.0, 1e-13));
        assert!(close(m.coords()[0], 0.5f64.tanh(), 1e-14));
        assert!(m.coords()[1].abs() < 1e-15);
    }

    #[test]
    fn antipodal_interpolation_is_rejected() {
        let s = SpaceForm::sphere(2);
        let p = s.point(vec![0.0, 0.0, 1.0]).unwrap();
        let q = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            s.geodesic_point(&p, &q, 0.5),
            Err(GeomError::NonUniqueGeodesic)
        );
        assert!(s.geodesic_point(&p, &q, 1.5).is_err());
    }

    #[test]
    fn vertex_angle_examples() {
        let e = SpaceForm::euclidean(2);
        let p = e.point(vec![0.0, 0.0]).unwrap();
        let u = e.point(vec![1.0, 0.0]).unwrap();
        let v = e.point(vec![0.0, 1.0]).unwrap();
        assert!(close(e.vertex_angle(&p, &u, &v).unwrap(), PI / 2.0, 1e-15));

        let s = SpaceForm::sphere(2);
        let north = s.point(vec![0.0, 0.0, 1.0]).unwrap();
        for delta in [0.1f64, 1.0, 2.5, 3.0] {
            let u = s.point(vec![1.0, 0.0, 0.0]).unwrap();
            let v = s.point(vec![delta.cos(), delta.sin(), 0.0]).unwrap();
            assert!(close(s.vertex_angle(&north, &u, &v).unwrap(), delta, 1e-14));
        }
        assert!(e.vertex_angle(&p, &p, &v).is_err());
    }

    #[test]
    fn law_of_cosines_clamps_only_small_overshoot() {
        assert!(close(
            law_of_cosines_angle(Kind::Euclidean, 1.0, 1.0, 2f64.sqrt()).unwrap(),
            PI / 2.0,
            1e-15
        ));
        assert_eq!(
            law_of_cosines_angle(Kind::Euclidean, 1.0, 1.0, 2.0).unwrap(),
            PI
        );
        assert!(law_of_cosines_angle(Kind::Euclidean, 1.0, 1.0, 2.1).is_err());
        assert!(law_of_cosines_angle(Kind::Sphere, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn radial_profile_normalization() {
        for kind in [Kind::Euclidean, Kind::Sphere, Kind::Hyperbolic] {
            let j = RadialProfile::new(kind);
            assert_eq!(j.value(0.0), 0.0);
            assert_eq!(j.derivative(0.0), 1.0);
        }
    }

    #[test]
    fn centered_chart_sends_center_to_origin() {
        let s = SpaceForm::sphere(2);
        let p = s.point(vec![0.6, 0.0, 0.8]).unwrap();
        let chart = CenteredChart::new(&s, &p).unwrap();
        assert!(chart.map(&p).unwrap().norm() < 1e-15);

        let h = SpaceForm::hyperbolic(3);
        let p = h.point(vec![0.3, -0.2, 0.4]).unwrap();
        let chart = CenteredChart::new(&h, &p).unwrap();
        assert!(chart.map(&p).unwrap().norm() < 1e-15);
    }
}
