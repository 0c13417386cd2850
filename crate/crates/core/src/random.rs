//! Seeded random generators for points, polygons and isometries.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GeomError, Result};
use crate::polycurve::{validate, PolygonalCurve};
use crate::spaceform::{ball_mobius, Kind, Model, Point, SpaceForm};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere of `ℝⁿ`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Haar-distributed orthogonal matrix (determinant ±1).
pub fn orthogonal_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    q
}

/// Random point at geodesic distance at most `radius` from the base point.
///
/// Directions are uniform and the distance is uniform in `[0, radius]`.
pub fn point_near_base<R: Rng + ?Sized>(rng: &mut R, space: &SpaceForm, radius: f64) -> Point {
    let n = space.dim();
    let dir = unit_vector(rng, n);
    let rho = radius * rng.random::<f64>();
    let canonical = match space.kind() {
        Kind::Euclidean => dir * rho,
        Kind::Sphere => {
            let mut v = DVector::zeros(n + 1);
            v[0] = -rho.cos();
            v.rows_mut(1, n).copy_from(&(dir * rho.sin()));
            v
        }
        Kind::Hyperbolic => {
            let mut v = DVector::zeros(n + 1);
            v[0] = rho.cosh();
            v.rows_mut(1, n).copy_from(&(dir * rho.sinh()));
            v
        }
    };
    space.point_from_canonical(&canonical)
}

/// Random polygon with vertices drawn by [`point_near_base`]; Euclidean
/// vertices are standard Gaussian instead when `radius` is infinite.
pub fn polygon<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SpaceForm,
    k: usize,
    radius: f64,
    closed: bool,
) -> Result<PolygonalCurve> {
    let vertices = (0..k)
        .map(|_| {
            if radius.is_infinite() && space.kind() == Kind::Euclidean {
                space.point_from_canonical(&gaussian_vector(rng, space.dim()))
            } else {
                point_near_base(rng, space, radius)
            }
        })
        .collect();
    PolygonalCurve::new(*space, vertices, closed)
}

/// Random simple polygon by rejection sampling.
pub fn simple_polygon<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SpaceForm,
    k: usize,
    radius: f64,
    closed: bool,
    max_tries: usize,
) -> Result<PolygonalCurve> {
    for _ in 0..max_tries {
        let c = polygon(rng, space, k, radius, closed)?;
        if validate(&c).simple {
            return Ok(c);
        }
    }
    Err(GeomError::ConstructionFailed(format!(
        "no simple polygon found in {max_tries} tries"
    )))
}

/// An isometry of a space form acting on canonical coordinates.
#[derive(Debug, Clone)]
pub enum Isometry {
    /// `x ↦ Qx + t`.
    Euclidean { q: DMatrix<f64>, t: DVector<f64> },
    /// `x ↦ Qx` on the embedded sphere.
    Sphere { q: DMatrix<f64> },
    /// Rotation followed by the ball translation taking 0 to `a`.
    Hyperbolic { q: DMatrix<f64>, a: DVector<f64> },
}

impl Isometry {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, space: &SpaceForm) -> Self {
        let n = space.dim();
        match space.kind() {
            Kind::Euclidean => Isometry::Euclidean {
                q: orthogonal_matrix(rng, n),
                t: gaussian_vector(rng, n) * 3.0,
            },
            Kind::Sphere => Isometry::Sphere {
                q: orthogonal_matrix(rng, n + 1),
            },
            Kind::Hyperbolic => Isometry::Hyperbolic {
                q: orthogonal_matrix(rng, n),
                a: unit_vector(rng, n) * (0.9 * rng.random::<f64>()),
            },
        }
    }

    pub fn apply(&self, space: &SpaceForm, p: &Point) -> Result<Point> {
        let x = p.canonical()?;
        let y = match self {
            Isometry::Euclidean { q, t } => q * x + t,
            Isometry::Sphere { q } => {
                let y = q * x;
                let n = y.norm();
                y / n
            }
            Isometry::Hyperbolic { q, a } => {
                let u = Point::from_raw(Model::Hyperboloid, x).convert(Model::PoincareBall)?;
                let rotated = q * u.coords();
                let moved = ball_mobius(a, &rotated).ok_or_else(|| {
                    GeomError::Numeric("ball isometry denominator vanished".into())
                })?;
                Point::from_raw(Model::PoincareBall, moved)
                    .convert(Model::Hyperboloid)?
                    .coords()
                    .clone()
            }
        };
        Ok(space.point_from_canonical(&y))
    }

    pub fn apply_curve(&self, c: &PolygonalCurve) -> Result<PolygonalCurve> {
        let space = *c.space();
        c.map_vertices(space, |p| self.apply(&space, p))
    }
}
