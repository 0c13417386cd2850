use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

use spaceforms::cone::{cone_angle, density_report};
use spaceforms::h2xr::{
    geodesic, laplacian_log_rho, random_geodesic_data, FrameNormal, GeodesicNormalForm,
};
use spaceforms::hyp_density::{laplacian_g, GreenProfile};
use spaceforms::knot::{determinant_sweep, trefoil_hexagon};
use spaceforms::mobius::{mobius_translate, MobiusMap};
use spaceforms::polycurve::total_curvature;
use spaceforms::random::{point_near_base, polygon, seeded, simple_polygon, unit_vector, Isometry};
use spaceforms::spaceform::law_of_cosines_angle;
use spaceforms::spherical_bounds::{check_bound, Variant};
use spaceforms::{Kind, Model, PolygonalCurve, SpaceForm};

fn spaces() -> Vec<SpaceForm> {
    vec![
        SpaceForm::euclidean(3),
        SpaceForm::sphere(3),
        SpaceForm::sphere(3).with_model(Model::StereoBall).unwrap(),
        SpaceForm::hyperbolic(3),
        SpaceForm::hyperbolic(3)
            .with_model(Model::Hyperboloid)
            .unwrap(),
    ]
}

fn radius(s: &SpaceForm) -> f64 {
    match s.kind() {
        Kind::Sphere => 1.3,
        _ => 2.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_round_trip(seed in any::<u64>(), which in 0usize..5) {
        let s = spaces()[which];
        let p = point_near_base(&mut seeded(seed), &s, radius(&s));
        let other = match s.model() {
            Model::UnitSphereEmbedded => Model::StereoBall,
            Model::StereoBall => Model::UnitSphereEmbedded,
            Model::Hyperboloid => Model::PoincareBall,
            Model::PoincareBall => Model::Hyperboloid,
            Model::Cartesian => Model::Cartesian,
        };
        let back = p.convert(other).unwrap().convert(s.model()).unwrap();
        prop_assert!((back.coords() - p.coords()).norm() < 1e-12);
    }

    #[test]
    fn radial_identities(seed in any::<u64>(), hyperbolic in any::<bool>()) {
        let s = if hyperbolic { SpaceForm::hyperbolic(3) } else { SpaceForm::sphere(3).with_model(Model::StereoBall).unwrap() };
        let p = point_near_base(&mut seeded(seed), &s, radius(&s));
        let rho = s.dist(&s.base_point(), &p).unwrap();
        let r = p.coords().norm();
        let (lhs, rhs) = if hyperbolic {
            (rho.sinh(), 2.0 * r / (1.0 - r * r))
        } else {
            (rho.sin(), 2.0 * r / (1.0 + r * r))
        };
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn vertex_angle_matches_law_of_cosines(seed in any::<u64>(), which in 0usize..5) {
        let s = spaces()[which];
        let mut rng = seeded(seed);
        let [p, u, v] = [0, 1, 2].map(|_| point_near_base(&mut rng, &s, radius(&s) * 0.5));
        let (a, b, c) = (s.dist(&p, &u).unwrap(), s.dist(&p, &v).unwrap(), s.dist(&u, &v).unwrap());
        prop_assume!(a > 1e-2 && b > 1e-2);
        let angle = s.vertex_angle(&p, &u, &v).unwrap();
        // Away from 0 and π, where arccos is well conditioned.
        prop_assume!(angle > 0.05 && angle < PI - 0.05);
        let oracle = law_of_cosines_angle(s.kind(), a, b, c).unwrap();
        prop_assert!((angle - oracle).abs() < 1e-9, "{angle} vs {oracle}");
    }

    #[test]
    fn isometries_preserve_distance_and_total_curvature(seed in any::<u64>(), which in 0usize..5) {
        let s = spaces()[which];
        let mut rng = seeded(seed);
        let c = polygon(&mut rng, &s, 6, radius(&s) * 0.5, true).unwrap();
        let g = Isometry::random(&mut rng, &s);
        let gc = g.apply_curve(&c).unwrap();
        let v = c.vertices();
        let w = gc.vertices();
        for i in 0..v.len() {
            let j = (i + 2) % v.len();
            let d0 = s.dist(&v[i], &v[j]).unwrap();
            let d1 = s.dist(&w[i], &w[j]).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-9);
        }
        let t0 = total_curvature(&c).unwrap().total;
        let t1 = total_curvature(&gc).unwrap().total;
        prop_assert!((t0 - t1).abs() < 1e-9);
    }

    #[test]
    fn cone_angle_is_isometry_invariant(seed in any::<u64>(), which in 0usize..5) {
        let s = spaces()[which];
        let mut rng = seeded(seed);
        let c = polygon(&mut rng, &s, 5, radius(&s) * 0.5, true).unwrap();
        let p = point_near_base(&mut rng, &s, radius(&s) * 0.5);
        prop_assume!(spaceforms::cone::distance_to_curve(&s, &p, &c).unwrap() > 1e-6);
        let g = Isometry::random(&mut rng, &s);
        let a0 = cone_angle(&s, &p, &c).unwrap();
        let a1 = cone_angle(&s, &g.apply(&s, &p).unwrap(), &g.apply_curve(&c).unwrap()).unwrap();
        prop_assert!((a0 - a1).abs() < 1e-9);
        let report = density_report(&s, &p, &c).unwrap();
        prop_assert_eq!(report.density, report.angle / (2.0 * PI));
    }

    #[test]
    fn spherical_bounds_hold(seed in any::<u64>(), m in 1usize..4, ambient in 3usize..6) {
        let mut rng = seeded(seed);
        let mut pts = |k: usize| -> Vec<DVector<f64>> { (0..k).map(|_| unit_vector(&mut rng, ambient)).collect() };
        let cases = [
            (pts(3), Variant::Triangle),
            (pts(3), Variant::Chain1),
            (pts(4), Variant::Chain2),
            (pts(2 * m + 1), if m == 1 { Variant::Triangle } else { Variant::ClosedOdd }),
            (pts(2 * m + 1), Variant::OpenOdd),
            (pts(2 * m + 2), Variant::ClosedEven),
        ];
        for (points, variant) in cases {
            let check = check_bound(&points, variant).unwrap();
            prop_assert!(check.slack >= -1e-9, "{variant:?}: {}", check.slack);
        }
    }

    #[test]
    fn mobius_maps_act_on_the_sphere(seed in any::<u64>(), n in 2usize..5, size in 0.0f64..0.999) {
        let mut rng = seeded(seed);
        let a = unit_vector(&mut rng, n) * size;
        let x = unit_vector(&mut rng, n);
        let g = MobiusMap::new(a).unwrap();
        let y = mobius_translate(&g, &x).unwrap();
        prop_assert!((y.norm() - 1.0).abs() < 1e-14);
        let back = mobius_translate(&g.inverse(), &y).unwrap();
        prop_assert!((back - x).norm() < 1e-9 / (1.0 - size));
    }

    #[test]
    fn green_function_derivative_and_laplacian(m in 2usize..6, rho in 1e-3f64..20.0, grad in 0.0f64..=1.0) {
        let g = GreenProfile::new(m).unwrap();
        prop_assert!(g.g_prime(rho) > 0.0);
        prop_assert!(laplacian_g(m, rho, grad).unwrap() >= 0.0);
    }

    #[test]
    fn laplacian_of_log_rho_is_nonnegative(rho in 1e-3f64..30.0, phi in 0.0f64..PI, n in prop::array::uniform3(-1.0f64..1.0)) {
        prop_assume!(n.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let n = FrameNormal::normalized(n).unwrap();
        prop_assert!(laplacian_log_rho(rho, phi, n) >= -1e-12);
    }

    #[test]
    fn geodesics_have_unit_speed(seed in any::<u64>(), t in -3.0f64..3.0) {
        let (p, v) = random_geodesic_data(&mut seeded(seed));
        let h = 1e-5;
        let a = geodesic(p, v, t - h).unwrap();
        let b = geodesic(p, v, t + h).unwrap();
        let mid = geodesic(p, v, t).unwrap();
        let vel = [(b.u1 - a.u1) / (2.0 * h), (b.u2 - a.u2) / (2.0 * h), (b.z - a.z) / (2.0 * h)];
        prop_assert!((mid.norm_squared(vel) - 1.0).abs() < 1e-8);
        let nf = GeodesicNormalForm::new(p, v).unwrap();
        prop_assert!((0.0..=0.5).contains(&nf.c));
        let q = nf.invert(mid);
        let again = nf.apply(q);
        prop_assert!((again.u1 - mid.u1).abs() + (again.u2 - mid.u2).abs() + (again.z - mid.z).abs() < 1e-12);
    }

    #[test]
    fn knot_determinants_are_odd(seed in any::<u64>(), k in 5usize..9) {
        let mut rng = seeded(seed);
        let c = simple_polygon(&mut rng, &SpaceForm::euclidean(3), k, f64::INFINITY, true, 100).unwrap();
        for d in determinant_sweep(&c, 3, rng.random()).unwrap() {
            prop_assert!(d % 2 == 1);
        }
    }

    #[test]
    fn trefoil_determinant_survives_similarities(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let s = SpaceForm::euclidean(3);
        let g = Isometry::random(&mut rng, &s);
        let t = trefoil_hexagon();
        let moved: Vec<Vec<f64>> = t
            .vertices()
            .iter()
            .map(|p| (g.apply(&s, p).unwrap().coords() * scale).iter().copied().collect())
            .collect();
        let c = PolygonalCurve::from_coords(s, &moved, true).unwrap();
        prop_assert!(determinant_sweep(&c, 5, rng.random()).unwrap().iter().all(|&d| d == 3));
    }
}
