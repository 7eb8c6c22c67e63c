use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sepsurf::families::random::random_spec;
use sepsurf::families::{preset, sphere, FamilySpec, FamilyTag};
use sepsurf::geometry::{
    gauss_curvature_implicit, gauss_curvature_separable, implicit_jet, k2_residual, transform_jet,
    uvw_state, RigidMotion,
};
use sepsurf::sampler::{marching_cubes, sample_n, sample_points, solve_along, GridSpec};
use sepsurf::surface::{SeparableSurface, SurfacePoint};
use sepsurf::verify::{check_constant_K, classify, Label, Tolerances};

fn tag_strategy() -> impl Strategy<Value = FamilyTag> {
    proptest::sample::select(FamilyTag::ALL.to_vec())
}

fn instance(tag: FamilyTag, seed: u64) -> (FamilySpec, SeparableSurface) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(tag, &mut rng);
    let surface = spec.build().expect("random specs build");
    (spec, surface)
}

fn points(spec: &FamilySpec, surface: &SeparableSurface, n: usize, seed: u64) -> Vec<SurfacePoint> {
    sample_n(surface, spec.admissible_box(), n, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_formulas_agree(tag in tag_strategy(), seed in any::<u64>()) {
        let (spec, s) = instance(tag, seed);
        for p in points(&spec, &s, 64, seed) {
            let (Ok(jet), Ok(ks)) = (implicit_jet(&s, &p), gauss_curvature_separable(&s, &p)) else { continue };
            let ki = gauss_curvature_implicit(&jet).unwrap();
            prop_assert!((ki - ks).abs() <= 1e-10 * (1.0 + ks.abs()), "{} vs {}", ki, ks);
            let st = uvw_state(&s, &p).unwrap();
            prop_assert!(k2_residual(&st, ks).abs() <= 1e-8);
        }
    }

    #[test]
    fn curvature_is_invariant_under_rigid_motions(
        tag in tag_strategy(),
        seed in any::<u64>(),
        axis in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        angle in -std::f64::consts::PI..std::f64::consts::PI,
        shift in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
        lambda in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
    ) {
        let axis = Vector3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 1e-2);
        let rot = Rotation3::from_scaled_axis(axis.normalize() * angle).into_inner();
        let motion = RigidMotion::new(rot, Vector3::new(shift.0, shift.1, shift.2)).unwrap();
        let (spec, s) = instance(tag, seed);
        for p in points(&spec, &s, 16, seed) {
            let Ok(jet) = implicit_jet(&s, &p) else { continue };
            let Ok(k) = gauss_curvature_implicit(&jet) else { continue };
            let moved = gauss_curvature_implicit(&transform_jet(&jet, &motion)).unwrap();
            let scaled = gauss_curvature_implicit(&jet.scaled(lambda)).unwrap();
            prop_assert!((moved - k).abs() <= 1e-10 * (1.0 + k.abs()));
            prop_assert!((scaled - k).abs() <= 1e-10 * (1.0 + k.abs()));
        }
    }

    #[test]
    fn sampled_points_lie_on_the_surface(tag in tag_strategy(), seed in any::<u64>()) {
        let (spec, s) = instance(tag, seed);
        let pts = points(&spec, &s, 200, seed);
        prop_assert!(!pts.is_empty());
        let b = spec.admissible_box();
        for p in &pts {
            prop_assert!(s.eval(p).unwrap().abs() <= 1e-9);
            prop_assert!(b.contains(p));
        }
    }

    #[test]
    fn solve_residual_is_relative_to_the_target(tag in tag_strategy(), seed in any::<u64>()) {
        let (spec, s) = instance(tag, seed);
        let axis = s.solve_axis();
        let b = spec.admissible_box();
        let (lo, hi) = b.range(axis);
        let centre = SurfacePoint::from_array([0, 1, 2].map(|i| 0.5 * (b.lo[i] + b.hi[i])));
        let rest = s.eval(&centre).unwrap() - s.component(axis).value(centre.coord(axis)).unwrap();
        for t in solve_along(&s, axis, &centre, lo, hi).unwrap() {
            let v = s.component(axis).value(t).unwrap() + rest;
            prop_assert!(v.abs() <= 1e-12 * (1.0 + rest.abs()), "residual {}", v);
        }
    }

    #[test]
    fn flat_families_are_flat(seed in any::<u64>()) {
        for tag in [
            FamilyTag::RightCylinder,
            FamilyTag::Translation,
            FamilyTag::RotationalParabolic,
            FamilyTag::GeneralizedCone,
            FamilyTag::ExpCylinder,
            FamilyTag::ConicalPower,
        ] {
            let (spec, s) = instance(tag, seed);
            for p in points(&spec, &s, 100, seed) {
                if let Ok(k) = gauss_curvature_separable(&s, &p) {
                    prop_assert!(k.abs() <= 1e-8, "{:?}: K = {}", tag, k);
                }
            }
        }
    }

    #[test]
    fn rotational_cgc_has_its_curvature(seed in any::<u64>()) {
        let (spec, s) = instance(FamilyTag::RotationalCgc, seed);
        let FamilySpec::RotationalCgc { curvature, .. } = spec else { unreachable!() };
        let pts = points(&spec, &s, 200, seed);
        prop_assert!(pts.len() >= 100);
        for p in pts {
            let k = gauss_curvature_separable(&s, &p).unwrap();
            prop_assert!((k - curvature).abs() <= 1e-4, "K = {} vs {}", k, curvature);
        }
    }

    #[test]
    fn classifier_recovers_the_family(tag in tag_strategy(), seed in any::<u64>()) {
        let (spec, s) = instance(tag, seed);
        let pts = points(&spec, &s, 200, seed);
        let r = classify(&s, &pts, &Tolerances::for_surface(&s)).unwrap();
        let expected = match tag {
            FamilyTag::RightCylinder => Label::RightCylinder,
            FamilyTag::Translation => Label::Translation,
            FamilyTag::RotationalParabolic => Label::RotationalFlat,
            FamilyTag::RotationalCgc => Label::RotationalCgc,
            FamilyTag::GeneralizedCone => Label::GeneralizedCone,
            FamilyTag::ExpCylinder => Label::ExpCylinder,
            FamilyTag::ConicalPower => Label::ConicalPower,
        };
        prop_assert_eq!(r.label, expected);
        if let FamilySpec::ConicalPower { k, .. } = spec {
            prop_assert!((r.params["k"] - k).abs() <= 1e-6 * k.abs());
        }
    }

    #[test]
    fn looser_tolerance_never_fails_a_pass(tag in tag_strategy(), seed in any::<u64>(), factor in 1.0f64..1e3) {
        let (spec, s) = instance(tag, seed);
        let pts = points(&spec, &s, 64, seed);
        let tight = check_constant_K(&s, &pts, 1e-8).unwrap();
        let loose = check_constant_K(&s, &pts, 1e-8 * factor).unwrap();
        prop_assert!(!tight.is_constant || loose.is_constant);
        prop_assert!(!tight.is_zero || loose.is_zero);
        prop_assert!(!loose.is_zero || loose.is_constant);
    }

    #[test]
    fn sampling_is_deterministic(tag in tag_strategy(), seed in any::<u64>()) {
        let (spec, s) = instance(tag, seed);
        let grid = GridSpec::new(spec.admissible_box(), 12, seed);
        prop_assert_eq!(sample_points(&s, &grid), sample_points(&s, &grid));
        let a = marching_cubes(&s, &grid);
        let b = marching_cubes(&s, &grid);
        prop_assert_eq!(a.vertices, b.vertices);
        prop_assert_eq!(a.triangles, b.triangles);
    }
}

#[test]
fn mesh_vertices_meet_the_contract() {
    for name in [
        "paper-fig1-left",
        "paper-fig1-middle",
        "paper-fig1-right",
        "unit-sphere",
    ] {
        let spec = preset(name).unwrap();
        let s = spec.build().unwrap();
        let mesh = marching_cubes(&s, &GridSpec::new(spec.admissible_box(), 32, 0));
        assert!(!mesh.triangles.is_empty(), "{name}");
        for v in &mesh.vertices {
            assert!(s.eval(v).unwrap().abs() <= 1e-6, "{name}");
        }
        let n = mesh.vertices.len() as u32;
        assert!(mesh.triangles.iter().flatten().all(|&i| i < n));
    }
}

#[test]
fn curvature_sign_is_stable_under_refinement() {
    // surfaces with curvature of both signs and of one sign
    let saddle = SeparableSurface::from_exprs("x^2", "-y^2", "-z - 2").unwrap();
    let cases = [
        (sphere(1.0).build().unwrap(), sphere(1.0).admissible_box()),
        (
            saddle,
            sepsurf::Box3::new([-1.0, -1.0, -3.5], [1.0, 1.0, -0.5]),
        ),
        (
            preset("catenoid").unwrap().build().unwrap(),
            preset("catenoid").unwrap().admissible_box(),
        ),
    ];
    for (s, b) in cases {
        let coarse = marching_cubes(&s, &GridSpec::new(b, 16, 0));
        let fine = marching_cubes(&s, &GridSpec::new(b, 32, 0));
        assert!(!coarse.vertices.is_empty());
        for (v, k) in coarse.vertices.iter().zip(&coarse.vertex_k) {
            let nearest = fine
                .vertices
                .iter()
                .zip(&fine.vertex_k)
                .min_by(|a, c| dist2(a.0, v).total_cmp(&dist2(c.0, v)))
                .unwrap();
            if k.abs() > 1e-6 && nearest.1.abs() > 1e-6 {
                assert_eq!(k.signum(), nearest.1.signum(), "at {v:?}");
            }
        }
    }
}

fn dist2(a: &SurfacePoint, b: &SurfacePoint) -> f64 {
    let (a, b) = (a.to_array(), b.to_array());
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

#[test]
fn cone_apex_and_exp_rulings() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let spec = random_spec(FamilyTag::GeneralizedCone, &mut rng);
        let s = spec.build().unwrap();
        let FamilySpec::GeneralizedCone { m, n, .. } = spec else {
            unreachable!()
        };
        let apex = [0, 1, 2].map(|i| -n[i] / m[i]);
        for p in points(&spec, &s, 50, 1) {
            let pa = p.to_array();
            for t in [0.5, 2.0] {
                let q =
                    SurfacePoint::from_array([0, 1, 2].map(|i| apex[i] + t * (pa[i] - apex[i])));
                assert!(s.eval(&q).unwrap().abs() <= 1e-9);
            }
        }
        let spec = random_spec(FamilyTag::ExpCylinder, &mut rng);
        let s = spec.build().unwrap();
        let FamilySpec::ExpCylinder { m, .. } = spec else {
            unreachable!()
        };
        for p in points(&spec, &s, 50, 1) {
            let pa = p.to_array();
            for t in [-1.0, -0.5, 0.5, 1.0] {
                let q = SurfacePoint::from_array([0, 1, 2].map(|i| pa[i] + t / m[i]));
                assert!(s.eval(&q).unwrap().abs() <= 1e-9);
            }
        }
    }
}
