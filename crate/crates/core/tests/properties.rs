use std::f64::consts::{FRAC_PI_2, TAU};

use layoutforge_core::anneal::metropolis_accept;
use layoutforge_core::geom::{self, Vec2, Vec3};
use layoutforge_core::oracle::{self, GridSpec};
use layoutforge_core::problem::{self, LayoutProblem, ProblemConfig, ProblemObject};
use layoutforge_core::relation::{self, Axis, Comparator, Pairing, Placed, RelationParams, RelationTerm, Symmetry};
use layoutforge_core::scene::{compose_pose, wrap_angle, world_footprint, Domain, Extent, Pose};
use proptest::prelude::*;

fn pose_strategy() -> impl Strategy<Value = Pose> {
    (-5.0..5.0f64, -5.0..5.0f64, -2.0..2.0f64, 0.0..TAU, -1.5..1.5f64, 0.0..TAU)
        .prop_map(|(x, y, z, yaw, pitch, roll)| Pose::new(x, y, z, yaw, pitch, roll))
}

fn upright_strategy() -> impl Strategy<Value = Pose> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.0..1.0f64, 0.0..TAU).prop_map(|(x, y, z, yaw)| Pose::upright(x, y, z, yaw))
}

fn extent_strategy() -> impl Strategy<Value = Extent> {
    (0.1..2.0f64, 0.1..2.0f64, 0.1..2.0f64).prop_map(|(a, b, c)| Extent::new(a, b, c).unwrap())
}

fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn placed<'a>(pose: &'a Pose, extent: &'a Extent) -> Placed<'a> {
    Placed { pose, extent, category: "box" }
}

proptest! {
    #[test]
    fn wrapped_angles_stay_in_range(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!((0.0..TAU).contains(&w));
        prop_assert!(((a - w) / TAU - ((a - w) / TAU).round()).abs() < 1e-9);
    }

    #[test]
    fn composition_is_associative(a in pose_strategy(), b in pose_strategy(), c in pose_strategy(), p in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)) {
        let left = compose_pose(&compose_pose(&a, &b), &c);
        let right = compose_pose(&a, &compose_pose(&b, &c));
        let v = Vec3::new(p.0, p.1, p.2);
        prop_assert!(close(left.transform_point(v), right.transform_point(v), 1e-9));
        // composing equals transforming twice
        let direct = a.transform_point(b.transform_point(v));
        prop_assert!(close(compose_pose(&a, &b).transform_point(v), direct, 1e-9));
    }

    #[test]
    fn footprint_is_ccw_with_box_area(pose in upright_strategy(), e in extent_strategy()) {
        let f = world_footprint(&pose, &e).unwrap();
        prop_assert!(geom::is_convex_ccw(&f));
        prop_assert!((geom::signed_area(&f) - e.dx * e.dy).abs() < 1e-9);
    }

    #[test]
    fn polygon_distance_matches_all_edge_pairs(pa in upright_strategy(), ea in extent_strategy(), pb in upright_strategy(), eb in extent_strategy()) {
        let fa = world_footprint(&pa, &ea).unwrap();
        let fb = world_footprint(&pb, &eb).unwrap();
        let d = geom::polygon_distance(&fa, &fb);
        let brute = if geom::convex_overlap(&fa, &fb) {
            0.0
        } else {
            (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| geom::segment_segment_distance(fa[i], fa[(i + 1) % 4], fb[j], fb[(j + 1) % 4]))
                .fold(f64::INFINITY, f64::min)
        };
        prop_assert!((d - brute).abs() < 1e-12);
        prop_assert_eq!(d, geom::polygon_distance(&fb, &fa));
    }

    #[test]
    fn intersection_area_is_bounded_and_symmetric(pa in upright_strategy(), ea in extent_strategy(), pb in upright_strategy(), eb in extent_strategy()) {
        let fa = world_footprint(&pa, &ea).unwrap();
        let fb = world_footprint(&pb, &eb).unwrap();
        let ab = geom::intersection_area(&fa, &fb);
        let ba = geom::intersection_area(&fb, &fa);
        prop_assert!(ab >= 0.0);
        prop_assert!(ab <= (ea.dx * ea.dy).min(eb.dx * eb.dy) + 1e-9);
        prop_assert!((ab - ba).abs() < 1e-9);
        if !geom::convex_overlap(&fa, &fb) {
            prop_assert_eq!(ab, 0.0);
        }
    }

    #[test]
    fn overlap_bounded_by_shorter_projection(pa in upright_strategy(), ea in extent_strategy(), pb in upright_strategy(), eb in extent_strategy()) {
        let (a, b) = (placed(&pa, &ea), placed(&pb, &eb));
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let m = relation::measure_overlap(&a, &b, axis);
            let len = |p: &Pose, e: &Extent| match axis {
                Axis::Z => e.dz,
                Axis::X => e.dx * p.yaw().cos().abs() + e.dy * p.yaw().sin().abs(),
                Axis::Y => e.dx * p.yaw().sin().abs() + e.dy * p.yaw().cos().abs(),
            };
            prop_assert!(m >= 0.0);
            prop_assert!(m <= len(&pa, &ea).min(len(&pb, &eb)) + 1e-9);
        }
    }

    #[test]
    fn distance_and_collision_invariant_under_rigid_motion(pa in upright_strategy(), ea in extent_strategy(), pb in upright_strategy(), eb in extent_strategy(), m in (-10.0..10.0f64, -10.0..10.0f64, 0.0..TAU)) {
        let motion = Pose::upright(m.0, m.1, 0.0, m.2);
        let (qa, qb) = (compose_pose(&motion, &pa), compose_pose(&motion, &pb));
        let d0 = relation::measure_distance(&placed(&pa, &ea), &placed(&pb, &eb)).unwrap();
        let d1 = relation::measure_distance(&placed(&qa, &ea), &placed(&qb, &eb)).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9);
        let c0 = relation::measure_collision(&placed(&pa, &ea), &placed(&pb, &eb)).unwrap();
        let c1 = relation::measure_collision(&placed(&qa, &ea), &placed(&qb, &eb)).unwrap();
        prop_assert!((c0 - c1).abs() < 1e-9);
    }

    #[test]
    fn mirrored_pair_has_zero_reflection_score(x in 0.5..3.0f64, y in -3.0..3.0f64, yaw in 0.0..TAU, angle in 0.0..TAU, e in extent_strategy()) {
        let normal = Vec2::new(angle.cos(), angle.sin());
        let point = Vec2::new(0.3, -0.2);
        let a = Pose::upright(point.x + x * normal.x - y * normal.y, point.y + x * normal.y + y * normal.x, 0.5, yaw);
        let d = (Vec2::new(a.x(), a.y()) - point).dot(normal);
        let b = Pose::upright(a.x() - 2.0 * d * normal.x, a.y() - 2.0 * d * normal.y, 0.5, 0.0);
        let objs = [placed(&a, &e), placed(&b, &e)];
        let s = relation::measure_symmetry(&objs, &Symmetry::Reflection { point, normal }, &Pairing::Auto, 100.0).unwrap();
        prop_assert!(s < 1e-9);
    }

    #[test]
    fn objective_scales_linearly_with_weights(s in 0.01..100.0f64, a in upright_strategy(), b in upright_strategy()) {
        let p = pair_problem(1.0, 0.8);
        let layout = p.layout_from(vec![a.with_z(p.support_z(0)), b.with_z(p.support_z(1))]);
        let base = p.evaluate(&layout).unwrap();
        let scaled = p.scaled_weights(s).evaluate(&layout).unwrap();
        prop_assert!((scaled.objective - s * base.objective).abs() <= 1e-9 * (1.0 + s * base.objective));
        prop_assert_eq!(scaled.total_violation, base.total_violation);
    }

    #[test]
    fn downhill_moves_always_accepted(d in -10.0..0.0f64, t in 1e-6..10.0f64, u in 0.0..1.0f64) {
        prop_assert!(metropolis_accept(d, t, u));
    }
}

fn pair_problem(target: f64, min_gap: f64) -> LayoutProblem {
    let room = Domain::rect(0.0, 0.0, 3.0, 3.0, 2.5).unwrap();
    let obj = |id: &str, dx, dy| ProblemObject {
        id: id.into(),
        category: "box".into(),
        extent: Extent::new(dx, dy, 0.5).unwrap(),
        movable: true,
        pose: Pose::IDENTITY,
    };
    LayoutProblem::new(
        "room",
        room,
        vec![obj("a", 0.9, 0.5), obj("b", 0.4, 0.7)],
        vec![
            RelationTerm::soft(RelationParams::Distance { target }, &["a", "b"], 1.7),
            RelationTerm::soft(RelationParams::RelativeOrientation { target: FRAC_PI_2 }, &["a", "b"], 0.4),
            RelationTerm::hard(RelationParams::Distance { target: 0.0 }, &["a", "b"], Comparator::GreaterEq, min_gap),
        ],
        &ProblemConfig::default(),
    )
    .unwrap()
}

#[test]
fn oracle_is_invariant_to_object_order() {
    let p = pair_problem(1.1, 0.6);
    let grid = GridSpec::with_step(0.25);
    let forward = oracle::oracle_solve(&p, &grid).unwrap();

    let mut objects = p.objects().to_vec();
    objects.reverse();
    let swapped = LayoutProblem::new(
        "room",
        p.domain().clone(),
        objects,
        p.terms()[..p.user_term_count()].to_vec(),
        &ProblemConfig::default(),
    )
    .unwrap();
    let backward = oracle::oracle_solve(&swapped, &grid).unwrap();
    assert!(forward.feasible && backward.feasible);
    assert!((forward.breakdown.objective - backward.breakdown.objective).abs() <= 1e-12);
}

#[test]
fn oracle_optimum_bounds_sampled_grid_layouts() {
    let p = pair_problem(0.7, 0.3);
    let optimum = oracle::oracle_solve(&p, &GridSpec::with_step(0.25)).unwrap();
    let positions = oracle::grid_positions(p.domain(), 0.25);
    let mut best = f64::INFINITY;
    for (i, a) in positions.iter().enumerate().step_by(7) {
        for b in positions.iter().skip(i % 5).step_by(5) {
            for yaw in [0.0, FRAC_PI_2] {
                let l = p.layout_from(vec![
                    Pose::upright(a.x, a.y, p.support_z(0), 0.0),
                    Pose::upright(b.x, b.y, p.support_z(1), yaw),
                ]);
                let r = p.evaluate(&l).unwrap();
                if problem::is_feasible(&r, 1e-9) {
                    best = best.min(r.objective);
                }
            }
        }
    }
    assert!(best.is_finite());
    assert!(optimum.breakdown.objective <= best + 1e-12);
}
