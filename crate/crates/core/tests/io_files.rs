use std::path::{Path, PathBuf};

use layoutforge_core::anneal::{self, AnnealConfig};
use layoutforge_core::io::{self, SceneSpec};
use layoutforge_core::scene::world_footprint;

fn path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(rel)
}

fn hierarchy() -> SceneSpec {
    io::read_spec(&path("fixtures/hierarchy.json")).unwrap()
}

/// Settings of the golden run; regenerate with
/// `layoutforge solve crates/core/tests/fixtures/hierarchy.json --seed 3 --max-evals 20000 --out <golden>`.
fn golden_config(spec: &SceneSpec) -> AnnealConfig {
    AnnealConfig {
        seed: 3,
        max_evals: 20_000,
        ..spec.solver.clone()
    }
}

#[test]
fn layout_matches_golden_file() {
    let spec = hierarchy();
    let solved =
        anneal::solve_hierarchical(&spec.tree, &spec.domain, &spec.level_terms(), &spec.problem, &golden_config(&spec))
            .unwrap();
    let golden = std::fs::read_to_string(path("golden/hierarchy_layout.json")).unwrap();
    assert_eq!(io::layout_json(&solved), golden);
}

#[test]
fn reloaded_layout_recomposes_world_poses() {
    let layout = io::read_layout(&path("golden/hierarchy_layout.json")).unwrap();
    let world = io::recompose_world(&layout);
    for o in &layout.objects {
        let w = world[&o.id];
        for (a, b) in [(w.x(), o.world.x()), (w.y(), o.world.y()), (w.z(), o.world.z())] {
            assert!((a - b).abs() <= 1e-9, "{}", o.id);
        }
        let dyaw = (w.yaw() - o.world.yaw()).rem_euclid(std::f64::consts::TAU);
        assert!(dyaw.min(std::f64::consts::TAU - dyaw) <= 1e-9);
    }
    assert_eq!(layout.levels.iter().map(|l| l.level.as_str()).collect::<Vec<_>>(), ["room", "table", "shelf"]);
}

#[test]
fn spec_round_trip_is_identity() {
    for name in ["fixtures/hierarchy.json", "fixtures/furnished.json"] {
        let spec = io::read_spec(&path(name)).unwrap();
        let text = io::serialize_spec(&spec);
        let again = io::parse_spec(text.as_bytes()).unwrap();
        assert_eq!(again, spec);
        assert_eq!(io::serialize_spec(&again), text);
    }
}

#[test]
fn svg_is_deterministic_and_matches_footprints() {
    let spec = hierarchy();
    let cfg = AnnealConfig {
        max_evals: 5_000,
        ..golden_config(&spec)
    };
    let solve = || anneal::solve_hierarchical(&spec.tree, &spec.domain, &spec.level_terms(), &spec.problem, &cfg).unwrap();
    let (a, b) = (solve(), solve());
    let svg = io::render_svg(&a.tree, &spec.domain);
    assert_eq!(svg, io::render_svg(&b.tree, &spec.domain));

    let world = a.tree.world_poses();
    let node = a.tree.find("plate_2").unwrap();
    let expected: Vec<String> = world_footprint(&world["plate_2"], &node.extent)
        .unwrap()
        .iter()
        .map(|c| {
            let q = io::page_point(&spec.domain, *c);
            format!("{:.6},{:.6}", q.x, q.y)
        })
        .collect();
    assert!(svg.contains(&expected.join(" ")));
    // document order is the tree walk
    let order: Vec<usize> = ["table", "plate_1", "plate_2", "shelf", "book_1"]
        .iter()
        .map(|id| svg.find(&format!(">{id}</text>")).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn infeasible_level_is_flagged_in_file() {
    let mut spec = io::read_spec(&path("fixtures/furnished.json")).unwrap();
    spec.terms.push(layoutforge_core::RelationTerm::hard(
        layoutforge_core::RelationParams::Distance { target: 0.0 },
        &["sofa", "tv_stand"],
        layoutforge_core::Comparator::GreaterEq,
        20.0,
    ));
    spec.term_levels.push("room".into());
    let cfg = AnnealConfig {
        max_evals: 3_000,
        ..spec.solver.clone()
    };
    let solved = anneal::solve_hierarchical(&spec.tree, &spec.domain, &spec.level_terms(), &spec.problem, &cfg).unwrap();
    let file = io::layout_file(&solved);
    assert!(!file.feasible);
    assert!(!file.levels[0].feasible);
    assert!(file.objects.iter().filter(|o| o.parent == "room").all(|o| !o.feasible));
}
