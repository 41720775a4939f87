//! Fixed problem instances shared by the benchmarks.

use layoutforge_core::problem::{LayoutProblem, ProblemConfig, ProblemObject};
use layoutforge_core::relation::{Comparator, PlanarAxis, RelationParams, RelationTerm};
use layoutforge_core::{Domain, Extent, Pose};

fn movable(id: &str, dx: f64, dy: f64, dz: f64) -> ProblemObject {
    ProblemObject {
        id: id.into(),
        category: "box".into(),
        extent: Extent::new(dx, dy, dz).expect("positive extent"),
        movable: true,
        pose: Pose::IDENTITY,
    }
}

/// Two objects in a 10 m room: the oracle-equivalence instance shape.
pub fn pair_problem() -> LayoutProblem {
    let room = Domain::rect(0.0, 0.0, 10.0, 10.0, 3.0).expect("valid room");
    LayoutProblem::new(
        "room",
        room,
        vec![movable("a", 1.2, 0.6, 0.8), movable("b", 0.5, 0.9, 0.4)],
        vec![
            RelationTerm::soft(RelationParams::Distance { target: 1.5 }, &["a", "b"], 1.0),
            RelationTerm::hard(RelationParams::Distance { target: 0.0 }, &["a", "b"], Comparator::GreaterEq, 1.0),
        ],
        &ProblemConfig::default(),
    )
    .expect("valid problem")
}

/// Six pieces of furniture with mixed soft and hard terms.
pub fn living_room() -> LayoutProblem {
    let room = Domain::rect(0.0, 0.0, 6.0, 5.0, 2.8).expect("valid room");
    let objects = vec![
        movable("sofa", 2.0, 0.9, 0.85),
        movable("table", 1.0, 0.6, 0.45),
        movable("chair_1", 0.7, 0.7, 0.9),
        movable("chair_2", 0.7, 0.7, 0.9),
        movable("lamp", 0.4, 0.4, 1.6),
        movable("shelf", 1.2, 0.35, 1.8),
    ];
    let terms = vec![
        RelationTerm::soft(RelationParams::Distance { target: 0.4 }, &["table", "sofa"], 2.0),
        RelationTerm::soft(RelationParams::Alignment { axis: PlanarAxis::X }, &["table", "sofa"], 1.0),
        RelationTerm::soft(RelationParams::Distance { target: 0.5 }, &["chair_1", "table"], 1.0),
        RelationTerm::soft(RelationParams::Distance { target: 0.5 }, &["chair_2", "table"], 1.0),
        RelationTerm::adjacent("lamp", "sofa", 0.05),
        RelationTerm::hard(RelationParams::Distance { target: 0.0 }, &["shelf", "sofa"], Comparator::GreaterEq, 1.0),
    ];
    LayoutProblem::new("room", room, objects, terms, &ProblemConfig::default()).expect("valid problem")
}
