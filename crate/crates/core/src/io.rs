//! Scene spec files, layout output, trace logs and SVG rendering.
//!
//! Spec and layout files are JSON with `"version": 1`. The room is the
//! implicit root (id `room`); objects name their parent or `null` for the
//! room. Terms are listed globally and attach to the level of their
//! participants' common parent.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::anneal::{AnnealConfig, SolvedTree, TraceRecord};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::problem::ProblemConfig;
use crate::relation::{Comparator, RelationParams, RelationTerm, TermMode};
use crate::scene::{self, compose_pose, validate_tree, DiagnosticKind, Domain, Extent, ObjectNode, Pose, ROOM_ID};
use crate::trajectory::TrajectoryCommand;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDto {
    boundary: Vec<[f64; 2]>,
    height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDto {
    id: String,
    category: String,
    dims: [f64; 3],
    #[serde(default)]
    parent: Option<String>,
    /// Present for fixed objects.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pose: Option<Pose>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeType {
    Soft,
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeDto {
    #[serde(rename = "type")]
    kind: ModeType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comparator: Option<Comparator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDto {
    participants: Vec<String>,
    params: RelationParams,
    /// Soft with weight 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<ModeDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDto {
    version: u32,
    domain: DomainDto,
    objects: Vec<ObjectDto>,
    #[serde(default)]
    terms: Vec<TermDto>,
    #[serde(default)]
    problem: ProblemConfig,
    #[serde(default)]
    solver: AnnealConfig,
    #[serde(default)]
    trajectories: Vec<TrajectoryCommand>,
}

/// Validated scene model.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub domain: Domain,
    /// Room-rooted tree with support heights assigned.
    pub tree: ObjectNode,
    /// All terms in file order.
    pub terms: Vec<RelationTerm>,
    /// Level (parent id) of each term.
    pub term_levels: Vec<String>,
    pub problem: ProblemConfig,
    pub solver: AnnealConfig,
    pub trajectories: Vec<TrajectoryCommand>,
    /// Non-fatal findings, e.g. a child larger than its parent.
    pub warnings: Vec<String>,
}

impl SceneSpec {
    /// Terms grouped by level id, each group in file order.
    pub fn level_terms(&self) -> BTreeMap<String, Vec<RelationTerm>> {
        let mut out: BTreeMap<String, Vec<RelationTerm>> = BTreeMap::new();
        for (t, level) in self.terms.iter().zip(&self.term_levels) {
            out.entry(level.clone()).or_default().push(t.clone());
        }
        out
    }
}

fn spec_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec {
        location: location.into(),
        message: message.into(),
    }
}

fn normalize_mode(index: usize, params: &RelationParams, mode: Option<&ModeDto>) -> Result<TermMode> {
    let at = format!("terms[{index}].mode");
    let Some(m) = mode else {
        return Ok(TermMode::Soft { weight: 1.0 });
    };
    match m.kind {
        ModeType::Soft => {
            if m.comparator.is_some() || m.threshold.is_some() || m.tolerance.is_some() {
                return Err(spec_err(at, "soft terms take only `weight`"));
            }
            Ok(TermMode::Soft {
                weight: m.weight.unwrap_or(1.0),
            })
        }
        ModeType::Hard => {
            if m.weight.is_some() {
                return Err(spec_err(at, "hard terms take no `weight`"));
            }
            let threshold = match (m.threshold, params) {
                (Some(t), _) => t,
                (None, RelationParams::Proximity { epsilon }) => *epsilon,
                (None, RelationParams::Collision | RelationParams::Containment) => 0.0,
                (None, _) => return Err(spec_err(at, "hard term needs `threshold`")),
            };
            Ok(TermMode::Hard {
                comparator: m.comparator.unwrap_or(Comparator::LessEq),
                threshold,
                tolerance: m.tolerance.unwrap_or(0.0),
            })
        }
    }
}

/// Parses and validates a spec document, applying all defaults.
pub fn parse_spec(bytes: &[u8]) -> Result<SceneSpec> {
    let dto: SpecDto = serde_json::from_slice(bytes).map_err(|e| {
        spec_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    if dto.version != SPEC_VERSION {
        return Err(spec_err("version", format!("unsupported version {}", dto.version)));
    }
    let domain = Domain::new(
        dto.domain.boundary.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
        dto.domain.height,
    )
    .map_err(|e| spec_err("domain", e.to_string()))?;

    let mut by_id: HashMap<&str, usize> = HashMap::new();
    for (i, o) in dto.objects.iter().enumerate() {
        if o.id == ROOM_ID || o.id.is_empty() {
            return Err(spec_err(format!("objects[{i}].id"), format!("reserved or empty id `{}`", o.id)));
        }
        if by_id.insert(&o.id, i).is_some() {
            return Err(spec_err(format!("objects[{i}].id"), format!("duplicate id `{}`", o.id)));
        }
    }
    let mut parent_of: HashMap<&str, &str> = HashMap::new();
    for (i, o) in dto.objects.iter().enumerate() {
        let parent = o.parent.as_deref().unwrap_or(ROOM_ID);
        if parent != ROOM_ID && !by_id.contains_key(parent) {
            return Err(spec_err(format!("objects[{i}].parent"), format!("dangling id `{parent}`")));
        }
        parent_of.insert(&o.id, parent);
    }
    // every chain must reach the room
    for (i, o) in dto.objects.iter().enumerate() {
        let mut cur = o.id.as_str();
        for _ in 0..=dto.objects.len() {
            if cur == ROOM_ID {
                break;
            }
            cur = parent_of[cur];
        }
        if cur != ROOM_ID {
            return Err(spec_err(format!("objects[{i}].parent"), "parent cycle"));
        }
    }

    fn build(id: &str, dto: &SpecDto, nodes: &HashMap<&str, ObjectNode>) -> ObjectNode {
        let mut node = nodes[id].clone();
        for o in &dto.objects {
            if o.parent.as_deref().unwrap_or(ROOM_ID) == id {
                node.children.push(build(&o.id, dto, nodes));
            }
        }
        node
    }
    let mut nodes: HashMap<&str, ObjectNode> = HashMap::new();
    nodes.insert(ROOM_ID, ObjectNode::room(&domain));
    for (i, o) in dto.objects.iter().enumerate() {
        let extent = Extent::new(o.dims[0], o.dims[1], o.dims[2])
            .map_err(|e| spec_err(format!("objects[{i}].dims"), e.to_string()))?;
        let mut node = ObjectNode::new(o.id.clone(), o.category.clone(), extent);
        if let Some(p) = o.pose {
            node = node.fixed_at(p);
        }
        nodes.insert(&o.id, node);
    }
    let root = build(ROOM_ID, &dto, &nodes);
    let validated = validate_tree(&root, &domain);
    let mut warnings = Vec::new();
    for d in &validated.report.diagnostics {
        match &d.kind {
            DiagnosticKind::ChildLargerThanParent { child_area, parent_area } => warnings.push(format!(
                "`{}` footprint {child_area} exceeds its parent's {parent_area}",
                d.node_id
            )),
            other => return Err(spec_err(format!("object `{}`", d.node_id), format!("{other:?}"))),
        }
    }

    let mut terms = Vec::with_capacity(dto.terms.len());
    let mut term_levels = Vec::with_capacity(dto.terms.len());
    for (i, t) in dto.terms.iter().enumerate() {
        let mut level: Option<&str> = None;
        for p in &t.participants {
            let Some(parent) = parent_of.get(p.as_str()) else {
                return Err(spec_err(format!("terms[{i}]"), format!("dangling id `{p}`")));
            };
            match level {
                None => level = Some(parent),
                Some(l) if l != *parent => {
                    return Err(Error::CrossLevelTerm {
                        index: i,
                        id: p.clone(),
                        level: l.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        let term = RelationTerm {
            participants: t.participants.clone(),
            params: t.params.clone(),
            mode: normalize_mode(i, &t.params, t.mode.as_ref())?,
        };
        term.validate(i)?;
        terms.push(term);
        term_levels.push(level.unwrap_or(ROOM_ID).to_string());
    }
    for (a, b) in &dto.problem.allow_overlap {
        for id in [a, b] {
            if !by_id.contains_key(id.as_str()) {
                return Err(spec_err("problem.allow_overlap", format!("dangling id `{id}`")));
            }
        }
    }
    dto.solver.validate().map_err(|e| spec_err("solver", e.to_string()))?;
    for (i, c) in dto.trajectories.iter().enumerate() {
        c.validate().map_err(|e| spec_err(format!("trajectories[{i}]"), e.to_string()))?;
        let mut ids = vec![&c.anchor.object];
        if let crate::trajectory::Subject::Object { id } = &c.subject {
            ids.push(id);
        }
        for id in ids {
            if !by_id.contains_key(id.as_str()) {
                return Err(spec_err(format!("trajectories[{i}]"), format!("dangling id `{id}`")));
            }
        }
    }
    Ok(SceneSpec {
        domain,
        tree: validated.tree,
        terms,
        term_levels,
        problem: dto.problem,
        solver: dto.solver,
        trajectories: dto.trajectories,
        warnings,
    })
}

pub fn read_spec(path: &Path) -> Result<SceneSpec> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&bytes)
}

/// Normalized spec text: every default spelled out, objects in tree order.
pub fn serialize_spec(spec: &SceneSpec) -> String {
    let mut objects = Vec::new();
    spec.tree.walk(&mut |n, parent| {
        let Some(parent) = parent else { return };
        objects.push(ObjectDto {
            id: n.id.clone(),
            category: n.category.clone(),
            dims: [n.extent.dx, n.extent.dy, n.extent.dz],
            parent: (parent != ROOM_ID).then(|| parent.to_string()),
            pose: n.fixed.then_some(n.local_pose),
        });
    });
    let terms = spec
        .terms
        .iter()
        .map(|t| TermDto {
            participants: t.participants.clone(),
            params: t.params.clone(),
            mode: Some(match t.mode {
                TermMode::Soft { weight } => ModeDto {
                    kind: ModeType::Soft,
                    weight: Some(weight),
                    comparator: None,
                    threshold: None,
                    tolerance: None,
                },
                TermMode::Hard {
                    comparator,
                    threshold,
                    tolerance,
                } => ModeDto {
                    kind: ModeType::Hard,
                    weight: None,
                    comparator: Some(comparator),
                    threshold: Some(threshold),
                    tolerance: Some(tolerance),
                },
            }),
        })
        .collect();
    let dto = SpecDto {
        version: SPEC_VERSION,
        domain: DomainDto {
            boundary: spec.domain.boundary().iter().map(|p| [p.x, p.y]).collect(),
            height: spec.domain.height(),
        },
        objects,
        terms,
        problem: spec.problem.clone(),
        solver: spec.solver.clone(),
        trajectories: spec.trajectories.clone(),
    };
    let mut s = serde_json::to_string_pretty(&dto).expect("spec serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutObject {
    pub id: String,
    pub parent: String,
    pub local: Pose,
    pub world: Pose,
    /// Feasibility of the level this object was solved in.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutLevel {
    pub level: String,
    /// False when the level had no movable objects.
    pub solved: bool,
    pub feasible: bool,
    pub objective: f64,
    pub total_violation: f64,
    pub soft_scores: Vec<f64>,
    pub violations: Vec<f64>,
    pub evals_used: u64,
    pub restart_index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    pub version: u32,
    pub feasible: bool,
    pub objects: Vec<LayoutObject>,
    pub levels: Vec<LayoutLevel>,
}

pub fn layout_file(solved: &SolvedTree) -> LayoutFile {
    let world = solved.tree.world_poses();
    let mut objects = Vec::new();
    solved.tree.walk(&mut |n, parent| {
        let Some(parent) = parent else { return };
        objects.push(LayoutObject {
            id: n.id.clone(),
            parent: parent.to_string(),
            local: n.local_pose,
            world: world[&n.id],
            feasible: solved.level(parent).is_none_or(|l| l.feasible()),
        });
    });
    let levels = solved
        .levels
        .iter()
        .map(|l| match &l.solution {
            Some(s) => LayoutLevel {
                level: l.level.clone(),
                solved: true,
                feasible: s.feasible,
                objective: s.breakdown.objective,
                total_violation: s.breakdown.total_violation,
                soft_scores: s.breakdown.soft_scores.clone(),
                violations: s.breakdown.violations.clone(),
                evals_used: s.evals_used,
                restart_index: s.restart_index,
            },
            None => LayoutLevel {
                level: l.level.clone(),
                solved: false,
                feasible: true,
                objective: 0.0,
                total_violation: 0.0,
                soft_scores: Vec::new(),
                violations: Vec::new(),
                evals_used: 0,
                restart_index: 0,
            },
        })
        .collect();
    LayoutFile {
        version: SPEC_VERSION,
        feasible: solved.feasible(),
        objects,
        levels,
    }
}

pub fn layout_json(solved: &SolvedTree) -> String {
    let mut s = serde_json::to_string_pretty(&layout_file(solved)).expect("layout serializes");
    s.push('\n');
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_layout(solved: &SolvedTree, path: &Path) -> Result<()> {
    write_text(path, &layout_json(solved))
}

pub fn read_layout(path: &Path) -> Result<LayoutFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| spec_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

/// Recomposes every world pose from local poses along the parent chain.
pub fn recompose_world(layout: &LayoutFile) -> BTreeMap<String, Pose> {
    let local: HashMap<&str, (&str, Pose)> =
        layout.objects.iter().map(|o| (o.id.as_str(), (o.parent.as_str(), o.local))).collect();
    let mut out = BTreeMap::new();
    for o in &layout.objects {
        let mut chain = vec![o.local];
        let mut cur = o.parent.as_str();
        while let Some((parent, pose)) = local.get(cur) {
            chain.push(*pose);
            cur = parent;
        }
        let world = chain.iter().rev().fold(Pose::IDENTITY, |acc, p| compose_pose(&acc, p));
        out.insert(o.id.clone(), world);
    }
    out
}

/// Line-delimited trace: `restart eval temperature current best`, values in
/// shortest round-trip form.
pub fn trace_text(records: &[TraceRecord]) -> String {
    let mut out = String::from("# restart eval temperature current best\n");
    for r in records {
        let _ = writeln!(out, "{} {} {:?} {:?} {:?}", r.restart, r.eval, r.temperature, r.current, r.best);
    }
    out
}

pub fn write_trace(records: &[TraceRecord], path: &Path) -> Result<()> {
    write_text(path, &trace_text(records))
}

/// Pixels per meter.
pub const SVG_SCALE: f64 = 50.0;
/// Page margin in pixels.
pub const SVG_MARGIN: f64 = 20.0;

/// Page coordinates of a world point: `x' = m + s·(x − x_min)`,
/// `y' = m + s·(y_max − y)`.
pub fn page_point(domain: &Domain, p: Vec2) -> Vec2 {
    let (lo, hi) = domain.bounds();
    Vec2::new(SVG_MARGIN + SVG_SCALE * (p.x - lo.x), SVG_MARGIN + SVG_SCALE * (hi.y - p.y))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn points(domain: &Domain, poly: &[Vec2]) -> String {
    poly.iter()
        .map(|p| {
            let q = page_point(domain, *p);
            format!("{:.6},{:.6}", q.x, q.y)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Top-down drawing: domain outline, then per object (tree order) its world
/// footprint, a front tick and an id label. Tilted objects are drawn with
/// their yaw-only footprint.
pub fn render_svg(tree: &ObjectNode, domain: &Domain) -> String {
    let (lo, hi) = domain.bounds();
    let w = SVG_SCALE * (hi.x - lo.x) + 2.0 * SVG_MARGIN;
    let h = SVG_SCALE * (hi.y - lo.y) + 2.0 * SVG_MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.6}\" height=\"{h:.6}\" viewBox=\"0 0 {w:.6} {h:.6}\">"
    );
    let _ = writeln!(
        out,
        "<polygon class=\"domain\" points=\"{}\" fill=\"none\" stroke=\"black\"/>",
        points(domain, domain.boundary())
    );
    let world = tree.world_poses();
    tree.walk(&mut |n, parent| {
        if parent.is_none() {
            return;
        }
        let pose = world[&n.id];
        let fp = scene::footprint_unchecked(pose.x(), pose.y(), pose.yaw(), &n.extent);
        let c = Vec2::new(pose.x(), pose.y());
        let front = Vec2::new(0.0, 0.5 * n.extent.dy).rotate(pose.yaw());
        let (a, b) = (page_point(domain, c), page_point(domain, c + front));
        let id = escape(&n.id);
        let _ = writeln!(out, "<g id=\"obj-{id}\">");
        let _ = writeln!(
            out,
            "<polygon class=\"footprint\" points=\"{}\" fill=\"none\" stroke=\"steelblue\"/>",
            points(domain, &fp)
        );
        let _ = writeln!(
            out,
            "<line class=\"front\" x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"red\"/>",
            a.x, a.y, b.x, b.y
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"10\" text-anchor=\"middle\">{id}</text>",
            a.x, a.y
        );
        out.push_str("</g>\n");
    });
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(tree: &ObjectNode, domain: &Domain, path: &Path) -> Result<()> {
    write_text(path, &render_svg(tree, domain))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "version": 1,
        "domain": {"boundary": [[0,0],[4,0],[4,3],[0,3]], "height": 2.5},
        "objects": [{"id": "chair", "category": "chair", "dims": [0.5, 0.5, 0.9]}]
    }"#;

    #[test]
    fn minimal_spec() {
        let s = parse_spec(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.tree.children.len(), 1);
        assert!(!s.tree.children[0].fixed);
        assert_eq!(s.tree.children[0].local_pose.z(), 0.45);
        assert!(s.terms.is_empty());
        assert_eq!(s.solver, AnnealConfig::default());
    }

    #[test]
    fn dangling_term_names_index() {
        let text = MINIMAL.replace(
            "\"dims\": [0.5, 0.5, 0.9]}]",
            "\"dims\": [0.5, 0.5, 0.9]}],\n\"terms\": [{\"participants\": [\"chair\", \"ghost\"], \"params\": {\"kind\": \"distance\", \"target\": 1}}]",
        );
        let err = parse_spec(text.as_bytes()).unwrap_err();
        assert_eq!(
            err,
            Error::Spec {
                location: "terms[0]".into(),
                message: "dangling id `ghost`".into()
            }
        );
    }

    #[test]
    fn schema_errors_carry_position() {
        let text = MINIMAL.replace("\"height\": 2.5", "\"height\": 2.5, \"color\": 1");
        let err = parse_spec(text.as_bytes()).unwrap_err();
        assert!(matches!(&err, Error::Spec { location, .. } if location.starts_with("line 3")), "{err}");
        let text = MINIMAL.replace("\"version\": 1", "\"version\": 2");
        assert!(parse_spec(text.as_bytes()).is_err());
        let bad_kind = MINIMAL.replace(
            "\"dims\": [0.5, 0.5, 0.9]}]",
            "\"dims\": [0.5, 0.5, 0.9]}], \"terms\": [{\"participants\": [\"chair\"], \"params\": {\"kind\": \"levitate\"}}]",
        );
        assert!(parse_spec(bad_kind.as_bytes()).is_err());
    }

    #[test]
    fn normalized_round_trip() {
        let text = r#"{
            "version": 1,
            "domain": {"boundary": [[0,0],[5,0],[5,5],[0,5]], "height": 3},
            "objects": [
                {"id": "table", "category": "table", "dims": [1.2, 0.8, 0.75]},
                {"id": "plate", "category": "plate", "dims": [0.2, 0.2, 0.02], "parent": "table"},
                {"id": "lamp", "category": "lamp", "dims": [0.3, 0.3, 1.5], "pose": {"x": 1, "y": 1, "z": 0, "yaw": 0.5}}
            ],
            "terms": [
                {"participants": ["table", "lamp"], "params": {"kind": "proximity"}, "mode": {"type": "hard"}},
                {"participants": ["table", "lamp"], "params": {"kind": "distance", "target": 1.0}}
            ],
            "solver": {"seed": 9, "restarts": 2}
        }"#;
        let a = parse_spec(text.as_bytes()).unwrap();
        assert_eq!(a.term_levels, vec!["room", "room"]);
        assert_eq!(
            a.terms[0].mode,
            TermMode::Hard {
                comparator: Comparator::LessEq,
                threshold: 0.01,
                tolerance: 0.0
            }
        );
        assert_eq!(a.terms[1].mode, TermMode::Soft { weight: 1.0 });
        let out = serialize_spec(&a);
        let b = parse_spec(out.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize_spec(&b), out);
    }

    #[test]
    fn cross_level_term_rejected() {
        let text = r#"{
            "version": 1,
            "domain": {"boundary": [[0,0],[5,0],[5,5],[0,5]], "height": 3},
            "objects": [
                {"id": "table", "category": "table", "dims": [1.2, 0.8, 0.75]},
                {"id": "plate", "category": "plate", "dims": [0.2, 0.2, 0.02], "parent": "table"}
            ],
            "terms": [{"participants": ["table", "plate"], "params": {"kind": "distance", "target": 0}}]
        }"#;
        assert!(matches!(parse_spec(text.as_bytes()), Err(Error::CrossLevelTerm { index: 0, .. })));
    }

    #[test]
    fn svg_page_transform() {
        let d = Domain::rect(0.0, 0.0, 4.0, 3.0, 2.5).unwrap();
        assert_eq!(page_point(&d, Vec2::new(0.0, 3.0)), Vec2::new(20.0, 20.0));
        assert_eq!(page_point(&d, Vec2::new(4.0, 0.0)), Vec2::new(220.0, 170.0));
        let s = parse_spec(MINIMAL.as_bytes()).unwrap();
        let svg = render_svg(&s.tree, &s.domain);
        assert_eq!(svg.matches("class=\"footprint\"").count(), 1);
        assert_eq!(svg.matches("class=\"domain\"").count(), 1);
        assert!(svg.contains(">chair</text>"));
        assert_eq!(svg, render_svg(&s.tree, &s.domain));
    }
}
