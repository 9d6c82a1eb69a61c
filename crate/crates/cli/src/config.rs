//! Experiment configuration files.
//!
//! ```json
//! {
//!   "space": {"gallery": {"name": "spider", "params": {"legs": 3}}},
//!   "measure": {"atoms": [
//!     {"u": [], "point": {"vertex": "ray1"}, "r": 1.0, "weight": 0.5},
//!     {"u": [], "point": {"vertex": "ray2"}, "r": 1.0, "weight": 0.5}
//!   ]}
//! }
//! ```
//!
//! An explicit space is `{"spine_dim": s, "graph": {"vertices": [...],
//! "edges": [{"id", "from", "to", "length"}]}}`. Ids are strings or
//! integers; an integer that is not a label is read as a position.

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use strata_core::frechet::{Atom, Measure};
use strata_core::gallery::{self, GallerySpec};
use strata_core::{ConeSpace, EdgeId, GraphPoint, MetricGraph, Point, VertexId};

use crate::error::{CliError, Result};

/// Weight sums within this distance of 1 are renormalized.
pub const WEIGHT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Index(u64),
    Label(String),
}

impl Id {
    fn label(&self) -> String {
        match self {
            Id::Index(i) => i.to_string(),
            Id::Label(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub space: SpaceSpec,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub oracle_step: Option<f64>,
    /// Tangent vectors at the mean for `grad`.
    #[serde(default)]
    pub directions: Vec<VectorSpec>,
    #[serde(default)]
    pub perturb: Option<PerturbSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default)]
    pub gallery: Option<GalleryEntry>,
    #[serde(default)]
    pub spine_dim: Option<usize>,
    #[serde(default)]
    pub graph: Option<GraphSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum GalleryEntry {
    Spider { legs: usize },
    OpenBook { pages: usize, spine_dim: usize },
    Kale { circumference: f64 },
    Sector { angle: f64 },
    Euclidean { dim: usize },
    Theta { edge_length: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<Id>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: Id,
    pub from: Id,
    pub to: Id,
    pub length: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub atoms: Vec<AtomSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRef {
    #[serde(default)]
    pub vertex: Option<Id>,
    #[serde(default)]
    pub edge: Option<Id>,
    #[serde(default)]
    pub t: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    #[serde(default)]
    pub u: Vec<f64>,
    #[serde(default)]
    pub point: Option<LinkRef>,
    #[serde(default)]
    pub r: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    #[serde(default)]
    pub u: Vec<f64>,
    #[serde(default)]
    pub point: Option<LinkRef>,
    #[serde(default)]
    pub r: f64,
    pub weight: f64,
}

/// A point mass of weight `epsilon` placed at `exp(direction)` from the mean.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSpec {
    pub epsilon: f64,
    #[serde(default)]
    pub direction: Option<VectorSpec>,
}

/// A parsed and validated configuration.
#[derive(Clone, Debug)]
pub struct Experiment {
    /// Hex SHA-256 of the file contents.
    pub hash: String,
    pub space: ConeSpace,
    pub measure: Measure,
    pub file: ConfigFile,
}

pub fn parse_config(path: &Path) -> Result<Experiment> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let file: ConfigFile = serde_json::from_slice(&bytes).map_err(|e| {
        let mut message = e.to_string();
        if let Some(i) = message.rfind(" at line ") {
            message.truncate(i);
        }
        CliError::Syntax {
            path: path.to_owned(),
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    let space = build_space(&file.space)?;
    let measure = build_measure(&space, &file.measure)?;
    Ok(Experiment {
        hash: hex::encode(Sha256::digest(&bytes)),
        space,
        measure,
        file,
    })
}

pub fn build_space(spec: &SpaceSpec) -> Result<ConeSpace> {
    let built = match (&spec.gallery, &spec.spine_dim, &spec.graph) {
        (Some(g), None, None) => gallery::build(&gallery_spec(g)),
        (None, Some(s), Some(g)) => ConeSpace::new(*s, build_graph(g)?),
        (None, Some(s), None) => Ok(gallery::euclidean(*s)),
        _ => {
            return Err(CliError::invalid(
                "space",
                "expected either \"gallery\" or \"spine_dim\" with an optional \"graph\"",
            ))
        }
    };
    built.map_err(|e| CliError::invalid("space", e.to_string()))
}

fn gallery_spec(g: &GalleryEntry) -> GallerySpec {
    match *g {
        GalleryEntry::Spider { legs } => GallerySpec::Spider { legs },
        GalleryEntry::OpenBook { pages, spine_dim } => GallerySpec::OpenBook { pages, spine_dim },
        GalleryEntry::Kale { circumference } => GallerySpec::Kale { circumference },
        GalleryEntry::Sector { angle } => GallerySpec::Sector { angle },
        GalleryEntry::Euclidean { dim } => GallerySpec::Euclidean { dim },
        GalleryEntry::Theta { edge_length } => GallerySpec::Theta { edge_length },
    }
}

fn build_graph(g: &GraphSpec) -> Result<MetricGraph> {
    let labels: Vec<String> = g.vertices.iter().map(Id::label).collect();
    let index = |id: &Id, field: String| {
        labels
            .iter()
            .position(|l| *l == id.label())
            .ok_or_else(|| CliError::invalid(field, format!("unknown vertex {:?}", id.label())))
    };
    let mut edges = Vec::with_capacity(g.edges.len());
    for (i, e) in g.edges.iter().enumerate() {
        let from = index(&e.from, format!("space.graph.edges[{i}].from"))?;
        let to = index(&e.to, format!("space.graph.edges[{i}].to"))?;
        edges.push((e.id.label(), from, to, e.length));
    }
    MetricGraph::new(labels, edges).map_err(|e| CliError::invalid("space.graph", e.to_string()))
}

fn find_vertex(graph: &MetricGraph, id: &Id) -> Option<VertexId> {
    graph.vertex_by_label(&id.label()).or(match id {
        Id::Index(i) => usize::try_from(*i).ok().filter(|&i| i < graph.vertex_count()).map(VertexId),
        Id::Label(_) => None,
    })
}

fn find_edge(graph: &MetricGraph, id: &Id) -> Option<EdgeId> {
    graph.edge_by_label(&id.label()).or(match id {
        Id::Index(i) => usize::try_from(*i).ok().filter(|&i| i < graph.edge_count()).map(EdgeId),
        Id::Label(_) => None,
    })
}

/// Resolves `(u, point, r)` against `space`; `field` names the location in
/// the file for diagnostics.
pub fn resolve_point(space: &ConeSpace, u: &[f64], point: Option<&LinkRef>, r: f64, field: &str) -> Result<Point> {
    if u.len() != space.spine_dim() {
        return Err(CliError::invalid(
            format!("{field}.u"),
            format!("expected {} spine coordinates, got {}", space.spine_dim(), u.len()),
        ));
    }
    if let Some(i) = u.iter().position(|x| !x.is_finite()) {
        return Err(CliError::invalid(format!("{field}.u[{i}]"), "not a finite number"));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(CliError::invalid(format!("{field}.r"), format!("radius {r} must be finite and nonnegative")));
    }
    let Some(link_ref) = point else {
        if r > 0.0 {
            return Err(CliError::invalid(format!("{field}.point"), "a positive radius needs a link point"));
        }
        return Ok(Point::spine(u.to_vec()));
    };
    let graph = space.link();
    let field = format!("{field}.point");
    let dir = match (&link_ref.vertex, &link_ref.edge, link_ref.t) {
        (Some(v), None, None) => GraphPoint::Vertex(
            find_vertex(graph, v)
                .ok_or_else(|| CliError::invalid(format!("{field}.vertex"), format!("unknown vertex {:?}", v.label())))?,
        ),
        (None, Some(e), Some(t)) => {
            let e = find_edge(graph, e)
                .ok_or_else(|| CliError::invalid(format!("{field}.edge"), format!("unknown edge {:?}", e.label())))?;
            let len = graph.edge(e).length;
            if !(0.0..=len).contains(&t) {
                return Err(CliError::invalid(format!("{field}.t"), format!("{t} is outside [0, {len}]")));
            }
            graph.edge_point(e, t)
        }
        _ => {
            return Err(CliError::invalid(
                field,
                "expected {\"vertex\": id} or {\"edge\": id, \"t\": x}",
            ))
        }
    };
    Ok(Point::new(u.to_vec(), dir, r))
}

pub fn resolve_vector(space: &ConeSpace, v: &VectorSpec, field: &str) -> Result<Point> {
    resolve_point(space, &v.u, v.point.as_ref(), v.r, field)
}

pub fn build_measure(space: &ConeSpace, spec: &MeasureSpec) -> Result<Measure> {
    if spec.atoms.is_empty() {
        return Err(CliError::invalid("measure.atoms", "at least one atom is required"));
    }
    let mut atoms = Vec::with_capacity(spec.atoms.len());
    for (i, a) in spec.atoms.iter().enumerate() {
        let field = format!("measure.atoms[{i}]");
        if !(a.weight.is_finite() && a.weight > 0.0) {
            return Err(CliError::invalid(format!("{field}.weight"), format!("{} is not positive", a.weight)));
        }
        let p = resolve_point(space, &a.u, a.point.as_ref(), a.r, &field)?;
        atoms.push(Atom::new(p, a.weight));
    }
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() > WEIGHT_SLACK {
        return Err(CliError::invalid("measure.atoms", format!("weights sum to {total}, expected 1")));
    }
    atoms.iter_mut().for_each(|a| a.weight /= total);
    Measure::new(atoms).map_err(|e| CliError::invalid("measure", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(json: &str) -> Result<ConeSpace> {
        build_space(&serde_json::from_str(json).unwrap())
    }

    #[test]
    fn gallery_and_explicit_spaces() {
        let s = space(r#"{"gallery": {"name": "open_book", "params": {"pages": 3, "spine_dim": 1}}}"#).unwrap();
        assert_eq!(s, gallery::open_book(3, 1));
        let g = space(
            r#"{"spine_dim": 0, "graph": {"vertices": ["a", 1],
                "edges": [{"id": "x", "from": "a", "to": 1, "length": 4.0},
                          {"id": "y", "from": 1, "to": "a", "length": 4.0}]}}"#,
        )
        .unwrap();
        assert_eq!(g.link().edge_count(), 2);
        assert!(space(r#"{"gallery": {"name": "kale", "params": {"circumference": 5.0}}}"#).is_err());
        assert!(space(r#"{"spine_dim": 1, "gallery": {"name": "spider", "params": {"legs": 2}}}"#).is_err());
    }

    #[test]
    fn points_resolve_by_label_or_position() {
        let s = gallery::theta(4.0).unwrap();
        let by_label: LinkRef = serde_json::from_str(r#"{"vertex": "b"}"#).unwrap();
        let by_index: LinkRef = serde_json::from_str(r#"{"vertex": 1}"#).unwrap();
        assert_eq!(
            resolve_point(&s, &[], Some(&by_label), 1.0, "p").unwrap(),
            resolve_point(&s, &[], Some(&by_index), 1.0, "p").unwrap()
        );
        let edge: LinkRef = serde_json::from_str(r#"{"edge": "e2", "t": 4.0}"#).unwrap();
        assert_eq!(
            resolve_point(&s, &[], Some(&edge), 1.0, "p").unwrap().dir(),
            Some(GraphPoint::Vertex(VertexId(1)))
        );
        let off: LinkRef = serde_json::from_str(r#"{"edge": "e2", "t": 4.5}"#).unwrap();
        assert!(resolve_point(&s, &[], Some(&off), 1.0, "p").is_err());
        assert!(resolve_point(&s, &[], None, 1.0, "p").is_err());
        assert!(resolve_point(&s, &[0.0], None, 0.0, "p").is_err());
    }

    #[test]
    fn weights_near_one_are_renormalized() {
        let s = gallery::euclidean(1);
        let m = |w: f64| MeasureSpec {
            atoms: vec![
                AtomSpec { u: vec![0.0], point: None, r: 0.0, weight: w },
                AtomSpec { u: vec![1.0], point: None, r: 0.0, weight: 0.5 },
            ],
        };
        let ok = build_measure(&s, &m(0.5 + 5e-10)).unwrap();
        let total: f64 = ok.atoms().iter().map(|a| a.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(build_measure(&s, &m(0.4)).is_err());
        assert!(build_measure(&s, &m(-0.5)).is_err());
    }
}
