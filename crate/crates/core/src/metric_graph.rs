//! Finite metric graphs: shortest paths, truncated angular distance, the
//! CAT(1) cycle criterion and convex closure of point sets.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Result, StrataError};

/// Absolute tolerance used to decide that two path lengths tie.
pub const TIE_TOL: f64 = 1e-12;

/// Upper bound on the number of shortest paths enumerated for one pair.
const MAX_PATHS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub length: f64,
}

/// Direction of travel along an edge. `Forward` runs from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Heading {
    Forward,
    Backward,
}

impl Heading {
    pub fn sign(self) -> f64 {
        match self {
            Heading::Forward => 1.0,
            Heading::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Heading {
        match self {
            Heading::Forward => Heading::Backward,
            Heading::Backward => Heading::Forward,
        }
    }
}

/// A point of a metric graph. Edge parameters are strictly interior; use
/// [`MetricGraph::edge_point`] to normalize boundary parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GraphPoint {
    Vertex(VertexId),
    Edge { edge: EdgeId, t: f64 },
}

/// One segment of a path, traversing `edge` from parameter `start` to `end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Leg {
    pub edge: EdgeId,
    pub heading: Heading,
    pub start: f64,
    pub end: f64,
}

impl Leg {
    pub fn length(&self) -> f64 {
        (self.end - self.start).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathDescriptor {
    pub length: f64,
    pub legs: Vec<Leg>,
    /// Set on every path of a pair that has more than one shortest path.
    pub multiple: bool,
}

impl PathDescriptor {
    /// Edge and heading with which the path leaves its source.
    pub fn departure(&self) -> Option<(EdgeId, Heading)> {
        self.legs.first().map(|l| (l.edge, l.heading))
    }

    /// Edge and heading with which the path reaches its target.
    pub fn arrival(&self) -> Option<(EdgeId, Heading)> {
        self.legs.last().map(|l| (l.edge, l.heading))
    }

    /// The point at arclength `s` from the source, clamped to the path.
    pub fn point_at(&self, graph: &MetricGraph, s: f64) -> GraphPoint {
        let mut left = s.max(0.0);
        for (i, leg) in self.legs.iter().enumerate() {
            let len = leg.length();
            if left <= len || i + 1 == self.legs.len() {
                let step = left.min(len);
                return graph.edge_point(leg.edge, leg.start + leg.heading.sign() * step);
            }
            left -= len;
        }
        unreachable!("point_at on a path without legs")
    }

    /// Arclength positions of the vertices crossed strictly inside the path.
    pub fn interior_vertex_positions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for leg in &self.legs[..self.legs.len().saturating_sub(1)] {
            acc += leg.length();
            out.push(acc);
        }
        out
    }
}

/// Result of a shortest-path query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Geodesics {
    pub distance: f64,
    pub paths: Vec<PathDescriptor>,
}

/// Shortest cycle found shorter than 2π.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cat1Violation {
    pub length: f64,
    pub edges: Vec<EdgeId>,
}

impl fmt::Display for Cat1Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.edges.iter().map(|e| e.0.to_string()).collect();
        write!(
            f,
            "cycle through edges [{}] has length {} < 2π",
            ids.join(", "),
            self.length
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricGraph {
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<EdgeId>>,
}

/// Shortest-path tree from a single source point.
struct Tree {
    dist: Vec<f64>,
    preds: Vec<Vec<Pred>>,
}

#[derive(Clone, Copy)]
enum Pred {
    Seed(Option<Leg>),
    Via { edge: EdgeId, from: VertexId },
}

#[derive(PartialEq)]
struct Queued(f64, usize);

impl Eq for Queued {}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MetricGraph {
    pub fn empty() -> Self {
        MetricGraph {
            vertex_labels: Vec::new(),
            edge_labels: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    /// Builds a graph with labelled vertices and edges given as
    /// `(label, from, to, length)` with endpoints indexing `vertices`.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(StrataError::InvalidGraph(format!("duplicate vertex id {v:?}")));
            }
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut edge_labels = Vec::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (i, (label, from, to, length)) in edges.into_iter().enumerate() {
            if !seen.insert(label.clone()) {
                return Err(StrataError::InvalidGraph(format!("duplicate edge id {label:?}")));
            }
            if from >= vertices.len() || to >= vertices.len() {
                return Err(StrataError::InvalidGraph(format!(
                    "edge {label:?} references a missing vertex"
                )));
            }
            if from == to {
                return Err(StrataError::InvalidGraph(format!("edge {label:?} is a self-loop")));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(StrataError::InvalidGraph(format!(
                    "edge {label:?} has length {length}, expected a positive finite value"
                )));
            }
            adjacency[from].push(EdgeId(i));
            adjacency[to].push(EdgeId(i));
            edge_labels.push(label);
            out.push(Edge {
                from: VertexId(from),
                to: VertexId(to),
                length,
            });
        }
        Ok(MetricGraph {
            vertex_labels: vertices,
            edge_labels,
            edges: out,
            adjacency,
        })
    }

    /// Graph with vertices `v0..` and edges `e0..` in the given order.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let vertices = (0..vertex_count).map(|i| format!("v{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b, l))| (format!("e{i}"), a, b, l))
            .collect();
        Self::new(vertices, edges)
    }

    /// `k` vertices and no edges.
    pub fn isolated(k: usize) -> Self {
        Self::from_edges(k, &[]).expect("isolated vertices form a valid graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn vertex_label(&self, v: VertexId) -> &str {
        &self.vertex_labels[v.0]
    }

    pub fn edge_label(&self, e: EdgeId) -> &str {
        &self.edge_labels[e.0]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.vertex_labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn edge_by_label(&self, label: &str) -> Option<EdgeId> {
        self.edge_labels.iter().position(|l| l == label).map(EdgeId)
    }

    /// Incident edges of `v`, sorted by id.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let edge = self.edge(e);
        if edge.from == v {
            edge.to
        } else {
            edge.from
        }
    }

    /// Heading that leaves `v` along `e`.
    pub fn heading_from(&self, e: EdgeId, v: VertexId) -> Heading {
        if self.edge(e).from == v {
            Heading::Forward
        } else {
            Heading::Backward
        }
    }

    /// Point at parameter `t` of `e`, snapping to an endpoint within [`TIE_TOL`].
    pub fn edge_point(&self, e: EdgeId, t: f64) -> GraphPoint {
        let edge = self.edge(e);
        if t <= TIE_TOL {
            GraphPoint::Vertex(edge.from)
        } else if t >= edge.length - TIE_TOL {
            GraphPoint::Vertex(edge.to)
        } else {
            GraphPoint::Edge { edge: e, t }
        }
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        match *p {
            GraphPoint::Vertex(v) if v.0 < self.vertex_count() => Ok(()),
            GraphPoint::Vertex(v) => Err(StrataError::InvalidPoint(format!(
                "vertex {} does not exist",
                v.0
            ))),
            GraphPoint::Edge { edge, t } => {
                if edge.0 >= self.edge_count() {
                    return Err(StrataError::InvalidPoint(format!(
                        "edge {} does not exist",
                        edge.0
                    )));
                }
                let len = self.edge(edge).length;
                if t.is_finite() && t > 0.0 && t < len {
                    Ok(())
                } else {
                    Err(StrataError::InvalidPoint(format!(
                        "edge parameter {t} is not strictly inside (0, {len})"
                    )))
                }
            }
        }
    }

    /// Whether two points coincide, comparing edge parameters up to [`TIE_TOL`].
    pub fn same_point(&self, a: &GraphPoint, b: &GraphPoint) -> bool {
        match (a, b) {
            (GraphPoint::Vertex(x), GraphPoint::Vertex(y)) => x == y,
            (GraphPoint::Edge { edge: e, t: s }, GraphPoint::Edge { edge: f, t }) => {
                e == f && (s - t).abs() <= TIE_TOL
            }
            _ => false,
        }
    }

    fn tree(&self, source: &GraphPoint, skip: Option<EdgeId>) -> Tree {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut preds: Vec<Vec<Pred>> = vec![Vec::new(); n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        match *source {
            GraphPoint::Vertex(v) => {
                dist[v.0] = 0.0;
                preds[v.0].push(Pred::Seed(None));
                heap.push(Queued(0.0, v.0));
            }
            GraphPoint::Edge { edge, t } => {
                let e = self.edge(edge);
                dist[e.from.0] = t;
                preds[e.from.0].push(Pred::Seed(Some(Leg {
                    edge,
                    heading: Heading::Backward,
                    start: t,
                    end: 0.0,
                })));
                dist[e.to.0] = e.length - t;
                preds[e.to.0].push(Pred::Seed(Some(Leg {
                    edge,
                    heading: Heading::Forward,
                    start: t,
                    end: e.length,
                })));
                heap.push(Queued(t, e.from.0));
                heap.push(Queued(e.length - t, e.to.0));
            }
        }
        while let Some(Queued(d, v)) = heap.pop() {
            if done[v] || d > dist[v] + TIE_TOL {
                continue;
            }
            done[v] = true;
            let d = dist[v];
            for &e in &self.adjacency[v] {
                if Some(e) == skip {
                    continue;
                }
                let w = self.other_end(e, VertexId(v)).0;
                let nd = d + self.edge(e).length;
                if nd < dist[w] - TIE_TOL {
                    dist[w] = nd;
                    preds[w].clear();
                    preds[w].push(Pred::Via {
                        edge: e,
                        from: VertexId(v),
                    });
                    heap.push(Queued(nd, w));
                } else if (nd - dist[w]).abs() <= TIE_TOL && !done[w] {
                    preds[w].push(Pred::Via {
                        edge: e,
                        from: VertexId(v),
                    });
                }
            }
        }
        Tree { dist, preds }
    }

    fn paths_to(&self, tree: &Tree, v: VertexId, cap: usize) -> Vec<Vec<Leg>> {
        let mut out = Vec::new();
        for pred in &tree.preds[v.0] {
            if out.len() >= cap {
                break;
            }
            match *pred {
                Pred::Seed(leg) => out.push(leg.into_iter().collect()),
                Pred::Via { edge, from } => {
                    let len = self.edge(edge).length;
                    let leg = if self.edge(edge).from == from {
                        Leg {
                            edge,
                            heading: Heading::Forward,
                            start: 0.0,
                            end: len,
                        }
                    } else {
                        Leg {
                            edge,
                            heading: Heading::Backward,
                            start: len,
                            end: 0.0,
                        }
                    };
                    for mut p in self.paths_to(tree, from, cap - out.len()) {
                        p.push(leg);
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    fn finish(&self, tree: &Tree, a: &GraphPoint, b: &GraphPoint) -> Geodesics {
        if self.same_point(a, b) {
            return Geodesics {
                distance: 0.0,
                paths: vec![PathDescriptor {
                    length: 0.0,
                    legs: Vec::new(),
                    multiple: false,
                }],
            };
        }
        // (length, vertex reached before the final leg, final leg)
        let mut options: Vec<(f64, Option<VertexId>, Option<Leg>)> = Vec::new();
        match *b {
            GraphPoint::Vertex(w) => options.push((tree.dist[w.0], Some(w), None)),
            GraphPoint::Edge { edge, t } => {
                let e = self.edge(edge);
                options.push((
                    tree.dist[e.from.0] + t,
                    Some(e.from),
                    Some(Leg {
                        edge,
                        heading: Heading::Forward,
                        start: 0.0,
                        end: t,
                    }),
                ));
                options.push((
                    tree.dist[e.to.0] + e.length - t,
                    Some(e.to),
                    Some(Leg {
                        edge,
                        heading: Heading::Backward,
                        start: e.length,
                        end: t,
                    }),
                ));
                if let GraphPoint::Edge { edge: ea, t: ta } = *a {
                    if ea == edge {
                        let heading = if t > ta {
                            Heading::Forward
                        } else {
                            Heading::Backward
                        };
                        options.push((
                            (t - ta).abs(),
                            None,
                            Some(Leg {
                                edge,
                                heading,
                                start: ta,
                                end: t,
                            }),
                        ));
                    }
                }
            }
        }
        let best = options.iter().map(|o| o.0).fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return Geodesics {
                distance: f64::INFINITY,
                paths: Vec::new(),
            };
        }
        let mut legs_list: Vec<Vec<Leg>> = Vec::new();
        for (len, via, last) in options {
            if (len - best).abs() > TIE_TOL {
                continue;
            }
            match via {
                Some(v) => {
                    for mut p in self.paths_to(tree, v, MAX_PATHS) {
                        p.extend(last);
                        legs_list.push(p);
                    }
                }
                None => legs_list.push(last.into_iter().collect()),
            }
        }
        // Backtracking paths (out and back along the same edge) are never
        // shortest between distinct points, but a seed leg followed by the
        // same edge can appear when the source sits on the target edge.
        legs_list.retain(|legs| {
            legs.windows(2)
                .all(|w| !(w[0].edge == w[1].edge && w[0].heading != w[1].heading))
        });
        legs_list.sort_by(|x, y| {
            let kx: Vec<(EdgeId, Heading)> = x.iter().map(|l| (l.edge, l.heading)).collect();
            let ky: Vec<(EdgeId, Heading)> = y.iter().map(|l| (l.edge, l.heading)).collect();
            kx.cmp(&ky)
        });
        legs_list.dedup_by(|x, y| {
            x.len() == y.len()
                && x.iter()
                    .zip(y.iter())
                    .all(|(l, m)| l.edge == m.edge && l.heading == m.heading)
        });
        legs_list.truncate(MAX_PATHS);
        let multiple = legs_list.len() > 1;
        Geodesics {
            distance: best,
            paths: legs_list
                .into_iter()
                .map(|legs| PathDescriptor {
                    length: best,
                    legs,
                    multiple,
                })
                .collect(),
        }
    }

    /// Shortest-path distance and every shortest path from `a` to `b`, ordered
    /// by their sequence of (edge, heading).
    pub fn geodesics(&self, a: &GraphPoint, b: &GraphPoint) -> Result<Geodesics> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.geodesics_unchecked(a, b))
    }

    pub(crate) fn geodesics_unchecked(&self, a: &GraphPoint, b: &GraphPoint) -> Geodesics {
        let tree = self.tree(a, None);
        self.finish(&tree, a, b)
    }

    pub fn distance(&self, a: &GraphPoint, b: &GraphPoint) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &GraphPoint, b: &GraphPoint) -> f64 {
        if self.same_point(a, b) {
            return 0.0;
        }
        let tree = self.tree(a, None);
        let mut best = match *b {
            GraphPoint::Vertex(w) => tree.dist[w.0],
            GraphPoint::Edge { edge, t } => {
                let e = self.edge(edge);
                (tree.dist[e.from.0] + t).min(tree.dist[e.to.0] + e.length - t)
            }
        };
        if let (GraphPoint::Edge { edge: ea, t: ta }, GraphPoint::Edge { edge, t }) = (*a, *b) {
            if ea == edge {
                best = best.min((t - ta).abs());
            }
        }
        best
    }

    /// Distance from `a` to every vertex.
    pub(crate) fn vertex_distances(&self, a: &GraphPoint) -> Vec<f64> {
        self.tree(a, None).dist
    }

    /// Distance truncated at π.
    pub fn angular_distance(&self, a: &GraphPoint, b: &GraphPoint) -> Result<f64> {
        Ok(self.distance(a, b)?.min(PI))
    }

    pub(crate) fn angular_unchecked(&self, a: &GraphPoint, b: &GraphPoint) -> f64 {
        self.distance_unchecked(a, b).min(PI)
    }

    /// Length and edges of the shortest cycle, if the graph has one.
    pub fn girth(&self) -> Option<Cat1Violation> {
        let mut best: Option<Cat1Violation> = None;
        for e in self.edge_ids() {
            let edge = self.edge(e);
            let tree = self.tree(&GraphPoint::Vertex(edge.from), Some(e));
            let d = tree.dist[edge.to.0];
            if !d.is_finite() {
                continue;
            }
            let total = d + edge.length;
            if best.as_ref().is_some_and(|b| b.length <= total + TIE_TOL) {
                continue;
            }
            let path = self
                .paths_to(&tree, edge.to, 1)
                .into_iter()
                .next()
                .unwrap_or_default();
            let mut edges: Vec<EdgeId> = path.iter().map(|l| l.edge).collect();
            edges.push(e);
            best = Some(Cat1Violation {
                length: total,
                edges,
            });
        }
        best
    }

    /// Checks that every cycle has length at least 2π (up to [`TIE_TOL`]).
    pub fn validate_cat1(&self) -> std::result::Result<(), Cat1Violation> {
        match self.girth() {
            Some(c) if c.length < 2.0 * PI - TIE_TOL => Err(c),
            _ => Ok(()),
        }
    }

    /// Smallest region containing `points` and every shortest path of length
    /// below π between two of its points.
    pub fn link_convex_closure(&self, points: &[GraphPoint]) -> Result<SubgraphRegion> {
        for p in points {
            self.check_point(p)?;
        }
        let mut region = SubgraphRegion::default();
        for p in points {
            region.add_point(self, p);
        }
        region.normalize(self);
        loop {
            let marks = region.breakpoints(self);
            let mut next = region.clone();
            for (i, a) in marks.iter().enumerate() {
                let tree = self.tree(a, None);
                for b in &marks[i + 1..] {
                    let g = self.finish(&tree, a, b);
                    if g.distance < PI - TIE_TOL {
                        for path in &g.paths {
                            next.add_path(path);
                        }
                    }
                }
            }
            next.normalize(self);
            if next.approx_eq(&region) {
                return Ok(next);
            }
            region = next;
        }
    }
}

/// A closed subset of a metric graph: closed parameter intervals per edge
/// plus a set of vertices.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SubgraphRegion {
    pub intervals: BTreeMap<EdgeId, Vec<(f64, f64)>>,
    pub vertices: BTreeSet<VertexId>,
}

impl SubgraphRegion {
    pub fn whole(graph: &MetricGraph) -> Self {
        let mut r = SubgraphRegion::default();
        for e in graph.edge_ids() {
            r.intervals.insert(e, vec![(0.0, graph.edge(e).length)]);
        }
        r.vertices.extend(graph.vertices());
        r
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.intervals.values().all(|v| v.is_empty())
    }

    pub fn add_point(&mut self, graph: &MetricGraph, p: &GraphPoint) {
        match *p {
            GraphPoint::Vertex(v) => {
                self.vertices.insert(v);
            }
            GraphPoint::Edge { edge, t } => self.add_interval(graph, edge, t, t),
        }
    }

    pub fn add_interval(&mut self, graph: &MetricGraph, e: EdgeId, a: f64, b: f64) {
        let len = graph.edge(e).length;
        let (lo, hi) = (a.min(b).clamp(0.0, len), a.max(b).clamp(0.0, len));
        self.intervals.entry(e).or_default().push((lo, hi));
    }

    fn add_path(&mut self, path: &PathDescriptor) {
        for leg in &path.legs {
            let (lo, hi) = (leg.start.min(leg.end), leg.start.max(leg.end));
            self.intervals.entry(leg.edge).or_default().push((lo, hi));
        }
    }

    /// Merges overlapping intervals, snaps near-boundary endpoints and adds
    /// the vertices touched by intervals.
    pub fn normalize(&mut self, graph: &MetricGraph) {
        for (&e, list) in self.intervals.iter_mut() {
            let edge = graph.edge(e);
            for iv in list.iter_mut() {
                if iv.0 <= TIE_TOL {
                    iv.0 = 0.0;
                }
                if iv.1 >= edge.length - TIE_TOL {
                    iv.1 = edge.length;
                }
            }
            list.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(list.len());
            for &(lo, hi) in list.iter() {
                match merged.last_mut() {
                    Some(last) if lo <= last.1 + TIE_TOL => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            if merged.first().is_some_and(|iv| iv.0 == 0.0) {
                self.vertices.insert(edge.from);
            }
            if merged.last().is_some_and(|iv| iv.1 == edge.length) {
                self.vertices.insert(edge.to);
            }
            // An interval collapsed onto an endpoint is the vertex itself.
            merged.retain(|iv| !(iv.1 - iv.0 <= TIE_TOL && (iv.0 == 0.0 || iv.1 == edge.length)));
            *list = merged;
        }
        self.intervals.retain(|_, v| !v.is_empty());
    }

    pub fn contains(&self, graph: &MetricGraph, p: &GraphPoint, tol: f64) -> bool {
        match *p {
            GraphPoint::Vertex(v) => self.vertices.contains(&v),
            GraphPoint::Edge { edge, t } => {
                let near_vertex = (t <= tol && self.vertices.contains(&graph.edge(edge).from))
                    || (t >= graph.edge(edge).length - tol
                        && self.vertices.contains(&graph.edge(edge).to));
                near_vertex
                    || self
                        .intervals
                        .get(&edge)
                        .is_some_and(|list| list.iter().any(|&(lo, hi)| t >= lo - tol && t <= hi + tol))
            }
        }
    }

    /// Vertices plus interval endpoints, as graph points.
    pub fn breakpoints(&self, graph: &MetricGraph) -> Vec<GraphPoint> {
        let mut out: Vec<GraphPoint> = self.vertices.iter().map(|&v| GraphPoint::Vertex(v)).collect();
        for (&e, list) in &self.intervals {
            for &(lo, hi) in list {
                for t in [lo, hi] {
                    let p = graph.edge_point(e, t);
                    if !out.iter().any(|q| graph.same_point(q, &p)) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Breakpoints plus interval midpoints: a finite sample meeting every
    /// piece of the region.
    pub fn representatives(&self, graph: &MetricGraph) -> Vec<GraphPoint> {
        let mut out = self.breakpoints(graph);
        for (&e, list) in &self.intervals {
            for &(lo, hi) in list {
                if hi - lo > TIE_TOL {
                    out.push(graph.edge_point(e, 0.5 * (lo + hi)));
                }
            }
        }
        out
    }

    pub fn intersect(&self, other: &SubgraphRegion) -> SubgraphRegion {
        let vertices = self.vertices.intersection(&other.vertices).copied().collect();
        let mut intervals = BTreeMap::new();
        for (e, xs) in &self.intervals {
            let Some(ys) = other.intervals.get(e) else {
                continue;
            };
            let mut out = Vec::new();
            for &(a, b) in xs {
                for &(c, d) in ys {
                    let (lo, hi) = (a.max(c), b.min(d));
                    if lo <= hi + TIE_TOL {
                        out.push((lo, hi.max(lo)));
                    }
                }
            }
            if !out.is_empty() {
                intervals.insert(*e, out);
            }
        }
        SubgraphRegion {
            intervals,
            vertices,
        }
    }

    fn approx_eq(&self, other: &SubgraphRegion) -> bool {
        self.vertices == other.vertices
            && self.intervals.len() == other.intervals.len()
            && self.intervals.iter().zip(other.intervals.iter()).all(|((e, x), (f, y))| {
                e == f
                    && x.len() == y.len()
                    && x.iter()
                        .zip(y.iter())
                        .all(|(p, q)| (p.0 - q.0).abs() <= TIE_TOL && (p.1 - q.1).abs() <= TIE_TOL)
            })
    }

    /// Total edge length covered by the region.
    pub fn measure(&self) -> f64 {
        self.intervals
            .values()
            .flat_map(|v| v.iter())
            .map(|(lo, hi)| hi - lo)
            .sum()
    }
}
