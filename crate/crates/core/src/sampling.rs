//! Random points and vectors for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone_space::{ConeSpace, Point};
use crate::metric_graph::{GraphPoint, MetricGraph};

/// Generator for chunk `chunk` of suite `suite` under a run seed. Chunks are
/// independent streams, so results do not depend on how chunks are scheduled.
pub fn chunk_rng(seed: u64, suite: &str, chunk: u64) -> ChaCha8Rng {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    rng.set_stream(chunk);
    rng
}

/// Uniform point of the link: a vertex with probability ¼ (when there are
/// vertices), otherwise uniform by length over the edges.
pub fn random_link_point<R: Rng + ?Sized>(link: &MetricGraph, rng: &mut R) -> Option<GraphPoint> {
    let n = link.vertex_count();
    if n == 0 {
        return None;
    }
    let total: f64 = link.edge_ids().map(|e| link.edge(e).length).sum();
    if total == 0.0 || rng.random_bool(0.25) {
        return Some(GraphPoint::Vertex(crate::VertexId(rng.random_range(0..n))));
    }
    let mut x = rng.random_range(0.0..total);
    for e in link.edge_ids() {
        let len = link.edge(e).length;
        if x < len {
            return Some(link.edge_point(e, x));
        }
        x -= len;
    }
    let last = link.edge_ids().last().expect("positive total length");
    Some(link.edge_point(last, link.edge(last).length))
}

/// Random vector with spine coordinates in `[-scale, scale]` and, when the
/// link is nonempty, usually a cone part of radius in `[0, scale]`.
pub fn random_vector<R: Rng + ?Sized>(space: &ConeSpace, rng: &mut R, scale: f64) -> Point {
    let u = (0..space.spine_dim()).map(|_| rng.random_range(-scale..=scale)).collect();
    match random_link_point(space.link(), rng) {
        Some(g) if rng.random_bool(0.9) => Point::new(u, g, rng.random_range(0.0..=scale)),
        _ => Point::spine(u),
    }
}

pub fn random_unit<R: Rng + ?Sized>(space: &ConeSpace, rng: &mut R) -> Point {
    loop {
        if let Some(p) = random_vector(space, rng, 1.0).normalized() {
            return p;
        }
    }
}

/// Point within roughly `eps` of `v`.
pub fn nearby<R: Rng + ?Sized>(space: &ConeSpace, v: &Point, eps: f64, rng: &mut R) -> Point {
    let link = space.link();
    let u = v.u.iter().map(|x| x + rng.random_range(-eps..=eps)).collect();
    let Some(c) = &v.cone else {
        return match random_link_point(link, rng) {
            Some(g) if rng.random_bool(0.5) => Point::new(u, g, rng.random_range(0.0..=eps)),
            _ => Point::spine(u),
        };
    };
    let dir = match c.dir {
        GraphPoint::Vertex(w) => match link.incident(w) {
            [] => c.dir,
            ends => {
                let e = ends[rng.random_range(0..ends.len())];
                let len = link.edge(e).length;
                let s = rng.random_range(0.0..=eps.min(len));
                if link.edge(e).from == w {
                    link.edge_point(e, s)
                } else {
                    link.edge_point(e, len - s)
                }
            }
        },
        GraphPoint::Edge { edge, t } => {
            let len = link.edge(edge).length;
            link.edge_point(edge, (t + rng.random_range(-eps..=eps)).clamp(0.0, len))
        }
    };
    let r = (c.r + rng.random_range(-eps..=eps)).max(0.0);
    Point::new(u, dir, r)
}
