//! Named example spaces.

use std::f64::consts::PI;

use crate::cone_space::ConeSpace;
use crate::error::{Result, StrataError};
use crate::metric_graph::{EdgeId, GraphPoint, MetricGraph};

#[derive(Clone, Debug, PartialEq)]
pub enum GallerySpec {
    Spider { legs: usize },
    OpenBook { pages: usize, spine_dim: usize },
    Kale { circumference: f64 },
    Sector { angle: f64 },
    Euclidean { dim: usize },
    Theta { edge_length: f64 },
    ConeOver { spine_dim: usize, link: MetricGraph },
}

pub fn build(spec: &GallerySpec) -> Result<ConeSpace> {
    match spec {
        GallerySpec::Spider { legs } => Ok(spider(*legs)),
        GallerySpec::OpenBook { pages, spine_dim } => Ok(open_book(*pages, *spine_dim)),
        GallerySpec::Kale { circumference } => kale(*circumference),
        GallerySpec::Sector { angle } => sector(*angle),
        GallerySpec::Euclidean { dim } => Ok(euclidean(*dim)),
        GallerySpec::Theta { edge_length } => theta(*edge_length),
        GallerySpec::ConeOver { spine_dim, link } => ConeSpace::new(*spine_dim, link.clone()),
    }
}

fn rays(k: usize) -> MetricGraph {
    MetricGraph::new((1..=k).map(|i| format!("ray{i}")).collect(), Vec::new())
        .expect("distinct labels")
}

/// Cone over `k` points: `k` half-lines glued at the origin.
pub fn spider(k: usize) -> ConeSpace {
    ConeSpace::unchecked(0, rays(k))
}

/// `ℝ^spine_dim` times a spider with `k` legs.
pub fn open_book(k: usize, spine_dim: usize) -> ConeSpace {
    ConeSpace::unchecked(spine_dim, rays(k))
}

/// Cone over a circle of the given circumference, as a two-edge cycle with
/// vertices at arc positions c/4 and 3c/4.
pub fn kale(circumference: f64) -> Result<ConeSpace> {
    if !(circumference.is_finite() && circumference > 0.0) {
        return Err(StrataError::InvalidGraph(format!(
            "kale circumference {circumference} must be positive"
        )));
    }
    let half = circumference / 2.0;
    let g = MetricGraph::from_edges(2, &[(0, 1, half), (1, 0, half)])?;
    ConeSpace::new(0, g)
}

/// Link point of a kale at arc position `pos` (taken modulo the circumference).
/// Increasing arc position is the forward heading of both edges.
pub fn kale_point(space: &ConeSpace, pos: f64) -> GraphPoint {
    let g = space.link();
    let c = g.edge(EdgeId(0)).length + g.edge(EdgeId(1)).length;
    let p = pos.rem_euclid(c);
    if (c / 4.0..=3.0 * c / 4.0).contains(&p) {
        g.edge_point(EdgeId(0), p - c / 4.0)
    } else {
        g.edge_point(EdgeId(1), (p - 3.0 * c / 4.0).rem_euclid(c))
    }
}

/// Cone over a single edge: a planar sector of the given opening angle.
pub fn sector(angle: f64) -> Result<ConeSpace> {
    let g = MetricGraph::from_edges(2, &[(0, 1, angle)])?;
    ConeSpace::new(0, g)
}

pub fn euclidean(dim: usize) -> ConeSpace {
    ConeSpace::unchecked(dim, MetricGraph::empty())
}

/// Cone over a theta graph: vertices `a`, `b` joined by three edges of equal
/// length. Requires `edge_length ≥ π`.
pub fn theta(edge_length: f64) -> Result<ConeSpace> {
    let g = MetricGraph::new(
        vec!["a".into(), "b".into()],
        (0..3).map(|i| (format!("e{i}"), 0, 1, edge_length)).collect(),
    )?;
    ConeSpace::new(0, g)
}

/// Default theta edge length giving a two-stage collapse fixture.
pub const THETA_WIDE: f64 = 1.5 * PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let s = spider(3);
        assert_eq!((s.spine_dim(), s.link().vertex_count()), (0, 3));
        let b = open_book(3, 1);
        assert_eq!((b.spine_dim(), b.link().vertex_count(), b.dim()), (1, 3, 2));
        assert_eq!(euclidean(2).dim(), 2);
        assert_eq!(kale(7.0).unwrap().dim(), 2);
    }

    #[test]
    fn short_cycles_are_rejected() {
        assert!(matches!(kale(5.0), Err(StrataError::NotCat1(_))));
        assert!(kale(2.0 * PI).is_ok());
        assert!(theta(3.0).is_err());
        assert!(theta(PI).is_ok());
    }

    #[test]
    fn kale_positions_wrap() {
        let k = kale(8.0).unwrap();
        assert_eq!(kale_point(&k, 2.0), GraphPoint::Vertex(crate::metric_graph::VertexId(0)));
        assert_eq!(kale_point(&k, 6.0), GraphPoint::Vertex(crate::metric_graph::VertexId(1)));
        assert_eq!(kale_point(&k, 0.0), kale_point(&k, 8.0));
        let d = k
            .link()
            .distance(&kale_point(&k, 7.5), &kale_point(&k, 0.5))
            .unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }
}
