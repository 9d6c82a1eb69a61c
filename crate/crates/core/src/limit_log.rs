//! Limit log maps along a unit direction and the limit tangent cones they
//! land in.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cone_space::{ConePart, ConeSpace, Frame, Point};
use crate::frechet::{Atom, Measure};
use crate::metric_graph::{GraphPoint, VertexId};

/// Limit log along `z`. When `z` has no cone component the stage is the
/// identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitStage {
    pub source: ConeSpace,
    pub z: Point,
    pub target: ConeSpace,
    /// `None` for the identity stage.
    pub frame: Option<Frame>,
    /// Atoms whose image depended on the cut-locus tie-break.
    pub ties: Vec<usize>,
}

/// Result of transporting one vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Transported {
    pub image: Point,
    /// Truncated link angle between `z` and the vector (0 for spine vectors).
    pub angle: f64,
    pub tie: bool,
}

pub fn limit_tangent_cone(space: &ConeSpace, z: &Point) -> ConeSpace {
    LimitStage::new(space, z).target
}

impl LimitStage {
    pub fn new(space: &ConeSpace, z: &Point) -> LimitStage {
        let (target, frame) = if z.cone.is_some() {
            let tc = space.tangent_cone(z);
            (tc.space, Some(tc.frame))
        } else {
            (space.clone(), None)
        };
        LimitStage {
            source: space.clone(),
            z: z.clone(),
            target,
            frame,
            ties: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.frame.is_none()
    }

    pub fn apply(&self, v: &Point) -> Point {
        self.apply_traced(v).image
    }

    pub fn apply_traced(&self, v: &Point) -> Transported {
        let (Some(frame), Some(cz)) = (&self.frame, &self.z.cone) else {
            return Transported {
                image: v.clone(),
                angle: 0.0,
                tie: false,
            };
        };
        let mut u = v.u.clone();
        let Some(cv) = &v.cone else {
            u.push(0.0);
            if matches!(frame, Frame::Sector { .. }) {
                u.push(0.0);
            }
            return Transported {
                image: Point { u, cone: None },
                angle: 0.0,
                tie: false,
            };
        };
        let link = self.source.link();
        let geo = link.geodesics_unchecked(&cz.dir, &cv.dir);
        let theta = geo.distance.min(PI);
        let transverse = theta > 0.0 && theta < PI;
        let mut departures: Vec<_> = if transverse {
            geo.paths.iter().filter_map(|p| p.departure()).collect()
        } else {
            Vec::new()
        };
        departures.dedup();
        let tie = departures.len() > 1;
        let departure = departures.first().copied();
        let (radial, normal) = if theta >= PI {
            (-cv.r, 0.0)
        } else {
            (cv.r * theta.cos(), if transverse { cv.r * theta.sin() } else { 0.0 })
        };
        u.push(radial);
        let image = match frame {
            Frame::Sector { .. } => {
                u.push(departure.map_or(0.0, |(_, h)| h.sign() * normal));
                Point { u, cone: None }
            }
            Frame::Ray { ends, .. } => {
                let cone = departure.filter(|_| normal > 0.0).map(|(edge, _)| {
                    let idx = ends
                        .iter()
                        .position(|&e| e == edge)
                        .expect("paths leave a vertex along an incident edge");
                    ConePart {
                        dir: GraphPoint::Vertex(VertexId(idx)),
                        r: normal,
                    }
                });
                Point { u, cone }
            }
            Frame::Apex => unreachable!("cone directions lie off the spine"),
        };
        Transported {
            image,
            angle: theta,
            tie,
        }
    }

    /// Atomwise image of a measure and the atoms that hit a tie.
    pub fn pushforward(&self, measure: &Measure) -> (Measure, Vec<usize>) {
        let mut ties = Vec::new();
        let atoms = measure
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let t = self.apply_traced(&a.point);
                if t.tie {
                    ties.push(i);
                }
                Atom::new(t.image, a.weight)
            })
            .collect();
        let m = Measure::new(atoms).expect("weights are preserved");
        (m, ties)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::metric_graph::EdgeId;

    fn ray(i: usize, r: f64) -> Point {
        Point::new(vec![], GraphPoint::Vertex(VertexId(i)), r)
    }

    #[test]
    fn class_closure() {
        let x = gallery::spider(3);
        let t = limit_tangent_cone(&x, &ray(0, 1.0));
        assert_eq!((t.spine_dim(), t.link().vertex_count()), (1, 0));
        let k = gallery::kale(7.0).unwrap();
        let t = limit_tangent_cone(&k, &Point::new(vec![], gallery::kale_point(&k, 0.0), 1.0));
        assert_eq!((t.spine_dim(), t.link().vertex_count()), (2, 0));
        let th = gallery::theta(PI).unwrap();
        let t = limit_tangent_cone(&th, &ray(0, 1.0));
        assert_eq!((t.spine_dim(), t.link().vertex_count(), t.link().edge_count()), (1, 3, 0));
        let e = gallery::euclidean(2);
        assert_eq!(limit_tangent_cone(&e, &Point::spine(vec![0.0, 1.0])), e);
    }

    #[test]
    fn spider_examples() {
        let x = gallery::spider(3);
        let st = LimitStage::new(&x, &ray(0, 1.0));
        assert_eq!(st.apply(&ray(0, 1.0)), Point::spine(vec![1.0]));
        assert_eq!(st.apply(&ray(1, 1.0)), Point::spine(vec![-1.0]));
        assert_eq!(st.apply(&x.apex()), Point::spine(vec![0.0]));
        let m = Measure::uniform(vec![ray(0, 1.0), ray(1, 1.0)]).unwrap();
        let (img, ties) = st.pushforward(&m);
        assert!(ties.is_empty());
        assert_eq!(img.atoms()[0].point, Point::spine(vec![1.0]));
        assert_eq!(img.atoms()[1].point, Point::spine(vec![-1.0]));
        assert_eq!(img.atoms()[1].weight, 0.5);
    }

    #[test]
    fn kale_development() {
        let x = gallery::kale(7.0).unwrap();
        let st = LimitStage::new(&x, &Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0));
        let v = st.apply(&Point::new(vec![], gallery::kale_point(&x, 1.0), 2.0));
        assert!((v.u[0] - 2.0 * 1f64.cos()).abs() < 1e-14);
        assert!((v.u[1] - 2.0 * 1f64.sin()).abs() < 1e-14);
        let w = st.apply(&Point::new(vec![], gallery::kale_point(&x, 6.0), 1.0));
        assert!((w.u[1] + 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn theta_vertex_stage() {
        let x = gallery::theta(gallery::THETA_WIDE).unwrap();
        let link = x.link();
        let st = LimitStage::new(&x, &ray(0, 1.0));
        let v = st.apply(&Point::new(vec![], link.edge_point(EdgeId(2), 0.5), 3.0));
        assert!((v.u[0] - 3.0 * 0.5f64.cos()).abs() < 1e-14);
        let c = v.cone.unwrap();
        assert_eq!(c.dir, GraphPoint::Vertex(VertexId(2)));
        assert!((c.r - 3.0 * 0.5f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn far_side_goes_to_negative_axis() {
        let x = gallery::kale(2.0 * PI + 0.5).unwrap();
        let st = LimitStage::new(&x, &Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0));
        let t = st.apply_traced(&Point::new(vec![], gallery::kale_point(&x, PI + 0.25), 1.0));
        assert!(!t.tie);
        assert_eq!(t.angle, PI);
        assert_eq!(t.image, Point::spine(vec![-1.0, 0.0]));
    }

    #[test]
    fn spine_direction_is_identity() {
        let x = gallery::open_book(3, 1);
        let st = LimitStage::new(&x, &Point::spine(vec![1.0]));
        assert!(st.is_identity());
        let v = Point::new(vec![0.3], GraphPoint::Vertex(VertexId(2)), 1.0);
        assert_eq!(st.apply(&v), v);
    }
}
