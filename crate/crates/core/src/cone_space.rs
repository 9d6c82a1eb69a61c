//! Spaces of the form ℝˢ × Cone(G): points, strata, the conical metric,
//! geodesics, log and small-step exponential maps, and tangent cones.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, StrataError};
use crate::metric_graph::{EdgeId, GraphPoint, Heading, MetricGraph, VertexId, TIE_TOL};

/// Cone coordinate of a point: a link direction and a positive radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePart {
    pub dir: GraphPoint,
    pub r: f64,
}

/// A point `(u, g, r)`. Points with no cone part lie on the spine.
///
/// At the apex of a cone the same type doubles as a tangent vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub u: Vec<f64>,
    pub cone: Option<ConePart>,
}

pub type TangentVector = Point;

impl Point {
    pub fn apex(spine_dim: usize) -> Self {
        Point {
            u: vec![0.0; spine_dim],
            cone: None,
        }
    }

    pub fn spine(u: Vec<f64>) -> Self {
        Point { u, cone: None }
    }

    /// Point with cone part `(dir, r)`; a zero radius yields a spine point.
    pub fn new(u: Vec<f64>, dir: GraphPoint, r: f64) -> Self {
        let cone = (r != 0.0).then_some(ConePart { dir, r });
        Point { u, cone }
    }

    pub fn radius(&self) -> f64 {
        self.cone.as_ref().map_or(0.0, |c| c.r)
    }

    pub fn dir(&self) -> Option<GraphPoint> {
        self.cone.as_ref().map(|c| c.dir)
    }

    pub fn norm(&self) -> f64 {
        let r = self.radius();
        (self.u.iter().map(|x| x * x).sum::<f64>() + r * r).sqrt()
    }

    /// Scales by `t ≥ 0`.
    pub fn scaled(&self, t: f64) -> Point {
        debug_assert!(t >= 0.0);
        Point {
            u: self.u.iter().map(|x| t * x).collect(),
            cone: self
                .cone
                .as_ref()
                .filter(|_| t > 0.0)
                .map(|c| ConePart { dir: c.dir, r: t * c.r }),
        }
    }

    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stratum {
    Spine,
    Ray(VertexId),
    Sector(EdgeId),
}

impl Stratum {
    /// 0 for the spine, 1 for rays, 2 for sectors.
    pub fn rank(self) -> usize {
        match self {
            Stratum::Spine => 0,
            Stratum::Ray(_) => 1,
            Stratum::Sector(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StratumId {
    pub stratum: Stratum,
    pub dim: usize,
    pub codim: usize,
}

/// How coordinates of a tangent cone relate to the space it was taken in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Frame {
    /// Tangent cone at a spine point: the space itself.
    Apex,
    /// At a point of `Ray(vertex)`: the spine gains a radial axis and link
    /// vertex `i` is the direction leaving `vertex` along `ends[i]`.
    Ray { vertex: VertexId, ends: Vec<EdgeId> },
    /// At a point of `Sector(edge)`: axes are spine, radial, then angular
    /// with positive sign along `Heading::Forward`.
    Sector { edge: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentCone {
    pub space: ConeSpace,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSpace {
    spine_dim: usize,
    link: MetricGraph,
}

/// Planar development of the cone factor between two cone parts: the
/// first sits at angle 0, the second at angle `theta` (π when the geodesic
/// runs through the apex).
struct Development<'a> {
    a: &'a ConePart,
    b: &'a ConePart,
    theta: f64,
    path: Option<crate::metric_graph::PathDescriptor>,
}

impl ConeSpace {
    /// Builds the space, rejecting links that have a cycle shorter than 2π.
    pub fn new(spine_dim: usize, link: MetricGraph) -> Result<Self> {
        link.validate_cat1().map_err(StrataError::NotCat1)?;
        Ok(ConeSpace { spine_dim, link })
    }

    /// Builds the space without the CAT(1) check. Geodesic uniqueness is
    /// then not guaranteed; used to construct deliberate ties.
    pub fn unchecked(spine_dim: usize, link: MetricGraph) -> Self {
        ConeSpace { spine_dim, link }
    }

    pub fn spine_dim(&self) -> usize {
        self.spine_dim
    }

    pub fn link(&self) -> &MetricGraph {
        &self.link
    }

    /// Dimension of the top stratum.
    pub fn dim(&self) -> usize {
        self.spine_dim
            + if self.link.edge_count() > 0 {
                2
            } else if self.link.vertex_count() > 0 {
                1
            } else {
                0
            }
    }

    pub fn is_euclidean(&self) -> bool {
        self.link.vertex_count() == 0
    }

    pub fn apex(&self) -> Point {
        Point::apex(self.spine_dim)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.u.len() != self.spine_dim {
            return Err(StrataError::DimensionMismatch {
                expected: self.spine_dim,
                got: p.u.len(),
            });
        }
        if p.u.iter().any(|x| !x.is_finite()) {
            return Err(StrataError::InvalidPoint("non-finite spine coordinate".into()));
        }
        if let Some(c) = &p.cone {
            if !(c.r.is_finite() && c.r > 0.0) {
                return Err(StrataError::InvalidPoint(format!(
                    "cone radius {} must be positive and finite",
                    c.r
                )));
            }
            self.link.check_point(&c.dir)?;
        }
        Ok(())
    }

    pub fn stratum_of(&self, p: &Point) -> StratumId {
        let s = self.spine_dim;
        match p.dir() {
            None => StratumId {
                stratum: Stratum::Spine,
                dim: s,
                codim: self.dim() - s,
            },
            Some(GraphPoint::Vertex(v)) => StratumId {
                stratum: Stratum::Ray(v),
                dim: s + 1,
                codim: usize::from(self.link.degree(v) > 0),
            },
            Some(GraphPoint::Edge { edge, .. }) => StratumId {
                stratum: Stratum::Sector(edge),
                dim: s + 2,
                codim: 0,
            },
        }
    }

    pub fn codim(&self, p: &Point) -> usize {
        self.stratum_of(p).codim
    }

    /// Link angle between two directions, truncated at π.
    pub fn link_angle(&self, a: &GraphPoint, b: &GraphPoint) -> f64 {
        self.link.angular_unchecked(a, b)
    }

    /// Conical metric. Both points must be valid (see [`Self::check_point`]).
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        let du: f64 = p.u.iter().zip(&q.u).map(|(a, b)| (a - b) * (a - b)).sum();
        let cone = match (&p.cone, &q.cone) {
            (None, None) => 0.0,
            (Some(c), None) | (None, Some(c)) => c.r * c.r,
            (Some(a), Some(b)) => {
                let th = self.link_angle(&a.dir, &b.dir);
                let dr = a.r - b.r;
                dr * dr + 4.0 * a.r * b.r * (0.5 * th).sin().powi(2)
            }
        };
        (du + cone).max(0.0).sqrt()
    }

    /// Inner product of two vectors of this space viewed as a tangent cone at
    /// its apex.
    pub fn inner(&self, v: &Point, w: &Point) -> f64 {
        let uu: f64 = v.u.iter().zip(&w.u).map(|(a, b)| a * b).sum();
        match (&v.cone, &w.cone) {
            (Some(a), Some(b)) => uu + a.r * b.r * self.link_angle(&a.dir, &b.dir).cos(),
            _ => uu,
        }
    }

    /// Angle between two vectors at the apex; zero when either vanishes.
    pub fn angle(&self, v: &Point, w: &Point) -> f64 {
        let (nv, nw) = (v.norm(), w.norm());
        if nv == 0.0 || nw == 0.0 {
            return 0.0;
        }
        let cos = (self.inner(v, w) / (nv * nw)).clamp(-1.0, 1.0);
        if cos < 0.5 {
            return cos.acos();
        }
        // chord between the unit vectors; accurate for small angles
        let chord = self.distance(&v.scaled(1.0 / nv), &w.scaled(1.0 / nw));
        2.0 * (0.5 * chord).min(1.0).asin()
    }

    /// Tangent cone of a point in the given stratum.
    pub fn local_model(&self, stratum: Stratum) -> TangentCone {
        match stratum {
            Stratum::Spine => TangentCone {
                space: self.clone(),
                frame: Frame::Apex,
            },
            Stratum::Ray(v) => {
                let ends = self.link.incident(v).to_vec();
                let labels = ends.iter().map(|&e| self.link.edge_label(e).to_string()).collect();
                let link = MetricGraph::new(labels, Vec::new())
                    .expect("edge labels are unique, so they form valid vertex labels");
                TangentCone {
                    space: ConeSpace::unchecked(self.spine_dim + 1, link),
                    frame: Frame::Ray { vertex: v, ends },
                }
            }
            Stratum::Sector(edge) => TangentCone {
                space: ConeSpace::unchecked(self.spine_dim + 2, MetricGraph::empty()),
                frame: Frame::Sector { edge },
            },
        }
    }

    pub fn tangent_cone(&self, p: &Point) -> TangentCone {
        self.local_model(self.stratum_of(p).stratum)
    }

    fn develop<'a>(&self, a: &'a ConePart, b: &'a ConePart) -> Result<Development<'a>> {
        let g = self.link.geodesics_unchecked(&a.dir, &b.dir);
        if g.distance >= PI {
            return Ok(Development {
                a,
                b,
                theta: PI,
                path: None,
            });
        }
        if g.paths.len() > 1 {
            return Err(StrataError::CutLocus);
        }
        Ok(Development {
            a,
            b,
            theta: g.distance,
            path: g.paths.into_iter().next(),
        })
    }

    /// Log map at `p`, expressed in the coordinates of `tangent_cone(p)`.
    pub fn log(&self, p: &Point, x: &Point) -> Result<Point> {
        self.check_point(p)?;
        self.check_point(x)?;
        let mut u: Vec<f64> = x.u.iter().zip(&p.u).map(|(a, b)| a - b).collect();
        let Some(cp) = &p.cone else {
            return Ok(Point {
                u,
                cone: x.cone.clone(),
            });
        };
        // (radial, transverse magnitude, departure)
        let (radial, trans, departure) = match &x.cone {
            None => (-cp.r, 0.0, None),
            Some(cx) => {
                let dev = self.develop(cp, cx)?;
                if dev.theta >= PI {
                    (-cx.r - cp.r, 0.0, None)
                } else if dev.theta == 0.0 {
                    (cx.r - cp.r, 0.0, None)
                } else {
                    let dep = dev.path.as_ref().and_then(|path| path.departure());
                    (cx.r * dev.theta.cos() - cp.r, cx.r * dev.theta.sin(), dep)
                }
            }
        };
        u.push(radial);
        match self.stratum_of(p).stratum {
            Stratum::Spine => unreachable!("points with a cone part are not on the spine"),
            Stratum::Ray(v) => {
                let cone = departure.map(|(edge, _)| {
                    let idx = self
                        .link
                        .incident(v)
                        .iter()
                        .position(|&e| e == edge)
                        .expect("departure edge is incident to the source vertex");
                    ConePart {
                        dir: GraphPoint::Vertex(VertexId(idx)),
                        r: trans,
                    }
                });
                Ok(Point { u, cone })
            }
            Stratum::Sector(_) => {
                u.push(departure.map_or(0.0, |(_, h)| h.sign() * trans));
                Ok(Point { u, cone: None })
            }
        }
    }

    /// Point at fraction `t` of the geodesic from `p` to `q`.
    pub fn geodesic_point(&self, p: &Point, q: &Point, t: f64) -> Result<Point> {
        self.check_point(p)?;
        self.check_point(q)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(StrataError::InvalidPoint(format!("geodesic parameter {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(p.clone());
        }
        if t == 1.0 {
            return Ok(q.clone());
        }
        let u = p.u.iter().zip(&q.u).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        let cone = match (&p.cone, &q.cone) {
            (None, None) => None,
            (None, Some(c)) => Some(ConePart { dir: c.dir, r: t * c.r }),
            (Some(c), None) => Some(ConePart {
                dir: c.dir,
                r: (1.0 - t) * c.r,
            }),
            (Some(a), Some(b)) => {
                let dev = self.develop(a, b).map_err(|_| StrataError::AmbiguousGeodesic)?;
                self.develop_point(&dev, t)
            }
        };
        Ok(Point { u, cone })
    }

    fn develop_point(&self, dev: &Development<'_>, t: f64) -> Option<ConePart> {
        let (a, b) = (dev.a, dev.b);
        let (c, s) = if dev.theta >= PI { (-1.0, 0.0) } else { (dev.theta.cos(), dev.theta.sin()) };
        let mx = (1.0 - t) * a.r + t * b.r * c;
        let my = t * b.r * s;
        let rho = mx.hypot(my);
        if rho <= 1e-15 * a.r.max(b.r) {
            return None;
        }
        let dir = match &dev.path {
            _ if dev.theta == 0.0 => a.dir,
            None => {
                if mx > 0.0 {
                    a.dir
                } else {
                    b.dir
                }
            }
            Some(path) => path.point_at(&self.link, my.atan2(mx).clamp(0.0, dev.theta)),
        };
        Some(ConePart { dir, r: rho })
    }

    pub fn midpoint(&self, p: &Point, q: &Point) -> Result<Point> {
        self.geodesic_point(p, q, 0.5)
    }

    /// Moves along the link from `start`, leaving along `edge` in direction
    /// `heading`, for arclength `len`. Only degree-2 vertices may be crossed.
    fn walk(&self, start: GraphPoint, edge: EdgeId, heading: Heading, len: f64) -> Result<GraphPoint> {
        let (mut e, mut h) = (edge, heading);
        let mut pos = match start {
            GraphPoint::Vertex(_) => match h {
                Heading::Forward => 0.0,
                Heading::Backward => self.link.edge(e).length,
            },
            GraphPoint::Edge { t, .. } => t,
        };
        let mut left = len;
        loop {
            let el = self.link.edge(e).length;
            let room = match h {
                Heading::Forward => el - pos,
                Heading::Backward => pos,
            };
            if left < room - TIE_TOL {
                return Ok(self.link.edge_point(e, pos + h.sign() * left));
            }
            left -= room;
            let v = match h {
                Heading::Forward => self.link.edge(e).to,
                Heading::Backward => self.link.edge(e).from,
            };
            if left <= TIE_TOL {
                return Ok(GraphPoint::Vertex(v));
            }
            let inc = self.link.incident(v);
            if inc.len() != 2 {
                return Err(StrataError::StepTooLarge);
            }
            e = if inc[0] == e { inc[1] } else { inc[0] };
            h = self.link.heading_from(e, v);
            pos = match h {
                Heading::Forward => 0.0,
                Heading::Backward => el_of(&self.link, e),
            };
        }
    }

    /// Small-step exponential: the point at distance `t‖v‖` along the
    /// geodesic leaving `p` in direction `v` (coordinates of `tangent_cone(p)`).
    pub fn shoot(&self, p: &Point, v: &Point, t: f64) -> Result<Point> {
        self.check_point(p)?;
        let tc = self.tangent_cone(p);
        tc.space.check_point(v)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(StrataError::InvalidPoint(format!("step {t} must be nonnegative")));
        }
        if t == 0.0 {
            return Ok(p.clone());
        }
        let w = v.scaled(t);
        let s = self.spine_dim;
        let u: Vec<f64> = p.u.iter().zip(&w.u).map(|(a, b)| a + b).collect();
        let Some(cp) = &p.cone else {
            return Ok(Point { u, cone: w.cone });
        };
        let radial = w.u[s];
        let (b, out) = match &tc.frame {
            Frame::Apex => unreachable!("points with a cone part are not on the spine"),
            Frame::Ray { vertex, ends } => match &w.cone {
                None => (0.0, None),
                Some(c) => {
                    let GraphPoint::Vertex(VertexId(i)) = c.dir else {
                        unreachable!("ray tangent cones have edgeless links")
                    };
                    let e = ends[i];
                    (c.r, Some((e, self.link.heading_from(e, *vertex))))
                }
            },
            Frame::Sector { edge } => {
                let b = w.u[s + 1];
                let h = if b > 0.0 { Heading::Forward } else { Heading::Backward };
                (b.abs(), (b != 0.0).then_some((*edge, h)))
            }
        };
        let x = cp.r + radial;
        let scale = cp.r.max(w.norm());
        match out {
            None => {
                if x > 1e-15 * scale {
                    Ok(Point {
                        u,
                        cone: Some(ConePart { dir: cp.dir, r: x }),
                    })
                } else if x >= -1e-15 * scale {
                    Ok(Point { u, cone: None })
                } else {
                    Err(StrataError::StepTooLarge)
                }
            }
            Some((edge, heading)) => {
                let rho = x.hypot(b);
                let phi = b.atan2(x);
                let dir = self.walk(cp.dir, edge, heading, phi)?;
                if (self.link.distance_unchecked(&cp.dir, &dir) - phi).abs() > 1e-9 {
                    return Err(StrataError::StepTooLarge);
                }
                Ok(Point {
                    u,
                    cone: Some(ConePart { dir, r: rho }),
                })
            }
        }
    }
}

fn el_of(g: &MetricGraph, e: EdgeId) -> f64 {
    g.edge(e).length
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn spider_antipodal_distance() {
        let x = gallery::spider(3);
        let p = Point::new(vec![], GraphPoint::Vertex(VertexId(0)), 1.0);
        let q = Point::new(vec![], GraphPoint::Vertex(VertexId(1)), 1.0);
        assert_eq!(x.distance(&p, &q), 2.0);
        assert_eq!(x.inner(&p, &q), -1.0);
        assert_eq!(x.angle(&p, &q), PI);
        let m = x.midpoint(&p, &q).unwrap();
        assert!(m.cone.is_none());
    }

    #[test]
    fn kale_distance_and_log() {
        let x = gallery::kale(7.0).unwrap();
        let p = Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0);
        let q = Point::new(vec![], gallery::kale_point(&x, 1.0), 1.0);
        let d = x.distance(&p, &q);
        assert!(close(d, (2.0 - 2.0 * 1f64.cos()).sqrt(), 1e-14));
        assert!(close(d, 0.958_851_077, 1e-9));

        let v = x.log(&p, &q).unwrap();
        assert!(close(v.norm(), d, 1e-14));
        // angle to the outward radial direction
        let tc = x.tangent_cone(&p);
        let radial = Point::spine(vec![1.0, 0.0]);
        assert!(close(tc.space.angle(&v, &radial), (PI + 1.0) / 2.0, 1e-12));
        // increasing arc position is the Forward heading
        assert!(v.u[1] > 0.0);
    }

    #[test]
    fn open_book_distance_is_pythagorean() {
        let x = gallery::open_book(3, 1);
        let p = Point::apex(1);
        let q = Point::new(vec![3.0], GraphPoint::Vertex(VertexId(1)), 4.0);
        assert_eq!(x.distance(&p, &q), 5.0);
        let v = Point::spine(vec![1.0]);
        let w = Point::new(vec![0.0], GraphPoint::Vertex(VertexId(0)), 1.0);
        assert_eq!(x.inner(&v, &w), 0.0);
        assert!(close(x.angle(&v, &w), PI / 2.0, 1e-15));
    }

    #[test]
    fn kale_chord_midpoint() {
        let x = gallery::kale(7.0).unwrap();
        let p = Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0);
        let q = Point::new(vec![], gallery::kale_point(&x, 2.0), 1.0);
        let m = x.midpoint(&p, &q).unwrap();
        let c = m.cone.unwrap();
        assert!(close(c.r, 1f64.cos(), 1e-14));
        let target = gallery::kale_point(&x, 1.0);
        assert!(close(x.link().distance(&c.dir, &target).unwrap(), 0.0, 1e-12));
    }

    #[test]
    fn euclidean_geodesic_is_linear() {
        let x = gallery::euclidean(2);
        let p = Point::spine(vec![0.0, 0.0]);
        let q = Point::spine(vec![2.0, -4.0]);
        assert_eq!(x.geodesic_point(&p, &q, 0.25).unwrap().u, vec![0.5, -1.0]);
    }

    #[test]
    fn spider_log_points_through_apex() {
        let x = gallery::spider(3);
        let p = Point::new(vec![], GraphPoint::Vertex(VertexId(0)), 1.0);
        let q = Point::new(vec![], GraphPoint::Vertex(VertexId(1)), 1.0);
        let v = x.log(&p, &q).unwrap();
        assert_eq!(v.u, vec![-2.0]);
        assert!(v.cone.is_none());
        let back = x.shoot(&p, &v, 1.0);
        // the geodesic continues through the apex onto another ray, which a
        // small-step exponential does not resolve
        assert_eq!(back, Err(StrataError::StepTooLarge));
        assert_eq!(x.shoot(&p, &v, 0.5).unwrap(), Point::apex(0));
    }

    #[test]
    fn log_at_apex_is_identity() {
        let x = gallery::kale(7.0).unwrap();
        let q = Point::new(vec![], gallery::kale_point(&x, 3.0), 2.5);
        assert_eq!(x.log(&x.apex(), &q).unwrap(), q);
        assert_eq!(x.shoot(&x.apex(), &q, 0.5).unwrap(), q.scaled(0.5));
    }

    #[test]
    fn log_shoot_round_trip_on_kale() {
        let x = gallery::kale(7.0).unwrap();
        let p = Point::new(vec![], gallery::kale_point(&x, 0.3), 1.3);
        for pos in [0.5, 1.7, 2.9, -1.0, -2.5] {
            let q = Point::new(vec![], gallery::kale_point(&x, pos), 0.7);
            let v = x.log(&p, &q).unwrap();
            let back = x.shoot(&p, &v, 1.0).unwrap();
            assert!(x.distance(&back, &q) < 1e-9, "pos {pos}");
        }
    }

    #[test]
    fn log_at_ray_point_of_theta() {
        let x = gallery::theta(1.5 * PI).unwrap();
        let a = GraphPoint::Vertex(VertexId(0));
        let p = Point::new(vec![], a, 1.0);
        let q = Point::new(vec![], x.link().edge_point(EdgeId(2), 0.5), 2.0);
        let v = x.log(&p, &q).unwrap();
        let tc = x.tangent_cone(&p);
        assert_eq!(tc.space.spine_dim(), 1);
        assert_eq!(tc.space.link().vertex_count(), 3);
        assert_eq!(v.dir(), Some(GraphPoint::Vertex(VertexId(2))));
        assert!(close(v.u[0], 2.0 * 0.5f64.cos() - 1.0, 1e-15));
        assert!(close(v.radius(), 2.0 * 0.5f64.sin(), 1e-15));
        let back = x.shoot(&p, &v, 1.0).unwrap();
        assert!(x.distance(&back, &q) < 1e-12);
    }

    #[test]
    fn strata_and_codim() {
        let spider = gallery::spider(3);
        assert_eq!(spider.stratum_of(&spider.apex()).codim, 1);
        let kale = gallery::kale(7.0).unwrap();
        let p = Point::new(vec![], gallery::kale_point(&kale, 0.0), 1.0);
        assert_eq!(kale.stratum_of(&p).stratum, Stratum::Sector(EdgeId(1)));
        assert_eq!(kale.codim(&p), 0);
        let book = gallery::open_book(3, 1);
        let s = book.stratum_of(&book.apex());
        assert_eq!((s.stratum, s.dim, s.codim), (Stratum::Spine, 1, 1));
        let theta = gallery::theta(PI).unwrap();
        assert_eq!(theta.codim(&theta.apex()), 2);
        let ray = Point::new(vec![], GraphPoint::Vertex(VertexId(0)), 1.0);
        assert_eq!(theta.codim(&ray), 1);
    }

    #[test]
    fn cut_locus_is_reported() {
        let g = MetricGraph::from_edges(2, &[(0, 1, 2.0), (0, 1, 2.0)]).unwrap();
        let x = ConeSpace::unchecked(0, g);
        let p = Point::new(vec![], GraphPoint::Vertex(VertexId(0)), 1.0);
        let q = Point::new(vec![], GraphPoint::Vertex(VertexId(1)), 1.0);
        assert_eq!(x.log(&p, &q), Err(StrataError::CutLocus));
        assert_eq!(x.geodesic_point(&p, &q, 0.5), Err(StrataError::AmbiguousGeodesic));
    }

    #[test]
    fn invalid_points() {
        let x = gallery::spider(2);
        let bad = Point::new(vec![1.0], GraphPoint::Vertex(VertexId(0)), 1.0);
        assert!(matches!(
            x.check_point(&bad),
            Err(StrataError::DimensionMismatch { .. })
        ));
        let bad = Point::new(vec![], GraphPoint::Vertex(VertexId(4)), 1.0);
        assert!(x.check_point(&bad).is_err());
        let bad = Point {
            u: vec![],
            cone: Some(ConePart {
                dir: GraphPoint::Vertex(VertexId(0)),
                r: -1.0,
            }),
        };
        assert!(x.check_point(&bad).is_err());
    }
}
