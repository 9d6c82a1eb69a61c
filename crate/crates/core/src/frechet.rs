//! Discrete measures, the Fréchet function, its directional derivative, the
//! exact mean solver and a brute-force grid oracle.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cone_space::{ConePart, ConeSpace, Point, Stratum, StratumId, TangentCone};
use crate::error::{Result, StrataError};
use crate::exec::Exec;
use crate::metric_graph::GraphPoint;
use crate::profile::LinkProfile;

/// Weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Mean radii below this fraction of the largest atom radius snap to the apex.
pub const APEX_SNAP: f64 = 1e-12;

/// First-order optimality threshold for sampled directional derivatives.
pub const FIRST_ORDER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

impl Atom {
    pub fn new(point: Point, weight: f64) -> Self {
        Atom { point, weight }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measure {
    atoms: Vec<Atom>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(StrataError::InvalidMeasure("no atoms".into()));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.weight.is_finite() && a.weight > 0.0)) {
            return Err(StrataError::InvalidMeasure(format!(
                "weight {} is not positive",
                a.weight
            )));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(StrataError::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Measure { atoms })
    }

    pub fn dirac(point: Point) -> Self {
        Measure {
            atoms: vec![Atom::new(point, 1.0)],
        }
    }

    /// Equal weights on the given points.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let atoms: Vec<Atom> = points.into_iter().map(|p| Atom::new(p, w)).collect();
        if atoms.is_empty() {
            return Err(StrataError::InvalidMeasure("no atoms".into()));
        }
        Ok(Measure { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn check_in(&self, space: &ConeSpace) -> Result<()> {
        self.atoms.iter().try_for_each(|a| space.check_point(&a.point))
    }

    /// Same weights, points replaced by `f`.
    pub fn map_points<F: FnMut(&Point) -> Point>(&self, mut f: F) -> Measure {
        Measure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(f(&a.point), a.weight))
                .collect(),
        }
    }

    /// Weighted spine barycenter.
    pub fn spine_mean(&self) -> Vec<f64> {
        let s = self.atoms[0].point.u.len();
        let mut u = vec![0.0; s];
        for a in &self.atoms {
            for (acc, x) in u.iter_mut().zip(&a.point.u) {
                *acc += a.weight * x;
            }
        }
        u
    }
}

pub fn half_square_distance(space: &ConeSpace, w: &Point, p: &Point) -> f64 {
    let d = space.distance(w, p);
    0.5 * d * d
}

pub fn frechet_value(space: &ConeSpace, measure: &Measure, p: &Point) -> f64 {
    measure
        .atoms
        .iter()
        .map(|a| a.weight * half_square_distance(space, &a.point, p))
        .sum()
}

/// `−Σ wᵢ ⟨xᵢ, v⟩` for a measure on a cone viewed as a tangent cone at its apex.
pub fn apex_derivative(space: &ConeSpace, measure: &Measure, v: &Point) -> f64 {
    -measure
        .atoms
        .iter()
        .map(|a| a.weight * space.inner(&a.point, v))
        .sum::<f64>()
}

/// Logs of all atoms at `p`, or the indices of the atoms without a unique log.
fn logs_at(space: &ConeSpace, measure: &Measure, p: &Point) -> Result<Vec<Point>> {
    let mut bad = Vec::new();
    let mut out = Vec::with_capacity(measure.len());
    for (i, a) in measure.atoms.iter().enumerate() {
        match space.log(p, &a.point) {
            Ok(v) => out.push(v),
            Err(StrataError::CutLocus) => bad.push(i),
            Err(e) => return Err(e),
        }
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(StrataError::CutLocusAtoms(bad))
    }
}

/// Directional derivative of the Fréchet function at `p` along `v`, where
/// `v` lives in `tangent_cone(p)`.
pub fn directional_derivative(space: &ConeSpace, measure: &Measure, p: &Point, v: &Point) -> Result<f64> {
    space.check_point(p)?;
    let tc = space.tangent_cone(p);
    tc.space.check_point(v)?;
    let logs = logs_at(space, measure, p)?;
    Ok(-measure
        .atoms
        .iter()
        .zip(&logs)
        .map(|(a, l)| a.weight * tc.space.inner(l, v))
        .sum::<f64>())
}

pub fn pushforward_to_tangent(space: &ConeSpace, measure: &Measure, p: &Point) -> Result<(TangentCone, Measure)> {
    space.check_point(p)?;
    measure.check_in(space)?;
    let logs = logs_at(space, measure, p)?;
    let tc = space.tangent_cone(p);
    let atoms = measure
        .atoms
        .iter()
        .zip(logs)
        .map(|(a, l)| Atom::new(l, a.weight))
        .collect();
    Ok((tc, Measure { atoms }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub stratum: Stratum,
    pub point: Point,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Localization {
    /// Always true for finite measures on CAT(0) spaces.
    pub punctual: bool,
    pub retractable: bool,
    pub ambiguous_atoms: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanReport {
    pub mean: Point,
    pub value: f64,
    pub stratum: StratumId,
    pub candidates: Vec<Candidate>,
    /// Smallest directional derivative over the sampled unit directions.
    pub min_directional_derivative: f64,
    pub first_order_ok: bool,
    pub localization: Localization,
}

/// Minimizer of the cone factor alone: `None` is the apex.
fn cone_candidates(space: &ConeSpace, measure: &Measure) -> Vec<(Stratum, Option<ConePart>)> {
    let link = space.link();
    let prof = LinkProfile::new(space, measure);
    let scale = measure
        .atoms()
        .iter()
        .map(|a| a.point.radius())
        .fold(0.0, f64::max);
    let part = |dir: GraphPoint, pull: f64| (pull > APEX_SNAP * scale).then_some(ConePart { dir, r: pull });
    let mut out = vec![(Stratum::Spine, None)];
    for v in link.vertices() {
        out.push((Stratum::Ray(v), part(GraphPoint::Vertex(v), prof.vertex(v))));
    }
    for e in link.edge_ids() {
        let (t, pull) = prof.pieces[e.0]
            .iter()
            .map(|p| p.best())
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        out.push((Stratum::Sector(e), part(link.edge_point(e, t), pull)));
    }
    out
}

/// Sample of unit directions in a tangent cone: spine axes both ways, every
/// link vertex, points along every link edge, and mixed spine/link vectors.
pub fn direction_sample(space: &ConeSpace, per_edge: usize) -> Vec<Point> {
    let s = space.spine_dim();
    let link = space.link();
    let mut dirs = Vec::new();
    let axis = |i: usize, sign: f64| {
        let mut u = vec![0.0; s];
        u[i] = sign;
        u
    };
    for i in 0..s {
        dirs.push(Point::spine(axis(i, 1.0)));
        dirs.push(Point::spine(axis(i, -1.0)));
    }
    let mut link_pts: Vec<GraphPoint> = link.vertices().map(GraphPoint::Vertex).collect();
    for e in link.edge_ids() {
        let len = link.edge(e).length;
        for k in 1..per_edge {
            link_pts.push(link.edge_point(e, len * k as f64 / per_edge as f64));
        }
    }
    for g in &link_pts {
        dirs.push(Point::new(vec![0.0; s], *g, 1.0));
        for i in 0..s {
            for sign in [1.0, -1.0] {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(Point::new(axis(i, sign * h), *g, h));
            }
        }
    }
    dirs
}

pub fn check_localized(space: &ConeSpace, measure: &Measure) -> Result<Localization> {
    let report = frechet_mean(space, measure)?;
    Ok(report.localization)
}

fn localization_at(space: &ConeSpace, measure: &Measure, p: &Point) -> Result<Localization> {
    let ambiguous_atoms = match logs_at(space, measure, p) {
        Ok(_) => Vec::new(),
        Err(StrataError::CutLocusAtoms(bad)) => bad,
        Err(e) => return Err(e),
    };
    Ok(Localization {
        punctual: true,
        retractable: ambiguous_atoms.is_empty(),
        ambiguous_atoms,
    })
}

/// Exact Fréchet mean. The spine factor is the weighted average; the cone
/// factor maximizes the pull over the link (closed form on each piece) and
/// takes the radius equal to the positive part of the maximal pull.
pub fn frechet_mean(space: &ConeSpace, measure: &Measure) -> Result<MeanReport> {
    measure.check_in(space)?;
    let u = measure.spine_mean();
    let candidates: Vec<Candidate> = cone_candidates(space, measure)
        .into_iter()
        .map(|(stratum, cone)| {
            let point = Point { u: u.clone(), cone };
            let value = frechet_value(space, measure, &point);
            Candidate {
                stratum,
                point,
                value,
            }
        })
        .collect();
    // The apex comes first, so exact ties keep the lowest stratum.
    let best = candidates
        .iter()
        .fold(&candidates[0], |a, c| if c.value < a.value { c } else { a });
    let mean = best.point.clone();
    let value = best.value;
    let stratum = space.stratum_of(&mean);
    let localization = localization_at(space, measure, &mean)?;
    let min_directional_derivative = if localization.retractable {
        let tc = space.tangent_cone(&mean);
        direction_sample(&tc.space, 8)
            .iter()
            .map(|v| directional_derivative(space, measure, &mean, v))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    Ok(MeanReport {
        mean,
        value,
        stratum,
        candidates,
        first_order_ok: min_directional_derivative >= -FIRST_ORDER_TOL,
        min_directional_derivative,
        localization,
    })
}

/// Brute-force grid minimizer, independent of the piecewise solver.
///
/// The spine factor is searched on a shrinking grid inside the bounding box
/// of the atoms; the cone factor on a grid over link points (every vertex
/// and edge parameters spaced by `step`) times radii in `[0, max rᵢ]`.
pub fn frechet_mean_oracle(space: &ConeSpace, measure: &Measure, step: f64) -> Point {
    frechet_mean_oracle_with(space, measure, step, Exec::default())
}

pub fn frechet_mean_oracle_with(space: &ConeSpace, measure: &Measure, step: f64, exec: Exec) -> Point {
    let u = spine_oracle(measure, step, exec);
    let link = space.link();
    let mut dirs: Vec<GraphPoint> = link.vertices().map(GraphPoint::Vertex).collect();
    for e in link.edge_ids() {
        let len = link.edge(e).length;
        let n = (len / step).ceil() as usize;
        for k in 1..n {
            dirs.push(GraphPoint::Edge {
                edge: e,
                t: len * k as f64 / n as f64,
            });
        }
    }
    let rmax = measure
        .atoms()
        .iter()
        .map(|a| a.point.radius())
        .fold(0.0, f64::max);
    let nr = (rmax / step).ceil() as usize;
    let cone_atoms: Vec<(f64, Option<&ConePart>)> = measure
        .atoms()
        .iter()
        .map(|a| (a.weight, a.point.cone.as_ref()))
        .collect();
    let cone_value = |g: &GraphPoint, cosines: &[f64], rho: f64| -> f64 {
        let _ = g;
        cone_atoms
            .iter()
            .zip(cosines)
            .map(|(&(w, c), &cos)| {
                let r = c.map_or(0.0, |c| c.r);
                w * 0.5 * (rho * rho + r * r - 2.0 * rho * r * cos)
            })
            .sum()
    };
    let best = exec.argmin_range(dirs.len(), |i| {
        let g = &dirs[i];
        let cosines: Vec<f64> = cone_atoms
            .iter()
            .map(|(_, c)| c.map_or(0.0, |c| link.distance_unchecked(g, &c.dir).min(PI).cos()))
            .collect();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=nr {
            let rho = (k as f64 * step).min(rmax);
            let v = cone_value(g, &cosines, rho);
            if v < best.0 {
                best = (v, rho);
            }
        }
        best
    });
    let cone = best.and_then(|(i, (_, rho))| (rho > 0.0).then_some(ConePart { dir: dirs[i], r: rho }));
    Point { u, cone }
}

fn spine_oracle(measure: &Measure, step: f64, exec: Exec) -> Vec<f64> {
    let s = measure.atoms()[0].point.u.len();
    if s == 0 {
        return Vec::new();
    }
    let value = |u: &[f64]| -> f64 {
        measure
            .atoms()
            .iter()
            .map(|a| {
                let d2: f64 = a.point.u.iter().zip(u).map(|(x, y)| (x - y) * (x - y)).sum();
                0.5 * a.weight * d2
            })
            .sum()
    };
    let mut lo = vec![f64::INFINITY; s];
    let mut hi = vec![f64::NEG_INFINITY; s];
    for a in measure.atoms() {
        for i in 0..s {
            lo[i] = lo[i].min(a.point.u[i]);
            hi[i] = hi[i].max(a.point.u[i]);
        }
    }
    const N: usize = 21;
    let mut center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut half: f64 = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| 0.5 * (b - a))
        .fold(0.0, f64::max);
    loop {
        let spacing = 2.0 * half / (N - 1) as f64;
        let total = N.pow(s as u32);
        let point = |mut idx: usize| -> Vec<f64> {
            let mut u = center.clone();
            for c in u.iter_mut() {
                *c += -half + spacing * (idx % N) as f64;
                idx /= N;
            }
            u
        };
        let (i, _) = exec
            .argmin_range(total, |i| value(&point(i)))
            .expect("grid is nonempty");
        center = point(i);
        if spacing <= step * 1e-3 || half == 0.0 {
            return center;
        }
        half = 2.0 * spacing;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::metric_graph::{MetricGraph, VertexId};

    fn ray(i: usize, r: f64) -> Point {
        Point::new(vec![], GraphPoint::Vertex(VertexId(i)), r)
    }

    fn spider_measure() -> Measure {
        Measure::new(vec![Atom::new(ray(0, 1.0), 0.5), Atom::new(ray(1, 1.0), 0.5)]).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![]).is_err());
        assert!(Measure::new(vec![Atom::new(ray(0, 1.0), 0.9)]).is_err());
        assert!(Measure::new(vec![Atom::new(ray(0, 1.0), 1.5), Atom::new(ray(1, 1.0), -0.5)]).is_err());
        let bad = Measure::dirac(Point::spine(vec![1.0]));
        assert!(bad.check_in(&gallery::spider(3)).is_err());
    }

    #[test]
    fn spider_values() {
        let x = gallery::spider(3);
        let m = spider_measure();
        assert_eq!(frechet_value(&x, &m, &x.apex()), 0.5);
        assert_eq!(frechet_value(&x, &m, &ray(0, 1.0)), 1.0);
        assert_eq!(half_square_distance(&x, &ray(0, 1.0), &ray(1, 1.0)), 2.0);
        assert_eq!(half_square_distance(&x, &ray(0, 1.0), &ray(0, 1.0)), 0.0);
        let single = Measure::dirac(ray(2, 3.0));
        assert_eq!(frechet_value(&x, &single, &ray(2, 3.0)), 0.0);
    }

    #[test]
    fn spider_mean_and_derivatives() {
        let x = gallery::spider(3);
        let m = spider_measure();
        let rep = frechet_mean(&x, &m).unwrap();
        assert_eq!(rep.mean, x.apex());
        assert_eq!(rep.value, 0.5);
        assert!(rep.first_order_ok);
        assert!(rep.localization.retractable);
        let apex = x.apex();
        assert_eq!(directional_derivative(&x, &m, &apex, &ray(0, 1.0)).unwrap(), 0.0);
        assert_eq!(directional_derivative(&x, &m, &apex, &ray(1, 1.0)).unwrap(), 0.0);
        assert_eq!(directional_derivative(&x, &m, &apex, &ray(2, 1.0)).unwrap(), 1.0);
        assert_eq!(directional_derivative(&x, &m, &apex, &apex).unwrap(), 0.0);
    }

    #[test]
    fn euclidean_mean() {
        let x = gallery::euclidean(2);
        let m = Measure::new(vec![
            Atom::new(Point::spine(vec![0.0, 0.0]), 0.5),
            Atom::new(Point::spine(vec![2.0, 2.0]), 0.5),
        ])
        .unwrap();
        assert_eq!(frechet_mean(&x, &m).unwrap().mean, Point::spine(vec![1.0, 1.0]));
        let o = frechet_mean_oracle(&x, &m, 1e-3);
        assert!(x.distance(&o, &Point::spine(vec![1.0, 1.0])) < 2e-3);
    }

    #[test]
    fn open_book_mean() {
        let x = gallery::open_book(3, 1);
        let m = Measure::new(vec![
            Atom::new(Point::new(vec![-1.0], GraphPoint::Vertex(VertexId(0)), 1.0), 0.5),
            Atom::new(Point::new(vec![1.0], GraphPoint::Vertex(VertexId(1)), 1.0), 0.5),
        ])
        .unwrap();
        let rep = frechet_mean(&x, &m).unwrap();
        assert_eq!(rep.mean, Point::apex(1));
        let (tc, hat) = pushforward_to_tangent(&x, &m, &rep.mean).unwrap();
        assert_eq!(tc.space, x);
        assert_eq!(hat, m);
    }

    #[test]
    fn mean_off_the_apex() {
        // two atoms on one ray: mean is their average radius
        let x = gallery::spider(2);
        let m = Measure::new(vec![Atom::new(ray(0, 1.0), 0.5), Atom::new(ray(0, 3.0), 0.5)]).unwrap();
        let rep = frechet_mean(&x, &m).unwrap();
        assert_eq!(rep.mean, ray(0, 2.0));
        assert!(rep.first_order_ok);
        let (_, hat) = pushforward_to_tangent(&x, &m, &rep.mean).unwrap();
        let again = frechet_mean(&gallery::open_book(2, 1), &hat).unwrap();
        assert!(again.mean.norm() < 1e-12);
    }

    #[test]
    fn kale_mean_on_a_sector() {
        let x = gallery::kale(7.0).unwrap();
        let at = |pos: f64, r: f64| Point::new(vec![], gallery::kale_point(&x, pos), r);
        let m = Measure::new(vec![Atom::new(at(0.0, 1.0), 0.5), Atom::new(at(1.0, 1.0), 0.5)]).unwrap();
        let rep = frechet_mean(&x, &m).unwrap();
        // flat sector: the Euclidean midpoint of two unit vectors 1 radian apart
        let want = at(0.5, 0.5f64.cos());
        assert!(x.distance(&rep.mean, &want) < 1e-12);
        assert!(rep.first_order_ok);
        let o = frechet_mean_oracle(&x, &m, 1e-3);
        assert!(x.distance(&o, &want) < 2e-3);
    }

    #[test]
    fn ambiguous_logs_are_listed() {
        // a 2-cycle of length 4 plus two pendant edges of length π/2 at v0;
        // the mean sits on ray v0 and the atom at v1 is reached by two paths
        let h = std::f64::consts::FRAC_PI_2;
        let g = MetricGraph::from_edges(4, &[(0, 1, 2.0), (0, 1, 2.0), (0, 2, h), (0, 3, h)]).unwrap();
        let x = ConeSpace::unchecked(0, g);
        let m = Measure::new(vec![
            Atom::new(ray(0, 3.0), 0.4),
            Atom::new(ray(1, 1.0), 0.2),
            Atom::new(ray(2, 1.0), 0.2),
            Atom::new(ray(3, 1.0), 0.2),
        ])
        .unwrap();
        let rep = frechet_mean(&x, &m).unwrap();
        assert_eq!(rep.mean.dir(), Some(GraphPoint::Vertex(VertexId(0))));
        let loc = check_localized(&x, &m).unwrap();
        assert!(!loc.retractable);
        assert_eq!(loc.ambiguous_atoms, vec![1]);
        assert_eq!(
            directional_derivative(&x, &m, &rep.mean, &Point::spine(vec![1.0])),
            Err(StrataError::CutLocusAtoms(vec![1]))
        );
        let m = Measure::dirac(ray(0, 1.0));
        let rep = frechet_mean(&x, &m).unwrap();
        assert_eq!(rep.mean, ray(0, 1.0));
        assert!(rep.localization.retractable);
    }
}
