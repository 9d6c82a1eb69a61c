//! Escape cone, hull, fluctuating cone and resolving directions of a measure
//! on a tangent cone (a measure whose Fréchet mean is the apex).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::cone_space::{ConeSpace, Point, Stratum};
use crate::error::{Result, StrataError};
use crate::frechet::{apex_derivative, Measure};
use crate::metric_graph::{GraphPoint, SubgraphRegion, VertexId};
use crate::nnls::in_cone;
use crate::profile::LinkProfile;

pub const ESCAPE_TOL: f64 = 1e-9;
pub const HULL_TOL: f64 = 1e-8;
pub const DEFAULT_DEPTH: usize = 4;

/// Cap on generators kept by the midpoint closure.
const MAX_GENERATORS: usize = 64;

/// Generators closer than this angle are merged.
const SAME_DIRECTION: f64 = 1e-9;

/// Whether the directional derivative at the apex vanishes along `v`.
pub fn escape_membership(space: &ConeSpace, hat: &Measure, v: &Point, tol: f64) -> bool {
    let n = v.norm();
    if n == 0.0 {
        return true;
    }
    apex_derivative(space, hat, &v.scaled(1.0 / n)).abs() <= tol
}

/// Description of `E ∩ sphere`.
///
/// At a mean the spine barycenter vanishes, and the derivative along
/// `(u, g, ρ)` reduces to `−ρ·pull(g)`; the escape cone is then the spine
/// times the cone over the zero set of the pull, which is computed exactly.
/// Otherwise the cone is sampled and the report is flagged approximate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeSections {
    pub spine_center: Vec<f64>,
    pub exact: bool,
    /// Link directions along which the derivative vanishes (exact mode).
    pub link_zeros: SubgraphRegion,
    /// Unit members: representatives in exact mode, samples otherwise.
    pub samples: Vec<Point>,
}

impl EscapeSections {
    /// Number of connected components of the unit sphere met by
    /// `E ∩ sphere` (exact mode only).
    pub fn sphere_components_met(&self, space: &ConeSpace) -> Option<usize> {
        if !self.exact {
            return None;
        }
        Some(match space.spine_dim() {
            0 => link_components_met(space, &self.link_zeros),
            // the sphere of ℝ × Cone(∅) is two points, both in E
            1 if space.link().vertex_count() == 0 => 2,
            _ => 1,
        })
    }

    /// Random member of `E` with norm at most one (exact mode only).
    pub fn sample<R: Rng + ?Sized>(&self, space: &ConeSpace, rng: &mut R) -> Option<Point> {
        if !self.exact {
            return None;
        }
        let s = space.spine_dim();
        let u: Vec<f64> = (0..s).map(|_| rng.random_range(-1.0..1.0)).collect();
        let reps = self.link_zeros.representatives(space.link());
        let cone = if reps.is_empty() || rng.random_bool(0.2) {
            None
        } else {
            let g = random_region_point(space, &self.link_zeros, rng);
            Some((g, rng.random_range(0.0..1.0)))
        };
        let p = match cone {
            Some((g, r)) if r > 0.0 => Point::new(u, g, r),
            _ => Point::spine(u),
        };
        Some(p)
    }
}

fn link_components_met(space: &ConeSpace, region: &SubgraphRegion) -> usize {
    let link = space.link();
    let mut parent: Vec<usize> = (0..link.vertex_count()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for e in link.edge_ids() {
        let edge = link.edge(e);
        let (a, b) = (find(&mut parent, edge.from.0), find(&mut parent, edge.to.0));
        parent[a] = b;
    }
    let mut met: Vec<usize> = region
        .vertices
        .iter()
        .map(|v| v.0)
        .chain(region.intervals.keys().map(|&e| link.edge(e).from.0))
        .map(|v| find(&mut parent, v))
        .collect();
    met.sort_unstable();
    met.dedup();
    met.len()
}

fn random_region_point<R: Rng + ?Sized>(space: &ConeSpace, region: &SubgraphRegion, rng: &mut R) -> GraphPoint {
    let link = space.link();
    let total = region.measure();
    if total > 0.0 && rng.random_bool(0.8) {
        let mut x = rng.random_range(0.0..total);
        for (&e, list) in &region.intervals {
            for &(lo, hi) in list {
                if x <= hi - lo {
                    return link.edge_point(e, lo + x);
                }
                x -= hi - lo;
            }
        }
    }
    let pts = region.breakpoints(link);
    pts[rng.random_range(0..pts.len())]
}

pub fn escape_sections(space: &ConeSpace, hat: &Measure, tol: f64) -> EscapeSections {
    let s = space.spine_dim();
    let link = space.link();
    let center = hat.spine_mean();
    let center_norm = center.iter().map(|x| x * x).sum::<f64>().sqrt();
    let prof = LinkProfile::new(space, hat);
    let axes = |sign: f64| -> Vec<Point> {
        (0..s)
            .map(|i| {
                let mut u = vec![0.0; s];
                u[i] = sign;
                Point::spine(u)
            })
            .collect()
    };
    if center_norm <= tol {
        let mut zeros = SubgraphRegion::default();
        for v in link.vertices() {
            if prof.vertex(v).abs() <= tol {
                zeros.vertices.insert(v);
            }
        }
        for e in link.edge_ids() {
            for piece in &prof.pieces[e.0] {
                for (lo, hi) in piece.zeros(tol) {
                    zeros.add_interval(link, e, lo, hi);
                }
            }
        }
        zeros.normalize(link);
        // A zero found at a piece end that is a vertex must agree with the
        // vertex evaluation.
        zeros.vertices.retain(|&v| prof.vertex(v).abs() <= tol);
        let mut samples = axes(1.0);
        samples.extend(axes(-1.0));
        for g in zeros.representatives(link) {
            samples.push(Point::new(vec![0.0; s], g, 1.0));
        }
        return EscapeSections {
            spine_center: center,
            exact: true,
            link_zeros: zeros,
            samples,
        };
    }
    // Off-center: members are (u⊥ + (ρ·h(g)/|U|²)·U, g, ρ) with u⊥ ⟂ U.
    let unit_center: Vec<f64> = center.iter().map(|x| x / center_norm).collect();
    let mut samples = Vec::new();
    for mut p in axes(1.0) {
        let dot: f64 = p.u.iter().zip(&unit_center).map(|(a, b)| a * b).sum();
        p.u.iter_mut().zip(&unit_center).for_each(|(a, b)| *a -= dot * b);
        if let Some(q) = p.normalized() {
            samples.push(q.clone());
            samples.push(Point::spine(q.u.iter().map(|x| -x).collect()));
        }
    }
    let mut dirs: Vec<GraphPoint> = link.vertices().map(GraphPoint::Vertex).collect();
    for e in link.edge_ids() {
        let len = link.edge(e).length;
        dirs.extend((1..16).map(|k| link.edge_point(e, len * k as f64 / 16.0)));
    }
    for g in dirs {
        let h = -prof.at(space, &g);
        let u: Vec<f64> = center.iter().map(|c| h * c / (center_norm * center_norm)).collect();
        if let Some(p) = Point::new(u, g, 1.0).normalized() {
            if escape_membership(space, hat, &p, tol) {
                samples.push(p);
            }
        }
    }
    EscapeSections {
        spine_center: center,
        exact: false,
        link_zeros: SubgraphRegion::default(),
        samples,
    }
}

/// How membership in a [`ConvexCone`] is decided.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ConeShape {
    /// Spine dimension zero: the cone over a closed link region.
    Region(SubgraphRegion),
    /// Edgeless link: a polyhedral cone in the spine plus, for each link
    /// vertex, a polyhedral cone in the half-space `ℝˢ × ℝ₊` of that page.
    /// Page vectors are stored as `(u, r)`.
    Faces {
        spine: Vec<Vec<f64>>,
        pages: BTreeMap<VertexId, Vec<Vec<f64>>>,
    },
    /// Generators under pairwise flat-sector tests; an inner approximation.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullMode {
    Auto,
    Approximate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexCone {
    pub ambient: ConeSpace,
    /// Unit generators.
    pub generators: Vec<Point>,
    pub closure_depth: usize,
    pub exact: bool,
    pub shape: ConeShape,
    pub tol: f64,
    #[serde(skip)]
    escape: Option<(Measure, f64)>,
}

impl ConvexCone {
    /// Smallest geodesically convex cone containing the given vectors.
    pub fn generated(space: &ConeSpace, vectors: &[Point], depth: usize, mode: HullMode) -> ConvexCone {
        let units: Vec<Point> = vectors.iter().filter_map(|v| v.normalized()).collect();
        if mode == HullMode::Auto && space.spine_dim() == 0 {
            let dirs: Vec<GraphPoint> = units.iter().filter_map(|v| v.dir()).collect();
            let region = space
                .link()
                .link_convex_closure(&dirs)
                .expect("directions come from valid vectors");
            return region_cone(space, region, None);
        }
        if mode == HullMode::Auto && space.link().edge_count() == 0 {
            return faces_cone(space, &units);
        }
        sampled_cone(space, units, depth)
    }

    pub fn exact_region(&self) -> Option<&SubgraphRegion> {
        match &self.shape {
            ConeShape::Region(r) => Some(r),
            _ => None,
        }
    }

    /// True when the cone is `{0}`.
    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// True when some nonzero member has a cone component.
    pub fn meets_link(&self) -> bool {
        self.generators.iter().any(|g| g.cone.is_some())
    }

    pub fn contains(&self, v: &Point) -> bool {
        if v.norm() == 0.0 {
            return true;
        }
        if let Some((m, tol)) = &self.escape {
            if !escape_membership(&self.ambient, m, v, *tol) {
                return false;
            }
        }
        match &self.shape {
            ConeShape::Region(region) => match &v.cone {
                None => v.u.iter().all(|x| *x == 0.0),
                Some(c) => region.contains(self.ambient.link(), &c.dir, self.tol),
            },
            ConeShape::Faces { spine, pages } => faces_contains(spine, pages, v, self.tol),
            ConeShape::Sampled => self.sampled_contains(v),
        }
    }

    fn sampled_contains(&self, v: &Point) -> bool {
        let sp = &self.ambient;
        if self.generators.iter().any(|g| sp.angle(g, v) <= self.tol) {
            return true;
        }
        if v.cone.is_none() {
            let spine: Vec<Vec<f64>> = self
                .generators
                .iter()
                .filter(|g| g.cone.is_none())
                .map(|g| g.u.clone())
                .collect();
            if in_cone(&spine, &v.u, self.tol) {
                return true;
            }
        }
        let n = self.generators.len();
        (0..n).any(|i| {
            (i + 1..n).any(|j| pair_sector_contains(sp, &self.generators[i], &self.generators[j], v, self.tol))
        })
    }

    /// Random unit members built from generators: points of the exact region,
    /// nonnegative combinations within one face, or points on geodesics
    /// between two generators.
    pub fn sample_members<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Point> {
        let sp = &self.ambient;
        let s = sp.spine_dim();
        let mut out = Vec::with_capacity(n);
        if self.is_trivial() {
            return out;
        }
        let mut tries = 0;
        while out.len() < n && tries < 20 * n + 20 {
            tries += 1;
            let candidate = match &self.shape {
                ConeShape::Region(region) => {
                    Some(Point::new(Vec::new(), random_region_point(sp, region, rng), 1.0))
                }
                ConeShape::Faces { spine, pages } => {
                    let faces: Vec<Option<VertexId>> = std::iter::once(None)
                        .filter(|_| !spine.is_empty())
                        .chain(pages.keys().map(|&p| Some(p)))
                        .collect();
                    let face = faces[rng.random_range(0..faces.len())];
                    let mut cols: Vec<Vec<f64>> = spine
                        .iter()
                        .map(|g| {
                            let mut c = g.clone();
                            c.push(0.0);
                            c
                        })
                        .collect();
                    if let Some(p) = face {
                        cols.extend(pages[&p].iter().cloned());
                    }
                    let mut acc = vec![0.0; s + 1];
                    for c in &cols {
                        if rng.random_bool(0.6) {
                            let w: f64 = rng.random_range(0.0..1.0);
                            acc.iter_mut().zip(c).for_each(|(a, x)| *a += w * x);
                        }
                    }
                    let r = acc.pop().expect("page vectors have a radial slot");
                    match face {
                        Some(p) if r > 0.0 => Some(Point::new(acc, GraphPoint::Vertex(p), r)),
                        _ => Some(Point::spine(acc)),
                    }
                }
                ConeShape::Sampled => {
                    let g = &self.generators;
                    let (a, b) = (&g[rng.random_range(0..g.len())], &g[rng.random_range(0..g.len())]);
                    sp.geodesic_point(a, b, rng.random_range(0.0..=1.0)).ok()
                }
            };
            if let Some(p) = candidate.and_then(|p| p.normalized()) {
                out.push(p);
            }
        }
        out
    }
}

fn region_cone(space: &ConeSpace, region: SubgraphRegion, escape: Option<(Measure, f64)>) -> ConvexCone {
    let generators = region
        .representatives(space.link())
        .into_iter()
        .map(|g| Point::new(Vec::new(), g, 1.0))
        .collect();
    ConvexCone {
        ambient: space.clone(),
        generators,
        closure_depth: 0,
        exact: true,
        shape: ConeShape::Region(region),
        tol: HULL_TOL,
        escape,
    }
}

fn dedup_rows(rows: &mut Vec<Vec<f64>>) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for r in rows.drain(..) {
        if !out
            .iter()
            .any(|q| q.iter().zip(&r).all(|(a, b)| (a - b).abs() <= SAME_DIRECTION))
        {
            out.push(r);
        }
    }
    *rows = out;
}

fn unit_row(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-14).then(|| v.into_iter().map(|x| x / n).collect())
}

fn faces_cone(space: &ConeSpace, units: &[Point]) -> ConvexCone {
    let mut spine: Vec<Vec<f64>> = Vec::new();
    let mut pages: BTreeMap<VertexId, Vec<Vec<f64>>> = BTreeMap::new();
    for v in units {
        match &v.cone {
            None => spine.push(v.u.clone()),
            Some(c) => {
                let GraphPoint::Vertex(p) = c.dir else {
                    unreachable!("edgeless links have only vertex points")
                };
                let mut row = v.u.clone();
                row.push(c.r);
                pages.entry(p).or_default().push(row);
            }
        }
    }
    // Geodesics between different pages cross the spine at y_b·u_a + y_a·u_b.
    let keys: Vec<VertexId> = pages.keys().copied().collect();
    for (i, p) in keys.iter().enumerate() {
        for q in &keys[i + 1..] {
            for a in &pages[p] {
                for b in &pages[q] {
                    let (ya, yb) = (a[a.len() - 1], b[b.len() - 1]);
                    let c: Vec<f64> = a[..a.len() - 1]
                        .iter()
                        .zip(&b[..b.len() - 1])
                        .map(|(ua, ub)| yb * ua + ya * ub)
                        .collect();
                    spine.extend(unit_row(c));
                }
            }
        }
    }
    dedup_rows(&mut spine);
    pages.values_mut().for_each(dedup_rows);
    faces_from(space, spine, pages, None, true)
}

fn faces_from(
    space: &ConeSpace,
    spine: Vec<Vec<f64>>,
    pages: BTreeMap<VertexId, Vec<Vec<f64>>>,
    escape: Option<(Measure, f64)>,
    exact: bool,
) -> ConvexCone {
    let mut generators: Vec<Point> = spine.iter().map(|u| Point::spine(u.clone())).collect();
    for (&p, rows) in &pages {
        for row in rows {
            let (u, r) = row.split_at(row.len() - 1);
            generators.push(Point::new(u.to_vec(), GraphPoint::Vertex(p), r[0]));
        }
    }
    ConvexCone {
        ambient: space.clone(),
        generators,
        closure_depth: 0,
        exact,
        shape: ConeShape::Faces { spine, pages },
        tol: HULL_TOL,
        escape,
    }
}

fn faces_contains(spine: &[Vec<f64>], pages: &BTreeMap<VertexId, Vec<Vec<f64>>>, v: &Point, tol: f64) -> bool {
    match &v.cone {
        None => in_cone(spine, &v.u, tol),
        Some(c) => {
            let GraphPoint::Vertex(p) = c.dir else {
                return false;
            };
            let Some(rows) = pages.get(&p) else {
                return false;
            };
            let mut cols = rows.clone();
            cols.extend(spine.iter().map(|g| {
                let mut x = g.clone();
                x.push(0.0);
                x
            }));
            let mut b = v.u.clone();
            b.push(c.r);
            in_cone(&cols, &b, tol)
        }
    }
}

fn push_unique(space: &ConeSpace, gens: &mut Vec<Point>, p: Point) -> bool {
    if gens.len() >= MAX_GENERATORS || gens.iter().any(|g| space.angle(g, &p) <= SAME_DIRECTION) {
        return false;
    }
    gens.push(p);
    true
}

fn sampled_cone(space: &ConeSpace, units: Vec<Point>, depth: usize) -> ConvexCone {
    let mut gens: Vec<Point> = Vec::new();
    for u in units {
        push_unique(space, &mut gens, u);
    }
    let mut reached = 0;
    for level in 0..depth {
        let n = gens.len();
        let mut added = false;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (gens[i].clone(), gens[j].clone());
                if space.angle(&a, &b) >= PI - SAME_DIRECTION {
                    continue;
                }
                for t in crossing_times(space, &a, &b).into_iter().chain([0.5]) {
                    if let Some(p) = space.geodesic_point(&a, &b, t).ok().and_then(|p| p.normalized()) {
                        added |= push_unique(space, &mut gens, p);
                    }
                }
            }
        }
        reached = level + 1;
        if !added {
            break;
        }
    }
    ConvexCone {
        ambient: space.clone(),
        generators: gens,
        closure_depth: reached,
        exact: false,
        shape: ConeShape::Sampled,
        tol: HULL_TOL,
        escape: None,
    }
}

/// Parameters where the geodesic from `a` to `b` changes stratum: the apex
/// crossing when the link angle is π, and link vertices crossed otherwise.
fn crossing_times(space: &ConeSpace, a: &Point, b: &Point) -> Vec<f64> {
    let (Some(ca), Some(cb)) = (&a.cone, &b.cone) else {
        return Vec::new();
    };
    let g = space.link().geodesics_unchecked(&ca.dir, &cb.dir);
    if g.distance >= PI {
        return vec![ca.r / (ca.r + cb.r)];
    }
    let Some(path) = g.paths.first() else {
        return Vec::new();
    };
    let th = g.distance;
    path.interior_vertex_positions()
        .into_iter()
        .filter_map(|phi| {
            // (1−t)·ra·(1,0) + t·rb·(cos θ, sin θ) has angle φ
            let num = ca.r * phi.sin();
            let den = ca.r * phi.sin() + cb.r * (th - phi).sin();
            (den > 0.0).then(|| num / den)
        })
        .collect()
}

/// Whether `v` lies in the flat sector spanned by `a` and `b`.
fn pair_sector_contains(space: &ConeSpace, a: &Point, b: &Point, v: &Point, tol: f64) -> bool {
    let link = space.link();
    // Coordinates of a cone part in the plane (or line) containing a and b.
    let mut plane: Vec<(GraphPoint, f64)> = Vec::new();
    let mut path_len = None;
    match (&a.cone, &b.cone) {
        (Some(ca), Some(cb)) => {
            let th = space.link_angle(&ca.dir, &cb.dir);
            plane.push((ca.dir, 0.0));
            plane.push((cb.dir, th));
            path_len = Some(th);
        }
        (Some(c), None) | (None, Some(c)) => plane.push((c.dir, 0.0)),
        (None, None) => {}
    }
    let embed = |p: &Point| -> Option<Vec<f64>> {
        let mut x = p.u.clone();
        let (c0, c1) = match &p.cone {
            None => (0.0, 0.0),
            Some(c) => {
                let (g0, _) = plane.first()?;
                match path_len {
                    None => {
                        if !link.same_point(g0, &c.dir) {
                            return None;
                        }
                        (c.r, 0.0)
                    }
                    Some(th) if th >= PI => {
                        if link.same_point(g0, &c.dir) {
                            (c.r, 0.0)
                        } else if link.same_point(&plane[1].0, &c.dir) {
                            (-c.r, 0.0)
                        } else {
                            return None;
                        }
                    }
                    Some(th) => {
                        let d0 = link.distance_unchecked(g0, &c.dir);
                        let d1 = link.distance_unchecked(&c.dir, &plane[1].0);
                        if (d0 + d1 - th).abs() > tol {
                            return None;
                        }
                        (c.r * d0.cos(), c.r * d0.sin())
                    }
                }
            }
        };
        x.push(c0);
        x.push(c1);
        Some(x)
    };
    let (Some(ea), Some(eb), Some(ev)) = (embed(a), embed(b), embed(v)) else {
        return false;
    };
    in_cone(&[ea, eb], &ev, tol)
}

pub fn hull_cone(space: &ConeSpace, hat: &Measure, depth: usize) -> ConvexCone {
    hull_cone_mode(space, hat, depth, HullMode::Auto)
}

pub fn hull_cone_mode(space: &ConeSpace, hat: &Measure, depth: usize, mode: HullMode) -> ConvexCone {
    let atoms: Vec<Point> = hat.atoms().iter().map(|a| a.point.clone()).collect();
    ConvexCone::generated(space, &atoms, depth, mode)
}

pub fn fluctuating_cone(space: &ConeSpace, hat: &Measure) -> ConvexCone {
    fluctuating_cone_with(space, hat, ESCAPE_TOL, DEFAULT_DEPTH)
}

pub fn fluctuating_cone_with(space: &ConeSpace, hat: &Measure, tol: f64, depth: usize) -> ConvexCone {
    let hull = hull_cone(space, hat, depth);
    let sec = escape_sections(space, hat, tol);
    let escape = Some((hat.clone(), tol));
    if sec.exact {
        match &hull.shape {
            ConeShape::Region(region) => {
                let mut c = region.intersect(&sec.link_zeros);
                c.normalize(space.link());
                return region_cone(space, c, escape);
            }
            ConeShape::Faces { spine, pages } => {
                let pages = pages
                    .iter()
                    .filter(|(p, _)| sec.link_zeros.vertices.contains(p))
                    .map(|(p, rows)| (*p, rows.clone()))
                    .collect();
                return faces_from(space, spine.clone(), pages, escape, true);
            }
            ConeShape::Sampled => {}
        }
    }
    let mut gens: Vec<Point> = Vec::new();
    for g in hull.generators.iter().chain(&sec.samples) {
        if escape_membership(space, hat, g, tol) && hull.contains(g) {
            push_unique(space, &mut gens, g.clone());
        }
    }
    ConvexCone {
        ambient: space.clone(),
        generators: gens,
        closure_depth: hull.closure_depth,
        exact: false,
        shape: ConeShape::Sampled,
        tol: HULL_TOL,
        escape,
    }
}

/// Ordering used to pick resolving directions: higher strata first, then
/// lower vertex or edge id, lower link parameter, and lexicographically
/// larger spine coordinates (so `e₁` precedes `−e₁` and `e₂`).
fn resolving_order(space: &ConeSpace, a: &Point, b: &Point) -> Ordering {
    let key = |p: &Point| -> (usize, usize, f64) {
        match space.stratum_of(p).stratum {
            Stratum::Spine => (0, 0, 0.0),
            Stratum::Ray(v) => (1, v.0, 0.0),
            Stratum::Sector(e) => match p.dir() {
                Some(GraphPoint::Edge { t, .. }) => (2, e.0, t),
                _ => (2, e.0, 0.0),
            },
        }
    };
    let (ka, kb) = (key(a), key(b));
    kb.0.cmp(&ka.0)
        .then(ka.1.cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
        .then_with(|| {
            for (x, y) in a.u.iter().zip(&b.u) {
                match y.total_cmp(x) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
}

/// Unit member of `cone` lying in the highest-dimensional stratum it meets.
pub fn resolving_direction(cone: &ConvexCone) -> Result<Point> {
    let space = &cone.ambient;
    let mut candidates: Vec<Point> = cone
        .generators
        .iter()
        .filter_map(|g| g.normalized())
        .filter(|g| cone.contains(g))
        .collect();
    if let ConeShape::Faces { pages, .. } = &cone.shape {
        // The sum of a page's generators is interior to that page.
        for (&p, rows) in pages {
            let mut acc = vec![0.0; space.spine_dim() + 1];
            for r in rows {
                acc.iter_mut().zip(r).for_each(|(a, x)| *a += x);
            }
            let r = acc.pop().unwrap_or(0.0);
            if let Some(q) = Point::new(acc, GraphPoint::Vertex(p), r).normalized() {
                candidates.push(q);
            }
        }
    }
    candidates
        .into_iter()
        .min_by(|a, b| resolving_order(space, a, b))
        .ok_or(StrataError::EmptyCone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frechet::Atom;
    use crate::gallery;
    use crate::metric_graph::EdgeId;

    fn ray(i: usize, r: f64) -> Point {
        Point::new(vec![], GraphPoint::Vertex(VertexId(i)), r)
    }

    fn spider_measure() -> Measure {
        Measure::new(vec![Atom::new(ray(0, 1.0), 0.5), Atom::new(ray(1, 1.0), 0.5)]).unwrap()
    }

    fn kale_measure(x: &ConeSpace) -> Measure {
        let c = 7.0;
        Measure::uniform(
            (0..3)
                .map(|i| Point::new(vec![], gallery::kale_point(x, i as f64 * c / 3.0), 1.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn spider_escape_cone() {
        let x = gallery::spider(3);
        let m = spider_measure();
        assert!(escape_membership(&x, &m, &ray(0, 1.0), ESCAPE_TOL));
        assert!(escape_membership(&x, &m, &ray(1, 3.0), ESCAPE_TOL));
        assert!(!escape_membership(&x, &m, &ray(2, 1.0), ESCAPE_TOL));
        assert!(escape_membership(&x, &m, &x.apex(), ESCAPE_TOL));
        let sec = escape_sections(&x, &m, ESCAPE_TOL);
        assert!(sec.exact);
        assert_eq!(
            sec.link_zeros.vertices.iter().copied().collect::<Vec<_>>(),
            vec![VertexId(0), VertexId(1)]
        );
        assert_eq!(sec.sphere_components_met(&x), Some(2));
    }

    #[test]
    fn euclidean_escape_is_everything() {
        let x = gallery::euclidean(1);
        let m = Measure::uniform(vec![Point::spine(vec![1.0]), Point::spine(vec![-1.0])]).unwrap();
        assert!(escape_membership(&x, &m, &Point::spine(vec![1.0]), ESCAPE_TOL));
        assert!(escape_membership(&x, &m, &Point::spine(vec![-2.0]), ESCAPE_TOL));
        let h = hull_cone(&x, &m, DEFAULT_DEPTH);
        assert!(h.contains(&Point::spine(vec![-0.3])));
        assert!(h.exact);
    }

    #[test]
    fn kale_is_sticky() {
        let x = gallery::kale(7.0).unwrap();
        let m = kale_measure(&x);
        let sec = escape_sections(&x, &m, ESCAPE_TOL);
        assert!(sec.link_zeros.is_empty());
        let h = hull_cone(&x, &m, DEFAULT_DEPTH);
        assert!((h.exact_region().unwrap().measure() - 7.0).abs() < 1e-12);
        let c = fluctuating_cone(&x, &m);
        assert!(c.is_trivial());
        assert_eq!(resolving_direction(&c), Err(StrataError::EmptyCone));
    }

    #[test]
    fn spider_hull_and_fluctuating_cone() {
        let x = gallery::spider(3);
        let m = spider_measure();
        let h = hull_cone(&x, &m, DEFAULT_DEPTH);
        assert!(h.contains(&ray(0, 2.0)) && h.contains(&ray(1, 1.0)));
        assert!(!h.contains(&ray(2, 1.0)));
        let c = fluctuating_cone(&x, &m);
        assert!(c.contains(&ray(0, 1.0)) && c.contains(&ray(1, 1.0)));
        assert!(!c.contains(&ray(2, 1.0)));
        assert_eq!(resolving_direction(&c).unwrap(), ray(0, 1.0));
    }

    #[test]
    fn open_book_cones() {
        let x = gallery::open_book(3, 1);
        let m = Measure::new(vec![
            Atom::new(Point::new(vec![-1.0], GraphPoint::Vertex(VertexId(0)), 1.0), 0.5),
            Atom::new(Point::new(vec![1.0], GraphPoint::Vertex(VertexId(1)), 1.0), 0.5),
        ])
        .unwrap();
        let c = fluctuating_cone(&x, &m);
        assert!(c.exact);
        // the geodesic between the atoms passes through the apex, so the
        // hull is the two rays and misses the spine
        assert!(!c.contains(&Point::spine(vec![1.0])));
        assert!(c.contains(&Point::new(vec![-1.0], GraphPoint::Vertex(VertexId(0)), 1.0)));
        assert!(!c.contains(&Point::new(vec![0.0], GraphPoint::Vertex(VertexId(2)), 1.0)));
        let z = resolving_direction(&c).unwrap();
        assert_eq!(z.dir(), Some(GraphPoint::Vertex(VertexId(0))));

        let sticky = Measure::uniform(vec![
            Point::new(vec![-1.0], GraphPoint::Vertex(VertexId(0)), 1.0),
            Point::new(vec![1.0], GraphPoint::Vertex(VertexId(1)), 1.0),
            Point::new(vec![0.0], GraphPoint::Vertex(VertexId(2)), 1.0),
        ])
        .unwrap();
        let c = fluctuating_cone(&x, &sticky);
        assert!(!c.meets_link());
        assert_eq!(resolving_direction(&c).unwrap(), Point::spine(vec![1.0]));
    }

    #[test]
    fn sector_generator_is_preferred() {
        let x = gallery::kale(7.0).unwrap();
        let m = Measure::uniform(vec![
            Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0),
            Point::new(vec![], gallery::kale_point(&x, 3.5), 1.0),
        ])
        .unwrap();
        // the atoms are 3.5 > π apart both ways: the mean is the apex and the
        // hull is the line through them
        let c = fluctuating_cone(&x, &m);
        let z = resolving_direction(&c).unwrap();
        assert!(matches!(x.stratum_of(&z).stratum, Stratum::Sector(_)));
        assert_eq!(z.dir().map(|g| matches!(g, GraphPoint::Edge { edge: EdgeId(0), .. })), Some(true));
    }

    #[test]
    fn approximate_hull_agrees_with_region_on_spider_and_kale() {
        let x = gallery::kale(7.0).unwrap();
        let m = Measure::uniform(vec![
            Point::new(vec![], gallery::kale_point(&x, 0.0), 1.0),
            Point::new(vec![], gallery::kale_point(&x, 2.0), 2.0),
        ])
        .unwrap();
        let exact = hull_cone(&x, &m, DEFAULT_DEPTH);
        let approx = hull_cone_mode(&x, &m, DEFAULT_DEPTH, HullMode::Approximate);
        for k in 0..=70 {
            let v = Point::new(vec![], gallery::kale_point(&x, k as f64 * 0.1), 1.0);
            assert_eq!(exact.contains(&v), approx.contains(&v), "position {}", k as f64 * 0.1);
        }
    }

    #[test]
    fn sampled_hull_with_spine() {
        // ℝ × kale: hull of two vectors is their flat sector
        let link = gallery::kale(7.0).unwrap().link().clone();
        let x = ConeSpace::new(1, link).unwrap();
        let g0 = gallery::kale_point(&x, 0.0);
        let g1 = gallery::kale_point(&x, 1.0);
        let a = Point::new(vec![1.0], g0, 1.0);
        let b = Point::new(vec![-1.0], g1, 1.0);
        let h = ConvexCone::generated(&x, &[a.clone(), b.clone()], DEFAULT_DEPTH, HullMode::Auto);
        assert!(!h.exact);
        let m = x.geodesic_point(&a, &b, 0.3).unwrap();
        assert!(h.contains(&m));
        assert!(!h.contains(&Point::new(vec![0.0], gallery::kale_point(&x, 3.0), 1.0)));
        assert!(!h.contains(&Point::spine(vec![1.0])));
    }
}
