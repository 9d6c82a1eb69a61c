//! Piecewise closed form of the pull `g ↦ Σ wᵢ rᵢ cos θᵢ(g)` of a measure on
//! the link, where `θᵢ(g)` is the truncated link angle to atom `i`.
//!
//! Along an edge each `θᵢ` is the minimum of a few affine arms capped at π,
//! so between breakpoints the pull equals `b·(cos t, sin t) − κ`.

use std::f64::consts::PI;

use crate::cone_space::ConeSpace;
use crate::frechet::Measure;
use crate::metric_graph::{EdgeId, GraphPoint, VertexId, TIE_TOL};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub b: [f64; 2],
    pub kappa: f64,
}

impl Piece {
    pub fn pull(&self, t: f64) -> f64 {
        self.b[0] * t.cos() + self.b[1] * t.sin() - self.kappa
    }

    fn b_norm(&self) -> f64 {
        self.b[0].hypot(self.b[1])
    }

    /// Parameters in `[lo, hi]` where `b·e(t)` peaks, if any.
    fn peaks(&self) -> Vec<f64> {
        if self.b_norm() == 0.0 {
            return Vec::new();
        }
        let beta = self.b[1].atan2(self.b[0]);
        let mut k = ((self.lo - beta) / (2.0 * PI)).ceil();
        let mut out = Vec::new();
        loop {
            let t = beta + 2.0 * PI * k;
            if t > self.hi {
                break;
            }
            out.push(t);
            k += 1.0;
        }
        out
    }

    /// Maximizer of the pull on the closed piece.
    pub fn best(&self) -> (f64, f64) {
        let mut best = (self.lo, self.pull(self.lo));
        for t in self.peaks().into_iter().chain([self.hi]) {
            let v = self.pull(t);
            if v > best.1 {
                best = (t, v);
            }
        }
        best
    }

    /// Parameters where the pull vanishes to within `tol`, as closed
    /// intervals (degenerate for isolated zeros). Only the analytic
    /// stationary points and the piece ends are tested, so a zero is never
    /// widened into an interval by the tolerance.
    pub fn zeros(&self, tol: f64) -> Vec<(f64, f64)> {
        if self.b_norm() + self.kappa.abs() <= tol {
            return vec![(self.lo, self.hi)];
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut push = |t: f64| {
            if !out.iter().any(|iv| (iv.0 - t).abs() <= TIE_TOL) {
                out.push((t, t));
            }
        };
        for t in self.peaks() {
            if self.pull(t).abs() <= tol {
                push(t);
            }
        }
        for t in [self.lo, self.hi] {
            if self.pull(t).abs() <= tol {
                push(t);
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

pub(crate) struct LinkProfile {
    pub pieces: Vec<Vec<Piece>>,
    pub vertex_pull: Vec<f64>,
}

struct AtomView {
    weight: f64,
    r: f64,
    on_edge: Option<(EdgeId, f64)>,
    vertex_dist: Vec<f64>,
}

impl LinkProfile {
    pub fn new(space: &ConeSpace, measure: &Measure) -> Self {
        let link = space.link();
        let atoms: Vec<AtomView> = measure
            .atoms()
            .iter()
            .filter_map(|a| {
                let c = a.point.cone.as_ref()?;
                Some(AtomView {
                    weight: a.weight,
                    r: c.r,
                    on_edge: match c.dir {
                        GraphPoint::Edge { edge, t } => Some((edge, t)),
                        GraphPoint::Vertex(_) => None,
                    },
                    vertex_dist: link.vertex_distances(&c.dir),
                })
            })
            .collect();
        let vertex_pull = link
            .vertices()
            .map(|v| {
                atoms
                    .iter()
                    .map(|a| a.weight * a.r * a.vertex_dist[v.0].min(PI).cos())
                    .sum()
            })
            .collect();
        let pieces = link
            .edge_ids()
            .map(|e| edge_pieces(space, e, &atoms))
            .collect();
        LinkProfile {
            pieces,
            vertex_pull,
        }
    }

    pub fn vertex(&self, v: VertexId) -> f64 {
        self.vertex_pull[v.0]
    }

    pub fn at(&self, space: &ConeSpace, g: &GraphPoint) -> f64 {
        match *g {
            GraphPoint::Vertex(v) => self.vertex(v),
            GraphPoint::Edge { edge, t } => {
                let list = &self.pieces[edge.0];
                let p = list
                    .iter()
                    .find(|p| t <= p.hi)
                    .unwrap_or_else(|| list.last().expect("edges have a piece"));
                debug_assert!(t <= space.link().edge(edge).length);
                p.pull(t)
            }
        }
    }
}

fn edge_pieces(space: &ConeSpace, e: EdgeId, atoms: &[AtomView]) -> Vec<Piece> {
    let edge = space.link().edge(e);
    let len = edge.length;
    let mut cuts = vec![0.0, len];
    for a in atoms {
        let da = a.vertex_dist[edge.from.0];
        let db = a.vertex_dist[edge.to.0];
        cuts.push(0.5 * (len + db - da));
        cuts.push(PI - da);
        cuts.push(len + db - PI);
        if let Some((ae, ti)) = a.on_edge {
            if ae == e {
                cuts.extend([ti, ti - PI, ti + PI, 0.5 * (ti - da), 0.5 * (len + db + ti)]);
            }
        }
    }
    cuts.retain(|t| t.is_finite() && *t >= 0.0 && *t <= len);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= TIE_TOL);
    *cuts.last_mut().expect("edge has endpoints") = len;
    cuts[0] = 0.0;
    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let mut b = [0.0, 0.0];
            let mut kappa = 0.0;
            for a in atoms {
                let da = a.vertex_dist[edge.from.0];
                let db = a.vertex_dist[edge.to.0];
                // (arm length at mid, virtual position of the atom)
                let mut arms = vec![(mid + da, -da), (len - mid + db, len + db)];
                if let Some((ae, ti)) = a.on_edge {
                    if ae == e {
                        arms.push(((mid - ti).abs(), ti));
                    }
                }
                let (arm, phi) = arms
                    .into_iter()
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .expect("at least two arms");
                let wr = a.weight * a.r;
                if arm >= PI {
                    kappa += wr;
                } else {
                    b[0] += wr * phi.cos();
                    b[1] += wr * phi.sin();
                }
            }
            Piece { lo, hi, b, kappa }
        })
        .collect()
}
