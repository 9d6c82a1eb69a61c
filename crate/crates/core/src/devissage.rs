//! Iterated limit logs along resolving directions, and the collapse map
//! they compose to.

use rand::Rng;
use serde::Serialize;

use crate::cone_space::{ConeSpace, Point, TangentCone};
use crate::cones::{fluctuating_cone, resolving_direction, ConvexCone, HullMode, DEFAULT_DEPTH};
use crate::error::{Result, StrataError};
use crate::frechet::{frechet_mean, pushforward_to_tangent, Measure, MeanReport};
use crate::limit_log::LimitStage;
use crate::nnls::in_cone;
use crate::sampling;

pub const MEAN_TOL: f64 = 1e-7;

/// State of the iteration: a tangent space, a measure with mean at its
/// apex, the working fluctuating cone and the chosen resolving direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ravel {
    pub space: ConeSpace,
    pub measure: Measure,
    pub working_cone: ConvexCone,
    pub resolving: Option<Point>,
}

impl Ravel {
    /// Ravel on a space whose measure already has its mean at the apex.
    pub fn at_apex(space: ConeSpace, measure: Measure) -> Ravel {
        let working_cone = fluctuating_cone(&space, &measure);
        let resolving = resolving_direction(&working_cone).ok();
        Ravel {
            space,
            measure,
            working_cone,
            resolving,
        }
    }

    pub fn is_resolved(&self) -> bool {
        !self.working_cone.meets_link()
    }

    /// Codimension of the apex.
    pub fn codim(&self) -> usize {
        self.space.codim(&self.space.apex())
    }
}

/// Mean of `measure` on `space` and the ravel on the tangent cone there.
pub fn initial_ravel(space: &ConeSpace, measure: &Measure) -> Result<(MeanReport, TangentCone, Ravel)> {
    let report = frechet_mean(space, measure)?;
    if !report.localization.retractable {
        return Err(StrataError::NotRetractable(report.localization.ambiguous_atoms.clone()));
    }
    let (tc, hat) = pushforward_to_tangent(space, measure, &report.mean)?;
    let ravel = Ravel::at_apex(tc.space.clone(), hat);
    Ok((report, tc, ravel))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub stage: LimitStage,
    pub codim_before: usize,
    pub codim_after: usize,
    /// Norm of the recomputed mean of the pushforward.
    pub mean_offset: f64,
    /// Whether the images of the old working cone's generators lie in the
    /// recomputed fluctuating cone.
    pub images_contained: bool,
    /// Whether the recomputed cone has generators outside the cone spanned
    /// by those images.
    pub expanded: bool,
}

pub fn devissage_step(ravel: &Ravel) -> Result<(Ravel, Step)> {
    let codim = ravel.codim();
    let z = match &ravel.resolving {
        Some(z) if !ravel.is_resolved() => z.clone(),
        _ => {
            let stage = LimitStage::new(&ravel.space, &ravel.space.apex());
            let step = Step {
                stage,
                codim_before: codim,
                codim_after: codim,
                mean_offset: frechet_mean(&ravel.space, &ravel.measure)?.mean.norm(),
                images_contained: true,
                expanded: false,
            };
            return Ok((ravel.clone(), step));
        }
    };
    let mut stage = LimitStage::new(&ravel.space, &z);
    let (measure, ties) = stage.pushforward(&ravel.measure);
    stage.ties = ties;
    let target = stage.target.clone();
    let mean_offset = frechet_mean(&target, &measure)?.mean.norm();
    let next = Ravel::at_apex(target.clone(), measure);
    let images: Vec<Point> = ravel.working_cone.generators.iter().map(|g| stage.apply(g)).collect();
    let images_contained = images.iter().all(|v| next.working_cone.contains(v));
    let spanned = ConvexCone::generated(&target, &images, DEFAULT_DEPTH, HullMode::Auto);
    let expanded = next.working_cone.generators.iter().any(|g| !spanned.contains(g));
    let step = Step {
        stage,
        codim_before: codim,
        codim_after: next.codim(),
        mean_offset,
        images_contained,
        expanded,
    };
    Ok((next, step))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DevissageTrace {
    pub mean: MeanReport,
    pub tangent: TangentCone,
    pub initial: Ravel,
    /// Non-identity steps in order.
    pub steps: Vec<Step>,
    pub terminal: Ravel,
    /// Whether one further step leaves the terminal ravel unchanged.
    pub idempotent: bool,
}

impl DevissageTrace {
    /// Dimension of the terminal tangent space.
    pub fn m(&self) -> usize {
        self.terminal.space.spine_dim()
    }

    /// Index of the last stage, or `None` when the initial ravel is resolved.
    pub fn termination_index(&self) -> Option<usize> {
        self.steps.len().checked_sub(1)
    }

    pub fn codims(&self) -> Vec<usize> {
        std::iter::once(self.initial.codim())
            .chain(self.steps.iter().map(|s| s.codim_after))
            .collect()
    }
}

pub fn run_devissage(space: &ConeSpace, measure: &Measure) -> Result<DevissageTrace> {
    let (mean, tangent, initial) = initial_ravel(space, measure)?;
    let cap = initial.codim() + 2;
    let mut ravel = initial.clone();
    let mut steps = Vec::new();
    while !ravel.is_resolved() {
        if steps.len() >= cap {
            return Err(StrataError::IterationBound(cap));
        }
        let (next, step) = devissage_step(&ravel)?;
        steps.push(step);
        ravel = next;
    }
    let (again, extra) = devissage_step(&ravel)?;
    let idempotent = extra.stage.is_identity() && again == ravel;
    Ok(DevissageTrace {
        mean,
        tangent,
        initial,
        steps,
        terminal: ravel,
        idempotent,
    })
}

/// Composite of the stages followed by projection onto the terminal spine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseMap {
    pub trace: DevissageTrace,
}

impl CollapseMap {
    pub fn m(&self) -> usize {
        self.trace.m()
    }

    /// Composite limit log, before projection.
    pub fn composite(&self, v: &Point) -> Point {
        self.trace.steps.iter().fold(v.clone(), |acc, s| s.stage.apply(&acc))
    }

    pub fn eval(&self, v: &Point) -> Vec<f64> {
        terminal_projection(&self.composite(v))
    }
}

/// Nearest point of the terminal spine: `d² = |u − u′|² + r²` is minimized
/// by dropping the cone component.
pub fn terminal_projection(w: &Point) -> Vec<f64> {
    w.u.clone()
}

pub fn collapse(space: &ConeSpace, measure: &Measure) -> Result<CollapseMap> {
    Ok(CollapseMap {
        trace: run_devissage(space, measure)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    VacuousPass,
}

impl Status {
    pub fn ok(self) -> bool {
        self != Status::Fail
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub samples: usize,
    /// Largest violation margin seen (negative or zero when passing).
    pub worst: f64,
}

impl Check {
    fn new(name: &'static str, samples: usize, worst: f64) -> Check {
        Check {
            name,
            status: Status::from_bool(worst <= 0.0),
            samples,
            worst,
        }
    }

    fn vacuous(name: &'static str) -> Check {
        Check {
            name,
            status: Status::VacuousPass,
            samples: 0,
            worst: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseReport {
    pub m: usize,
    pub checks: Vec<Check>,
}

impl CollapseReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status.ok())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Checks the collapse properties on the tangent measure of the trace.
pub fn verify_collapse<R: Rng + ?Sized>(cm: &CollapseMap, budget: usize, rng: &mut R) -> CollapseReport {
    let tr = &cm.trace;
    let space = &tr.initial.space;
    let hat = &tr.initial.measure;
    let cone = &tr.initial.working_cone;
    let images: Vec<(f64, Vec<f64>)> = hat.atoms().iter().map(|a| (a.weight, cm.eval(&a.point))).collect();
    let mut checks = Vec::new();

    let mut mean = vec![0.0; cm.m()];
    for (w, y) in &images {
        mean.iter_mut().zip(y).for_each(|(m, x)| *m += w * x);
    }
    checks.push(Check::new("pushforward_mean_zero", 1, dot(&mean, &mean).sqrt() - MEAN_TOL));

    let members: Vec<Point> = cone
        .sample_members(rng, budget)
        .into_iter()
        .map(|p| p.scaled(rng.random_range(0.1..2.0)))
        .collect();
    if members.is_empty() {
        checks.push(Check::vacuous("isometry_on_cone"));
        checks.push(Check::vacuous("pairing_arbitrary"));
        checks.push(Check::vacuous("pairing_support"));
    } else {
        let mut worst = f64::NEG_INFINITY;
        for (i, u) in members.iter().enumerate() {
            let v = &members[(i * 7 + 3) % members.len()];
            let d = space.distance(u, v);
            let ld = dist(&cm.eval(u), &cm.eval(v));
            worst = worst.max((1.0 - 1e-6) * d - ld);
            worst = worst.max((space.inner(u, v) - dot(&cm.eval(u), &cm.eval(v))).abs() - 1e-8);
        }
        checks.push(Check::new("isometry_on_cone", members.len(), worst));

        let mut worst = f64::NEG_INFINITY;
        for u in &members {
            let v = sampling::random_vector(space, rng, 2.0);
            worst = worst.max((space.inner(u, &v) - dot(&cm.eval(u), &cm.eval(&v))).abs() - 1e-8);
        }
        checks.push(Check::new("pairing_arbitrary", members.len(), worst));

        let mut worst = f64::NEG_INFINITY;
        for u in &members {
            let lu = cm.eval(u);
            for (a, (_, y)) in hat.atoms().iter().zip(&images) {
                worst = worst.max((space.inner(u, &a.point) - dot(&lu, y)).abs() - 1e-8);
            }
        }
        checks.push(Check::new("pairing_support", members.len() * hat.len(), worst));
    }

    let mut exact = true;
    let mut count = 0;
    for _ in 0..budget {
        let v = sampling::random_vector(space, rng, 2.0);
        let lv = cm.eval(&v);
        for t in [0.0, 0.5, 2.0] {
            let lt = cm.eval(&v.scaled(t));
            let want: Vec<f64> = lv.iter().map(|x| t * x).collect();
            exact &= lt == want;
            count += 1;
        }
    }
    checks.push(Check {
        name: "homogeneity",
        status: Status::from_bool(exact),
        samples: count,
        worst: if exact { 0.0 } else { 1.0 },
    });

    let mut worst = f64::NEG_INFINITY;
    for _ in 0..budget {
        let v = sampling::random_vector(space, rng, 2.0);
        let w = sampling::nearby(space, &v, 1e-2, rng);
        worst = worst.max(dist(&cm.eval(&v), &cm.eval(&w)) - space.distance(&v, &w) - 1e-6);
    }
    checks.push(Check::new("lipschitz", budget, worst));

    let gens: Vec<Vec<f64>> = images.iter().map(|(_, y)| y.clone()).filter(|y| dot(y, y) > 0.0).collect();
    let mut worst = f64::NEG_INFINITY;
    for g in &gens {
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let n = dot(g, g).sqrt();
        let r = crate::nnls::nnls(&gens, &neg).residual / n.max(1.0);
        worst = worst.max(r - 1e-8);
        debug_assert_eq!(r <= 1e-8, in_cone(&gens, &neg, 1e-8));
    }
    checks.push(if gens.is_empty() {
        Check::vacuous("hull_subspace")
    } else {
        Check::new("hull_subspace", gens.len(), worst)
    });

    CollapseReport { m: cm.m(), checks }
}
