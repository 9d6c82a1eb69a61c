//! Randomized property suites over the bundled fixtures. Every sample draws
//! from its own generator stream, so outcomes do not depend on the
//! execution mode.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cone_space::{ConeSpace, Point};
use crate::cones::{escape_membership, escape_sections, ESCAPE_TOL};
use crate::devissage::{collapse, run_devissage, verify_collapse, CollapseMap, Status, MEAN_TOL};
use crate::error::{Result, StrataError};
use crate::exec::Exec;
use crate::fixtures::Fixture;
use crate::frechet::{apex_derivative, directional_derivative, frechet_mean, frechet_mean_oracle_with, frechet_value};
use crate::limit_log::LimitStage;
use crate::sampling::{chunk_rng, random_unit, random_vector};

pub const ORACLE_STEP: f64 = 1e-3;
pub const ORACLE_TOL: f64 = 2e-3;
pub const FD_MIN_RADIUS: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub suite: &'static str,
    pub fixture: &'static str,
    pub status: Status,
    pub samples: usize,
    /// Largest excess over the tolerance (nonpositive when passing).
    pub worst: f64,
}

impl Outcome {
    fn new(suite: &'static str, fixture: &'static str, samples: usize, worst: f64) -> Outcome {
        let status = if samples == 0 {
            Status::VacuousPass
        } else if worst <= 0.0 {
            Status::Pass
        } else {
            Status::Fail
        };
        Outcome {
            suite,
            fixture,
            status,
            samples,
            worst: if samples == 0 { 0.0 } else { worst },
        }
    }

    fn flag(suite: &'static str, fixture: &'static str, samples: usize, ok: bool) -> Outcome {
        Outcome::new(suite, fixture, samples.max(1), if ok { 0.0 } else { 1.0 })
    }
}

/// Sample counts for the suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Budget {
    pub triples: usize,
    pub pairs: usize,
    pub gradients: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            triples: 1000,
            pairs: 100,
            gradients: 100,
        }
    }
}

fn fold_max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Tangent cone at the mean and the tangent measure, when the logs exist.
fn tangent(f: &Fixture) -> Result<(ConeSpace, crate::frechet::Measure)> {
    let (_, _, ravel) = crate::devissage::initial_ravel(&f.space, &f.measure)?;
    Ok((ravel.space, ravel.measure))
}

/// Limit logs along random unit `Z` in the tangent cone at the mean:
/// angles do not grow, angles to `Z` are kept, norms are kept.
pub fn contraction(f: &Fixture, n: usize, seed: u64, exec: Exec) -> Result<Outcome> {
    let (t, _) = tangent(f)?;
    let worst = exec.map_range(n, |i| {
        let mut rng = chunk_rng(seed, "contraction", i as u64);
        let z = random_unit(&t, &mut rng);
        let v = random_vector(&t, &mut rng, 2.0);
        let w = random_vector(&t, &mut rng, 2.0);
        let st = LimitStage::new(&t, &z);
        let tg = &st.target;
        let (lv, lw, lz) = (st.apply(&v), st.apply(&w), st.apply(&z));
        let grow = tg.angle(&lv, &lw) - t.angle(&v, &w) - 1e-9;
        let keep = (tg.angle(&lv, &lz) - t.angle(&v, &z)).abs() - 1e-12;
        let norm = (lv.norm() - v.norm()).abs() - 1e-12;
        grow.max(keep).max(norm)
    });
    Ok(Outcome::new("contraction", f.name, n, fold_max(worst)))
}

/// Each stage's pushforward has its mean at the target apex.
pub fn mean_preservation(f: &Fixture) -> Result<Outcome> {
    let tr = run_devissage(&f.space, &f.measure)?;
    let worst = fold_max(tr.steps.iter().map(|s| s.mean_offset - MEAN_TOL));
    Ok(Outcome::new("mean_preservation", f.name, tr.steps.len(), worst))
}

fn collapse_checks(f: &Fixture, n: usize, seed: u64) -> Result<(CollapseMap, crate::devissage::CollapseReport)> {
    let cm = collapse(&f.space, &f.measure)?;
    let report = verify_collapse(&cm, n, &mut chunk_rng(seed, "collapse", 0));
    Ok((cm, report))
}

/// Named checks of the collapse report, as outcomes.
pub fn collapse_outcomes(f: &Fixture, n: usize, seed: u64) -> Result<Vec<Outcome>> {
    let (_, report) = collapse_checks(f, n, seed)?;
    Ok(report
        .checks
        .iter()
        .map(|c| Outcome {
            suite: c.name,
            fixture: f.name,
            status: c.status,
            samples: c.samples,
            worst: c.worst,
        })
        .collect())
}

/// Directional derivative against one-sided finite differences along
/// short geodesics, with Richardson extrapolation over steps 1e-3 and 1e-4.
///
/// Base points off the spine keep radius at least `FD_MIN_RADIUS`: the
/// curvature of `F` near the apex scales like `1/r`, so steps of 1e-3 are
/// not small there. Segments along which some atom's link angle reaches π
/// are skipped, since `F` is only C¹ across that point.
pub fn gradient_fd(f: &Fixture, n: usize, seed: u64, exec: Exec) -> Outcome {
    let (x, m) = (&f.space, &f.measure);
    let draws = exec.map_range(4 * n, |i| -> Option<f64> {
        let mut rng = chunk_rng(seed, "gradient_fd", i as u64);
        let mut p = random_vector(x, &mut rng, 2.0);
        if let Some(c) = p.cone.as_mut() {
            c.r += FD_MIN_RADIUS;
        }
        let tc = x.tangent_cone(&p);
        let v = random_unit(&tc.space, &mut rng);
        let grad = directional_derivative(x, m, &p, &v).ok()?;
        let f0 = frechet_value(x, m, &p);
        let capped = |q: &Point| -> Vec<bool> {
            m.atoms()
                .iter()
                .map(|a| match (&q.cone, &a.point.cone) {
                    (Some(c), Some(d)) => x.link_angle(&c.dir, &d.dir) >= PI,
                    _ => false,
                })
                .collect()
        };
        let caps = capped(&p);
        let diff = |h: f64| -> Option<f64> {
            let q = x.shoot(&p, &v, h).ok()?;
            (capped(&q) == caps).then(|| (frechet_value(x, m, &q) - f0) / h)
        };
        let (d1, d2) = (diff(1e-3)?, diff(1e-4)?);
        let fd = (10.0 * d2 - d1) / 9.0;
        Some((grad - fd).abs() - 1e-5)
    });
    let valid: Vec<f64> = draws.into_iter().flatten().take(n).collect();
    Outcome::new("gradient_fd", f.name, valid.len(), fold_max(valid))
}

/// Midpoint convexity of the directional derivative on the tangent cone.
pub fn gradient_convexity(f: &Fixture, n: usize, seed: u64, exec: Exec) -> Result<Outcome> {
    let (t, hat) = tangent(f)?;
    let draws = exec.map_range(n, |i| -> Option<f64> {
        let mut rng = chunk_rng(seed, "gradient_convexity", i as u64);
        let v = random_vector(&t, &mut rng, 2.0);
        let w = random_vector(&t, &mut rng, 2.0);
        if t.angle(&v, &w) >= PI - 1e-12 {
            return None;
        }
        let mid = t.midpoint(&v, &w).ok()?;
        let g = |p: &Point| apex_derivative(&t, &hat, p);
        Some(g(&mid) - 0.5 * (g(&v) + g(&w)) - 1e-9)
    });
    let valid: Vec<f64> = draws.into_iter().flatten().collect();
    Ok(Outcome::new("gradient_convexity", f.name, valid.len(), fold_max(valid)))
}

/// Codimension drops at every stage and the number of stages is at most
/// the initial codimension; the terminal dimension is at most `dim X`.
pub fn codim_monotone(f: &Fixture) -> Result<Vec<Outcome>> {
    let tr = run_devissage(&f.space, &f.measure)?;
    let codims = tr.codims();
    let ok = codims.windows(2).all(|w| w[1] < w[0]) && tr.steps.len() <= codims[0];
    Ok(vec![
        Outcome::flag("codim_monotone", f.name, tr.steps.len(), ok),
        Outcome::flag("m_le_dim", f.name, 1, tr.m() <= f.space.dim()),
        Outcome::flag("idempotent", f.name, 1, tr.idempotent),
    ])
}

pub fn oracle_agreement(f: &Fixture, exec: Exec) -> Result<Outcome> {
    let exact = frechet_mean(&f.space, &f.measure)?.mean;
    let oracle = frechet_mean_oracle_with(&f.space, &f.measure, ORACLE_STEP, exec);
    Ok(Outcome::new(
        "oracle_agreement",
        f.name,
        1,
        f.space.distance(&exact, &oracle) - ORACLE_TOL,
    ))
}

/// Escape cone at the mean: geodesic convexity on sampled pairs, a single
/// component of its unit sphere, and the antipodal identity for every
/// antipodal pair among its representatives.
pub fn escape_structure(f: &Fixture, n: usize, seed: u64, exec: Exec) -> Result<Vec<Outcome>> {
    let (t, hat) = tangent(f)?;
    let sec = escape_sections(&t, &hat, ESCAPE_TOL);
    if !sec.exact {
        return Err(StrataError::NumericalFailure(format!(
            "{}: tangent measure is not centered",
            f.name
        )));
    }
    let draws = exec.map_range(n, |i| -> Option<f64> {
        let mut rng = chunk_rng(seed, "escape_convexity", i as u64);
        let v = sec.sample(&t, &mut rng)?;
        let w = sec.sample(&t, &mut rng)?;
        let mid = t.midpoint(&v, &w).ok()?;
        Some(if escape_membership(&t, &hat, &mid, 1e-8) { -1.0 } else { 1.0 })
    });
    let valid: Vec<f64> = draws.into_iter().flatten().collect();
    let convex = Outcome::new("escape_convexity", f.name, valid.len(), fold_max(valid));

    let components = sec.sphere_components_met(&t).unwrap_or(0);
    let single = Outcome::flag("escape_single_component", f.name, 1, components <= 1);

    let mut reps = sec.samples.clone();
    reps.extend(
        sec.link_zeros
            .breakpoints(t.link())
            .into_iter()
            .map(|g| Point::new(vec![0.0; t.spine_dim()], g, 1.0)),
    );
    let mut worst = f64::NEG_INFINITY;
    let mut triggered = 0;
    for (i, v) in reps.iter().enumerate() {
        for w in &reps[i + 1..] {
            if t.angle(v, w) < PI - 1e-12 {
                continue;
            }
            triggered += 1;
            for a in hat.atoms().iter().filter(|a| a.point.norm() > 0.0) {
                worst = worst.max((t.angle(v, &a.point) + t.angle(&a.point, w) - PI).abs() - 1e-8);
            }
        }
    }
    let antipodal = Outcome::new("escape_antipodal", f.name, triggered, worst);
    Ok(vec![convex, single, antipodal])
}

/// Limit logs along members of the fluctuating cone send escape directions
/// to escape directions, and every target spine axis escapes.
pub fn escape_preservation(f: &Fixture, n: usize, seed: u64) -> Result<Outcome> {
    let (t, hat) = tangent(f)?;
    let cone = crate::cones::fluctuating_cone(&t, &hat);
    let mut rng = chunk_rng(seed, "escape_preservation", 0);
    let zs = cone.sample_members(&mut rng, 8);
    let sec = escape_sections(&t, &hat, ESCAPE_TOL);
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for z in &zs {
        let st = LimitStage::new(&t, z);
        let (img, _) = st.pushforward(&hat);
        let tg = &st.target;
        for _ in 0..n.div_ceil(zs.len().max(1)) {
            if let Some(e) = sec.sample(&t, &mut rng) {
                count += 1;
                worst = worst.max(apex_derivative(tg, &img, &st.apply(&e)).abs() - 1e-8);
            }
        }
        if !st.is_identity() {
            for i in 0..tg.spine_dim() {
                for sign in [1.0, -1.0] {
                    let mut u = vec![0.0; tg.spine_dim()];
                    u[i] = sign;
                    count += 1;
                    let ok = escape_membership(tg, &img, &Point::spine(u), ESCAPE_TOL);
                    worst = worst.max(if ok { -1.0 } else { 1.0 });
                }
            }
        }
    }
    Ok(Outcome::new("escape_preservation", f.name, count, worst))
}

/// All suites on all given fixtures.
pub fn run_all(fixtures: &[Fixture], budget: Budget, seed: u64, exec: Exec) -> Result<Vec<Outcome>> {
    let per_fixture = exec.map_slice(fixtures, |f| -> Result<Vec<Outcome>> {
        // fixtures already fan out; keep the inner loops sequential
        let inner = Exec::Sequential;
        let mut out = vec![
            contraction(f, budget.triples, seed, inner)?,
            mean_preservation(f)?,
            gradient_fd(f, budget.gradients, seed, inner),
            gradient_convexity(f, budget.triples, seed, inner)?,
            oracle_agreement(f, inner)?,
            escape_preservation(f, budget.pairs, seed)?,
        ];
        out.extend(collapse_outcomes(f, budget.pairs, seed)?);
        out.extend(codim_monotone(f)?);
        out.extend(escape_structure(f, budget.pairs, seed, inner)?);
        Ok(out)
    });
    let mut out = Vec::new();
    for r in per_fixture {
        out.extend(r?);
    }
    Ok(out)
}
