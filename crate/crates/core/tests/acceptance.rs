//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strata_core::cones::fluctuating_cone;
use strata_core::devissage::{collapse, run_devissage, verify_collapse, Status};
use strata_core::fixtures::{self, Fixture};
use strata_core::frechet::{directional_derivative, frechet_mean, frechet_mean_oracle};
use strata_core::properties::{self, Budget, Outcome, ORACLE_STEP, ORACLE_TOL};
use strata_core::{gallery, Exec, GraphPoint, Point, VertexId};

const SEED: u64 = 0;

#[derive(Default)]
struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn outcomes(&mut self, outs: &[Outcome]) {
        for o in outs {
            self.check(
                o.status.ok(),
                format!("{}/{}: worst excess {:.3e} over {} samples", o.suite, o.fixture, o.worst, o.samples),
            );
        }
    }

    fn result<T, E: std::fmt::Debug>(&mut self, r: Result<T, E>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e:?}"));
                None
            }
        }
    }
}

fn ray(i: usize, r: f64) -> Point {
    Point::new(vec![], GraphPoint::Vertex(VertexId(i)), r)
}

fn each_fixture<F>(v: &mut Verdict, mut f: F)
where
    F: FnMut(&Fixture) -> Result<Vec<Outcome>, strata_core::StrataError>,
{
    for fx in fixtures::all() {
        if let Some(outs) = v.result(f(&fx), fx.name) {
            v.outcomes(&outs);
        }
    }
}

fn tripod_collapse() -> Verdict {
    let mut v = Verdict::default();
    let f = fixtures::tripod();
    let (x, m) = (&f.space, &f.measure);
    let Some(rep) = v.result(frechet_mean(x, m), "mean") else {
        return v;
    };
    v.check(rep.mean.norm() <= 1e-9 && rep.mean.cone.is_none(), format!("mean {:?}", rep.mean));
    let oracle = frechet_mean_oracle(x, m, ORACLE_STEP);
    v.check(x.distance(&rep.mean, &oracle) <= ORACLE_TOL, format!("oracle {oracle:?}"));
    for (i, want) in [(0, 0.0), (1, 0.0), (2, 1.0)] {
        let g = directional_derivative(x, m, &rep.mean, &ray(i, 1.0)).unwrap();
        v.check((g - want).abs() <= 1e-12, format!("∇F(ray{}) = {g}", i + 1));
    }
    let c = fluctuating_cone(x, m);
    v.check(
        c.contains(&ray(0, 1.0)) && c.contains(&ray(1, 1.0)) && !c.contains(&ray(2, 1.0)),
        "C is not the ray1 ∪ ray2 line",
    );
    let Some(cm) = v.result(collapse(x, m), "collapse") else {
        return v;
    };
    v.check(cm.m() == 1, format!("m = {}", cm.m()));
    let imgs: Vec<Vec<f64>> = m.atoms().iter().map(|a| cm.eval(&a.point)).collect();
    v.check(imgs == vec![vec![1.0], vec![-1.0]], format!("pushforward atoms {imgs:?}"));
    let mean: f64 = m.atoms().iter().zip(&imgs).map(|(a, y)| a.weight * y[0]).sum();
    v.check(mean.abs() <= 1e-12, format!("pushforward mean {mean}"));
    let pairing = cm.eval(&ray(2, 1.0))[0] * cm.eval(&ray(0, 1.0))[0];
    let source = x.inner(&ray(2, 1.0), &ray(0, 1.0));
    v.check(
        (source + 1.0).abs() <= 1e-12 && (pairing - source).abs() <= 1e-12,
        format!("⟨ray3, ray1⟩ = {source}, after collapse {pairing}"),
    );
    v
}

fn sticky_open_book() -> Verdict {
    let mut v = Verdict::default();
    let f = fixtures::open_book_pair();
    let (x, m) = (&f.space, &f.measure);
    if let Some(rep) = v.result(frechet_mean(x, m), "mean") {
        v.check(rep.mean == Point::spine(vec![0.0]), format!("mean {:?}", rep.mean));
    }
    let Some(cm) = v.result(collapse(x, m), "collapse") else {
        return v;
    };
    v.check(
        cm.trace.steps.is_empty(),
        format!("{} non-identity stage(s) before termination", cm.trace.steps.len()),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let projection = (0..200).all(|_| {
        let w = strata_core::sampling::random_vector(&cm.trace.initial.space, &mut rng, 2.0);
        cm.eval(&w) == w.u
    });
    v.check(projection, "L is not the spine projection");
    v.check(cm.m() == 1, format!("m = {}", cm.m()));
    v.check(cm.m() <= x.dim(), format!("m = {} > dim = {}", cm.m(), x.dim()));
    v
}

/// `∇F` at the apex along unit link directions, from arc-length distances
/// on the circle directly.
fn kale_gradient(c: f64, atoms: &[(f64, f64, f64)], pos: f64) -> f64 {
    -atoms
        .iter()
        .map(|&(p, r, w)| {
            let d = (pos - p).rem_euclid(c);
            w * r * d.min(c - d).min(PI).cos()
        })
        .sum::<f64>()
}

fn kale_stickiness() -> Verdict {
    let mut v = Verdict::default();
    let f = fixtures::kale_symmetric();
    let (x, m) = (&f.space, &f.measure);
    if let Some(rep) = v.result(frechet_mean(x, m), "mean") {
        v.check(rep.mean.norm() <= 1e-9, format!("mean {:?}", rep.mean));
    }
    let c = 7.0;
    let atoms: Vec<(f64, f64, f64)> = (0..3).map(|i| (c * i as f64 / 3.0, 1.0, 1.0 / 3.0)).collect();
    let n = (c / 1e-3).round() as usize;
    let min = (0..n)
        .map(|k| kale_gradient(c, &atoms, k as f64 * 1e-3))
        .fold(f64::INFINITY, f64::min);
    // cross-check the library derivative at the grid minimizer's neighborhood
    let lib = directional_derivative(x, m, &x.apex(), &Point::new(vec![], gallery::kale_point(x, 3.5 / 3.0), 1.0))
        .unwrap_or(f64::NAN);
    v.check(
        (lib - kale_gradient(c, &atoms, 3.5 / 3.0)).abs() <= 1e-12,
        format!("library ∇F disagrees with the grid oracle ({lib})"),
    );
    v.note(format!("grid min ∇F = {min:.6}"));
    v.check(min > 0.12, format!("grid min ∇F = {min:.6} is not > 0.12"));
    let cone = fluctuating_cone(x, m);
    v.check(cone.is_trivial(), "C ≠ {0}");
    if let Some(cm) = v.result(collapse(x, m), "collapse") {
        let rep = verify_collapse(&cm, 100, &mut ChaCha8Rng::seed_from_u64(SEED));
        v.check(rep.all_ok(), format!("{:?}", rep.checks));
        v.check(
            rep.get("isometry_on_cone").map(|c| c.status) == Some(Status::VacuousPass),
            "isometry check is not vacuous",
        );
    }
    v
}

fn contraction() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| {
        Ok(vec![properties::contraction(f, Budget::default().triples, SEED, Exec::default())?])
    });
    v
}

fn mean_preservation() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| Ok(vec![properties::mean_preservation(f)?]));
    v
}

fn isometry_on_cone() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| {
        let outs = properties::collapse_outcomes(f, Budget::default().pairs, SEED)?;
        Ok(outs
            .into_iter()
            .filter(|o| matches!(o.suite, "isometry_on_cone" | "pairing_arbitrary"))
            .collect())
    });
    v
}

fn gradient_fd() -> Verdict {
    let mut v = Verdict::default();
    let n = Budget::default().gradients;
    each_fixture(&mut v, |f| {
        let o = properties::gradient_fd(f, n, SEED, Exec::default());
        Ok(vec![o])
    });
    for f in fixtures::all() {
        let o = properties::gradient_fd(&f, n, SEED, Exec::default());
        v.check(o.samples >= n, format!("{}: only {} samples", f.name, o.samples));
    }
    v
}

fn gradient_convexity() -> Verdict {
    let mut v = Verdict::default();
    let n = Budget::default().triples;
    each_fixture(&mut v, |f| {
        let o = properties::gradient_convexity(f, n, SEED, Exec::default())?;
        Ok(vec![o])
    });
    v
}

fn codim_monotone() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, properties::codim_monotone);
    let f = fixtures::theta_pi();
    if let Some(tr) = v.result(run_devissage(&f.space, &f.measure), "theta") {
        v.check(
            tr.codims() == vec![2, 1, 0],
            format!("theta graph with edges π: codims {:?}", tr.codims()),
        );
    }
    let wide = fixtures::theta_two_stage();
    if let Ok(tr) = run_devissage(&wide.space, &wide.measure) {
        v.note(format!("theta graph with edges 3π/2: codims {:?}", tr.codims()));
    }
    v
}

fn hull_subspace() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| {
        let outs = properties::collapse_outcomes(f, Budget::default().pairs, SEED)?;
        Ok(outs.into_iter().filter(|o| o.suite == "hull_subspace").collect())
    });
    v
}

fn oracle_equivalence() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| Ok(vec![properties::oracle_agreement(f, Exec::default())?]));
    v
}

fn escape_structure() -> Verdict {
    let mut v = Verdict::default();
    each_fixture(&mut v, |f| {
        properties::escape_structure(f, Budget::default().pairs, SEED, Exec::default())
    });
    v
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("tripod collapse", tripod_collapse),
        ("sticky open book", sticky_open_book),
        ("kale stickiness", kale_stickiness),
        ("limit log contraction", contraction),
        ("mean preservation", mean_preservation),
        ("isometry on the fluctuating cone", isometry_on_cone),
        ("gradient vs finite differences", gradient_fd),
        ("convexity of the directional derivative", gradient_convexity),
        ("codimension monotonicity and termination", codim_monotone),
        ("hull is a subspace", hull_subspace),
        ("oracle equivalence", oracle_equivalence),
        ("escape cone structure", escape_structure),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let v = run();
        let ok = v.failures.is_empty();
        failed += usize::from(!ok);
        println!(
            "{} [{id:>2}] {title} ({:.2}s)",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        for n in &v.notes {
            println!("        note: {n}");
        }
        for f in &v.failures {
            println!("        {f}");
        }
    }
    println!(
        "acceptance: {failed} of {} criteria failed in {:.1}s",
        if filter.is_empty() { criteria.len() } else { filter.len() },
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
