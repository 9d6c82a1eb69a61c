//! Command implementations. Each command turns a validated experiment into a
//! JSON result, an optional CSV table and an optional failure message.

use serde_json::{json, Value};
use strata_core::cones::{
    escape_sections, fluctuating_cone_with, hull_cone, resolving_direction, ConeShape, ConvexCone, DEFAULT_DEPTH,
    ESCAPE_TOL,
};
use strata_core::devissage::collapse;
use strata_core::fixtures::{self, Fixture};
use strata_core::frechet::{
    check_localized, direction_sample, directional_derivative, frechet_mean, frechet_mean_oracle_with,
    pushforward_to_tangent, Atom, Measure,
};
use strata_core::gallery::GallerySpec;
use strata_core::properties::{run_all, Budget, ORACLE_STEP};
use strata_core::sampling::chunk_rng;
use strata_core::{ConeSpace, Exec, Point, Stratum, StrataError};

use crate::config::{resolve_vector, Experiment};
use crate::error::{CliError, Result};
use crate::report::{self, float, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Mean,
    Grad,
    Escape,
    Fluct,
    Collapse,
    Verify,
    Perturb,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Mean => "mean",
            Command::Grad => "grad",
            Command::Escape => "escape",
            Command::Fluct => "fluct",
            Command::Collapse => "collapse",
            Command::Verify => "verify",
            Command::Perturb => "perturb",
        }
    }
}

/// Settings after merging command-line flags over the config file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub result: Value,
    pub table: Option<Table>,
    /// Set when a check failed; the report is still written.
    pub failure: Option<String>,
}

impl Output {
    fn new(result: Value, table: Table) -> Output {
        Output {
            result,
            table: Some(table),
            failure: None,
        }
    }
}

pub fn run(cmd: Command, exp: Option<&Experiment>, s: Settings) -> Result<Output> {
    if cmd == Command::Verify {
        return verify(exp, s);
    }
    let exp = exp.ok_or_else(|| CliError::invalid("config", format!("`{}` needs a config file", cmd.name())))?;
    match cmd {
        Command::Validate => validate(exp),
        Command::Mean => mean(exp, s),
        Command::Grad => grad(exp),
        Command::Escape => escape(exp, s),
        Command::Fluct => fluct(exp, s),
        Command::Collapse => run_collapse(exp),
        Command::Perturb => perturb(exp, s),
        Command::Verify => unreachable!("handled above"),
    }
}

fn input_table(exp: &Experiment) -> Table {
    let atoms: Vec<(f64, Point)> = exp.measure.atoms().iter().map(|a| (a.weight, a.point.clone())).collect();
    report::atom_table(&exp.space, &atoms)
}

fn stratum_label(space: &ConeSpace, s: Stratum) -> Value {
    let link = space.link();
    match s {
        Stratum::Spine => json!({ "kind": "spine", "id": null }),
        Stratum::Ray(v) => json!({ "kind": "ray", "id": link.vertex_label(v) }),
        Stratum::Sector(e) => json!({ "kind": "sector", "id": link.edge_label(e) }),
    }
}

fn validate(exp: &Experiment) -> Result<Output> {
    let space = &exp.space;
    let loc = check_localized(space, &exp.measure)?;
    let strata: Vec<Value> = exp
        .measure
        .atoms()
        .iter()
        .map(|a| report::stratum(space, &space.stratum_of(&a.point)))
        .collect();
    let result = json!({
        "space": report::space(space),
        "atoms": exp.measure.len(),
        "atom_strata": strata,
        "localization": {
            "punctual": loc.punctual,
            "retractable": loc.retractable,
            "ambiguous_atoms": loc.ambiguous_atoms,
        },
    });
    Ok(Output::new(result, input_table(exp)))
}

fn mean(exp: &Experiment, s: Settings) -> Result<Output> {
    let space = &exp.space;
    let rep = frechet_mean(space, &exp.measure)?;
    let candidates: Vec<Value> = rep
        .candidates
        .iter()
        .map(|c| {
            json!({
                "stratum": stratum_label(space, c.stratum),
                "point": report::point(space, &c.point),
                "value": c.value,
            })
        })
        .collect();
    let mut result = json!({
        "mean": report::point(space, &rep.mean),
        "value": rep.value,
        "stratum": report::stratum(space, &rep.stratum),
        "candidates": candidates,
        "min_directional_derivative": rep.min_directional_derivative,
        "first_order_ok": rep.first_order_ok,
        "localization": {
            "punctual": rep.localization.punctual,
            "retractable": rep.localization.retractable,
            "ambiguous_atoms": rep.localization.ambiguous_atoms,
        },
    });
    let mut failure = None;
    if s.oracle {
        let step = exp.file.oracle_step.unwrap_or(ORACLE_STEP);
        if !(step.is_finite() && step > 0.0) {
            return Err(CliError::invalid("oracle_step", format!("{step} is not positive")));
        }
        let o = frechet_mean_oracle_with(space, &exp.measure, step, Exec::Sequential);
        let d = space.distance(&o, &rep.mean);
        let agree = d <= 2.0 * step;
        if !agree {
            failure = Some(format!("oracle disagrees with the solver by {d:e} (tolerance {:e})", 2.0 * step));
        }
        result["oracle"] = json!({
            "point": report::point(space, &o),
            "distance": d,
            "step": step,
            "tolerance": 2.0 * step,
            "agree": agree,
        });
    }
    Ok(Output {
        failure,
        ..Output::new(result, input_table(exp))
    })
}

fn grad(exp: &Experiment) -> Result<Output> {
    let space = &exp.space;
    let p = frechet_mean(space, &exp.measure)?.mean;
    let tc = space.tangent_cone(&p);
    let dirs = if exp.file.directions.is_empty() {
        direction_sample(&tc.space, 4)
    } else {
        exp.file
            .directions
            .iter()
            .enumerate()
            .map(|(i, v)| resolve_vector(&tc.space, v, &format!("directions[{i}]")))
            .collect::<Result<_>>()?
    };
    let mut table = Table::new(["index", "derivative"]);
    let mut rows = Vec::with_capacity(dirs.len());
    let mut min = f64::INFINITY;
    for (i, v) in dirs.iter().enumerate() {
        let d = directional_derivative(space, &exp.measure, &p, v)?;
        min = min.min(d);
        table.rows.push(vec![i.to_string(), float(d)]);
        rows.push(json!({ "direction": report::point(&tc.space, v), "derivative": d }));
    }
    let result = json!({
        "at": report::point(space, &p),
        "tangent": report::space(&tc.space),
        "directions": rows,
        "min": if dirs.is_empty() { Value::Null } else { json!(min) },
    });
    Ok(Output::new(result, table))
}

fn tangent_measure(exp: &Experiment) -> Result<(Point, ConeSpace, Measure)> {
    let p = frechet_mean(&exp.space, &exp.measure)?.mean;
    let (tc, hat) = pushforward_to_tangent(&exp.space, &exp.measure, &p)?;
    Ok((p, tc.space, hat))
}

fn tangent_table(space: &ConeSpace, hat: &Measure) -> Table {
    let atoms: Vec<(f64, Point)> = hat.atoms().iter().map(|a| (a.weight, a.point.clone())).collect();
    report::atom_table(space, &atoms)
}

fn escape(exp: &Experiment, s: Settings) -> Result<Output> {
    let (p, t, hat) = tangent_measure(exp)?;
    let es = escape_sections(&t, &hat, s.tol);
    let result = json!({
        "mean": report::point(&exp.space, &p),
        "tangent": report::space(&t),
        "tol": s.tol,
        "exact": es.exact,
        "spine_center": es.spine_center,
        "link_zeros": if es.exact { report::region(&t, &es.link_zeros) } else { Value::Null },
        "sphere_components_met": es.sphere_components_met(&t),
        "samples": report::points(&t, &es.samples),
    });
    Ok(Output::new(result, tangent_table(&t, &hat)))
}

fn cone(c: &ConvexCone) -> Value {
    let space = &c.ambient;
    let link = space.link();
    let shape = match &c.shape {
        ConeShape::Region(r) => json!({ "kind": "region", "region": report::region(space, r) }),
        ConeShape::Faces { spine, pages } => {
            let pages: Vec<Value> = pages
                .iter()
                .map(|(v, rows)| json!({ "vertex": link.vertex_label(*v), "generators": rows }))
                .collect();
            json!({ "kind": "faces", "spine": spine, "pages": pages })
        }
        ConeShape::Sampled => json!({ "kind": "sampled" }),
    };
    json!({
        "shape": shape,
        "exact": c.exact,
        "closure_depth": c.closure_depth,
        "trivial": c.is_trivial(),
        "meets_link": c.meets_link(),
        "generators": report::points(space, &c.generators),
    })
}

fn resolving(c: &ConvexCone) -> Result<Option<Point>> {
    match resolving_direction(c) {
        Ok(z) => Ok(Some(z)),
        Err(StrataError::EmptyCone) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn fluct(exp: &Experiment, s: Settings) -> Result<Output> {
    let (p, t, hat) = tangent_measure(exp)?;
    let c = fluctuating_cone_with(&t, &hat, s.tol, DEFAULT_DEPTH);
    let z = resolving(&c)?;
    let result = json!({
        "mean": report::point(&exp.space, &p),
        "tangent": report::space(&t),
        "tol": s.tol,
        "hull": cone(&hull_cone(&t, &hat, DEFAULT_DEPTH)),
        "fluctuating": cone(&c),
        "resolving_direction": z.map(|z| report::point(&t, &z)),
    });
    Ok(Output::new(result, tangent_table(&t, &hat)))
}

fn run_collapse(exp: &Experiment) -> Result<Output> {
    let cm = collapse(&exp.space, &exp.measure)?;
    let tr = &cm.trace;
    let m = cm.m();
    let steps: Vec<Value> = tr
        .steps
        .iter()
        .map(|st| {
            json!({
                "direction": report::point(&st.stage.source, &st.stage.z),
                "target": report::space(&st.stage.target),
                "codim_before": st.codim_before,
                "codim_after": st.codim_after,
                "mean_offset": st.mean_offset,
                "images_contained": st.images_contained,
                "expanded": st.expanded,
                "ties": st.stage.ties,
            })
        })
        .collect();
    let mut table = Table::new(
        ["index".to_string(), "weight".to_string()]
            .into_iter()
            .chain((0..m).map(|i| format!("y{i}"))),
    );
    let mut atoms = Vec::new();
    let mut image_mean = vec![0.0; m];
    for (i, a) in tr.initial.measure.atoms().iter().enumerate() {
        let y = cm.eval(&a.point);
        image_mean.iter_mut().zip(&y).for_each(|(acc, x)| *acc += a.weight * x);
        let mut row = vec![i.to_string(), float(a.weight)];
        row.extend(y.iter().map(|x| float(*x)));
        table.rows.push(row);
        atoms.push(json!({
            "weight": a.weight,
            "tangent": report::point(&tr.initial.space, &a.point),
            "image": y,
        }));
    }
    let result = json!({
        "mean": report::point(&exp.space, &tr.mean.mean),
        "tangent": report::space(&tr.initial.space),
        "m": m,
        "codims": tr.codims(),
        "termination_index": tr.termination_index(),
        "idempotent": tr.idempotent,
        "steps": steps,
        "atoms": atoms,
        "image_mean": image_mean,
    });
    Ok(Output::new(result, table))
}

fn verify(exp: Option<&Experiment>, s: Settings) -> Result<Output> {
    let mut all = fixtures::all();
    if let Some(exp) = exp {
        all.push(Fixture {
            name: "config",
            spec: GallerySpec::ConeOver {
                spine_dim: exp.space.spine_dim(),
                link: exp.space.link().clone(),
            },
            space: exp.space.clone(),
            measure: exp.measure.clone(),
        });
    }
    let budget = Budget::default();
    let outcomes = run_all(&all, budget, s.seed, Exec::default())?;
    let mut table = Table::new(["suite", "fixture", "status", "samples", "worst"]);
    let (mut pass, mut vacuous, mut fail) = (0, 0, 0);
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let status = match o.status {
                strata_core::devissage::Status::Pass => {
                    pass += 1;
                    "pass"
                }
                strata_core::devissage::Status::VacuousPass => {
                    vacuous += 1;
                    "vacuous_pass"
                }
                strata_core::devissage::Status::Fail => {
                    fail += 1;
                    "fail"
                }
            };
            table.rows.push(vec![
                o.suite.to_string(),
                o.fixture.to_string(),
                status.to_string(),
                o.samples.to_string(),
                float(o.worst),
            ]);
            json!({
                "suite": o.suite,
                "fixture": o.fixture,
                "status": status,
                "samples": o.samples,
                "worst": o.worst,
            })
        })
        .collect();
    let result = json!({
        "budget": { "triples": budget.triples, "pairs": budget.pairs, "gradients": budget.gradients },
        "fixtures": all.iter().map(|f| f.name).collect::<Vec<_>>(),
        "counts": { "pass": pass, "vacuous_pass": vacuous, "fail": fail },
        "outcomes": rows,
    });
    Ok(Output {
        result,
        table: Some(table),
        failure: (fail > 0).then(|| format!("{fail} of {} property checks failed", outcomes.len())),
    })
}

/// Angle from `v` to the nearest sampled member of `c`.
fn angle_to_cone(c: &ConvexCone, v: &Point, seed: u64) -> Option<f64> {
    if c.is_trivial() || v.norm() == 0.0 {
        return None;
    }
    if c.contains(v) {
        return Some(0.0);
    }
    let mut rng = chunk_rng(seed, "perturb", 0);
    let members = c.sample_members(&mut rng, 256);
    c.generators
        .iter()
        .chain(&members)
        .filter(|g| g.norm() > 0.0)
        .map(|g| c.ambient.angle(v, g))
        .reduce(f64::min)
}

fn perturb(exp: &Experiment, s: Settings) -> Result<Output> {
    let spec = exp
        .file
        .perturb
        .as_ref()
        .ok_or_else(|| CliError::invalid("perturb", "missing; expected {\"epsilon\": x, \"direction\": vector}"))?;
    let eps = spec.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::invalid("perturb.epsilon", format!("{eps} is not in (0, 1)")));
    }
    let space = &exp.space;
    let (p, t, hat) = tangent_measure(exp)?;
    let c = fluctuating_cone_with(&t, &hat, s.tol, DEFAULT_DEPTH);
    let dir = match &spec.direction {
        Some(v) => resolve_vector(&t, v, "perturb.direction")?,
        None => resolving(&c)?.ok_or_else(|| {
            CliError::invalid("perturb.direction", "no direction given and the fluctuating cone is trivial")
        })?,
    };
    let x = space.shoot(&p, &dir, 1.0)?;
    let mut atoms: Vec<Atom> = exp
        .measure
        .atoms()
        .iter()
        .map(|a| Atom::new(a.point.clone(), (1.0 - eps) * a.weight))
        .collect();
    atoms.push(Atom::new(x.clone(), eps));
    let moved = frechet_mean(space, &Measure::new(atoms)?)?.mean;
    let disp = space.log(&p, &moved)?;
    let norm = disp.norm();
    let result = json!({
        "epsilon": eps,
        "direction": report::point(&t, &dir),
        "mass_at": report::point(space, &x),
        "mean_before": report::point(space, &p),
        "mean_after": report::point(space, &moved),
        "displacement": report::point(&t, &disp),
        "displacement_norm": norm,
        "rate": norm / eps,
        "angle_to_direction": if norm > 0.0 && dir.norm() > 0.0 { json!(t.angle(&disp, &dir)) } else { Value::Null },
        "angle_to_cone": angle_to_cone(&c, &disp, s.seed),
        "cone_trivial": c.is_trivial(),
    });
    Ok(Output::new(result, tangent_table(&t, &hat)))
}

pub fn default_tol() -> f64 {
    ESCAPE_TOL
}
