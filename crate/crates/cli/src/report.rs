//! JSON and CSV rendering. Floats are written with 17 significant digits so
//! reports round-trip exactly.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};
use strata_core::cone_space::StratumId;
use strata_core::{ConeSpace, GraphPoint, Point, Stratum, SubgraphRegion};

pub fn float(x: f64) -> String {
    // print -0.0 as 0
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("writing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn link_point(space: &ConeSpace, g: &GraphPoint) -> Value {
    let link = space.link();
    match *g {
        GraphPoint::Vertex(v) => json!({ "vertex": link.vertex_label(v) }),
        GraphPoint::Edge { edge, t } => json!({ "edge": link.edge_label(edge), "t": t }),
    }
}

/// A point in the same shape as a configured atom.
pub fn point(space: &ConeSpace, p: &Point) -> Value {
    json!({
        "u": p.u,
        "point": p.cone.as_ref().map(|c| link_point(space, &c.dir)),
        "r": p.radius(),
    })
}

pub fn points(space: &ConeSpace, ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(|p| point(space, p)).collect())
}

pub fn space(space: &ConeSpace) -> Value {
    let link = space.link();
    let edges: Vec<Value> = link
        .edge_ids()
        .map(|e| {
            let edge = link.edge(e);
            json!({
                "id": link.edge_label(e),
                "from": link.vertex_label(edge.from),
                "to": link.vertex_label(edge.to),
                "length": edge.length,
            })
        })
        .collect();
    json!({
        "spine_dim": space.spine_dim(),
        "dim": space.dim(),
        "graph": {
            "vertices": link.vertices().map(|v| link.vertex_label(v)).collect::<Vec<_>>(),
            "edges": edges,
        },
    })
}

pub fn stratum(space: &ConeSpace, id: &StratumId) -> Value {
    let link = space.link();
    let (kind, label) = match id.stratum {
        Stratum::Spine => ("spine", None),
        Stratum::Ray(v) => ("ray", Some(link.vertex_label(v))),
        Stratum::Sector(e) => ("sector", Some(link.edge_label(e))),
    };
    json!({ "kind": kind, "id": label, "dim": id.dim, "codim": id.codim })
}

pub fn region(space: &ConeSpace, r: &SubgraphRegion) -> Value {
    let link = space.link();
    let intervals: Vec<Value> = r
        .intervals
        .iter()
        .flat_map(|(e, ivs)| {
            ivs.iter()
                .map(move |(a, b)| json!({ "edge": link.edge_label(*e), "from": a, "to": b }))
        })
        .collect();
    json!({
        "vertices": r.vertices.iter().map(|v| link.vertex_label(*v)).collect::<Vec<_>>(),
        "intervals": intervals,
    })
}

/// Rows for `--csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Table {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Atom table with spine coordinates, link point and radius as columns.
pub fn atom_table(space: &ConeSpace, atoms: &[(f64, Point)]) -> Table {
    let s = space.spine_dim();
    let mut t = Table::new(
        ["index".to_string(), "weight".to_string()]
            .into_iter()
            .chain((0..s).map(|i| format!("u{i}")))
            .chain(["vertex", "edge", "t", "r"].map(String::from)),
    );
    let link = space.link();
    for (i, (w, p)) in atoms.iter().enumerate() {
        let mut row = vec![i.to_string(), float(*w)];
        row.extend(p.u.iter().map(|x| float(*x)));
        match p.dir() {
            None => row.extend([String::new(), String::new(), String::new()]),
            Some(GraphPoint::Vertex(v)) => row.extend([link.vertex_label(v).to_string(), String::new(), String::new()]),
            Some(GraphPoint::Edge { edge, t }) => row.extend([String::new(), link.edge_label(edge).to_string(), float(t)]),
        }
        row.push(float(p.radius()));
        t.rows.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use strata_core::gallery;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&json!({ "x": 0.1, "n": 3, "nan": f64::NAN }));
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("\"nan\": null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn points_use_labels() {
        let k = gallery::kale(8.0).unwrap();
        let p = Point::new(vec![], gallery::kale_point(&k, 1.0), 2.0);
        assert_eq!(point(&k, &p), json!({ "u": [], "point": { "edge": "e1", "t": 3.0 }, "r": 2.0 }));
        let sp = gallery::spider(2);
        assert_eq!(point(&sp, &Point::apex(0))["point"], Value::Null);
    }

    #[test]
    fn csv_rows() {
        let b = gallery::open_book(2, 1);
        let p = Point::new(vec![1.0], GraphPoint::Vertex(strata_core::VertexId(1)), 0.5);
        let mut out = Vec::new();
        atom_table(&b, &[(1.0, p)]).write(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next(), Some("index,weight,u0,vertex,edge,t,r"));
        assert!(text.contains(",ray2,,,5.0000000000000000e-1"));
    }
}
