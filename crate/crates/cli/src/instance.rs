//! Line-oriented instance files.
//!
//! The first line is a JSON header object; every further nonempty line is
//! one shape:
//!
//! ```text
//! {"format":"geodiam","version":1,"kind":"segments","slope_table":[[1.0,0.0],[0.0,1.0]],"seed":7}
//! {"a":[0.0,0.0],"b":[2.0,0.0],"slope":1}
//! {"a":[1.0,-1.0],"b":[1.0,1.0],"slope":2}
//! ```
//!
//! Header fields: `format` (always `"geodiam"`), `version` (1), `kind`
//! (`unit_disks`, `unit_squares`, `segments`, `triangles` or `polylines`),
//! and optionally `slope_table` (list of direction vectors, segments only;
//! the default table is horizontal, vertical, diagonal), `expected`
//! (`{"question": "diam_at_most", "delta": Δ, "answer": bool}` or
//! `{"question": "is_clique", "answer": bool}`), `seed` and `generator`.
//!
//! Shape records: `[x, y]` centers for disks and squares, `{"a","b","slope"}`
//! for segments, three `[x, y]` vertices for triangles and a list of at
//! least two `[x, y]` vertices for polylines. Coordinates are JSON numbers
//! and round-trip exactly.

use geodiam_core::generators::{Expected, Question};
use geodiam_core::{GeoError, Point, Shape, SlopeTable};
use serde_json::{json, Map, Value};

/// Kind of the shapes of an instance file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Unit disks given by their centers.
    UnitDisks,
    /// Axis-aligned unit squares given by their centers.
    UnitSquares,
    /// Segments with slope classes.
    Segments,
    /// Triangles.
    Triangles,
    /// Polygonal chains.
    Polylines,
}

impl Kind {
    /// All kinds.
    pub const ALL: [Kind; 5] = [Kind::UnitDisks, Kind::UnitSquares, Kind::Segments, Kind::Triangles, Kind::Polylines];

    /// Name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Kind::UnitDisks => "unit_disks",
            Kind::UnitSquares => "unit_squares",
            Kind::Segments => "segments",
            Kind::Triangles => "triangles",
            Kind::Polylines => "polylines",
        }
    }

    /// Parses a kind name.
    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Kind of a shape.
    pub fn of(shape: &Shape) -> Kind {
        match shape {
            Shape::UnitDisk { .. } => Kind::UnitDisks,
            Shape::UnitSquare { .. } => Kind::UnitSquares,
            Shape::Segment { .. } => Kind::Segments,
            Shape::Triangle { .. } => Kind::Triangles,
            Shape::Polyline { .. } => Kind::Polylines,
        }
    }
}

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    /// Kind of every shape.
    pub kind: Kind,
    /// The shapes.
    pub shapes: Vec<Shape>,
    /// Slope table for segments (`None`: the default table).
    pub slope_table: Option<SlopeTable>,
    /// Expected answer, if known.
    pub expected: Option<Expected>,
    /// Seed the instance was generated from.
    pub seed: Option<u64>,
    /// Generator description.
    pub generator: Option<String>,
}

impl InstanceFile {
    /// An instance without metadata.
    pub fn new(kind: Kind, shapes: Vec<Shape>) -> Self {
        InstanceFile {
            kind,
            shapes,
            slope_table: None,
            expected: None,
            seed: None,
            generator: None,
        }
    }

    /// The slope table segments are validated against.
    pub fn table(&self) -> SlopeTable {
        self.slope_table.clone().unwrap_or_default()
    }
}

fn perr(line: usize, field: &str, message: impl Into<String>) -> GeoError {
    GeoError::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn point(v: &Value, line: usize, field: &str) -> Result<Point, GeoError> {
    let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| perr(line, field, "expected [x, y]"))?;
    let c = |i: usize| {
        arr[i]
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| perr(line, field, "coordinate is not a finite number"))
    };
    Ok(Point::new(c(0)?, c(1)?))
}

fn points(v: &Value, line: usize, field: &str) -> Result<Vec<Point>, GeoError> {
    v.as_array()
        .ok_or_else(|| perr(line, field, "expected a list of [x, y] points"))?
        .iter()
        .map(|p| point(p, line, field))
        .collect()
}

fn parse_shape(v: &Value, kind: Kind, line: usize, table: &SlopeTable) -> Result<Shape, GeoError> {
    let shape = match kind {
        Kind::UnitDisks => Shape::UnitDisk { center: point(v, line, "center")? },
        Kind::UnitSquares => Shape::UnitSquare { center: point(v, line, "center")? },
        Kind::Segments => {
            let obj = v.as_object().ok_or_else(|| perr(line, "shape", "segments kind needs {\"a\",\"b\",\"slope\"} records"))?;
            let a = point(obj.get("a").ok_or_else(|| perr(line, "a", "missing"))?, line, "a")?;
            let b = point(obj.get("b").ok_or_else(|| perr(line, "b", "missing"))?, line, "b")?;
            let slope = obj
                .get("slope")
                .ok_or_else(|| perr(line, "slope", "missing"))?
                .as_u64()
                .filter(|&s| s >= 1 && s <= u32::MAX as u64)
                .ok_or_else(|| perr(line, "slope", "expected a positive integer"))?;
            Shape::Segment { a, b, slope_class: slope as u32 }
        }
        Kind::Triangles => {
            let p = points(v, line, "vertices")?;
            if p.len() != 3 {
                return Err(perr(line, "vertices", "a triangle needs three vertices"));
            }
            Shape::Triangle { a: p[0], b: p[1], c: p[2] }
        }
        Kind::Polylines => Shape::Polyline { vertices: points(v, line, "vertices")? },
    };
    let field = match kind {
        Kind::Segments => "slope",
        Kind::UnitDisks | Kind::UnitSquares => "center",
        _ => "vertices",
    };
    shape
        .validate(line, (kind == Kind::Segments).then_some(table))
        .map_err(|e| perr(line, field, e.to_string()))?;
    Ok(shape)
}

/// Parses an instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile, GeoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| perr(1, "file", format!("not UTF-8: {e}")))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "header", "empty file"))?;
    let hl = hl + 1;
    let header: Value = serde_json::from_str(header).map_err(|e| perr(hl, "header", e.to_string()))?;
    let h = header.as_object().ok_or_else(|| perr(hl, "header", "expected an object"))?;
    if h.get("format").and_then(Value::as_str) != Some("geodiam") {
        return Err(perr(hl, "format", "expected \"geodiam\""));
    }
    if h.get("version").and_then(Value::as_u64) != Some(1) {
        return Err(perr(hl, "version", "expected 1"));
    }
    let kind_name = h.get("kind").and_then(Value::as_str).ok_or_else(|| perr(hl, "kind", "missing"))?;
    let kind = Kind::from_name(kind_name).ok_or_else(|| perr(hl, "kind", format!("unknown kind `{kind_name}`")))?;
    let slope_table = match h.get("slope_table") {
        None | Some(Value::Null) => None,
        Some(v) => {
            if kind != Kind::Segments {
                return Err(perr(hl, "slope_table", "only segment instances carry a slope table"));
            }
            let dirs = points(v, hl, "slope_table")?;
            Some(SlopeTable::new(dirs).map_err(|e| perr(hl, "slope_table", e.to_string()))?)
        }
    };
    let expected = match h.get("expected") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let question = match v.get("question").and_then(Value::as_str) {
                Some("diam_at_most") => {
                    let delta = v
                        .get("delta")
                        .and_then(Value::as_u64)
                        .filter(|&d| d <= u32::MAX as u64)
                        .ok_or_else(|| perr(hl, "expected.delta", "expected a nonnegative integer"))?;
                    Question::DiameterAtMost(delta as u32)
                }
                Some("is_clique") => Question::IsClique,
                _ => return Err(perr(hl, "expected.question", "expected \"diam_at_most\" or \"is_clique\"")),
            };
            let answer = v
                .get("answer")
                .and_then(Value::as_bool)
                .ok_or_else(|| perr(hl, "expected.answer", "expected a boolean"))?;
            Some(Expected { question, answer })
        }
    };
    let seed = match h.get("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| perr(hl, "seed", "expected a nonnegative integer"))?),
    };
    let generator = match h.get("generator") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_str().ok_or_else(|| perr(hl, "generator", "expected a string"))?.to_string()),
    };
    let table = slope_table.clone().unwrap_or_default();
    let mut shapes = Vec::new();
    for (i, l) in lines {
        let line = i + 1;
        let v: Value = serde_json::from_str(l).map_err(|e| perr(line, "shape", e.to_string()))?;
        shapes.push(parse_shape(&v, kind, line, &table)?);
    }
    Ok(InstanceFile {
        kind,
        shapes,
        slope_table,
        expected,
        seed,
        generator,
    })
}

fn pt(p: Point) -> Value {
    json!([p.x, p.y])
}

/// Serializes an instance; fails on shapes of a different kind or
/// non-finite coordinates.
pub fn serialize_instance(inst: &InstanceFile) -> Result<Vec<u8>, GeoError> {
    let mut h = Map::new();
    h.insert("format".into(), json!("geodiam"));
    h.insert("version".into(), json!(1));
    h.insert("kind".into(), json!(inst.kind.name()));
    if let Some(t) = &inst.slope_table {
        h.insert("slope_table".into(), Value::Array(t.directions().iter().map(|&d| pt(d)).collect()));
    }
    if let Some(e) = inst.expected {
        let v = match e.question {
            Question::DiameterAtMost(d) => json!({"question": "diam_at_most", "delta": d, "answer": e.answer}),
            Question::IsClique => json!({"question": "is_clique", "answer": e.answer}),
        };
        h.insert("expected".into(), v);
    }
    if let Some(s) = inst.seed {
        h.insert("seed".into(), json!(s));
    }
    if let Some(g) = &inst.generator {
        h.insert("generator".into(), json!(g));
    }
    let mut out = serde_json::to_string(&Value::Object(h)).expect("header serializes");
    out.push('\n');
    for (i, s) in inst.shapes.iter().enumerate() {
        if Kind::of(s) != inst.kind {
            return Err(GeoError::InvalidShape {
                index: i,
                reason: format!("{} in a {} instance", s.kind_name(), inst.kind.name()),
            });
        }
        if !s.points().iter().all(|p| p.is_finite()) {
            return Err(GeoError::InvalidShape {
                index: i,
                reason: "non-finite coordinate".into(),
            });
        }
        let v = match s {
            Shape::UnitDisk { center } | Shape::UnitSquare { center } => pt(*center),
            Shape::Segment { a, b, slope_class } => json!({"a": pt(*a), "b": pt(*b), "slope": slope_class}),
            Shape::Triangle { a, b, c } => json!([pt(*a), pt(*b), pt(*c)]),
            Shape::Polyline { vertices } => Value::Array(vertices.iter().map(|&p| pt(p)).collect()),
        };
        out.push_str(&serde_json::to_string(&v).expect("shape serializes"));
        out.push('\n');
    }
    Ok(out.into_bytes())
}
