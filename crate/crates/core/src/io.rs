//! JSON documents for spaces and embedding maps.
//!
//! A space document looks like
//!
//! ```json
//! {"schema": "lls-space/1", "name": "toy",
//!  "points": [{"id": 0, "coords": [0.0, 0.0]}, …],
//!  "metric": {"kind": "euclidean"},
//!  "chron": {"kind": "edges", "edges": [[0, 1], …]},
//!  "causal": {"kind": "edges", "edges": […]},
//!  "tau": {"kind": "matrix", "values": [[0, 1.5, "inf"], …]},
//!  "ambient_complete": false}
//! ```
//!
//! Spaces generated from a closed form use `"rule:<tag>"` for the relations
//! and `"formula:<tag>"` for `τ` (and optionally the metric); they are
//! regenerated from the point coordinates on load. `+∞` is the string
//! `"inf"`. Errors carry a JSON pointer to the offending value.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmatrix::BitMatrix;
use crate::ext_real::ExtReal;
use crate::space::{Chart, Formula, Geometry, LocalisingAtlas, Metric, NeighbourhoodBasis, Obstacle, SpaceDescription, SpaceError};

pub const SPACE_SCHEMA: &str = "lls-space/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl IoError {
    fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

/// A `{"kind": …}` object with the payload fields of every kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<ExtReal>>>,
}

impl KindDoc {
    fn kind(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisDoc {
    MetricBalls { radii: Vec<f64> },
    Explicit { sets: Vec<Vec<Vec<usize>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub members: Vec<usize>,
    pub omega: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AtlasDoc {
    /// Balls of the given radius around every point, `ω` the longest step
    /// chain inside.
    MetricBalls { radius: f64, regular: bool },
    /// `charts[x]` is the chart of point `x`.
    Explicit { regular: bool, charts: Vec<ChartDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    pub points: Vec<PointDoc>,
    pub metric: KindDoc,
    pub chron: KindDoc,
    pub causal: KindDoc,
    pub tau: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<KindDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbhd_basis: Option<BasisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atlas: Option<AtlasDoc>,
    #[serde(default)]
    pub ambient_complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .filter_map(|s| match s {
            Segment::Seq { index } => Some(format!("/{index}")),
            Segment::Map { key } => Some(format!("/{}", escape(key))),
            Segment::Enum { .. } | Segment::Unknown => None,
        })
        .collect()
}

/// Typed deserialization with JSON-pointer diagnostics.
pub fn from_json<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        IoError::at(pointer, e.into_inner().to_string())
    })
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    std::fs::write(path, s).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_space(json: &str) -> Result<SpaceDescription, IoError> {
    let doc: SpaceDocument = from_json(json)?;
    space_from_document(&doc)
}

pub fn load_space_file(path: &Path) -> Result<SpaceDescription, IoError> {
    load_space(&read(path)?)
}

pub fn save_space(space: &SpaceDescription) -> String {
    serde_json::to_string_pretty(&space_to_document(space)).expect("serializable")
}

/// Prefix-tagged kind: `("rule", "fan")` for `"rule:fan"`.
fn split_kind(kind: &str) -> (&str, Option<&str>) {
    match kind.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (kind, None),
    }
}

fn edges_matrix(doc: &KindDoc, n: usize, ptr: &str) -> Result<BitMatrix, IoError> {
    let edges = doc.edges.as_ref().ok_or_else(|| IoError::at(format!("{ptr}/edges"), "missing edge list"))?;
    let mut m = BitMatrix::new(n);
    for (k, &[a, b]) in edges.iter().enumerate() {
        if a >= n || b >= n {
            return Err(IoError::at(format!("{ptr}/edges/{k}"), format!("point id out of range (n = {n})")));
        }
        m.set(a, b);
    }
    Ok(m)
}

fn square(values: &[Vec<ExtReal>], n: usize, ptr: &str) -> Result<Vec<f64>, IoError> {
    if values.len() != n {
        return Err(IoError::at(ptr, format!("expected {n} rows, found {}", values.len())));
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in values.iter().enumerate() {
        if row.len() != n {
            return Err(IoError::at(format!("{ptr}/{i}"), format!("expected {n} entries, found {}", row.len())));
        }
        for (j, v) in row.iter().enumerate() {
            let x = v.to_f64();
            if x.is_nan() || x < 0.0 {
                return Err(IoError::at(format!("{ptr}/{i}/{j}"), "value must be nonnegative"));
            }
            out.push(x);
        }
    }
    Ok(out)
}

pub fn space_from_document(doc: &SpaceDocument) -> Result<SpaceDescription, IoError> {
    if doc.schema != SPACE_SCHEMA {
        return Err(IoError::at("/schema", format!("unsupported schema {:?}, expected {SPACE_SCHEMA:?}", doc.schema)));
    }
    let n = doc.points.len();
    if n == 0 {
        return Err(IoError::at("/points", "no points"));
    }
    for (i, p) in doc.points.iter().enumerate() {
        if p.id != i {
            return Err(IoError::at(format!("/points/{i}/id"), format!("ids must be 0, 1, …; found {}", p.id)));
        }
    }
    let with_coords = doc.points.iter().filter(|p| p.coords.is_some()).count();
    let coords: Option<Vec<Vec<f64>>> = match with_coords {
        0 => None,
        c if c == n => {
            let dim = doc.points[0].coords.as_ref().map_or(0, Vec::len);
            for (i, p) in doc.points.iter().enumerate() {
                if p.coords.as_ref().map_or(0, Vec::len) != dim {
                    return Err(IoError::at(format!("/points/{i}/coords"), format!("expected {dim} coordinates")));
                }
            }
            Some(doc.points.iter().map(|p| p.coords.clone().unwrap_or_default()).collect())
        }
        _ => {
            let i = doc.points.iter().position(|p| p.coords.is_none()).unwrap_or(0);
            return Err(IoError::at(format!("/points/{i}"), "either every point or no point has coordinates"));
        }
    };

    let (tau_head, tau_tag) = split_kind(&doc.tau.kind);
    let mut space = match tau_head {
        "formula" => {
            let tag = tau_tag.unwrap_or_default();
            let formula = Formula::parse(tag).ok_or_else(|| IoError::at("/tau/kind", format!("unknown formula tag {tag:?}")))?;
            for (field, k) in [("chron", &doc.chron), ("causal", &doc.causal)] {
                if k.kind != format!("rule:{tag}") {
                    return Err(IoError::at(format!("/{field}/kind"), format!("a formula tau needs \"rule:{tag}\" relations")));
                }
            }
            match split_kind(&doc.metric.kind) {
                ("euclidean", None) => {}
                ("formula", Some(t)) if t == tag => {}
                _ => return Err(IoError::at("/metric/kind", "a formula space uses the euclidean metric")),
            }
            let coords = coords.ok_or_else(|| IoError::at("/points", "a formula space needs coordinates"))?;
            let geometry = Geometry {
                formula,
                obstacles: doc.obstacles.clone(),
                step_radius: doc.step_radius,
            };
            SpaceDescription::from_geometry(doc.name.clone(), coords, geometry)?
        }
        "matrix" => {
            let values = doc.tau.values.as_ref().ok_or_else(|| IoError::at("/tau/values", "missing matrix"))?;
            let tau = square(values, n, "/tau/values")?;
            let rel = |field: &str, k: &KindDoc| match k.kind.as_str() {
                "edges" => edges_matrix(k, n, &format!("/{field}")),
                other => Err(IoError::at(format!("/{field}/kind"), format!("expected \"edges\" with a matrix tau, found {other:?}"))),
            };
            let chron = rel("chron", &doc.chron)?;
            let causal = rel("causal", &doc.causal)?;
            let metric = match doc.metric.kind.as_str() {
                "euclidean" => Metric::Euclidean,
                "matrix" => {
                    let values = doc.metric.values.as_ref().ok_or_else(|| IoError::at("/metric/values", "missing matrix"))?;
                    Metric::Matrix(square(values, n, "/metric/values")?)
                }
                other => return Err(IoError::at("/metric/kind", format!("unknown metric kind {other:?}"))),
            };
            if matches!(metric, Metric::Euclidean) && coords.is_none() {
                return Err(IoError::at("/metric/kind", "the euclidean metric needs coordinates"));
            }
            let mut s = SpaceDescription::from_relations(doc.name.clone(), coords, metric, chron, causal, tau)?;
            if let Some(steps) = &doc.steps {
                if steps.kind != "edges" {
                    return Err(IoError::at("/steps/kind", "steps are an edge list"));
                }
                s = s.with_steps(edges_matrix(steps, n, "/steps")?)?;
            }
            s
        }
        _ => return Err(IoError::at("/tau/kind", format!("unknown tau kind {:?}", doc.tau.kind))),
    };
    if let Some(h) = doc.resolution {
        space = space.with_resolution(h);
    }
    if let Some(e) = &doc.extent {
        space = space.with_extent(e.clone());
    }
    if let Some(l) = doc.lipschitz {
        space = space.with_lipschitz(l);
    }
    space = space.with_ambient_complete(doc.ambient_complete);
    if let Some(b) = &doc.nbhd_basis {
        space = space.with_basis(match b {
            BasisDoc::MetricBalls { radii } => NeighbourhoodBasis::MetricBalls { radii: radii.clone() },
            BasisDoc::Explicit { sets } => {
                if sets.len() != n {
                    return Err(IoError::at("/nbhd_basis/sets", format!("expected one list per point ({n})")));
                }
                NeighbourhoodBasis::Explicit(sets.clone())
            }
        });
    }
    if let Some(a) = &doc.atlas {
        let atlas = match a {
            AtlasDoc::MetricBalls { radius, regular } => LocalisingAtlas::metric_balls(&space, *radius, *regular)?,
            AtlasDoc::Explicit { regular, charts } => {
                if charts.len() != n {
                    return Err(IoError::at("/atlas/charts", format!("expected one chart per point ({n})")));
                }
                let charts = charts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let m = c.members.len();
                        if c.omega.len() != m || c.omega.iter().any(|r| r.len() != m) {
                            return Err(IoError::at(format!("/atlas/charts/{i}/omega"), format!("expected a {m}x{m} matrix")));
                        }
                        Chart::new(i, c.members.clone(), c.omega.concat()).map_err(|e| IoError::at(format!("/atlas/charts/{i}"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                LocalisingAtlas::new(charts, *regular)?
            }
        };
        space = space.with_atlas(atlas);
    }
    Ok(space)
}

fn rows<T: Copy>(flat: &[T], n: usize) -> Vec<Vec<T>> {
    flat.chunks(n.max(1)).map(<[T]>::to_vec).collect()
}

fn edge_list(m: &BitMatrix) -> Vec<[usize; 2]> {
    (0..m.size()).flat_map(|i| m.row_iter(i).map(move |j| [i, j])).collect()
}

pub fn space_to_document(space: &SpaceDescription) -> SpaceDocument {
    let n = space.len();
    let points = space
        .ids()
        .map(|p| PointDoc {
            id: p.0,
            coords: space.coords(p).map(<[f64]>::to_vec),
        })
        .collect();
    let (metric, chron, causal, tau, steps, obstacles, step_radius) = match space.geometry() {
        Some(g) => {
            let tag = g.formula.tag();
            (
                KindDoc::kind("euclidean"),
                KindDoc::kind(format!("rule:{tag}")),
                KindDoc::kind(format!("rule:{tag}")),
                KindDoc::kind(format!("formula:{tag}")),
                None,
                g.obstacles.clone(),
                g.step_radius,
            )
        }
        None => {
            let metric = match space.metric() {
                Metric::Euclidean => KindDoc::kind("euclidean"),
                Metric::Matrix(m) => KindDoc {
                    values: Some(rows(&m.iter().map(|&v| ExtReal::from_f64(v).expect("validated on construction")).collect::<Vec<_>>(), n)),
                    ..KindDoc::kind("matrix")
                },
            };
            let edges = |m: &BitMatrix| KindDoc {
                edges: Some(edge_list(m)),
                ..KindDoc::kind("edges")
            };
            let mut default_steps = space.causal().clone();
            for i in 0..n {
                default_steps.unset(i, i);
            }
            let steps = (space.steps() != &default_steps).then(|| edges(space.steps()));
            let tau: Vec<ExtReal> = space.tau_matrix().iter().map(|&v| ExtReal::from_f64(v).expect("validated on construction")).collect();
            (
                metric,
                edges(space.chron()),
                edges(space.causal()),
                KindDoc {
                    values: Some(rows(&tau, n)),
                    ..KindDoc::kind("matrix")
                },
                steps,
                vec![],
                None,
            )
        }
    };
    let nbhd_basis = space.basis().map(|b| match b {
        NeighbourhoodBasis::MetricBalls { radii } => BasisDoc::MetricBalls { radii: radii.clone() },
        NeighbourhoodBasis::Explicit(sets) => BasisDoc::Explicit { sets: sets.clone() },
    });
    let atlas = space.atlas().map(|a| atlas_doc(space, a));
    SpaceDocument {
        schema: SPACE_SCHEMA.into(),
        name: space.name().into(),
        points,
        metric,
        chron,
        causal,
        tau,
        steps,
        obstacles,
        step_radius,
        nbhd_basis,
        atlas,
        ambient_complete: space.ambient_complete(),
        resolution: space.resolution(),
        extent: space.extent().map(<[[f64; 2]]>::to_vec),
        lipschitz: space.lipschitz(),
    }
}

/// The compact metric-ball form when it regenerates the atlas exactly
/// (radius `3h` for sampled spaces), the explicit charts otherwise.
fn atlas_doc(space: &SpaceDescription, atlas: &LocalisingAtlas) -> AtlasDoc {
    if let Some(h) = space.resolution() {
        let radius = 3.0 * h;
        if LocalisingAtlas::metric_balls(space, radius, atlas.regular).is_ok_and(|a| &a == atlas) {
            return AtlasDoc::MetricBalls {
                radius,
                regular: atlas.regular,
            };
        }
    }
    AtlasDoc::Explicit {
        regular: atlas.regular,
        charts: atlas
            .charts()
            .iter()
            .map(|c| ChartDoc {
                members: c.members.clone(),
                omega: rows(&c.omega, c.members.len()),
            })
            .collect(),
    }
}

/// Base-to-ambient id pairs, as `{"pairs": [[b, a], …]}` or a bare list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapDocument {
    Pairs { pairs: Vec<[usize; 2]> },
    Bare(Vec<[usize; 2]>),
}

impl MapDocument {
    pub fn pairs(&self) -> &[[usize; 2]] {
        match self {
            MapDocument::Pairs { pairs } | MapDocument::Bare(pairs) => pairs,
        }
    }
}

/// The embedding as a total list `ι(0), ι(1), …` of ambient ids.
pub fn load_map(json: &str, base_len: usize) -> Result<Vec<crate::space::PointId>, IoError> {
    let doc: MapDocument = from_json(json)?;
    let mut out = vec![None; base_len];
    for (k, &[b, a]) in doc.pairs().iter().enumerate() {
        let ptr = match doc {
            MapDocument::Pairs { .. } => format!("/pairs/{k}"),
            MapDocument::Bare(_) => format!("/{k}"),
        };
        if b >= base_len {
            return Err(IoError::at(ptr, format!("base id {b} out of range (n = {base_len})")));
        }
        if out[b].replace(crate::space::PointId(a)).is_some() {
            return Err(IoError::at(ptr, format!("base id {b} mapped twice")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(b, a)| a.ok_or_else(|| IoError::at("", format!("base id {b} is not mapped"))))
        .collect()
}

pub fn load_map_file(path: &Path, base_len: usize) -> Result<Vec<crate::space::PointId>, IoError> {
    load_map(&read(path)?, base_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_exemplar, ExemplarKind, ExemplarSpec};

    #[test]
    fn exemplars_round_trip() {
        for kind in [ExemplarKind::FanSpace, ExemplarKind::PuncturedPatch, ExemplarKind::ToyDag, ExemplarKind::TimelikeCylinder] {
            let s = build_exemplar(&ExemplarSpec::new(kind)).unwrap();
            let json = save_space(&s);
            let back = load_space(&json).unwrap();
            assert!(back == s, "{kind:?}");
        }
        let cyl = save_space(&build_exemplar(&ExemplarSpec::new(ExemplarKind::TimelikeCylinder)).unwrap());
        assert!(cyl.contains("\"inf\""));
    }

    #[test]
    fn schema_errors_point_at_the_value() {
        let good = save_space(&build_exemplar(&ExemplarSpec::new(ExemplarKind::ToyDag)).unwrap());
        let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
        v["tau"]["values"][1][2] = serde_json::json!("oops");
        let err = load_space(&v.to_string()).unwrap_err();
        assert!(matches!(&err, IoError::Schema { pointer, .. } if pointer == "/tau/values/1/2"), "{err}");
        let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
        v["chron"]["edges"][0] = serde_json::json!([0, 9]);
        let err = load_space(&v.to_string()).unwrap_err();
        assert!(matches!(&err, IoError::Schema { pointer, .. } if pointer == "/chron/edges/0"), "{err}");
        let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
        v["points"][2]["id"] = serde_json::json!(7);
        let err = load_space(&v.to_string()).unwrap_err();
        assert!(matches!(&err, IoError::Schema { pointer, .. } if pointer == "/points/2/id"), "{err}");
    }

    #[test]
    fn maps_accept_both_shapes() {
        assert_eq!(load_map("[[0, 2], [1, 0]]", 2).unwrap(), vec![crate::PointId(2), crate::PointId(0)]);
        assert_eq!(load_map(r#"{"pairs": [[0, 1], [1, 3]]}"#, 2).unwrap()[1], crate::PointId(3));
        assert!(load_map("[[0, 1]]", 2).is_err());
        assert!(load_map("[[0, 1], [0, 2]]", 2).is_err());
    }
}
