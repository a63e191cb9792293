//! Canonical JSON documents for graphs and layouts.
//!
//! Output is byte-stable: struct fields in declaration order, maps sorted by
//! key, two-space indentation, a trailing newline, and every float written
//! with 17 significant digits (shortest `%.17g` form) so it parses back to the
//! identical bit pattern. The schema is described in `docs/formats.md`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{Edge, GeoCoordinate, Graph, Node};
use crate::layout::{LayoutParams, LayoutState};
use crate::metrics::MetricsReport;
use crate::vector::Vec3;

/// Version written by this crate.
pub const FORMAT_VERSION: &str = "1.0";
const SUPPORTED_MAJOR: &str = "1";

/// Whether unknown fields are errors or carried along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
    #[serde(default, deserialize_with = "unique_string_map")]
    pub attributes: BTreeMap<String, String>,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub weight: f64,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

/// On-disk form of a [`Graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format_version: String,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl GraphDocument {
    pub fn from_graph(graph: &Graph) -> Self {
        GraphDocument {
            format_version: FORMAT_VERSION.to_string(),
            nodes: graph
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.clone(),
                    label: n.label.clone(),
                    lat: n.geo.map(|g| g.latitude),
                    lon: n.geo.map(|g| g.longitude),
                    attributes: n.attributes.clone(),
                    extra: BTreeMap::new(),
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    source: e.source.clone(),
                    target: e.target.clone(),
                    weight: e.weight,
                    extra: BTreeMap::new(),
                })
                .collect(),
            extra: BTreeMap::new(),
        }
    }

    /// Validates every record and builds the graph. Errors name the first
    /// offending element, e.g. `edges[3]`.
    pub fn to_graph(&self) -> Result<Graph> {
        let mut ids = HashSet::with_capacity(self.nodes.len());
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, rec) in self.nodes.iter().enumerate() {
            let path = format!("nodes[{i}]");
            if rec.id.is_empty() {
                return Err(Error::schema(format!("{path}.id"), "empty node id"));
            }
            if !ids.insert(rec.id.as_str()) {
                return Err(Error::schema(
                    format!("{path}.id"),
                    format!("duplicate node id {:?}", rec.id),
                ));
            }
            let geo = match (rec.lat, rec.lon) {
                (Some(lat), Some(lon)) => Some(
                    GeoCoordinate::new(lat, lon)
                        .map_err(|e| Error::schema(&path, format!("node {:?}: {e}", rec.id)))?,
                ),
                (None, None) => None,
                _ => {
                    return Err(Error::schema(
                        &path,
                        format!("node {:?} has only one of lat/lon", rec.id),
                    ))
                }
            };
            nodes.push(Node {
                id: rec.id.clone(),
                label: rec.label.clone(),
                geo,
                attributes: rec.attributes.clone(),
            });
        }
        let mut pairs = HashSet::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, rec) in self.edges.iter().enumerate() {
            let path = format!("edges[{i}]");
            let name = format!("edge {:?}-{:?}", rec.source, rec.target);
            if !(rec.weight > 0.0 && rec.weight <= 1.0) {
                return Err(Error::schema(
                    format!("{path}.weight"),
                    format!("{name}: weight {} outside (0, 1]", rec.weight),
                ));
            }
            for end in [&rec.source, &rec.target] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::schema(
                        &path,
                        format!("{name}: unknown endpoint {end:?}"),
                    ));
                }
            }
            if rec.source == rec.target {
                return Err(Error::schema(&path, format!("{name}: self-loop")));
            }
            let key = if rec.source < rec.target {
                (rec.source.as_str(), rec.target.as_str())
            } else {
                (rec.target.as_str(), rec.source.as_str())
            };
            if !pairs.insert(key) {
                return Err(Error::schema(&path, format!("{name}: duplicate edge")));
            }
            edges.push(Edge::new(rec.source.clone(), rec.target.clone(), rec.weight));
        }
        Graph::new(nodes, edges).map_err(|e| Error::schema("graph", e.to_string()))
    }

    fn reject_unknown(&self) -> Result<()> {
        fn first(extra: &BTreeMap<String, Value>) -> Option<&String> {
            extra.keys().next()
        }
        if let Some(k) = first(&self.extra) {
            return Err(Error::schema(k.as_str(), "unknown field"));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(k) = first(&n.extra) {
                return Err(Error::schema(format!("nodes[{i}].{k}"), "unknown field"));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(k) = first(&e.extra) {
                return Err(Error::schema(format!("edges[{i}].{k}"), "unknown field"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Projected geolocation, absent for unanchored nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec3>,
}

/// On-disk form of a layout run: the parameters, the annealing state and
/// every node position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub format_version: String,
    pub params: LayoutParams,
    pub temperature: f64,
    pub iteration: usize,
    pub positions: Vec<PositionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
}

impl LayoutDocument {
    pub fn new(state: &LayoutState, params: &LayoutParams, metrics: Option<&MetricsReport>) -> Self {
        LayoutDocument {
            format_version: FORMAT_VERSION.to_string(),
            params: params.clone(),
            temperature: state.temperature,
            iteration: state.iteration,
            positions: state
                .node_ids
                .iter()
                .zip(&state.positions)
                .zip(&state.geo_anchors)
                .map(|((id, p), anchor)| PositionRecord {
                    id: id.clone(),
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    anchor: *anchor,
                })
                .collect(),
            metrics: metrics.cloned(),
        }
    }

    /// Rebuilds the state, ordering positions by id.
    pub fn to_state(&self) -> Result<LayoutState> {
        let mut recs: Vec<&PositionRecord> = self.positions.iter().collect();
        recs.sort_by(|a, b| a.id.cmp(&b.id));
        for (i, w) in recs.windows(2).enumerate() {
            if w[0].id == w[1].id {
                return Err(Error::schema(
                    format!("positions[{i}]"),
                    format!("duplicate position for {:?}", w[0].id),
                ));
            }
        }
        let mut positions = Vec::with_capacity(recs.len());
        for r in &recs {
            let p = Vec3::new(r.x, r.y, r.z);
            if !p.is_finite() || !r.anchor.is_none_or(|a| a.is_finite()) {
                return Err(Error::schema(
                    "positions",
                    format!("non-finite coordinate for {:?}", r.id),
                ));
            }
            positions.push(p);
        }
        Ok(LayoutState {
            node_ids: recs.iter().map(|r| r.id.clone()).collect(),
            positions,
            temperature: self.temperature,
            iteration: self.iteration,
            geo_anchors: recs.iter().map(|r| r.anchor).collect(),
        })
    }

    /// Like [`LayoutDocument::to_state`], additionally requiring the
    /// positions to cover exactly the nodes of `graph`.
    pub fn to_state_for(&self, graph: &Graph) -> Result<LayoutState> {
        let state = self.to_state()?;
        let expected: Vec<&str> = graph.nodes().iter().map(|n| n.id.as_str()).collect();
        let found: Vec<&str> = state.node_ids.iter().map(String::as_str).collect();
        if expected != found {
            let missing = expected.iter().find(|id| !found.contains(id));
            let extra = found.iter().find(|id| !expected.contains(id));
            return Err(Error::schema(
                "positions",
                format!(
                    "positions do not match graph nodes (missing {missing:?}, unexpected {extra:?})"
                ),
            ));
        }
        Ok(state)
    }
}

/// Writes floats as the shortest `%.17g` rendering.
struct CanonicalFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for CanonicalFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(format_g17(value as f64).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// `%.17g` without trailing zeros: 17 significant digits, fixed notation for
/// decimal exponents in `[-5, 17)`, scientific otherwise.
pub fn format_g17(value: f64) -> String {
    if value == 0.0 {
        return if value.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::from(sign);
    if !(-5..17).contains(&exp) {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits);
    }
    out
}

/// Serializes any value in the canonical layout with a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let fmt = CanonicalFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn map_json_error(err: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match err.classify() {
        Category::Io => Error::Io(err.into()),
        Category::Syntax | Category::Eof => Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => Error::schema(
            format!("line {}, column {}", err.line(), err.column()),
            err.to_string(),
        ),
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<Value>,
}

fn check_version(bytes: &[u8]) -> Result<()> {
    let probe: VersionProbe = serde_json::from_slice(bytes).map_err(map_json_error)?;
    let version = match probe.format_version {
        Some(Value::String(s)) => s,
        Some(other) => {
            return Err(Error::schema(
                "format_version",
                format!("expected a string, got {other}"),
            ))
        }
        None => return Err(Error::schema("format_version", "missing field")),
    };
    if version.split('.').next() != Some(SUPPORTED_MAJOR) {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION.to_string(),
        });
    }
    Ok(())
}

pub fn load_graph_document(bytes: &[u8], strictness: Strictness) -> Result<GraphDocument> {
    check_version(bytes)?;
    let doc: GraphDocument = serde_json::from_slice(bytes).map_err(map_json_error)?;
    if strictness == Strictness::Strict {
        doc.reject_unknown()?;
    }
    doc.to_graph()?;
    Ok(doc)
}

/// Parses and validates a graph document, rejecting unknown fields.
pub fn load_graph(bytes: &[u8]) -> Result<Graph> {
    load_graph_document(bytes, Strictness::Strict)?.to_graph()
}

pub fn save_graph(graph: &Graph) -> Result<Vec<u8>> {
    to_canonical_json(&GraphDocument::from_graph(graph))
}

pub fn save_graph_document(doc: &GraphDocument) -> Result<Vec<u8>> {
    to_canonical_json(doc)
}

pub fn save_layout(state: &LayoutState, params: &LayoutParams, metrics: Option<&MetricsReport>) -> Result<Vec<u8>> {
    if let Some((id, _)) = state
        .node_ids
        .iter()
        .zip(&state.positions)
        .find(|(_, p)| !p.is_finite())
    {
        return Err(Error::InvalidInput(format!("non-finite position for {id:?}")));
    }
    to_canonical_json(&LayoutDocument::new(state, params, metrics))
}

pub fn load_layout_document(bytes: &[u8]) -> Result<LayoutDocument> {
    check_version(bytes)?;
    let doc: LayoutDocument = serde_json::from_slice(bytes).map_err(map_json_error)?;
    doc.params
        .validate()
        .map_err(|e| Error::schema("params", e.to_string()))?;
    Ok(doc)
}

pub fn load_layout(bytes: &[u8]) -> Result<(LayoutState, LayoutParams)> {
    let doc = load_layout_document(bytes)?;
    Ok((doc.to_state()?, doc.params))
}

fn unique_string_map<'de, D>(deserializer: D) -> std::result::Result<BTreeMap<String, String>, D::Error>
where
    D: Deserializer<'de>,
{
    struct UniqueMap;

    impl<'de> Visitor<'de> for UniqueMap {
        type Value = BTreeMap<String, String>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object of string values with unique keys")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
            let mut map = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<String, String>()? {
                if map.contains_key(&k) {
                    return Err(de::Error::custom(format!("duplicate attribute key {k:?}")));
                }
                map.insert(k, v);
            }
            Ok(map)
        }
    }

    deserializer.deserialize_map(UniqueMap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::simulate;

    const MINIMAL: &str = r#"{
  "format_version": "1.0",
  "nodes": [
    {"id": "a", "label": "A", "lat": 10.5, "lon": -20},
    {"id": "b", "label": "B"}
  ],
  "edges": [{"source": "a", "target": "b", "weight": 0.5}]
}"#;

    #[test]
    fn minimal_document_loads() {
        let g = load_graph(MINIMAL.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node("a").unwrap().geo.unwrap().longitude, -20.0);
        assert!(g.node("b").unwrap().geo.is_none());
    }

    #[test]
    fn bad_weight_names_the_edge() {
        let doc = MINIMAL.replace("0.5", "1.5");
        let err = load_graph(doc.as_bytes()).unwrap_err();
        match err {
            Error::Schema { path, message } => {
                assert_eq!(path, "edges[0].weight");
                assert!(message.contains("\"a\"-\"b\""), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let doc = MINIMAL.replace("\"target\": \"b\"", "\"target\": \"zz\"");
        let err = load_graph(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("edges[0]") && err.contains("zz"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = load_graph(b"{\n  \"format_version\": \"1.0\",\n  \"nodes\": [,]\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let doc = MINIMAL.replace("\"1.0\"", "\"99.0\"");
        assert!(matches!(
            load_graph(doc.as_bytes()),
            Err(Error::UnsupportedVersion { .. })
        ));
        let layout = r#"{"format_version": "99.0"}"#;
        assert!(matches!(
            load_layout(layout.as_bytes()),
            Err(Error::UnsupportedVersion { .. })
        ));
    }

    #[test]
    fn unknown_fields_strict_vs_lenient() {
        let doc = MINIMAL.replace("\"label\": \"B\"", "\"label\": \"B\", \"colour\": \"red\"");
        let err = load_graph(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("nodes[1].colour"), "{err}");
        let lenient = load_graph_document(doc.as_bytes(), Strictness::Lenient).unwrap();
        assert_eq!(lenient.nodes[1].extra["colour"], Value::from("red"));
        let again = save_graph_document(&lenient).unwrap();
        assert!(String::from_utf8(again).unwrap().contains("\"colour\": \"red\""));
    }

    #[test]
    fn half_geolocation_rejected() {
        let doc = MINIMAL.replace(", \"lon\": -20", "");
        assert!(load_graph(doc.as_bytes()).is_err());
    }

    #[test]
    fn duplicate_attribute_keys_rejected() {
        let doc = MINIMAL.replace(
            "\"label\": \"B\"",
            "\"label\": \"B\", \"attributes\": {\"k\": \"1\", \"k\": \"2\"}",
        );
        let err = load_graph(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("duplicate attribute key"), "{err}");
    }

    #[test]
    fn empty_graph_round_trips() {
        let bytes = save_graph(&Graph::empty()).unwrap();
        assert_eq!(load_graph(&bytes).unwrap(), Graph::empty());
    }

    #[test]
    fn layout_round_trips() {
        let g = load_graph(MINIMAL.as_bytes())
            .map(|g| {
                let mut nodes = g.nodes().to_vec();
                nodes.push(Node::new("c").with_geo(-33.0, 151.0));
                Graph::new(nodes, g.edges().to_vec()).unwrap()
            })
            .unwrap();
        let params = LayoutParams::for_graph(&g);
        let state = simulate(&g, &params).unwrap();
        let bytes = save_layout(&state, &params, None).unwrap();
        let (back, back_params) = load_layout(&bytes).unwrap();
        assert_eq!(back, state);
        assert_eq!(back_params, params);
        assert_eq!(save_layout(&back, &back_params, None).unwrap(), bytes);
    }

    #[test]
    fn layout_coverage_checked_against_graph() {
        let g = load_graph(MINIMAL.as_bytes()).unwrap();
        let params = LayoutParams::for_graph(&g);
        let state = simulate(&g, &params).unwrap();
        let mut doc = LayoutDocument::new(&state, &params, None);
        assert!(doc.to_state_for(&g).is_ok());
        doc.positions.pop();
        assert!(doc.to_state_for(&g).is_err());
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(-20.0), "-20");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_g17(1e20), "1e20");
        assert_eq!(format_g17(123456.75), "123456.75");
        assert_eq!(format_g17(-0.0), "-0");
    }

    #[test]
    fn g17_round_trips_bits() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, -7.25e200, f64::MIN_POSITIVE, 5e-324, f64::MAX] {
            let s = format_g17(x);
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }
}
