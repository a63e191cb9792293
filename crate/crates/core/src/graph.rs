//! Graph data model, geographic projection and degree queries.
//!
//! Graphs are undirected and simple. Nodes are kept sorted by id and edges
//! are stored once per unordered pair with `source < target`, so two graphs
//! built from the same nodes and edges in any order compare equal and are
//! iterated identically by the layout engine.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::VirtualPosition;

/// Latitude/longitude in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoCoordinate {
    pub latitude: f64,
    pub longitude: f64,
}

impl GeoCoordinate {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self> {
        let geo = GeoCoordinate {
            latitude,
            longitude,
        };
        geo.validate()?;
        Ok(geo)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.latitude.is_finite() || !(-90.0..=90.0).contains(&self.latitude) {
            return Err(Error::invalid(format!(
                "latitude {} outside [-90, 90]",
                self.latitude
            )));
        }
        if !self.longitude.is_finite() || !(-180.0..=180.0).contains(&self.longitude) {
            return Err(Error::invalid(format!(
                "longitude {} outside [-180, 180]",
                self.longitude
            )));
        }
        Ok(())
    }
}

/// Size of the map plane in viewport units and the height of geo anchors above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    /// Width spanned by longitudes -180..180.
    pub map_width: f64,
    /// Height spanned by latitudes -90..90. Also the pole-to-pole distance.
    pub map_height: f64,
    /// z coordinate of every projected anchor.
    pub anchor_height: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            map_width: 360.0,
            map_height: 180.0,
            anchor_height: 20.0,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.map_width.is_finite() && self.map_width > 0.0) {
            return Err(Error::invalid(format!(
                "map_width must be > 0, got {}",
                self.map_width
            )));
        }
        if !(self.map_height.is_finite() && self.map_height > 0.0) {
            return Err(Error::invalid(format!(
                "map_height must be > 0, got {}",
                self.map_height
            )));
        }
        if !(self.anchor_height.is_finite() && self.anchor_height >= 0.0) {
            return Err(Error::invalid(format!(
                "anchor_height must be >= 0, got {}",
                self.anchor_height
            )));
        }
        Ok(())
    }

    /// Distance between the projected North and South poles.
    pub fn pole_distance(&self) -> f64 {
        self.map_height
    }
}

/// Equirectangular projection of a geographic coordinate into the layout space.
pub fn project_geo(geo: GeoCoordinate, cfg: &ProjectionConfig) -> Result<VirtualPosition> {
    geo.validate()?;
    cfg.validate()?;
    Ok(VirtualPosition::new(
        geo.longitude / 360.0 * cfg.map_width,
        geo.latitude / 180.0 * cfg.map_height,
        cfg.anchor_height,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub geo: Option<GeoCoordinate>,
    pub attributes: BTreeMap<String, String>,
}

impl Node {
    /// Node whose label defaults to its id.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Node {
            label: id.clone(),
            id,
            geo: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_geo(mut self, latitude: f64, longitude: f64) -> Self {
        self.geo = Some(GeoCoordinate {
            latitude,
            longitude,
        });
        self
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            weight,
        }
    }

    fn canonicalize(mut self) -> Self {
        if self.source > self.target {
            std::mem::swap(&mut self.source, &mut self.target);
        }
        self
    }
}

/// Immutable, validated undirected graph.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    degrees: Vec<usize>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Graph {
    /// Validates and canonicalizes the graph. Fails on duplicate node ids,
    /// dangling or self-loop edges, duplicate pairs, weights outside (0, 1]
    /// and out-of-range geolocations.
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::invalid(format!("duplicate node id {:?}", pair[0].id)));
            }
        }
        for node in &nodes {
            if let Some(geo) = node.geo {
                geo.validate()
                    .map_err(|e| Error::invalid(format!("node {:?}: {e}", node.id)))?;
            }
        }
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();

        let mut edges: Vec<Edge> = edges.into_iter().map(Edge::canonicalize).collect();
        edges.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));

        let mut endpoints = Vec::with_capacity(edges.len());
        let mut degrees = vec![0usize; nodes.len()];
        for (i, edge) in edges.iter().enumerate() {
            let name = || format!("edge {:?}-{:?}", edge.source, edge.target);
            if edge.source == edge.target {
                return Err(Error::invalid(format!("{}: self-loop", name())));
            }
            if !(edge.weight > 0.0 && edge.weight <= 1.0) {
                return Err(Error::invalid(format!(
                    "{}: weight {} outside (0, 1]",
                    name(),
                    edge.weight
                )));
            }
            let s = *index
                .get(&edge.source)
                .ok_or_else(|| Error::invalid(format!("{}: unknown endpoint {:?}", name(), edge.source)))?;
            let t = *index
                .get(&edge.target)
                .ok_or_else(|| Error::invalid(format!("{}: unknown endpoint {:?}", name(), edge.target)))?;
            if i > 0 && edges[i - 1].source == edge.source && edges[i - 1].target == edge.target {
                return Err(Error::invalid(format!("{}: duplicate edge", name())));
            }
            endpoints.push((s, t));
            degrees[s] += 1;
            degrees[t] += 1;
        }

        Ok(Graph {
            nodes,
            edges,
            index,
            endpoints,
            degrees,
        })
    }

    pub fn empty() -> Self {
        Graph::default()
    }

    /// Nodes in canonical (id-sorted) order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Edges in canonical order, each with `source < target`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of `id` in [`Graph::nodes`].
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    /// Edge endpoints as node indices, parallel to [`Graph::edges`].
    pub fn edge_endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    /// Degrees parallel to [`Graph::nodes`].
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn node_degree(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .map(|i| self.degrees[i])
            .ok_or_else(|| Error::NotFound(format!("node {id:?}")))
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Induced subgraph on nodes whose degree in `self` is at least `min_degree`.
    ///
    /// Degrees are taken from this graph, not recomputed after removal, so a
    /// surviving node may end up with fewer than `min_degree` edges.
    pub fn filter_by_min_degree(&self, min_degree: usize) -> Graph {
        if min_degree == 0 {
            return self.clone();
        }
        let keep: Vec<bool> = self.degrees.iter().map(|&d| d >= min_degree).collect();
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(n, _)| n.clone())
            .collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .zip(&self.endpoints)
            .filter(|(_, &(s, t))| keep[s] && keep[t])
            .map(|(e, _)| e.clone())
            .collect();
        Graph::new(nodes, edges).expect("subgraph of a valid graph is valid")
    }

    /// Which nodes survive [`Graph::filter_by_min_degree`], parallel to [`Graph::nodes`].
    pub fn visibility_mask(&self, min_degree: usize) -> Vec<bool> {
        self.degrees.iter().map(|&d| d >= min_degree).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_360x180(anchor_height: f64) -> ProjectionConfig {
        ProjectionConfig {
            map_width: 360.0,
            map_height: 180.0,
            anchor_height,
        }
    }

    fn complete(n: usize) -> Graph {
        let nodes = (0..n).map(|i| Node::new(format!("n{i}"))).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push(Edge::new(format!("n{i}"), format!("n{j}"), 0.5));
            }
        }
        Graph::new(nodes, edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let mut nodes = vec![Node::new("hub")];
        let mut edges = Vec::new();
        for i in 0..leaves {
            nodes.push(Node::new(format!("leaf{i}")));
            edges.push(Edge::new("hub", format!("leaf{i}"), 1.0));
        }
        Graph::new(nodes, edges).unwrap()
    }

    #[test]
    fn origin_projects_to_origin() {
        let p = project_geo(GeoCoordinate::new(0.0, 0.0).unwrap(), &map_360x180(0.0)).unwrap();
        assert_eq!(p, VirtualPosition::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn north_pole_projects_to_top_edge() {
        let p = project_geo(GeoCoordinate::new(90.0, 0.0).unwrap(), &map_360x180(0.0)).unwrap();
        assert_eq!(p, VirtualPosition::new(0.0, 90.0, 0.0));
    }

    #[test]
    fn pole_separation_is_map_height() {
        let cfg = map_360x180(0.0);
        let n = project_geo(GeoCoordinate::new(90.0, 0.0).unwrap(), &cfg).unwrap();
        let s = project_geo(GeoCoordinate::new(-90.0, 0.0).unwrap(), &cfg).unwrap();
        assert_eq!(n.distance(s), 180.0);
        assert_eq!(cfg.pole_distance(), 180.0);
    }

    #[test]
    fn anchor_height_sets_z() {
        let p = project_geo(GeoCoordinate::new(10.0, 20.0).unwrap(), &map_360x180(7.5)).unwrap();
        assert_eq!(p.z, 7.5);
    }

    #[test]
    fn out_of_range_coordinates_rejected() {
        assert!(GeoCoordinate::new(90.5, 0.0).is_err());
        assert!(GeoCoordinate::new(0.0, -181.0).is_err());
        assert!(GeoCoordinate::new(f64::NAN, 0.0).is_err());
        let raw = GeoCoordinate {
            latitude: 100.0,
            longitude: 0.0,
        };
        assert!(matches!(
            project_geo(raw, &map_360x180(0.0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn bad_projection_config_rejected() {
        let geo = GeoCoordinate::new(0.0, 0.0).unwrap();
        for cfg in [
            ProjectionConfig { map_width: 0.0, ..Default::default() },
            ProjectionConfig { map_height: -1.0, ..Default::default() },
            ProjectionConfig { anchor_height: -0.1, ..Default::default() },
        ] {
            assert!(project_geo(geo, &cfg).is_err());
        }
    }

    #[test]
    fn degrees() {
        let g = Graph::new(vec![Node::new("alone")], vec![]).unwrap();
        assert_eq!(g.node_degree("alone").unwrap(), 0);
        assert_eq!(complete(5).node_degree("n2").unwrap(), 4);
        assert_eq!(star(3).node_degree("hub").unwrap(), 3);
        assert!(matches!(g.node_degree("missing"), Err(Error::NotFound(_))));
    }

    #[test]
    fn filter_zero_is_identity() {
        let g = star(3);
        assert_eq!(g.filter_by_min_degree(0), g);
    }

    #[test]
    fn filter_star_keeps_hub_only() {
        let f = star(3).filter_by_min_degree(2);
        assert_eq!(f.node_count(), 1);
        assert_eq!(f.nodes()[0].id, "hub");
        assert_eq!(f.edge_count(), 0);
    }

    #[test]
    fn filter_complete_graph_unchanged() {
        let g = complete(5);
        assert_eq!(g.filter_by_min_degree(4), g);
        assert!(g.filter_by_min_degree(5).is_empty());
    }

    #[test]
    fn filter_uses_original_degrees() {
        // path a-b-c-d plus a pendant e on b: degrees a1 b3 c2 d1 e1
        let g = Graph::new(
            ["a", "b", "c", "d", "e"].into_iter().map(Node::new).collect(),
            vec![
                Edge::new("a", "b", 1.0),
                Edge::new("b", "c", 1.0),
                Edge::new("c", "d", 1.0),
                Edge::new("b", "e", 1.0),
            ],
        )
        .unwrap();
        let f = g.filter_by_min_degree(2);
        assert_eq!(f.nodes().iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["b", "c"]);
        // c now has degree 1 in the subgraph but is kept.
        assert_eq!(f.node_degree("c").unwrap(), 1);
    }

    #[test]
    fn edges_are_canonical() {
        let a = Graph::new(
            vec![Node::new("x"), Node::new("y")],
            vec![Edge::new("y", "x", 0.3)],
        )
        .unwrap();
        let b = Graph::new(
            vec![Node::new("y"), Node::new("x")],
            vec![Edge::new("x", "y", 0.3)],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges()[0].source, "x");
    }

    #[test]
    fn invariant_violations_rejected() {
        let two = || vec![Node::new("a"), Node::new("b")];
        assert!(Graph::new(vec![Node::new("a"), Node::new("a")], vec![]).is_err());
        assert!(Graph::new(two(), vec![Edge::new("a", "a", 0.5)]).is_err());
        assert!(Graph::new(two(), vec![Edge::new("a", "c", 0.5)]).is_err());
        assert!(Graph::new(two(), vec![Edge::new("a", "b", 0.0)]).is_err());
        assert!(Graph::new(two(), vec![Edge::new("a", "b", 1.5)]).is_err());
        assert!(Graph::new(two(), vec![Edge::new("a", "b", f64::NAN)]).is_err());
        assert!(Graph::new(
            two(),
            vec![Edge::new("a", "b", 0.5), Edge::new("b", "a", 0.7)]
        )
        .is_err());
        assert!(Graph::new(vec![Node::new("a").with_geo(91.0, 0.0)], vec![]).is_err());
    }
}
