//! Layout quality: edge length variation (ELV) and mean locational offset (MLO).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, ProjectionConfig};
use crate::layout::{geo_anchors, LayoutState};

/// Both metrics for one layout. A metric is `None` when it is undefined for
/// the graph (fewer than two edges, or no anchored nodes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub m_elv: Option<f64>,
    pub m_mlo: Option<f64>,
    pub edge_count: usize,
    pub anchored_node_count: usize,
}

fn check_state(graph: &Graph, state: &LayoutState) -> Result<()> {
    if state.positions.len() != graph.node_count() {
        return Err(Error::Precondition(format!(
            "state covers {} nodes, graph has {}",
            state.positions.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// `l_v / √(n_E − 1)` with `l_v = √(Σ (l_e − l_μ)² / (n_E·l_μ²))`, edge
/// lengths measured in 3D.
pub fn edge_length_variation(graph: &Graph, state: &LayoutState) -> Result<f64> {
    check_state(graph, state)?;
    let n_edges = graph.edge_count();
    if n_edges < 2 {
        return Err(Error::UndefinedMetric(format!(
            "edge length variation needs at least 2 edges, graph has {n_edges}"
        )));
    }
    let lengths: Vec<f64> = graph
        .edge_endpoints()
        .iter()
        .map(|&(u, v)| state.positions[u].distance(state.positions[v]))
        .collect();
    let n = n_edges as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::DegenerateLayout(
            "mean edge length is zero (all endpoints coincide)".into(),
        ));
    }
    let sum_sq: f64 = lengths.iter().map(|l| (l - mean).powi(2)).sum();
    let spread = (sum_sq / (n * mean * mean)).sqrt();
    Ok(spread / (n - 1.0).sqrt())
}

/// Mean horizontal (x-y) distance between each anchored node and its anchor,
/// normalized by the pole-to-pole distance. Unanchored nodes are skipped and
/// not counted.
pub fn mean_locational_offset(graph: &Graph, state: &LayoutState, cfg: &ProjectionConfig) -> Result<f64> {
    check_state(graph, state)?;
    cfg.validate()?;
    let anchors = geo_anchors(graph, cfg)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for (pos, anchor) in state.positions.iter().zip(&anchors) {
        if let Some(a) = anchor {
            total += (*pos - *a).horizontal_norm();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::UndefinedMetric(
            "locational offset needs at least one anchored node".into(),
        ));
    }
    Ok(total / (count as f64 * cfg.pole_distance()))
}

/// Computes every defined metric. Only a degenerate layout is an error.
pub fn report(graph: &Graph, state: &LayoutState, cfg: &ProjectionConfig) -> Result<MetricsReport> {
    let optional = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(MetricsReport {
        m_elv: optional(edge_length_variation(graph, state))?,
        m_mlo: optional(mean_locational_offset(graph, state, cfg))?,
        edge_count: graph.edge_count(),
        anchored_node_count: graph.nodes().iter().filter(|n| n.geo.is_some()).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};
    use crate::vector::Vec3;
    use approx::assert_relative_eq;

    fn flat_map() -> ProjectionConfig {
        ProjectionConfig {
            map_width: 360.0,
            map_height: 180.0,
            anchor_height: 0.0,
        }
    }

    fn path3() -> Graph {
        Graph::new(
            vec![
                Node::new("a").with_geo(0.0, 0.0),
                Node::new("b").with_geo(10.0, 10.0),
                Node::new("c"),
            ],
            vec![Edge::new("a", "b", 1.0), Edge::new("b", "c", 1.0)],
        )
        .unwrap()
    }

    fn state(g: &Graph, positions: Vec<Vec3>) -> LayoutState {
        LayoutState::from_positions(g, positions, &flat_map(), 1.0, 0).unwrap()
    }

    #[test]
    fn equal_edges_have_zero_elv() {
        let g = path3();
        let s = state(&g, vec![Vec3::new(0., 0., 0.), Vec3::new(2., 0., 0.), Vec3::new(2., 2., 0.)]);
        assert_eq!(edge_length_variation(&g, &s).unwrap(), 0.0);
    }

    #[test]
    fn elv_of_lengths_one_and_three() {
        let g = path3();
        let s = state(&g, vec![Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(1., 0., 3.)]);
        assert_relative_eq!(edge_length_variation(&g, &s).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn elv_errors() {
        let one = Graph::new(
            vec![Node::new("a"), Node::new("b")],
            vec![Edge::new("a", "b", 1.0)],
        )
        .unwrap();
        let s = state(&one, vec![Vec3::ZERO, Vec3::new(1., 0., 0.)]);
        assert!(matches!(edge_length_variation(&one, &s), Err(Error::UndefinedMetric(_))));

        let g = path3();
        let s = state(&g, vec![Vec3::new(1., 1., 1.); 3]);
        assert!(matches!(edge_length_variation(&g, &s), Err(Error::DegenerateLayout(_))));
    }

    #[test]
    fn nodes_on_anchors_have_zero_mlo() {
        let g = path3();
        let anchors = geo_anchors(&g, &flat_map()).unwrap();
        let s = state(
            &g,
            vec![anchors[0].unwrap(), anchors[1].unwrap(), Vec3::new(50., 50., 0.)],
        );
        assert_eq!(mean_locational_offset(&g, &s, &flat_map()).unwrap(), 0.0);
    }

    #[test]
    fn half_pole_distance_offset() {
        let g = Graph::new(vec![Node::new("a").with_geo(0.0, 0.0)], vec![]).unwrap();
        let s = state(&g, vec![Vec3::new(90.0, 0.0, 0.0)]);
        assert_relative_eq!(mean_locational_offset(&g, &s, &flat_map()).unwrap(), 0.5);
    }

    #[test]
    fn mlo_ignores_height() {
        let g = Graph::new(vec![Node::new("a").with_geo(0.0, 0.0)], vec![]).unwrap();
        let s = state(&g, vec![Vec3::new(0.0, 0.0, 500.0)]);
        assert_eq!(mean_locational_offset(&g, &s, &flat_map()).unwrap(), 0.0);
    }

    #[test]
    fn mlo_needs_an_anchor() {
        let g = Graph::new(vec![Node::new("a")], vec![]).unwrap();
        let s = state(&g, vec![Vec3::ZERO]);
        assert!(matches!(
            mean_locational_offset(&g, &s, &flat_map()),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn report_marks_undefined_metrics() {
        let g = Graph::new(vec![Node::new("a")], vec![]).unwrap();
        let s = state(&g, vec![Vec3::ZERO]);
        let r = report(&g, &s, &flat_map()).unwrap();
        assert_eq!(r.m_elv, None);
        assert_eq!(r.m_mlo, None);
        assert_eq!(r.edge_count, 0);
        assert_eq!(r.anchored_node_count, 0);
    }
}
