//! Projecting geolocations onto the map plane and filtering a graph by node
//! degree.
//!
//!     cargo run --example project_and_filter

use geolayout::{project_geo, Edge, GeoCoordinate, Graph, Node, ProjectionConfig};

fn main() -> geolayout::Result<()> {
    let cfg = ProjectionConfig::default();
    println!(
        "map {}×{}, anchors at z = {}, pole-to-pole distance {}",
        cfg.map_width,
        cfg.map_height,
        cfg.anchor_height,
        cfg.pole_distance()
    );
    for (place, lat, lon) in [
        ("Null Island", 0.0, 0.0),
        ("North Pole", 90.0, 0.0),
        ("Santa Barbara", 34.42, -119.70),
        ("Wuhan", 30.59, 114.31),
    ] {
        let p = project_geo(GeoCoordinate::new(lat, lon)?, &cfg)?;
        println!("{place:>14} ({lat:>6.2}, {lon:>7.2}) -> ({:>8.2}, {:>6.2}, {:>4.1})", p.x, p.y, p.z);
    }
    if let Err(e) = GeoCoordinate::new(91.0, 0.0) {
        println!("rejected: {e}");
    }

    // a hub with three leaves, plus a triangle hanging off one leaf
    let graph = Graph::new(
        ["hub", "a", "b", "c", "x", "y"].map(Node::new).to_vec(),
        vec![
            Edge::new("hub", "a", 0.9),
            Edge::new("hub", "b", 0.9),
            Edge::new("hub", "c", 0.9),
            Edge::new("c", "x", 0.5),
            Edge::new("c", "y", 0.5),
            Edge::new("x", "y", 0.5),
        ],
    )?;
    for node in graph.nodes() {
        println!("degree({}) = {}", node.id, graph.node_degree(&node.id)?);
    }
    for d in [0, 2, 3, 4] {
        let sub = graph.filter_by_min_degree(d);
        let ids: Vec<&str> = sub.nodes().iter().map(|n| n.id.as_str()).collect();
        println!("min degree {d}: {ids:?}, {} edges", sub.edge_count());
    }
    Ok(())
}
