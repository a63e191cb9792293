//! Type I (edges ∝ n²) and Type II (edges ∝ n) random graphs, and the
//! clustered fixture with its cross-region outliers.
//!
//!     cargo run --example density_generators

use geolayout::simgen::{gen_clustered, gen_density_graph, ClusterSpec, DensityGraphSpec};

fn main() -> geolayout::Result<()> {
    println!("{:>6}  {:>14}  {:>14}  {:>14}", "n", "type1 p=0.05", "type1 p=0.5", "type2 c=50");
    for n in [100, 200, 400, 800, 1600] {
        let counts: Vec<String> = [
            DensityGraphSpec::type1(n, 0.05, 1),
            DensityGraphSpec::type1(n, 0.5, 1),
            DensityGraphSpec::type2(n, 50.0, 1),
        ]
        .iter()
        .map(|s| s.edge_count().map(|c| c.to_string()).unwrap_or_else(|e| e.to_string()))
        .collect();
        println!("{n:>6}  {:>14}  {:>14}  {:>14}", counts[0], counts[1], counts[2]);
    }

    let g = gen_density_graph(&DensityGraphSpec::type2(100, 50.0, 1))?;
    let mean_degree = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
    println!("\ntype2(n=100, c=50): {} edges, mean degree {mean_degree}", g.edge_count());

    match DensityGraphSpec::type2(20, 50.0, 1).edge_count() {
        Ok(_) => unreachable!(),
        Err(e) => println!("type2(n=20, c=50): {e}"),
    }

    let spec = ClusterSpec::default();
    let g = gen_clustered(&spec)?;
    println!("\nclustered: {} nodes, {} edges", g.node_count(), g.edge_count());
    for n in g.nodes().iter().filter(|n| n.attributes["outlier"] == "true") {
        let geo = n.geo.expect("clustered nodes are geolocated");
        println!(
            "  outlier {} in cluster {} placed in {} ({:.1}, {:.1})",
            n.id, n.attributes["cluster"], n.attributes["region"], geo.latitude, geo.longitude
        );
    }
    Ok(())
}
