//! Lays out the default 3×70 clustered graph at K = 0, 5 and 10000 and prints
//! both metrics. As K grows nodes get pulled onto their map locations (MLO
//! falls) at the cost of semantic cluster shape (ELV rises).
//!
//!     cargo run --example clustered_k_sweep

use geolayout::metrics;
use geolayout::simgen::{gen_clustered, ClusterSpec};
use geolayout::{simulate, update_geo_weight, LayoutParams};

fn main() -> geolayout::Result<()> {
    let graph = gen_clustered(&ClusterSpec::default())?;
    println!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    let base = LayoutParams::for_graph(&graph);
    println!("{:>8}  {:>10}  {:>12}", "K", "M_ELV", "M_MLO");
    for k in [0.0, 5.0, 10_000.0] {
        let params = update_geo_weight(&base, k)?;
        let state = simulate(&graph, &params)?;
        let m = metrics::report(&graph, &state, &params.projection)?;
        println!(
            "{:>8}  {:>10.4}  {:>12.3e}",
            k,
            m.m_elv.unwrap_or(f64::NAN),
            m.m_mlo.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
