//! The 41-expert fixture at the three geo weights used to compare a purely
//! semantic layout (K = 0), a balanced one (K = 5) and a map-pinned one
//! (K = 10000). Writes the balanced layout next to the graph if a directory
//! is given.
//!
//!     cargo run --example expert_network_layout [-- out_dir]

use std::path::PathBuf;

use geolayout::io::{save_graph, save_layout};
use geolayout::metrics;
use geolayout::simgen::gen_expert_network;
use geolayout::{simulate, update_geo_weight, LayoutParams};

fn main() -> geolayout::Result<()> {
    let graph = gen_expert_network(1)?;
    let base = LayoutParams::for_graph(&graph);
    println!("{} experts, {} similarity edges, k = {:.2}", graph.node_count(), graph.edge_count(), base.k);

    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    for big_k in [0.0, 5.0, 10_000.0] {
        let params = update_geo_weight(&base, big_k)?;
        let state = simulate(&graph, &params)?;
        let m = metrics::report(&graph, &state, &params.projection)?;
        println!(
            "K = {big_k:>7}: M_ELV {:.4}  M_MLO {:.4}",
            m.m_elv.unwrap_or(f64::NAN),
            m.m_mlo.unwrap_or(f64::NAN)
        );
        if let (Some(dir), 5.0) = (&out_dir, big_k) {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("experts.graph.json"), save_graph(&graph)?)?;
            std::fs::write(dir.join("experts.layout.json"), save_layout(&state, &params, Some(&m))?)?;
            println!("wrote {}", dir.display());
        }
    }

    // the expert nearest to each anchor at K = 5
    let params = update_geo_weight(&base, 5.0)?;
    let state = simulate(&graph, &params)?;
    let (best, offset) = graph
        .nodes()
        .iter()
        .zip(state.positions.iter().zip(&state.geo_anchors))
        .filter_map(|(n, (p, a))| a.map(|a| (n, (*p - a).horizontal_norm())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("every expert is geolocated");
    println!(
        "closest to its affiliation: {} ({}), {:.2} map units away",
        best.label, best.attributes["affiliation"], offset
    );
    Ok(())
}
