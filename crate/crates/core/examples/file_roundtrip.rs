//! Graph and layout documents: canonical bytes, lossless floats, and the
//! errors a bad document produces.
//!
//!     cargo run --example file_roundtrip

use geolayout::io::{load_graph, load_graph_document, load_layout, save_graph, save_layout, Strictness};
use geolayout::simgen::gen_expert_network;
use geolayout::{metrics, simulate, LayoutParams};

fn main() -> geolayout::Result<()> {
    let graph = gen_expert_network(2)?;
    let bytes = save_graph(&graph)?;
    let again = save_graph(&load_graph(&bytes)?)?;
    println!("graph document: {} bytes, stable across save/load: {}", bytes.len(), bytes == again);

    let mut params = LayoutParams::for_graph(&graph);
    params.n_iterations = 100;
    let state = simulate(&graph, &params)?;
    let m = metrics::report(&graph, &state, &params.projection)?;
    let layout = save_layout(&state, &params, Some(&m))?;
    let (back, back_params) = load_layout(&layout)?;
    let exact = back
        .positions
        .iter()
        .zip(&state.positions)
        .all(|(a, b)| a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits() && a.z.to_bits() == b.z.to_bits());
    println!("layout document: {} bytes, positions bit-exact: {exact}, params equal: {}", layout.len(), back_params == params);
    println!("{}", String::from_utf8_lossy(&layout).lines().take(12).collect::<Vec<_>>().join("\n"));

    let broken: &[(&str, &str)] = &[
        ("weight out of range", r#"{"format_version":"1.0","nodes":[{"id":"a","label":"A"},{"id":"b","label":"B"}],"edges":[{"source":"a","target":"b","weight":1.5}]}"#),
        ("dangling endpoint", r#"{"format_version":"1.0","nodes":[{"id":"a","label":"A"}],"edges":[{"source":"a","target":"zz","weight":0.5}]}"#),
        ("future version", r#"{"format_version":"99.0","nodes":[],"edges":[]}"#),
        ("syntax", "{\"format_version\": \"1.0\",\n \"nodes\": [,]}"),
    ];
    for (what, text) in broken {
        println!("{what:>20}: {}", load_graph(text.as_bytes()).unwrap_err());
    }

    let extended = r#"{"format_version":"1.0","source":"survey","nodes":[],"edges":[]}"#;
    println!("{:>20}: {}", "strict", load_graph_document(extended.as_bytes(), Strictness::Strict).unwrap_err());
    let doc = load_graph_document(extended.as_bytes(), Strictness::Lenient)?;
    println!("{:>20}: kept {:?}", "lenient", doc.extra.keys().collect::<Vec<_>>());
    Ok(())
}
