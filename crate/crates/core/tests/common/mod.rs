//! Independent scalar reimplementations used as oracles, plus random fixtures.
//! Nothing here calls the library's vector math.

#![allow(dead_code)]

use geolayout::{Edge, Graph, LayoutState, Node, ProjectionConfig, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type P = [f64; 3];

pub fn p(v: Vec3) -> P {
    [v.x, v.y, v.z]
}

fn len(a: P) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Force on v from u along an edge.
pub fn attraction(u: P, v: P, k: f64) -> P {
    let d = [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let l = len(d);
    [l * d[0] / k, l * d[1] / k, l * d[2] / k]
}

pub fn repulsion(u: P, v: P, k: f64) -> P {
    let d = [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let l2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    [-k * k * d[0] / l2, -k * k * d[1] / l2, -k * k * d[2] / l2]
}

pub fn geo(c: P, g: P, big_k: f64, k: f64) -> P {
    let a = [g[0] - c[0], g[1] - c[1], g[2] - c[2]];
    let l = len(a);
    [big_k * l * a[0] / k, big_k * l * a[1] / k, big_k * l * a[2] / k]
}

/// ‖got − want‖ / ‖want‖, or the absolute error when `want` is zero.
pub fn rel_err(got: P, want: P) -> f64 {
    let diff = len([got[0] - want[0], got[1] - want[1], got[2] - want[2]]);
    let scale = len(want);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn rel_err_scalar(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Plate carrée anchor from (lat, lon).
pub fn anchor(lat: f64, lon: f64, cfg: &ProjectionConfig) -> P {
    [lon * cfg.map_width / 360.0, lat * cfg.map_height / 180.0, cfg.anchor_height]
}

/// Edge length variation straight from the definition.
pub fn elv(lengths: &[f64]) -> f64 {
    let n = lengths.len() as f64;
    let mu = lengths.iter().sum::<f64>() / n;
    let mut acc = 0.0;
    for l in lengths {
        acc += (l - mu) * (l - mu) / (n * mu * mu);
    }
    acc.sqrt() / (n - 1.0).sqrt()
}

/// Mean horizontal offset over anchored nodes divided by map height.
pub fn mlo(graph: &Graph, state: &LayoutState, cfg: &ProjectionConfig) -> f64 {
    let mut total = 0.0;
    let mut count = 0.0;
    for node in graph.nodes() {
        let Some(geo) = node.geo else { continue };
        let a = anchor(geo.latitude, geo.longitude, cfg);
        let c = p(state.position(&node.id).unwrap());
        total += ((c[0] - a[0]).powi(2) + (c[1] - a[1]).powi(2)).sqrt();
        count += 1.0;
    }
    total / (count * cfg.map_height)
}

pub fn edge_lengths(graph: &Graph, state: &LayoutState) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .map(|e| {
            let a = p(state.position(&e.source).unwrap());
            let b = p(state.position(&e.target).unwrap());
            len([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
        })
        .collect()
}

/// Erdős–Rényi style graph with a random subset of nodes geolocated.
pub fn random_graph(seed: u64, n: usize, edge_p: f64, anchored_p: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            let node = Node::new(format!("v{i:03}"));
            if rng.random_bool(anchored_p) {
                node.with_geo(rng.random_range(-90.0..=90.0), rng.random_range(-180.0..=180.0))
            } else {
                node
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_p) {
                edges.push(Edge::new(format!("v{i:03}"), format!("v{j:03}"), rng.random_range(0.01..=1.0)));
            }
        }
    }
    Graph::new(nodes, edges).unwrap()
}

pub fn random_positions(seed: u64, n: usize, extent: f64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-extent..extent),
                rng.random_range(-extent..extent),
                rng.random_range(-extent..extent),
            )
        })
        .collect()
}
