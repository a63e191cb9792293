//! Geographically constrained force-directed simulation.
//!
//! Each iteration zeroes the net forces, accumulates edge attraction,
//! all-pairs repulsion and the geo-force, moves every node along its net
//! force by at most the current temperature, then cools the temperature by
//! `(1 − α)`. Node order is the graph's canonical id order, so a run is a
//! pure function of `(graph, params)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{attractive_force, coincident_direction, geo_force, repulsive_force_with_fallback, COINCIDENT_EPSILON};
use crate::graph::{project_geo, Graph, ProjectionConfig};
use crate::vector::{ForceVector, VirtualPosition, Vec3};

pub const DEFAULT_GEO_WEIGHT: f64 = 5.0;
pub const DEFAULT_COOLING_ALPHA: f64 = 0.02;
pub const DEFAULT_ITERATIONS: usize = 300;
pub const DEFAULT_SEED: u64 = 42;

/// How starting positions are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Uniform in the projection box, z in `[0, 2·anchor_height]`.
    #[default]
    Random,
    /// Anchored nodes start on their anchor; the rest as in `Random`.
    AtAnchors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutParams {
    /// Attraction/repulsion balance; the rest length of an isolated edge.
    pub k: f64,
    /// Geo-force weight `K`. Zero disables the geo-force.
    pub geo_weight: f64,
    pub initial_temperature: f64,
    pub cooling_alpha: f64,
    pub n_iterations: usize,
    pub seed: u64,
    pub projection: ProjectionConfig,
    /// Scale attraction by edge weight.
    #[serde(default)]
    pub weighted_attraction: bool,
    #[serde(default)]
    pub init_mode: InitMode,
}

/// `(extent³ / n)^(1/3)` where extent is the map height.
pub fn default_k(node_count: usize, projection: &ProjectionConfig) -> f64 {
    let extent = projection.map_height;
    (extent.powi(3) / node_count.max(1) as f64).cbrt()
}

impl LayoutParams {
    /// Defaults for a graph of `node_count` nodes on `projection`.
    pub fn with_projection(node_count: usize, projection: ProjectionConfig) -> Self {
        LayoutParams {
            k: default_k(node_count, &projection),
            geo_weight: DEFAULT_GEO_WEIGHT,
            initial_temperature: projection.map_height / 10.0,
            cooling_alpha: DEFAULT_COOLING_ALPHA,
            n_iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
            projection,
            weighted_attraction: false,
            init_mode: InitMode::Random,
        }
    }

    /// Defaults for `graph` on the default 360×180 projection.
    pub fn for_graph(graph: &Graph) -> Self {
        Self::with_projection(graph.node_count(), ProjectionConfig::default())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::invalid(format!("k must be > 0, got {}", self.k)));
        }
        if !(self.geo_weight.is_finite() && self.geo_weight >= 0.0) {
            return Err(Error::invalid(format!(
                "geo weight K must be >= 0, got {}",
                self.geo_weight
            )));
        }
        if !(self.initial_temperature.is_finite() && self.initial_temperature > 0.0) {
            return Err(Error::invalid(format!(
                "initial temperature must be > 0, got {}",
                self.initial_temperature
            )));
        }
        if !(self.cooling_alpha > 0.0 && self.cooling_alpha < 1.0) {
            return Err(Error::invalid(format!(
                "cooling alpha must be in (0, 1), got {}",
                self.cooling_alpha
            )));
        }
        if self.n_iterations == 0 {
            return Err(Error::invalid("n_iterations must be >= 1"));
        }
        self.projection.validate()
    }
}

/// Returns `params` with the geo weight replaced. The temperature is not touched;
/// see [`LayoutState::reheat`].
pub fn update_geo_weight(params: &LayoutParams, geo_weight: f64) -> Result<LayoutParams> {
    if !(geo_weight.is_finite() && geo_weight >= 0.0) {
        return Err(Error::invalid(format!(
            "geo weight K must be >= 0, got {geo_weight}"
        )));
    }
    Ok(LayoutParams {
        geo_weight,
        ..params.clone()
    })
}

/// Positions of every node plus the annealing temperature.
///
/// Vectors are parallel to the graph's canonical node order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutState {
    pub node_ids: Vec<String>,
    pub positions: Vec<VirtualPosition>,
    pub temperature: f64,
    pub iteration: usize,
    /// Projected geolocation per node, fixed for the run.
    pub geo_anchors: Vec<Option<VirtualPosition>>,
}

/// Per-iteration bookkeeping returned by [`step_in_place`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Temperature used as the displacement cap for this iteration.
    pub max_step: f64,
    pub max_displacement: f64,
}

/// Projected anchors for every node, `None` for nodes without geolocation.
pub fn geo_anchors(graph: &Graph, projection: &ProjectionConfig) -> Result<Vec<Option<VirtualPosition>>> {
    graph
        .nodes()
        .iter()
        .map(|n| n.geo.map(|g| project_geo(g, projection)).transpose())
        .collect()
}

impl LayoutState {
    /// Seeded starting state at iteration 0 and temperature `T0`.
    ///
    /// Draws come from ChaCha8 seeded with `seed_from_u64(params.seed)`,
    /// three `f64` in `[0, 1)` per node in canonical id order (x, y, z).
    pub fn initialize(graph: &Graph, params: &LayoutParams) -> Result<Self> {
        params.validate()?;
        let proj = params.projection;
        let anchors = geo_anchors(graph, &proj)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let positions = anchors
            .iter()
            .map(|anchor| {
                let x = (rng.random::<f64>() - 0.5) * proj.map_width;
                let y = (rng.random::<f64>() - 0.5) * proj.map_height;
                let z = rng.random::<f64>() * 2.0 * proj.anchor_height;
                match (params.init_mode, anchor) {
                    (InitMode::AtAnchors, Some(a)) => *a,
                    _ => Vec3::new(x, y, z),
                }
            })
            .collect();
        Ok(LayoutState {
            node_ids: graph.nodes().iter().map(|n| n.id.clone()).collect(),
            positions,
            temperature: params.initial_temperature,
            iteration: 0,
            geo_anchors: anchors,
        })
    }

    /// State from explicit positions, with anchors projected from `graph`.
    pub fn from_positions(
        graph: &Graph,
        positions: Vec<VirtualPosition>,
        projection: &ProjectionConfig,
        temperature: f64,
        iteration: usize,
    ) -> Result<Self> {
        if positions.len() != graph.node_count() {
            return Err(Error::Precondition(format!(
                "{} positions for {} nodes",
                positions.len(),
                graph.node_count()
            )));
        }
        Ok(LayoutState {
            node_ids: graph.nodes().iter().map(|n| n.id.clone()).collect(),
            positions,
            temperature,
            iteration,
            geo_anchors: geo_anchors(graph, projection)?,
        })
    }

    pub fn position(&self, id: &str) -> Option<VirtualPosition> {
        self.node_ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
            .map(|i| self.positions[i])
    }

    /// Set the temperature explicitly, e.g. after a live K change.
    pub fn reheat(&mut self, temperature: f64) -> Result<()> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        self.temperature = temperature;
        Ok(())
    }

    fn check_consistent(&self, graph: &Graph) -> Result<()> {
        let n = graph.node_count();
        if self.positions.len() != n || self.node_ids.len() != n || self.geo_anchors.len() != n {
            return Err(Error::Precondition(format!(
                "state covers {} nodes, graph has {n}",
                self.positions.len()
            )));
        }
        if let Some((node, id)) = graph
            .nodes()
            .iter()
            .zip(&self.node_ids)
            .find(|(node, id)| node.id != **id)
        {
            return Err(Error::Precondition(format!(
                "state node {id:?} does not match graph node {:?}",
                node.id
            )));
        }
        Ok(())
    }
}

/// Net force on every node for the current positions.
pub fn net_forces(graph: &Graph, state: &LayoutState, params: &LayoutParams) -> Vec<ForceVector> {
    let k = params.k;
    let pos = &state.positions;
    let mut forces = vec![Vec3::ZERO; pos.len()];

    for ((u, v), edge) in graph.edge_endpoints().iter().zip(graph.edges()) {
        let mut f = attractive_force(pos[*u], pos[*v], k);
        if params.weighted_attraction {
            f = f * edge.weight;
        }
        // f^A(v, u) = −f^A(u, v)
        forces[*v] += f;
        forces[*u] -= f;
    }

    // Each unordered pair once; f^R(v, u) = −f^R(u, v) exactly.
    let k2 = k * k;
    let eps2 = COINCIDENT_EPSILON * COINCIDENT_EPSILON;
    for u in 0..pos.len() {
        let pu = pos[u];
        let mut acc = Vec3::ZERO;
        for v in u + 1..pos.len() {
            let d = pu - pos[v];
            let dist2 = d.norm_squared();
            let f = if dist2 < eps2 {
                let dir = coincident_direction(&state.node_ids[u], &state.node_ids[v]);
                repulsive_force_with_fallback(pu, pos[v], k, dir)
            } else {
                d * (-k2 / dist2)
            };
            forces[v] += f;
            acc -= f;
        }
        forces[u] += acc;
    }

    if params.geo_weight > 0.0 {
        for (f, (p, anchor)) in forces.iter_mut().zip(pos.iter().zip(&state.geo_anchors)) {
            if let Some(a) = anchor {
                *f += geo_force(*p, *a, params.geo_weight, k);
            }
        }
    }
    forces
}

/// Moves every node by `F/‖F‖ · min(T, ‖F‖)`, then cools.
pub fn step_in_place(graph: &Graph, state: &mut LayoutState, params: &LayoutParams) -> Result<StepReport> {
    state.check_consistent(graph)?;
    let forces = net_forces(graph, state, params);
    let max_step = state.temperature;
    let mut max_displacement: f64 = 0.0;
    for (p, f) in state.positions.iter_mut().zip(&forces) {
        let magnitude = f.norm();
        if magnitude > 0.0 && magnitude.is_finite() {
            let delta = *f / magnitude * max_step.min(magnitude);
            *p += delta;
            max_displacement = max_displacement.max(delta.norm());
        }
    }
    state.temperature *= 1.0 - params.cooling_alpha;
    state.iteration += 1;
    Ok(StepReport {
        max_step,
        max_displacement,
    })
}

/// One iteration, returning the new state.
pub fn step(graph: &Graph, state: &LayoutState, params: &LayoutParams) -> Result<LayoutState> {
    let mut next = state.clone();
    step_in_place(graph, &mut next, params)?;
    Ok(next)
}

/// Seeded initialization followed by `params.n_iterations` steps.
pub fn simulate(graph: &Graph, params: &LayoutParams) -> Result<LayoutState> {
    let mut state = LayoutState::initialize(graph, params)?;
    for _ in 0..params.n_iterations {
        step_in_place(graph, &mut state, params)?;
    }
    Ok(state)
}
