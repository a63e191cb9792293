//! Seeded synthetic graph generators.
//!
//! - [`gen_clustered`]: semantic clusters that each live in one geographic
//!   region, plus outliers whose location belongs to another cluster.
//! - [`gen_density_graph`]: Type I graphs with `round(p·n(n−1)/2)` edges and
//!   Type II graphs with `round(c·n/2)` edges.
//! - [`gen_expert_network`]: a small worldwide expert network with profile
//!   attributes.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Node};

/// Smallest weight a clamped normal sample can take.
pub const MIN_WEIGHT: f64 = 1e-6;

/// Latitude/longitude box in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoRegion {
    pub name: String,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl GeoRegion {
    pub fn new(name: &str, lat: (f64, f64), lon: (f64, f64)) -> Self {
        GeoRegion {
            name: name.to_string(),
            lat_min: lat.0,
            lat_max: lat.1,
            lon_min: lon.0,
            lon_max: lon.1,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = (-90.0..=90.0).contains(&self.lat_min)
            && (-90.0..=90.0).contains(&self.lat_max)
            && (-180.0..=180.0).contains(&self.lon_min)
            && (-180.0..=180.0).contains(&self.lon_max)
            && self.lat_min <= self.lat_max
            && self.lon_min <= self.lon_max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("bad region {:?}", self.name)))
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> (f64, f64) {
        let lat = self.lat_min + rng.random::<f64>() * (self.lat_max - self.lat_min);
        let lon = self.lon_min + rng.random::<f64>() * (self.lon_max - self.lon_min);
        (lat, lon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub cluster_count: usize,
    pub nodes_per_cluster: usize,
    /// One region per cluster.
    pub geo_regions: Vec<GeoRegion>,
    pub intra_edge_probability: f64,
    pub inter_edge_probability: f64,
    pub intra_weight_mean: f64,
    pub intra_weight_sd: f64,
    pub inter_weight_mean: f64,
    pub inter_weight_sd: f64,
    /// Nodes relocated into another cluster's region, keeping their edges.
    pub outlier_count: usize,
    pub seed: u64,
}

impl Default for ClusterSpec {
    /// Three clusters of 70 in the US, Europe and Asia.
    fn default() -> Self {
        ClusterSpec {
            cluster_count: 3,
            nodes_per_cluster: 70,
            geo_regions: vec![
                GeoRegion::new("united-states", (30.0, 47.0), (-122.0, -75.0)),
                GeoRegion::new("europe", (40.0, 58.0), (-5.0, 25.0)),
                GeoRegion::new("asia", (15.0, 40.0), (75.0, 135.0)),
            ],
            intra_edge_probability: 0.15,
            inter_edge_probability: 0.01,
            intra_weight_mean: 0.7,
            intra_weight_sd: 0.1,
            inter_weight_mean: 0.3,
            inter_weight_sd: 0.1,
            outlier_count: 8,
            seed: 7,
        }
    }
}

impl ClusterSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.cluster_count == 0 || self.nodes_per_cluster == 0 {
            return bad("cluster_count and nodes_per_cluster must be positive".into());
        }
        if self.geo_regions.len() != self.cluster_count {
            return bad(format!(
                "{} regions for {} clusters",
                self.geo_regions.len(),
                self.cluster_count
            ));
        }
        for r in &self.geo_regions {
            r.validate()?;
        }
        if !(self.intra_edge_probability > 0.0 && self.intra_edge_probability <= 1.0) {
            return bad(format!(
                "intra_edge_probability {} outside (0, 1]",
                self.intra_edge_probability
            ));
        }
        if !(self.inter_edge_probability >= 0.0 && self.inter_edge_probability < 1.0) {
            return bad(format!(
                "inter_edge_probability {} outside [0, 1)",
                self.inter_edge_probability
            ));
        }
        if !(self.intra_weight_mean > self.inter_weight_mean) {
            return bad("intra_weight_mean must exceed inter_weight_mean".into());
        }
        for sd in [self.intra_weight_sd, self.inter_weight_sd] {
            if !(sd.is_finite() && sd >= 0.0) {
                return bad(format!("weight sd {sd} must be finite and >= 0"));
            }
        }
        let total = self.cluster_count * self.nodes_per_cluster;
        if self.outlier_count > total {
            return bad(format!("{} outliers among {total} nodes", self.outlier_count));
        }
        if self.outlier_count > 0 && self.cluster_count < 2 {
            return bad("outliers need at least two clusters".into());
        }
        Ok(())
    }
}

fn clamp_weight(w: f64) -> f64 {
    w.clamp(MIN_WEIGHT, 1.0)
}

pub fn cluster_node_id(cluster: usize, index: usize) -> String {
    format!("c{cluster}-{index:03}")
}

/// Generates a clustered graph. Node attributes record the semantic
/// `cluster`, the `region` the location was drawn from and whether the node is
/// an `outlier`.
pub fn gen_clustered(spec: &ClusterSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.cluster_count * spec.nodes_per_cluster;
    let cluster_of = |i: usize| i / spec.nodes_per_cluster;

    let mut geo: Vec<(f64, f64)> = (0..total)
        .map(|i| spec.geo_regions[cluster_of(i)].sample(&mut rng))
        .collect();
    let mut region: Vec<usize> = (0..total).map(cluster_of).collect();

    let intra = Normal::new(spec.intra_weight_mean, spec.intra_weight_sd)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let inter = Normal::new(spec.inter_weight_mean, spec.inter_weight_sd)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let ids: Vec<String> = (0..total)
        .map(|i| cluster_node_id(cluster_of(i), i % spec.nodes_per_cluster))
        .collect();

    let mut edges = Vec::new();
    for i in 0..total {
        for j in i + 1..total {
            let same = cluster_of(i) == cluster_of(j);
            let p = if same {
                spec.intra_edge_probability
            } else {
                spec.inter_edge_probability
            };
            if rng.random::<f64>() < p {
                let w = if same {
                    intra.sample(&mut rng)
                } else {
                    inter.sample(&mut rng)
                };
                edges.push(Edge::new(ids[i].clone(), ids[j].clone(), clamp_weight(w)));
            }
        }
    }

    let mut outlier = vec![false; total];
    for i in sample(&mut rng, total, spec.outlier_count).into_vec() {
        let home = cluster_of(i);
        let mut other = rng.random_range(0..spec.cluster_count - 1);
        if other >= home {
            other += 1;
        }
        geo[i] = spec.geo_regions[other].sample(&mut rng);
        region[i] = other;
        outlier[i] = true;
    }

    let nodes = (0..total)
        .map(|i| {
            Node::new(ids[i].clone())
                .with_label(format!("Researcher {}", ids[i]))
                .with_geo(geo[i].0, geo[i].1)
                .with_attribute("cluster", cluster_of(i).to_string())
                .with_attribute("region", spec.geo_regions[region[i]].name.clone())
                .with_attribute("outlier", outlier[i].to_string())
        })
        .collect();
    Graph::new(nodes, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityFamily {
    /// Edge count proportional to the complete graph: `p·n(n−1)/2`.
    TypeI { p: f64 },
    /// Edge count proportional to the node count: `c·n/2`.
    TypeII { c: f64 },
}

impl DensityFamily {
    pub fn label(&self) -> &'static str {
        match self {
            DensityFamily::TypeI { .. } => "type1",
            DensityFamily::TypeII { .. } => "type2",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            DensityFamily::TypeI { p } => p,
            DensityFamily::TypeII { c } => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityGraphSpec {
    pub n: usize,
    #[serde(flatten)]
    pub family: DensityFamily,
    pub seed: u64,
}

impl DensityGraphSpec {
    pub fn type1(n: usize, p: f64, seed: u64) -> Self {
        DensityGraphSpec {
            n,
            family: DensityFamily::TypeI { p },
            seed,
        }
    }

    pub fn type2(n: usize, c: f64, seed: u64) -> Self {
        DensityGraphSpec {
            n,
            family: DensityFamily::TypeII { c },
            seed,
        }
    }

    /// Target edge count, rounded half away from zero.
    pub fn edge_count(&self) -> Result<usize> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        let n = self.n as f64;
        let exact = match self.family {
            DensityFamily::TypeI { p } => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidSpec(format!("p = {p} outside (0, 1]")));
                }
                p * n * (n - 1.0) / 2.0
            }
            DensityFamily::TypeII { c } => {
                if !(c >= 0.0 && c <= n - 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "c = {c} outside [0, {}]",
                        self.n - 1
                    )));
                }
                c * n / 2.0
            }
        };
        let count = exact.round() as usize;
        let max = self.n * (self.n - 1) / 2;
        if count > max {
            return Err(Error::InvalidSpec(format!(
                "{count} edges requested but only {max} pairs exist"
            )));
        }
        Ok(count)
    }
}

/// Zero-padded ids so lexicographic order matches numeric order.
pub fn density_node_id(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("n{i:0width$}")
}

#[cfg(test)]
/// Maps a linear index in `0..n(n−1)/2` to the pair `(i, j)`, `i < j`, in
/// row-major order of the upper triangle.
fn pair_from_index(mut idx: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

/// Uniformly chosen edges (without replacement) with weights uniform in (0, 1]
/// and locations uniform over the sphere.
pub fn gen_density_graph(spec: &DensityGraphSpec) -> Result<Graph> {
    let n_edges = spec.edge_count()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ids: Vec<String> = (0..n).map(|i| density_node_id(i, n)).collect();
    let nodes: Vec<Node> = ids
        .iter()
        .map(|id| {
            let lat = (2.0 * rng.random::<f64>() - 1.0).asin().to_degrees();
            let lon = rng.random::<f64>() * 360.0 - 180.0;
            Node::new(id.clone()).with_geo(lat.clamp(-90.0, 90.0), lon)
        })
        .collect();

    let total_pairs = n * (n - 1) / 2;
    let mut chosen = sample(&mut rng, total_pairs, n_edges).into_vec();
    chosen.sort_unstable();
    // walk rows once instead of solving for each index
    let mut edges = Vec::with_capacity(n_edges);
    let (mut row, mut row_start) = (0usize, 0usize);
    for idx in chosen {
        while idx >= row_start + (n - 1 - row) {
            row_start += n - 1 - row;
            row += 1;
        }
        let (i, j) = (row, row + 1 + idx - row_start);
        let w = 1.0 - rng.random::<f64>();
        edges.push(Edge::new(ids[i].clone(), ids[j].clone(), w));
    }
    Graph::new(nodes, edges)
}

const CITIES: &[(&str, f64, f64)] = &[
    ("Johns Hopkins University, Baltimore", 39.2904, -76.6122),
    ("University of California, San Francisco", 37.7749, -122.4194),
    ("Emory University, Atlanta", 33.7490, -84.3880),
    ("University of Washington, Seattle", 47.6062, -122.3321),
    ("Arizona State University, Tempe", 33.4255, -111.9400),
    ("University of Toronto", 43.6532, -79.3832),
    ("Universidad Nacional Autónoma de México", 19.4326, -99.1332),
    ("Fiocruz, Rio de Janeiro", -22.9068, -43.1729),
    ("Universidad de Buenos Aires", -34.6037, -58.3816),
    ("London School of Hygiene & Tropical Medicine", 51.5074, -0.1278),
    ("Institut Pasteur, Paris", 48.8566, 2.3522),
    ("Charité, Berlin", 52.5200, 13.4050),
    ("Karolinska Institutet, Stockholm", 59.3293, 18.0686),
    ("University of Geneva", 46.2044, 6.1432),
    ("University of Cape Town", -33.9249, 18.4241),
    ("Makerere University, Kampala", 0.3476, 32.5825),
    ("University of Nairobi", -1.2921, 36.8219),
    ("All India Institute of Medical Sciences, New Delhi", 28.6139, 77.2090),
    ("Christian Medical College, Vellore", 12.9165, 79.1325),
    ("University of Hong Kong", 22.3193, 114.1694),
    ("National University of Singapore", 1.3521, 103.8198),
    ("University of Tokyo", 35.6762, 139.6503),
    ("University of Sydney", -33.8688, 151.2093),
    ("Mahidol University, Bangkok", 13.7563, 100.5018),
];

const FIRST: &[&str] = &[
    "Amara", "Bo", "Carmen", "Dmitri", "Elif", "Farid", "Grace", "Hiro", "Ines", "Jonas", "Kavya",
    "Lena", "Mateo", "Nia", "Omar", "Priya", "Quinn", "Rosa", "Sven", "Tariq", "Uma",
];
const LAST: &[&str] = &[
    "Abara", "Berg", "Chen", "Diaz", "Evans", "Fischer", "Gupta", "Haddad", "Ito", "Jensen",
    "Kim", "Lopez", "Mensah", "Novak", "Okafor", "Patel", "Rossi", "Silva", "Tanaka",
];
const TOPICS: &[&str] = &[
    "COVID-19 epidemiology",
    "vaccine development",
    "antimicrobial resistance",
    "malaria",
    "tuberculosis",
    "emerging zoonoses",
    "disease surveillance",
    "health logistics",
];

/// Worldwide network of 41 infectious-disease experts. Each expert has a
/// name, research interest, affiliation with its location and a profile URL.
/// Edges link experts with overlapping interests; the weight is the Jaccard
/// similarity of their topic sets, lightly perturbed.
pub fn gen_expert_network(seed: u64) -> Result<Graph> {
    const EXPERTS: usize = 41;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut topic_sets: Vec<Vec<usize>> = Vec::with_capacity(EXPERTS);
    let mut nodes = Vec::with_capacity(EXPERTS);
    for i in 0..EXPERTS {
        // a third of the experts share the first topic, forming a dense core
        let mut topics: Vec<usize> = if i % 3 == 0 { vec![0] } else { vec![] };
        let extra = rng.random_range(1..=2);
        while topics.len() < extra + usize::from(i % 3 == 0) {
            let t = rng.random_range(0..TOPICS.len());
            if !topics.contains(&t) {
                topics.push(t);
            }
        }
        topics.sort_unstable();
        let (affiliation, lat, lon) = CITIES[rng.random_range(0..CITIES.len())];
        let name = format!(
            "{} {}",
            FIRST[rng.random_range(0..FIRST.len())],
            LAST[rng.random_range(0..LAST.len())]
        );
        let id = format!("expert-{:02}", i + 1);
        let interest = topics.iter().map(|&t| TOPICS[t]).collect::<Vec<_>>().join("; ");
        nodes.push(
            Node::new(id.clone())
                .with_label(name)
                .with_geo(lat, lon)
                .with_attribute("interest", interest)
                .with_attribute("affiliation", affiliation)
                .with_attribute("profile_url", format!("https://experts.example.org/{id}")),
        );
        topic_sets.push(topics);
    }

    let mut edges = Vec::new();
    for i in 0..EXPERTS {
        for j in i + 1..EXPERTS {
            let (a, b) = (&topic_sets[i], &topic_sets[j]);
            let shared = a.iter().filter(|t| b.contains(t)).count();
            let noise = rng.random::<f64>();
            if shared == 0 {
                continue;
            }
            let union = a.len() + b.len() - shared;
            let jaccard = shared as f64 / union as f64;
            let w = clamp_weight(jaccard * (0.85 + 0.15 * noise));
            edges.push(Edge::new(nodes[i].id.clone(), nodes[j].id.clone(), w));
        }
    }
    Graph::new(nodes, edges)
}
