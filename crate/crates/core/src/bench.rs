//! Layout wall time versus graph size for the density graph families.
//!
//! Each cell generates one graph, serializes it, then times `repetitions`
//! runs of "parse the graph document + simulate". Generation is not timed.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{load_graph, save_graph, save_layout};
use crate::layout::{default_k, simulate, LayoutParams};
use crate::simgen::{gen_density_graph, DensityFamily, DensityGraphSpec};

pub const CSV_COLUMNS: [&str; 14] = [
    "family",
    "n",
    "p_or_c",
    "seed",
    "repetitions",
    "median_seconds",
    "all_samples_seconds",
    "graph_hash",
    "k",
    "K",
    "T0",
    "alpha",
    "n_iterations",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingMode {
    /// Parse + simulate.
    #[default]
    EngineOnly,
    /// Also serializes the resulting layout document.
    EndToEnd,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub families: Vec<DensityFamily>,
    pub repetitions: usize,
    pub seed: u64,
    /// Template; `k` is replaced per size when `auto_k` is set.
    pub params: LayoutParams,
    pub auto_k: bool,
    pub mode: TimingMode,
    /// Run cells concurrently. Timings then interfere with each other.
    pub parallel: bool,
}

impl BenchConfig {
    /// The 5 sizes × 3 families grid with default layout parameters.
    pub fn standard() -> Self {
        let params = LayoutParams::with_projection(100, Default::default());
        BenchConfig {
            sizes: vec![100, 200, 400, 800, 1600],
            families: vec![
                DensityFamily::TypeI { p: 0.05 },
                DensityFamily::TypeI { p: 0.5 },
                DensityFamily::TypeII { c: 50.0 },
            ],
            repetitions: 3,
            seed: 1,
            params,
            auto_k: true,
            mode: TimingMode::EngineOnly,
            parallel: false,
        }
    }
}

/// One (size, family) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub spec: DensityGraphSpec,
    pub params: LayoutParams,
    pub repetitions: usize,
    pub samples: Vec<f64>,
    pub median_seconds: Option<f64>,
    pub graph_hash: String,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn family_key(&self) -> String {
        family_key(&self.spec.family)
    }
}

pub fn family_key(family: &DensityFamily) -> String {
    match family {
        DensityFamily::TypeI { p } => format!("type1(p={p})"),
        DensityFamily::TypeII { c } => format!("type2(c={c})"),
    }
}

pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn run_cell(spec: DensityGraphSpec, config: &BenchConfig) -> BenchRow {
    let mut params = config.params.clone();
    if config.auto_k {
        params.k = default_k(spec.n, &params.projection);
    }
    let mut row = BenchRow {
        spec,
        params: params.clone(),
        repetitions: config.repetitions,
        samples: Vec::new(),
        median_seconds: None,
        graph_hash: String::new(),
        error: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<(String, Vec<f64>)> {
        let graph = gen_density_graph(&spec)?;
        let bytes = save_graph(&graph)?;
        let hash = sha256_hex(&bytes);
        drop(graph);
        let mut samples = Vec::with_capacity(config.repetitions);
        for _ in 0..config.repetitions {
            let start = Instant::now();
            let graph = load_graph(&bytes)?;
            let state = simulate(&graph, &params)?;
            if config.mode == TimingMode::EndToEnd {
                std::hint::black_box(save_layout(&state, &params, None)?);
            }
            std::hint::black_box(&state);
            samples.push(start.elapsed().as_secs_f64());
        }
        Ok((hash, samples))
    }));
    match outcome {
        Ok(Ok((hash, samples))) => {
            row.graph_hash = hash;
            row.median_seconds = median(&samples);
            row.samples = samples;
        }
        Ok(Err(e)) => row.error = Some(e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            row.error = Some(format!("cell aborted: {msg}"));
        }
    }
    row
}

/// Runs every (family, size) cell, families outermost. A failing cell yields
/// a row with `error` set instead of aborting the run.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.repetitions == 0 {
        return Err(Error::invalid("repetitions must be >= 1"));
    }
    if config.sizes.is_empty() || config.families.is_empty() {
        return Err(Error::invalid("need at least one size and one family"));
    }
    config.params.validate()?;
    let specs: Vec<DensityGraphSpec> = config
        .families
        .iter()
        .flat_map(|family| {
            config.sizes.iter().map(move |&n| DensityGraphSpec {
                n,
                family: *family,
                seed: config.seed,
            })
        })
        .collect();
    let rows = if config.parallel {
        specs.par_iter().map(|s| run_cell(*s, config)).collect()
    } else {
        specs.iter().map(|s| run_cell(*s, config)).collect()
    };
    Ok(rows)
}

/// Least-squares slope of `ln(time)` against `ln(n)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 sizes to fit an exponent, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, t)| n <= 0.0 || t <= 0.0) {
        return Err(Error::invalid("sizes and times must be positive"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all sizes are equal"));
    }
    Ok(sxy / sxx)
}

/// Scaling exponent per family over the successful rows.
pub fn fit_scaling_exponent(rows: &[BenchRow]) -> BTreeMap<String, Result<f64>> {
    let mut by_family: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        let entry = by_family.entry(row.family_key()).or_default();
        if let Some(t) = row.median_seconds {
            entry.push((row.spec.n as f64, t));
        }
    }
    by_family
        .into_iter()
        .map(|(k, pts)| (k, fit_power_law(&pts)))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        let samples = r
            .samples
            .iter()
            .map(|s| format!("{s:.6}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.spec.family.label().to_string(),
            r.spec.n.to_string(),
            r.spec.family.parameter().to_string(),
            r.spec.seed.to_string(),
            r.repetitions.to_string(),
            r.median_seconds.map(|m| format!("{m:.6}")).unwrap_or_default(),
            samples,
            r.graph_hash.clone(),
            r.params.k.to_string(),
            r.params.geo_weight.to_string(),
            r.params.initial_temperature.to_string(),
            r.params.cooling_alpha.to_string(),
            r.params.n_iterations.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_laws() {
        let sq: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0].iter().map(|&n| (n, n * n)).collect();
        assert_relative_eq!(fit_power_law(&sq).unwrap(), 2.0, max_relative = 1e-12);
        let lin: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&n| (n, 5.0 * n)).collect();
        assert_relative_eq!(fit_power_law(&lin).unwrap(), 1.0, max_relative = 1e-12);
        assert!(fit_power_law(&lin[..2]).is_err());
    }

    #[test]
    fn median_of_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    fn tiny_config() -> BenchConfig {
        let mut params = LayoutParams::with_projection(10, Default::default());
        params.n_iterations = 5;
        BenchConfig {
            sizes: vec![20],
            families: vec![DensityFamily::TypeI { p: 0.2 }],
            repetitions: 3,
            seed: 9,
            params,
            auto_k: true,
            mode: TimingMode::EngineOnly,
            parallel: false,
        }
    }

    #[test]
    fn single_cell_records_every_sample() {
        let rows = run_benchmark(&tiny_config()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].samples.len(), 3);
        assert!(rows[0].median_seconds.unwrap() > 0.0);
        assert_eq!(rows[0].graph_hash.len(), 64);
    }

    #[test]
    fn failing_cell_is_reported_not_fatal() {
        let mut config = tiny_config();
        // c = 50 is infeasible for n = 20
        config.families.push(DensityFamily::TypeII { c: 50.0 });
        let rows = run_benchmark(&config).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.as_deref().unwrap().contains("c = 50"));
        assert!(rows[1].median_seconds.is_none());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let rows = run_benchmark(&tiny_config()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), CSV_COLUMNS.len());
        assert_eq!(fields[0], "type1");
        assert_eq!(fields[1], "20");
    }
}
