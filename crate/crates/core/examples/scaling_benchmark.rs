//! Times layouts over growing Type I and Type II graphs and fits the
//! log-log slope. Repulsion touches every node pair, so both families grow
//! roughly quadratically in n; edge count only shifts the constant.
//!
//!     cargo run --release --example scaling_benchmark [-- out.csv]

use geolayout::bench::{fit_scaling_exponent, run_benchmark, write_csv, BenchConfig};
use geolayout::simgen::DensityFamily;

fn main() -> geolayout::Result<()> {
    let mut config = BenchConfig::standard();
    config.sizes = vec![100, 200, 400, 800];
    config.families = vec![
        DensityFamily::TypeI { p: 0.05 },
        DensityFamily::TypeI { p: 0.5 },
        DensityFamily::TypeII { c: 50.0 },
    ];
    let rows = run_benchmark(&config)?;
    for r in &rows {
        match (r.median_seconds, &r.error) {
            (Some(t), _) => println!("{:<16} n={:<5} {:>8.3} s  ({} edges)", r.family_key(), r.spec.n, t, r.spec.edge_count()?),
            (None, Some(e)) => println!("{:<16} n={:<5} failed: {e}", r.family_key(), r.spec.n),
            (None, None) => unreachable!(),
        }
    }
    for (family, fit) in fit_scaling_exponent(&rows) {
        match fit {
            Ok(e) => println!("{family}: time ∝ n^{e:.2}"),
            Err(e) => println!("{family}: {e}"),
        }
    }
    if let Some(path) = std::env::args().nth(1) {
        write_csv(&rows, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
