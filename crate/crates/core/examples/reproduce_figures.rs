//! Regenerates every figure dataset with checksums, then replays one manifest.
//!
//! Usage: cargo run --release --example reproduce_figures [OUT_DIR]

use std::path::PathBuf;

use pulseforge::repro::{replay, reproduce, Figure, ReproConfig};

fn main() -> pulseforge::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("figures"));
    let cfg = ReproConfig::default();
    let argv: Vec<String> = std::env::args().collect();
    let mut manifests = Vec::new();
    for fig in Figure::ALL {
        let m = reproduce(fig, &cfg, &dir, argv.clone())?;
        for (file, sum) in &m.checksums {
            println!("{fig:>7}  {}  {file}", &sum[..16]);
        }
        manifests.push(m);
    }
    let stale = replay(&manifests[0], &dir)?;
    println!("replay of {}: {} mismatched files", manifests[0].figure, stale.len());
    Ok(())
}
