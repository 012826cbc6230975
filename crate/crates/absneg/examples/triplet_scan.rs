// Annealed scan of irregular pure-state triplets with azimuths 0, φ₂, −φ₃.

use std::f64::consts::PI;

use absneg::annealing::{triplet_grid, triplet_scan, AnnealConfig};

pub fn run(n: usize) -> absneg::Result<()> {
    let cfg = AnnealConfig { restarts: 4, ..AnnealConfig::default() };
    let pts = triplet_scan(&triplet_grid(n, n, n), &cfg)?;
    let hits: Vec<_> = pts.iter().filter(|p| p.resourceful).collect();
    println!("{} of {} triplets resourceful", hits.len(), pts.len());
    for p in hits {
        println!(
            "  θ = {:.3}π  φ₂ = {:.3}π  φ₃ = {:.3}π  value {:.3e}",
            p.theta / PI,
            p.phi2 / PI,
            p.phi3 / PI,
            p.best_value
        );
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run(std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5))
}
