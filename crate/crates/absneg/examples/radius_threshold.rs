// Largest Bloch radius at which every regular quadruplet is free. Takes
// about half a minute on one core.

use std::f64::consts::PI;

use absneg::annealing::{radius_threshold, AnnealConfig, RadiusScan};

fn main() -> absneg::Result<()> {
    let t = radius_threshold(&AnnealConfig::default(), &RadiusScan::default())?;
    println!("per-angle free radius (coarse scan):");
    for (theta, r) in &t.coarse {
        println!("  θ = {:.4}π  r = {r:.4}", theta / PI);
    }
    println!("threshold r = {:.5} (bracket {:.5}..{:.5}) at θ = {:.4}π", t.radius, t.bracket.0, t.bracket.1, t.theta / PI);
    Ok(())
}
