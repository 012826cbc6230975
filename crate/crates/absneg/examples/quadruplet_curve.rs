// Annealed mean robustness and sum-negativity of the regular quadruplet as
// a function of the opening angle.

use std::f64::consts::PI;

use absneg::annealing::{quadruplet_curve, AnnealConfig};

pub fn run(n: usize) -> absneg::Result<()> {
    if n < 2 {
        return Err(absneg::Error::InvalidParameter(format!("need at least 2 grid points, got {n}")));
    }
    let grid: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
    let curve = quadruplet_curve(&grid, 1.0, &AnnealConfig::default())?;
    println!("θ/π      robustness   sum-negativity  ratio");
    for p in curve {
        let ratio = p.ratio.map_or("-".to_string(), |r| format!("{r:.9}"));
        println!("{:.4}   {:.8}   {:.8}      {ratio}", p.theta / PI, p.mean_robustness, p.mean_sum_negativity.max(0.0));
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run(std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(21))
}
