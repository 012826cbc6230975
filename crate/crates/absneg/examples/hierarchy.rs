// Geodesic rotation sets, their sizes, and the upper bounds they give for
// the regular quadruplet.

use std::f64::consts::PI;

use absneg::free_geometry::{make_cone_states, ConeFamily};
use absneg::hierarchy::{build_geodesic, build_rotation_set, hierarchy_bound_with, PUBLISHED_COUNTS};
use absneg::quantifiers::Measure;

pub fn run(max_m: u32) -> absneg::Result<()> {
    println!(" m  vertices  |O_m|  |U_m|   published");
    let mut sets = Vec::new();
    for m in 0..=max_m {
        let set = build_rotation_set(m)?;
        let (o, u) = set.counts();
        let (_, po, pu) = PUBLISHED_COUNTS[m as usize];
        println!("{m:>2} {:>9} {o:>6} {u:>6}   ({po}, {pu})", build_geodesic(m)?.vertices.len());
        sets.push(set);
    }

    for theta in [0.3, 0.5, 0.9] {
        let states = make_cone_states(&ConeFamily::quadruplet(theta * PI, 1.0))?;
        let bounds = sets
            .iter()
            .map(|s| hierarchy_bound_with(s, &states, Measure::Robustness).map(|b| format!("{:.6}", b.0)))
            .collect::<absneg::Result<Vec<_>>>()?;
        println!("quadruplet θ={theta}π: bounds for m = 0..{max_m}: {}", bounds.join("  "));
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run(std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2))
}
