// The qubit free set: membership, the tetrahedral POVM, cone families and
// the critical opening angles of the regular quadruplet.

use std::f64::consts::PI;

use absneg::free_geometry::{
    is_free_bloch, make_cone_states, max_beta_dot, solve_critical_angles, tetrahedral_povm, ConeFamily,
    INV_SQRT3,
};
use absneg::quantifiers::mean_robustness;
use absneg::quantum_core::{BlochVector, UnitarySU2};
use absneg::free_geometry::is_free_effect;

pub fn run() -> absneg::Result<()> {
    for v in [
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(INV_SQRT3, INV_SQRT3, INV_SQRT3),
        BlochVector::new(-INV_SQRT3, -INV_SQRT3, -INV_SQRT3),
    ] {
        let (dot, k) = max_beta_dot(&v);
        println!("r = ({:+.3}, {:+.3}, {:+.3}): max r·β̂ = {dot:+.4} (k={}), free: {}", v.x, v.y, v.z, k + 1, is_free_bloch(&v));
    }

    let id = UnitarySU2::identity();
    let k = tetrahedral_povm();
    let free = k.effects().iter().map(|e| is_free_effect(e, &id)).collect::<absneg::Result<Vec<_>>>()?;
    println!("tetrahedral POVM effects free at U = I: {free:?}");

    let c = solve_critical_angles()?;
    println!(
        "critical angles: θ₁ = {:.6}π, θ₂ = {:.6}π, θ₃ = {:.6}π",
        c.theta1 / PI,
        c.theta2 / PI,
        c.theta3 / PI
    );

    for (name, fam) in [
        ("pair θ=π/2", ConeFamily::pair(PI / 2.0, 1.0)),
        ("triplet θ=2π/3", ConeFamily::triplet(2.0 * PI / 3.0, 1.0)),
        ("quadruplet θ=π/2", ConeFamily::quadruplet(PI / 2.0, 1.0)),
        ("quadruplet θ=π", ConeFamily::quadruplet(PI, 1.0)),
    ] {
        let states = make_cone_states(&fam)?;
        println!("{name}: mean robustness at U = I is {:.6}", mean_robustness(&states, &id)?);
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run()
}
