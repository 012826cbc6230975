// Discrete Wigner frames: phase-point operators, quasi-probabilities of
// states and effects, and the Born rule in a rotated frame.

use absneg::free_geometry::BETA;
use absneg::quantum_core::{state_from_bloch, Effect, UnitarySU2};
use absneg::random::{random_povm, random_state, random_unitary};
use absneg::wigner_frames::{born_probability, build_frame, wigner_effect, wigner_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> absneg::Result<()> {
    let f = build_frame(2)?;
    let id = UnitarySU2::identity();
    println!("qubit frame, W_α(ρ) for the four pure states along β̂_k:");
    for (k, b) in BETA.iter().enumerate() {
        let rho = state_from_bloch(*b)?;
        let w = wigner_state(&rho, &f, &id)?;
        let vals: Vec<String> = w.values.iter().map(|x| format!("{x:+.4}")).collect();
        println!("  β̂{}: [{}]  Σ|W| = {:.6}", k + 1, vals.join(", "), w.abs_sum());
    }

    let u = UnitarySU2::from_axis_angle([1.0, 1.0, 0.0], 0.7)?;
    let rho = state_from_bloch(BETA[0])?;
    println!("same state, frame rotated by 0.7 rad about (1,1,0): Σ|W| = {:.6}", wigner_state(&rho, &f, &u)?.abs_sum());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [2, 3, 5] {
        let f = build_frame(d)?;
        let rho = random_state(d, &mut rng);
        let m = random_povm(d, 3, &mut rng);
        let u = random_unitary(d, &mut rng);
        let e: &Effect = &m.effects()[0];
        let p = born_probability(&rho, e, &f, &u)?;
        let direct = absneg::quantum_core::trace_product(rho.matrix(), e.matrix()).re;
        let we = wigner_effect(e, &f, &u)?;
        println!("d={d}: Σ_α W(E|α)W_α(ρ) = {p:.12}, tr(ρE) = {direct:.12}, Σ_α W(E|α) = {:.6} = d·tr E", we.sum());
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run()
}
