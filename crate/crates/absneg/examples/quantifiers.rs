// Sum-negativity and robustness of states and measurements, the
// multi-object monotones, and their behaviour under free operations.

use std::f64::consts::PI;

use absneg::free_geometry::{make_cone_states, qubit_frame, tetrahedral_povm, ConeFamily, BETA};
use absneg::quantifiers::{
    apply_cpp, depolarize_states, measurement_sum_negativity, negativity_monotone, product_monotone,
    qubit_robustness, state_negativity_report, state_sum_negativity, CppMatrix,
};
use absneg::quantum_core::{state_from_bloch, MultiObject, Povm, UnitarySU2};

pub fn run() -> absneg::Result<()> {
    let f = qubit_frame();
    let id = UnitarySU2::identity();

    let rho = state_from_bloch(BETA[0])?;
    let n = state_sum_negativity(&rho, f, &id)?;
    let r = qubit_robustness(&rho, &id)?;
    println!("pure state along β̂₁: N = {n:.9}, R = {r:.9}, N/R = {:.9}", n / r);

    let pvm = Povm::from_matrices(vec![rho.matrix().clone(), absneg::quantum_core::identity(2) - rho.matrix()])?;
    println!("sharp measurement along β̂₁: N(M) = {:.9}", measurement_sum_negativity(&pvm, f, &id)?);

    let quad = make_cone_states(&ConeFamily::quadruplet(PI / 2.0, 1.0))?;
    let rep = state_negativity_report(&quad, f, &id)?;
    println!("quadruplet θ=π/2 at U=I: per-state N = {:?}, mean = {:.6}", rep.per_object, rep.mean);

    let mo = MultiObject::with_common_povm(&quad, &tetrahedral_povm())?;
    println!("with the tetrahedral POVM: product monotone {:.6}, negativity monotone {:.6}", product_monotone(&mo, &id)?, negativity_monotone(&mo, f, &id)?);

    for eps in [0.0, 0.25, 0.5, 1.0] {
        let noisy = depolarize_states(&quad, eps)?;
        println!("  depolarized ε={eps:.2}: mean N = {:.6}", state_negativity_report(&noisy, f, &id)?.mean);
    }

    let coarse = CppMatrix::new(vec![vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]])?;
    let pvm3 = Povm::from_matrices(vec![
        rho.matrix() * absneg::quantum_core::C64::from(0.5),
        rho.matrix() * absneg::quantum_core::C64::from(0.5),
        absneg::quantum_core::identity(2) - rho.matrix(),
    ])?;
    let out = apply_cpp(&[pvm3.clone()], &coarse)?;
    println!(
        "post-processing 3 → 2 outcomes: N(M) {:.6} → {:.6}",
        measurement_sum_negativity(&pvm3, f, &id)?,
        measurement_sum_negativity(&out[0], f, &id)?
    );
    Ok(())
}

fn main() -> absneg::Result<()> {
    run()
}
