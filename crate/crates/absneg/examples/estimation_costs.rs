// Sampling costs of the forward and time-reversed quasi-probability
// estimators, and how their overheads track the sum-negativities.

use absneg::estimation::{
    forward_cost, free_effect_reverse_cost, free_state_forward_cost, hoeffding_samples, reverse_cost,
    theorem2_report, CostParams,
};
use absneg::free_geometry::{make_cone_states, qubit_frame, ConeFamily};
use absneg::quantifiers::state_sum_negativity;
use absneg::quantum_core::{MultiObject, UnitarySU2};
use absneg::random::{random_povm, random_su2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> absneg::Result<()> {
    let cp = CostParams::new(0.1, 0.05)?;
    println!("ε = {}, δ = {}: c = {:.3}, Hoeffding samples = {:.2}", cp.epsilon, cp.delta, cp.c, hoeffding_samples(&cp));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = qubit_frame();
    let states = make_cone_states(&ConeFamily::quadruplet(0.9 * std::f64::consts::PI, 1.0))?;
    let povm = random_povm(2, 3, &mut rng);
    let u = UnitarySU2::identity();
    let (rho, e) = (&states[0], &povm.effects()[0]);
    let fwd = forward_cost(rho, e, f, &u, &cp)?;
    let fwd_free = free_state_forward_cost(e, f, &u, &cp)?;
    let n = state_sum_negativity(rho, f, &u)?;
    println!("forward: s = {fwd:.2}, free-state s = {fwd_free:.2}, ratio {:.9} = (1+N)² = {:.9}", fwd / fwd_free, (1.0 + n).powi(2));
    let rev = reverse_cost(rho, e, f, &u, &cp)?;
    println!("reverse: s = {rev:.2}, costliest free effect s = {:.2}", free_effect_reverse_cost(rho, f, &u, &cp)?);

    let pairs = states.into_iter().map(|s| (s, random_povm(2, 3, &mut rng))).collect();
    let mo = MultiObject::new(pairs)?;
    let us: Vec<_> = (0..5).map(|_| random_su2(&mut rng)).collect();
    for r in theorem2_report(&mo, &us, &cp)? {
        println!(
            "  1+N̄ = {:.9}  cost identity rhs = {:.9}  measurement slack {:.4}  combined slack {:.4}",
            r.identity_lhs, r.identity_rhs, r.eq29_slack, r.eq30_slack
        );
    }
    Ok(())
}

fn main() -> absneg::Result<()> {
    run()
}
