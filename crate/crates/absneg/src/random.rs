//! Random states, effects, POVMs and unitaries for sweeps and tests.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::quantum_core::{
    identity, ComplexMatrix, Povm, QuantumState, Unitary, UnitarySU2, C64,
};

fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Hilbert–Schmidt random mixed state.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuantumState {
    let g = ginibre(d, rng);
    let mut m = &g * g.adjoint();
    let tr = crate::quantum_core::trace(&m).re;
    m /= C64::from(tr);
    m = (&m + m.adjoint()) * C64::from(0.5);
    QuantumState::new(m).expect("Ginibre state")
}

/// Haar random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuantumState {
    let ket: Vec<C64> = (0..d)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    QuantumState::from_ket(&ket).expect("nonzero ket")
}

/// Haar random unitary (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Unitary {
    let qr = ginibre(d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let p = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= p;
        }
    }
    Unitary::new(q).expect("QR unitary")
}

/// Haar random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> UnitarySU2 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        if let Ok(u) = UnitarySU2::from_quaternion(q) {
            return u;
        }
    }
}

/// Random POVM with `k` outcomes: M_a = S^{-1/2} A_a S^{-1/2}, A_a Wishart.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Povm {
    let parts: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(d, rng);
            &g * g.adjoint()
        })
        .collect();
    let sum = parts.iter().fold(ComplexMatrix::zeros(d, d), |acc, a| acc + a);
    let eig = sum.symmetric_eigen();
    let inv_sqrt = DVector::from_iterator(d, eig.eigenvalues.iter().map(|l| C64::from(l.powf(-0.5))));
    let s = &eig.eigenvectors * ComplexMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.adjoint();
    let mut effects: Vec<ComplexMatrix> = parts
        .iter()
        .map(|a| {
            let m = &s * a * &s;
            (&m + m.adjoint()) * C64::from(0.5)
        })
        .collect();
    // absorb rounding so the sum is I to machine precision
    let resid = identity(d) - effects.iter().fold(ComplexMatrix::zeros(d, d), |acc, a| acc + a);
    effects[0] += resid;
    Povm::from_matrices(effects).expect("normalized POVM")
}

/// Random column-stochastic matrix with `rows` × `cols` entries.
pub fn random_stochastic<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut p = vec![vec![0.0; cols]; rows];
    for a in 0..cols {
        let col: Vec<f64> = (0..rows).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = col.iter().sum();
        for x in 0..rows {
            p[x][a] = col[x] / s;
        }
    }
    p
}
