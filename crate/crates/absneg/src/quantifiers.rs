//! Sum-negativities, analytic qubit robustness, multi-object monotones and
//! the free operations (depolarizing, classical post-processing).

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::free_geometry::{is_free_effect, max_beta_dot, INV_SQRT3};
use crate::quantum_core::{
    identity, BlochVector, ComplexMatrix, Effect, MultiObject, Povm, QuantumState, UnitaryOp,
    UnitarySU2, C64,
};
use crate::wigner_frames::{qubit_wigner, wigner_effect, wigner_state, Frame};

/// Trace below which N/tr is undefined.
pub const MIN_EFFECT_TRACE: f64 = 1e-12;

const ROB_SCALE: f64 = 0.633_974_596_215_561_4; // √3/(1+√3)

/// Per-object values of one quantifier at a fixed frame rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityReport {
    pub per_object: Vec<f64>,
    pub mean: f64,
    pub unitary: UnitarySU2,
}

impl NegativityReport {
    fn new(per_object: Vec<f64>, unitary: UnitarySU2) -> Result<Self> {
        if per_object.is_empty() {
            return Err(Error::Empty("state list"));
        }
        let mean = per_object.iter().sum::<f64>() / per_object.len() as f64;
        Ok(Self { per_object, mean, unitary })
    }
}

/// N(ρ) = Σ_α |W_α(UρU†)| − 1.
pub fn state_sum_negativity<U: UnitaryOp + ?Sized>(rho: &QuantumState, f: &Frame, u: &U) -> Result<f64> {
    Ok(wigner_state(rho, f, u)?.abs_sum() - 1.0)
}

/// N(E) = Σ_α |W(UEU†|α)| / d.
///
/// With G(α) = d·V(α) the representation of any effect sums to d·tr(E); the
/// 1/d makes a nonnegative representation give exactly tr(E), so that the
/// trivial measurement has zero measurement negativity.
pub fn effect_sum_negativity<U: UnitaryOp + ?Sized>(e: &Effect, f: &Frame, u: &U) -> Result<f64> {
    Ok(wigner_effect(e, f, u)?.abs_sum() / f.dim() as f64)
}

/// max_a N(M_a)/tr(M_a) − 1, with the lowest outcome index on ties.
pub fn measurement_sum_negativity<U: UnitaryOp + ?Sized>(m: &Povm, f: &Frame, u: &U) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for (index, e) in m.effects().iter().enumerate() {
        let trace = e.trace();
        if trace <= MIN_EFFECT_TRACE {
            return Err(Error::DegenerateEffect { index, trace });
        }
        best = best.max(effect_sum_negativity(e, f, u)? / trace);
    }
    Ok(best - 1.0)
}

/// Robustness of a Bloch vector against the unrotated free set.
pub fn bloch_robustness(r: &BlochVector) -> f64 {
    ROB_SCALE * (max_beta_dot(r).0 - INV_SQRT3).max(0.0)
}

/// R(ρ) = √3/(1+√3) · max_k I⁺[(Ur)·β̂_k − 1/√3].
pub fn qubit_robustness(rho: &QuantumState, u: &UnitarySU2) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    Ok(bloch_robustness(&u.rotate(&rho.bloch()?)))
}

/// State quantifier minimized over frame rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Robustness,
    Negativity,
}

impl Measure {
    /// Value for an already rotated Bloch vector.
    pub fn of_bloch(self, r: &BlochVector) -> f64 {
        match self {
            Measure::Robustness => bloch_robustness(r),
            Measure::Negativity => qubit_wigner(r).iter().map(|w| w.abs()).sum::<f64>() - 1.0,
        }
    }

    /// Mean over states of the value at rotation `rot`.
    pub fn mean_rotated(self, rot: &Matrix3<f64>, bloch: &[Vector3<f64>]) -> f64 {
        let s: f64 = bloch.iter().map(|b| self.of_bloch(&BlochVector::from(rot * b))).sum();
        s / bloch.len() as f64
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Robustness => "robustness",
            Measure::Negativity => "negativity",
        }
    }
}

pub fn mean_robustness(states: &[QuantumState], u: &UnitarySU2) -> Result<f64> {
    Ok(robustness_report(states, u)?.mean)
}

pub fn robustness_report(states: &[QuantumState], u: &UnitarySU2) -> Result<NegativityReport> {
    let per = states.iter().map(|s| qubit_robustness(s, u)).collect::<Result<_>>()?;
    NegativityReport::new(per, u.clone())
}

pub fn state_negativity_report(states: &[QuantumState], f: &Frame, u: &UnitarySU2) -> Result<NegativityReport> {
    let per = states.iter().map(|s| state_sum_negativity(s, f, u)).collect::<Result<_>>()?;
    NegativityReport::new(per, u.clone())
}

/// E_j[(1+R(ρ_j))(1+R(M_j))] − 1 with R(M_j) = 0 for measurements free at U.
///
/// Robustness of a measurement outside the free set needs a conic program;
/// such inputs are rejected.
pub fn product_monotone(mo: &MultiObject, u: &UnitarySU2) -> Result<f64> {
    let mut acc = 0.0;
    for (j, (s, m)) in mo.pairs().iter().enumerate() {
        for (a, e) in m.effects().iter().enumerate() {
            if !is_free_effect(e, u)? {
                return Err(Error::Unsupported(format!(
                    "measurement {j} effect {a} is not free at this rotation"
                )));
            }
        }
        acc += 1.0 + qubit_robustness(s, u)?;
    }
    Ok(acc / mo.n() as f64 - 1.0)
}

/// E_j[(1+N(ρ_j))(1+N(M_j))] − 1.
pub fn negativity_monotone<U: UnitaryOp + ?Sized>(mo: &MultiObject, f: &Frame, u: &U) -> Result<f64> {
    let mut acc = 0.0;
    for (s, m) in mo.pairs() {
        acc += (1.0 + state_sum_negativity(s, f, u)?) * (1.0 + measurement_sum_negativity(m, f, u)?);
    }
    Ok(acc / mo.n() as f64 - 1.0)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("depolarizing strength {eps} outside [0, 1]")));
    }
    Ok(())
}

/// ρ ↦ (1−ε)ρ + εI/d.
pub fn depolarize_states(states: &[QuantumState], eps: f64) -> Result<Vec<QuantumState>> {
    check_eps(eps)?;
    states
        .iter()
        .map(|s| {
            let d = s.dim();
            QuantumState::new(s.matrix() * C64::from(1.0 - eps) + identity(d) * C64::from(eps / d as f64))
        })
        .collect()
}

/// M_a ↦ (1−ε)M_a + ε·I/k for a k-outcome POVM (I/k = I/d when k = d).
pub fn depolarize_povms(povms: &[Povm], eps: f64) -> Result<Vec<Povm>> {
    check_eps(eps)?;
    povms
        .iter()
        .map(|m| {
            let (d, k) = (m.dim(), m.len() as f64);
            Povm::from_matrices(
                m.effects()
                    .iter()
                    .map(|e| e.matrix() * C64::from(1.0 - eps) + identity(d) * C64::from(eps / k))
                    .collect(),
            )
        })
        .collect()
}

/// Column-stochastic post-processing p(x|a).
#[derive(Clone, Debug, PartialEq)]
pub struct CppMatrix {
    rows: Vec<Vec<f64>>,
}

impl CppMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged or empty post-processing matrix".into()));
        }
        if rows.iter().flatten().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("negative post-processing probability".into()));
        }
        for a in 0..cols {
            let s: f64 = rows.iter().map(|r| r[a]).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("column {a} sums to {s}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(k: usize) -> Self {
        Self { rows: (0..k).map(|x| (0..k).map(|a| if a == x { 1.0 } else { 0.0 }).collect()).collect() }
    }

    pub fn outputs(&self) -> usize {
        self.rows.len()
    }

    pub fn inputs(&self) -> usize {
        self.rows[0].len()
    }
}

/// K_x = Σ_a p(x|a) M_a, applied to every POVM.
pub fn apply_cpp(povms: &[Povm], p: &CppMatrix) -> Result<Vec<Povm>> {
    povms
        .iter()
        .map(|m| {
            if m.len() != p.inputs() {
                return Err(Error::Dimension { expected: p.inputs(), got: m.len() });
            }
            let d = m.dim();
            let ks = p
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(m.effects())
                        .fold(ComplexMatrix::zeros(d, d), |acc, (&w, e)| acc + e.matrix() * C64::from(w))
                })
                .collect();
            Povm::from_matrices(ks)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_geometry::{make_cone_states, tetrahedral_povm, ConeFamily, BETA};
    use crate::quantum_core::{state_from_bloch, Unitary};
    use crate::random::{random_povm, random_state, random_stochastic, random_su2};
    use crate::wigner_frames::build_frame;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn frame() -> Frame {
        build_frame(2).unwrap()
    }

    // W_α = ¼(1 + n_α·r) summed by hand
    fn oracle_sum_negativity(r: &BlochVector) -> f64 {
        let n = [(1.0, 1.0, 1.0), (-1.0, -1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0)];
        n.iter().map(|(a, b, c)| (0.25 * (1.0 + a * r.x + b * r.y + c * r.z)).abs()).sum::<f64>() - 1.0
    }

    #[test]
    fn state_negativity_examples() {
        let f = frame();
        let id = UnitarySU2::identity();
        assert!(state_sum_negativity(&QuantumState::maximally_mixed(2), &f, &id).unwrap().abs() < 1e-15);
        let b1 = state_from_bloch(BETA[0]).unwrap();
        let n = state_sum_negativity(&b1, &f, &id).unwrap();
        // frozen: (√3 − 1)/2 for W normalized to unit sum
        assert!((n - (S3 - 1.0) / 2.0).abs() < 1e-15);
        assert!((n - oracle_sum_negativity(&BETA[0])).abs() < 1e-15);
        let z = state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!(state_sum_negativity(&z, &f, &id).unwrap().abs() < 1e-15);
    }

    #[test]
    fn robustness_examples() {
        let id = UnitarySU2::identity();
        let b1 = state_from_bloch(BETA[0]).unwrap();
        let r = qubit_robustness(&b1, &id).unwrap();
        assert!((r - (2.0 - S3)).abs() < 1e-15);
        assert!(qubit_robustness(&QuantumState::maximally_mixed(2), &id).unwrap() == 0.0);
        assert!(qubit_robustness(&QuantumState::maximally_mixed(3), &id).is_err());
        let n = state_sum_negativity(&b1, &frame(), &id).unwrap();
        assert!((n / r - (1.0 + S3) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn effect_and_measurement_examples() {
        let f = frame();
        let id = UnitarySU2::identity();
        let half = Effect::new(identity(2) * C64::from(0.5)).unwrap();
        assert!((effect_sum_negativity(&half, &f, &id).unwrap() - 1.0).abs() < 1e-15);
        let one = Effect::new(identity(2)).unwrap();
        assert!((effect_sum_negativity(&one, &f, &id).unwrap() - 2.0).abs() < 1e-15);
        assert!(measurement_sum_negativity(&Povm::trivial(2, 2), &f, &id).unwrap().abs() < 1e-15);
        assert!(measurement_sum_negativity(&tetrahedral_povm(), &f, &id).unwrap().abs() < 1e-15);
        // computational basis: W(|0><0|) = {1,1,0,0}, nonnegative, so zero
        let z = state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap().matrix().clone();
        let pvm = Povm::from_matrices(vec![z.clone(), identity(2) - z]).unwrap();
        assert!(measurement_sum_negativity(&pvm, &f, &id).unwrap().abs() < 1e-15);
        // projector along β̂₁: G-values ½(1−√3) and 3×½(1+1/√3), so
        // Σ|W|/d = (1+√3)/2; its complement is nonnegative
        let b = state_from_bloch(BETA[0]).unwrap().matrix().clone();
        let pvm = Povm::from_matrices(vec![b.clone(), identity(2) - b]).unwrap();
        let v = measurement_sum_negativity(&pvm, &f, &id).unwrap();
        assert!((v - (S3 - 1.0) / 2.0).abs() < 1e-14);
        let zero = Povm::from_matrices(vec![ComplexMatrix::zeros(2, 2), identity(2)]).unwrap();
        assert!(matches!(measurement_sum_negativity(&zero, &f, &id), Err(Error::DegenerateEffect { index: 0, .. })));
    }

    #[test]
    fn mean_robustness_examples() {
        let id = UnitarySU2::identity();
        // equatorial ±x̂, ±ŷ touch the faces: every dot is ±1/√3
        let quad = make_cone_states(&ConeFamily::quadruplet(PI, 1.0)).unwrap();
        assert!(mean_robustness(&quad, &id).unwrap() < 1e-15);
        // θ = π/2: each state has max dot √2/√3, so R = (√2 − 1)/(1 + √3)
        let quad = make_cone_states(&ConeFamily::quadruplet(PI / 2.0, 1.0)).unwrap();
        let each = (2f64.sqrt() - 1.0) / (1.0 + S3);
        assert!((mean_robustness(&quad, &id).unwrap() - each).abs() < 1e-15);
        assert!(mean_robustness(&[], &id).is_err());
        let free = make_cone_states(&ConeFamily::quadruplet(0.0, 0.5)).unwrap();
        assert_eq!(mean_robustness(&free, &id).unwrap(), 0.0);
        let one = &quad[..1];
        assert_eq!(mean_robustness(one, &id).unwrap(), qubit_robustness(&quad[0], &id).unwrap());
    }

    #[test]
    fn monotone_examples() {
        let f = frame();
        let id = UnitarySU2::identity();
        let quad = make_cone_states(&ConeFamily::quadruplet(PI / 2.0, 1.0)).unwrap();
        let mo = MultiObject::with_common_povm(&quad, &tetrahedral_povm()).unwrap();
        let pm = product_monotone(&mo, &id).unwrap();
        assert!((pm - mean_robustness(&quad, &id).unwrap()).abs() < 1e-15);
        let mut doubled = mo.pairs().to_vec();
        doubled.extend_from_slice(mo.pairs());
        assert!((product_monotone(&MultiObject::new(doubled).unwrap(), &id).unwrap() - pm).abs() < 1e-15);

        let id_mo = MultiObject::with_common_povm(&quad, &Povm::trivial(2, 2)).unwrap();
        let nm = negativity_monotone(&id_mo, &f, &id).unwrap();
        let mean_n = state_negativity_report(&quad, &f, &id).unwrap().mean;
        assert!((nm - mean_n).abs() < 1e-15);

        let b = state_from_bloch(BETA[0]).unwrap().matrix().clone();
        let sharp = Povm::from_matrices(vec![b.clone(), identity(2) - b]).unwrap();
        let bad = MultiObject::with_common_povm(&quad, &sharp).unwrap();
        assert!(matches!(product_monotone(&bad, &id), Err(Error::Unsupported(_))));

        let free = MultiObject::with_common_povm(&[QuantumState::maximally_mixed(2)], &Povm::trivial(2, 2)).unwrap();
        assert_eq!(product_monotone(&free, &id).unwrap(), 0.0);
        assert!(negativity_monotone(&free, &f, &id).unwrap().abs() < 1e-15);
    }

    #[test]
    fn negativity_monotone_dominates_parts() {
        let f = frame();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let pairs: Vec<_> = (0..3).map(|_| (random_state(2, &mut rng), random_povm(2, 3, &mut rng))).collect();
            let mo = MultiObject::new(pairs).unwrap();
            let u = random_su2(&mut rng);
            let nm = negativity_monotone(&mo, &f, &u).unwrap();
            let ns: f64 = mo.pairs().iter().map(|(s, _)| state_sum_negativity(s, &f, &u).unwrap()).sum::<f64>() / 3.0;
            let ne: f64 = mo.pairs().iter().map(|(_, m)| measurement_sum_negativity(m, &f, &u).unwrap()).sum::<f64>() / 3.0;
            assert!(nm >= ns.max(ne) - 1e-12);
        }
    }

    #[test]
    fn depolarizing_examples() {
        let b1 = state_from_bloch(BETA[0]).unwrap();
        let same = depolarize_states(&[b1.clone()], 0.0).unwrap();
        assert_eq!(same[0], b1);
        let all = depolarize_states(&[b1.clone()], 1.0).unwrap();
        assert!((all[0].matrix() - QuantumState::maximally_mixed(2).matrix()).norm() < 1e-15);
        let half = depolarize_states(&[b1], 0.5).unwrap();
        let r = half[0].bloch().unwrap();
        assert!((r.vec() - BETA[0].scale(0.5).vec()).norm() < 1e-15);
        assert!(crate::free_geometry::is_free_bloch(&r));
        assert!(depolarize_states(&[], 1.5).is_err());
        let k = tetrahedral_povm();
        let d = depolarize_povms(&[k.clone()], 1.0).unwrap();
        for e in d[0].effects() {
            assert!((e.matrix() - identity(2) * C64::from(0.25)).norm() < 1e-15);
        }
        assert_eq!(depolarize_povms(&[k.clone()], 0.0).unwrap()[0], k);
    }

    #[test]
    fn cpp_examples() {
        let k = tetrahedral_povm();
        assert_eq!(apply_cpp(&[k.clone()], &CppMatrix::identity(4)).unwrap()[0], k);
        let merged = apply_cpp(&[k.clone()], &CppMatrix::new(vec![vec![1.0; 4]]).unwrap()).unwrap();
        assert_eq!(merged[0].len(), 1);
        assert!((merged[0].effects()[0].matrix() - identity(2)).norm() < 1e-15);
        assert!(CppMatrix::new(vec![vec![0.5, 1.0], vec![0.4, 0.0]]).is_err());
        assert!(CppMatrix::new(vec![vec![1.5, 1.0], vec![-0.5, 0.0]]).is_err());
        assert!(apply_cpp(&[k], &CppMatrix::identity(3)).is_err());
    }

    #[test]
    fn unitary_covariance() {
        let f = frame();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let rho = random_state(2, &mut rng);
            let m = random_povm(2, 3, &mut rng);
            let u = random_su2(&mut rng);
            let id = Unitary::identity(2);
            let a = state_sum_negativity(&rho, &f, &u).unwrap();
            let b = state_sum_negativity(&rho.conjugated(&u).unwrap(), &f, &id).unwrap();
            assert!((a - b).abs() < 1e-12);
            let a = measurement_sum_negativity(&m, &f, &u).unwrap();
            let b = measurement_sum_negativity(&m.conjugated(&u).unwrap(), &f, &id).unwrap();
            assert!((a - b).abs() < 1e-12);
            let a = qubit_robustness(&rho, &u).unwrap();
            let b = qubit_robustness(&rho.conjugated(&u).unwrap(), &UnitarySU2::identity()).unwrap();
            assert!((a - b).abs() < 1e-12);
            // simultaneous conjugation by V with the frame rotated by V⁻¹
            let v = random_su2(&mut rng);
            let mo = MultiObject::new(vec![(rho.clone(), m.clone())]).unwrap();
            let mo_v = MultiObject::new(vec![(rho.conjugated(&v).unwrap(), m.conjugated(&v).unwrap())]).unwrap();
            let uv = u.compose(&v.inverse());
            let a = negativity_monotone(&mo, &f, &u).unwrap();
            let b = negativity_monotone(&mo_v, &f, &uv).unwrap();
            assert!((a - b).abs() < 1e-12);
            let t = MultiObject::with_common_povm(&[rho.clone()], &tetrahedral_povm()).unwrap();
            let tv = MultiObject::with_common_povm(&[rho.conjugated(&v).unwrap()], &tetrahedral_povm()).unwrap();
            // K_i is free at every rotation, so the reduction applies on both sides
            assert!((product_monotone(&t, &u).unwrap() - product_monotone(&tv, &uv).unwrap()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn proportional_to_robustness(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, q in prop::array::uniform4(-1.0f64..1.0)) {
            let r = BlochVector::new(x, y, z);
            prop_assume!(r.norm() <= 1.0);
            let u = UnitarySU2::from_quaternion(q);
            prop_assume!(u.is_ok());
            let u = u.unwrap();
            let rho = state_from_bloch(r).unwrap();
            let n = state_sum_negativity(&rho, &frame(), &u).unwrap();
            let rob = qubit_robustness(&rho, &u).unwrap();
            prop_assert!((n - (1.0 + S3) / 2.0 * rob).abs() < 1e-12);
            prop_assert!((n - oracle_sum_negativity(&u.rotate(&r))).abs() < 1e-12);
        }

        #[test]
        fn depolarizing_never_increases(seed in 0u64..1000, eps in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = frame();
            let u = random_su2(&mut rng);
            let rho = random_state(2, &mut rng);
            let m = random_povm(2, 3, &mut rng);
            let rho2 = depolarize_states(&[rho.clone()], eps).unwrap().remove(0);
            let m2 = depolarize_povms(&[m.clone()], eps).unwrap().remove(0);
            prop_assert!(qubit_robustness(&rho2, &u).unwrap() <= qubit_robustness(&rho, &u).unwrap() + 1e-10);
            prop_assert!(state_sum_negativity(&rho2, &f, &u).unwrap() <= state_sum_negativity(&rho, &f, &u).unwrap() + 1e-10);
            prop_assert!(measurement_sum_negativity(&m2, &f, &u).unwrap() <= measurement_sum_negativity(&m, &f, &u).unwrap() + 1e-10);
        }

        #[test]
        fn cpp_never_increases(seed in 0u64..1000, rows in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = frame();
            let u = random_su2(&mut rng);
            let m = random_povm(2, 3, &mut rng);
            let p = CppMatrix::new(random_stochastic(rows, 3, &mut rng)).unwrap();
            let k = apply_cpp(&[m.clone()], &p).unwrap().remove(0);
            prop_assert!(measurement_sum_negativity(&k, &f, &u).unwrap() <= measurement_sum_negativity(&m, &f, &u).unwrap() + 1e-10);
        }
    }
}
