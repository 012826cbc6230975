//! Discrete Wigner frames for prime d: phase-point operators, duals,
//! quasi-probabilities of states and effects in a rotated frame.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::quantum_core::{
    clock, conjugate_adjoint, identity, shift, trace_product, BlochVector, ComplexMatrix, Effect,
    QuantumState, UnitaryOp, UnitarySU2, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    pub q: usize,
    pub p: usize,
}

/// Frame operators V(α) and duals G(α) = d·V(α), indexed in (q,p)
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Frame {
    dim: usize,
    points: Vec<PhasePoint>,
    v_ops: Vec<ComplexMatrix>,
    g_ops: Vec<ComplexMatrix>,
}

/// Quasi-probability (or effect representation) over the frame's points.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiProb {
    pub points: Vec<PhasePoint>,
    pub values: Vec<f64>,
}

impl QuasiProb {
    pub fn get(&self, a: PhasePoint) -> Option<f64> {
        self.points.iter().position(|&b| b == a).map(|i| self.values[i])
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..d).take_while(|k| k * k <= d).all(|k| d % k != 0)
}

pub const MAX_FRAME_DIM: usize = 7;

/// V(α) = d⁻² Σ_{j,m} ω^{pj − qm} φ(j,m) X^j Z^m.
///
/// φ(j,m) = ω^{jm/2} is taken as ω^{jm·2⁻¹ mod d} for odd d and as i^{jm} for
/// d = 2.
pub fn build_frame(d: usize) -> Result<Frame> {
    if !is_prime(d) || d > MAX_FRAME_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let omega = |k: i64| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k.rem_euclid(d as i64) as f64 / d as f64);
    let half = (d as i64 + 1) / 2; // inverse of 2 mod odd d
    let (x, z) = (shift(d), clock(d));
    let mut xz = Vec::with_capacity(d * d);
    let mut xj = identity(d);
    for _ in 0..d {
        let mut zm = identity(d);
        for _ in 0..d {
            xz.push(&xj * &zm);
            zm = &zm * &z;
        }
        xj = &xj * &x;
    }
    let mut points = Vec::with_capacity(d * d);
    let mut v_ops = Vec::with_capacity(d * d);
    for q in 0..d {
        for p in 0..d {
            let mut v = ComplexMatrix::zeros(d, d);
            for j in 0..d {
                for m in 0..d {
                    let (ji, mi) = (j as i64, m as i64);
                    let phi = if d == 2 {
                        C64::new(0.0, 1.0).powi((ji * mi) as i32)
                    } else {
                        omega(ji * mi * half)
                    };
                    let c = omega(p as i64 * ji - q as i64 * mi) * phi;
                    v += &xz[j * d + m] * c;
                }
            }
            v /= C64::from((d * d) as f64);
            points.push(PhasePoint { q, p });
            v_ops.push(v);
        }
    }
    let g_ops = v_ops.iter().map(|v| v * C64::from(d as f64)).collect();
    Ok(Frame { dim: d, points, v_ops, g_ops })
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn v(&self, i: usize) -> &ComplexMatrix {
        &self.v_ops[i]
    }

    pub fn g(&self, i: usize) -> &ComplexMatrix {
        &self.g_ops[i]
    }

    /// The frame {U†V(α)U, U†G(α)U}; representing ρ in it equals
    /// representing UρU† in the original frame.
    pub fn rotated<U: UnitaryOp + ?Sized>(&self, u: &U) -> Result<Frame> {
        Ok(Frame {
            dim: self.dim,
            points: self.points.clone(),
            v_ops: self.v_ops.iter().map(|v| conjugate_adjoint(v, u)).collect::<Result<_>>()?,
            g_ops: self.g_ops.iter().map(|g| conjugate_adjoint(g, u)).collect::<Result<_>>()?,
        })
    }

    fn check(&self, d: usize) -> Result<()> {
        if d != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: d });
        }
        Ok(())
    }

    /// W_α(ρ) in this (already rotated) frame.
    pub fn represent_state(&self, rho: &QuantumState) -> Result<QuasiProb> {
        self.check(rho.dim())?;
        let values = self.v_ops.iter().map(|v| trace_product(v, rho.matrix()).re).collect();
        Ok(QuasiProb { points: self.points.clone(), values })
    }

    /// W(E|α) in this (already rotated) frame.
    pub fn represent_effect(&self, e: &Effect) -> Result<QuasiProb> {
        self.check(e.dim())?;
        let values = self.g_ops.iter().map(|g| trace_product(e.matrix(), g).re).collect();
        Ok(QuasiProb { points: self.points.clone(), values })
    }
}

/// W_α(ρ) = tr(V(α) UρU†).
pub fn wigner_state<U: UnitaryOp + ?Sized>(rho: &QuantumState, f: &Frame, u: &U) -> Result<QuasiProb> {
    f.check(rho.dim())?;
    f.represent_state(&rho.conjugated(u)?)
}

/// W(E|α) = tr(UEU† G(α)).
pub fn wigner_effect<U: UnitaryOp + ?Sized>(e: &Effect, f: &Frame, u: &U) -> Result<QuasiProb> {
    f.check(e.dim())?;
    f.represent_effect(&e.conjugated(u)?)
}

/// Σ_α W(E|α) W_α(ρ).
pub fn born_probability<U: UnitaryOp + ?Sized>(
    rho: &QuantumState,
    e: &Effect,
    f: &Frame,
    u: &U,
) -> Result<f64> {
    let ws = wigner_state(rho, f, u)?;
    let we = wigner_effect(e, f, u)?;
    Ok(ws.values.iter().zip(&we.values).map(|(a, b)| a * b).sum())
}

/// Qubit Wigner function straight from the Bloch vector, in (q,p) order:
/// ¼(1 + n_α·r) with n = (1,1,1), (−1,−1,1), (1,−1,−1), (−1,1,−1).
pub fn qubit_wigner(r: &BlochVector) -> [f64; 4] {
    let BlochVector { x, y, z } = *r;
    [
        0.25 * (1.0 + x + y + z),
        0.25 * (1.0 - x - y + z),
        0.25 * (1.0 + x - y - z),
        0.25 * (1.0 - x + y - z),
    ]
}

/// Rotated frames keyed by (d, quaternion rounded to 1e-12).
#[derive(Debug)]
pub struct FrameCache {
    base: Frame,
    rotated: RwLock<HashMap<[i64; 4], Arc<Frame>>>,
}

impl FrameCache {
    pub fn new(base: Frame) -> Self {
        Self { base, rotated: RwLock::new(HashMap::new()) }
    }

    pub fn base(&self) -> &Frame {
        &self.base
    }

    pub fn get(&self, u: &UnitarySU2) -> Result<Arc<Frame>> {
        let key = u.quaternion().map(|c| (c * 1e12).round() as i64);
        if let Some(f) = self.rotated.read().expect("frame cache poisoned").get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(self.base.rotated(u)?);
        let mut map = self.rotated.write().expect("frame cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(f)))
    }

    pub fn len(&self) -> usize {
        self.rotated.read().expect("frame cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{hermitian_defect, sigma_x, sigma_y, sigma_z, state_from_bloch, trace};
    use crate::random::{random_state, random_su2, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn max_abs(a: &ComplexMatrix) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn qubit_phase_point_operators() {
        // A_(q,p) = ½(I + (−1)^q σz + (−1)^p σx + (−1)^{q+p} σy)
        let f = build_frame(2).unwrap();
        for (i, a) in f.points().iter().enumerate() {
            let s = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
            let oracle = (identity(2)
                + sigma_z() * C64::from(s(a.q))
                + sigma_x() * C64::from(s(a.p))
                + sigma_y() * C64::from(s(a.q + a.p)))
                * C64::from(0.5);
            assert!(max_abs(&(f.g(i) - oracle)) < 1e-15, "{a:?}");
        }
    }

    #[test]
    fn frame_invariants() {
        for d in [2, 3, 5, 7] {
            let f = build_frame(d).unwrap();
            let n = d * d;
            let mut sum = ComplexMatrix::zeros(d, d);
            for a in 0..n {
                assert!(hermitian_defect(f.v(a)) < 1e-12);
                sum += f.v(a);
                for b in 0..n {
                    let ip = trace_product(f.g(a), f.g(b));
                    let want = if a == b { d as f64 } else { 0.0 };
                    assert!((ip - C64::from(want)).norm() < 1e-10, "d={d} {a} {b}");
                }
            }
            assert!(max_abs(&(sum - identity(d))) < 1e-12);
        }
        assert_eq!(build_frame(4).unwrap_err(), Error::UnsupportedDimension(4));
        assert!(build_frame(1).is_err());
        assert!(build_frame(11).is_err());
    }

    #[test]
    fn state_examples() {
        let f = build_frame(2).unwrap();
        let id = UnitarySU2::identity();
        let w = wigner_state(&state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap(), &f, &id).unwrap();
        let mut v = w.values.clone();
        v.sort_by(f64::total_cmp);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        assert!((v[2] - 0.5).abs() < 1e-15 && (v[3] - 0.5).abs() < 1e-15);

        let u = random_su2(&mut ChaCha8Rng::seed_from_u64(3));
        for d in [2, 3, 5] {
            let f = build_frame(d).unwrap();
            let w = if d == 2 {
                wigner_state(&QuantumState::maximally_mixed(d), &f, &u).unwrap()
            } else {
                wigner_state(&QuantumState::maximally_mixed(d), &f, &crate::quantum_core::Unitary::identity(d)).unwrap()
            };
            assert!(w.values.iter().all(|x| (x - 1.0 / (d * d) as f64).abs() < 1e-15));
        }

        let b1 = state_from_bloch(BlochVector::new(-1.0 / S3, -1.0 / S3, -1.0 / S3)).unwrap();
        let w = wigner_state(&b1, &f, &id).unwrap();
        let neg: Vec<f64> = w.values.iter().copied().filter(|x| *x < 0.0).collect();
        assert_eq!(neg.len(), 1);
        assert!((neg[0] - (1.0 - S3) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn effect_examples() {
        let f = build_frame(2).unwrap();
        let id = UnitarySU2::identity();
        let zero = Effect::new(state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap().matrix().clone()).unwrap();
        let w = wigner_effect(&zero, &f, &id).unwrap();
        assert!(w.values.iter().all(|x| x.abs() < 1e-15 || (x - 1.0).abs() < 1e-15));
        let rho0 = state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!((born_probability(&rho0, &zero, &f, &id).unwrap() - 1.0).abs() < 1e-15);
        let one = Effect::new(state_from_bloch(BlochVector::new(0.0, 0.0, -1.0)).unwrap().matrix().clone()).unwrap();
        assert!(born_probability(&rho0, &one, &f, &id).unwrap().abs() < 1e-15);

        for d in [2usize, 3] {
            let f = build_frame(d).unwrap();
            let e = Effect::new(identity(d) / C64::from(d as f64)).unwrap();
            let u = crate::quantum_core::Unitary::identity(d);
            let w = wigner_effect(&e, &f, &u).unwrap();
            assert!(w.values.iter().all(|x| (x - 1.0 / d as f64).abs() < 1e-14));
            let rho = random_state(d, &mut ChaCha8Rng::seed_from_u64(9));
            assert!((born_probability(&rho, &e, &f, &u).unwrap() - 1.0 / d as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rotated_frame_matches_rotated_object() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3] {
            let f = build_frame(d).unwrap();
            for _ in 0..20 {
                let u = random_unitary(d, &mut rng);
                let rho = random_state(d, &mut rng);
                let e = Effect::new(random_state(d, &mut rng).matrix().clone()).unwrap();
                let a = wigner_state(&rho, &f, &u).unwrap();
                let b = f.rotated(&u).unwrap().represent_state(&rho).unwrap();
                let c = wigner_state(&rho.conjugated(&u).unwrap(), &f, &crate::quantum_core::Unitary::identity(d)).unwrap();
                for i in 0..d * d {
                    assert!((a.values[i] - b.values[i]).abs() < 1e-13);
                    assert!((a.values[i] - c.values[i]).abs() < 1e-13);
                }
                let x = wigner_effect(&e, &f, &u).unwrap();
                let y = f.rotated(&u).unwrap().represent_effect(&e).unwrap();
                for i in 0..d * d {
                    assert!((x.values[i] - y.values[i]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2usize, 3, 5] {
            let f = build_frame(d).unwrap();
            let a = random_state(d, &mut rng).matrix() * C64::from(2.5);
            let mut rec = ComplexMatrix::zeros(d, d);
            for i in 0..d * d {
                rec += f.g(i) * trace_product(f.v(i), &a);
            }
            assert!(max_abs(&(rec - a)) < 1e-10);
        }
    }

    #[test]
    fn born_rule_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2usize, 3] {
            let f = build_frame(d).unwrap();
            for _ in 0..100 {
                let rho = random_state(d, &mut rng);
                let e = Effect::new(random_state(d, &mut rng).matrix().clone()).unwrap();
                let u = random_unitary(d, &mut rng);
                let p = born_probability(&rho, &e, &f, &u).unwrap();
                let direct = trace(&(rho.matrix() * e.matrix())).re;
                assert!((p - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cache_reuses_frames() {
        let cache = FrameCache::new(build_frame(2).unwrap());
        let u = UnitarySU2::from_axis_angle([0.0, 1.0, 0.0], 0.3).unwrap();
        let a = cache.get(&u).unwrap();
        let b = cache.get(&UnitarySU2::from_quaternion(u.quaternion().map(|c| -c)).unwrap()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        assert!(cache.get(&UnitarySU2::identity()).unwrap().v(0) == cache.base().v(0));
    }

    proptest! {
        #[test]
        fn sign_pattern_matches_frame(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let r = BlochVector::new(x, y, z);
            prop_assume!(r.norm() <= 1.0);
            let f = build_frame(2).unwrap();
            let w = wigner_state(&state_from_bloch(r).unwrap(), &f, &UnitarySU2::identity()).unwrap();
            let direct = qubit_wigner(&r);
            for i in 0..4 {
                prop_assert!((w.values[i] - direct[i]).abs() < 1e-14);
            }
            prop_assert!((w.sum() - 1.0).abs() < 1e-12);
        }
    }
}
