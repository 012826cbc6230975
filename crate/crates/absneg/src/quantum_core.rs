//! Small dense complex matrices, validated states/effects/POVMs, Bloch
//! vectors and the SU(2) parametrization used everywhere else.

use nalgebra::{DMatrix, Matrix3, Quaternion, UnitQuaternion, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Hermiticity and trace tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance on Σ M_a = I.
pub const POVM_SUM_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Generalized shift X|j> = |j+1 mod d>.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = ONE;
    }
    m
}

/// Generalized clock Z|j> = ω^j |j>, ω = exp(2πi/d).
pub fn clock(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
    }
    m
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().sum()
}

/// tr(AB) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let d = a.nrows();
    let mut s = ZERO;
    for i in 0..d {
        for j in 0..d {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension { expected: a.nrows(), got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    Ok(a.nrows())
}

/// Density operator: Hermitian, PSD, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    matrix: ComplexMatrix,
}

impl QuantumState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let h = hermitian_defect(&matrix);
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {h:e})")));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let lo = hermitian_eigenvalues(&matrix)[0];
        if lo < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { matrix })
    }

    /// Projector onto a (not necessarily normalized) ket.
    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let v = nalgebra::DVector::from_iterator(ket.len(), ket.iter().map(|z| z / norm));
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: identity(d) / C64::from(d as f64) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bloch(&self) -> Result<BlochVector> {
        bloch_from_state(self)
    }
}

/// Hermitian operator with spectrum in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    matrix: ComplexMatrix,
}

impl Effect {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix).map_err(|e| Error::InvalidEffect(e.to_string()))?;
        let h = hermitian_defect(&matrix);
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidEffect(format!("not Hermitian (defect {h:e})")));
        }
        let ev = hermitian_eigenvalues(&matrix);
        if ev[0] < -PSD_TOL || ev[ev.len() - 1] > 1.0 + PSD_TOL {
            return Err(Error::InvalidEffect(format!(
                "spectrum [{:e}, {:e}] outside [0,1]",
                ev[0],
                ev[ev.len() - 1]
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

/// Ordered list of effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
}

impl Povm {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidPovm("no effects".into()));
        };
        let d = first.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &effects {
            if e.dim() != d {
                return Err(Error::Dimension { expected: d, got: e.dim() });
            }
            sum += e.matrix();
        }
        let dev = (sum - identity(d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > POVM_SUM_TOL {
            return Err(Error::InvalidPovm(format!("effects sum to I within {dev:e}")));
        }
        Ok(Self { effects })
    }

    pub fn from_matrices(ms: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(ms.into_iter().map(Effect::new).collect::<Result<_>>()?)
    }

    /// `outcomes` copies of I/outcomes (the identity measurement when
    /// outcomes = d).
    pub fn trivial(d: usize, outcomes: usize) -> Self {
        let e = Effect { matrix: identity(d) / C64::from(outcomes as f64) };
        Self { effects: vec![e; outcomes] }
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.vec().norm()
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn vec(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

impl From<Vector3<f64>> for BlochVector {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// ρ = (I + r·σ)/2.
pub fn state_from_bloch(v: BlochVector) -> Result<QuantumState> {
    let n = v.norm();
    if !(n <= 1.0 + 1e-10) {
        return Err(Error::InvalidBloch(n));
    }
    let half = C64::from(0.5);
    let m = (identity(2) + sigma_x() * C64::from(v.x) + sigma_y() * C64::from(v.y)
        + sigma_z() * C64::from(v.z))
        * half;
    Ok(QuantumState { matrix: m })
}

pub fn bloch_from_state(rho: &QuantumState) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho.dim() });
    }
    let m = rho.matrix();
    Ok(BlochVector::new(
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        m[(0, 0)].re - m[(1, 1)].re,
    ))
}

/// Anything that can rotate a frame: a d×d unitary matrix.
pub trait UnitaryOp {
    fn matrix(&self) -> &ComplexMatrix;
}

/// General unitary, used for d > 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: ComplexMatrix,
}

impl Unitary {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let d = check_square(&matrix)?;
        let dev = (matrix.adjoint() * &matrix - identity(d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL * 10.0 {
            return Err(Error::InvalidUnitary(format!("U†U deviates from I by {dev:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d) }
    }
}

impl UnitaryOp for Unitary {
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Unit quaternion (w,x,y,z) with matrix w·I − i(xσx + yσy + zσz).
///
/// Stored in canonical sign: w > 0, or if w ≈ 0 the first nonzero component
/// positive. q and −q act identically on Bloch vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitarySU2 {
    q: [f64; 4],
    matrix: ComplexMatrix,
}

const SIGN_EPS: f64 = 1e-12;

pub fn canonical_quaternion(q: [f64; 4]) -> [f64; 4] {
    let lead = q.iter().copied().find(|c| c.abs() > SIGN_EPS).unwrap_or(0.0);
    if lead < 0.0 {
        q.map(|c| -c)
    } else {
        q
    }
}

impl UnitarySU2 {
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::DegenerateRotation);
        }
        let q = canonical_quaternion(q.map(|c| c / n));
        let [w, x, y, z] = q;
        let matrix = ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(w, -z), C64::new(-y, -x), C64::new(y, -x), C64::new(w, z)],
        );
        Ok(Self { q, matrix })
    }

    pub fn identity() -> Self {
        Self::from_quaternion([1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    /// Bloch rotation by `angle` about `axis` (right-handed).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::DegenerateRotation);
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Self::from_quaternion([c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n])
    }

    pub fn from_unit_quaternion(u: &UnitQuaternion<f64>) -> Self {
        Self::from_quaternion([u.w, u.i, u.j, u.k]).expect("unit quaternion")
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn unit_quaternion(&self) -> UnitQuaternion<f64> {
        let [w, x, y, z] = self.q;
        UnitQuaternion::new_unchecked(Quaternion::new(w, x, y, z))
    }

    /// SO(3) matrix R with U(r·σ)U† = (Rr)·σ.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.unit_quaternion().to_rotation_matrix().into_inner()
    }

    pub fn rotate(&self, v: &BlochVector) -> BlochVector {
        (self.unit_quaternion() * v.vec()).into()
    }

    /// Product self·other (apply `other` first).
    pub fn compose(&self, other: &UnitarySU2) -> UnitarySU2 {
        Self::from_unit_quaternion(&(self.unit_quaternion() * other.unit_quaternion()))
    }

    pub fn inverse(&self) -> UnitarySU2 {
        let [w, x, y, z] = self.q;
        Self::from_quaternion([w, -x, -y, -z]).unwrap()
    }
}

impl UnitaryOp for UnitarySU2 {
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

pub fn su2_from_quaternion(q: [f64; 4]) -> Result<UnitarySU2> {
    UnitarySU2::from_quaternion(q)
}

/// U A U†.
pub fn conjugate<U: UnitaryOp + ?Sized>(a: &ComplexMatrix, u: &U) -> Result<ComplexMatrix> {
    let m = u.matrix();
    if a.nrows() != m.nrows() || a.ncols() != m.nrows() {
        return Err(Error::Dimension { expected: m.nrows(), got: a.nrows() });
    }
    Ok(m * a * m.adjoint())
}

/// U† A U.
pub fn conjugate_adjoint<U: UnitaryOp + ?Sized>(a: &ComplexMatrix, u: &U) -> Result<ComplexMatrix> {
    let m = u.matrix();
    if a.nrows() != m.nrows() || a.ncols() != m.nrows() {
        return Err(Error::Dimension { expected: m.nrows(), got: a.nrows() });
    }
    Ok(m.adjoint() * a * m)
}

impl QuantumState {
    /// U ρ U†.
    pub fn conjugated<U: UnitaryOp + ?Sized>(&self, u: &U) -> Result<QuantumState> {
        Ok(QuantumState { matrix: conjugate(&self.matrix, u)? })
    }
}

impl Effect {
    pub fn conjugated<U: UnitaryOp + ?Sized>(&self, u: &U) -> Result<Effect> {
        Ok(Effect { matrix: conjugate(&self.matrix, u)? })
    }
}

impl Povm {
    pub fn conjugated<U: UnitaryOp + ?Sized>(&self, u: &U) -> Result<Povm> {
        Ok(Povm { effects: self.effects.iter().map(|e| e.conjugated(u)).collect::<Result<_>>()? })
    }
}

/// Ordered (state, POVM) pairs sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiObject {
    pairs: Vec<(QuantumState, Povm)>,
}

impl MultiObject {
    pub fn new(pairs: Vec<(QuantumState, Povm)>) -> Result<Self> {
        let Some((s0, _)) = pairs.first() else {
            return Err(Error::Empty("multi-object"));
        };
        let d = s0.dim();
        for (s, m) in &pairs {
            if s.dim() != d {
                return Err(Error::Dimension { expected: d, got: s.dim() });
            }
            if m.dim() != d {
                return Err(Error::Dimension { expected: d, got: m.dim() });
            }
        }
        Ok(Self { pairs })
    }

    /// Every state paired with the same measurement.
    pub fn with_common_povm(states: &[QuantumState], povm: &Povm) -> Result<Self> {
        Self::new(states.iter().map(|s| (s.clone(), povm.clone())).collect())
    }

    pub fn pairs(&self) -> &[(QuantumState, Povm)] {
        &self.pairs
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].0.dim()
    }

    pub fn states(&self) -> Vec<QuantumState> {
        self.pairs.iter().map(|(s, _)| s.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S3: f64 = 0.577_350_269_189_625_8;

    fn max_abs(a: &ComplexMatrix) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn bloch_basics() {
        let mixed = state_from_bloch(BlochVector::default()).unwrap();
        assert!(max_abs(&(mixed.matrix() - identity(2) * C64::from(0.5))) < 1e-15);
        let zero = state_from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!((zero.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let plus = QuantumState::from_ket(&[ONE, ONE]).unwrap();
        let b = plus.bloch().unwrap();
        assert!((b.x - 1.0).abs() < 1e-15 && b.y.abs() < 1e-15 && b.z.abs() < 1e-15);
        let v = BlochVector::new(S3, S3, S3);
        let back = state_from_bloch(v).unwrap().bloch().unwrap();
        assert!((back.vec() - v.vec()).norm() < 1e-12);
        assert_eq!(state_from_bloch(BlochVector::new(1.0, 1.0, 0.0)), Err(Error::InvalidBloch(2f64.sqrt())));
        assert!(QuantumState::maximally_mixed(3).bloch().is_err());
    }

    #[test]
    fn y_eigenstate_sign() {
        // |+i> = (|0> + i|1>)/√2 has Bloch (0,1,0)
        let s = QuantumState::from_ket(&[ONE, I]).unwrap();
        let b = s.bloch().unwrap();
        assert!((b.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quaternion_examples() {
        let id = su2_from_quaternion([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(max_abs(&(id.matrix() - identity(2))) < 1e-15);
        let half = su2_from_quaternion([0.0, 0.0, 0.0, 1.0]).unwrap();
        let r = half.rotate(&BlochVector::new(1.0, 0.0, 0.0));
        assert!((r.x + 1.0).abs() < 1e-15);
        assert!(su2_from_quaternion([0.0; 4]).is_err());

        // π/4 about z against an explicit rotation matrix
        let a = std::f64::consts::FRAC_PI_4;
        let u = su2_from_quaternion([(a / 2.0).cos(), 0.0, 0.0, (a / 2.0).sin()]).unwrap();
        let oracle = Matrix3::new(a.cos(), -a.sin(), 0.0, a.sin(), a.cos(), 0.0, 0.0, 0.0, 1.0);
        assert!((u.rotation_matrix() - oracle).norm() < 1e-15);
        // adjoint action on the Pauli vector agrees
        let rho = state_from_bloch(BlochVector::new(0.3, -0.2, 0.5)).unwrap();
        let b = rho.conjugated(&u).unwrap().bloch().unwrap();
        let expect = oracle * Vector3::new(0.3, -0.2, 0.5);
        assert!((b.vec() - expect).norm() < 1e-15);
    }

    #[test]
    fn conjugate_sigma_z() {
        let u = UnitarySU2::from_axis_angle([1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2).unwrap();
        let out = conjugate(&sigma_z(), &u).unwrap();
        // rotating ẑ by π/2 about x̂ gives −ŷ
        assert!(max_abs(&(out.clone() + sigma_y())) < 1e-15);
        let ev = hermitian_eigenvalues(&out);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(conjugate(&identity(3), &u).is_err());
    }

    #[test]
    fn validation() {
        let bad = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(QuantumState::new(bad).is_err());
        let neg = ComplexMatrix::from_row_slice(2, 2, &[C64::from(1.5), ZERO, ZERO, C64::from(-0.5)]);
        assert!(QuantumState::new(neg.clone()).is_err());
        assert!(Effect::new(neg).is_err());
        let half = identity(2) * C64::from(0.5);
        assert!(Povm::from_matrices(vec![half.clone(), half.clone()]).is_ok());
        assert!(Povm::from_matrices(vec![half.clone()]).is_err());
        assert!(Povm::from_matrices(vec![half, identity(3) * C64::from(0.5)]).is_err());
        let p = Povm::trivial(3, 4);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn clock_shift_commutation() {
        for d in [2usize, 3, 5] {
            let (x, z) = (shift(d), clock(d));
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
            // Z X = ω X Z
            assert!(max_abs(&(&z * &x - &x * &z * w)) < 1e-14);
        }
    }

    fn quat() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(-1.0f64..1.0).prop_filter("nonzero", |q| q.iter().map(|c| c * c).sum::<f64>() > 1e-3)
    }

    proptest! {
        #[test]
        fn bloch_round_trip(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let v = BlochVector::new(x, y, z);
            prop_assume!(v.norm() <= 1.0);
            let back = state_from_bloch(v).unwrap().bloch().unwrap();
            prop_assert!((back.vec() - v.vec()).norm() < 1e-12);
        }

        #[test]
        fn double_cover(q in quat(), x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let u = su2_from_quaternion(q).unwrap();
            let v = su2_from_quaternion(q.map(|c| -c)).unwrap();
            let b = BlochVector::new(x, y, z);
            prop_assert!((u.rotate(&b).vec() - v.rotate(&b).vec()).norm() < 1e-12);
            let m = u.matrix();
            prop_assert!(max_abs(&(m.adjoint() * m - identity(2))) < 1e-12);
            prop_assert!((m.determinant() - ONE).norm() < 1e-12);
        }

        #[test]
        fn conjugate_preserves_spectrum(q in quat(), x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let v = BlochVector::new(x, y, z);
            prop_assume!(v.norm() <= 1.0);
            let rho = state_from_bloch(v).unwrap();
            let u = su2_from_quaternion(q).unwrap();
            let out = conjugate(rho.matrix(), &u).unwrap();
            prop_assert!(hermitian_defect(&out) < 1e-12);
            prop_assert!((trace(&out) - ONE).norm() < 1e-12);
            let (a, b) = (hermitian_eigenvalues(rho.matrix()), hermitian_eigenvalues(&out));
            prop_assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
            prop_assert!(QuantumState::new(out).is_ok());
            // U† (U A U†) U = A
            let back = conjugate_adjoint(&conjugate(rho.matrix(), &u).unwrap(), &u).unwrap();
            prop_assert!(max_abs(&(back - rho.matrix())) < 1e-12);
        }
    }
}
