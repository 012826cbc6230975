//! Geometry of the qubit free set: the β̂ tetrahedron, membership tests,
//! cone families of pure states, critical opening angles of the regular
//! quadruplet and D-orthoplex geodesic vertices.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::quantum_core::{
    identity, sigma_x, sigma_y, sigma_z, state_from_bloch, BlochVector, Effect, Povm, QuantumState,
    UnitarySU2, C64,
};
use crate::wigner_frames::{build_frame, wigner_effect, Frame};

pub const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
/// Half-space tests accept points this far outside (closed free set).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

const S: f64 = INV_SQRT3;

/// Outward normals of the four faces of the free tetrahedron.
pub const BETA: [BlochVector; 4] = [
    BlochVector::new(-S, -S, -S),
    BlochVector::new(-S, S, S),
    BlochVector::new(S, S, -S),
    BlochVector::new(S, -S, S),
];

pub fn qubit_frame() -> &'static Frame {
    static F: OnceLock<Frame> = OnceLock::new();
    F.get_or_init(|| build_frame(2).expect("d=2 frame"))
}

/// max_k r·β̂_k and its index (lowest index on ties).
pub fn max_beta_dot(r: &BlochVector) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, b) in BETA.iter().enumerate() {
        let d = r.dot(b);
        if d > best.0 {
            best = (d, k);
        }
    }
    best
}

pub fn is_free_bloch(r: &BlochVector) -> bool {
    max_beta_dot(r).0 <= INV_SQRT3 + MEMBERSHIP_TOL
}

fn require_qubit(d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok(())
}

/// Whether UρU† lies in the qubit free set.
pub fn is_free_state(rho: &QuantumState, u: &UnitarySU2) -> Result<bool> {
    require_qubit(rho.dim())?;
    Ok(is_free_bloch(&u.rotate(&rho.bloch()?)))
}

/// Whether W(UEU†|α) ≥ 0 at every phase point.
pub fn is_free_effect(e: &Effect, u: &UnitarySU2) -> Result<bool> {
    require_qubit(e.dim())?;
    Ok(wigner_effect(e, qubit_frame(), u)?.min() >= -MEMBERSHIP_TOL)
}

/// K_i = ¼(I + β̂_i·σ/√3).
pub fn tetrahedral_povm() -> Povm {
    let ms = BETA
        .iter()
        .map(|b| {
            let n = b.scale(INV_SQRT3);
            (identity(2) + sigma_x() * C64::from(n.x) + sigma_y() * C64::from(n.y) + sigma_z() * C64::from(n.z))
                * C64::from(0.25)
        })
        .collect();
    Povm::from_matrices(ms).expect("tetrahedral POVM")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    RegularQuadruplet,
    RegularTriplet,
    RegularPair,
    /// Azimuths 0, φ₂, −φ₃.
    IrregularTriplet,
}

/// n pure (or radius-r) states on a cone of opening angle θ about ẑ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeFamily {
    pub kind: ConeKind,
    pub theta: f64,
    pub r: f64,
    pub phis: Option<(f64, f64)>,
}

impl ConeFamily {
    pub fn quadruplet(theta: f64, r: f64) -> Self {
        Self { kind: ConeKind::RegularQuadruplet, theta, r, phis: None }
    }

    pub fn triplet(theta: f64, r: f64) -> Self {
        Self { kind: ConeKind::RegularTriplet, theta, r, phis: None }
    }

    pub fn pair(theta: f64, r: f64) -> Self {
        Self { kind: ConeKind::RegularPair, theta, r, phis: None }
    }

    pub fn irregular_triplet(theta: f64, phi2: f64, phi3: f64, r: f64) -> Self {
        Self { kind: ConeKind::IrregularTriplet, theta, r, phis: Some((phi2, phi3)) }
    }

    fn azimuths(&self) -> Result<Vec<f64>> {
        Ok(match (self.kind, self.phis) {
            (ConeKind::RegularQuadruplet, _) => (0..4).map(|k| k as f64 * PI / 2.0).collect(),
            (ConeKind::RegularTriplet, _) => (0..3).map(|k| k as f64 * 2.0 * PI / 3.0).collect(),
            (ConeKind::RegularPair, _) => vec![0.0, PI],
            (ConeKind::IrregularTriplet, Some((p2, p3))) if p2.is_finite() && p3.is_finite() => {
                vec![0.0, p2, -p3]
            }
            (ConeKind::IrregularTriplet, _) => {
                return Err(Error::InvalidParameter("irregular triplet needs finite (φ₂, φ₃)".into()))
            }
        })
    }

    /// Bloch vectors: polar angle θ/2, length r.
    pub fn bloch_vectors(&self) -> Result<Vec<BlochVector>> {
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("theta {} outside [0, π]", self.theta)));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::InvalidParameter(format!("radius {} outside [0, 1]", self.r)));
        }
        let (st, ct) = (self.theta / 2.0).sin_cos();
        Ok(self
            .azimuths()?
            .into_iter()
            .map(|phi| BlochVector::new(st * phi.cos(), st * phi.sin(), ct).scale(self.r))
            .collect())
    }
}

pub fn make_cone_states(fam: &ConeFamily) -> Result<Vec<QuantumState>> {
    fam.bloch_vectors()?.into_iter().map(state_from_bloch).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

// Orthonormal pair spanning the plane ⟂ b.
fn plane_basis(b: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let t = if b.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (t - b * t.dot(b)).normalize();
    (e1, b.cross(&e1))
}

struct CapCircles {
    frames: [(Vector3<f64>, Vector3<f64>, Vector3<f64>); 4],
}

impl CapCircles {
    fn new() -> Self {
        let frames = BETA.map(|b| {
            let v = b.vec();
            let (e1, e2) = plane_basis(&v);
            (v, e1, e2)
        });
        Self { frames }
    }

    // Unit vector on the boundary circle r·β̂_k = 1/√3.
    fn point(&self, k: usize, t: f64) -> Vector3<f64> {
        let (b, e1, e2) = &self.frames[k];
        b * INV_SQRT3 + (e1 * t.cos() + e2 * t.sin()) * (2.0f64 / 3.0).sqrt()
    }

    // Quadruplet with v1 on the β̂₁ circle, v3 on the β̂₃ circle and their
    // mirror images under (x,y,z) → (x,z,y), which swaps β̂₃ and β̂₄.
    fn quad(&self, t: f64, s: f64) -> [Vector3<f64>; 4] {
        let m = |p: Vector3<f64>| Vector3::new(p.x, p.z, p.y);
        let v1 = self.point(0, t);
        let v3 = self.point(2, s);
        [v1, m(v1), v3, m(v3)]
    }

    fn residual(&self, t: f64, s: f64) -> [f64; 2] {
        let [v1, v2, v3, v4] = self.quad(t, s);
        [v1.dot(&v2) - v3.dot(&v4), v2.dot(&v4) - v1.dot(&v2)]
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, width: f64) -> f64 {
    let mut fa = f(a);
    while b - a > width {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn newton2(c: &CapCircles, mut t: f64, mut s: f64) -> Option<(f64, f64)> {
    let h = 1e-7;
    for _ in 0..60 {
        let f = c.residual(t, s);
        if f[0].abs().max(f[1].abs()) < 1e-14 {
            return Some((t, s));
        }
        let (ftp, ftm) = (c.residual(t + h, s), c.residual(t - h, s));
        let (fsp, fsm) = (c.residual(t, s + h), c.residual(t, s - h));
        let j = [
            [(ftp[0] - ftm[0]) / (2.0 * h), (fsp[0] - fsm[0]) / (2.0 * h)],
            [(ftp[1] - ftm[1]) / (2.0 * h), (fsp[1] - fsm[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dt = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let ds = (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        t -= dt;
        s -= ds;
    }
    let f = c.residual(t, s);
    (f[0].abs().max(f[1].abs()) < 1e-12).then_some((t, s))
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Opening angles of the regular quadruplet that sit exactly on the free
/// boundary.
///
/// A free regular quadruplet at a critical angle has two adjacent vectors on
/// one face circle and the other two on neighbouring circles, related by the
/// mirror swapping β̂₃ and β̂₄. The residual pair (equal sides, equal
/// diagonals) is scanned over both circle parameters, sign changes along
/// each root branch of the first residual are refined by Newton steps, and
/// free nondegenerate squares are kept.
pub fn solve_critical_angles() -> Result<CriticalAngles> {
    let theta2 = (-1.0f64 / 3.0).acos();
    let c = CapCircles::new();
    let (nt, ns) = (1440usize, 720usize);
    let ts = |i: usize| 2.0 * PI * i as f64 / nt as f64;
    let ss = |i: usize| 2.0 * PI * i as f64 / ns as f64;
    let roots = |t: f64| -> Vec<f64> {
        let vals: Vec<f64> = (0..=ns).map(|i| c.residual(t, ss(i))[0]).collect();
        (0..ns)
            .filter(|&i| vals[i] * vals[i + 1] < 0.0)
            .map(|i| bisect(|s| c.residual(t, s)[0], ss(i), ss(i + 1), 1e-13))
            .collect()
    };

    let mut seeds = Vec::new();
    let mut prev: Vec<(f64, f64)> = Vec::new();
    for i in 0..=nt {
        let t = ts(i);
        let cur: Vec<(f64, f64)> = roots(t).into_iter().map(|s| (s, c.residual(t, s)[1])).collect();
        for &(s, g) in &cur {
            let near = prev
                .iter()
                .min_by(|a, b| circ_dist(a.0, s).total_cmp(&circ_dist(b.0, s)));
            if let Some(&(ps, pg)) = near {
                if circ_dist(ps, s) < 0.05 && g * pg < 0.0 {
                    seeds.push((t, s));
                }
            }
        }
        prev = cur;
    }
    if seeds.is_empty() {
        return Err(Error::Solver("no sign change of the diagonal residual on any branch".into()));
    }

    let mut candidates = Vec::new();
    for (t0, s0) in seeds {
        let Some((t, s)) = newton2(&c, t0, s0) else { continue };
        let v = c.quad(t, s);
        let free = v.iter().all(|p| is_free_bloch(&BlochVector::from(*p)));
        let side = v[0].dot(&v[1]);
        let diag = v[0].dot(&v[3]);
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| (v[i] - v[j]).norm() > 1e-6));
        if free && distinct && diag < side {
            candidates.push(diag.clamp(-1.0, 1.0).acos());
        }
    }
    let below = candidates.iter().copied().filter(|&x| x < theta2 - 1e-9).fold(f64::NAN, f64::max);
    let above = candidates
        .iter()
        .copied()
        .filter(|&x| x > theta2 + 1e-9 && x < PI - 1e-6)
        .fold(f64::NAN, f64::max);
    if below.is_nan() || above.is_nan() {
        return Err(Error::Solver(format!("critical candidates {candidates:?} leave a window unbracketed")));
    }
    Ok(CriticalAngles { theta1: below, theta2, theta3: above })
}

/// Number of integer points c ∈ Z^D with Σ|c_i| = n.
fn l1_sphere_count(dim: usize, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let binom = |a: u64, b: u64| -> f64 {
        if b > a {
            return 0.0;
        }
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    (1..=dim as u64)
        .map(|k| 2f64.powi(k as i32) * binom(dim as u64, k) * binom(n - 1, k - 1))
        .sum()
}

pub const MAX_GEODESIC_VERTICES: f64 = 1e7;

/// Barycentric subdivision level: Σq = 1 at m = 0, D at m = 1, 2^{m−1}·D after.
pub fn subdivision_sum(dim: usize, m: u32) -> u64 {
    if m == 0 {
        1
    } else {
        (dim as u64) << (m - 1)
    }
}

/// Unit vectors Σ q_i s_i x̂_i / |q| over every facet of the D-orthoplex.
///
/// Each facet point is an integer vector with Σ|c_i| = N, so enumerating the
/// L1 sphere visits every projected vertex exactly once.
pub fn orthoplex_geodesic_vertices(dim: usize, m: u32) -> Result<Vec<Vec<f64>>> {
    if dim < 3 {
        return Err(Error::InvalidParameter(format!("orthoplex dimension {dim} < 3")));
    }
    if m > 40 {
        return Err(Error::SizeGuard(format!("subdivision level {m}")));
    }
    let n = subdivision_sum(dim, m);
    let count = l1_sphere_count(dim, n);
    if count > MAX_GEODESIC_VERTICES {
        return Err(Error::SizeGuard(format!("{count:.3e} vertices for D={dim}, m={m}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut c = vec![0i64; dim];
    fn rec(i: usize, left: i64, c: &mut Vec<i64>, out: &mut Vec<Vec<f64>>) {
        let dim = c.len();
        if i == dim - 1 {
            for v in if left == 0 { vec![0] } else { vec![left, -left] } {
                c[i] = v;
                let norm = c.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                out.push(c.iter().map(|&x| x as f64 / norm).collect());
            }
            return;
        }
        for a in 0..=left {
            for v in if a == 0 { vec![0] } else { vec![a, -a] } {
                c[i] = v;
                rec(i + 1, left - a, c, out);
            }
        }
    }
    rec(0, n as i64, &mut c, &mut out);
    Ok(out)
}
