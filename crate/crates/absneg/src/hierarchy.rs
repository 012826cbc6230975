//! Finite rotation sets built from geodesic subdivisions of the octahedron,
//! reduced by the symmetry of the free tetrahedron, and the upper bounds they
//! give on the rotation-minimized quantifiers.
//!
//! O_m sends x̂ to each vertex of the step-m polyhedron and twists about x̂ by
//! the azimuth of every vertex on the x = 0 great circle. Twists by quarter
//! turns alone would never make the sets dense in SO(3). U_m keeps one
//! rotation per distinct rotated free set.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Unit, UnitQuaternion, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::free_geometry::{orthoplex_geodesic_vertices, BETA};
use crate::quantifiers::Measure;
use crate::quantum_core::{canonical_quaternion, BlochVector, QuantumState, UnitarySU2};

/// Group sizes (m, |O_m|, |U_m|) as published for m ≤ 6.
pub const PUBLISHED_COUNTS: [(u32, usize, usize); 7] = [
    (0, 24, 2),
    (1, 672, 26),
    (2, 4368, 198),
    (3, 30960, 1410),
    (4, 234720, 10304),
    (5, 1823232, 78204),
    (6, 14370048, 607976),
];

pub const MAX_GEODESIC_STEP: u32 = 6;
pub const DEFAULT_MAX_ROTATION_STEP: u32 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPolyhedron {
    pub m: u32,
    pub vertices: Vec<BlochVector>,
}

/// Octahedron (m = 0) or its subdivision with Σq = 3·2^{m−1} per face,
/// projected to the unit sphere.
pub fn build_geodesic(m: u32) -> Result<GeodesicPolyhedron> {
    if m > MAX_GEODESIC_STEP {
        return Err(Error::SizeGuard(format!("geodesic step {m} > {MAX_GEODESIC_STEP}")));
    }
    let vertices = orthoplex_geodesic_vertices(3, m)?
        .into_iter()
        .map(|v| BlochVector::new(v[0], v[1], v[2]))
        .collect();
    Ok(GeodesicPolyhedron { m, vertices })
}

/// Rotations of one hierarchy step.
///
/// `o_m` holds R_v∘Rot_x̂(φ) for every vertex v and every twist φ of the
/// equatorial vertex ring about x̂; `u_m` keeps one representative per class
/// of rotations that place the four face normals identically.
#[derive(Clone, Debug)]
pub struct RotationSet {
    pub m: u32,
    pub o_m: Vec<UnitarySU2>,
    pub u_m: Vec<UnitarySU2>,
    rotations: Vec<Matrix3<f64>>,
}

impl RotationSet {
    pub fn counts(&self) -> (usize, usize) {
        (self.o_m.len(), self.u_m.len())
    }

    /// SO(3) matrices of `u_m`, same order.
    pub fn rotations(&self) -> &[Matrix3<f64>] {
        &self.rotations
    }

    /// Minimum over `u_m` of the mean quantifier and the index attaining it
    /// (lowest index on ties).
    pub fn bound(&self, bloch: &[Vector3<f64>], measure: Measure) -> (f64, usize) {
        let vals: Vec<f64> = self.rotations.par_iter().map(|r| measure.mean_rotated(r, bloch)).collect();
        let mut best = (f64::INFINITY, 0);
        for (i, &v) in vals.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }
}

// Twist angles φ of vertices on the great circle x = 0, measured from ŷ.
fn x_axis_twists(vertices: &[BlochVector]) -> Vec<f64> {
    let mut a: Vec<f64> = vertices
        .iter()
        .filter(|v| v.x.abs() < 1e-12)
        .map(|v| v.z.atan2(v.y).rem_euclid(std::f64::consts::TAU))
        .collect();
    a.sort_by(f64::total_cmp);
    a.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    a
}

// Minimal rotation taking x̂ to v; π about ŷ for v = −x̂.
fn align_x(v: &Vector3<f64>) -> UnitQuaternion<f64> {
    let x = Vector3::x();
    let c = x.dot(v).clamp(-1.0, 1.0);
    if c > 1.0 - 1e-15 {
        UnitQuaternion::identity()
    } else if c < -1.0 + 1e-15 {
        UnitQuaternion::from_axis_angle(&Vector3::y_axis(), std::f64::consts::PI)
    } else {
        UnitQuaternion::from_axis_angle(&Unit::new_normalize(x.cross(v)), c.acos())
    }
}

const KEY_SCALE: f64 = 1e7;

// The rotated free set {Rᵀβ̂_k} as a sorted, quantized list.
fn free_set_key(q: &UnitQuaternion<f64>) -> [i64; 12] {
    let inv = q.inverse();
    let mut pts: Vec<[i64; 3]> = BETA
        .iter()
        .map(|b| {
            let p = inv * b.vec();
            [p.x, p.y, p.z].map(|c| (c * KEY_SCALE).round() as i64)
        })
        .collect();
    pts.sort();
    let mut key = [0i64; 12];
    for (i, p) in pts.iter().enumerate() {
        key[3 * i..3 * i + 3].copy_from_slice(p);
    }
    key
}

fn quat_key(q: [f64; 4]) -> [i64; 4] {
    q.map(|c| (c * 1e9).round() as i64)
}

pub fn build_rotation_set(m: u32) -> Result<RotationSet> {
    build_rotation_set_with_limit(m, DEFAULT_MAX_ROTATION_STEP)
}

/// As [`build_rotation_set`] with an explicit memory guard.
pub fn build_rotation_set_with_limit(m: u32, max_m: u32) -> Result<RotationSet> {
    if m > max_m {
        return Err(Error::SizeGuard(format!("rotation set step {m} > limit {max_m}")));
    }
    let poly = build_geodesic(m)?;
    let twists: Vec<UnitQuaternion<f64>> = x_axis_twists(&poly.vertices)
        .into_iter()
        .map(|phi| UnitQuaternion::from_axis_angle(&Vector3::x_axis(), phi))
        .collect();

    let mut seen = BTreeMap::new();
    let mut o_m = Vec::with_capacity(poly.vertices.len() * twists.len());
    let mut classes: BTreeMap<[i64; 12], [f64; 4]> = BTreeMap::new();
    for v in &poly.vertices {
        let base = align_x(&v.vec());
        for t in &twists {
            let q = base * t;
            let c = canonical_quaternion([q.w, q.i, q.j, q.k]);
            if seen.insert(quat_key(c), ()).is_some() {
                continue;
            }
            let u = UnitarySU2::from_quaternion(c)?;
            let key = free_set_key(&q);
            let q = u.quaternion();
            classes
                .entry(key)
                .and_modify(|r| {
                    if q.partial_cmp(r) == Some(std::cmp::Ordering::Less) {
                        *r = q;
                    }
                })
                .or_insert(q);
            o_m.push(u);
        }
    }
    let mut reps: Vec<[f64; 4]> = classes.into_values().collect();
    reps.sort_by(|a, b| a.partial_cmp(b).expect("finite quaternions"));
    let u_m: Vec<UnitarySU2> = reps.into_iter().map(UnitarySU2::from_quaternion).collect::<Result<_>>()?;
    let rotations = u_m.iter().map(|u| u.rotation_matrix()).collect();
    Ok(RotationSet { m, o_m, u_m, rotations })
}

fn bloch_list(states: &[QuantumState]) -> Result<Vec<Vector3<f64>>> {
    if states.is_empty() {
        return Err(Error::Empty("state list"));
    }
    states.iter().map(|s| Ok(s.bloch()?.vec())).collect()
}

/// min over U ∈ U_m of the mean quantifier, with the minimizing rotation.
pub fn hierarchy_bound(states: &[QuantumState], m: u32, measure: Measure) -> Result<(f64, UnitarySU2)> {
    let set = build_rotation_set(m)?;
    hierarchy_bound_with(&set, states, measure)
}

pub fn hierarchy_bound_with(set: &RotationSet, states: &[QuantumState], measure: Measure) -> Result<(f64, UnitarySU2)> {
    let bloch = bloch_list(states)?;
    let (v, i) = set.bound(&bloch, measure);
    Ok((v, set.u_m[i].clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub steps: Vec<u32>,
    pub distances: Vec<f64>,
    pub amplitude: f64,
    pub rate: f64,
}

/// Trapezoid-weighted L2 distance between two curves sampled on `grid`.
pub fn l2_distance(grid: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: a.len().min(b.len()) });
    }
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    let s: f64 = grid.windows(2).zip(sq.windows(2)).map(|(g, q)| 0.5 * (g[1] - g[0]) * (q[0] + q[1])).sum();
    Ok(s.sqrt())
}

/// L2 distances of each step's curve to the reference and the fit
/// d ≈ A·exp(−k·m) (least squares on ln d).
pub fn convergence_report(
    grid: &[f64],
    steps: &[u32],
    curves: &[Vec<f64>],
    reference: &[f64],
) -> Result<ConvergenceReport> {
    if steps.len() != curves.len() {
        return Err(Error::Dimension { expected: steps.len(), got: curves.len() });
    }
    if curves.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 hierarchy steps, got {}", curves.len())));
    }
    let distances = curves.iter().map(|c| l2_distance(grid, c, reference)).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(&distances)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&m, &d)| (m as f64, d.ln()))
        .collect();
    let (amplitude, rate) = if pts.len() < 2 {
        (0.0, f64::INFINITY)
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        ((my - slope * mx).exp(), -slope)
    };
    Ok(ConvergenceReport { steps: steps.to_vec(), distances, amplitude, rate })
}
