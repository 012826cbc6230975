//! Sampling costs of quasi-probability estimators for Born probabilities,
//! and their relation to the sum-negativities.
//!
//! Representations follow the Born rule tr(ρE) = Σ_α W_α(ρ)·W(E|α), so the
//! effect representation of I sums to d².

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantifiers::{measurement_sum_negativity, negativity_monotone, state_sum_negativity};
use crate::quantum_core::{identity, Effect, MultiObject, QuantumState, UnitaryOp, UnitarySU2};
use crate::wigner_frames::{build_frame, wigner_effect, wigner_state, Frame};

/// Additive error ε and failure probability δ of an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostParams {
    pub epsilon: f64,
    pub delta: f64,
    /// (2/ε²)·ln(2/δ)
    pub c: f64,
}

impl CostParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("need ε, δ in (0,1), got ε={epsilon}, δ={delta}")));
        }
        Ok(Self { epsilon, delta, c: 2.0 / (epsilon * epsilon) * (2.0 / delta).ln() })
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self::new(0.1, 0.05).expect("valid defaults")
    }
}

/// Hoeffding sample count ln(2/δ)/(2ε²) for a [0,1]-bounded estimator.
pub fn hoeffding_samples(cp: &CostParams) -> f64 {
    (2.0 / cp.delta).ln() / (2.0 * cp.epsilon * cp.epsilon)
}

/// s→ = c·[Σ_α|W_α(ρ)|·max_α'|W(E|α')|]² in the frame rotated by U.
pub fn forward_cost<U: UnitaryOp + ?Sized>(
    rho: &QuantumState,
    e: &Effect,
    f: &Frame,
    u: &U,
    cp: &CostParams,
) -> Result<f64> {
    let ws = wigner_state(rho, f, u)?;
    let we = wigner_effect(e, f, u)?;
    Ok(cp.c * (ws.abs_sum() * we.max_abs()).powi(2))
}

/// s→ for any state with a nonnegative representation: c·[max_α'|W(E|α')|]².
pub fn free_state_forward_cost<U: UnitaryOp + ?Sized>(e: &Effect, f: &Frame, u: &U, cp: &CostParams) -> Result<f64> {
    Ok(cp.c * wigner_effect(e, f, u)?.max_abs().powi(2))
}

/// s← = c·[Σ_α|W(E|α)|·max_α'|W_α'(ρ)|]² in the frame rotated by U.
pub fn reverse_cost<U: UnitaryOp + ?Sized>(
    rho: &QuantumState,
    e: &Effect,
    f: &Frame,
    u: &U,
    cp: &CostParams,
) -> Result<f64> {
    let ws = wigner_state(rho, f, u)?;
    let we = wigner_effect(e, f, u)?;
    Ok(cp.c * (we.abs_sum() * ws.max_abs()).powi(2))
}

/// s← for the costliest free effect. A free effect has Σ|W(L|α)| = d·tr(L),
/// maximal at tr(L) = d, i.e. L = I.
pub fn free_effect_reverse_cost<U: UnitaryOp + ?Sized>(
    rho: &QuantumState,
    f: &Frame,
    u: &U,
    cp: &CostParams,
) -> Result<f64> {
    let d = f.dim() as f64;
    Ok(cp.c * (d * d * wigner_state(rho, f, u)?.max_abs()).powi(2))
}

/// Cost-based identity and bounds for one rotation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem2Record {
    pub quaternion: [f64; 4],
    /// 1 + E_j N(ρ_j)
    pub identity_lhs: f64,
    /// E_j √(max_o s→(ρ_j, M_o) / max_o s→(τ, M_o))
    pub identity_rhs: f64,
    /// 1 + E_j N(M_j) − E_j √(max_o s←(ρ_j, M_o) / s←(ρ_j, L))
    pub eq29_slack: f64,
    /// E_j (1+N(ρ_j))(1+N(M_j)) − E_j √(reverse ratio · forward ratio)
    pub eq30_slack: f64,
}

fn max_over<F: Fn(&Effect) -> Result<f64>>(effects: &[Effect], f: F) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for e in effects {
        best = best.max(f(e)?);
    }
    Ok(best)
}

fn record(mo: &MultiObject, f: &Frame, u: &UnitarySU2, cp: &CostParams) -> Result<Theorem2Record> {
    let n = mo.n() as f64;
    let (mut ns, mut nm, mut fwd, mut rev, mut both) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (rho, m) in mo.pairs() {
        ns += state_sum_negativity(rho, f, u)?;
        nm += measurement_sum_negativity(m, f, u)?;
        let fr = max_over(m.effects(), |e| forward_cost(rho, e, f, u, cp))?
            / max_over(m.effects(), |e| free_state_forward_cost(e, f, u, cp))?;
        let rr = max_over(m.effects(), |e| reverse_cost(rho, e, f, u, cp))? / free_effect_reverse_cost(rho, f, u, cp)?;
        fwd += fr.sqrt();
        rev += rr.sqrt();
        both += (fr * rr).sqrt();
    }
    Ok(Theorem2Record {
        quaternion: u.quaternion(),
        identity_lhs: 1.0 + ns / n,
        identity_rhs: fwd / n,
        eq29_slack: 1.0 + nm / n - rev / n,
        eq30_slack: 1.0 + negativity_monotone(mo, f, u)? - both / n,
    })
}

/// One record per rotation, in input order.
pub fn theorem2_report(mo: &MultiObject, us: &[UnitarySU2], cp: &CostParams) -> Result<Vec<Theorem2Record>> {
    if mo.dim() != 2 {
        return Err(Error::UnsupportedDimension(mo.dim()));
    }
    let f = build_frame(2)?;
    us.par_iter().map(|u| record(mo, &f, u, cp)).collect()
}

/// The identity effect, the costliest free effect for the reverse estimator.
pub fn identity_effect(d: usize) -> Effect {
    Effect::new(identity(d)).expect("identity is an effect")
}
