//! Fidelity, Bures geometry and quantum Fisher information for qubit
//! density operators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Trajectory;
use crate::hilbert::{HermitianOperator, PureState};
use crate::quadrature::simpson;

const TOL: f64 = 1e-12;
/// Eigenvalue pairs with a smaller sum are left out of the SLD.
pub const RANK_CUTOFF: f64 = 1e-12;
/// Agreement required between the two differentiation resolutions.
pub const REFINEMENT_TOL: f64 = 1e-6;
/// Fidelity required between the shared endpoints of two trajectories.
pub const ENDPOINT_FIDELITY: f64 = 1.0 - 1e-9;

/// Qubit density operator in the `{|w⟩, |r⟩}` basis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityState(HermitianOperator);

impl DensityState {
    /// From the diagonal entries and `ρ_wr = ⟨w|ρ|r⟩`.
    pub fn new(ww: f64, rr: f64, wr: Complex64) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(ww, rr, wr))
    }

    /// From a full matrix `m[i][j] = ⟨i|ρ|j⟩` with `i, j ∈ {w, r}`.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let skew = (m[0][0].im.abs()).max(m[1][1].im.abs()).max((m[0][1] - m[1][0].conj()).norm());
        if skew > TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {skew:e})")));
        }
        Self::new(m[0][0].re, m[1][1].re, 0.5 * (m[0][1] + m[1][0].conj()))
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        if (op.trace() - 1.0).abs() > TOL {
            return Err(Error::InvalidDensity(format!("trace {}", op.trace())));
        }
        let spec = op.spectrum();
        if spec.e_minus < -TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {}", spec.e_minus)));
        }
        Ok(DensityState(op))
    }

    /// `(1 + r·σ)/2`; the Bloch vector must satisfy `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        Self::new(0.5 * (1.0 + r[2]), 0.5 * (1.0 - r[2]), Complex64::new(0.5 * r[0], -0.5 * r[1]))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityState(HermitianOperator::projector(psi))
    }

    pub fn maximally_mixed() -> Self {
        DensityState(HermitianOperator::scaled_identity(0.5))
    }

    /// `p·a + (1 − p)·b`.
    pub fn mix(p: f64, a: &DensityState, b: &DensityState) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("mixing weight {p} outside [0, 1]")));
        }
        Self::from_operator(p * a.0 + (1.0 - p) * b.0)
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn det(&self) -> f64 {
        (self.0.ww() * self.0.rr() - self.0.wr().norm_sqr()).max(0.0)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.0, &self.0)
    }

    pub fn bloch(&self) -> [f64; 3] {
        let c = self.0.wr();
        [2.0 * c.re, -2.0 * c.im, self.0.ww() - self.0.rr()]
    }

    /// `UρU†` with `U = exp(−iHt/ħ)`.
    pub fn evolve(&self, h: &HermitianOperator, t: f64, hbar: f64) -> DensityState {
        let spec = self.0.spectrum();
        let lo = HermitianOperator::projector(&h.propagate(&spec.v_minus, t, hbar));
        let hi = HermitianOperator::projector(&h.propagate(&spec.v_plus, t, hbar));
        DensityState(spec.e_minus.max(0.0) * lo + spec.e_plus * hi)
    }

    /// `tr(ρH²) − tr(ρH)²`.
    pub fn energy_variance(&self, h: &HermitianOperator) -> f64 {
        let mean = trace_product(&self.0, h);
        (trace_product(&self.0, &square(h)) - mean * mean).max(0.0)
    }

    pub fn max_abs_diff(&self, other: &DensityState) -> f64 {
        (self.0 - other.0).max_entry()
    }
}

fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.ww() * b.ww() + a.rr() * b.rr() + 2.0 * (a.wr() * b.wr().conj()).re
}

fn square(a: &HermitianOperator) -> HermitianOperator {
    let c = a.wr();
    HermitianOperator::new(a.ww() * a.ww() + c.norm_sqr(), a.rr() * a.rr() + c.norm_sqr(), c * (a.ww() + a.rr()))
}

/// Sampled curve `t ↦ ρ(t)`.
#[derive(Debug, Clone)]
pub struct MixedTrajectory {
    times: Vec<f64>,
    states: Vec<DensityState>,
}

impl MixedTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityState>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidTrajectory(format!("{} times but {} states", times.len(), states.len())));
        }
        if times.len() < 2 {
            return Err(Error::InvalidTrajectory("need at least two samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrajectory("times must be strictly increasing".into()));
        }
        Ok(MixedTrajectory { times, states })
    }

    /// Rank-one densities of a pure trajectory.
    pub fn from_pure(traj: &Trajectory) -> Self {
        MixedTrajectory {
            times: traj.times().to_vec(),
            states: traj.states().iter().map(DensityState::from_pure).collect(),
        }
    }

    /// `ρ(t) = Uρ₀U†` on `points` evenly spaced times in `[0, t_end]`.
    pub fn unitary(rho0: &DensityState, h: &HermitianOperator, t_end: f64, points: usize, hbar: f64) -> Result<Self> {
        let times = crate::quadrature::linspace(0.0, t_end, points);
        let states = times.iter().map(|&t| rho0.evolve(h, t, hbar)).collect();
        Self::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &DensityState {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityState {
        &self.states[self.states.len() - 1]
    }
}

/// `[tr √(√ρ σ √ρ)]² = tr(ρσ) + 2√(det ρ · det σ)` for qubits.
pub fn uhlmann_fidelity(r1: &DensityState, r2: &DensityState) -> f64 {
    (trace_product(&r1.0, &r2.0) + 2.0 * (r1.det() * r2.det()).sqrt()).clamp(0.0, 1.0)
}

/// `arccos √F`.
pub fn bures_angle(r1: &DensityState, r2: &DensityState) -> f64 {
    uhlmann_fidelity(r1, r2).sqrt().acos()
}

/// `2(1 − √F)`.
pub fn bures_distance_sq(r1: &DensityState, r2: &DensityState) -> f64 {
    2.0 * (1.0 - uhlmann_fidelity(r1, r2).sqrt())
}

/// Quantum Fisher information at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QfiEstimate {
    pub value: f64,
    /// Estimate from the finer second-order stencil alone.
    pub unrefined: f64,
    /// Eigenvalue pairs dropped because `p_j + p_k < 1e-12` (rank deficiency).
    pub dropped_pairs: usize,
}

/// `tr(ρL²)` with `dρ = (ρL + Lρ)/2`, solved in the eigenbasis of `ρ`.
/// Returns the value and the number of dropped pairs.
pub fn sld_qfi_at(rho: &DensityState, drho: &HermitianOperator) -> (f64, usize) {
    let spec = rho.0.spectrum();
    let basis = [(spec.e_minus, spec.v_minus), (spec.e_plus, spec.v_plus)];
    let mut total = 0.0;
    let mut dropped = 0;
    for (pj, vj) in &basis {
        for (pk, vk) in &basis {
            let sum = pj + pk;
            if sum < RANK_CUTOFF {
                dropped += 1;
                continue;
            }
            let element = vj.ket().inner(&drho.apply(&vk.ket()));
            total += 2.0 * element.norm_sqr() / sum;
        }
    }
    (total.max(0.0), dropped)
}

/// Weights of `f'(nodes[at])` from the interpolating quadratic through three nodes.
fn quadratic_derivative_weights(nodes: [f64; 3], at: usize) -> [f64; 3] {
    let x = nodes[at];
    let mut w = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        w[i] = ((x - nodes[j]) + (x - nodes[k])) / ((nodes[i] - nodes[j]) * (nodes[i] - nodes[k]));
    }
    w
}

fn stencil_derivative(traj: &MixedTrajectory, idx: [usize; 3], at: usize) -> HermitianOperator {
    let nodes = idx.map(|i| traj.times[i]);
    let w = quadratic_derivative_weights(nodes, at);
    let centre = traj.states[idx[at]].0;
    (0..3).fold(HermitianOperator::zero(), |acc, i| acc + w[i] * (traj.states[idx[i]].0 - centre))
}

fn refined_qfi(rho: &DensityState, fine: HermitianOperator, coarse: HermitianOperator) -> Result<QfiEstimate> {
    // Second-order stencils at h and 2h combine to a fourth-order derivative.
    let extrapolated = (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
    let (value, dropped) = sld_qfi_at(rho, &extrapolated);
    let (unrefined, _) = sld_qfi_at(rho, &fine);
    if (value - unrefined).abs() > REFINEMENT_TOL * value.max(unrefined) + 1e-20 {
        return Err(Error::NotConverged(format!("Fisher information {unrefined} against refined {value}")));
    }
    Ok(QfiEstimate { value, unrefined, dropped_pairs: dropped })
}

/// SLD Fisher information at grid index `idx`, from three-point derivative
/// stencils at spacing `h` and `2h` (central in the interior, one-sided near
/// the ends). The returned value is their Richardson combination, which must
/// agree with the finer stencil alone within `1e-6` relative. Needs at least six samples.
pub fn sld_qfi(traj: &MixedTrajectory, idx: usize) -> Result<QfiEstimate> {
    let n = traj.len();
    if n < 6 {
        return Err(Error::InvalidTrajectory("Fisher information needs at least six samples".into()));
    }
    if idx >= n {
        return Err(Error::Domain(format!("index {idx} outside trajectory of {n} samples")));
    }
    let (fine, coarse) = if idx >= 2 && idx + 2 < n {
        (stencil_derivative(traj, [idx - 1, idx, idx + 1], 1), stencil_derivative(traj, [idx - 2, idx, idx + 2], 1))
    } else if idx < 2 {
        (stencil_derivative(traj, [idx, idx + 1, idx + 2], 0), stencil_derivative(traj, [idx, idx + 2, idx + 4], 0))
    } else {
        (stencil_derivative(traj, [idx - 2, idx - 1, idx], 2), stencil_derivative(traj, [idx - 4, idx - 2, idx], 2))
    };
    refined_qfi(&traj.states[idx], fine, coarse)
}

/// SLD Fisher information of a differentiable family at `t`, from central
/// differences with steps `step` and `step/2`.
pub fn sld_qfi_family<F>(family: F, t: f64, step: f64) -> Result<QfiEstimate>
where
    F: Fn(f64) -> Result<DensityState>,
{
    if !(step > 0.0) {
        return Err(Error::Domain(format!("step {step} must be positive")));
    }
    let central = |h: f64| -> Result<HermitianOperator> { Ok((0.5 / h) * (family(t + h)?.0 - family(t - h)?.0)) };
    let fine = central(0.5 * step)?;
    let coarse = central(step)?;
    refined_qfi(&family(t)?, fine, coarse)
}

/// `√F_Q` on every grid point.
pub fn qfi_speeds(traj: &MixedTrajectory) -> Result<Vec<f64>> {
    (0..traj.len()).map(|k| Ok(sld_qfi(traj, k)?.value.sqrt())).collect()
}

/// `∫√F_Q dt` by Simpson quadrature.
pub fn qfi_length(traj: &MixedTrajectory) -> Result<f64> {
    Ok(simpson(traj.times(), &qfi_speeds(traj)?))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixedEfficiency {
    /// `2 arccos √F[ρ(0), ρ(t*)]`.
    pub numerator: f64,
    /// `∫√F_Q dt`.
    pub denominator: f64,
    pub eta: f64,
}

pub fn efficiency_mixed(traj: &MixedTrajectory) -> Result<MixedEfficiency> {
    let denominator = qfi_length(traj)?;
    if denominator < 1e-12 {
        return Err(Error::Degenerate(format!("integrated Fisher speed {denominator:e}")));
    }
    let numerator = 2.0 * bures_angle(traj.first(), traj.last());
    Ok(MixedEfficiency { numerator, denominator, eta: numerator / denominator })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TildeEfficiency {
    /// `∫√F_Q dt` along the driven path.
    pub integral_h: f64,
    /// `∫√F_Q dt` along the reference path.
    pub integral_geo: f64,
    /// `integral_h / integral_geo`.
    pub printed: f64,
    /// `integral_geo / integral_h`.
    pub reciprocal: f64,
    /// Whether the printed orientation is the one bounded by one.
    pub printed_at_most_one: bool,
}

/// Ratio of integrated Fisher speeds along two paths with shared endpoints,
/// in both orientations.
pub fn efficiency_tilde(traj_h: &MixedTrajectory, traj_geo: &MixedTrajectory) -> Result<TildeEfficiency> {
    let start = uhlmann_fidelity(traj_h.first(), traj_geo.first());
    let end = uhlmann_fidelity(traj_h.last(), traj_geo.last());
    let worst = start.min(end);
    if worst < ENDPOINT_FIDELITY {
        return Err(Error::EndpointMismatch(worst));
    }
    let integral_h = qfi_length(traj_h)?;
    let integral_geo = qfi_length(traj_geo)?;
    if integral_h < 1e-12 || integral_geo < 1e-12 {
        return Err(Error::Degenerate("path with vanishing Fisher length".into()));
    }
    let printed = integral_h / integral_geo;
    Ok(TildeEfficiency {
        integral_h,
        integral_geo,
        printed,
        reciprocal: 1.0 / printed,
        printed_at_most_one: printed <= 1.0 + 1e-9,
    })
}

/// Both sides of the relation between integrated Fisher speed and endpoint
/// fidelity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FidelityIntegral {
    pub integral: f64,
    pub sqrt_fidelity: f64,
    /// `2 arccos √F`, the value the integral attains on a geodesic.
    pub twice_bures_angle: f64,
}

pub fn fidelity_integral(traj: &MixedTrajectory) -> Result<FidelityIntegral> {
    let f = uhlmann_fidelity(traj.first(), traj.last());
    Ok(FidelityIntegral {
        integral: qfi_length(traj)?,
        sqrt_fidelity: f.sqrt(),
        twice_bures_angle: 2.0 * f.sqrt().acos(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UncertaintyCheck {
    pub dxi: f64,
    /// `(h/2)·F_Q^{−1/2}`; infinite when `F_Q = 0`.
    pub bound: f64,
    pub fisher: f64,
    pub holds: bool,
}

/// Whether `δξ ≥ (h/2)F_Q^{−1/2}` at grid index `idx`, with `h = 2πħ`.
pub fn generalized_uncertainty_bound(
    traj: &MixedTrajectory,
    idx: usize,
    dxi: f64,
    hbar: f64,
) -> Result<UncertaintyCheck> {
    let fisher = sld_qfi(traj, idx)?.value;
    Ok(uncertainty_from_fisher(fisher, dxi, hbar))
}

pub fn uncertainty_from_fisher(fisher: f64, dxi: f64, hbar: f64) -> UncertaintyCheck {
    let bound = if fisher > 0.0 { PI * hbar / fisher.sqrt() } else { f64::INFINITY };
    UncertaintyCheck { dxi, bound, fisher, holds: dxi >= bound }
}
