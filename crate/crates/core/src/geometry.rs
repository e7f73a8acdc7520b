//! Fubini–Study geometry of the projective state space.
//!
//! Distances use the factor-4 convention: orthogonal states are `π` apart and
//! `ds² = 4(⟨dψ|dψ⟩ − |⟨ψ|dψ⟩|²)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{HermitianOperator, Ket, PureState};
use crate::quadrature::{linspace, simpson};

/// Default central-difference step for [`fs_metric_tensor`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Adjacent samples with `|⟨ψ_k|ψ_{k+1}⟩|` below this are flagged as coarse.
pub const COARSE_OVERLAP: f64 = 0.99;

/// Time-independent generator attached to a sampled trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Generator {
    pub op: HermitianOperator,
    pub hbar: f64,
}

/// Sampled curve `t ↦ |ψ(t)⟩`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PureState>,
    generator: Option<Generator>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidTrajectory(format!("{} times but {} states", times.len(), states.len())));
        }
        if times.len() < 2 {
            return Err(Error::InvalidTrajectory("need at least two samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrajectory("times must be strictly increasing".into()));
        }
        if let Some(k) = states.iter().position(|s| (s.ket().norm() - 1.0).abs() > 1e-10) {
            return Err(Error::InvalidTrajectory(format!("state {k} is not normalized")));
        }
        Ok(Trajectory { times, states, generator: None })
    }

    /// Samples `state_at` on `points` evenly spaced times in `[t0, t1]`.
    pub fn sample<F>(t0: f64, t1: f64, points: usize, mut state_at: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<PureState>,
    {
        let times = linspace(t0, t1, points);
        let states = times.iter().map(|&t| state_at(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, states)
    }

    pub fn with_generator(mut self, op: HermitianOperator, hbar: f64) -> Self {
        self.generator = Some(Generator { op, hbar });
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &PureState {
        &self.states[0]
    }

    pub fn last(&self) -> &PureState {
        &self.states[self.states.len() - 1]
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    /// Smallest `|⟨ψ_k|ψ_{k+1}⟩|` along the grid.
    pub fn min_adjacent_overlap(&self) -> f64 {
        self.states.windows(2).map(|w| w[0].inner(&w[1]).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `ΔE(t)` on the grid, if a generator is attached.
    pub fn dispersions(&self) -> Option<Vec<f64>> {
        let g = self.generator?;
        Some(self.states.iter().map(|s| g.op.dispersion(s)).collect())
    }
}

/// Geodesic arc between two endpoints, with the relative phase `φ` defined
/// by `⟨ψ_B|ψ_A⟩ = |⟨ψ_B|ψ_A⟩| e^{iφ}` (and `φ = 0` for orthogonal endpoints).
#[derive(Debug, Clone, Copy)]
pub struct GeodesicArc {
    pub endpoint_a: PureState,
    pub endpoint_b: PureState,
    pub phi: f64,
}

impl GeodesicArc {
    pub fn new(a: PureState, b: PureState) -> Self {
        let ov = b.inner(&a);
        let phi = if ov.norm() < 1e-15 { 0.0 } else { ov.arg() };
        GeodesicArc { endpoint_a: a, endpoint_b: b, phi }
    }

    /// `|⟨ψ_B|ψ_A⟩|`.
    pub fn overlap(&self) -> f64 {
        self.endpoint_b.inner(&self.endpoint_a).norm()
    }

    /// Fubini–Study length of the arc.
    pub fn length(&self) -> f64 {
        wootters_distance(&self.endpoint_a, &self.endpoint_b)
    }

    /// Unit vector orthogonal to `ψ_A` in the plane of the arc, phased so the
    /// arc is `cos(σ/2)ψ_A + sin(σ/2)u` for `σ ∈ [0, length]`.
    fn orthogonal_direction(&self) -> Result<Ket> {
        let a = self.endpoint_a.ket();
        let b = Complex64::from_polar(1.0, self.phi) * self.endpoint_b.ket();
        let perp = b - a.inner(&b) * a;
        let n = perp.norm();
        if n < 1e-14 {
            return Err(Error::Degenerate("arc endpoints coincide".into()));
        }
        Ok((1.0 / n) * perp)
    }

    /// Constant-speed parameterization: the state at arc length `sigma`.
    pub fn point_at_length(&self, sigma: f64) -> Result<PureState> {
        let u = self.orthogonal_direction()?;
        let (s, c) = (0.5 * sigma).sin_cos();
        Ok(PureState::from_unit(c * self.endpoint_a.ket() + s * u))
    }

    /// Hamiltonian whose evolution traverses the arc at unit Fubini–Study
    /// speed, so elapsed time equals arc length.
    pub fn generator(&self, hbar: f64) -> Result<HermitianOperator> {
        let a = self.endpoint_a.ket();
        let u = self.orthogonal_direction()?;
        // (iħ/2)(|u⟩⟨a| − |a⟩⟨u|)
        let i_half = Complex64::new(0.0, 0.5 * hbar);
        let entry = |row: usize, col: usize| i_half * (u.0[row] * a.0[col].conj() - a.0[row] * u.0[col].conj());
        Ok(HermitianOperator::new(entry(0, 0).re, entry(1, 1).re, entry(0, 1)))
    }

    /// The arc sampled at constant speed over `[0, length]`, with its generator.
    pub fn uniform_trajectory(&self, points: usize, hbar: f64) -> Result<Trajectory> {
        let op = self.generator(hbar)?;
        let traj = Trajectory::sample(0.0, self.length(), points, |s| self.point_at_length(s))?;
        Ok(traj.with_generator(op, hbar))
    }
}

/// `2 arccos |⟨a|b⟩|`, in `[0, π]`.
///
/// Evaluated as `2 atan2(√(1−|⟨a|b⟩|²), |⟨a|b⟩|)` with the complement taken
/// from [`PureState::infidelity`], which stays accurate for nearby states
/// where `arccos` loses half the digits.
pub fn wootters_distance(a: &PureState, b: &PureState) -> f64 {
    let ov = a.inner(b).norm().min(1.0);
    2.0 * a.infidelity(b).sqrt().atan2(ov)
}

/// `d² = 4(1 − |⟨a|b⟩|²)`, in `[0, 4]`.
pub fn projective_distance_sq(a: &PureState, b: &PureState) -> f64 {
    4.0 * a.infidelity(b)
}

/// Point on the arc at `λ ∈ [0, 1]`:
/// `[(1−λ)ψ_A + e^{iφ}λψ_B] / √(1 − 2λ(1−λ)(1 − |⟨ψ_B|ψ_A⟩|))`.
pub fn geodesic_point_lambda(arc: &GeodesicArc, lam: f64) -> PureState {
    let num = (1.0 - lam) * arc.endpoint_a.ket() + Complex64::from_polar(lam, arc.phi) * arc.endpoint_b.ket();
    let den = (1.0 - 2.0 * lam * (1.0 - lam) * (1.0 - arc.overlap())).sqrt();
    PureState::from_unit((1.0 / den) * num)
}

/// Point on the arc at `θ ∈ [0, π]`:
/// `[cos(θ/2)ψ_A + e^{iφ}sin(θ/2)ψ_B] / √(1 + sin θ |⟨ψ_B|ψ_A⟩|)`.
pub fn geodesic_point_theta(arc: &GeodesicArc, theta: f64) -> PureState {
    let (s, c) = (0.5 * theta).sin_cos();
    let num = c * arc.endpoint_a.ket() + Complex64::from_polar(s, arc.phi) * arc.endpoint_b.ket();
    let den = (1.0 + theta.sin() * arc.overlap()).sqrt();
    PureState::from_unit((1.0 / den) * num)
}

/// `λ(θ) = tan(θ/2) / (1 + tan(θ/2))`, written without the pole at `θ = π`.
pub fn lambda_of_theta(theta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    s / (s + c)
}

/// Horizontal, affinely parameterized geodesic
/// `ψ̄(s) = cos(ωs)ψ̄(0) + sin(ωs)/ω · ψ̄′(0)`.
///
/// Requires `⟨ψ̄(0)|ψ̄′(0)⟩ = 0` and `⟨ψ̄′(0)|ψ̄′(0)⟩ = ω²` within `1e-10`.
pub fn harmonic_geodesic(psi0: &PureState, dpsi0: &Ket, omega: f64, s: f64) -> Result<PureState> {
    let vertical = psi0.ket().inner(dpsi0).norm();
    if vertical > 1e-10 {
        return Err(Error::Precondition { what: "|<psi(0)|psi'(0)>| must vanish", value: vertical });
    }
    let speed_err = (dpsi0.norm_sqr() - omega * omega).abs();
    if speed_err > 1e-10 {
        return Err(Error::Precondition { what: "<psi'(0)|psi'(0)> - omega^2 must vanish", value: speed_err });
    }
    if omega == 0.0 {
        return Ok(*psi0);
    }
    let (sn, cs) = (omega * s).sin_cos();
    Ok(PureState::from_unit(cs * psi0.ket() + (sn / omega) * *dpsi0))
}

/// Fubini–Study metric `g_ab = 4 Re[⟨∂_aψ|∂_bψ⟩ − ⟨∂_aψ|ψ⟩⟨ψ|∂_bψ⟩]` of a
/// parametric family, with derivatives by central differences.
pub fn fs_metric_tensor<F>(family: F, xi: &[f64], step: f64) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> PureState,
{
    let dim = xi.len();
    let psi = family(xi).ket();
    let mut point = xi.to_vec();
    let partials: Vec<Ket> = (0..dim)
        .map(|a| {
            point[a] = xi[a] + step;
            let fwd = family(&point).ket();
            point[a] = xi[a] - step;
            let bwd = family(&point).ket();
            point[a] = xi[a];
            (0.5 / step) * (fwd - bwd)
        })
        .collect();
    let mut g = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let term = partials[a].inner(&partials[b]) - partials[a].inner(&psi) * psi.inner(&partials[b]);
            g[a][b] = 4.0 * term.re;
            g[b][a] = g[a][b];
        }
    }
    g
}

/// How a trajectory length was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LengthMethod {
    /// `∫ 2ΔE/ħ dt` by composite Simpson.
    EnergySpread,
    /// `Σ 2 arccos |⟨ψ_k|ψ_{k+1}⟩|`.
    ChordSum,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathLength {
    pub value: f64,
    pub method: LengthMethod,
    /// Set when some adjacent overlap falls below [`COARSE_OVERLAP`].
    pub coarse_grid: bool,
}

/// Fubini–Study length of a sampled trajectory: the energy-spread integral
/// when a generator is attached, otherwise the chord sum.
pub fn trajectory_length(traj: &Trajectory) -> PathLength {
    let coarse_grid = traj.min_adjacent_overlap() < COARSE_OVERLAP;
    match (traj.generator(), traj.dispersions()) {
        (Some(g), Some(spread)) => {
            let speed: Vec<f64> = spread.iter().map(|d| 2.0 * d / g.hbar).collect();
            PathLength { value: simpson(traj.times(), &speed), method: LengthMethod::EnergySpread, coarse_grid }
        }
        _ => PathLength { value: chord_length(traj), method: LengthMethod::ChordSum, coarse_grid },
    }
}

pub fn chord_length(traj: &Trajectory) -> f64 {
    traj.states().windows(2).map(|w| wootters_distance(&w[0], &w[1])).sum()
}
