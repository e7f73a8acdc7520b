//! Brute-force numerics that check the closed forms: a fixed-step RK4
//! Schrödinger integrator and a bracketed golden-section minimizer for the
//! geodesic residual `min_λ d²(t, λ)`.
//!
//! Nothing here uses the spectral propagator or any search closed form, so
//! agreement with those is an independent confirmation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{geodesic_point_lambda, projective_distance_sq, GeodesicArc, Trajectory};
use crate::hilbert::{HermitianOperator, Ket, PureState};

pub const DEFAULT_STEPS: usize = 10_000;
pub const MIN_STEPS: usize = 100;
pub const MIN_LAMBDA_GRID: usize = 64;
pub const GOLDEN_TOL: f64 = 1e-12;

/// Richardson error estimates above this reject the run as under-resolved.
const MAX_ERROR_ESTIMATE: f64 = 1e-6;

/// Fixed-step classic RK4; `steps` is the number of steps over the whole
/// integration interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntegratorSpec {
    steps: usize,
}

impl IntegratorSpec {
    pub fn new(steps: usize) -> Result<Self> {
        if steps < MIN_STEPS {
            return Err(Error::StepCountTooLow(format!("{steps} steps, need at least {MIN_STEPS}")));
        }
        Ok(IntegratorSpec { steps })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn doubled(&self) -> Self {
        IntegratorSpec { steps: 2 * self.steps }
    }
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec { steps: DEFAULT_STEPS }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrationStats {
    /// Largest `|‖ψ‖ − 1|` removed by renormalization in a single step.
    pub max_renorm_drift: f64,
    /// Richardson estimate `‖ψ_N − ψ_2N‖·16/15` of the terminal-state error.
    pub error_estimate: f64,
}

fn rhs(h: &HermitianOperator, psi: &Ket, hbar: f64) -> Ket {
    Complex64::new(0.0, -1.0 / hbar) * h.apply(psi)
}

fn rk4_run(
    h: &HermitianOperator,
    psi0: &PureState,
    t_end: f64,
    steps: usize,
    hbar: f64,
    record: bool,
) -> (Vec<Ket>, f64) {
    let dt = t_end / steps as f64;
    let mut psi = psi0.ket();
    let mut path = Vec::with_capacity(if record { steps + 1 } else { 1 });
    if record {
        path.push(psi);
    }
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        let k1 = rhs(h, &psi, hbar);
        let k2 = rhs(h, &(psi + (0.5 * dt) * k1), hbar);
        let k3 = rhs(h, &(psi + (0.5 * dt) * k2), hbar);
        let k4 = rhs(h, &(psi + dt * k3), hbar);
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let n = psi.norm();
        drift = drift.max((n - 1.0).abs());
        psi = (1.0 / n) * psi;
        if record {
            path.push(psi);
        }
    }
    if !record {
        path.push(psi);
    }
    (path, drift)
}

/// Terminal state only, without the convergence check.
pub fn rk4_terminal(h: &HermitianOperator, psi0: &PureState, t_end: f64, spec: IntegratorSpec, hbar: f64) -> PureState {
    let (path, _) = rk4_run(h, psi0, t_end, spec.steps, hbar, false);
    PureState::from_unit(path[0])
}

/// Integrates `iħ ∂_t ψ = Hψ` over `[0, t_end]` and returns every step.
pub fn integrate_schrodinger(
    h: &HermitianOperator,
    psi0: &PureState,
    t_end: f64,
    spec: IntegratorSpec,
    hbar: f64,
) -> Result<Trajectory> {
    integrate_with_stats(h, psi0, t_end, spec, hbar).map(|(traj, _)| traj)
}

/// As [`integrate_schrodinger`], also reporting renormalization drift and a
/// step-doubling error estimate. Fails when that estimate exceeds `1e-6`.
pub fn integrate_with_stats(
    h: &HermitianOperator,
    psi0: &PureState,
    t_end: f64,
    spec: IntegratorSpec,
    hbar: f64,
) -> Result<(Trajectory, IntegrationStats)> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("integration end time must be positive, got {t_end}")));
    }
    let (path, max_renorm_drift) = rk4_run(h, psi0, t_end, spec.steps, hbar, true);
    let fine = rk4_terminal(h, psi0, t_end, spec.doubled(), hbar);
    let coarse = path[path.len() - 1];
    let error_estimate = (coarse - fine.ket()).norm() * 16.0 / 15.0;
    if !(error_estimate <= MAX_ERROR_ESTIMATE) {
        return Err(Error::StepCountTooLow(format!(
            "{} steps over t = {t_end}: estimated terminal error {error_estimate:e}",
            spec.steps
        )));
    }
    let dt = t_end / spec.steps as f64;
    let times: Vec<f64> = (0..=spec.steps).map(|k| if k == spec.steps { t_end } else { dt * k as f64 }).collect();
    let states = path.into_iter().map(PureState::from_unit).collect();
    let traj = Trajectory::new(times, states)?.with_generator(*h, hbar);
    Ok((traj, IntegrationStats { max_renorm_drift, error_estimate }))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // The bracket shrinks by 1/φ per step; 200 steps is far past f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global minimum of `f` on `[lo, hi]`: a `scan`-point sweep picks the best
/// node, then golden-section refines inside its neighbouring cells. Scanned
/// nodes (including both endpoints) stay candidates, so a minimum sitting on
/// the boundary is found exactly.
pub fn bracketed_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize, tol: f64) -> (f64, f64) {
    let scan = scan.max(3);
    let step = (hi - lo) / (scan - 1) as f64;
    let node = |k: usize| if k == scan - 1 { hi } else { lo + step * k as f64 };
    let (best_k, best_f) =
        (0..scan).map(|k| (k, f(node(k)))).fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    let a = node(best_k.saturating_sub(1));
    let b = node((best_k + 1).min(scan - 1));
    let (x, fx) = golden_section(&f, a, b, tol);
    if fx < best_f {
        (x, fx)
    } else {
        (node(best_k), best_f)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct D2Sample {
    pub t: f64,
    pub lambda_min: f64,
    pub d2_min: f64,
}

/// For every trajectory sample, minimizes `λ ↦ d²(ψ(t), ψ_geo(λ))` over
/// `[0, 1]`. `grid` is the number of λ nodes used to bracket the minimum.
pub fn min_d2_profile(traj: &Trajectory, arc: &GeodesicArc, grid: usize) -> Result<Vec<D2Sample>> {
    if grid < MIN_LAMBDA_GRID {
        return Err(Error::Domain(format!("lambda grid {grid} below minimum {MIN_LAMBDA_GRID}")));
    }
    Ok(traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, psi)| {
            let d2 = |lam: f64| projective_distance_sq(psi, &geodesic_point_lambda(arc, lam));
            let (lambda_min, d2_min) = bracketed_min(d2, 0.0, 1.0, grid, GOLDEN_TOL);
            D2Sample { t, lambda_min, d2_min }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{self, SchemeKind, SearchConfig};
    use std::f64::consts::PI;

    #[test]
    fn spec_rejects_too_few_steps() {
        assert!(matches!(IntegratorSpec::new(99), Err(Error::StepCountTooLow(_))));
        assert_eq!(IntegratorSpec::default().steps(), DEFAULT_STEPS);
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let psi = PureState::real(0.3, 0.7).unwrap();
        let traj = integrate_schrodinger(&HermitianOperator::zero(), &psi, 2.0, IntegratorSpec::new(100).unwrap(), 1.0)
            .unwrap();
        assert_eq!(traj.len(), 101);
        assert!(traj.states().iter().all(|s| s.ket().max_abs_diff(&psi.ket()) == 0.0));
    }

    #[test]
    fn matches_closed_form_fg_state() {
        let cfg = SearchConfig::new(0.5, 1.0).unwrap();
        let h = search::hamiltonian(SchemeKind::Fg, &cfg);
        let t = search::optimal_time(SchemeKind::Fg, &cfg);
        let psi0 = search::fg_geometric_state(&cfg, 0.0);
        let (traj, stats) = integrate_with_stats(&h, &psi0, t, IntegratorSpec::default(), 1.0).unwrap();
        let closed = search::fg_geometric_state(&cfg, t);
        assert!(traj.last().inner(&closed).norm_sqr() >= 1.0 - 1e-10);
        assert!(traj.last().ket().max_abs_diff(&h.propagate(&psi0, t, 1.0).ket()) < 1e-10);
        assert!(stats.max_renorm_drift < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let cfg = SearchConfig::new(0.3, 2.0).unwrap();
        let h = search::hamiltonian(SchemeKind::Mfg, &cfg);
        let psi0 = search::source_state(&cfg);
        let t = PI;
        let exact = h.propagate(&psi0, t, 1.0).ket();
        let err = |n: usize| (rk4_terminal(&h, &psi0, t, IntegratorSpec::new(n).unwrap(), 1.0).ket() - exact).norm();
        for n in [100, 200, 400] {
            let ratio = err(n) / err(2 * n);
            assert!((8.0..=32.0).contains(&ratio), "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn under_resolved_run_is_rejected() {
        let h = HermitianOperator::diag(50.0, -50.0);
        let psi = PureState::real(1.0, 1.0).unwrap();
        let res = integrate_schrodinger(&h, &psi, 10.0, IntegratorSpec::new(100).unwrap(), 1.0);
        assert!(matches!(res, Err(Error::StepCountTooLow(_))));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && (fx - 1.0).abs() < 1e-12);
        // Boundary minimum and a second, shallower well.
        let (x, _) = bracketed_min(|x| x, 0.0, 1.0, 64, 1e-12);
        assert_eq!(x, 0.0);
        let f = |x: f64| (x - 0.8).powi(2) * (x - 0.1).powi(2) + 0.01 * x;
        let (x, _) = bracketed_min(f, 0.0, 1.0, 64, 1e-12);
        assert!((x - 0.1).abs() < 0.01);
    }

    #[test]
    fn profile_of_arc_itself_is_zero() {
        let a = PureState::new(Complex64::new(0.8, 0.1), Complex64::new(0.2, -0.5)).unwrap();
        let b = PureState::new(Complex64::new(-0.1, 0.4), Complex64::new(0.9, 0.0)).unwrap();
        let arc = GeodesicArc::new(a, b);
        let traj = Trajectory::sample(0.0, 1.0, 101, |l| Ok(geodesic_point_lambda(&arc, l))).unwrap();
        let profile = min_d2_profile(&traj, &arc, 64).unwrap();
        assert!(profile.iter().all(|p| p.d2_min <= 1e-12));
        assert!(profile.windows(2).all(|w| w[1].lambda_min >= w[0].lambda_min - 1e-9));
        for p in &profile {
            assert!((p.lambda_min - p.t).abs() < 1e-6);
        }
        assert!(min_d2_profile(&traj, &arc, 10).is_err());
    }
}
