//! The original (FG) and modified (MFG) analog search Hamiltonians and their
//! closed-form dynamics.
//!
//! Two different initial states appear here and are never mixed up:
//! [`source_state`] is the prepared superposition `|s⟩` whose overlap with
//! `|w⟩` drives the success probability, while [`fg_geometric_state`] and
//! [`mfg_geometric_state`] evolve the closed-form initial states used in the
//! geometric (length, efficiency, uncertainty) analysis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HermitianOperator, Ket, PureState};

/// Lower/upper guard on `x` for formulas that divide by `x√(1−x²)`.
pub const MFG_X_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Original scheme, `E|w⟩⟨w| + E|s⟩⟨s|`.
    #[serde(rename = "FG")]
    Fg,
    /// Modified scheme, `E|w⟩⟨w| + E′|s⟩⟨s|` with `E′ = γE`.
    #[serde(rename = "MFG")]
    Mfg,
}

impl SchemeKind {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Fg => "FG",
            SchemeKind::Mfg => "MFG",
        }
    }
}

/// One search scenario: overlap `x = ⟨w|s⟩`, oracle energy `E`, driving
/// ratio `γ = E′/E` and `ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    x: f64,
    energy: f64,
    gamma: f64,
    hbar: f64,
}

impl SearchConfig {
    /// Scenario with `E = ħ = 1`.
    pub fn new(x: f64, gamma: f64) -> Result<Self> {
        Self::with_units(x, gamma, 1.0, 1.0)
    }

    pub fn with_units(x: f64, gamma: f64, energy: f64, hbar: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("overlap x must lie in (0, 1), got {x}")));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be >= 1, got {gamma}")));
        }
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::Domain(format!("energy must be > 0, got {energy}")));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::Domain(format!("hbar must be > 0, got {hbar}")));
        }
        Ok(SearchConfig { x, energy, gamma, hbar })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Planck's constant `h = 2πħ`.
    pub fn planck(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    /// `E′` as seen by `kind`; FG ignores `γ`.
    pub fn driving_energy(&self, kind: SchemeKind) -> f64 {
        match kind {
            SchemeKind::Fg => self.energy,
            SchemeKind::Mfg => self.gamma * self.energy,
        }
    }

    /// The same scenario with `γ = 1`.
    pub fn fg_slice(&self) -> SearchConfig {
        SearchConfig { gamma: 1.0, ..*self }
    }

    /// `√(1 − x²)`.
    fn cos_overlap(&self) -> f64 {
        (1.0 - self.x * self.x).sqrt()
    }
}

/// `√(4x²E′E + (E′−E)²)`, the eigen-gap of the scheme's Hamiltonian.
pub fn gap(kind: SchemeKind, cfg: &SearchConfig) -> f64 {
    let e = cfg.energy;
    let ep = cfg.driving_energy(kind);
    (4.0 * cfg.x * cfg.x * ep * e + (ep - e) * (ep - e)).sqrt()
}

/// `|s⟩ = x|w⟩ + √(1−x²)|r⟩`.
pub fn source_state(cfg: &SearchConfig) -> PureState {
    PureState::from_unit(Ket::real(cfg.x, cfg.cos_overlap()))
}

pub fn hamiltonian(kind: SchemeKind, cfg: &SearchConfig) -> HermitianOperator {
    let x = cfg.x;
    let c = cfg.cos_overlap();
    let ep = cfg.driving_energy(kind);
    HermitianOperator::new(cfg.energy + ep * x * x, ep * (1.0 - x * x), Complex64::from(ep * x * c))
}

/// Probability of finding `|w⟩` at time `t` after starting in `|s⟩`.
pub fn transition_probability(kind: SchemeKind, cfg: &SearchConfig, t: f64) -> f64 {
    let x2 = cfg.x * cfg.x;
    let phase = 0.5 * gap(kind, cfg) * t / cfg.hbar;
    let (s, c) = phase.sin_cos();
    max_probability(kind, cfg) * s * s + x2 * c * c
}

/// Earliest time at which [`transition_probability`] peaks.
pub fn optimal_time(kind: SchemeKind, cfg: &SearchConfig) -> f64 {
    match kind {
        SchemeKind::Fg => PI * cfg.hbar / (2.0 * cfg.energy * cfg.x),
        SchemeKind::Mfg => PI * cfg.hbar / gap(kind, cfg),
    }
}

/// Peak success probability `x²(E′+E)² / (4x²E′E + (E′−E)²)`.
pub fn max_probability(kind: SchemeKind, cfg: &SearchConfig) -> f64 {
    match kind {
        SchemeKind::Fg => 1.0,
        SchemeKind::Mfg => {
            let e = cfg.energy;
            let ep = cfg.driving_energy(kind);
            let g = gap(kind, cfg);
            let num = cfg.x * (ep + e);
            (num * num) / (g * g)
        }
    }
}

/// Closed-form FG state of the geometric analysis.
///
/// At `t = 0` this is an equal-weight superposition of the two eigenstates of
/// `H_FG`, not `|s⟩`.
pub fn fg_geometric_state(cfg: &SearchConfig, t: f64) -> PureState {
    let x = cfg.x;
    // 1 − √(1−x²) without cancellation for small x.
    let one_minus_c = x * x / (1.0 + cfg.cos_overlap());
    let (s, c) = (cfg.energy * x * t / cfg.hbar).sin_cos();
    let pref = Complex64::from_polar(FRAC_1_SQRT_2 / one_minus_c.sqrt(), -cfg.energy * t / cfg.hbar);
    let i = Complex64::i();
    let v = Ket::new(one_minus_c * c - i * x * s, x * c + i * one_minus_c * s);
    PureState::from_unit(pref * v)
}

/// Coefficients `A`, `B` and the frequency `λ = ½√(4x²E′E + (E′−E)²)` of the
/// MFG closed-form evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbCoefficients {
    pub a: f64,
    pub b: f64,
    pub lam: f64,
}

fn check_mfg_domain(cfg: &SearchConfig) -> Result<()> {
    if cfg.x < MFG_X_GUARD || cfg.x > 1.0 - MFG_X_GUARD {
        return Err(Error::Domain(format!(
            "MFG geometric formulas need x in [{MFG_X_GUARD:e}, 1 - {MFG_X_GUARD:e}], got {}",
            cfg.x
        )));
    }
    Ok(())
}

pub fn ab_coefficients(cfg: &SearchConfig) -> Result<AbCoefficients> {
    check_mfg_domain(cfg)?;
    let e = cfg.energy;
    let ep = cfg.driving_energy(SchemeKind::Mfg);
    let x = cfg.x;
    let root = gap(SchemeKind::Mfg, cfg);
    let denom = 2.0 * x * ep * cfg.cos_overlap();
    let base = e - ep + 2.0 * x * x * ep;
    Ok(AbCoefficients { a: (base - root) / denom, b: (base + root) / denom, lam: 0.5 * root })
}

/// Closed-form MFG initial state built from `A` and `B`.
pub fn mfg_initial_state(cfg: &SearchConfig) -> Result<PureState> {
    let AbCoefficients { a, b, .. } = ab_coefficients(cfg)?;
    let one_minus_ab = 1.0 - a * b;
    let sum = a + b;
    if one_minus_ab > 0.0 {
        // q/(A + B) with q = √((1−AB)² + (A+B)²) − (1−AB), rationalized so the
        // A + B → 0 limit (x² = (γ−1)/2γ) is regular.
        let ratio = sum / ((one_minus_ab * one_minus_ab + sum * sum).sqrt() + one_minus_ab);
        return PureState::real(ratio, 1.0);
    }
    let q = (one_minus_ab * one_minus_ab + sum * sum).sqrt() - one_minus_ab;
    let norm = (sum * sum + q * q).sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate("A + B and the radical both vanish".into()));
    }
    Ok(PureState::from_unit(Ket::real(q / norm, sum / norm)))
}

/// Closed-form MFG state: the printed 2×2 evolution matrix applied to
/// [`mfg_initial_state`], times the phase `e^{−i(E′+E)t/2ħ}`.
pub fn mfg_geometric_state(cfg: &SearchConfig, t: f64) -> Result<PureState> {
    let AbCoefficients { a, b, lam } = ab_coefficients(cfg)?;
    let diff = a - b;
    if diff.abs() < 1e-12 {
        return Err(Error::Degenerate(format!("|A - B| = {:e}", diff.abs())));
    }
    let psi0 = mfg_initial_state(cfg)?;
    let (s, c) = (lam * t / cfg.hbar).sin_cos();
    let i = Complex64::i();
    let ratio = (a + b) / diff;
    let m00 = c + i * ratio * s;
    let m01 = -2.0 * i * (a * b / diff) * s;
    let m10 = 2.0 * i / diff * s;
    let m11 = c - i * ratio * s;
    let (w, r) = (psi0.w(), psi0.r());
    let ep = cfg.driving_energy(SchemeKind::Mfg);
    let phase = Complex64::from_polar(1.0, -0.5 * (ep + cfg.energy) * t / cfg.hbar);
    PureState::from_ket(phase * Ket::new(m00 * w + m01 * r, m10 * w + m11 * r))
}

/// Geometric-analysis state of either scheme.
pub fn geometric_state(kind: SchemeKind, cfg: &SearchConfig, t: f64) -> Result<PureState> {
    match kind {
        SchemeKind::Fg => Ok(fg_geometric_state(cfg, t)),
        SchemeKind::Mfg => mfg_geometric_state(cfg, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(x: f64, gamma: f64) -> SearchConfig {
        SearchConfig::new(x, gamma).unwrap()
    }

    #[test]
    fn config_rejects_bad_domain() {
        assert!(SearchConfig::new(0.0, 1.0).is_err());
        assert!(SearchConfig::new(1.0, 1.0).is_err());
        assert!(SearchConfig::new(0.5, 0.99).is_err());
        assert!(SearchConfig::with_units(0.5, 1.0, 0.0, 1.0).is_err());
        assert!(SearchConfig::with_units(0.5, 1.0, 1.0, -1.0).is_err());
        assert!(SearchConfig::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn source_state_examples() {
        let s = source_state(&cfg(0.6, 1.0));
        assert!((s.w().re - 0.6).abs() < 1e-15 && (s.r().re - 0.8).abs() < 1e-15);
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let ov = PureState::target().inner(&source_state(&cfg(x, 1.0)));
            assert!((ov.re - x).abs() < 1e-15 && ov.im == 0.0);
        }
        let near = source_state(&cfg(1.0 - 1e-9, 1.0));
        assert!(near.r().norm() < 5e-5);
    }

    #[test]
    fn hamiltonian_matches_projector_sum() {
        for (x, g) in [(0.5, 1.0), (0.3, 2.0), (0.9, 7.5)] {
            let c = cfg(x, g);
            let built = HermitianOperator::projector(&PureState::target())
                + g * HermitianOperator::projector(&source_state(&c));
            let diff = built - hamiltonian(SchemeKind::Mfg, &c);
            assert!(diff.max_entry() < 1e-14);
        }
        assert!((hamiltonian(SchemeKind::Fg, &cfg(0.5, 1.0)).trace() - 2.0).abs() < 1e-15);
        assert_eq!(hamiltonian(SchemeKind::Mfg, &cfg(0.4, 1.0)), hamiltonian(SchemeKind::Fg, &cfg(0.4, 1.0)));
        // FG ignores gamma.
        assert_eq!(hamiltonian(SchemeKind::Fg, &cfg(0.4, 3.0)), hamiltonian(SchemeKind::Fg, &cfg(0.4, 1.0)));
    }

    #[test]
    fn gap_matches_spectrum() {
        let c = cfg(0.5, 2.0);
        let sp = hamiltonian(SchemeKind::Mfg, &c).spectrum();
        assert!((sp.gap() - 3f64.sqrt()).abs() < 1e-14);
        assert!((gap(SchemeKind::Mfg, &c) - sp.gap()).abs() < 1e-14);
        let sp = hamiltonian(SchemeKind::Fg, &c).spectrum();
        assert!((sp.e_minus - 0.5).abs() < 1e-14 && (sp.e_plus - 1.5).abs() < 1e-14);
    }

    #[test]
    fn probability_and_time_examples() {
        let c = cfg(0.5, 2.0);
        for kind in [SchemeKind::Fg, SchemeKind::Mfg] {
            assert!((transition_probability(kind, &c, 0.0) - 0.25).abs() < 1e-15);
        }
        assert!((optimal_time(SchemeKind::Fg, &c) - PI).abs() < 1e-15);
        assert!((transition_probability(SchemeKind::Fg, &c, PI) - 1.0).abs() < 1e-15);
        assert!((max_probability(SchemeKind::Mfg, &c) - 0.75).abs() < 1e-15);
        assert_eq!(max_probability(SchemeKind::Fg, &c), 1.0);
        assert!((max_probability(SchemeKind::Mfg, &cfg(0.5, 1.0)) - 1.0).abs() < 1e-15);
        let t = optimal_time(SchemeKind::Mfg, &c);
        assert!((transition_probability(SchemeKind::Mfg, &c, t) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fg_time_scales_with_sqrt_n() {
        let t = |n: f64| optimal_time(SchemeKind::Fg, &cfg(1.0 / n.sqrt(), 1.0));
        assert!((t(16.0) / t(4.0) - 2.0).abs() < 1e-12);
        assert!((t(64.0) / t(16.0) - 2.0).abs() < 1e-12);
        assert!((t(64.0) - PI / 2.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_one_reduces_to_fg() {
        for k in 1..10 {
            let c = cfg(k as f64 / 10.0, 1.0);
            assert!((optimal_time(SchemeKind::Mfg, &c) - optimal_time(SchemeKind::Fg, &c)).abs() < 1e-12);
            for j in 0..50 {
                let t = 0.2 * j as f64;
                let d = transition_probability(SchemeKind::Mfg, &c, t) - transition_probability(SchemeKind::Fg, &c, t);
                assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monotone_in_gamma() {
        for x in [0.05, 0.3, 0.7] {
            let mut prev_t = f64::INFINITY;
            let mut prev_p = f64::INFINITY;
            for k in 0..40 {
                let c = cfg(x, 1.0 + 0.25 * k as f64);
                let t = optimal_time(SchemeKind::Mfg, &c);
                let p = max_probability(SchemeKind::Mfg, &c);
                assert!(t < prev_t && p < prev_p);
                assert!(t <= optimal_time(SchemeKind::Fg, &c) + 1e-15 && p <= 1.0 + 1e-15);
                prev_t = t;
                prev_p = p;
            }
        }
    }

    #[test]
    fn closed_form_probability_matches_propagation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = SearchConfig::with_units(
                rng.gen_range(0.01..0.99),
                rng.gen_range(1.0..6.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
            )
            .unwrap();
            let t = rng.gen_range(0.0..3.0) * optimal_time(SchemeKind::Fg, &c);
            for kind in [SchemeKind::Fg, SchemeKind::Mfg] {
                let psi = hamiltonian(kind, &c).propagate(&source_state(&c), t, c.hbar());
                let p = PureState::target().inner(&psi).norm_sqr();
                assert!((p - transition_probability(kind, &c, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fg_geometric_state_follows_h_fg() {
        let c = cfg(0.5, 1.0);
        let h = hamiltonian(SchemeKind::Fg, &c);
        let psi0 = fg_geometric_state(&c, 0.0);
        assert!(!psi0.same_ray(&source_state(&c), 1e-3));
        for k in 0..100 {
            let t = 0.05 * k as f64;
            let closed = fg_geometric_state(&c, t);
            assert!((closed.ket().norm() - 1.0).abs() < 1e-12);
            let spectral = h.propagate(&psi0, t, 1.0);
            assert!(closed.ket().max_abs_diff(&spectral.ket()) < 1e-10);
        }
    }

    #[test]
    fn fg_endpoints_orthogonal_at_quarter() {
        let c = cfg(0.25, 1.0);
        let t = optimal_time(SchemeKind::Fg, &c);
        let ov = fg_geometric_state(&c, 0.0).inner(&fg_geometric_state(&c, t));
        assert!(ov.norm() < 1e-10);
    }

    #[test]
    fn ab_examples() {
        let ab = ab_coefficients(&cfg(0.5, 1.0)).unwrap();
        assert!((ab.lam - 0.5).abs() < 1e-15);
        for (x, g) in [(1e-3, 1.0), (0.3, 2.0), (0.7, 9.0)] {
            let c = cfg(x, g);
            let ab = ab_coefficients(&c).unwrap();
            assert!(ab.a <= ab.b);
            let expect = gap(SchemeKind::Mfg, &c) / (x * g * (1.0 - x * x).sqrt());
            assert!(((ab.b - ab.a) - expect).abs() < 1e-12 * expect);
            let half_gap = 0.5 * hamiltonian(SchemeKind::Mfg, &c).spectrum().gap();
            assert!((ab.lam - half_gap).abs() < 1e-12);
        }
        assert!(ab_coefficients(&cfg(1e-7, 2.0)).is_err());
        assert!(ab_coefficients(&cfg(1.0 - 1e-7, 2.0)).is_err());
    }

    #[test]
    fn ab_product_is_minus_one() {
        // (base² − root²) = −4x²E′²(1−x²), so AB = −1 for every γ, not only γ = 1.
        for (x, g) in [(1e-3, 1.0), (0.25, 1.0), (0.3, 2.0), (0.1, 1.5), (0.8, 40.0)] {
            let ab = ab_coefficients(&cfg(x, g)).unwrap();
            assert!((ab.a * ab.b + 1.0).abs() < 1e-9, "x={x} g={g} AB={}", ab.a * ab.b);
        }
    }

    #[test]
    fn mfg_initial_state_examples() {
        for x in [0.05, 0.3, 0.6, 0.95] {
            for g in [1.0, 1.3, 2.0, 10.0] {
                let s = mfg_initial_state(&cfg(x, g)).unwrap();
                assert!((s.ket().norm() - 1.0).abs() < 1e-12);
            }
        }
        let c = cfg(0.25, 1.0);
        assert!(mfg_initial_state(&c).unwrap().same_ray(&fg_geometric_state(&c, 0.0), 1e-10));

        // A + B = 0 at x² = (γ−1)/2γ; the state is the limit |r⟩, continuous in x.
        let c = cfg(0.5, 2.0);
        let ab = ab_coefficients(&c).unwrap();
        assert!((ab.a + ab.b).abs() < 1e-12);
        let s = mfg_initial_state(&c).unwrap();
        assert!(s.same_ray(&PureState::rest(), 1e-12));
        for dx in [1e-7, -1e-7] {
            assert!(mfg_initial_state(&cfg(0.5 + dx, 2.0)).unwrap().same_ray(&s, 1e-6));
        }
        assert!(mfg_geometric_state(&c, 1.0).is_ok());
    }

    #[test]
    fn mfg_geometric_state_follows_h_mfg() {
        let c = cfg(0.3, 2.0);
        let h = hamiltonian(SchemeKind::Mfg, &c);
        let psi0 = mfg_initial_state(&c).unwrap();
        assert!(mfg_geometric_state(&c, 0.0).unwrap().ket().max_abs_diff(&psi0.ket()) < 1e-15);
        let lam = ab_coefficients(&c).unwrap().lam;
        for k in 0..60 {
            let t = 0.1 * k as f64;
            let closed = mfg_geometric_state(&c, t).unwrap();
            assert!((closed.ket().norm() - 1.0).abs() < 1e-10);
            assert!(closed.ket().max_abs_diff(&h.propagate(&psi0, t, 1.0).ket()) < 1e-9);
            // Rabi period of the ray is πħ/λ.
            let later = mfg_geometric_state(&c, t + PI / lam).unwrap();
            assert!(closed.same_ray(&later, 1e-12));
        }
    }

    #[test]
    fn mfg_reduces_to_fg_states_at_gamma_one() {
        for x in [0.1, 0.25, 0.5] {
            let c = cfg(x, 1.0);
            for k in 0..20 {
                let t = 0.3 * k as f64;
                let a = mfg_geometric_state(&c, t).unwrap();
                assert!(a.same_ray(&fg_geometric_state(&c, t), 1e-12));
            }
        }
    }
}
