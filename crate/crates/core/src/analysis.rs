//! Efficiency, uncertainty and geodesicity of the two search evolutions.
//!
//! Definitional quantities are computed from sampled trajectories
//! ([`efficiency_from_definitions`], [`geodesicity_test`]); the published
//! closed forms ([`eta_mfg_closed`], [`delta_mfg_closed`]) are evaluated
//! separately so the two can be compared side by side.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{projective_distance_sq, trajectory_length, wootters_distance, GeodesicArc, Trajectory};
use crate::oracle::{self, D2Sample};
use crate::quadrature::{linspace, simpson};
use crate::search::{self, SchemeKind, SearchConfig};

/// Residual at or below which a trajectory is accepted as a geodesic.
pub const GEODESIC_ACCEPT: f64 = 1e-9;
/// Residual above which a trajectory is rejected as non-geodesic.
pub const GEODESIC_REJECT: f64 = 1e-3;
/// Default number of time samples along a geometric trajectory.
pub const DEFAULT_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EfficiencyReport {
    /// Geodesic distance between the endpoints.
    pub s0: f64,
    /// Length of the actual trajectory.
    pub s: f64,
    pub eta: f64,
    /// `⟨ΔE⟩Δt⊥ / h` with `Δt⊥` the full duration.
    pub delta_over_h: f64,
    /// `|⟨ψ(0)|ψ(t*)⟩|`.
    pub endpoint_overlap: f64,
}

/// `η = s₀/s` and `Δ/h` of a trajectory that carries its generator.
pub fn efficiency_from_definitions(traj: &Trajectory) -> Result<EfficiencyReport> {
    let generator = traj
        .generator()
        .ok_or_else(|| Error::InvalidTrajectory("efficiency needs the generating Hamiltonian".into()))?;
    let spread = traj.dispersions().unwrap_or_default();
    let s = trajectory_length(traj).value;
    if s < 1e-12 {
        return Err(Error::Degenerate(format!("trajectory length {s:e}")));
    }
    let s0 = wootters_distance(traj.first(), traj.last());
    let planck = 2.0 * PI * generator.hbar;
    Ok(EfficiencyReport {
        s0,
        s,
        eta: s0 / s,
        delta_over_h: simpson(traj.times(), &spread) / planck,
        endpoint_overlap: traj.first().inner(traj.last()).norm(),
    })
}

fn mfg_ratio_parts(cfg: &SearchConfig) -> (f64, f64) {
    let e = cfg.energy();
    let ep = cfg.driving_energy(SchemeKind::Mfg);
    let d2 = (ep - e) * (ep - e);
    let mix = 2.0 * cfg.x() * cfg.x() * ep * e;
    // (δ² + 4x²E′E, δ² + 2x²E′E)
    (d2 + 2.0 * mix, d2 + mix)
}

/// Published MFG efficiency `(1/√2)·√[(δ² + 4x²E′E)/(δ² + 2x²E′E)]`, `δ = E′ − E`.
pub fn eta_mfg_closed(cfg: &SearchConfig) -> f64 {
    let (wide, narrow) = mfg_ratio_parts(cfg);
    (wide / (2.0 * narrow)).sqrt()
}

/// Published MFG uncertainty in units of `h`:
/// `(1/2√2)·√[(δ² + 2x²E′E)/(δ² + 4x²E′E)]`.
pub fn delta_mfg_closed(cfg: &SearchConfig) -> f64 {
    let (wide, narrow) = mfg_ratio_parts(cfg);
    0.25 * (2.0 * narrow / wide).sqrt()
}

/// Samples the geometric-analysis state of `kind` over `[0, t*]`, with the
/// scheme's Hamiltonian attached.
pub fn geometric_trajectory(kind: SchemeKind, cfg: &SearchConfig, points: usize) -> Result<Trajectory> {
    let t_star = search::optimal_time(kind, cfg);
    let traj = Trajectory::sample(0.0, t_star, points, |t| search::geometric_state(kind, cfg, t))?;
    Ok(traj.with_generator(search::hamiltonian(kind, cfg), cfg.hbar()))
}

/// `n` with `x = 1/(4n)` to within `1e-9`, if one exists.
pub fn fg_solvable_index(x: f64) -> Option<u64> {
    if !(x > 0.0) {
        return None;
    }
    let n = (1.0 / (4.0 * x)).round();
    (n >= 1.0 && (x - 1.0 / (4.0 * n)).abs() <= 1e-9).then_some(n as u64)
}

/// Published FG reparameterization
/// `λ(t) = [sin²(Et/4ħ) + ½ sin(Et/2ħ)] / [1 + sin(Et/2ħ)]`.
///
/// Only defined on the solvable family `x = 1/(4n)`. It reaches `λ = 1` at
/// `t_FG` only for odd `n`, and zeroes `d²` pointwise only for `n = 1`; see
/// [`ClosedFormMapping`].
pub fn fg_mapping_lambda(cfg: &SearchConfig, t: f64) -> Result<f64> {
    if fg_solvable_index(cfg.x()).is_none() {
        return Err(Error::Domain(format!("x = {} is not of the form 1/(4n)", cfg.x())));
    }
    let t_fg = search::optimal_time(SchemeKind::Fg, cfg);
    if t < -1e-12 * t_fg || t > t_fg * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("t = {t} outside [0, t_FG = {t_fg}]")));
    }
    let u = cfg.energy() * t / cfg.hbar();
    let q = (0.25 * u).sin();
    let h = (0.5 * u).sin();
    Ok((q * q + 0.5 * h) / (1.0 + h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Geodesic,
    NonGeodesic,
    /// Residual between the acceptance and rejection thresholds.
    Indeterminate,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Geodesic => "geodesic",
            Verdict::NonGeodesic => "non-geodesic",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// How the published FG mapping `λ(t)` fares on a solvable scenario.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormMapping {
    pub n: u64,
    /// `λ(t_FG)`: 1 for odd `n`, 0 for even `n`.
    pub lambda_end: f64,
    /// `λ(t_FG) = 1`, i.e. the mapping can certify the arc (odd `n` only).
    pub endpoint_correct: bool,
    /// `sup_t d²(t, λ(t))` with the published mapping.
    pub residual_sup: f64,
    /// Largest `|λ_numeric(t) − λ(t)|` along the grid.
    pub max_lambda_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicityReport {
    pub scheme: SchemeKind,
    pub x: f64,
    pub gamma: f64,
    /// `sup_t min_λ d²(t, λ)`.
    pub residual_sup: f64,
    /// Argmin mapping is non-decreasing with `λ(0) = 0` and `λ(t*) = 1`.
    pub monotone_ok: bool,
    pub lambda_start: f64,
    pub lambda_end: f64,
    pub verdict: Verdict,
    pub endpoint_overlap: f64,
    pub closed_form_mapping: Option<ClosedFormMapping>,
    #[serde(skip)]
    pub profile: Vec<D2Sample>,
}

fn verdict_from(residual_sup: f64, monotone_ok: bool) -> Verdict {
    if residual_sup > GEODESIC_REJECT || (residual_sup <= GEODESIC_ACCEPT && !monotone_ok) {
        Verdict::NonGeodesic
    } else if residual_sup <= GEODESIC_ACCEPT {
        Verdict::Geodesic
    } else {
        Verdict::Indeterminate
    }
}

pub fn geodesicity_test(kind: SchemeKind, cfg: &SearchConfig) -> Result<GeodesicityReport> {
    geodesicity_test_with(kind, cfg, DEFAULT_POINTS, oracle::MIN_LAMBDA_GRID)
}

/// Tests whether the geometric trajectory of `kind` lies on the endpoint arc
/// `ψ_geo(λ)` by minimizing `d²(t, λ)` over `λ` at each of `points` times.
pub fn geodesicity_test_with(
    kind: SchemeKind,
    cfg: &SearchConfig,
    points: usize,
    grid: usize,
) -> Result<GeodesicityReport> {
    let traj = geometric_trajectory(kind, cfg, points)?;
    let arc = GeodesicArc::new(*traj.first(), *traj.last());
    let profile = oracle::min_d2_profile(&traj, &arc, grid)?;
    let residual_sup = profile.iter().map(|p| p.d2_min).fold(0.0, f64::max);
    let lambda_start = profile[0].lambda_min;
    let lambda_end = profile[profile.len() - 1].lambda_min;
    let monotone_ok = profile.windows(2).all(|w| w[1].lambda_min >= w[0].lambda_min - 1e-7)
        && lambda_start.abs() <= 1e-6
        && (lambda_end - 1.0).abs() <= 1e-6;

    let fg_like = kind == SchemeKind::Fg || cfg.gamma() == 1.0;
    let closed_form_mapping = match fg_solvable_index(cfg.x()) {
        Some(n) if fg_like => {
            let fg_cfg = cfg.fg_slice();
            let mut residual = 0.0f64;
            let mut gap = 0.0f64;
            for (p, psi) in profile.iter().zip(traj.states()) {
                let lam = fg_mapping_lambda(&fg_cfg, p.t.min(search::optimal_time(SchemeKind::Fg, &fg_cfg)))?;
                residual =
                    residual.max(projective_distance_sq(psi, &crate::geometry::geodesic_point_lambda(&arc, lam)));
                gap = gap.max((lam - p.lambda_min).abs());
            }
            let t_fg = search::optimal_time(SchemeKind::Fg, &fg_cfg);
            let lambda_end = fg_mapping_lambda(&fg_cfg, t_fg)?;
            Some(ClosedFormMapping {
                n,
                lambda_end,
                endpoint_correct: (lambda_end - 1.0).abs() <= 1e-9,
                residual_sup: residual,
                max_lambda_gap: gap,
            })
        }
        _ => None,
    };

    Ok(GeodesicityReport {
        scheme: kind,
        x: cfg.x(),
        gamma: match kind {
            SchemeKind::Fg => 1.0,
            SchemeKind::Mfg => cfg.gamma(),
        },
        residual_sup,
        monotone_ok,
        lambda_start,
        lambda_end,
        verdict: verdict_from(residual_sup, monotone_ok),
        endpoint_overlap: arc.overlap(),
        closed_form_mapping,
        profile,
    })
}

/// `x²` solving `(γ+1)/√(4x²γ + (γ−1)²) = 4n`, i.e. the MFG geodesic
/// condition, together with its large-`γ` approximation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MfgCondition {
    pub n: u64,
    pub gamma: f64,
    pub x_sq_exact: f64,
    /// `[(1 − 16n²)/64n²]·γ`.
    pub x_sq_large_gamma: f64,
    /// `0 < x² < 1`.
    pub feasible: bool,
}

/// `x²(n, γ) = [(1−16n²)γ² + (2+32n²)γ + (1−16n²)] / (64γn²)`.
pub fn x_sq_condition(n: u64, gamma: f64) -> f64 {
    let n2 = (n * n) as f64;
    let outer = 1.0 - 16.0 * n2;
    (outer * gamma * gamma + (2.0 + 32.0 * n2) * gamma + outer) / (64.0 * gamma * n2)
}

pub fn mfg_condition_gamma_large(cfg: &SearchConfig, n: u64) -> Result<MfgCondition> {
    if n == 0 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    let gamma = cfg.gamma();
    let n2 = (n * n) as f64;
    let x_sq_exact = x_sq_condition(n, gamma);
    Ok(MfgCondition {
        n,
        gamma,
        x_sq_exact,
        x_sq_large_gamma: (1.0 - 16.0 * n2) / (64.0 * n2) * gamma,
        feasible: x_sq_exact > 0.0 && x_sq_exact < 1.0,
    })
}

/// The `γ` interval `(i₋(n), i₊(n))` on which `x²(n, γ) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityWindow {
    pub n: u64,
    #[serde(serialize_with = "ratio_as_f64")]
    pub i_minus: Ratio<i64>,
    #[serde(serialize_with = "ratio_as_f64")]
    pub i_plus: Ratio<i64>,
    /// `i₊ − i₋ = 16n/(16n² − 1)`.
    #[serde(serialize_with = "ratio_as_f64")]
    pub measure: Ratio<i64>,
}

fn ratio_as_f64<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_f64(r))
}

pub fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn feasibility_window(n: u64) -> Result<FeasibilityWindow> {
    if n == 0 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    let n = n as i64;
    let base = 32 * n * n + 2;
    let den = 32 * n * n - 2;
    Ok(FeasibilityWindow {
        n: n as u64,
        i_minus: Ratio::new(base - 16 * n, den),
        i_plus: Ratio::new(base + 16 * n, den),
        measure: Ratio::new(16 * n, 16 * n * n - 1),
    })
}

impl FeasibilityWindow {
    pub fn i_minus_f64(&self) -> f64 {
        ratio_f64(&self.i_minus)
    }

    pub fn i_plus_f64(&self) -> f64 {
        ratio_f64(&self.i_plus)
    }

    pub fn measure_f64(&self) -> f64 {
        ratio_f64(&self.measure)
    }

    pub fn x_sq(&self, gamma: f64) -> f64 {
        x_sq_condition(self.n, gamma)
    }

    /// Open-interval membership.
    pub fn contains(&self, gamma: f64) -> bool {
        gamma > self.i_minus_f64() && gamma < self.i_plus_f64()
    }

    /// `(γ, x²(n, γ))` on `points` evenly spaced values in `[lo, hi]`.
    pub fn samples(&self, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
        linspace(lo, hi, points).into_iter().map(|g| (g, self.x_sq(g))).collect()
    }

    /// Number of grid points where the sign of `x²` disagrees with interval
    /// membership.
    pub fn sign_mismatches(&self, gammas: &[f64]) -> usize {
        gammas.iter().filter(|&&g| (self.x_sq(g) > 0.0) != self.contains(g)).count()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub x: f64,
    pub eta_closed: f64,
    pub delta_over_h_closed: f64,
    pub eta_numeric: Option<f64>,
    pub delta_over_h_numeric: Option<f64>,
}

/// Closed-form `η` and `Δ/h` over the grid, `γ`-major. With `numeric_points`
/// set, also the definitional values from an MFG geometric trajectory of
/// that many samples.
pub fn sweep(gammas: &[f64], xs: &[f64], numeric_points: Option<usize>) -> Result<Vec<SweepRow>> {
    if gammas.is_empty() || xs.is_empty() {
        return Err(Error::Domain("sweep grids must be non-empty".into()));
    }
    let mut rows = Vec::with_capacity(gammas.len() * xs.len());
    for &gamma in gammas {
        for &x in xs {
            let cfg = SearchConfig::new(x, gamma)?;
            let (eta_numeric, delta_over_h_numeric) = match numeric_points {
                Some(points) => {
                    let report = efficiency_from_definitions(&geometric_trajectory(SchemeKind::Mfg, &cfg, points)?)?;
                    (Some(report.eta), Some(report.delta_over_h))
                }
                None => (None, None),
            };
            rows.push(SweepRow {
                gamma,
                x,
                eta_closed: eta_mfg_closed(&cfg),
                delta_over_h_closed: delta_mfg_closed(&cfg),
                eta_numeric,
                delta_over_h_numeric,
            });
        }
    }
    Ok(rows)
}

/// One row of the qualitative comparison table, with the numbers behind it.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub scheme: SchemeKind,
    pub x: f64,
    pub gamma: f64,
    pub motion: Verdict,
    pub residual_sup: f64,
    pub eta_closed: f64,
    pub delta_over_h_closed: f64,
    pub eta_numeric: f64,
    pub delta_over_h_numeric: f64,
    pub uncertainty: &'static str,
    pub efficiency: &'static str,
    /// Whether the computed cells match the expected qualitative entries.
    pub consistent: bool,
}

/// Scenarios behind the table: FG at `x = 1/4`, MFG at `x = 0.3, γ = 2`.
pub const TABLE_FG: (f64, f64) = (0.25, 1.0);
pub const TABLE_MFG: (f64, f64) = (0.3, 2.0);

/// The two-row geodesic / uncertainty / efficiency comparison. Motion comes
/// from [`geodesicity_test`]; the uncertainty and efficiency cells are judged
/// on the closed forms, with the definitional values reported alongside.
pub fn table_one() -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for (kind, (x, gamma)) in [(SchemeKind::Fg, TABLE_FG), (SchemeKind::Mfg, TABLE_MFG)] {
        let cfg = SearchConfig::new(x, gamma)?;
        let geo = geodesicity_test(kind, &cfg)?;
        let eff = efficiency_from_definitions(&geometric_trajectory(kind, &cfg, DEFAULT_POINTS)?)?;
        let closed_cfg = match kind {
            SchemeKind::Fg => cfg.fg_slice(),
            SchemeKind::Mfg => cfg,
        };
        let eta = eta_mfg_closed(&closed_cfg);
        let delta = delta_mfg_closed(&closed_cfg);
        let minimal = (delta - 0.25).abs() <= 1e-9;
        let maximal = (eta - 1.0).abs() <= 1e-9;
        let consistent = match kind {
            SchemeKind::Fg => geo.verdict == Verdict::Geodesic && minimal && maximal,
            SchemeKind::Mfg => geo.verdict == Verdict::NonGeodesic && delta > 0.25 && eta < 1.0,
        };
        rows.push(TableRow {
            scheme: kind,
            x,
            gamma: geo.gamma,
            motion: geo.verdict,
            residual_sup: geo.residual_sup,
            eta_closed: eta,
            delta_over_h_closed: delta,
            eta_numeric: eff.eta,
            delta_over_h_numeric: eff.delta_over_h,
            uncertainty: if minimal {
                "minimal (= h/4)"
            } else if delta > 0.25 {
                "non-minimal (> h/4)"
            } else {
                "below h/4"
            },
            efficiency: if maximal {
                "maximal (= 1)"
            } else if eta < 1.0 {
                "non-maximal (< 1)"
            } else {
                "above 1"
            },
            consistent,
        });
    }
    Ok(rows)
}
