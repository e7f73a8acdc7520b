//! Two-level complex linear algebra in the `{|w⟩, |r⟩}` basis.
//!
//! Everything here is a small `Copy` value type. States are unit vectors
//! compared only up to a global phase; operators are 2×2 Hermitian matrices
//! stored by their three independent entries.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Unnormalized vector in the two-dimensional search subspace.
///
/// Used for tangent vectors and intermediate linear combinations; physical
/// states are [`PureState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ket(pub [Complex64; 2]);

impl Ket {
    pub const fn new(w: Complex64, r: Complex64) -> Self {
        Ket([w, r])
    }

    pub fn real(w: f64, r: f64) -> Self {
        Ket([Complex64::new(w, 0.0), Complex64::new(r, 0.0)])
    }

    pub fn zero() -> Self {
        Ket([ZERO, ZERO])
    }

    pub fn w(&self) -> Complex64 {
        self.0[0]
    }

    pub fn r(&self) -> Complex64 {
        self.0[1]
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest component-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        (self.0[0] - other.0[0]).norm().max((self.0[1] - other.0[1]).norm())
    }
}

impl Add for Ket {
    type Output = Ket;
    fn add(self, rhs: Ket) -> Ket {
        Ket([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Ket {
    type Output = Ket;
    fn sub(self, rhs: Ket) -> Ket {
        Ket([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for Ket {
    type Output = Ket;
    fn neg(self) -> Ket {
        Ket([-self.0[0], -self.0[1]])
    }
}

impl Mul<Ket> for f64 {
    type Output = Ket;
    fn mul(self, rhs: Ket) -> Ket {
        Ket([rhs.0[0] * self, rhs.0[1] * self])
    }
}

impl Mul<Ket> for Complex64 {
    type Output = Ket;
    fn mul(self, rhs: Ket) -> Ket {
        Ket([rhs.0[0] * self, rhs.0[1] * self])
    }
}

/// Normalized state `a_w|w⟩ + a_r|r⟩`.
///
/// There is deliberately no `PartialEq`: two states describe the same
/// physical ray when [`PureState::same_ray`] says so.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(into = "Ket", try_from = "Ket")]
pub struct PureState(Ket);

impl PureState {
    /// Normalizes `(w, r)`; fails only on the zero vector.
    pub fn new(w: Complex64, r: Complex64) -> Result<Self> {
        Self::from_ket(Ket::new(w, r))
    }

    pub fn real(w: f64, r: f64) -> Result<Self> {
        Self::from_ket(Ket::real(w, r))
    }

    pub fn from_ket(ket: Ket) -> Result<Self> {
        let n = ket.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(PureState((1.0 / n) * ket))
    }

    /// Renormalizes a vector that is already unit length up to round-off.
    pub(crate) fn from_unit(ket: Ket) -> Self {
        PureState((1.0 / ket.norm()) * ket)
    }

    /// The marked state `|w⟩`.
    pub fn target() -> Self {
        PureState(Ket([ONE, ZERO]))
    }

    /// The orthogonal complement `|r⟩` of `|w⟩` inside the search plane.
    pub fn rest() -> Self {
        PureState(Ket([ZERO, ONE]))
    }

    pub fn ket(&self) -> Ket {
        self.0
    }

    pub fn w(&self) -> Complex64 {
        self.0 .0[0]
    }

    pub fn r(&self) -> Complex64 {
        self.0 .0[1]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.0.inner(&other.0)
    }

    /// `1 - |⟨self|other⟩|²`, evaluated as `|a_w b_r - a_r b_w|²`.
    ///
    /// For unit vectors in two dimensions the two expressions agree exactly
    /// (Lagrange identity), but this one keeps full relative precision when
    /// the states are close.
    pub fn infidelity(&self, other: &PureState) -> f64 {
        let cross = self.w() * other.r() - self.r() * other.w();
        cross.norm_sqr().min(1.0)
    }

    /// Multiplies by the global phase `e^{iβ}`.
    pub fn with_phase(&self, beta: f64) -> PureState {
        PureState(Complex64::from_polar(1.0, beta) * self.0)
    }

    /// Equality as rays: `1 - |⟨a|b⟩|² ≤ tol`.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.infidelity(other) <= tol
    }

    /// Rotates the global phase so that the first non-negligible amplitude is
    /// real and non-negative. Useful for printing and for component-wise
    /// comparison of states that should agree up to phase.
    pub fn phase_fixed(&self) -> PureState {
        let pivot = if self.w().norm() >= self.r().norm() { self.w() } else { self.r() };
        if pivot.norm() == 0.0 {
            return *self;
        }
        PureState((pivot.conj() / pivot.norm()) * self.0)
    }
}

impl From<PureState> for Ket {
    fn from(s: PureState) -> Ket {
        s.0
    }
}

impl TryFrom<Ket> for PureState {
    type Error = Error;
    fn try_from(k: Ket) -> Result<Self> {
        PureState::from_ket(k)
    }
}

/// 2×2 Hermitian operator in the `{|w⟩, |r⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianOperator {
    ww: f64,
    rr: f64,
    wr: Complex64,
}

impl HermitianOperator {
    pub fn new(ww: f64, rr: f64, wr: Complex64) -> Self {
        HermitianOperator { ww, rr, wr }
    }

    pub fn diag(ww: f64, rr: f64) -> Self {
        Self::new(ww, rr, ZERO)
    }

    pub fn scaled_identity(c: f64) -> Self {
        Self::diag(c, c)
    }

    pub fn zero() -> Self {
        Self::diag(0.0, 0.0)
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &PureState) -> Self {
        let (w, r) = (psi.w(), psi.r());
        Self::new(w.norm_sqr(), r.norm_sqr(), w * r.conj())
    }

    pub fn ww(&self) -> f64 {
        self.ww
    }

    pub fn rr(&self) -> f64 {
        self.rr
    }

    /// The `⟨w|H|r⟩` entry; `⟨r|H|w⟩` is its conjugate.
    pub fn wr(&self) -> Complex64 {
        self.wr
    }

    pub fn trace(&self) -> f64 {
        self.ww + self.rr
    }

    /// Largest modulus of the three independent entries.
    pub fn max_entry(&self) -> f64 {
        self.ww.abs().max(self.rr.abs()).max(self.wr.norm())
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let [w, r] = v.0;
        Ket([self.ww * w + self.wr * r, self.wr.conj() * w + self.rr * r])
    }

    /// `⟨ψ|H|ψ⟩`. Hermiticity makes the imaginary part vanish identically,
    /// so only the real combination is formed.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let (w, r) = (psi.w(), psi.r());
        self.ww * w.norm_sqr() + self.rr * r.norm_sqr() + 2.0 * (w.conj() * self.wr * r).re
    }

    /// Energy spread `ΔE = √(⟨H²⟩ − ⟨H⟩²)`.
    ///
    /// Computed as `‖(H − ⟨H⟩)ψ‖`, which equals the textbook radicand for
    /// unit `ψ` but cannot go negative and does not cancel catastrophically
    /// when `ΔE ≪ ‖H‖`.
    pub fn dispersion(&self, psi: &PureState) -> f64 {
        let mean = self.expectation(psi);
        let centered = self.apply(&psi.ket()) - mean * psi.ket();
        centered.norm()
    }

    /// Eigen-decomposition with `e_minus ≤ e_plus`.
    pub fn spectrum(&self) -> Spectrum2 {
        let mean = 0.5 * (self.ww + self.rr);
        let half_split = 0.5 * (self.ww - self.rr);
        let radius = half_split.hypot(self.wr.norm());
        let e_minus = mean - radius;
        let e_plus = mean + radius;
        let scale = e_minus.abs().max(e_plus.abs());
        if 2.0 * radius <= 1e-14 * scale || radius == 0.0 {
            return Spectrum2 { e_minus, e_plus, v_minus: PureState::target(), v_plus: PureState::rest() };
        }
        let b = self.wr;
        let (plus, minus) = if half_split >= 0.0 {
            (
                Ket::new(Complex64::from(radius + half_split), b.conj()),
                Ket::new(b, Complex64::from(-(radius + half_split))),
            )
        } else {
            (
                Ket::new(b, Complex64::from(radius - half_split)),
                Ket::new(Complex64::from(half_split - radius), b.conj()),
            )
        };
        Spectrum2 { e_minus, e_plus, v_minus: PureState::from_unit(minus), v_plus: PureState::from_unit(plus) }
    }

    /// `exp(−iHt/ħ) ψ0`, assembled from the spectral decomposition.
    pub fn propagate(&self, psi0: &PureState, t: f64, hbar: f64) -> PureState {
        let spec = self.spectrum();
        let mut out = Ket::zero();
        for (e, v) in [(spec.e_minus, spec.v_minus), (spec.e_plus, spec.v_plus)] {
            let amp = v.inner(psi0) * Complex64::from_polar(1.0, -e * t / hbar);
            out = out + amp * v.ket();
        }
        PureState::from_unit(out)
    }
}

impl Add for HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.ww + rhs.ww, self.rr + rhs.rr, self.wr + rhs.wr)
    }
}

impl Sub for HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.ww - rhs.ww, self.rr - rhs.rr, self.wr - rhs.wr)
    }
}

impl Mul<HermitianOperator> for f64 {
    type Output = HermitianOperator;
    fn mul(self, rhs: HermitianOperator) -> HermitianOperator {
        HermitianOperator::new(self * rhs.ww, self * rhs.rr, self * rhs.wr)
    }
}

/// Eigenpairs of a [`HermitianOperator`].
#[derive(Debug, Clone, Copy)]
pub struct Spectrum2 {
    pub e_minus: f64,
    pub e_plus: f64,
    pub v_minus: PureState,
    pub v_plus: PureState,
}

impl Spectrum2 {
    pub fn gap(&self) -> f64 {
        self.e_plus - self.e_minus
    }

    /// `e₋P₋ + e₊P₊`.
    pub fn reconstruct(&self) -> HermitianOperator {
        self.e_minus * HermitianOperator::projector(&self.v_minus)
            + self.e_plus * HermitianOperator::projector(&self.v_plus)
    }

    /// `(v₊ + v₋)/√2`, the state of maximal energy spread.
    pub fn equal_superposition(&self) -> PureState {
        PureState::from_unit(std::f64::consts::FRAC_1_SQRT_2 * (self.v_plus.ket() + self.v_minus.ket()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Plain matrix-vector arithmetic, written out independently of `apply`.
    fn brute_expect(h: &HermitianOperator, psi: &PureState) -> (f64, f64) {
        let m = [[c(h.ww(), 0.0), h.wr()], [h.wr().conj(), c(h.rr(), 0.0)]];
        let v = [psi.w(), psi.r()];
        let hv = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
        let h2v = [m[0][0] * hv[0] + m[0][1] * hv[1], m[1][0] * hv[0] + m[1][1] * hv[1]];
        let e1 = (v[0].conj() * hv[0] + v[1].conj() * hv[1]).re;
        let e2 = (v[0].conj() * h2v[0] + v[1].conj() * h2v[1]).re;
        (e1, e2)
    }

    fn source(x: f64) -> PureState {
        PureState::real(x, (1.0 - x * x).sqrt()).unwrap()
    }

    fn h_fg(x: f64, e: f64) -> HermitianOperator {
        e * HermitianOperator::projector(&PureState::target()) + e * HermitianOperator::projector(&source(x))
    }

    #[test]
    fn inner_basics() {
        let w = PureState::target();
        let r = PureState::rest();
        assert_eq!(w.inner(&w), ONE);
        assert_eq!(w.inner(&r), ZERO);
        assert!((w.inner(&source(0.5)) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(PureState::real(0.0, 0.0).unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn expectation_examples() {
        let h = h_fg(0.5, 1.0);
        let s = source(0.5);
        assert!((h.expectation(&s) - 1.25).abs() < 1e-14);
        assert!((h.expectation(&s) - brute_expect(&h, &s).0).abs() < 1e-14);

        let psi = PureState::new(c(0.3, -0.2), c(-0.5, 0.7)).unwrap();
        assert!((HermitianOperator::scaled_identity(2.5).expectation(&psi) - 2.5).abs() < 1e-14);

        let spec = h.spectrum();
        assert!((h.expectation(&spec.v_plus) - spec.e_plus).abs() < 1e-14);
    }

    #[test]
    fn dispersion_examples() {
        let h = h_fg(0.5, 1.0);
        let spec = h.spectrum();
        assert!(h.dispersion(&spec.v_plus) < 1e-14);
        assert!(h.dispersion(&spec.v_minus) < 1e-14);
        assert!((h.dispersion(&spec.equal_superposition()) - 0.5 * spec.gap()).abs() < 1e-14);

        let s = source(0.5);
        let (e1, e2) = brute_expect(&h, &s);
        let brute = (e2 - e1 * e1).sqrt();
        assert!((brute - 0.5 * (0.75f64).sqrt()).abs() < 1e-14);
        assert!((h.dispersion(&s) - brute).abs() < 1e-14);
    }

    #[test]
    fn spectrum_examples() {
        let sp = HermitianOperator::diag(3.0, 1.0).spectrum();
        assert_eq!((sp.e_minus, sp.e_plus), (1.0, 3.0));
        assert!(sp.v_plus.same_ray(&PureState::target(), 1e-15));
        assert!(sp.v_minus.same_ray(&PureState::rest(), 1e-15));

        let sp = HermitianOperator::diag(1.0, 3.0).spectrum();
        assert!(sp.v_minus.same_ray(&PureState::target(), 1e-15));

        // Characteristic polynomial of H_FG at x = 1/2: λ² − 2λ + 3/4.
        let sp = h_fg(0.5, 1.0).spectrum();
        assert!((sp.e_minus - 0.5).abs() < 1e-14);
        assert!((sp.e_plus - 1.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum_uses_canonical_basis() {
        let sp = HermitianOperator::scaled_identity(2.0).spectrum();
        assert_eq!(sp.gap(), 0.0);
        assert!(sp.v_minus.same_ray(&PureState::target(), 0.0));
        let psi = PureState::new(c(0.6, 0.1), c(0.2, -0.3)).unwrap();
        let out = HermitianOperator::scaled_identity(2.0).propagate(&psi, 1.3, 1.0);
        assert!(out.same_ray(&psi, 1e-15));
    }

    #[test]
    fn propagate_identity_at_zero_and_fg_target() {
        let h = h_fg(0.5, 1.0);
        let s = source(0.5);
        assert!(h.propagate(&s, 0.0, 1.0).ket().max_abs_diff(&s.ket()) < 1e-15);
        let t_fg = std::f64::consts::PI / (2.0 * 0.5);
        let p = PureState::target().inner(&h.propagate(&s, t_fg, 1.0)).norm_sqr();
        assert!((p - 1.0).abs() < 1e-13);
    }

    fn arb_op() -> impl Strategy<Value = HermitianOperator> {
        (-3.0..3.0f64, -3.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(a, d, br, bi)| HermitianOperator::new(a, d, c(br, bi)))
    }

    fn arb_state() -> impl Strategy<Value = PureState> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, cc, d)| a * a + b * b + cc * cc + d * d > 1e-3)
            .prop_map(|(a, b, cc, d)| PureState::new(c(a, b), c(cc, d)).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn propagator_is_unitary(h in arb_op(), a in arb_state(), b in arb_state(), t in -5.0..5.0f64) {
            let before = a.inner(&b);
            let after = h.propagate(&a, t, 1.0).inner(&h.propagate(&b, t, 1.0));
            prop_assert!((before - after).norm() < 1e-10);
            prop_assert!((h.propagate(&a, t, 1.0).ket().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn group_property(h in arb_op(), a in arb_state(), t1 in -3.0..3.0f64, t2 in -3.0..3.0f64) {
            let direct = h.propagate(&a, t1 + t2, 0.7);
            let stepped = h.propagate(&h.propagate(&a, t1, 0.7), t2, 0.7);
            prop_assert!(direct.ket().max_abs_diff(&stepped.ket()) < 1e-10);
        }

        #[test]
        fn spectral_reconstruction(h in arb_op()) {
            let sp = h.spectrum();
            prop_assert!(sp.e_minus <= sp.e_plus);
            prop_assert!((sp.reconstruct() - h).max_entry() < 1e-12 * h.max_entry().max(1.0));
            prop_assert!(sp.v_minus.inner(&sp.v_plus).norm() < 1e-12);
            for (e, v) in [(sp.e_minus, sp.v_minus), (sp.e_plus, sp.v_plus)] {
                let resid = h.apply(&v.ket()) - e * v.ket();
                prop_assert!(resid.norm() <= 1e-10 * h.max_entry().max(1e-300));
            }
        }

        #[test]
        fn dispersion_conserved_under_own_evolution(h in arb_op(), a in arb_state()) {
            let d0 = h.dispersion(&a);
            for k in 0..100 {
                let t = 0.1 * k as f64;
                prop_assert!((h.dispersion(&h.propagate(&a, t, 1.0)) - d0).abs() < 1e-10);
            }
        }

        #[test]
        fn inner_conjugate_symmetric(a in arb_state(), b in arb_state()) {
            prop_assert!((a.inner(&b) - b.inner(&a).conj()).norm() < 1e-15);
            prop_assert!(a.inner(&b).norm() <= 1.0 + 1e-12);
            prop_assert!((1.0 - a.inner(&b).norm_sqr() - a.infidelity(&b)).abs() < 1e-12);
        }

        #[test]
        fn global_phase_is_invisible(a in arb_state(), beta in -10.0..10.0f64) {
            prop_assert!(a.infidelity(&a.with_phase(beta)) < 1e-12);
            prop_assert!(a.same_ray(&a.with_phase(beta), 1e-12));
        }
    }
}
