//! Green functions of `C \ E(α, δ)` with pole at infinity.
//!
//! With `ξ(ψ) = α - δ cos ψ` the gap `(a, b)` is swept by `ψ ∈ (0, π)` and
//! the square-root singularities at the gap ends disappear:
//!
//! ```text
//! G(x) = ∫_{φ(x)}^π (ξ - c) / √(1 - ξ²) dψ,   φ(x) = acos((α - x)/δ),
//! c    = α - δ·u/v,   u = ∫_0^π cos ψ / √(1 - ξ²),   v = ∫_0^π 1 / √(1 - ξ²).
//! ```
//!
//! The only remaining difficulty is `1 - ξ²` becoming tiny when the gap
//! approaches `±1`; `1 + ξ` and `1 - ξ` are formed without cancellation and
//! the ψ-range is pre-split geometrically around the near-singular end.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::chebyshev::acosh_accurate;
use crate::interval_sets::GapParams;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::{Error, Result};

/// `∂_α G` is not evaluated closer than this to a gap end.
pub const ENDPOINT_GUARD: f64 = 1e-10;

/// Below this distance of the gap to `±1` the ψ-range is pre-split.
const NEAR_EDGE: f64 = 1e-4;

/// Slack when checking `x ∈ [a, b]`.
const GAP_SLACK: f64 = 1e-14;

/// Green function data at one point of the gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenEval {
    pub g: f64,
    /// `None` within [`ENDPOINT_GUARD`] of a gap end, where it diverges.
    pub dg_dalpha: Option<f64>,
    pub c: f64,
    pub c_dot: f64,
    pub err_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    alpha: f64,
    delta: f64,
    /// `1 + a`
    left: f64,
    /// `1 - b`
    right: f64,
}

impl Geometry {
    fn new(alpha: f64, delta: f64) -> Result<Self> {
        let p = GapParams::new(alpha, delta)?;
        Ok(Geometry { alpha, delta, left: 1.0 + p.a(), right: 1.0 - p.b() })
    }

    fn a(&self) -> f64 {
        self.alpha - self.delta
    }

    fn b(&self) -> f64 {
        self.alpha + self.delta
    }

    fn xi(&self, psi: f64) -> f64 {
        self.alpha - self.delta * psi.cos()
    }

    fn one_plus_xi(&self, psi: f64) -> f64 {
        let s = (0.5 * psi).sin();
        self.left + 2.0 * self.delta * s * s
    }

    fn one_minus_xi(&self, psi: f64) -> f64 {
        let c = (0.5 * psi).cos();
        self.right + 2.0 * self.delta * c * c
    }

    fn one_minus_xi2(&self, psi: f64) -> f64 {
        self.one_plus_xi(psi) * self.one_minus_xi(psi)
    }

    /// Geometric split points `ε·2^k` clustering at ψ = 0 (and mirrored at
    /// π) when the gap nearly touches -1 (or 1).
    fn breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (gap, mirror) in [(self.left, false), (self.right, true)] {
            if gap < NEAR_EDGE {
                let eps = (2.0 * gap / self.delta).sqrt();
                let mut t = eps;
                while t < 0.5 * PI {
                    out.push(if mirror { PI - t } else { t });
                    t *= 2.0;
                }
            }
        }
        out
    }

    /// `φ(x) = acos((α - x)/δ)`, the ψ corresponding to `x`, via the
    /// half-angle form on the nearer gap end so that `φ(a) = 0` and
    /// `φ(b) = π` hold exactly.
    fn phi(&self, x: f64) -> f64 {
        let (a, b) = (self.a(), self.b());
        let two_d = 2.0 * self.delta;
        if x - a <= b - x {
            2.0 * ((x - a) / two_d).max(0.0).sqrt().min(1.0).asin()
        } else {
            PI - 2.0 * ((b - x) / two_d).max(0.0).sqrt().min(1.0).asin()
        }
    }

    fn check_in_gap(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.a(), self.b());
        if !(x >= a - GAP_SLACK && x <= b + GAP_SLACK) {
            return Err(Error::domain(format!("x = {x} lies outside the closed gap [{a}, {b}]")));
        }
        Ok(x.clamp(a, b))
    }
}

/// Precomputed `c(α)` for one two-interval set; `ċ(α)` is computed on
/// first use.
#[derive(Debug)]
pub struct TwoIntervalGreen {
    geo: Geometry,
    q: QuadratureConfig,
    c: f64,
    c_err: f64,
    v: f64,
    c_dot: OnceLock<Result<f64>>,
}

impl TwoIntervalGreen {
    pub fn new(alpha: f64, delta: f64, q: &QuadratureConfig) -> Result<Self> {
        q.validate()?;
        let geo = Geometry::new(alpha, delta)?;
        let br = geo.breaks();
        let u = integrate(|p| p.cos() / geo.one_minus_xi2(p).sqrt(), 0.0, PI, &br, q)?;
        let v = integrate(|p| 1.0 / geo.one_minus_xi2(p).sqrt(), 0.0, PI, &br, q)?;
        let c = alpha - delta * u.value / v.value;
        let (a, b) = (geo.a(), geo.b());
        if !(c > a && c < b) {
            return Err(Error::Internal(format!("critical point {c} escaped the gap ({a}, {b})")));
        }
        let c_err = delta * (u.error + (u.value / v.value).abs() * v.error) / v.value;
        Ok(TwoIntervalGreen { geo, q: *q, c, c_err, v: v.value, c_dot: OnceLock::new() })
    }

    pub fn alpha(&self) -> f64 {
        self.geo.alpha
    }

    pub fn delta(&self) -> f64 {
        self.geo.delta
    }

    pub fn gap(&self) -> (f64, f64) {
        (self.geo.a(), self.geo.b())
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `ċ(α)` from the determinant formula
    /// `ċ = 1 + (I₁ v - I₂ I₃)/v²` with
    /// `I₁ = ∫ ξ/((1-ξ)√(1-ξ²))`, `I₂ = ∫ ξ/(1-ξ²)^{3/2}`,
    /// `I₃ = ∫ √((1+ξ)/(1-ξ))` over `ψ ∈ [0, π]`.
    pub fn c_dot(&self) -> Result<f64> {
        self.c_dot.get_or_init(|| self.compute_c_dot()).clone()
    }

    fn compute_c_dot(&self) -> Result<f64> {
        let g = self.geo;
        let br = g.breaks();
        let q = &self.q;
        let i1 = integrate(|p| g.xi(p) / (g.one_minus_xi(p) * g.one_minus_xi2(p).sqrt()), 0.0, PI, &br, q)?;
        let i2 = integrate(|p| g.xi(p) / g.one_minus_xi2(p).powf(1.5), 0.0, PI, &br, q)?;
        let i3 = integrate(|p| (g.one_plus_xi(p) / g.one_minus_xi(p)).sqrt(), 0.0, PI, &br, q)?;
        let v = self.v;
        let cd = 1.0 + (i1.value * v - i2.value * i3.value) / (v * v);
        let slack = 1e3 * (q.abs_tol + q.rel_tol * cd.abs());
        if !(cd > 1.0 - slack) {
            return Err(Error::Internal(format!("c_dot = {cd} is not above 1 (alpha = {}, delta = {})", g.alpha, g.delta)));
        }
        Ok(cd)
    }

    /// `G_{α,δ}(x)` for `x` in the closed gap, with an error estimate.
    pub fn green_with_error(&self, x: f64) -> Result<(f64, f64)> {
        let g = self.geo;
        let x = g.check_in_gap(x)?;
        let phi = g.phi(x);
        let c = self.c;
        let br = g.breaks();
        // integrate over the shorter side; the full integral vanishes
        let est = if phi < 0.5 * PI {
            integrate(|p| (c - g.xi(p)) / g.one_minus_xi2(p).sqrt(), 0.0, phi, &br, &self.q)?
        } else {
            integrate(|p| (g.xi(p) - c) / g.one_minus_xi2(p).sqrt(), phi, PI, &br, &self.q)?
        };
        // perturbing c by dc changes G by at most dc·v
        Ok((est.value, est.error + self.c_err * self.v))
    }

    pub fn green(&self, x: f64) -> Result<f64> {
        self.green_with_error(x).map(|(g, _)| g)
    }

    /// `∂_α G_{α,δ}(x) = I₁ + I₂ - ċ I₃` with
    /// `I₁ = ∫_φ^π (1 - cξ)/(1-ξ²)^{3/2}`, `I₂ = (x - c)/√((1-x²)(x-a)(b-x))`,
    /// `I₃ = ∫_φ^π 1/√(1-ξ²)`.
    pub fn dalpha(&self, x: f64) -> Result<f64> {
        let g = self.geo;
        let (a, b) = (g.a(), g.b());
        if !(x > a + ENDPOINT_GUARD && x < b - ENDPOINT_GUARD) {
            return Err(Error::domain(format!(
                "d/dalpha G needs x strictly inside ({a}, {b}) by at least {ENDPOINT_GUARD}, got {x}"
            )));
        }
        let cd = self.c_dot()?;
        let c = self.c;
        let phi = g.phi(x);
        let br = g.breaks();
        let i1 = integrate(|p| (1.0 - c * g.xi(p)) / g.one_minus_xi2(p).powf(1.5), phi, PI, &br, &self.q)?;
        let i3 = integrate(|p| 1.0 / g.one_minus_xi2(p).sqrt(), phi, PI, &br, &self.q)?;
        let i2 = (x - c) / ((1.0 - x * x) * (x - a) * (b - x)).sqrt();
        Ok(i1.value + i2 - cd * i3.value)
    }

    pub fn eval(&self, x: f64) -> Result<GreenEval> {
        let (g, err) = self.green_with_error(x)?;
        let (a, b) = self.gap();
        let dg_dalpha = if x > a + ENDPOINT_GUARD && x < b - ENDPOINT_GUARD { Some(self.dalpha(x)?) } else { None };
        Ok(GreenEval { g, dg_dalpha, c: self.c, c_dot: self.c_dot()?, err_estimate: err })
    }
}

/// Critical point `c(α)` of the Green function inside the gap.
pub fn critical_point_c(alpha: f64, delta: f64, q: &QuadratureConfig) -> Result<f64> {
    Ok(TwoIntervalGreen::new(alpha, delta, q)?.c())
}

/// `G_{α,δ}(x)` for `x ∈ [α-δ, α+δ]`.
pub fn green_two_interval(alpha: f64, delta: f64, x: f64, q: &QuadratureConfig) -> Result<f64> {
    TwoIntervalGreen::new(alpha, delta, q)?.green(x)
}

/// `G_δ(x) = acosh((δ - x)/(1 - δ))`, the Green function of `[-1 + 2δ, 1]`,
/// for `x ≤ -1 + 2δ`.
pub fn green_single_interval(delta: f64, x: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    // (δ - x)/(1 - δ) - 1, formed without rounding the band edge
    let excess = ((-1.0 + 2.0 * delta) - x) / (1.0 - delta);
    if !(excess >= -1e-15) {
        return Err(Error::domain(format!("x = {x} lies right of -1 + 2 delta = {}", -1.0 + 2.0 * delta)));
    }
    Ok(acosh_accurate(1.0 + excess.max(0.0)))
}

pub fn c_dot(alpha: f64, delta: f64, q: &QuadratureConfig) -> Result<f64> {
    TwoIntervalGreen::new(alpha, delta, q)?.c_dot()
}

pub fn dalpha_green(alpha: f64, delta: f64, x: f64, q: &QuadratureConfig) -> Result<f64> {
    TwoIntervalGreen::new(alpha, delta, q)?.dalpha(x)
}

pub fn green_eval(alpha: f64, delta: f64, x: f64, q: &QuadratureConfig) -> Result<GreenEval> {
    TwoIntervalGreen::new(alpha, delta, q)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    /// Plain midpoint rule in ψ with the naive `1 - ξ²`; shares nothing with
    /// the adaptive code path.
    fn midpoint(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    fn oracle_c(alpha: f64, delta: f64) -> f64 {
        let xi = |p: f64| alpha - delta * p.cos();
        let u = midpoint(|p| p.cos() / (1.0 - xi(p) * xi(p)).sqrt(), 0.0, PI, 1_000_000);
        let v = midpoint(|p| 1.0 / (1.0 - xi(p) * xi(p)).sqrt(), 0.0, PI, 1_000_000);
        alpha - delta * u / v
    }

    fn oracle_green(alpha: f64, delta: f64, x: f64) -> f64 {
        let c = oracle_c(alpha, delta);
        let xi = |p: f64| alpha - delta * p.cos();
        let phi = ((alpha - x) / delta).acos();
        midpoint(|p| (xi(p) - c) / (1.0 - xi(p) * xi(p)).sqrt(), phi, PI, 1_000_000)
    }

    fn fd_c(alpha: f64, delta: f64, h: f64) -> f64 {
        let hi = critical_point_c(alpha + h, delta, &q()).unwrap();
        let lo = critical_point_c(alpha - h, delta, &q()).unwrap();
        (hi - lo) / (2.0 * h)
    }

    #[test]
    fn symmetric_set_has_centred_critical_point() {
        assert_abs_diff_eq!(critical_point_c(0.0, 0.5, &q()).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn critical_point_matches_midpoint_oracle() {
        let c = critical_point_c(-0.3, 0.4, &q()).unwrap();
        assert!(c > -0.7 && c < 0.1);
        assert_abs_diff_eq!(c, oracle_c(-0.3, 0.4), epsilon = 1e-9);
    }

    #[test]
    fn critical_point_drifts_toward_left_end_near_the_edge() {
        // relative position (c - a)/(b - a) from an independent scipy run:
        // 0.4036, 0.3033, 0.2360, 0.1921, 0.1618, 0.1397 for k = 1..6
        let delta = 0.4;
        let expected = [0.403_611_942_6, 0.303_301_582_9, 0.236_040_512_3, 0.192_074_547_2, 0.161_762_600_6, 0.139_695_063_3];
        let mut prev = f64::INFINITY;
        for (k, want) in (1..=6).zip(expected) {
            let alpha = -1.0 + delta + 10f64.powi(-k);
            let c = critical_point_c(alpha, delta, &q()).unwrap();
            let rel = (c - (alpha - delta)) / (2.0 * delta);
            assert!((rel - want).abs() < 1e-8, "k={k}: {rel} vs {want}");
            assert!(rel < prev);
            // consistent with c_dot > 1: c - a shrinks as alpha decreases
            let fd = fd_c(alpha, delta, 1e-3 * 10f64.powi(-k));
            assert!(fd > 1.0);
            prev = rel;
        }
    }

    #[test]
    fn green_at_symmetric_centre() {
        for delta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let g = green_two_interval(0.0, delta, 0.0, &q()).unwrap();
            assert_abs_diff_eq!(g, 0.5 * ((1.0 + delta) / (1.0 - delta)).ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn green_matches_midpoint_oracle() {
        let g = green_two_interval(-0.3, 0.4, -0.2, &q()).unwrap();
        assert!(g > 0.0);
        assert_abs_diff_eq!(g, oracle_green(-0.3, 0.4, -0.2), epsilon = 1e-9);
    }

    #[test]
    fn green_vanishes_at_gap_ends() {
        for i in 0..10 {
            for delta in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let lo = delta - 1.0;
                let alpha = lo + (0.0 - lo) * (i as f64 + 0.5) / 10.0;
                let gr = TwoIntervalGreen::new(alpha, delta, &q()).unwrap();
                let (a, b) = gr.gap();
                assert!(gr.green(a).unwrap().abs() <= q().abs_tol, "alpha {alpha} delta {delta}");
                assert!(gr.green(b).unwrap().abs() <= q().abs_tol, "alpha {alpha} delta {delta}");
            }
        }
    }

    #[test]
    fn green_rejects_points_outside_gap() {
        assert!(green_two_interval(-0.3, 0.4, 0.2, &q()).unwrap_err().is_domain());
        assert!(green_two_interval(-0.7, 0.4, 0.0, &q()).unwrap_err().is_domain());
    }

    #[test]
    fn single_interval_closed_form() {
        assert_eq!(green_single_interval(0.4, -1.0 + 2.0 * 0.4).unwrap(), 0.0);
        // 3 + 2√2 = (1 + √2)²
        let expected = 2.0 * (1.0 + 2f64.sqrt()).ln();
        assert_abs_diff_eq!(green_single_interval(0.5, -1.0).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 1.76275, epsilon = 1e-5);
        assert!(green_single_interval(0.4, 0.0).unwrap_err().is_domain());
    }

    #[test]
    fn green_approaches_single_interval_monotonically() {
        // the approach is only logarithmic in the distance to -1
        let delta = 0.4;
        let x = -0.5;
        let target = green_single_interval(delta, x).unwrap();
        let mut prev = f64::INFINITY;
        for k in [2, 4, 6, 8, 10] {
            let alpha = -1.0 + delta + 10f64.powi(-k);
            let diff = (green_two_interval(alpha, delta, x, &q()).unwrap() - target).abs();
            assert!(diff < prev, "gap {diff} at 1e-{k} not below {prev}");
            prev = diff;
        }
        assert!(prev < 0.2);
    }

    #[test]
    fn c_dot_matches_finite_differences() {
        assert!((c_dot(-0.3, 0.4, &q()).unwrap() - fd_c(-0.3, 0.4, 1e-5)).abs() <= 1e-6);
        for (i, delta) in [0.2, 0.35, 0.5, 0.65].into_iter().enumerate() {
            for j in 0..5 {
                let lo = delta - 1.0;
                let alpha = lo + (0.0 - lo) * (0.15 + 0.17 * j as f64) + 0.01 * i as f64;
                let cd = c_dot(alpha, delta, &q()).unwrap();
                let fd = fd_c(alpha, delta, 1e-5);
                assert!((cd - fd).abs() <= 1e-6, "alpha {alpha} delta {delta}: {cd} vs {fd}");
            }
        }
    }

    #[test]
    fn c_dot_exceeds_one() {
        assert!(c_dot(0.0, 0.5, &q()).unwrap() > 1.0);
    }

    #[test]
    fn c_dot_blows_up_at_the_expected_rate() {
        let delta = 0.4;
        for eps in [1e-1, 10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3] {
            let alpha = -1.0 + delta * (1.0 + 0.5 * eps * eps);
            let ratio = c_dot(alpha, delta, &q()).unwrap() * (eps * eps.ln()).powi(2);
            assert!((0.05..=20.0).contains(&ratio), "eps {eps}: ratio {ratio}");
        }
    }

    #[test]
    fn dalpha_vanishes_at_symmetric_centre() {
        for delta in [0.2, 0.5, 0.8] {
            assert_abs_diff_eq!(dalpha_green(0.0, delta, 0.0, &q()).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn dalpha_diverges_at_left_end() {
        let v = dalpha_green(-0.3, 0.4, -0.7 + 1e-8, &q()).unwrap();
        assert!(v < -1e3, "{v}");
        assert!(dalpha_green(-0.3, 0.4, -0.7, &q()).unwrap_err().is_domain());
    }

    #[test]
    fn dalpha_matches_finite_differences() {
        let h = 1e-5;
        for (alpha, delta, x) in [(-0.3, 0.4, -0.3), (-0.3, 0.4, -0.55), (-0.1, 0.25, 0.05), (-0.5, 0.45, -0.3)] {
            let an = dalpha_green(alpha, delta, x, &q()).unwrap();
            let fd = (green_two_interval(alpha + h, delta, x, &q()).unwrap()
                - green_two_interval(alpha - h, delta, x, &q()).unwrap())
                / (2.0 * h);
            assert!((an - fd).abs() <= 1e-6, "({alpha}, {delta}, {x}): {an} vs {fd}");
        }
    }

    #[test]
    fn dalpha_increases_across_the_gap() {
        for delta in [0.2, 0.4, 0.6] {
            for alpha in [delta - 1.0 + 0.05, 0.5 * (delta - 1.0), -0.02] {
                let gr = TwoIntervalGreen::new(alpha, delta, &q()).unwrap();
                let (a, b) = gr.gap();
                let vals: Vec<f64> = (1..=100)
                    .map(|i| gr.dalpha(a + (b - a) * i as f64 / 101.0).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] > w[0]), "alpha {alpha} delta {delta}");
                assert!(vals[0] < 0.0 && vals[99] > 0.0);
            }
        }
    }

    #[test]
    fn eval_bundles_everything() {
        let e = green_eval(-0.3, 0.4, -0.2, &q()).unwrap();
        assert!(e.g >= -e.err_estimate);
        assert!(e.c > -0.7 && e.c < 0.1);
        assert!(e.c_dot > 1.0);
        assert!(e.dg_dalpha.is_some());
        let edge = green_eval(-0.3, 0.4, -0.3 + 0.4, &q()).unwrap();
        assert!(edge.dg_dalpha.is_none());
        assert!(edge.g.abs() < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetric_set_green_is_even(delta in 0.05f64..0.95, t in 0.0f64..1.0) {
            let x = delta * t;
            let gr = TwoIntervalGreen::new(0.0, delta, &q()).unwrap();
            prop_assert!((gr.green(x).unwrap() - gr.green(-x).unwrap()).abs() <= 1e-10);
        }

        #[test]
        fn green_is_nonnegative(delta in 0.05f64..0.95, s in 0.001f64..0.999, t in 0.0f64..1.0) {
            let alpha = (delta - 1.0) * s;
            let gr = TwoIntervalGreen::new(alpha, delta, &q()).unwrap();
            let (a, b) = gr.gap();
            let (g, err) = gr.green_with_error(a + (b - a) * t).unwrap();
            prop_assert!(g >= -err.max(1e-13));
        }
    }
}
