//! Adaptive Gauss–Legendre quadrature with panel bisection.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub base_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-11, rel_tol: 1e-11, max_depth: 30, base_nodes: 32 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_depth < 1 {
            return Err(Error::domain("quadrature max_depth must be at least 1"));
        }
        if self.base_nodes < 4 {
            return Err(Error::domain("quadrature base_nodes must be at least 4"));
        }
        Ok(())
    }
}

/// Integral value with an error estimate (sum of accepted panel discrepancies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> GaussRule {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    fn apply<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(mid + half * t)).sum();
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, lazily built Gauss–Legendre rule with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().expect("rule cache poisoned").get(&n) {
        return Arc::clone(rule);
    }
    let mut w = cache.write().expect("rule cache poisoned");
    Arc::clone(w.entry(n).or_insert_with(|| Arc::new(GaussRule::compute(n))))
}

/// Integrates `f` over `[lo, hi]`, first splitting at `breaks` (points
/// outside the open range are ignored), then bisecting panels until the
/// one-panel and two-panel estimates agree to
/// `max(abs_tol·len/total, rel_tol·|panel|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Estimate> {
    if hi == lo {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if hi < lo {
        let e = integrate(f, hi, lo, breaks, cfg)?;
        return Ok(Estimate { value: -e.value, error: e.error });
    }
    let rule = gauss_legendre(cfg.base_nodes);
    let total = hi - lo;

    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(hi);
    edges.dedup();

    let mut value = 0.0;
    let mut error = 0.0;
    let mut stack: Vec<(f64, f64, f64, u32)> = edges
        .windows(2)
        .map(|w| (w[0], w[1], rule.apply(&f, w[0], w[1]), 0))
        .collect();
    stack.reverse();

    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = rule.apply(&f, a, m);
        let right = rule.apply(&f, m, b);
        let split = left + right;
        let diff = (split - whole).abs();
        let tol = (cfg.abs_tol * (b - a) / total).max(cfg.rel_tol * split.abs());
        if diff <= tol || m <= a || m >= b {
            value += split;
            error += diff;
            continue;
        }
        if !split.is_finite() || depth + 1 >= cfg.max_depth {
            return Err(Error::Quadrature { lo: a, hi: b, estimate: value + split, error: error + diff });
        }
        stack.push((m, b, right, depth + 1));
        stack.push((a, m, left, depth + 1));
    }
    Ok(Estimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [4, 7, 32] {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-14);
            // degree 2n-1 monomial integrates to 2/(2n) when even power
            let k = 2 * n - 2;
            let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert_abs_diff_eq!(s, 2.0 / (k as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn smooth_integrals() {
        let cfg = QuadratureConfig::default();
        let e = integrate(f64::sin, 0.0, PI, &[], &cfg).unwrap();
        assert_abs_diff_eq!(e.value, 2.0, epsilon = 1e-13);
        // ∫_0^π dψ / sqrt(1 - (0.3 cos ψ)^2) = 2 K(0.09)
        let e = integrate(|p: f64| 1.0 / (1.0 - (0.3 * p.cos()).powi(2)).sqrt(), 0.0, PI, &[], &cfg).unwrap();
        assert_abs_diff_eq!(e.value, 2.0 * 1.6080486199305128, epsilon = 1e-12);
    }

    #[test]
    fn peaked_integrand_with_breaks() {
        let cfg = QuadratureConfig::default();
        let eps: f64 = 1e-5;
        // ∫_0^1 dψ/(ψ²+ε²) = atan(1/ε)/ε
        let breaks: Vec<f64> = (0..30).map(|k| eps * 2f64.powi(k)).collect();
        let e = integrate(|p| 1.0 / (p * p + eps * eps), 0.0, 1.0, &breaks, &cfg).unwrap();
        let exact = (1.0 / eps).atan() / eps;
        assert!((e.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let cfg = QuadratureConfig::default();
        let e = integrate(|x| x * x, 1.0, 0.0, &[], &cfg).unwrap();
        assert_abs_diff_eq!(e.value, -1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn non_integrable_singularity_reports_failure() {
        let cfg = QuadratureConfig { max_depth: 8, ..Default::default() };
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, &[], &cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig { base_nodes: 3, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { abs_tol: 0.0, ..Default::default() }.validate().is_err());
    }
}
