//! Chebyshev polynomials of the first kind and the closed-form extremal
//! polynomials built from them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `|x| - 1` below this is treated as `|x| = 1`.
const UNIT_GUARD: f64 = 1e-15;

/// `acosh(x)` for `x ≥ 1`, accurate near 1 where `x*x - 1` cancels.
pub(crate) fn acosh_accurate(x: f64) -> f64 {
    let d = x - 1.0;
    if d < 0.5 {
        (d + (d * (2.0 + d)).sqrt()).ln_1p()
    } else {
        x.acosh()
    }
}

/// `T_n(x)`, evaluated as `cos(n·acos x)` on `[-1, 1]` and
/// `±cosh(n·acosh|x|)` outside.
pub fn cheb_t(n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 1.0 + UNIT_GUARD {
        (f64::from(n) * ax.min(1.0).acos()).cos()
    } else {
        (f64::from(n) * acosh_accurate(ax)).cosh()
    };
    if x.is_sign_negative() && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `ln T_n(x)` for `x ≥ 1`; finite where `T_n` itself overflows.
pub fn ln_cheb_t(n: u32, x: f64) -> Result<f64> {
    if x < 1.0 - UNIT_GUARD {
        return Err(Error::domain(format!("ln_cheb_t needs x >= 1, got {x}")));
    }
    let theta = f64::from(n) * acosh_accurate(x.max(1.0));
    // cosh t = e^t (1 + e^{-2t}) / 2
    Ok(theta + (-2.0 * theta).exp().ln_1p() - std::f64::consts::LN_2)
}

/// Remez polynomial `R_{n,δ}(x) = T_n((δ - x)/(1 - δ))`, the Chebyshev
/// polynomial of `[-1 + 2δ, 1]`.
pub fn remez_poly_value(n: u32, delta: f64, x: f64) -> f64 {
    cheb_t(n, remez_argument(delta, x))
}

pub(crate) fn remez_argument(delta: f64, x: f64) -> f64 {
    (delta - x) / (1.0 - delta)
}

/// Even Akhiezer polynomial `A_{2m,δ}(x) = T_m((1 + δ² - 2x²)/(1 - δ²))`
/// of `[-1, -δ] ∪ [δ, 1]`.
pub fn akhiezer_even_value(m: u32, delta: f64, x: f64) -> f64 {
    let d2 = delta * delta;
    cheb_t(m, (1.0 + d2 - 2.0 * x * x) / (1.0 - d2))
}

/// Remez constant `T_n((1 + δ)/(1 - δ))`.
pub fn remez_constant(n: u32, delta: f64) -> f64 {
    cheb_t(n, (1.0 + delta) / (1.0 - delta))
}

/// Polynomial in the Chebyshev basis, `Σ coeffs[k]·T_k(x)`.
///
/// The degree is fixed at construction; trailing zeros are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChebPolyRepr", into = "ChebPolyRepr")]
pub struct ChebPoly {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChebPolyRepr {
    degree: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<ChebPolyRepr> for ChebPoly {
    type Error = Error;

    fn try_from(r: ChebPolyRepr) -> Result<Self> {
        if r.coeffs.len() != r.degree + 1 {
            return Err(Error::domain(format!(
                "degree {} needs {} coefficients, got {}",
                r.degree,
                r.degree + 1,
                r.coeffs.len()
            )));
        }
        ChebPoly::new(r.coeffs)
    }
}

impl From<ChebPoly> for ChebPolyRepr {
    fn from(p: ChebPoly) -> Self {
        ChebPolyRepr { degree: p.degree(), coeffs: p.coeffs }
    }
}

impl ChebPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a Chebyshev series needs at least one coefficient"));
        }
        Ok(ChebPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// True when the leading coefficient is negligible against the rest,
    /// i.e. the polynomial has dropped a degree.
    pub fn is_degree_deficient(&self, rel_tol: f64) -> bool {
        let norm = self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.degree() > 0 && self.coeffs[self.degree()].abs() < rel_tol * norm
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        eval(self, x)
    }

    /// Chebyshev coefficients of the derivative.
    pub fn derivative(&self) -> ChebPoly {
        let n = self.degree();
        if n == 0 {
            return ChebPoly { coeffs: vec![0.0] };
        }
        // c'_{k-1} = c'_{k+1} + 2k c_k, with c'_0 halved at the end.
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            d[k - 1] = d.get(k + 1).copied().unwrap_or(0.0) + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        ChebPoly { coeffs: d }
    }
}

/// `Σ coeffs[k]·T_k(x)` by the Clenshaw backward recurrence.
pub fn eval(p: &ChebPoly, x: f64) -> f64 {
    let c = &p.coeffs;
    if c.len() == 1 {
        return c[0];
    }
    let two_x = 2.0 * x;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c[1..].iter().rev() {
        let b0 = two_x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};
    use proptest::prelude::*;

    /// Exact `T_n(x)` for the rational value of a double `x`.
    fn cheb_exact(n: u32, x: f64) -> f64 {
        let x = BigRational::from_float(x).unwrap();
        exact_recurrence(n, &x).to_f64().unwrap()
    }

    fn exact_recurrence(n: u32, x: &BigRational) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        let (mut prev, mut cur) = (BigRational::one(), x.clone());
        if n == 0 {
            return prev;
        }
        for _ in 1..n {
            let next = &two * x * &cur - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(cheb_t(2, 2.0), 7.0, max_relative = 1e-15);
        assert_relative_eq!(cheb_t(5, 1.0), 1.0, max_relative = 1e-15);

        let five_thirds = BigRational::new(BigInt::from(5), BigInt::from(3));
        let exact = exact_recurrence(3, &five_thirds);
        // 4(5/3)³ - 3(5/3) = 365/27 = 13.5185...
        assert_eq!(exact, BigRational::new(BigInt::from(365), BigInt::from(27)));
        assert_relative_eq!(cheb_t(3, 5.0 / 3.0), exact.to_f64().unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn remez_and_akhiezer_values() {
        for n in [1, 4, 9] {
            assert_abs_diff_eq!(remez_poly_value(n, 0.5, 0.0), 1.0, epsilon = 1e-14);
            assert_relative_eq!(remez_poly_value(n, 0.3, -1.0), cheb_t(n, 1.3 / 0.7), max_relative = 1e-14);
            assert_abs_diff_eq!(remez_poly_value(n, 0.3, -1.0 + 0.6), 1.0, epsilon = 1e-12);
        }
        for m in [1, 3, 6] {
            assert_relative_eq!(akhiezer_even_value(m, 0.5, 0.0), cheb_t(m, 5.0 / 3.0), max_relative = 1e-14);
            // argument is -1 at the outer band edge
            let edge = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(akhiezer_even_value(m, 0.4, 1.0), edge, epsilon = 1e-12);
            assert_abs_diff_eq!(akhiezer_even_value(m, 0.4, 0.4), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn remez_constant_examples() {
        assert_relative_eq!(remez_constant(1, 1.0 / 3.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(remez_constant(2, 1.0 / 3.0), 7.0, max_relative = 1e-14);
        assert_eq!(remez_constant(10, 0.4), remez_poly_value(10, 0.4, -1.0));
    }

    #[test]
    fn clenshaw_examples() {
        assert_abs_diff_eq!(ChebPoly::new(vec![0.0, 1.0]).unwrap().eval(0.3), 0.3, epsilon = 1e-16);
        assert_eq!(ChebPoly::new(vec![1.0]).unwrap().eval(123.0), 1.0);
        assert_relative_eq!(ChebPoly::new(vec![0.0, 0.0, 1.0]).unwrap().eval(2.0), 7.0, max_relative = 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ChebPoly::new(vec![0.3, -1.2, 0.7, 0.25, -0.5, 0.1]).unwrap();
        let d = p.derivative();
        assert_eq!(d.degree(), 4);
        for &x in &[-0.9, -0.2, 0.4, 1.3] {
            let h = 1e-6;
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(d.eval(x), fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn ln_cheb_matches_direct_value() {
        assert_relative_eq!(ln_cheb_t(7, 2.5).unwrap(), cheb_t(7, 2.5).ln(), max_relative = 1e-14);
        assert!(ln_cheb_t(2000, 19.0).unwrap().is_finite());
        assert!(ln_cheb_t(3, 0.5).is_err());
    }

    #[test]
    fn serde_shape() {
        let p = ChebPoly::new(vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"degree":2,"coeffs":[1.0,0.0,2.0]}"#);
        assert!(serde_json::from_str::<ChebPoly>(r#"{"degree":3,"coeffs":[1.0]}"#).is_err());
    }

    #[test]
    fn degree_deficiency_flag() {
        assert!(ChebPoly::new(vec![1.0, 2.0, 1e-14]).unwrap().is_degree_deficient(1e-10));
        assert!(!ChebPoly::new(vec![1.0, 2.0, 1e-3]).unwrap().is_degree_deficient(1e-10));
    }

    #[test]
    fn matches_exact_recurrence_on_grid() {
        for n in [0u32, 1, 2, 7, 31, 100, 200] {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64 + 0.013;
                let exact = cheb_exact(n, x);
                let got = cheb_t(n, x);
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} x={x}: {got} vs {exact}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_on_unit_interval(n in 0u32..10_000, x in -1.0f64..=1.0) {
            prop_assert!(cheb_t(n, x).abs() <= 1.0);
        }

        #[test]
        fn parity(n in 0u32..300, x in -10.0f64..10.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = cheb_t(n, -x);
            let rhs = sign * cheb_t(n, x);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn agrees_with_exact_recurrence(n in 0u32..=200, x in -10.0f64..10.0) {
            let exact = cheb_exact(n, x);
            let got = cheb_t(n, x);
            prop_assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={} x={} got={} exact={}", n, x, got, exact);
        }

        #[test]
        fn remez_value_nondecreasing_in_delta(n in 1u32..40, d1 in 0.05f64..0.9, step in 0.0f64..0.09, t in 0.0f64..1.0) {
            let d2 = d1 + step;
            // x0 in [-1, -1 + 2 d1] keeps both arguments >= 1
            let x0 = -1.0 + 2.0 * d1 * t;
            let r1 = remez_poly_value(n, d1, x0);
            let r2 = remez_poly_value(n, d2, x0);
            prop_assert!(r2 >= r1 * (1.0 - 1e-13));
        }

        #[test]
        fn clenshaw_matches_direct_sum(coeffs in proptest::collection::vec(-2.0f64..2.0, 1..12), x in -1.5f64..1.5) {
            let p = ChebPoly::new(coeffs.clone()).unwrap();
            let direct: f64 = coeffs.iter().enumerate().map(|(k, c)| c * cheb_t(k as u32, x)).sum();
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| (c * cheb_t(k as u32, x)).abs()).sum();
            prop_assert!((p.eval(x) - direct).abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
